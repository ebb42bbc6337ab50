"""Pure-Python search kernels (reference implementation, unbounded fluent count)."""

from bisect import bisect_left

NAME = "python"
MAX_FLUENTS = None


def regress_layer(states, actions):
    """Non-sensing regression of every state by every action.

    ``states`` holds ``(T, F)`` masks, ``actions`` holds
    ``(pre_pos, pre_neg, add, delete)`` masks. Returns
    ``(state_index, action_index, T', F')`` for each applicable pair, in
    state-major, action-minor order.
    """
    out = []
    append = out.append
    for si, (T, F) in enumerate(states):
        for ai, (pp, pn, add, dele) in enumerate(actions):
            if not (add & T or dele & F):
                continue
            if add & F or dele & T or pp & F & ~dele or pn & T & ~add:
                continue
            append((si, ai, (T & ~add) | pp, (F & ~dele) | pn))
    return out


def _submasks(mask):
    sub = 0
    while True:
        yield sub
        if sub == mask:
            return
        sub = (sub - mask) & mask


def combine_branches(slots, init_T, init_F, outside, rest, first_new, seen):
    """Sensing-step candidates: one frontier state per outcome slot.

    ``slots[j]`` lists ``(index, T, F)`` sorted by index. A choice is kept
    when the chosen states, restricted to ``outside`` and seeded with
    ``(init_T, init_F)``, are jointly consistent and at least one chosen
    index is ``>= first_new``. Each consistent union is then completed on the
    ``rest`` fluents it leaves unknown, in every way. Results equal to a
    ``(T, F)`` pair in ``seen`` or to an earlier result are skipped.

    Returns ``(results, consistent)`` where ``results`` lists
    ``(indices, T, F)`` in lexicographic order of the slot positions and
    ``consistent`` counts the consistent choices examined.
    """
    k = len(slots)
    new_start = [bisect_left([c[0] for c in slot], first_new) for slot in slots]
    has_new_after = [False] * (k + 1)
    for j in range(k - 1, -1, -1):
        has_new_after[j] = has_new_after[j + 1] or new_start[j] < len(slots[j])
    known = set(seen)
    results = []
    chosen = [0] * k
    consistent = 0

    def dfs(j, uT, uF, any_new):
        nonlocal consistent
        if j == k:
            consistent += 1
            unknown = rest & ~(uT | uF)
            for choice in _submasks(unknown):
                key = (uT | choice, uF | (unknown & ~choice))
                if key not in known:
                    known.add(key)
                    results.append((tuple(chosen), key[0], key[1]))
            return
        if not any_new and not has_new_after[j]:
            return
        slot = slots[j]
        start = 0
        if not any_new and not has_new_after[j + 1]:
            start = new_start[j]
        for pos in range(start, len(slot)):
            idx, T, F = slot[pos]
            T &= outside
            F &= outside
            if T & uF or F & uT:
                continue
            chosen[j] = idx
            dfs(j + 1, uT | T, uF | F, any_new or idx >= first_new)

    if k and has_new_after[0]:
        dfs(0, init_T & outside, init_F & outside, False)
    return results, consistent

"""Structural plan theory: normal forms, subplans, redundancy, guard factoring.

These are verification tools for small plans. The subplan closure is
exponential, so redundancy checks run under an explicit cap.
"""

from __future__ import annotations

from collections import deque
from typing import Iterator, Optional, Sequence, Tuple

from .model import (
    EMPTY,
    Act,
    Case,
    Literals,
    Plan,
    ResourceLimitError,
    Seq,
    bits,
    case_plans,
    popcount,
    seq,
    steps,
    submasks,
)
from .progression import DEFAULT_SENSE_CAP, achieves

DEFAULT_SUBPLAN_CAP = 100_000


# --- normal form -------------------------------------------------------------


def normalize(plan: Plan) -> Plan:
    """Push everything after the first case plan into each of its branches."""
    items = steps(plan)
    for k, node in enumerate(items):
        if isinstance(node, Case):
            rest = items[k + 1:]
            branches = [(g, normalize(seq(p, *rest))) for g, p in node.branches]
            return seq(*items[:k], Case(node.sensor, branches))
    return seq(*items)


def is_normalized(plan: Plan) -> bool:
    """A (possibly empty) run of non-sensing actions, then at most one case plan
    whose branches are themselves normalized."""
    items = steps(plan)
    for k, node in enumerate(items):
        if isinstance(node, Case):
            return k == len(items) - 1 and all(is_normalized(p) for _, p in node.branches)
    return True


# --- subplans ----------------------------------------------------------------


def _join(first: Plan, second: Plan) -> Plan:
    if first is EMPTY:
        return second
    if second is EMPTY:
        return first
    return Seq(first, second)


def one_step_subplans(plan: Plan, weaken_sensors: bool = True) -> Iterator[Plan]:
    """Plans obtained by a single removal or sensor weakening.

    With ``weaken_sensors=False`` sensing actions are never replaced by sub
    sensing actions, so a plan that senses an already known fluent does not
    count as redundant on that account alone.
    """
    if isinstance(plan, Act):
        yield EMPTY
    elif isinstance(plan, Seq):
        for sub in one_step_subplans(plan.first, weaken_sensors):
            yield _join(sub, plan.second)
        for sub in one_step_subplans(plan.second, weaken_sensors):
            yield _join(plan.first, sub)
    elif isinstance(plan, Case):
        yield EMPTY
        branches = plan.branches
        if len(branches) > 1:
            for i in range(len(branches)):
                yield Case(plan.sensor, branches[:i] + branches[i + 1:])
        sense = plan.sensor.sense
        if weaken_sensors:
            for sub_sense in submasks(sense):
                if sub_sense and sub_sense != sense:
                    yield Case(plan.sensor.restricted(sub_sense), branches)
        for i, (guard, branch) in enumerate(branches):
            for sub in one_step_subplans(branch, weaken_sensors):
                yield Case(plan.sensor, branches[:i] + ((guard, sub),) + branches[i + 1:])


def subplans(plan: Plan, cap: int = DEFAULT_SUBPLAN_CAP,
             weaken_sensors: bool = True) -> Iterator[Plan]:
    """Every proper subplan of ``plan`` (transitive closure), deduplicated.

    Raises ResourceLimitError once more than ``cap`` distinct subplans appear.
    """
    seen = {plan}
    queue = deque([plan])
    count = 0
    while queue:
        current = queue.popleft()
        for sub in one_step_subplans(current, weaken_sensors):
            if sub in seen:
                continue
            seen.add(sub)
            count += 1
            if count > cap:
                raise ResourceLimitError(f"subplan closure exceeds cap {cap}")
            yield sub
            queue.append(sub)


def is_redundant(plan: Plan, sigma, delta, cap: int = DEFAULT_SUBPLAN_CAP,
                 sense_cap: int = DEFAULT_SENSE_CAP, weaken_sensors: bool = True) -> bool:
    """Some strict subplan also achieves ``delta`` from ``sigma``.

    False when ``plan`` itself does not achieve ``delta``.
    """
    if not achieves(plan, sigma, delta, sense_cap):
        return False
    return any(achieves(sub, sigma, delta, sense_cap)
               for sub in subplans(plan, cap, weaken_sensors))


def equivalent(c1: Plan, c2: Plan, sigma, delta, sense_cap: int = DEFAULT_SENSE_CAP) -> bool:
    if not achieves(c1, sigma, delta, sense_cap):
        raise ValueError("reference plan does not achieve delta from sigma")
    return achieves(c2, sigma, delta, sense_cap)


# --- binary representations and spanning ------------------------------------


def bin_representations(S: int) -> list:
    """BIN(S): all sign assignments to S; the all-positive one first, first fluent slowest."""
    if not S:
        raise ValueError("BIN needs a non-empty fluent set")
    fluents = list(bits(S))
    k = len(fluents)
    out = []
    for code in range(1 << k):
        neg = 0
        for j, f in enumerate(fluents):
            if code >> (k - 1 - j) & 1:
                neg |= 1 << f
        out.append(Literals(S & ~neg, neg))
    return out


def spans_over(chi: Sequence[Literals]) -> Optional[Tuple[int, Literals]]:
    """Factor ``chi`` as a shared conjunction times BIN(S); ``(S, phi)`` or None.

    S can only be the set of fluents whose sign differs across ``chi``.
    """
    chi = list(chi)
    if not chi or any(not g.consistent for g in chi):
        return None
    pos = neg = 0
    for g in chi:
        pos |= g.pos
        neg |= g.neg
    S = pos & neg
    if not S or len(chi) != 1 << popcount(S):
        return None
    keep = ~S
    phi = Literals(chi[0].pos & keep, chi[0].neg & keep)
    patterns = set()
    for g in chi:
        if g.fluents & S != S:
            return None
        if g.pos & keep != phi.pos or g.neg & keep != phi.neg:
            return None
        patterns.add(g.pos & S)
    if len(patterns) != len(chi) or phi in chi:
        return None
    return S, phi


def possibly_regressable(plan: Case) -> bool:
    if not isinstance(plan, Case):
        raise TypeError("possibly_regressable expects a case plan")
    found = spans_over(plan.guards)
    if found is None:
        return False
    S, _ = found
    sense = plan.sensor.sense
    if S & ~sense:
        return False
    return all(g.fluents & sense == sense for g in plan.guards)


def is_regressable(plan: Plan, sigma, delta, cap: int = DEFAULT_SUBPLAN_CAP,
                   sense_cap: int = DEFAULT_SENSE_CAP, weaken_sensors: bool = True) -> bool:
    if not all(possibly_regressable(p) for p in case_plans(plan)):
        return False
    if not achieves(plan, sigma, delta, sense_cap):
        return False
    return not is_redundant(plan, sigma, delta, cap, sense_cap, weaken_sensors)

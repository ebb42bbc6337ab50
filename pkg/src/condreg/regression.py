"""State-based regression over p-states for non-sensing and sensing actions.

Sensing regression works on a *list* of p-states (one per outcome branch).
Branch order is kept for plan reconstruction, but the tests below treat the
list as a set, and duplicate members are a caller error.
"""

from __future__ import annotations

from typing import Optional, Sequence

from .model import (
    BOTTOM,
    EMPTY,
    Act,
    Case,
    Plan,
    PState,
    Seq,
    popcount,
    submasks,
)


def applicable_nonsensing(action, delta: PState) -> bool:
    T, F = delta.T, delta.F
    add, dele, pre = action.add, action.delete, action.pre
    relevant = bool(add & T or dele & F)
    return (
        relevant
        and not add & F
        and not dele & T
        and not (pre.pos & F & ~dele)
        and not (pre.neg & T & ~add)
    )


def regress_nonsensing(action, delta):
    if delta is BOTTOM or not applicable_nonsensing(action, delta):
        return BOTTOM
    pre = action.pre
    return PState((delta.T & ~action.add) | pre.pos, (delta.F & ~action.delete) | pre.neg)


def _check_members(deltas: Sequence[PState]) -> None:
    if any(d is BOTTOM for d in deltas):
        raise ValueError("BOTTOM member in a p-state set")
    if len(set(deltas)) != len(deltas):
        raise ValueError("p-state set has duplicate members")


def _sensed_known(action, deltas) -> bool:
    sense = action.sense
    return all(not (sense & ~(d.T | d.F)) for d in deltas)


def is_proper(action, deltas: Sequence[PState], X: int) -> bool:
    """Properness of ``deltas`` with respect to a candidate sensed set ``X``.

    Checked clause by clause against the definition; ``sensed_set`` uses a
    faster characterization and is cross-checked against this in the tests.
    """
    _check_members(deltas)
    if not X or X & ~action.sense:
        return False
    if not _sensed_known(action, deltas):
        return False
    if len(deltas) != 1 << popcount(X):
        return False
    for P in submasks(X):
        Q = X & ~P
        hits = sum(1 for d in deltas if d.T & X == P and d.F & X == Q)
        if hits != 1:
            return False
    first = deltas[0]
    return all(d.T & ~X == first.T & ~X and d.F & ~X == first.F & ~X for d in deltas)


def _varying_sensed(action, deltas) -> int:
    # sensed fluents are known everywhere here, so the T side alone fixes values
    base = deltas[0].T
    varying = 0
    for d in deltas[1:]:
        varying |= (d.T ^ base) & action.sense
    return varying


def _realizes_all_patterns(deltas, X: int) -> bool:
    return len(deltas) == 1 << popcount(X) and len({d.T & X for d in deltas}) == len(deltas)


def sensed_set(action, deltas: Sequence[PState]) -> Optional[int]:
    """The unique sensed set of ``deltas`` w.r.t. ``action``, or None if not proper.

    Any sensed set must be exactly the sensed fluents on which the members
    disagree, so only that one candidate is tested.
    """
    _check_members(deltas)
    if not deltas or not _sensed_known(action, deltas):
        return None
    X = _varying_sensed(action, deltas)
    if not X or not _realizes_all_patterns(deltas, X):
        return None
    first = deltas[0]
    keep = ~X
    for d in deltas:
        if d.T & keep != first.T & keep or d.F & keep != first.F & keep:
            return None
    return X


def strongly_applicable(action, deltas: Sequence[PState]) -> bool:
    if sensed_set(action, deltas) is None:
        return False
    pre = action.pre
    return all(not (pre.pos & d.F) and not (pre.neg & d.T) for d in deltas)


def applicable_sensing(action, deltas: Sequence[PState]) -> Optional[int]:
    """S_{a,Delta} if ``action`` is applicable in ``deltas``, else None.

    The witness extension is built constructively: every member is extended
    outside the candidate sensed set by the union of all members there. It is
    the least extension that can make the members agree, so it exists iff any
    witness does, and every witness yields the same sensed set.
    """
    _check_members(deltas)
    if not deltas or not _sensed_known(action, deltas):
        return None
    X = _varying_sensed(action, deltas)
    if not X or not _realizes_all_patterns(deltas, X):
        return None
    keep = ~X
    T_out = F_out = 0
    for d in deltas:
        T_out |= d.T & keep
        F_out |= d.F & keep
    if T_out & F_out:
        return None
    pre = action.pre
    if pre.pos & F_out or pre.neg & T_out:
        return None
    return X


def regress_sensing(action, deltas: Sequence[PState]):
    if not deltas or any(d is BOTTOM for d in deltas):
        return BOTTOM
    X = applicable_sensing(action, deltas)
    if X is None:
        return BOTTOM
    T = F = 0
    for d in deltas:
        T |= d.T
        F |= d.F
    pre = action.pre
    return PState((T & ~X) | pre.pos, (F & ~X) | pre.neg)


def guarded(delta, guard):
    """R(c_i, delta): conjoin a branch guard onto a regressed p-state."""
    if delta is BOTTOM or guard.pos & delta.F or guard.neg & delta.T:
        return BOTTOM
    return PState(delta.T | guard.pos, delta.F | guard.neg)


def regress_plan(plan: Plan, delta):
    """Regress*(c, delta)."""
    if delta is BOTTOM:
        return BOTTOM
    if plan is EMPTY:
        return delta
    if isinstance(plan, Act):
        return regress_nonsensing(plan.action, delta)
    if isinstance(plan, Seq):
        return regress_plan(plan.first, regress_plan(plan.second, delta))
    if isinstance(plan, Case):
        members = []
        for guard, branch in plan.branches:
            r = guarded(regress_plan(branch, delta), guard)
            if r is BOTTOM:
                return BOTTOM
            members.append(r)
        return regress_sensing(plan.sensor, members)
    raise TypeError(f"not a plan: {plan!r}")


def is_regression_solution(plan: Plan, problem) -> bool:
    delta = regress_plan(plan, problem.delta_goal)
    if delta is BOTTOM:
        return False
    sigma = problem.sigma_init
    return not (delta.T & ~sigma.T) and not (delta.F & ~sigma.F)

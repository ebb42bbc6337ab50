"""Forward semantics of the 0-approximation over a-states.

This is the reference the regression planner is validated against, so it is
kept deliberately literal.
"""

from __future__ import annotations

from .model import (
    BOTTOM,
    EMPTY,
    Act,
    AState,
    Case,
    Plan,
    ResourceLimitError,
    Seq,
    canonical,
    holds,
    in_extension,
    popcount,
    submasks,
)

DEFAULT_SENSE_CAP = 16


def executable(action, sigma: AState) -> bool:
    return holds(action.pre, sigma)


def progress(action, sigma: AState, sense_cap: int = DEFAULT_SENSE_CAP) -> tuple:
    """Phi(a, sigma), canonically ordered.

    A sensing action yields one a-state for every way of fixing the sensed
    fluents that are still unknown in ``sigma``.
    """
    if not executable(action, sigma):
        return (BOTTOM,)
    T, F = sigma.T, sigma.F
    if not action.is_sensing:
        return (AState((T & ~action.delete) | action.add, (F & ~action.add) | action.delete),)
    unknown = action.sense & ~(T | F)
    if popcount(unknown) > sense_cap:
        raise ResourceLimitError(
            f"{action.name}: {popcount(unknown)} unknown sensed fluents exceeds cap {sense_cap}"
        )
    return canonical(AState(T | p, F | (unknown & ~p)) for p in submasks(unknown))


def _progress_set(plan: Plan, sigma, sense_cap: int) -> set:
    if sigma is BOTTOM:
        return {BOTTOM}
    if plan is EMPTY:
        return {sigma}
    if isinstance(plan, Act):
        return set(progress(plan.action, sigma, sense_cap))
    if isinstance(plan, Seq):
        out = set()
        for mid in _progress_set(plan.first, sigma, sense_cap):
            out |= _progress_set(plan.second, mid, sense_cap)
        return out
    if isinstance(plan, Case):
        out = set()
        for outcome in progress(plan.sensor, sigma, sense_cap):
            if outcome is BOTTOM:
                out.add(BOTTOM)
                continue
            for guard, branch in plan.branches:
                if holds(guard, outcome):
                    out |= _progress_set(branch, outcome, sense_cap)
                    break
            else:
                out.add(BOTTOM)
        return out
    raise TypeError(f"not a plan: {plan!r}")


def progress_plan(plan: Plan, sigma, sense_cap: int = DEFAULT_SENSE_CAP) -> tuple:
    """Phi*(c, sigma): every a-state the plan may end in, BOTTOM included on failure."""
    return canonical(_progress_set(plan, sigma, sense_cap))


def achieves(plan: Plan, sigma, delta, sense_cap: int = DEFAULT_SENSE_CAP) -> bool:
    """BOTTOM not in Phi*(c, sigma) and every result lies in ext(delta)."""
    results = _progress_set(plan, sigma, sense_cap)
    return BOTTOM not in results and all(in_extension(s, delta) for s in results)


def is_progression_solution(plan: Plan, problem, sense_cap: int = DEFAULT_SENSE_CAP) -> bool:
    return achieves(plan, problem.sigma_init, problem.delta_goal, sense_cap)

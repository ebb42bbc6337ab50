"""Regression search for conditional plans.

The frontier holds plan-state pairs ``<c, delta>`` with
``Regress*(c, delta_G) = delta``. Each outer iteration first regresses every
unexpanded pair through the non-sensing actions until nothing new appears,
then runs one round of sensing steps that assemble case plans from groups
of frontier pairs. The search stops at the first pair whose p-state is
satisfied by the initial a-state, or when an iteration adds nothing.

Both expansions are semi-naive: a pair is regressed through non-sensing
actions once, and a sensing combination is only evaluated in the first
round in which all of its members exist.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import List, Optional

from . import kernels
from .calculus import bin_representations
from .model import (
    EMPTY,
    Act,
    Case,
    Literals,
    Plan,
    PState,
    ResourceLimitError,
    Seq,
    in_extension,
    popcount,
    submasks,
)
from .regression import regress_plan


@dataclass
class SearchOptions:
    max_pairs: int = 1_000_000
    find_all: bool = False
    trace: bool = False
    # re-derive Regress*(plan, delta_G) for every inserted pair
    check_invariants: bool = False
    # drop p-states implied by one already in the frontier
    prune_subsumed: bool = False
    backend: str = "auto"


@dataclass
class PlanState:
    plan: Plan
    pstate: PState
    iteration: int
    action: Optional[str] = None
    sources: tuple = ()


@dataclass
class SearchStats:
    iterations: int = 0
    pairs: int = 0
    generated: int = 0
    sensing_attempts: int = 0
    millis: float = 0.0

    def as_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "pairs": self.pairs,
            "generated": self.generated,
            "sensing_attempts": self.sensing_attempts,
            "millis": round(self.millis, 3),
        }


class Frontier:
    """Insertion-ordered plan-state pairs, at most one per p-state."""

    def __init__(self):
        self.pairs: List[PlanState] = []
        self.seen = {}

    def __len__(self):
        return len(self.pairs)

    def __contains__(self, pstate) -> bool:
        return pstate in self.seen

    def __getitem__(self, i) -> PlanState:
        return self.pairs[i]

    def add(self, pair: PlanState) -> int:
        if pair.pstate in self.seen:
            raise ValueError("p-state already in the frontier")
        self.seen[pair.pstate] = len(self.pairs)
        self.pairs.append(pair)
        return len(self.pairs) - 1

    def subsumes(self, pstate: PState) -> bool:
        T, F = pstate.T, pstate.F
        return any(not (d.T & ~T) and not (d.F & ~F) for d in self.seen)


class SearchLimitExceeded(ResourceLimitError):
    def __init__(self, message, stats):
        super().__init__(message)
        self.stats = stats


@dataclass
class Solution:
    plan: Plan
    pstate: PState
    index: int
    stats: SearchStats
    frontier: Frontier
    solutions: List[int] = field(default_factory=list)

    found = True

    def derivation(self, index: Optional[int] = None) -> List[PlanState]:
        """The pairs the given solution pair was built from, in insertion order."""
        return derivation(self.frontier, self.index if index is None else index)


@dataclass
class NoSolution:
    stats: SearchStats
    frontier: Frontier
    solutions: List[int] = field(default_factory=list)

    found = False


def derivation(frontier: Frontier, index: int) -> List[PlanState]:
    needed = set()
    stack = [index]
    while stack:
        i = stack.pop()
        if i in needed:
            continue
        needed.add(i)
        stack.extend(frontier[i].sources)
    return [frontier[i] for i in sorted(needed)]


def _action_table(actions):
    return [(a.pre.pos, a.pre.neg, a.add, a.delete) for a in actions]


def expand_nonsensing(frontier: Frontier, problem, start: int = 0, kernel=None,
                      iteration: int = 0) -> List[PlanState]:
    """Regress pairs ``start:`` through every non-sensing action.

    Results already in the frontier, or repeated within the batch, are dropped.
    """
    kernel = kernel or kernels.for_fluents(len(problem.vocab))
    actions = problem.domain.nonsensing
    pairs = frontier.pairs[start:]
    states = [(p.pstate.T, p.pstate.F) for p in pairs]
    out = []
    batch = set()
    for si, ai, T, F in kernel.regress_layer(states, _action_table(actions)):
        delta = PState(T, F)
        if delta in frontier or delta in batch:
            continue
        batch.add(delta)
        source = pairs[si]
        act = Act(actions[ai])
        plan = act if source.plan is EMPTY else Seq(act, source.plan)
        out.append(PlanState(plan, delta, iteration, actions[ai].name, (start + si,)))
    return out


def _subsets_by_size(mask: int):
    subs = [s for s in submasks(mask) if s]
    subs.sort(key=lambda s: (popcount(s), s))
    return subs


class _SensingCounter:
    attempts = 0


def expand_sensing(frontier: Frontier, problem, first_new: int = 0, kernel=None,
                   iteration: int = 0, require_mention: bool = False,
                   counter: Optional[_SensingCounter] = None) -> List[PlanState]:
    """Assemble case plans from frontier pairs, one pair per outcome guard.

    For a sensing action ``a`` and sensed subset ``S``, each member of
    ``BIN(S)`` gets a frontier pair whose p-state does not contradict it. The
    chosen p-states (plus the precondition) must be jointly consistent
    outside ``S``. Guards are the ``BIN(S)`` member conjoined with the shared
    value of every other sensed fluent; a sensed fluent none of the members
    know is tried both ways. At least one member must come from
    ``first_new:``. With ``require_mention`` each member must mention some
    fluent of ``S`` (combinations violating this are implied by a member).
    """
    kernel = kernel or kernels.for_fluents(len(problem.vocab))
    full = problem.vocab.full
    pairs = frontier.pairs
    out = []
    batch = set()
    for action in problem.domain.sensing:
        pre = action.pre
        usable = [
            (i, p.pstate.T, p.pstate.F)
            for i, p in enumerate(pairs)
            if not (pre.pos & p.pstate.F) and not (pre.neg & p.pstate.T)
        ]
        for S in _subsets_by_size(action.sense):
            psis = bin_representations(S)
            rest = action.sense & ~S
            slots = []
            for psi in psis:
                slot = [
                    c for c in usable
                    if not (c[1] & psi.neg) and not (c[2] & psi.pos)
                    and (not require_mention or (c[1] | c[2]) & S)
                ]
                if not slot:
                    break
                slots.append(slot)
            else:
                seen = [(d.T, d.F) for d in frontier.seen]
                seen.extend((d.T, d.F) for d in batch)
                found, consistent = kernel.combine_branches(
                    slots, pre.pos, pre.neg, full & ~S, rest, first_new, seen)
                if counter is not None:
                    counter.attempts += consistent
                for chosen, T, F in found:
                    delta = PState(T, F)
                    batch.add(delta)
                    shared = Literals(T & rest, F & rest)
                    branches = [(psi & shared, pairs[i].plan) for psi, i in zip(psis, chosen)]
                    out.append(PlanState(Case(action, branches), delta, iteration,
                                         action.name, tuple(chosen)))
    return out


def solve(problem, options: Optional[SearchOptions] = None):
    """Search for a regression solution; returns ``Solution`` or ``NoSolution``.

    Raises ``SearchLimitExceeded`` when the frontier would exceed
    ``options.max_pairs``.
    """
    opts = options or SearchOptions()
    started = time.perf_counter()
    kernel = kernels.for_fluents(len(problem.vocab), opts.backend)
    goal = problem.delta_goal
    sigma = problem.sigma_init
    frontier = Frontier()
    stats = SearchStats()
    counter = _SensingCounter()
    solutions: List[int] = []

    def finish(result_cls):
        stats.pairs = len(frontier)
        stats.sensing_attempts = counter.attempts
        stats.millis = (time.perf_counter() - started) * 1000.0
        if result_cls is NoSolution:
            return NoSolution(stats, frontier)
        first = frontier[solutions[0]]
        return Solution(first.plan, first.pstate, solutions[0], stats, frontier, solutions)

    def insert(pair: PlanState) -> bool:
        """Add ``pair``; True if the search should stop."""
        if opts.prune_subsumed and frontier.subsumes(pair.pstate):
            return False
        if len(frontier) >= opts.max_pairs:
            stats.pairs = len(frontier)
            stats.sensing_attempts = counter.attempts
            stats.millis = (time.perf_counter() - started) * 1000.0
            raise SearchLimitExceeded(f"frontier exceeds max_pairs={opts.max_pairs}", stats)
        if opts.check_invariants:
            regressed = regress_plan(pair.plan, goal)
            if regressed != pair.pstate:
                raise AssertionError(
                    f"pair {len(frontier)}: Regress* gives {regressed}, stored {pair.pstate}"
                )
        index = frontier.add(pair)
        if in_extension(sigma, pair.pstate):
            solutions.append(index)
            return not opts.find_all
        return False

    if insert(PlanState(EMPTY, goal, 0)):
        return finish(Solution)

    expanded = 0
    combined = 0
    while True:
        stats.iterations += 1
        iteration = stats.iterations
        size_before = len(frontier)
        while expanded < len(frontier):
            start, expanded = expanded, len(frontier)
            batch = expand_nonsensing(frontier, problem, start, kernel, iteration)
            stats.generated += len(batch)
            for pair in batch:
                if insert(pair):
                    return finish(Solution)
        start, combined = combined, len(frontier)
        batch = expand_sensing(frontier, problem, start, kernel, iteration,
                               require_mention=opts.prune_subsumed, counter=counter)
        stats.generated += len(batch)
        for pair in batch:
            if insert(pair):
                return finish(Solution)
        if len(frontier) == size_before:
            break
    return finish(Solution if solutions else NoSolution)

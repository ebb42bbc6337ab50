"""Independent oracles and random generators shared by the test suites.

Nothing here calls the regression planner: the forward solver only uses the
a-state transition function, so it can be used to check the search.
"""

from __future__ import annotations

import itertools
import random
from functools import lru_cache

from condreg.model import (
    BOTTOM,
    EMPTY,
    Act,
    AState,
    Case,
    Domain,
    Literals,
    NonSensing,
    Problem,
    PState,
    Sensing,
    Vocabulary,
    bits,
    holds,
    seq,
    submasks,
)
from condreg.progression import progress


# --- random vocabularies, actions and problems -------------------------------


def random_literals(rng: random.Random, mask: int, p: float = 0.3) -> Literals:
    """Each fluent of ``mask`` appears with probability ``p``, either sign."""
    pos = neg = 0
    for i in bits(mask):
        if rng.random() < p:
            if rng.random() < 0.5:
                pos |= 1 << i
            else:
                neg |= 1 << i
    return Literals(pos, neg)


def random_subset(rng: random.Random, mask: int, p: float = 0.5) -> int:
    return sum(1 << i for i in bits(mask) if rng.random() < p)


def random_nonsensing(rng, full, name, pre_p=0.3):
    while True:
        add = random_subset(rng, full, 0.3)
        delete = random_subset(rng, full & ~add, 0.25)
        if add | delete:
            return NonSensing(name, random_literals(rng, full, pre_p), add, delete)


def random_sensing(rng, full, name, pre_p=0.25, max_sense=2):
    n = max(1, rng.randint(1, max_sense))
    pool = list(bits(full))
    sense = sum(1 << i for i in rng.sample(pool, min(n, len(pool))))
    return Sensing(name, random_literals(rng, full & ~sense, pre_p), sense)


def random_domain(rng, n_fluents, n_nonsensing, n_sensing, max_sense=2, name="rand"):
    vocab = Vocabulary(f"f{i}" for i in range(n_fluents))
    full = vocab.full
    actions = [random_nonsensing(rng, full, f"a{i}") for i in range(n_nonsensing)]
    actions += [random_sensing(rng, full, f"s{i}", max_sense=max_sense) for i in range(n_sensing)]
    return Domain(name, vocab, actions)


def random_problem(rng, max_fluents=6, max_nonsensing=3, max_sensing=2, init_p=0.6):
    n = rng.randint(2, max_fluents)
    domain = random_domain(rng, n, rng.randint(1, max_nonsensing), rng.randint(0, max_sensing))
    full = domain.vocab.full
    init = random_literals(rng, full, init_p)
    goal = Literals(0, 0)
    while not goal.fluents:
        goal = random_literals(rng, full, 0.35)
    return Problem("rand", domain, init, goal)


def random_pstate(rng, mask, p=0.4) -> PState:
    lits = random_literals(rng, mask, p)
    return PState(lits.pos, lits.neg)


def random_astate(rng, mask, p=0.6) -> AState:
    lits = random_literals(rng, mask, p)
    return AState(lits.pos, lits.neg)


# --- extensions of p-states --------------------------------------------------


def extensions(delta: PState, full: int):
    """Every a-state in ext(delta): each unknown fluent true, false or unknown."""
    unknown = list(bits(full & ~(delta.T | delta.F)))
    for values in itertools.product((0, 1, 2), repeat=len(unknown)):
        T, F = delta.T, delta.F
        for i, v in zip(unknown, values):
            if v == 1:
                T |= 1 << i
            elif v == 2:
                F |= 1 << i
        yield AState(T, F)


def sample_extension(rng, delta: PState, full: int) -> AState:
    T, F = delta.T, delta.F
    for i in bits(full & ~(delta.T | delta.F)):
        v = rng.randrange(3)
        if v == 1:
            T |= 1 << i
        elif v == 2:
            F |= 1 << i
    return AState(T, F)


def extension_sample(rng, delta, full, exhaustive_limit=10, samples=200):
    unknown = bin(full & ~(delta.T | delta.F)).count("1")
    if unknown <= exhaustive_limit:
        return list(extensions(delta, full))
    return [sample_extension(rng, delta, full) for _ in range(samples)]


# --- random plans -------------------------------------------------------------


def guard_patterns(S: int):
    """All sign patterns over the fluents of ``S`` as literal sets."""
    return [Literals(p, S & ~p) for p in submasks(S)]


def random_case(rng, domain, depth, drop_p=0.15):
    sensors = domain.sensing
    a = rng.choice(sensors)
    S = 0
    while not S:
        S = random_subset(rng, a.sense, 0.7)
    rest = a.sense & ~S
    shared = Literals(0, 0)
    if rest and rng.random() < 0.4:
        # fix the other sensed fluents too, as the planner does
        sp = random_subset(rng, rest, 0.5)
        shared = Literals(sp, rest & ~sp)
    branches = []
    for psi in guard_patterns(S):
        if branches and rng.random() < drop_p:
            continue
        branches.append((psi & shared, random_plan(rng, domain, depth - 1)))
    return Case(a, branches)


def random_plan(rng, domain, depth=3, max_steps=3):
    """Random well-formed conditional plan; cases may be followed by more steps."""
    if depth <= 0:
        return EMPTY
    parts = []
    for _ in range(rng.randint(0, max_steps)):
        if domain.sensing and rng.random() < 0.35:
            parts.append(random_case(rng, domain, depth))
        elif domain.nonsensing:
            parts.append(Act(rng.choice(domain.nonsensing)))
    return seq(*parts)


# --- forward AND-OR search over a-states --------------------------------------


def forward_solve(problem: Problem, depth: int = 4):
    """A depth-bounded progression solution, or None.

    Every branch of the returned plan has at most ``depth`` actions. A sensing
    step branches once per outcome a-state with a guard fixing all sensed
    fluents. Searching per a-state like this is equivalent to enumerating
    plan trees of that depth and evaluating each with Phi*.
    """
    goal, actions = problem.goal, problem.actions

    @lru_cache(maxsize=None)
    def solve(sigma: AState, budget: int):
        if holds(goal, sigma):
            return EMPTY
        if budget == 0:
            return None
        for a in actions:
            outcomes = progress(a, sigma)
            if BOTTOM in outcomes:
                continue
            if not a.is_sensing:
                if outcomes[0] == sigma:
                    continue
                sub = solve(outcomes[0], budget - 1)
                if sub is not None:
                    return seq(Act(a), sub)
                continue
            if len(outcomes) == 1:
                continue
            branches = []
            for out in outcomes:
                sub = solve(out, budget - 1)
                if sub is None:
                    break
                branches.append((Literals(out.T & a.sense, out.F & a.sense), sub))
            else:
                return Case(a, branches)
        return None

    return solve(problem.sigma_init, depth)


# --- random branch sets for sensing regression ---------------------------------


def random_branch_set(rng, full: int, action, drop_p=0.3, clash_p=0.1, vary_rest_p=0.05):
    """Distinct p-states shaped like the outcome branches of ``action``.

    Members realize every sign pattern of a random non-empty ``S`` within the
    sensed set, share values on the other sensed fluents, and carry random
    subsets of a common base elsewhere. With small probabilities a member
    gets a clashing literal or a differing sensed value, so the set is not
    always regressable.
    """
    sense = action.sense
    S = 0
    while not S:
        S = random_subset(rng, sense, 0.6)
    rest = sense & ~S
    rest_pos = random_subset(rng, rest, 0.5)
    base = random_literals(rng, full & ~sense, 0.5)
    members = []
    for p in submasks(S):
        T = p | rest_pos
        F = (S & ~p) | (rest & ~rest_pos)
        T |= random_subset(rng, base.pos, 1 - drop_p)
        F |= random_subset(rng, base.neg, 1 - drop_p)
        if rest and rng.random() < vary_rest_p:
            f = 1 << rng.choice(list(bits(rest)))
            T ^= f
            F ^= f
        if rng.random() < clash_p:
            free = full & ~sense & ~(T | F)
            if free:
                f = 1 << rng.choice(list(bits(free)))
                if rng.random() < 0.5:
                    T |= f
                else:
                    F |= f
        members.append(PState(T, F))
    rng.shuffle(members)
    if len(set(members)) != len(members):
        return random_branch_set(rng, full, action, drop_p, clash_p, vary_rest_p)
    return members


def partial_extensions(delta: PState, full: int):
    """Every p-state that extends ``delta`` (brute force, tiny vocabularies only)."""
    for a in extensions(delta, full):
        yield PState(a.T, a.F)

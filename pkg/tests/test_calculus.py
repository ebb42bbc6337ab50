import itertools
import random

import pytest

from condreg import fixtures
from condreg.calculus import (
    bin_representations,
    equivalent,
    is_normalized,
    is_redundant,
    is_regressable,
    normalize,
    one_step_subplans,
    possibly_regressable,
    spans_over,
    subplans,
)
from condreg.model import (
    BOTTOM,
    EMPTY,
    Act,
    AState,
    Case,
    Literals,
    PState,
    ResourceLimitError,
    Seq,
    Vocabulary,
    in_extension,
    plan_size,
    seq,
    submasks,
)
from condreg.progression import achieves, progress_plan
from condreg.regression import regress_plan

from oracles import random_astate, random_domain, random_plan, random_pstate


@pytest.fixture(scope="module")
def small():
    p = fixtures.load("redundancy-1")
    a, b = (Act(p.domain.action(n)) for n in ("a", "b"))
    return p, a, b


@pytest.fixture(scope="module")
def branches():
    p = fixtures.load("redundancy-2")
    full = fixtures.load_plan("redundancy-2", p)
    trimmed = Case(full.sensor, full.branches[:2])
    return p, full, trimmed


# --- normal form ---------------------------------------------------------------


def test_plain_sequence_is_its_own_normal_form(small):
    _, a, b = small
    plan = seq(a, b, a)
    assert normalize(plan) == plan
    assert is_normalized(plan)


def test_suffix_pushed_into_branches(evanston, act, evanston_plan):
    tail = Act(act("take-ashland"))
    plan = Seq(evanston_plan, tail)
    assert not is_normalized(plan)
    norm = normalize(plan)
    assert is_normalized(norm)
    assert isinstance(norm, Case)
    for (g1, p1), (g2, p2) in zip(norm.branches, evanston_plan.branches):
        assert g1 == g2 and p1 == seq(p2, tail)


def test_normalized_case_is_unchanged(branches):
    _, full, trimmed = branches
    assert normalize(full) == full and is_normalized(full)
    assert normalize(trimmed) == trimmed


@pytest.mark.parametrize("seed", range(60))
def test_normalize_preserves_outcomes(seed):
    rng = random.Random(seed)
    d = random_domain(rng, 4, 2, 2)
    plan = random_plan(rng, d, 3)
    norm = normalize(plan)
    assert is_normalized(norm)
    for _ in range(5):
        sigma = random_astate(rng, d.vocab.full)
        assert set(progress_plan(plan, sigma)) == set(progress_plan(norm, sigma))


# --- subplans ------------------------------------------------------------------


def test_subplans_of_repeated_action(small):
    _, a, _ = small
    assert a in set(subplans(Seq(a, a)))
    assert set(subplans(a)) == {EMPTY}


def test_subplans_include_trimmed_case(branches):
    _, full, trimmed = branches
    subs = set(subplans(full))
    assert trimmed in subs
    assert full not in subs


def test_sub_sensor_replacement(branches):
    _, full, _ = branches
    weakened = [s for s in one_step_subplans(full)
                if isinstance(s, Case) and s.sensor.sense != full.sensor.sense]
    assert {s.sensor.sense for s in weakened} == {1, 2}


@pytest.mark.parametrize("seed", range(30))
def test_subplans_shrink_and_deduplicate(seed):
    rng = random.Random(seed)
    d = random_domain(rng, 3, 2, 1)
    plan = random_plan(rng, d, 2)
    if plan_size(plan) > 10:
        return
    subs = list(subplans(plan, cap=50_000))
    assert len(subs) == len(set(subs))
    assert plan not in subs
    for s in one_step_subplans(plan):
        assert plan_size(s) < plan_size(plan)


def test_subplan_cap(evanston_plan):
    with pytest.raises(ResourceLimitError):
        list(subplans(evanston_plan, cap=3))


# --- redundancy and equivalence ----------------------------------------------


def test_redundancy_examples(small, branches):
    p, a, _ = small
    sigma, goal = p.sigma_init, p.delta_goal
    assert is_redundant(Seq(a, a), sigma, goal)
    assert not is_redundant(a, sigma, goal)
    q, full, trimmed = branches
    assert is_redundant(full, q.sigma_init, q.delta_goal)
    assert is_redundant(full, q.sigma_init, q.delta_goal, weaken_sensors=False)


def test_trimmed_case_redundant_only_through_sensor_weakening(branches):
    q, _, trimmed = branches
    sigma, goal = q.sigma_init, q.delta_goal
    # f is known initially, so sensing g alone suffices
    g_only = Case(trimmed.sensor.restricted(0b10), trimmed.branches)
    assert g_only in set(subplans(trimmed))
    assert achieves(g_only, sigma, goal)
    assert is_redundant(trimmed, sigma, goal)
    assert not is_redundant(trimmed, sigma, goal, weaken_sensors=False)


def test_equivalence_examples(small, branches, evanston, evanston_plan):
    p, a, _ = small
    assert equivalent(Seq(a, a), a, p.sigma_init, p.delta_goal)
    assert equivalent(a, a, p.sigma_init, p.delta_goal)
    q, full, trimmed = branches
    assert equivalent(full, trimmed, q.sigma_init, q.delta_goal)
    assert not equivalent(evanston_plan, EMPTY, evanston.sigma_init, evanston.delta_goal)
    with pytest.raises(ValueError):
        equivalent(EMPTY, evanston_plan, evanston.sigma_init, evanston.delta_goal)


# --- BIN and spans -------------------------------------------------------------


def test_bin_of_one_fluent(evanston):
    tb = 1 << evanston.vocab.index("traffic-bad")
    assert bin_representations(tb) == [Literals(tb, 0), Literals(0, tb)]


def test_bin_of_two_fluents():
    out = bin_representations(0b11)
    assert len(out) == 4 and len(set(out)) == 4
    assert out == bin_representations(0b11)
    assert out[0] == Literals(0b11, 0)
    with pytest.raises(ValueError):
        bin_representations(0)


def test_spans_examples(evanston):
    v = evanston.vocab
    chi = [v.literals(["on-ashland", "traffic-bad"]), v.literals(["on-ashland"], ["traffic-bad"])]
    assert spans_over(chi) == (v.mask(["traffic-bad"]), v.literals(["on-ashland"]))
    assert spans_over([Literals(1, 0), Literals(0, 1)]) == (1, Literals(0, 0))
    assert spans_over([Literals(0b11, 0), Literals(0, 0b11)]) is None


def _brute_spans(chi, n):
    """Every (S, phi) over n fluents with {phi & psi : psi in BIN(S)} == set(chi), phi not in chi."""
    full = (1 << n) - 1
    target = set(chi)
    found = []
    for S in submasks(full):
        if not S:
            continue
        rest = full & ~S
        for pos in submasks(rest):
            for neg in submasks(rest & ~pos):
                phi = Literals(pos, neg)
                if phi in target:
                    continue
                if {phi & psi for psi in bin_representations(S)} == target:
                    found.append((S, phi))
    return found


def _all_guards(n):
    full = (1 << n) - 1
    return [Literals(p, q) for p in submasks(full) for q in submasks(full & ~p)]


def test_spans_agrees_with_exhaustive_factoring():
    n = 3
    guards = _all_guards(n)
    rng = random.Random(3)
    cases = [list(c) for k in (1, 2, 4) for c in itertools.combinations(guards[:12], k)]
    cases += [rng.sample(guards, rng.choice([2, 4, 8])) for _ in range(300)]
    for chi in cases:
        brute = _brute_spans(chi, n)
        assert len(brute) <= 1
        assert spans_over(chi) == (brute[0] if brute else None)


# --- regressability ----------------------------------------------------------


def test_possibly_regressable(evanston_plan, branches, evanston, act):
    assert possibly_regressable(evanston_plan)
    _, full, trimmed = branches
    assert possibly_regressable(trimmed)
    # all four guards do factor as the empty conjunction times BIN({f, g});
    # the full plan fails regressability through redundancy instead
    assert possibly_regressable(full)
    v = evanston.vocab
    omits = Case(act("check-on-western"), [(v.literals(["traffic-bad"]), EMPTY),
                                          (v.literals([], ["traffic-bad"]), EMPTY)])
    assert not possibly_regressable(omits)
    with pytest.raises(TypeError):
        possibly_regressable(EMPTY)


def test_is_regressable(branches):
    p, full, trimmed = branches
    sigma, goal = p.sigma_init, p.delta_goal
    assert is_regressable(trimmed, sigma, goal, weaken_sensors=False)
    assert not is_regressable(trimmed, sigma, goal)
    assert not is_regressable(full, sigma, goal)
    assert not is_regressable(full, sigma, goal, weaken_sensors=False)
    assert is_regressable(EMPTY, AState(1, 0), PState(0, 0))


@pytest.mark.parametrize("weaken", [True, False])
@pytest.mark.parametrize("seed", range(300))
def test_regressable_plans_regress_to_a_covering_state(seed, weaken):
    rng = random.Random(seed)
    d = random_domain(rng, 3, 2, 1)
    plan = normalize(random_plan(rng, d, 3))
    if plan_size(plan) > 12:
        return
    sigma = random_astate(rng, d.vocab.full, 0.5)
    delta = random_pstate(rng, d.vocab.full, 0.4)
    if not achieves(plan, sigma, delta) or not is_regressable(plan, sigma, delta, cap=20_000,
                                                           weaken_sensors=weaken):
        return
    back = regress_plan(plan, delta)
    assert back is not BOTTOM and in_extension(sigma, back)

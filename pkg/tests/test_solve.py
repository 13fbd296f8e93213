"""Complete solver against brute force and the known fixtures."""

import itertools

import pytest

from oracle import all_levels, clause_ints
from satplateau.cnf import Assignment, Formula, level
from satplateau.generate import gen_cluster, gen_hard_solvable, gen_uniform
from satplateau.solve import SAT, UNKNOWN, UNSAT, solve


def all_sign_patterns():
    pats = [
        tuple((v + 1) * s for v, s in enumerate(signs))
        for signs in itertools.product((1, -1), repeat=3)
    ]
    return Formula.from_ints(3, pats)


def test_golden_is_sat_with_unique_model(golden):
    result = solve(golden)
    assert result.status == SAT
    assert result.model == Assignment.from_string("1111")


def test_all_sign_patterns_unsat():
    assert solve(all_sign_patterns()).status == UNSAT


def test_empty_formula_sat():
    result = solve(Formula(3, ()))
    assert result.status == SAT
    assert level(Formula(3, ()), result.model) == 0


def test_budget_exhaustion_is_explicit():
    f = gen_uniform(430, 100, 2)
    result = solve(f, budget=3)
    assert result.status == UNKNOWN
    assert result.model is None


def test_sat_model_satisfies_formula():
    for seed in range(20):
        f = gen_uniform(85, 20, seed)
        result = solve(f)
        if result.status == SAT:
            assert level(f, result.model) == 0


@pytest.mark.parametrize("branching", ["moms", "lowest_index"])
def test_agrees_with_brute_force_small(branching):
    """Exhaustive enumeration oracle on all three generators, N <= 12."""
    cases = []
    for seed in range(25):
        cases.append(gen_uniform(4 * (seed % 6 + 5), seed % 6 + 5, seed))
        cases.append(gen_hard_solvable(30, 8, seed))
        cases.append(gen_cluster(4, 3, 3, 3, seed))
    for f in cases:
        levels = all_levels(f.num_variables, clause_ints(f))
        expected = SAT if min(levels.values()) == 0 else UNSAT
        result = solve(f, branching=branching)
        assert result.status == expected
        if expected == SAT:
            assert level(f, result.model) == 0


def test_deterministic_statistics():
    f = gen_uniform(215, 50, 9)
    r1 = solve(f)
    r2 = solve(f)
    assert (r1.status, r1.decisions, r1.propagations) == (
        r2.status,
        r2.decisions,
        r2.propagations,
    )
    assert r1.model == r2.model


def test_unknown_branching_rejected(golden):
    with pytest.raises(ValueError):
        solve(golden, branching="random")

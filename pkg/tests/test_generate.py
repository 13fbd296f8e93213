"""Instance generator distributions, structure, and determinism."""

import itertools
import math

import numpy as np
import pytest

from satplateau.cnf import Assignment, level
from satplateau.generate import (
    GeneratorSpec,
    gen_cluster,
    gen_hard_solvable,
    gen_uniform,
    generate,
)


def test_uniform_basics():
    f = gen_uniform(430, 100, 1)
    assert f.num_variables == 100
    assert f.num_clauses == 430
    assert f.num_clauses / f.num_variables == pytest.approx(4.3)
    for cl in f.clauses:
        assert len({lit.variable for lit in cl.literals}) == 3


def test_uniform_single_triple():
    f = gen_uniform(1, 3, 9)
    assert {lit.variable for lit in f.clauses[0].literals} == {1, 2, 3}


def test_uniform_rejects_small_n():
    with pytest.raises(ValueError):
        gen_uniform(10, 2, 0)


def test_uniform_polarity_balance():
    """Positive-literal fraction per variable within 3 sigma of a fair coin."""
    f = gen_uniform(100_000, 100, 42)
    pos = np.zeros(101)
    tot = np.zeros(101)
    for cl in f.clauses:
        for lit in cl.literals:
            tot[lit.variable] += 1
            pos[lit.variable] += not lit.negated
    frac = pos[1:] / tot[1:]
    sigma = np.sqrt(0.25 / tot[1:])
    assert (np.abs(frac - 0.5) <= 3 * sigma).mean() > 0.95
    # and the pooled fraction is extremely close to one half
    assert abs(pos[1:].sum() / tot[1:].sum() - 0.5) < 0.01


def test_uniform_variable_coverage_is_uniform():
    f = gen_uniform(50_000, 50, 5)
    counts = np.zeros(51)
    for cl in f.clauses:
        for lit in cl.literals:
            counts[lit.variable] += 1
    expected = 3 * 50_000 / 50
    assert np.all(np.abs(counts[1:] - expected) < 6 * math.sqrt(expected))


def test_hard_solvable_hidden_solution_properties():
    for seed in range(10):
        f = gen_hard_solvable(100, 20, seed)
        s = Assignment.from_string(f.provenance["hidden_solution"])
        assert level(f, s) == 0
        for cl in f.clauses:
            true_lits = sum(
                s.value(lit.variable) != lit.negated for lit in cl.literals
            )
            assert true_lits in (1, 3)


def test_hard_solvable_sign_pattern_rejection_rate():
    """Exactly 4 of the 8 sign patterns of a fixed triple survive the filter."""
    solution = (1, 0, 1)
    kept = 0
    for signs in itertools.product((False, True), repeat=3):
        true_lits = sum(bool(solution[i]) != signs[i] for i in range(3))
        kept += true_lits in (1, 3)
    assert kept == 4


def test_cluster_structure():
    f = gen_cluster(36, 10, 10, 20, 77)
    assert f.num_variables == 100
    assert f.num_clauses == 380
    intra = f.provenance["num_intra_clauses"]
    assert intra == 360
    for j, cl in enumerate(f.clauses):
        blocks = {(lit.variable - 1) // 10 for lit in cl.literals}
        if j < intra:
            assert len(blocks) == 1
            assert blocks == {j // 36}
        else:
            assert len(blocks) == 3


def test_cluster_paper_scale_clause_counts():
    lo = gen_cluster(34, 10, 10, 20, 1)
    hi = gen_cluster(40, 10, 10, 20, 1)
    assert lo.num_clauses == 360
    assert hi.num_clauses == 420


def test_cluster_hard_solvable_subproblems():
    f = gen_cluster(12, 6, 4, 5, 3, sub_generator="hard_solvable")
    hidden = f.provenance["hidden_solutions"]
    assert len(hidden) == 4
    intra = f.provenance["num_intra_clauses"]
    for i in range(4):
        s = Assignment.from_string(hidden[i])
        for j in range(i * 12, (i + 1) * 12):
            cl = f.clauses[j]
            true_lits = sum(
                s.value(lit.variable - i * 6) != lit.negated for lit in cl.literals
            )
            assert true_lits in (1, 3)
    assert intra == 48


def test_cluster_rejects_too_few_clusters():
    with pytest.raises(ValueError):
        gen_cluster(10, 5, 2, 3, 0)


def test_determinism_bit_identical():
    for make in (
        lambda s: gen_uniform(100, 30, s),
        lambda s: gen_hard_solvable(80, 25, s),
        lambda s: gen_cluster(8, 5, 4, 6, s),
    ):
        assert make(123) == make(123)
        assert make(123) != make(124)


def test_generate_dispatch_roundtrip():
    specs = [
        GeneratorSpec("uniform", 30, 100, seed=5),
        GeneratorSpec("hard_solvable", 25, 80, seed=6),
        GeneratorSpec(
            "cluster", 5, num_clusters=4, clauses_per_cluster=8, num_linking=6, seed=7
        ),
    ]
    for spec in specs:
        f = generate(spec)
        assert f.num_variables == spec.total_variables
        assert f.num_clauses == spec.total_clauses
        assert GeneratorSpec.from_json_dict(spec.to_json_dict()) == spec
        assert f.provenance["spec"] == spec.to_json_dict()


def test_generator_spec_validation():
    with pytest.raises(ValueError):
        GeneratorSpec("nope", 10, 10)
    with pytest.raises(ValueError):
        GeneratorSpec("uniform", 10)  # missing clause count
    with pytest.raises(ValueError):
        GeneratorSpec("cluster", 10, num_clusters=4, clauses_per_cluster=8)

"""Plateau enumeration and escape barriers against the brute-force oracle.

Golden expectations are frozen from oracle.py's full 16-state enumeration
of the 4-variable fixture.
"""

import pytest

from oracle import clause_ints, minimax_barrier, partition_plateaus
from satplateau.cnf import Assignment, level
from satplateau.generate import gen_cluster, gen_hard_solvable, gen_uniform
from satplateau.plateau import (
    BENCH,
    CONTOUR,
    GLOBAL_MINIMUM,
    LOCAL_MINIMUM,
    MINIMUM,
    EscapeReport,
    enumerate_plateau,
    escape_barrier,
)

A = Assignment.from_string


def members_as_strings(report):
    return {a.to_string() for a in report.member_assignments()}


def test_golden_local_minimum(golden):
    report = enumerate_plateau(golden, A("0000"), optimum_level=0)
    assert report.level == 1
    assert report.size == 1
    assert report.classification == LOCAL_MINIMUM
    assert report.exit_count == 0
    assert report.border_level_profile == {2: 2, 3: 2}
    assert report.border_size == 4
    assert not report.truncated
    assert report.canonical_rep == A("0000")


def test_golden_level1_bench(golden):
    report = enumerate_plateau(golden, A("1001"), optimum_level=0)
    assert report.level == 1
    assert members_as_strings(report) == {"1001", "1101", "1011"}
    assert report.classification == BENCH
    assert report.exit_count == 2


def test_golden_level2_contour(golden):
    report = enumerate_plateau(golden, A("0010"), optimum_level=0)
    assert report.level == 2
    assert report.size == 3
    assert members_as_strings(report) == {"0010", "1010", "0011"}
    assert report.classification == CONTOUR
    assert report.exit_count == 3


def test_golden_global_minimum(golden):
    report = enumerate_plateau(golden, A("1111"), optimum_level=0)
    assert report.level == 0
    assert report.size == 1
    assert report.classification == GLOBAL_MINIMUM


def test_golden_level3_contour_pair(golden):
    report = enumerate_plateau(golden, A("1000"), optimum_level=0)
    assert report.level == 3
    assert members_as_strings(report) == {"1000", "1100"}
    # oracle-confirmed: both states are exits, so the bench is a contour
    assert report.classification == CONTOUR
    assert report.exit_count == 2


def test_minimum_without_known_optimum_is_neutral(golden):
    report = enumerate_plateau(golden, A("0000"))
    assert report.classification == MINIMUM
    assert report.is_minimum


def test_border_has_no_plateau_level_states(golden):
    for bits in ("0000", "1001", "0010", "1111", "0001"):
        report = enumerate_plateau(golden, A(bits))
        assert report.level not in report.border_level_profile


def test_invalid_seed_state(golden):
    with pytest.raises(ValueError):
        enumerate_plateau(golden, A("00000"))
    with pytest.raises(ValueError):
        enumerate_plateau(golden, A("0000"), state_cap=0)


def test_truncation_explored_portion(golden):
    report = enumerate_plateau(golden, A("1001"), state_cap=2)
    assert report.truncated
    assert report.size == 2
    assert report.canonical_rep is None
    assert report.border_level_profile is None


def test_truncation_with_exit_is_definitively_bench():
    f = gen_uniform(215, 50, 12)
    from satplateau.search import GsatConfig, find_state_at_level

    a = find_state_at_level(f, 2, GsatConfig(seed=3, max_flips=500, max_tries=50))
    full = enumerate_plateau(f, a, optimum_level=None)
    if full.size > 3 and full.exit_count > 0:
        cut = enumerate_plateau(f, a, state_cap=3)
        if cut.truncated and cut.exit_count > 0:
            assert cut.classification == BENCH
            assert cut.classification_reliable


def test_canonical_rep_order_independent(golden):
    reports = [
        enumerate_plateau(golden, A(s), optimum_level=0)
        for s in ("1001", "1101", "1011")
    ]
    reps = {r.canonical_rep.to_string() for r in reports}
    assert reps == {"1001"}
    assert len({frozenset(r.members) for r in reports}) == 1


def test_report_json_fields(golden):
    d = enumerate_plateau(golden, A("0000"), optimum_level=0).to_json_dict()
    assert d["level"] == 1
    assert d["classification"] == "local_minimum"
    assert d["border_level_profile"] == {"2": 2, "3": 2}
    assert d["canonical_rep"] == "0000"
    assert d["seed_state"] == "0000"


def test_golden_escape_barrier(golden):
    report = enumerate_plateau(golden, A("0000"), optimum_level=0)
    esc = escape_barrier(golden, report)
    assert esc.barrier_level == 2
    assert esc.barrier_increase == 1
    assert esc.escaped and not esc.capped


def test_bench_short_circuits(golden):
    report = enumerate_plateau(golden, A("1001"), optimum_level=0)
    esc = escape_barrier(golden, report)
    assert esc.barrier_increase == 0
    assert esc.states_expanded == 0


def test_escape_rejects_truncated(golden):
    cut = enumerate_plateau(golden, A("1001"), state_cap=2)
    with pytest.raises(ValueError):
        escape_barrier(golden, cut)


def test_global_minimum_has_no_escape(golden):
    report = enumerate_plateau(golden, A("1111"), optimum_level=0)
    esc = escape_barrier(golden, report)
    assert not esc.escaped
    assert esc.barrier_level is None


def test_escape_capped_reports_lower_bound(golden):
    report = enumerate_plateau(golden, A("0000"), optimum_level=0)
    esc = escape_barrier(golden, report, expansion_cap=1)
    assert esc.capped
    assert esc.barrier_level >= 2
    assert esc.barrier_increase is None


def test_paper_probe_on_golden(golden):
    """The level-ordered probe can undershoot the exact minimax barrier.

    From {0000} the lowest-level route runs through the level-1 bench, whose
    member 1101 neighbors the solution; the probe therefore answers 1 even
    though every escape path must climb to level 2 first.
    """
    report = enumerate_plateau(golden, A("0000"), optimum_level=0)
    esc = escape_barrier(golden, report, include_paper_probe=True)
    assert esc.barrier_level == 2
    assert esc.paper_barrier_level == 1


def small_instances():
    out = []
    for seed in range(8):
        n = 6 + seed % 5
        out.append(gen_uniform(int(4.3 * n), n, seed))
        out.append(gen_hard_solvable(25, 7, seed))
        out.append(gen_cluster(4, 3, 3, 3, seed))
    return out


@pytest.mark.parametrize("formula", small_instances())
def test_partition_matches_oracle(formula):
    """Enumerating from every hypercube state reproduces the oracle partition."""
    n = formula.num_variables
    cl = clause_ints(formula)
    levels, oracle_plateaus, assigned = partition_plateaus(n, cl)
    optimum = min(levels.values())
    seen = set()
    toolkit_count = 0
    for bits in sorted(levels):
        packed = Assignment(bits).packed()
        if packed in seen:
            continue
        report = enumerate_plateau(
            formula, Assignment(bits), state_cap=1 << n, optimum_level=optimum
        )
        toolkit_count += 1
        oracle_p = assigned[bits]
        assert report.level == oracle_p.level
        assert report.size == oracle_p.size
        assert report.classification == oracle_p.classification
        assert report.exit_count == len(oracle_p.exits)
        assert report.border_size == oracle_p.border_size
        assert report.border_level_profile == dict(oracle_p.border_levels)
        assert members_as_strings(report) == {
            "".join(map(str, m)) for m in oracle_p.members
        }
        assert tuple(report.canonical_rep.bits) == oracle_p.canonical
        seen.update(report.members)
    assert toolkit_count == len(oracle_plateaus)


@pytest.mark.parametrize("formula", small_instances()[:12])
def test_escape_barrier_matches_oracle(formula):
    n = formula.num_variables
    cl = clause_ints(formula)
    levels, oracle_plateaus, _ = partition_plateaus(n, cl)
    optimum = min(levels.values())
    for p in oracle_plateaus:
        if p.classification not in ("local_minimum", "global_minimum"):
            continue
        seed = Assignment(min(p.members))
        report = enumerate_plateau(formula, seed, state_cap=1 << n, optimum_level=optimum)
        esc = escape_barrier(formula, report, expansion_cap=1 << (n + 1))
        expected = minimax_barrier(n, cl, p.members, p.level)
        assert esc.barrier_level == expected
        if expected is not None:
            assert esc.barrier_increase == expected - p.level
            assert esc.barrier_increase >= 1


def test_exit_count_zero_iff_minimum_and_full_iff_contour():
    for formula in small_instances()[:6]:
        n = formula.num_variables
        cl = clause_ints(formula)
        levels, _, _ = partition_plateaus(n, cl)
        optimum = min(levels.values())
        seen = set()
        for bits in sorted(levels):
            if Assignment(bits).packed() in seen:
                continue
            r = enumerate_plateau(formula, Assignment(bits), state_cap=1 << n, optimum_level=optimum)
            seen.update(r.members)
            assert (r.exit_count == 0) == r.is_minimum
            assert (r.exit_count == r.size) == (r.classification == CONTOUR) or r.is_minimum

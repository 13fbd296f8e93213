"""Greedy local search (GSAT) and level-targeted state sampling.

Each try starts from a uniformly random assignment and repeatedly flips one
variable chosen uniformly from the set of flips that minimize the resulting
number of unsatisfied clauses.  The minimizing set may contain strictly
uphill moves: when every neighbor is worse, the search is still forced to
move.  The level is checked before every flip and once more after the last,
so a try that lands on a solution with its final flip still reports it.

:func:`find_state_at_level` reuses the same walk to sample a state of an
exact level: it returns the first visited state whose level matches the
target.  A flip can lower the level by more than 1; if a try jumps over the
target, the try is abandoned and a fresh one begins, preserving the
"first state at exactly the target level" semantics.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cnf import Assignment, Formula, scan_neighborhood

__all__ = [
    "GsatConfig",
    "FlipRecord",
    "TryTrace",
    "Trajectory",
    "GsatResult",
    "gsat",
    "find_state_at_level",
]


@dataclass(frozen=True)
class GsatConfig:
    """Limits and seed for one search.  ``max_flips=None`` means 10 * N."""

    seed: int
    max_flips: int | None = None
    max_tries: int = 100

    def __post_init__(self):
        if self.max_flips is not None and self.max_flips < 1:
            raise ValueError("max_flips must be >= 1")
        if self.max_tries < 1:
            raise ValueError("max_tries must be >= 1")

    def flips_for(self, formula: Formula) -> int:
        return 10 * formula.num_variables if self.max_flips is None else self.max_flips


@dataclass(frozen=True)
class FlipRecord:
    level_before: int
    variable: int
    delta: int
    num_candidates: int


@dataclass(frozen=True)
class TryTrace:
    index: int
    start: Assignment
    flips: tuple[FlipRecord, ...]
    status: str  # "solved", "exhausted", "abandoned"


@dataclass(frozen=True)
class Trajectory:
    tries: tuple[TryTrace, ...]
    status: str

    def all_flips(self):
        for t in self.tries:
            yield from t.flips


@dataclass(frozen=True)
class GsatResult:
    """``assignment`` is the solution when solved, else the last visited state."""

    status: str  # "solved" or "fail"
    assignment: Assignment
    tries_used: int
    total_flips: int
    trajectory: Trajectory | None = None

    @property
    def solved(self) -> bool:
        return self.status == "solved"


def _random_bits(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.integers(0, 2, size=n).astype(bool)


def _greedy_flip(formula, bits, deltas, rng, trace):
    best = int(deltas.min())
    candidates = np.flatnonzero(deltas == best)
    v = int(candidates[rng.integers(len(candidates))])
    bits[v] ^= True
    if trace is not None:
        trace.append((v + 1, best, len(candidates)))
    return best


def gsat(formula: Formula, config: GsatConfig, record_trajectory: bool = False) -> GsatResult:
    """Run GSAT; returns the first satisfying assignment found, else FAIL."""
    n = formula.num_variables
    rng = np.random.default_rng(config.seed)
    max_flips = config.flips_for(formula)
    tries: list[TryTrace] = []
    total_flips = 0
    bits = None
    for t in range(1, config.max_tries + 1):
        bits = _random_bits(rng, n)
        start = Assignment.from_array(bits) if record_trajectory else None
        moves: list[tuple[int, int, int]] = [] if record_trajectory else None
        levels: list[int] = []
        solved = False
        for _ in range(max_flips):
            lvl, deltas = scan_neighborhood(formula, bits)
            if lvl == 0:
                solved = True
                break
            levels.append(lvl)
            _greedy_flip(formula, bits, deltas, rng, moves)
            total_flips += 1
        if not solved:
            lvl, _ = scan_neighborhood(formula, bits)
            solved = lvl == 0
        if record_trajectory:
            flips = tuple(
                FlipRecord(lb, v, d, k) for lb, (v, d, k) in zip(levels, moves)
            )
            tries.append(TryTrace(t, start, flips, "solved" if solved else "exhausted"))
        if solved:
            trajectory = Trajectory(tuple(tries), "solved") if record_trajectory else None
            return GsatResult("solved", Assignment.from_array(bits), t, total_flips, trajectory)
    trajectory = Trajectory(tuple(tries), "fail") if record_trajectory else None
    return GsatResult("fail", Assignment.from_array(bits), config.max_tries, total_flips, trajectory)


def find_state_at_level(
    formula: Formula, target_level: int, config: GsatConfig
) -> Assignment | None:
    """First state of exactly ``target_level`` visited by a greedy walk.

    Every visited state is checked, including each try's random start.
    Jumping below the target abandons the try.  Returns None when all
    ``max_tries`` tries fail to hit the target exactly.
    """
    if target_level < 0:
        raise ValueError("target_level must be >= 0")
    n = formula.num_variables
    rng = np.random.default_rng(config.seed)
    max_flips = config.flips_for(formula)
    for _ in range(config.max_tries):
        bits = _random_bits(rng, n)
        for flip in range(max_flips + 1):
            lvl, deltas = scan_neighborhood(formula, bits)
            if lvl == target_level:
                return Assignment.from_array(bits)
            if lvl < target_level or flip == max_flips:
                break
            _greedy_flip(formula, bits, deltas, rng, None)
    return None

"""A tiny 4-variable, 14-clause instance whose entire landscape is known.

The instance is small enough to enumerate all 16 assignments by hand, which
makes it the reference fixture for level evaluation, plateau enumeration,
and escape barriers.  Variables A, B, C, D map to 1, 2, 3, 4.

Two variants are shipped.  The default (``golden_formula``) has clause 14 as
(-1 3 4); under it the landscape is fully self-consistent: 1111 is the only
solution, 0000 is a size-1 local minimum at level 1, {1001, 1101, 1011} is a
level-1 bench with two exits, and {0010, 1010, 0011} is a level-2 contour.
``golden_formula_printed`` instead uses (-1 3 -4) for clause 14, which moves
1001, 1000 and 1100 to different levels and breaks the level-1 bench.
"""

from __future__ import annotations

from .cnf import Formula

__all__ = ["golden_formula", "golden_formula_printed", "GOLDEN_CLAUSES"]

_COMMON_CLAUSES = [
    (1, 2, 3),
    (1, 2, -3),
    (1, -2, 3),
    (1, -2, -3),
    (-1, 2, 3),
    (-1, 2, -3),
    (-1, -2, 3),
    (-1, -2, 4),
    (1, 2, -4),
    (1, -3, 4),
    (1, -2, 4),
    (-1, 2, 4),
    (1, 3, -4),
]

GOLDEN_CLAUSES = _COMMON_CLAUSES + [(-1, 3, 4)]
_PRINTED_CLAUSES = _COMMON_CLAUSES + [(-1, 3, -4)]


def golden_formula() -> Formula:
    """The corrected 4-variable instance used by the golden tests."""
    return Formula.from_ints(4, GOLDEN_CLAUSES)


def golden_formula_printed() -> Formula:
    """The variant with the inconsistent final clause, kept for reference."""
    return Formula.from_ints(4, _PRINTED_CLAUSES)

"""Exhaustive plateau enumeration, classification, and escape barriers.

A plateau is a maximal connected set of equal-level assignments under
single-flip adjacency.  Its border is the set of adjacent states at other
levels.  A plateau whose border is entirely higher-level is a minimum; a
plateau with at least one lower-level border state is a bench, and bench
states adjacent to a lower-level state are exits.  A bench consisting
entirely of exits is a contour.

Enumeration is a breadth-first flood fill from a seed state, with visited
states keyed by a packed fixed-width bit encoding.  Plateaus larger than a
state cap are reported truncated: their statistics cover the explored
portion only, and their classification is unreliable unless an exit was
already seen (an exit proves the plateau is not a minimum).

The escape barrier of a minimum is the smallest possible peak level over
all paths that leave the plateau and reach a level strictly below it.  It
is computed exactly by a bottleneck-shortest-path search in which a path's
priority is the maximum level encountered so far.  The historical
level-ordered breadth-first procedure, which explores border states in
increasing order of level and reports the level of the first state seen
adjacent to something below the plateau, is available as an alternative
probe; it is not guaranteed to equal the true minimax barrier.
"""

from __future__ import annotations

import heapq
from collections import Counter, deque
from dataclasses import dataclass

import numpy as np

from .cnf import (
    Assignment,
    Formula,
    flip_packed,
    level,
    pack_bits,
    scan_neighborhood,
    unpack_bits,
)

__all__ = [
    "PlateauReport",
    "EscapeReport",
    "enumerate_plateau",
    "escape_barrier",
    "DEFAULT_STATE_CAP",
    "DEFAULT_EXPANSION_CAP",
    "GLOBAL_MINIMUM",
    "LOCAL_MINIMUM",
    "MINIMUM",
    "BENCH",
    "CONTOUR",
]

DEFAULT_STATE_CAP = 10_000
DEFAULT_EXPANSION_CAP = 100_000

GLOBAL_MINIMUM = "global_minimum"
LOCAL_MINIMUM = "local_minimum"
MINIMUM = "minimum"
BENCH = "bench"
CONTOUR = "contour"


@dataclass(frozen=True)
class PlateauReport:
    """One enumerated plateau.

    ``members`` holds the packed encodings of the explored states.  When
    ``truncated`` is set, ``size`` and ``exit_count`` cover the explored
    portion only and ``canonical_rep`` is absent.  ``border_level_profile``
    maps border level to the number of distinct border states at that level
    (None when border tracking was disabled).  ``is_minimum`` distinguishes
    the minimum family; ``classification`` then says whether the minimum is
    known global, known local, or of unknown optimality.
    """

    level: int
    size: int
    truncated: bool
    classification: str
    classification_reliable: bool
    exit_count: int
    border_size: int | None
    border_level_profile: dict[int, int] | None
    canonical_rep: Assignment | None
    seed_state: Assignment
    members: frozenset[bytes]
    num_variables: int

    @property
    def is_minimum(self) -> bool:
        return self.classification in (GLOBAL_MINIMUM, LOCAL_MINIMUM, MINIMUM)

    def member_assignments(self):
        for b in sorted(self.members):
            yield Assignment.from_packed(b, self.num_variables)

    def to_json_dict(self) -> dict:
        return {
            "level": self.level,
            "size": self.size,
            "truncated": self.truncated,
            "classification": self.classification,
            "classification_reliable": self.classification_reliable,
            "exit_count": self.exit_count,
            "border_size": self.border_size,
            "border_level_profile": (
                None
                if self.border_level_profile is None
                else {str(k): v for k, v in sorted(self.border_level_profile.items())}
            ),
            "canonical_rep": None if self.canonical_rep is None else self.canonical_rep.to_string(),
            "seed_state": self.seed_state.to_string(),
        }


@dataclass(frozen=True)
class EscapeReport:
    """Escape cost of a plateau.

    For a minimum, ``barrier_level`` is the minimax peak over all escape
    paths and ``barrier_increase`` is its excess over the plateau level
    (always >= 1).  For a bench the search short-circuits with increase 0:
    an exit already descends.  ``capped`` marks an aborted search; the
    reported barrier_level is then the best lower bound established.
    ``escaped`` is False only when the whole reachable space was exhausted
    without finding a lower level (the plateau is a global minimum).
    ``paper_barrier_level`` is filled only when the level-ordered probe was
    requested.
    """

    plateau_level: int
    barrier_level: int | None
    barrier_increase: int | None
    states_expanded: int
    capped: bool
    escaped: bool
    paper_barrier_level: int | None = None

    def to_json_dict(self) -> dict:
        return {
            "plateau_level": self.plateau_level,
            "barrier_level": self.barrier_level,
            "barrier_increase": self.barrier_increase,
            "states_expanded": self.states_expanded,
            "capped": self.capped,
            "escaped": self.escaped,
            "paper_barrier_level": self.paper_barrier_level,
        }


def _classify(level_: int, size: int, exit_count: int, optimum_level: int | None):
    if exit_count == 0:
        if level_ == 0 or (optimum_level is not None and level_ == optimum_level):
            return GLOBAL_MINIMUM
        if optimum_level is not None and level_ > optimum_level:
            return LOCAL_MINIMUM
        return MINIMUM
    return CONTOUR if exit_count == size else BENCH


def enumerate_plateau(
    formula: Formula,
    seed_state: Assignment,
    state_cap: int = DEFAULT_STATE_CAP,
    include_border_profile: bool = True,
    optimum_level: int | None = None,
) -> PlateauReport:
    """Flood-fill the plateau containing ``seed_state`` and classify it.

    ``optimum_level`` is the instance's known optimum (0 for an instance
    known satisfiable); without it, minima of level > 0 are reported with
    the optimality-neutral ``minimum`` classification.
    """
    if len(seed_state) != formula.num_variables:
        raise ValueError(
            f"seed state has {len(seed_state)} bits, formula has "
            f"{formula.num_variables} variables"
        )
    if state_cap < 1:
        raise ValueError("state_cap must be >= 1")
    n = formula.num_variables
    seed_packed = pack_bits(seed_state.to_array())
    plateau_level = level(formula, seed_state)
    visited = {seed_packed}
    queue = deque([seed_packed])
    border: dict[bytes, int] | None = {} if include_border_profile else None
    exit_count = 0
    truncated = False
    while queue and not truncated:
        state = queue.popleft()
        bits = unpack_bits(state, n)
        _, deltas = scan_neighborhood(formula, bits)
        if (deltas < 0).any():
            exit_count += 1
        for v in np.flatnonzero(deltas == 0):
            nb = flip_packed(state, int(v))
            if nb not in visited:
                if len(visited) >= state_cap:
                    truncated = True
                    break
                visited.add(nb)
                queue.append(nb)
        if border is not None and not truncated:
            for v in np.flatnonzero(deltas != 0):
                nb = flip_packed(state, int(v))
                if nb not in border:
                    border[nb] = plateau_level + int(deltas[v])
    size = len(visited)
    classification = _classify(plateau_level, size, exit_count, optimum_level)
    reliable = not truncated
    if truncated and exit_count > 0:
        classification = BENCH  # provably not a minimum; contour status unknown
        reliable = True
    profile = None
    border_size = None
    if border is not None and not truncated:
        profile = dict(Counter(border.values()))
        border_size = len(border)
    return PlateauReport(
        level=plateau_level,
        size=size,
        truncated=truncated,
        classification=classification,
        classification_reliable=reliable,
        exit_count=exit_count,
        border_size=border_size,
        border_level_profile=profile,
        canonical_rep=None if truncated else Assignment.from_packed(min(visited), n),
        seed_state=seed_state,
        members=frozenset(visited),
        num_variables=n,
    )


def _paper_escape_probe(formula, members, plateau_level, expansion_cap):
    """Level-ordered breadth-first escape probe.

    Explores non-plateau states in increasing order of level; answers with
    the level of the first explored state adjacent to a level strictly
    below the plateau.  May differ from the exact minimax barrier.
    """
    n = formula.num_variables
    heap = []
    seen = set(members)
    counter = 0
    for state in sorted(members):
        bits = unpack_bits(state, n)
        _, deltas = scan_neighborhood(formula, bits)
        for v in np.flatnonzero(deltas != 0):
            nb = flip_packed(state, int(v))
            if nb not in seen:
                seen.add(nb)
                heapq.heappush(heap, (plateau_level + int(deltas[v]), counter, nb))
                counter += 1
    expanded = 0
    while heap:
        lvl, _, state = heapq.heappop(heap)
        if lvl < plateau_level:
            return lvl
        if expanded >= expansion_cap:
            return None
        expanded += 1
        bits = unpack_bits(state, n)
        _, deltas = scan_neighborhood(formula, bits)
        if (deltas < -(lvl - plateau_level)).any():
            # some neighbor sits strictly below the plateau level
            return lvl
        for v in range(n):
            nb = flip_packed(state, v)
            if nb not in seen:
                seen.add(nb)
                heapq.heappush(heap, (lvl + int(deltas[v]), counter, nb))
                counter += 1
    return None


def escape_barrier(
    formula: Formula,
    plateau: PlateauReport,
    expansion_cap: int = DEFAULT_EXPANSION_CAP,
    include_paper_probe: bool = False,
) -> EscapeReport:
    """Exact minimax escape barrier of a fully enumerated plateau.

    Best-first search from the plateau in which a path's priority is the
    highest level met so far; the first dequeued state of level strictly
    below the plateau fixes the barrier.  Benches short-circuit with
    ``barrier_increase`` 0.  Requires an untruncated plateau.
    """
    if plateau.truncated:
        raise ValueError("escape_barrier needs a fully enumerated plateau")
    lp = plateau.level
    if plateau.exit_count > 0:
        return EscapeReport(lp, lp, 0, 0, False, True)
    n = formula.num_variables
    best: dict[bytes, int] = {}
    heap: list[tuple[int, int, bytes, int]] = []
    counter = 0
    members = plateau.members
    for state in sorted(members):
        bits = unpack_bits(state, n)
        _, deltas = scan_neighborhood(formula, bits)
        for v in np.flatnonzero(deltas != 0):
            nb = flip_packed(state, int(v))
            cost = lp + int(deltas[v])  # border of a minimum is strictly higher
            if nb not in best or cost < best[nb]:
                best[nb] = cost
                heapq.heappush(heap, (cost, counter, nb, cost))
                counter += 1
    settled = set(members)
    expanded = 0
    barrier = None
    capped = False
    while heap:
        cost, _, state, lvl = heapq.heappop(heap)
        if lvl < lp:
            barrier = cost
            break
        if state in settled:
            continue
        if expanded >= expansion_cap:
            capped = True
            barrier = cost  # best lower bound: no cheaper path exists
            break
        settled.add(state)
        expanded += 1
        bits = unpack_bits(state, n)
        _, deltas = scan_neighborhood(formula, bits)
        for v in range(n):
            nb = flip_packed(state, v)
            if nb in settled:
                continue
            nlvl = lvl + int(deltas[v])
            ncost = max(cost, nlvl)
            if nb not in best or ncost < best[nb]:
                best[nb] = ncost
                heapq.heappush(heap, (ncost, counter, nb, nlvl))
                counter += 1
    if barrier is None and not capped:
        # reachable space exhausted: nothing below the plateau exists
        return EscapeReport(lp, None, None, expanded, False, False)
    paper_level = None
    if include_paper_probe and not capped:
        paper_level = _paper_escape_probe(formula, members, lp, expansion_cap)
    return EscapeReport(
        plateau_level=lp,
        barrier_level=barrier,
        barrier_increase=None if capped else barrier - lp,
        states_expanded=expanded,
        capped=capped,
        escaped=not capped,
        paper_barrier_level=paper_level,
    )

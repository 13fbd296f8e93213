"""Random 3-SAT instance generators with deterministic seeding.

Three families:

* ``uniform``: every clause picks 3 distinct variables uniformly and negates
  each independently with probability 1/2.
* ``hard_solvable``: a hidden solution is drawn first; candidate clauses are
  generated as in ``uniform`` but kept only when exactly 1 or 3 of their
  literals are true under the hidden solution, which forces satisfiability
  while keeping per-variable sign balance uniform in the limit.
* ``cluster``: several independent uniform sub-instances over disjoint
  variable blocks, tied together by linking clauses whose 3 variables come
  from 3 distinct blocks.

All draws come from one PCG64 stream per call, in a fixed order (the 3
variables in draw order, then their 3 signs), so identical seeds give
bit-identical formulas.  In ``hard_solvable``, rejected candidates consume
their draws; the stream position therefore depends on the rejection history,
which is itself deterministic in the seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .cnf import Assignment, Clause, Formula, Literal

__all__ = [
    "GeneratorSpec",
    "gen_uniform",
    "gen_hard_solvable",
    "gen_cluster",
    "generate",
]

VARIANTS = ("uniform", "hard_solvable", "cluster")


@dataclass(frozen=True)
class GeneratorSpec:
    """Parameters of one generator invocation, JSON round-trippable.

    For the cluster variant ``num_variables`` is the per-cluster block size
    and ``num_clauses`` is ignored in favor of ``clauses_per_cluster``.
    """

    variant: str
    num_variables: int
    num_clauses: int | None = None
    num_clusters: int | None = None
    clauses_per_cluster: int | None = None
    num_linking: int | None = None
    sub_generator: str = "uniform"
    seed: int = 0

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown generator variant {self.variant!r}")
        if self.num_variables < 1:
            raise ValueError("num_variables must be >= 1")
        if self.variant == "cluster":
            if self.num_clusters is None or self.clauses_per_cluster is None or self.num_linking is None:
                raise ValueError("cluster generator needs num_clusters, clauses_per_cluster, num_linking")
            if self.num_clusters < 3:
                raise ValueError("a linking clause needs 3 distinct clusters; num_clusters must be >= 3")
            if self.sub_generator not in ("uniform", "hard_solvable"):
                raise ValueError(f"unknown sub generator {self.sub_generator!r}")
        else:
            if self.num_clauses is None or self.num_clauses < 1:
                raise ValueError("num_clauses must be >= 1")

    @property
    def total_variables(self) -> int:
        if self.variant == "cluster":
            return self.num_clusters * self.num_variables
        return self.num_variables

    @property
    def total_clauses(self) -> int:
        if self.variant == "cluster":
            return self.num_clusters * self.clauses_per_cluster + self.num_linking
        return self.num_clauses

    def with_seed(self, seed: int) -> "GeneratorSpec":
        return GeneratorSpec(
            self.variant,
            self.num_variables,
            self.num_clauses,
            self.num_clusters,
            self.clauses_per_cluster,
            self.num_linking,
            self.sub_generator,
            seed,
        )

    def to_json_dict(self) -> dict:
        out = {"variant": self.variant, "num_variables": self.num_variables, "seed": self.seed}
        if self.variant == "cluster":
            out["num_clusters"] = self.num_clusters
            out["clauses_per_cluster"] = self.clauses_per_cluster
            out["num_linking"] = self.num_linking
            out["sub_generator"] = self.sub_generator
        else:
            out["num_clauses"] = self.num_clauses
        return out

    @classmethod
    def from_json_dict(cls, data: dict) -> "GeneratorSpec":
        return cls(
            variant=data["variant"],
            num_variables=data["num_variables"],
            num_clauses=data.get("num_clauses"),
            num_clusters=data.get("num_clusters"),
            clauses_per_cluster=data.get("clauses_per_cluster"),
            num_linking=data.get("num_linking"),
            sub_generator=data.get("sub_generator", "uniform"),
            seed=data.get("seed", 0),
        )


def _draw_distinct3(rng: np.random.Generator, n: int) -> tuple[int, int, int]:
    """Three distinct values in 0..n-1, uniform, in draw order.

    Later draws are mapped around earlier picks so each draw consumes exactly
    one stream value regardless of collisions.
    """
    a = int(rng.integers(n))
    b = int(rng.integers(n - 1))
    if b >= a:
        b += 1
    c = int(rng.integers(n - 2))
    lo, hi = (a, b) if a < b else (b, a)
    if c >= lo:
        c += 1
    if c >= hi:
        c += 1
    return a, b, c


def _draw_clause(rng: np.random.Generator, n: int, offset: int = 0) -> Clause:
    vars0 = _draw_distinct3(rng, n)
    signs = rng.integers(0, 2, size=3)
    return Clause(
        tuple(Literal(offset + v + 1, bool(s)) for v, s in zip(vars0, signs))
    )


def gen_uniform(num_clauses: int, num_variables: int, seed: int) -> Formula:
    """Uniform random 3-SAT: C clauses over N variables."""
    if num_variables < 3:
        raise ValueError("uniform generator needs at least 3 variables")
    rng = np.random.default_rng(seed)
    clauses = tuple(_draw_clause(rng, num_variables) for _ in range(num_clauses))
    spec = GeneratorSpec("uniform", num_variables, num_clauses, seed=seed)
    return Formula(num_variables, clauses, {"spec": spec.to_json_dict()})


def _literals_true_under(clause: Clause, solution: np.ndarray, offset: int = 0) -> int:
    return sum(
        bool(solution[lit.variable - 1 - offset]) ^ lit.negated for lit in clause.literals
    )


def _gen_hard_clauses(
    rng: np.random.Generator, num_clauses: int, num_variables: int, offset: int = 0
) -> tuple[tuple[Clause, ...], np.ndarray]:
    solution = rng.integers(0, 2, size=num_variables).astype(bool)
    clauses = []
    while len(clauses) < num_clauses:
        clause = _draw_clause(rng, num_variables, offset)
        if _literals_true_under(clause, solution, offset) in (1, 3):
            clauses.append(clause)
    return tuple(clauses), solution


def gen_hard_solvable(num_clauses: int, num_variables: int, seed: int) -> Formula:
    """Forced-satisfiable 3-SAT; the hidden solution rides in the provenance.

    Candidates with 0 or 2 true literals under the hidden solution are
    rejected, so every kept clause has 1 or 3 and the solution satisfies the
    whole formula.  Of the 8 sign patterns for a fixed variable triple, 4
    survive, so roughly half of all candidates are rejected.
    """
    if num_variables < 3:
        raise ValueError("hard_solvable generator needs at least 3 variables")
    rng = np.random.default_rng(seed)
    clauses, solution = _gen_hard_clauses(rng, num_clauses, num_variables)
    spec = GeneratorSpec("hard_solvable", num_variables, num_clauses, seed=seed)
    provenance = {
        "spec": spec.to_json_dict(),
        "hidden_solution": Assignment.from_array(solution).to_string(),
    }
    return Formula(num_variables, clauses, provenance)


def gen_cluster(
    clauses_per_cluster: int,
    num_variables: int,
    num_clusters: int,
    num_linking: int,
    seed: int,
    sub_generator: str = "uniform",
) -> Formula:
    """Clustered 3-SAT: disjoint sub-instances plus linking clauses.

    Cluster ``i`` (0-based) owns variables ``i*N+1 .. (i+1)*N``.  The first
    ``M * clauses_per_cluster`` clauses are intra-cluster in cluster order;
    the final ``num_linking`` clauses each take one variable from each of 3
    distinct clusters.
    """
    spec = GeneratorSpec(
        "cluster",
        num_variables,
        num_clusters=num_clusters,
        clauses_per_cluster=clauses_per_cluster,
        num_linking=num_linking,
        sub_generator=sub_generator,
        seed=seed,
    )
    if num_variables < 3:
        raise ValueError("cluster blocks need at least 3 variables")
    rng = np.random.default_rng(seed)
    clauses: list[Clause] = []
    hidden: list[str] = []
    for i in range(num_clusters):
        offset = i * num_variables
        if sub_generator == "hard_solvable":
            sub_clauses, solution = _gen_hard_clauses(
                rng, clauses_per_cluster, num_variables, offset
            )
            hidden.append(Assignment.from_array(solution).to_string())
            clauses.extend(sub_clauses)
        else:
            clauses.extend(
                _draw_clause(rng, num_variables, offset) for _ in range(clauses_per_cluster)
            )
    for _ in range(num_linking):
        blocks = _draw_distinct3(rng, num_clusters)
        vars0 = [b * num_variables + int(rng.integers(num_variables)) for b in blocks]
        signs = rng.integers(0, 2, size=3)
        clauses.append(
            Clause(tuple(Literal(v + 1, bool(s)) for v, s in zip(vars0, signs)))
        )
    provenance = {
        "spec": spec.to_json_dict(),
        "num_intra_clauses": num_clusters * clauses_per_cluster,
    }
    if hidden:
        provenance["hidden_solutions"] = hidden
    return Formula(spec.total_variables, tuple(clauses), provenance)


def generate(spec: GeneratorSpec) -> Formula:
    """Run the generator described by ``spec``."""
    if spec.variant == "uniform":
        return gen_uniform(spec.num_clauses, spec.num_variables, spec.seed)
    if spec.variant == "hard_solvable":
        return gen_hard_solvable(spec.num_clauses, spec.num_variables, spec.seed)
    return gen_cluster(
        spec.clauses_per_cluster,
        spec.num_variables,
        spec.num_clusters,
        spec.num_linking,
        spec.seed,
        spec.sub_generator,
    )

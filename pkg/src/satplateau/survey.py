"""Statistical surveys over sampled plateaus.

Three reproducible experiment drivers built from the lower layers:

* :func:`run_plateau_survey` samples one plateau per (instance, level) over
  a grid of generator settings and aggregates classification proportions,
  size medians, and exit ratios.
* :func:`run_escape_experiment` runs a single greedy try per instance and
  measures how far above a terminal local minimum an escape path must climb.
* :func:`run_solution_cluster_experiment` collects many independent greedy
  solutions of one instance and groups them into distinct global minima.

Reproducibility contract: every random choice is drawn from a substream
derived from the master seed and a label path (see :mod:`satplateau.seeds`).
Grid points are keyed by a digest of their parameters, not their position,
so removing one grid point never changes another's results, and the worker
pool only changes scheduling, never output.
"""

from __future__ import annotations

import csv
import json
import statistics
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from hashlib import sha256
from pathlib import Path

from .cnf import Assignment, Formula
from .generate import GeneratorSpec, generate
from .plateau import (
    CONTOUR,
    DEFAULT_EXPANSION_CAP,
    DEFAULT_STATE_CAP,
    PlateauReport,
    enumerate_plateau,
    escape_barrier,
)
from .search import GsatConfig, find_state_at_level, gsat
from .seeds import derive_seed
from .solve import SAT, UNKNOWN, UNSAT, solve

__all__ = [
    "ExperimentSpec",
    "PlateauSample",
    "AggregateRow",
    "EscapeOutcome",
    "EscapeExperimentResult",
    "SolutionClusterResult",
    "SatFilterStarvation",
    "collect_plateau_samples",
    "aggregate_samples",
    "run_plateau_survey",
    "run_escape_experiment",
    "run_solution_cluster_experiment",
    "summarize_to_csv",
    "write_escape_csv",
    "write_solution_cluster_report",
    "SIZE_BIN_EDGES",
    "EXIT_RATIO_BINS",
]

SIZE_BIN_EDGES = (1, 5, 10, 50, 100, 500, 1000)  # last bin is open-ended
EXIT_RATIO_BINS = 10

SAT_FILTERS = ("none", "require_sat", "require_unsat")


class SatFilterStarvation(RuntimeError):
    """Raised when a grid point cannot produce enough filtered instances."""


@dataclass(frozen=True)
class ExperimentSpec:
    """Configuration for any of the experiment drivers; JSON round-trippable."""

    grid: tuple[GeneratorSpec, ...]
    levels: tuple[int, ...] = (1, 2, 3, 4, 5)
    instances_per_point: int = 100
    sat_filter: str = "none"
    plateau_state_cap: int = DEFAULT_STATE_CAP
    escape_expansion_cap: int = DEFAULT_EXPANSION_CAP
    solver_budget: int | None = None
    master_seed: int = 0
    max_flips: int | None = None
    max_tries: int = 100
    gsat_flips: int = 1000
    solutions_per_instance: int = 1000
    exclude_contours_from_exit_ratio: bool = False
    filter_attempts_per_instance: int = 50
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "grid", tuple(self.grid))
        object.__setattr__(self, "levels", tuple(self.levels))
        if not self.grid:
            raise ValueError("experiment grid is empty")
        if any(lvl < 0 for lvl in self.levels):
            raise ValueError("levels must be nonnegative")
        if self.instances_per_point < 1:
            raise ValueError("instances_per_point must be >= 1")
        if self.sat_filter not in SAT_FILTERS:
            raise ValueError(f"unknown sat_filter {self.sat_filter!r}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def to_json_dict(self) -> dict:
        out = {
            "grid": [g.to_json_dict() for g in self.grid],
            "levels": list(self.levels),
            "instances_per_point": self.instances_per_point,
            "sat_filter": self.sat_filter,
            "plateau_state_cap": self.plateau_state_cap,
            "escape_expansion_cap": self.escape_expansion_cap,
            "solver_budget": self.solver_budget,
            "master_seed": self.master_seed,
            "max_flips": self.max_flips,
            "max_tries": self.max_tries,
            "gsat_flips": self.gsat_flips,
            "solutions_per_instance": self.solutions_per_instance,
            "exclude_contours_from_exit_ratio": self.exclude_contours_from_exit_ratio,
            "filter_attempts_per_instance": self.filter_attempts_per_instance,
            "workers": self.workers,
        }
        return out

    @classmethod
    def from_json_dict(cls, data: dict) -> "ExperimentSpec":
        kwargs = dict(data)
        kwargs["grid"] = tuple(GeneratorSpec.from_json_dict(g) for g in data["grid"])
        if "levels" in kwargs:
            kwargs["levels"] = tuple(kwargs["levels"])
        return cls(**kwargs)


def point_digest(point: GeneratorSpec) -> str:
    """Stable identity of a grid point; independent of its seed and position."""
    payload = {k: v for k, v in point.to_json_dict().items() if k != "seed"}
    return sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()[:16]


@dataclass(frozen=True)
class PlateauSample:
    point_index: int
    instance_index: int
    instance_seed: int
    target_level: int
    found: bool
    size: int = 0
    classification: str = ""
    truncated: bool = False
    exit_count: int = 0

    @property
    def is_minimum(self) -> bool:
        return self.classification in ("global_minimum", "local_minimum", "minimum")


@dataclass(frozen=True)
class AggregateRow:
    """One (grid point, level) cell of a survey.

    ``proportion_minima`` is taken over classified (untruncated) plateaus,
    so ``n_minima + n_benches == n_samples - n_truncated``; contours count
    inside ``n_benches``.  Size medians cover untruncated plateaus only.
    """

    variant: str
    num_variables: int
    num_clauses: int
    num_clusters: int | None
    clauses_per_cluster: int | None
    num_linking: int | None
    level: int
    n_samples: int
    n_failed: int
    n_minima: int
    n_benches: int
    n_contours: int
    n_truncated: int
    proportion_minima: float | None
    median_minimum_size: float | None
    median_bench_size: float | None
    mean_exit_ratio: float | None
    max_minimum_size: int | None
    max_bench_size: int | None
    minima_size_hist: tuple[int, ...]
    bench_size_hist: tuple[int, ...]
    exit_ratio_hist: tuple[int, ...]


def _size_bin(size: int) -> int:
    idx = 0
    for edge in SIZE_BIN_EDGES[1:]:
        if size < edge:
            return idx
        idx += 1
    return len(SIZE_BIN_EDGES) - 1


def _ratio_bin(ratio: float) -> int:
    return min(int(ratio * EXIT_RATIO_BINS), EXIT_RATIO_BINS - 1)


def _solver_matches(formula: Formula, spec: ExperimentSpec) -> bool:
    result = solve(formula, budget=spec.solver_budget)
    if result.status == UNKNOWN:
        return False  # budget ran out: never mislabel, just reject the instance
    want_sat = spec.sat_filter == "require_sat"
    return (result.status == SAT) == want_sat


def _filtered_instance(
    spec: ExperimentSpec, point: GeneratorSpec, digest: str, instance_index: int
) -> tuple[Formula, int]:
    """Generate (and, if filtering, solve) until an acceptable instance appears."""
    for attempt in range(spec.filter_attempts_per_instance):
        seed = derive_seed(spec.master_seed, digest, "instance", instance_index, attempt)
        formula = generate(point.with_seed(seed))
        if spec.sat_filter == "none" or _solver_matches(formula, spec):
            return formula, seed
    raise SatFilterStarvation(
        f"grid point {point.to_json_dict()} produced no "
        f"{spec.sat_filter} instance in {spec.filter_attempts_per_instance} attempts "
        f"(instance slot {instance_index})"
    )


def _survey_levels(spec: ExperimentSpec) -> tuple[int, ...]:
    if spec.sat_filter == "require_unsat":
        return tuple(lvl for lvl in spec.levels if lvl > 0)
    return spec.levels


def _survey_one_instance(
    spec: ExperimentSpec, point_index: int
, instance_index: int) -> list[PlateauSample]:
    point = spec.grid[point_index]
    digest = point_digest(point)
    formula, seed = _filtered_instance(spec, point, digest, instance_index)
    optimum = 0 if spec.sat_filter == "require_sat" else None
    samples = []
    for lvl in _survey_levels(spec):
        config = GsatConfig(
            seed=derive_seed(spec.master_seed, digest, "sample", instance_index, lvl),
            max_flips=spec.max_flips,
            max_tries=spec.max_tries,
        )
        state = find_state_at_level(formula, lvl, config)
        if state is None:
            samples.append(PlateauSample(point_index, instance_index, seed, lvl, False))
            continue
        report = enumerate_plateau(
            formula,
            state,
            state_cap=spec.plateau_state_cap,
            include_border_profile=False,
            optimum_level=optimum,
        )
        samples.append(
            PlateauSample(
                point_index,
                instance_index,
                seed,
                lvl,
                True,
                size=report.size,
                classification=report.classification,
                truncated=report.truncated,
                exit_count=report.exit_count,
            )
        )
    return samples


def _survey_task(args):
    spec, point_index, instance_index = args
    return _survey_one_instance(spec, point_index, instance_index)


def collect_plateau_samples(spec: ExperimentSpec) -> list[PlateauSample]:
    """One plateau sample per (grid point, instance, level), in stable order."""
    tasks = [
        (spec, pi, ii)
        for pi in range(len(spec.grid))
        for ii in range(spec.instances_per_point)
    ]
    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            chunks = list(pool.map(_survey_task, tasks, chunksize=4))
    else:
        chunks = [_survey_task(t) for t in tasks]
    return [sample for chunk in chunks for sample in chunk]


def aggregate_samples(spec: ExperimentSpec, samples: list[PlateauSample]) -> list[AggregateRow]:
    rows = []
    for point_index, point in enumerate(spec.grid):
        for lvl in _survey_levels(spec):
            cell = [
                s
                for s in samples
                if s.point_index == point_index and s.target_level == lvl
            ]
            found = [s for s in cell if s.found]
            n_failed = len(cell) - len(found)
            truncated = [s for s in found if s.truncated]
            classified = [s for s in found if not s.truncated]
            minima = [s for s in classified if s.is_minimum]
            benches = [s for s in classified if not s.is_minimum]
            contours = [s for s in benches if s.classification == CONTOUR]
            ratio_pool = benches
            if spec.exclude_contours_from_exit_ratio:
                ratio_pool = [s for s in benches if s.classification != CONTOUR]
            ratios = [s.exit_count / s.size for s in ratio_pool]
            min_sizes = sorted(s.size for s in minima)
            bench_sizes = sorted(s.size for s in benches)
            minima_hist = [0] * len(SIZE_BIN_EDGES)
            for size in min_sizes:
                minima_hist[_size_bin(size)] += 1
            bench_hist = [0] * len(SIZE_BIN_EDGES)
            for size in bench_sizes:
                bench_hist[_size_bin(size)] += 1
            ratio_hist = [0] * EXIT_RATIO_BINS
            for r in ratios:
                ratio_hist[_ratio_bin(r)] += 1
            rows.append(
                AggregateRow(
                    variant=point.variant,
                    num_variables=point.total_variables,
                    num_clauses=point.total_clauses,
                    num_clusters=point.num_clusters,
                    clauses_per_cluster=point.clauses_per_cluster,
                    num_linking=point.num_linking,
                    level=lvl,
                    n_samples=len(found),
                    n_failed=n_failed,
                    n_minima=len(minima),
                    n_benches=len(benches),
                    n_contours=len(contours),
                    n_truncated=len(truncated),
                    proportion_minima=(
                        len(minima) / len(classified) if classified else None
                    ),
                    median_minimum_size=(
                        statistics.median(min_sizes) if min_sizes else None
                    ),
                    median_bench_size=(
                        statistics.median(bench_sizes) if bench_sizes else None
                    ),
                    mean_exit_ratio=(sum(ratios) / len(ratios) if ratios else None),
                    max_minimum_size=max(min_sizes) if min_sizes else None,
                    max_bench_size=max(bench_sizes) if bench_sizes else None,
                    minima_size_hist=tuple(minima_hist),
                    bench_size_hist=tuple(bench_hist),
                    exit_ratio_hist=tuple(ratio_hist),
                )
            )
    return rows


def run_plateau_survey(spec: ExperimentSpec) -> list[AggregateRow]:
    """Sample and aggregate; fully deterministic in the master seed."""
    return aggregate_samples(spec, collect_plateau_samples(spec))


# ---------------------------------------------------------------------------
# escape experiment


@dataclass(frozen=True)
class EscapeOutcome:
    instance_index: int
    instance_seed: int
    terminal_level: int
    category: str  # solution / local_minimum / minimum / bench / truncated
    barrier_increase: int | None
    states_expanded: int | None
    capped: bool


@dataclass(frozen=True)
class EscapeExperimentResult:
    outcomes: tuple[EscapeOutcome, ...]
    barrier_increase_distribution: dict[int, int]
    category_counts: dict[str, int]

    @property
    def n_local_minima(self) -> int:
        return self.category_counts.get("local_minimum", 0) + self.category_counts.get(
            "minimum", 0
        )


def _escape_one_instance(spec: ExperimentSpec, instance_index: int) -> EscapeOutcome:
    point = spec.grid[0]
    digest = point_digest(point)
    formula, seed = _filtered_instance(spec, point, digest, instance_index)
    config = GsatConfig(
        seed=derive_seed(spec.master_seed, digest, "escape-walk", instance_index),
        max_flips=spec.gsat_flips,
        max_tries=1,
    )
    result = gsat(formula, config)
    optimum = 0 if spec.sat_filter == "require_sat" else None
    report = enumerate_plateau(
        formula,
        result.assignment,
        state_cap=spec.plateau_state_cap,
        include_border_profile=False,
        optimum_level=optimum,
    )
    if report.truncated:
        return EscapeOutcome(instance_index, seed, report.level, "truncated", None, None, False)
    if report.level == 0:
        return EscapeOutcome(instance_index, seed, 0, "solution", None, None, False)
    if not report.is_minimum:
        return EscapeOutcome(instance_index, seed, report.level, "bench", None, None, False)
    esc = escape_barrier(formula, report, expansion_cap=spec.escape_expansion_cap)
    return EscapeOutcome(
        instance_index,
        seed,
        report.level,
        report.classification,
        esc.barrier_increase,
        esc.states_expanded,
        esc.capped,
    )


def _escape_task(args):
    return _escape_one_instance(*args)


def run_escape_experiment(spec: ExperimentSpec) -> EscapeExperimentResult:
    """One greedy try per instance; barrier statistics of terminal minima."""
    tasks = [(spec, i) for i in range(spec.instances_per_point)]
    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            outcomes = list(pool.map(_escape_task, tasks, chunksize=2))
    else:
        outcomes = [_escape_task(t) for t in tasks]
    distribution = Counter(
        o.barrier_increase for o in outcomes if o.barrier_increase is not None
    )
    categories = Counter(o.category for o in outcomes)
    return EscapeExperimentResult(
        tuple(outcomes), dict(sorted(distribution.items())), dict(sorted(categories.items()))
    )


# ---------------------------------------------------------------------------
# solution clustering experiment


@dataclass(frozen=True)
class SolutionClusterResult:
    """Distinct global minima among many greedy solutions of one instance."""

    instance_seed: int | None
    attempts: int
    n_solved: int
    n_failed: int
    n_unique_minima: int
    n_truncated_plateaus: int
    unique_sizes: tuple[int, ...]
    median_size: float | None
    min_size: int | None
    max_size: int | None


def run_solution_cluster_experiment(
    spec: ExperimentSpec, formula: Formula | None = None
) -> SolutionClusterResult:
    """Cluster greedy solutions of a single satisfiable instance.

    Solutions whose level-0 plateaus share a canonical representative are
    the same global minimum.  Truncated plateaus cannot be identified and
    are tallied separately.
    """
    point = spec.grid[0]
    digest = point_digest(point)
    instance_seed = None
    if formula is None:
        if spec.sat_filter != "require_sat":
            spec = replace(spec, sat_filter="require_sat")
        formula, instance_seed = _filtered_instance(spec, point, digest, 0)
    unique: dict[bytes, int] = {}
    n_solved = 0
    n_failed = 0
    n_truncated = 0
    for j in range(spec.solutions_per_instance):
        config = GsatConfig(
            seed=derive_seed(spec.master_seed, digest, "solution", j),
            max_flips=spec.max_flips,
            max_tries=spec.max_tries,
        )
        result = gsat(formula, config)
        if not result.solved:
            n_failed += 1
            continue
        n_solved += 1
        report = enumerate_plateau(
            formula,
            result.assignment,
            state_cap=spec.plateau_state_cap,
            include_border_profile=False,
            optimum_level=0,
        )
        if report.truncated:
            n_truncated += 1
            continue
        unique[report.canonical_rep.packed()] = report.size
    sizes = tuple(sorted(unique.values()))
    return SolutionClusterResult(
        instance_seed=instance_seed,
        attempts=spec.solutions_per_instance,
        n_solved=n_solved,
        n_failed=n_failed,
        n_unique_minima=len(unique),
        n_truncated_plateaus=n_truncated,
        unique_sizes=sizes,
        median_size=statistics.median(sizes) if sizes else None,
        min_size=sizes[0] if sizes else None,
        max_size=sizes[-1] if sizes else None,
    )


# ---------------------------------------------------------------------------
# CSV / manifest emission


_POINT_COLUMNS = [
    "variant",
    "num_variables",
    "num_clauses",
    "num_clusters",
    "clauses_per_cluster",
    "num_linking",
]

_SCALAR_COLUMNS = _POINT_COLUMNS + [
    "level",
    "n_samples",
    "n_failed",
    "n_minima",
    "n_benches",
    "n_contours",
    "n_truncated",
    "proportion_minima",
    "median_minimum_size",
    "median_bench_size",
    "mean_exit_ratio",
    "max_minimum_size",
    "max_bench_size",
]


def _cell(value):
    return "" if value is None else value


def summarize_to_csv(
    rows: list[AggregateRow], spec: ExperimentSpec, output_dir: str | Path
) -> list[Path]:
    """Write the survey tables plus a manifest that reproduces the run.

    Emits ``survey.csv`` (scalar statistics per grid point and level),
    ``survey_size_histograms.csv`` and ``survey_exit_ratio_histograms.csv``
    (explicit bin edges per row), and ``manifest.json`` holding the full
    experiment spec.  Re-running the manifest reproduces the bytes.
    """
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []

    survey = out / "survey.csv"
    with survey.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_SCALAR_COLUMNS)
        for row in rows:
            writer.writerow([_cell(getattr(row, col)) for col in _SCALAR_COLUMNS])
    paths.append(survey)

    sizes = out / "survey_size_histograms.csv"
    with sizes.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_POINT_COLUMNS + ["level", "plateau_class", "bin_lo", "bin_hi", "count"])
        for row in rows:
            base = [_cell(getattr(row, col)) for col in _POINT_COLUMNS] + [row.level]
            for cls, hist in (("minimum", row.minima_size_hist), ("bench", row.bench_size_hist)):
                for b, count in enumerate(hist):
                    lo = SIZE_BIN_EDGES[b]
                    hi = SIZE_BIN_EDGES[b + 1] if b + 1 < len(SIZE_BIN_EDGES) else ""
                    writer.writerow(base + [cls, lo, hi, count])
    paths.append(sizes)

    ratios = out / "survey_exit_ratio_histograms.csv"
    with ratios.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_POINT_COLUMNS + ["level", "bin_lo", "bin_hi", "count"])
        for row in rows:
            base = [_cell(getattr(row, col)) for col in _POINT_COLUMNS] + [row.level]
            for b, count in enumerate(row.exit_ratio_hist):
                writer.writerow(base + [b / EXIT_RATIO_BINS, (b + 1) / EXIT_RATIO_BINS, count])
    paths.append(ratios)

    manifest = out / "manifest.json"
    manifest.write_text(
        json.dumps(
            {"experiment": "plateau_survey", "spec": spec.to_json_dict(),
             "outputs": [p.name for p in paths]},
            indent=2,
            sort_keys=True,
        )
        + "\n"
    )
    paths.append(manifest)
    return paths


def write_escape_csv(
    result: EscapeExperimentResult, spec: ExperimentSpec, output_dir: str | Path
) -> list[Path]:
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    table = out / "escape.csv"
    with table.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["instance_index", "instance_seed", "terminal_level", "category",
             "barrier_increase", "states_expanded", "capped"]
        )
        for o in result.outcomes:
            writer.writerow(
                [o.instance_index, o.instance_seed, o.terminal_level, o.category,
                 _cell(o.barrier_increase), _cell(o.states_expanded), o.capped]
            )
    summary = out / "escape_summary.json"
    summary.write_text(
        json.dumps(
            {
                "experiment": "escape",
                "spec": spec.to_json_dict(),
                "barrier_increase_distribution": {
                    str(k): v for k, v in result.barrier_increase_distribution.items()
                },
                "category_counts": result.category_counts,
            },
            indent=2,
            sort_keys=True,
        )
        + "\n"
    )
    return [table, summary]


def write_solution_cluster_report(
    result: SolutionClusterResult, spec: ExperimentSpec, output_dir: str | Path
) -> list[Path]:
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    sizes = out / "solution_cluster_sizes.csv"
    with sizes.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["minimum_index", "size"])
        for i, size in enumerate(result.unique_sizes):
            writer.writerow([i, size])
    summary = out / "solution_cluster_summary.json"
    summary.write_text(
        json.dumps(
            {
                "experiment": "solution_cluster",
                "spec": spec.to_json_dict(),
                "instance_seed": result.instance_seed,
                "attempts": result.attempts,
                "n_solved": result.n_solved,
                "n_failed": result.n_failed,
                "n_unique_minima": result.n_unique_minima,
                "n_truncated_plateaus": result.n_truncated_plateaus,
                "median_size": result.median_size,
                "min_size": result.min_size,
                "max_size": result.max_size,
            },
            indent=2,
            sort_keys=True,
        )
        + "\n"
    )
    return [sizes, summary]

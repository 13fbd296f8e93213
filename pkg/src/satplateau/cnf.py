"""3-CNF formulas, assignments, and exact/incremental level evaluation.

The search space of a formula with N variables is the N-dimensional
hypercube of complete assignments; two assignments are adjacent when they
differ in exactly one variable.  The *level* of an assignment is the number
of clauses it leaves unsatisfied.  Everything in this package is built on
the three primitives defined here:

* :func:`level` / :func:`unsat_clause_indices` evaluate an assignment from
  scratch,
* :class:`LevelState` maintains per-clause true-literal counts so a single
  flip costs only the clauses containing the flipped variable,
* :func:`scan_neighborhood` evaluates all N single-flip level deltas of an
  assignment in one vectorized pass (the workhorse of greedy search and
  plateau enumeration).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

__all__ = [
    "Literal",
    "Clause",
    "Formula",
    "Assignment",
    "LevelState",
    "DimacsError",
    "level",
    "unsat_clause_indices",
    "neighbors",
    "scan_neighborhood",
    "neighbor_deltas",
    "parse_dimacs",
    "emit_dimacs",
    "pack_bits",
    "unpack_bits",
    "flip_packed",
]

PROVENANCE_PREFIX = "c provenance: "


@dataclass(frozen=True)
class Literal:
    """A variable occurrence with a sign.  ``variable`` is 1-based."""

    variable: int
    negated: bool = False

    def __post_init__(self):
        if self.variable < 1:
            raise ValueError(f"variable index must be >= 1, got {self.variable}")

    def to_int(self) -> int:
        """DIMACS encoding: the signed variable index."""
        return -self.variable if self.negated else self.variable

    @classmethod
    def from_int(cls, lit: int) -> "Literal":
        if lit == 0:
            raise ValueError("0 is not a literal")
        return cls(abs(lit), lit < 0)

    def __repr__(self):
        return f"{'-' if self.negated else ''}{self.variable}"


@dataclass(frozen=True)
class Clause:
    """Exactly three literals over three distinct variables."""

    literals: tuple[Literal, Literal, Literal]

    def __post_init__(self):
        if len(self.literals) != 3:
            raise ValueError(f"a clause needs exactly 3 literals, got {len(self.literals)}")
        variables = {lit.variable for lit in self.literals}
        if len(variables) != 3:
            raise ValueError(f"clause {self.literals} does not use 3 distinct variables")

    @classmethod
    def from_ints(cls, *lits: int) -> "Clause":
        return cls(tuple(Literal.from_int(x) for x in lits))

    def to_ints(self) -> tuple[int, int, int]:
        return tuple(lit.to_int() for lit in self.literals)

    def __repr__(self):
        return "(" + " ".join(repr(lit) for lit in self.literals) + ")"


@dataclass(frozen=True)
class Formula:
    """An immutable 3-CNF instance.

    Duplicate clauses are allowed (the random generators sample with
    replacement across clauses), and variables may be absent from every
    clause.  ``provenance`` is an optional JSON-serializable record of how
    the instance was generated; it survives a DIMACS round trip.
    """

    num_variables: int
    clauses: tuple[Clause, ...]
    provenance: dict | None = field(default=None, compare=True)

    def __post_init__(self):
        if self.num_variables < 1:
            raise ValueError("a formula needs at least one variable")
        object.__setattr__(self, "clauses", tuple(self.clauses))
        for i, clause in enumerate(self.clauses):
            for lit in clause.literals:
                if lit.variable > self.num_variables:
                    raise ValueError(
                        f"clause {i}: variable {lit.variable} exceeds declared count "
                        f"{self.num_variables}"
                    )

    @classmethod
    def from_ints(
        cls,
        num_variables: int,
        clauses: Iterable[Sequence[int]],
        provenance: dict | None = None,
    ) -> "Formula":
        return cls(
            num_variables,
            tuple(Clause.from_ints(*c) for c in clauses),
            provenance,
        )

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    # Cached array views used by the evaluators.  cached_property writes to
    # the instance __dict__, which is allowed on frozen dataclasses.

    @cached_property
    def _var_idx(self) -> np.ndarray:
        """[C, 3] 0-based variable indices."""
        return np.array(
            [[lit.variable - 1 for lit in cl.literals] for cl in self.clauses],
            dtype=np.int64,
        ).reshape(len(self.clauses), 3)

    @cached_property
    def _negated(self) -> np.ndarray:
        """[C, 3] sign flags (True where the literal is negated)."""
        return np.array(
            [[lit.negated for lit in cl.literals] for cl in self.clauses],
            dtype=bool,
        ).reshape(len(self.clauses), 3)

    @cached_property
    def _occurrences(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """CSR-style variable -> (clause index, negated) occurrence lists."""
        order = np.argsort(self._var_idx.ravel(), kind="stable")
        clause_of = order // 3
        neg_of = self._negated.ravel()[order]
        counts = np.bincount(self._var_idx.ravel(), minlength=self.num_variables)
        ptr = np.zeros(self.num_variables + 1, dtype=np.int64)
        np.cumsum(counts, out=ptr[1:])
        return ptr, clause_of.astype(np.int64), neg_of

    def __getstate__(self):
        return (self.num_variables, self.clauses, self.provenance)

    def __setstate__(self, state):
        object.__setattr__(self, "num_variables", state[0])
        object.__setattr__(self, "clauses", state[1])
        object.__setattr__(self, "provenance", state[2])

    def __repr__(self):
        return f"Formula(N={self.num_variables}, C={self.num_clauses})"


@dataclass(frozen=True)
class Assignment:
    """A complete truth assignment: one hypercube vertex.

    ``bits[i]`` is the value of variable ``i + 1``.  The string form lists
    variable 1 first, e.g. ``"1101"``.
    """

    bits: tuple[int, ...]

    def __post_init__(self):
        if not self.bits:
            raise ValueError("an assignment needs at least one variable")
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("assignment bits must be 0 or 1")

    @classmethod
    def from_string(cls, text: str) -> "Assignment":
        if not text or set(text) - {"0", "1"}:
            raise ValueError(f"not a bit string: {text!r}")
        return cls(tuple(int(ch) for ch in text))

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "Assignment":
        return cls(tuple(int(b) for b in arr))

    @classmethod
    def from_packed(cls, data: bytes, num_variables: int) -> "Assignment":
        return cls.from_array(unpack_bits(data, num_variables))

    def to_string(self) -> str:
        return "".join(str(b) for b in self.bits)

    def to_array(self) -> np.ndarray:
        return np.array(self.bits, dtype=bool)

    def packed(self) -> bytes:
        return pack_bits(self.to_array())

    def value(self, variable: int) -> bool:
        return bool(self.bits[variable - 1])

    def flip(self, variable: int) -> "Assignment":
        if not 1 <= variable <= len(self.bits):
            raise ValueError(f"variable {variable} out of range 1..{len(self.bits)}")
        bits = list(self.bits)
        bits[variable - 1] ^= 1
        return Assignment(tuple(bits))

    def __len__(self):
        return len(self.bits)

    def __repr__(self):
        return f"Assignment({self.to_string()!r})"


def pack_bits(bits: np.ndarray) -> bytes:
    """Canonical fixed-width encoding: variable 1 in the MSB of byte 0.

    Comparing packed encodings of equal-length assignments orders them
    lexicographically by their 0/1 string.
    """
    return np.packbits(np.asarray(bits, dtype=bool)).tobytes()


def unpack_bits(data: bytes, num_variables: int) -> np.ndarray:
    return np.unpackbits(np.frombuffer(data, dtype=np.uint8))[:num_variables].astype(bool)


def flip_packed(data: bytes, variable0: int) -> bytes:
    """Flip 0-based variable ``variable0`` in a packed encoding."""
    buf = bytearray(data)
    buf[variable0 >> 3] ^= 0x80 >> (variable0 & 7)
    return bytes(buf)


def _check_length(formula: Formula, a: Assignment) -> None:
    if len(a) != formula.num_variables:
        raise ValueError(
            f"assignment has {len(a)} bits, formula has {formula.num_variables} variables"
        )


def _true_counts(formula: Formula, bits: np.ndarray) -> np.ndarray:
    """Per-clause count of true literals (0..3) under ``bits``."""
    if formula.num_clauses == 0:
        return np.zeros(0, dtype=np.int64)
    lit_true = bits[formula._var_idx] ^ formula._negated
    return lit_true.sum(axis=1)


def level(formula: Formula, a: Assignment) -> int:
    """Number of clauses with no true literal under ``a``."""
    _check_length(formula, a)
    counts = _true_counts(formula, a.to_array())
    return int((counts == 0).sum())


def unsat_clause_indices(formula: Formula, a: Assignment) -> set[int]:
    """0-based indices of the clauses unsatisfied under ``a``."""
    _check_length(formula, a)
    counts = _true_counts(formula, a.to_array())
    return set(int(i) for i in np.flatnonzero(counts == 0))


def neighbors(a: Assignment) -> list[Assignment]:
    """The N assignments at Hamming distance 1, in ascending variable order."""
    return [a.flip(v) for v in range(1, len(a) + 1)]


def scan_neighborhood(formula: Formula, bits: np.ndarray) -> tuple[int, np.ndarray]:
    """Level of ``bits`` plus the level delta of every single-variable flip.

    Returns ``(level, deltas)`` where ``deltas[v]`` is
    ``level(flip(bits, v)) - level(bits)`` for 0-based variable ``v``.
    Flipping a variable breaks the clauses in which it carries the only true
    literal and mends the clauses that currently have no true literal.
    Variables absent from every clause get delta 0.
    """
    n = formula.num_variables
    if formula.num_clauses == 0:
        return 0, np.zeros(n, dtype=np.int64)
    var_idx = formula._var_idx
    lit_true = bits[var_idx] ^ formula._negated
    counts = lit_true.sum(axis=1)
    lvl = int((counts == 0).sum())
    mended = np.bincount(var_idx[counts == 0].ravel(), minlength=n)
    critical = counts == 1
    broken_vars = var_idx[critical][lit_true[critical]]
    broken = np.bincount(broken_vars, minlength=n)
    return lvl, broken - mended


def neighbor_deltas(formula: Formula, a: Assignment) -> np.ndarray:
    """Vector of all N flip deltas for an :class:`Assignment` (see
    :func:`scan_neighborhood`)."""
    _check_length(formula, a)
    return scan_neighborhood(formula, a.to_array())[1]


class LevelState:
    """Mutable incremental evaluator around one assignment.

    Holds per-clause true-literal counts so that :meth:`flip_delta` and
    :meth:`flip` touch only the clauses containing the flipped variable.
    Single-owner scratchpad; not safe to share across threads.
    """

    def __init__(self, formula: Formula, a: Assignment):
        _check_length(formula, a)
        self.formula = formula
        self._bits = a.to_array()
        self._counts = _true_counts(formula, self._bits).astype(np.int64)
        self._level = int((self._counts == 0).sum())

    @property
    def level(self) -> int:
        return self._level

    @property
    def assignment(self) -> Assignment:
        return Assignment.from_array(self._bits)

    def true_literal_counts(self) -> np.ndarray:
        return self._counts.copy()

    def _scan(self, variable: int, commit: bool) -> int:
        if not 1 <= variable <= self.formula.num_variables:
            raise ValueError(
                f"variable {variable} out of range 1..{self.formula.num_variables}"
            )
        ptr, clause_of, neg_of = self.formula._occurrences
        v = variable - 1
        was_true = bool(self._bits[v])
        delta = 0
        for k in range(ptr[v], ptr[v + 1]):
            j = clause_of[k]
            lit_was_true = was_true ^ bool(neg_of[k])
            if lit_was_true:
                if self._counts[j] == 1:
                    delta += 1
                if commit:
                    self._counts[j] -= 1
            else:
                if self._counts[j] == 0:
                    delta -= 1
                if commit:
                    self._counts[j] += 1
        if commit:
            self._bits[v] = not was_true
            self._level += delta
        return delta

    def flip_delta(self, variable: int) -> int:
        """Level change that flipping ``variable`` would cause."""
        return self._scan(variable, commit=False)

    def flip(self, variable: int) -> int:
        """Flip ``variable`` in place; returns the level delta."""
        return self._scan(variable, commit=True)


class DimacsError(ValueError):
    """Raised for malformed DIMACS CNF input; the message names the line."""


def parse_dimacs(text: str) -> Formula:
    """Parse a DIMACS CNF document into a :class:`Formula`.

    Requires a ``p cnf N C`` header and exactly C clauses of three distinct
    variables each, 0-terminated.  Clauses may span lines.  Comment lines
    starting with ``c provenance:`` carry an optional JSON generator record
    that is restored into ``Formula.provenance``.
    """
    num_vars = None
    num_clauses = None
    provenance = None
    pending: list[int] = []
    pending_line = 0
    clauses: list[Clause] = []

    def finish_clause(line_no: int):
        if len(pending) != 3:
            raise DimacsError(
                f"line {line_no}: clause has {len(pending)} literals, expected 3"
            )
        try:
            clause = Clause.from_ints(*pending)
        except ValueError as exc:
            raise DimacsError(f"line {line_no}: {exc}") from exc
        for lit in clause.literals:
            if lit.variable > num_vars:
                raise DimacsError(
                    f"line {line_no}: variable {lit.variable} exceeds declared {num_vars}"
                )
        clauses.append(clause)
        pending.clear()

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("c"):
            if line.startswith(PROVENANCE_PREFIX.strip()) and ":" in line:
                payload = raw.split(":", 1)[1].strip()
                try:
                    provenance = json.loads(payload)
                except json.JSONDecodeError as exc:
                    raise DimacsError(f"line {line_no}: bad provenance JSON") from exc
            continue
        if line.startswith("p"):
            if num_vars is not None:
                raise DimacsError(f"line {line_no}: duplicate header")
            fields = line.split()
            if len(fields) != 4 or fields[0] != "p" or fields[1] != "cnf":
                raise DimacsError(f"line {line_no}: malformed header {line!r}")
            try:
                num_vars = int(fields[2])
                num_clauses = int(fields[3])
            except ValueError as exc:
                raise DimacsError(f"line {line_no}: non-integer header counts") from exc
            if num_vars < 1 or num_clauses < 0:
                raise DimacsError(f"line {line_no}: header counts out of range")
            continue
        if num_vars is None:
            raise DimacsError(f"line {line_no}: clause before 'p cnf' header")
        for token in line.split():
            try:
                lit = int(token)
            except ValueError as exc:
                raise DimacsError(f"line {line_no}: non-integer token {token!r}") from exc
            if lit == 0:
                finish_clause(line_no)
            else:
                if not pending:
                    pending_line = line_no
                pending.append(lit)

    if num_vars is None:
        raise DimacsError("line 1: missing 'p cnf' header")
    if pending:
        raise DimacsError(f"line {pending_line}: clause not terminated by 0")
    if len(clauses) != num_clauses:
        raise DimacsError(
            f"line {len(text.splitlines())}: header declares {num_clauses} clauses, "
            f"found {len(clauses)}"
        )
    return Formula(num_vars, tuple(clauses), provenance)


def emit_dimacs(formula: Formula) -> str:
    """Serialize a formula; ``parse_dimacs(emit_dimacs(f))`` reproduces ``f``."""
    lines = []
    if formula.provenance is not None:
        lines.append(PROVENANCE_PREFIX + json.dumps(formula.provenance, sort_keys=True))
    lines.append(f"p cnf {formula.num_variables} {formula.num_clauses}")
    for clause in formula.clauses:
        lines.append(" ".join(str(x) for x in clause.to_ints()) + " 0")
    return "\n".join(lines) + "\n"


def _iter_all_assignments(num_variables: int) -> Iterator[Assignment]:
    """All 2^N assignments in lexicographic order of their bit strings."""
    for x in range(1 << num_variables):
        bits = tuple((x >> (num_variables - 1 - i)) & 1 for i in range(num_variables))
        yield Assignment(bits)

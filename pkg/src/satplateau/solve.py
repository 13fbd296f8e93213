"""Complete satisfiability decision by backtracking search.

Chronological DPLL with unit propagation and pure-literal elimination,
used to split experiment populations into satisfiable and unsatisfiable
pools.  Two deterministic branching rules are available:

* ``moms`` (default): branch on the variable with the most occurrences in
  the shortest active clauses, trying the more frequent sign first.  This
  is what makes 100-variable instances at the phase transition decidable
  in reasonable time.
* ``lowest_index``: branch on the lowest-index unassigned variable, trying
  False then True.  Slower, kept for its utter predictability.

Both rules are deterministic, so results and statistics are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cnf import Assignment, Formula, level

__all__ = ["SolveResult", "solve", "SAT", "UNSAT", "UNKNOWN"]

SAT = "sat"
UNSAT = "unsat"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class SolveResult:
    """Outcome of a complete search.

    ``status`` is ``"sat"``, ``"unsat"``, or ``"unknown"`` (decision budget
    exhausted; never a silent mislabel).  ``model`` is present iff sat and
    satisfies every clause.
    """

    status: str
    model: Assignment | None
    decisions: int
    propagations: int


class _BudgetExhausted(Exception):
    pass


class _Solver:
    def __init__(self, formula: Formula, budget: int | None, branching: str):
        self.n = formula.num_variables
        self.budget = budget
        self.branching = branching
        self.clause_lits = [cl.to_ints() for cl in formula.clauses]
        self.occ_pos = [[] for _ in range(self.n + 1)]
        self.occ_neg = [[] for _ in range(self.n + 1)]
        for j, lits in enumerate(self.clause_lits):
            for lit in lits:
                (self.occ_pos if lit > 0 else self.occ_neg)[abs(lit)].append(j)
        self.assign = [-1] * (self.n + 1)
        self.num_true = [0] * len(self.clause_lits)
        self.num_free = [3] * len(self.clause_lits)
        self.trail: list[int] = []
        self.queue: list[tuple[int, int]] = []
        self.decisions = 0
        self.propagations = 0

    def _assign(self, var: int, val: int) -> bool:
        """Commit var=val; returns False on an immediate conflict."""
        self.assign[var] = val
        self.trail.append(var)
        num_true = self.num_true
        num_free = self.num_free
        sat_side = self.occ_pos[var] if val else self.occ_neg[var]
        false_side = self.occ_neg[var] if val else self.occ_pos[var]
        for j in sat_side:
            num_true[j] += 1
            num_free[j] -= 1
        ok = True
        for j in false_side:
            num_free[j] -= 1
            if num_true[j] == 0:
                free = num_free[j]
                if free == 0:
                    ok = False
                elif free == 1:
                    for lit in self.clause_lits[j]:
                        if self.assign[abs(lit)] == -1:
                            self.queue.append((abs(lit), 1 if lit > 0 else 0))
                            break
        return ok

    def _undo_to(self, mark: int) -> None:
        while len(self.trail) > mark:
            var = self.trail.pop()
            val = self.assign[var]
            sat_side = self.occ_pos[var] if val else self.occ_neg[var]
            false_side = self.occ_neg[var] if val else self.occ_pos[var]
            for j in sat_side:
                self.num_true[j] -= 1
                self.num_free[j] += 1
            for j in false_side:
                self.num_free[j] += 1
            self.assign[var] = -1

    def _propagate(self) -> bool:
        while self.queue:
            var, val = self.queue.pop()
            current = self.assign[var]
            if current != -1:
                if current != val:
                    self.queue.clear()
                    return False
                continue
            self.propagations += 1
            if not self._assign(var, val):
                self.queue.clear()
                return False
        return True

    def _pick(self):
        """Scan active clauses; returns (branch_var, first_value, pure_list).

        branch_var is None when no clause is active (formula satisfied).
        """
        n = self.n
        pos2 = [0] * (n + 1)
        neg2 = [0] * (n + 1)
        pos_all = [0] * (n + 1)
        neg_all = [0] * (n + 1)
        assign = self.assign
        active = 0
        min_free = 4
        for j, lits in enumerate(self.clause_lits):
            if self.num_true[j]:
                continue
            active += 1
            free = self.num_free[j]
            if free < min_free:
                min_free = free
            short = free == 2
            for lit in lits:
                var = abs(lit)
                if assign[var] == -1:
                    if lit > 0:
                        pos_all[var] += 1
                        if short:
                            pos2[var] += 1
                    else:
                        neg_all[var] += 1
                        if short:
                            neg2[var] += 1
        if active == 0:
            return None, 0, []
        pures = []
        for var in range(1, n + 1):
            if assign[var] == -1:
                p, q = pos_all[var], neg_all[var]
                if p and not q:
                    pures.append((var, 1))
                elif q and not p:
                    pures.append((var, 0))
        if pures:
            return 0, 0, pures
        if self.branching == "lowest_index":
            for var in range(1, n + 1):
                if assign[var] == -1 and (pos_all[var] or neg_all[var]):
                    return var, 0, []
            return None, 0, []
        use2 = min_free == 2
        best_var = 0
        best_score = (-1, -1)
        for var in range(1, n + 1):
            if assign[var] != -1:
                continue
            p, q = (pos2[var], neg2[var]) if use2 else (pos_all[var], neg_all[var])
            if p == 0 and q == 0:
                continue
            score = (p + q, p * q)
            if score > best_score:
                best_score = score
                best_var = var
        first = 1 if pos_all[best_var] > neg_all[best_var] else 0
        return best_var, first, []

    def _search(self) -> bool:
        if not self._propagate():
            return False
        while True:
            var, first, pures = self._pick()
            if not pures:
                break
            self.queue.extend(pures)
            if not self._propagate():
                return False
        if var is None:
            return True
        self.decisions += 1
        if self.budget is not None and self.decisions > self.budget:
            raise _BudgetExhausted
        for val in (first, 1 - first):
            mark = len(self.trail)
            self.queue.append((var, val))
            if self._search():
                return True
            self._undo_to(mark)
        return False

    def model(self) -> Assignment:
        # Variables untouched by the search are irrelevant; fix them False.
        return Assignment(tuple(1 if self.assign[v] == 1 else 0 for v in range(1, self.n + 1)))


def solve(formula: Formula, budget: int | None = None, branching: str = "moms") -> SolveResult:
    """Decide satisfiability; exhaustive unless ``budget`` decisions run out."""
    if branching not in ("moms", "lowest_index"):
        raise ValueError(f"unknown branching rule {branching!r}")
    solver = _Solver(formula, budget, branching)
    try:
        found = solver._search()
    except _BudgetExhausted:
        return SolveResult(UNKNOWN, None, solver.decisions, solver.propagations)
    if found:
        model = solver.model()
        if level(formula, model) != 0:
            raise AssertionError("solver produced a non-satisfying model")
        return SolveResult(SAT, model, solver.decisions, solver.propagations)
    return SolveResult(UNSAT, None, solver.decisions, solver.propagations)

"""Exact sparse Gaussian elimination over the rationals.

Rows are dicts ``column -> Fraction``.  The right-hand side of each row is a
vector of Fractions so that one elimination serves a whole family of systems
whose RHS is a linear combination of fixed columns (the ``rhs_basis``).
Pivot rows are kept fully reduced, so solutions are read off directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Sequence


class InconsistentSystem(ValueError):
    """No solution exists for the requested right-hand side."""


@dataclass
class EliminationResult:
    # pivot column -> (reduced row without the pivot entry, rhs vector)
    pivots: dict
    # rhs vectors of rows that reduced to 0 = r; each must vanish
    conditions: list
    # label of a generating row for each condition
    condition_labels: list
    columns: set = field(default_factory=set)

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def free_columns(self) -> set:
        used = set()
        for row, _ in self.pivots.values():
            used.update(row)
        return (self.columns | used) - set(self.pivots)

    def is_consistent(self, weights: Sequence) -> bool:
        return all(_dot(cond, weights) == 0 for cond in self.conditions)

    def failed_conditions(self, weights: Sequence) -> list:
        return [lab for cond, lab in zip(self.conditions, self.condition_labels) if _dot(cond, weights) != 0]

    def solve(self, weights: Sequence, free_values: Mapping | None = None) -> dict:
        """A solution for RHS = sum_k weights[k] * rhs_basis[k]; free columns default to 0."""
        if not self.is_consistent(weights):
            raise InconsistentSystem("right-hand side violates a consistency condition")
        free_values = dict(free_values or {})
        out = {}
        for col, (row, rhs) in self.pivots.items():
            v = _dot(rhs, weights)
            for c, a in row.items():
                fv = free_values.get(c, 0)
                if fv:
                    v -= a * fv
            out[col] = v
        for c in self.free_columns():
            out[c] = Fraction(free_values.get(c, 0))
        return out

    def determined(self, col) -> bool:
        """True when ``col`` takes the same value in every solution."""
        if col in self.pivots:
            return not self.pivots[col][0]
        return False


def _dot(vec, weights) -> Fraction:
    return sum((a * w for a, w in zip(vec, weights) if a), Fraction(0))


class SparseEliminator:
    """Incremental row reduction with ``rhs_width`` right-hand-side columns."""

    def __init__(self, rhs_width: int = 1):
        self.rhs_width = rhs_width
        self.pivots: dict = {}  # col -> [row dict, rhs list]
        self.col_users: dict = {}  # col -> set of pivot cols whose row contains col
        self.conditions: list = []
        self.condition_labels: list = []
        self.columns: set = set()
        self._cond_basis = _ConditionBasis(rhs_width)

    def add(self, row: Mapping[Hashable, object], rhs: Sequence | None = None, label=None) -> None:
        row = {c: Fraction(v) for c, v in row.items() if v}
        self.columns.update(row)
        rhs = [Fraction(v) for v in (rhs or [0] * self.rhs_width)]
        if len(rhs) != self.rhs_width:
            raise ValueError("rhs has wrong width")
        # eliminate existing pivots
        hits = [c for c in row if c in self.pivots]
        while hits:
            for c in hits:
                a = row.pop(c, None)
                if not a:
                    continue
                prow, prhs = self.pivots[c]
                for k, v in prow.items():
                    nv = row.get(k, 0) - a * v
                    if nv:
                        row[k] = nv
                    else:
                        row.pop(k, None)
                for k in range(self.rhs_width):
                    if prhs[k]:
                        rhs[k] -= a * prhs[k]
            hits = [c for c in row if c in self.pivots]
        if not row:
            if any(rhs) and self._cond_basis.add(rhs):
                self.conditions.append(tuple(rhs))
                self.condition_labels.append(label)
            return
        pivot = min(row, key=lambda c: (len(self.col_users.get(c, ())), _sort_key(c)))
        a = row.pop(pivot)
        inv = 1 / a
        row = {k: v * inv for k, v in row.items()}
        rhs = [v * inv for v in rhs]
        # back-substitute into rows that mention the new pivot
        for pc in list(self.col_users.get(pivot, ())):
            prow, prhs = self.pivots[pc]
            b = prow.pop(pivot, None)
            if not b:
                continue
            for k, v in row.items():
                nv = prow.get(k, 0) - b * v
                if nv:
                    if k not in prow:
                        self.col_users.setdefault(k, set()).add(pc)
                    prow[k] = nv
                else:
                    if k in prow:
                        del prow[k]
                        self.col_users.get(k, set()).discard(pc)
            for k in range(self.rhs_width):
                if rhs[k]:
                    prhs[k] -= b * rhs[k]
        self.col_users.pop(pivot, None)
        self.pivots[pivot] = [row, rhs]
        for k in row:
            self.col_users.setdefault(k, set()).add(pivot)

    def result(self) -> EliminationResult:
        pivots = {c: (dict(r), tuple(h)) for c, (r, h) in self.pivots.items()}
        return EliminationResult(pivots, list(self.conditions), list(self.condition_labels), set(self.columns))


def _sort_key(c):
    return repr(c)


class _ConditionBasis:
    """Keeps consistency conditions linearly independent (dense, tiny width)."""

    def __init__(self, width):
        self.width = width
        self.rows: list = []  # (pivot index, normalized vector)

    def add(self, vec) -> bool:
        v = list(vec)
        for p, r in self.rows:
            if v[p]:
                a = v[p]
                v = [x - a * y for x, y in zip(v, r)]
        nz = [i for i, x in enumerate(v) if x]
        if not nz:
            return False
        p = nz[0]
        a = v[p]
        v = [x / a for x in v]
        new_rows = []
        for q, r in self.rows:
            if r[p]:
                b = r[p]
                r = [x - b * y for x, y in zip(r, v)]
            new_rows.append((q, r))
        new_rows.append((p, v))
        self.rows = new_rows
        return True


def solve_exact(rows: Iterable[tuple[Mapping, object]]) -> dict:
    """Solve a single-RHS system given as (row, rhs) pairs; raises if inconsistent."""
    elim = SparseEliminator(1)
    for row, rhs in rows:
        elim.add(row, [rhs])
    res = elim.result()
    return res.solve([1])


def rank(rows: Iterable[Mapping]) -> int:
    elim = SparseEliminator(1)
    for row in rows:
        elim.add(row)
    return elim.result().rank


def invert_matrix(m: Sequence[Sequence]) -> list[list[Fraction]]:
    """Exact inverse of a square rational matrix."""
    n = len(m)
    aug = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col]), None)
        if piv is None:
            raise ZeroDivisionError("matrix is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        a = aug[col][col]
        aug[col] = [v / a for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                b = aug[r][col]
                aug[r] = [x - b * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]

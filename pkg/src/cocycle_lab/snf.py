"""Exact Smith normal form for sparse integer matrices.

Pivot order: first every available unit entry, taken row by row in order
of increasing row length and, within a row, in the column with the fewest
nonzeros (lowest index on ties). Remaining entries are reduced by repeated
Euclidean elimination around the entry of least absolute value, ties
broken by (row length, row, column). A final pass turns the diagonal into
a divisibility chain with 2x2 gcd/lcm moves and makes it non-negative.
"""

import logging
from dataclasses import dataclass, field

import numpy as np


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """x, y, g with x*a + y*b == g == gcd(a, b) >= 0."""
    x, next_x = 1, 0
    y, next_y = 0, 1
    g, next_g = a, b
    while next_g:
        q = g // next_g
        x, next_x = next_x, x - q * next_x
        y, next_y = next_y, y - q * next_y
        g, next_g = next_g, g - q * next_g
    if g < 0:
        x, y, g = -x, -y, -g
    return x, y, g


def add_scaled(target: dict[int, int], source: dict[int, int], c: int) -> None:
    for k, v in source.items():
        new = target.get(k, 0) + c * v
        if new:
            target[k] = new
        else:
            target.pop(k, None)


def _combine(first: dict, second: dict, a: int, b: int, c: int, d: int) -> tuple[dict, dict]:
    """(a * first + b * second, c * first + d * second)."""
    top, bottom = {}, {}
    add_scaled(top, first, a)
    add_scaled(top, second, b)
    add_scaled(bottom, first, c)
    add_scaled(bottom, second, d)
    return top, bottom


@dataclass
class IntegerMatrix:
    """Rows of sparse {column: value} dicts over exact Python integers."""

    nrows: int
    ncols: int
    rows: list[dict[int, int]] = field(default_factory=list)

    def __post_init__(self):
        if not self.rows:
            self.rows = [{} for _ in range(self.nrows)]
        assert len(self.rows) == self.nrows, "invalid row count"

    @classmethod
    def from_dense(cls, dense) -> "IntegerMatrix":
        dense = [[int(x) for x in row] for row in dense]
        ncols = len(dense[0]) if dense else 0
        rows = [{j: x for j, x in enumerate(row) if x} for row in dense]
        return cls(len(dense), ncols, rows or [])

    @classmethod
    def from_triplets(cls, nrows: int, ncols: int, triplets) -> "IntegerMatrix":
        matrix = cls(nrows, ncols)
        for i, j, v in triplets:
            matrix.add(i, j, int(v))
        return matrix

    @classmethod
    def from_columns(cls, nrows: int, columns: list[dict[int, int]]) -> "IntegerMatrix":
        matrix = cls(nrows, len(columns))
        for j, column in enumerate(columns):
            for i, v in column.items():
                matrix.add(i, j, v)
        return matrix

    def add(self, i: int, j: int, v: int) -> None:
        row = self.rows[i]
        new = row.get(j, 0) + v
        if new:
            row[j] = new
        else:
            row.pop(j, None)

    def to_dense(self) -> list[list[int]]:
        return [[row.get(j, 0) for j in range(self.ncols)] for row in self.rows]

    def nnz(self) -> int:
        return sum(len(row) for row in self.rows)

    def matvec(self, vector) -> list[int]:
        return [sum(v * vector[j] for j, v in row.items()) for row in self.rows]

    def column(self, j: int) -> dict[int, int]:
        return {i: row[j] for i, row in enumerate(self.rows) if j in row}

    def columns(self) -> list[dict[int, int]]:
        columns = [{} for _ in range(self.ncols)]
        for i, row in enumerate(self.rows):
            for j, v in row.items():
                columns[j][i] = v
        return columns


@dataclass
class SmithForm:
    """U * M * V = D, D zero except d_k at (rows[k], cols[k]).

    Transforms are stored sparsely: U and Vinv by rows, Uinv and V by columns.
    """

    nrows: int
    ncols: int
    pivots: list[tuple[int, int, int]]
    u_rows: list[dict[int, int]] | None = None
    uinv_cols: list[dict[int, int]] | None = None
    v_cols: list[dict[int, int]] | None = None
    vinv_rows: list[dict[int, int]] | None = None

    @property
    def rank(self) -> int:
        return len(self.pivots)

    @property
    def diagonal(self) -> list[int]:
        return [d for _, _, d in self.pivots]

    @property
    def factors(self) -> list[int]:
        """Invariant factors of Z^nrows / image, 0 for each free summand."""
        return [d for d in self.diagonal if d != 1] + [0] * (self.nrows - self.rank)

    def pivot_rows(self) -> set[int]:
        return {i for i, _, _ in self.pivots}

    def free_rows(self) -> list[int]:
        used = self.pivot_rows()
        return [i for i in range(self.nrows) if i not in used]

    def free_cols(self) -> list[int]:
        used = {j for _, j, _ in self.pivots}
        return [j for j in range(self.ncols) if j not in used]

    def apply_u(self, vector) -> list[int]:
        return [sum(v * vector[k] for k, v in row.items()) for row in self.u_rows]

    def apply_vinv(self, vector, rows=None) -> list:
        rows = range(self.ncols) if rows is None else rows
        return [sum(v * vector[k] for k, v in self.vinv_rows[j].items()) for j in rows]

    def solve(self, vector) -> list[int] | None:
        z = self.apply_u(vector)
        w = [0] * self.ncols
        used = set()
        for i, j, d in self.pivots:
            if z[i] % d:
                return None
            w[j] = z[i] // d
            used.add(i)
        if any(z[i] for i in range(self.nrows) if i not in used):
            return None
        x = [0] * self.ncols
        for j, wj in enumerate(w):
            if wj:
                for k, v in self.v_cols[j].items():
                    x[k] += v * wj
        return x

    def kernel_basis(self) -> list[dict[int, int]]:
        """Columns of V outside the pivots: a basis of the integer kernel."""
        return [dict(self.v_cols[j]) for j in self.free_cols()]

    def dense(self):
        """(U, D, V) as dense object arrays with the pivots moved onto the diagonal."""
        row_order = [i for i, _, _ in self.pivots] + self.free_rows()
        col_order = [j for _, j, _ in self.pivots] + self.free_cols()
        u = np.zeros((self.nrows, self.nrows), dtype=object)
        for new, i in enumerate(row_order):
            for k, v in self.u_rows[i].items():
                u[new, k] = v
        v_dense = np.zeros((self.ncols, self.ncols), dtype=object)
        for new, j in enumerate(col_order):
            for k, v in self.v_cols[j].items():
                v_dense[k, new] = v
        d = np.zeros((self.nrows, self.ncols), dtype=object)
        for k, value in enumerate(self.diagonal):
            d[k, k] = value
        return u, d, v_dense


class _Elimination:
    def __init__(self, matrix: IntegerMatrix, track_rows: bool, track_cols: bool):
        self.nrows, self.ncols = matrix.nrows, matrix.ncols
        self.rows = [dict(row) for row in matrix.rows]
        self.cols: list[set[int]] = [set() for _ in range(self.ncols)]
        for i, row in enumerate(self.rows):
            for j in row:
                self.cols[j].add(i)
        self.pivots: list[tuple[int, int, int]] = []
        self.track_rows, self.track_cols = track_rows, track_cols
        if track_rows:
            self.u_rows = [{i: 1} for i in range(self.nrows)]
            self.uinv_cols = [{i: 1} for i in range(self.nrows)]
        if track_cols:
            self.v_cols = [{j: 1} for j in range(self.ncols)]
            self.vinv_rows = [{j: 1} for j in range(self.ncols)]

    def row_add(self, k: int, i: int, c: int) -> None:
        row_k = self.rows[k]
        for j, v in self.rows[i].items():
            new = row_k.get(j, 0) + c * v
            if new:
                row_k[j] = new
                self.cols[j].add(k)
            else:
                row_k.pop(j, None)
                self.cols[j].discard(k)
        if self.track_rows:
            add_scaled(self.u_rows[k], self.u_rows[i], c)
            add_scaled(self.uinv_cols[i], self.uinv_cols[k], -c)

    def col_add(self, l: int, j: int, c: int) -> None:
        for i in list(self.cols[j]):
            row = self.rows[i]
            new = row.get(l, 0) + c * row[j]
            if new:
                row[l] = new
                self.cols[l].add(i)
            else:
                row.pop(l, None)
                self.cols[l].discard(i)
        self._track_col_add(l, j, c)

    def _track_col_add(self, l: int, j: int, c: int) -> None:
        if self.track_cols:
            add_scaled(self.v_cols[l], self.v_cols[j], c)
            add_scaled(self.vinv_rows[j], self.vinv_rows[l], -c)

    def row_negate(self, i: int) -> None:
        if self.track_rows:
            self.u_rows[i] = {k: -v for k, v in self.u_rows[i].items()}
            self.uinv_cols[i] = {k: -v for k, v in self.uinv_cols[i].items()}

    def row_combine(self, i1: int, i2: int, x: int, y: int, u: int, w: int) -> None:
        """[row_i1, row_i2] <- [[x, y], [u, w]] [row_i1, row_i2] with xw - yu = 1, on transforms only."""
        if not self.track_rows:
            return
        self.u_rows[i1], self.u_rows[i2] = _combine(self.u_rows[i1], self.u_rows[i2], x, y, u, w)
        self.uinv_cols[i1], self.uinv_cols[i2] = _combine(
            self.uinv_cols[i1], self.uinv_cols[i2], w, -u, -y, x
        )

    def _retire(self, i: int, j: int) -> None:
        value = self.rows[i][j]
        self.rows[i] = {}
        self.cols[j] = set()
        self.pivots.append((i, j, value))

    def _clear(self, i: int, j: int) -> bool:
        """One Euclidean round around (i, j); True when row i and column j are clean."""
        a = self.rows[i][j]
        for k in sorted(self.cols[j] - {i}):
            if q := self.rows[k][j] // a:
                self.row_add(k, i, -q)
        for l in sorted(set(self.rows[i]) - {j}):
            if q := self.rows[i][l] // a:
                self.col_add(l, j, -q)
        return self.cols[j] == {i} and len(self.rows[i]) == 1

    def unit_phase(self) -> None:
        for i in sorted(range(self.nrows), key=lambda i: (len(self.rows[i]), i)):
            units = [j for j, v in self.rows[i].items() if v in (1, -1)]
            if not units:
                continue
            j = min(units, key=lambda j: (len(self.cols[j]), j))
            a = self.rows[i][j]
            for k in sorted(self.cols[j] - {i}):
                self.row_add(k, i, -self.rows[k][j] * a)
            # column j now meets only row i, so clearing row i touches nothing else
            for l in sorted(set(self.rows[i]) - {j}):
                c = -self.rows[i][l] * a
                self.cols[l].discard(i)
                self._track_col_add(l, j, c)
            self.rows[i] = {j: a}
            self._retire(i, j)

    def general_phase(self) -> None:
        while True:
            best = None
            for i, row in enumerate(self.rows):
                for j, v in row.items():
                    key = (abs(v), len(row), i, j)
                    if best is None or key < best:
                        best = key
            if best is None:
                return
            _, _, i, j = best
            if self._clear(i, j):
                self._retire(i, j)

    def fix_divisibility(self) -> None:
        for k, (i, j, d) in enumerate(self.pivots):
            if d < 0:
                self.row_negate(i)
                self.pivots[k] = (i, j, -d)
        count = len(self.pivots)
        for a in range(count):
            for b in range(a + 1, count):
                i1, j1, d1 = self.pivots[a]
                i2, j2, d2 = self.pivots[b]
                if d2 % d1 == 0:
                    continue
                x, y, g = xgcd(d1, d2)
                self._track_col_add(j1, j2, 1)
                self.row_combine(i1, i2, x, y, -d2 // g, d1 // g)
                self._track_col_add(j2, j1, -(y * d2 // g))
                self.pivots[a] = (i1, j1, g)
                self.pivots[b] = (i2, j2, d1 * d2 // g)

    def sign_only(self) -> None:
        for k, (i, j, d) in enumerate(self.pivots):
            if d < 0:
                self.row_negate(i)
                self.pivots[k] = (i, j, -d)


def smith_normal_form(
    matrix: IntegerMatrix,
    *,
    track_rows: bool = False,
    track_cols: bool = False,
    divisibility: bool = True,
) -> SmithForm:
    """Diagonalize over Z; with divisibility=False the diagonal is not ordered into a chain."""
    elimination = _Elimination(matrix, track_rows, track_cols)
    elimination.unit_phase()
    elimination.general_phase()
    if divisibility:
        elimination.fix_divisibility()
    else:
        elimination.sign_only()
    if matrix.nrows * matrix.ncols > 10**5:
        logging.info(
            f"Smith normal form of {matrix.nrows}x{matrix.ncols} matrix: rank {len(elimination.pivots)}"
        )
    return SmithForm(
        nrows=matrix.nrows,
        ncols=matrix.ncols,
        pivots=elimination.pivots,
        u_rows=elimination.u_rows if track_rows else None,
        uinv_cols=elimination.uinv_cols if track_rows else None,
        v_cols=elimination.v_cols if track_cols else None,
        vinv_rows=elimination.vinv_rows if track_cols else None,
    )

"""Sparse exact linear algebra: dict-backed matrices and row reduction.

Rows and vectors are dicts mapping column index to a nonzero scalar.
Row reduction always chooses the leftmost available pivot, so every rank,
kernel and image computation is deterministic for a fixed input order.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dfield
from .field import FieldCtx, QQ


def vec_add(field: FieldCtx, u: dict, v: dict) -> dict:
    out = dict(u)
    for k, val in v.items():
        s = field.add(out.get(k, field.zero()), val)
        if field.is_zero(s):
            out.pop(k, None)
        else:
            out[k] = s
    return out


def vec_scale(field: FieldCtx, c, v: dict) -> dict:
    if field.is_zero(c):
        return {}
    return {k: field.mul(c, val) for k, val in v.items()}


def vec_sub(field: FieldCtx, u: dict, v: dict) -> dict:
    return vec_add(field, u, vec_scale(field, field.neg(field.one()), v))


def vec_addmul(field: FieldCtx, u: dict, c, v: dict) -> dict:
    """u + c*v, in place on a copy."""
    if field.is_zero(c):
        return dict(u)
    out = dict(u)
    for k, val in v.items():
        s = field.add(out.get(k, field.zero()), field.mul(c, val))
        if field.is_zero(s):
            out.pop(k, None)
        else:
            out[k] = s
    return out


@dataclass
class SparseMatrix:
    """Sparse matrix with entries[(row, col)] = nonzero scalar."""

    nrows: int
    ncols: int
    field: FieldCtx = QQ
    entries: dict = dfield(default_factory=dict)

    def set(self, r: int, c: int, v) -> None:
        if self.field.is_zero(v):
            self.entries.pop((r, c), None)
        else:
            self.entries[(r, c)] = v

    def get(self, r: int, c: int):
        return self.entries.get((r, c), self.field.zero())

    @classmethod
    def from_rows(cls, rows, ncols: int, field: FieldCtx = QQ) -> "SparseMatrix":
        m = cls(len(rows), ncols, field)
        for i, row in enumerate(rows):
            for j, v in row.items():
                m.set(i, j, v)
        return m

    @classmethod
    def from_dense(cls, rows, field: FieldCtx = QQ) -> "SparseMatrix":
        ncols = len(rows[0]) if rows else 0
        m = cls(len(rows), ncols, field)
        for i, row in enumerate(rows):
            for j, v in enumerate(row):
                m.set(i, j, v)
        return m

    @classmethod
    def identity(cls, n: int, field: FieldCtx = QQ) -> "SparseMatrix":
        m = cls(n, n, field)
        one = field.one()
        for i in range(n):
            m.set(i, i, one)
        return m

    def row(self, r: int) -> dict:
        return {c: v for (i, c), v in self.entries.items() if i == r}

    def rows(self):
        out = [dict() for _ in range(self.nrows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def col(self, c: int) -> dict:
        return {r: v for (r, j), v in self.entries.items() if j == c}

    def transpose(self) -> "SparseMatrix":
        t = SparseMatrix(self.ncols, self.nrows, self.field)
        for (r, c), v in self.entries.items():
            t.entries[(c, r)] = v
        return t

    def take_columns(self, cols) -> "SparseMatrix":
        """Submatrix of the listed columns, reindexed in list order."""
        pos = {c: i for i, c in enumerate(cols)}
        m = SparseMatrix(self.nrows, len(cols), self.field)
        for (r, c), v in self.entries.items():
            i = pos.get(c)
            if i is not None:
                m.entries[(r, i)] = v
        return m

    def matvec(self, v: dict) -> dict:
        """Apply to a column vector {col: scalar}."""
        f = self.field
        out = {}
        for (r, c), a in self.entries.items():
            x = v.get(c)
            if x is None:
                continue
            s = f.add(out.get(r, f.zero()), f.mul(a, x))
            if f.is_zero(s):
                out.pop(r, None)
            else:
                out[r] = s
        return out

    def mul(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        f = self.field
        out = SparseMatrix(self.nrows, other.ncols, f)
        by_row = {}
        for (r, c), v in other.entries.items():
            by_row.setdefault(r, []).append((c, v))
        acc = {}
        for (r, k), a in self.entries.items():
            for c, b in by_row.get(k, ()):
                key = (r, c)
                s = f.add(acc.get(key, f.zero()), f.mul(a, b))
                if f.is_zero(s):
                    acc.pop(key, None)
                else:
                    acc[key] = s
        out.entries = acc
        return out

    def add(self, other: "SparseMatrix") -> "SparseMatrix":
        f = self.field
        out = SparseMatrix(self.nrows, self.ncols, f)
        acc = dict(self.entries)
        for key, v in other.entries.items():
            s = f.add(acc.get(key, f.zero()), v)
            if f.is_zero(s):
                acc.pop(key, None)
            else:
                acc[key] = s
        out.entries = acc
        return out

    def scale(self, c) -> "SparseMatrix":
        f = self.field
        out = SparseMatrix(self.nrows, self.ncols, f)
        if not f.is_zero(c):
            out.entries = {k: f.mul(c, v) for k, v in self.entries.items()}
        return out

    def neg(self) -> "SparseMatrix":
        return self.scale(self.field.neg(self.field.one()))

    def is_zero(self) -> bool:
        return not self.entries

    def to_dense(self):
        z = self.field.zero()
        return [[self.get(r, c) for c in range(self.ncols)] for r in range(self.nrows)]

    def __eq__(self, other):
        return (isinstance(other, SparseMatrix) and self.nrows == other.nrows
                and self.ncols == other.ncols and self.entries == other.entries)


def rref(rows, ncols: int, field: FieldCtx):
    """Reduced row echelon form of a list of sparse rows.

    Returns (pivot_cols, reduced_rows); reduced_rows[i] has pivot 1 at
    pivot_cols[i].  Pivots are chosen leftmost-first, scanning rows in
    input order.
    """
    work = [dict(r) for r in rows if r]
    pivots = []
    reduced = []
    for col in range(ncols):
        pividx = None
        for i, r in enumerate(work):
            if col in r:
                pividx = i
                break
        if pividx is None:
            continue
        prow = work.pop(pividx)
        c = field.inv(prow[col])
        prow = {k: field.mul(c, v) for k, v in prow.items()}
        for j, r in enumerate(reduced):
            if col in r:
                reduced[j] = vec_addmul(field, r, field.neg(r[col]), prow)
        nxt = []
        for r in work:
            if col in r:
                r = vec_addmul(field, r, field.neg(r[col]), prow)
            if r:
                nxt.append(r)
        work = nxt
        pivots.append(col)
        reduced.append(prow)
        if not work:
            break
    return pivots, reduced


def rank_kernel_image(mat: SparseMatrix):
    """Rank, kernel basis and image basis of a sparse matrix.

    kernel: column vectors {col: scalar} spanning ker(mat), one per free
    column, ordered by free column index, each normalized with a 1 in its
    free slot.  image: the original pivot columns of mat, as {row: scalar}
    vectors.  Both deterministic.
    """
    field = mat.field
    pivots, reduced = rref(mat.rows(), mat.ncols, field)
    rank = len(pivots)
    pivset = set(pivots)
    kernel = []
    one = field.one()
    for free in range(mat.ncols):
        if free in pivset:
            continue
        v = {free: one}
        for prow, pcol in zip(reduced, pivots):
            a = prow.get(free)
            if a is not None:
                v[pcol] = field.neg(a)
        kernel.append(v)
    image = [mat.col(c) for c in pivots]
    return rank, kernel, image, pivots


def solve(mat: SparseMatrix, rhs: dict):
    """One solution x of mat*x = rhs with free variables set to zero,
    or None if inconsistent.  rhs is {row: scalar}."""
    field = mat.field
    aug = mat.rows()
    bcol = mat.ncols
    for i in range(mat.nrows):
        v = rhs.get(i)
        if v is not None and not field.is_zero(v):
            aug[i][bcol] = v
    pivots, reduced = rref(aug, mat.ncols + 1, field)
    if bcol in pivots:
        return None
    x = {}
    for prow, pcol in zip(reduced, pivots):
        v = prow.get(bcol)
        if v is not None:
            x[pcol] = v
    return x

"""Dense linear algebra over GF(q).

Provides RREF with deterministic pivoting (leftmost column, lowest row),
null-space bases in the [-A^T | I]P form, row-space membership tests, dense
and sparsity-aware solving, and an incremental null-space tracker that keeps
an N x N matrix and its exact inverse in sync through rank-one updates.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from . import gf
from .gf import FieldSpec, field_spec


class DimensionMismatch(ValueError):
    pass


class NotInnovative(ValueError):
    pass


@dataclass
class OpCounter:
    """Deterministic field-operation counter (multiplications / additions)."""

    mul: int = 0
    add: int = 0

    @property
    def total(self) -> int:
        return self.mul + self.add

    def merge(self, other: "OpCounter") -> None:
        self.mul += other.mul
        self.add += other.add


def _count(ops: OpCounter | None, mul: int = 0, add: int = 0) -> None:
    if ops is not None:
        ops.mul += mul
        ops.add += add


class MatrixGF:
    """Dense matrix over GF(q); entries stored as a row-major int64 array."""

    __slots__ = ("a", "field")

    def __init__(self, data, field: FieldSpec, _validate: bool = True):
        a = np.asarray(data, dtype=np.int64)
        if a.ndim != 2:
            raise DimensionMismatch(f"expected 2-D data, got shape {a.shape}")
        if _validate and a.size and (a.min() < 0 or a.max() >= field.q):
            raise ValueError(f"entries outside [0, {field.q})")
        self.a = a
        self.field = field

    @classmethod
    def zeros(cls, n_rows: int, n_cols: int, field: FieldSpec) -> "MatrixGF":
        return cls(np.zeros((n_rows, n_cols), dtype=np.int64), field, _validate=False)

    @classmethod
    def identity(cls, n: int, field: FieldSpec) -> "MatrixGF":
        return cls(np.eye(n, dtype=np.int64), field, _validate=False)

    @classmethod
    def from_rows(cls, rows, field: FieldSpec, n_cols: int | None = None) -> "MatrixGF":
        rows = list(rows)
        if not rows:
            if n_cols is None:
                raise ValueError("empty matrix needs an explicit column count")
            return cls.zeros(0, n_cols, field)
        return cls(np.array(rows, dtype=np.int64), field)

    @property
    def n_rows(self) -> int:
        return self.a.shape[0]

    @property
    def n_cols(self) -> int:
        return self.a.shape[1]

    def copy(self) -> "MatrixGF":
        return MatrixGF(self.a.copy(), self.field, _validate=False)

    def row(self, i: int) -> np.ndarray:
        return self.a[i]

    def stack(self, other: "MatrixGF") -> "MatrixGF":
        if other.n_cols != self.n_cols:
            raise DimensionMismatch("column counts differ")
        return MatrixGF(np.vstack([self.a, other.a]), self.field, _validate=False)

    def stack_row(self, x) -> "MatrixGF":
        x = np.asarray(x, dtype=np.int64).reshape(1, -1)
        if x.shape[1] != self.n_cols:
            raise DimensionMismatch("row length differs from column count")
        return MatrixGF(np.vstack([self.a, x]), self.field, _validate=False)

    def transpose(self) -> "MatrixGF":
        return MatrixGF(self.a.T.copy(), self.field, _validate=False)

    def matmul(self, other: "MatrixGF", ops: OpCounter | None = None) -> "MatrixGF":
        if self.n_cols != other.n_rows:
            raise DimensionMismatch("inner dimensions differ")
        out = matmul_arrays(self.a, other.a, self.field)
        _count(ops, mul=self.n_rows * self.n_cols * other.n_cols,
               add=self.n_rows * max(self.n_cols - 1, 0) * other.n_cols)
        return MatrixGF(out, self.field, _validate=False)

    def matvec(self, x, ops: OpCounter | None = None) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        if x.shape != (self.n_cols,):
            raise DimensionMismatch(f"vector length {x.shape} vs {self.n_cols} columns")
        if self.n_rows == 0:
            return np.zeros(0, dtype=np.int64)
        out = gf.vsum(gf.vmul(self.a, x[None, :], self.field), self.field, axis=1)
        _count(ops, mul=self.n_rows * self.n_cols,
               add=self.n_rows * max(self.n_cols - 1, 0))
        return np.atleast_1d(out)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MatrixGF)
            and self.field == other.field
            and self.a.shape == other.a.shape
            and np.array_equal(self.a, other.a)
        )

    def __repr__(self):
        return f"MatrixGF({self.n_rows}x{self.n_cols} over {self.field})"


def matmul_arrays(a: np.ndarray, b: np.ndarray, f: FieldSpec) -> np.ndarray:
    """Field matrix product on raw arrays."""
    if f.m == 1:
        return (a @ b) % f.p
    # table-lookup products, then XOR-reduce the shared axis
    prods = gf.vmul(a[:, :, None], b[None, :, :], f)
    if prods.shape[1] == 0:
        return np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    return np.bitwise_xor.reduce(prods, axis=1)


@dataclass(frozen=True)
class RrefResult:
    """RREF output: the reduced matrix, its rank, pivot columns in increasing
    order, and the column permutation putting it into [I | A] form."""

    rref: MatrixGF
    rank: int
    pivot_cols: tuple[int, ...]
    col_perm: tuple[int, ...]


def rref(m: MatrixGF, ops: OpCounter | None = None) -> RrefResult:
    f = m.field
    a = m.a.copy()
    n_rows, n_cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        col = a[r:, c]
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            a[[r, p]] = a[[p, r]]
        if a[r, c] != 1:
            a[r] = gf.vmul(a[r], gf.finv(int(a[r, c]), f), f)
            _count(ops, mul=n_cols)
        colvals = a[:, c].copy()
        colvals[r] = 0
        rows = np.nonzero(colvals)[0]
        if rows.size:
            a[rows] = gf.vsub(
                a[rows], gf.vmul(colvals[rows][:, None], a[r][None, :], f), f
            )
            _count(ops, mul=int(rows.size) * n_cols, add=int(rows.size) * n_cols)
        pivots.append(c)
        r += 1
    free = [c for c in range(n_cols) if c not in set(pivots)]
    return RrefResult(
        rref=MatrixGF(a, f, _validate=False),
        rank=r,
        pivot_cols=tuple(pivots),
        col_perm=tuple(pivots + free),
    )


def rank(m: MatrixGF) -> int:
    return rref(m).rank


def null_space_basis(c: MatrixGF, ops: OpCounter | None = None) -> MatrixGF:
    """Basis of the right null space as an (N - r) x N matrix B with
    c . B^T = 0, in the [-A^T | I] P shape derived from the RREF."""
    f = c.field
    res = rref(c, ops=ops)
    n = c.n_cols
    r = res.rank
    piv = list(res.pivot_cols)
    free = [j for j in range(n) if j not in set(piv)]
    b = np.zeros((n - r, n), dtype=np.int64)
    rr = res.rref.a
    for j, fc in enumerate(free):
        if r:
            b[j, piv] = gf.vneg(rr[:r, fc], f)
        b[j, fc] = 1
    return MatrixGF(b, f, _validate=False)


def in_row_space(x, c: MatrixGF, via: str = "rank") -> bool:
    """Membership of x in rowspace(c), by rank comparison or by the
    null-space test B x = 0 (the two are cross-checked in tests)."""
    x = np.asarray(x, dtype=np.int64)
    if x.shape != (c.n_cols,):
        raise DimensionMismatch(f"vector length {x.shape} vs {c.n_cols} columns")
    if via == "rank":
        base = rref(c).rank
        return rref(c.stack_row(x)).rank == base
    if via == "nullspace":
        b = null_space_basis(c)
        return not np.any(b.matvec(x))
    raise ValueError(f"unknown membership path {via!r}")


def solve_dense(a: MatrixGF, rhs, ops: OpCounter | None = None) -> np.ndarray | None:
    """Gauss-Jordan solve; returns a solution with free variables zero, or
    None when the system is inconsistent.  rhs may be a vector or a matrix
    of stacked right-hand-side columns."""
    f = a.field
    rhs = np.asarray(rhs, dtype=np.int64)
    vector_rhs = rhs.ndim == 1
    if vector_rhs:
        rhs = rhs[:, None]
    if rhs.shape[0] != a.n_rows:
        raise DimensionMismatch("rhs row count differs from matrix")
    n_rows, n_cols = a.a.shape
    aug = np.hstack([a.a.copy(), rhs.copy()])
    width = aug.shape[1]
    pivots: list[int] = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        nz = np.nonzero(aug[r:, c])[0]
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            aug[[r, p]] = aug[[p, r]]
        if aug[r, c] != 1:
            aug[r] = gf.vmul(aug[r], gf.finv(int(aug[r, c]), f), f)
            _count(ops, mul=width)
        colvals = aug[:, c].copy()
        colvals[r] = 0
        rows = np.nonzero(colvals)[0]
        if rows.size:
            aug[rows] = gf.vsub(
                aug[rows], gf.vmul(colvals[rows][:, None], aug[r][None, :], f), f
            )
            _count(ops, mul=int(rows.size) * width, add=int(rows.size) * width)
        pivots.append(c)
        r += 1
    if np.any(aug[r:, n_cols:]):
        return None
    x = np.zeros((n_cols, rhs.shape[1]), dtype=np.int64)
    for i, c in enumerate(pivots):
        x[c] = aug[i, n_cols:]
    return x[:, 0] if vector_rhs else x


def solve_sparse(
    a: MatrixGF,
    rhs,
    weight_bound: int | None = None,
    ops: OpCounter | None = None,
) -> np.ndarray | None:
    """Same answers as solve_dense, but elimination touches only stored
    nonzero positions, so the op counter scales with row weights.

    Within each pivot column the sparsest qualifying row is chosen (ties to
    the lowest row index) to limit fill-in; the pivot-column sequence, and
    hence the returned solution, is identical to solve_dense's.
    """
    f = a.field
    rhs = np.asarray(rhs, dtype=np.int64)
    vector_rhs = rhs.ndim == 1
    if vector_rhs:
        rhs = rhs[:, None]
    if rhs.shape[0] != a.n_rows:
        raise DimensionMismatch("rhs row count differs from matrix")
    n_cols = a.n_cols
    k = rhs.shape[1]

    rows: list[dict[int, int]] = []
    for i in range(a.n_rows):
        nz = np.nonzero(a.a[i])[0]
        if weight_bound is not None and nz.size > weight_bound:
            raise ValueError(
                f"row {i} has weight {nz.size} > declared bound {weight_bound}"
            )
        rows.append({int(j): int(a.a[i, j]) for j in nz})
    rhs_rows = [rhs[i].copy() for i in range(a.n_rows)]

    col_index: dict[int, set[int]] = {c: set() for c in range(n_cols)}
    for i, rd in enumerate(rows):
        for c in rd:
            col_index[c].add(i)

    def scale_row(i: int, factor: int) -> None:
        rd = rows[i]
        for c in list(rd):
            rd[c] = gf.fmul(rd[c], factor, f)
        rhs_rows[i] = gf.vmul(rhs_rows[i], factor, f)
        _count(ops, mul=len(rd) + k)

    def subtract_scaled(i: int, src: int, factor: int) -> None:
        """row i -= factor * row src, touching only src's stored nonzeros."""
        rd, sd = rows[i], rows[src]
        for c, v in sd.items():
            term = gf.fmul(factor, v, f)
            cur = rd.get(c, 0)
            new = gf.fsub(cur, term, f)
            if new:
                if cur == 0:
                    col_index[c].add(i)
                rd[c] = new
            elif cur:
                del rd[c]
                col_index[c].discard(i)
        rhs_rows[i] = gf.vsub(rhs_rows[i], gf.vmul(rhs_rows[src], factor, f), f)
        _count(ops, mul=len(sd) + k, add=len(sd) + k)

    pivot_of_col: dict[int, int] = {}
    is_pivot_row = [False] * a.n_rows
    for c in range(n_cols):
        cand = [i for i in col_index[c] if not is_pivot_row[i]]
        if not cand:
            continue
        p = min(cand, key=lambda i: (len(rows[i]), i))
        if rows[p][c] != 1:
            scale_row(p, gf.finv(rows[p][c], f))
        for i in cand:
            if i != p:
                subtract_scaled(i, p, rows[i][c])
        pivot_of_col[c] = p
        is_pivot_row[p] = True

    for i in range(a.n_rows):
        if not is_pivot_row[i] and not rows[i] and np.any(rhs_rows[i]):
            return None

    x = np.zeros((n_cols, k), dtype=np.int64)
    for c in sorted(pivot_of_col, reverse=True):
        p = pivot_of_col[c]
        acc = rhs_rows[p].copy()
        for j, v in rows[p].items():
            if j != c:
                acc = gf.vsub(acc, gf.vmul(x[j], v, f), f)
                _count(ops, mul=k, add=k)
        x[c] = acc
    return x[:, 0] if vector_rhs else x


# ---------------------------------------------------------------------------
# Incremental null-space tracking via rank-one inverse updates

class NullTracker:
    """Maintains an N x N matrix c_tilde whose first r rows are the received
    encoding vectors, together with its exact inverse b_tilde_inv.  The last
    N - r columns of the inverse form a null-space basis of the received
    rows, so innovation checks are inner products and updates are rank-one.

    Column swaps in the inverse pair with row swaps in c_tilde, and both only
    ever touch indices >= r, so received rows stay in original coordinates
    and in reception order.
    """

    __slots__ = ("field", "n", "r", "c_tilde", "b_tilde_inv")

    def __init__(self, n: int, field: FieldSpec):
        if n < 1:
            raise ValueError("tracker needs n >= 1")
        self.field = field
        self.n = n
        self.r = 0
        self.c_tilde = np.eye(n, dtype=np.int64)
        self.b_tilde_inv = np.eye(n, dtype=np.int64)

    @classmethod
    def new(cls, n: int, field: FieldSpec) -> "NullTracker":
        return cls(n, field)

    def copy(self) -> "NullTracker":
        t = NullTracker.__new__(NullTracker)
        t.field = self.field
        t.n = self.n
        t.r = self.r
        t.c_tilde = self.c_tilde.copy()
        t.b_tilde_inv = self.b_tilde_inv.copy()
        return t

    def _free_products(self, w: np.ndarray, ops: OpCounter | None) -> np.ndarray:
        """Inner products of w with the last n-r inverse columns, computed
        over w's support only."""
        f = self.field
        nz = np.nonzero(w)[0]
        width = self.n - self.r
        if nz.size == 0 or width == 0:
            return np.zeros(width, dtype=np.int64)
        sub = self.b_tilde_inv[nz, self.r:]
        prods = gf.vsum(gf.vmul(w[nz][:, None], sub, f), f, axis=0)
        _count(ops, mul=int(nz.size) * width, add=int(nz.size) * width)
        return np.atleast_1d(prods)

    def is_innovative(self, w, ops: OpCounter | None = None) -> bool:
        w = np.asarray(w, dtype=np.int64)
        if w.shape != (self.n,):
            raise DimensionMismatch(f"vector length {w.shape} vs n={self.n}")
        if self.r == self.n:
            return False
        return bool(np.any(self._free_products(w, ops)))

    def update(self, w, ops: OpCounter | None = None) -> None:
        f = self.field
        w = np.asarray(w, dtype=np.int64)
        if w.shape != (self.n,):
            raise DimensionMismatch(f"vector length {w.shape} vs n={self.n}")
        prods = self._free_products(w, ops) if self.r < self.n else np.zeros(0, dtype=np.int64)
        nzp = np.nonzero(prods)[0]
        if nzp.size == 0:
            raise NotInnovative("vector lies in the span of received rows")
        r = self.r
        j = r + int(nzp[0])
        if j != r:
            self.b_tilde_inv[:, [r, j]] = self.b_tilde_inv[:, [j, r]]
            self.c_tilde[[r, j]] = self.c_tilde[[j, r]]
        s = int(prods[nzp[0]])
        self.c_tilde[r] = w
        nz = np.nonzero(w)[0]
        t = gf.vsum(gf.vmul(w[nz][:, None], self.b_tilde_inv[nz, :], f), f, axis=0)
        t = np.atleast_1d(t)
        _count(ops, mul=int(nz.size) * self.n, add=int(nz.size) * self.n)
        t[r] = gf.fsub(int(t[r]), 1, f)
        u = self.b_tilde_inv[:, r].copy()
        if s != 1:
            t = gf.vmul(t, gf.finv(s, f), f)
            _count(ops, mul=self.n)
        self.b_tilde_inv = gf.vsub(
            self.b_tilde_inv, gf.vmul(u[:, None], t[None, :], f), f
        )
        _count(ops, mul=self.n * self.n, add=self.n * self.n)
        self.r = r + 1

    def received_rows(self) -> np.ndarray:
        return self.c_tilde[: self.r]

    def null_basis(self) -> np.ndarray:
        """(n - r) x n basis of the null space of the received rows."""
        return self.b_tilde_inv[:, self.r:].T

    def btilde(self) -> np.ndarray:
        """Binary support mask: component j is 1 iff null-basis column j
        (= row j of the inverse's trailing block) is nonzero."""
        return (self.b_tilde_inv[:, self.r:] != 0).any(axis=1).astype(np.int64)


# ---------------------------------------------------------------------------
# Matrix text format: line 1 "rows cols q [poly=<hex>]", then one row per line

def format_matrix(m: MatrixGF) -> str:
    head = f"{m.n_rows} {m.n_cols} {m.field.q}"
    if m.field.is_binary_ext and m.field.reduction_poly != gf.DEFAULT_POLY[m.field.m]:
        head += f" poly=0x{m.field.reduction_poly:x}"
    lines = [head]
    for i in range(m.n_rows):
        lines.append(" ".join(str(int(v)) for v in m.a[i]))
    return "\n".join(lines) + "\n"


def parse_field_token(q_tok: str, extra: list[str]) -> FieldSpec:
    q = int(q_tok)
    poly = None
    for tok in extra:
        if tok.startswith("poly="):
            poly = int(tok[5:], 16)
        else:
            raise ValueError(f"unexpected token {tok!r}")
    return field_spec(q, poly=poly)


def parse_matrix(text: str) -> MatrixGF:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty matrix text")
    head = lines[0].split()
    if len(head) < 3:
        raise ValueError("matrix header needs 'rows cols q'")
    n_rows, n_cols = int(head[0]), int(head[1])
    f = parse_field_token(head[2], head[3:])
    if len(lines) - 1 != n_rows:
        raise ValueError(f"expected {n_rows} rows, found {len(lines) - 1}")
    data = []
    for ln in lines[1:]:
        row = [int(v) for v in ln.split()]
        if len(row) != n_cols:
            raise ValueError(f"row has {len(row)} entries, expected {n_cols}")
        data.append(row)
    arr = np.array(data, dtype=np.int64) if data else np.zeros((0, n_cols), dtype=np.int64)
    return MatrixGF(arr, f)

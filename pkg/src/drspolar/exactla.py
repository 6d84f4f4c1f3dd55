"""Exact rational dense linear algebra.

Everything downstream (Clifford generators, brackets, polarity criteria)
reduces to rank / nullspace / orthogonal-complement computations over Q.
Entries are `fractions.Fraction`; ranks use fraction-free (Bareiss-style)
elimination on denominator-cleared integer matrices so intermediate values
stay moderate.  Matrix products take a numpy int64 fast path whenever the
result provably fits, falling back to arbitrary-precision Python integers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

import numpy as np

Rational = Fraction

_INT64_SAFE = 2**62


class LinAlgError(ValueError):
    """Raised on dimension mismatches and containment violations."""


def rat_from_str(s: str) -> Fraction:
    """Parse "p/q" or "p" into a Fraction."""
    return Fraction(s.strip())


def rat_to_str(x: Fraction) -> str:
    """Render a Fraction as "p/q", or "p" when the denominator is 1."""
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return rat_from_str(x)
    if isinstance(x, float):
        raise TypeError("floats are not allowed in exact matrices")
    return Fraction(x)


class ExactMatrix:
    """Immutable dense matrix of rationals."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Sequence[Sequence], cols: int | None = None):
        rows = [tuple(_as_fraction(x) for x in row) for row in entries]
        self.rows = len(rows)
        self.cols = len(rows[0]) if rows else (cols or 0)
        if any(len(r) != self.cols for r in rows):
            raise LinAlgError("ragged rows")
        self.entries = tuple(rows)

    # -- constructors -------------------------------------------------

    @staticmethod
    def zeros(rows: int, cols: int) -> "ExactMatrix":
        return ExactMatrix([[0] * cols for _ in range(rows)], cols=cols)

    @staticmethod
    def identity(n: int) -> "ExactMatrix":
        return ExactMatrix([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @staticmethod
    def from_numpy(arr) -> "ExactMatrix":
        arr = np.asarray(arr)
        cols = arr.shape[1] if arr.ndim == 2 else None
        return ExactMatrix([[int(x) for x in row] for row in arr], cols=cols)

    @staticmethod
    def column(vec: Sequence) -> "ExactMatrix":
        return ExactMatrix([[x] for x in vec])

    @staticmethod
    def from_columns(columns: Sequence[Sequence]) -> "ExactMatrix":
        if not columns:
            return ExactMatrix([])
        n = len(columns[0])
        return ExactMatrix([[col[i] for col in columns] for i in range(n)])

    # -- basic structure ----------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, ij) -> Fraction:
        i, j = ij
        return self.entries[i][j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self.entries[i]

    def col(self, j: int) -> tuple[Fraction, ...]:
        return tuple(r[j] for r in self.entries)

    def columns(self) -> list[tuple[Fraction, ...]]:
        return [self.col(j) for j in range(self.cols)]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ExactMatrix)
            and self.shape == other.shape
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash(self.entries)

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.entries for x in row)

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix([self.col(j) for j in range(self.cols)], cols=self.rows)

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.shape != other.shape:
            raise LinAlgError(f"shape mismatch {self.shape} + {other.shape}")
        return ExactMatrix(
            [
                [a + b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.entries, other.entries)
            ],
            cols=self.cols,
        )

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        return self + (-other)

    def __neg__(self) -> "ExactMatrix":
        return ExactMatrix([[-x for x in row] for row in self.entries], cols=self.cols)

    def scale(self, c) -> "ExactMatrix":
        c = _as_fraction(c)
        return ExactMatrix(
            [[c * x for x in row] for row in self.entries], cols=self.cols
        )

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.rows:
            raise LinAlgError(f"shape mismatch {self.shape} @ {other.shape}")
        if self.cols == 0 or self.rows == 0 or other.cols == 0:
            return ExactMatrix.zeros(self.rows, other.cols)
        na, da = self._int_form()
        nb, db = other._int_form()
        prod = _int_matmul(na, nb)
        d = da * db
        if d == 1:
            return ExactMatrix([[Fraction(int(x)) for x in row] for row in prod])
        return ExactMatrix([[Fraction(int(x), d) for x in row] for row in prod])

    def apply(self, vec: Sequence) -> tuple[Fraction, ...]:
        """Matrix-vector product; skips zero entries (generators are sparse)."""
        v = [_as_fraction(x) for x in vec]
        if len(v) != self.cols:
            raise LinAlgError("vector length mismatch")
        zero = Fraction(0)
        return tuple(
            sum((a * b for a, b in zip(row, v) if a), zero) for row in self.entries
        )

    def trace(self) -> Fraction:
        return sum((self.entries[i][i] for i in range(min(self.shape))), Fraction(0))

    def hstack(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.rows != other.rows:
            raise LinAlgError("row count mismatch in hstack")
        return ExactMatrix(
            [list(ra) + list(rb) for ra, rb in zip(self.entries, other.entries)],
            cols=self.cols + other.cols,
        )

    def vstack(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.cols:
            raise LinAlgError("column count mismatch in vstack")
        return ExactMatrix(list(self.entries) + list(other.entries), cols=self.cols)

    def kron(self, other: "ExactMatrix") -> "ExactMatrix":
        out = []
        for ra in self.entries:
            for rb in other.entries:
                out.append([a * b for a in ra for b in rb])
        return ExactMatrix(out)

    def submatrix(self, row_idx: Iterable[int], col_idx: Iterable[int]) -> "ExactMatrix":
        ci = list(col_idx)
        return ExactMatrix(
            [[self.entries[i][j] for j in ci] for i in row_idx], cols=len(ci)
        )

    # -- conversions ----------------------------------------------------

    def _int_form(self) -> tuple[list[list[int]], int]:
        """Return (integer matrix, common denominator d) with self = M/d."""
        d = 1
        for row in self.entries:
            for x in row:
                d = d * x.denominator // gcd(d, x.denominator)
        ints = [[int(x * d) for x in row] for row in self.entries]
        return ints, d

    def to_float(self):
        return np.array(
            [[float(x) for x in row] for row in self.entries], dtype=np.float64
        )

    def to_json(self) -> list[list[str]]:
        return [[rat_to_str(x) for x in row] for row in self.entries]

    @staticmethod
    def from_json(data: Sequence[Sequence]) -> "ExactMatrix":
        return ExactMatrix(data)

    def __repr__(self):
        return f"ExactMatrix({self.rows}x{self.cols})"


def _int_matmul(a: list[list[int]], b: list[list[int]]) -> np.ndarray:
    """Exact integer matrix product; int64 when safe, object dtype otherwise."""
    inner = len(b)
    max_a = max((abs(x) for row in a for x in row), default=0)
    max_b = max((abs(x) for row in b for x in row), default=0)
    if inner * max_a * max_b < _INT64_SAFE:
        return np.array(a, dtype=np.int64) @ np.array(b, dtype=np.int64)
    return np.array(a, dtype=object) @ np.array(b, dtype=object)


# -- elimination ------------------------------------------------------


def rank(M: ExactMatrix) -> int:
    """Exact rank over Q via fraction-free (Bareiss-style) elimination."""
    ints, _ = M._int_form()
    return _int_rank([row[:] for row in ints])


def _int_rank(m: list[list[int]]) -> int:
    nr = len(m)
    nc = len(m[0]) if nr else 0
    r = 0
    prev = 1
    for c in range(nc):
        piv = None
        for i in range(r, nr):
            if m[i][c]:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        row_r = m[r]
        for i in range(r + 1, nr):
            row_i = m[i]
            fi = row_i[c]
            # the full Bareiss update keeps every later division exact
            for j in range(c, nc):
                row_i[j] = (p * row_i[j] - fi * row_r[j]) // prev
        prev = p
        r += 1
        if r == nr:
            break
    return r


def _rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """In-place reduced row echelon form; returns (rows, pivot columns)."""
    nr = len(rows)
    nc = len(rows[0]) if nr else 0
    pivots = []
    r = 0
    for c in range(nc):
        piv = None
        for i in range(r, nr):
            if rows[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(nr):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == nr:
            break
    return rows, pivots


def _primitive(vec: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Scale a rational vector to a primitive integer vector, first nonzero > 0."""
    den = 1
    for x in vec:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in vec]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    if g == 0:
        return tuple(Fraction(0) for _ in vec)
    ints = [x // g for x in ints]
    lead = next((x for x in ints if x != 0), 1)
    if lead < 0:
        ints = [-x for x in ints]
    return tuple(Fraction(x) for x in ints)


@dataclass(frozen=True)
class Subspace:
    """A subspace of Q^n given by a basis matrix whose columns span it."""

    ambient_dim: int
    basis: ExactMatrix

    def __post_init__(self):
        if self.basis.rows != self.ambient_dim:
            raise LinAlgError("basis rows != ambient_dim")
        if self.basis.cols and rank(self.basis) != self.basis.cols:
            raise LinAlgError("basis columns are linearly dependent")

    @property
    def dim(self) -> int:
        return self.basis.cols

    @staticmethod
    def full(n: int) -> "Subspace":
        return Subspace(n, ExactMatrix.identity(n))

    @staticmethod
    def zero(n: int) -> "Subspace":
        return Subspace(n, ExactMatrix([[] for _ in range(n)]))

    @staticmethod
    def span(ambient_dim: int, vectors: Sequence[Sequence]) -> "Subspace":
        """Span of possibly dependent vectors, with a canonical reduced basis."""
        vecs = [[_as_fraction(x) for x in v] for v in vectors]
        if not vecs:
            return Subspace.zero(ambient_dim)
        if any(len(v) != ambient_dim for v in vecs):
            raise LinAlgError("vector length != ambient_dim")
        reduced, pivots = _rref(vecs)
        if not pivots:
            return Subspace.zero(ambient_dim)
        basis_rows = [_primitive(reduced[i]) for i in range(len(pivots))]
        return Subspace(ambient_dim, ExactMatrix.from_columns(basis_rows))

    def contains_vector(self, vec: Sequence) -> bool:
        v = [_as_fraction(x) for x in vec]
        if all(x == 0 for x in v):
            return True
        if self.dim == 0:
            return False
        aug = self.basis.hstack(ExactMatrix.column(v))
        return rank(aug) == self.dim

    def contains(self, other: "Subspace") -> bool:
        return all(self.contains_vector(c) for c in other.basis.columns())

    def coordinates_of(self, vec: Sequence) -> tuple[Fraction, ...]:
        """Coefficients expressing vec in this basis (vec must lie in the span)."""
        v = [_as_fraction(x) for x in vec]
        B = self.basis
        g = B.transpose() @ B
        rhs = B.transpose().apply(v)
        coeffs = _solve_square(g, rhs)
        if B.apply(coeffs) != tuple(v):
            raise LinAlgError("vector not contained in the subspace")
        return coeffs

    def to_json(self) -> dict:
        return {
            "ambient_dim": self.ambient_dim,
            "basis": [[rat_to_str(x) for x in col] for col in self.basis.columns()],
        }

    @staticmethod
    def from_json(data: dict) -> "Subspace":
        n = int(data["ambient_dim"])
        vectors = data.get("basis", [])
        if not vectors:
            return Subspace.zero(n)
        return Subspace(n, ExactMatrix.from_columns(vectors))


def _solve_square(A: ExactMatrix, b: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Solve Ax = b for invertible A by Gauss-Jordan."""
    n = A.rows
    rows = [list(A.entries[i]) + [b[i]] for i in range(n)]
    rows, pivots = _rref(rows)
    if len(pivots) != n or any(p >= n for p in pivots):
        raise LinAlgError("singular system")
    return tuple(rows[i][n] for i in range(n))


def nullspace(M: ExactMatrix) -> Subspace:
    """Basis of {x : Mx = 0}, canonical (primitive integer columns)."""
    nc = M.cols
    rows = [list(r) for r in M.entries]
    if not rows:
        return Subspace.full(nc)
    rows, pivots = _rref(rows)
    pivot_set = set(pivots)
    free = [j for j in range(nc) if j not in pivot_set]
    cols = []
    for f in free:
        v = [Fraction(0)] * nc
        v[f] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -rows[r][f]
        cols.append(_primitive(v))
    if not cols:
        return Subspace.zero(nc)
    return Subspace(nc, ExactMatrix.from_columns(cols))


def orth_complement(U: Subspace, within: Subspace) -> Subspace:
    """Orthogonal complement of span(U) inside span(within), standard dot product."""
    if U.ambient_dim != within.ambient_dim:
        raise LinAlgError("ambient dimension mismatch")
    if not within.contains(U):
        raise LinAlgError("U is not contained in `within`")
    if within.dim == 0:
        return Subspace.zero(within.ambient_dim)
    # x = within.basis @ y with U.basis^T x = 0
    if U.dim == 0:
        return within
    cond = U.basis.transpose() @ within.basis
    ys = nullspace(cond)
    if ys.dim == 0:
        return Subspace.zero(within.ambient_dim)
    cols = [(within.basis @ ys.basis).col(j) for j in range(ys.dim)]
    return Subspace.span(within.ambient_dim, cols)


def solve_matrix_equation(
    constraints: Sequence[tuple[ExactMatrix, ExactMatrix]],
    size: int | None = None,
    skew: bool = False,
) -> Subspace:
    """Solve A_i X = X B_i for all i (X square), optionally with X = -X^T.

    Returns a Subspace of the flattened (row-major) n*n matrix space.
    """
    if size is None:
        if not constraints:
            raise LinAlgError("size required when no constraints given")
        size = constraints[0][0].rows
    n = size
    rows: list[list[Fraction]] = []
    for A, B in constraints:
        if A.rows != A.cols or B.rows != B.cols or A.rows != n or B.rows != n:
            raise LinAlgError("constraint matrices must be square of the same size")
        # (A X - X B)[i][j] = sum_k A[i][k] X[k][j] - X[i][k] B[k][j]
        for i in range(n):
            for j in range(n):
                row = [Fraction(0)] * (n * n)
                for k in range(n):
                    row[k * n + j] += A.entries[i][k]
                    row[i * n + k] -= B.entries[k][j]
                rows.append(row)
    if skew:
        for i in range(n):
            for j in range(i, n):
                row = [Fraction(0)] * (n * n)
                row[i * n + j] += 1
                row[j * n + i] += 1
                rows.append(row)
    if not rows:
        return Subspace.full(n * n)
    return nullspace(ExactMatrix(rows))


def unflatten(vec: Sequence[Fraction], n: int) -> ExactMatrix:
    """Inverse of row-major flattening for square matrices."""
    return ExactMatrix([[vec[i * n + j] for j in range(n)] for i in range(n)])


def flatten(M: ExactMatrix) -> tuple[Fraction, ...]:
    return tuple(x for row in M.entries for x in row)


def dot(u: Sequence, v: Sequence) -> Fraction:
    u = [_as_fraction(x) for x in u]
    v = [_as_fraction(x) for x in v]
    if len(u) != len(v):
        raise LinAlgError("vector length mismatch")
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


# -- floating-point shadow path ---------------------------------------

FLOAT_RANK_RTOL = 1e-9


def rank_float(M, rtol: float = FLOAT_RANK_RTOL) -> int:
    """Float rank: singular values above rtol * largest singular value."""
    arr = M.to_float() if isinstance(M, ExactMatrix) else np.asarray(M, dtype=np.float64)
    if arr.size == 0:
        return 0
    sv = np.linalg.svd(arr, compute_uv=False)
    if len(sv) == 0 or sv[0] == 0.0:
        return 0
    return int(np.sum(sv > rtol * sv[0]))


def nullspace_float(arr: np.ndarray, rtol: float = FLOAT_RANK_RTOL) -> np.ndarray:
    """Orthonormal nullspace basis (columns) via SVD."""
    arr = np.asarray(arr, dtype=np.float64)
    if arr.size == 0:
        return np.eye(arr.shape[1] if arr.ndim == 2 else 0)
    u, sv, vt = np.linalg.svd(arr)
    tol = rtol * (sv[0] if len(sv) else 0.0)
    r = int(np.sum(sv > tol))
    return vt[r:].T


# -- seeded sampling ---------------------------------------------------

SAMPLE_RANGE = 10
RESAMPLE_BUDGET = 8


def random_int_vector(rng, n: int) -> list[Fraction]:
    """Integer coordinates drawn uniformly from [-10, 10]."""
    return [Fraction(rng.randint(-SAMPLE_RANGE, SAMPLE_RANGE)) for _ in range(n)]


def json_dumps_canonical(obj) -> str:
    """Deterministic JSON encoding used for all reports."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))

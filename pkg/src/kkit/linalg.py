"""Exact linear algebra over the integers, the rationals and prime fields.

Integer work (Smith forms, determinants, lattice complements) uses Python
integers throughout.  Field work goes through numpy arrays: ``int64`` with
reduction after every operation for primes below 2**31, ``object`` arrays
holding ``Fraction`` (characteristic 0) or big ints otherwise.  Nothing is
ever converted to floating point.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

import numpy as np
from sympy import isprime, primefactors
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from .errors import NoIntegralComplement

__all__ = [
    "IntMatrix",
    "SmithForm",
    "Field",
    "smith_normal_form",
    "prime_torsion",
    "torsion_primes",
    "int_rank",
    "int_det",
    "unimodular_inverse",
    "is_unit",
    "rank",
    "rref",
    "kernel",
    "det_mod",
    "to_field_array",
    "integral_basis_complement",
]

_INT64_SAFE = 2**31


@dataclass(frozen=True)
class IntMatrix:
    """Immutable integer matrix stored row-major."""

    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entry count does not match shape")

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        data = [tuple(int(v) for v in r) for r in rows]
        if cols is None:
            if not data:
                raise ValueError("cols is required for a matrix without rows")
            cols = len(data[0])
        if any(len(r) != cols for r in data):
            raise ValueError("ragged rows")
        return cls(len(data), cols, tuple(v for r in data for v in r))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls.from_rows([[int(i == j) for j in range(n)] for i in range(n)], n)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def diagonal(cls, values: Sequence[int], rows: int | None = None, cols: int | None = None):
        rows = len(values) if rows is None else rows
        cols = len(values) if cols is None else cols
        data = [[0] * cols for _ in range(rows)]
        for i, v in enumerate(values):
            data[i][i] = v
        return cls.from_rows(data, cols)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def to_rows(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    @property
    def T(self) -> "IntMatrix":
        return IntMatrix.from_rows(
            [[self[i, j] for i in range(self.rows)] for j in range(self.cols)], self.rows
        )

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        out = []
        for i in range(self.rows):
            r = self.row(i)
            out.append([sum(r[k] * other[k, j] for k in range(self.cols) if r[k]) for j in range(other.cols)])
        return IntMatrix.from_rows(out, other.cols)


def as_int_matrix(M, cols: int | None = None) -> IntMatrix:
    if isinstance(M, IntMatrix):
        return M
    if isinstance(M, np.ndarray):
        return IntMatrix.from_rows(M.tolist(), M.shape[1])
    return IntMatrix.from_rows(M, cols)


@dataclass(frozen=True)
class SmithForm:
    """Elementary divisors with unimodular transforms: ``left @ M @ right`` is diagonal."""

    divisors: tuple[int, ...]
    left: IntMatrix
    right: IntMatrix

    @property
    def nonzero(self) -> tuple[int, ...]:
        return tuple(d for d in self.divisors if d)

    def diagonal(self) -> IntMatrix:
        return IntMatrix.diagonal(self.divisors, self.left.rows, self.right.cols)


def smith_normal_form(M) -> SmithForm:
    """Smith normal form with minimal-magnitude pivoting.

    Divisors are nonnegative, each dividing the next, and padded with zeros
    up to ``min(rows, cols)``.
    """
    M = as_int_matrix(M)
    m, n = M.rows, M.cols
    A = M.to_rows()
    L = [[int(i == j) for j in range(m)] for i in range(m)]
    R = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, k):
        A[i], A[k] = A[k], A[i]
        L[i], L[k] = L[k], L[i]

    def swap_cols(j, k):
        for row in A:
            row[j], row[k] = row[k], row[j]
        for row in R:
            row[j], row[k] = row[k], row[j]

    def add_row(dst, src, q):
        # row_dst -= q * row_src
        A[dst] = [a - q * b for a, b in zip(A[dst], A[src])]
        L[dst] = [a - q * b for a, b in zip(L[dst], L[src])]

    def add_col(dst, src, q):
        for row in A:
            row[dst] -= q * row[src]
        for row in R:
            row[dst] -= q * row[src]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                v = A[i][j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i0, j0 = best
        swap_rows(t, i0)
        swap_cols(t, j0)
        while True:
            clean = True
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, A[i][t] // A[t][t])
                    if A[i][t]:
                        clean = False
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, A[t][j] // A[t][t])
                    if A[t][j]:
                        clean = False
            if not clean:
                # bring the smallest remainder in row/column t to the pivot
                cand = [(abs(A[i][t]), i, t) for i in range(t, m) if A[i][t]]
                cand += [(abs(A[t][j]), t, j) for j in range(t, n) if A[t][j]]
                _, i1, j1 = min(cand)
                swap_rows(t, i1)
                swap_cols(t, j1)
                continue
            piv = A[t][t]
            bad = next(
                ((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % piv),
                None,
            )
            if bad is None:
                break
            # fold the offending row into row t; the next pass shrinks the pivot
            add_row(t, bad[0], -1)
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            L[t] = [-a for a in L[t]]
        t += 1

    divisors = tuple(abs(A[i][i]) for i in range(min(m, n)))
    return SmithForm(divisors, IntMatrix.from_rows(L, m), IntMatrix.from_rows(R, n))


def int_rank(M) -> int:
    return len(smith_normal_form(M).nonzero)


def prime_torsion(M, p: int) -> int:
    """Number of elementary divisors divisible by ``p``: the p-rank of the cokernel's torsion."""
    return sum(1 for d in smith_normal_form(M).nonzero if d % p == 0)


def torsion_primes(M) -> frozenset[int]:
    out = set()
    for d in smith_normal_form(M).nonzero:
        out.update(primefactors(d))
    return frozenset(out)


def int_det(M) -> int:
    """Fraction-free (Bareiss) determinant of a square integer matrix."""
    M = as_int_matrix(M)
    if M.rows != M.cols:
        raise ValueError("determinant of a non-square matrix")
    n = M.rows
    if n == 0:
        return 1
    A = M.to_rows()
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k]), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def unimodular_inverse(U) -> IntMatrix:
    U = as_int_matrix(U)
    n = U.rows
    A = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(U.to_rows())]
    for c in range(n):
        piv = next(r for r in range(c, n) if A[r][c] != 0)
        A[c], A[piv] = A[piv], A[c]
        inv = 1 / A[c][c]
        A[c] = [v * inv for v in A[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [a - f * b for a, b in zip(A[r], A[c])]
    out = [row[n:] for row in A]
    if any(v.denominator != 1 for row in out for v in row):
        raise ValueError("matrix is not unimodular")
    return IntMatrix.from_rows([[int(v) for v in row] for row in out], n)


def is_unit(d: int, n_inverted: int = 1) -> bool:
    """True iff ``d`` is a unit of Z[1/n_inverted]."""
    d = abs(d)
    if d == 0:
        return False
    while d != 1:
        g = gcd(d, n_inverted)
        if g == 1:
            return False
        while d % g == 0:
            d //= g
    return True


class Field:
    """Prime field of characteristic ``p`` or the rationals when ``p == 0``."""

    def __init__(self, characteristic: int):
        if characteristic < 0 or (characteristic and not isprime(characteristic)):
            raise ValueError(f"characteristic must be 0 or prime, got {characteristic}")
        self.characteristic = characteristic

    def __repr__(self):
        return f"Field({self.characteristic})"

    def __eq__(self, other):
        return isinstance(other, Field) and other.characteristic == self.characteristic

    def __hash__(self):
        return hash(("Field", self.characteristic))

    def __call__(self, value):
        p = self.characteristic
        if p == 0:
            return Fraction(value)
        if isinstance(value, Fraction):
            return value.numerator * pow(value.denominator, -1, p) % p
        return int(value) % p

    def inv(self, value):
        if self.characteristic == 0:
            return 1 / Fraction(value)
        return pow(int(value), -1, self.characteristic)

    @property
    def dtype(self):
        p = self.characteristic
        return np.int64 if 0 < p < _INT64_SAFE else object

    def elements(self):
        if self.characteristic == 0:
            raise ValueError("the rationals are not enumerable")
        return range(self.characteristic)


def _field(p) -> Field:
    return p if isinstance(p, Field) else Field(p)


def to_field_array(M, p, ncols: int | None = None) -> np.ndarray:
    """Reduce an integer/rational matrix into the field of characteristic ``p``."""
    F = _field(p)
    if isinstance(M, IntMatrix):
        ncols = M.cols
        M = M.to_rows()
    if isinstance(M, np.ndarray) and M.dtype != object and F.dtype is np.int64:
        return np.mod(M.astype(np.int64), F.characteristic)
    rows = [[F(v) for v in row] for row in (M.tolist() if isinstance(M, np.ndarray) else M)]
    if ncols is None:
        ncols = len(rows[0]) if rows else (M.shape[1] if isinstance(M, np.ndarray) else 0)
    arr = np.empty((len(rows), ncols), dtype=F.dtype)
    for i, row in enumerate(rows):
        for j, v in enumerate(row):
            arr[i, j] = v
    return arr


def rref(M, p, ncols: int | None = None) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over the field; returns (matrix, pivot columns)."""
    F = _field(p)
    q = F.characteristic
    A = to_field_array(M, F, ncols).copy()
    nrows, n = A.shape
    if q == 0:
        return _rref_rational(A)
    pivots = []
    r = 0
    for c in range(n):
        if r == nrows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if len(nz) == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            A[[r, k]] = A[[k, r]]
        inv = F.inv(A[r, c])
        A[r] = A[r] * inv
        if q:
            A[r] %= q
        col = A[:, c].copy()
        col[r] = 0
        rows = np.nonzero(col)[0]
        if len(rows):
            A[rows] = A[rows] - np.outer(col[rows], A[r])
            if q:
                A[rows] %= q
        pivots.append(c)
        r += 1
    return A, pivots


def to_domain(A: np.ndarray) -> DomainMatrix:
    """Object array of ints or Fractions as a sympy matrix over QQ."""
    rows = [[QQ(v.numerator, v.denominator) for v in row] for row in A.tolist()]
    return DomainMatrix(rows, A.shape, QQ)


def _from_domain(M: DomainMatrix) -> np.ndarray:
    out = np.empty(M.shape, dtype=object)
    for i, row in enumerate(M.to_list()):
        for j, v in enumerate(row):
            out[i, j] = Fraction(int(v.numerator), int(v.denominator))
    return out


def _rref_rational(A: np.ndarray) -> tuple[np.ndarray, list[int]]:
    # fraction-free elimination in sympy is much faster than Fraction arithmetic
    if A.size == 0:
        return A, []
    R, pivots = to_domain(A).rref()
    return _from_domain(R), list(pivots)


def rational_matmul(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Exact product of two object arrays of rationals."""
    if A.size == 0 or B.size == 0:
        return A.dot(B)
    return _from_domain((to_domain(A).to_sparse() * to_domain(B).to_sparse()).to_dense())


def rank(M, p, ncols: int | None = None) -> int:
    return len(rref(M, p, ncols)[1])


def kernel(M, p, ncols: int | None = None) -> list[list]:
    """Basis of the right null space ``{v : M v = 0}`` over the field."""
    F = _field(p)
    A, pivots = rref(M, F, ncols)
    n = A.shape[1]
    free = [c for c in range(n) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [F(0)] * n
        v[f] = F(1)
        for i, c in enumerate(pivots):
            v[c] = F(-A[i, f])
        basis.append(v)
    return basis


def det_mod(M, p):
    """Determinant over the field (square matrices only)."""
    F = _field(p)
    q = F.characteristic
    A = to_field_array(M, F).copy()
    n = A.shape[0]
    if A.shape[1] != n:
        raise ValueError("determinant of a non-square matrix")
    if q == 0:
        if n == 0:
            return F(1)
        d = to_domain(A).det()
        return Fraction(int(d.numerator), int(d.denominator))
    det = F(1)
    for c in range(n):
        nz = np.nonzero(A[c:, c])[0]
        if len(nz) == 0:
            return F(0)
        k = c + int(nz[0])
        if k != c:
            A[[c, k]] = A[[k, c]]
            det = F(-det)
        det = F(det * A[c, c])
        inv = F.inv(A[c, c])
        below = A[c + 1:, c].copy()
        rows = np.nonzero(below)[0] + c + 1
        if len(rows):
            factor = A[rows, c] * inv
            if q:
                factor %= q
            A[rows] = A[rows] - np.outer(factor, A[c])
            if q:
                A[rows] %= q
    return det


def integral_basis_complement(sublattice_gens, ambient_rank: int, n_inverted: int = 1) -> tuple[int, ...]:
    """Lexicographically smallest set of standard basis indices completing a sublattice.

    ``sublattice_gens`` is a sequence of generator vectors in Z^ambient_rank.
    The returned indices, together with the generators, span the ambient
    lattice over Z[1/n_inverted].
    """
    gens = [list(map(int, g)) for g in sublattice_gens]
    if any(len(g) != ambient_rank for g in gens):
        raise ValueError("generator length differs from ambient rank")
    if gens:
        snf = smith_normal_form(IntMatrix.from_rows(gens, ambient_rank))
        bad = [d for d in snf.nonzero if not is_unit(d, n_inverted)]
        if bad:
            raise NoIntegralComplement(
                f"sublattice is not a direct summand over Z[1/{n_inverted}]: divisors {bad}"
            )
        k = len(snf.nonzero)
    else:
        k = 0
    need = ambient_rank - k
    for subset in itertools.combinations(range(ambient_rank), need):
        rows = gens + [[int(i == j) for j in range(ambient_rank)] for i in subset]
        if not rows:
            return ()
        snf = smith_normal_form(IntMatrix.from_rows(rows, ambient_rank))
        if len(snf.nonzero) == ambient_rank and all(is_unit(d, n_inverted) for d in snf.nonzero):
            return subset
    raise NoIntegralComplement(
        f"no set of {need} standard basis vectors completes the sublattice over Z[1/{n_inverted}]"
    )

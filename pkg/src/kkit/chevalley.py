"""Chevalley bases over Z, adjoint matrices, the height grading and Springer's maps."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial

import numpy as np

from .errors import EmptyDegree, NonIntegralDividedPower, StructureConstantError
from .linalg import Field, IntMatrix, rank, smith_normal_form, torsion_primes
from .roots import RootDatum, build_root_datum

FULL_JACOBI_RANK = 4
RANDOM_JACOBI_TRIPLES = 10_000


@dataclass(frozen=True, eq=False)
class ChevalleyAlgebra:
    """Integral Lie algebra with basis ``e_alpha`` (one per root) and ``h_k``.

    ``labels[b]`` is ``("e", root_index)`` or ``("h", k)``; the basis is sorted
    by degree so that each graded piece is a contiguous block.
    """

    datum: RootDatum
    labels: tuple[tuple[str, int], ...]
    degrees: tuple[int, ...]
    # sparse structure constants: [b_i, b_j] = sum c * b_k
    triples: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray] = field(repr=False)
    table: dict = field(repr=False)
    root_basis: tuple[int, ...] = field(repr=False)  # root index -> basis index
    h_basis: tuple[int, ...] = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.labels)

    @property
    def rank(self) -> int:
        return self.datum.rank

    def degree_block(self, i: int) -> list[int]:
        return [b for b, d in enumerate(self.degrees) if d == i]

    @property
    def min_degree(self) -> int:
        return min(self.degrees)

    @property
    def max_degree(self) -> int:
        return max(self.degrees)

    def bracket_basis(self, i: int, j: int) -> tuple[tuple[int, int], ...]:
        return self.table.get((i, j), ())

    def basis_vector(self, b: int) -> list[int]:
        v = [0] * self.dim
        v[b] = 1
        return v

    def bracket(self, x, y, p: int = 0) -> list:
        """[x, y] for coordinate vectors (integers, or field values at ``p``)."""
        F = Field(p)
        out = [0] * self.dim
        xs = [(i, c) for i, c in enumerate(x) if c]
        ys = [(j, c) for j, c in enumerate(y) if c]
        for i, a in xs:
            for j, b in ys:
                for k, c in self.table.get((i, j), ()):
                    out[k] += a * b * c
        return [F(v) for v in out] if p else out

    def ad(self, x, p: int = 0) -> np.ndarray:
        """Matrix of ad(x) in the Chevalley basis over characteristic ``p``.

        With ``p == 0`` and integer input the result is an integer matrix.
        """
        I, J, K, C = self.triples
        xv = np.array(list(x), dtype=object)
        coeff = xv[I] * C
        if p == 0:
            out = np.zeros((self.dim, self.dim), dtype=object)
            out[:] = 0
            np.add.at(out, (K, J), coeff)
            return out
        dtype = Field(p).dtype
        coeff = np.array([int(v) % p for v in coeff], dtype=dtype) if len(coeff) else np.zeros(0, dtype)
        out = np.zeros((self.dim, self.dim), dtype=dtype)
        np.add.at(out, (K, J), coeff)
        return out % p

    def ad_basis(self, b: int) -> np.ndarray:
        """Integer matrix of ad(b_b)."""
        return _ad_basis_cached(self, b)


@lru_cache(maxsize=4096)
def _ad_basis_cached(alg: ChevalleyAlgebra, b: int) -> np.ndarray:
    I, J, K, C = alg.triples
    sel = I == b
    out = np.zeros((alg.dim, alg.dim), dtype=np.int64)
    np.add.at(out, (K[sel], J[sel]), C[sel].astype(np.int64))
    return out


# -- structure constants --------------------------------------------------------


def _structure_constants(rd: RootDatum, factor: int) -> dict[tuple[int, int], int]:
    """N_{alpha,beta} for all roots of one simple factor (extraspecial pairs +1)."""
    idx = [i for i in range(len(rd.roots)) if rd.root_factor[i] == factor]
    pos = [i for i in idx if i < rd.n_positive]
    coeffs = rd.coeffs
    sq = rd.lengths
    index = {coeffs[i]: i for i in idx}
    order = {i: k for k, i in enumerate(pos)}

    def add(a, b):
        return index.get(tuple(x + y for x, y in zip(coeffs[a], coeffs[b])))

    def string_p(a, b):
        # largest p with b - p*a a root
        p = 0
        cur = coeffs[b]
        while True:
            cur = tuple(x - y for x, y in zip(cur, coeffs[a]))
            if cur in index:
                p += 1
            else:
                return p

    pos_table: dict[tuple[int, int], Fraction] = {}
    neg = rd.negative_of
    is_pos = lambda a: a < rd.n_positive

    def N(a, b) -> Fraction:
        c = add(a, b)
        if c is None:
            return Fraction(0)
        if is_pos(a) and is_pos(b):
            if order[a] < order[b]:
                return pos_table[(a, b)]
            return -pos_table[(b, a)]
        if not is_pos(a) and not is_pos(b):
            return -N(neg(a), neg(b))
        if not is_pos(a):
            return -N(b, a)
        # a > 0 > b, a + b = c, and a + b + (-c) = 0
        if is_pos(c):
            return Fraction(sq[c], sq[a]) * N(b, neg(c))
        return Fraction(sq[c], sq[b]) * N(neg(c), a)

    for xi in sorted(pos, key=lambda i: (rd.heights[i], order[i])):
        pairs = [
            (a, b)
            for a in pos
            for b in pos
            if order[a] < order[b] and add(a, b) == xi
        ]
        if not pairs:
            continue
        pairs.sort(key=lambda ab: order[ab[0]])
        a1, b1 = pairs[0]
        pos_table[(a1, b1)] = Fraction(string_p(a1, b1) + 1)
        na1, nb1 = neg(a1), neg(b1)
        for a, b in pairs[1:]:
            # four-term relation for a + b + (-a1) + (-b1) = 0
            total = Fraction(0)
            s = add(b, na1)
            if s is not None:
                total += N(b, na1) * N(a, nb1) / sq[s]
            s = add(na1, a)
            if s is not None:
                total += N(na1, a) * N(b, nb1) / sq[s]
            pos_table[(a, b)] = -total * sq[xi] / N(na1, nb1)

    out = {}
    for a in idx:
        for b in idx:
            if add(a, b) is not None:
                v = N(a, b)
                expected = string_p(a, b) + 1
                if v.denominator != 1 or abs(v) != expected:
                    raise StructureConstantError(
                        f"N({rd.roots[a]}, {rd.roots[b]}) = {v}, expected +-{expected}"
                    )
                out[(a, b)] = int(v)
    return out


def _gl_constants(rd: RootDatum, factor: int) -> dict[tuple[int, int], int]:
    """Structure constants for elementary matrices E_ij (root eps_i - eps_j)."""
    f = rd.factors[factor]
    idx = [i for i in range(len(rd.roots)) if rd.root_factor[i] == factor]

    def pair(i):
        v = rd.roots[i][f.offset:f.offset + f.lattice_rank]
        return v.index(1), v.index(-1)

    out = {}
    for a in idx:
        i, j = pair(a)
        for b in idx:
            k, l = pair(b)
            if j == k and i != l:
                out[(a, b)] = 1
            elif l == i and j != k:
                out[(a, b)] = -1
    return out


def _basis_order(rd: RootDatum) -> list[tuple[str, int]]:
    labels = [("e", i) for i in range(len(rd.roots))] + [("h", k) for k in range(rd.rank)]

    def key(lab):
        kind, i = lab
        if kind == "h":
            return (0, 1, i)
        h = rd.heights[i]
        return (h, 0 if h < 0 else 2, i)

    return sorted(labels, key=key)


@lru_cache(maxsize=None)
def build_chevalley_algebra(spec: str | RootDatum) -> ChevalleyAlgebra:
    """Chevalley basis with validated structure constants."""
    rd = spec if isinstance(spec, RootDatum) else build_root_datum(spec)
    labels = _basis_order(rd)
    pos_of = {lab: b for b, lab in enumerate(labels)}
    root_basis = tuple(pos_of[("e", i)] for i in range(len(rd.roots)))
    h_basis = tuple(pos_of[("h", k)] for k in range(rd.rank))
    degrees = tuple(0 if kind == "h" else rd.heights[i] for kind, i in labels)

    consts = {}
    for fi, f in enumerate(rd.factors):
        if f.ss_rank == 0:
            continue
        consts.update(_gl_constants(rd, fi) if f.kind == "GL" else _structure_constants(rd, fi))

    table: dict[tuple[int, int], list[tuple[int, int]]] = {}

    def put(i, j, k, c):
        if c:
            table.setdefault((i, j), []).append((k, c))

    for a in range(len(rd.roots)):
        ba = root_basis[a]
        for k in range(rd.rank):
            # [h_k, e_a] = <a, h_k> e_a
            c = rd.roots[a][k]
            put(h_basis[k], ba, ba, c)
            put(ba, h_basis[k], ba, -c)
        na = rd.negative_of(a)
        for k, c in enumerate(rd.coroots[a]):
            put(ba, root_basis[na], h_basis[k], c)
    for (a, b), c in consts.items():
        s = rd.root_index(tuple(x + y for x, y in zip(rd.roots[a], rd.roots[b])))
        put(root_basis[a], root_basis[b], root_basis[s], c)

    frozen = {key: tuple(v) for key, v in table.items()}
    I, J, K, C = [], [], [], []
    for (i, j), terms in sorted(frozen.items()):
        for k, c in terms:
            I.append(i)
            J.append(j)
            K.append(k)
            C.append(c)
    triples = tuple(np.array(v, dtype=np.int64) for v in (I, J, K, C))
    alg = ChevalleyAlgebra(rd, tuple(labels), degrees, triples, frozen, root_basis, h_basis)
    validate_algebra(alg)
    check_divided_powers(alg)
    return alg


def validate_algebra(alg: ChevalleyAlgebra, seed: int = 0) -> None:
    """Antisymmetry, grading and the Jacobi identity; raises on failure."""
    for (i, j), terms in alg.table.items():
        back = dict(alg.table.get((j, i), ()))
        for k, c in terms:
            if back.get(k) != -c:
                raise StructureConstantError(f"antisymmetry fails on {alg.labels[i]}, {alg.labels[j]}")
            if alg.degrees[k] != alg.degrees[i] + alg.degrees[j]:
                raise StructureConstantError(f"grading fails on {alg.labels[i]}, {alg.labels[j]}")
    if alg.datum.ss_rank <= FULL_JACOBI_RANK:
        _jacobi_full(alg)
    else:
        _jacobi_random(alg, RANDOM_JACOBI_TRIPLES, seed)


def _jacobi_full(alg: ChevalleyAlgebra) -> None:
    # Jacobi for all triples is the identity ad[x,y] = [ad x, ad y]
    mats = np.stack([alg.ad_basis(b) for b in range(alg.dim)])
    for i in range(alg.dim):
        left = mats[i] @ mats - mats @ mats[i]
        right = np.zeros_like(left)
        for j in range(alg.dim):
            for k, c in alg.table.get((i, j), ()):
                right[j] += c * mats[k]
        if not np.array_equal(left, right):
            j = next(j for j in range(alg.dim) if not np.array_equal(left[j], right[j]))
            raise StructureConstantError(f"Jacobi fails for {alg.labels[i]}, {alg.labels[j]}")


def _jacobi_random(alg: ChevalleyAlgebra, n: int, seed: int) -> None:
    rng = random.Random(seed)
    basis = [alg.basis_vector(b) for b in range(alg.dim)]
    for _ in range(n):
        x, y, z = (basis[rng.randrange(alg.dim)] for _ in range(3))
        total = [
            a + b + c
            for a, b, c in zip(
                alg.bracket(x, alg.bracket(y, z)),
                alg.bracket(y, alg.bracket(z, x)),
                alg.bracket(z, alg.bracket(x, y)),
            )
        ]
        if any(total):
            raise StructureConstantError("Jacobi identity fails on a sampled triple")


# -- principal nilpotent and Springer maps ----------------------------------------


def principal_nilpotent(alg: ChevalleyAlgebra) -> tuple[list[int], dict[int, int]]:
    """``e`` as a coordinate vector and, per simple root, the basis index of e_{-alpha}."""
    rd = alg.datum
    e = [0] * alg.dim
    negs = {}
    for i in rd.simple:
        e[alg.root_basis[i]] = 1
        negs[i] = alg.root_basis[rd.negative_of(i)]
        # [e_alpha, e_{-alpha}] must be the coroot in the h basis
        got = alg.bracket(alg.basis_vector(alg.root_basis[i]), alg.basis_vector(negs[i]))
        want = [0] * alg.dim
        for k, c in enumerate(rd.coroots[i]):
            want[alg.h_basis[k]] = c
        assert got == want
    return e, negs


def springer_map(alg: ChevalleyAlgebra, i: int) -> IntMatrix:
    """Matrix of y -> [e, y] from the degree-i piece to the degree-(i+1) piece."""
    src = alg.degree_block(i)
    if not src:
        raise EmptyDegree(f"degree {i} piece is zero")
    dst = alg.degree_block(i + 1)
    e, _ = principal_nilpotent(alg)
    ad_e = alg.ad(e)
    rows = [[int(ad_e[r, c]) for c in src] for r in dst]
    return IntMatrix.from_rows(rows, len(src))


@dataclass
class SpringerDegree:
    degree: int
    shape: tuple[int, int]
    injective_q: bool
    surjective_q: bool
    divisors: tuple[int, ...]
    torsion: frozenset[int]

    def as_dict(self) -> dict:
        return {
            "degree": self.degree,
            "shape": list(self.shape),
            "injective_over_Q": self.injective_q,
            "surjective_over_Q": self.surjective_q,
            "divisors": list(self.divisors),
            "torsion_primes": sorted(self.torsion),
        }


@dataclass
class SpringerReport:
    spec: str
    degrees: list[SpringerDegree]
    bad_primes: frozenset[int]
    lattice_torsion: frozenset[int]  # degrees -1 and 0
    other_torsion: frozenset[int]  # all remaining degrees
    derived_n: int
    very_good_product: int

    @property
    def localized(self) -> bool:
        """Torsion away from degrees -1 and 0 only at bad primes."""
        return self.other_torsion <= self.bad_primes

    @property
    def n_matches(self) -> bool:
        return self.derived_n == self.very_good_product

    def as_dict(self) -> dict:
        return {
            "group": self.spec,
            "degrees": [d.as_dict() for d in self.degrees],
            "bad_primes": sorted(self.bad_primes),
            "lattice_torsion": sorted(self.lattice_torsion),
            "other_torsion": sorted(self.other_torsion),
            "torsion_localized": self.localized,
            "derived_N": self.derived_n,
            "very_good_product": self.very_good_product,
            "N_matches": self.n_matches,
        }


def springer_torsion_report(alg: ChevalleyAlgebra) -> SpringerReport:
    """Torsion primes of coker(t_i) for every degree with a nonzero target."""
    rd = alg.datum
    out = []
    lattice, other = set(), set()
    for i in range(alg.min_degree, alg.max_degree):
        M = springer_map(alg, i)
        snf = smith_normal_form(M)
        tp = torsion_primes(M)
        r = len(snf.nonzero)
        out.append(SpringerDegree(i, (M.rows, M.cols), r == M.cols, r == M.rows, snf.nonzero, tp))
        (lattice if i in (-1, 0) else other).update(tp)
    n = 1
    for q in lattice | other:
        n *= q
    return SpringerReport(
        rd.spec, out, rd.bad_primes(), frozenset(lattice), frozenset(other), n, rd.very_good_product()
    )


def springer_injective_mod(alg: ChevalleyAlgebra, p: int) -> dict[int, bool]:
    """Per negative degree: is t_i injective over the field of characteristic p."""
    out = {}
    for i in range(alg.min_degree, 0):
        M = springer_map(alg, i)
        out[i] = rank(M, p) == M.cols
    return out


def springer_surjective_mod(alg: ChevalleyAlgebra, p: int) -> dict[int, bool]:
    out = {}
    for i in range(0, alg.max_degree):
        M = springer_map(alg, i)
        out[i] = rank(M, p) == M.rows
    return out


# -- divided powers ---------------------------------------------------------------


@lru_cache(maxsize=1024)
def divided_powers(alg: ChevalleyAlgebra, b: int) -> tuple[np.ndarray, ...]:
    """Integer matrices (ad b)^k / k! for k = 0, 1, ... until zero."""
    # entries stay tiny (|N| <= 3, nilpotency order <= 5), so int64 is exact
    A = alg.ad_basis(b).astype(np.int64)
    out = [np.identity(alg.dim, dtype=object)]
    power = np.identity(alg.dim, dtype=np.int64)
    k = 0
    while True:
        k += 1
        power = power @ A
        if not power.any():
            return tuple(out)
        if k > alg.dim:
            raise NonIntegralDividedPower(f"ad of {alg.labels[b]} is not nilpotent")
        q = factorial(k)
        if (power % q).any():
            raise NonIntegralDividedPower(f"(ad {alg.labels[b]})^{k}/{k}! is not integral")
        out.append((power // q).astype(object))


def divided_power_exp(alg: ChevalleyAlgebra, b: int, c, p: int = 0) -> np.ndarray:
    """sum_k c^k (ad b)^k / k! over the field of characteristic ``p``."""
    F = Field(p)
    c = F(c)
    total = np.zeros((alg.dim, alg.dim), dtype=object)
    ck = F(1)
    for D in divided_powers(alg, b):
        total = total + D * ck
        ck = F(ck * c)
    if p:
        return np.array([[int(v) % p for v in row] for row in total], dtype=F.dtype).reshape(alg.dim, alg.dim)
    return np.vectorize(Fraction, otypes=[object])(total)


def check_divided_powers(alg: ChevalleyAlgebra) -> None:
    """Integrality of divided powers of every simple-root negative."""
    rd = alg.datum
    for i in rd.simple:
        divided_powers(alg, alg.root_basis[rd.negative_of(i)])


# -- GL(n) helpers ------------------------------------------------------------------


def gl_units(alg: ChevalleyAlgebra) -> list[tuple[int, int]]:
    """For a single GL(n) factor: the (row, col) of the matrix unit of each basis vector."""
    rd = alg.datum
    if len(rd.factors) != 1 or rd.factors[0].kind != "GL":
        raise ValueError("matrix units only exist for a single GL(n) factor")
    out = []
    for kind, i in alg.labels:
        if kind == "h":
            out.append((i, i))
        else:
            v = rd.roots[i]
            out.append((v.index(1), v.index(-1)))
    return out


def to_matrix(alg: ChevalleyAlgebra, x) -> list[list]:
    n = alg.rank
    M = [[0] * n for _ in range(n)]
    for (r, c), v in zip(gl_units(alg), x):
        M[r][c] += v
    return M


def from_matrix(alg: ChevalleyAlgebra, M) -> list:
    return [M[r][c] for r, c in gl_units(alg)]

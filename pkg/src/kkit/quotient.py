"""Adjoint quotient at desk scale: GL(n) invariants, the slice chart, and the form kappa."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from sympy import primefactors
from sympy.polys.domains import GF, QQ
from sympy.polys.matrices import DomainMatrix

from .chevalley import (
    ChevalleyAlgebra,
    build_chevalley_algebra,
    divided_power_exp,
    springer_torsion_report,
    to_matrix,
)
from .errors import BruteForceTooLarge, DegenerateForm
from .kostant import Slice, integral_complement
from .linalg import Field, IntMatrix, int_det
from .report import CheckResult, FAIL, PASS
from .roots import simple_root_lengths

CHART_MAX_N = 4
CHART_MAX_Q = 11

# Dynkin index of the defining representation, per classical type
DEFINING_INDEX = {"A": 1, "B": 2, "C": 1, "D": 2}


def invariant_map_gl(n: int, x, p: int = 0) -> tuple:
    """(c_1, ..., c_n) with c_i the trace of the i-th exterior power of x.

    These are the signed coefficients of the characteristic polynomial.
    """
    F = Field(p)
    if n == 0:
        return ()
    dom = GF(p) if p else QQ
    rows = [[dom.convert(F(v)) if p else dom.convert(Fraction(v)) for v in row] for row in x]
    coeffs = DomainMatrix(rows, (n, n), dom).charpoly()
    # charpoly = lambda^n + a_1 lambda^{n-1} + ... ; c_i = (-1)^i a_i
    out = []
    for i in range(1, n + 1):
        v = coeffs[i] * (-1) ** i
        out.append(F(int(v)) if p else Fraction(int(v.numerator), int(v.denominator)))
    return tuple(out)


def elementary_symmetric(values, p: int = 0) -> tuple:
    F = Field(p)
    n = len(values)
    out = []
    for i in range(1, n + 1):
        total = F(0)
        for combo in itertools.combinations(values, i):
            prod = F(1)
            for v in combo:
                prod = F(prod * v)
            total = F(total + prod)
        out.append(total)
    return tuple(out)


def _gl_algebra(n: int) -> ChevalleyAlgebra:
    return build_chevalley_algebra(f"GL({n})")


def slice_chart_audit_gl(n: int, q: int, sl: Slice | None = None) -> CheckResult:
    """Exhaustive check that chi restricted to S(F_q) is a bijection onto F_q^n."""
    if n > CHART_MAX_N or q > CHART_MAX_Q:
        raise BruteForceTooLarge(f"slice chart enumeration limited to n <= {CHART_MAX_N}, q <= {CHART_MAX_Q}")
    alg = _gl_algebra(n)
    if sl is None:
        sl = integral_complement(alg)
    if sl.spec != alg.datum.spec:
        raise ValueError(f"slice for {sl.spec} does not belong to GL({n})")
    images = {}
    collisions = []
    for coords in itertools.product(range(q), repeat=sl.dim):
        x = [v % q for v in sl.point(coords)]
        c = invariant_map_gl(n, to_matrix(alg, x), q)
        if c in images and len(collisions) < 5:
            collisions.append({"a": list(images[c]), "b": list(coords), "image": list(c)})
        images.setdefault(c, coords)
    points = q ** sl.dim
    ok = len(images) == points == q**n
    return CheckResult(
        "kostant-chart-gl",
        alg.datum.spec,
        q,
        PASS if ok else FAIL,
        "chi restricted to the slice is a bijection on F_q-points",
        {"points": points, "images": len(images), "target": q**n},
        None if ok else {"collisions": collisions},
    )


def restriction_check(n: int, p: int, n_samples: int = 1000, seed: int = 0) -> CheckResult:
    """On diagonal h, the invariants equal the elementary symmetric values."""
    rng = random.Random(seed)
    bad = []
    for _ in range(n_samples):
        d = [rng.randrange(p) if p else rng.randrange(-20, 21) for _ in range(n)]
        M = [[d[i] if i == j else 0 for j in range(n)] for i in range(n)]
        if invariant_map_gl(n, M, p) != elementary_symmetric(d, p):
            bad.append(d)
    return CheckResult(
        "chevalley-restriction-gl",
        f"GL({n})",
        p,
        FAIL if bad else PASS,
        "invariants restricted to the diagonal are the elementary symmetric functions",
        {"samples": n_samples, "seed": seed},
        {"diagonals": bad[:5]} if bad else None,
    )


def conjugation_invariance_check(n: int, p: int, n_samples: int = 100, seed: int = 0) -> CheckResult:
    """c_i(Ad(u) x) = c_i(x) for u a product of root-group elements."""
    alg = _gl_algebra(n)
    F = Field(p)
    rng = random.Random(seed)
    roots = range(len(alg.datum.roots))
    bad = []
    for _ in range(n_samples):
        x = [rng.randrange(p) if p else rng.randrange(-9, 10) for _ in range(alg.dim)]
        y = np.array([F(v) for v in x], dtype=object)
        for _ in range(3):
            a = rng.choice(roots) if alg.datum.roots else None
            if a is None:
                break
            c = rng.randrange(p) if p else rng.randrange(-5, 6)
            U = divided_power_exp(alg, alg.root_basis[a], c, p).astype(object)
            y = U.dot(y)
            if p:
                y = y % p
        before = invariant_map_gl(n, to_matrix(alg, x), p)
        after = invariant_map_gl(n, to_matrix(alg, list(y)), p)
        if before != after:
            bad.append(x)
    return CheckResult(
        "invariants-conjugation-gl",
        alg.datum.spec,
        p,
        FAIL if bad else PASS,
        "the invariants c_i are constant on root-group conjugates",
        {"samples": n_samples, "seed": seed},
        {"points": bad[:5]} if bad else None,
    )


# -- the invariant form kappa --------------------------------------------------------


@dataclass(frozen=True)
class KappaForm:
    spec: str
    gram: tuple[tuple[int, ...], ...]
    det: int
    choice: tuple[str, ...]  # per factor: "trace" or "killing"

    def __call__(self, x, y):
        total = 0
        for i, a in enumerate(x):
            if a:
                row = self.gram[i]
                for j, b in enumerate(y):
                    if b and row[j]:
                        total += a * row[j] * b
        return total

    def det_primes(self) -> list[int]:
        return list(primefactors(abs(self.det))) if self.det else [0]

    def nondegenerate_at(self, p: int) -> bool:
        return self.det != 0 if p == 0 else self.det % p != 0

    def array(self, p: int = 0) -> np.ndarray:
        A = np.array(self.gram, dtype=np.int64)
        return A % p if p else A


def _torus_block(alg: ChevalleyAlgebra) -> tuple[list[list[int]], list[str]]:
    rd = alg.datum
    T = [[Fraction(0)] * rd.rank for _ in range(rd.rank)]
    choice = []
    for fi, f in enumerate(rd.factors):
        o, m = f.offset, f.lattice_rank
        if f.kind == "GL":
            for k in range(m):
                T[o + k][o + k] = Fraction(1)
            choice.append("trace")
        elif f.letter in DEFINING_INDEX:
            # index times the normalized form on simple coroots
            L = simple_root_lengths(f.letter, f.ss_rank)
            lmax = max(L)
            cart = [row[f.simple_offset:f.simple_offset + m] for row in rd.cartan[f.simple_offset:f.simple_offset + m]]
            for i in range(m):
                for j in range(m):
                    bij = Fraction(cart[i][j] * L[j], 2)
                    T[o + i][o + j] = DEFINING_INDEX[f.letter] * 2 * bij * lmax / (L[i] * L[j])
            choice.append("trace")
        else:
            # Killing form on t: sum over roots of alpha(h_k) alpha(h_l)
            for a in range(len(rd.roots)):
                if rd.root_factor[a] != fi:
                    continue
                r = rd.roots[a]
                for i in range(m):
                    for j in range(m):
                        T[o + i][o + j] += r[o + i] * r[o + j]
            choice.append("killing")
    if any(v.denominator != 1 for row in T for v in row):
        raise AssertionError("torus form is not integral")
    return [[int(v) for v in row] for row in T], choice


@lru_cache(maxsize=None)
def kappa_form(alg: ChevalleyAlgebra) -> KappaForm:
    """Symmetric invariant form: trace form for classical/GL factors, Killing form otherwise."""
    rd = alg.datum
    T, choice = _torus_block(alg)
    dim = alg.dim
    G = [[0] * dim for _ in range(dim)]
    for k, bk in enumerate(alg.h_basis):
        for l, bl in enumerate(alg.h_basis):
            G[bk][bl] = T[k][l]
    det = _int_det_small(T)
    for a in range(len(rd.roots)):
        # kappa(e_a, e_-a) = kappa(h_a, h_a) / 2 by invariance
        h = rd.coroots[a]
        val = sum(h[k] * T[k][l] * h[l] for k in range(rd.rank) for l in range(rd.rank))
        if val % 2:
            raise AssertionError("kappa(e_a, e_-a) is not integral")
        G[alg.root_basis[a]][alg.root_basis[rd.negative_of(a)]] = val // 2
        if a < rd.n_positive:
            det *= -((val // 2) ** 2)
    form = KappaForm(rd.spec, tuple(tuple(r) for r in G), det, tuple(choice))
    _check_invariance(alg, form)
    n_primes = set(primefactors(springer_torsion_report(alg).derived_n))
    if det == 0 or not set(primefactors(abs(det))) <= n_primes:
        raise DegenerateForm(f"Gram determinant {det} is not a unit away from {sorted(n_primes)}")
    return form


def _int_det_small(T) -> int:
    return int_det(IntMatrix.from_rows(T, len(T))) if T else 1


def _check_invariance(alg: ChevalleyAlgebra, form: KappaForm) -> None:
    """kappa([b_i, b_j], b_k) + kappa(b_j, [b_i, b_k]) = 0 on all basis triples."""
    G = form.gram
    partners = [[(k, v) for k, v in enumerate(G[m]) if v] for m in range(alg.dim)]
    acc: dict[tuple[int, int, int], int] = {}
    I, J, K, C = alg.triples
    for i, j, m, c in zip(I.tolist(), J.tolist(), K.tolist(), C.tolist()):
        # [b_i, b_j] = ... + c b_m contributes c kappa(b_m, b_k) to (i, j, k)
        for k, v in partners[m]:
            acc[(i, j, k)] = acc.get((i, j, k), 0) + c * v
        # [b_i, b_k'] = ... + c b_m with k' = j contributes kappa(b_j', b_m) to (i, j', k')
        for jj, v in partners[m]:
            acc[(i, jj, j)] = acc.get((i, jj, j), 0) + c * v
    bad = [key for key, v in acc.items() if v]
    if bad:
        i, j, k = bad[0]
        raise DegenerateForm(
            f"kappa is not invariant at ({alg.labels[i]}, {alg.labels[j]}, {alg.labels[k]})"
        )
    if any(G[i][j] != G[j][i] for i in range(alg.dim) for j in range(i)):
        raise DegenerateForm("kappa is not symmetric")

"""x-stable complete flags in F_q^n versus fibers of t -> t/W, for GL(n)."""

from __future__ import annotations

import itertools
import random
from collections import Counter
from functools import lru_cache
from math import factorial, prod

import numpy as np

from .chevalley import build_chevalley_algebra, from_matrix, to_matrix
from .errors import BruteForceTooLarge
from .kostant import FieldModel, centralizer, integral_complement
from .linalg import Field, kernel
from .quotient import elementary_symmetric, invariant_map_gl
from .report import CheckResult, FAIL, PASS

FLAG_MAX_N = 3
FLAG_MAX_Q = 7
MAX_ATTEMPTS = 100_000

Flag = tuple[tuple[tuple[int, ...], ...], ...]


def _check_envelope(n: int, q: int) -> None:
    if n > FLAG_MAX_N or q > FLAG_MAX_Q:
        raise BruteForceTooLarge(f"flag enumeration limited to n <= {FLAG_MAX_N}, q <= {FLAG_MAX_Q}")
    Field(q)  # q must be prime
    if q == 0:
        raise ValueError("flags are enumerated over a finite field")


def subspaces(n: int, q: int, k: int) -> list[tuple[tuple[int, ...], ...]]:
    """All k-dimensional subspaces of F_q^n as reduced row echelon bases."""
    out = []
    for pivots in itertools.combinations(range(n), k):
        free = [(i, j) for i, pv in enumerate(pivots) for j in range(pv + 1, n) if j not in pivots]
        for values in itertools.product(range(q), repeat=len(free)):
            rows = [[0] * n for _ in range(k)]
            for i, pv in enumerate(pivots):
                rows[i][pv] = 1
            for (i, j), v in zip(free, values):
                rows[i][j] = v
            out.append(tuple(tuple(r) for r in rows))
    return out


@lru_cache(maxsize=None)
def all_flags(n: int, q: int) -> tuple[Flag, ...]:
    """Every complete flag of F_q^n, each subspace as its reduced row basis."""
    _check_envelope(n, q)
    levels = [subspaces(n, q, k) for k in range(1, n + 1)]
    flags = [(sub,) for sub in levels[0]]
    for k in range(1, n):
        ann = {big: _annihilator(big, n, q) for big in levels[k]}
        flags = [
            fl + (big,)
            for fl in flags
            for big in levels[k]
            if not (ann[big] @ np.array(fl[-1], dtype=np.int64).T % q).any()
        ]
    return tuple(flags)


def _annihilator(sub, n: int, q: int) -> np.ndarray:
    ker = kernel([list(r) for r in sub], q, n)
    return np.array(ker, dtype=np.int64).reshape(len(ker), n)


@lru_cache(maxsize=None)
def _annihilators(n: int, q: int) -> dict:
    """For each subspace occurring in a flag, rows u with u . w = 0 exactly on it."""
    out = {}
    for fl in all_flags(n, q):
        for sub in fl:
            if sub not in out:
                out[sub] = _annihilator(sub, n, q)
    return out


def stable_flags_gl(x, q: int) -> list[Flag]:
    """Complete flags V with x V_i contained in V_i for every i."""
    X = np.array(x, dtype=np.int64) % q
    n = X.shape[0]
    ann = _annihilators(n, q)
    stable = {
        sub: not (ann[sub] @ X @ np.array(sub, dtype=np.int64).T % q).any() for sub in ann
    }
    return [fl for fl in all_flags(n, q) if all(stable[sub] for sub in fl)]


def split_eigenvalues(x, q: int) -> list[int] | None:
    """Eigenvalues with multiplicity when the characteristic polynomial splits over F_q."""
    n = len(x)
    c = invariant_map_gl(n, x, q)
    # coefficients of det(t - x), highest first
    poly = [1] + [(-1) ** (i + 1) * v % q for i, v in enumerate(c)]
    roots = []
    for a in range(q):
        while len(poly) > 1 and _eval(poly, a, q) == 0:
            poly = _deflate(poly, a, q)
            roots.append(a)
    return sorted(roots) if len(roots) == n else None


def _eval(poly, a, q):
    v = 0
    for c in poly:
        v = (v * a + c) % q
    return v


def _deflate(poly, a, q):
    out = [poly[0]]
    for c in poly[1:-1]:
        out.append((c + a * out[-1]) % q)
    return out


def orderings(values) -> int:
    counts = Counter(values)
    return factorial(len(values)) // prod(factorial(m) for m in counts.values())


@lru_cache(maxsize=None)
def _symmetric_values(n: int, q: int) -> Counter:
    return Counter(elementary_symmetric(h, q) for h in itertools.product(range(q), repeat=n))


def torus_fiber(n: int, q: int, c) -> int:
    """Number of h in F_q^n whose elementary symmetric values equal c."""
    return _symmetric_values(n, q)[tuple(c)]


def _is_regular(model: FieldModel, x) -> bool:
    alg = model.alg
    return len(centralizer(model, from_matrix(alg, x))) == alg.rank


def groth_fiber_audit(n: int, q: int, n_samples: int = 50, seed: int = 0) -> list[CheckResult]:
    """Point-count identity |stable flags| = |t-fiber| for split regular x."""
    _check_envelope(n, q)
    alg = build_chevalley_algebra(f"GL({n})")
    model = FieldModel(alg, q)
    spec = alg.datum.spec
    rng = random.Random(seed)
    found = discarded_split = discarded_regular = 0
    bad = []
    attempts = 0
    while found < n_samples and attempts < MAX_ATTEMPTS:
        attempts += 1
        x = [[rng.randrange(q) for _ in range(n)] for _ in range(n)]
        if not _is_regular(model, x):
            discarded_regular += 1
            continue
        eig = split_eigenvalues(x, q)
        if eig is None:
            discarded_split += 1
            continue
        found += 1
        row = _compare(x, eig, q)
        if row:
            bad.append(row)
    claim = "F_q-points: x-stable complete flags match the t-fiber over chi(x)"
    results = [CheckResult(
        "groth-fiber-count", spec, q,
        FAIL if bad or found < n_samples else PASS,
        claim,
        {"samples": found, "requested": n_samples, "seed": seed,
         "discarded_nonsplit": discarded_split, "discarded_nonregular": discarded_regular,
         "caveat": "counts rational points only"},
        {"points": bad[:5]} if bad else None,
    )]

    # every slice point is regular; compare on the split ones
    sl = integral_complement(alg)
    bad = []
    split = 0
    for coords in itertools.product(range(q), repeat=sl.dim):
        pt = [v % q for v in sl.point(coords)]
        x = to_matrix(alg, pt)
        eig = split_eigenvalues(x, q)
        if eig is None:
            continue
        split += 1
        row = _compare(x, eig, q)
        if row:
            bad.append(row)
    results.append(CheckResult(
        "groth-slice-fiber", spec, q, FAIL if bad else PASS,
        "on split slice points the flag count is the number of eigenvalue orderings",
        {"slice_points": q ** sl.dim, "split": split},
        {"points": bad[:5]} if bad else None,
    ))

    e = [[int(j == i + 1) for j in range(n)] for i in range(n)]
    flags = stable_flags_gl(e, q)
    standard = tuple(
        tuple(tuple(int(j == k) for j in range(n)) for k in range(i + 1)) for i in range(n)
    )
    ok = flags == [standard]
    results.append(CheckResult(
        "groth-nilpotent-flag", spec, q, PASS if ok else FAIL,
        "the regular nilpotent e stabilizes only the standard flag",
        {"flags": len(flags)},
        None if ok else {"flags": [list(map(list, f)) for f in flags[:5]]},
    ))
    return results


def _compare(x, eig, q):
    flags = len(stable_flags_gl(x, q))
    n = len(x)
    fib = torus_fiber(n, q, invariant_map_gl(n, x, q))
    orders = orderings(eig)
    if flags == fib == orders:
        return None
    return {"x": [list(r) for r in x], "flags": flags, "t_fiber": fib, "orderings": orders}

"""The integral Kostant slice S = e + s and its regularity audits."""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass

import numpy as np
from sympy import primefactors

from .chevalley import ChevalleyAlgebra, principal_nilpotent, springer_map, springer_torsion_report
from .errors import ConditionViolation
from .linalg import Field, IntMatrix, det_mod, int_det, integral_basis_complement, kernel, rank
from .linalg import smith_normal_form
from .report import CheckResult, FAIL, NOT_APPLICABLE, PASS
from .roots import RootDatum, all_degrees, condition_check

# integer range used when sampling slice points in characteristic 0
RATIONAL_SAMPLE_RANGE = range(-7, 8)


@dataclass(frozen=True)
class Slice:
    spec: str
    e: tuple[int, ...]
    complement: tuple[int, ...]  # basis indices spanning s
    weights: tuple[int, ...]
    n_inverted: int

    @property
    def dim(self) -> int:
        return len(self.complement)

    def point(self, coords) -> list:
        """e + sum coords[j] * b_{complement[j]}."""
        x = list(self.e)
        for b, c in zip(self.complement, coords):
            x[b] = x[b] + c
        return x


class FieldModel:
    """A Chevalley algebra base-changed to the prime field (or Q when p = 0)."""

    def __init__(self, alg: ChevalleyAlgebra, p: int):
        self.alg = alg
        self.p = p
        self.field = Field(p)

    def __repr__(self):
        return f"FieldModel({self.alg.datum.spec}, p={self.p})"

    def ad(self, x) -> np.ndarray:
        return self.alg.ad([self.field(v) for v in x] if self.p == 0 else x, self.p)

    def bracket(self, x, y) -> list:
        out = self.alg.bracket(x, y, self.p)
        return [self.field(v) for v in out]

    def sample_coords(self, rng: random.Random, n: int) -> list:
        if self.p == 0:
            return [rng.choice(RATIONAL_SAMPLE_RANGE) for _ in range(n)]
        return [rng.randrange(self.p) for _ in range(n)]


def integral_complement(alg: ChevalleyAlgebra) -> Slice:
    """Graded complement s of [e, n] in b, free over Z[1/N]."""
    report = springer_torsion_report(alg)
    n_inv = report.derived_n
    e, _ = principal_nilpotent(alg)
    chosen = []
    for i in range(alg.min_degree, 1):
        block = alg.degree_block(i)
        if not block:
            continue
        gens = []
        if alg.degree_block(i - 1):
            M = springer_map(alg, i - 1)
            gens = [list(col) for col in M.T.to_rows()]
        local = integral_basis_complement(gens, len(block), n_inv)
        chosen.extend(block[k] for k in local)
    chosen.sort()
    weights = tuple(2 * alg.degrees[b] - 2 for b in chosen)
    sl = Slice(alg.datum.spec, tuple(e), tuple(chosen), weights, n_inv)
    if sl.dim != alg.rank:
        raise AssertionError(f"complement has {sl.dim} vectors, rank is {alg.rank}")
    return sl


def direct_sum_certificate(alg: ChevalleyAlgebra, sl: Slice) -> tuple[int, ...]:
    """Elementary divisors of the basis s + [e, n] of b (all units over Z[1/N])."""
    b_idx = [b for b in range(alg.dim) if alg.degrees[b] <= 0]
    pos = {b: k for k, b in enumerate(b_idx)}
    e = list(sl.e)
    cols = []
    for y in (b for b in range(alg.dim) if alg.degrees[b] < 0):
        img = alg.bracket(e, alg.basis_vector(y))
        cols.append([img[b] for b in b_idx])
    for b in sl.complement:
        v = [0] * len(b_idx)
        v[pos[b]] = 1
        cols.append(v)
    return smith_normal_form(IntMatrix.from_rows(cols, len(b_idx))).nonzero


def slice_weight_check(sl: Slice, rd: RootDatum) -> CheckResult:
    expected = sorted(-2 * d for d in all_degrees(rd))
    got = sorted(sl.weights)
    ok = Counter(got) == Counter(expected)
    return CheckResult(
        "slice-weights",
        rd.spec,
        None,
        PASS if ok else FAIL,
        "Gm-weights of s equal -2 times the invariant degrees",
        {"weights": got, "expected": expected},
        None if ok else {"weights": got, "expected": expected},
    )


def centralizer(model: FieldModel, x) -> list[list]:
    """Basis of g_x = ker ad(x) over the model's field."""
    return kernel(model.ad(x), model.p)


def _psi_matrix(alg: ChevalleyAlgebra, sl: Slice, x, p: int = 0) -> list[list]:
    """Matrix of (y, v) -> [y, x] + v from n + s to b, rows indexed by b."""
    b_idx = [b for b in range(alg.dim) if alg.degrees[b] <= 0]
    n_idx = [b for b in range(alg.dim) if alg.degrees[b] < 0]
    ad_x = alg.ad(x, p)
    if any(ad_x[r, c] for r in range(alg.dim) if alg.degrees[r] > 0 for c in n_idx):
        raise AssertionError("[n, x] leaves b")
    cols = [[-ad_x[b, y] for b in b_idx] for y in n_idx]
    cols += [[int(b == s) for b in b_idx] for s in sl.complement]
    return [[col[k] for col in cols] for k in range(len(b_idx))]


def psi_differential_det(alg: ChevalleyAlgebra, sl: Slice) -> int:
    """Integer determinant of the differential (n, s) -> [n, e] + s at (1, e)."""
    M = _psi_matrix(alg, sl, list(sl.e))
    return int_det(IntMatrix.from_rows([[int(v) for v in row] for row in M], len(M)))


@dataclass
class PointAudit:
    coords: list
    centralizer_dim: int
    direct_sum: bool
    differential: bool

    def ok(self, r: int) -> bool:
        return self.centralizer_dim == r and self.direct_sum and self.differential


def audit_point(model: FieldModel, sl: Slice, coords) -> PointAudit:
    alg, p = model.alg, model.p
    x = sl.point(coords)
    dim = alg.dim
    A = model.ad(x)
    r_ad = rank(A, p)
    cdim = dim - r_ad
    # g = s + [x, g]: the columns of ad(x) together with s span g, and the count is right
    S = np.zeros((dim, sl.dim), dtype=A.dtype)
    for j, b in enumerate(sl.complement):
        S[b, j] = 1
    joint = rank(np.hstack([S, A]), p)
    direct = joint == dim and r_ad + sl.dim == dim
    M = _psi_matrix(alg, sl, x, p)
    diff = det_mod(M, p) != 0
    return PointAudit(list(coords), cdim, direct, diff)


def regularity_audit(
    model: FieldModel, sl: Slice, n_samples: int = 100, seed: int = 0, strict: bool = False
) -> list[CheckResult]:
    """Regularity, direct-sum and differential checks on seeded slice points."""
    alg, p = model.alg, model.p
    rd = alg.datum
    prof = condition_check(rd, p)
    applicable = prof.c3
    reason = None
    if not applicable:
        reason = f"(C3) fails at p={p} for {rd.spec}"
        if strict:
            raise ConditionViolation(reason)
    rng = random.Random(seed)
    r = alg.rank
    points = [[0] * sl.dim] + [model.sample_coords(rng, sl.dim) for _ in range(n_samples)]
    bad = {"centralizer_dim": [], "direct_sum": [], "differential": []}
    for coords in points:
        res = audit_point(model, sl, coords)
        if res.centralizer_dim != r:
            bad["centralizer_dim"].append({"coords": coords, "dim": res.centralizer_dim})
        if not res.direct_sum:
            bad["direct_sum"].append({"coords": coords})
        if not res.differential:
            bad["differential"].append({"coords": coords})
    det_e = psi_differential_det(alg, sl)
    det_primes = set(primefactors(abs(det_e))) if det_e else {0}
    det_ok = det_e != 0 and det_primes <= set(rd.not_very_good_primes())

    def result(check, statement, failures, extra=None):
        ok = not failures
        details = {"samples": n_samples, "seed": seed, "e_included": True, "failures": len(failures)}
        if extra:
            details.update(extra)
        if not applicable:
            details["reason"] = reason
            details["observed"] = "pass" if ok else "fail"
            status = NOT_APPLICABLE
        else:
            status = PASS if ok else FAIL
        witness = {"points": failures[:5]} if failures else None
        return CheckResult(check, rd.spec, p, status, statement, details, witness)

    return [
        result("regular-centralizer-dim", "dim g_x = rank for x in the slice", bad["centralizer_dim"],
               {"rank": r}),
        result("slice-direct-sum", "g = s + [x, g] is a direct sum for x in the slice", bad["direct_sum"]),
        result("slice-differential", "(y, v) -> [y, x] + v is a bijection n + s -> b", bad["differential"]),
        result(
            "slice-differential-integral",
            "integral differential at e is invertible away from the non-very-good primes",
            [] if det_ok else [{"det": det_e}],
            {"det": det_e},
        ),
    ]

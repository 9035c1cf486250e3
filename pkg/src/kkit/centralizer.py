"""Fiberwise checks on centralizers g_x: cotangent pairing, kappa-annihilator, regular semisimple."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import numpy as np

from .errors import ConditionViolation
from .kostant import FieldModel, Slice, centralizer
from .linalg import det_mod, rank
from .quotient import KappaForm
from .report import CheckResult, FAIL, NOT_APPLICABLE, PASS
from .roots import RootDatum, condition_check, weyl_elements


@dataclass
class CotangentCertificate:
    point: list
    matrix: list[list]
    det: object

    @property
    def ok(self) -> bool:
        return bool(self.matrix) and len(self.matrix) == len(self.matrix[0]) and self.det != 0


def _integral(v) -> list[int]:
    """A rational vector scaled to integers (same span, same vanishing pattern)."""
    den = 1
    for c in v:
        den = lcm(den, Fraction(c).denominator)
    return [int(Fraction(c) * den) for c in v]


def _as_int(A: np.ndarray) -> np.ndarray:
    if A.dtype == object:
        return np.vectorize(lambda c: int(Fraction(c)), otypes=[object])(A)
    return A.astype(object)


def _kappa_rows(model: FieldModel, kappa: KappaForm, vectors) -> np.ndarray:
    """kappa(v, -) for each v, as rows over the model's field (rescaled to integers when p = 0)."""
    p = model.p
    F = model.field
    G = kappa.array(p).astype(object)
    if p:
        V = [[F(c) for c in v] for v in vectors]
    else:
        V = [_integral(v) for v in vectors]
    out = np.array(V, dtype=object).reshape(len(vectors), model.alg.dim).dot(G)
    return out % p if p else out


def cotangent_iso_check(model: FieldModel, sl: Slice, kappa: KappaForm, x) -> CotangentCertificate:
    """Matrix of g_x -> g -> g* -> s* and its determinant."""
    if not kappa.nondegenerate_at(model.p):
        raise ConditionViolation(f"kappa is degenerate at p={model.p} (Gram determinant {kappa.det})")
    Y = centralizer(model, x)
    if not Y:
        return CotangentCertificate(list(x), [], 0)
    rows = _kappa_rows(model, kappa, Y)
    P = [[rows[i, b] for b in sl.complement] for i in range(len(Y))]
    det = det_mod(P, model.p) if len(P) == len(sl.complement) else 0
    return CotangentCertificate(list(x), P, det)


def kappa_annihilator_check(model: FieldModel, kappa: KappaForm, x) -> bool:
    """kappa(g_x, [x, g]) = 0 and kappa(g_x) has the dimension of (g/[x, g])*."""
    p = model.p
    A = model.ad(x)
    Y = centralizer(model, x)
    r_ad = rank(A, p)
    if len(Y) != model.alg.dim - r_ad:
        return False
    if not Y:
        return True
    rows = _kappa_rows(model, kappa, Y)
    pairing = rows.dot(_as_int(A))
    if p:
        pairing = pairing % p
    if pairing.any():
        return False
    if kappa.nondegenerate_at(p):
        return rank(rows, p) == len(Y)
    return True


def centralizer_audit(
    model: FieldModel, sl: Slice, kappa: KappaForm, n_samples: int = 100, seed: int = 0
) -> list[CheckResult]:
    """Cotangent certificate and kappa-annihilator identity on seeded slice points."""
    alg, p = model.alg, model.p
    rd = alg.datum
    prof = condition_check(rd, p, kappa.det)
    rng = random.Random(seed)
    points = [[0] * sl.dim] + [model.sample_coords(rng, sl.dim) for _ in range(n_samples)]
    details = {"samples": n_samples, "seed": seed, "e_included": True}
    out = []
    if not prof.c4:
        out.append(CheckResult(
            "cotangent-iso", rd.spec, p, NOT_APPLICABLE,
            "g_x -> s* induced by kappa is an isomorphism on the slice",
            dict(details, reason=f"(C4) fails at p={p} for {rd.spec}"),
        ))
    else:
        bad = []
        for coords in points:
            cert = cotangent_iso_check(model, sl, kappa, sl.point(coords))
            if not cert.ok:
                bad.append({"coords": coords, "det": cert.det})
        out.append(CheckResult(
            "cotangent-iso", rd.spec, p, FAIL if bad else PASS,
            "g_x -> s* induced by kappa is an isomorphism on the slice",
            dict(details, failures=len(bad)),
            {"points": bad[:5]} if bad else None,
        ))
    bad = [coords for coords in points if not kappa_annihilator_check(model, kappa, sl.point(coords))]
    status = FAIL if bad else PASS
    extra = {}
    if not prof.c4:
        status = NOT_APPLICABLE
        extra = {"reason": f"(C4) fails at p={p} for {rd.spec}", "observed": "fail" if bad else "pass"}
    out.append(CheckResult(
        "kappa-annihilator", rd.spec, p, status,
        "kappa(g_x) annihilates [x, g] with matching dimension",
        dict(details, failures=len(bad), **extra),
        {"points": bad[:5]} if bad else None,
    ))
    return out


def rs_audit(model: FieldModel, rd: RootDatum, n_samples: int = 200, seed: int = 0) -> CheckResult:
    """On sampled regular semisimple x in t: g_x = t and the W-stabilizer of x is trivial."""
    alg, p = model.alg, model.p
    W = weyl_elements(rd)
    prof = condition_check(rd, p)
    if not prof.c1:
        # some dalpha vanishes identically, so t_rs is empty
        return CheckResult(
            "regular-semisimple", rd.spec, p, NOT_APPLICABLE,
            "for x in t_rs: g_x = t and W acts freely",
            {"samples": 0, "seed": seed, "members": 0, "reason": f"(C1) fails at p={p} for {rd.spec}"},
        )
    F = model.field
    rng = random.Random(seed)
    members = 0
    bad = []
    for _ in range(n_samples):
        h = model.sample_coords(rng, rd.rank)
        if not all(F(rd.pair(a, h)) != 0 for a in rd.roots):
            continue
        members += 1
        x = [0] * alg.dim
        for k, b in enumerate(alg.h_basis):
            x[b] = h[k]
        Y = centralizer(model, x)
        torus = len(Y) == rd.rank and all(
            all(v[b] == 0 for b in range(alg.dim) if alg.labels[b][0] == "e") for v in Y
        )
        hv = [F(v) for v in h]
        fixed = [
            w for w in W[1:]
            if all(F(sum(w[i][j] * h[j] for j in range(rd.rank))) == hv[i] for i in range(rd.rank))
        ]
        if not torus or fixed:
            bad.append({"h": h, "centralizer_is_t": torus, "fixed_by": len(fixed)})
    return CheckResult(
        "regular-semisimple",
        rd.spec,
        p,
        FAIL if bad else PASS,
        "for x in t_rs: g_x = t and W acts freely",
        {"samples": n_samples, "seed": seed, "members": members, "weyl_order": len(W)},
        {"points": bad[:5]} if bad else None,
    )

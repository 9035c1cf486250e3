import random
from collections import Counter

import pytest
from sympy import primefactors

from kkit.chevalley import build_chevalley_algebra, from_matrix, to_matrix
from kkit.errors import ConditionViolation
from kkit.kostant import (
    FieldModel,
    audit_point,
    centralizer,
    direct_sum_certificate,
    integral_complement,
    psi_differential_det,
    regularity_audit,
    slice_weight_check,
)
from kkit.linalg import Field, rank
from kkit.report import FAIL, NOT_APPLICABLE, PASS
from kkit.roots import all_degrees

SPECS = ["SC(A1)", "SC(A2)", "SC(A3)", "SC(B2)", "SC(B3)", "SC(C3)", "SC(D4)", "SC(G2)", "SC(F4)",
         "GL(1)", "GL(2)", "GL(3)", "GL(4)", "SC(A1)*GL(2)"]


def test_gl2_complement():
    alg = build_chevalley_algebra("GL(2)")
    sl = integral_complement(alg)
    mats = sorted(to_matrix(alg, alg.basis_vector(b)) for b in sl.complement)
    assert mats == sorted([[[0, 0], [1, 0]], [[1, 0], [0, 0]]])
    assert sl.n_inverted == 1
    assert to_matrix(alg, list(sl.e)) == [[0, 1], [0, 0]]


def test_sl2_complement():
    alg = build_chevalley_algebra("SC(A1)")
    sl = integral_complement(alg)
    assert sl.complement == (alg.root_basis[1],)
    assert sl.n_inverted == 2
    assert sl.weights == (-4,)


def test_gl3_complement_size():
    sl = integral_complement(build_chevalley_algebra("GL(3)"))
    assert sl.dim == 3
    assert sorted(sl.weights) == [-6, -4, -2]


def test_complement_is_deterministic():
    a = integral_complement(build_chevalley_algebra("SC(B3)"))
    b = integral_complement(build_chevalley_algebra("SC(B3)"))
    assert a.complement == b.complement


@pytest.mark.parametrize("spec", SPECS)
def test_slice_weights(spec):
    alg = build_chevalley_algebra(spec)
    sl = integral_complement(alg)
    res = slice_weight_check(sl, alg.datum)
    assert res.status == PASS
    assert Counter(sl.weights) == Counter(-2 * d for d in all_degrees(alg.datum))


def test_g2_weights():
    sl = integral_complement(build_chevalley_algebra("SC(G2)"))
    assert sorted(sl.weights) == [-12, -4]


def test_weight_check_detects_mismatch():
    alg = build_chevalley_algebra("SC(G2)")
    sl = integral_complement(build_chevalley_algebra("SC(A2)"))
    assert slice_weight_check(sl, alg.datum).status == FAIL


@pytest.mark.parametrize("spec", SPECS)
def test_direct_sum_certificate_units(spec):
    alg = build_chevalley_algebra(spec)
    sl = integral_complement(alg)
    divisors = direct_sum_certificate(alg, sl)
    n_idx = sum(1 for d in alg.degrees if d <= 0)
    assert len(divisors) == n_idx
    # every elementary divisor is a unit once N is inverted
    for d in divisors:
        assert set(primefactors(d)) <= set(primefactors(sl.n_inverted))


def test_centralizer_examples():
    alg = build_chevalley_algebra("SC(A1)")
    m = FieldModel(alg, 5)
    e = [0] * 3
    e[alg.root_basis[0]] = 1
    assert centralizer(m, e) == [e]
    assert len(centralizer(m, [0, 0, 0])) == 3


@pytest.mark.parametrize("p", [0, 3, 7])
def test_gl2_companion_centralizer(p):
    alg = build_chevalley_algebra("GL(2)")
    m = FieldModel(alg, p)
    F = Field(p)
    rng = random.Random(p)
    for _ in range(10):
        a, b = rng.randrange(7), rng.randrange(7)
        x = from_matrix(alg, [[a, 1], [b, 0]])
        Y = centralizer(m, x)
        assert len(Y) == 2
        ident = from_matrix(alg, [[1, 0], [0, 1]])
        # span{I, x} equals the kernel
        span = [[F(v) for v in ident], [F(v) for v in x]]
        assert rank(Y + span, p) == 2


def test_e_is_regular():
    for spec in SPECS:
        alg = build_chevalley_algebra(spec)
        sl = integral_complement(alg)
        res = audit_point(FieldModel(alg, 0), sl, [0] * sl.dim)
        assert res.ok(alg.rank)


PSI_DETS = {"SC(A1)": 1, "SC(B2)": 1, "SC(G2)": 6, "SC(C3)": 4, "SC(D4)": 2, "SC(F4)": 12, "GL(3)": 1}


@pytest.mark.parametrize("spec,mag", sorted(PSI_DETS.items()))
def test_psi_determinant_primes(spec, mag):
    alg = build_chevalley_algebra(spec)
    d = psi_differential_det(alg, integral_complement(alg))
    assert abs(d) == mag
    assert set(primefactors(abs(d))) <= alg.datum.not_very_good_primes()


@pytest.mark.parametrize("spec,p", [("SC(A2)", 5), ("SC(B2)", 3), ("SC(G2)", 7), ("GL(3)", 2), ("SC(A3)", 0)])
def test_regularity_audit_passes(spec, p):
    alg = build_chevalley_algebra(spec)
    res = regularity_audit(FieldModel(alg, p), integral_complement(alg), n_samples=30, seed=3)
    assert [r.status for r in res] == [PASS] * 4
    assert all(r.details["e_included"] for r in res)


def test_regularity_audit_not_applicable_at_bad_prime():
    alg = build_chevalley_algebra("SC(A1)")
    sl = integral_complement(alg)
    res = regularity_audit(FieldModel(alg, 2), sl, n_samples=10)
    assert all(r.status == NOT_APPLICABLE for r in res)
    assert all("(C3) fails at p=2" in r.details["reason"] for r in res)
    with pytest.raises(ConditionViolation):
        regularity_audit(FieldModel(alg, 2), sl, n_samples=10, strict=True)


def test_a2_at_3_is_not_applicable():
    alg = build_chevalley_algebra("SC(A2)")
    res = regularity_audit(FieldModel(alg, 3), integral_complement(alg), n_samples=10)
    assert {r.status for r in res} == {NOT_APPLICABLE}

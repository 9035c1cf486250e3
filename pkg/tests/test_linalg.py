from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kkit.errors import NoIntegralComplement
from kkit.linalg import (
    Field,
    IntMatrix,
    det_mod,
    int_det,
    int_rank,
    integral_basis_complement,
    kernel,
    prime_torsion,
    rank,
    rational_matmul,
    smith_normal_form,
    torsion_primes,
    unimodular_inverse,
)

A2_CARTAN = [[2, -1], [-1, 2]]


def test_snf_small_examples():
    assert smith_normal_form(IntMatrix.diagonal([2, 3])).divisors == (1, 6)
    assert smith_normal_form(IntMatrix.identity(3)).divisors == (1, 1, 1)
    assert smith_normal_form(A2_CARTAN).divisors == (1, 3)


def test_snf_pads_zero_divisors():
    snf = smith_normal_form([[1, 2], [2, 4]])
    assert snf.divisors == (1, 0)
    assert snf.nonzero == (1,)


def test_snf_rectangular():
    # coroot inclusion for GL(2): one column (1, -1)
    snf = smith_normal_form([[1], [-1]])
    assert snf.divisors == (1,)


def test_prime_torsion_examples():
    assert prime_torsion(IntMatrix.diagonal([2, 3]), 2) == 1
    assert prime_torsion(IntMatrix.identity(4), 7) == 0
    assert prime_torsion(A2_CARTAN, 3) == 1
    assert prime_torsion(A2_CARTAN, 2) == 0
    assert torsion_primes(IntMatrix.diagonal([4, 6, 35])) == {2, 3, 5, 7}


def test_kernel_examples():
    assert len(kernel([[0, 0], [0, 0]], 5)) == 2
    assert kernel(IntMatrix.identity(3), 5) == []
    # ad(e) on sl_2 in the basis (f, h, e): f -> h, h -> -2e, e -> 0
    ad_e = [[0, 0, 0], [1, 0, 0], [0, -2, 0]]
    ker = kernel(ad_e, 5)
    assert ker == [[0, 0, 1]]


def test_kernel_over_rationals():
    ker = kernel([[1, 2, 3]], 0)
    assert len(ker) == 2
    for v in ker:
        assert all(isinstance(c, Fraction) for c in v)
        assert v[0] + 2 * v[1] + 3 * v[2] == 0


def test_complement_examples():
    assert integral_basis_complement([[1, -1]], 2) == (0,)
    assert integral_basis_complement([[1, 1]], 2) == (0,)
    # E_11 + E_22 does not complete Z (E_11 - E_22) over Z, only E_11 (or E_22) does
    gens = [[1, -1]]
    chosen = integral_basis_complement(gens, 2)
    rows = gens + [[int(i == j) for j in range(2)] for i in chosen]
    assert abs(int_det(rows)) == 1
    assert abs(int_det([[1, -1], [1, 1]])) == 2


def test_complement_rejects_non_summand():
    with pytest.raises(NoIntegralComplement):
        integral_basis_complement([[2, 0]], 2)
    # but 2 is a unit once it is inverted
    assert integral_basis_complement([[2, 0]], 2, n_inverted=2) == (1,)


def test_complement_empty_sublattice():
    assert integral_basis_complement([], 3) == (0, 1, 2)


def test_field_arithmetic():
    F = Field(7)
    assert F(10) == 3
    assert F(Fraction(1, 2)) == 4
    assert F.inv(3) == 5
    assert Field(0)(3) == Fraction(3)
    with pytest.raises(ValueError):
        Field(6)


def test_det_mod_and_int_det():
    M = [[2, -1, 0], [-1, 2, -1], [0, -1, 2]]
    assert int_det(M) == 4
    assert det_mod(M, 2) == 0
    assert det_mod(M, 3) == 1
    assert det_mod(M, 0) == 4


def test_det_mod_large_prime_no_overflow():
    p = 2_147_483_629  # just below 2^31
    M = [[p - 1, p - 2], [p - 3, p - 5]]
    assert det_mod(M, p) == ((p - 1) * (p - 5) - (p - 2) * (p - 3)) % p


small_ints = st.integers(min_value=-6, max_value=6)


@st.composite
def int_matrices(draw, max_dim=5):
    r = draw(st.integers(1, max_dim))
    c = draw(st.integers(1, max_dim))
    return [draw(st.lists(small_ints, min_size=c, max_size=c)) for _ in range(r)]


@settings(max_examples=80, deadline=None)
@given(int_matrices())
def test_snf_reconstruction(rows):
    M = IntMatrix.from_rows(rows)
    snf = smith_normal_form(M)
    assert (snf.left @ M @ snf.right).to_rows() == snf.diagonal().to_rows()
    nz = snf.nonzero
    assert all(d > 0 for d in nz)
    assert all(nz[i + 1] % nz[i] == 0 for i in range(len(nz) - 1))
    Linv, Rinv = unimodular_inverse(snf.left), unimodular_inverse(snf.right)
    assert (Linv @ snf.diagonal() @ Rinv).to_rows() == M.to_rows()


@settings(max_examples=80, deadline=None)
@given(int_matrices(), st.sampled_from([2, 3, 5, 7]))
def test_prime_torsion_is_rank_drop(rows, p):
    assert prime_torsion(rows, p) == int_rank(rows) - rank(rows, p)
    assert int_rank(rows) == rank(rows, 0)


@settings(max_examples=80, deadline=None)
@given(int_matrices(), st.sampled_from([0, 2, 3, 5, 31]))
def test_kernel_plus_rank(rows, p):
    F = Field(p)
    ker = kernel(rows, p)
    assert len(ker) + rank(rows, p) == len(rows[0])
    for v in ker:
        for row in rows:
            assert F(sum(F(a) * b for a, b in zip(row, v))) == 0


@settings(max_examples=50, deadline=None)
@given(int_matrices(), st.integers(1, 6))
def test_rational_matmul_matches_fraction_product(rows, den):
    A = np.array([[Fraction(x, den) for x in row] for row in rows], dtype=object)
    B = A.T * Fraction(1, den + 1) + 1
    assert rational_matmul(A, B).tolist() == A.dot(B).tolist()
    assert rational_matmul(B, A).tolist() == B.dot(A).tolist()

import random
from fractions import Fraction

import numpy as np
import pytest

from kkit.chevalley import (
    build_chevalley_algebra,
    divided_power_exp,
    from_matrix,
    principal_nilpotent,
    springer_injective_mod,
    springer_map,
    springer_surjective_mod,
    springer_torsion_report,
    to_matrix,
    validate_algebra,
)
from kkit.errors import EmptyDegree

SPECS = ["SC(A1)", "SC(A2)", "SC(A3)", "SC(B2)", "SC(B3)", "SC(C3)", "SC(D4)", "SC(G2)", "SC(F4)",
         "GL(2)", "GL(3)", "SC(A1)*GL(2)"]

# N is the product of the primes that are not very good; these are the standard tables
VERY_GOOD_N = {"SC(A1)": 2, "SC(A2)": 3, "SC(A3)": 2, "SC(A4)": 5, "SC(B2)": 2, "SC(B3)": 2, "SC(C3)": 2,
               "SC(D4)": 2, "SC(G2)": 6, "SC(F4)": 6, "GL(2)": 1, "GL(3)": 1, "GL(4)": 1}


def sl2():
    alg = build_chevalley_algebra("SC(A1)")
    e = alg.basis_vector(alg.root_basis[0])
    f = alg.basis_vector(alg.root_basis[1])
    h = alg.basis_vector(alg.h_basis[0])
    return alg, e, h, f


def test_sl2_relations():
    alg, e, h, f = sl2()
    assert alg.bracket(h, e) == [2 * v for v in e]
    assert alg.bracket(h, f) == [-2 * v for v in f]
    assert alg.bracket(e, f) == h
    assert alg.degrees == (-1, 0, 1)


def test_gl2_bracket_is_commutator():
    alg = build_chevalley_algebra("GL(2)")
    E12 = from_matrix(alg, [[0, 1], [0, 0]])
    E21 = from_matrix(alg, [[0, 0], [1, 0]])
    assert to_matrix(alg, alg.bracket(E12, E21)) == [[1, 0], [0, -1]]


@pytest.mark.parametrize("n", [2, 3, 4])
def test_gl_bracket_matches_matrices(n):
    alg = build_chevalley_algebra(f"GL({n})")
    rng = random.Random(n)
    for _ in range(20):
        X = np.array([[rng.randrange(-5, 6) for _ in range(n)] for _ in range(n)])
        Y = np.array([[rng.randrange(-5, 6) for _ in range(n)] for _ in range(n)])
        got = alg.bracket(from_matrix(alg, X.tolist()), from_matrix(alg, Y.tolist()))
        assert to_matrix(alg, got) == (X @ Y - Y @ X).tolist()


@pytest.mark.parametrize("spec", SPECS)
def test_structure_constants(spec):
    alg = build_chevalley_algebra(spec)
    rd = alg.datum
    validate_algebra(alg)
    # |N_{a,b}| = p + 1 where b - p a is the start of the a-string through b
    for a in range(len(rd.roots)):
        for b in range(len(rd.roots)):
            s = tuple(x + y for x, y in zip(rd.roots[a], rd.roots[b]))
            got = alg.bracket_basis(alg.root_basis[a], alg.root_basis[b])
            if s in rd.index:
                p = 0
                while tuple(y - (p + 1) * x for x, y in zip(rd.roots[a], rd.roots[b])) in rd.index:
                    p += 1
                ((k, c),) = got
                assert k == alg.root_basis[rd.root_index(s)]
                assert abs(c) == p + 1
            elif any(s):
                assert got == ()


def test_g2_constants_bounded():
    alg = build_chevalley_algebra("SC(G2)")
    I, J, K, C = alg.triples
    roots = set(alg.root_basis)
    vals = {abs(c) for i, j, k, c in zip(I, J, K, C) if i in roots and j in roots and k in roots}
    assert vals <= {1, 2, 3}
    assert 3 in vals


@pytest.mark.parametrize("spec", SPECS)
def test_principal_nilpotent(spec):
    alg = build_chevalley_algebra(spec)
    e, negs = principal_nilpotent(alg)
    assert all(alg.degrees[b] == 1 for b, v in enumerate(e) if v)
    assert sum(e) == alg.datum.ss_rank
    assert len(negs) == alg.datum.ss_rank


def test_springer_map_sl2():
    alg = build_chevalley_algebra("SC(A1)")
    assert springer_map(alg, -1).to_rows() == [[1]]
    assert springer_map(alg, 0).to_rows() == [[-2]]
    top = springer_map(alg, 1)
    assert (top.rows, top.cols) == (0, 1)
    with pytest.raises(EmptyDegree):
        springer_map(alg, 2)


def test_springer_map_gl1():
    with pytest.raises(EmptyDegree):
        springer_map(build_chevalley_algebra("GL(1)"), -1)


def test_torsion_report_sl2():
    rep = springer_torsion_report(build_chevalley_algebra("SC(A1)"))
    assert rep.lattice_torsion == {2}
    assert rep.other_torsion == set()
    assert rep.derived_n == 2


def test_torsion_report_g2():
    rep = springer_torsion_report(build_chevalley_algebra("SC(G2)"))
    by_degree = {d.degree: d.torsion for d in rep.degrees}
    assert by_degree[-1] == set()
    assert by_degree[0] == set()
    assert rep.other_torsion == {2, 3}
    assert rep.localized


@pytest.mark.parametrize("spec,n", sorted(VERY_GOOD_N.items()))
def test_derived_n_is_very_good_product(spec, n):
    rep = springer_torsion_report(build_chevalley_algebra(spec))
    assert rep.derived_n == n
    assert rep.n_matches
    assert rep.localized


@pytest.mark.parametrize("spec", ["SC(A2)", "SC(B2)", "SC(G2)", "GL(3)"])
def test_springer_mod_p(spec):
    alg = build_chevalley_algebra(spec)
    rd = alg.datum
    for p in [2, 3, 5, 7]:
        inj = springer_injective_mod(alg, p)
        sur = springer_surjective_mod(alg, p)
        if rd.is_very_good(p):
            assert all(inj.values()) and all(sur.values())
    assert all(springer_injective_mod(alg, 0).values())


def test_divided_power_exp_sl2():
    alg, e, h, f = sl2()
    U = divided_power_exp(alg, alg.root_basis[1], 1)
    got = list(U.dot(np.array(e, dtype=object)))
    assert got == [Fraction(a - b - c) for a, b, c in zip(e, h, f)]


def test_divided_power_zero_is_identity():
    alg = build_chevalley_algebra("SC(B2)")
    for p in [0, 5]:
        U = divided_power_exp(alg, alg.root_basis[0], 0, p)
        assert (U == np.identity(alg.dim, dtype=int)).all()


@pytest.mark.parametrize("spec,p", [("SC(A2)", 0), ("SC(G2)", 0), ("SC(G2)", 7), ("SC(B3)", 5)])
def test_divided_power_composition_and_automorphism(spec, p):
    alg = build_chevalley_algebra(spec)
    rng = random.Random(1)
    for b in rng.sample(alg.root_basis, 3):
        c, d = rng.randrange(-4, 5), rng.randrange(-4, 5)
        A = divided_power_exp(alg, b, c, p).astype(object)
        B = divided_power_exp(alg, b, d, p).astype(object)
        AB = divided_power_exp(alg, b, c + d, p).astype(object)
        prod = A.dot(B)
        if p:
            prod = prod % p
            AB = AB % p
        assert (prod == AB).all()
        x = [rng.randrange(-3, 4) for _ in range(alg.dim)]
        y = [rng.randrange(-3, 4) for _ in range(alg.dim)]
        lhs = A.dot(np.array(alg.bracket(x, y, p), dtype=object))
        rhs = alg.bracket(list(A.dot(np.array(x, dtype=object))), list(A.dot(np.array(y, dtype=object))), p)
        if p:
            lhs = lhs % p
            rhs = [v % p for v in rhs]
        assert list(lhs) == list(rhs)

import itertools
import random

import pytest

from kkit.errors import BruteForceTooLarge
from kkit.groth import (
    all_flags,
    groth_fiber_audit,
    orderings,
    split_eigenvalues,
    stable_flags_gl,
    subspaces,
    torus_fiber,
)
from kkit.report import PASS


def q_factorial(n, q):
    out = 1
    for i in range(1, n + 1):
        out *= (q**i - 1) // (q - 1)
    return out


def gaussian_binomial(n, k, q):
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


@pytest.mark.parametrize("n,q", list(itertools.product([1, 2, 3], [2, 3, 5, 7])))
def test_flag_counts(n, q):
    assert len(all_flags(n, q)) == q_factorial(n, q)
    for k in range(n + 1):
        assert len(subspaces(n, q, k)) == gaussian_binomial(n, k, q)


def test_flag_envelope():
    with pytest.raises(BruteForceTooLarge):
        all_flags(4, 2)
    with pytest.raises(BruteForceTooLarge):
        stable_flags_gl([[0] * 2] * 2, 11)


def test_stable_flag_examples():
    assert stable_flags_gl([[0, 1], [0, 0]], 3) == [(((1, 0),), ((1, 0), (0, 1)))]
    assert len(stable_flags_gl([[1, 0], [0, 2]], 5)) == 2
    assert len(stable_flags_gl([[0, 0], [0, 0]], 5)) == 6
    assert len(stable_flags_gl([[0] * 3] * 3, 2)) == q_factorial(3, 2)


def brute_stable_lines(x, q):
    # lines in F_q^2 through a nonzero vector v with x v proportional to v
    lines = set()
    for v in itertools.product(range(q), repeat=2):
        if not any(v):
            continue
        xv = [(x[0][0] * v[0] + x[0][1] * v[1]) % q, (x[1][0] * v[0] + x[1][1] * v[1]) % q]
        if (xv[0] * v[1] - xv[1] * v[0]) % q == 0:
            inv = pow(v[0] if v[0] else v[1], -1, q)
            lines.add(tuple(c * inv % q for c in v))
    return len(lines)


@pytest.mark.parametrize("q", [2, 3, 5, 7])
def test_stable_flags_gl2_brute_force(q):
    rng = random.Random(q)
    for _ in range(40):
        x = [[rng.randrange(q) for _ in range(2)] for _ in range(2)]
        assert len(stable_flags_gl(x, q)) == brute_stable_lines(x, q)


def test_jordan_block_fiber():
    x = [[3, 1], [0, 3]]
    assert len(stable_flags_gl(x, 5)) == 1
    assert split_eigenvalues(x, 5) == [3, 3]
    assert torus_fiber(2, 5, (1, 4)) == 1  # e1 = 6, e2 = 9 mod 5
    assert orderings([3, 3]) == 1


def test_regular_nilpotent_gl3_f2():
    e = [[0, 1, 0], [0, 0, 1], [0, 0, 0]]
    assert len(stable_flags_gl(e, 2)) == 1
    assert torus_fiber(3, 2, (0, 0, 0)) == 1


def test_split_eigenvalues():
    assert split_eigenvalues([[0, 1], [1, 0]], 5) == [1, 4]
    # x^2 + 1 is irreducible over F_3
    assert split_eigenvalues([[0, 2], [1, 0]], 3) is None


@pytest.mark.parametrize("n,q", list(itertools.product([1, 2, 3], [2, 3, 5, 7])))
def test_groth_fiber_audit(n, q):
    res = groth_fiber_audit(n, q, n_samples=50, seed=0)
    assert [r.check for r in res] == ["groth-fiber-count", "groth-slice-fiber", "groth-nilpotent-flag"]
    assert all(r.status == PASS for r in res)
    assert res[0].details["samples"] == 50

"""The form <,>_Gr, the map tau, and the twisted Weyl-group action on V-valued functions on e + t.

Functions on Sigma = e + t are polynomials in the coordinates ``y_k`` of
``h = sum y_k h_k``; the representation V is the adjoint representation in the
Chevalley basis.  An element of the module is a dict ``{basis index: polynomial}``.

For a simple root alpha the twisted reflection is

    (s_alpha f)(h) = sum_k (-dalpha(h))^k (ad e_{-alpha})^k / k! f(s_alpha h).

Since e_{-alpha} has height -1, "polynomial degree + height" is preserved, so
the module splits into finite blocks X_t of fixed total degree t and every
check runs exactly on those blocks.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from sympy.polys.domains import GF, QQ
from sympy.polys.rings import ring

from .chevalley import ChevalleyAlgebra, build_chevalley_algebra, divided_powers, principal_nilpotent
from .errors import ConditionViolation, TruncationOverflow, UnsupportedGroup
from .linalg import Field, kernel, rank, rational_matmul, rref, to_domain
from .report import CheckResult, FAIL, PASS
from .roots import RootDatum, heights_and_exponents, highest_short_root, weyl_elements, weyl_words

MAX_AUDIT_DEGREE = 10


@dataclass(frozen=True)
class GrForm:
    spec: str
    kil: tuple[tuple[int, ...], ...]  # (,)_Kil on X^* in the fundamental weight basis
    theta: int  # root index of the highest short root
    theta_kil: int
    gr: tuple[tuple[Fraction, ...], ...]
    tau: tuple[tuple[Fraction, ...], ...]  # X^* -> Q (x) X_*, acting on column vectors

    def pairing(self, lam, mu) -> Fraction:
        return sum(lam[i] * self.gr[i][j] * mu[j] for i in range(len(lam)) for j in range(len(mu)))

    def apply_tau(self, lam) -> tuple[Fraction, ...]:
        return tuple(sum(row[j] * lam[j] for j in range(len(lam))) for row in self.tau)


def _single_sc(rd: RootDatum) -> None:
    if len(rd.factors) != 1 or rd.factors[0].kind != "SC":
        raise UnsupportedGroup(f"{rd.spec}: need a single simply connected quasi-simple factor")


def gr_form(rd: RootDatum) -> GrForm:
    _single_sc(rd)
    r = rd.rank
    kil = [[sum(c[i] * c[j] for c in rd.coroots) for j in range(r)] for i in range(r)]
    theta = highest_short_root(rd)
    t = rd.roots[theta]
    theta_kil = sum(t[i] * kil[i][j] * t[j] for i in range(r) for j in range(r))
    gr = [[Fraction(2 * kil[i][j], theta_kil) for j in range(r)] for i in range(r)]
    form = GrForm(rd.spec, tuple(map(tuple, kil)), theta, theta_kil, tuple(map(tuple, gr)), tuple(map(tuple, gr)))
    _verify_gr(rd, form)
    return form


def _verify_gr(rd: RootDatum, form: GrForm) -> None:
    r = rd.rank
    K = np.array(form.kil, dtype=object)
    for i in rd.simple:
        s = np.array(rd.reflection_char(i), dtype=object)
        if not np.array_equal(s.T.dot(K).dot(s), K):
            raise AssertionError("(,)_Kil is not W-invariant")
        # tau s = s tau (s acting on X^* on the right side, on X_* on the left)
        T = np.array(form.tau, dtype=object)
        sc = np.array(rd.reflection_cochar(i), dtype=object)
        if not np.array_equal(T.dot(s), sc.dot(T)):
            raise AssertionError("tau is not W-equivariant")
    t = rd.roots[form.theta]
    if form.pairing(t, t) != 2:
        raise AssertionError("<theta, theta>_Gr != 2")
    assert len(form.tau) == r


def tau_root_audit(rd: RootDatum, p: int) -> CheckResult:
    """tau(alpha) = |alpha|^2 alpha^vee and (dalpha) o tau = |alpha|^2 h_alpha for every root."""
    if p and not rd.is_very_good(p):
        raise ConditionViolation(f"p={p} is not very good for {rd.spec}")
    form = gr_form(rd)
    r = rd.rank
    bad = []
    for a, root in enumerate(rd.roots):
        L = rd.lengths[a]
        want = tuple(L * c for c in rd.coroots[a])
        if form.apply_tau(root) != want:
            bad.append({"root": list(root), "identity": "tau(alpha)"})
        # the linear form xi -> dalpha(tau(xi)) as a row vector
        row = tuple(sum(root[i] * form.tau[i][j] for i in range(r)) for j in range(r))
        if row != want:
            bad.append({"root": list(root), "identity": "dalpha o tau"})
    # clear denominators and test invertibility mod p
    den = 1
    for row in form.tau:
        for v in row:
            den = den * v.denominator // np.gcd(den, v.denominator)
    cleared = [[int(v * den) for v in row] for row in form.tau]
    inv_ok = rank(cleared, p) == r and (p == 0 or den % p)
    ok = not bad and bool(inv_ok)
    return CheckResult(
        "tau-roots",
        rd.spec,
        p,
        PASS if ok else FAIL,
        "tau(alpha) = |alpha|^2 alpha^vee, dalpha o tau = |alpha|^2 h_alpha, tau invertible",
        {"roots": len(rd.roots), "theta_kil": form.theta_kil, "denominator": den},
        {"failures": bad[:5], "tau_invertible": bool(inv_ok)} if not ok else None,
    )


class TruncatedTwistedModule:
    """Adjoint-valued polynomial functions on a Cartan subalgebra with a twisted W-action.

    ``forms[i]`` is the linear form that feeds the unipotent factor and
    ``reflections[i]`` the reflection on the coordinates, for simple root i.
    The default is the algebraic action on Sigma = e + t.
    """

    def __init__(self, alg: ChevalleyAlgebra, p: int, D: int, cap: int | None = None,
                 geometric: bool = False):
        rd = alg.datum
        _single_sc(rd)
        if p and not rd.is_very_good(p):
            raise ConditionViolation(f"p={p} is not very good for {rd.spec}")
        self.alg = alg
        self.p = p
        self.field = Field(p)
        self.D = D
        self.height = alg.max_degree
        self.cap = D + 2 * self.height if cap is None else cap
        self.geometric = geometric
        self.ring, *self.gens = ring(",".join(f"y{k}" for k in range(rd.rank)), GF(p) if p else QQ)
        self._images: dict = {}
        self._tau_images: dict = {}
        self._lpow: dict = {}
        self.forms = []
        self.reflections = []
        for i in rd.simple:
            a, ac = rd.roots[i], rd.coroots[i]
            if geometric:
                # xi -> |alpha|^2 <xi, h_alpha>; s_alpha xi = xi - <xi, h_alpha> alpha
                lin = [rd.lengths[i] * c for c in ac]
                refl = [[int(j == k) - a[j] * ac[k] for k in range(rd.rank)] for j in range(rd.rank)]
            else:
                # h -> dalpha(h); s_alpha h = h - dalpha(h) h_alpha
                lin = list(a)
                refl = [[int(j == k) - ac[j] * a[k] for k in range(rd.rank)] for j in range(rd.rank)]
            self.forms.append(self.linear(lin))
            self.reflections.append([self.linear(row) for row in refl])
        self.neg_simple = [alg.root_basis[rd.negative_of(i)] for i in rd.simple]

    def linear(self, coeffs):
        return sum((self.ring(self.field(c)) * g for c, g in zip(coeffs, self.gens)), self.ring.zero)

    # -- elements ------------------------------------------------------------

    def degree(self, f) -> int:
        """Total polynomial degree of an element (-1 for zero)."""
        return max((sum(m) for P in f.values() for m in P.monoms() if P), default=-1)

    def basis_element(self, b: int, monom) -> dict:
        return {b: self.ring({tuple(monom): 1})}

    def block_basis(self, t: int) -> list[tuple[int, tuple[int, ...]]]:
        """Basis (V index, monomial) of the block of total degree t."""
        out = []
        r = self.alg.rank
        for b, h in enumerate(self.alg.degrees):
            d = t - h
            if d < 0:
                continue
            for m in _monomials(r, d):
                out.append((b, m))
        return out

    def coordinates(self, f, basis) -> list:
        pos = {key: k for k, key in enumerate(basis)}
        v = [self.field(0)] * len(basis)
        for b, P in f.items():
            for m, c in P.terms():
                key = (b, tuple(m))
                if key not in pos:
                    raise ValueError("element leaves the block")
                v[pos[key]] = self.field(int(c) if self.p else Fraction(int(c.numerator), int(c.denominator)))
        return v

    # -- the action ----------------------------------------------------------

    def _image(self, i: int, P):
        out = self.ring.zero
        for m, c in P.terms():
            key = (i, m)
            if key not in self._images:
                img = self.ring.one
                for g, k in zip(self.reflections[i], m):
                    if k:
                        img = img * g**k
                self._images[key] = img
            out += self._images[key] * c
        return out

    def _power(self, i: int, k: int):
        if (i, k) not in self._lpow:
            self._lpow[(i, k)] = (-self.forms[i]) ** k
        return self._lpow[(i, k)]

    def act(self, i: int, f) -> dict:
        D_k = divided_powers(self.alg, self.neg_simple[i])
        out: dict = {}
        for b, P in f.items():
            Q = self._image(i, P)
            if not Q:
                continue
            for k, Dk in enumerate(D_k):
                col = Dk[:, b]
                nz = np.nonzero(col)[0]
                if not len(nz):
                    continue
                QL = Q * self._power(i, k)
                for bb in nz:
                    c = self.ring(self.field(int(col[bb])))
                    out[int(bb)] = out.get(int(bb), self.ring.zero) + c * QL
        out = {b: P for b, P in out.items() if P}
        deg = self.degree(out)
        if deg > self.cap:
            raise TruncationOverflow(deg, self.cap)
        return out

    def block_matrix(self, i: int, t: int) -> np.ndarray:
        basis = self.block_basis(t)
        cols = [self.coordinates(self.act(i, self.basis_element(b, m)), basis) for b, m in basis]
        return _matrix(cols, self.p)

    def multiply(self, P, f) -> dict:
        return {b: Q * P for b, Q in f.items() if Q * P}


def _monomials(r: int, d: int):
    if r == 0:
        if d == 0:
            yield ()
        return
    for combo in itertools.combinations_with_replacement(range(r), d):
        m = [0] * r
        for k in combo:
            m[k] += 1
        yield tuple(m)


def _matrix(cols, p) -> np.ndarray:
    n = len(cols)
    dtype = Field(p).dtype if p else object
    A = np.zeros((n, n), dtype=dtype)
    for j, col in enumerate(cols):
        for i, v in enumerate(col):
            A[i, j] = v
    return A


def _mul(A, B, p):
    return A.dot(B) % p if p else rational_matmul(A, B)


def _identity(n, p):
    return np.identity(n, dtype=Field(p).dtype if p else object) if p else np.identity(n, dtype=object)


def twisted_action(module: TruncatedTwistedModule, alpha: int, f) -> dict:
    """Apply the twisted reflection for simple root ``alpha`` to ``f``."""
    if module.degree(f) > module.cap:
        raise TruncationOverflow(module.degree(f), module.cap)
    return module.act(alpha, f)


def braid_order(rd: RootDatum, i: int, j: int) -> int:
    prod_ = rd.cartan[i][j] * rd.cartan[j][i]
    return {0: 2, 1: 3, 2: 4, 3: 6}[prod_]


def tau_pullback(alg_mod: TruncatedTwistedModule, geo_mod: TruncatedTwistedModule, form: GrForm, f) -> dict:
    """(tau^* f)(xi) = f(tau(xi)): substitute y = tau z."""
    F = alg_mod.field
    cache = geo_mod._tau_images
    if not cache:
        cache["subs"] = [geo_mod.linear([F(v) for v in row]) for row in form.tau]
    subs = cache["subs"]
    out = {}
    for b, P in f.items():
        Q = geo_mod.ring.zero
        for m, c in P.terms():
            if m not in cache:
                img = geo_mod.ring.one
                for g, k in zip(subs, m):
                    if k:
                        img = img * g**k
                cache[m] = img
            Q += cache[m] * c
        if Q:
            out[b] = Q
    return out


def invariant_polynomials(module: TruncatedTwistedModule, d: int, method: str = "kernel") -> list[list]:
    """Basis of W-invariant polynomials of degree d on t (coefficient vectors on monomials)."""
    rd = module.alg.datum
    monos = list(_monomials(rd.rank, d))
    pos = {m: k for k, m in enumerate(monos)}
    F = module.field

    def vec(P):
        v = [F(0)] * len(monos)
        for m, c in P.terms():
            v[pos[tuple(m)]] = F(int(c) if module.p else Fraction(int(c.numerator), int(c.denominator)))
        return v

    def refl_matrix(i):
        cols = [vec(module._image(i, module.ring({m: 1}))) for m in monos]
        return _matrix(cols, module.p)

    n = len(monos)
    if method == "kernel":
        rows = []
        for i in rd.simple:
            A = refl_matrix(i) - _identity(n, module.p)
            rows.extend(A.tolist())
        return kernel(rows, module.p, n) if rows else [[F(int(k == j)) for j in range(n)] for k in range(n)]
    if method == "reynolds":
        words = weyl_words(rd)
        if module.p and len(words) % module.p == 0:
            raise ValueError("|W| is not invertible")
        mats = [refl_matrix(i) for i in rd.simple]
        total = np.zeros((n, n), dtype=object)
        for w in words:
            M = _identity(n, module.p).astype(object)
            for i in w:
                M = _mul(mats[i].astype(object), M, module.p)
            total = total + M
        total = total * F.inv(len(words))
        if module.p:
            total = total % module.p
        A, piv = _rref_cols(total, module.p)
        return [[A[k, j] for j in range(n)] for k in range(len(piv))]
    raise ValueError(method)


def _rref_cols(M, p):
    return rref(np.array(M).T.tolist(), p, M.shape[0])


def hilbert_invariant_dims(degrees, top: int) -> list[int]:
    """Coefficients of prod 1/(1 - t^d) up to t^top."""
    coeffs = [1] + [0] * top
    for d in degrees:
        for k in range(d, top + 1):
            coeffs[k] += coeffs[k - d]
    return coeffs


def waction_audit(module: TruncatedTwistedModule, rd: RootDatum | None = None, D: int | None = None,
                  seed: int = 0) -> list[CheckResult]:
    """Involution, braid, tau-pullback, invariant-linearity and invariant-oracle checks."""
    alg = module.alg
    rd = rd or alg.datum
    D = module.D if D is None else D
    if D > MAX_AUDIT_DEGREE:
        raise ValueError(f"audit degree {D} exceeds {MAX_AUDIT_DEGREE}")
    p = module.p
    H = module.height
    if module.cap < D + 2 * H:
        raise TruncationOverflow(D + 2 * H, module.cap)
    blocks = range(-H, D + H + 1)
    simple = list(rd.simple)
    mats = {(i, t): module.block_matrix(i, t) for i in simple for t in blocks}
    sizes = {t: len(module.block_basis(t)) for t in blocks}
    spec = rd.spec
    details = {"D": D, "blocks": [blocks.start, blocks.stop - 1], "block_dims": sum(sizes.values())}
    results = []

    bad = []
    for (i, t), S in mats.items():
        if not np.array_equal(_mul(S, S, p), _identity(sizes[t], p)):
            bad.append({"simple": i, "block": t})
    results.append(CheckResult("waction-involution", spec, p, FAIL if bad else PASS,
                               "s_alpha^2 = 1 on the twisted module", dict(details),
                               {"blocks": bad[:5]} if bad else None))

    bad = []
    for i, j in itertools.combinations(simple, 2):
        m = braid_order(rd, i, j)
        for t in blocks:
            P = _mul(mats[(i, t)], mats[(j, t)], p)
            M = _identity(sizes[t], p)
            for _ in range(m):
                M = _mul(M, P, p)
            if not np.array_equal(M, _identity(sizes[t], p)):
                bad.append({"pair": [i, j], "order": m, "block": t})
    results.append(CheckResult("waction-braid", spec, p, FAIL if bad else PASS,
                               "(s_alpha s_beta)^m = 1 on the twisted module", dict(details),
                               {"blocks": bad[:5]} if bad else None))

    results.append(_pullback_check(module, rd, blocks))
    results.append(_invariant_checks(module, rd, mats, sizes, blocks, seed))
    results.append(_tautological_check(module, rd))
    return results


def _pullback_check(module, rd, blocks) -> CheckResult:
    """tau^* (s_alpha f) = s_alpha^geo (tau^* f) on every block basis vector."""
    p = module.p
    form = gr_form(rd)
    geo = TruncatedTwistedModule(module.alg, p, module.D, module.cap, geometric=True)
    bad = []
    # the scalar identity behind it: dalpha(tau xi) = |alpha|^2 <xi, h_alpha>
    for i in rd.simple:
        lhs = tau_pullback(module, geo, form, {0: module.forms[i]}).get(0, geo.ring.zero)
        if lhs != geo.forms[i]:
            bad.append({"simple": i, "identity": "dalpha o tau"})
    for t in blocks:
        for b, m in module.block_basis(t):
            f = module.basis_element(b, m)
            pf = tau_pullback(module, geo, form, f)
            for i in rd.simple:
                left = tau_pullback(module, geo, form, module.act(i, f))
                right = geo.act(i, pf)
                if left != right:
                    bad.append({"simple": i, "block": t, "basis": [b, list(m)]})
    return CheckResult("waction-tau-pullback", rd.spec, p, FAIL if bad else PASS,
                       "pulling back the geometric action along tau gives the algebraic action",
                       {"blocks": [blocks.start, blocks.stop - 1]},
                       {"cases": bad[:5]} if bad else None)


def _invariant_checks(module, rd, mats, sizes, blocks, seed) -> CheckResult:
    p = module.p
    F = module.field
    rng = random.Random(seed)
    problems = []
    top = module.D
    degrees = heights_and_exponents(rd)[1][0]
    expected = hilbert_invariant_dims(degrees, top)
    order = len(weyl_elements(rd))
    reynolds_ok = p == 0 or order % p != 0
    inv_dims = []
    invariants = []
    for d in range(top + 1):
        ker = invariant_polynomials(module, d, "kernel")
        inv_dims.append(len(ker))
        if len(ker) != expected[d]:
            problems.append({"degree": d, "kernel": len(ker), "hilbert": expected[d]})
        if reynolds_ok:
            rey = invariant_polynomials(module, d, "reynolds")
            joint = rank(list(ker) + list(rey), p, len(list(_monomials(rd.rank, d)))) if ker or rey else 0
            if len(rey) != len(ker) or joint != len(ker):
                problems.append({"degree": d, "kernel": len(ker), "reynolds": len(rey)})
        if d > 0:
            monos = list(_monomials(rd.rank, d))
            for v in ker:
                P = module.ring({m: (int(c) if p else c) for m, c in zip(monos, v) if c})
                invariants.append(P)

    # O(t)^W-linearity: s_alpha(P f) = P s_alpha(f) on random block elements
    linear_fail = 0
    for P in invariants:
        for _ in range(3):
            t = rng.choice([t for t in blocks if t + module.degree({0: P}) <= blocks.stop - 1] or [blocks.start])
            basis = module.block_basis(t)
            f = {}
            for b, m in rng.sample(basis, min(4, len(basis))):
                c = module.ring(F(rng.randrange(1, p) if p else rng.randrange(1, 10)))
                f[b] = f.get(b, module.ring.zero) + c * module.ring({m: 1})
            for i in rd.simple:
                if module.act(i, module.multiply(P, f)) != module.multiply(P, module.act(i, f)):
                    linear_fail += 1
    if linear_fail:
        problems.append({"linearity_failures": linear_fail})

    # invariants of the twisted module itself, two ways
    twisted_dims = {}
    if reynolds_ok:
        words = weyl_words(rd)
        for t in blocks:
            n = sizes[t]
            if n == 0:
                continue
            rows = []
            for i in rd.simple:
                rows.extend((mats[(i, t)].astype(object) - _identity(n, p).astype(object)).tolist())
            k_dim = len(kernel(rows, p, n))
            r_dim = _reynolds_rank([mats[(i, t)] for i in rd.simple], words, p)
            twisted_dims[t] = k_dim
            if k_dim != r_dim:
                problems.append({"block": t, "kernel": k_dim, "reynolds": r_dim})
    return CheckResult(
        "waction-invariants", rd.spec, p, FAIL if problems else PASS,
        "the action is O(t)^W-linear; invariant dimensions agree across independent oracles",
        {"invariant_dims": inv_dims, "hilbert": expected, "reynolds_used": reynolds_ok,
         "twisted_invariant_dims": twisted_dims, "invariants_tested": len(invariants)},
        {"problems": problems[:5]} if problems else None,
    )


def _reynolds_rank(gens, words, p) -> int:
    """Rank of sum_w w on a block; each word reuses the product of its suffix."""
    n = gens[0].shape[0]
    if p:
        prods = {(): _identity(n, p)}
        for w in sorted(words, key=len)[1:]:
            prods[w] = prods[w[1:]].dot(gens[w[0]]) % p
        return rank(sum(prods.values()) % p, p)
    gens = [to_domain(S).to_sparse() for S in gens]
    prods = {(): to_domain(_identity(n, p)).to_sparse()}
    for w in sorted(words, key=len)[1:]:
        prods[w] = prods[w[1:]] * gens[w[0]]
    total = prods[()]
    for w, M in prods.items():
        if w:
            total = total + M
    return total.rank()


def _tautological_check(module, rd) -> CheckResult:
    """The section h -> e + h is fixed: u_{-alpha}(-dalpha(h)) (e + s_alpha h) = e + h."""
    alg = module.alg
    e, _ = principal_nilpotent(alg)
    f = {b: module.ring(1) for b, c in enumerate(e) if c}
    for k, b in enumerate(alg.h_basis):
        f[b] = f.get(b, module.ring.zero) + module.gens[k]
    bad = [i for i in rd.simple if module.act(i, f) != f]
    return CheckResult("waction-torsor", rd.spec, module.p, FAIL if bad else PASS,
                       "u_{-alpha}(-dalpha(h)) (e + s_alpha h) = e + h",
                       {"simple_roots": len(rd.simple)},
                       {"simple": bad} if bad else None)


def build_module(spec: str, p: int, D: int, cap: int | None = None) -> TruncatedTwistedModule:
    return TruncatedTwistedModule(build_chevalley_algebra(spec), p, D, cap)

"""Root data for products of simply connected quasi-simple groups and GL(n).

Conventions
-----------
* For a factor ``SC(Xn)`` the character lattice has the fundamental weights
  as basis and the cocharacter lattice the simple coroots, so the pairing of
  coordinate vectors is the dot product.
* For ``GL(n)`` both lattices are Z^n with the standard basis and
  ``alpha_i = eps_i - eps_{i+1}``.
* ``cartan[i][j] = <alpha_i, alpha_j^vee>``.
* Squared lengths are normalized per factor so that short roots have length 1.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import chain

from sympy import isprime

from .errors import SpecParseError, UnsupportedType, WeylTooLarge
from .linalg import IntMatrix, int_det, prime_torsion, smith_normal_form

# Primes that are bad for a quasi-simple factor of the given type.
BAD_PRIMES = {
    "A": (),
    "B": (2,),
    "C": (2,),
    "D": (2,),
    "E": (2, 3),
    "F": (2, 3),
    "G": (2, 3),
}
BAD_PRIMES_E8 = (2, 3, 5)

ROOT_COUNTS = {
    "A": lambda n: n * (n + 1),
    "B": lambda n: 2 * n * n,
    "C": lambda n: 2 * n * n,
    "D": lambda n: 2 * n * (n - 1),
    "E": lambda n: {6: 72, 7: 126, 8: 240}[n],
    "F": lambda n: 48,
    "G": lambda n: 12,
}

DEFAULT_WEYL_CAP = 51840

_FACTOR_RE = re.compile(r"^(?:SC\(([A-Z])(\d+)\)|GL\((\d+)\))$")


@dataclass(frozen=True)
class Factor:
    kind: str  # "SC" or "GL"
    letter: str  # Cartan type of the root system ("A" for GL)
    ss_rank: int  # number of simple roots
    lattice_rank: int
    offset: int  # first lattice coordinate
    simple_offset: int  # first global simple-root index

    @property
    def label(self) -> str:
        if self.kind == "GL":
            return f"GL({self.lattice_rank})"
        return f"SC({self.letter}{self.ss_rank})"

    @property
    def bad_primes(self) -> tuple[int, ...]:
        if self.kind == "GL":
            return ()
        if self.letter == "E" and self.ss_rank == 8:
            return BAD_PRIMES_E8
        return BAD_PRIMES[self.letter]

    def is_good(self, p: int) -> bool:
        return p not in self.bad_primes

    def is_very_good(self, p: int) -> bool:
        if not self.is_good(p):
            return False
        if self.kind == "SC" and self.letter == "A" and p and (self.ss_rank + 1) % p == 0:
            return False
        return True

    def not_very_good_primes(self) -> tuple[int, ...]:
        cand = set(self.bad_primes)
        if self.kind == "SC" and self.letter == "A":
            n = self.ss_rank + 1
            cand.update(q for q in range(2, n + 1) if n % q == 0 and isprime(q))
        return tuple(sorted(cand))


def parse_spec(spec: str) -> list[tuple[str, str, int]]:
    """Split a group spec like ``SC(A2)*GL(3)`` into (kind, letter, rank) triples."""
    text = spec.replace(" ", "")
    if not text:
        raise SpecParseError("empty group spec")
    out = []
    for part in text.split("*"):
        m = _FACTOR_RE.match(part)
        if m is None:
            raise SpecParseError(f"cannot parse factor {part!r} in {spec!r}")
        if m.group(3) is not None:
            n = int(m.group(3))
            if n < 1:
                raise SpecParseError("GL(n) needs n >= 1")
            out.append(("GL", "A", n))
        else:
            letter, rank = m.group(1), int(m.group(2))
            _check_type(letter, rank)
            out.append(("SC", letter, rank))
    return out


def _check_type(letter: str, rank: int) -> None:
    ok = {
        "A": rank >= 1,
        "B": rank >= 2,
        "C": rank >= 2,
        "D": rank >= 3,
        "E": rank in (6, 7, 8),
        "F": rank == 4,
        "G": rank == 2,
    }
    if letter not in ok:
        raise UnsupportedType(f"type {letter} is not a finite Cartan type A-G")
    if rank < 1:
        raise SpecParseError("rank must be positive")
    if not ok[letter]:
        raise UnsupportedType(f"no Cartan type {letter}{rank}")


def dynkin_edges(letter: str, n: int) -> list[tuple[int, int]]:
    """Edges of the Dynkin diagram, Bourbaki numbering, 0-based."""
    if letter in "ABCFG":
        return [(i, i + 1) for i in range(n - 1)]
    if letter == "D":
        edges = [(i, i + 1) for i in range(n - 2)]
        edges.append((n - 3, n - 1))
        return edges
    if letter == "E":
        edges = [(0, 2), (2, 3), (3, 4), (1, 3)]
        edges += [(i, i + 1) for i in range(4, n - 1)]
        return edges
    raise UnsupportedType(letter)


def simple_root_lengths(letter: str, n: int) -> list[int]:
    if letter == "B":
        return [2] * (n - 1) + [1]
    if letter == "C":
        return [1] * (n - 1) + [2]
    if letter == "F":
        return [2, 2, 1, 1]
    if letter == "G":
        return [1, 3]
    return [1] * n


def cartan_matrix(letter: str, n: int) -> list[list[int]]:
    lengths = simple_root_lengths(letter, n)
    form = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        form[i][i] = Fraction(lengths[i])
    for i, j in dynkin_edges(letter, n):
        v = -Fraction(max(lengths[i], lengths[j]), 2)
        form[i][j] = form[j][i] = v
    cart = [[2 * form[i][j] / form[j][j] for j in range(n)] for i in range(n)]
    assert all(c.denominator == 1 for row in cart for c in row)
    return [[int(c) for c in row] for row in cart]


def positive_roots_simple_coords(cart: list[list[int]]) -> list[tuple[int, ...]]:
    """Positive roots in simple-root coordinates, by root strings."""
    n = len(cart)
    simple = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    found = set(simple)
    layer = list(simple)
    while layer:
        nxt = []
        for beta in layer:
            for i in range(n):
                # <beta, alpha_i^vee>
                pairing = sum(beta[j] * cart[j][i] for j in range(n))
                p = 0
                down = list(beta)
                while True:
                    down[i] -= 1
                    if tuple(down) in found:
                        p += 1
                    else:
                        break
                if p - pairing > 0:
                    up = list(beta)
                    up[i] += 1
                    up = tuple(up)
                    if up not in found:
                        found.add(up)
                        nxt.append(up)
        layer = nxt
    return sorted(found, key=lambda c: (sum(c), tuple(-x for x in c)))


@dataclass(frozen=True)
class RootDatum:
    """Root datum of a product group; roots are stored positive-first."""

    spec: str
    factors: tuple[Factor, ...]
    rank: int
    ss_rank: int
    roots: tuple[tuple[int, ...], ...]
    coroots: tuple[tuple[int, ...], ...]
    coeffs: tuple[tuple[int, ...], ...]  # simple-root coordinates
    heights: tuple[int, ...]
    lengths: tuple[int, ...]
    root_factor: tuple[int, ...]
    n_positive: int
    cartan: tuple[tuple[int, ...], ...]
    index: dict = field(compare=False, repr=False, hash=False)

    @property
    def simple(self) -> tuple[int, ...]:
        """Indices of the simple roots."""
        return tuple(range(self.ss_rank))

    @property
    def positive(self) -> range:
        return range(self.n_positive)

    def negative_of(self, i: int) -> int:
        return i + self.n_positive if i < self.n_positive else i - self.n_positive

    def root_index(self, vec) -> int | None:
        return self.index.get(tuple(vec))

    def pair(self, weight, coweight) -> int:
        return sum(a * b for a, b in zip(weight, coweight))

    def rho_check(self) -> tuple[int, ...]:
        """The cocharacter sum of positive coroots."""
        out = [0] * self.rank
        for i in self.positive:
            for k, v in enumerate(self.coroots[i]):
                out[k] += v
        return tuple(out)

    def bad_primes(self) -> frozenset[int]:
        return frozenset(chain.from_iterable(f.bad_primes for f in self.factors))

    def not_very_good_primes(self) -> frozenset[int]:
        return frozenset(chain.from_iterable(f.not_very_good_primes() for f in self.factors))

    def is_good(self, p: int) -> bool:
        return p == 0 or all(f.is_good(p) for f in self.factors)

    def is_very_good(self, p: int) -> bool:
        return p == 0 or all(f.is_very_good(p) for f in self.factors)

    def very_good_product(self) -> int:
        out = 1
        for q in self.not_very_good_primes():
            out *= q
        return out

    def simple_root_matrix(self) -> IntMatrix:
        """Simple roots as columns in X^*."""
        return IntMatrix.from_rows(
            [[self.roots[i][k] for i in self.simple] for k in range(self.rank)], self.ss_rank
        )

    def simple_coroot_matrix(self) -> IntMatrix:
        """Simple coroots as columns in X_*."""
        return IntMatrix.from_rows(
            [[self.coroots[i][k] for i in self.simple] for k in range(self.rank)], self.ss_rank
        )

    def reflection_cochar(self, i: int) -> tuple[tuple[int, ...], ...]:
        """Matrix of s_alpha on X_* (acting on column vectors) for root ``i``."""
        a, ac = self.roots[i], self.coroots[i]
        return tuple(
            tuple(int(r == c) - ac[r] * a[c] for c in range(self.rank)) for r in range(self.rank)
        )

    def reflection_char(self, i: int) -> tuple[tuple[int, ...], ...]:
        """Matrix of s_alpha on X^* (acting on column vectors) for root ``i``."""
        a, ac = self.roots[i], self.coroots[i]
        return tuple(
            tuple(int(r == c) - a[r] * ac[c] for c in range(self.rank)) for r in range(self.rank)
        )


def _factor_data(kind: str, letter: str, n: int):
    """Roots, coroots, simple coords and lengths for a single factor."""
    if kind == "GL":
        ss = n - 1
        cart = cartan_matrix("A", ss) if ss else []
        lengths_simple = [1] * ss
        simple_vec = [tuple(int(k == i) - int(k == i + 1) for k in range(n)) for i in range(ss)]
        simple_covec = simple_vec
        lat = n
    else:
        ss = n
        cart = cartan_matrix(letter, n)
        lengths_simple = simple_root_lengths(letter, n)
        simple_vec = [tuple(cart[j]) for j in range(n)]
        simple_covec = [tuple(int(k == j) for k in range(n)) for j in range(n)]
        lat = n
    pos = positive_roots_simple_coords(cart) if ss else []
    # |alpha|^2 via the symmetric form B(alpha_i, alpha_j) = cart[i][j] L_j / 2
    roots, coroots, lengths = [], [], []
    for c in pos:
        sq = sum(
            Fraction(c[i] * c[j] * cart[i][j] * lengths_simple[j], 2) for i in range(ss) for j in range(ss)
        )
        assert sq.denominator == 1
        sq = int(sq)
        lengths.append(sq)
        roots.append(tuple(sum(c[i] * simple_vec[i][k] for i in range(ss)) for k in range(lat)))
        cov = []
        for k in range(lat):
            v = sum(Fraction(c[i] * lengths_simple[i], sq) * simple_covec[i][k] for i in range(ss))
            assert v.denominator == 1
            cov.append(int(v))
        coroots.append(tuple(cov))
    return ss, lat, cart, pos, roots, coroots, lengths


@lru_cache(maxsize=None)
def build_root_datum(spec: str) -> RootDatum:
    """Root datum for a spec string such as ``SC(A2)*GL(3)``."""
    parsed = parse_spec(spec)
    factors = []
    total_rank = sum(n if kind == "GL" else n for kind, _, n in parsed)
    total_ss = sum(n - 1 if kind == "GL" else n for kind, _, n in parsed)
    pos_roots, pos_coroots, pos_coeffs, pos_lengths, pos_factor = [], [], [], [], []
    cart_global = [[0] * total_ss for _ in range(total_ss)]
    offset = soff = 0
    per_factor = []
    for fi, (kind, letter, n) in enumerate(parsed):
        ss, lat, cart, pos, roots, coroots, lengths = _factor_data(kind, letter, n)
        expected = ROOT_COUNTS["A"](n - 1) if kind == "GL" else ROOT_COUNTS[letter](n)
        if 2 * len(pos) != expected:
            raise AssertionError(f"root count {2 * len(pos)} != {expected} for {kind}{letter}{n}")
        factors.append(Factor(kind, letter, ss, lat, offset, soff))
        for i in range(ss):
            for j in range(ss):
                cart_global[soff + i][soff + j] = cart[i][j]

        def embed(vec, width, off):
            out = [0] * width
            out[off:off + len(vec)] = vec
            return tuple(out)

        per_factor.append([
            (embed(r, total_rank, offset), embed(cr, total_rank, offset), embed(c, total_ss, soff), ln, fi)
            for r, cr, c, ln in zip(roots, coroots, pos, lengths)
        ])
        offset += lat
        soff += ss
    # simple roots first (global order), then the rest by height
    allpos = [t for block in per_factor for t in block]
    allpos.sort(key=lambda t: (sum(t[2]), tuple(-x for x in t[2])))
    for r, cr, c, ln, fi in allpos:
        pos_roots.append(r)
        pos_coroots.append(cr)
        pos_coeffs.append(c)
        pos_lengths.append(ln)
        pos_factor.append(fi)
    npos = len(pos_roots)
    neg = lambda v: tuple(-x for x in v)
    roots = tuple(pos_roots) + tuple(neg(r) for r in pos_roots)
    coroots = tuple(pos_coroots) + tuple(neg(r) for r in pos_coroots)
    coeffs = tuple(pos_coeffs) + tuple(neg(c) for c in pos_coeffs)
    heights = tuple(sum(c) for c in coeffs)
    rd = RootDatum(
        spec=spec,
        factors=tuple(factors),
        rank=total_rank,
        ss_rank=total_ss,
        roots=roots,
        coroots=coroots,
        coeffs=coeffs,
        heights=heights,
        lengths=tuple(pos_lengths) * 2,
        root_factor=tuple(pos_factor) * 2,
        n_positive=npos,
        cartan=tuple(tuple(r) for r in cart_global),
        index={r: i for i, r in enumerate(roots)},
    )
    _validate(rd)
    return rd


def _validate(rd: RootDatum) -> None:
    for i in range(len(rd.roots)):
        assert rd.pair(rd.roots[i], rd.coroots[i]) == 2, "root/coroot pairing"
    for i in rd.simple:
        assert rd.heights[i] == 1
        for j in rd.simple:
            assert rd.pair(rd.roots[i], rd.coroots[j]) == rd.cartan[i][j], "Cartan integers"
    # W-stability under simple reflections
    rootset = set(rd.roots)
    for i in rd.simple:
        a, ac = rd.roots[i], rd.coroots[i]
        for b in rd.roots:
            k = rd.pair(b, ac)
            img = tuple(x - k * y for x, y in zip(b, a))
            assert img in rootset, "root system not W-stable"


def heights_and_exponents(rd: RootDatum) -> tuple[list[int], list[tuple[int, ...]]]:
    """Height multiset of positive roots and invariant degrees per factor."""
    heights = sorted(rd.heights[i] for i in rd.positive)
    degrees = []
    for fi, f in enumerate(rd.factors):
        hs = [rd.heights[i] for i in rd.positive if rd.root_factor[i] == fi]
        top = max(hs, default=0)
        counts = [sum(1 for h in hs if h == k) for k in range(1, top + 1)]
        # exponents: the dual partition of the height counts
        exps = []
        for j in range(counts[0] if counts else 0):
            exps.append(sum(1 for c in counts if c > j))
        degs = [1] * (f.lattice_rank - f.ss_rank) + sorted(m + 1 for m in exps)
        degrees.append(tuple(degs))
    return heights, degrees


def all_degrees(rd: RootDatum) -> list[int]:
    return sorted(d for degs in heights_and_exponents(rd)[1] for d in degs)


@dataclass
class ConditionProfile:
    p: int
    c1: bool
    c2: bool
    c3: bool
    c4: bool
    witnesses: dict

    def chain_holds(self) -> bool:
        return (not self.c4 or self.c3) and (not self.c3 or self.c2) and (not self.c3 or self.c1)

    def as_dict(self) -> dict:
        return {"p": self.p, "c1": self.c1, "c2": self.c2, "c3": self.c3, "c4": self.c4,
                "witnesses": self.witnesses}


def condition_check(rd: RootDatum, p: int, kappa_det: int | None = None) -> ConditionProfile:
    """Evaluate conditions (C1)-(C4) at characteristic ``p``.

    ``kappa_det`` is the Gram determinant of the invariant form; when omitted
    it is computed from the Chevalley algebra.
    """
    if p and not isprime(p):
        raise ValueError(f"{p} is not prime")
    witnesses = {}
    if p == 0:
        c1 = True
    else:
        bad_root = next((r for r in rd.roots if all(x % p == 0 for x in r)), None)
        c1 = bad_root is None
        if not c1:
            witnesses["c1"] = {"root": list(bad_root), "reason": f"d(alpha) = 0 mod {p}"}
    good = rd.is_good(p)
    if not good:
        witnesses["good"] = {
            "bad_for": [f.label for f in rd.factors if not f.is_good(p)],
        }
    cochar_free = cochar_torsion_free(rd, p)
    if not cochar_free:
        witnesses["cochar_torsion"] = {"divisors": list(smith_normal_form(rd.simple_coroot_matrix()).nonzero)}
    char_free = char_torsion_free(rd, p)
    if not char_free:
        witnesses["char_torsion"] = {"divisors": list(smith_normal_form(rd.simple_root_matrix()).nonzero)}
    c2 = good and cochar_free
    c3 = c2 and char_free
    if kappa_det is None:
        from .quotient import kappa_form
        from .chevalley import build_chevalley_algebra

        kappa_det = kappa_form(build_chevalley_algebra(rd.spec)).det
    form_ok = kappa_det != 0 if p == 0 else kappa_det % p != 0
    if not form_ok:
        witnesses["kappa"] = {"gram_det": kappa_det}
    c4 = c2 and form_ok
    return ConditionProfile(p, c1, c2, c3, c4, witnesses)


def cochar_torsion_free(rd: RootDatum, p: int) -> bool:
    if p == 0 or rd.ss_rank == 0:
        return True
    return prime_torsion(rd.simple_coroot_matrix(), p) == 0


def char_torsion_free(rd: RootDatum, p: int) -> bool:
    if p == 0 or rd.ss_rank == 0:
        return True
    return prime_torsion(rd.simple_root_matrix(), p) == 0


def weyl_elements(rd: RootDatum, cap: int = DEFAULT_WEYL_CAP) -> list[tuple[tuple[int, ...], ...]]:
    """All Weyl group elements as integer matrices on X_*, identity first."""
    order = weyl_order(rd)
    if order > cap:
        raise WeylTooLarge(f"|W| = {order} exceeds cap {cap}; audit per reflection instead")
    gens = [rd.reflection_cochar(i) for i in rd.simple]
    ident = tuple(tuple(int(i == j) for j in range(rd.rank)) for i in range(rd.rank))
    seen = {ident: None}
    out = [ident]
    frontier = [ident]
    while frontier:
        nxt = []
        for w in frontier:
            for s in gens:
                ws = _mat_mul(s, w)
                if ws not in seen:
                    seen[ws] = None
                    out.append(ws)
                    nxt.append(ws)
        frontier = nxt
    return out


def weyl_words(rd: RootDatum, cap: int = DEFAULT_WEYL_CAP) -> list[tuple[int, ...]]:
    """A reduced word in the simple reflections for every Weyl group element."""
    order = weyl_order(rd)
    if order > cap:
        raise WeylTooLarge(f"|W| = {order} exceeds cap {cap}")
    gens = [rd.reflection_cochar(i) for i in rd.simple]
    ident = tuple(tuple(int(i == j) for j in range(rd.rank)) for i in range(rd.rank))
    seen = {ident: ()}
    frontier = [ident]
    while frontier:
        nxt = []
        for w in frontier:
            for k, s in enumerate(gens):
                ws = _mat_mul(s, w)
                if ws not in seen:
                    seen[ws] = (k,) + seen[w]
                    nxt.append(ws)
        frontier = nxt
    return list(seen.values())


def _mat_mul(a, b):
    n = len(a)
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)) for i in range(n))


_WEYL_ORDER = {
    "A": lambda n: _fact(n + 1),
    "B": lambda n: 2**n * _fact(n),
    "C": lambda n: 2**n * _fact(n),
    "D": lambda n: 2 ** (n - 1) * _fact(n),
    "E": lambda n: {6: 51840, 7: 2903040, 8: 696729600}[n],
    "F": lambda n: 1152,
    "G": lambda n: 12,
}


def _fact(n):
    out = 1
    for k in range(2, n + 1):
        out *= k
    return out


def weyl_order(rd: RootDatum) -> int:
    out = 1
    for f in rd.factors:
        out *= _fact(f.lattice_rank) if f.kind == "GL" else _WEYL_ORDER[f.letter](f.ss_rank)
    return out


def highest_short_root(rd: RootDatum) -> int:
    """Index of the highest short root (single-factor data only)."""
    short = min(rd.lengths[i] for i in rd.positive)
    return max((i for i in rd.positive if rd.lengths[i] == short), key=lambda i: rd.heights[i])


def cartan_determinant(rd: RootDatum) -> int:
    return int_det(IntMatrix.from_rows(rd.cartan, rd.ss_rank)) if rd.ss_rank else 1

"""Prime splitting, valuations and factorization of fractional ideals.

Only the monogenic situation is handled: a rational prime p is usable when
Z[t] is p-maximal (Dedekind's criterion).  Prime ideals are then
``(p, h(t))`` for the irreducible factors h of g mod p, and every ideal
computation at p can be done inside Z[t] with integer lattices in Hermite
normal form.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from math import gcd

from sympy import factorint

from . import polys
from .errors import IndexDivisor, NegativeExponentOutsideS, ZeroElement
from .linalg import hnf, hnf_contains, hnf_index
from .qfield import FieldElement

__all__ = [
    "PrimeIdeal", "IdealFactorization", "PlaceSet", "split_prime", "valuation",
    "factor_principal", "s_reduce", "deg_gt1_part", "ideal_norm", "ideal_equal",
    "place_set", "dedekind_ok", "apply_automorphism_to_prime",
]


class PrimeIdeal:
    """A prime of O_k above p, presented as (p, gen_poly(t))."""

    def __init__(self, field, p, e, f, gen_poly, hnf_basis):
        self.field = field
        self.p = p
        self.e = e
        self.f = f
        self.gen_poly = tuple(gen_poly)
        self.hnf_basis = hnf_basis
        self._powers = {0: None, 1: hnf_basis}
        self._lock = threading.Lock()

    @property
    def norm(self):
        return self.p ** self.f

    @property
    def key(self):
        return (self.p, self.f, self.e, self.hnf_basis)

    def __eq__(self, other):
        return (isinstance(other, PrimeIdeal) and self.field == other.field
                and self.p == other.p and self.hnf_basis == other.hnf_basis)

    def __hash__(self):
        return hash((self.field.defining_poly, self.p, self.hnf_basis))

    def __lt__(self, other):
        return self.key < other.key

    def __repr__(self):
        return f"PrimeIdeal(p={self.p}, e={self.e}, f={self.f}, gen={self.gen_str()})"

    def gen_str(self):
        return polys.poly_str(list(self.gen_poly), self.field.var)

    def power_hnf(self, j):
        """HNF basis of the j-th power (j >= 1), cached."""
        with self._lock:
            if j in self._powers:
                return self._powers[j]
            top = max(k for k in self._powers if k <= j)
            cur = self._powers[top]
        K = self.field
        base = [FieldElement(K, row) for row in self.hnf_basis]
        for k in range(top + 1, j + 1):
            prods = []
            for r in cur:
                x = FieldElement(K, r)
                for b in base:
                    prods.append([int(c) for c in (x * b).coords])
            cur = hnf(prods, K.degree, modulus=self.p ** k)
            with self._lock:
                self._powers.setdefault(k, cur)
        return cur

    def __getstate__(self):
        state = dict(self.__dict__)
        del state["_lock"]
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)
        self._lock = threading.Lock()

    def contains(self, coords, j=1):
        """Membership of an integral element (integer coordinates) in the j-th power."""
        if j <= 0:
            return True
        return hnf_contains(self.power_hnf(j), coords)


def dedekind_ok(g, p, factors):
    """Dedekind's criterion: is Z[t] maximal at p?"""
    rad = [1]
    rest = [1]
    for h, e in factors:
        rad = polys.pmul(rad, h)
        for _ in range(e - 1):
            rest = polys.pmul(rest, h)
    prod = polys.pmul(rad, rest)
    diff = polys.psub(prod, list(g))
    if any(c % p for c in diff):
        raise AssertionError("factorization mod p does not reproduce g")
    F = [c // p for c in diff]
    common = polys.gf_gcd(polys.gf_gcd(F, rad, p), rest, p)
    return len(common) <= 1


def split_prime(K, p):
    """Primes of O_k above ``p`` by Dedekind-Kummer, sorted canonically."""
    cache = K.__dict__.setdefault("_split_cache", {})
    if p in cache:
        return cache[p]
    g = list(K.defining_poly)
    _, facs = polys.gf_factor(g, p)
    if not dedekind_ok(g, p, facs):
        raise IndexDivisor(p, K.poly_str())
    d = K.degree
    out = []
    for h, e in facs:
        gens = [[p if i == j else 0 for i in range(d)] for j in range(d)]
        t = FieldElement(K, h)
        x = t
        for _ in range(d):
            gens.append([int(c) for c in x.coords])
            x = x * K.gen()
        basis = hnf(gens, d, modulus=p)
        f = len(h) - 1
        assert hnf_index(basis) == p ** f
        out.append(PrimeIdeal(K, p, e, f, h, basis))
    out.sort()
    assert sum(q.e * q.f for q in out) == d
    cache[p] = out
    return out


def apply_automorphism_to_prime(K, sigma, q):
    """The prime sigma(q) = (p, sigma(h(t)))."""
    img = sigma(FieldElement(K, q.gen_poly))
    cands = split_prime(K, q.p)
    if len(cands) == 1:
        return cands[0]
    for w in cands:
        if img.is_zero() or valuation(K, w, img) > 0:
            return w
    raise AssertionError(f"no prime above {q.p} contains sigma({q.gen_str()})")


def _vp(n, p):
    n = abs(n)
    k = 0
    while n and n % p == 0:
        n //= p
        k += 1
    return k


def _integral_valuation(q, coords):
    """Valuation of a nonzero integral element with the given integer coordinates."""
    c = 0
    for x in coords:
        c = gcd(c, x)
    k = _vp(c, q.p)
    coords = [x // (q.p ** k) for x in coords]
    base = q.e * k
    K = q.field
    bound = _vp(int(FieldElement(K, coords).norm()), q.p) // q.f
    j = 0
    while j < bound and q.contains(coords, j + 1):
        j += 1
    return base + j


def valuation(K, prime, a):
    """ord_p(a) for a nonzero element ``a``."""
    if a.is_zero():
        raise ZeroElement("valuation of zero")
    m = a.denominator()
    return _integral_valuation(prime, a.numerator_coords()) - prime.e * _vp(m, prime.p)


class IdealFactorization:
    """A fractional ideal as an exponent map on prime ideals."""

    def __init__(self, field, factors=None):
        self.field = field
        self.factors = {q: int(v) for q, v in (factors or {}).items() if v}

    def items(self):
        return sorted(self.factors.items())

    def primes(self):
        return sorted(self.factors)

    def __len__(self):
        return len(self.factors)

    def __bool__(self):
        return bool(self.factors)

    def is_unit(self):
        return not self.factors

    def __getitem__(self, q):
        return self.factors.get(q, 0)

    def __mul__(self, other):
        out = dict(self.factors)
        for q, v in other.factors.items():
            out[q] = out.get(q, 0) + v
        return IdealFactorization(self.field, out)

    def __pow__(self, n):
        return IdealFactorization(self.field, {q: v * n for q, v in self.factors.items()})

    def inverse(self):
        return self ** -1

    def norm(self):
        return ideal_norm(self)

    def __eq__(self, other):
        if not isinstance(other, IdealFactorization):
            return NotImplemented
        return ideal_equal(self, other)

    def __hash__(self):
        return hash(tuple((q.key, v) for q, v in self.items()))

    def to_json(self):
        return [{"p": q.p, "f": q.f, "e": q.e, "exp": v, "gen": q.gen_str()} for q, v in self.items()]

    def __repr__(self):
        inner = ", ".join(f"({q.p}, {q.gen_str()})^{v}" for q, v in self.items())
        return f"IdealFactorization({inner or '1'})"


class PlaceSet:
    """Archimedean places plus a finite set of primes."""

    def __init__(self, finite_places, include_archimedean=True):
        self.finite_places = frozenset(finite_places)
        self.include_archimedean = include_archimedean

    def __contains__(self, q):
        return q in self.finite_places

    def rational_primes(self):
        return sorted({q.p for q in self.finite_places})

    def __repr__(self):
        inner = ", ".join(f"({q.p}, {q.gen_str()})" for q in sorted(self.finite_places))
        return f"PlaceSet(inf, {inner})"


def place_set(K, primes=(), close=True):
    """Build S from rational primes and/or PrimeIdeals.

    With ``close`` (the default) every prime above a rational prime that
    occurs is included, as required for S-unit families.
    """
    out = set()
    for item in primes:
        if isinstance(item, PrimeIdeal):
            if close:
                out.update(split_prime(K, item.p))
            else:
                out.add(item)
        else:
            out.update(split_prime(K, int(item)))
    return PlaceSet(out)


def _factor_int(n):
    n = abs(int(n))
    if n <= 1:
        return {}
    return factorint(n)


def factor_principal(K, a):
    """Factorization of the fractional ideal a*O_k."""
    if a.is_zero():
        raise ZeroElement("cannot factor the zero ideal")
    m = a.denominator()
    A = FieldElement(K, a.numerator_coords())
    nA = int(A.norm())
    ps = set(_factor_int(nA)) | set(_factor_int(m))
    out = {}
    for p in sorted(ps):
        total = 0
        for q in split_prime(K, p):
            v = valuation(K, q, a)
            if v:
                out[q] = v
                total += q.f * v
        expected = _vp(nA, p) - K.degree * _vp(m, p)
        if total != expected:
            raise AssertionError(f"valuation bookkeeping failed at p={p}: {total} != {expected}")
    return IdealFactorization(K, out)


def s_reduce(F, S):
    """Drop the primes of S; the rest must have nonnegative exponents."""
    out = {}
    for q, v in F.factors.items():
        if q in S:
            continue
        if v < 0:
            raise NegativeExponentOutsideS(f"exponent {v} at {q} outside S")
        out[q] = v
    return IdealFactorization(F.field, out)


def deg_gt1_part(F):
    """Part of F supported on primes of residue degree > 1."""
    if any(v < 0 for v in F.factors.values()):
        raise ValueError("deg_gt1_part expects an integral ideal")
    return IdealFactorization(F.field, {q: v for q, v in F.factors.items() if q.f > 1})


def ideal_norm(F):
    out = Fraction(1)
    for q, v in F.factors.items():
        out *= Fraction(q.p) ** (q.f * v)
    return out


def ideal_equal(F1, F2):
    return F1.field == F2.field and F1.items() == F2.items()

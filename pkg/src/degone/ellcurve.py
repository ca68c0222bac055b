"""Elliptic curves y^2 = x^3 + a x + b over k, points over an extension l.

Covers the exact group law, automorphisms of E and of l/k, the denominator
ideals I_Q(P), I_D(P) (with half-integer exponents), their part J_D(P)
supported on primes of relative degree > 1, the matching local-height
decomposition, and nP family scans with exceptional-coset detection.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional

import mpmath
from mpmath import mp

from .errors import (
    BudgetExceeded, EqualPoints, IndexDivisor, NotOnCurve, OnSupport, TorsionPoint,
)
from .heights import (
    ArchPlace, HeightReport, LocalHeight, _log, abs_height, arch_places, split_local_heights,
)
from .idealfact import (
    PlaceSet, PrimeIdeal, apply_automorphism_to_prime, factor_principal, split_prime, valuation,
)
from .qfield import FieldElement, complex_values, roots_in_field, sqrt_in_field
from .report import ExperimentRow

__all__ = [
    "FieldExtension", "EllCurve", "EllPoint", "INFINITY", "HalfExponentIdeal",
    "DivisorSpecEll", "CurveAutomorphism", "ExceptionalWitness",
    "ell_add", "ell_neg", "ell_mul", "ideal_IQ", "ideal_ID", "ideal_JD",
    "ell_height_report", "run_ell_family", "is_exceptional_ell", "curve_automorphisms",
    "search_points", "is_torsion", "ell_place_set", "ideal_sigma_stable",
]

TORSION_SCAN = 16


class FieldExtension:
    """A tower l/k, with k embedded in l by the image of k's generator."""

    def __init__(self, k, l, k_gen_image=None):
        self.k = k
        self.l = l
        if k_gen_image is None:
            if k.degree == 1:
                k_gen_image = l(k.gen().coords[0])
            elif k == l:
                k_gen_image = l.gen()
            else:
                raise ValueError("an embedding of k into l must be given")
        self.k_gen_image = l(k_gen_image)
        if self.lift_poly(list(k.defining_poly)) != 0:
            raise ValueError("image of k's generator is not a root of k's polynomial")
        if l.degree % k.degree:
            raise ValueError("[l:Q] must be divisible by [k:Q]")
        self.rel_degree = l.degree // k.degree
        self.sigmas = tuple(s for s in l.automorphisms if s(self.k_gen_image) == self.k_gen_image)
        self._rel_cache = {}

    def lift_poly(self, coeffs):
        acc = self.l.zero()
        for c in reversed(coeffs):
            acc = acc * self.k_gen_image + c
        return acc

    def lift(self, a):
        """Image in l of an element of k."""
        if isinstance(a, FieldElement) and a.field == self.l and self.k != self.l:
            raise ValueError("element already lies in l")
        if isinstance(a, FieldElement):
            return self.lift_poly(list(a.coords))
        return self.l(a)

    def prime_below(self, w):
        """The prime of k under the prime w of l."""
        cands = split_prime(self.k, w.p)
        if len(cands) == 1:
            return cands[0]
        for v in cands:
            h = self.lift_poly(list(v.gen_poly))
            if h.is_zero() or valuation(self.l, w, h) > 0:
                return v
        raise AssertionError(f"no prime of k below {w}")

    def rel_residue_degree(self, w):
        """f_{w/v} = f_w / f_v."""
        if w not in self._rel_cache:
            v = self.prime_below(w)
            self._rel_cache[w] = w.f // v.f
        return self._rel_cache[w]

    def rel_ramification(self, w):
        return w.e // self.prime_below(w).e

    def __repr__(self):
        return f"FieldExtension(l={self.l.poly_str()} / k={self.k.poly_str()})"


class EllPoint(NamedTuple):
    """Affine point (x, y) over l, or the point at infinity (x = y = None)."""

    x: Optional[FieldElement]
    y: Optional[FieldElement]

    @property
    def is_infinity(self):
        return self.x is None

    def __str__(self):
        if self.is_infinity:
            return "inf"
        return f"({self.x}, {self.y})"


INFINITY = EllPoint(None, None)


class EllCurve:
    """y^2 = x^3 + a x + b with a, b integral in k; points live over l."""

    def __init__(self, a, b, rel):
        k = rel.k
        self.a = k(a)
        self.b = k(b)
        if self.a.denominator() != 1 or self.b.denominator() != 1:
            raise ValueError("a and b must have integral coordinates")
        self.base_field = k
        self.ext_field = rel.l
        self.rel = rel
        self.disc = -16 * (4 * self.a ** 3 + 27 * self.b ** 2)
        if self.disc.is_zero():
            raise ValueError("singular curve")
        self.al = rel.lift(self.a)
        self.bl = rel.lift(self.b)

    def point(self, x, y):
        l = self.ext_field
        P = EllPoint(l(x), l(y))
        self.check(P)
        return P

    def contains(self, P):
        if P.is_infinity:
            return True
        return P.y * P.y == P.x ** 3 + self.al * P.x + self.bl

    def check(self, P):
        if not self.contains(P):
            raise NotOnCurve(f"{P} is not on {self}")

    def __repr__(self):
        return f"EllCurve(y^2 = x^3 + ({self.a})x + ({self.b}))"


def ell_neg(E, P):
    if P.is_infinity:
        return P
    return EllPoint(P.x, -P.y)


def _add(E, P, Q):
    if P.is_infinity:
        return Q
    if Q.is_infinity:
        return P
    if P.x == Q.x:
        if (P.y + Q.y).is_zero():
            return INFINITY
        lam = (3 * P.x * P.x + E.al) / (2 * P.y)
    else:
        lam = (Q.y - P.y) / (Q.x - P.x)
    x3 = lam * lam - P.x - Q.x
    y3 = lam * (P.x - x3) - P.y
    return EllPoint(x3, y3)


def ell_add(E, P, Q):
    """Chord-and-tangent sum of two points."""
    E.check(P)
    E.check(Q)
    return _add(E, P, Q)


def ell_mul(E, n, P):
    """n*P by double-and-add (n may be negative)."""
    E.check(P)
    if n < 0:
        n, P = -n, ell_neg(E, P)
    result = INFINITY
    base = P
    while n:
        if n & 1:
            result = _add(E, result, base)
        n >>= 1
        if n:
            base = _add(E, base, base)
    return result


def ell_sub(E, P, Q):
    return _add(E, P, ell_neg(E, Q))


def is_torsion(E, P, bound=TORSION_SCAN):
    """Smallest m <= bound with mP = inf, else None."""
    Q = P
    for m in range(1, bound + 1):
        if Q.is_infinity:
            return m
        Q = _add(E, Q, P)
    return None


def apply_sigma(sigma, P):
    if P.is_infinity:
        return P
    return EllPoint(sigma(P.x), sigma(P.y))


class CurveAutomorphism(NamedTuple):
    """(x, y) -> (u^2 x, u^3 y) for a root of unity u in l."""

    kind: str
    u: FieldElement
    label: str

    def __call__(self, P):
        if P.is_infinity:
            return P
        return EllPoint(self.u ** 2 * P.x, self.u ** 3 * P.y)


def curve_automorphisms(E):
    """Aut(E) realised over l: u in mu_2, or mu_4 (a = 0 ... b = 0 curves), mu_6 (a = 0)."""
    l = E.ext_field
    if E.b.is_zero():
        h, kind = [-1, 0, 0, 0, 1], "i_twist"
    elif E.a.is_zero():
        h, kind = [-1, 0, 0, 0, 0, 0, 1], "zeta3_twist"
    else:
        h, kind = [-1, 0, 1], None
    try:
        units = roots_in_field(l, h)
    except ValueError:
        units = roots_in_field(l, [-1, 0, 1])
    out = []
    for u in units:
        if u == 1:
            out.append(CurveAutomorphism("id", u, "id"))
        elif u == -1:
            out.append(CurveAutomorphism("neg", u, "neg"))
        else:
            out.append(CurveAutomorphism(kind, u, f"{kind}[u={u}]"))
    order = {"id": 0, "neg": 1}
    out.sort(key=lambda nu: (order.get(nu.kind, 2), nu.label))
    return out


class ExceptionalWitness(NamedTuple):
    exceptional: bool
    m: Optional[int] = None
    nu: Optional[str] = None
    sigma: Optional[str] = None

    def __str__(self):
        if not self.exceptional:
            return "not exceptional"
        return f"exceptional: sigma({self.m}P) = {self.nu}({self.m}P) with sigma = {self.sigma}"


def is_exceptional_ell(E, rel, sigma, P, m_max=8):
    """Search m <= m_max and nu in Aut(E) with sigma(mP) = nu(mP).

    ``sigma`` may be a single automorphism of l fixing k or None, in which
    case every nontrivial automorphism of l/k is tried.
    """
    sigmas = rel.sigmas if sigma is None else (sigma,)
    l = rel.l
    for s in sigmas:
        if s.image_of_theta == l.gen():
            raise ValueError("sigma must be nontrivial on l")
        if s(rel.k_gen_image) != rel.k_gen_image:
            raise ValueError("sigma must fix k")
    nus = curve_automorphisms(E)
    Q = INFINITY
    for m in range(1, m_max + 1):
        Q = _add(E, Q, P)
        for s in sigmas:
            sQ = apply_sigma(s, Q)
            for nu in nus:
                if sQ == nu(Q):
                    return ExceptionalWitness(True, m, nu.label, s.label)
    return ExceptionalWitness(False)


class HalfExponentIdeal:
    """Ideal with positive rational (half-integer) exponents."""

    def __init__(self, field, factors=None):
        self.field = field
        self.factors = {q: Fraction(v) for q, v in (factors or {}).items() if v}

    def items(self):
        return sorted(self.factors.items())

    def __mul__(self, other):
        out = dict(self.factors)
        for q, v in other.factors.items():
            out[q] = out.get(q, 0) + v
        return HalfExponentIdeal(self.field, out)

    def __pow__(self, n):
        return HalfExponentIdeal(self.field, {q: v * n for q, v in self.factors.items()})

    def __eq__(self, other):
        return isinstance(other, HalfExponentIdeal) and self.items() == other.items()

    def __bool__(self):
        return bool(self.factors)

    def log_coefficients(self):
        """log N(I) as {p: c} meaning sum of c * log p, exactly."""
        out = {}
        for q, v in self.factors.items():
            out[q.p] = out.get(q.p, 0) + v * q.f
        return {p: c for p, c in sorted(out.items()) if c}

    def norm_squared(self):
        """N(I)^2, always a positive rational."""
        out = Fraction(1)
        for p, c in self.log_coefficients().items():
            out *= Fraction(p) ** int(2 * c)
        return out

    def norm(self):
        """N(I): exact Fraction when integral exponents, else an mpf."""
        coeffs = self.log_coefficients()
        if all(c.denominator == 1 for c in coeffs.values()):
            out = Fraction(1)
            for p, c in coeffs.items():
                out *= Fraction(p) ** int(c)
            return out
        return mpmath.sqrt(mpmath.mpf(self.norm_squared().numerator) / self.norm_squared().denominator)

    def log_norm(self):
        return mpmath.fsum(c.numerator * _log(p) / c.denominator for p, c in self.log_coefficients().items())

    def has_half_exponent(self):
        return any(v.denominator != 1 for v in self.factors.values())

    def to_json(self):
        return [{"p": q.p, "f": q.f, "e": q.e, "exp": str(v), "gen": q.gen_str()} for q, v in self.items()]

    def __repr__(self):
        inner = ", ".join(f"({q.p}, {q.gen_str()})^{v}" for q, v in self.items())
        return f"HalfExponentIdeal({inner or '1'})"


class DivisorSpecEll:
    """Effective divisor sum m_i (Q_i) on E."""

    def __init__(self, points, labels=None):
        pts = [(P, int(m)) for P, m in points]
        if not pts or any(m <= 0 for _, m in pts):
            raise ValueError("divisor must be nonempty and effective")
        self.points = tuple(pts)
        self.labels = labels

    def support(self):
        return [P for P, _ in self.points]

    def __add__(self, other):
        return DivisorSpecEll(self.points + other.points)

    def __repr__(self):
        return "DivisorSpecEll(" + " + ".join(f"{m}({P})" for P, m in self.points) + ")"


def _x_of_difference(E, Q, P):
    if P == Q:
        raise EqualPoints(f"P = Q = {P}")
    return ell_sub(E, P, Q).x


def ideal_IQ(E, Q, P):
    """prod p^max(-ord_p(x0)/2, 0) with x0 = x(P - Q)."""
    E.check(P)
    E.check(Q)
    x0 = _x_of_difference(E, Q, P)
    l = E.ext_field
    if x0.is_zero():
        return HalfExponentIdeal(l)
    F = factor_principal(l, x0)
    return HalfExponentIdeal(l, {q: Fraction(-v, 2) for q, v in F.factors.items() if v < 0})


def _check_support(D, P):
    if P in D.support():
        raise OnSupport(f"{P} lies in the support of the divisor")


def ideal_ID(E, D, P):
    _check_support(D, P)
    out = HalfExponentIdeal(E.ext_field)
    for Q, m in D.points:
        out = out * ideal_IQ(E, Q, P) ** m
    return out


def ideal_JD(E, D, P, rel):
    """Part of I_D(P) on primes w with f_{w/v} > 1."""
    I = ideal_ID(E, D, P)
    return HalfExponentIdeal(I.field, {q: v for q, v in I.factors.items()
                                       if rel.rel_residue_degree(q) > 1})


def ell_height_report(E, D, rel, P):
    """Local heights 1/2 log+|x(P - Q_i)|_w split by relative residue degree.

    Finite local heights reproduce log N(I_D(P)) / [l:Q] exactly, so the
    f_{w/v} > 1 bucket equals log N(J_D(P)) / [l:Q]; archimedean places sit in
    the degree-one bucket.
    """
    _check_support(D, P)
    l = E.ext_field
    d = l.degree
    local = []
    finite_coeffs = {}
    with mp.workprec(l.precision + 32):
        for Q, mult in D.points:
            x0 = _x_of_difference(E, Q, P)
            if x0.is_zero():
                continue
            vals, _ = complex_values(l, x0)
            for v in arch_places(l):
                lam = max(mpmath.mpf(0), v.weight * mpmath.log(abs(vals[v.index])) / (2 * d))
                local.append(LocalHeight(v, 1, mult * lam))
            for q, e in factor_principal(l, x0).items():
                if e < 0:
                    c = Fraction(-e * q.f * mult, 2)
                    finite_coeffs[q.p] = finite_coeffs.get(q.p, 0) + c
                    local.append(LocalHeight(q, rel.rel_residue_degree(q),
                                             c.numerator * _log(q.p) / (c.denominator * d)))
        I = ideal_ID(E, D, P)
        J = HalfExponentIdeal(l, {q: v for q, v in I.factors.items() if rel.rel_residue_degree(q) > 1})
        h_deg1, h_gt1 = split_local_heights(local)
        h_D = mpmath.fsum(lh.value for lh in local)
        h_x = abs_height(l, P.x) if not P.is_infinity else mpmath.mpf(0)
        rep = HeightReport(
            h_abs=h_x, h_D=h_D, h_deg1=h_deg1, h_deg_gt1=h_gt1, norm_I=I.norm(), norm_J=J.norm(),
            c_u=None, ratio=(h_gt1 / h_D if h_D > 0 else None), local_heights=local,
            ideal_I=I, ideal_J=J, degree=d,
        )
        rep.finite_log_coefficients = {p: c for p, c in sorted(finite_coeffs.items()) if c}
        return rep


def ell_place_set(rel):
    """Primes of l ramified over k (archimedean places are implicit)."""
    from sympy import factorint

    out = set()
    for p in sorted(factorint(abs(int(rel.l.disc_g)))):
        for w in split_prime(rel.l, p):
            if rel.rel_ramification(w) > 1:
                out.add(w)
    return PlaceSet(out)


def ideal_sigma_stable(I, sigma, S=None):
    """Whether sigma(I) = I after discarding the primes in S."""
    K = I.field
    keep = {q: v for q, v in I.factors.items() if S is None or q not in S}
    moved = {apply_automorphism_to_prime(K, sigma, q): v for q, v in keep.items()}
    return moved == keep


def search_points(E, bound=3, limit=20):
    """Points with x = sum c_i t^i, |c_i| <= bound, found via exact square roots in l."""
    import itertools

    l = E.ext_field
    found = []
    rng = range(-bound, bound + 1)
    for coords in itertools.product(rng, repeat=l.degree):
        x = l(list(coords))
        rhs = x ** 3 + E.al * x + E.bl
        y = sqrt_in_field(l, rhs)
        if y is None:
            continue
        for yy in ([y] if y.is_zero() else [y, -y]):
            found.append(EllPoint(x, yy))
            if len(found) >= limit:
                return found
    return found


def run_ell_family(E, D, rel, P, n_range, epsilon, sigma=None, m_max=8,
                   height_budget=400.0, on_budget="stop"):
    """Rows for nP, n in ``n_range``, with the exceptional witness attached to each row.

    ``height_budget`` caps the naive height h(x(nP)).  A row above it is
    marked ``budget``; ``on_budget`` then selects "stop" (end the scan),
    "continue" (mark and go on) or "raise" (:class:`BudgetExceeded`).
    """
    if on_budget not in ("stop", "continue", "raise"):
        raise ValueError("on_budget must be 'stop', 'continue' or 'raise'")
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    E.check(P)
    tors = is_torsion(E, P)
    if tors is not None:
        raise TorsionPoint(f"{P} has order {tors}")
    wit = is_exceptional_ell(E, rel, sigma, P, m_max) if (rel.sigmas or sigma) else ExceptionalWitness(False)
    rows = []
    for n in sorted(n_range):
        nP = ell_mul(E, n, P)
        row = ExperimentRow(n=n, u=str(nP), m_witness=wit.m, nu_witness=wit.nu,
                            exceptional=wit.exceptional)
        if nP in D.support():
            row.skip = "on_support"
            rows.append(row)
            continue
        h_x = abs_height(E.ext_field, nP.x) if not nP.is_infinity else mpmath.mpf(0)
        if h_x > height_budget:
            if on_budget == "raise":
                raise BudgetExceeded(f"h(x({n}P)) = {float(h_x):.6g} exceeds budget {height_budget}")
            row.skip = "budget"
            row.h_u = h_x
            rows.append(row)
            if on_budget == "stop":
                break
            continue
        rep = ell_height_report(E, D, rel, nP)
        row.h_u = rep.h_abs
        row.h_D = rep.h_D
        row.h_deg1 = rep.h_deg1
        row.h_deg_gt1 = rep.h_deg_gt1
        row.norm_I = rep.norm_I
        row.norm_J = rep.norm_J
        row.flag_eps = bool(rep.h_deg_gt1 < epsilon * rep.h_D)
        row.half_exp = rep.ideal_I.has_half_exponent()
        row.report = rep
        rows.append(row)
    return rows

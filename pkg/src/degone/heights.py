"""Weil heights, local heights for divisors on G_m, and degree-one splits.

Normalization: all logarithmic heights are absolute, i.e. a place v of k
contributes ``n_v/d * log|x|_v`` with n_v the local degree (1 real, 2
complex, f_p for finite primes measured through log N(p) = f_p log p).
Relative quantities (H_k, log N(I)) are absolute values times d.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Optional

import mpmath
from mpmath import mp

from .errors import NotAnSUnit, OnDivisor, PrecisionExhausted, ZeroElement
from .idealfact import (
    PlaceSet, PrimeIdeal, deg_gt1_part, factor_principal, ideal_norm, s_reduce, valuation,
)
from .qfield import FieldElement, complex_values, element_minimal_poly, polyroots
from .polys import primitive_part

__all__ = [
    "ArchPlace", "LocalHeight", "HeightReport", "DivisorSpecGm", "abs_height",
    "mahler_height", "places_height", "log_abs_values", "local_height_gm",
    "gm_height_report", "DEFAULT_TOL",
]

DEFAULT_TOL = 1e-9


class ArchPlace(NamedTuple):
    """An archimedean place: embedding index and weight (1 real, 2 complex)."""

    index: int
    weight: int

    @property
    def label(self):
        return f"inf{self.index}"


def arch_places(K):
    return [ArchPlace(i, w) for i, w in K.arch_places]


def place_degree(v):
    """Residue degree f_v, with f_v = 1 at archimedean places."""
    return 1 if isinstance(v, ArchPlace) else v.f


def place_label(v):
    return v.label if isinstance(v, ArchPlace) else f"({v.p}, {v.gen_str()})"


def _log(n):
    """Natural log of a positive int or Fraction at the working precision."""
    n = Fraction(n)
    return mpmath.log(mpmath.mpf(n.numerator)) - mpmath.log(mpmath.mpf(n.denominator))


def mahler_height(K, a):
    """h(a) from the Mahler measure of the primitive minimal polynomial of a."""
    if a.is_zero():
        return mpmath.mpf(0)
    m = primitive_part(element_minimal_poly(K, a))
    deg = len(m) - 1
    with mp.workprec(K.precision + 32):
        if deg == 1:
            roots = [mpmath.mpf(-m[0]) / m[1]]
        else:
            roots = polyroots(list(reversed(m)), maxsteps=500, extraprec=2 * K.precision)
        total = _log(m[-1]) + mpmath.fsum(max(mpmath.mpf(0), mpmath.log(abs(r))) for r in roots)
        return total / deg


def log_abs_values(K, a):
    """Absolute-normalized ``log|a|_v`` for the archimedean places and the primes in supp(a).

    Returns a list of (place, value) pairs; the values sum to zero by the
    product formula.
    """
    if a.is_zero():
        raise ZeroElement("log|0|_v is undefined")
    d = K.degree
    vals, _ = complex_values(K, a)
    out = []
    with mp.workprec(K.precision + 32):
        for v in arch_places(K):
            out.append((v, v.weight * mpmath.log(abs(vals[v.index])) / d))
        for q, e in factor_principal(K, a).items():
            out.append((q, -e * q.f * _log(q.p) / d))
    return out


def places_height(K, a):
    """h(a) as a sum over places of log+|a|_v."""
    if a.is_zero():
        return mpmath.mpf(0)
    with mp.workprec(K.precision + 32):
        return mpmath.fsum(max(mpmath.mpf(0), x) for _, x in log_abs_values(K, a))


def abs_height(K, a, tol=DEFAULT_TOL):
    """Absolute logarithmic Weil height, cross-checked by two routes.

    The Mahler-measure value is returned; a disagreement with the sum over
    places beyond ``tol`` raises :class:`PrecisionExhausted`.
    """
    h1 = mahler_height(K, a)
    h2 = places_height(K, a)
    if abs(h1 - h2) > tol:
        raise PrecisionExhausted(f"height routes disagree: {h1} vs {h2}")
    return h1


class DivisorSpecGm:
    """Divisor on P^1 minus {0, inf} cut out by a polynomial f with O_k coefficients."""

    def __init__(self, K, f_poly, factors_over_L=None):
        coeffs = [K(c) for c in f_poly]
        while coeffs and coeffs[-1].is_zero():
            coeffs.pop()
        if len(coeffs) < 2:
            raise ValueError("f must be nonconstant")
        if coeffs[0].is_zero():
            raise ValueError("f(0) must be nonzero")
        self.field = K
        self.f_poly = tuple(coeffs)
        self.factors_over_L = factors_over_L

    def __call__(self, a):
        acc = self.field.zero()
        for c in reversed(self.f_poly):
            acc = acc * a + c
        return acc

    def __repr__(self):
        return "DivisorSpecGm(" + " + ".join(f"({c})*x^{i}" for i, c in enumerate(self.f_poly) if c) + ")"


class LocalHeight(NamedTuple):
    place: object
    f_v: int
    value: object  # mpf


def local_height_gm(K, D, v, a, fa=None):
    """max(0, -log|f(a)|_v) in the absolute normalization."""
    fa = D(a) if fa is None else fa
    if fa.is_zero():
        raise OnDivisor(f"f({a}) = 0")
    d = K.degree
    with mp.workprec(K.precision + 32):
        if isinstance(v, ArchPlace):
            vals, _ = complex_values(K, fa)
            x = -v.weight * mpmath.log(abs(vals[v.index])) / d
        else:
            x = valuation(K, v, fa) * v.f * _log(v.p) / d
        return max(mpmath.mpf(0), x)


@dataclass
class HeightReport:
    """Height bookkeeping for one point; reals are mpmath numbers."""

    h_abs: object
    h_D: object
    h_deg1: object
    h_deg_gt1: object
    norm_I: object
    norm_J: object
    c_u: object
    ratio: Optional[object]
    log_c_u: object = None
    log_Hk: object = None
    cu_residual: object = None
    local_heights: list = field(default_factory=list)
    ideal_I: object = None
    ideal_J: object = None
    degree: int = 1

    def partition_residual(self):
        """|h_deg1 + h_deg_gt1 - sum of all local heights|."""
        total = mpmath.fsum(lh.value for lh in self.local_heights)
        return abs(self.h_deg1 + self.h_deg_gt1 - total)

    def to_dict(self):
        return {
            "h_abs": _num(self.h_abs), "h_D": _num(self.h_D), "h_deg1": _num(self.h_deg1),
            "h_deg_gt1": _num(self.h_deg_gt1), "norm_I": _exact(self.norm_I),
            "norm_J": _exact(self.norm_J), "c_u": _num(self.c_u), "ratio": _num(self.ratio),
        }


def _num(x):
    if x is None:
        return None
    return float(x)


def _exact(x):
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else str(x)
    return _num(x)


def split_local_heights(local):
    """Sum local heights into the (f_v = 1, f_v > 1) buckets."""
    deg1 = mpmath.fsum(lh.value for lh in local if lh.f_v == 1)
    gt1 = mpmath.fsum(lh.value for lh in local if lh.f_v > 1)
    return deg1, gt1


def check_s_unit(K, u, S):
    F = factor_principal(K, u)
    outside = [q for q in F.factors if q not in S]
    if outside:
        raise NotAnSUnit(f"{u} has support outside S at {outside}")
    return F


def gm_height_report(K, D, S, u, tol=DEFAULT_TOL, h_u=None, exclude_S=False):
    """Degree-one decomposition of h_D(u) for an S-unit u.

    With ``exclude_S`` the places of S (archimedean included) are dropped
    from both buckets; by default every place is kept and archimedean
    places count as degree one.
    """
    check_s_unit(K, u, S)
    fu = D(u)
    if fu.is_zero():
        raise OnDivisor(f"f({u}) = 0")
    d = K.degree
    F = factor_principal(K, fu)
    I = s_reduce(F, S)
    J = deg_gt1_part(I)
    norm_I = ideal_norm(I)
    norm_J = ideal_norm(J)
    with mp.workprec(K.precision + 32):
        vals, _ = complex_values(K, fu)
        local = []
        log_cu = mpmath.mpf(0)
        for v in arch_places(K):
            x = max(mpmath.mpf(0), -v.weight * mpmath.log(abs(vals[v.index])) / d)
            log_cu += d * x
            if not exclude_S:
                local.append(LocalHeight(v, 1, x))
        finite = sorted(set(F.factors) | set(S.finite_places))
        for q in finite:
            x = max(mpmath.mpf(0), F[q] * q.f * _log(q.p) / d)
            if q in S:
                log_cu += d * x
                if exclude_S:
                    continue
            local.append(LocalHeight(q, q.f, x))
        h_deg1, h_gt1 = split_local_heights(local)
        h_D = mpmath.fsum(lh.value for lh in local)
        if h_u is None:
            h_u = abs_height(K, u, tol)
        log_Hk = d * mahler_height(K, fu)
        residual = abs(log_Hk - log_cu - _log(norm_I))
        ratio = _log(norm_J) / (d * h_u) if h_u > 0 else None
        return HeightReport(
            h_abs=h_u, h_D=h_D, h_deg1=h_deg1, h_deg_gt1=h_gt1, norm_I=norm_I,
            norm_J=norm_J, c_u=mpmath.exp(log_cu), ratio=ratio, log_c_u=log_cu,
            log_Hk=log_Hk, cu_residual=residual, local_heights=local, ideal_I=I,
            ideal_J=J, degree=d,
        )

"""S-unit power families u = a^n, exceptional-set checks, and the Fibonacci example."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import mpmath
from mpmath import mp
from sympy import isprime

from .errors import DegoneError, NotAnSUnit, OnDivisor
from .heights import DEFAULT_TOL, DivisorSpecGm, _log, abs_height, check_s_unit, gm_height_report
from .idealfact import (
    deg_gt1_part, factor_principal, ideal_equal, ideal_norm, place_set, s_reduce,
)
from .qfield import (
    Automorphism, FieldElement, element_minimal_poly, is_root_of_unity, make_field,
)
from .report import ExperimentRow

__all__ = [
    "GmExperiment", "CosetSpec", "Classification", "FibRow", "VerificationFailure",
    "run_gm_family", "classify_base", "check_corollary22_conditions", "coset_member",
    "fib_demo", "fibonacci",
]


class VerificationFailure(DegoneError, AssertionError):
    exit_code = 1

    def __init__(self, message, table=None):
        super().__init__(message)
        self.table = table


@dataclass
class GmExperiment:
    field: object
    divisor: DivisorSpecGm
    S: object
    base: FieldElement
    n_range: range
    epsilon: float
    m_max: int = 12
    tol: float = DEFAULT_TOL
    exclude_S: bool = False

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.base.is_zero():
            raise NotAnSUnit("0 is not an S-unit")
        check_s_unit(self.field, self.base, self.S)


class CosetSpec(NamedTuple):
    """u0 * O*^sigma (twisted=False) or u0 * O*^(sigma tau) (twisted=True)."""

    u0: FieldElement
    sigma: Automorphism
    twisted: bool = False


class Classification(NamedTuple):
    kind: str  # "clean" | "violates_a" | "violates_b"
    m: Optional[int] = None
    sigma: Optional[Automorphism] = None

    def __str__(self):
        if self.kind == "violates_a":
            return f"violates_a(m={self.m})"
        if self.kind == "violates_b":
            return f"violates_b(sigma={self.sigma.label}, m={self.m})"
        return "clean"


def _row_for(X, n):
    K = X.field
    u = X.base ** n
    row = ExperimentRow(n=n, u=str(u))
    try:
        rep = gm_height_report(K, X.divisor, X.S, u, tol=X.tol, exclude_S=X.exclude_S)
    except OnDivisor:
        row.skip = "on_divisor"
        return row
    with mp.workprec(K.precision + 32):
        lhs = _log(rep.norm_J)
        row.flag_eps = bool(lhs < X.epsilon * rep.h_abs)
    row.h_u = rep.h_abs
    row.h_D = rep.h_D
    row.h_deg1 = rep.h_deg1
    row.h_deg_gt1 = rep.h_deg_gt1
    row.norm_I = rep.norm_I
    row.norm_J = rep.norm_J
    row.c_u = rep.c_u
    row.report = rep
    return row


def _row_job(args):
    X, n = args
    row = _row_for(X, n)
    row.report = None
    return row


def run_gm_family(X, jobs=1):
    """One row per n in ``X.n_range`` (increasing n).

    Each row records the degree-one decomposition of h_D(a^n) and whether
    N(J(f(a^n))) < H(a^n)^epsilon.  ``jobs > 1`` evaluates rows in worker
    processes; the output order is unchanged and rows then carry no
    attached report.
    """
    ns = sorted(X.n_range)
    if jobs > 1 and len(ns) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(_row_job, [(X, n) for n in ns]))
    return [_row_for(X, n) for n in ns]


def classify_base(K, a, m_max=12):
    """Test the two hypotheses that make a^n a non-exceptional family.

    (a) fails when some a^m (m <= m_max) lies in a proper subfield, detected
    by the degree of its minimal polynomial.  (b) fails when, for a stored
    involution sigma, a * sigma(a) is a root of unity, i.e. the relative norm
    of some a^m is 1.
    """
    if is_root_of_unity(K, a)[0]:
        raise ValueError(f"{a} is a root of unity")
    cur = K.one()
    for m in range(1, m_max + 1):
        cur = cur * a
        if len(element_minimal_poly(K, cur)) - 1 < K.degree:
            return Classification("violates_a", m)
    for sigma in K.automorphisms:
        if sigma.order != 2:
            continue
        flag, order = is_root_of_unity(K, a * sigma(a))
        if flag:
            return Classification("violates_b", order, sigma)
    return Classification("clean")


check_corollary22_conditions = classify_base  # name used by older callers


def coset_member(C, u):
    w = u / C.u0
    img = C.sigma(w)
    if C.twisted:
        return img == w.inverse()
    return img == w


def fibonacci(n):
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a


@dataclass
class FibRow:
    n: int
    F_n: int
    ideal_ok: bool
    scalar_ok: bool
    inert_prime: bool
    norm_J: object
    ideal: list = field(default_factory=list)

    @property
    def ok(self):
        return self.ideal_ok and self.scalar_ok


def fib_demo(n_max, strict=True, precision=192):
    """Check (phi^(2n) + 1) O_{k,S} = F_n O_{k,S} in Q(sqrt 5), S = {inf, (sqrt 5)}, for odd n."""
    if not isinstance(n_max, int) or n_max < 1 or n_max % 2 == 0:
        raise ValueError("n_max must be an odd positive integer")
    K = make_field([-1, -1, 1], precision=precision)
    phi = K.gen()
    sqrt5 = 2 * phi - 1
    S = place_set(K, [5])
    rows = []
    for n in range(1, n_max + 1, 2):
        Fn = fibonacci(n)
        value = phi ** (2 * n) + 1
        lhs = s_reduce(factor_principal(K, value), S)
        rhs = s_reduce(factor_principal(K, K(Fn)), S)
        scalar_ok = value / (phi ** n * sqrt5) == Fn
        inert = isprime(Fn) and Fn % 5 in (2, 3)
        rows.append(FibRow(n, Fn, ideal_equal(lhs, rhs), scalar_ok, inert,
                           ideal_norm(deg_gt1_part(lhs)), lhs.to_json()))
    if strict and not all(r.ok for r in rows):
        bad = [r.n for r in rows if not r.ok]
        raise VerificationFailure(f"Fibonacci identity failed for n = {bad}", rows)
    return rows

"""Exact arithmetic in a number field k = Q[x]/(g).

Elements are stored by their rational coordinates in the power basis
1, t, ..., t^(d-1), where t is the class of x.  Every arithmetic operation is
exact; complex embeddings are only used for archimedean absolute values and
come with a certified error radius.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import mpmath
from mpmath import mp

from . import polys
from .errors import NotIrreducible, NotMonic, ParseError, PrecisionExhausted, ZeroElement
from .linalg import det, first_dependency

__all__ = [
    "NumberField", "FieldElement", "Automorphism", "make_field",
    "element_minimal_poly", "apply_automorphism", "is_root_of_unity",
    "complex_values", "roots_in_field", "sqrt_in_field", "DEFAULT_PRECISION",
]

DEFAULT_PRECISION = 192


def polyroots(coeffs, maxsteps, extraprec):
    """mpmath.polyroots with non-convergence reported as PrecisionExhausted."""
    try:
        return mpmath.polyroots(coeffs, maxsteps=maxsteps, extraprec=extraprec)
    except mpmath.libmp.NoConvergence as exc:
        raise PrecisionExhausted(f"root finding did not converge: {exc}") from None


def _frac(c):
    return c if isinstance(c, Fraction) else Fraction(c)


class FieldElement:
    """An element of a :class:`NumberField`, immutable."""

    __slots__ = ("field", "coords", "_hash")

    def __init__(self, field, coords):
        d = field.degree
        coords = [_frac(c) for c in coords]
        if len(coords) > d:
            coords = [_frac(c) for c in polys.pmod(coords, field.defining_poly)]
        coords = coords + [Fraction(0)] * (d - len(coords))
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "coords", tuple(coords))
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("FieldElement is immutable")

    def __reduce__(self):
        return (FieldElement, (self.field, self.coords))

    # -- coercion helpers
    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ValueError("elements belong to different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field(other)
        return NotImplemented

    def poly(self):
        return polys.trim(self.coords)

    # -- ring operations
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return FieldElement(self.field, [a + b for a, b in zip(self.coords, other.coords)])

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, [-a for a in self.coords])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return FieldElement(self.field, [a - b for a, b in zip(self.coords, other.coords)])

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        prod = polys.pmul(self.poly(), other.poly())
        return FieldElement(self.field, polys.pmod(prod, self.field.defining_poly))

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ZeroElement("inverse of zero")
        # Extended Euclid over Q: s*a + u*g = 1.
        g = [Fraction(c) for c in self.field.defining_poly]
        r0, r1 = g, [Fraction(c) for c in self.poly()]
        s0, s1 = [], [Fraction(1)]
        while len(r1) > 1:
            q, r = polys.pdivmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, polys.psub(s0, polys.pmul(q, s1))
        c = r1[0]
        return FieldElement(self.field, polys.pscale(s1, 1 / c))

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        base = self
        if n < 0:
            base, n = self.inverse(), -n
        result = self.field.one()
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- predicates and invariants
    def is_zero(self):
        return not any(self.coords)

    def __bool__(self):
        return not self.is_zero()

    def is_rational(self):
        return not any(self.coords[1:])

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coords[0] == other
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.field == other.field and self.coords == other.coords

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash((self.field.defining_poly, self.coords)))
        return self._hash

    def mult_matrix(self):
        """Matrix (rows = images of basis vectors) of multiplication by self."""
        t = self.field.gen()
        rows = []
        cur = self
        for _ in range(self.field.degree):
            rows.append(list(cur.coords))
            cur = cur * t
        return rows

    def norm(self):
        """N_{k/Q}(self) as an exact rational."""
        return det(self.mult_matrix())

    def trace(self):
        m = self.mult_matrix()
        return sum(m[i][i] for i in range(len(m)))

    def denominator(self):
        den = 1
        for c in self.coords:
            den = den * c.denominator // math.gcd(den, c.denominator)
        return den

    def numerator_coords(self):
        """Integer coordinates of ``self * self.denominator()``."""
        den = self.denominator()
        return tuple(int(c * den) for c in self.coords)

    def __repr__(self):
        return f"FieldElement({self})"

    def __str__(self):
        return polys.poly_str(self.poly(), self.field.var)


class Automorphism:
    """A field automorphism, given by the image of the generator."""

    __slots__ = ("image_of_theta", "order", "label")

    def __init__(self, image_of_theta, order, label):
        self.image_of_theta = image_of_theta
        self.order = order
        self.label = label

    def __call__(self, a):
        return apply_automorphism(a.field, self, a)

    def __eq__(self, other):
        return isinstance(other, Automorphism) and self.image_of_theta == other.image_of_theta

    def __hash__(self):
        return hash(self.image_of_theta)

    def __repr__(self):
        return f"Automorphism({self.label}: t -> {self.image_of_theta}, order {self.order})"


class NumberField:
    """The field Q[x]/(g) for a monic irreducible integer polynomial g.

    Build instances with :func:`make_field`.
    """

    def __init__(self, defining_poly, precision, var="t"):
        self.defining_poly = tuple(defining_poly)
        self.degree = len(defining_poly) - 1
        self.precision = precision
        self.var = var
        self.disc_g = polys.discriminant(list(defining_poly))
        self.index_primes = frozenset(_square_divisor_primes(self.disc_g))
        self.embeddings, self.root_radius = _certified_roots(self.defining_poly, precision)
        self.arch_places = _arch_places(self.embeddings)
        self.automorphisms = ()

    def __reduce__(self):
        autos = [(a.image_of_theta.coords, a.label) for a in self.automorphisms]
        return (_rebuild_field, (self.defining_poly, self.precision, self.var, autos))

    # -- element construction
    def __call__(self, value):
        if isinstance(value, FieldElement):
            if value.field != self:
                raise ValueError("element of a different field")
            return value
        if isinstance(value, str):
            return self.element(value)
        if isinstance(value, (list, tuple)):
            return FieldElement(self, value)
        return FieldElement(self, [value])

    def element(self, text):
        """Parse a rational polynomial expression in the generator (``t``)."""
        coeffs = polys.parse_poly(text, names=("t", "theta", self.var))
        return FieldElement(self, coeffs)

    def gen(self):
        if self.degree == 1:
            return FieldElement(self, [-Fraction(self.defining_poly[0])])
        return FieldElement(self, [0, 1])

    def one(self):
        return FieldElement(self, [1])

    def zero(self):
        return FieldElement(self, [0])

    def __eq__(self, other):
        return isinstance(other, NumberField) and self.defining_poly == other.defining_poly

    def __hash__(self):
        return hash(self.defining_poly)

    def __repr__(self):
        return f"NumberField({polys.poly_str(list(self.defining_poly))})"

    def poly_str(self):
        return polys.poly_str(list(self.defining_poly))

    def with_automorphisms(self, images, labels=None):
        """Attach automorphisms given as images of the generator (elements or text)."""
        autos = []
        for i, img in enumerate(images):
            img = self(img)
            label = labels[i] if labels else f"sigma{i + 1}"
            autos.append(_make_automorphism(self, img, label))
        self.automorphisms = tuple(autos)
        return self


def _rebuild_field(poly, precision, var, autos):
    K = NumberField(poly, precision, var=var)
    K.automorphisms = tuple(_make_automorphism(K, FieldElement(K, c), label) for c, label in autos)
    return K


def _make_automorphism(K, image, label):
    if polys.peval(list(K.defining_poly), image) != 0:
        raise ValueError(f"{image} is not a root of {K.poly_str()}")
    t = K.gen()
    cur = image
    order = 1
    while cur != t:
        cur = _eval_at(K, cur, image)
        order += 1
        if order > K.degree * 2 + 2:
            raise ValueError("generator image does not define an automorphism")
    return Automorphism(image, order, label)


def _square_divisor_primes(n):
    from sympy import factorint

    n = abs(int(n))
    if n in (0, 1):
        return []
    return sorted(p for p, e in factorint(n).items() if e >= 2)


def _certified_roots(g, precision):
    """Roots of g with a radius guaranteed to contain exactly one true root each.

    Approximations come from mpmath's Durand-Kerner solver; the radius
    ``d*|g(z)/g'(z)|`` is a classical inclusion disk, and pairwise-disjoint
    disks isolate the roots.
    """
    d = len(g) - 1
    if d == 1:
        return (mpmath.mpc(-g[0]),), mpmath.mpf(0)
    with mp.workprec(precision + 32):
        coeffs = list(reversed(g))
        roots = polyroots(coeffs, maxsteps=400, extraprec=2 * precision)
        dg = polys.pderiv(list(g))
        radii = []
        for z in roots:
            gz = mpmath.polyval(coeffs, z)
            dgz = mpmath.polyval(list(reversed(dg)), z)
            radii.append(d * abs(gz) / abs(dgz) + mpmath.mpf(2) ** (-precision))
        for i, j in itertools.combinations(range(d), 2):
            if abs(roots[i] - roots[j]) <= radii[i] + radii[j]:
                raise PrecisionExhausted("root inclusion disks overlap; raise precision")
        rad = max(radii)
        if rad >= mpmath.mpf(2) ** (-(precision // 2)):
            raise PrecisionExhausted(f"root radius {mpmath.nstr(rad, 5)} too large")
        reals, cplx = [], []
        for z, r in zip(roots, radii):
            if abs(z.imag) <= r:
                reals.append(mpmath.mpc(z.real, 0))
            elif z.imag > 0:
                cplx.append(z)
        reals.sort(key=lambda z: z.real)
        cplx.sort(key=lambda z: (z.real, z.imag))
        ordered = list(reals)
        for z in cplx:
            ordered += [z, mpmath.conj(z)]
        if len(ordered) != d:
            raise PrecisionExhausted("could not pair complex roots")
    return tuple(ordered), rad


def _arch_places(embeddings):
    """Archimedean places as (embedding index, weight) pairs: 1 for real, 2 for complex."""
    out = []
    i = 0
    while i < len(embeddings):
        if embeddings[i].imag == 0:
            out.append((i, 1))
            i += 1
        else:
            out.append((i, 2))
            i += 2
    return tuple(out)


def make_field(g, precision=DEFAULT_PRECISION, automorphisms=None, var="t"):
    """Build a :class:`NumberField` from a monic irreducible integer polynomial.

    ``g`` is a coefficient list (lowest degree first) or polynomial text.
    For quadratic fields the nontrivial automorphism is derived automatically;
    for higher degree, ``automorphisms`` may list generator images.
    """
    if isinstance(g, str):
        g = polys.parse_poly(g)
    g = polys.trim(g)
    if len(g) < 2:
        raise NotIrreducible("defining polynomial must have degree >= 1")
    if any(Fraction(c).denominator != 1 for c in g):
        raise ParseError("defining polynomial must have integer coefficients")
    g = [int(c) for c in g]
    if g[-1] != 1:
        raise NotMonic(f"{polys.poly_str(g)} is not monic")
    if len(g) > 2 and not _is_irreducible(g):
        raise NotIrreducible(f"{polys.poly_str(g)} factors over Q")
    K = NumberField(g, precision, var=var)
    if automorphisms:
        K.with_automorphisms(automorphisms)
    elif K.degree == 2:
        # t -> -t - c1 swaps the two roots of t^2 + c1 t + c0.
        K.automorphisms = (_make_automorphism(K, FieldElement(K, [-g[1], -1]), "conj"),)
    return K


def _is_irreducible(g):
    from sympy import Poly, symbols

    x = symbols("x")
    return Poly(list(reversed(g)), x, domain="ZZ").is_irreducible


def element_minimal_poly(K, a):
    """Exact minimal polynomial of ``a`` over Q (monic, lowest degree first)."""
    powers = []
    cur = K.one()
    for _ in range(K.degree + 1):
        powers.append(cur.coords)
        cur = cur * a
    n, comb = first_dependency(powers)
    return [Fraction(c) for c in comb]


def apply_automorphism(K, sigma, a):
    """Evaluate the coordinate polynomial of ``a`` at sigma(t)."""
    return _eval_at(K, a, sigma.image_of_theta)


def _eval_at(K, a, img):
    acc = K.zero()
    for c in reversed(a.coords):
        acc = acc * img + c
    return acc


def complex_values(K, a, tol=None):
    """Values of ``a`` under all d embeddings and a bound on their error.

    Returns ``(values, err)`` where each true value lies within ``err`` of
    the reported one.  Raises :class:`PrecisionExhausted` when ``err``
    exceeds ``tol``.
    """
    coeffs = a.coords
    if a.is_rational():
        # no root enters; the only error is rounding p/q, none for dyadic p/q of modest size
        c = coeffs[0]
        with mp.workprec(K.precision + 32):
            q = mpmath.mpc(mpmath.mpf(c.numerator) / c.denominator)
        dyadic = c.denominator & (c.denominator - 1) == 0
        exact = dyadic and abs(c.numerator).bit_length() <= K.precision
        err = mpmath.mpf(0) if exact else abs(q) * mpmath.mpf(2) ** (-K.precision)
        if tol is not None and err > tol:
            raise PrecisionExhausted(f"embedding error {mpmath.nstr(err, 5)} exceeds tolerance {tol}")
        return [q] * K.degree, err
    with mp.workprec(K.precision + 32):
        delta = K.root_radius
        vals = []
        err = mpmath.mpf(0)
        for z in K.embeddings:
            acc = mpmath.mpc(0)
            for c in reversed(coeffs):
                acc = acc * z + mpmath.mpf(c.numerator) / c.denominator
            vals.append(acc)
            if delta:
                # |a(z+e) - a(z)| <= sum |c_i| i (|z|+delta)^(i-1) delta
                r = abs(z) + delta
                bound = sum(abs(mpmath.mpf(c.numerator) / c.denominator) * i * r ** (i - 1)
                            for i, c in enumerate(coeffs) if i)
                err = max(err, bound * delta)
        scale = max([abs(v) for v in vals] + [mpmath.mpf(1)])
        err += scale * mpmath.mpf(2) ** (-K.precision)
    if tol is not None and err > tol:
        raise PrecisionExhausted(f"embedding error {mpmath.nstr(err, 5)} exceeds tolerance {tol}")
    return vals, err


def is_algebraic_integer(K, a):
    return all(c.denominator == 1 for c in element_minimal_poly(K, a))


def is_root_of_unity(K, a):
    """Decide whether ``a`` is a root of unity; returns ``(flag, order)``.

    Kronecker: an algebraic integer all of whose conjugates lie on the unit
    circle.  The numeric screen is confirmed by exact powering up to the
    bound 2*d^2.
    """
    if a.is_zero():
        raise ZeroElement("zero is not a root of unity")
    if not is_algebraic_integer(K, a):
        return False, None
    vals, err = complex_values(K, a)
    with mp.workprec(K.precision):
        if any(abs(abs(v) - 1) > err + mpmath.mpf(2) ** (-K.precision // 2) for v in vals):
            return False, None
    cur = a
    for n in range(1, 2 * K.degree ** 2 + 1):
        if cur == 1:
            return True, n
        cur = cur * a
    return False, None


def _integral_from_values(K, values, disc):
    """Element with the given embedding values, if one with coordinates in (1/disc)Z exists."""
    vand = mpmath.matrix([[z ** j for j in range(K.degree)] for z in K.embeddings])
    try:
        sol = mpmath.lu_solve(vand, mpmath.matrix(values))
    except ZeroDivisionError:
        return None
    eps = mpmath.mpf(2) ** (-K.precision // 4)
    coords = []
    for s in sol:
        if abs(mpmath.im(s)) > eps:
            return None
        num = mpmath.nint(mpmath.re(s) * disc)
        if abs(mpmath.re(s) * disc - num) > eps:
            return None
        coords.append(Fraction(int(num), disc))
    return FieldElement(K, coords)


def roots_in_field(K, h, max_candidates=1 << 12):
    """All roots in K of a monic integer polynomial ``h``, exactly verified.

    A root of h in K is an algebraic integer, so its power-basis coordinates
    have denominator dividing disc(g).  Candidates come from assigning a
    complex root of h to each embedding and interpolating.
    """
    h = [int(c) for c in polys.trim(h)]
    if h[-1] != 1:
        raise NotMonic("roots_in_field expects a monic polynomial")
    d = K.degree
    m = len(h) - 1
    if m ** d > max_candidates:
        raise ValueError("too many candidate assignments for brute-force root search")
    disc = abs(int(K.disc_g)) or 1
    found = []
    with mp.workprec(K.precision + 32):
        if m > 1:
            hroots = polyroots(list(reversed(h)), maxsteps=200, extraprec=K.precision)
        else:
            hroots = [mpmath.mpf(-h[0])]
        for choice in itertools.product(range(m), repeat=d):
            alpha = _integral_from_values(K, [hroots[c] for c in choice], disc)
            if alpha is not None and polys.peval(h, alpha) == 0 and alpha not in found:
                found.append(alpha)
    found.sort(key=lambda e: e.coords)
    return found


def sqrt_in_field(K, c, max_candidates=1 << 12):
    """A square root of ``c`` in K, or None; exact."""
    if c.is_zero():
        return K.zero()
    m = c.denominator()
    c2 = c * (m * m)
    d = K.degree
    if 2 ** (d - 1) > max_candidates:
        raise ValueError("field degree too large for brute-force square roots")
    disc = abs(int(K.disc_g)) or 1
    vals, _ = complex_values(K, c2)
    with mp.workprec(K.precision + 32):
        roots = [mpmath.sqrt(v) for v in vals]
        for signs in itertools.product((1, -1), repeat=d - 1):
            cand = _integral_from_values(K, [roots[0]] + [s * r for s, r in zip(signs, roots[1:])], disc)
            if cand is not None and cand * cand == c2:
                return cand / m
    return None

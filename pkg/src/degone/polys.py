"""Dense univariate polynomials over Q and Z/pZ, plus a small text parser.

Polynomials are plain lists of coefficients, lowest degree first, with no
trailing zeros (the zero polynomial is ``[]``).  Coefficients are ``int`` or
``fractions.Fraction``.

Grammar accepted by :func:`parse_poly`::

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*   # implicit product "2x" also allowed
    factor := atom (('^'|'**') INT)?
    atom   := INT | NAME | '(' expr ')'

``NAME`` must be one of the allowed variable names (by default ``x``, ``t``,
``theta``).  Division is only allowed by nonzero rational constants.
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import gcd

from .errors import ParseError

__all__ = [
    "trim", "padd", "psub", "pmul", "pneg", "pscale", "pdivmod", "pmod",
    "peval", "pderiv", "pcompose", "content", "primitive_part", "pow_mod",
    "poly_str", "parse_poly", "discriminant", "resultant", "is_monic",
    "gf_factor", "gf_gcd", "gf_rem", "gf_div",
]


def trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def degree(a):
    return len(a) - 1


def padd(a, b):
    n = max(len(a), len(b))
    return trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def pneg(a):
    return [-c for c in a]


def psub(a, b):
    return padd(a, pneg(b))


def pscale(a, c):
    return trim([c * x for x in a])


def pmul(a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return trim(out)


def pdivmod(a, b):
    """Exact division with remainder over Q."""
    b = trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = [Fraction(c) for c in trim(a)]
    lb = Fraction(b[-1])
    db = len(b) - 1
    if len(r) - 1 < db:
        return [], trim(r)
    q = [Fraction(0)] * (len(r) - db)
    for k in range(len(r) - 1 - db, -1, -1):
        c = r[k + db] / lb
        q[k] = c
        if c:
            for j, y in enumerate(b):
                r[k + j] -= c * y
    return trim(q), trim(r[:db])


def pmod(a, m):
    """Remainder of ``a`` modulo a monic integer polynomial ``m``.

    Keeps ``int`` coefficients when the input has them.
    """
    r = list(trim(a))
    dm = len(m) - 1
    for k in range(len(r) - 1, dm - 1, -1):
        c = r[k]
        if c:
            for j in range(dm + 1):
                r[k - dm + j] -= c * m[j]
    return trim(r[:dm])


def peval(a, x):
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def pderiv(a):
    return trim([i * a[i] for i in range(1, len(a))])


def pcompose(a, b):
    """a(b(x))."""
    acc = []
    for c in reversed(a):
        acc = padd(pmul(acc, b), [c])
    return acc


def content(a):
    """Positive gcd of the integer coefficients."""
    g = 0
    for c in a:
        g = gcd(g, int(c))
    return g


def primitive_part(a):
    """Scale a rational polynomial to a primitive integer polynomial with positive leading coefficient."""
    a = trim(a)
    if not a:
        return []
    den = 1
    for c in a:
        den = den * Fraction(c).denominator // gcd(den, Fraction(c).denominator)
    ints = [int(Fraction(c) * den) for c in a]
    g = content(ints)
    ints = [c // g for c in ints]
    if ints[-1] < 0:
        ints = [-c for c in ints]
    return ints


def is_monic(a):
    return bool(a) and a[-1] == 1


def pow_mod(a, e, m):
    result = [1]
    base = pmod(a, m)
    while e:
        if e & 1:
            result = pmod(pmul(result, base), m)
        e >>= 1
        if e:
            base = pmod(pmul(base, base), m)
    return result


def resultant(a, b):
    """Resultant of two polynomials over Q via the Sylvester determinant."""
    from .linalg import det

    a, b = trim(a), trim(b)
    m, n = len(a) - 1, len(b) - 1
    if m < 0 or n < 0:
        return Fraction(0)
    size = m + n
    if size == 0:
        return Fraction(1)
    rows = []
    for i in range(n):
        row = [0] * size
        for j, c in enumerate(reversed(a)):
            row[i + j] = c
        rows.append(row)
    for i in range(m):
        row = [0] * size
        for j, c in enumerate(reversed(b)):
            row[i + j] = c
        rows.append(row)
    return det(rows)


def discriminant(g):
    """Discriminant of a polynomial (``(-1)^(n(n-1)/2) Res(g, g') / lc``)."""
    n = len(g) - 1
    if n < 1:
        raise ValueError("discriminant needs degree >= 1")
    if n == 1:
        return 1
    r = resultant(g, pderiv(g))
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    d = Fraction(sign) * r / g[-1]
    return int(d) if Fraction(d).denominator == 1 else d


_VAR_RE = r"[A-Za-z_][A-Za-z_0-9]*"
_TOKEN = re.compile(rf"\s*(?:(\d+)|({_VAR_RE})|(\*\*|[-+*/^()]))")


def _tokenize(text):
    pos = 0
    toks = []
    text_len = len(text)
    while pos < text_len:
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError("unexpected character", text, start)
        start = m.start(m.lastindex)
        if m.group(1):
            toks.append(("int", int(m.group(1)), start))
        elif m.group(2):
            toks.append(("name", m.group(2), start))
        else:
            toks.append(("op", m.group(3), start))
        pos = m.end()
    toks.append(("end", None, len(text)))
    return toks


class _Parser:
    """Recursive descent over + - * / ^ with implicit products.

    Values are any objects supporting +, -, * with each other and with
    Fractions; ``names`` maps variable names to values, ``const`` lifts a
    Fraction, and ``as_const`` returns a value's constant or None.
    """

    def __init__(self, text, names, const, as_const):
        self.text = text
        self.names = names
        self.const = const
        self.as_const = as_const
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, self.text, tok[2])

    def parse(self):
        if self.peek()[0] == "end":
            self.fail("empty expression")
        val = self.expr()
        if self.peek()[0] != "end":
            self.fail("unexpected token")
        return val

    def expr(self):
        neg = False
        if self.peek()[:2] in (("op", "+"), ("op", "-")):
            neg = self.take()[1] == "-"
        acc = self.term()
        if neg:
            acc = self.const(Fraction(0)) - acc
        while self.peek()[:2] in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            t = self.term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term(self):
        acc = self.factor()
        while True:
            tok = self.peek()
            if tok[:2] == ("op", "*"):
                self.take()
                acc = acc * self.factor()
            elif tok[:2] == ("op", "/"):
                self.take()
                ftok = self.peek()
                c = self.as_const(self.factor())
                if not c:
                    self.fail("division only by nonzero constants", ftok)
                acc = acc * self.const(1 / Fraction(c))
            elif tok[0] in ("int", "name") or tok[:2] == ("op", "("):
                acc = acc * self.factor()
            else:
                return acc

    def factor(self):
        base = self.atom()
        if self.peek()[:2] in (("op", "^"), ("op", "**")):
            self.take()
            tok = self.take()
            if tok[0] != "int":
                self.fail("exponent must be a nonnegative integer", tok)
            out = self.const(Fraction(1))
            for _ in range(tok[1]):
                out = out * base
            return out
        return base

    def atom(self):
        tok = self.take()
        if tok[0] == "int":
            return self.const(Fraction(tok[1]))
        if tok[0] == "name":
            if tok[1] not in self.names:
                self.fail(f"unknown variable {tok[1]!r} (expected one of {sorted(self.names)})", tok)
            return self.names[tok[1]]
        if tok[:2] == ("op", "("):
            val = self.expr()
            if self.take()[:2] != ("op", ")"):
                self.fail("expected ')'", self.toks[self.i - 1])
            return val
        self.fail("unexpected token", tok)


class PolyValue:
    """Thin operator wrapper over coefficient lists, for the parser."""

    __slots__ = ("c",)

    def __init__(self, c):
        self.c = trim(c)

    def __add__(self, o):
        return PolyValue(padd(self.c, o.c))

    def __sub__(self, o):
        return PolyValue(psub(self.c, o.c))

    def __mul__(self, o):
        return PolyValue(pmul(self.c, o.c))


def _upoly_const(c):
    return PolyValue([c])


def _upoly_as_const(v):
    if len(v.c) > 1:
        return None
    return v.c[0] if v.c else 0


def parse_expression(text, names, const, as_const):
    """Parse ``text`` with a caller-supplied value model (see :class:`_Parser`)."""
    return _Parser(str(text), names, const, as_const).parse()


def parse_poly(text, names=("x", "t", "theta")):
    """Parse ``text`` into a coefficient list (lowest degree first).

    >>> parse_poly("x^2 - x - 1")
    [-1, -1, 1]
    >>> parse_poly("1/2 + 1/2*t")
    [Fraction(1, 2), Fraction(1, 2)]
    """
    var = PolyValue([0, 1])
    out = parse_expression(text, {n: var for n in names}, _upoly_const, _upoly_as_const).c
    return [int(c) if Fraction(c).denominator == 1 else Fraction(c) for c in out]


def poly_str(a, var="x"):
    """Human-readable form, highest degree first; round-trips through :func:`parse_poly`."""
    a = trim(a)
    if not a:
        return "0"
    parts = []
    for i in range(len(a) - 1, -1, -1):
        c = Fraction(a[i])
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        c = abs(c)
        if i == 0:
            body = str(c)
        else:
            mono = var if i == 1 else f"{var}^{i}"
            body = mono if c == 1 else f"{c}*{mono}"
        parts.append((sign, body))
    first_sign, first = parts[0]
    s = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        s += f" {sign} {body}"
    return s


# --- Z/pZ[x] ----------------------------------------------------------------
# Finite-field arithmetic is delegated to sympy's galoistools, which stores
# coefficients highest degree first.

def _to_gf(a, p):
    out = [int(c) % p for c in reversed(trim(a))]
    while out and out[0] == 0:
        out.pop(0)
    return out


def _from_gf(a):
    return trim(list(reversed([int(c) for c in a])))


def gf_factor(a, p):
    """Factor an integer polynomial modulo the prime ``p``.

    Returns ``(lc, [(factor, multiplicity), ...])`` with monic factors whose
    coefficients lie in ``[0, p)``, ordered by (degree, coefficients).
    """
    from sympy.polys.domains import ZZ
    from sympy.polys.galoistools import gf_factor as _gf_factor

    lc, facs = _gf_factor(_to_gf(a, p), p, ZZ)
    out = [(_from_gf(f), e) for f, e in facs]
    out.sort(key=lambda fe: (len(fe[0]), fe[0], fe[1]))
    return int(lc), out


def gf_gcd(a, b, p):
    from sympy.polys.domains import ZZ
    from sympy.polys.galoistools import gf_gcd as _gf_gcd

    return _from_gf(_gf_gcd(_to_gf(a, p), _to_gf(b, p), p, ZZ))


def gf_rem(a, b, p):
    from sympy.polys.domains import ZZ
    from sympy.polys.galoistools import gf_rem as _gf_rem

    return _from_gf(_gf_rem(_to_gf(a, p), _to_gf(b, p), p, ZZ))


def gf_div(a, b, p):
    """Quotient of ``a`` by ``b`` in Z/pZ[x]."""
    from sympy.polys.domains import ZZ
    from sympy.polys.galoistools import gf_quo

    return _from_gf(gf_quo(_to_gf(a, p), _to_gf(b, p), p, ZZ))

"""Command-line front end: ``degone <subcommand> [options]``.

Input grammar
-------------
Polynomials and field elements are written as rational-coefficient
expressions built from integers, ``+ - * / ^`` (``**`` also works),
parentheses and implicit products such as ``2t`` or ``3(t+1)``.

* Defining polynomials use the variable ``x``: ``"x^2 - x - 1"``.
* Field elements use the generator ``t`` (``theta`` also accepted):
  ``"1/2 + 1/2*t"``.  Division is allowed by nonzero constants only.
* ``--f`` is a polynomial in ``x`` whose coefficients are field elements
  written with ``t``, e.g. ``"x + 1"`` or ``"x^2 + t*x + 1"``.

Exit codes: 0 ok, 1 verification failure, 2 usage/input error,
3 numeric failure (index divisor, precision exhausted).
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .errors import DegoneError, IndexDivisor, ParseError
from .polys import PolyValue, parse_expression
from .heights import DEFAULT_TOL, DivisorSpecGm, abs_height, log_abs_values, mahler_height, places_height, place_label
from .idealfact import factor_principal, place_set, split_prime
from .qfield import DEFAULT_PRECISION, complex_values, make_field
from .report import ELL_COLUMNS, GM_COLUMNS, write_rows

__all__ = ["main", "build_parser", "parse_field_poly"]


def _primes_below(n):
    from sympy import primerange

    return list(primerange(2, n))


def parse_field_poly(K, text):
    """Parse a polynomial in x with coefficients in K (written in t)."""
    one = K.one()

    def const(c):
        return PolyValue([one * c])

    def as_const(v):
        if len(v.c) > 1 or (v.c and not v.c[0].is_rational()):
            return None
        return v.c[0].coords[0] if v.c else 0

    names = {"x": PolyValue([K.zero(), one]), "t": PolyValue([K.gen()]), "theta": PolyValue([K.gen()])}
    return parse_expression(text, names, const, as_const).c


def _field(args):
    autos = getattr(args, "aut", None) or None
    return make_field(args.poly, precision=args.prec, automorphisms=autos)


def _emit(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)


# -- subcommands


def cmd_field_info(args):
    K = _field(args)
    print(f"field: Q[t]/({K.poly_str()})")
    print(f"degree: {K.degree}")
    print(f"disc_g: {K.disc_g}")
    print(f"index_primes: {sorted(K.index_primes)}")
    print(f"precision: {K.precision} bits, root radius < 2^{-K.precision // 2}")
    for i, z in enumerate(K.embeddings):
        print(f"  root {i}: {complex(z):.15g}")
    for s in K.automorphisms:
        print(f"automorphism {s.label}: t -> {s.image_of_theta} (order {s.order})")
    print(f"splitting of primes < {args.bound}:")
    bad = index = 0
    for p in _primes_below(args.bound):
        try:
            P = split_prime(K, p)
        except IndexDivisor as exc:
            print(f"  p={p}: {exc}")
            index += 1
            continue
        total = sum(q.e * q.f for q in P)
        kind = _split_kind(K, P)
        parts = " ".join(f"(e={q.e},f={q.f},{q.gen_str()})" for q in P)
        ok = "ok" if total == K.degree else "FAIL"
        print(f"  p={p}: {kind} {parts} sum(e*f)={total} {ok}")
        bad += total != K.degree
    if bad:
        return 1
    return 3 if index else 0


def _split_kind(K, P):
    if any(q.e > 1 for q in P):
        return "ramified"
    if len(P) == 1 and P[0].f == K.degree:
        return "inert"
    if len(P) == K.degree:
        return "split"
    return "partial"


def cmd_factor(args):
    K = _field(args)
    a = K.element(args.elem)
    F = factor_principal(K, a)
    print(json.dumps({"element": str(a), "norm": str(a.norm()), "factors": F.to_json()}, indent=2))
    return 0


def cmd_height(args):
    K = _field(args)
    a = K.element(args.elem)
    h = abs_height(K, a, tol=args.tol)
    h1 = mahler_height(K, a)
    h2 = places_height(K, a)
    print(f"element: {a}")
    print(f"h (Mahler route): {float(h1):.15g}")
    print(f"h (places route): {float(h2):.15g}")
    print(f"route residual: {float(abs(h1 - h2)):.3e}")
    print(f"h: {float(h):.15g}")
    if not a.is_zero():
        vals, err = complex_values(K, a)
        print(f"embedding error bound: {float(err):.3e}")
        for v, x in log_abs_values(K, a):
            print(f"  log|a|_{place_label(v)} = {float(x):.15g}")
    return 0


def _gm_config(args):
    return {
        "command": "gm-scan", "poly": args.poly, "base": args.base, "f": args.f,
        "S": sorted(args.S) if args.S is not None else None, "aut": args.aut or [],
        "nmin": args.nmin, "nmax": args.nmax, "eps": args.eps, "mmax": args.mmax,
        "exclude_S": args.exclude_S,
    }


def cmd_gm_scan(args):
    from .gmlab import GmExperiment, classify_base, run_gm_family
    from sympy import factorint

    if args.eps <= 0:
        raise ParseError("--eps must be positive")
    K = _field(args)
    a = K.element(args.base)
    D = DivisorSpecGm(K, parse_field_poly(K, args.f))
    if args.S is None:
        A = a.numerator_coords()
        primes = set(factorint(abs(int(K(A).norm())))) | set(factorint(a.denominator()))
        primes.discard(1)
    else:
        primes = set(args.S)
    S = place_set(K, sorted(primes))
    X = GmExperiment(K, D, S, a, range(args.nmin, args.nmax + 1), args.eps, args.mmax, args.tol,
                     exclude_S=args.exclude_S)
    try:
        cls = str(classify_base(K, a, args.mmax))
    except ValueError as exc:
        cls = f"unclassified ({exc})"
    rows = run_gm_family(X, jobs=args.jobs)
    banner = f"classification: {cls}\nS: rational primes {sorted(primes)} plus archimedean places"
    text = write_rows(args.out, rows, GM_COLUMNS, _gm_config(args), args.prec, args.tol, args.format, banner)
    _emit(text, args.out)
    if args.out not in (None, "-"):
        print(f"{len(rows)} rows written to {args.out}; {banner.splitlines()[0]}", file=sys.stderr)
    return 0


def cmd_fib_demo(args):
    from .gmlab import VerificationFailure, fib_demo

    if args.nmax < 1 or args.nmax % 2 == 0:
        print("error: --nmax must be an odd positive integer", file=sys.stderr)
        return 2
    try:
        rows = fib_demo(args.nmax, strict=True, precision=args.prec)
        status = 0
    except VerificationFailure as exc:
        rows = exc.table
        status = 1
    print(f"{'n':>3} {'F_n':>8} {'ideal':>6} {'scalar':>6} {'inert':>6} {'N(J)':>10}")
    for r in rows:
        print(f"{r.n:>3} {r.F_n:>8} {_pf(r.ideal_ok):>6} {_pf(r.scalar_ok):>6} "
              f"{'yes' if r.inert_prime else 'no':>6} {str(r.norm_J):>10}")
    print("all identities hold" if status == 0 else "IDENTITY FAILURE")
    return status


def _pf(flag):
    return "pass" if flag else "FAIL"


ELL_DEFAULTS = {"k": "x", "l": "x^2+1", "k_gen_image": None, "l_automorphisms": None,
                "sigma": None, "a": "0", "b": "-2", "P": ["3", "5"], "D": [["inf", 1]],
                "n_min": 1, "n_max": 10, "epsilon": 0.1, "m_max": 8, "height_budget": 400.0,
                "on_budget": "stop"}


def load_ell_config(path=None, overrides=None):
    cfg = dict(ELL_DEFAULTS)
    if path:
        with open(path) as fh:
            user = json.load(fh)
        unknown = set(user) - set(cfg)
        if unknown:
            raise ParseError(f"unknown ell-scan config keys: {sorted(unknown)}")
        cfg.update(user)
    for key, val in (overrides or {}).items():
        if val is not None:
            cfg[key] = val
    return cfg


def _ell_point(E, spec):
    from .ellcurve import INFINITY

    if spec == "inf" or spec == ["inf"]:
        return INFINITY
    x, y = spec
    return E.point(E.ext_field.element(str(x)), E.ext_field.element(str(y)))


def build_ell(cfg, precision):
    from .ellcurve import DivisorSpecEll, EllCurve, FieldExtension

    k = make_field(cfg["k"], precision=precision)
    l = make_field(cfg["l"], precision=precision, automorphisms=cfg["l_automorphisms"])
    img = l.element(cfg["k_gen_image"]) if cfg["k_gen_image"] else None
    rel = FieldExtension(k, l, img)
    E = EllCurve(k.element(str(cfg["a"])), k.element(str(cfg["b"])), rel)
    P = _ell_point(E, cfg["P"])
    D = DivisorSpecEll([(_ell_point(E, q), int(m)) for q, m in cfg["D"]])
    sigma = None
    if cfg["sigma"] is not None:
        sigma = next((s for s in rel.sigmas if s.label == cfg["sigma"]), None)
        if sigma is None:
            raise ParseError(f"no automorphism of l/k labelled {cfg['sigma']!r}")
    return E, rel, P, D, sigma


def cmd_ell_scan(args):
    from .ellcurve import is_exceptional_ell, run_ell_family

    cfg = load_ell_config(args.config, {"n_max": args.nmax, "epsilon": args.eps, "m_max": args.mmax})
    if not cfg["epsilon"] > 0:
        raise ParseError("epsilon must be positive")
    E, rel, P, D, sigma = build_ell(cfg, args.prec)
    rows = run_ell_family(E, D, rel, P, range(cfg["n_min"], cfg["n_max"] + 1), cfg["epsilon"],
                          sigma=sigma, m_max=cfg["m_max"], height_budget=cfg["height_budget"],
                          on_budget=cfg["on_budget"])
    wit = is_exceptional_ell(E, rel, sigma, P, cfg["m_max"]) if rel.sigmas else None
    lines = [f"curve: {E!r}", f"extension: {rel!r}", f"witness: {wit if wit else 'no automorphism of l/k'}"]
    truncated = [r.n for r in rows if r.skip == "budget"]
    if truncated:
        lines.append(f"truncated at n = {truncated[0]}: naive height exceeds budget {cfg['height_budget']}")
        print(lines[-1], file=sys.stderr)
    text = write_rows(args.out, rows, ELL_COLUMNS, {"command": "ell-scan", **cfg}, args.prec, args.tol,
                      args.format, "\n".join(lines))
    _emit(text, args.out)
    return 0


# -- parser


def _bits(text):
    n = int(text)
    if n < 53:
        raise argparse.ArgumentTypeError("precision must be at least 53 bits")
    return n


def _common(p, poly=True):
    if poly:
        p.add_argument("--poly", required=True, help="defining polynomial in x, e.g. 'x^2-x-1'")
        p.add_argument("--aut", action="append", metavar="IMAGE",
                       help="image of t under an automorphism (repeatable; degree > 2 only)")
    p.add_argument("--prec", type=_bits, default=DEFAULT_PRECISION, help="working precision in bits")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="numeric tolerance")


def _output(p):
    p.add_argument("--out", default="-", help="output path ('-' for stdout)")
    p.add_argument("--format", choices=["csv", "json"], default="csv")


def build_parser():
    ap = argparse.ArgumentParser(prog="degone", description=__doc__.split("\n")[0],
                                 formatter_class=argparse.RawDescriptionHelpFormatter,
                                 epilog=__doc__.split("\n", 2)[2])
    ap.add_argument("--version", action="version", version=f"degone {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("field-info", help="discriminant, embeddings and prime splitting")
    _common(p)
    p.add_argument("--bound", type=int, default=50, help="split primes below this bound")
    p.set_defaults(func=cmd_field_info)

    p = sub.add_parser("factor", help="prime factorization of the ideal generated by an element")
    _common(p)
    p.add_argument("--elem", "--base", dest="elem", required=True, help="element, e.g. '1+2*t'")
    p.set_defaults(func=cmd_factor)

    p = sub.add_parser("height", help="absolute Weil height by two routes")
    _common(p)
    p.add_argument("--elem", "--base", dest="elem", required=True)
    p.set_defaults(func=cmd_height)

    p = sub.add_parser("gm-scan", help="degree-one decomposition along u = a^n")
    _common(p)
    _output(p)
    p.add_argument("--base", required=True, help="the S-unit a")
    p.add_argument("--f", default="x+1", help="polynomial f(x) defining the divisor")
    p.add_argument("--S", type=int, nargs="*", default=None,
                   help="rational primes whose places form S (default: support of a)")
    p.add_argument("--nmin", type=int, default=1)
    p.add_argument("--nmax", type=int, default=40)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--mmax", type=int, default=12)
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--exclude-S", action="store_true", help="drop S places from both height buckets")
    p.set_defaults(func=cmd_gm_scan)

    p = sub.add_parser("fib-demo", help="verify the Fibonacci ideal identity in Q(sqrt 5)")
    _common(p, poly=False)
    p.add_argument("--nmax", type=int, default=21)
    p.set_defaults(func=cmd_fib_demo)

    p = sub.add_parser("ell-scan", help="nP family scan on an elliptic curve")
    _common(p, poly=False)
    _output(p)
    p.add_argument("--config", help="JSON config (keys: k, l, a, b, P, D, n_max, epsilon, ...)")
    p.add_argument("--nmax", type=int, default=None)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--mmax", type=int, default=None)
    p.set_defaults(func=cmd_ell_scan)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except DegoneError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

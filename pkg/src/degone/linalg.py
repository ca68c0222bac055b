"""Exact linear algebra over Q and Z: determinants, kernels, Hermite normal form."""

from __future__ import annotations

from fractions import Fraction


def det(rows):
    """Determinant of a square matrix over Q by fraction-exact elimination."""
    m = [[Fraction(x) for x in row] for row in rows]
    n = len(m)
    sign = 1
    result = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            sign = -sign
        pv = m[c][c]
        result *= pv
        for r in range(c + 1, n):
            if m[r][c]:
                k = m[r][c] / pv
                m[r] = [a - k * b for a, b in zip(m[r], m[c])]
    return sign * result


def first_dependency(vectors):
    """Smallest ``n`` such that ``vectors[:n+1]`` are linearly dependent.

    Returns ``(n, coeffs)`` with ``coeffs`` of length ``n + 1``, ``coeffs[n] == 1``
    and ``sum(c * v) == 0``; or ``None`` if all vectors are independent.
    """
    basis = []  # (pivot column, reduced vector, combination)
    for n, v in enumerate(vectors):
        vec = [Fraction(x) for x in v]
        comb = [Fraction(0)] * n + [Fraction(1)]
        for col, bv, bc in basis:
            if vec[col]:
                k = vec[col] / bv[col]
                vec = [a - k * b for a, b in zip(vec, bv)]
                comb = [a - k * (bc[i] if i < len(bc) else 0) for i, a in enumerate(comb)]
        col = next((i for i, x in enumerate(vec) if x != 0), None)
        if col is None:
            return n, comb
        basis.append((col, vec, comb))
    return None


def _reduce_column(rows, c):
    """Euclidean elimination on column ``c``; returns (pivot_row, others)."""
    rows = [r for r in rows if any(r)]
    while True:
        nz = [r for r in rows if r[c] != 0]
        if not nz:
            return None, rows
        piv = min(nz, key=lambda r: abs(r[c]))
        others = []
        done = True
        for r in rows:
            if r is piv:
                continue
            if r[c] != 0:
                q = r[c] // piv[c]
                r = [a - q * b for a, b in zip(r, piv)]
                if r[c] != 0:
                    done = False
            if any(r):
                others.append(r)
        if done:
            if piv[c] < 0:
                piv = [-a for a in piv]
            return piv, others
        rows = [piv] + others


def hnf(generators, dim=None, modulus=None):
    """Upper-triangular row Hermite normal form of the Z-span of ``generators``.

    Only full-rank lattices are supported (the ideals handled here always
    contain a positive integer multiple of the whole order).  When ``modulus``
    is a positive integer known to satisfy ``modulus * Z^dim`` inside the
    lattice, coefficients are reduced modulo it as the elimination proceeds.
    """
    gens = [list(map(int, g)) for g in generators]
    if dim is None:
        dim = len(gens[0])
    out = []
    rows = gens
    for c in range(dim):
        if modulus:
            rows = [[a % modulus for a in r] for r in rows]
            rows += [[modulus if j == i else 0 for j in range(dim)] for i in range(c, dim)]
        piv, rows = _reduce_column(rows, c)
        if piv is None:
            raise ValueError("lattice is not of full rank")
        out.append(piv)
    for j in range(dim):
        pj = out[j][j]
        for i in range(j):
            q = out[i][j] // pj
            if q:
                out[i] = [a - q * b for a, b in zip(out[i], out[j])]
    return tuple(tuple(r) for r in out)


def hnf_contains(h, v):
    """Membership of the integer vector ``v`` in the lattice with HNF basis ``h``."""
    v = list(v)
    for i, row in enumerate(h):
        if v[i] % row[i]:
            return False
        q = v[i] // row[i]
        if q:
            v = [a - q * b for a, b in zip(v, row)]
    return not any(v)


def hnf_index(h):
    """Index of the lattice in Z^dim: product of diagonal entries."""
    out = 1
    for i, row in enumerate(h):
        out *= row[i]
    return out

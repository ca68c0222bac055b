"""Weil heights by two routes, and the product formula."""

import mpmath

from degone.heights import log_abs_values, mahler_height, places_height, place_label
from degone.qfield import make_field

for poly, text in [("x^2-x-1", "t"), ("x^2+1", "1+2t"), ("x^3-2", "1/3 + t^2"), ("x^3-x-1", "t^5 - 7/2")]:
    K = make_field(poly)
    a = K.element(text)
    h1, h2 = mahler_height(K, a), places_height(K, a)
    print(f"{poly:>9}  a = {text:<10} h = {mpmath.nstr(h1, 15):<18} |routes| = {mpmath.nstr(abs(h1 - h2), 3)}")
    vals = log_abs_values(K, a)
    for v, x in vals:
        print(f"{'':13}log|a|_{place_label(v)} = {mpmath.nstr(x, 12)}")
    print(f"{'':13}sum = {mpmath.nstr(mpmath.fsum(x for _, x in vals), 3)}")

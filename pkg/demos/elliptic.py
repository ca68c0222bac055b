"""Multiples of P = (3, 5) on y^2 = x^3 - 2, seen from Q(i).

P is defined over Q, so sigma(P) = P for complex conjugation: the family
lies in an exceptional coset with witness (1, id).  The primes of Q(i)
above 3 and 19 have relative degree 2 and feed the degree > 1 height.
"""

from degone.ellcurve import (
    INFINITY, DivisorSpecEll, EllCurve, FieldExtension, ell_mul, ideal_ID, run_ell_family,
)
from degone.qfield import make_field

QQ, Qi = make_field("x"), make_field("x^2+1")
rel = FieldExtension(QQ, Qi)
E = EllCurve(0, -2, rel)
P = E.point(3, 5)
D = DivisorSpecEll([(INFINITY, 1)])

print("2P =", ell_mul(E, 2, P))
print("I_D(2P) over Q(i):", [(q.p, str(v)) for q, v in ideal_ID(E, D, ell_mul(E, 2, P)).items()])
print(f"{'n':>3} {'h_D':>9} {'h_gt1':>9} {'N(J)':>14} witness")
for r in run_ell_family(E, D, rel, P, range(1, 9), epsilon=0.1):
    print(f"{r.n:>3} {float(r.h_D):9.4f} {float(r.h_deg_gt1):9.4f} {str(r.norm_J):>14} ({r.m_witness}, {r.nu_witness})")

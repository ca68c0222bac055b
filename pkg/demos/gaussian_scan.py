"""Degree-one dominance for u = (1+2i)^n in Q(i).

1+2i is not a root of unity times a rational power and its norm is 5,
so no exceptional coset applies.  The degree > 1 part of the height
should stay a small share of h_D.
"""

from degone.gmlab import GmExperiment, classify_base, run_gm_family
from degone.heights import DivisorSpecGm
from degone.idealfact import place_set
from degone.qfield import make_field

K = make_field("x^2+1")
a = K.element("1+2t")
X = GmExperiment(K, DivisorSpecGm(K, [1, 1]), place_set(K, [5]), a, range(1, 41), epsilon=0.1)
print("classification:", classify_base(K, a))
print(f"{'n':>3} {'h(u)':>9} {'h_D':>9} {'h_gt1':>9} {'N(J)':>12} flag")
for r in run_gm_family(X, jobs=2):
    print(f"{r.n:>3} {float(r.h_u):9.4f} {float(r.h_D):9.4f} {float(r.h_deg_gt1):9.4f} {str(r.norm_J):>12} {r.flag_eps}")

"""Fibonacci numbers as values of x + 1 along powers of phi^2.

In Q(sqrt 5) with S = {inf, p_5}, the ideal generated by phi^(2n) + 1
equals F_n O_{k,S} for odd n.  When F_n is an inert prime, all of that
ideal sits on a residue-degree-2 prime, so N(J) = F_n^2 stays large
although phi^2 has norm 1.
"""

from degone.gmlab import fib_demo

rows = fib_demo(21)
print(f"{'n':>3} {'F_n':>6} {'inert':>6} {'N(J)':>9}  ideal")
for r in rows:
    ideal = " ".join(f"p{d['p']}^{d['exp']}(f={d['f']})" for d in r.ideal) or "(1)"
    print(f"{r.n:>3} {r.F_n:>6} {'yes' if r.inert_prime else 'no':>6} {str(r.norm_J):>9}  {ideal}")
print("all identities hold:", all(r.ok for r in rows))

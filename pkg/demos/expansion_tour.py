"""How fast the Mathieu expansion of J0(k rho) converges, and what the basis looks like.

    python3 demos/expansion_tour.py
"""

import numpy as np

from smt_ellipse import EllipticPoint, bessel_j0, build_basis, compute_coefficients, distance, eval_j0_expansion
from smt_ellipse.mathieu import k_from_q


def main():
    b = build_basis(1.0, 4)
    print("q = 1 characteristic values")
    for n in range(5):
        print(f"  a_{n} = {b.a[n]: .9f}" + (f"   b_{n} = {b.b[n]: .9f}" if n else ""))

    p, s = EllipticPoint(0.8, 1.1), EllipticPoint(0.5, -2.0)
    print("\nJ0 series error at p=(0.8, 1.1), s=(0.5, -2.0)")
    print("   q   terms   |series - J0|")
    for q in (0.5, 2.0, 8.0):
        bq = build_basis(q, 40)
        c = compute_coefficients(bq)
        exact = bessel_j0(k_from_q(q) * distance(p, s))
        for n_terms in (5, 10, 20, 30):
            err = abs(eval_j0_expansion(bq, c, p, s, n_terms) - exact)
            print(f"  {q:4g}  {n_terms:5d}   {err:.2e}")


if __name__ == "__main__":
    main()

"""Tour of the substrate: extended reals, quadrature, special functions.

Run with: python3 demos/01_quadrature_and_special_functions.py
"""

import math

import numpy as np

from volgron import (
    INF,
    ExtReal,
    Interval1D,
    Lebesgue,
    MLParams,
    beta,
    digamma,
    gamma_min_point,
    integrate,
    integrate_singular,
    mittag_leffler,
)

# Extended nonnegative reals follow the measure-theoretic conventions:
# infinity saturates sums, but 0 * inf = 0.
print("inf + 3      =", INF + 3.0)
print("inf * 0      =", INF * 0.0)
print("sqrt(inf)    =", INF.root(2))
print("ExtReal(2)^3 =", ExtReal(2.0) ** 3)
print()

# Composite Gauss-Legendre with a two-level error estimate.  The result
# carries the estimate, and integrable endpoint singularities work
# because Gauss nodes never touch the panel ends.
res = integrate(lambda x: np.exp(-x * x), Interval1D(0, 2), Lebesgue())
print(f"int exp(-x^2) over [0,2]  = {res.value:.12f} (err <= {res.err_est:.1e})")
res = integrate(lambda x: x**-0.5, Interval1D(0, 1), Lebesgue(),
                tol=1e-5, max_level=14)
print(f"int x^-1/2   over (0,1]   = {res.value:.6f} (exact 2)")

# Weighted endpoint singularities are absorbed exactly by substitution:
# the beta function appears as the unit-weight case.
res = integrate_singular(lambda x: np.ones_like(x), 0.5, 0.5)
print(f"int x^-1/2 (1-x)^-1/2     = {res.value:.12f} (pi = {math.pi:.12f})")
print()

# Gamma-family values and the minimiser of the gamma function.
print(f"B(2, 3)      = {beta(2, 3):.12f} (exact 1/12)")
print(f"psi(1)       = {digamma(1.0):.12f} (minus Euler-Mascheroni)")
x_min, g_min = gamma_min_point()
print(f"gamma minimum at x = {x_min:.10f}, value {g_min:.10f}")
print()

# The generalised Mittag-Leffler series: certified truncation, and the
# p-th-root denominators that majorise resolvents of powered kernels.
for params, z, label in [
    (MLParams(1.0, 1.0, 1.0), 1.0, "E_{1,1,1}(1)   [= e]"),
    (MLParams(2.0, 1.0, 1.0), 2.25, "E_{2,1,1}(1.5^2) [= cosh 1.5]"),
    (MLParams(0.75, 1.0, 2.0), 1.0, "E_{3/4,1,2}(1)"),
]:
    sv = mittag_leffler(params, z)
    print(f"{label:28s} = {sv.sum:.12f}  "
          f"(tail <= {sv.tail_bound:.1e}, {sv.terms_used} terms)")

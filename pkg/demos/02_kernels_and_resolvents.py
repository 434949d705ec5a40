"""Kernel families, iterated-kernel tables, and the resolvent series.

Run with: python3 demos/02_kernels_and_resolvents.py
"""

import math

import numpy as np

from volgron import (
    DiscreteMeasure,
    Interval1D,
    Lebesgue,
    MultiplicativeKernel,
    QuadratureGrid,
    VoidKernel,
    check_monotone,
    constant_kernel,
    iterated_kernels,
    resolvent_series,
    series_function_I,
    submultiplicative_defect,
    sum_decomposition,
    volterra_residual,
)

dom = Interval1D(0.0, 1.0)
grid = QuadratureGrid.for_interval(dom, 6)

# The constant kernel has factorial iterates: R_n(t,s) = c^n (t-s)^(n-1)/(n-1)!
c = 1.5
tab = iterated_kernels(constant_kernel(c), Lebesgue(), 1.0, 4, grid)
t_i, s_j = 64, 16
t, s = tab.nodes[t_i], tab.nodes[s_j]
print(f"table status: {tab.status}, two-level err <= {tab.err_est:.1e}")
for n in range(1, 5):
    exact = c**n * (t - s) ** (n - 1) / math.factorial(n - 1)
    print(f"  R_{n}({t:.3g},{s:.3g}) = {tab.value(n, t_i, s_j):.10f}"
          f"   closed form {exact:.10f}")

# Their sum solves the linear Volterra equation: R = k + k*R, and the
# plug-in defect stays at quadrature scale.
sv = resolvent_series(constant_kernel(c), Lebesgue(), 1.0, t, s)
print(f"resolvent({t:.3g},{s:.3g}) = {sv.sum:.10f}"
      f"   [c e^(c(t-s)) = {c * math.exp(c * (t - s)):.10f}]")
res = volterra_residual(constant_kernel(c), Lebesgue(), 1.0, 0.0, grid=grid)
print(f"Volterra-equation residual on the grid: {res:.2e}")
print()

# The series function I(t): its finiteness is what makes a kernel
# tractable for the bound machinery.
sv = series_function_I(constant_kernel(1.0), Lebesgue(), 1.0, 1.0, domain=dom)
print(f"series function at t=1 (unit kernel): {sv.sum:.10f}"
      f"   [e - 1 = {math.e - 1:.10f}]")

# Void order = the Fredholm case: everything is geometric and exact.
atoms = DiscreteMeasure(tuple((i / 8, 0.125) for i in range(8)))
kern = VoidKernel(k1=lambda x: np.full_like(np.asarray(x, float), 0.5))
sv = series_function_I(kern, atoms, 1.0, 0.0)
print(f"void-order series function (mass 1/2): {sv.sum:.10f}"
      f"   [q/(1-q) = 1]")
print()

# Monotonicity is checked by randomised falsification, and kernels of
# multiplicative type compose without defect.
mult = MultiplicativeKernel(nu_cumulative=lambda x: np.asarray(x, float))
rep = check_monotone(mult, dom, samples=200)
print("multiplicative kernel monotone check:", "pass" if rep.passed else rep)
triples = [(0.1, 0.3, 0.8), (0.0, 0.5, 1.0)]
print("multiplicative defect:", submultiplicative_defect(mult, triples))
print("constant-2 defect (not submultiplicative):",
      submultiplicative_defect(constant_kernel(2.0), triples))
print()

# Sums of kernels decompose the iterates into multi-indexed components;
# the constant multi-indices are the single-kernel iterates.
comp = sum_decomposition([constant_kernel(0.7), constant_kernel(1.3)],
                         Lebesgue(), 2, 1.0, 0.0)
print("components of the second iterate of k1 + k2 at (1, 0):")
for idx in sorted(comp):
    print(f"  j = {idx}: {comp[idx]:.8f}")
print(f"  sum = {sum(comp.values()):.8f}   [(c1+c2)^2 (t-s) = "
      f"{(0.7 + 1.3) ** 2:.8f}]")

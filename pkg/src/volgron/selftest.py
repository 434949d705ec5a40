"""Acceptance checks shared by the test suite and the selftest command.

Each check exercises one end-to-end contract at its stated tolerance and
returns a pass/fail result with a one-line detail.  The checks are pure
and deterministic (fixed seeds), so the command line and pytest see the
same verdicts.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, List

import numpy as np

from .domains import Interval1D, ProductBox, QuadratureGrid, VoidSet
from .fixpoint import picard_solve
from .gronwall import GronwallInput, gronwall_bound
from .kernels import (
    FractionalKernel,
    ProductKernel,
    SeparableKernel,
    SumKernel,
    VoidKernel,
    check_monotone,
    constant_kernel,
)
from .measures import DiscreteMeasure, Lebesgue, ProductMeasure
from .problems import banach_problem, volterra_problem
from .resolvent import (
    FractionalResolventParams,
    compose_layers,
    fractional_f,
    fractional_f_bound,
    iterated_kernels,
    product_bound,
    series_function_I,
    volterra_residual,
)
from .specfun import MLParams, mittag_leffler

__all__ = ["CheckResult", "ALL_CHECKS", "run_all"]

DOM = Interval1D(0.0, 1.0)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def _result(name, start, passed, detail) -> CheckResult:
    return CheckResult(name=name, passed=passed, detail=detail,
                       seconds=time.monotonic() - start)


def _void_kernel(c: float) -> VoidKernel:
    return VoidKernel(k1=lambda s: np.full_like(np.asarray(s, float), c))


def check_iterated_kernel_oracle() -> CheckResult:
    """Constant kernel: layers match c**n (t-s)**(n-1)/(n-1)! to 1e-6."""
    start = time.monotonic()
    c = 1.5
    tab = iterated_kernels(constant_kernel(c), Lebesgue(), 1.0, 6,
                           QuadratureGrid.for_interval(DOM, 7))
    nodes = tab.nodes
    m = nodes.size - 1
    pairs = [(m, 0), (m, m // 4), (m, m // 2), (m, 3 * m // 8),
             (7 * m // 8, m // 4), (3 * m // 4, 0), (3 * m // 4, m // 4),
             (7 * m // 8, 3 * m // 8), (5 * m // 8, m // 8), (m // 2, 0)]
    worst = 0.0
    for n in range(1, 7):
        for i, j in pairs:
            t, s = nodes[i], nodes[j]
            exact = c**n * (t - s) ** (n - 1) / math.factorial(n - 1)
            rel = abs(tab.value(n, i, j) - exact) / exact
            worst = max(worst, rel)
    elapsed = time.monotonic() - start
    ok = worst <= 1e-6 and elapsed < 10.0
    return _result("iterated-kernel-oracle", start, ok,
                   f"worst rel err {worst:.2e} over 10 pairs, n<=6, "
                   f"{elapsed:.2f}s")


def check_fractional_closed_form() -> CheckResult:
    """Gap recursion: closed form at beta=0 to 1e-10, bounded for beta>0."""
    start = time.monotonic()
    prm0 = FractionalResolventParams(0.75, 0.0, 1.0)
    worst = 0.0
    for n in range(1, 11):
        for x in (0.2, 0.5, 1.0):
            got = fractional_f(prm0, n, x, 1.0)
            exact = math.exp(n * math.lgamma(0.75) - math.lgamma(0.75 * n)
                             + (0.75 * n - 1.0) * math.log(x))
            worst = max(worst, abs(got - exact) / exact)
    prm1 = FractionalResolventParams(0.75, 0.1, 1.0)
    rng = np.random.default_rng(42)
    violations = 0
    for _ in range(20):
        n = int(rng.integers(1, 5))
        x = float(rng.uniform(0.05, 1.2))
        y = float(rng.uniform(0.05, 1.2))
        v = fractional_f(prm1, n, x, y)
        b = fractional_f_bound(prm1, n, x, y)
        if v > b * (1.0 + 1e-8):
            violations += 1
    ok = worst <= 1e-10 and violations == 0
    return _result("fractional-closed-form", start, ok,
                   f"closed-form rel err {worst:.2e}; "
                   f"{violations} bound violations at 20 points")


def _ml_direct(alpha, beta, z, p=1.0, terms=500):
    total = 0.0
    for n in range(terms):
        arg = alpha * n + beta
        if arg <= 0:
            continue
        log_t = (n * math.log(z) if z > 0 else (-math.inf if n else 0.0)) \
            - math.lgamma(arg) / p
        term = math.exp(log_t)
        total += term
        if n > 5 and term < 1e-30 * max(total, 1.0):
            break
    return total


def check_mittag_leffler() -> CheckResult:
    """Exponential/cosh identities and the direct-summation oracle."""
    start = time.monotonic()
    worst_exp = 0.0
    for z in [0.1] + list(range(1, 11)):
        sv = mittag_leffler(MLParams(1.0, 1.0, 1.0), float(z))
        worst_exp = max(worst_exp, abs(sv.sum - math.exp(z)) / math.exp(z))
    worst_cosh = 0.0
    for x in (0.5, 1.0, 1.5, 2.0):
        sv = mittag_leffler(MLParams(2.0, 1.0, 1.0), x * x)
        worst_cosh = max(worst_cosh, abs(sv.sum - math.cosh(x))
                         / math.cosh(x))
    rng = np.random.default_rng(42)
    worst_rand = 0.0
    for _ in range(20):
        alpha = float(rng.uniform(0.3, 2.5))
        beta = float(rng.uniform(0.1, 3.0))
        z = float(rng.uniform(0.0, 4.0))
        sv = mittag_leffler(MLParams(alpha, beta, 1.0), z)
        oracle = _ml_direct(alpha, beta, z)
        worst_rand = max(worst_rand, abs(sv.sum - oracle) / max(oracle, 1e-30))
    ok = worst_exp <= 1e-12 and worst_cosh <= 1e-10 and worst_rand <= 1e-10
    return _result("mittag-leffler", start, ok,
                   f"exp {worst_exp:.2e}, cosh {worst_cosh:.2e}, "
                   f"oracle {worst_rand:.2e}")


def check_volterra_identity() -> CheckResult:
    """Resolvent plugged into its linear equation: small defects."""
    start = time.monotonic()
    res_c = volterra_residual(constant_kernel(1.5), Lebesgue(), 1.0, 0.0,
                              grid=QuadratureGrid.for_interval(DOM, 6))
    mu = DiscreteMeasure(tuple((i / 8, 0.125) for i in range(8)))
    res_v = volterra_residual(_void_kernel(0.5), mu, 0.9, 0.2)
    ok = res_c < 1e-6 and res_v < 1e-12
    return _result("volterra-identity", start, ok,
                   f"interval residual {res_c:.2e}, void residual "
                   f"{res_v:.2e}")


def check_series_function() -> CheckResult:
    """The series function against its three closed descriptions."""
    start = time.monotonic()
    details = []
    ok = True
    for p in (1.0, 2.0):
        sv = series_function_I(constant_kernel(1.0), Lebesgue(), p, 1.0,
                               domain=DOM, tol=1e-12)
        ml = mittag_leffler(MLParams(1.0, 1.0, p), 1.0)
        err = abs(sv.sum - (ml.sum - 1.0))
        details.append(f"regular p={p:g}: {err:.1e}")
        ok &= err <= 1e-8 and sv.converged
    mu = DiscreteMeasure(tuple((i / 8, 0.125) for i in range(8)))
    sv = series_function_I(_void_kernel(math.sqrt(0.5)), mu, 2.0, 0.3)
    r = 0.5 ** (1.0 / 2.0)
    err = abs(sv.sum - r / (1.0 - r))
    details.append(f"void: {err:.1e}")
    ok &= err <= 1e-13
    k = FractionalKernel(alpha=0.75, beta=0.0)
    sv = series_function_I(k, Lebesgue(), 1.0, 1.0, domain=DOM, tol=1e-12)
    ml = mittag_leffler(MLParams(0.75, 1.0, 1.0), math.gamma(0.75))
    err = abs(sv.sum - (ml.sum - 1.0))
    details.append(f"fractional: {err:.1e}")
    ok &= err <= 1e-8 and sv.converged
    return _result("series-function", start, ok, ", ".join(details))


def check_gronwall_sharpness() -> CheckResult:
    """Sharp bound equals the fixed point of u = 1 + integral of u."""
    start = time.monotonic()
    prob = volterra_problem(rate=1.0, level=10)
    u, cert = picard_solve(prob.spec, prob.x0, tol=1e-7, max_iter=30)
    inp = GronwallInput(v0=1.0, k=constant_kernel(1.0), measure=Lebesgue(),
                        p=1.0, domain=DOM)
    nodes = prob.spec.grid
    idxs = np.linspace(64, nodes.size - 1, 20).astype(int)
    worst_sharp = 0.0
    worst_sup = 0.0
    for i in idxs:
        t = float(nodes[i])
        sharp, sup_form, _ = gronwall_bound(inp, t)
        worst_sharp = max(worst_sharp, abs(sharp - u[i]))
        worst_sup = max(worst_sup, abs(sup_form - math.exp(t)))
    ok = worst_sharp <= 1e-5 and worst_sup <= 1e-6
    return _result("gronwall-sharpness", start, ok,
                   f"|sharp - solver| {worst_sharp:.2e}, "
                   f"|sup - e^t| {worst_sup:.2e} at 20 points")


def check_fredholm_sharpness() -> CheckResult:
    """Discrete Fredholm equation solved exactly equals the sharp bound."""
    start = time.monotonic()
    pts = np.array([i / 10 for i in range(10)])
    masses = np.full(10, 0.1)
    mu = DiscreteMeasure(tuple(zip(pts, masses)))
    q = 0.4
    kern = _void_kernel(q)  # k1 = 0.4, total mass 1
    v_fn = lambda s: 1.0 + 0.5 * np.asarray(s, dtype=float)  # noqa: E731
    inp = GronwallInput(v0=v_fn, k=kern, measure=mu, p=1.0,
                        domain=VoidSet("fredholm"))
    # independent oracle: direct linear-algebra solution of
    # u_i = v_i + sum_j k1(x_j) m_j u_j
    B = np.tile(q * masses, (10, 1))
    u = np.linalg.solve(np.eye(10) - B, v_fn(pts))
    worst = 0.0
    for i, t in enumerate(pts):
        sharp, _, _ = gronwall_bound(inp, float(t))
        worst = max(worst, abs(sharp - u[i]))
    ok = worst <= 1e-10
    return _result("fredholm-sharpness", start, ok,
                   f"|linalg - sharp| {worst:.2e} over 10 atoms")


def check_picard_certificate() -> CheckResult:
    """Certificate soundness on the rate-2 linear Volterra equation."""
    start = time.monotonic()
    prob = volterra_problem(rate=2.0, level=10)
    x_hat, cert = picard_solve(prob.spec, prob.x0, tol=1e-6, max_iter=25)
    sound = True
    x = prob.x0.copy()
    worst_gap = -math.inf
    for n in range(1, 11):
        x = prob.spec.apply(x)
        measured = float(np.max(np.abs(x - prob.reference)))
        b_n = cert.bound(n, -1)
        worst_gap = max(worst_gap, measured - b_n)
        if measured > b_n + 1e-5:
            sound = False
    bounds = [cert.bound(n, -1) for n in range(1, 16)]
    decreasing = all(b2 <= b1 + 1e-15 for b1, b2 in zip(bounds, bounds[1:]))
    elapsed = time.monotonic() - start
    ok = sound and decreasing and cert.converged and cert.iterates <= 25 \
        and elapsed < 5.0
    return _result("picard-certificate", start, ok,
                   f"max(measured - bound) {worst_gap:.2e}, "
                   f"{cert.iterates} iterations, {elapsed:.2f}s")


def check_banach_reduction() -> CheckResult:
    """Singleton void configuration reproduces the geometric bound."""
    start = time.monotonic()
    prob = banach_problem(contraction=0.5, shift=1.0)
    _, cert = picard_solve(prob.spec, prob.x0, tol=1e-10, max_iter=60)
    worst = 0.0
    for n in range(1, 31):
        want = 0.5**n / 0.5  # d0 = 1
        worst = max(worst, abs(cert.bound(n) - want))
    ok = worst <= 1e-12
    return _result("banach-reduction", start, ok,
                   f"max |bound - geometric| {worst:.2e} for n<=30")


def check_product_kernels() -> CheckResult:
    """Box iterates equal products of axis iterates (equality clause)."""
    start = time.monotonic()
    c = 1.2
    box = ProductBox((Interval1D(0, 1), Interval1D(0, 1)))
    bgrid = QuadratureGrid.for_box(box, 4)
    kern = ProductKernel((constant_kernel(c), constant_kernel(c)))
    tab = iterated_kernels(kern, ProductMeasure((Lebesgue(), Lebesgue())),
                           1.0, 4, bgrid)
    a1, a2 = bgrid.axes
    factors = [(constant_kernel(c), Lebesgue()), (constant_kernel(c),
                                                  Lebesgue())]
    worst = 0.0
    samples = [(16, 16, 0, 0), (12, 8, 4, 2), (10, 14, 2, 6), (16, 12, 8, 4)]
    for n in range(1, 5):
        for i1, i2, j1, j2 in samples:
            got = tab.value(n, (i1, i2), (j1, j2))
            want = float(product_bound(
                factors, 1.0, n,
                (a1[i1], a2[i2]), (a1[j1], a2[j2])))
            worst = max(worst, abs(got - want) / max(abs(want), 1e-30))
    ok = worst <= 1e-6
    return _result("product-kernels", start, ok,
                   f"worst rel gap {worst:.2e} for n<=4")


def _random_separable(rng) -> SeparableKernel:
    a0, a1 = rng.uniform(0.1, 1.2, size=2)
    b0, b1 = rng.uniform(0.1, 1.2, size=2)
    return SeparableKernel(
        k0=lambda t, a0=a0, a1=a1: a0 + a1 * np.asarray(t, dtype=float),
        k1=lambda s, b0=b0, b1=b1: b0 + b1 * np.asarray(s, dtype=float),
    )


def check_invariant_suites(seed: int = 42) -> CheckResult:
    """Superadditivity, monotone dependence, semigroup, inheritance."""
    start = time.monotonic()
    rng = np.random.default_rng(seed)
    g4 = QuadratureGrid.for_interval(DOM, 4)
    g7 = QuadratureGrid.for_interval(DOM, 7)
    violations = {"superadd": 0, "monotone": 0, "semigroup": 0,
                  "inherit": 0}

    for _ in range(100):
        k = _random_separable(rng)
        l = _random_separable(rng)
        tk = iterated_kernels(k, Lebesgue(), 1.0, 3, g4,
                              estimate_error=False)
        tl = iterated_kernels(l, Lebesgue(), 1.0, 3, g4,
                              estimate_error=False)
        tkl = iterated_kernels(SumKernel((k, l)), Lebesgue(), 1.0, 3, g4,
                               estimate_error=False)
        for n in range(1, 4):
            lhs = tkl.layer(n)
            rhs = tk.layer(n) + tl.layer(n)
            if np.any(lhs < rhs - 1e-9 * (1.0 + np.abs(rhs))):
                violations["superadd"] += 1
            # k <= k + l pointwise forces ordered layers
            if np.any(tk.layer(n) > lhs + 1e-9 * (1.0 + np.abs(lhs))):
                violations["monotone"] += 1

    for _ in range(100):
        k = _random_separable(rng)
        tab = iterated_kernels(k, Lebesgue(), 1.0, 4, g7,
                               estimate_error=False)
        m_i, n_i = int(rng.integers(1, 3)), int(rng.integers(1, 3))
        composed = compose_layers(tab, m_i, n_i)
        direct = tab.layer(m_i + n_i)
        # pairs at least two panels apart: shorter ranges degenerate to
        # the one-panel trapezoid, whose O(h**3) defect is by design
        mask = np.tril(np.ones_like(direct, dtype=bool), k=-2)
        gap = np.max(np.abs(composed[mask] - direct[mask])
                     / (1.0 + np.abs(direct[mask])))
        if gap > 1e-6:
            violations["semigroup"] += 1

    for _ in range(100):
        k = _random_separable(rng)
        if not check_monotone(k, DOM, samples=50,
                              seed=int(rng.integers(1 << 30))).passed:
            continue
        tab = iterated_kernels(k, Lebesgue(), 1.0, 3, g4,
                               estimate_error=False)
        nodes = tab.nodes
        for _ in range(20):
            j, mid, i = np.sort(rng.integers(0, nodes.size, size=3))
            for n in range(1, 4):
                lhs = tab.value(n, int(mid), int(j))
                rhs = tab.value(n, int(i), int(j))
                if lhs > rhs + 1e-6 * (1.0 + abs(rhs)):
                    violations["inherit"] += 1
    total = sum(violations.values())
    ok = total == 0
    return _result("invariant-suites", start, ok,
                   "violations " + str(violations))


ALL_CHECKS: List[Callable[[], CheckResult]] = [
    check_iterated_kernel_oracle,
    check_fractional_closed_form,
    check_mittag_leffler,
    check_volterra_identity,
    check_series_function,
    check_gronwall_sharpness,
    check_fredholm_sharpness,
    check_picard_certificate,
    check_banach_reduction,
    check_product_kernels,
    check_invariant_suites,
]


def run_all(printer=print, seed: int = 42) -> bool:
    """Run every acceptance check, print one line each, return overall."""
    all_ok = True
    for check in ALL_CHECKS:
        res = check(seed=seed) if check is check_invariant_suites else check()
        all_ok &= res.passed
        status = "PASS" if res.passed else "FAIL"
        printer(f"[{status}] {res.name}: {res.detail}")
    return all_ok

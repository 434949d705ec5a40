"""Certified right-hand sides of resolvent and Gronwall inequalities.

Given data ``u(t) <= v(t) + (integral of k**p u0**p over the lower set of
t)**(1/p)``, the bound operations evaluate the series that dominate
``u``: the resolvent-weighted series, the per-iterate sequence bounds,
and the closed Gronwall bounds in their sharp (first) and supremum
(second) forms.  Two geometries are supported: one ordered interval axis
(``m = 1``) and the void order (``m = 0``, the Fredholm case, where every
series is a geometric sum in closed form).

The supremum of ``v0`` over a lower set is taken on the evaluation grid,
which under-approximates the true essential supremum; bound consumers
should sample ``v0`` on grids fine enough for their tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .domains import Interval1D, QuadratureGrid, VoidSet
from .kernels import FractionalKernel, Kernel, VoidKernel
from .measures import DiscreteMeasure, MeasureSpec
from .quadrature import range_weights_matrix
from .resolvent import (
    FractionalResolventParams,
    _column_operator,
    _density_on_nodes,
    _kp_triangle,
    _layer_update,
    _sorted_atoms,
    _tail_factorial,
    _void_q,
    fractional_inequality_constant,
)
from .specfun import MLParams, SeriesValue, ln_gamma, mittag_leffler

__all__ = [
    "GronwallInput",
    "BoundCurve",
    "VanishingReport",
    "check_vanishing",
    "resolvent_bound",
    "gronwall_sequence_bound",
    "gronwall_bound",
    "gronwall_curve",
    "induction_check",
    "InductionReport",
    "fractional_box_sup_bound",
]


def _as_fn(f: Union[float, Callable]) -> Callable:
    if callable(f):
        return f
    c = float(f)
    return lambda x: np.full_like(np.asarray(x, dtype=float), c, dtype=float)


@dataclass(frozen=True)
class GronwallInput:
    """Data of a Gronwall-type inequality.

    ``v0`` is the explicit forcing part; the kernel ``l``, when present,
    contributes the inhomogeneity ``(integral of l**p over the lower
    set)**(1/p)``, so that ``v = v0 + that term``.  ``k`` is the kernel of
    the implicit part.  The domain is an interval (``m = 1``) or a
    void-ordered set (``m = 0``).
    """

    v0: Union[float, Callable]
    k: Kernel
    measure: MeasureSpec
    p: float
    domain: Union[Interval1D, VoidSet]
    l: Optional[Kernel] = None

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("p must be >= 1")
        if isinstance(self.domain, VoidSet):
            if not isinstance(self.k, VoidKernel):
                raise TypeError("void-ordered inputs need a void kernel k")
            if self.l is not None and not isinstance(self.l, VoidKernel):
                raise TypeError("void-ordered inputs need a void kernel l")
            if not isinstance(self.measure, DiscreteMeasure):
                raise TypeError("void-ordered inputs integrate against atoms")
        elif not isinstance(self.domain, Interval1D):
            raise NotImplementedError(
                "bounds are implemented for one interval axis (m = 1) and "
                "the void order (m = 0)"
            )

    @property
    def m(self) -> int:
        """Number of ordered axes: 0 in the void case, 1 on intervals."""
        return 0 if isinstance(self.domain, VoidSet) else 1

    def v0_fn(self) -> Callable:
        return _as_fn(self.v0)

    def v_at(self, t: float, level: int = 8) -> float:
        """v(t) = v0(t) + (integral of l**p over the lower set)**(1/p)."""
        base = float(self.v0_fn()(np.asarray(float(t))))
        if self.l is None:
            return base
        if self.m == 0:
            q_l = _void_q(self.l, self.measure, self.p)
            return base + q_l ** (1.0 / self.p)
        if float(t) <= self.domain.lo:
            return base  # the lower set is null
        nodes, dens, W = _grid_data(self.domain.lo, t, self.measure, level)
        lcol = _col_pow(self.l, nodes, t, self.p)
        return base + float(W[-1] * dens @ lcol) ** (1.0 / self.p)


@dataclass(frozen=True)
class BoundCurve:
    """Bound values along a list of evaluation points.

    ``sharp`` holds the resolvent-weighted first form, ``sup`` the
    supremum-based second form; ``sharp <= sup`` up to tolerance at every
    point.  ``tail_bound`` is the largest truncation tail across points.
    """

    ts: np.ndarray
    sharp: np.ndarray
    sup: np.ndarray
    tail_bound: float
    m: int

    def to_csv(self) -> str:
        lines = ["t,sharp,sup,tail"]
        for t, a, b in zip(self.ts, self.sharp, self.sup):
            lines.append(f"{t:.17g},{a:.17g},{b:.17g},{self.tail_bound:.17g}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class VanishingReport:
    vanishes: bool
    criterion: str


def _grid_data(lo: float, t: float, measure, level: int):
    nodes = QuadratureGrid.for_interval(Interval1D(lo, float(t)), level).nodes
    dens = _density_on_nodes(measure, nodes)
    W = range_weights_matrix(nodes.size)
    return nodes, dens, W


def _col_pow(kernel: Kernel, nodes: np.ndarray, t: float, p: float) -> np.ndarray:
    vals = kernel.eval_grid(np.full(nodes.size, float(t)), nodes)
    with np.errstate(invalid="ignore", over="ignore"):
        return vals**p


def _suffix_integrals(g: np.ndarray, W: np.ndarray) -> np.ndarray:
    """Q[j] = integral over [s_j, t] of g, via the range weights."""
    m = g.size
    Q = np.empty(m)
    for j in range(m):
        Q[j] = W[m - 1 - j, : m - j] @ g[j:]
    return Q


def check_vanishing(kernel: Kernel, measure: MeasureSpec, p: float,
                    u0: Union[float, Callable], t, domain,
                    strategy: str = "auto", level: int = 8) -> VanishingReport:
    """Decide whether the iterate-weighted integrals of u0 tend to zero.

    Only recognised sufficient criteria return a positive answer; the
    fallback is Unknown, never a false positive.  Criteria:

    * void order: mass below one and a finite weighted integral of u0;
    * fractional kernels: finiteness of the pole-weighted integral of
      ``u0**p`` (for beta = 0 plain local p-integrability);
    * monotone interval kernels: a finite gap integral together with
      either a grid-bounded u0 and finite series function
      (``strategy="bounded_u0"``) or a finite integral of ``k**p u0**p``
      (``strategy="summability"``); ``"auto"`` tries both.
    """
    u0f = _as_fn(u0)
    if isinstance(kernel, VoidKernel):
        q = _void_q(kernel, measure, p)
        if q >= 1.0:
            return VanishingReport(False, "void mass >= 1")
        pts, masses = _sorted_atoms(measure)
        w = float(np.dot(masses,
                         np.asarray(kernel.k1(pts), dtype=float)**p
                         * np.asarray(u0f(pts), dtype=float)**p))
        if math.isfinite(w):
            return VanishingReport(True, "void geometric decay")
        return VanishingReport(False, "weighted integral infinite")

    if isinstance(kernel, FractionalKernel):
        kernel.require_p(p)
        from .quadrature import integrate_singular

        bp = kernel.beta * p
        if bp >= 1.0:
            return VanishingReport(False, "pole exponent too large")
        res = integrate_singular(
            lambda s: np.asarray(u0f(s), dtype=float)**p,
            gamma=1.0 - bp, delta=1.0,
            a=kernel.t0, b=float(t), tol=1e-9,
        )
        if res.converged and math.isfinite(res.value):
            return VanishingReport(True, "pole-weighted integral finite")
        return VanishingReport(False, "pole-weighted integral not certified")

    if not isinstance(domain, Interval1D):
        return VanishingReport(False, "unrecognised setting")
    if not kernel.monotone:
        return VanishingReport(False, "kernel not declared monotone")

    nodes, dens, W = _grid_data(domain.lo, float(t), measure, level)
    kcol = _col_pow(kernel, nodes, float(t), p)
    q = float(W[-1] * dens @ np.where(np.isfinite(kcol), kcol, np.inf))
    if not math.isfinite(q):
        return VanishingReport(False, "gap integral infinite")

    u0_vals = np.asarray(u0f(nodes), dtype=float)
    if strategy in ("auto", "bounded_u0"):
        if np.all(np.isfinite(u0_vals)):
            return VanishingReport(True, "bounded u0 with finite series function")
        if strategy == "bounded_u0":
            return VanishingReport(False, "u0 unbounded on the grid")
    if strategy in ("auto", "summability"):
        wint = float(W[-1] * dens @ (kcol * u0_vals**p))
        if math.isfinite(wint):
            return VanishingReport(True, "finite integral of k**p u0**p")
    return VanishingReport(False, "no criterion applied")


def resolvent_bound(v: Union[float, Callable], kernel: Kernel,
                    measure: MeasureSpec, p: float, t,
                    domain=None, tol: float = 1e-10, level: int = 8,
                    n_cap: int = 400) -> SeriesValue:
    """v(t) plus the series of p-th roots of iterate-weighted integrals.

    This is the right-hand side of the resolvent inequality.  In the
    void case the series is geometric and summed in closed form; on
    intervals the terms are quadrature values with a factorial tail
    (monotone kernels), and fractional kernels with beta = 0 use
    closed-form layers.  The caller is responsible for having checked
    the vanishing condition; this routine only evaluates the bound.
    """
    vf = _as_fn(v)
    if isinstance(kernel, VoidKernel):
        q = _void_q(kernel, measure, p)
        v_t = float(vf(np.asarray(float(t))))
        if q >= 1.0:
            return SeriesValue(math.inf, 0.0, 0, True)
        pts, masses = _sorted_atoms(measure)
        k1p = np.asarray(kernel.k1(pts), dtype=float)**p
        vi = float(np.dot(masses, k1p * np.asarray(vf(pts), dtype=float)**p))
        r = q ** (1.0 / p)
        return SeriesValue(v_t + vi ** (1.0 / p) / (1.0 - r), 0.0, 1, True)

    if domain is None or not isinstance(domain, Interval1D):
        raise ValueError("interval kernels need their interval domain")
    v_t = float(vf(np.asarray(float(t))))
    if float(t) <= domain.lo and not isinstance(measure, DiscreteMeasure):
        return SeriesValue(v_t, 0.0, 0, True)  # null lower set

    if isinstance(kernel, FractionalKernel) and kernel.beta == 0.0:
        from .quadrature import integrate_singular

        kernel.require_p(p)
        params = FractionalResolventParams(kernel.alpha, kernel.beta, p)
        ap = params.alpha_p
        X = float(t) - kernel.t0
        if X <= 0:
            return SeriesValue(v_t, 0.0, 0, True)
        vp = lambda s: np.asarray(vf(s), dtype=float)**p  # noqa: E731
        sup_v = float(np.max(np.asarray(
            vf(np.linspace(kernel.t0, float(t), 257)), dtype=float)))
        total = 0.0
        for n in range(1, n_cap + 1):
            ln_c = n * ln_gamma(ap) - ln_gamma(ap * n)
            res = integrate_singular(vp, gamma=1.0, delta=ap * n,
                                     a=kernel.t0, b=float(t), tol=1e-13)
            integ = math.exp(ln_c) * max(res.value, 0.0)
            total += integ ** (1.0 / p)
            tail_ml = sup_v * _ml_tail(ap, X, p, n + 1)
            if tail_ml < tol:
                return SeriesValue(v_t + total, tail_ml, n, True)
        return SeriesValue(v_t + total, math.inf, n_cap, False)

    use_level = level + 1 if not isinstance(measure, DiscreteMeasure) else level
    nodes, B, _ = _column_operator(kernel, measure, p, domain.lo, float(t),
                                   use_level)
    m = nodes.size
    cur = _kp_triangle(kernel, nodes, p)
    if isinstance(measure, DiscreteMeasure):
        pts, masses = _sorted_atoms(measure)
        keep = (pts >= domain.lo) & (pts <= t)
        row_w = masses[keep]
        if row_w.size != m:
            row_w = np.append(row_w, 0.0)
        advance = lambda R: B @ R  # noqa: E731
        majorant_ok = False
    else:
        dens = _density_on_nodes(measure, nodes)
        W = range_weights_matrix(m)
        A = cur * dens[None, :]
        row_w = W[-1] * dens
        advance = lambda R: _layer_update(A, R, W)  # noqa: E731
        majorant_ok = kernel.monotone

    v_vals = np.asarray(vf(nodes), dtype=float)
    sup_v = float(np.max(v_vals)) if np.all(np.isfinite(v_vals)) else math.inf
    q = float(row_w @ np.where(np.isfinite(cur[-1]), cur[-1], np.inf))
    majorant_ok = majorant_ok and math.isfinite(q) and math.isfinite(sup_v)
    total = 0.0
    for n in range(1, n_cap + 1):
        integ = float(row_w @ (cur[-1] * v_vals**p))
        if not math.isfinite(integ):
            return SeriesValue(math.inf, 0.0, n, True)
        total += max(integ, 0.0) ** (1.0 / p)
        if majorant_ok:
            tail = sup_v * _tail_factorial(q, p, n + 1)
            if tail < tol:
                return SeriesValue(v_t + total, tail, n, True)
        cur = advance(cur)
    return SeriesValue(v_t + total, math.inf, n_cap, False)


def _ml_tail(ap: float, X: float, p: float, n_start: int,
             max_terms: int = 100_000) -> float:
    """Tail of the beta-zero fractional majorant series from n_start."""
    total = 0.0
    prev = None
    n = n_start
    for _ in range(max_terms):
        log_t = (n * ln_gamma(ap) + ap * n * math.log(X)
                 - ln_gamma(ap * n + 1.0)) / p
        term = math.exp(log_t)
        total += term
        if prev is not None and prev > 0 and term / prev < 0.5:
            return total + 2.0 * term
        prev = term
        n += 1
    return math.inf


def gronwall_sequence_bound(inp: GronwallInput, u0: Union[float, Callable],
                            n: int, t, level: int = 8):
    """Per-iterate bounds: the sharp sum, the supremum form, and w_n.

    Returns ``(sharp, sup_form, w_n)`` where the sharp form is
    ``v(t) + w_n(t) + sum over i <= n-2`` of iterate-weighted integrals
    of ``v**p``, and the supremum form replaces the integrals by grid
    suprema and the inhomogeneity series.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    p = inp.p
    u0f = _as_fn(u0)
    v0f = inp.v0_fn()

    if inp.m == 0:
        q = _void_q(inp.k, inp.measure, p)
        pts, masses = _sorted_atoms(inp.measure)
        k1p = np.asarray(inp.k.k1(pts), dtype=float)**p
        v_vals = np.array([_void_v(inp, float(x)) for x in pts])
        u0_vals = np.asarray(u0f(pts), dtype=float)
        int_kv = float(np.dot(masses, k1p * v_vals**p))
        int_ku = float(np.dot(masses, k1p * u0_vals**p))
        v_t = _void_v(inp, float(t))
        w_n = (q ** (n - 1) * int_ku) ** (1.0 / p)
        sharp = v_t + w_n + sum(
            (q**i * int_kv) ** (1.0 / p) for i in range(0, n - 1)
        )
        sup_v0 = float(np.max(np.asarray(v0f(pts), dtype=float)))
        geo = sum(q ** (i / p) for i in range(0, n))
        if inp.l is not None:
            l1p = np.asarray(inp.l.k1(pts), dtype=float)**p
            int_l = float(np.dot(masses, l1p))
            lser = sum((q**i * int_l) ** (1.0 / p) for i in range(0, n))
        else:
            lser = 0.0
        sup_form = sup_v0 * geo + w_n + lser
        return sharp, sup_form, w_n

    lo = inp.domain.lo
    if float(t) <= lo:
        v0_t = float(v0f(np.asarray(float(t))))
        return v0_t, v0_t, 0.0  # null lower set: only v0 survives
    nodes, dens, W = _grid_data(lo, float(t), inp.measure, level)
    kcol = _col_pow(inp.k, nodes, float(t), p)
    g = kcol * dens
    Q = _suffix_integrals(g, W)
    q = Q[0]
    row = W[-1] * dens
    v_vals = np.array([inp.v_at(float(x), level=level) for x in nodes])
    u0_vals = np.asarray(u0f(nodes), dtype=float)
    v_t = inp.v_at(float(t), level=level)

    ln_fact = lambda i: ln_gamma(i + 1.0)  # noqa: E731
    w_n = (float(row @ (kcol * Q ** (n - 1) * u0_vals**p))
           / math.exp(ln_fact(n - 1))) ** (1.0 / p)
    sharp = v_t + w_n
    for i in range(0, n - 1):
        integ = float(row @ (kcol * Q**i * v_vals**p)) / math.exp(ln_fact(i))
        sharp += max(integ, 0.0) ** (1.0 / p)

    sup_v0 = float(np.max(np.asarray(v0f(nodes), dtype=float)))
    head = sum(math.exp((i * math.log(q) - ln_fact(i)) / p) if q > 0 else
               (1.0 if i == 0 else 0.0) for i in range(0, n))
    lser = 0.0
    if inp.l is not None:
        lcol = _col_pow(inp.l, nodes, float(t), p)
        for i in range(0, n):
            integ = float(row @ (Q**i * lcol)) / math.exp(ln_fact(i))
            lser += max(integ, 0.0) ** (1.0 / p)
    sup_form = sup_v0 * head + w_n + lser
    return sharp, sup_form, w_n


def _void_v(inp: GronwallInput, t: float) -> float:
    base = float(inp.v0_fn()(np.asarray(t)))
    if inp.l is None:
        return base
    q_l = _void_q(inp.l, inp.measure, inp.p)
    return base + q_l ** (1.0 / inp.p)


def gronwall_bound(inp: GronwallInput, t, tol: float = 1e-12,
                   level: int = 8, n_cap: int = 500):
    """Both closed Gronwall bounds at t: ``(sharp, sup_form, tail)``.

    In the void case every series is geometric and closed-form (zero
    tail).  On an interval the series are truncated with a certified
    factorial tail, reported as ``tail``.
    """
    p = inp.p
    if inp.m == 0:
        q = _void_q(inp.k, inp.measure, p)
        if q >= 1.0:
            return math.inf, math.inf, 0.0
        r = q ** (1.0 / p)
        pts, masses = _sorted_atoms(inp.measure)
        k1p = np.asarray(inp.k.k1(pts), dtype=float)**p
        v_vals = np.array([_void_v(inp, float(x)) for x in pts])
        int_kv = float(np.dot(masses, k1p * v_vals**p))
        v_t = _void_v(inp, float(t))
        sharp = v_t + int_kv ** (1.0 / p) / (1.0 - r)
        sup_v0 = float(np.max(np.asarray(inp.v0_fn()(pts), dtype=float)))
        if inp.l is not None:
            l1p = np.asarray(inp.l.k1(pts), dtype=float)**p
            int_l = float(np.dot(masses, l1p)) ** (1.0 / p)
        else:
            int_l = 0.0
        sup_form = (sup_v0 + int_l) / (1.0 - r)
        return sharp, sup_form, 0.0

    lo = inp.domain.lo
    if float(t) <= lo:
        v0_t = float(inp.v0_fn()(np.asarray(float(t))))
        return v0_t, v0_t, 0.0  # null lower set: only v0 survives
    nodes, dens, W = _grid_data(lo, float(t), inp.measure, level)
    kcol = _col_pow(inp.k, nodes, float(t), p)
    g = kcol * dens
    Q = _suffix_integrals(g, W)
    q = Q[0]
    row = W[-1] * dens
    v_vals = np.array([inp.v_at(float(x), level=level) for x in nodes])
    v_t = inp.v_at(float(t), level=level)
    sup_v = float(np.max(v_vals))

    sharp = v_t
    tail = math.inf
    for n in range(0, n_cap):
        integ = float(row @ (kcol * Q**n * v_vals**p)) \
            / math.exp(ln_gamma(n + 1.0))
        sharp += max(integ, 0.0) ** (1.0 / p)
        tail = sup_v * _tail_factorial(q, p, n + 2)
        if tail < tol:
            break

    sup_v0 = float(np.max(np.asarray(inp.v0_fn()(nodes), dtype=float)))
    ml = mittag_leffler(MLParams(1.0, 1.0, p), q ** (1.0 / p), tol=1e-14)
    head = sup_v0 * ml.sum
    lser = 0.0
    ltail = 0.0
    if inp.l is not None:
        lcol = _col_pow(inp.l, nodes, float(t), p)
        int_l = float(row @ lcol)
        for n in range(0, n_cap):
            integ = float(row @ (Q**n * lcol)) / math.exp(ln_gamma(n + 1.0))
            lser += max(integ, 0.0) ** (1.0 / p)
            ltail = int_l ** (1.0 / p) * _tail_factorial(q, p, n + 1)
            if ltail < tol:
                break
    sup_form = head + lser
    total_tail = tail + sup_v0 * ml.tail_bound + ltail
    return sharp, sup_form, total_tail


def gronwall_curve(inp: GronwallInput, ts: Sequence[float],
                   tol: float = 1e-12, level: int = 8) -> BoundCurve:
    """Evaluate both Gronwall bounds along a list of points."""
    sharp = np.empty(len(ts))
    sup = np.empty(len(ts))
    worst = 0.0
    for i, t in enumerate(ts):
        a, b, tail = gronwall_bound(inp, t, tol=tol, level=level)
        sharp[i] = a
        sup[i] = b
        worst = max(worst, tail)
    return BoundCurve(ts=np.asarray(ts, dtype=float), sharp=sharp, sup=sup,
                      tail_bound=worst, m=inp.m)


@dataclass(frozen=True)
class InductionReport:
    passed: bool
    witness: Optional[tuple] = None


def induction_check(psi: Callable, sequence: Sequence[np.ndarray],
                    J: Optional[np.ndarray] = None,
                    tol: float = 0.0) -> InductionReport:
    """Verify ``u_n <= psi^n(u_0)`` pointwise on the mask J.

    ``psi`` must be monotone on J (declared by the caller); ``sequence``
    is ``[u_0, u_1, ...]`` of grid functions.  Returns the first
    violating (iteration, index) pair as witness.
    """
    if not sequence:
        raise ValueError("need at least u_0")
    u = np.asarray(sequence[0], dtype=float)
    mask = np.ones_like(u, dtype=bool) if J is None else np.asarray(J, dtype=bool)
    power = u.copy()
    for n, u_n in enumerate(sequence[1:], start=1):
        power = np.asarray(psi(power), dtype=float)
        u_n = np.asarray(u_n, dtype=float)
        bad = (u_n > power + tol) & mask
        if np.any(bad):
            idx = int(np.argmax(bad))
            return InductionReport(passed=False, witness=(n, idx))
    return InductionReport(passed=True)


def fractional_box_sup_bound(k0_t: float, alphas: Sequence[float],
                             betas: Sequence[float], p: float,
                             t: Sequence[float], t0: Sequence[float],
                             v_sup: float, tol: float = 1e-12,
                             max_terms: int = 10_000) -> float:
    """Supremum-form bound for multivariate fractional kernels.

    Evaluates ``v_sup`` times the derived constant times the convergent
    series of per-axis gamma-quotient powers.  The constant is valid but
    possibly non-optimal (it reduces to the exact one when every beta
    vanishes).  The additive ``v(t)`` term is the caller's.
    """
    params = [FractionalResolventParams(a, b, p)
              for a, b in zip(alphas, betas)]
    for prm in params:
        if prm.beta_p >= 1.0:
            raise ValueError("series requires beta * p < 1 on every axis")
    c_ab = fractional_inequality_constant(alphas, betas, p)
    c_b = math.exp(sum(ln_gamma(1.0 - prm.beta_p) / p for prm in params))
    total = 0.0
    prev = None
    for n in range(1, max_terms + 1):
        log_term = n * math.log(k0_t) if k0_t > 0 else -math.inf
        for prm, ti, t0i in zip(params, t, t0):
            g = prm.gap
            X = float(ti) - float(t0i)
            if X <= 0:
                raise ValueError("need t above the origin on every axis")
            log_term += (n * (ln_gamma(prm.alpha_p) + g * math.log(X))
                         - ln_gamma(g * n + 1.0)) / p
        term = math.exp(log_term)
        total += term
        if prev is not None and prev > 0 and term / prev < 0.5 and term < tol:
            total += 2.0 * term
            break
        prev = term
    return v_sup * c_ab * c_b * total

"""Iterated kernels, resolvent series and their closed-form families.

The resolvent sequence of a kernel k against a measure mu starts at
``R_1 = k`` and advances by

    R_{n+1}(t, s) = integral over [s, t] of k(t, u) R_n(u, s) mu(du).

``iterated_kernels`` tabulates ``R_{k**p, mu, n}`` on a triangular grid.
On intervals the recursion is driven by composite range weights that are
exact for cubics; discrete and void-ordered settings are exact sums;
fractional kernels bypass grid quadrature entirely via a one-dimensional
recursion in the gap variable, with gamma-function closed forms when the
pole exponent ``beta`` vanishes.

Series built on top (the resolvent itself, and the series function whose
finiteness defines the tractable kernel class) carry certified truncation
tails dispatched per family: factorial majorants for monotone kernels on
intervals, geometric sums in the void case, Mittag-Leffler majorants for
fractional kernels, the exponential closed form for multiplicative
kernels.  Kernels with no recognised majorant still get a truncated
value, flagged as unconverged.  Quadrature error is controlled separately
by the grid level (series evaluate their recursions one level finer than
requested).
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import chebyshev as _cheb

from .domains import Interval1D, ProductBox, QuadratureGrid
from .extreal import ExtReal
from .kernels import (
    FractionalKernel,
    Kernel,
    MultiplicativeKernel,
    ProductKernel,
    TransformedFractionalKernel,
    VoidKernel,
)
from .measures import (
    DiscreteMeasure,
    Lebesgue,
    MeasureSpec,
    ProductMeasure,
    WeightedLebesgue,
)
from .quadrature import integrate, range_weights_matrix
from .specfun import SeriesValue, gamma_min_point, ln_gamma

__all__ = [
    "MaskedEntryError",
    "ComponentBudgetError",
    "ResolventTable",
    "FractionalResolventParams",
    "fractional_f",
    "fractional_f_bound",
    "fractional_inequality_constant",
    "iterated_kernels",
    "compose_layers",
    "resolvent_series",
    "volterra_residual",
    "series_function_I",
    "sum_decomposition",
    "product_bound",
]


class MaskedEntryError(LookupError):
    """Access to a table entry outside the triangular region."""


class ComponentBudgetError(RuntimeError):
    """A sum decomposition would exceed the component budget."""


_TRI_CACHE: dict = {}


def _tril_mask(m: int) -> np.ndarray:
    mask = _TRI_CACHE.get(m)
    if mask is None:
        mask = np.tril(np.ones((m, m), dtype=bool))
        _TRI_CACHE[m] = mask
    return mask


# ---------------------------------------------------------------------------
# tables
# ---------------------------------------------------------------------------


@dataclass
class ResolventTable:
    """Tabulated iterated kernels ``R_{k**p, mu, n}`` on a grid.

    ``values[n-1, i, j]`` approximates ``R_n(t_i, t_j)``; for ordered
    domains entries with ``j > i`` are masked (stored as zero and guarded
    by the accessor).  Box tables index per axis:
    ``values[n-1, i1, i2, j1, j2]``.  ``err_est`` comes from a two-level
    grid comparison and is 0 on exact (discrete, void, closed-form)
    paths.  Finished tables are immutable by convention and safe to
    share.
    """

    grid: QuadratureGrid
    n_max: int
    p: float
    values: np.ndarray
    err_est: float
    measure: MeasureSpec
    ordered: bool = True
    family: str = "generic"
    status: str = "certified"

    @property
    def nodes(self) -> np.ndarray:
        return self.grid.nodes

    def value(self, n: int, i, j) -> float:
        """Entry ``R_n(t_i, t_j)``; raises on masked index pairs."""
        if not 1 <= n <= self.n_max:
            raise IndexError(f"layer {n} outside 1..{self.n_max}")
        if self.values.ndim == 3:
            if self.ordered and j > i:
                raise MaskedEntryError(f"entry (i={i}, j={j}) is masked")
            return float(self.values[n - 1, i, j])
        i1, i2 = i
        j1, j2 = j
        if self.ordered and (j1 > i1 or j2 > i2):
            raise MaskedEntryError(f"entry (i={i}, j={j}) is masked")
        return float(self.values[n - 1, i1, i2, j1, j2])

    def layer(self, n: int) -> np.ndarray:
        if not 1 <= n <= self.n_max:
            raise IndexError(f"layer {n} outside 1..{self.n_max}")
        return self.values[n - 1]

    def _rows(self):
        if self.values.ndim == 3:
            nodes = self.nodes
            m = nodes.size
            for n in range(1, self.n_max + 1):
                for i in range(m):
                    top = m if not self.ordered else i + 1
                    for j in range(top):
                        yield (n, (nodes[i],), (nodes[j],),
                               float(self.values[n - 1, i, j]))
        else:
            a1, a2 = self.grid.axes
            for n in range(1, self.n_max + 1):
                for i1 in range(a1.size):
                    for i2 in range(a2.size):
                        for j1 in range(i1 + 1):
                            for j2 in range(i2 + 1):
                                yield (n, (a1[i1], a2[i2]), (a1[j1], a2[j2]),
                                       float(self.values[n - 1, i1, i2, j1, j2]))

    def to_csv(self) -> str:
        ndim = len(self.grid.axes)
        if ndim == 1:
            heads = ["n", "t", "s", "value"]
        else:
            heads = (["n"] + [f"t{k+1}" for k in range(ndim)]
                     + [f"s{k+1}" for k in range(ndim)] + ["value"])
        out = io.StringIO()
        out.write(",".join(heads) + "\n")
        for n, t, s, v in self._rows():
            cells = [str(n)] + [f"{x:.17g}" for x in t] + [f"{x:.17g}" for x in s]
            cells.append(f"{v:.17g}")
            out.write(",".join(cells) + "\n")
        return out.getvalue()

    def to_json(self) -> str:
        payload = {
            "n_max": self.n_max,
            "p": self.p,
            "family": self.family,
            "status": self.status,
            "err_est": self.err_est,
            "axes": [list(map(float, a)) for a in self.grid.axes],
            "entries": [
                {"n": n, "t": list(t), "s": list(s), "value": v}
                for n, t, s, v in self._rows()
            ],
        }
        return json.dumps(payload, sort_keys=True)


# ---------------------------------------------------------------------------
# interval recursion machinery
# ---------------------------------------------------------------------------


def _density_on_nodes(measure, nodes: np.ndarray) -> np.ndarray:
    h = nodes[1] - nodes[0]
    if isinstance(measure, Lebesgue):
        return np.full(nodes.size, h)
    if isinstance(measure, WeightedLebesgue):
        w = np.asarray(measure.weight(nodes), dtype=float)
        if np.any(w < 0):
            raise ValueError("measure weights must be nonnegative")
        return h * w
    raise TypeError(f"measure {measure!r} has no density on a grid")


def _kp_triangle(kernel: Kernel, nodes: np.ndarray, p: float) -> np.ndarray:
    """k(t_i, t_l)**p on the closed lower triangle, zero above it."""
    m = nodes.size
    T = np.broadcast_to(nodes[:, None], (m, m))
    S = np.broadcast_to(nodes[None, :], (m, m))
    vals = kernel.eval_grid(T, S)
    with np.errstate(invalid="ignore", over="ignore"):
        vals = vals**p
    return np.where(_tril_mask(m), vals, 0.0)


def _layer_update(A: np.ndarray, R: np.ndarray, W: np.ndarray) -> np.ndarray:
    """One recursion step R'[i, j] = sum_l W[i-j, l-j] A[i, l] R[l, j]."""
    m = A.shape[0]
    out = np.zeros_like(R)
    for j in range(m):
        sub = A[j:, j:] * W[: m - j, : m - j]
        out[j:, j] = sub @ R[j:, j]
    return out


def _interval_layers(kernel, measure, p, nodes, n_max) -> np.ndarray:
    dens = _density_on_nodes(measure, nodes)
    kp = _kp_triangle(kernel, nodes, p)
    A = kp * dens[None, :]
    W = range_weights_matrix(nodes.size)
    layers = np.empty((n_max, nodes.size, nodes.size))
    layers[0] = kp
    for n in range(1, n_max):
        layers[n] = _layer_update(A, layers[n - 1], W)
    return layers


def _sorted_atoms(measure: DiscreteMeasure):
    order = np.argsort(measure.points)
    return measure.points[order], measure.masses[order]


def _discrete_layers(kernel, measure: DiscreteMeasure, p, n_max,
                     ordered: bool) -> Tuple[np.ndarray, np.ndarray]:
    nodes, masses = _sorted_atoms(measure)
    m = nodes.size
    T = np.broadcast_to(nodes[:, None], (m, m))
    S = np.broadcast_to(nodes[None, :], (m, m))
    vals = kernel.eval_grid(T, S)
    with np.errstate(invalid="ignore", over="ignore"):
        vals = vals**p
    if ordered:
        vals = np.where(_tril_mask(m), vals, 0.0)
    A = vals * masses[None, :]
    layers = np.empty((n_max, m, m))
    layers[0] = vals
    for n in range(1, n_max):
        layers[n] = A @ layers[n - 1]
    return nodes, layers


# ---------------------------------------------------------------------------
# fractional kernels: one-dimensional recursion in the gap variable
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FractionalResolventParams:
    """Derived quantities of a fractional kernel raised to the power p.

    With ``alpha_p = (alpha - 1) p + 1`` the p-th power of the kernel is
    again fractional with exponents ``(alpha_p, beta * p)``; the class
    constraint is ``beta * p < alpha_p``.
    """

    alpha: float
    beta: float
    p: float

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("p must be >= 1")
        if self.alpha <= 0 or self.beta < 0:
            raise ValueError("need alpha > 0 and beta >= 0")
        if not self.beta_p < self.alpha_p:
            raise ValueError(
                f"need beta*p < (alpha-1)*p + 1, got alpha={self.alpha}, "
                f"beta={self.beta}, p={self.p}"
            )

    @property
    def alpha_p(self) -> float:
        return (self.alpha - 1.0) * self.p + 1.0

    @property
    def beta_p(self) -> float:
        return self.beta * self.p

    @property
    def gap(self) -> float:
        """alpha_p - beta_p, the exponent gained per layer."""
        return self.alpha_p - self.beta_p

    def sigma(self, n: int) -> float:
        """Exponent of the gap variable in the n-th iterate."""
        return self.gap * n + self.beta_p - 1.0

    def ln_c_hat(self, n: int) -> float:
        """log of the gamma-quotient product entering the layer bound."""
        g, bp = self.gap, self.beta_p
        return sum(ln_gamma(g * i) - ln_gamma(g * i + bp) for i in range(1, n))

    @property
    def n_gamma(self) -> int:
        """First index at which the gap multiples reach the gamma minimiser."""
        x_min, _ = gamma_min_point()
        return max(1, math.ceil(x_min / self.gap))

    @property
    def ln_c_hat_max(self) -> float:
        """log of the largest gamma-quotient product over all layer counts."""
        return max(self.ln_c_hat(i) for i in range(1, self.n_gamma + 1))


def fractional_f_bound(params: FractionalResolventParams, n: int,
                       x: float, y: float) -> float:
    """Closed-form upper bound for the n-th fractional iterate.

    Coincides with the iterate exactly when beta = 0.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if x <= 0:
        raise ValueError("x must be positive")
    bp = params.beta_p
    if bp > 0 and y <= 0:
        return math.inf
    g = params.gap
    log_v = (params.ln_c_hat(n) + n * ln_gamma(params.alpha_p)
             - ln_gamma(g * n + bp) + (g * n + bp - 1.0) * math.log(x))
    if bp > 0:
        log_v -= bp * math.log(y)
    return math.exp(log_v)


def fractional_inequality_constant(alphas: Sequence[float],
                                   betas: Sequence[float], p: float) -> float:
    """A valid constant for the multivariate fractional resolvent bound.

    The product over axes of the maximal gamma-quotient products.  Equals
    1 when every beta vanishes.  Valid, possibly non-optimal; no explicit
    optimal constant is known to this package.
    """
    log_c = 0.0
    for a, b in zip(alphas, betas):
        log_c += FractionalResolventParams(a, b, p).ln_c_hat_max
    return math.exp(log_c)


@lru_cache(maxsize=4096)
def _jacobi_rule(deg: int, a: float, b: float):
    """Nodes and weights for integral over [0, 1] of
    (1-lam)**a * lam**b * g(lam) d lam."""
    from scipy.special import roots_jacobi

    xj, wj = roots_jacobi(deg, a, b)
    lam = 0.5 * (xj + 1.0)
    w = wj * 2.0 ** (-a - b - 1.0)
    return lam, w


class _FractionalProfile:
    """Per-column evaluator of fractional iterates sharing a fixed y.

    Factors the n-th iterate as ``x**(alpha_p n - 1) * psi_n(x)``, which
    makes psi_n analytic up to the left endpoint (the factored power is
    the exact small-gap exponent), tabulates psi_n as a Chebyshev
    interpolant in log x, and advances layer by layer with Gauss-Jacobi
    quadrature whose weight absorbs both endpoint powers of the
    recursion integral.  Only needed for beta > 0; beta = 0 has closed
    forms.
    """

    _WIDTH = 50.0

    def __init__(self, params: FractionalResolventParams, y: float,
                 x_max: float, n_max: int, deg: int = 96,
                 jacobi_nodes: int = 192):
        if y <= 0 or x_max <= 0:
            raise ValueError("profile needs y > 0 and x_max > 0")
        self.params = params
        self.y = y
        self.n_max = n_max
        self.u_hi = math.log(x_max)
        self.u_lo = self.u_hi - self._WIDTH
        self.deg = deg
        self.jacobi_nodes = jacobi_nodes
        self._coefs: list = [None] * (n_max + 1)
        self._build()

    def _to_unit(self, u: np.ndarray) -> np.ndarray:
        return (2.0 * u - (self.u_lo + self.u_hi)) / (self.u_hi - self.u_lo)

    def _psi_at(self, n: int, x: np.ndarray) -> np.ndarray:
        # psi tends to a constant at the left end, so the clamp is benign
        u = np.clip(np.log(np.maximum(x, 1e-300)), self.u_lo, self.u_hi)
        return _cheb.chebval(self._to_unit(u), self._coefs[n])

    def _build(self):
        ap = self.params.alpha_p
        bp = self.params.beta_p
        k = np.arange(self.deg)
        xc = np.cos(math.pi * (2 * k + 1) / (2 * self.deg))
        u_nodes = 0.5 * ((self.u_hi + self.u_lo) + (self.u_hi - self.u_lo) * xc)
        xs = np.exp(u_nodes)
        psi = np.full(self.deg, self.y ** (-bp))
        self._coefs[1] = _cheb.chebfit(xc, psi, self.deg - 1)
        for n in range(1, self.n_max):
            tau_n = ap * n - 1.0
            lam, w = _jacobi_rule(self.jacobi_nodes, ap - 1.0, tau_n)
            z = lam[:, None] * xs[None, :]
            psi_z = self._psi_at(n, z)
            factor = (z + self.y) ** (-bp)
            psi_next = w @ (factor * psi_z)
            self._coefs[n + 1] = _cheb.chebfit(xc, psi_next, self.deg - 1)

    def f(self, n: int, x) -> np.ndarray:
        """The n-th iterate at gap values x (vectorised)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        tau = self.params.alpha_p * n - 1.0
        out = np.empty_like(x)
        pos = x > 0
        out[pos] = x[pos] ** tau * self._psi_at(n, x[pos])
        if np.any(~pos):
            out[~pos] = _gap_limit(self.params, n, self.y)
        return out


def _gap_limit(params: FractionalResolventParams, n: int, y: float) -> float:
    """Limit of the n-th iterate as the gap variable tends to zero.

    The small-gap exponent is ``alpha_p n - 1`` (the pole weight is
    regular at the inner point there), with the gamma-quotient constant
    in the degenerate exponent-zero case.
    """
    ap = params.alpha_p
    tau = ap * n - 1.0
    if tau > 0:
        return 0.0
    if tau < 0:
        return math.inf
    # tau == 0: psi_n(0+) = y**(-beta_p n) * prod of beta factors
    log_c = sum(math.log(_beta_val(ap * i, ap)) for i in range(1, n))
    return math.exp(log_c - params.beta_p * n * math.log(y)) \
        if params.beta_p > 0 else math.exp(log_c)


def _beta_val(a: float, b: float) -> float:
    return math.exp(ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b))


def _count_vectors(n: int, N: int):
    """All nonnegative integer vectors of length N summing to n."""
    if N == 1:
        yield (n,)
        return
    for head in range(n + 1):
        for rest in _count_vectors(n - head, N - 1):
            yield (head,) + rest


def _transformed_layers(kernel: TransformedFractionalKernel, p, nodes,
                        n_max, budget: int = 100_000) -> np.ndarray:
    """Iterates of a transformed fractional sum kernel.

    Transporting by the increasing map reduces every layer to the gap
    recursion; with all pole exponents zero the multi-index components
    collapse into a multinomial sum of gamma quotients, otherwise the
    single-part recursion is integrated numerically (several singular
    parts are not supported).  The transported setting holds for p = 1.
    """
    if p != 1.0:
        raise NotImplementedError(
            "transformed fractional tables hold in the p = 1 setting"
        )
    m = nodes.size
    phi = np.asarray(kernel.phi(nodes), dtype=float)
    phi0 = float(kernel.phi(np.asarray(kernel.t0)))
    dot = np.asarray(kernel.phi_dot(nodes), dtype=float)
    N = kernel.n_parts
    layers = np.zeros((n_max, m, m))
    X = phi[:, None] - phi[None, :]
    strict = np.tril(np.ones((m, m), dtype=bool), k=-1)

    if all(b == 0.0 for b in kernel.betas):
        n_counts = sum(1 for n in range(1, n_max + 1)
                       for _ in _count_vectors(n, N))
        if n_counts > budget:
            raise ComponentBudgetError(
                f"{n_counts} multinomial components exceed budget {budget}"
            )
        alphas = np.asarray(kernel.alphas)
        ln_g = np.array([ln_gamma(a) for a in alphas])
        for n in range(1, n_max + 1):
            vals = np.zeros((m, m))
            acc = np.zeros(int(strict.sum()))
            lx = np.log(X[strict])
            ln_fact_n = ln_gamma(n + 1.0)
            for counts in _count_vectors(n, N):
                iv = np.asarray(counts, dtype=float)
                A = float(iv @ alphas)
                log_coef = (ln_fact_n - sum(ln_gamma(c + 1.0) for c in counts)
                            + float(iv @ ln_g) - ln_gamma(A))
                acc += np.exp(log_coef + (A - 1.0) * lx)
            vals[strict] = acc
            sing = min(float(np.asarray(c, dtype=float) @ alphas)
                       for c in _count_vectors(n, N))
            np.fill_diagonal(vals, 0.0 if sing > 1.0 else np.inf)
            with np.errstate(invalid="ignore"):
                prod = vals * dot[None, :]
            # inf * 0 at a vanishing-derivative node follows the
            # measure-theoretic convention
            layers[n - 1] = np.where(np.isnan(prod), 0.0, prod)
        return layers

    if N != 1:
        raise NotImplementedError(
            "several transformed parts with poles exceed the supported "
            "setting; decompose with sum_decomposition instead"
        )
    params = FractionalResolventParams(kernel.alphas[0], kernel.betas[0], 1.0)
    for j in range(m):
        y = phi[j] - phi0
        if y <= 0:
            layers[:, j:, j] = np.inf
            continue
        for n in range(1, n_max + 1):
            layers[n - 1, j, j] = dot[j] * _gap_limit(params, n, y)
        xs = phi[j + 1:] - phi[j]
        if xs.size == 0:
            continue
        prof = _FractionalProfile(params, y, float(xs[-1]), n_max)
        for n in range(1, n_max + 1):
            layers[n - 1, j + 1:, j] = dot[j] * prof.f(n, xs)
    return layers


def fractional_f(params: FractionalResolventParams, n: int,
                 x: float, y: float) -> float:
    """The n-th iterate of a fractional kernel power in gap coordinates.

    ``x`` is the distance between the two arguments and ``y`` the
    distance of the inner argument to the left endpoint.  For beta = 0
    the value is the exact gamma-quotient closed form

        gamma(alpha_p)**n / gamma(alpha_p * n) * x**(alpha_p * n - 1);

    otherwise the defining recursion is integrated layer by layer with
    singularity-absorbing quadrature.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if x < 0:
        raise ValueError("x must be nonnegative")
    bp = params.beta_p
    if bp == 0.0:
        if x == 0.0:
            return _gap_limit(params, n, y)
        ap = params.alpha_p
        return math.exp(n * ln_gamma(ap) - ln_gamma(ap * n)
                        + (ap * n - 1.0) * math.log(x))
    if y <= 0:
        return math.inf
    if x == 0.0:
        return _gap_limit(params, n, y)
    if n == 1:
        return x ** (params.alpha_p - 1.0) * y ** (-bp)
    prof = _FractionalProfile(params, y, x, n)
    return float(prof.f(n, x)[0])


def _fractional_layers(kernel: FractionalKernel, p, nodes, n_max,
                       jacobi_nodes: int = 160) -> Tuple[np.ndarray, float]:
    params = FractionalResolventParams(kernel.alpha, kernel.beta, p)
    m = nodes.size
    layers = np.zeros((n_max, m, m))

    if params.beta_p == 0.0:
        ap = params.alpha_p
        X = nodes[:, None] - nodes[None, :]
        strict = np.tril(np.ones((m, m), dtype=bool), k=-1)
        for n in range(1, n_max + 1):
            ln_c = n * ln_gamma(ap) - ln_gamma(ap * n)
            expo = ap * n - 1.0
            vals = np.zeros((m, m))
            vals[strict] = np.exp(ln_c + expo * np.log(X[strict]))
            np.fill_diagonal(vals, _gap_limit(params, n, 1.0))
            layers[n - 1] = vals
        return layers, 0.0

    err = 0.0
    for j in range(m):
        y = nodes[j] - kernel.t0
        if y <= 0:
            # the column sits on the pole of the (s - t0) weight
            layers[:, j:, j] = np.inf
            continue
        np_col = nodes[j + 1:] - nodes[j]
        for n in range(1, n_max + 1):
            layers[n - 1, j, j] = _gap_limit(params, n, y)
        if np_col.size == 0:
            continue
        x_top = float(np_col[-1])
        prof_lo = _FractionalProfile(params, y, x_top, n_max,
                                     jacobi_nodes=jacobi_nodes)
        prof_hi = _FractionalProfile(params, y, x_top, n_max,
                                     jacobi_nodes=jacobi_nodes + 64)
        for n in range(1, n_max + 1):
            vals = prof_hi.f(n, np_col)
            layers[n - 1, j + 1:, j] = vals
            lo = prof_lo.f(n, np_col)
            finite = np.isfinite(vals) & np.isfinite(lo)
            if np.any(finite):
                err = max(err, float(np.max(np.abs(vals[finite] - lo[finite]))))
    return layers, err


# ---------------------------------------------------------------------------
# table construction
# ---------------------------------------------------------------------------


def iterated_kernels(kernel: Kernel, measure: MeasureSpec, p: float,
                     n_max: int, grid: Optional[QuadratureGrid] = None,
                     estimate_error: bool = True) -> ResolventTable:
    """Tabulate the iterated kernels of ``kernel**p`` against a measure.

    Parameters
    ----------
    kernel, measure, p
        The kernel family, the measure and the power.
    n_max : int
        Number of layers; layer 1 is the kernel power itself.
    grid : QuadratureGrid, optional
        Evaluation grid.  Omitted for discrete measures, whose atoms form
        the grid.
    estimate_error : bool
        Compare against a neighbouring grid level to report ``err_est``
        (exact paths always report 0).

    Returns
    -------
    ResolventTable
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if p < 1:
        raise ValueError("p must be >= 1")

    if isinstance(kernel, VoidKernel):
        if not isinstance(measure, DiscreteMeasure):
            raise TypeError("void-ordered kernels integrate against atoms")
        nodes, layers = _discrete_layers(kernel, measure, p, n_max,
                                         ordered=False)
        return ResolventTable(
            grid=QuadratureGrid.for_points(nodes), n_max=n_max, p=p,
            values=layers, err_est=0.0, measure=measure, ordered=False,
            family="void", status="exact",
        )

    if isinstance(measure, DiscreteMeasure):
        nodes, layers = _discrete_layers(kernel, measure, p, n_max,
                                         ordered=True)
        return ResolventTable(
            grid=QuadratureGrid.for_points(nodes), n_max=n_max, p=p,
            values=layers, err_est=0.0, measure=measure, ordered=True,
            family=kernel.family, status="exact",
        )

    if grid is None:
        raise ValueError("continuous measures need an explicit grid")

    if isinstance(kernel, ProductKernel):
        return _box_iterated(kernel, measure, p, n_max, grid, estimate_error)

    if grid.ndim != 1:
        raise ValueError("multi-axis grids require a product kernel")

    if isinstance(kernel, FractionalKernel):
        if not isinstance(measure, Lebesgue):
            raise TypeError("fractional closed forms hold for Lebesgue measure")
        kernel.require_p(p)
        layers, err = _fractional_layers(kernel, p, grid.nodes, n_max)
        status = "exact" if kernel.beta == 0 else "certified"
        return ResolventTable(
            grid=grid, n_max=n_max, p=p, values=layers, err_est=err,
            measure=measure, ordered=True, family="fractional", status=status,
        )

    if isinstance(kernel, TransformedFractionalKernel):
        if not isinstance(measure, Lebesgue):
            raise TypeError("transformed fractional tables hold for "
                            "Lebesgue measure")
        layers = _transformed_layers(kernel, p, grid.nodes, n_max)
        status = "exact" if all(b == 0 for b in kernel.betas) else "certified"
        return ResolventTable(
            grid=grid, n_max=n_max, p=p, values=layers, err_est=0.0,
            measure=measure, ordered=True, family="transformed-fractional",
            status=status,
        )

    layers = _interval_layers(kernel, measure, p, grid.nodes, n_max)
    err = 0.0
    status = "certified"
    if estimate_error:
        fine = _interval_layers(kernel, measure, p, grid.refine().nodes, n_max)
        fine_restricted = fine[:, ::2, ::2]
        diff = np.abs(fine_restricted - layers)
        finite = np.isfinite(fine_restricted) & np.isfinite(layers)
        err = float(diff[finite].max()) if np.any(finite) else math.inf
        layers = fine_restricted
        if not math.isfinite(err):
            status = "unknown-accuracy"
    else:
        status = "unknown-accuracy"
    return ResolventTable(
        grid=grid, n_max=n_max, p=p, values=layers, err_est=err,
        measure=measure, ordered=True, family=kernel.family, status=status,
    )


def _box_axis_measures(measure, ndim):
    if isinstance(measure, ProductMeasure):
        if len(measure.factors) != ndim:
            raise ValueError("measure factors do not match kernel axes")
        return measure.factors
    if isinstance(measure, (Lebesgue, WeightedLebesgue)):
        return (measure,) * ndim
    raise TypeError("box tables need Lebesgue-type axis measures")


def _box_layers(kernel: ProductKernel, measure, p, grid: QuadratureGrid,
                n_max) -> np.ndarray:
    if kernel.ndim != 2 or grid.ndim != 2:
        raise NotImplementedError(
            "grid tables on boxes are implemented for two axes; use "
            "product_bound for higher-dimensional products"
        )
    axis_measures = _box_axis_measures(measure, 2)
    n1, n2 = (a.size for a in grid.axes)
    tail = kernel.tail_constant**p
    dens = [_density_on_nodes(ms, a) for ms, a in zip(axis_measures, grid.axes)]
    K1 = _kp_triangle(kernel.factors[0], grid.axes[0], p)
    K2 = _kp_triangle(kernel.factors[1], grid.axes[1], p)
    A1 = K1 * dens[0][None, :]
    A2 = K2 * dens[1][None, :]
    W1 = range_weights_matrix(n1)
    W2 = range_weights_matrix(n2)

    layers = np.zeros((n_max, n1, n2, n1, n2))
    layers[0] = tail * np.einsum("ik,jl->ijkl", K1, K2)
    for n in range(1, n_max):
        prev = layers[n - 1]
        cur = np.zeros_like(prev)
        for j1 in range(n1):
            B1 = A1[j1:, j1:] * W1[: n1 - j1, : n1 - j1]
            for j2 in range(n2):
                B2 = A2[j2:, j2:] * W2[: n2 - j2, : n2 - j2]
                cur[j1:, j2:, j1, j2] = tail * (
                    B1 @ prev[j1:, j2:, j1, j2] @ B2.T
                )
        layers[n] = cur
    return layers


def _box_iterated(kernel, measure, p, n_max, grid, estimate_error):
    layers = _box_layers(kernel, measure, p, grid, n_max)
    err = 0.0
    status = "certified"
    if estimate_error and grid.level >= 2:
        box = ProductBox(tuple(Interval1D(a[0], a[-1]) for a in grid.axes))
        coarse_grid = QuadratureGrid.for_box(box, grid.level - 1)
        coarse = _box_layers(kernel, measure, p, coarse_grid, n_max)
        fine_r = layers[:, ::2, ::2, ::2, ::2]
        diff = np.abs(fine_r - coarse)
        finite = np.isfinite(fine_r) & np.isfinite(coarse)
        err = float(diff[finite].max()) if np.any(finite) else math.inf
    elif not estimate_error:
        status = "unknown-accuracy"
    return ResolventTable(
        grid=grid, n_max=n_max, p=p, values=layers, err_est=err,
        measure=measure, ordered=True, family="product", status=status,
    )


def compose_layers(table: ResolventTable, m: int, n: int) -> np.ndarray:
    """Discrete composition ``integral of R_m(t, u) R_n(u, s) mu(du)``.

    Under the semigroup property of iterated kernels this reproduces
    layer ``m + n`` up to quadrature error.  One-dimensional tables with
    finite layer values only; singular layers (fractional first layers)
    do not compose through grid weights.
    """
    if table.values.ndim != 3:
        raise NotImplementedError("layer composition is one-dimensional")
    Rm = table.layer(m)
    Rn = table.layer(n)
    if isinstance(table.measure, DiscreteMeasure):
        _, masses = _sorted_atoms(table.measure)
        return (Rm * masses[None, :]) @ Rn
    dens = _density_on_nodes(table.measure, table.nodes)
    W = range_weights_matrix(table.nodes.size)
    return _layer_update(Rm * dens[None, :], Rn, W)


# ---------------------------------------------------------------------------
# certified tails
# ---------------------------------------------------------------------------


def _tail_factorial(q: float, p: float, n_start: int,
                    max_terms: int = 100_000) -> float:
    """Upper bound for sum over n >= n_start of (q**n / n!)**(1/p)."""
    if q == 0.0:
        return 0.0
    total = 0.0
    term = math.exp((n_start * math.log(q) - ln_gamma(n_start + 1.0)) / p)
    n = n_start
    for _ in range(max_terms):
        total += term
        ratio = (q / (n + 1.0)) ** (1.0 / p)
        if ratio < 0.5:
            return total + 2.0 * term * ratio
        term *= ratio
        n += 1
    return math.inf


def _tail_fractional_point(params: FractionalResolventParams, x: float,
                           y: float, n_start: int,
                           max_terms: int = 100_000) -> float:
    """Upper bound for the tail of the fractional iterate series at a
    point, summed from n_start, using the closed-form layer bounds with
    the capped gamma-quotient constant."""
    g, bp = params.gap, params.beta_p
    ln_cap = params.ln_c_hat_max
    total = 0.0
    prev = None
    n = n_start
    for _ in range(max_terms):
        log_t = (ln_cap + n * ln_gamma(params.alpha_p)
                 + (g * n + bp - 1.0) * math.log(x) - ln_gamma(g * n + bp))
        if bp > 0:
            log_t -= bp * math.log(y)
        term = math.exp(log_t)
        total += term
        if prev is not None and prev > 0 and term / prev < 0.5:
            return total + 2.0 * term
        prev = term
        n += 1
    return math.inf


def _tail_fractional_series(params: FractionalResolventParams, X: float,
                            p: float, n_start: int,
                            max_terms: int = 100_000) -> float:
    """Upper bound for the tail of the series function of a fractional
    kernel: p-th roots of beta-integrated layer bounds."""
    g, bp = params.gap, params.beta_p
    if bp >= 1.0:
        return math.inf
    ln_cap = params.ln_c_hat_max
    total = 0.0
    prev = None
    n = n_start
    for _ in range(max_terms):
        log_t = (ln_cap + n * ln_gamma(params.alpha_p) + ln_gamma(1.0 - bp)
                 + g * n * math.log(X) - ln_gamma(g * n + 1.0)) / p
        term = math.exp(log_t)
        total += term
        if prev is not None and prev > 0 and term / prev < 0.5:
            return total + 2.0 * term
        prev = term
        n += 1
    return math.inf


# ---------------------------------------------------------------------------
# series operations
# ---------------------------------------------------------------------------


def _leq_scalar(s, t) -> bool:
    return bool(np.all(np.asarray(s, dtype=float) <= np.asarray(t, dtype=float)))


def _void_q(kernel: VoidKernel, measure: DiscreteMeasure, p: float) -> float:
    pts = measure.points
    vals = np.asarray(kernel.k1(pts), dtype=float)
    return float(np.dot(measure.masses, vals**p))


def _measure_mass(measure, s: float, t: float) -> float:
    if t <= s:
        return 0.0
    res = integrate(lambda x: np.ones_like(np.asarray(x, dtype=float)),
                    Interval1D(s, t), measure, tol=1e-12)
    return res.value


def _column_operator(kernel, measure, p, s, t, level):
    """Recursion operator B and first column over a grid spanning [s, t].

    Returns (nodes, B, rho_1) with rho_1[l] = k(node_l, s)**p and
    B @ rho advancing one layer.
    """
    if isinstance(measure, DiscreteMeasure):
        pts, masses = _sorted_atoms(measure)
        keep = (pts >= s) & (pts <= t)
        nodes, masses = pts[keep], masses[keep]
        if nodes.size == 0 or not np.isclose(nodes[-1], t):
            nodes = np.append(nodes, t)
            masses = np.append(masses, 0.0)
        m = nodes.size
        kp = _kp_triangle(kernel, nodes, p)
        B = kp * masses[None, :]
    else:
        seg = Interval1D(float(s), float(t))
        nodes = QuadratureGrid.for_interval(seg, level).nodes
        dens = _density_on_nodes(measure, nodes)
        kp = _kp_triangle(kernel, nodes, p)
        B = (kp * dens[None, :]) * range_weights_matrix(nodes.size)
    rho_1 = kernel.eval_grid(nodes, np.full(nodes.size, float(s)))
    with np.errstate(invalid="ignore", over="ignore"):
        rho_1 = rho_1**p
    return nodes, B, rho_1


def resolvent_series(kernel: Kernel, measure: MeasureSpec, p: float,
                     t, s, tol: float = 1e-10, level: int = 8,
                     n_cap: int = 400) -> SeriesValue:
    """Resolvent of ``kernel**p`` at (t, s): the sum of all iterates.

    Truncation is certified family by family: factorial majorants for
    monotone kernels with finite gap integrals, exact geometric sums in
    the void case, Mittag-Leffler majorants for fractional kernels, and
    the exponential closed form for kernels of multiplicative type.  A
    provably divergent series returns ``inf`` (converged, zero tail); a
    kernel with no recognised majorant returns the truncated sum with
    ``converged=False``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")

    if isinstance(kernel, VoidKernel):
        if not isinstance(measure, DiscreteMeasure):
            raise TypeError("void-ordered kernels integrate against atoms")
        q = _void_q(kernel, measure, p)
        base = float(kernel.k1(np.asarray(s, dtype=float))) ** p
        if q >= 1.0:
            return SeriesValue(math.inf, 0.0, 0, True)
        return SeriesValue(base / (1.0 - q), 0.0, 1, True)

    if not _leq_scalar(s, t):
        raise ValueError("need s <= t")

    if isinstance(kernel, MultiplicativeKernel):
        # multiplicative type: the factorial bounds are identities, so
        # R = k**p * exp(mu([s, t])) exactly
        mass = _measure_mass(measure, float(s), float(t))
        kp = float(kernel.eval(t, s)) ** p
        return SeriesValue(kp * math.exp(mass), 0.0, 1, True)

    if isinstance(kernel, FractionalKernel):
        kernel.require_p(p)
        params = FractionalResolventParams(kernel.alpha, kernel.beta, p)
        x = float(t) - float(s)
        y = float(s) - kernel.t0
        if x <= 0:
            raise ValueError("need s < t for fractional kernels")
        total = 0.0
        for n in range(1, n_cap + 1):
            term = fractional_f(params, n, x, y)
            if math.isinf(term):
                return SeriesValue(math.inf, 0.0, n, True)
            total += term
            tail = _tail_fractional_point(params, x, y, n + 1)
            if tail < tol:
                return SeriesValue(total, tail, n, True)
        return SeriesValue(total, math.inf, n_cap, False)

    kp_at = float(kernel.eval_grid(np.asarray(float(t)),
                                   np.asarray(float(s)))) ** p
    if float(t) == float(s) and not isinstance(measure, DiscreteMeasure):
        # null range: only the first iterate survives
        return SeriesValue(kp_at, 0.0, 1, True)

    # generic path: single-column recursion on [s, t], one level finer
    # than requested to keep quadrature error below the truncation tail
    use_level = level + 1 if not isinstance(measure, DiscreteMeasure) else level
    nodes, B, rho = _column_operator(kernel, measure, p, float(s), float(t),
                                     use_level)
    q = float(B[-1].sum())
    majorant_ok = (kernel.monotone and math.isfinite(q)
                   and not isinstance(measure, DiscreteMeasure))
    total = 0.0
    for n in range(1, n_cap + 1):
        term = float(rho[-1])
        if not math.isfinite(term):
            return SeriesValue(math.inf, 0.0, n, True)
        total += term
        if majorant_ok:
            tail = kp_at * _tail_factorial(q, 1.0, n)
            if tail < tol:
                return SeriesValue(total, tail, n, True)
        elif term < tol * 1e-3 and n > 3:
            # no recognised majorant: truncate when terms stall, unconverged
            return SeriesValue(total, math.inf, n, False)
        rho = B @ rho
    return SeriesValue(total, math.inf, n_cap, False)


def volterra_residual(kernel: Kernel, measure: MeasureSpec, t, s,
                      grid: Optional[QuadratureGrid] = None,
                      n_cap: int = 200) -> float:
    """Plug the computed resolvent back into its defining linear equation.

    Returns ``|R(t,s) - k(t,s) - integral over [s,t] of k(t,u) R(u,s)|``.
    The resolvent column is computed one grid level finer than the
    plug-in quadrature, so the residual genuinely reflects quadrature and
    truncation error instead of telescoping away.
    """
    if isinstance(kernel, VoidKernel):
        if not isinstance(measure, DiscreteMeasure):
            raise TypeError("void-ordered kernels integrate against atoms")
        q = _void_q(kernel, measure, 1.0)
        if q >= 1.0:
            raise ValueError("void resolvent diverges for mass >= 1")
        k_s = float(kernel.k1(np.asarray(s, dtype=float)))
        r_col = k_s / (1.0 - q)
        pts, masses = _sorted_atoms(measure)
        r_vals = np.asarray(kernel.k1(pts), dtype=float) * 0.0 + r_col
        k_tu = np.asarray(kernel.k1(pts), dtype=float)
        rhs = k_s + float(np.dot(masses, k_tu * r_vals))
        return abs(r_col - rhs)

    if grid is None:
        raise ValueError("interval residuals need a grid")
    if float(t) == float(s) and not isinstance(measure, DiscreteMeasure):
        return 0.0  # R(t, t) = k(t, t): the null-range integral vanishes
    level = grid.level
    if isinstance(measure, DiscreteMeasure):
        nodes, B, rho_n = _column_operator(kernel, measure, 1.0,
                                           float(s), float(t), level)
        fine_nodes, B_fine, rho_fine = nodes, B, rho_n
        stride = 1
    else:
        fine_nodes, B_fine, rho_fine = _column_operator(
            kernel, measure, 1.0, float(s), float(t), level + 1)
        nodes, B, _ = _column_operator(kernel, measure, 1.0,
                                       float(s), float(t), level)
        stride = 2

    k_ts = float(kernel.eval_grid(np.asarray(float(t)), np.asarray(float(s))))
    scale = max(1.0, abs(k_ts))
    rho = np.zeros_like(rho_fine)
    cur = rho_fine
    for _ in range(n_cap):
        rho = rho + cur
        if float(np.max(np.abs(cur))) < 1e-16 * scale:
            break
        cur = B_fine @ cur
    rho_coarse = rho[::stride]
    lhs = float(rho_coarse[-1])
    rhs = k_ts + float((B @ rho_coarse)[-1])
    return abs(lhs - rhs)


def series_function_I(kernel: Kernel, measure: MeasureSpec, p: float, t,
                      domain: Optional[Interval1D] = None, tol: float = 1e-10,
                      level: int = 8, n_cap: int = 400) -> SeriesValue:
    """The series of p-th roots of integrated iterates at t.

    Finiteness of this function across the domain is what places a
    kernel in the tractable class behind the bound corollaries.
    Dispatch:

    * void order: exact geometric value ``r / (1 - r)`` with
      ``r = q**(1/p)`` for ``q < 1``, infinity otherwise;
    * fractional, beta = 0: closed-form terms (an identity with the
      generalised Mittag-Leffler series);
    * fractional, beta > 0: finite iff ``beta * p < 1``; the returned sum
      is a certified upper envelope from the Mittag-Leffler majorant,
      flagged ``converged=False`` (no two-sided certificate);
    * monotone interval kernels with finite gap integral: quadrature
      terms with a factorial tail.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")

    if isinstance(kernel, VoidKernel):
        if not isinstance(measure, DiscreteMeasure):
            raise TypeError("void-ordered kernels integrate against atoms")
        q = _void_q(kernel, measure, p)
        if q >= 1.0:
            return SeriesValue(math.inf, 0.0, 0, True)
        r = q ** (1.0 / p)
        return SeriesValue(r / (1.0 - r), 0.0, 1, True)

    if isinstance(kernel, FractionalKernel):
        kernel.require_p(p)
        params = FractionalResolventParams(kernel.alpha, kernel.beta, p)
        X = float(t) - kernel.t0
        if X <= 0:
            raise ValueError("need t above the kernel origin")
        if params.beta_p >= 1.0:
            return SeriesValue(math.inf, 0.0, 0, True)
        if kernel.beta == 0.0:
            ap = params.alpha_p
            total = 0.0
            for n in range(1, n_cap + 1):
                log_a = (n * ln_gamma(ap) + ap * n * math.log(X)
                         - ln_gamma(ap * n + 1.0))
                total += math.exp(log_a / p)
                tail = _tail_fractional_series(params, X, p, n + 1)
                if tail < tol:
                    return SeriesValue(total, tail, n, True)
            return SeriesValue(total, math.inf, n_cap, False)
        # beta > 0: certified upper envelope only
        g, bp = params.gap, params.beta_p
        total = 0.0
        prev = None
        for n in range(1, n_cap + 1):
            log_t = (params.ln_c_hat(n) + n * ln_gamma(params.alpha_p)
                     + ln_gamma(1.0 - bp) + g * n * math.log(X)
                     - ln_gamma(g * n + 1.0)) / p
            term = math.exp(log_t)
            total += term
            if prev is not None and prev > 0 and term / prev < 0.5 \
                    and term < tol:
                return SeriesValue(total + 2.0 * term, 0.0, n, False)
            prev = term
        return SeriesValue(math.inf, 0.0, n_cap, False)

    if domain is None or not isinstance(domain, Interval1D):
        raise ValueError("interval kernels need their interval domain to "
                         "form the lower set of t")
    if float(t) <= domain.lo and not isinstance(measure, DiscreteMeasure):
        return SeriesValue(0.0, 0.0, 0, True)  # null lower set

    # table route over the lower set [lo, t], one level finer
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
        A = _kp_triangle(kernel, nodes, p) * dens[None, :]
        row_w = W[-1] * dens
        advance = lambda R: _layer_update(A, R, W)  # noqa: E731
        majorant_ok = kernel.monotone

    q = float(row_w @ np.where(np.isfinite(cur[-1]), cur[-1], 0.0))
    majorant_ok = majorant_ok and math.isfinite(q)
    total = 0.0
    for n in range(1, n_cap + 1):
        integ = float(row_w @ cur[-1])
        if not math.isfinite(integ):
            return SeriesValue(math.inf, 0.0, n, True)
        total += max(integ, 0.0) ** (1.0 / p)
        if majorant_ok:
            tail = _tail_factorial(q, p, n + 1)
            if tail < tol:
                return SeriesValue(total, tail, n, True)
        cur = advance(cur)
    return SeriesValue(total, math.inf, n_cap, False)


def sum_decomposition(parts: Sequence[Kernel], measure: MeasureSpec, n: int,
                      t, s, level: int = 7,
                      budget: int = 4096) -> Dict[Tuple[int, ...], float]:
    """All multi-indexed components of the n-th iterate of a kernel sum.

    Components follow the recursion that integrates the part selected by
    the newest index against the previous component.  Their sum over all
    multi-indices of length n reproduces the iterate of the summed
    kernel, and constant multi-indices reproduce single-kernel iterates.

    Raises
    ------
    ComponentBudgetError
        If ``len(parts)**n`` exceeds ``budget``.
    """
    N = len(parts)
    if N < 1 or n < 1:
        raise ValueError("need at least one part and n >= 1")
    if N**n > budget:
        raise ComponentBudgetError(
            f"{N}**{n} = {N**n} components exceed the budget {budget}"
        )
    if not _leq_scalar(s, t):
        raise ValueError("need s <= t")

    ops = [_column_operator(k, measure, 1.0, float(s), float(t), level)
           for k in parts]
    Bs = [op[1] for op in ops]
    firsts = [op[2] for op in ops]

    columns: Dict[Tuple[int, ...], np.ndarray] = {
        (a,): firsts[a] for a in range(N)
    }
    for _ in range(n - 1):
        nxt: Dict[Tuple[int, ...], np.ndarray] = {}
        for idx, col in columns.items():
            for a in range(N):
                nxt[idx + (a,)] = Bs[a] @ col
        columns = nxt
    return {idx: float(col[-1]) for idx, col in columns.items()}


def product_bound(factors: Sequence[Tuple[Kernel, MeasureSpec]], p: float,
                  n: int, t: Sequence[float], s: Sequence[float],
                  level: int = 7) -> ExtReal:
    """Product over axes of one-dimensional iterates at (t_i, s_i).

    Bounds the iterate of a kernel dominated by a product of per-axis
    kernels, and equals the box iterate exactly when kernel and measure
    factor exactly.
    """
    if len(factors) != len(t) or len(factors) != len(s):
        raise ValueError("axis count mismatch between factors and points")
    acc = ExtReal(1.0)
    for (kern, meas), ti, si in zip(factors, t, s):
        v = _single_iterate(kern, meas, p, n, float(ti), float(si), level)
        acc = acc * ExtReal(v)
    return acc


def _single_iterate(kernel, measure, p, n, t, s, level) -> float:
    """R_{k**p, mu, n}(t, s) by single-column recursion or closed form."""
    if isinstance(kernel, VoidKernel):
        if not isinstance(measure, DiscreteMeasure):
            raise TypeError("void-ordered kernels integrate against atoms")
        q = _void_q(kernel, measure, p)
        return float(kernel.k1(np.asarray(s, dtype=float))) ** p * q ** (n - 1)
    if isinstance(kernel, FractionalKernel):
        kernel.require_p(p)
        params = FractionalResolventParams(kernel.alpha, kernel.beta, p)
        return fractional_f(params, n, t - s, s - kernel.t0)
    if t == s and not isinstance(measure, DiscreteMeasure):
        if n == 1:
            return float(kernel.eval_grid(np.asarray(t), np.asarray(s))) ** p
        return 0.0
    _, B, rho = _column_operator(kernel, measure, p, s, t, level)
    for _ in range(n - 1):
        rho = B @ rho
    return float(rho[-1])

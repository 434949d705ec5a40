import math

import numpy as np
import pytest
from scipy.integrate import quad

from volgron.domains import Interval1D, VoidSet
from volgron.gronwall import (
    GronwallInput,
    check_vanishing,
    fractional_box_sup_bound,
    gronwall_bound,
    gronwall_curve,
    gronwall_sequence_bound,
    induction_check,
    resolvent_bound,
)
from volgron.kernels import (
    CallableKernel,
    FractionalKernel,
    VoidKernel,
    constant_kernel,
)
from volgron.measures import DiscreteMeasure, Lebesgue

DOM = Interval1D(0.0, 1.0)


def const_void(c):
    return VoidKernel(k1=lambda s: np.full_like(np.asarray(s, float), c))


VOID_MU = DiscreteMeasure(tuple((i / 10, 0.1) for i in range(10)))


# ---------------------------------------------------------------------------
# vanishing criteria
# ---------------------------------------------------------------------------


def test_vanishing_bounded_u0_regular_kernel():
    rep = check_vanishing(constant_kernel(2.0), Lebesgue(), 1.0,
                          u0=1.0, t=1.0, domain=DOM)
    assert rep.vanishes


def test_vanishing_void_mass_below_one():
    rep = check_vanishing(const_void(0.5), VOID_MU, 1.0, 1.0, 0.5, VoidSet())
    assert rep.vanishes
    rep = check_vanishing(const_void(1.2), VOID_MU, 1.0, 1.0, 0.5, VoidSet())
    assert not rep.vanishes  # geometric series does not vanish


def test_vanishing_fractional_with_integrable_u0():
    k = FractionalKernel(alpha=0.75, beta=0.0)
    rep = check_vanishing(k, Lebesgue(), 1.0, lambda s: 1.0 + np.asarray(s),
                          t=1.0, domain=DOM)
    assert rep.vanishes


def test_vanishing_never_false_positive_on_unrecognised():
    k = CallableKernel(fn=lambda T, S: 1.0 + T * S)  # not declared monotone
    rep = check_vanishing(k, Lebesgue(), 1.0, 1.0, 1.0, DOM)
    assert not rep.vanishes


# ---------------------------------------------------------------------------
# resolvent bound
# ---------------------------------------------------------------------------


def test_resolvent_bound_zero_forcing():
    sv = resolvent_bound(0.0, constant_kernel(1.0), Lebesgue(), 1.0, 1.0,
                         domain=DOM)
    assert sv.sum == pytest.approx(0.0, abs=1e-14)


def test_resolvent_bound_constant_kernel_exponential():
    # closed-form oracle: 1 + integral of c e^{c(t-s)} ds = e^{c t}
    c, t = 1.0, 1.0
    sv = resolvent_bound(1.0, constant_kernel(c), Lebesgue(), 1.0, t,
                         domain=DOM, tol=1e-11)
    assert sv.converged
    assert sv.sum == pytest.approx(math.exp(c * t), rel=1e-8)


def test_resolvent_bound_void_geometric():
    sv = resolvent_bound(1.0, const_void(0.5), VOID_MU, 1.0, 0.5)
    # 1 + (integral of k v) / (1 - q) with q = 0.5
    q = 0.5
    assert sv.sum == pytest.approx(1.0 + q / (1.0 - q), rel=1e-12)
    # p = 2 collapses through the p-th roots
    sv2 = resolvent_bound(1.0, const_void(0.5), VOID_MU, 2.0, 0.5)
    q2 = 0.25
    r = q2**0.5
    assert sv2.sum == pytest.approx(1.0 + r / (1.0 - r), rel=1e-12)


def test_resolvent_bound_fractional_beta_zero():
    # compare against the summed closed-form layers integrated against v
    k = FractionalKernel(alpha=0.75, beta=0.0)
    sv = resolvent_bound(1.0, k, Lebesgue(), 1.0, 1.0, domain=DOM, tol=1e-10)
    assert sv.converged
    ap = 0.75
    oracle = 1.0
    for n in range(1, 60):
        cn = math.gamma(ap) ** n / math.gamma(ap * n)
        oracle += cn * quad(lambda s: (1.0 - s) ** (ap * n - 1.0), 0, 1,
                            points=[1.0])[0]
    assert sv.sum == pytest.approx(oracle, rel=1e-8)


# ---------------------------------------------------------------------------
# sequence bounds
# ---------------------------------------------------------------------------


def test_sequence_bound_first_iterate_has_empty_sums():
    inp = GronwallInput(v0=1.0, k=constant_kernel(1.0), measure=Lebesgue(),
                        p=1.0, domain=DOM)
    sharp, sup_form, w1 = gronwall_sequence_bound(inp, u0=1.0, n=1, t=1.0)
    # sum over i <= n-2 is empty: sharp = v + w_1
    assert sharp == pytest.approx(1.0 + w1, rel=1e-12)
    assert w1 == pytest.approx(1.0, rel=1e-9)  # integral of 1 over [0,1]


def test_sequence_bound_fredholm_matches_direct_iteration():
    # oracle: iterate u_n = v + integral k1 u_{n-1} on the atoms directly
    q = 0.4
    kern = const_void(q)  # k1 = 0.4, total mass 1 => q = 0.4
    pts = VOID_MU.points
    v_vals = 1.0 + 0.5 * pts  # v0, no l
    inp = GronwallInput(v0=lambda s: 1.0 + 0.5 * np.asarray(s), k=kern,
                        measure=VOID_MU, p=1.0, domain=VoidSet())
    u = np.zeros_like(pts)  # u_0 = 0
    masses = VOID_MU.masses
    for n in range(1, 6):
        u = v_vals + np.dot(masses, q * u)
        t_idx = 3
        sharp, sup_form, w_n = gronwall_sequence_bound(
            inp, u0=0.0, n=n, t=float(pts[t_idx]))
        assert u[t_idx] == pytest.approx(sharp, rel=1e-12), n
        assert sharp <= sup_form + 1e-12


def test_sequence_w_n_tends_to_zero():
    inp = GronwallInput(v0=1.0, k=constant_kernel(1.5), measure=Lebesgue(),
                        p=1.0, domain=DOM)
    ws = [gronwall_sequence_bound(inp, u0=1.0, n=n, t=1.0)[2]
          for n in (1, 3, 5, 8, 12)]
    assert all(b < a for a, b in zip(ws, ws[1:]))
    assert ws[-1] < 1e-6


def test_sequence_bound_orders_sharp_below_sup():
    inp = GronwallInput(v0=lambda s: 1.0 + np.asarray(s) ** 2,
                        k=constant_kernel(0.8), measure=Lebesgue(), p=2.0,
                        domain=DOM,
                        l=CallableKernel(fn=lambda T, S: 0.5 + 0.0 * S,
                                         monotone_flag=True))
    for n in (1, 2, 4):
        sharp, sup_form, _ = gronwall_sequence_bound(inp, u0=0.5, n=n, t=1.0)
        assert sharp <= sup_form + 1e-10


# ---------------------------------------------------------------------------
# closed bounds
# ---------------------------------------------------------------------------


def test_gronwall_bound_classical_exponential_form():
    # classical one-variable bound: sup form equals v0 e^{integral of k1}
    inp = GronwallInput(v0=2.0, k=constant_kernel(1.0), measure=Lebesgue(),
                        p=1.0, domain=DOM)
    for t in (0.25, 0.5, 1.0):
        sharp, sup_form, tail = gronwall_bound(inp, t)
        assert sup_form == pytest.approx(2.0 * math.exp(t), rel=1e-9)
        assert sharp == pytest.approx(2.0 * math.exp(t), rel=1e-7)
        assert sharp <= sup_form + tail + 1e-9


def test_gronwall_bound_sharp_is_resolvent_weighted_integral():
    # sharp form oracle: v(t) + integral of k e^{Q(s)} v(s) ds with
    # Q(s) the gap integral, via adaptive quadrature
    k1 = lambda s: 0.5 + s  # noqa: E731
    kern = CallableKernel(
        fn=lambda T, S: 0.5 + S, monotone_flag=True)
    inp = GronwallInput(v0=lambda s: 1.0 + np.asarray(s), k=kern,
                        measure=Lebesgue(), p=1.0, domain=DOM)
    t = 1.0
    Q = lambda s: quad(k1, s, t)[0]  # noqa: E731
    oracle = (1.0 + t) + quad(
        lambda s: k1(s) * math.exp(Q(s)) * (1.0 + s), 0.0, t)[0]
    sharp, _, _ = gronwall_bound(inp, t)
    assert sharp == pytest.approx(oracle, rel=1e-8)


def test_gronwall_bound_fredholm_display():
    q = 0.4
    inp = GronwallInput(v0=1.0, k=const_void(q), measure=VOID_MU, p=1.0,
                        domain=VoidSet(), l=const_void(0.3))
    sharp, sup_form, tail = gronwall_bound(inp, 0.5)
    assert tail == 0.0
    # v = v0 + integral of l = 1.3; sharp = v + (1-q)^-1 integral k v
    v = 1.3
    assert sharp == pytest.approx(v + q * v / (1.0 - q), rel=1e-12)
    # sup form = (sup v0 + (integral l**p)**(1/p)) / (1 - q**(1/p))
    assert sup_form == pytest.approx((1.0 + 0.3) / (1.0 - q), rel=1e-12)
    assert sharp <= sup_form + 1e-12


def test_gronwall_bound_zero_input_is_zero():
    inp = GronwallInput(v0=0.0, k=constant_kernel(1.0), measure=Lebesgue(),
                        p=1.0, domain=DOM)
    sharp, sup_form, _ = gronwall_bound(inp, 1.0)
    assert sharp == pytest.approx(0.0, abs=1e-13)
    assert sup_form == pytest.approx(0.0, abs=1e-13)


def test_gronwall_consistency_with_resolvent_bound():
    # both routes bound the same data; they agree within tolerance
    inp = GronwallInput(v0=lambda s: 1.0 + 0.5 * np.asarray(s),
                        k=constant_kernel(1.2), measure=Lebesgue(), p=1.0,
                        domain=DOM)
    t = 1.0
    sharp, _, tail = gronwall_bound(inp, t)
    sv = resolvent_bound(lambda s: 1.0 + 0.5 * np.asarray(s),
                         constant_kernel(1.2), Lebesgue(), 1.0, t, domain=DOM)
    assert sharp == pytest.approx(sv.sum, rel=1e-7)


def test_gronwall_monotone_in_forcing():
    k = constant_kernel(1.0)
    lo = GronwallInput(v0=1.0, k=k, measure=Lebesgue(), p=1.0, domain=DOM)
    hi = GronwallInput(v0=1.5, k=k, measure=Lebesgue(), p=1.0, domain=DOM)
    for t in (0.3, 0.7, 1.0):
        s_lo, f_lo, _ = gronwall_bound(lo, t)
        s_hi, f_hi, _ = gronwall_bound(hi, t)
        assert s_lo <= s_hi + 1e-12
        assert f_lo <= f_hi + 1e-12


def test_gronwall_curve_export():
    inp = GronwallInput(v0=1.0, k=constant_kernel(1.0), measure=Lebesgue(),
                        p=1.0, domain=DOM)
    curve = gronwall_curve(inp, [0.25, 0.5, 0.75, 1.0])
    assert curve.m == 1
    assert np.all(curve.sharp <= curve.sup + curve.tail_bound + 1e-9)
    csv = curve.to_csv()
    assert csv.splitlines()[0] == "t,sharp,sup,tail"
    assert len(csv.splitlines()) == 5


# ---------------------------------------------------------------------------
# induction harness
# ---------------------------------------------------------------------------


def psi_affine(u):
    return 0.5 * u + 1.0


def test_induction_check_equality_case():
    u0 = np.array([0.0, 1.0, 2.0])
    seq = [u0]
    for _ in range(4):
        seq.append(psi_affine(seq[-1]))
    assert induction_check(psi_affine, seq).passed


def test_induction_check_strict_case():
    u0 = np.array([0.0, 1.0, 2.0])
    seq = [u0]
    for _ in range(4):
        seq.append(psi_affine(seq[-1]) - 0.01)
    assert induction_check(psi_affine, seq).passed


def test_induction_check_violation_witness():
    u0 = np.array([0.0, 1.0, 2.0])
    u1 = psi_affine(u0)
    u2 = psi_affine(u1).copy()
    u2[1] += 1.0  # injected violation at iteration 2, index 1
    rep = induction_check(psi_affine, [u0, u1, u2])
    assert not rep.passed
    assert rep.witness == (2, 1)


def test_induction_check_respects_mask():
    u0 = np.array([0.0, 1.0, 2.0])
    u1 = psi_affine(u0)
    u1_bad = u1.copy()
    u1_bad[0] += 5.0
    mask = np.array([False, True, True])
    assert induction_check(psi_affine, [u0, u1_bad], J=mask).passed


# ---------------------------------------------------------------------------
# multivariate fractional display
# ---------------------------------------------------------------------------


def test_fractional_box_sup_bound_reduces_to_ml_series():
    from volgron.specfun import MLParams, mittag_leffler

    # one axis, beta = 0, unit constants: the series is the generalised
    # Mittag-Leffler value minus its constant term
    ap = 0.75
    got = fractional_box_sup_bound(1.0, (0.75,), (0.0,), 1.0, (1.0,), (0.0,),
                                   v_sup=2.0)
    ml = mittag_leffler(MLParams(ap, 1.0, 1.0),
                        math.gamma(ap) * 1.0**ap)
    assert got == pytest.approx(2.0 * (ml.sum - 1.0), rel=1e-10)


def test_fractional_box_sup_bound_two_axes_positive():
    got = fractional_box_sup_bound(0.8, (0.9, 0.8), (0.1, 0.0), 1.0,
                                   (1.0, 0.5), (0.0, 0.0), v_sup=1.0)
    assert math.isfinite(got) and got > 0
    with pytest.raises(ValueError):
        fractional_box_sup_bound(1.0, (2.0,), (1.5,), 1.0, (1.0,), (0.0,),
                                 v_sup=1.0)


def test_bound_ordering_random_sweep():
    # the sharp form never exceeds the supremum form (randomised inputs)
    rng = np.random.default_rng(42)
    for _ in range(20):
        c = float(rng.uniform(0.2, 1.5))
        v0c = float(rng.uniform(0.1, 2.0))
        lc = float(rng.uniform(0.0, 1.0))
        l_kernel = CallableKernel(fn=lambda T, S, lc=lc: lc + 0.0 * S,
                                  monotone_flag=True) if lc > 0.3 else None
        inp = GronwallInput(v0=v0c, k=constant_kernel(c), measure=Lebesgue(),
                            p=float(rng.choice([1.0, 2.0])), domain=DOM,
                            l=l_kernel)
        t = float(rng.uniform(0.2, 1.0))
        sharp, sup_form, tail = gronwall_bound(inp, t)
        assert sharp <= sup_form + tail + 1e-9 * (1.0 + sup_form)


def test_integral_estimate_equality_fixtures():
    # the step between the two bound lines is an identity in two cases:
    # constant forcing without inhomogeneity, and zero forcing with an
    # inhomogeneity kernel of the second variable only (p = 1)
    k = CallableKernel(fn=lambda T, S: 1.0 + 0.5 * S, monotone_flag=True)
    l = CallableKernel(fn=lambda T, S: 0.3 + 0.2 * S, monotone_flag=True)
    zero_forcing = GronwallInput(v0=0.0, k=k, measure=Lebesgue(), p=1.0,
                                 domain=DOM, l=l)
    const_forcing = GronwallInput(v0=2.0, k=k, measure=Lebesgue(), p=1.0,
                                  domain=DOM)
    for t in (0.5, 1.0):
        sharp, sup, _ = gronwall_bound(zero_forcing, t)
        assert sharp == pytest.approx(sup, abs=1e-9)
        sharp, sup, _ = gronwall_bound(const_forcing, t)
        assert sharp == pytest.approx(sup, abs=1e-9)


def test_void_resolvent_bound_cross_check():
    # the resolvent-weighted route and the Fredholm sharp form agree
    kern = const_void(0.4)
    inp = GronwallInput(v0=1.0, k=kern, measure=VOID_MU, p=1.0,
                        domain=VoidSet())
    sharp, _, _ = gronwall_bound(inp, 0.5)
    rb = resolvent_bound(1.0, kern, VOID_MU, 1.0, 0.5)
    assert sharp == pytest.approx(rb.sum, rel=1e-13)


def test_null_lower_set_edges():
    inp = GronwallInput(v0=2.0, k=constant_kernel(1.0), measure=Lebesgue(),
                        p=1.0, domain=DOM)
    assert gronwall_bound(inp, 0.0) == (2.0, 2.0, 0.0)
    sharp, sup, w = gronwall_sequence_bound(inp, 1.0, 3, 0.0)
    assert (sharp, sup, w) == (2.0, 2.0, 0.0)
    sv = resolvent_bound(2.0, constant_kernel(1.0), Lebesgue(), 1.0, 0.0,
                         domain=DOM)
    assert sv.sum == 2.0 and sv.converged

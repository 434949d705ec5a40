import math

import numpy as np
import pytest

from volgron.specfun import (
    MLParams,
    beta,
    digamma,
    gamma_min_point,
    ln_gamma,
    mittag_leffler,
)

EULER_GAMMA = 0.57721566490153286061


def ml_direct(alpha, beta_, z, p=1.0, terms=400):
    """Independent direct-summation oracle, log-space terms."""
    total = 0.0
    for n in range(terms):
        arg = alpha * n + beta_
        if arg <= 0:
            continue
        log_t = (n * math.log(z) if z > 0 else (-math.inf if n else 0.0)) \
            - math.lgamma(arg) / p
        term = math.exp(log_t)
        total += term
        if n > 5 and term < 1e-30 * max(total, 1.0):
            break
    return total


def test_ln_gamma_known_values():
    assert ln_gamma(1.0) == pytest.approx(0.0, abs=1e-15)
    assert ln_gamma(5.0) == pytest.approx(math.log(24.0), rel=1e-14)
    assert ln_gamma(0.5) == pytest.approx(math.log(math.sqrt(math.pi)),
                                          rel=1e-14)
    with pytest.raises(ValueError):
        ln_gamma(0.0)


def test_ln_gamma_recurrence_on_grid():
    for x in np.linspace(0.05, 25.0, 200):
        lhs = ln_gamma(x + 1.0)
        rhs = ln_gamma(x) + math.log(x)
        assert lhs == pytest.approx(rhs, abs=1e-12, rel=1e-12)


def test_beta_values():
    assert beta(1, 1) == pytest.approx(1.0, rel=1e-14)
    assert beta(2, 3) == pytest.approx(1.0 / 12.0, rel=1e-13)
    # gamma-identity oracle
    assert beta(0.5, 0.5) == pytest.approx(
        math.gamma(0.5) ** 2 / math.gamma(1.0), rel=1e-13)
    with pytest.raises(ValueError):
        beta(-1.0, 2.0)


def test_digamma_against_series_oracle():
    # oracle: psi(1) = -euler_gamma; recurrence psi(x+1) = psi(x) + 1/x
    assert digamma(1.0) == pytest.approx(-EULER_GAMMA, abs=1e-12)
    assert digamma(2.0) == pytest.approx(1.0 - EULER_GAMMA, abs=1e-12)
    for x in (0.3, 1.7, 4.2):
        assert digamma(x + 1.0) == pytest.approx(digamma(x) + 1.0 / x,
                                                 abs=1e-12)


def test_digamma_eventually_increasing_without_bound():
    vals = [digamma(10.0**k) for k in range(1, 7)]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    assert vals[-1] > 10.0


def test_gamma_min_point():
    # bisection oracle pins the root of digamma in (1, 2)
    x, g = gamma_min_point()
    assert 1.46163 < x < 1.46164
    assert abs(digamma(x)) < 1e-10
    for other in (1.0, 1.2, 1.8, 2.0):
        assert g < math.gamma(other)


def test_ml_exponential_identity():
    p = MLParams(1.0, 1.0, 1.0)
    for z in (0.1, 0.5, 1.0, 2.0, 5.0, 10.0):
        sv = mittag_leffler(p, z)
        assert sv.converged
        assert sv.sum == pytest.approx(math.exp(z), rel=1e-12)


def test_ml_zero_argument():
    assert mittag_leffler(MLParams(0.7, 2.0, 1.0), 0.0).sum == \
        pytest.approx(1.0 / math.gamma(2.0))
    assert mittag_leffler(MLParams(0.7, 0.5, 2.0), 0.0).sum == \
        pytest.approx(math.gamma(0.5) ** -0.5)
    # beta = 0 convention: the constant term vanishes
    assert mittag_leffler(MLParams(0.7, 0.0, 1.0), 0.0).sum == 0.0


def test_ml_cosh_identity():
    x = 1.5
    sv = mittag_leffler(MLParams(2.0, 1.0, 1.0), x * x)
    assert sv.sum == pytest.approx(math.cosh(x), rel=1e-12)


def test_ml_matches_direct_summation_oracle():
    rng = np.random.default_rng(42)
    for _ in range(20):
        alpha = rng.uniform(0.3, 2.5)
        beta_ = rng.uniform(0.1, 3.0)
        z = rng.uniform(0.0, 4.0)
        sv = mittag_leffler(MLParams(alpha, beta_, 1.0), z)
        assert sv.converged
        assert sv.sum == pytest.approx(ml_direct(alpha, beta_, z), rel=1e-10)


def test_ml_tail_bound_is_sound():
    rng = np.random.default_rng(7)
    for _ in range(20):
        alpha = rng.uniform(0.4, 2.0)
        beta_ = rng.uniform(0.0, 2.0)
        z = rng.uniform(0.1, 3.0)
        coarse = mittag_leffler(MLParams(alpha, beta_, 1.0), z, tol=1e-6)
        tight = mittag_leffler(MLParams(alpha, beta_, 1.0), z, tol=1e-15)
        assert coarse.sum <= tight.sum <= coarse.sum + coarse.tail_bound


def test_ml_monotone_in_z():
    p = MLParams(0.8, 0.0, 2.0)
    zs = np.linspace(0.0, 5.0, 21)
    vals = [mittag_leffler(p, z).sum for z in zs]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_ml_beta_zero_series():
    # beta = 0 drops the n = 0 term: E_{1,0,1}(z) = z e**z
    p = MLParams(1.0, 0.0, 1.0)
    for z in (0.3, 1.0, 2.5):
        assert mittag_leffler(p, z).sum == pytest.approx(z * math.exp(z),
                                                         rel=1e-12)


def test_ml_p_root_denominators():
    # independently coded p = 2 partial sum
    alpha, beta_, z = 0.9, 1.3, 1.7
    direct = ml_direct(alpha, beta_, z, p=2.0)
    sv = mittag_leffler(MLParams(alpha, beta_, 2.0), z)
    assert sv.sum == pytest.approx(direct, rel=1e-12)


def test_coefficient_nth_root_decays():
    # gamma(alpha n + beta)**(-1/n) sinks below any epsilon
    alpha, beta_ = 0.6, 0.0
    for eps in (0.1, 0.01):
        n = 10
        while math.exp(-ln_gamma(alpha * n + beta_ + 1e-300) / n) >= eps:
            n *= 2
            assert n < 10**7
        assert math.exp(-ln_gamma(alpha * n) / n) < eps


def test_params_validation():
    with pytest.raises(ValueError):
        MLParams(0.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        MLParams(1.0, -0.1, 1.0)
    with pytest.raises(ValueError):
        MLParams(1.0, 1.0, 0.5)
    with pytest.raises(ValueError):
        mittag_leffler(MLParams(1.0, 1.0, 1.0), -1.0)
    with pytest.raises(ValueError):
        mittag_leffler(MLParams(1.0, 1.0, 1.0), 1.0, tol=0.0)

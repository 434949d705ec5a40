import math

import numpy as np
import pytest

from volgron.domains import Interval1D, ProductBox
from volgron.kernels import (
    AlphaBetaBounds,
    FractionalKernel,
    MultiplicativeKernel,
    PreorderError,
    ProductKernel,
    SeparableKernel,
    SumKernel,
    TransformedFractionalKernel,
    VoidKernel,
    check_monotone,
    constant_kernel,
    submultiplicative_defect,
)

DOM = Interval1D(0.0, 1.0)


def test_constant_kernel_values():
    k = constant_kernel(1.5)
    assert float(k.eval(0.7, 0.2)) == pytest.approx(1.5)
    # alpha = 1, beta = 0 fractional is 1 on the whole triangle
    f = FractionalKernel(alpha=1.0, beta=0.0)
    assert float(f.eval(0.9, 0.1)) == pytest.approx(1.0)


def test_fractional_direct_formula():
    k = FractionalKernel(alpha=0.5, beta=0.0)
    assert float(k.eval(1.0, 0.75)) == pytest.approx(0.25**-0.5)
    assert float(k.eval(1.0, 0.75)) == pytest.approx(2.0)


def test_fractional_singularities_give_infinity():
    k = FractionalKernel(alpha=0.5, beta=0.3, t0=0.0)
    assert math.isinf(float(k.eval(1.0, 1.0)))   # s = t, alpha < 1
    assert math.isinf(float(k.eval(1.0, 0.0)))   # s = t0, beta > 0
    # continuous and finite on the open triangle
    T = np.array([0.5, 0.8, 1.0])
    S = np.array([0.2, 0.3, 0.9])
    vals = k.eval_grid(T, S)
    assert np.all(np.isfinite(vals)) and np.all(vals > 0)


def test_fractional_p_constraint():
    k = FractionalKernel(alpha=0.5, beta=0.0)
    k.require_p(1.0)
    with pytest.raises(ValueError):
        k.require_p(3.0)  # beta + 1 - 1/p = 2/3 >= 1/2


def test_preorder_enforced():
    k = constant_kernel(1.0)
    with pytest.raises(PreorderError):
        k.eval(0.2, 0.7)
    box = ProductKernel((constant_kernel(1.0), constant_kernel(1.0)))
    with pytest.raises(PreorderError):
        box.eval((0.5, 0.1), (0.2, 0.4))
    # void kernels never raise
    v = VoidKernel(k1=lambda s: np.asarray(s) * 0 + 2.0)
    assert float(v.eval(0.1, 0.9)) == pytest.approx(2.0)


def test_sum_kernel_is_exact_sum():
    a = constant_kernel(1.0)
    b = FractionalKernel(alpha=2.0, beta=0.0)
    s = SumKernel((a, b))
    t, u = 0.9, 0.4
    assert float(s.eval(t, u)) == pytest.approx(
        float(a.eval(t, u)) + float(b.eval(t, u)))


def test_product_kernel_is_exact_product():
    k = ProductKernel((constant_kernel(2.0), FractionalKernel(2.0, 0.0)),
                      tail_factor=3.0)
    t = (0.9, 0.8)
    s = (0.1, 0.3)
    assert float(k.eval(t, s)) == pytest.approx(2.0 * 0.5 * 3.0)
    assert k.tail_constant == pytest.approx(3.0)
    k_callable = ProductKernel((constant_kernel(1.0),),
                               tail_factor=lambda s: s[..., 0] * 0 + 2.0)
    with pytest.raises(TypeError):
        k_callable.tail_constant


def test_multiplicative_kernel_exponential():
    # cumulative mass of Lebesgue measure is the identity
    k = MultiplicativeKernel(nu_cumulative=lambda t: np.asarray(t, dtype=float))
    assert float(k.eval(1.0, 0.0)) == pytest.approx(math.e)


def test_check_monotone_separable_increasing_passes():
    k = SeparableKernel(k0=lambda t: np.asarray(t) + 1.0,
                        k1=lambda s: np.asarray(s) * 0 + 1.0)
    rep = check_monotone(k, DOM, samples=300)
    assert rep.passed


def test_check_monotone_fractional_fails_with_witness():
    # direct evaluation of one triple: s=0, s~=0.5, t=1 already violates
    k = FractionalKernel(alpha=0.5, beta=0.0)
    assert float(k.eval(0.5, 0.0)) > float(k.eval(1.0, 0.0))
    rep = check_monotone(k, DOM, samples=200)
    assert not rep.passed
    s, s_mid, t, lhs, rhs = rep.counterexample
    assert s <= s_mid <= t
    assert lhs > rhs


def test_check_monotone_void_passes():
    v = VoidKernel(k1=lambda s: np.asarray(s, dtype=float) ** 2)
    assert check_monotone(v, DOM, samples=50).passed


def test_check_monotone_deterministic_seed():
    k = FractionalKernel(alpha=0.5, beta=0.0)
    r1 = check_monotone(k, DOM, samples=100, seed=123)
    r2 = check_monotone(k, DOM, samples=100, seed=123)
    assert r1.counterexample == r2.counterexample


def test_submultiplicative_defect():
    triples = [(0.1, 0.4, 0.8), (0.0, 0.5, 1.0), (0.2, 0.3, 0.9)]
    mult = MultiplicativeKernel(nu_cumulative=lambda t: 2.0 * np.asarray(t))
    assert submultiplicative_defect(mult, triples) == pytest.approx(0.0,
                                                                    abs=1e-12)
    assert submultiplicative_defect(constant_kernel(1.0), triples) == \
        pytest.approx(0.0, abs=1e-14)
    # constant 2: k(t,s~) k(s~,s) - k(t,s) = 4 - 2 = 2 > 0
    assert submultiplicative_defect(constant_kernel(2.0), triples) == \
        pytest.approx(2.0)


def test_transformed_fractional_eval_and_consistency():
    k = TransformedFractionalKernel(
        phi=lambda t: np.asarray(t, dtype=float) ** 2,
        phi_dot=lambda t: 2.0 * np.asarray(t, dtype=float),
        alphas=(0.8, 1.2), betas=(0.1, 0.0), t0=0.0,
    )
    assert k.sample_consistency(0.1, 1.0)
    t, s = 0.9, 0.5
    pt, ps = t * t, s * s
    expected = 2 * s * ((pt - ps) ** (0.8 - 1) * ps ** (-0.1)
                        + (pt - ps) ** (1.2 - 1))
    assert float(k.eval(t, s)) == pytest.approx(expected, rel=1e-12)
    assert k.bounds.alpha0 == pytest.approx(0.8)
    assert k.bounds.beta_inf == pytest.approx(0.1)


def test_alpha_beta_bounds_invariant():
    with pytest.raises(ValueError):
        AlphaBetaBounds.from_vectors((0.5, 0.9), (0.6, 0.0))
    b = AlphaBetaBounds.from_vectors((0.5, 0.9), (0.4, 0.0))
    assert b.alpha0 == 0.5 and b.alpha_inf == 0.9
    assert b.beta0 == 0.0 and b.beta_inf == 0.4


from hypothesis import given, settings
from hypothesis import strategies as st

ordered_pair = st.tuples(
    st.floats(min_value=0.0, max_value=1.0),
    st.floats(min_value=0.0, max_value=1.0),
).map(sorted)


@settings(max_examples=50, deadline=None)
@given(ordered_pair)
def test_sum_kernel_additive_at_random_points(pair):
    s, t = pair
    a = constant_kernel(0.7)
    b = SeparableKernel(k0=lambda x: 1.0 + np.asarray(x, float),
                        k1=lambda x: np.asarray(x, float) ** 2)
    total = SumKernel((a, b))
    assert float(total.eval(t, s)) == pytest.approx(
        float(a.eval(t, s)) + float(b.eval(t, s)), rel=1e-12, abs=1e-12)

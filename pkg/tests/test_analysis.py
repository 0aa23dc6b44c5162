import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from core.errors.math_errors import DomainError, RangeError
from core.numerics import analysis as A
from core.numerics.exact1d import build_vM, eval_v0
from core.numerics.params import FunctionSpec, Params
from core.numerics.pde_strip import Field2D, StripProblem


@pytest.fixture(scope="module")
def v0_field():
    """The exact profile sampled on a strip mesh: u is linear in the mesh coordinate."""
    params = Params(p=2.0, gamma=3.0)
    prob = StripProblem(params=params, ny=256)
    return Field2D.from_profile(prob, lambda y: eval_v0(params, y))


# ---------------------------------------------------------------------
# fits
# ---------------------------------------------------------------------

@settings(max_examples=30, deadline=None)
@given(st.floats(-2.0, 2.0), st.floats(0.1, 10.0))
def test_fit_recovers_a_power_law(exponent, constant):
    x = np.geomspace(1e-3, 1.0, 50)
    fit = A.fit_exponent(x, constant * x ** exponent)
    assert fit.exponent == pytest.approx(exponent, abs=1e-10)
    assert fit.constant == pytest.approx(constant, rel=1e-9)
    assert fit.rms_residual < 1e-10
    assert fit.samples == 50


def test_fit_window_and_failures():
    x = np.geomspace(1e-3, 1.0, 50)
    fit = A.fit_exponent(x, x ** 0.5, window=(1e-2, 1e-1))
    assert 1e-2 < fit.window[0] and fit.window[1] <= 1e-1
    assert fit.samples < 50
    with pytest.raises(DomainError):
        A.fit_exponent(x[:7], x[:7])
    with pytest.raises(DomainError):
        A.fit_exponent(x, -x)
    with pytest.raises(DomainError):
        A.fit_exponent(x, x[:-1])


def test_boundary_exponent_of_v0(v0_field):
    fit = A.boundary_exponent(v0_field)
    assert fit.exponent == pytest.approx(0.5, abs=1e-8)
    assert fit.constant == pytest.approx(math.sqrt(2.0), rel=1e-8)
    lo, hi = A.default_window(v0_field)
    assert lo == 5.0 * v0_field.y[1] and hi == pytest.approx(0.1)


# ---------------------------------------------------------------------
# gradients
# ---------------------------------------------------------------------

def test_gradient_blowup_of_v0(v0_field):
    params = v0_field.problem.params
    (scan,) = A.gradient_blowup_scan(v0_field, 0.5, [(1.0,)])
    assert scan.fit.exponent == pytest.approx(params.beta_grad, abs=1e-6)
    assert scan.c1 == pytest.approx(1.0 / math.sqrt(2.0), rel=1e-6)
    assert scan.c2 == pytest.approx(1.0 / math.sqrt(2.0), rel=1e-6)


def test_gradient_bound_of_v0(v0_field):
    bound = A.gradient_bound_profile(v0_field)
    assert bound.value == pytest.approx(1.0 / math.sqrt(2.0), rel=1e-6)
    assert v0_field.y[bound.row] == bound.y
    with pytest.raises(RangeError):
        A.gradient_bound_profile(v0_field, window=(2.0, 3.0))


def test_gradient_scan_rejects_bad_directions(v0_field):
    with pytest.raises(DomainError):
        A.gradient_blowup_scan(v0_field, 1.5, [(1.0,)])
    with pytest.raises(DomainError):
        A.gradient_blowup_scan(v0_field, 0.5, [(0.6, 0.8)])
    with pytest.raises(DomainError):
        A.gradient_blowup_scan(v0_field, 0.5, [(0.9,)])

    flat = Field2D.from_profile(StripProblem(params=Params(p=2.0, gamma=3.0, N=2), nx=4, ny=64),
                                lambda y: eval_v0(Params(p=2.0, gamma=3.0), y))
    with pytest.raises(DomainError):
        A.gradient_blowup_scan(flat, 0.9, [(0.6, 0.8)])
    (scan,) = A.gradient_blowup_scan(flat, 0.5, [(0.6, 0.8)])
    assert scan.c1 == pytest.approx(0.8 / math.sqrt(2.0), rel=1e-6)


# ---------------------------------------------------------------------
# scaling
# ---------------------------------------------------------------------

def test_profile_residual_of_v0(pure):
    t = np.linspace(0.5, 2.0, 401)
    res = A.profile_residual(lambda s: eval_v0(pure, s), pure, t)
    assert np.max(np.abs(res)) < 1e-4


@pytest.mark.parametrize("eps", [0.5, 0.1, 0.01])
def test_scaling_blowup_is_invariant_for_v0(pure, eps):
    out = A.scaling_blowup(lambda s: eval_v0(pure, s), eps, pure)
    assert np.allclose(out.w, eval_v0(pure, out.t), rtol=1e-12, atol=0.0)
    assert out.coefficient == pytest.approx(eps ** (pure.gamma * pure.beta_u))
    assert np.allclose(out.residual_u, out.residual_w, rtol=1e-6, atol=1e-10)


def test_scaling_blowup_of_a_perturbed_profile():
    params = Params(p=2.0, gamma=3.0, g=FunctionSpec.parse("const:1"))
    out = A.scaling_blowup(build_vM(params, 1.0, t_max=10.0), 0.1, params)
    assert np.all(np.isnan(out.residual_w))
    assert out.coefficient == pytest.approx(0.1 ** 1.5)


def test_scaling_blowup_errors(pure):
    with pytest.raises(DomainError):
        A.scaling_blowup(lambda s: eval_v0(pure, s), 0.0, pure)
    with pytest.raises(RangeError):
        A.scaling_blowup(build_vM(pure, 1.0, t_max=10.0), 20.0, pure)


# ---------------------------------------------------------------------
# Kelvin transform
# ---------------------------------------------------------------------

points = arrays(np.float64, (16, 2), elements=st.floats(0.1, 10.0))


@settings(max_examples=30, deadline=None)
@given(points)
def test_inversion_is_an_involution(x):
    assert np.allclose(A.invert_points(A.invert_points(x)), x, rtol=1e-12, atol=0.0)


def test_kelvin_keeps_harmonic_functions_harmonic():
    params = Params(p=2.0, gamma=3.0, N=2)
    assert A.kelvin_residual(lambda x: x[..., 1], params, source=False) < 1e-8


def test_kelvin_residual_of_v0():
    params = Params(p=2.0, gamma=3.0, N=2)
    assert A.kelvin_residual(lambda x: eval_v0(params, x[..., 1]), params) < 1e-4


def test_kelvin_errors():
    with pytest.raises(DomainError):
        A.kelvin_transform(lambda x: x[..., 0], [[1.0, 1.0]], Params(p=3.0, gamma=3.0, N=2))
    with pytest.raises(DomainError):
        A.kelvin_transform(lambda x: x[..., 0], [[0.0, 0.0]], Params(p=2.0, gamma=3.0, N=2))
    with pytest.raises(DomainError):
        A.kelvin_residual(lambda x: x[..., 0], Params(p=3.0, gamma=3.0, N=3))


# ---------------------------------------------------------------------
# elementary inequalities
# ---------------------------------------------------------------------

def test_ratios_are_one_for_p2():
    rng = np.random.default_rng(7)
    a, b = rng.standard_normal((100, 3)), rng.standard_normal((100, 3))
    r1, r2 = A.ineq_ratios(a, b, 2.0)
    assert np.allclose(r1, 1.0, atol=1e-12)
    assert np.allclose(r2, 1.0, atol=1e-12)
    r1, r2 = A.ineq_ratios([[1.0, 0.0]], [[1.0, 0.0]], 3.0)
    assert np.isnan(r1[0]) and np.isnan(r2[0])


@pytest.mark.parametrize("p", [1.5, 3.0, 4.0])
def test_estimated_constants_hold_on_fresh_pairs(p):
    est = A.estimate_ineq_constants(p, 2, trials=20_000, seed=0)
    assert 0.0 < est.C1_hat <= est.C2_hat
    assert A.count_ineq_violations(p, 2, 0.5 * est.C1_hat, 2.0 * est.C2_hat, trials=20_000, seed=1) == 0
    assert A.count_ineq_violations(p, 2, 2.0 * est.C1_hat, 0.5 * est.C2_hat, trials=20_000, seed=1) > 0


def test_estimate_arguments():
    with pytest.raises(DomainError):
        A.estimate_ineq_constants(1.0, 2)
    with pytest.raises(DomainError):
        A.estimate_ineq_constants(2.0, 0)
    with pytest.raises(DomainError):
        A.estimate_ineq_constants(2.0, 2, trials=100)


# ---------------------------------------------------------------------
# difference quotients
# ---------------------------------------------------------------------

def test_decreasing_quotients():
    assert A.decreasing_quotient_sup(FunctionSpec.parse("linear:-1"), 0.0, 3.0, 0.5) == pytest.approx(-1.0)
    assert A.decreasing_quotient_sup(FunctionSpec.parse("exp:1,1"), 0.0, 3.0, 0.5) < 0.0
    assert A.decreasing_quotient_sup(FunctionSpec.parse("plateau:1,2"), 0.0, 3.0, 0.5) == pytest.approx(0.0, abs=1e-12)
    assert A.tail_quotient_sup(FunctionSpec.parse("linear:-2"), 1.0, 0.5) == pytest.approx(-2.0)
    with pytest.raises(DomainError):
        A.decreasing_quotient_sup(FunctionSpec.parse("linear:-1"), 0.0, 0.2, 0.5)

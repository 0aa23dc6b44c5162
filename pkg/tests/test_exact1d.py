import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from core.errors.math_errors import DomainError, NonexistenceError
from core.numerics.exact1d import (
    Existence, asymptotic_slope, build_vM, energy_residual, eval_v0, eval_v0_prime, eval_vM,
    growth_report, identity_residual, nonexistence_diagnostic, ode_residual, scaling_map,
    slope_defect, v0_constant, v0_ode_residual,
)
from core.numerics.params import Params


exponents = st.tuples(st.floats(1.2, 4.0), st.floats(1.1, 4.0))


# ---------------------------------------------------------------------
# closed form
# ---------------------------------------------------------------------

def test_v0_closed_form_p2_gamma3(pure):
    assert abs(eval_v0(pure, 1.0) - math.sqrt(2.0)) < 1e-12
    t = np.array([0.0, 0.5, 2.0, 8.0])
    assert np.allclose(eval_v0(pure, t), np.sqrt(2.0 * t), rtol=0, atol=1e-14)


def test_v0_ode_residual_on_graded_grid(pure, p3g2):
    assert v0_ode_residual(pure, 2048) < 1e-6
    assert v0_ode_residual(p3g2, 2048) < 1e-6


@settings(max_examples=40, deadline=None)
@given(exponents, st.floats(1e-3, 1e3), st.floats(1e-2, 1e2))
def test_v0_homogeneity(pg, t, lam):
    params = Params(p=pg[0], gamma=pg[1])
    lhs = eval_v0(params, lam * t)
    rhs = lam ** params.beta_u * eval_v0(params, t)
    assert lhs == pytest.approx(rhs, rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(exponents, st.floats(1e-3, 1e2))
def test_v0_has_zero_energy(pg, t):
    params = Params(p=pg[0], gamma=pg[1])
    p, g = params.p, params.gamma
    v, vp = eval_v0(params, t), eval_v0_prime(params, t)
    kinetic = (p - 1.0) / p * vp ** p
    potential = v ** (1.0 - g) / (g - 1.0)
    assert kinetic == pytest.approx(potential, rel=1e-10)


def test_v0_rejects_negative_abscissa(pure):
    with pytest.raises(DomainError):
        eval_v0(pure, -1.0)


# ---------------------------------------------------------------------
# quadrature family
# ---------------------------------------------------------------------

@pytest.mark.parametrize("p", [2.0, 3.0])
@pytest.mark.parametrize("gamma", [2.0, 3.0])
@pytest.mark.parametrize("M", [0.0, 0.5, 1.0, 4.0])
def test_energy_and_identity(p, gamma, M):
    sol = build_vM(Params(p=p, gamma=gamma), M)
    assert np.max(np.abs(energy_residual(sol))) < 1e-8
    assert identity_residual(sol) < 1e-10
    assert sol.t[0] == 0.0 and sol.v[0] == 0.0
    assert np.all(np.diff(sol.v) > 0.0)


def test_m0_profile_matches_closed_form(pure):
    sol = build_vM(pure, 0.0, t_max=10.0)
    t = np.linspace(0.01, 10.0, 200)
    v, _ = eval_vM(sol, t)
    assert np.max(np.abs(v - eval_v0(pure, t))) < 1e-9


def test_fd_residual_is_small_away_from_the_boundary(pure):
    sol = build_vM(pure, 1.0, t_max=10.0)
    res = energy_residual(sol, "fd")
    assert len(res) == len(sol.t) - 5
    assert np.max(np.abs(res[len(res) // 4:])) < 1e-4


def test_ode_residual_interior(pure):
    sol = build_vM(pure, 1.0, t_max=10.0)
    res = ode_residual(sol)
    assert np.median(np.abs(res)) < 1e-4


@pytest.mark.parametrize("lam", [0.5, 2.0, 5.0])
def test_scaling_family(pure, lam):
    b = pure.beta_u
    M = lam ** ((pure.gamma - 1.0) * b)
    sol1 = build_vM(pure, 1.0, t_max=60.0)
    solM = build_vM(pure, M, t_max=10.0)
    t = np.linspace(0.0, 10.0, 501)
    vM, _ = eval_vM(solM, t)
    v1, _ = eval_vM(sol1, lam * t)
    assert np.max(np.abs(vM - lam ** (-b) * v1)) < 1e-8

    mapped = scaling_map(sol1, lam)
    assert mapped.M == pytest.approx(M, rel=1e-14)
    vm, _ = eval_vM(mapped, t[t <= mapped.t_max])
    assert np.max(np.abs(vm - vM[t <= mapped.t_max])) < 1e-8


def test_scaling_map_needs_unit_energy(pure):
    with pytest.raises(DomainError):
        scaling_map(build_vM(pure, 2.0, t_max=5.0), 2.0)


@pytest.mark.parametrize("p", [2.0, 3.0])
@pytest.mark.parametrize("M", [0.25, 1.0, 4.0])
def test_asymptotic_slope(p, M):
    sol = build_vM(Params(p=p, gamma=3.0), M, t_max=100.0)
    assert slope_defect(sol, 100.0) < 1e-3
    _, vp = eval_vM(sol, 100.0)
    assert vp == pytest.approx(asymptotic_slope(sol.params, M), abs=1e-3)


def test_slope_is_infinite_at_the_boundary(pure):
    _, vp = eval_vM(build_vM(pure, 1.0, t_max=5.0), 0.0)
    assert math.isinf(vp)


def test_growth_report_sublinear_and_linear(pure):
    flat = growth_report(build_vM(pure, 0.0))
    steep = growth_report(build_vM(pure, 1.0))
    assert flat[-1][1] < flat[0][1]
    assert steep[-1][1] == pytest.approx(asymptotic_slope(pure, 1.0), rel=0.05)


def test_bad_energy_constant(pure):
    with pytest.raises(DomainError):
        build_vM(pure, -1.0)
    with pytest.raises(DomainError):
        build_vM(pure, 1.0, t_max=0.0)


# ---------------------------------------------------------------------
# nonexistence
# ---------------------------------------------------------------------

@pytest.mark.parametrize("gamma", [0.5, 1.0])
def test_nonexistence_is_raised(gamma):
    params = Params(p=2.0, gamma=gamma)
    with pytest.raises(NonexistenceError) as err:
        build_vM(params, 1.0)
    assert "nonexistent (gamma<=1)" in str(err.value)
    assert err.value.exit_code == 2
    with pytest.raises(NonexistenceError):
        v0_constant(params)


def test_nonexistence_witness_thresholds():
    sub = nonexistence_diagnostic(Params(p=2.0, gamma=0.5), M=2.0)
    assert sub.status is Existence.NONEXISTENT
    assert sub.threshold == pytest.approx((2.0 * 0.5) ** 2.0)
    assert all(b[1] > a[1] for a, b in zip(sub.samples, sub.samples[1:]))

    log_case = nonexistence_diagnostic(Params(p=2.0, gamma=1.0), M=1.0)
    assert log_case.threshold == pytest.approx(math.e)

    assert nonexistence_diagnostic(Params(p=2.0, gamma=3.0)).exists

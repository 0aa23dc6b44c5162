import numpy as np
import pytest

from core.errors.math_errors import ConfigError, DomainError, DominationError, NonexistenceError
from core.numerics import barriers as B
from core.numerics.eigen_radial import solve_eigen
from core.numerics.exact1d import eval_v0
from core.numerics.params import FunctionSpec, Params


@pytest.fixture(scope="module")
def pair():
    return solve_eigen(1, 2.0)


@pytest.fixture(scope="module")
def params():
    return Params(p=2.0, gamma=3.0)


def _valid(b):
    report = B.validate_barrier(b)
    assert report.worst_violation < 1e-5, (b.kind, report.worst_node)
    return report


# ---------------------------------------------------------------------
# validity of every kind
# ---------------------------------------------------------------------

@pytest.mark.parametrize("gamma", [1.5, 2.0, 3.0])
def test_wmu_is_a_supersolution(gamma):
    b = B.build_wmu(2.0, rho=1.0, c=2.0, mu=4.0, fspec=Params(p=2.0, gamma=gamma))
    assert b.sense is B.Sense.SUPER
    _valid(b)
    assert b.coeffs["t_rho"] > 0.0
    assert b.coeffs["K"] == 1.0


@pytest.mark.parametrize("gamma", [1.5, 3.0])
def test_wmu_integrand_is_finite_at_zero(gamma):
    ker = B.build_wmu(2.0, rho=1.0, c=2.0, mu=4.0, fspec=Params(p=2.0, gamma=gamma)).kernel
    at_zero = ker.G_scaled(0.0)
    assert at_zero == pytest.approx((gamma - 1.0) ** 0.5)
    assert ker.G_scaled(1e-12) == pytest.approx(at_zero, rel=1e-4)
    s = 0.5
    assert ker.G_scaled(s) == pytest.approx(ker.G(s) * s ** -ker.singular_exponent, rel=1e-12)


def test_wmu_with_a_regular_part():
    params = Params(p=2.0, gamma=2.0, g=FunctionSpec.parse("const:3"))
    b = B.build_wmu(2.0, rho=1.0, c=8.0, mu=10.0, fspec=params)
    assert b.coeffs["K"] == pytest.approx(4.0)
    _valid(b)


def test_eigen_power_is_a_subsolution(params, pair):
    b = B.build_eigen_power(params, c0=1.0, t0=1.0, pair=pair)
    assert b.sense is B.Sense.SUB
    _valid(b)
    assert b.coeffs["R0"] ** params.beta_u * b.coeffs["w0"] == pytest.approx(1.0)


def test_linear_lower_is_a_subsolution(params, pair):
    b = B.build_linear_lower(params, c0=0.5, t0=1.0, pair=pair)
    _valid(b)
    assert b.coeffs["R"] == pytest.approx((2.0 * pair.lambda1 / 0.5) ** 0.5)


@pytest.mark.parametrize("N,kind", [(2, B.BarrierKind.LOGARITHMIC), (3, B.BarrierKind.FUNDAMENTAL)])
def test_annulus_barrier(N, kind):
    b = B.build_annulus_barrier(N, 2.0, R=1.0, u0=1.0, CH=10.0)
    assert b.kind is kind
    _valid(b)
    assert b.value(1.0) == pytest.approx(0.1, rel=1e-12)
    assert abs(b.value(4.0)) <= 1e-14
    x = np.array([[1.0] + [0.0] * (N - 1), [0.0] * (N - 1) + [4.0]])
    assert B.annulus_value(b, x) == pytest.approx([0.1, 0.0], abs=1e-14)


def test_annulus_chain_bounds():
    b = B.build_annulus_barrier(2, 2.0, R=1.0, u0=1.0, CH=10.0)
    bounds = B.annulus_chain_bounds(b)
    assert bounds["value_at_unit_height"] == pytest.approx(0.1 * np.log(4.0 / 3.0) / np.log(4.0))
    assert bounds["slope_bound"] == pytest.approx(0.1 / np.log(4.0) / 4.0)


def test_v0_shift_is_a_supersolution(params):
    b = B.build_v0_shift(params, s=1.2, epsilon=0.1)
    _valid(b)
    assert b(0.5) == pytest.approx(1.2 * eval_v0(params, 0.6))


def test_dispatch_by_kind(params):
    b = B.build("V0Shift", params=params, s=1.0)
    assert b.kind is B.BarrierKind.V0_SHIFT
    assert B.build(B.BarrierKind.LOGARITHMIC, N=2, p=2.0, R=1.0, u0=1.0).kind is B.BarrierKind.LOGARITHMIC


# ---------------------------------------------------------------------
# failures
# ---------------------------------------------------------------------

def test_wmu_needs_mu_above_c_over_rho(params):
    with pytest.raises(DomainError):
        B.build_wmu(2.0, rho=1.0, c=2.0, mu=1.0, fspec=params)


def test_wmu_needs_positive_radius(params):
    with pytest.raises(DomainError):
        B.build_wmu(2.0, rho=0.0, c=2.0, mu=4.0, fspec=params)
    with pytest.raises(DomainError):
        B.build_wmu(1.0, rho=1.0, c=2.0, mu=4.0, fspec=params)


def test_linear_lower_domination_failure(params, pair):
    with pytest.raises(DominationError) as err:
        B.build_linear_lower(params, c0=2.0, t0=1.0, pair=pair)
    assert err.value.trace


def test_pair_mismatch(params):
    with pytest.raises(ConfigError):
        B.build_eigen_power(params, c0=1.0, t0=1.0, pair=solve_eigen(2, 2.0, samples=501))


def test_annulus_needs_p_at_most_n():
    with pytest.raises(DomainError):
        B.build_annulus_barrier(2, 3.0, R=1.0, u0=1.0)
    with pytest.raises(DomainError):
        B.build_annulus_barrier(2, 2.0, R=1.0, u0=1.0, CH=1.0)


def test_v0_shift_needs_gamma_above_one():
    with pytest.raises(NonexistenceError):
        B.build_v0_shift(Params(p=2.0, gamma=0.5), s=1.0)


# ---------------------------------------------------------------------
# derived profiles
# ---------------------------------------------------------------------

def test_lower_bound_profiles(params, pair):
    ep = B.build_eigen_power(params, c0=1.0, t0=1.0, pair=pair)
    lower = B.lower_bound_profile(ep)
    y = np.array([1e-4, 1e-2, 1.0, 1e4])
    assert np.all(lower(y) <= 1.0)
    assert lower(y)[0] == pytest.approx(ep.coeffs["w0"] * 1e-4 ** params.beta_u)

    ll = B.build_linear_lower(params, c0=0.5, t0=1.0, pair=pair)
    assert B.lower_bound_profile(ll)(np.array([1e-3]))[0] == pytest.approx(ll.coeffs["C"] * 1e-3)
    with pytest.raises(DomainError):
        B.lower_bound_profile(B.build_v0_shift(params, s=1.0))
    with pytest.raises(DomainError):
        B.lower_bound_profile(B.build_annulus_barrier(2, 2.0, R=1.0, u0=1.0))


def test_upper_barrier_scale(params):
    s = B.upper_barrier_scale(params, c1=16.0, u_sup=0.1, lam_bar=1.0)
    assert s == pytest.approx(16.0 ** 0.25)
    s = B.upper_barrier_scale(params, c1=1.0, u_sup=10.0, lam_bar=1.0)
    assert s * eval_v0(params, 1.0) == pytest.approx(10.0)


def test_zero_convergence_window():
    f = FunctionSpec.parse("const:1")
    out = B.zero_convergence_window(2.0, rho=1.0, c=1.0, fspec=f, u_sup=0.2, lam_bar=0.5)
    assert out["lambda0"] < 0.5
    assert 0.2 < out["w_lambda0"] < 1.0
    assert out["mu"] >= 1.0


def test_linear_lower_profile_reaches_t0_at_depth_r(params, pair):
    ll = B.build_linear_lower(params, c0=0.5, t0=1.0, pair=pair)
    profile = B.linear_lower_profile(ll)
    R = ll.coeffs["R"]
    assert profile(np.array([R]))[0] == pytest.approx(1.0)
    assert profile(np.array([2.0 * R]))[0] == pytest.approx(1.0)
    assert abs(profile(np.array([0.0]))[0]) < 1e-8

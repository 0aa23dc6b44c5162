import math

import numpy as np
import pytest

from core.errors.math_errors import DomainError, RangeError
from core.numerics.eigen_radial import (
    bessel_oracle, cos_oracle, eigenvalue_on_ball, eval_dphi, eval_phi, radial_residual,
    sign_structure, sinc_oracle, solve_eigen,
)


@pytest.fixture(scope="module")
def pair1():
    return solve_eigen(1, 2.0)


def test_first_eigenvalue_n1(pair1):
    assert pair1.lambda1 == pytest.approx((math.pi / 2.0) ** 2, abs=1e-4)
    assert np.max(np.abs(pair1.phi - cos_oracle(pair1.r))) < 1e-6


def test_first_eigenvalue_n2():
    pair = solve_eigen(2, 2.0)
    assert pair.lambda1 == pytest.approx(5.78319, abs=1e-3)
    assert pair.lambda1 == pytest.approx(bessel_oracle(), abs=1e-6)


def test_first_eigenvalue_n3():
    pair = solve_eigen(3, 2.0)
    assert pair.lambda1 == pytest.approx(math.pi ** 2, abs=1e-3)
    assert np.max(np.abs(pair.phi - sinc_oracle(pair.r))) < 1e-6


@pytest.mark.parametrize("N,p", [(1, 1.5), (2, 3.0), (3, 4.0)])
def test_sign_structure_and_boundary(N, p):
    pair = solve_eigen(N, p, samples=1001)
    lo, hi = sign_structure(pair)
    assert lo > 0.0
    assert hi < 0.0
    assert pair.phi[0] == pytest.approx(1.0)
    assert abs(pair.phi[-1]) < 1e-8


def test_rescaling_to_radius(pair1):
    assert eigenvalue_on_ball(pair1, 2.0) == pytest.approx(pair1.lambda1 / 4.0)
    assert radial_residual(pair1, 1.0) < 1e-5
    assert radial_residual(pair1, 3.0) < 1e-5


def test_eigenvalue_increases_with_dimension():
    values = [solve_eigen(N, 2.5, samples=501).lambda1 for N in (1, 2, 3)]
    assert values == sorted(values)


def test_interpolation_matches_nodes(pair1):
    r = pair1.r[::100]
    assert np.allclose(eval_phi(pair1, r), pair1.phi[::100], atol=1e-14)
    assert np.allclose(eval_dphi(pair1, r), pair1.dphi[::100], atol=1e-14)


def test_scaled_pair_keeps_eigenvalue(pair1):
    scaled = pair1.scaled(3.0)
    assert scaled.lambda1 == pair1.lambda1
    assert scaled.phi[0] == pytest.approx(3.0)


def test_bad_arguments(pair1):
    with pytest.raises(DomainError):
        solve_eigen(0, 2.0)
    with pytest.raises(DomainError):
        solve_eigen(2, 1.0)
    with pytest.raises(DomainError):
        eigenvalue_on_ball(pair1, 0.0)
    with pytest.raises(RangeError):
        eval_phi(pair1, 1.5)

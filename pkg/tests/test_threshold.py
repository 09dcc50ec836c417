"""Reproduction number: spectral radius, decomposition, calibration."""

import numpy as np
import pytest
from conftest import random_params, two_group_params

from diffusim import (
    build_decomposition,
    calibrate_alpha,
    disease_free_equilibrium,
    r0_rank_one,
    spectral_radius,
)
from diffusim.errors import DomainError


# ------------------------------------------------------------ spectral radius


def test_rank_one_matrix_radius_is_its_trace():
    assert spectral_radius(np.array([[0.2, 0.3], [0.4, 0.6]])) == pytest.approx(0.8, abs=1e-12)


def test_symmetric_matrix_radius_known_value():
    assert spectral_radius(np.array([[2.0, 1.0], [1.0, 2.0]])) == pytest.approx(3.0, abs=1e-10)


def test_nilpotent_and_zero_matrices_have_radius_zero():
    assert spectral_radius(np.array([[0.0, 1.0], [0.0, 0.0]])) == 0.0
    assert spectral_radius(np.zeros((3, 3))) == 0.0


def test_radius_matches_dense_eigenvalue_oracle():
    rng = np.random.default_rng(21)
    for _ in range(50):
        n = int(rng.integers(1, 6))
        mat = rng.uniform(0.0, 1.0, (n, n))
        ref = float(np.max(np.abs(np.linalg.eigvals(mat))))
        assert spectral_radius(mat) == pytest.approx(ref, abs=1e-9)


@pytest.mark.parametrize("mat", [
    np.zeros((2, 3)),
    np.array([[1.0, -0.1], [0.2, 0.3]]),
    np.array([[1.0, np.inf], [0.2, 0.3]]),
    np.array([1.0, 2.0]),
])
def test_radius_rejects_invalid_matrices(mat):
    with pytest.raises(DomainError):
        spectral_radius(mat)


# ------------------------------------------------------------- decomposition


def test_decomposition_structure():
    p = two_group_params()
    dec = build_decomposition(p)
    eq = disease_free_equilibrium(p)
    f_ref = p.alpha * np.outer(p.eps * eq.s_star, p.gamma) / p.n_total
    np.testing.assert_allclose(dec.f, f_ref, rtol=1e-14)
    np.testing.assert_allclose(dec.v, np.diag(p.phi + p.d), rtol=1e-14)
    np.testing.assert_allclose(dec.k, f_ref / (p.phi + p.d)[None, :], rtol=1e-14)
    assert dec.r0 == pytest.approx(spectral_radius(dec.k), abs=1e-14)


def test_demo_scenario_r0_frozen_value():
    assert r0_rank_one(two_group_params()) == pytest.approx(
        0.024166666666666666, abs=1e-15
    )


def test_closed_form_equals_power_iteration_equals_eig_oracle():
    rng = np.random.default_rng(22)
    for _ in range(100):
        p = random_params(rng, int(rng.choice([1, 2, 3, 5])))
        dec = build_decomposition(p)
        via_trace = r0_rank_one(p)
        via_power = spectral_radius(dec.f @ np.linalg.inv(dec.v))
        via_eig = float(np.max(np.abs(np.linalg.eigvals(dec.k))))
        assert via_trace == pytest.approx(via_power, abs=1e-10)
        assert via_trace == pytest.approx(via_eig, abs=1e-10)


def test_r0_monotone_in_alpha_and_each_gamma():
    rng = np.random.default_rng(23)
    for _ in range(20):
        p = random_params(rng, int(rng.integers(1, 4)))
        base = r0_rank_one(p)
        assert r0_rank_one(p.with_alpha(p.alpha * 1.1)) > base
        for j in range(p.m):
            gamma = p.gamma.copy()
            gamma[j] *= 1.1
            bumped = type(p)(m=p.m, n_total=p.n_total, alpha=p.alpha, b=p.b,
                             d=p.d, rho=p.rho, delta=p.delta, phi=p.phi,
                             eps=p.eps, gamma=gamma)
            assert r0_rank_one(bumped) > base


# ---------------------------------------------------------------- calibration


def test_calibration_frozen_value_and_round_trip():
    p = two_group_params()
    alpha = calibrate_alpha(p, 1.4)
    assert alpha == pytest.approx(57.93103448275862, rel=1e-14)
    assert r0_rank_one(p.with_alpha(alpha)) == pytest.approx(1.4, rel=1e-12)


def test_calibration_round_trips_on_random_draws():
    rng = np.random.default_rng(24)
    for _ in range(30):
        p = random_params(rng, int(rng.integers(1, 5)))
        target = float(rng.uniform(0.2, 5.0))
        alpha = calibrate_alpha(p, target)
        assert r0_rank_one(p.with_alpha(alpha)) == pytest.approx(target, rel=1e-10)


def test_calibration_rejects_bad_targets():
    p = two_group_params()
    with pytest.raises(DomainError):
        calibrate_alpha(p, 0.0)
    with pytest.raises(DomainError):
        calibrate_alpha(p, -1.4)


def test_calibration_rejects_zero_transmission():
    p = two_group_params()
    silent = type(p)(m=2, n_total=100.0, alpha=1.0, b=0.01, d=0.01, rho=0.2,
                     delta=0.03, phi=0.03, eps=np.array([0.4, 0.6]),
                     gamma=np.zeros(2))
    with pytest.raises(DomainError):
        calibrate_alpha(silent, 1.4)

import math

import mpmath
import numpy as np
import pytest

from anisotrap.core.errors import GridError
from anisotrap.core.grid import Grid2D
from anisotrap.tools.theta.lattice import (
    LatticeTau,
    abrikosov_el_residual,
    abrikosov_multiplier,
    cell_vortex_count,
    gamma_cell_average,
    gamma_scan,
    gamma_tau,
    optimize_tau,
    theta_eval,
    theta_series,
    u_tau_eval,
)

HEX = LatticeTau.hexagonal()


def random_taus(rng, n):
    taus = []
    for _ in range(n):
        r = rng.uniform(-0.5, 0.5)
        taus.append(LatticeTau(tau_real=r, tau_imag=rng.uniform(math.sqrt(1 - r**2), 1.8)))
    return taus


def random_points(rng, n, radius):
    return rng.uniform(-radius, radius, n) + 1j * rng.uniform(-radius, radius, n)


def assert_scaled_close(a, b, tol):
    # 영점 근처에서는 상대 오차가 의미 없으므로 최대 크기로 정규화한다
    assert np.max(np.abs(a - b)) <= tol * np.max(np.abs(b))


@pytest.fixture
def residual_grid():
    return Grid2D.symmetric(7.5, 192)


class TestTheta:
    def test_vanishes_at_origin(self, rng):
        for tau in [HEX, LatticeTau.square()] + random_taus(rng, 5):
            assert abs(theta_eval(0.0, tau)) < 1e-14

    def test_matches_mpmath(self, rng):
        for tau in random_taus(rng, 5):
            q = mpmath.exp(1j * mpmath.pi * mpmath.mpc(tau.tau_real, tau.tau_imag))
            for z in random_points(rng, 5, 1.5):
                expected = complex(mpmath.jtheta(1, mpmath.pi * mpmath.mpc(z.real, z.imag), q))
                got = complex(theta_eval(z, tau))
                assert abs(got - expected) <= 1e-11 * max(1.0, abs(expected))

    def test_unit_shift(self, rng):
        for tau in random_taus(rng, 5):
            z = random_points(rng, 20, 1.5)
            lhs = theta_series(z + 1.0, tau, 40)
            rhs = -theta_series(z, tau, 40)
            assert_scaled_close(lhs, rhs, 1e-12)
            assert_scaled_close(theta_eval(z + 1.0, tau), -theta_eval(z, tau), 1e-12)

    def test_tau_shift_modulus(self, rng):
        for tau in random_taus(rng, 5):
            z = random_points(rng, 20, 1.0)
            lhs = np.abs(theta_series(z + tau.tau, tau, 40))
            rhs = np.exp(np.pi * tau.tau_imag + 2 * np.pi * z.imag) * np.abs(theta_series(z, tau, 40))
            assert_scaled_close(lhs, rhs, 1e-12)

    def test_reduction_agrees_with_direct_series(self, rng):
        for tau in random_taus(rng, 5):
            z = random_points(rng, 30, 2.0)
            direct = theta_series(z, tau, 60)
            assert_scaled_close(theta_eval(z, tau), direct, 1e-12)


class TestLatticeWavefunction:
    def test_vortex_at_origin(self):
        assert abs(u_tau_eval(0.0, HEX)) < 1e-14

    def test_modulus_periodic_on_scaled_lattice(self, rng):
        for tau in random_taus(rng, 10):
            a, b = tau.periods()
            z = random_points(rng, 50, 3.0)
            base = np.abs(u_tau_eval(z, tau))
            for shift in (a, b, a + b):
                moved = np.abs(u_tau_eval(z + shift, tau))
                assert np.max(np.abs(moved - base)) < 1e-10

    def test_far_field_is_finite(self):
        z = np.array([40.0 + 35.0j, -55.0 - 60.0j])
        values = u_tau_eval(z, HEX)
        assert np.all(np.isfinite(values))
        assert np.all(np.abs(values) < 10.0)

    def test_one_vortex_per_cell(self, rng):
        for tau in random_taus(rng, 10):
            assert cell_vortex_count(tau) == 1

    def test_one_vortex_in_shifted_cell(self):
        assert cell_vortex_count(HEX, offset=0.3 + 0.2j) == 1
        assert cell_vortex_count(LatticeTau.square(), offset=-0.25 + 0.4j) == 1


class TestGamma:
    def test_hexagonal_value(self):
        assert gamma_tau(HEX) == pytest.approx(1.1596, abs=1e-3)

    def test_square_lattice_direct_sum(self):
        n = np.arange(-12, 13)
        expected = float(np.sum(np.exp(-np.pi * (n[:, None] ** 2 + n[None, :] ** 2))))
        assert gamma_tau(LatticeTau.square()) == pytest.approx(expected, rel=1e-13)

    def test_hexagonal_beats_square(self):
        assert gamma_tau(HEX) < gamma_tau(LatticeTau.square())

    def test_modular_invariance(self, rng):
        for tau in random_taus(rng, 10):
            value = gamma_tau(tau)
            assert gamma_tau(LatticeTau.from_complex(tau.tau + 1)) == pytest.approx(value, abs=1e-10)
            assert gamma_tau(LatticeTau.from_complex(-1.0 / tau.tau)) == pytest.approx(value, abs=1e-10)

    def test_cell_average_agrees_with_lattice_sum(self, rng):
        for tau in random_taus(rng, 50):
            cell, _ = gamma_cell_average(tau)
            assert cell == pytest.approx(gamma_tau(tau), abs=1e-6)

    def test_mean_density(self, rng):
        for tau in random_taus(rng, 5):
            _, mean2 = gamma_cell_average(tau)
            assert mean2 == pytest.approx(1.0 / math.sqrt(2 * tau.tau_imag), rel=1e-10)

    def test_multiplier(self):
        assert abrikosov_multiplier(HEX) == pytest.approx(gamma_tau(HEX) / math.sqrt(math.sqrt(3)), rel=1e-14)

    def test_canonical(self, rng):
        for tau in random_taus(rng, 5):
            for moved in (tau.tau + 3, -1.0 / tau.tau, -1.0 / (tau.tau - 2)):
                back = LatticeTau.from_complex(moved).canonical()
                assert back.in_fundamental_domain()
                assert gamma_tau(back) == pytest.approx(gamma_tau(tau), abs=1e-10)


class TestOptimizeTau:
    def test_scan_table(self):
        table = gamma_scan(6)
        assert len(table) == 36
        assert list(table.columns) == ["tau_real", "tau_imag", "gamma"]
        assert all(
            LatticeTau(tau_real=r, tau_imag=i).in_fundamental_domain(1e-9)
            for r, i in zip(table["tau_real"], table["tau_imag"])
        )

    def test_hexagonal_minimum(self):
        tau, b = optimize_tau(n_grid=12)
        assert abs(tau.tau - HEX.tau) < 1e-3
        assert b == pytest.approx(1.1596, abs=1e-3)

    def test_square_slice(self):
        tau, b = optimize_tau(n_grid=12, tau_real=0.0)
        assert tau.tau_real == 0.0
        assert tau.tau_imag == pytest.approx(1.0, abs=1e-3)
        dense = min(gamma_tau(LatticeTau(tau_real=0.0, tau_imag=t)) for t in np.linspace(1.0, 2.0, 2001))
        assert b == pytest.approx(dense, abs=1e-10)

    def test_symmetric_seeds(self):
        seed = LatticeTau(tau_real=-0.3, tau_imag=1.1)
        _, b1 = optimize_tau(seed=seed)
        _, b2 = optimize_tau(seed=LatticeTau.from_complex(seed.tau + 1))
        assert b1 == pytest.approx(b2, abs=1e-12)

    def test_scan_rejects_tiny_grid(self):
        with pytest.raises(GridError):
            gamma_scan(1)


class TestAbrikosovResidual:
    def test_small_on_eight_cells(self, residual_grid):
        assert abrikosov_el_residual(HEX, residual_grid, cells=8.0) < 0.05

    def test_decreases_with_window(self, residual_grid):
        small = abrikosov_el_residual(HEX, residual_grid, cells=6.0)
        large = abrikosov_el_residual(HEX, residual_grid, cells=8.0)
        assert large < small

    def test_decreases_away_from_skirt(self, residual_grid):
        near = abrikosov_el_residual(HEX, residual_grid, cells=6.0, core=1.5)
        far = abrikosov_el_residual(HEX, residual_grid, cells=6.0, core=0.5)
        assert far < near

    def test_core_must_fit_inside_plateau(self, residual_grid):
        with pytest.raises(GridError):
            abrikosov_el_residual(HEX, residual_grid, cells=6.0, core=2.5)

    def test_zero_multiplier_gives_unit_residual(self, residual_grid):
        assert abrikosov_el_residual(HEX, residual_grid, cells=6.0, multiplier=0.0) == pytest.approx(1.0, abs=1e-12)

    def test_window_too_small(self, residual_grid):
        with pytest.raises(GridError):
            abrikosov_el_residual(HEX, residual_grid, cells=3.0)

    def test_grid_must_cover_window(self):
        with pytest.raises(GridError):
            abrikosov_el_residual(HEX, Grid2D.symmetric(5.0, 128), cells=8.0)

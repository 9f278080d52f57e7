import logging
import math

import numpy as np
import pytest
from pydantic import ValidationError
from scipy.integrate import dblquad, quad

from anisotrap.core.errors import GridError, InvalidParameterError, RegimeError, ResolutionError
from anisotrap.core.grid import ComplexField, Grid2D
from anisotrap.tools.energy.bounds import (
    lll_squeeze,
    thomas_fermi,
    tf_lower_bound,
    weak_ansatz,
    weak_bracket,
    weak_upper_bound,
)
from anisotrap.tools.energy.models import (
    EnergyBreakdown,
    ReducedParams,
    classify_regime,
    energy_E,
    gp_energy_inverse,
    gp_energy_map,
    reduced_params,
)
from anisotrap.tools.energy.strong import (
    energy_1d,
    energy_decomposition,
    strong_asymptote,
    strong_limit_1d,
    strong_profile_error,
    strong_test_function,
)
from anisotrap.tools.fock.basis import FockCoefficients, basis_semi_axes
from anisotrap.tools.fock.projector import windowed_u0
from anisotrap.tools.symplectic.params import TrapParams, derive_parameters
from anisotrap.tools.theta.lattice import LatticeTau, gamma_tau

from .helpers import random_feasible_traps


@pytest.fixture
def rp_figure1(figure1_trap):
    return reduced_params(figure1_trap)


@pytest.fixture
def rp_figure2(figure2_trap):
    return reduced_params(figure2_trap)


@pytest.fixture
def figure1_grid():
    return Grid2D(-11.0, 11.0, 256, -9.0, 9.0, 256)


@pytest.fixture
def figure2_grid():
    return Grid2D(-20.0, 20.0, 512, -2.5, 2.5, 256)


def independent_kappa(p):
    # 파생 파라미터 모듈을 거치지 않고 다시 계산
    w2, n2, e2 = p.omega**2, p.nu**2, p.eps**2
    alpha = math.sqrt(n2**2 + 4 * w2)
    mu2 = math.sqrt(1 + w2 + alpha)
    beta2 = 2 * p.omega * mu2 / (alpha + 2 * w2 + n2)
    kappa1 = math.sqrt((alpha + 2 * w2 + n2) * (2 * n2 + e2) / (alpha - n2 + 2 * w2))
    return kappa1 / beta2


class TestReducedParams:
    def test_isotropic_scaling(self):
        p = TrapParams.from_inputs(nu=0.0, eps=0.2, g=1.5)
        rp = reduced_params(p)
        assert rp.kappa == pytest.approx(rp.eps, rel=1e-12)
        assert rp.g0 == pytest.approx(2 * (1 + p.omega) * 1.5, rel=1e-12)

    def test_figure_scenarios(self, figure1_trap, figure2_trap, rp_figure1, rp_figure2):
        assert rp_figure1.kappa == pytest.approx(independent_kappa(figure1_trap), rel=1e-12)
        assert rp_figure1.kappa == pytest.approx(0.0617, rel=1e-2)
        assert rp_figure2.kappa == pytest.approx(independent_kappa(figure2_trap), rel=1e-12)
        assert rp_figure2.kappa == pytest.approx(1.625, rel=1e-2)
        assert rp_figure2.g0 == pytest.approx(5.779, rel=1e-3)

    def test_zero_eps_rejected(self):
        with pytest.raises(InvalidParameterError):
            reduced_params(TrapParams.from_inputs(omega=0.8, nu=0.6))

    def test_negative_coupling_rejected(self):
        with pytest.raises(ValidationError):
            ReducedParams(eps=0.1, kappa=0.1, g0=-1.0)


class TestRegime:
    def test_figure1_weak(self, rp_figure1):
        regime = classify_regime(rp_figure1)
        assert regime.tag == "Weak"
        assert regime.ratio == pytest.approx(0.174, abs=1e-2)

    def test_figure2_strong(self, rp_figure2):
        regime = classify_regime(rp_figure2)
        assert regime.tag == "Strong"
        assert regime.ratio == pytest.approx(4.58, rel=1e-2)

    def test_unit_ratio_intermediate(self):
        regime = classify_regime(ReducedParams(eps=1e-3, kappa=0.1, g0=1.0))
        assert regime.tag == "Intermediate"
        assert regime.ratio == pytest.approx(1.0, rel=1e-12)


class TestEnergyE:
    def test_ground_state_moments(self, lll_grid):
        rp = ReducedParams(eps=0.3, kappa=0.7, g0=2.0)
        expected = (0.3**2 / (4 * np.pi), 0.7**2 / (4 * np.pi), 2.0 / 4)
        from_coeffs = energy_E(FockCoefficients.unit(0, 8), rp, lll_grid)
        X1, X2 = lll_grid.mesh()
        field = ComplexField(np.exp(-0.5 * np.pi * (X1**2 + X2**2)), lll_grid)
        from_field = energy_E(field, rp)
        for e in (from_coeffs, from_field):
            assert (e.pot_x1, e.pot_x2, e.quartic) == pytest.approx(expected, rel=1e-8)

    def test_rejects_unnormalized(self, lll_grid):
        rp = ReducedParams(eps=0.3, kappa=0.7, g0=2.0)
        with pytest.raises(GridError):
            energy_E(FockCoefficients(2.0 * np.eye(9)[0]), rp, lll_grid)

    def test_coefficients_need_grid(self):
        with pytest.raises(GridError):
            energy_E(FockCoefficients.unit(0, 4), ReducedParams(eps=0.3, kappa=0.7, g0=2.0))

    def test_linear_in_coupling(self, lll_grid, rng):
        c = FockCoefficients(rng.standard_normal(13) + 1j * rng.standard_normal(13)).normalized()
        e1 = energy_E(c, ReducedParams(eps=0.3, kappa=0.7, g0=1.5), lll_grid)
        e2 = energy_E(c, ReducedParams(eps=0.3, kappa=0.7, g0=3.0), lll_grid)
        assert e2.quartic == 2 * e1.quartic
        assert (e2.pot_x1, e2.pot_x2) == (e1.pot_x1, e1.pot_x2)

    def test_u0_window_transverse_energy(self):
        rp = ReducedParams(eps=0.05, kappa=1.2, g0=1.0)
        grid = Grid2D(-22.0, 22.0, 512, -4.0, 4.0, 128)
        u = windowed_u0(grid, 4.0).normalized()
        assert energy_E(u, rp).pot_x2 == pytest.approx(rp.kappa**2 / (8 * np.pi), rel=1e-6)

    def test_rigorous_floor(self, lll_grid, rng):
        rp = ReducedParams(eps=0.3, kappa=0.8, g0=1.0)
        floor = rp.kappa**2 / (8 * np.pi)
        for _ in range(200):
            c = FockCoefficients(rng.standard_normal(17) + 1j * rng.standard_normal(17)).normalized()
            assert energy_E(c, rp, lll_grid).total >= floor - 1e-10

    def test_breakdown_validation(self):
        with pytest.raises(ValidationError):
            EnergyBreakdown(pot_x1=1.0, pot_x2=1.0, quartic=1.0, total=2.0)
        with pytest.raises(ValidationError):
            EnergyBreakdown.from_parts(-1.0, 1.0, 1.0)


class TestGPMap:
    def test_zero_point_offset_isotropic(self):
        p = TrapParams.from_inputs(nu=0.0, eps=0.3)
        dp = derive_parameters(p)
        assert gp_energy_map(0.0, dp) == pytest.approx(p.omega / (2 * np.pi), rel=1e-12)
        assert gp_energy_map(1.0, dp) - gp_energy_map(0.0, dp) == pytest.approx(1 / (1 + p.omega), rel=1e-12)

    def test_round_trip(self, figure1_trap):
        dp = derive_parameters(figure1_trap)
        for value in (0.0, 0.0395, 1.7):
            assert gp_energy_inverse(gp_energy_map(value, dp), dp) == pytest.approx(value, abs=1e-12)

    def test_noninteracting_ground_energy(self, rng):
        # Λ₀ 위 이차 에너지의 최솟값 (ε+κ)²/8π 는 원래 문제의 바닥값 (μ₁+μ₂)/4π 로 옮겨진다
        for p in random_feasible_traps(20, rng):
            dp = derive_parameters(p)
            rp = reduced_params(p)
            quadratic_min = (rp.eps + rp.kappa) ** 2 / (8 * np.pi)
            assert gp_energy_map(quadratic_min, dp) == pytest.approx((dp.mu1 + dp.mu2) / (4 * np.pi), rel=1e-10)


class TestThomasFermi:
    def test_symmetric_radii(self):
        rp = ReducedParams(eps=0.1, kappa=0.1, g0=1.0)
        tf = thomas_fermi(rp)
        assert tf.R1 == pytest.approx(tf.R2, rel=1e-14)
        assert tf.R1 == pytest.approx((0.4 / (np.pi * 1e-3)) ** 0.25, rel=1e-14)
        assert tf.energy == pytest.approx((2 / 3) * math.sqrt(0.01 / np.pi), rel=1e-14)

    @pytest.mark.parametrize("eps,kappa,g0", [(0.1, 0.1, 1.0), (0.0447, 0.0617, 4.0), (0.2, 0.5, 2.5)])
    def test_profile_quadrature(self, eps, kappa, g0):
        rp = ReducedParams(eps=eps, kappa=kappa, g0=g0)
        tf = thomas_fermi(rp)

        def on_ellipse(integrand):
            value, _ = dblquad(
                lambda r, th: integrand(tf.R1 * r * np.cos(th), tf.R2 * r * np.sin(th)) * tf.R1 * tf.R2 * r,
                0.0, 2 * np.pi, 0.0, 1.0, epsabs=1e-13, epsrel=1e-12,
            )
            return value

        norm = on_ellipse(lambda x1, x2: tf.density(x1, x2))
        energy = on_ellipse(
            lambda x1, x2: 0.5 * (eps**2 * x1**2 + kappa**2 * x2**2) * tf.density(x1, x2)
            + 0.5 * g0 * tf.density(x1, x2) ** 2
        )
        assert norm == pytest.approx(1.0, abs=1e-10)
        assert energy == pytest.approx(tf.energy, rel=1e-6)

    def test_grid_energy_of_profile(self):
        rp = ReducedParams(eps=0.1, kappa=0.1, g0=1.0)
        tf = thomas_fermi(rp)
        field = tf.field(Grid2D.symmetric(3.5, 512)).normalized()
        assert energy_E(field, rp).total == pytest.approx(tf.energy, rel=1e-3)

    def test_strong_regime_radius_warning(self, rp_figure2, caplog):
        with caplog.at_level(logging.WARNING):
            tf = thomas_fermi(rp_figure2)
        assert tf.R2 < 1.0
        assert "TF" in caplog.text

    def test_bracket(self, rp_figure1):
        lower, upper = weak_bracket(rp_figure1)
        assert lower == pytest.approx(tf_lower_bound(rp_figure1))
        assert lower == pytest.approx(0.0395, rel=1e-2)
        assert upper == pytest.approx(1.25 * lower * math.sqrt(gamma_tau(LatticeTau.hexagonal())), rel=1e-12)
        assert weak_upper_bound(rp_figure1, LatticeTau.square()) > weak_upper_bound(rp_figure1)


class TestSqueeze:
    def test_weak_axis_ratio(self, rp_figure1):
        tf = thomas_fermi(rp_figure1)
        lam = lll_squeeze(rp_figure1, 192)
        a, b = basis_semi_axes(192, lam)
        assert lam == pytest.approx(tf.R2 / tf.R1, rel=1e-14)
        assert a / b == pytest.approx(tf.R1 / tf.R2, rel=1e-12)

    def test_strong_profile_length(self, rp_figure2):
        L = strong_limit_1d(rp_figure2.g0).R / rp_figure2.eps ** (2 / 3)
        a, _ = basis_semi_axes(32, lll_squeeze(rp_figure2, 32))
        assert a == pytest.approx(1.2 * L, rel=1e-12)

    def test_isotropic_is_fock(self):
        assert lll_squeeze(ReducedParams(eps=0.05, kappa=0.05, g0=1.0), 40) == pytest.approx(1.0)


class TestWeakAnsatz:
    def test_rejects_strong_regime(self, rp_figure2, figure2_grid):
        with pytest.raises(RegimeError):
            weak_ansatz(rp_figure2, LatticeTau.hexagonal(), figure2_grid, 40)

    def test_grid_must_cover_support(self, rp_figure1):
        with pytest.raises(ResolutionError):
            weak_ansatz(rp_figure1, LatticeTau.hexagonal(), Grid2D.symmetric(8.0, 128), 64)

    @pytest.mark.slow
    def test_figure1_bracket(self, rp_figure1, figure1_grid):
        v, energy = weak_ansatz(rp_figure1, LatticeTau.hexagonal(), figure1_grid, 192)
        assert v.norm() == pytest.approx(1.0, abs=1e-12)
        assert energy.total > tf_lower_bound(rp_figure1)
        assert energy.total == pytest.approx(weak_upper_bound(rp_figure1), rel=0.2)

    @pytest.mark.slow
    def test_hexagonal_beats_square(self, rp_figure1, figure1_grid):
        _, hexagonal = weak_ansatz(rp_figure1, LatticeTau.hexagonal(), figure1_grid, 192)
        _, square = weak_ansatz(rp_figure1, LatticeTau.square(), figure1_grid, 192)
        assert square.total > hexagonal.total


class TestStrongLimit:
    def test_reference_coupling(self):
        limit = strong_limit_1d(2.0 / 3.0)
        assert limit.R == pytest.approx(1.0, rel=1e-14)
        assert limit.J == pytest.approx(0.3, rel=1e-14)

    @pytest.mark.parametrize("g0", [0.5, 2.0, 5.779])
    def test_closed_form_against_quadrature(self, g0):
        limit = strong_limit_1d(g0)
        mass, _ = quad(limit.density, -limit.R, limit.R, epsabs=1e-15)
        kinetic, _ = quad(lambda t: 0.5 * t**2 * limit.density(t), -limit.R, limit.R, epsabs=1e-15)
        interaction, _ = quad(lambda t: 0.5 * g0 * limit.density(t) ** 2, -limit.R, limit.R, epsabs=1e-15)
        assert mass == pytest.approx(1.0, abs=1e-12)
        assert kinetic + interaction == pytest.approx(limit.J, abs=1e-10)

    def test_euler_lagrange_multiplier(self):
        limit = strong_limit_1d(5.779)
        t = np.linspace(-0.999 * limit.R, 0.999 * limit.R, 2001)
        values = 0.5 * t**2 + limit.g0 * limit.density(t)
        assert np.max(np.abs(values - limit.multiplier)) < 1e-8

    def test_perturbations_raise_energy(self, rng):
        limit = strong_limit_1d(1.3)
        t = np.linspace(-3.0, 3.0, 6001)
        dt = t[1] - t[0]
        p = limit.amplitude(t)
        base = energy_1d(p, t, limit.g0)
        for _ in range(5):
            center, width = rng.uniform(-1.0, 1.0), rng.uniform(0.2, 0.8)
            q = p + 0.05 * rng.standard_normal() * np.exp(-(((t - center) / width) ** 2))
            q = q / math.sqrt(np.sum(q**2) * dt)
            assert energy_1d(q, t, limit.g0) > base

    def test_rejects_nonpositive_coupling(self):
        with pytest.raises(InvalidParameterError):
            strong_limit_1d(0.0)


class TestStrongAsymptote:
    def test_figure2_prediction(self, rp_figure2):
        prediction, floor = strong_asymptote(rp_figure2)
        assert floor == pytest.approx(rp_figure2.kappa**2 / (8 * np.pi))
        assert prediction == pytest.approx(floor + rp_figure2.eps ** (2 / 3) * 1.266, rel=1e-3)
        assert prediction >= floor

    def test_vanishing_correction(self):
        prediction, floor = strong_asymptote(ReducedParams(eps=1e-12, kappa=1.6, g0=5.8))
        assert prediction - floor < 1e-7

    def test_weak_regime_rejected(self, rp_figure1):
        with pytest.raises(RegimeError):
            strong_asymptote(rp_figure1)


class TestStrongTestFunction:
    def test_profile_and_energy(self, rp_figure2, figure2_grid):
        u = strong_test_function(rp_figure2, figure2_grid)
        assert u.norm() == pytest.approx(1.0, abs=1e-10)
        assert strong_profile_error(u, rp_figure2) < 0.1

        prediction, floor = strong_asymptote(rp_figure2)
        energy = energy_E(u, rp_figure2).total
        J = strong_limit_1d(rp_figure2.g0).J
        assert (energy - floor) / rp_figure2.eps ** (2 / 3) == pytest.approx(J, rel=0.15)

    def test_decomposition(self, rp_figure2, figure2_grid):
        u = strong_test_function(rp_figure2, figure2_grid)
        terms = energy_decomposition(u, rp_figure2)
        assert terms["total"] == pytest.approx(energy_E(u, rp_figure2).total, rel=1e-2)
        assert terms["transverse"] >= rp_figure2.kappa**2 / (4 * np.pi) * (1 - 1e-3)
        assert terms["total"] >= rp_figure2.kappa**2 / (8 * np.pi)

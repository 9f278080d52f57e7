import logging

import numpy as np
import pytest
from scipy.integrate import dblquad

from anisotrap.core.errors import GridError, SizeGuardError
from anisotrap.core.grid import ComplexField, Grid2D
from anisotrap.tools.fock.basis import (
    FockCoefficients,
    LLLBasis,
    fock_basis_eval,
    fock_moment_matrices,
    get_basis,
)
from anisotrap.tools.fock.projector import (
    carlen_check,
    project_kernel_oracle,
    project_lll,
    synthesize,
    tapered_u0_coefficients,
    wick_x2sq_check,
    windowed_u0,
    x2sq_rayleigh,
)

from .helpers import relative_l2

QUARTER = 1.0 / (4 * np.pi)


@pytest.fixture
def fock_grid():
    return Grid2D.symmetric(7.0, 128)


@pytest.fixture
def carlen_grid():
    return Grid2D.symmetric(6.0, 256)


@pytest.fixture
def squeezed_grid():
    return Grid2D.symmetric(9.0, 192)


@pytest.fixture
def oracle_grid():
    return Grid2D.symmetric(5.0, 64)


def random_coefficients(rng, N, squeeze=1.0):
    c = rng.standard_normal(N + 1) + 1j * rng.standard_normal(N + 1)
    return FockCoefficients(c, squeeze).normalized()


def smooth_bump(grid, radius=1.0):
    X1, X2 = grid.mesh()
    r2 = (X1**2 + X2**2) / radius**2
    values = np.zeros(grid.shape, dtype=np.complex128)
    inside = r2 < 1.0
    values[inside] = np.exp(-1.0 / (1.0 - r2[inside])) * np.exp(1j * X1[inside])
    return ComplexField(values, grid)


class TestFockBasis:
    def test_ground_state_closed_form(self, fock_grid):
        phi0 = fock_basis_eval(0, fock_grid)
        expected = np.exp(-0.5 * np.pi * np.abs(fock_grid.z()) ** 2)
        assert np.max(np.abs(phi0.values - expected)) < 1e-15
        assert phi0.norm() == pytest.approx(1.0, abs=1e-10)

    def test_first_level_norm_by_adaptive_quadrature(self, fock_grid):
        value, _ = dblquad(
            lambda y, x: np.pi * (x**2 + y**2) * np.exp(-np.pi * (x**2 + y**2)), -8, 8, -8, 8
        )
        assert value == pytest.approx(1.0, rel=1e-6)
        assert fock_basis_eval(1, fock_grid).norm() == pytest.approx(1.0, rel=1e-10)

    def test_orthonormality(self, fock_grid):
        table = LLLBasis(32, fock_grid).table
        gram = np.conj(table) @ table.T * fock_grid.weight
        assert np.max(np.abs(gram - np.eye(33))) < 1e-8

    def test_recurrence_matches_log_domain(self, fock_grid):
        table = LLLBasis(20, fock_grid).table
        direct = fock_basis_eval(20, fock_grid).values.ravel()
        assert np.max(np.abs(table[20] - direct)) < 1e-12

    def test_degree_guard(self, fock_grid):
        with pytest.raises(SizeGuardError):
            fock_basis_eval(513, fock_grid)
        with pytest.raises(SizeGuardError):
            LLLBasis(600, fock_grid)

    def test_exact_moments_match_quadrature(self, fock_grid):
        basis = LLLBasis(20, fock_grid)
        exact = fock_moment_matrices(20)
        quad = basis.quadrature_moment_matrices()
        for e, q in zip(exact, quad):
            assert np.max(np.abs(e - q)) < 1e-10


class TestSqueezedBasis:
    def test_orthonormality(self, squeezed_grid):
        table = LLLBasis(20, squeezed_grid, squeeze=0.3).table
        gram = np.conj(table) @ table.T * squeezed_grid.weight
        assert np.max(np.abs(gram - np.eye(21))) < 1e-8

    def test_ground_moments(self, fock_grid):
        lam = 0.3
        X1, X2 = LLLBasis(4, fock_grid, squeeze=lam).moment_matrices
        assert X1[0, 0].real == pytest.approx((1 + lam) / (4 * np.pi * lam), rel=1e-8)
        assert X2[0, 0].real == pytest.approx((1 + lam) / (4 * np.pi), rel=1e-8)

    def test_ground_state_lies_in_lll(self, oracle_grid):
        # 압축 진공도 Λ₀ 의 원소: 커널 사영이 그대로 돌려준다
        psi0 = LLLBasis(0, oracle_grid, squeeze=0.5).synthesize(FockCoefficients([1.0], 0.5))
        assert relative_l2(project_kernel_oracle(psi0).values, psi0.values) < 1e-6

    def test_entire_part(self, fock_grid, rng):
        basis = LLLBasis(12, fock_grid, squeeze=0.4)
        c = random_coefficients(rng, 12, 0.4)
        z = fock_grid.z()
        P, _ = basis.entire_values(c, z.ravel())
        u = basis.synthesize(c).values.ravel()
        assert np.max(np.abs(P * basis.table[0] - u)) < 1e-10

    def test_entire_derivative(self, fock_grid, rng):
        basis = LLLBasis(12, fock_grid, squeeze=0.4)
        c = random_coefficients(rng, 12, 0.4)
        z = np.array([0.3 + 0.2j, -1.1 + 0.5j])
        delta = 1e-6
        _, dP = basis.entire_values(c, z)
        plus, _ = basis.entire_values(c, z + delta)
        minus, _ = basis.entire_values(c, z - delta)
        assert np.allclose(dP, (plus - minus) / (2 * delta), rtol=1e-6)

    def test_mismatched_coefficients(self, fock_grid):
        basis = get_basis(4, fock_grid, 0.5)
        with pytest.raises(GridError):
            basis.synthesize(FockCoefficients(np.ones(5)))


class TestProjector:
    def test_basis_function_reproduced(self, fock_grid):
        phi3 = fock_basis_eval(3, fock_grid)
        c = project_lll(phi3, 16)
        assert np.max(np.abs(c.c - np.eye(17)[3])) < 1e-8
        assert relative_l2(synthesize(c, fock_grid).values, phi3.values) < 1e-8

    def test_shifted_gaussian_loses_norm(self, fock_grid):
        X1, X2 = fock_grid.mesh()
        u = ComplexField(np.exp(-np.pi * ((X1 - 0.7) ** 2 + X2**2)), fock_grid)
        projected = synthesize(project_lll(u, 40), fock_grid)
        assert projected.norm() < u.norm() - 1e-3

    def test_idempotent(self, fock_grid, rng):
        c = random_coefficients(rng, 24)
        again = project_lll(synthesize(c, fock_grid), 24)
        assert np.max(np.abs(again.c - c.c)) < 1e-8

    def test_self_adjoint(self, fock_grid, rng):
        shape = fock_grid.shape
        u = ComplexField(rng.standard_normal(shape) + 1j * rng.standard_normal(shape), fock_grid)
        v = ComplexField(rng.standard_normal(shape) + 1j * rng.standard_normal(shape), fock_grid)
        pu = synthesize(project_lll(u, 20), fock_grid)
        pv = synthesize(project_lll(v, 20), fock_grid)
        assert abs(pu.inner(v) - u.inner(pv)) < 1e-8 * max(1.0, abs(pu.inner(v)))

    def test_parseval(self, fock_grid, rng):
        c = random_coefficients(rng, 32)
        assert synthesize(c, fock_grid).norm() ** 2 == pytest.approx(1.0, abs=1e-8)

    def test_truncation_warning(self, fock_grid, caplog):
        X1, X2 = fock_grid.mesh()
        u = ComplexField(np.exp(-np.pi * ((X1 - 2.5) ** 2 + X2**2) / 2), fock_grid)
        with caplog.at_level(logging.WARNING):
            project_lll(u, 4)
        assert "절단 누수" in caplog.text

    def test_windowed_u0_approaches_lll(self):
        errors = []
        for width in (2.0, 4.0):
            grid = Grid2D(-5 * width - 2, 5 * width + 2, 512, -4.0, 4.0, 128)
            u = windowed_u0(grid, width)
            lam = 1.0 / (2 * np.pi * width**2 - 1.0)
            projected = synthesize(project_lll(u, 30, squeeze=lam), grid)
            errors.append(relative_l2(projected.values, u.values))
        assert errors[1] < errors[0]
        assert errors[1] < 0.1

    def test_windowed_u0_x2_moment(self):
        width = 4.0
        grid = Grid2D(-5 * width - 2, 5 * width + 2, 512, -4.0, 4.0, 128)
        lam = 1.0 / (2 * np.pi * width**2 - 1.0)
        c = project_lll(windowed_u0(grid, width), 30, squeeze=lam)
        assert x2sq_rayleigh(c, grid) == pytest.approx(QUARTER, rel=5e-2)


class TestKernelOracle:
    def test_reproduces_ground_state(self, oracle_grid):
        phi0 = fock_basis_eval(0, oracle_grid)
        assert relative_l2(project_kernel_oracle(phi0).values, phi0.values) < 1e-6

    def test_agrees_with_fock_projection(self, oracle_grid):
        u = smooth_bump(oracle_grid)
        oracle = project_kernel_oracle(u)
        fock = synthesize(project_lll(u, 64), oracle_grid)
        assert relative_l2(fock.values, oracle.values) < 1e-6

    def test_idempotent(self, oracle_grid):
        once = project_kernel_oracle(smooth_bump(oracle_grid))
        twice = project_kernel_oracle(once)
        assert relative_l2(twice.values, once.values) < 1e-6

    def test_size_guard(self):
        grid = Grid2D.symmetric(5.0, 128)
        with pytest.raises(SizeGuardError):
            project_kernel_oracle(fock_basis_eval(0, grid))


class TestCarlen:
    @pytest.mark.parametrize("k", [0, 5])
    def test_basis_states(self, carlen_grid, k):
        lhs, rhs = carlen_check(FockCoefficients.unit(k, 8), carlen_grid)
        assert rhs == pytest.approx(np.pi, rel=1e-8)
        assert lhs == pytest.approx(rhs, rel=1e-8)

    def test_random_states(self, carlen_grid, rng):
        for _ in range(50):
            lhs, rhs = carlen_check(random_coefficients(rng, 16), carlen_grid)
            assert rhs == pytest.approx(np.pi, rel=1e-8)
            assert lhs == pytest.approx(rhs, rel=1e-8)

    def test_squeezed_states(self, squeezed_grid, rng):
        for _ in range(10):
            lhs, rhs = carlen_check(random_coefficients(rng, 16, squeeze=0.5), squeezed_grid)
            assert lhs == pytest.approx(rhs, rel=1e-6)

    def test_matches_finite_differences_away_from_zeros(self, carlen_grid):
        # ψ_1 은 원점에만 영점이 있다
        c = FockCoefficients.unit(1, 4)
        lhs, _ = carlen_check(c, carlen_grid)
        mod = np.abs(synthesize(c, carlen_grid).values)
        g1, g2 = np.gradient(mod, carlen_grid.h1, carlen_grid.h2)
        assert np.sum(g1**2 + g2**2) * carlen_grid.weight == pytest.approx(lhs, rel=5e-2)


class TestX2Rayleigh:
    def test_ground_state(self, fock_grid):
        c = FockCoefficients.unit(0, 6)
        assert x2sq_rayleigh(c) == pytest.approx(1 / (2 * np.pi), rel=1e-14)
        assert x2sq_rayleigh(c, fock_grid) == pytest.approx(1 / (2 * np.pi), rel=1e-10)

    def test_spectral_bound_on_random_states(self, rng):
        values = [x2sq_rayleigh(random_coefficients(rng, 16)) for _ in range(1000)]
        assert min(values) >= QUARTER - 1e-4

    def test_spectral_bound_on_grid(self, fock_grid, rng):
        for _ in range(20):
            assert x2sq_rayleigh(random_coefficients(rng, 16), fock_grid) >= QUARTER - 1e-4

    def test_weyl_sequence(self):
        taper = [0.5, 0.8, 0.9, 0.95, 0.98]
        values = [x2sq_rayleigh(tapered_u0_coefficients(s, 1400)) for s in taper]
        assert all(a > b for a, b in zip(values, values[1:]))
        assert min(values) >= QUARTER - 1e-4
        assert values[-1] == pytest.approx(QUARTER, rel=2e-2)
        for s, value in zip(taper, values):
            lam = (1 - s) / (1 + s)
            assert value == pytest.approx((1 + lam) * QUARTER, rel=1e-8)

    def test_squeezed_requires_grid(self):
        with pytest.raises(ValueError):
            x2sq_rayleigh(FockCoefficients.unit(0, 2, squeeze=0.5))

    def test_wick_identity(self):
        mu = 0.5
        grid = Grid2D.symmetric(6.0, 128)
        lhs, rhs = wick_x2sq_check(mu, grid, np.linspace(-6.0, 6.0, 1201))
        assert lhs == pytest.approx(rhs, rel=1e-3)
        assert lhs == pytest.approx((1 + mu) * QUARTER, rel=1e-5)

import numpy as np
import pytest

from anisotrap.core.grid import Grid2D
from anisotrap.tools.symplectic.params import TrapParams, derive_parameters


@pytest.fixture
def figure1_trap():
    return TrapParams.from_inputs(nu=0.03, eps_sq=0.002, g=1.0)


@pytest.fixture
def figure2_trap():
    return TrapParams.from_inputs(nu=0.73, eps_sq=0.002, g=1.0)


@pytest.fixture
def moderate_trap():
    # ν²=0.09, ε²=0.3, ω²=0.61
    return TrapParams.from_inputs(nu=0.3, eps_sq=0.3, g=1.0)


@pytest.fixture
def moderate_derived(moderate_trap):
    return derive_parameters(moderate_trap)


@pytest.fixture
def lll_grid():
    return Grid2D.symmetric(6.0, 128)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)

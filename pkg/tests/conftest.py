import numpy as np
import pytest

from farsplit import AngularGrid, FarField


@pytest.fixture
def grid():
    return AngularGrid(512)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def band_limited_field(rng, grid, band=20):
    """Random far field with coefficients supported on |n| <= band."""
    coeffs = np.zeros(grid.size, dtype=complex)
    idx = np.arange(-band, band + 1) % grid.size
    coeffs[idx] = rng.standard_normal(2 * band + 1) + 1j * rng.standard_normal(
        2 * band + 1
    )
    return FarField.from_coeffs(grid, coeffs)

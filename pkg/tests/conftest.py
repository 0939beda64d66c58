import pytest

from tpdicke.eigensolve import solve_sector
from tpdicke.model import ModelParams, ParitySector


@pytest.fixture(scope="session")
def low_split_spectra():
    """Four-sector spectra at omega0=0.05, gamma=0.3, j=15, n_max=200 (shared)."""
    params = ModelParams(omega=1.0, omega0=0.05, gamma=0.3, two_j=30, n_max=200)
    return params, {sec: solve_sector(params, sec) for sec in ParitySector}

import time

import pytest

from heliosense import params
from heliosense.constants import DEFAULT_CONSTANTS
from heliosense import trap_fields


@pytest.fixture(scope="session")
def consts():
    return DEFAULT_CONSTANTS


@pytest.fixture(scope="session")
def default_params():
    return params.ParameterSet()


@pytest.fixture(scope="session")
def derived(default_params):
    return params.derive_parameters(default_params)


@pytest.fixture(scope="session")
def trap_solution():
    """Full default-cell solve; shared by the trap tests and the acceptance suite."""
    start = time.perf_counter()
    fit, fmap = trap_fields.trap_fit()
    elapsed = time.perf_counter() - start
    return fit, fmap, elapsed

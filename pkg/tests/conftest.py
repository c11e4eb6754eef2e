import pytest

from formlab.sieve import SieveTable


@pytest.fixture(scope="session")
def sieve_1m() -> SieveTable:
    # Shared across the whole run; building it twice would dominate test time.
    return SieveTable(10**6)


@pytest.fixture(scope="session")
def sieve_small() -> SieveTable:
    return SieveTable(10**4)

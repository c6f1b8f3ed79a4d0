import pytest

from ratiorich import FrequencyTable


@pytest.fixture
def geometric_table() -> FrequencyTable:
    """Counts halving with frequency: ratios exactly 0.5 everywhere."""
    return FrequencyTable.from_entries({j: 2 ** (10 - j) for j in range(1, 11)})


@pytest.fixture
def poisson_table() -> FrequencyTable:
    """Constant linear-ratio table: (j+1) f_{j+1} / f_j = 2 for every j."""
    return FrequencyTable.from_entries({1: 720, 2: 720, 3: 480, 4: 240, 5: 96, 6: 32})


@pytest.fixture
def gap_table() -> FrequencyTable:
    """Gap at frequency 3 truncates the usable ratio series."""
    return FrequencyTable.from_entries({1: 20, 2: 10, 4: 1})

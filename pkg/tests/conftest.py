from pathlib import Path

import pytest

from stillness.normality import AmplitudeTable
from stillness.table_io import read_amplitude_table

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture
def table_file() -> Path:
    return DATA_DIR / "travel_amplitudes.csv"


@pytest.fixture
def table(table_file: Path) -> AmplitudeTable:
    return read_amplitude_table(table_file)

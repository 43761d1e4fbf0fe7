import math
import re
from pathlib import Path

from stillness import constants
from stillness.condition import ConditionId
from stillness.exceptions import TableParseError
from stillness.normality import AmplitudeTable

# cells are separated by tabs, commas or runs of spaces
_SEPARATOR = re.compile(r"\s*,\s*|\s+")


def _split(line: str) -> list[str]:
    return [cell for cell in _SEPARATOR.split(line.strip()) if cell != ""]


def parse_amplitude_table(
    text: str, rows: int = constants.RUNS_PER_CONDITION
) -> AmplitudeTable:
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise TableParseError("no header")

    header = _split(lines[0])
    expected_columns = len(ConditionId.all())
    if len(header) != expected_columns:
        raise TableParseError(
            f"expected {expected_columns} columns, got {len(header)}"
        )
    known = {condition.name for condition in ConditionId.all()}
    seen: set[str] = set()
    for name in header:
        if name in seen:
            raise TableParseError(f'duplicate column "{name}"')
        if name not in known:
            raise TableParseError(f'unknown column "{name}"')
        seen.add(name)

    data_lines = lines[1:]
    if len(data_lines) != rows:
        raise TableParseError(f"expected {rows} rows, got {len(data_lines)}")

    columns: dict[str, list[float]] = {name: [] for name in header}
    for row_number, line in enumerate(data_lines, start=1):
        cells = _split(line)
        if len(cells) != len(header):
            raise TableParseError(
                f"row {row_number}: expected {len(header)} cells, got {len(cells)}"
            )
        for name, cell in zip(header, cells):
            try:
                value = float(cell)
            except ValueError:
                raise TableParseError.bad_cell(row_number, name, cell) from None
            if not (math.isfinite(value) and value > 0):
                raise TableParseError(
                    f"row {row_number}, column {name}: "
                    f"travel amplitude must be a positive number ({cell})"
                )
            columns[name].append(value)

    return AmplitudeTable(groups=columns, rows=rows)


def read_amplitude_table(file: Path) -> AmplitudeTable:
    if not file.exists():
        raise FileNotFoundError(f"file {file} does not exist")
    return parse_amplitude_table(file.read_text(encoding="utf-8"))

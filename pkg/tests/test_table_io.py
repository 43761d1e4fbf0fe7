import pytest

from stillness.exceptions import TableParseError
from stillness.table_io import parse_amplitude_table, read_amplitude_table


def test_reference_table(table):
    assert len(table.names) == 12
    assert table.names[0] == "condition00"
    assert table["condition00"][0] == 1.33
    assert table["condition51"][-1] == 0.91
    assert all(len(table[name]) == 24 for name in table.names)


def test_musical_subsets(table):
    assert list(table.musical_subset(0)) == [f"condition{n}0" for n in range(6)]
    assert list(table.musical_subset(1)) == [f"condition{n}1" for n in range(6)]


def test_comma_separated_copy(table_file):
    text = table_file.read_text(encoding="utf-8").replace("\t", ",")
    table = parse_amplitude_table(text)
    assert table["condition41"][0] == 1.00


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        read_amplitude_table(tmp_path / "missing.csv")


def test_empty_file():
    with pytest.raises(TableParseError, match="no header"):
        parse_amplitude_table("")


def test_short_file(table_file):
    lines = table_file.read_text(encoding="utf-8").splitlines()
    with pytest.raises(TableParseError, match="expected 24 rows, got 23"):
        parse_amplitude_table("\n".join(lines[:-1]))


def _lines(table_file):
    return table_file.read_text(encoding="utf-8").splitlines()


def test_wrong_column_count(table_file):
    lines = _lines(table_file)
    lines[0] = lines[0].rsplit("\t", 1)[0]
    with pytest.raises(TableParseError, match="expected 12 columns, got 11"):
        parse_amplitude_table("\n".join(lines))


def test_duplicate_column(table_file):
    lines = _lines(table_file)
    lines[0] = lines[0].replace("condition10", "condition00")
    with pytest.raises(TableParseError, match='duplicate column "condition00"'):
        parse_amplitude_table("\n".join(lines))


def test_unknown_column(table_file):
    lines = _lines(table_file)
    lines[0] = lines[0].replace("condition10", "condition70")
    with pytest.raises(TableParseError, match="unknown column"):
        parse_amplitude_table("\n".join(lines))


def test_short_row(table_file):
    lines = _lines(table_file)
    lines[3] = lines[3].rsplit("\t", 1)[0]
    with pytest.raises(TableParseError, match="row 3: expected 12 cells, got 11"):
        parse_amplitude_table("\n".join(lines))


def test_non_numeric_cell(table_file):
    lines = _lines(table_file)
    lines[1] = lines[1].replace("1.33", "1,33x", 1)
    with pytest.raises(TableParseError):
        parse_amplitude_table("\n".join(lines))


def test_non_positive_cell(table_file):
    lines = _lines(table_file)
    lines[2] = lines[2].replace("0.48", "-0.48", 1)
    with pytest.raises(TableParseError, match="must be a positive number"):
        parse_amplitude_table("\n".join(lines))


@pytest.mark.parametrize("cell", ["inf", "nan", "-inf"])
def test_non_finite_cell(table_file, cell):
    lines = _lines(table_file)
    lines[2] = lines[2].replace("0.48", cell, 1)
    with pytest.raises(TableParseError, match="row 2, column condition00"):
        parse_amplitude_table("\n".join(lines))

import numpy as np
import pytest

from stillness.condition import ConditionId
from stillness.exceptions import RunFormatError, RunRecordError
from stillness.params import SamplingSpec
from stillness.run_record import RunRecord

SHORT = SamplingSpec(run_duration_s=0.01)


def _record(z=None, **kwargs):
    n = SHORT.samples_per_run
    rng = np.random.default_rng(7)
    if z is None:
        z = 5.0 + 0.3 * rng.standard_normal(n)
    return RunRecord(
        condition=ConditionId(2, 1),
        z_mm=z,
        v_mm_s=rng.standard_normal(n),
        f_target_N=np.repeat([-0.25, -0.25, 0.1, 0.0, 0.2, 0.3, 0.0, 0.0, 0.0, 0.0], 4),
        **kwargs,
    )


def test_csv_round_trip(tmp_path):
    run = _record(subject=1, run_index=34, seed=9, clamped_samples=2)
    file = tmp_path / "run.csv"
    run.to_file(file)
    back = RunRecord.from_file(file, SHORT)

    assert back.condition == run.condition
    assert (back.subject, back.run_index, back.seed, back.clamped_samples) == (1, 34, 9, 2)
    np.testing.assert_allclose(back.z_mm, run.z_mm, rtol=0, atol=1e-9)
    np.testing.assert_allclose(back.v_mm_s, run.v_mm_s, rtol=0, atol=1e-9)
    np.testing.assert_allclose(back.f_target_N, run.f_target_N, rtol=0, atol=1e-9)


def test_text_layout():
    text = _record().to_text()
    lines = text.splitlines()
    assert lines[0] == "# condition=2,1"
    assert "time_s,z_mm,v_mm_s,f_target_n" in lines
    assert len(lines) == 6 + SHORT.samples_per_run


def test_series_are_read_only():
    run = _record()
    with pytest.raises(ValueError):
        run.z_mm[0] = 1.0


def test_force_commands_grid():
    run = _record()
    commands = run.force_commands(SHORT)
    assert len(commands) == SHORT.samples_per_run // 4
    assert commands[2] == pytest.approx(0.1)


def test_time_axis():
    run = _record()
    assert run.time_s[1] == pytest.approx(1 / 4000)
    assert run.time_s[-1] == pytest.approx((SHORT.samples_per_run - 1) / 4000)


@pytest.mark.parametrize("bad", [-0.01, 10.5, np.nan])
def test_rejects_z_out_of_range(bad):
    z = np.full(SHORT.samples_per_run, 5.0)
    z[3] = bad
    with pytest.raises(RunRecordError):
        _record(z=z)


def test_rejects_mismatched_lengths():
    with pytest.raises(RunRecordError):
        RunRecord(ConditionId(0, 0), z_mm=[1.0, 2.0, 3.0], v_mm_s=[0.0, 0.0], f_target_N=[0.0, 0.0])


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        RunRecord.from_file(tmp_path / "nope.csv", SHORT)


def _replace(text, old, new):
    assert old in text
    return text.replace(old, new, 1)


def test_rejects_wrong_header():
    text = _replace(_record().to_text(), "time_s,z_mm,v_mm_s,f_target_n", "t,z,v,f")
    with pytest.raises(RunFormatError, match="expected header"):
        RunRecord.from_text(text, "run.csv", SHORT)


def test_rejects_missing_condition():
    text = _replace(_record().to_text(), "# condition=2,1\n", "")
    with pytest.raises(RunFormatError, match="condition"):
        RunRecord.from_text(text, "run.csv", SHORT)


def test_rejects_short_file():
    text = _record().to_text()
    truncated = "\n".join(text.splitlines()[:-1]) + "\n"
    with pytest.raises(RunFormatError, match="expected 40 rows, got 39"):
        RunRecord.from_text(truncated, "run.csv", SHORT)


def test_rejects_non_numeric_cell():
    lines = _record().to_text().splitlines()
    lines[10] = "0.001,abc,0,0"
    with pytest.raises(RunFormatError, match="run.csv, line"):
        RunRecord.from_text("\n".join(lines), "run.csv", SHORT)


def test_rejects_off_grid_time():
    lines = _record().to_text().splitlines()
    cells = lines[10].split(",")
    cells[0] = "0.5"
    lines[10] = ",".join(cells)
    with pytest.raises(RunFormatError, match="off the 4000 Hz grid"):
        RunRecord.from_text("\n".join(lines), "run.csv", SHORT)


def test_rejects_z_out_of_range_in_file():
    lines = _record().to_text().splitlines()
    cells = lines[10].split(",")
    cells[1] = "12.5"
    lines[10] = ",".join(cells)
    with pytest.raises(RunFormatError):
        RunRecord.from_text("\n".join(lines), "run.csv", SHORT)

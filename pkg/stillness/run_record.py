import dataclasses
import logging
from pathlib import Path
from typing import Optional

import numpy as np
import numpy.typing as npt

from stillness import constants
from stillness.condition import ConditionId
from stillness.exceptions import ConditionError, RunFormatError, RunRecordError
from stillness.params import SAMPLING, SamplingSpec

logger = logging.getLogger(__name__)

_META_KEYS = ("condition", "subject", "run", "seed", "clamped_samples")
# tolerance on the time column and on the z range when reading files
_TIME_TOLERANCE_S = 1e-9
_RANGE_TOLERANCE_MM = 1e-9


def _frozen_series(values: npt.ArrayLike) -> np.ndarray:
    array = np.array(values, dtype=np.float64)
    array.setflags(write=False)
    return array


@dataclasses.dataclass(eq=False, frozen=True)
class RunRecord:
    """
    One stillness-movement episode: z position (mm), z speed (mm/s) and the
    target force (N), all on the position-rate time axis. The force is the
    zero-order hold of the force-rate commands.
    """

    condition: ConditionId
    z_mm: np.ndarray
    v_mm_s: np.ndarray
    f_target_N: np.ndarray
    subject: Optional[int] = None
    run_index: Optional[int] = None
    seed: Optional[int] = None
    clamped_samples: int = 0
    rate_Hz: int = constants.POSITION_RATE_HZ

    def __post_init__(self) -> None:
        for field in ("z_mm", "v_mm_s", "f_target_N"):
            object.__setattr__(self, field, _frozen_series(getattr(self, field)))

        lengths = {len(self.z_mm), len(self.v_mm_s), len(self.f_target_N)}
        if len(lengths) != 1:
            raise RunRecordError(f"series lengths differ: {sorted(lengths)}")
        if len(self.z_mm) < 2:
            raise RunRecordError(f"a run needs at least 2 samples (got {len(self.z_mm)})")
        if not np.all(np.isfinite(self.z_mm)):
            raise RunRecordError("z series contains non-finite values")

        z_min, z_max = float(self.z_mm.min()), float(self.z_mm.max())
        if z_min < constants.Z_MIN_MM or z_max > constants.Z_MAX_MM:
            raise RunRecordError(
                f"z must stay within [{constants.Z_MIN_MM}, {constants.Z_MAX_MM}] mm "
                f"(got [{z_min}, {z_max}])"
            )

    def __len__(self) -> int:
        return len(self.z_mm)

    @property
    def time_s(self) -> np.ndarray:
        return np.arange(len(self)) / self.rate_Hz

    def force_commands(self, sampling: SamplingSpec = SAMPLING) -> np.ndarray:
        """The force-rate command grid (every hold_factor-th sample)."""
        return self.f_target_N[:: sampling.hold_factor]

    @staticmethod
    def from_file(
        file: Path, sampling: SamplingSpec = SAMPLING
    ) -> "RunRecord":
        if not file.exists():
            raise FileNotFoundError(f"file {file} does not exist")
        if not file.is_file():
            raise FileNotFoundError(f"file {file} is not a file")

        return RunRecord.from_text(file.read_text(encoding="utf-8"), file, sampling)

    @staticmethod
    def from_text(
        text: str, source: object = "<run>", sampling: SamplingSpec = SAMPLING
    ) -> "RunRecord":
        lines = text.splitlines()
        meta: dict[str, str] = {}

        # metadata comments, then the header
        header_line = None
        for i, line in enumerate(lines):
            stripped = line.strip()
            if not stripped:
                continue
            if stripped.startswith("#"):
                key, sep, value = stripped[1:].partition("=")
                if not sep:
                    raise RunFormatError(source, i + 1, f'malformed metadata "{stripped}"')
                meta[key.strip()] = value.strip()
                continue
            header_line = i
            break

        if header_line is None:
            raise RunFormatError(source, len(lines), "no header")
        if lines[header_line].strip() != constants.RUN_CSV_HEADER:
            raise RunFormatError(
                source,
                header_line + 1,
                f'expected header "{constants.RUN_CSV_HEADER}", got "{lines[header_line].strip()}"',
            )

        unknown = set(meta) - set(_META_KEYS)
        if unknown:
            raise RunFormatError(source, 1, f"unknown metadata keys {sorted(unknown)}")
        if "condition" not in meta:
            raise RunFormatError(source, 1, "missing metadata line \"# condition=n,m\"")

        data_lines = [line for line in lines[header_line + 1 :] if line.strip()]
        expected = sampling.samples_per_run
        if len(data_lines) != expected:
            raise RunFormatError(
                source,
                header_line + 2,
                f"expected {expected} rows, got {len(data_lines)}",
            )
        try:
            data = np.loadtxt(data_lines, delimiter=",", ndmin=2)
        except ValueError as e:
            raise RunFormatError(source, header_line + 2, f"bad data row ({e})") from e
        if data.shape[1] != 4:
            raise RunFormatError(
                source, header_line + 2, f"expected 4 columns, got {data.shape[1]}"
            )

        time_s = data[:, 0]
        ideal = np.arange(len(time_s)) / sampling.position_rate_Hz
        off_grid = np.flatnonzero(np.abs(time_s - ideal) > _TIME_TOLERANCE_S)
        if off_grid.size:
            row = int(off_grid[0])
            raise RunFormatError(
                source,
                header_line + 2 + row,
                f"time {time_s[row]} s is off the {sampling.position_rate_Hz} Hz grid",
            )

        # values written at the range edge may carry round-off
        z_mm = data[:, 1]
        z_mm = np.where(
            np.abs(z_mm - constants.Z_MIN_MM) < _RANGE_TOLERANCE_MM, constants.Z_MIN_MM, z_mm
        )
        z_mm = np.where(
            np.abs(z_mm - constants.Z_MAX_MM) < _RANGE_TOLERANCE_MM, constants.Z_MAX_MM, z_mm
        )

        try:
            condition = ConditionId.parse(meta["condition"])
            record = RunRecord(
                condition=condition,
                z_mm=z_mm,
                v_mm_s=data[:, 2],
                f_target_N=data[:, 3],
                subject=_optional_int(meta.get("subject")),
                run_index=_optional_int(meta.get("run")),
                seed=_optional_int(meta.get("seed")),
                clamped_samples=_optional_int(meta.get("clamped_samples")) or 0,
                rate_Hz=sampling.position_rate_Hz,
            )
        except (ConditionError, RunRecordError, ValueError) as e:
            raise RunFormatError(source, 1, str(e)) from e

        logger.debug("read %s: condition %s, %d samples", source, condition, len(record))
        return record

    def to_text(self) -> str:
        meta_lines = [
            f"# condition={self.condition}",
            f"# subject={_blank_if_none(self.subject)}",
            f"# run={_blank_if_none(self.run_index)}",
            f"# seed={_blank_if_none(self.seed)}",
            f"# clamped_samples={self.clamped_samples}",
            constants.RUN_CSV_HEADER,
        ]
        rows = [
            f"{i / self.rate_Hz!r},{z!r},{v!r},{f!r}"
            for i, (z, v, f) in enumerate(
                zip(self.z_mm.tolist(), self.v_mm_s.tolist(), self.f_target_N.tolist())
            )
        ]
        return "\n".join(meta_lines + rows) + "\n"

    def to_file(self, file: Path) -> None:
        file.write_text(self.to_text(), encoding="utf-8")


def _optional_int(value: Optional[str]) -> Optional[int]:
    if value is None or value == "":
        return None
    return int(value)


def _blank_if_none(value: Optional[int]) -> str:
    return "" if value is None else str(value)

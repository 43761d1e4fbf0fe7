import dataclasses
import math
from typing import Optional

from stillness import constants
from stillness.exceptions import ConditionError
from stillness.params import HAPTIC_PARAMS, HapticParams

# absorbs float error of z / interval at exact cell boundaries
_CELL_EPSILON = 1e-9


@dataclasses.dataclass(eq=True, frozen=True)
class MarkerCell:
    index: int
    z_lo_mm: float
    z_hi_mm: float
    force_N: float


def _marker_force(index: int, params: HapticParams) -> float:
    # odd cells push up, even cells push down
    if index % 2 == 1:
        return params.marker_ampl_N
    return -params.marker_ampl_N


def marker_cells(params: HapticParams = HAPTIC_PARAMS) -> list[MarkerCell]:
    cells = []
    for i in range(params.marker_count):
        base = params.stim_base_mm + i * params.marker_interval_mm
        cells.append(
            MarkerCell(
                index=i,
                z_lo_mm=base,
                z_hi_mm=base + params.marker_height_mm,
                force_N=_marker_force(i, params),
            )
        )
    return cells


def marker_cell_at(
    z_mm: float, params: HapticParams = HAPTIC_PARAMS
) -> Optional[MarkerCell]:
    """The forced cell containing z, or None inside a gap or above the last cell."""

    offset = z_mm - params.stim_base_mm
    index = math.floor(offset / params.marker_interval_mm + _CELL_EPSILON)
    if not 0 <= index < params.marker_count:
        return None
    base = params.stim_base_mm + index * params.marker_interval_mm
    if z_mm - base >= params.marker_height_mm:
        return None
    return MarkerCell(
        index=index,
        z_lo_mm=base,
        z_hi_mm=base + params.marker_height_mm,
        force_N=_marker_force(index, params),
    )


def marker_force(z_mm: float, params: HapticParams = HAPTIC_PARAMS) -> float:
    cell = marker_cell_at(z_mm, params)
    return 0.0 if cell is None else cell.force_N


def marker_step_amplitude(params: HapticParams = HAPTIC_PARAMS) -> float:
    return 2.0 * params.marker_ampl_N


def condition_force(
    n: int, z_mm: float, v_mm_s: float, params: HapticParams = HAPTIC_PARAMS
) -> float:
    """Force (N, positive up) rendered to the fingerpad under haptic condition n."""

    if not constants.Z_MIN_MM <= z_mm <= constants.Z_MAX_MM:
        raise ConditionError(
            f"z = {z_mm} mm is outside the stimulus range "
            f"[{constants.Z_MIN_MM}, {constants.Z_MAX_MM}] mm"
        )

    if n == 0:
        return 0.0
    if n == 1:
        return params.pos_force_N
    if n == 2:
        return params.neg_force_N
    if n == 3:
        return params.viscosity_N_per_mm_per_s * v_mm_s
    if n == 4:
        return params.anti_viscosity_N_per_mm_per_s * v_mm_s
    if n == 5:
        return marker_force(z_mm, params)
    raise ConditionError(f"haptic index must be in 0..5 (got {n})")


def pitch_of_z(z_mm: float, params: HapticParams = HAPTIC_PARAMS) -> float:
    """Sine pitch (Hz) of the musical-control condition at height z."""

    if z_mm < 0:
        raise ValueError(f"pitch is defined for z >= 0 (got {z_mm} mm)")
    mm_per_octave = 12.0 / params.semitones_per_mm
    frequency = params.tone_base_Hz * 2.0 ** (z_mm / mm_per_octave)
    return min(frequency, params.tone_cap_Hz)

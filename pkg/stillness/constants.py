from enum import Enum

# sampling and device, see params.SamplingSpec for the full block
POSITION_RATE_HZ = 4000
FORCE_RATE_HZ = 1000
RUN_DURATION_S = 4.0

# z range of every condition (mm)
Z_MIN_MM = 0.0
Z_MAX_MM = 10.0

# per-run analysis
DFT_AMPL_THRESH_MM = 0.010
HISTOGRAM_BIN_MM = 0.25
POLY_FIT_DEGREE = 40
REPORT_MAX_FREQ_HZ = 50.0

# 1/f model of the averaged zero-force spectra
ONE_OVER_F_COEFF_MM_HZ = 3.0 / 17.0
ONE_OVER_F_BAND_HZ = (0.25, 30.0)
HF_FLOOR_MM = 0.01

# cross-condition tests
ANOVA_ALPHA = 0.05
SHAPIRO_MAX_N = 5000
RUNS_PER_CONDITION = 24

# simulator defaults (calibrated so zero-force travel lands mostly in 0.5-1.5 mm)
DEFAULT_TARGET_Z_MM = 5.0
DEFAULT_KP_N_PER_MM = 1.0
DEFAULT_KD_N_PER_MM_PER_S = 0.0045
# lognormal sigma of the per-run tremor gain (subjects differ run to run)
DEFAULT_GAIN_SPREAD = 0.35
# fraction of samples allowed outside the range before clamping
UNSTABLE_FRACTION = 0.5

RUN_CSV_HEADER = "time_s,z_mm,v_mm_s,f_target_n"
SPECTRUM_CSV_HEADER = "freq_hz,pp_mm"


class HapticCondition(Enum):
    ZERO_FORCE = "zero force"
    POSITIVE_FORCE = "positive force"
    NEGATIVE_FORCE = "negative force"
    VISCOSITY = "viscosity"
    ANTI_VISCOSITY = "anti-viscosity"
    POSITIONAL_MARKERS = "positional markers"


class MusicalCondition(Enum):
    NO_MUSICAL_CONTROL = "no musical control"
    MUSICAL_CONTROL = "musical control"

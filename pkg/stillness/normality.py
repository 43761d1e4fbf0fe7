import dataclasses
import logging
from typing import Iterable, Mapping, Sequence, Union

import numpy as np
import numpy.typing as npt
import scipy.stats

from stillness import constants
from stillness.condition import ConditionId
from stillness.exceptions import DegenerateSampleError, SampleSizeError, TableParseError

logger = logging.getLogger(__name__)

Groups = Mapping[str, npt.ArrayLike]


@dataclasses.dataclass(eq=False, frozen=True)
class AmplitudeTable:
    """Travel amplitudes (mm) per condition column, e.g. "condition00"."""

    groups: dict[str, np.ndarray]
    rows: int = constants.RUNS_PER_CONDITION

    def __post_init__(self) -> None:
        known = {condition.name for condition in ConditionId.all()}
        frozen = {}
        for name, values in self.groups.items():
            if name not in known:
                raise TableParseError(f'unknown condition column "{name}"')
            array = np.array(values, dtype=np.float64)
            if len(array) != self.rows:
                raise TableParseError(
                    f"column {name}: expected {self.rows} rows, got {len(array)}"
                )
            if not np.all(np.isfinite(array) & (array > 0)):
                raise TableParseError(
                    f"column {name}: travel amplitudes must be positive numbers"
                )
            array.setflags(write=False)
            frozen[name] = array
        object.__setattr__(self, "groups", frozen)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.groups[name]

    @property
    def names(self) -> list[str]:
        return list(self.groups)

    def musical_subset(self, m: int) -> dict[str, np.ndarray]:
        """The six haptic groups sharing musical index m."""
        return {
            name: values
            for name, values in self.groups.items()
            if ConditionId.parse(name).m == m
        }

    def pooled(self, names: Iterable[str]) -> np.ndarray:
        return np.concatenate([self.groups[name] for name in names])


@dataclasses.dataclass(eq=True, frozen=True)
class SwResult:
    w: float
    p: float


@dataclasses.dataclass(eq=True, frozen=True)
class GroupSummary:
    min: float
    max: float
    mean: float
    std: float


@dataclasses.dataclass(eq=True, frozen=True)
class AnovaResult:
    f_stat: float
    p: float
    df_between: int
    df_within: int


@dataclasses.dataclass(eq=True, frozen=True)
class AnovaRefusal:
    # (group name, Shapiro-Wilk p) for every group that failed normality
    failing_groups: tuple[tuple[str, float], ...]

    @property
    def names(self) -> set[str]:
        return {name for name, _ in self.failing_groups}


AnovaOutcome = Union[AnovaResult, AnovaRefusal]


def shapiro_wilk(x: npt.ArrayLike) -> SwResult:
    """W and p by Royston's AS R94 algorithm (scipy's swilk)."""

    x = np.asarray(x, dtype=np.float64)
    if x.size < 3:
        raise SampleSizeError.too_few("shapiro_wilk", 3, x.size)
    if x.size > constants.SHAPIRO_MAX_N:
        raise SampleSizeError(
            f"shapiro_wilk supports at most {constants.SHAPIRO_MAX_N} samples (got {x.size})"
        )
    if np.ptp(x) == 0:
        raise DegenerateSampleError("zero range")

    result = scipy.stats.shapiro(x)
    return SwResult(w=float(result.statistic), p=float(result.pvalue))


def group_summary(x: npt.ArrayLike) -> GroupSummary:
    x = np.asarray(x, dtype=np.float64)
    if x.size < 2:
        raise SampleSizeError.too_few("group_summary", 2, x.size)
    return GroupSummary(
        min=float(x.min()),
        max=float(x.max()),
        mean=float(x.mean()),
        std=float(x.std(ddof=1)),
    )


def one_way_anova(groups: Sequence[npt.ArrayLike]) -> AnovaResult:
    arrays = [np.asarray(g, dtype=np.float64) for g in groups]
    if len(arrays) < 2:
        raise SampleSizeError(f"one_way_anova needs at least 2 groups (got {len(arrays)})")
    for i, array in enumerate(arrays):
        if array.size < 2:
            raise SampleSizeError.too_few(f"one_way_anova group {i}", 2, array.size)

    df_between = len(arrays) - 1
    df_within = sum(a.size for a in arrays) - len(arrays)

    ss_within = sum(float(np.sum((a - a.mean()) ** 2)) for a in arrays)
    if ss_within == 0.0:
        grand_mean = np.concatenate(arrays).mean()
        ss_between = sum(a.size * float((a.mean() - grand_mean) ** 2) for a in arrays)
        if ss_between == 0.0:
            raise DegenerateSampleError("no variance within or between groups, F is undefined")
        # separated constant groups: F is the limit +inf
        return AnovaResult(
            f_stat=float("inf"), p=0.0, df_between=df_between, df_within=df_within
        )

    result = scipy.stats.f_oneway(*arrays)
    return AnovaResult(
        f_stat=float(result.statistic),
        p=float(result.pvalue),
        df_between=df_between,
        df_within=df_within,
    )


def normality_failures(
    groups: Groups, alpha: float = constants.ANOVA_ALPHA
) -> list[tuple[str, float]]:
    failing = []
    for name, values in groups.items():
        result = shapiro_wilk(values)
        if result.p < alpha:
            failing.append((name, result.p))
    return failing


def anova_gate(groups: Groups, alpha: float = constants.ANOVA_ALPHA) -> AnovaOutcome:
    """
    Runs the one-way ANOVA only if every group passes Shapiro-Wilk at alpha;
    otherwise refuses and lists the offending groups.
    """

    if len(groups) < 2:
        raise SampleSizeError(f"anova_gate needs at least 2 groups (got {len(groups)})")
    for name, values in groups.items():
        size = np.asarray(values).size
        if size < 3:
            raise SampleSizeError.too_few(f"group {name}", 3, size)

    failing = normality_failures(groups, alpha)
    if failing:
        logger.info(
            "normality rejected for %d of %d groups, ANOVA not run",
            len(failing),
            len(groups),
        )
        return AnovaRefusal(failing_groups=tuple(failing))

    return one_way_anova(list(groups.values()))

import dataclasses
import re

from stillness.constants import HapticCondition, MusicalCondition
from stillness.exceptions import ConditionError

HAPTIC_ORDER = list(HapticCondition)
MUSICAL_ORDER = list(MusicalCondition)

_CONDITION_PATTERN = re.compile(r"^(?:condition)?\s*([0-9])\s*,?\s*([0-9])$")


@dataclasses.dataclass(eq=True, frozen=True, order=True)
class ConditionId:
    """
    Index of one haptic x musical condition: n is the haptic index (0..5),
    m the musical index (0..1).
    """

    n: int
    m: int

    def __post_init__(self) -> None:
        if not 0 <= self.n < len(HAPTIC_ORDER):
            raise ConditionError(f"haptic index must be in 0..5 (got {self.n})")
        if not 0 <= self.m < len(MUSICAL_ORDER):
            raise ConditionError(f"musical index must be 0 or 1 (got {self.m})")

    def __str__(self) -> str:
        return f"{self.n},{self.m}"

    @property
    def name(self) -> str:
        """Column name used by the amplitude table, e.g. "condition50"."""
        return f"condition{self.n}{self.m}"

    @property
    def haptic(self) -> HapticCondition:
        return HAPTIC_ORDER[self.n]

    @property
    def musical(self) -> MusicalCondition:
        return MUSICAL_ORDER[self.m]

    @staticmethod
    def parse(text: str) -> "ConditionId":
        """
        Accepts "n,m" as printed in run headers, the compact "nm" and the
        table column name "conditionnm".
        """

        match = _CONDITION_PATTERN.match(text.strip())
        if match is None:
            raise ConditionError(f'cannot parse condition "{text}"')
        return ConditionId(int(match.group(1)), int(match.group(2)))

    @staticmethod
    def all() -> list["ConditionId"]:
        """The twelve conditions in amplitude-table column order (m outer, n inner)."""
        return [
            ConditionId(n, m)
            for m in range(len(MUSICAL_ORDER))
            for n in range(len(HAPTIC_ORDER))
        ]


def condition_label(condition: ConditionId) -> tuple[str, str]:
    return condition.haptic.value, condition.musical.value

from decimal import ROUND_HALF_EVEN, Decimal
from typing import Optional

from stillness.exceptions import StillnessError


def format_fixed(value: float, places: int) -> str:
    """
    Fixed-point text rounded half-even on the shortest decimal repr of value,
    so 0.125 prints as "0.12" on every platform.
    """

    quantum = Decimal(1).scaleb(-places)
    rounded = Decimal(repr(float(value))).quantize(quantum, rounding=ROUND_HALF_EVEN)
    if rounded.is_zero():
        rounded = abs(rounded)
    return f"{rounded:.{places}f}"


def format_scientific(value: float, places: int = 2) -> str:
    return f"{value:.{places}e}"


def format_optional(
    value: Optional[float], places: int, scientific: bool = False
) -> str:
    if value is None:
        return "n/a"
    if scientific:
        return format_scientific(value, places)
    return format_fixed(value, places)


def parse_band(text: str) -> tuple[float, float]:
    """Parses "LO:HI" in Hz."""

    lo_text, sep, hi_text = text.partition(":")
    if not sep:
        raise StillnessError(f'band must look like "LO:HI" (got "{text}")')
    try:
        lo, hi = float(lo_text), float(hi_text)
    except ValueError:
        raise StillnessError(f'band bounds must be numbers (got "{text}")') from None
    if not lo < hi:
        raise StillnessError(f"band must satisfy LO < HI (got {lo}:{hi})")
    return lo, hi

from typing import Any


class StillnessError(Exception):
    pass


class ConditionError(StillnessError):
    pass


class SampleSizeError(StillnessError):
    @staticmethod
    def too_few(what: str, minimum: int, actual: int) -> "SampleSizeError":
        return SampleSizeError(
            f"{what} needs at least {minimum} samples (got {actual})"
        )


class DegenerateSampleError(StillnessError):
    def __init__(self, detail: str = "") -> None:
        message = "degenerate sample"
        if detail:
            message += f": {detail}"
        super().__init__(message)


class RunRecordError(StillnessError):
    pass


class RunFormatError(StillnessError):
    def __init__(self, source: Any, line: int, message: str) -> None:
        super().__init__(f"{source}, line {line}: {message}")


class TableParseError(StillnessError):
    @staticmethod
    def bad_cell(row: int, column: str, cell: str) -> "TableParseError":
        return TableParseError(f'row {row}, column {column}: not a number "{cell}"')


class SpectrumMismatchError(StillnessError):
    pass


class ModelError(StillnessError):
    pass


class SimulationConfigError(StillnessError):
    pass


class UnstableSimulationError(StillnessError):
    def __init__(self, outside: int, total: int) -> None:
        super().__init__(
            f"unstable simulation: position left the range before clamping "
            f"in {outside} of {total} samples"
        )

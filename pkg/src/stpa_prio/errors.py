"""Exception hierarchy for the prioritisation toolchain.

Every error raised by this package derives from :class:`StpaPrioError`,
so callers (notably the CLI) can separate tool errors from genuine bugs.
Dataset errors carry file/line context for actionable diagnostics.
"""

from __future__ import annotations


class StpaPrioError(Exception):
    """Base class for all toolchain errors."""


class ConfigError(StpaPrioError):
    """A configuration value is outside its permitted range."""


class InvalidPerturbation(ConfigError):
    """Perturbation fraction must satisfy 0 <= p < 1."""


class MalformedId(StpaPrioError):
    """A requirement or UCA identifier does not match the ID grammar."""


class NegativeEJ(StpaPrioError):
    """Expert-judgement scores must be non-negative."""


class NonPositiveSIF(StpaPrioError):
    """Severity-impact factors must be strictly positive."""


class EmptyInput(StpaPrioError):
    """An operation requiring at least one element received none."""


class TooFewRequirements(StpaPrioError):
    """The simulation needs at least two requirements to rank."""


class MismatchedSets(StpaPrioError):
    """Two simulation runs do not cover the same requirement set."""


class NonPositiveMax(StpaPrioError):
    """Grid scaling needs a strictly positive axis maximum."""


class OutOfRange(StpaPrioError):
    """A value lies outside the scaling range [0, max]."""


class EmptyDescription(StpaPrioError):
    """Requirement descriptions must be non-empty."""


class MissingPriority(StpaPrioError):
    """A row reached the filter without a priority label."""


class DatasetError(StpaPrioError):
    """Base class for dataset loading/validation failures.

    ``source`` and ``line`` locate the offending input row when known.
    """

    def __init__(self, message: str, *, source: str | None = None, line: int | None = None):
        self.source = source
        self.line = line
        prefix = ""
        if source is not None:
            prefix = source if line is None else f"{source}:{line}"
            prefix += ": "
        super().__init__(prefix + message)


class ParseError(DatasetError):
    """A dataset row is structurally invalid (bad column, number, or ID)."""


class UnknownPhase(DatasetError):
    """A phase token is not one of the five recognised identifiers."""


class UnresolvedUCA(DatasetError):
    """A requirement references a UCA that is not in the dataset."""


class InvalidIntensityToken(DatasetError):
    """A factor cell holds a token outside the factor's intensity scale."""


class IoError(StpaPrioError):
    """Writing a report or diagram file failed."""

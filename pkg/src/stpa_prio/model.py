"""Domain model shared by every pipeline stage.

UCAs, requirements, SME factor assessments, and the analysis
configuration. All types are frozen dataclasses: immutable after
construction and safe to share across threads.

Ordinal encodings used throughout:

* Time: Minor=1, Moderate=2, Significant=3 (effort to implement)
* Cost: Low=1, Medium=2, High=3
* Mitigation type: A=5, B=4, C=3, D=2, E=1 (A eliminates the causal
  factor outright and scores highest)
* Regulatory coverage: 1 = not covered by pre-existing regulation,
  0 = already covered
"""

from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass
from enum import Enum

from .errors import ConfigError, InvalidPerturbation, MalformedId

WEIGHT_SUM_TOLERANCE = 1e-9
SIF_REL_TOLERANCE = 1e-9


class Phase(Enum):
    """Analysis phase a control structure belongs to."""

    PH0_1 = "Ph0.1"
    PH0_2 = "Ph0.2"
    PH1 = "Ph1"
    PH2 = "Ph2"
    PH3 = "Ph3"

    @classmethod
    def parse(cls, token: str) -> "Phase":
        for member in cls:
            if member.value == token:
                return member
        raise MalformedId(f"unknown phase token {token!r}")


class MitigationType(Enum):
    """Five mitigation strategies, A (design elimination) down to E (procedural)."""

    A = 5
    B = 4
    C = 3
    D = 2
    E = 1


# Ordinal ranges per factor, used for bound validation and sampling.
TIME_RANGE = (1, 3)
COST_RANGE = (1, 3)
TYPE_RANGE = (1, 5)
COVERED_RANGE = (0, 1)


@dataclass(frozen=True)
class FactorAssessment:
    """One SME assessment of a requirement on the four scoring factors.

    Optional triangular bounds (a, b) bracket the uncertainty of each
    factor on its ordinal scale; the point assessment is the mode c.
    Absent bounds collapse to a = c = b.
    """

    time: int
    cost: int
    mitigation_type: MitigationType
    covered_gap: int
    time_bounds: tuple[float, float] | None = None
    cost_bounds: tuple[float, float] | None = None
    type_bounds: tuple[float, float] | None = None
    covered_bounds: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        _check_ordinal("time", self.time, TIME_RANGE)
        _check_ordinal("cost", self.cost, COST_RANGE)
        if self.covered_gap not in (0, 1):
            raise ConfigError(f"covered_gap must be 0 or 1, got {self.covered_gap}")
        _check_bounds("time", self.time_bounds, self.time, TIME_RANGE)
        _check_bounds("cost", self.cost_bounds, self.cost, COST_RANGE)
        _check_bounds("type", self.type_bounds, self.mitigation_type.value, TYPE_RANGE)
        _check_bounds("covered", self.covered_bounds, self.covered_gap, COVERED_RANGE)

    def triangle(self, factor: str) -> tuple[float, float, float]:
        """Triangular (a, c, b) triple for ``factor`` on its ordinal scale."""
        mode = {
            "type": float(self.mitigation_type.value),
            "likelihood": float(self.covered_gap),
            "time": float(self.time),
            "cost": float(self.cost),
        }[factor]
        bounds = {
            "type": self.type_bounds,
            "likelihood": self.covered_bounds,
            "time": self.time_bounds,
            "cost": self.cost_bounds,
        }[factor]
        if bounds is None:
            return (mode, mode, mode)
        return (bounds[0], mode, bounds[1])


def _check_ordinal(name: str, value: int, rng: tuple[int, int]) -> None:
    if not rng[0] <= value <= rng[1]:
        raise ConfigError(f"{name} must be in {rng[0]}..{rng[1]}, got {value}")


def _check_bounds(
    name: str,
    bounds: tuple[float, float] | None,
    mode: float,
    rng: tuple[int, int],
) -> None:
    if bounds is None:
        return
    a, b = bounds
    if not (rng[0] <= a <= mode <= b <= rng[1]):
        raise ConfigError(
            f"{name} bounds must satisfy {rng[0]} <= a <= c <= b <= {rng[1]}, "
            f"got a={a}, c={mode}, b={b}"
        )


@dataclass(frozen=True)
class UCARecord:
    """An unsafe control action with its severity/impact inputs.

    ``sif`` is the severity-impact factor. When ``pms`` and ``cif`` are
    both given, sif must equal their product (relative tolerance 1e-9);
    when sif is omitted it is derived from them. A lower expert-judgement
    score ``ej`` means a more critical UCA.
    """

    uca_id: str
    phase: Phase
    description: str
    sif: float
    ej: float
    pms: float | None = None
    cif: float | None = None

    def __post_init__(self) -> None:
        if self.sif <= 0:
            raise ConfigError(f"{self.uca_id}: sif must be positive, got {self.sif}")
        if self.ej < 0:
            raise ConfigError(f"{self.uca_id}: ej must be non-negative, got {self.ej}")
        if self.pms is not None and self.cif is not None:
            product = self.pms * self.cif
            if not math.isclose(self.sif, product, rel_tol=SIF_REL_TOLERANCE):
                raise ConfigError(
                    f"{self.uca_id}: sif {self.sif} does not equal pms*cif {product}"
                )

    @classmethod
    def from_factors(
        cls,
        uca_id: str,
        phase: Phase,
        description: str,
        ej: float,
        pms: float | None = None,
        cif: float | None = None,
        sif: float | None = None,
    ) -> "UCARecord":
        """Build a record, deriving sif = pms * cif when sif is absent."""
        if sif is None:
            if pms is None or cif is None:
                raise ConfigError(
                    f"{uca_id}: sif missing and cannot be derived without both pms and cif"
                )
            sif = pms * cif
        return cls(uca_id, phase, description, sif, ej, pms, cif)


@dataclass(frozen=True)
class RequirementRecord:
    """A safety requirement traced to its parent UCA."""

    req_id: str
    uca_id: str
    description: str
    causal_factors: tuple[str, ...]
    assessment: FactorAssessment

    def __post_init__(self) -> None:
        parsed = parse_req_id(self.req_id)
        if parsed.uca_id != self.uca_id:
            raise ConfigError(
                f"req_id {self.req_id!r} embeds UCA {parsed.uca_id!r} "
                f"but uca_id field says {self.uca_id!r}"
            )

    @property
    def phase(self) -> Phase:
        return parse_req_id(self.req_id).phase


SAMPLING_MODES = ("uniform-pct", "triangular", "combined")


@dataclass(frozen=True)
class AnalysisConfig:
    """Tunable parameters of the scoring and simulation pipeline.

    ``weights`` are (w_type, w_likelihood, w_time, w_cost). The defaults
    sum to 1.0; other weight vectors are accepted with a warning.
    The default seed is fixed at 42 so casual runs are reproducible.
    """

    weights: tuple[float, float, float, float] = (0.4, 0.3, 0.15, 0.15)
    iterations: int = 1000
    perturbation: float = 0.10
    seed: int = 42
    sampling_mode: str = "uniform-pct"
    ci_z: float = 1.96
    workers: int = 1
    prefilter_bands: bool = True

    def __post_init__(self) -> None:
        if any(w < 0 for w in self.weights):
            raise ConfigError(f"weights must be non-negative, got {self.weights}")
        total = sum(self.weights)
        if abs(total - 1.0) > WEIGHT_SUM_TOLERANCE:
            warnings.warn(
                f"factor weights sum to {total}, not 1.0; scores are not normalised",
                stacklevel=2,
            )
        if self.iterations < 1:
            raise ConfigError("iterations must be >= 1")
        if not 0 <= self.perturbation < 1:
            raise InvalidPerturbation(
                f"perturbation must satisfy 0 <= p < 1, got {self.perturbation}"
            )
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.sampling_mode not in SAMPLING_MODES:
            raise ConfigError(
                f"sampling_mode must be one of {SAMPLING_MODES}, got {self.sampling_mode!r}"
            )
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")


_REQ_ID_RE = re.compile(
    r"^UCA\((?P<phase>Ph0\.1|Ph0\.2|Ph1|Ph2|Ph3)\)-(?P<number>\d+(?:\.\d+)*)"
    r"-RQ(?P<dot>\.?)(?P<req>\d+)$"
)
_UCA_ID_RE = re.compile(
    r"^UCA\((?P<phase>Ph0\.1|Ph0\.2|Ph1|Ph2|Ph3)\)-(?P<number>\d+(?:\.\d+)*)$"
)


@dataclass(frozen=True)
class ParsedReqId:
    """Components of a requirement ID.

    ``dotted`` records whether the requirement number used the "RQ.5"
    spelling rather than "RQ5"; both occur in real datasets and
    serialisation must round-trip byte-for-byte.
    """

    phase: Phase
    uca_id: str
    req_number: int
    dotted: bool = False

    def serialise(self) -> str:
        sep = "." if self.dotted else ""
        return f"{self.uca_id}-RQ{sep}{self.req_number}"

    def __iter__(self):
        return iter((self.phase, self.uca_id, self.req_number))


def parse_req_id(raw: str) -> ParsedReqId:
    """Split a requirement ID into (phase, uca_id, req_number).

    The grammar is ``UCA(<phase>)-<dotted-number>-RQ<k>``, accepting both
    the dotted ("RQ.5") and undotted ("RQ1") requirement-number forms.
    Raises MalformedId when the grammar does not match.
    """
    if not raw:
        raise MalformedId("requirement ID is empty")
    m = _REQ_ID_RE.match(raw)
    if m is None:
        raise MalformedId(f"requirement ID {raw!r} does not match UCA(<phase>)-<n.n.n>-RQ<k>")
    phase = Phase.parse(m.group("phase"))
    uca_id = f"UCA({m.group('phase')})-{m.group('number')}"
    return ParsedReqId(phase, uca_id, int(m.group("req")), dotted=m.group("dot") == ".")


def parse_uca_id(raw: str) -> tuple[Phase, str]:
    """Validate a UCA ID of the form ``UCA(<phase>)-<dotted-number>``."""
    if not raw:
        raise MalformedId("UCA ID is empty")
    m = _UCA_ID_RE.match(raw)
    if m is None:
        raise MalformedId(f"UCA ID {raw!r} does not match UCA(<phase>)-<n.n.n>")
    return Phase.parse(m.group("phase")), m.group("number")

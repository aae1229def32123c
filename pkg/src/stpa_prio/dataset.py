"""Dataset ingestion, validation, and persistence.

Two on-disk layouts carry the same information:

* delimited-table: a directory with ``ucas.csv`` and ``requirements.csv``
  (plus an optional ``config.json`` with analysis overrides);
* structured-records: a single JSON file with ``ucas``, ``requirements``
  and optional ``config`` keys.

Intensity cells hold the human-readable labels ("Minor effort",
"Low (below 30%)", "Type A", 0/1) so published assessment tables
transcribe verbatim. Parsing matches on the leading keyword, so
"Low (below 30%)", "Low(below 30%)" and plain "Low" are equivalent.
All core-model invariants are enforced at load time and diagnostics
carry file and line numbers.
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    ConfigError,
    InvalidIntensityToken,
    MalformedId,
    ParseError,
    UnknownPhase,
    UnresolvedUCA,
)
from .model import (
    FactorAssessment,
    MitigationType,
    Phase,
    RequirementRecord,
    UCARecord,
    parse_req_id,
    parse_uca_id,
)

UCA_COLUMNS = ("uca_id", "description", "phase", "pms", "cif", "sif", "ej")
REQ_COLUMNS = ("req_id", "description", "causal_factors", "time", "cost", "type", "covered")
BOUND_COLUMNS = (
    "time_a", "time_b", "cost_a", "cost_b",
    "type_a", "type_b", "covered_a", "covered_b",
)

CONFIG_KEYS = (
    "weights", "iterations", "perturbation", "seed",
    "sampling_mode", "ci_z", "workers", "prefilter_bands",
)

_TIME_RE = re.compile(r"^(minor|moderate|significant)\b", re.IGNORECASE)
_COST_RE = re.compile(r"^(low|medium|high)\b", re.IGNORECASE)
_TYPE_RE = re.compile(r"^(?:type\s*)?([a-e])$", re.IGNORECASE)

_TIME_ORDINALS = {"minor": 1, "moderate": 2, "significant": 3}
_COST_ORDINALS = {"low": 1, "medium": 2, "high": 3}

TIME_LABELS = {1: "Minor effort", 2: "Moderate effort", 3: "Significant effort"}
COST_LABELS = {1: "Low (below 30%)", 2: "Medium (30-60%)", 3: "High (above 60%)"}


@dataclass(frozen=True)
class DatasetFile:
    """A validated in-memory dataset."""

    ucas: tuple[UCARecord, ...]
    requirements: tuple[RequirementRecord, ...]
    config_overrides: dict = field(default_factory=dict)
    format: str = "delimited-table"

    def uca_index(self) -> dict[str, UCARecord]:
        return {u.uca_id: u for u in self.ucas}


def load_dataset(path: str | Path) -> DatasetFile:
    """Load and validate a dataset from a directory or a JSON file."""
    path = Path(path)
    if path.is_dir():
        return _load_delimited(path)
    if path.suffix.lower() == ".json":
        return _load_structured(path)
    raise ParseError(
        "expected a dataset directory (ucas.csv + requirements.csv) or a .json file",
        source=str(path),
    )


def save_dataset(dataset: DatasetFile, path: str | Path, fmt: str | None = None) -> list[Path]:
    """Persist a dataset; returns the written paths.

    ``fmt`` defaults to the dataset's own format. Reloading the written
    files reproduces the records exactly.
    """
    path = Path(path)
    fmt = fmt or dataset.format
    if fmt == "structured-records":
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(
            json.dumps(_dataset_to_json(dataset), indent=2, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )
        return [path]
    if fmt != "delimited-table":
        raise ConfigError(f"unknown dataset format {fmt!r}")
    path.mkdir(parents=True, exist_ok=True)
    uca_path = path / "ucas.csv"
    req_path = path / "requirements.csv"
    _write_uca_csv(dataset, uca_path)
    _write_req_csv(dataset, req_path)
    written = [uca_path, req_path]
    if dataset.config_overrides:
        cfg_path = path / "config.json"
        cfg_path.write_text(
            json.dumps(dataset.config_overrides, indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
        written.append(cfg_path)
    return written


# ---------------------------------------------------------------------------
# delimited-table format
# ---------------------------------------------------------------------------


def _load_delimited(root: Path) -> DatasetFile:
    uca_path = root / "ucas.csv"
    req_path = root / "requirements.csv"
    for required in (uca_path, req_path):
        if not required.is_file():
            raise ParseError("missing dataset file", source=str(required))

    ucas = []
    seen_ids: set[str] = set()
    with open(uca_path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        _check_columns(reader.fieldnames, UCA_COLUMNS, uca_path)
        for row in reader:
            ucas.append(_parse_uca_row(row, str(uca_path), reader.line_num, seen_ids))

    requirements = []
    seen_req_ids: set[str] = set()
    with open(req_path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        _check_columns(reader.fieldnames, REQ_COLUMNS, req_path, optional=BOUND_COLUMNS)
        for row in reader:
            requirements.append(
                _parse_req_row(row, str(req_path), reader.line_num, seen_ids, seen_req_ids)
            )

    overrides = {}
    cfg_path = root / "config.json"
    if cfg_path.is_file():
        overrides = _parse_config(json.loads(cfg_path.read_text(encoding="utf-8")), str(cfg_path))

    return DatasetFile(tuple(ucas), tuple(requirements), overrides, "delimited-table")


def _check_columns(fieldnames, expected, path: Path, optional: tuple = ()) -> None:
    if fieldnames is None:
        raise ParseError("file is empty", source=str(path))
    missing = [c for c in expected if c not in fieldnames]
    if missing:
        raise ParseError(f"missing columns {missing}", source=str(path), line=1)
    unknown = [c for c in fieldnames if c not in expected and c not in optional]
    if unknown:
        raise ParseError(f"unknown columns {unknown}", source=str(path), line=1)


def _parse_uca_row(row: dict, source: str, line: int, seen: set[str]) -> UCARecord:
    uca_id = (row.get("uca_id") or "").strip()
    try:
        embedded_phase, _ = parse_uca_id(uca_id)
    except MalformedId as exc:
        raise ParseError(str(exc), source=source, line=line) from exc
    if uca_id in seen:
        raise ParseError(f"duplicate uca_id {uca_id!r}", source=source, line=line)
    seen.add(uca_id)

    phase_token = (row.get("phase") or "").strip()
    try:
        phase = Phase.parse(phase_token)
    except MalformedId as exc:
        raise UnknownPhase(
            f"phase {phase_token!r} is not one of "
            f"{[p.value for p in Phase]}", source=source, line=line
        ) from exc
    if phase is not embedded_phase:
        raise ParseError(
            f"phase column {phase.value} disagrees with the phase embedded in {uca_id!r}",
            source=source, line=line,
        )

    pms = _opt_float(row.get("pms"), "pms", source, line)
    cif = _opt_float(row.get("cif"), "cif", source, line)
    sif = _opt_float(row.get("sif"), "sif", source, line)
    ej = _opt_float(row.get("ej"), "ej", source, line)
    if ej is None:
        raise ParseError("ej is required", source=source, line=line)
    try:
        return UCARecord.from_factors(
            uca_id=uca_id,
            phase=phase,
            description=(row.get("description") or "").strip(),
            ej=ej,
            pms=pms,
            cif=cif,
            sif=sif,
        )
    except ConfigError as exc:
        raise ParseError(str(exc), source=source, line=line) from exc


def _parse_req_row(
    row: dict, source: str, line: int, uca_ids: set[str], seen: set[str]
) -> RequirementRecord:
    req_id = (row.get("req_id") or "").strip()
    try:
        parsed = parse_req_id(req_id)
    except MalformedId as exc:
        raise ParseError(str(exc), source=source, line=line) from exc
    if req_id in seen:
        raise ParseError(f"duplicate req_id {req_id!r}", source=source, line=line)
    seen.add(req_id)
    if parsed.uca_id not in uca_ids:
        raise UnresolvedUCA(
            f"requirement {req_id!r} references unknown UCA {parsed.uca_id!r}",
            source=source, line=line,
        )
    explicit_uca = (row.get("uca_id") or "").strip()
    if explicit_uca and explicit_uca != parsed.uca_id:
        raise ParseError(
            f"explicit uca_id {explicit_uca!r} disagrees with the ID embedded in {req_id!r}",
            source=source, line=line,
        )

    assessment = _parse_assessment(row, source, line)
    factors = tuple(
        part.strip() for part in (row.get("causal_factors") or "").split(";") if part.strip()
    )
    return RequirementRecord(
        req_id=req_id,
        uca_id=parsed.uca_id,
        description=(row.get("description") or "").strip(),
        causal_factors=factors,
        assessment=assessment,
    )


def _parse_assessment(row: dict, source: str, line: int) -> FactorAssessment:
    time = parse_time_token(row.get("time"), source, line)
    cost = parse_cost_token(row.get("cost"), source, line)
    mtype = parse_type_token(row.get("type"), source, line)
    covered = parse_covered_token(row.get("covered"), source, line)
    try:
        return FactorAssessment(
            time=time,
            cost=cost,
            mitigation_type=mtype,
            covered_gap=covered,
            time_bounds=_parse_bounds(row, "time", parse_time_token, source, line),
            cost_bounds=_parse_bounds(row, "cost", parse_cost_token, source, line),
            type_bounds=_parse_bounds(row, "type", _type_ordinal_token, source, line),
            covered_bounds=_parse_bounds(row, "covered", parse_covered_token, source, line),
        )
    except ConfigError as exc:
        raise ParseError(str(exc), source=source, line=line) from exc


def _parse_bounds(row: dict, factor: str, parser, source: str, line: int):
    raw_a = (row.get(f"{factor}_a") or "").strip()
    raw_b = (row.get(f"{factor}_b") or "").strip()
    if not raw_a and not raw_b:
        return None
    if not raw_a or not raw_b:
        raise ParseError(
            f"{factor} bounds need both {factor}_a and {factor}_b", source=source, line=line
        )
    return (float(parser(raw_a, source, line)), float(parser(raw_b, source, line)))


def parse_time_token(token, source: str = "<input>", line: int | None = None) -> int:
    return _parse_ordinal(token, "time", _TIME_RE, _TIME_ORDINALS, (1, 3), source, line)


def parse_cost_token(token, source: str = "<input>", line: int | None = None) -> int:
    return _parse_ordinal(token, "cost", _COST_RE, _COST_ORDINALS, (1, 3), source, line)


def parse_type_token(token, source: str = "<input>", line: int | None = None) -> MitigationType:
    raw = (token or "").strip()
    m = _TYPE_RE.match(raw)
    if m:
        return MitigationType["ABCDE"[ord(m.group(1).upper()) - ord("A")].upper()]
    if raw.isdigit() and 1 <= int(raw) <= 5:
        return MitigationType(int(raw))
    raise InvalidIntensityToken(
        f"type token {raw!r} is not Type A..Type E", source=source, line=line
    )


def parse_covered_token(token, source: str = "<input>", line: int | None = None) -> int:
    raw = (token or "").strip()
    if raw in ("0", "1"):
        return int(raw)
    raise InvalidIntensityToken(
        f"covered token {raw!r} must be 0 or 1", source=source, line=line
    )


def _type_ordinal_token(token, source: str, line: int | None) -> int:
    return parse_type_token(token, source, line).value


def _parse_ordinal(token, factor, regex, mapping, rng, source, line) -> int:
    raw = (token or "").strip()
    m = regex.match(raw)
    if m:
        return mapping[m.group(1).lower()]
    if raw.isdigit() and rng[0] <= int(raw) <= rng[1]:
        return int(raw)
    raise InvalidIntensityToken(
        f"{factor} token {raw!r} is not a recognised intensity", source=source, line=line
    )


def _opt_float(token, name: str, source: str, line: int) -> float | None:
    raw = (token or "").strip()
    if not raw:
        return None
    try:
        return float(raw)
    except ValueError as exc:
        raise ParseError(f"{name} value {raw!r} is not a number", source=source, line=line) from exc


# ---------------------------------------------------------------------------
# structured-records format
# ---------------------------------------------------------------------------


def _load_structured(path: Path) -> DatasetFile:
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}", source=str(path), line=exc.lineno) from exc
    if not isinstance(payload, dict):
        raise ParseError("top level must be an object", source=str(path))

    ucas = []
    seen: set[str] = set()
    for i, entry in enumerate(payload.get("ucas", []), start=1):
        row = {k: _stringify(entry.get(k)) for k in UCA_COLUMNS}
        ucas.append(_parse_uca_row(row, str(path), i, seen))

    requirements = []
    seen_req: set[str] = set()
    for i, entry in enumerate(payload.get("requirements", []), start=1):
        row = {k: _stringify(entry.get(k)) for k in REQ_COLUMNS + BOUND_COLUMNS + ("uca_id",)}
        factors = entry.get("causal_factors")
        if isinstance(factors, list):
            row["causal_factors"] = ";".join(factors)
        bounds = entry.get("bounds") or {}
        for factor in ("time", "cost", "type", "covered"):
            pair = bounds.get(factor)
            if pair is not None:
                row[f"{factor}_a"], row[f"{factor}_b"] = _stringify(pair[0]), _stringify(pair[1])
        requirements.append(_parse_req_row(row, str(path), i, seen, seen_req))

    overrides = _parse_config(payload.get("config", {}), str(path))
    return DatasetFile(tuple(ucas), tuple(requirements), overrides, "structured-records")


def _stringify(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float) and value.is_integer():
        return str(int(value))
    return str(value)


def _parse_config(raw: dict, source: str) -> dict:
    if not isinstance(raw, dict):
        raise ParseError("config overrides must be an object", source=source)
    unknown = [k for k in raw if k not in CONFIG_KEYS]
    if unknown:
        raise ParseError(f"unknown config keys {unknown}", source=source)
    overrides = dict(raw)
    if "weights" in overrides:
        overrides["weights"] = tuple(float(w) for w in overrides["weights"])
    return overrides


# ---------------------------------------------------------------------------
# serialisation
# ---------------------------------------------------------------------------


def _write_uca_csv(dataset: DatasetFile, path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(UCA_COLUMNS)
        for uca in dataset.ucas:
            writer.writerow([
                uca.uca_id,
                uca.description,
                uca.phase.value,
                _num(uca.pms),
                _num(uca.cif),
                _num(uca.sif),
                _num(uca.ej),
            ])


def _write_req_csv(dataset: DatasetFile, path: Path) -> None:
    has_bounds = any(
        getattr(r.assessment, f"{factor}_bounds") is not None
        for r in dataset.requirements
        for factor in ("time", "cost", "type", "covered")
    )
    columns = REQ_COLUMNS + (BOUND_COLUMNS if has_bounds else ())
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for req in dataset.requirements:
            a = req.assessment
            row = [
                req.req_id,
                req.description,
                ";".join(req.causal_factors),
                TIME_LABELS[a.time],
                COST_LABELS[a.cost],
                f"Type {a.mitigation_type.name}",
                str(a.covered_gap),
            ]
            if has_bounds:
                for bounds in (a.time_bounds, a.cost_bounds, a.type_bounds, a.covered_bounds):
                    row.extend(["", ""] if bounds is None else [_num(bounds[0]), _num(bounds[1])])
            writer.writerow(row)


def _dataset_to_json(dataset: DatasetFile) -> dict:
    ucas = []
    for u in dataset.ucas:
        entry = {"uca_id": u.uca_id, "description": u.description, "phase": u.phase.value}
        if u.pms is not None:
            entry["pms"] = u.pms
        if u.cif is not None:
            entry["cif"] = u.cif
        entry["sif"] = u.sif
        entry["ej"] = u.ej
        ucas.append(entry)

    requirements = []
    for r in dataset.requirements:
        a = r.assessment
        entry = {
            "req_id": r.req_id,
            "description": r.description,
            "causal_factors": list(r.causal_factors),
            "time": TIME_LABELS[a.time],
            "cost": COST_LABELS[a.cost],
            "type": f"Type {a.mitigation_type.name}",
            "covered": str(a.covered_gap),
        }
        bounds = {
            factor: list(pair)
            for factor, pair in (
                ("time", a.time_bounds),
                ("cost", a.cost_bounds),
                ("type", a.type_bounds),
                ("covered", a.covered_bounds),
            )
            if pair is not None
        }
        if bounds:
            entry["bounds"] = bounds
        requirements.append(entry)

    payload: dict = {"ucas": ucas, "requirements": requirements}
    if dataset.config_overrides:
        payload["config"] = {
            k: list(v) if isinstance(v, tuple) else v
            for k, v in dataset.config_overrides.items()
        }
    return payload


def _num(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float) and value.is_integer():
        return str(int(value))
    return repr(value) if isinstance(value, float) else str(value)

"""Situation tables: historical decisions at one decision point, plus the
numeric encoding used by the learners and the explainer.

Feature namespaces: ``case:<name>`` reads the trace-level attribute
``case:<name>``, ``ev:<name>`` reads the latest value of event attribute
``<name>`` among the events strictly before the decision, and
``perf:elapsed_time`` / ``perf:time_since_last_event`` are derived from
timestamps at decision time (seconds). A feature without a value is simply
absent from the mapping.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from datetime import datetime
from functools import cached_property
from typing import Mapping

import numpy as np

from ._json import canonical_dump_bytes, loads
from .errors import InputError, UnknownDecisionPointError
from .log import (
    CASE_PREFIX,
    AttributeValue,
    EventLog,
    Trace,
    format_timestamp,
    kind_of,
    parse_timestamp,
)
from .petri import DecisionPoint, LabeledPetriNet, decision_points, replay

PERF_ELAPSED = "elapsed_time"
PERF_SINCE_LAST = "time_since_last_event"
PERFORMANCE_FEATURES = (PERF_ELAPSED, PERF_SINCE_LAST)

EV_PREFIX = "ev:"
PERF_PREFIX = "perf:"

FeatureMapping = Mapping[str, AttributeValue]


@dataclass(frozen=True)
class FeatureSpec:
    """Which features to derive for each recorded decision."""

    case_features: tuple[str, ...] = ()
    event_features: tuple[str, ...] = ()
    performance_features: tuple[str, ...] = ()

    def __post_init__(self):
        for f in self.performance_features:
            if f not in PERFORMANCE_FEATURES:
                raise InputError(f"unknown performance feature {f!r}")
        object.__setattr__(self, "case_features", tuple(sorted(set(self.case_features))))
        object.__setattr__(self, "event_features", tuple(sorted(set(self.event_features))))
        object.__setattr__(self, "performance_features", tuple(sorted(set(self.performance_features))))

    def to_dict(self) -> dict:
        return {
            "case_features": list(self.case_features),
            "event_features": list(self.event_features),
            "performance_features": list(self.performance_features),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "FeatureSpec":
        return cls(
            tuple(doc.get("case_features", ())),
            tuple(doc.get("event_features", ())),
            tuple(doc.get("performance_features", ())),
        )


@dataclass(frozen=True)
class SituationRow:
    features: Mapping[str, AttributeValue]
    decision: str
    case_id: str
    event_index: int


@dataclass(frozen=True)
class SituationTable:
    decision_point: DecisionPoint
    feature_spec: FeatureSpec
    rows: tuple[SituationRow, ...]

    def __post_init__(self):
        for row in self.rows:
            if row.decision not in self.decision_point.alternatives:
                raise InputError(
                    f"row decision {row.decision!r} is not an alternative of {self.decision_point.place}"
                )

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def distinct_decisions(self) -> tuple[str, ...]:
        seen = {r.decision for r in self.rows}
        return tuple(t for t in self.decision_point.alternatives if t in seen)


def derive_features(
    trace: Trace,
    event_index: int,
    decision_transition_is_event: bool,
    spec: FeatureSpec,
) -> dict[str, AttributeValue]:
    """Feature mapping for a decision recorded before the firing of event
    ``event_index``. ``decision_transition_is_event`` is true when the chosen
    transition itself produced that event (decision time = its timestamp)."""
    fmap: dict[str, AttributeValue] = {}
    events = trace.events
    history = events[:event_index]

    if events:
        first = events[0]
        for f in spec.case_features:
            key = CASE_PREFIX + f
            if key in first.attrs:
                fmap[key] = first.attrs[key]

    for f in spec.event_features:
        for ev in reversed(history):
            if f in ev.attrs:
                fmap[EV_PREFIX + f] = ev.attrs[f]
                break

    if spec.performance_features and events:
        if decision_transition_is_event and event_index < len(events):
            decision_time = events[event_index].time
        elif event_index > 0:
            decision_time = events[event_index - 1].time
        else:
            decision_time = events[0].time
        if PERF_ELAPSED in spec.performance_features:
            fmap[PERF_PREFIX + PERF_ELAPSED] = (decision_time - events[0].time).total_seconds()
        if PERF_SINCE_LAST in spec.performance_features:
            prev = history[-1].time if history else decision_time
            fmap[PERF_PREFIX + PERF_SINCE_LAST] = (decision_time - prev).total_seconds()
    return fmap


def extract_situation_table(
    log: EventLog,
    net: LabeledPetriNet,
    decision_point: DecisionPoint,
    spec: FeatureSpec,
) -> SituationTable:
    """One row per fitting visit of the decision point across all traces."""
    if decision_point not in decision_points(net):
        raise UnknownDecisionPointError(f"{decision_point.place!r} is not a decision point of the net")
    rows: list[SituationRow] = []
    for trace in log.traces:
        result = replay(net, trace)
        for visit in result.visits:
            if visit.place != decision_point.place:
                continue
            is_event = (
                visit.event_index < len(trace.events)
                and net.label(visit.transition) == trace.events[visit.event_index].activity
            )
            fmap = derive_features(trace, visit.event_index, is_event, spec)
            rows.append(SituationRow(fmap, visit.transition, trace.case_id, visit.event_index))
    rows.sort(key=lambda r: (r.case_id, r.event_index, r.decision))
    return SituationTable(decision_point, spec, tuple(rows))


# ---------------------------------------------------------------------------
# encoding

MISSING_CATEGORY = "__missing__"
OTHER_CATEGORY = "OTHER"


def _category_string(value: AttributeValue) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, datetime):
        return format_timestamp(value)
    return str(value)


@dataclass(frozen=True)
class EncodedColumn:
    name: str
    source: str
    kind: str  # numeric | onehot | missing
    category: str | None = None
    mean: float = 0.0
    std: float = 1.0


@dataclass(frozen=True)
class FeatureEncoder:
    """Fixed column layout mapping feature mappings to numeric vectors."""

    columns: tuple[EncodedColumn, ...]

    def __len__(self) -> int:
        return len(self.columns)

    @property
    def column_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns)

    @property
    def sources(self) -> tuple[str, ...]:
        seen: list[str] = []
        for c in self.columns:
            if c.source not in seen:
                seen.append(c.source)
        return tuple(seen)

    @cached_property
    def _known_categories(self) -> dict[str, set[str]]:
        known: dict[str, set[str]] = {}
        for c in self.columns:
            if c.kind == "onehot" and c.category != OTHER_CATEGORY:
                known.setdefault(c.source, set()).add(c.category)  # type: ignore[arg-type]
        return known

    def transform(self, fmap: FeatureMapping) -> np.ndarray:
        out = np.zeros(len(self.columns))
        for i, col in enumerate(self.columns):
            value = fmap.get(col.source)
            if col.kind == "numeric":
                if isinstance(value, (int, float)) and not isinstance(value, bool):
                    out[i] = (float(value) - col.mean) / col.std
                # missing numerics impute the mean, i.e. standardized 0
            elif col.kind == "missing":
                numeric = isinstance(value, (int, float)) and not isinstance(value, bool)
                out[i] = 0.0 if numeric else 1.0
            else:
                cat = _category_string(value) if value is not None else MISSING_CATEGORY
                if col.category == OTHER_CATEGORY:
                    out[i] = 1.0 if cat not in self._known_categories.get(col.source, set()) else 0.0
                else:
                    out[i] = 1.0 if cat == col.category else 0.0
        return out

    def transform_rows(self, fmaps: list[FeatureMapping]) -> np.ndarray:
        if not fmaps:
            return np.zeros((0, len(self.columns)))
        return np.stack([self.transform(f) for f in fmaps])

    def to_dict(self) -> dict:
        return {
            "columns": [
                {
                    "name": c.name,
                    "source": c.source,
                    "kind": c.kind,
                    "category": c.category,
                    "mean": c.mean,
                    "std": c.std,
                }
                for c in self.columns
            ]
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "FeatureEncoder":
        return cls(tuple(EncodedColumn(**c) for c in doc["columns"]))

    def dump_json(self) -> bytes:
        return canonical_dump_bytes(self.to_dict())

    @classmethod
    def load_json(cls, data: bytes | str) -> "FeatureEncoder":
        return cls.from_dict(loads(data))


def fit_encoder(table: SituationTable) -> FeatureEncoder:
    """One-hot categoricals (plus OTHER), standardized numerics (plus a
    missing-indicator column); timestamp-only features are skipped."""
    if not table.rows:
        raise InputError("cannot fit an encoder on an empty situation table")
    names = sorted({name for row in table.rows for name in row.features})
    columns: list[EncodedColumn] = []
    for name in names:
        values = [row.features[name] for row in table.rows if name in row.features]
        if all(isinstance(v, datetime) for v in values):
            continue
        numeric = [
            float(v) for v in values if isinstance(v, (int, float)) and not isinstance(v, bool)
        ]
        if len(numeric) == len(values):
            mean = float(np.mean(numeric))
            std = float(np.std(numeric))
            if std == 0.0:
                std = 1.0
            columns.append(EncodedColumn(name, name, "numeric", None, mean, std))
            columns.append(EncodedColumn(f"{name}|missing", name, "missing"))
        else:
            cats = {_category_string(v) for v in values}
            if any(name not in row.features for row in table.rows):
                cats.add(MISSING_CATEGORY)
            for cat in sorted(cats):
                columns.append(EncodedColumn(f"{name}={cat}", name, "onehot", cat))
            columns.append(EncodedColumn(f"{name}={OTHER_CATEGORY}", name, "onehot", OTHER_CATEGORY))
    return FeatureEncoder(tuple(columns))


def encode_table(encoder: FeatureEncoder, table: SituationTable) -> tuple[np.ndarray, np.ndarray]:
    """Encode all rows; returns (X, y) with y as indices into the decision
    point's id-ordered alternatives."""
    X = encoder.transform_rows([row.features for row in table.rows])
    alt_index = {t: i for i, t in enumerate(table.decision_point.alternatives)}
    y = np.array([alt_index[row.decision] for row in table.rows], dtype=np.int64)
    return X, y


# ---------------------------------------------------------------------------
# serialization


def _feature_to_json(value: AttributeValue) -> dict:
    kind = kind_of(value)
    return {"kind": kind, "value": format_timestamp(value) if kind == "timestamp" else value}


def _feature_from_json(doc: dict) -> AttributeValue:
    if doc["kind"] == "timestamp":
        return parse_timestamp(doc["value"])
    if doc["kind"] == "real":
        return float(doc["value"])
    return doc["value"]


def table_to_dict(table: SituationTable) -> dict:
    return {
        "decision_point": {
            "place": table.decision_point.place,
            "alternatives": list(table.decision_point.alternatives),
        },
        "feature_spec": table.feature_spec.to_dict(),
        "rows": [
            {
                "case_id": r.case_id,
                "event_index": r.event_index,
                "decision": r.decision,
                "features": {k: _feature_to_json(v) for k, v in sorted(r.features.items())},
            }
            for r in table.rows
        ],
    }


def table_from_dict(doc: dict) -> SituationTable:
    dp = DecisionPoint(doc["decision_point"]["place"], tuple(doc["decision_point"]["alternatives"]))
    spec = FeatureSpec.from_dict(doc["feature_spec"])
    rows = tuple(
        SituationRow(
            {k: _feature_from_json(v) for k, v in r["features"].items()},
            r["decision"],
            r["case_id"],
            r["event_index"],
        )
        for r in doc["rows"]
    )
    return SituationTable(dp, spec, rows)


def dump_table_json(table: SituationTable) -> bytes:
    return canonical_dump_bytes(table_to_dict(table))


def load_table_json(data: bytes | str) -> SituationTable:
    return table_from_dict(loads(data))


def dump_table_csv(table: SituationTable) -> bytes:
    """Features + decision as CSV; missing values are empty cells."""
    names = sorted({name for row in table.rows for name in row.features})
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["case_id", "event_index", *names, "decision"])
    for r in table.rows:
        cells = [r.case_id, str(r.event_index)]
        for name in names:
            value = r.features.get(name)
            if value is None:
                cells.append("")
            elif isinstance(value, datetime):
                cells.append(format_timestamp(value))
            elif isinstance(value, bool):
                cells.append("true" if value else "false")
            else:
                cells.append(str(value))
        cells.append(r.decision)
        writer.writerow(cells)
    return buf.getvalue().encode("utf-8")


def _csv_cell_value(raw: str) -> AttributeValue:
    lowered = raw.strip().lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        value = float(raw)
        if math.isfinite(value):
            return value
    except ValueError:
        pass
    try:
        return parse_timestamp(raw)
    except InputError:
        pass
    return raw


def load_table_csv(data: bytes | str, decision_point: DecisionPoint,
                   feature_spec: FeatureSpec) -> SituationTable:
    """Rebuild a table from its CSV form; value kinds are re-inferred per
    cell (ints, reals, booleans, ISO timestamps, else text)."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    rows_raw = list(csv.reader(io.StringIO(data)))
    if not rows_raw:
        raise InputError("empty situation-table CSV")
    header = rows_raw[0]
    if header[:2] != ["case_id", "event_index"] or header[-1] != "decision":
        raise InputError("unexpected situation-table CSV header")
    names = header[2:-1]
    rows = []
    for cells in rows_raw[1:]:
        if not cells:
            continue
        features = {
            name: _csv_cell_value(raw)
            for name, raw in zip(names, cells[2:-1])
            if raw != ""
        }
        rows.append(SituationRow(features, cells[-1], cells[0], int(cells[1])))
    return SituationTable(decision_point, feature_spec, tuple(rows))

"""Event-log model plus XES/CSV parsing and canonical serialization.

Every event carries one flat attribute map. Reserved keys: ``case`` (case id),
``act`` (activity), ``time`` (UTC timestamp, millisecond precision) and the
optional ``res`` (resource). Trace-level attributes are flattened onto each
event of the trace under a ``case:`` prefix, so one value assignment per event
describes the full situation of that event.

Value kinds are ``text``, ``int``, ``real``, ``bool`` and ``timestamp``. The
canonical JSON layout is::

    {"schema": {name: kind, ...},
     "traces": [{"case_id": str,
                 "events": [{"id": str, "attrs": {name: value, ...}}, ...]}]}

Timestamps are written as ISO-8601 with millisecond precision and a ``Z``
suffix; all other values use their native JSON type.
"""

from __future__ import annotations

import csv
import io
import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Iterable, Mapping, Union

from .errors import ConfigError, LogParseError
from ._json import canonical_dump_bytes, loads

AttributeValue = Union[str, int, float, bool, datetime]

KINDS = ("text", "int", "real", "bool", "timestamp")

RESERVED_CASE = "case"
RESERVED_ACT = "act"
RESERVED_TIME = "time"
RESERVED_RES = "res"
CASE_PREFIX = "case:"


def kind_of(value: AttributeValue) -> str:
    if isinstance(value, bool):
        return "bool"
    if isinstance(value, int):
        return "int"
    if isinstance(value, float):
        return "real"
    if isinstance(value, datetime):
        return "timestamp"
    if isinstance(value, str):
        return "text"
    raise TypeError(f"unsupported attribute value type: {type(value)!r}")


def _to_utc_ms(ts: datetime) -> datetime:
    """Normalize to UTC and truncate to millisecond precision."""
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    ts = ts.astimezone(timezone.utc)
    return ts.replace(microsecond=(ts.microsecond // 1000) * 1000)


def parse_timestamp(text: str) -> datetime:
    """Parse an ISO-8601 timestamp; trailing 'Z' means UTC."""
    raw = text.strip()
    if raw.endswith(("Z", "z")):
        raw = raw[:-1] + "+00:00"
    try:
        return _to_utc_ms(datetime.fromisoformat(raw))
    except ValueError as exc:
        raise LogParseError(f"bad timestamp {text!r}: {exc}") from None


def format_timestamp(ts: datetime) -> str:
    ts = _to_utc_ms(ts)
    return ts.strftime("%Y-%m-%dT%H:%M:%S.") + f"{ts.microsecond // 1000:03d}Z"


@dataclass(frozen=True)
class Event:
    """One recorded event; ``attrs`` must contain case, act and time."""

    id: str
    attrs: Mapping[str, AttributeValue]

    def __post_init__(self):
        for key in (RESERVED_CASE, RESERVED_ACT):
            if not isinstance(self.attrs.get(key), str) or not self.attrs[key]:
                raise ValueError(f"event {self.id}: attribute {key!r} must be non-empty text")
        if not isinstance(self.attrs.get(RESERVED_TIME), datetime):
            raise ValueError(f"event {self.id}: attribute 'time' must be a timestamp")
        for key, value in self.attrs.items():
            if isinstance(value, float) and not math.isfinite(value):
                raise ValueError(f"event {self.id}: attribute {key!r} is not finite")

    @property
    def case_id(self) -> str:
        return self.attrs[RESERVED_CASE]  # type: ignore[return-value]

    @property
    def activity(self) -> str:
        return self.attrs[RESERVED_ACT]  # type: ignore[return-value]

    @property
    def time(self) -> datetime:
        return self.attrs[RESERVED_TIME]  # type: ignore[return-value]


@dataclass(frozen=True)
class Trace:
    """Time-ordered events of one case (ties keep original file order)."""

    case_id: str
    events: tuple[Event, ...]

    def __post_init__(self):
        for ev in self.events:
            if ev.case_id != self.case_id:
                raise ValueError(f"trace {self.case_id}: event {ev.id} belongs to case {ev.case_id}")
        times = [ev.time for ev in self.events]
        if any(a > b for a, b in zip(times, times[1:])):
            raise ValueError(f"trace {self.case_id}: events not sorted by time")

    @property
    def activities(self) -> tuple[str, ...]:
        return tuple(ev.activity for ev in self.events)


@dataclass(frozen=True)
class EventLog:
    """An immutable event log: traces plus the inferred attribute schema."""

    traces: tuple[Trace, ...]
    schema: Mapping[str, str]
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        seen = set()
        for tr in self.traces:
            if tr.case_id in seen:
                raise ValueError(f"duplicate case id {tr.case_id!r}")
            seen.add(tr.case_id)
        for tr in self.traces:
            for ev in tr.events:
                for key in ev.attrs:
                    if key not in self.schema:
                        raise ValueError(f"schema misses attribute {key!r}")

    def __len__(self) -> int:
        return len(self.traces)

    @property
    def event_count(self) -> int:
        return sum(len(tr.events) for tr in self.traces)

    @property
    def activities(self) -> tuple[str, ...]:
        return tuple(sorted({ev.activity for tr in self.traces for ev in tr.events}))


# ---------------------------------------------------------------------------
# construction helpers


def _infer_schema(events: Iterable[Event]) -> dict[str, str]:
    schema: dict[str, str] = {}
    for ev in events:
        for key, value in ev.attrs.items():
            kind = kind_of(value)
            prev = schema.get(key)
            if prev is None or prev == kind:
                schema[key] = kind
            elif {prev, kind} == {"int", "real"}:
                schema[key] = "real"
            else:
                schema[key] = "text"
    return schema


def _coerce(value: AttributeValue, kind: str) -> AttributeValue:
    actual = kind_of(value)
    if actual == kind:
        return value
    if kind == "real" and actual == "int":
        return float(value)
    if kind == "text":
        if actual == "timestamp":
            return format_timestamp(value)  # type: ignore[arg-type]
        return str(value)
    return value


def build_log(groups: list[tuple[str, list[Event]]], warnings: list[str]) -> EventLog:
    """Assemble traces (stable-sorting events by time) and infer the schema."""
    all_events = [ev for _, evs in groups for ev in evs]
    schema = _infer_schema(all_events)
    traces = []
    for case_id, events in groups:
        fixed = [
            Event(ev.id, {k: _coerce(v, schema[k]) for k, v in ev.attrs.items()})
            for ev in sorted(events, key=lambda e: e.time)
        ]
        traces.append(Trace(case_id, tuple(fixed)))
    return EventLog(tuple(traces), schema, tuple(warnings))


# ---------------------------------------------------------------------------
# XES

_XES_KEY_MAP = {
    "concept:name": RESERVED_ACT,
    "time:timestamp": RESERVED_TIME,
    "org:resource": RESERVED_RES,
}


def _strip_ns(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _xes_value(elem: ET.Element) -> AttributeValue | None:
    kind = _strip_ns(elem.tag)
    raw = elem.get("value", "")
    if kind == "string":
        return raw
    if kind == "int":
        return int(raw)
    if kind == "float":
        return float(raw)
    if kind == "boolean":
        return raw.strip().lower() == "true"
    if kind == "date":
        return parse_timestamp(raw)
    return None  # containers/lists are out of scope


def parse_xes(data: bytes | str) -> EventLog:
    """Parse IEEE-1849 XES. Traces whose events lack an activity or timestamp
    are dropped with a warning; trace attributes land on events as ``case:*``."""
    if isinstance(data, str):
        data = data.encode("utf-8")
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        line, column = exc.position
        raise LogParseError(f"malformed XES: {exc.msg.split(':')[0]}", line, column) from None
    if _strip_ns(root.tag) != "log":
        raise LogParseError(f"not an XES document (root element {_strip_ns(root.tag)!r})")

    warnings: list[str] = []
    groups: list[tuple[str, list[Event]]] = []
    seen_cases: set[str] = set()
    event_seq = 0
    for t_idx, trace_elem in enumerate(e for e in root if _strip_ns(e.tag) == "trace"):
        trace_attrs: dict[str, AttributeValue] = {}
        case_id: str | None = None
        for child in trace_elem:
            if _strip_ns(child.tag) == "event":
                continue
            key = child.get("key", "")
            value = _xes_value(child)
            if value is None or not key:
                continue
            if key == "concept:name":
                case_id = str(value)
            else:
                trace_attrs[CASE_PREFIX + key] = value
        if case_id is None:
            case_id = f"case_{t_idx}"
            warnings.append(f"trace {t_idx}: missing concept:name, generated id {case_id!r}")
        if case_id in seen_cases:
            warnings.append(f"trace {t_idx}: duplicate case id {case_id!r}, trace dropped")
            continue

        events: list[Event] = []
        bad_reason = None
        for e_idx, ev_elem in enumerate(e for e in trace_elem if _strip_ns(e.tag) == "event"):
            attrs: dict[str, AttributeValue] = dict(trace_attrs)
            attrs[RESERVED_CASE] = case_id
            for child in ev_elem:
                key = child.get("key", "")
                value = _xes_value(child)
                if value is None or not key:
                    continue
                attrs[_XES_KEY_MAP.get(key, key)] = value
            if RESERVED_ACT not in attrs or RESERVED_TIME not in attrs:
                missing = "concept:name" if RESERVED_ACT not in attrs else "time:timestamp"
                bad_reason = f"event {e_idx} missing {missing}"
                break
            events.append(Event(f"e{event_seq}", attrs))
            event_seq += 1
        if bad_reason is not None:
            warnings.append(f"trace {case_id!r} dropped: {bad_reason}")
            continue
        seen_cases.add(case_id)
        groups.append((case_id, events))
    return build_log(groups, warnings)


_XES_TAGS = {"text": "string", "int": "int", "real": "float", "bool": "boolean", "timestamp": "date"}


def _xes_attr_elem(parent: ET.Element, key: str, value: AttributeValue) -> None:
    kind = kind_of(value)
    if kind == "timestamp":
        raw = format_timestamp(value)  # type: ignore[arg-type]
    elif kind == "bool":
        raw = "true" if value else "false"
    else:
        raw = str(value)
    ET.SubElement(parent, _XES_TAGS[kind], key=key, value=raw)


def export_xes(log: EventLog) -> bytes:
    """Serialize to XES; ``case:*`` attributes move back to trace level."""
    root = ET.Element("log", attrib={"xes.version": "1849-2016", "xes.features": ""})
    for trace in log.traces:
        trace_elem = ET.SubElement(root, "trace")
        _xes_attr_elem(trace_elem, "concept:name", trace.case_id)
        if trace.events:
            first = trace.events[0]
            for key in sorted(first.attrs):
                if key.startswith(CASE_PREFIX):
                    _xes_attr_elem(trace_elem, key[len(CASE_PREFIX):], first.attrs[key])
        for ev in trace.events:
            ev_elem = ET.SubElement(trace_elem, "event")
            _xes_attr_elem(ev_elem, "concept:name", ev.activity)
            _xes_attr_elem(ev_elem, "time:timestamp", ev.time)
            for key in sorted(ev.attrs):
                if key in (RESERVED_CASE, RESERVED_ACT, RESERVED_TIME) or key.startswith(CASE_PREFIX):
                    continue
                _xes_attr_elem(ev_elem, "org:resource" if key == RESERVED_RES else key, ev.attrs[key])
    ET.indent(root)
    return ET.tostring(root, encoding="utf-8", xml_declaration=True) + b"\n"


# ---------------------------------------------------------------------------
# CSV


@dataclass(frozen=True)
class CsvMapping:
    """Column mapping for CSV ingestion; ``time_format`` is a strptime pattern."""

    case_col: str
    act_col: str
    time_col: str
    time_format: str
    res_col: str | None = None


def _infer_csv_kind(values: list[str]) -> str:
    def is_int(s: str) -> bool:
        try:
            int(s)
            return True
        except ValueError:
            return False

    def is_real(s: str) -> bool:
        try:
            return math.isfinite(float(s))
        except ValueError:
            return False

    if all(is_int(v) for v in values):
        return "int"
    if all(is_real(v) for v in values):
        return "real"
    if all(v.strip().lower() in ("true", "false") for v in values):
        return "bool"
    return "text"


def parse_csv(data: bytes | str, mapping: CsvMapping) -> EventLog:
    """Parse a headered CSV; unmapped columns become typed event attributes."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    rows = list(csv.reader(io.StringIO(data)))
    if not rows:
        raise LogParseError("empty CSV input")
    header = rows[0]
    for col in (mapping.case_col, mapping.act_col, mapping.time_col) + (
        (mapping.res_col,) if mapping.res_col else ()
    ):
        if col not in header:
            raise ConfigError(f"mapped column {col!r} not in CSV header")
    idx = {name: header.index(name) for name in header}
    extra_cols = [
        c for c in header
        if c not in (mapping.case_col, mapping.act_col, mapping.time_col, mapping.res_col)
    ]

    kinds = {
        c: _infer_csv_kind([r[idx[c]] for r in rows[1:] if len(r) > idx[c] and r[idx[c]] != ""])
        for c in extra_cols
    }

    def convert(col: str, raw: str) -> AttributeValue:
        kind = kinds[col]
        if kind == "int":
            return int(raw)
        if kind == "real":
            return float(raw)
        if kind == "bool":
            return raw.strip().lower() == "true"
        return raw

    warnings: list[str] = []
    order: list[str] = []
    by_case: dict[str, list[Event]] = {}
    for r_idx, row in enumerate(rows[1:], start=2):
        if not row or all(not c for c in row):
            continue
        try:
            ts = datetime.strptime(row[idx[mapping.time_col]], mapping.time_format)
        except ValueError:
            warnings.append(f"row {r_idx}: unparseable timestamp {row[idx[mapping.time_col]]!r}, skipped")
            continue
        attrs: dict[str, AttributeValue] = {
            RESERVED_CASE: row[idx[mapping.case_col]],
            RESERVED_ACT: row[idx[mapping.act_col]],
            RESERVED_TIME: _to_utc_ms(ts),
        }
        if mapping.res_col and row[idx[mapping.res_col]]:
            attrs[RESERVED_RES] = row[idx[mapping.res_col]]
        for col in extra_cols:
            raw = row[idx[col]] if len(row) > idx[col] else ""
            if raw != "":
                attrs[col] = convert(col, raw)
        case_id = attrs[RESERVED_CASE]
        if case_id not in by_case:
            by_case[case_id] = []  # type: ignore[index]
            order.append(case_id)  # type: ignore[arg-type]
        by_case[case_id].append(Event(f"e{r_idx - 2}", attrs))  # type: ignore[index]
    return build_log([(c, by_case[c]) for c in order], warnings)


# ---------------------------------------------------------------------------
# canonical JSON


def _value_to_json(value: AttributeValue):
    if isinstance(value, datetime):
        return format_timestamp(value)
    return value


def _value_from_json(value, kind: str) -> AttributeValue:
    if kind == "timestamp":
        return parse_timestamp(value)
    if kind == "real":
        return float(value)
    return value


def to_json_dict(log: EventLog) -> dict:
    return {
        "schema": {k: log.schema[k] for k in sorted(log.schema)},
        "traces": [
            {
                "case_id": tr.case_id,
                "events": [
                    {"id": ev.id, "attrs": {k: _value_to_json(v) for k, v in sorted(ev.attrs.items())}}
                    for ev in tr.events
                ],
            }
            for tr in log.traces
        ],
    }


def from_json_dict(doc: dict) -> EventLog:
    schema = dict(doc["schema"])
    traces = []
    for tr in doc["traces"]:
        events = tuple(
            Event(ev["id"], {k: _value_from_json(v, schema[k]) for k, v in ev["attrs"].items()})
            for ev in tr["events"]
        )
        traces.append(Trace(tr["case_id"], events))
    return EventLog(tuple(traces), schema)


def dump_json(log: EventLog) -> bytes:
    return canonical_dump_bytes(to_json_dict(log))


def load_json(data: bytes | str) -> EventLog:
    return from_json_dict(loads(data))

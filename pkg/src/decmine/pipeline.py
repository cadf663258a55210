"""Shared offline/online plumbing used by both the CLI and the service:
feature-mapping construction from JSON payloads, and the mine step that turns
one decision point into table + encoder + reports + best model + background.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import InputError, UnknownDecisionPointError
from .explain import Background
from .learners import CVReport, TrainedDecisionModel, cross_validate, suggest_best, train
from .log import AttributeValue, Event, EventLog, Trace, parse_timestamp
from .petri import DecisionPoint, LabeledPetriNet, decision_points
from .situation import (
    FeatureEncoder,
    FeatureSpec,
    SituationTable,
    derive_features,
    encode_table,
    extract_situation_table,
    fit_encoder,
)


def find_decision_point(net: LabeledPetriNet, place: str) -> DecisionPoint:
    for dp in decision_points(net):
        if dp.place == place:
            return dp
    raise UnknownDecisionPointError(f"no decision point at place {place!r}")


def json_to_fmap(doc: Mapping[str, object]) -> dict[str, AttributeValue]:
    """Plain JSON values become feature values; no implicit coercion."""
    fmap: dict[str, AttributeValue] = {}
    for key, value in doc.items():
        if not isinstance(value, (str, int, float, bool)):
            raise InputError(f"feature {key!r} has unsupported value type {type(value).__name__}")
        fmap[key] = value
    return fmap


def events_to_trace(events: Sequence[Mapping[str, object]], case_id: str = "running") -> Trace:
    """Build the partial trace of a running instance from posted events."""
    if not events:
        raise InputError("at least one event is required")
    built = []
    for i, doc in enumerate(events):
        if "act" not in doc or "time" not in doc:
            raise InputError(f"event {i} must carry 'act' and 'time'")
        attrs: dict[str, AttributeValue] = {"case": case_id}
        for key, value in doc.items():
            if key == "time":
                attrs["time"] = parse_timestamp(str(value))
            elif isinstance(value, (str, int, float, bool)):
                attrs[key] = value
            else:
                raise InputError(f"event {i}: attribute {key!r} has unsupported type")
        built.append(Event(f"r{i}", attrs))
    built.sort(key=lambda e: e.time)
    return Trace(case_id, tuple(built))


def instance_fmap(spec: FeatureSpec, features: Mapping | None = None,
                  events: Sequence[Mapping] | None = None) -> dict[str, AttributeValue]:
    """Either a raw feature mapping or features derived from a partial trace
    with the same latest-value semantics as training."""
    if (features is None) == (events is None):
        raise InputError("provide exactly one of 'features' or 'events'")
    if features is not None:
        return json_to_fmap(features)
    trace = events_to_trace(events)
    return derive_features(trace, len(trace.events), False, spec)


@dataclass(frozen=True)
class MiningResult:
    decision_point: DecisionPoint
    table: SituationTable
    encoder: FeatureEncoder
    reports: Mapping[str, CVReport]
    suggested: str | None
    model: TrainedDecisionModel
    background: Background


def mine_decision_point(
    log: EventLog,
    net: LabeledPetriNet,
    place: str,
    spec: FeatureSpec,
    kinds: Sequence[str],
    grids: Mapping[str, Mapping] | None = None,
    seed: int = 0,
    folds: int = 5,
    background_size: int = 100,
    progress: Callable[[float], None] | None = None,
) -> MiningResult:
    """Cross-validate every requested kind, pick the best, and train the final
    model on the full table. Degenerate (single-decision) tables yield a
    constant model and suggested=None."""
    dp = find_decision_point(net, place)
    table = extract_situation_table(log, net, dp, spec)
    if not table.rows:
        raise InputError(f"no fitting visits recorded at decision point {place!r}")
    encoder = fit_encoder(table)

    reports: dict[str, CVReport] = {}
    for i, kind in enumerate(kinds):
        grid = None if grids is None else grids.get(kind)
        reports[kind] = cross_validate(kind, table, grid=grid, k=folds, seed=seed)
        if progress is not None:
            progress((i + 1) / (len(kinds) + 1))

    try:
        suggested = suggest_best(reports)
        params = reports[suggested].params
        model = train(suggested, table, encoder, params, seed)
    except InputError:
        suggested = None
        model = train(kinds[0], table, encoder, None, seed)

    X, _ = encode_table(encoder, table)
    background = Background.from_matrix(X, size=background_size, seed=seed)
    if progress is not None:
        progress(1.0)
    return MiningResult(dp, table, encoder, reports, suggested, model, background)

"""Labeled Petri nets: marking semantics, decision points, token replay, PNML/DOT.

Nets and markings are immutable values; replay of distinct traces can run
concurrently without shared state. Transition ids are zero-padded so that
lexicographic order equals creation order, which keeps decision-point
alternative order (and therefore class indices) stable across runs.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

from .errors import NetError, PnmlError
from .log import Trace

SILENT_BFS_DEPTH = 20


class Marking:
    """Immutable multiset of places."""

    __slots__ = ("_counts", "_key")

    def __init__(self, places: Iterable[str] | Mapping[str, int] = ()):
        counts: dict[str, int] = {}
        if isinstance(places, Mapping):
            items = places.items()
        else:
            items = ((p, 1) for p in places)
        for place, n in items:
            if n < 0:
                raise NetError(f"negative token count on {place!r}")
            if n:
                counts[place] = counts.get(place, 0) + n
        self._counts = counts
        self._key = tuple(sorted(counts.items()))

    def count(self, place: str) -> int:
        return self._counts.get(place, 0)

    def items(self) -> tuple[tuple[str, int], ...]:
        return self._key

    def __iter__(self):
        return iter(self._counts)

    def __len__(self) -> int:
        return sum(self._counts.values())

    def __bool__(self) -> bool:
        return bool(self._counts)

    def __eq__(self, other) -> bool:
        return isinstance(other, Marking) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        inner = ", ".join(p if n == 1 else f"{p}:{n}" for p, n in self._key)
        return f"[{inner}]"


@dataclass(frozen=True, order=True)
class DecisionPoint:
    """A place with more than one outgoing transition."""

    place: str
    alternatives: tuple[str, ...]  # id-ordered outgoing transitions


@dataclass(frozen=True)
class LabeledPetriNet:
    places: frozenset[str]
    transitions: frozenset[str]
    arcs: frozenset[tuple[str, str]]
    labels: Mapping[str, str]  # partial: unlabeled transitions are silent
    initial_marking: Marking
    final_marking: Marking

    def __post_init__(self):
        if self.places & self.transitions:
            raise NetError("places and transitions overlap")
        nodes = self.places | self.transitions
        for src, tgt in self.arcs:
            if src not in nodes or tgt not in nodes:
                raise NetError(f"arc ({src}, {tgt}) references unknown node")
            if (src in self.places) == (tgt in self.places):
                raise NetError(f"arc ({src}, {tgt}) must connect a place and a transition")
        for t, label in self.labels.items():
            if t not in self.transitions:
                raise NetError(f"label on unknown transition {t!r}")
            if not label:
                raise NetError(f"empty label on transition {t!r}")
        for marking in (self.initial_marking, self.final_marking):
            for place in marking:
                if place not in self.places:
                    raise NetError(f"marking references unknown place {place!r}")

    @cached_property
    def preset(self) -> dict[str, tuple[str, ...]]:
        pre: dict[str, list[str]] = {n: [] for n in self.places | self.transitions}
        for src, tgt in sorted(self.arcs):
            pre[tgt].append(src)
        return {n: tuple(sorted(v)) for n, v in pre.items()}

    @cached_property
    def postset(self) -> dict[str, tuple[str, ...]]:
        post: dict[str, list[str]] = {n: [] for n in self.places | self.transitions}
        for src, tgt in sorted(self.arcs):
            post[src].append(tgt)
        return {n: tuple(sorted(v)) for n, v in post.items()}

    @cached_property
    def silent_transitions(self) -> tuple[str, ...]:
        return tuple(sorted(t for t in self.transitions if t not in self.labels))

    def label(self, t: str) -> str | None:
        return self.labels.get(t)

    @cached_property
    def transitions_by_label(self) -> dict[str, tuple[str, ...]]:
        by: dict[str, list[str]] = {}
        for t in sorted(self.transitions):
            if t in self.labels:
                by.setdefault(self.labels[t], []).append(t)
        return {k: tuple(v) for k, v in by.items()}


def decision_points(net: LabeledPetriNet) -> tuple[DecisionPoint, ...]:
    """All places with at least two outgoing transitions, id-ordered."""
    out = []
    for place in sorted(net.places):
        post = net.postset[place]
        if len(post) >= 2:
            out.append(DecisionPoint(place, post))
    return tuple(out)


def enabled(net: LabeledPetriNet, marking: Marking) -> frozenset[str]:
    """Transitions whose every input place holds at least one token."""
    return frozenset(
        t for t in net.transitions
        if all(marking.count(p) >= 1 for p in net.preset[t])
    )


def fire(net: LabeledPetriNet, marking: Marking, t: str) -> Marking:
    """Fire ``t``: one token off each input place, one onto each output place."""
    if t not in net.transitions:
        raise NetError(f"unknown transition {t!r}")
    counts = dict(marking.items())
    for p in net.preset[t]:
        if counts.get(p, 0) < 1:
            raise NetError(f"transition {t!r} not enabled: place {p!r} has no token")
        counts[p] -= 1
    for p in net.postset[t]:
        counts[p] = counts.get(p, 0) + 1
    return Marking(counts)


# ---------------------------------------------------------------------------
# token replay


@dataclass(frozen=True)
class Visit:
    """One token leaving a decision point: which transition took it, and the
    index of the next labeled firing (= the event the decision led to)."""

    place: str
    transition: str
    event_index: int


@dataclass(frozen=True)
class ReplayResult:
    case_id: str
    firing_sequence: tuple[str, ...]
    visits: tuple[Visit, ...]
    fitness: float
    completed: bool  # reached the final marking (via silent moves) at the end
    replayed_events: int
    total_events: int

    @property
    def fits(self) -> bool:
        return self.fitness == 1.0 and self.completed


def _silent_path_to(net: LabeledPetriNet, marking: Marking, label: str) -> tuple[list[str], str] | None:
    """Shortest silent firing sequence after which some transition with
    ``label`` is enabled. BFS in transition-id order; depth cap applies."""
    candidates = net.transitions_by_label.get(label, ())
    if not candidates:
        return None
    seen = {marking}
    queue: deque[tuple[Marking, list[str]]] = deque([(marking, [])])
    while queue:
        current, path = queue.popleft()
        for t in candidates:
            if all(current.count(p) >= 1 for p in net.preset[t]):
                return path, t
        if len(path) >= SILENT_BFS_DEPTH:
            continue
        for t in net.silent_transitions:
            if all(current.count(p) >= 1 for p in net.preset[t]):
                nxt = fire(net, current, t)
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append((nxt, path + [t]))
    return None


def _silent_path_to_marking(net: LabeledPetriNet, marking: Marking, target: Marking) -> list[str] | None:
    if marking == target:
        return []
    seen = {marking}
    queue: deque[tuple[Marking, list[str]]] = deque([(marking, [])])
    while queue:
        current, path = queue.popleft()
        if len(path) >= SILENT_BFS_DEPTH:
            continue
        for t in net.silent_transitions:
            if all(current.count(p) >= 1 for p in net.preset[t]):
                nxt = fire(net, current, t)
                if nxt == target:
                    return path + [t]
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append((nxt, path + [t]))
    return None


def replay(net: LabeledPetriNet, trace: Trace) -> ReplayResult:
    """Token replay with a skip policy: an event the net cannot fire is
    skipped; visits are only recorded until the first such deviation."""
    dp_places = {dp.place for dp in decision_points(net)}
    marking = net.initial_marking
    firing: list[str] = []
    visits: list[Visit] = []
    replayed = 0
    deviated = False

    def record(t: str, index: int) -> None:
        if deviated:
            return
        for p in net.preset[t]:
            if p in dp_places:
                visits.append(Visit(p, t, index))

    for index, activity in enumerate(trace.activities):
        found = _silent_path_to(net, marking, activity)
        if found is None:
            deviated = True
            continue
        path, t = found
        for s in path:
            record(s, index)
            marking = fire(net, marking, s)
            firing.append(s)
        record(t, index)
        marking = fire(net, marking, t)
        firing.append(t)
        replayed += 1

    completion = _silent_path_to_marking(net, marking, net.final_marking)
    n_events = len(trace.events)
    if completion is not None:
        for s in completion:
            record(s, n_events)
            marking = fire(net, marking, s)
            firing.append(s)
    fitness = 1.0 if n_events == 0 else replayed / n_events
    return ReplayResult(
        case_id=trace.case_id,
        firing_sequence=tuple(firing),
        visits=tuple(visits),
        fitness=fitness,
        completed=completion is not None,
        replayed_events=replayed,
        total_events=n_events,
    )


# ---------------------------------------------------------------------------
# PNML

_PNML_NET_TYPE = "http://www.pnml.org/version-2009/grammar/ptnet"


def export_pnml(net: LabeledPetriNet) -> bytes:
    root = ET.Element("pnml")
    net_elem = ET.SubElement(root, "net", id="net0", type=_PNML_NET_TYPE)
    page = ET.SubElement(net_elem, "page", id="page0")
    for p in sorted(net.places):
        place = ET.SubElement(page, "place", id=p)
        count = net.initial_marking.count(p)
        if count:
            im = ET.SubElement(place, "initialMarking")
            ET.SubElement(im, "text").text = str(count)
    for t in sorted(net.transitions):
        trans = ET.SubElement(page, "transition", id=t)
        label = net.label(t)
        if label is not None:
            name = ET.SubElement(trans, "name")
            ET.SubElement(name, "text").text = label
    for i, (src, tgt) in enumerate(sorted(net.arcs)):
        ET.SubElement(page, "arc", id=f"a{i}", source=src, target=tgt)
    finals = ET.SubElement(net_elem, "finalmarkings")
    marking_elem = ET.SubElement(finals, "marking")
    for p, n in net.final_marking.items():
        pl = ET.SubElement(marking_elem, "place", idref=p)
        ET.SubElement(pl, "text").text = str(n)
    ET.indent(root)
    return ET.tostring(root, encoding="utf-8", xml_declaration=True) + b"\n"


def import_pnml(data: bytes | str) -> LabeledPetriNet:
    if isinstance(data, str):
        data = data.encode("utf-8")
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        line, column = exc.position
        raise PnmlError(f"malformed PNML (line {line}, column {column})") from None
    if root.tag.rsplit("}", 1)[-1] != "pnml":
        raise PnmlError(f"not a PNML document (root {root.tag!r})")

    def local(tag: str) -> str:
        return tag.rsplit("}", 1)[-1]

    places: set[str] = set()
    transitions: set[str] = set()
    arcs: set[tuple[str, str]] = set()
    labels: dict[str, str] = {}
    initial: dict[str, int] = {}
    final: dict[str, int] = {}

    def walk(elem: ET.Element) -> None:
        for child in elem:
            tag = local(child.tag)
            if tag == "place":
                pid = child.get("id")
                if not pid:
                    raise PnmlError("place without id")
                places.add(pid)
                for sub in child:
                    if local(sub.tag) == "initialMarking":
                        text = sub.findtext("text") or "0"
                        if int(text):
                            initial[pid] = int(text)
            elif tag == "transition":
                tid = child.get("id")
                if not tid:
                    raise PnmlError("transition without id")
                transitions.add(tid)
                for sub in child:
                    if local(sub.tag) == "name":
                        text = sub.findtext("text")
                        if text:
                            labels[tid] = text
            elif tag == "arc":
                src, tgt = child.get("source"), child.get("target")
                if not src or not tgt:
                    raise PnmlError("arc without source/target")
                arcs.add((src, tgt))
            elif tag in ("net", "page"):
                walk(child)
            elif tag == "finalmarkings":
                for marking_elem in child:
                    for pl in marking_elem:
                        if local(pl.tag) == "place":
                            final[pl.get("idref", "")] = int(pl.findtext("text") or "1")

    walk(root)
    try:
        return LabeledPetriNet(
            places=frozenset(places),
            transitions=frozenset(transitions),
            arcs=frozenset(arcs),
            labels=labels,
            initial_marking=Marking(initial),
            final_marking=Marking(final),
        )
    except NetError as exc:
        raise PnmlError(f"invalid net in PNML: {exc}") from None


def export_dot(net: LabeledPetriNet) -> str:
    """Graphviz DOT with decision points drawn double-circled and filled."""
    dps = {dp.place for dp in decision_points(net)}
    lines = [
        "digraph net {",
        "  rankdir=LR;",
        '  node [fontname="Helvetica"];',
    ]
    for p in sorted(net.places):
        attrs = ["shape=circle", f'label="{_dot_escape(_place_decor(net, p))}"']
        if p in dps:
            attrs += ["style=filled", 'fillcolor="#ffd27f"', "peripheries=2"]
        lines.append(f'  "{p}" [{", ".join(attrs)}];')
    for t in sorted(net.transitions):
        label = net.label(t)
        if label is None:
            lines.append(f'  "{t}" [shape=box, style=filled, fillcolor=black, label="", width=0.15];')
        else:
            lines.append(f'  "{t}" [shape=box, label="{_dot_escape(label)}"];')
    for src, tgt in sorted(net.arcs):
        lines.append(f'  "{src}" -> "{tgt}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _place_decor(net: LabeledPetriNet, p: str) -> str:
    marks = ""
    if net.initial_marking.count(p):
        marks = "●"  # token dot on the source place
    return marks or ""


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')

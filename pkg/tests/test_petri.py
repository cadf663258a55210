import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from decmine.errors import NetError, PnmlError
from decmine.log import Event, Trace, parse_timestamp
from decmine.petri import (
    DecisionPoint,
    LabeledPetriNet,
    Marking,
    decision_points,
    enabled,
    export_dot,
    export_pnml,
    fire,
    import_pnml,
    replay,
)


def trace_of(activities, case_id="C1"):
    events = []
    for i, act in enumerate(activities):
        t = parse_timestamp(f"2024-01-01T00:{i:02d}:00Z")
        events.append(Event(f"e{i}", {"case": case_id, "act": act, "time": t}))
    return Trace(case_id, tuple(events))


def test_decision_points_n1(n1):
    dps = decision_points(n1)
    by_place = {dp.place: dp for dp in dps}
    assert "p2" in by_place
    assert by_place["p2"].alternatives == ("t2", "t3")


def test_decision_points_empty_for_chain():
    net = LabeledPetriNet(
        places=frozenset({"p1", "p2"}),
        transitions=frozenset({"t1"}),
        arcs=frozenset({("p1", "t1"), ("t1", "p2")}),
        labels={"t1": "A"},
        initial_marking=Marking(["p1"]),
        final_marking=Marking(["p2"]),
    )
    assert decision_points(net) == ()


def test_enabled_n1(n1):
    assert enabled(n1, Marking(["p1"])) == {"t1"}
    assert enabled(n1, Marking()) == frozenset()
    assert enabled(n1, Marking(["p2"])) == {"t2", "t3"}


def test_fire_n1(n1):
    assert fire(n1, Marking(["p1"]), "t1") == Marking(["p2"])


def test_fire_disabled_raises(n1):
    with pytest.raises(NetError):
        fire(n1, Marking(["p1"]), "t2")


def test_fire_self_loop_keeps_count():
    net = LabeledPetriNet(
        places=frozenset({"p1"}),
        transitions=frozenset({"t1"}),
        arcs=frozenset({("p1", "t1"), ("t1", "p1")}),
        labels={"t1": "A"},
        initial_marking=Marking(["p1"]),
        final_marking=Marking(["p1"]),
    )
    assert fire(net, Marking(["p1"]), "t1") == Marking(["p1"])


def test_fire_happy_path_reaches_final(n1):
    marking = n1.initial_marking
    for t in ("t1", "t2", "t4", "t5", "t6"):
        assert t in enabled(n1, marking)
        marking = fire(n1, marking, t)
    assert marking == n1.final_marking


@settings(max_examples=60)
@given(st.integers(0, 3), st.integers(0, 3))
def test_fire_preserves_token_count_when_degrees_match(pre_extra, post_extra):
    # |pre(t)| == |post(t)| implies constant total token count
    places = frozenset({"a", "b", "c", "d"})
    pre = ["a"] + (["b"] if pre_extra % 2 else [])
    post = ["c"] + (["d"] if pre_extra % 2 else [])
    arcs = {(p, "t") for p in pre} | {("t", p) for p in post}
    net = LabeledPetriNet(
        places=places,
        transitions=frozenset({"t"}),
        arcs=frozenset(arcs),
        labels={"t": "X"},
        initial_marking=Marking(pre * (1 + post_extra % 2)),
        final_marking=Marking(post),
    )
    marking = net.initial_marking
    if "t" in enabled(net, marking):
        after = fire(net, marking, "t")
        assert len(after) == len(marking)


def test_enabled_and_fire_agree(n1):
    # fire never raises for an enabled transition, from any reachable marking
    frontier = [n1.initial_marking]
    seen = set(frontier)
    while frontier:
        marking = frontier.pop()
        for t in enabled(n1, marking):
            after = fire(n1, marking, t)  # must not raise
            if after not in seen:
                seen.add(after)
                frontier.append(after)
    assert n1.final_marking in seen


def test_replay_records_visit(n1):
    result = replay(n1, trace_of(["Create Purchase Order", "Request Standard Order"]))
    assert any(v.place == "p2" and v.transition == "t2" and v.event_index == 1
               for v in result.visits)
    assert result.fitness == 1.0
    assert not result.completed  # stops in p3: approval still pending


def test_replay_empty_trace_when_initial_is_final():
    net = LabeledPetriNet(
        places=frozenset({"p1"}),
        transitions=frozenset(),
        arcs=frozenset(),
        labels={},
        initial_marking=Marking(["p1"]),
        final_marking=Marking(["p1"]),
    )
    result = replay(net, trace_of([]))
    assert result.fitness == 1.0
    assert result.completed
    assert result.visits == ()


def test_replay_unknown_activity_lowers_fitness(n1):
    result = replay(n1, trace_of(["Create Purchase Order", "Telephone Vendor"]))
    assert result.fitness == 0.5
    assert not result.fits


def test_replay_skip_policy_discards_later_visits(n1):
    # deviation before the decision point: the later p2 visit is not recorded
    result = replay(n1, trace_of(["Telephone Vendor", "Create Purchase Order",
                                  "Request Standard Order"]))
    assert result.fitness == pytest.approx(2 / 3)
    assert result.visits == ()


def test_replay_silent_transitions_bfs():
    # a -> tau -> b with a decision point between tau and b's alternative
    net = LabeledPetriNet(
        places=frozenset({"p1", "p2", "p3", "p4"}),
        transitions=frozenset({"t1", "t2", "t3", "t4"}),
        arcs=frozenset({
            ("p1", "t1"), ("t1", "p2"),
            ("p2", "t2"), ("t2", "p3"),  # silent skip
            ("p2", "t3"), ("t3", "p3"),  # Hold
            ("p3", "t4"), ("t4", "p4"),
        }),
        labels={"t1": "Ship", "t3": "Hold", "t4": "Receive"},
        initial_marking=Marking(["p1"]),
        final_marking=Marking(["p4"]),
    )
    result = replay(net, trace_of(["Ship", "Receive"]))
    assert result.fitness == 1.0
    assert result.completed
    visits = [(v.place, v.transition, v.event_index) for v in result.visits]
    assert ("p2", "t2", 1) in visits  # silent decision attributed to Receive


def test_pnml_roundtrip(n1):
    again = import_pnml(export_pnml(n1))
    assert again.places == n1.places
    assert again.transitions == n1.transitions
    assert again.arcs == n1.arcs
    assert dict(again.labels) == dict(n1.labels)
    assert again.initial_marking == n1.initial_marking
    assert again.final_marking == n1.final_marking


def test_pnml_import_handwritten_fig2_shape(n1):
    data = export_pnml(n1)
    net = import_pnml(data)
    assert len(net.places) >= 6
    assert len(net.transitions) == 7


def test_pnml_corrupt_raises():
    with pytest.raises(PnmlError):
        import_pnml(b"<pnml><net><place id=")
    with pytest.raises(PnmlError):
        import_pnml(b"<notpnml/>")


def test_dot_marks_decision_points(n1):
    dot = export_dot(n1)
    assert '"p2" [' in dot and "peripheries=2" in dot
    assert dot.count("peripheries=2") == len(decision_points(n1))


def test_decision_points_match_arc_scan(p2p_net):
    outdeg = {}
    for src, tgt in p2p_net.arcs:
        if src in p2p_net.places:
            outdeg[src] = outdeg.get(src, 0) + 1
    expected = {p for p, d in outdeg.items() if d >= 2}
    assert {dp.place for dp in decision_points(p2p_net)} == expected

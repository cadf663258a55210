import pytest

from decmine.discovery import discover_inductive
from decmine.log import parse_xes
from decmine.petri import LabeledPetriNet, Marking, decision_points
from decmine.situation import FeatureSpec, extract_situation_table
from decmine.synth import generate_synthetic_p2p

TABLE1_XES = """<?xml version="1.0" encoding="utf-8"?>
<log xes.version="1849-2016">
  <trace>
    <string key="concept:name" value="PO92"/>
    <event>
      <string key="concept:name" value="Create Purchase Order"/>
      <date key="time:timestamp" value="2022-10-05T09:00:00.000Z"/>
      <string key="org:resource" value="Adams"/>
      <int key="total-price" value="1000"/>
      <string key="vendor" value="Apple"/>
    </event>
    <event>
      <string key="concept:name" value="Request Standard Order"/>
      <date key="time:timestamp" value="2022-10-07T11:00:00.000Z"/>
      <string key="org:resource" value="Pedro"/>
      <int key="total-price" value="1000"/>
      <string key="vendor" value="Apple"/>
    </event>
  </trace>
  <trace>
    <string key="concept:name" value="PO93"/>
    <event>
      <string key="concept:name" value="Create Purchase Order"/>
      <date key="time:timestamp" value="2022-10-07T13:00:00.000Z"/>
      <string key="org:resource" value="Peter"/>
      <int key="total-price" value="1500"/>
      <string key="vendor" value="Samsung"/>
    </event>
  </trace>
</log>
"""

# Case attributes only, mirroring the qualitative customs analysis; the
# performance features would leak the customs label outright (a held order's
# decision timestamp is the Hold event itself, a skip's is the prior event).
P2P_FEATURE_SPEC = FeatureSpec(
    case_features=(
        "origin",
        "item category",
        "base price per item",
        "item count",
        "total price",
        "vendor",
        "product name",
    ),
)


@pytest.fixture(scope="session")
def table1_xes() -> bytes:
    return TABLE1_XES.encode("utf-8")


@pytest.fixture(scope="session")
def table1_log(table1_xes):
    return parse_xes(table1_xes)


def build_n1() -> LabeledPetriNet:
    """Purchase-order net: 6 places, 7 transitions, decision points at p2
    (standard vs manager handling) and p5 (pay vs cancel)."""
    arcs = {
        ("p1", "t1"), ("t1", "p2"),
        ("p2", "t2"), ("t2", "p3"),
        ("p2", "t3"), ("t3", "p3"),
        ("p3", "t4"), ("t4", "p4"),
        ("p4", "t5"), ("t5", "p5"),
        ("p5", "t6"), ("t6", "p6"),
        ("p5", "t7"), ("t7", "p6"),
    }
    labels = {
        "t1": "Create Purchase Order",
        "t2": "Request Standard Order",
        "t3": "Request Manager Approval",
        "t4": "Approve Purchase Order",
        "t5": "Order Goods",
        "t6": "Pay Invoice",
        "t7": "Cancel Order",
    }
    return LabeledPetriNet(
        places=frozenset(f"p{i}" for i in range(1, 7)),
        transitions=frozenset(f"t{i}" for i in range(1, 8)),
        arcs=frozenset(arcs),
        labels=labels,
        initial_marking=Marking(["p1"]),
        final_marking=Marking(["p6"]),
    )


@pytest.fixture(scope="session")
def n1():
    return build_n1()


@pytest.fixture(scope="session")
def p2p_log():
    return generate_synthetic_p2p(7, 400)


@pytest.fixture(scope="session")
def p2p_net(p2p_log):
    return discover_inductive(p2p_log)


def customs_decision_point(net):
    for dp in decision_points(net):
        if any(net.label(t) == "Hold at Customs" for t in dp.alternatives):
            return dp
    raise AssertionError("no customs decision point discovered")


@pytest.fixture(scope="session")
def customs_dp(p2p_net):
    return customs_decision_point(p2p_net)


@pytest.fixture(scope="session")
def customs_table(p2p_log, p2p_net, customs_dp):
    return extract_situation_table(p2p_log, p2p_net, customs_dp, P2P_FEATURE_SPEC)

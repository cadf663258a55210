"""Synthetic purchase-to-pay log generator with known decision logic.

Each case flows through::

    Create Purchase Requisition
    -> Request Standard Approval | Request Manager Approval   (total price > 500)
    -> Create Purchase Order -> Ship Order
    -> [Hold at Customs]                                      (origin Non-EU and base price > 50)
    -> Receive Goods
    -> Pay by Credit Card | Pay by Bank Transfer              (item count >= 6)

The customs step is the interesting one: it only happens for Non-EU orders
whose base price per item exceeds 50. Vendor, product name and resources are
nuisance attributes drawn independently of every decision.
"""

from __future__ import annotations

import random
from datetime import datetime, timedelta, timezone

from .log import CASE_PREFIX, Event, EventLog, build_log

ACT_CREATE_REQ = "Create Purchase Requisition"
ACT_STD_APPROVAL = "Request Standard Approval"
ACT_MGR_APPROVAL = "Request Manager Approval"
ACT_CREATE_PO = "Create Purchase Order"
ACT_SHIP = "Ship Order"
ACT_CUSTOMS = "Hold at Customs"
ACT_RECEIVE = "Receive Goods"
ACT_PAY_CARD = "Pay by Credit Card"
ACT_PAY_BANK = "Pay by Bank Transfer"

CATEGORIES = {
    "Electronics": (55.0, 95.0),
    "Office Supplies": (20.0, 70.0),
    "Furniture": (30.0, 90.0),
    "Odds and Ends": (5.0, 45.0),
}
VENDORS = ("Apple", "Samsung", "Lenovo", "IKEA", "Staples", "Vinted")
PRODUCTS = (
    "Laptop", "Monitor", "Desk", "Chair", "Stapler", "Cable", "Notebook",
    "Lamp", "Webcam", "Headset", "Whiteboard", "Shelf",
)
RESOURCES = ("Adams", "Pedro", "Peter", "Sara", "Kim", "Jonas", "Lena", "Omar")

ATTR_ORIGIN = "origin"
ATTR_CATEGORY = "item category"
ATTR_BASE_PRICE = "base price per item"
ATTR_ITEM_COUNT = "item count"
ATTR_TOTAL_PRICE = "total price"
ATTR_VENDOR = "vendor"
ATTR_PRODUCT = "product name"


def customs_rule(origin: str, base_price: float) -> bool:
    """The ground-truth customs decision."""
    return origin == "Non-EU" and base_price > 50.0


def generate_synthetic_p2p(seed: int, n_cases: int) -> EventLog:
    """Deterministically generate ``n_cases`` purchase-to-pay cases."""
    if n_cases < 1:
        raise ValueError("n_cases must be >= 1")
    rng = random.Random(seed)
    start = datetime(2022, 10, 1, 8, 0, tzinfo=timezone.utc)

    groups = []
    event_seq = 0
    for i in range(n_cases):
        case_id = f"PO{i:05d}"
        origin = rng.choice(("EU", "Non-EU"))
        category = rng.choices(list(CATEGORIES), weights=(0.3, 0.25, 0.2, 0.25))[0]
        lo, hi = CATEGORIES[category]
        base_price = round(rng.uniform(lo, hi), 2)
        item_count = rng.randint(1, 10)
        total_price = round(base_price * item_count, 2)
        case_attrs = {
            CASE_PREFIX + ATTR_ORIGIN: origin,
            CASE_PREFIX + ATTR_CATEGORY: category,
            CASE_PREFIX + ATTR_BASE_PRICE: base_price,
            CASE_PREFIX + ATTR_ITEM_COUNT: item_count,
            CASE_PREFIX + ATTR_TOTAL_PRICE: total_price,
            CASE_PREFIX + ATTR_VENDOR: rng.choice(VENDORS),
            CASE_PREFIX + ATTR_PRODUCT: rng.choice(PRODUCTS),
        }

        acts = [ACT_CREATE_REQ]
        acts.append(ACT_MGR_APPROVAL if total_price > 500.0 else ACT_STD_APPROVAL)
        acts.extend((ACT_CREATE_PO, ACT_SHIP))
        if customs_rule(origin, base_price):
            acts.append(ACT_CUSTOMS)
        acts.append(ACT_RECEIVE)
        acts.append(ACT_PAY_BANK if item_count >= 6 else ACT_PAY_CARD)

        when = start + timedelta(minutes=37 * i + rng.randint(0, 30))
        events = []
        for act in acts:
            attrs = dict(case_attrs)
            attrs.update(case=case_id, act=act, time=when, res=rng.choice(RESOURCES))
            events.append(Event(f"e{event_seq}", attrs))
            event_seq += 1
            when = when + timedelta(minutes=rng.randint(30, 4000))
        groups.append((case_id, events))
    return build_log(groups, [])

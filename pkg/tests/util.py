"""Test helpers: build logs from activity sequences, random block-structured
process trees and a simulator for them."""

from datetime import datetime, timedelta, timezone

from decmine.log import Event, EventLog, build_log


def make_log(sequences) -> EventLog:
    """EventLog from bare activity sequences (one trace per sequence)."""
    start = datetime(2024, 1, 1, tzinfo=timezone.utc)
    groups = []
    counter = 0
    for i, seq in enumerate(sequences):
        case_id = f"c{i}"
        events = []
        for j, act in enumerate(seq):
            events.append(
                Event(
                    f"e{counter}",
                    {"case": case_id, "act": act, "time": start + timedelta(minutes=counter)},
                )
            )
            counter += 1
        groups.append((case_id, events))
    return build_log(groups, [])


def random_tree(rng, n_activities: int):
    """Random block-structured process tree over distinct activity names."""
    labels = [f"A{i}" for i in range(n_activities)]
    rng.shuffle(labels)
    pool = list(labels)

    def build(budget: int):
        if budget <= 1 or len(pool) == 1:
            return ("act", pool.pop())
        op = rng.choice(["seq", "xor", "par", "loop", "act"])
        if op == "act":
            return ("act", pool.pop())
        if op == "loop":
            body_budget = max(1, budget // 2)
            body = build(body_budget)
            redo = build(max(1, min(budget - body_budget, len(pool)))) if pool else ("tau",)
            return ("loop", [body, redo])
        n_children = rng.randint(2, min(3, max(2, budget)))
        children = []
        remaining = budget
        for i in range(n_children):
            if not pool:
                break
            share = max(1, remaining // (n_children - i))
            children.append(build(share))
            remaining -= share
        if len(children) < 2:
            return children[0] if children else ("tau",)
        if op == "xor" and rng.random() < 0.3:
            children.append(("tau",))
        return (op, children)

    return build(n_activities)


def sample_trace(tree, rng) -> tuple:
    op = tree[0]
    if op == "act":
        return (tree[1],)
    if op == "tau":
        return ()
    if op == "xor":
        return sample_trace(rng.choice(tree[1]), rng)
    if op == "seq":
        out = ()
        for child in tree[1]:
            out += sample_trace(child, rng)
        return out
    if op == "par":
        parts = [list(sample_trace(child, rng)) for child in tree[1]]
        merged = []
        while any(parts):
            alive = [p for p in parts if p]
            pick = rng.choice(alive)
            merged.append(pick.pop(0))
        return tuple(merged)
    if op == "loop":
        body, *redos = tree[1]
        out = sample_trace(body, rng)
        while rng.random() < 0.35 and redos:
            out += sample_trace(rng.choice(redos), rng)
            out += sample_trace(body, rng)
        return out
    raise ValueError(op)


def simulate_tree_log(tree, rng, n_traces: int) -> EventLog:
    sequences = [sample_trace(tree, rng) for _ in range(n_traces)]
    return make_log(sequences)

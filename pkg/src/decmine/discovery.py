"""Inductive process discovery.

Recursively splits the directly-follows graph of the log by exclusive-choice,
sequence, parallel and loop cuts (tried in that order); single activities and
empty traces are base cases, and when nothing applies the fall-throughs keep
the guarantee that every input trace replays with fitness 1.0: first a
tau-loop restart split, then the flower model.
"""

from __future__ import annotations

from collections import Counter

from .errors import InputError
from .log import EventLog
from .petri import LabeledPetriNet, Marking

# process-tree nodes: ("act", name) | ("tau",) | ("xor"|"seq"|"par", [children])
# | ("loop", [body, redo...])

TAU = ("tau",)


def discover_inductive(log: EventLog) -> LabeledPetriNet:
    """Discover a sound workflow net that replays the whole log."""
    if not log.traces:
        raise InputError("cannot discover a model from an empty log")
    variants = Counter(tr.activities for tr in log.traces)
    return tree_to_net(_im(variants))


def _im(log: Counter) -> tuple:
    acts = sorted({a for t in log for a in t})
    if not acts:
        return TAU
    if () in log:
        rest = Counter({t: c for t, c in log.items() if t})
        return ("xor", [TAU, _im(rest)])
    if len(acts) == 1:
        a = acts[0]
        if all(len(t) == 1 for t in log):
            return ("act", a)
        return ("loop", [("act", a), TAU])

    edges, starts, ends = _dfg(log)

    groups = _xor_cut(acts, edges)
    if groups:
        return ("xor", [_im(sub) for sub in _split_xor(log, groups)])

    groups = _sequence_cut(acts, edges)
    if groups:
        return ("seq", [_im(sub) for sub in _split_project(log, groups)])

    groups = _parallel_cut(acts, edges, starts, ends)
    if groups:
        return ("par", [_im(sub) for sub in _split_project(log, groups)])

    cut = _loop_cut(acts, edges, starts, ends)
    if cut:
        split = _split_loop(log, *cut)
        if split is not None:
            body_log, redo_logs = split
            return ("loop", [_im(body_log)] + [_im(r) for r in redo_logs])

    restarted = _split_tau_loop(log, starts, ends)
    if restarted is not None:
        return ("loop", [_im(restarted), TAU])

    return ("loop", [("xor", [("act", a) for a in acts]), TAU])  # flower


def _dfg(log: Counter):
    edges: set[tuple[str, str]] = set()
    starts: set[str] = set()
    ends: set[str] = set()
    for t in log:
        starts.add(t[0])
        ends.add(t[-1])
        edges.update(zip(t, t[1:]))
    return edges, starts, ends


# ---------------------------------------------------------------------------
# cut detection


def _components(acts: list[str], pairs: set[tuple[str, str]]) -> list[list[str]]:
    """Connected components of the undirected graph, sorted by smallest member."""
    adj: dict[str, set[str]] = {a: set() for a in acts}
    for a, b in pairs:
        adj[a].add(b)
        adj[b].add(a)
    seen: set[str] = set()
    comps = []
    for a in acts:
        if a in seen:
            continue
        comp, stack = [], [a]
        seen.add(a)
        while stack:
            x = stack.pop()
            comp.append(x)
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        comps.append(sorted(comp))
    return sorted(comps, key=lambda c: c[0])


def _xor_cut(acts, edges):
    comps = _components(acts, edges)
    return comps if len(comps) >= 2 else None


def _sequence_cut(acts, edges):
    # strongly connected components, then merge mutually unreachable ones and
    # require a total reachability order over the merged groups
    index = {a: i for i, a in enumerate(acts)}
    n = len(acts)
    reach = [[False] * n for _ in range(n)]
    for a, b in edges:
        reach[index[a]][index[b]] = True
    for k in range(n):
        rk = reach[k]
        for i in range(n):
            if reach[i][k]:
                ri = reach[i]
                for j in range(n):
                    if rk[j]:
                        ri[j] = True

    scc_id = {}
    sccs = []
    for i, a in enumerate(acts):
        placed = False
        for s_idx, members in enumerate(sccs):
            j = index[members[0]]
            if reach[i][j] and reach[j][i]:
                members.append(a)
                scc_id[a] = s_idx
                placed = True
                break
        if not placed:
            scc_id[a] = len(sccs)
            sccs.append([a])

    groups = [sorted(m) for m in sccs]

    def group_reaches(g1, g2):
        return any(reach[index[x]][index[y]] for x in g1 for y in g2)

    merged = True
    while merged:
        merged = False
        for i in range(len(groups)):
            for j in range(i + 1, len(groups)):
                if not group_reaches(groups[i], groups[j]) and not group_reaches(groups[j], groups[i]):
                    groups[i] = sorted(groups[i] + groups[j])
                    del groups[j]
                    merged = True
                    break
            if merged:
                break

    if len(groups) < 2:
        return None
    for i in range(len(groups)):
        for j in range(i + 1, len(groups)):
            fwd = group_reaches(groups[i], groups[j])
            bwd = group_reaches(groups[j], groups[i])
            if fwd == bwd:  # incomparable or cyclic across groups
                return None
    pred_counts = [
        sum(group_reaches(h, g) for h in groups if h is not g) for g in groups
    ]
    return [groups[i] for i in sorted(range(len(groups)), key=pred_counts.__getitem__)]


def _parallel_cut(acts, edges, starts, ends):
    # merge activities that are NOT connected in both directions
    blocked = {
        (a, b)
        for a in acts
        for b in acts
        if a < b and not ((a, b) in edges and (b, a) in edges)
    }
    comps = _components(acts, blocked)
    if len(comps) < 2:
        return None
    for comp in comps:
        if not (set(comp) & starts) or not (set(comp) & ends):
            return None
    return comps


def _loop_cut(acts, edges, starts, ends):
    body = set(starts) | set(ends)
    while True:
        others = [a for a in acts if a not in body]
        if not others:
            return None
        comps = _components(others, {(a, b) for a, b in edges if a in others and b in others})
        demoted = False
        valid = []
        for comp in comps:
            cset = set(comp)
            ok = True
            for a, b in edges:
                if a in body and b in cset and a not in ends:
                    ok = False
                if a in cset and b in body and b not in starts:
                    ok = False
            if ok:
                valid.append(comp)
            else:
                body |= cset
                demoted = True
        if not demoted:
            if not valid:
                return None
            return sorted(body), valid


# ---------------------------------------------------------------------------
# log splitting


def _split_xor(log: Counter, groups) -> list[Counter]:
    member = {a: i for i, g in enumerate(groups) for a in g}
    subs = [Counter() for _ in groups]
    for t, c in log.items():
        subs[member[t[0]]][t] += c
    return subs


def _split_project(log: Counter, groups) -> list[Counter]:
    subs = [Counter() for _ in groups]
    sets = [set(g) for g in groups]
    for t, c in log.items():
        for i, g in enumerate(sets):
            subs[i][tuple(a for a in t if a in g)] += c
    return subs


def _split_loop(log: Counter, body, redos):
    group_of = {a: -1 for a in body}
    for i, r in enumerate(redos):
        for a in r:
            group_of[a] = i
    body_log: Counter = Counter()
    redo_logs = [Counter() for _ in redos]
    for t, c in log.items():
        segments: list[tuple[int, list[str]]] = []
        cur_group = group_of[t[0]]
        cur: list[str] = []
        for a in t:
            g = group_of[a]
            if g != cur_group:
                segments.append((cur_group, cur))
                cur_group, cur = g, []
            cur.append(a)
        segments.append((cur_group, cur))
        if segments[0][0] != -1 or segments[-1][0] != -1:
            return None  # trace does not start/end in the body
        for g, seg in segments:
            if g == -1:
                body_log[tuple(seg)] += c
            else:
                redo_logs[g][tuple(seg)] += c
    return body_log, redo_logs


def _split_tau_loop(log: Counter, starts, ends):
    """Split traces wherever an end activity is directly followed by a start
    activity; None when no trace restarts."""
    out: Counter = Counter()
    any_split = False
    for t, c in log.items():
        cur = [t[0]]
        parts = []
        for prev, a in zip(t, t[1:]):
            if prev in ends and a in starts:
                parts.append(tuple(cur))
                cur = [a]
                any_split = True
            else:
                cur.append(a)
        parts.append(tuple(cur))
        for p in parts:
            out[p] += c
    return out if any_split else None


# ---------------------------------------------------------------------------
# process tree -> Petri net


class _NetBuilder:
    def __init__(self):
        self.places: list[str] = []
        self.transitions: list[str] = []
        self.labels: dict[str, str] = {}
        self.arcs: set[tuple[str, str]] = set()

    def place(self) -> str:
        p = f"p{len(self.places):03d}"
        self.places.append(p)
        return p

    def transition(self, label: str | None = None) -> str:
        t = f"t{len(self.transitions):03d}"
        self.transitions.append(t)
        if label is not None:
            self.labels[t] = label
        return t

    def arc(self, src: str, tgt: str) -> None:
        self.arcs.add((src, tgt))


def tree_to_net(tree: tuple) -> LabeledPetriNet:
    b = _NetBuilder()
    source = b.place()
    sink = b.place()
    _translate(tree, source, sink, b)
    return LabeledPetriNet(
        places=frozenset(b.places),
        transitions=frozenset(b.transitions),
        arcs=frozenset(b.arcs),
        labels=b.labels,
        initial_marking=Marking([source]),
        final_marking=Marking([sink]),
    )


def _translate(node: tuple, pin: str, pout: str, b: _NetBuilder) -> None:
    op = node[0]
    if op == "act":
        t = b.transition(node[1])
        b.arc(pin, t)
        b.arc(t, pout)
    elif op == "tau":
        t = b.transition()
        b.arc(pin, t)
        b.arc(t, pout)
    elif op == "xor":
        for child in node[1]:
            _translate(child, pin, pout, b)
    elif op == "seq":
        children = node[1]
        cuts = [pin] + [b.place() for _ in children[:-1]] + [pout]
        for child, (a, z) in zip(children, zip(cuts, cuts[1:])):
            _translate(child, a, z, b)
    elif op == "par":
        split = b.transition()
        join = b.transition()
        b.arc(pin, split)
        b.arc(join, pout)
        for child in node[1]:
            entry, exit_ = b.place(), b.place()
            b.arc(split, entry)
            _translate(child, entry, exit_, b)
            b.arc(exit_, join)
    elif op == "loop":
        body, *redos = node[1]
        enter = b.transition()
        leave = b.transition()
        p_in, p_out = b.place(), b.place()
        b.arc(pin, enter)
        b.arc(enter, p_in)
        b.arc(p_out, leave)
        b.arc(leave, pout)
        _translate(body, p_in, p_out, b)
        for redo in redos:
            _translate(redo, p_out, p_in, b)
    else:
        raise ValueError(f"unknown tree node {op!r}")

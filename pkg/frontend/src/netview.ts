/** Layered layout of the discovered net for the model browser: places and
 * transitions arranged left to right by graph distance from the source,
 * decision points flagged for highlighting. */

import type { DiscoverResponse, NetPayload } from "./types.js";

export interface NetNode {
    id: string;
    kind: "place" | "transition";
    label: string | null;
    layer: number;
    row: number;
    decisionPoint: boolean;
    silent: boolean;
}

export interface NetLayout {
    nodes: NetNode[];
    edges: { from: string; to: string }[];
    layers: number;
    empty: boolean; // no decision points to select
}

export function layoutNet(discover: DiscoverResponse): NetLayout {
    const net: NetPayload = discover.net;
    const decisionPlaces = new Set(discover.decision_points.map((d) => d.place));
    const labels = new Map(net.transitions.map((t) => [t.id, t.label]));
    const adjacency = new Map<string, string[]>();
    for (const [from, to] of net.arcs) {
        if (!adjacency.has(from)) adjacency.set(from, []);
        adjacency.get(from)!.push(to);
    }

    const layer = new Map<string, number>();
    const queue: string[] = Object.keys(net.initial_marking).sort();
    queue.forEach((p) => layer.set(p, 0));
    while (queue.length) {
        const node = queue.shift()!;
        const next = (adjacency.get(node) ?? []).slice().sort();
        for (const succ of next) {
            if (!layer.has(succ)) {
                layer.set(succ, layer.get(node)! + 1);
                queue.push(succ);
            }
        }
    }
    const allIds = [...net.places, ...net.transitions.map((t) => t.id)].sort();
    let maxLayer = 0;
    for (const value of layer.values()) maxLayer = Math.max(maxLayer, value);
    for (const id of allIds) {
        if (!layer.has(id)) layer.set(id, maxLayer + 1); // disconnected safety net
    }

    const rowCounter = new Map<number, number>();
    const nodes: NetNode[] = allIds.map((id) => {
        const l = layer.get(id)!;
        const row = rowCounter.get(l) ?? 0;
        rowCounter.set(l, row + 1);
        const isPlace = net.places.includes(id);
        return {
            id,
            kind: isPlace ? "place" : "transition",
            label: isPlace ? null : labels.get(id) ?? null,
            layer: l,
            row,
            decisionPoint: decisionPlaces.has(id),
            silent: !isPlace && (labels.get(id) ?? null) === null,
        };
    });
    return {
        nodes,
        edges: net.arcs.map(([from, to]) => ({ from, to })),
        layers: Math.max(...nodes.map((n) => n.layer)) + 1,
        empty: decisionPlaces.size === 0,
    };
}

export function alternativesOf(discover: DiscoverResponse, place: string) {
    const dp = discover.decision_points.find((d) => d.place === place);
    if (!dp) throw new Error(`no decision point at ${place}`);
    return dp.alternatives;
}

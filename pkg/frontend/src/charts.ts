/** Pure chart geometry: every function maps a server plot payload to
 * drawable primitives. Nothing here recomputes attributions; the service's
 * numbers are the single source of truth. */

import type {
    BarPlotData,
    BeeswarmPlotData,
    CVReportPayload,
    DecisionPlotData,
    ForcePlotData,
    WhatIfResponse,
} from "./types.js";

export const POSITIVE_COLOR = "#e45756";
export const NEGATIVE_COLOR = "#4c78a8";

export interface ForceBar {
    name: string;
    value: number;
    x: number;
    width: number;
    color: string;
    featureValue: number | null;
}

export interface ForceGeometry {
    baseValue: number;
    predictedValue: number;
    min: number;
    max: number;
    bars: ForceBar[];
}

/** Horizontal force chart: contiguous segments from base to prediction. */
export function forceGeometry(data: ForcePlotData): ForceGeometry {
    const bars: ForceBar[] = data.segments.map((seg) => ({
        name: seg.name,
        value: seg.value,
        x: Math.min(seg.start, seg.end),
        width: Math.abs(seg.end - seg.start),
        color: seg.value >= 0 ? POSITIVE_COLOR : NEGATIVE_COLOR,
        featureValue: seg.feature_value,
    }));
    const ends = data.segments.flatMap((s) => [s.start, s.end]);
    return {
        baseValue: data.base_value,
        predictedValue: data.predicted_value,
        min: Math.min(data.base_value, ...ends),
        max: Math.max(data.base_value, ...ends),
        bars,
    };
}

/** Residual between the last segment end and the predicted value; exact zero
 * for well-formed payloads (the efficiency identity). */
export function forceResidual(data: ForcePlotData): number {
    const last = data.segments.length
        ? data.segments[data.segments.length - 1].end
        : data.base_value;
    return last - data.predicted_value;
}

export interface DecisionPathPoint {
    name: string;
    value: number;
    x: number; // cumulative probability
    y: number; // 0-based row, least impactful first
}

export function decisionPath(data: DecisionPlotData): DecisionPathPoint[] {
    return data.points.map((p, i) => ({
        name: p.name,
        value: p.value,
        x: p.cumulative,
        y: i,
    }));
}

export interface BarChartRow {
    name: string;
    values: { target: string; value: number; color: string }[];
}

const SERIES_COLORS = ["#4c78a8", "#e45756", "#72b7b2", "#f58518", "#54a24b"];

export function barChartRows(data: BarPlotData, top?: number): BarChartRow[] {
    const names = top !== undefined ? data.names.slice(0, top) : data.names;
    return names.map((name) => ({
        name,
        values: data.series.map((s, i) => ({
            target: s.target,
            value: s.bars.find((b) => b.name === name)?.mean_abs ?? 0,
            color: SERIES_COLORS[i % SERIES_COLORS.length],
        })),
    }));
}

export interface BeeswarmPoint {
    row: number;
    name: string;
    x: number; // attribution value
    jitter: number; // deterministic vertical jitter in [-0.4, 0.4]
    featureValue: number;
}

export function beeswarmPoints(data: BeeswarmPlotData): BeeswarmPoint[] {
    const out: BeeswarmPoint[] = [];
    data.rows.forEach((row, r) => {
        row.points.forEach((p, i) => {
            // deterministic golden-ratio jitter keeps snapshots stable
            const jitter = ((i * 0.6180339887498949) % 1) * 0.8 - 0.4;
            out.push({
                row: r,
                name: row.name,
                x: p.value,
                jitter,
                featureValue: p.feature_value,
            });
        });
    });
    return out;
}

export interface F1Row {
    kind: string;
    meanF1: number;
    degenerate: boolean;
    suggested: boolean;
    topTwo: boolean;
}

/** Per-kind score table; the top two scores are flagged for bold rendering
 * and the suggested kind is starred. */
export function f1Table(reports: Record<string, CVReportPayload>,
                        suggested: string | null): F1Row[] {
    const rows = Object.values(reports)
        .map((r) => ({
            kind: r.kind,
            meanF1: r.mean_f1,
            degenerate: r.degenerate,
            suggested: r.kind === suggested,
            topTwo: false,
        }))
        .sort((a, b) => b.meanF1 - a.meanF1 || a.kind.localeCompare(b.kind));
    const distinct = [...new Set(rows.map((r) => r.meanF1))].sort((a, b) => b - a);
    const cutoff = distinct[Math.min(1, distinct.length - 1)];
    for (const row of rows) row.topTwo = row.meanF1 >= cutoff;
    return rows;
}

export interface DeltaEntry {
    transition: string;
    label: string | null;
    before: number;
    after: number;
    delta: number;
    flipped: boolean; // sign of (p - 0.5) changed, i.e. majority side moved
}

/** Side-by-side what-if deltas; `flipped` marks the transitions whose
 * probability crossed the argmax boundary. */
export function whatIfDeltas(body: WhatIfResponse): DeltaEntry[] {
    const transitions = Object.keys(body.delta).sort();
    return transitions.map((t) => ({
        transition: t,
        label: body.labels[t] ?? null,
        before: body.before.decision_mapping[t],
        after: body.after.decision_mapping[t],
        delta: body.delta[t],
        flipped:
            (body.before.argmax === t) !== (body.after.argmax === t),
    }));
}

export function argmaxChanged(body: WhatIfResponse): boolean {
    return body.before.argmax !== body.after.argmax;
}

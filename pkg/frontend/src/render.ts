/** SVG/HTML string rendering. All functions are pure string builders over
 * chart geometry, so they snapshot-test without a DOM. */

import {
    BarChartRow,
    beeswarmPoints,
    decisionPath,
    DeltaEntry,
    forceGeometry,
    F1Row,
    NEGATIVE_COLOR,
    POSITIVE_COLOR,
} from "./charts.js";
import type { BeeswarmPlotData, DecisionPlotData, ForcePlotData } from "./types.js";
import type { NetLayout } from "./netview.js";

function esc(text: string | null): string {
    return (text ?? "")
        .replace(/&/g, "&amp;")
        .replace(/</g, "&lt;")
        .replace(/>/g, "&gt;")
        .replace(/"/g, "&quot;");
}

function fmt(x: number): string {
    return Number.isInteger(x) ? String(x) : x.toFixed(4);
}

export function renderForceSvg(data: ForcePlotData, width = 640, height = 90): string {
    const geometry = forceGeometry(data);
    const span = Math.max(geometry.max - geometry.min, 1e-9);
    const sx = (v: number) => ((v - geometry.min) / span) * (width - 40) + 20;
    const parts = [
        `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" class="force-chart">`,
        `<line x1="${sx(geometry.baseValue)}" y1="10" x2="${sx(geometry.baseValue)}" y2="${height - 20}" stroke="#888" stroke-dasharray="4 2"/>`,
    ];
    for (const bar of geometry.bars) {
        const x = sx(bar.x);
        const w = Math.max(((bar.width) / span) * (width - 40), 0.5);
        parts.push(
            `<rect x="${x.toFixed(2)}" y="30" width="${w.toFixed(2)}" height="24" fill="${bar.color}">` +
            `<title>${esc(bar.name)}: ${fmt(bar.value)}</title></rect>`,
        );
    }
    parts.push(
        `<line x1="${sx(geometry.predictedValue)}" y1="10" x2="${sx(geometry.predictedValue)}" y2="${height - 20}" stroke="#222"/>`,
        `<text x="${sx(geometry.predictedValue)}" y="${height - 4}" font-size="11" text-anchor="middle">${fmt(geometry.predictedValue)}</text>`,
        `</svg>`,
    );
    return parts.join("");
}

export function renderDecisionSvg(data: DecisionPlotData, width = 420, rowHeight = 18): string {
    const path = decisionPath(data);
    const xs = [data.base_value, ...path.map((p) => p.x)];
    const min = Math.min(...xs);
    const max = Math.max(...xs);
    const span = Math.max(max - min, 1e-9);
    const height = rowHeight * (path.length + 2);
    const sx = (v: number) => ((v - min) / span) * (width - 160) + 150;
    const pts = [
        `${sx(data.base_value).toFixed(2)},${height - rowHeight}`,
        ...path.map((p, i) => `${sx(p.x).toFixed(2)},${height - rowHeight * (i + 2)}`),
    ];
    const labels = path
        .map((p, i) =>
            `<text x="4" y="${height - rowHeight * (i + 2) + 4}" font-size="10">${esc(p.name)}</text>`)
        .join("");
    return (
        `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" class="decision-chart">` +
        labels +
        `<polyline fill="none" stroke="${POSITIVE_COLOR}" stroke-width="2" points="${pts.join(" ")}"/>` +
        `</svg>`
    );
}

export function renderBeeswarmSvg(data: BeeswarmPlotData, width = 520, rowHeight = 26): string {
    const points = beeswarmPoints(data);
    const xs = points.map((p) => p.x);
    const min = Math.min(0, ...xs);
    const max = Math.max(0, ...xs);
    const span = Math.max(max - min, 1e-9);
    const height = rowHeight * (data.rows.length + 1);
    const sx = (v: number) => ((v - min) / span) * (width - 170) + 160;
    const values = points.map((p) => p.featureValue);
    const vMin = Math.min(...values);
    const vSpan = Math.max(Math.max(...values) - vMin, 1e-9);
    const circles = points
        .map((p) => {
            const cy = rowHeight * (p.row + 0.5) + p.jitter * rowHeight * 0.8;
            const heat = (p.featureValue - vMin) / vSpan;
            const color = heat >= 0.5 ? POSITIVE_COLOR : NEGATIVE_COLOR;
            return `<circle cx="${sx(p.x).toFixed(2)}" cy="${cy.toFixed(2)}" r="2.4" fill="${color}" fill-opacity="0.75"/>`;
        })
        .join("");
    const labels = data.rows
        .map((row, i) =>
            `<text x="4" y="${rowHeight * (i + 0.5) + 4}" font-size="10">${esc(row.name)}</text>`)
        .join("");
    return (
        `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" class="beeswarm-chart">` +
        `<line x1="${sx(0)}" y1="0" x2="${sx(0)}" y2="${height}" stroke="#ccc"/>` +
        labels + circles +
        `</svg>`
    );
}

export function renderBarSvg(rows: BarChartRow[], width = 520, rowHeight = 22): string {
    const maxValue = Math.max(1e-9, ...rows.flatMap((r) => r.values.map((v) => v.value)));
    const bandHeight = rowHeight / Math.max(1, rows[0]?.values.length ?? 1) - 2;
    const height = rowHeight * (rows.length + 1);
    const bars = rows
        .map((row, i) => {
            const segments = row.values
                .map((v, j) => {
                    const w = (v.value / maxValue) * (width - 200);
                    const y = rowHeight * i + j * (bandHeight + 2) + 2;
                    return `<rect x="160" y="${y.toFixed(2)}" width="${Math.max(w, 0.5).toFixed(2)}" height="${bandHeight.toFixed(2)}" fill="${v.color}"><title>${esc(v.target)}: ${fmt(v.value)}</title></rect>`;
                })
                .join("");
            const label = `<text x="4" y="${(rowHeight * i + rowHeight / 2 + 4).toFixed(2)}" font-size="10">${esc(row.name)}</text>`;
            return label + segments;
        })
        .join("");
    return `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" class="bar-chart">${bars}</svg>`;
}

export function renderF1Table(rows: F1Row[]): string {
    const body = rows
        .map((row) => {
            const name = row.suggested ? `★ ${row.kind}` : row.kind;
            const score = row.topTwo ? `<b>${row.meanF1.toFixed(4)}</b>` : row.meanF1.toFixed(4);
            const badge = row.degenerate ? ` <span class="badge warn">degenerate</span>` : "";
            return `<tr data-kind="${esc(row.kind)}"><td>${esc(name)}</td><td>${score}${badge}</td></tr>`;
        })
        .join("");
    return `<table class="f1-table"><thead><tr><th>model</th><th>mean F1</th></tr></thead><tbody>${body}</tbody></table>`;
}

export function renderDeltaTable(entries: DeltaEntry[]): string {
    const body = entries
        .map((e) => {
            const cls = e.delta > 0 ? "pos" : e.delta < 0 ? "neg" : "zero";
            const flip = e.flipped ? " ⇄" : "";
            return (
                `<tr><td>${esc(e.label ?? e.transition)}</td>` +
                `<td>${e.before.toFixed(4)}</td><td>${e.after.toFixed(4)}</td>` +
                `<td class="${cls}">${e.delta >= 0 ? "+" : ""}${e.delta.toFixed(4)}${flip}</td></tr>`
            );
        })
        .join("");
    return `<table class="delta-table"><thead><tr><th>decision</th><th>before</th><th>after</th><th>delta</th></tr></thead><tbody>${body}</tbody></table>`;
}

export function renderNetSvg(layout: NetLayout, colWidth = 110, rowHeight = 70): string {
    if (layout.empty && layout.nodes.length === 0) {
        return `<svg xmlns="http://www.w3.org/2000/svg" width="320" height="60"><text x="10" y="30">No process model yet</text></svg>`;
    }
    const rows = Math.max(...layout.nodes.map((n) => n.row)) + 1;
    const width = layout.layers * colWidth + 60;
    const height = rows * rowHeight + 40;
    const pos = new Map(layout.nodes.map((n) => [
        n.id,
        { x: n.layer * colWidth + 40, y: n.row * rowHeight + 40 },
    ]));
    const edges = layout.edges
        .map((e) => {
            const a = pos.get(e.from)!;
            const b = pos.get(e.to)!;
            return `<line x1="${a.x}" y1="${a.y}" x2="${b.x}" y2="${b.y}" stroke="#999" marker-end="url(#arrow)"/>`;
        })
        .join("");
    const nodes = layout.nodes
        .map((n) => {
            const { x, y } = pos.get(n.id)!;
            if (n.kind === "place") {
                const fill = n.decisionPoint ? "#ffd27f" : "#fff";
                const ring = n.decisionPoint
                    ? `<circle cx="${x}" cy="${y}" r="18" fill="none" stroke="#b8860b" class="decision-point" data-place="${esc(n.id)}"/>`
                    : "";
                return `<g class="place${n.decisionPoint ? " decision" : ""}" data-id="${esc(n.id)}">` +
                       `<circle cx="${x}" cy="${y}" r="14" fill="${fill}" stroke="#333"/>${ring}</g>`;
            }
            const fill = n.silent ? "#222" : "#e8f0fe";
            const label = n.silent ? "" :
                `<text x="${x}" y="${y + 28}" font-size="9" text-anchor="middle">${esc(n.label)}</text>`;
            return `<g class="transition" data-id="${esc(n.id)}">` +
                   `<rect x="${x - 16}" y="${y - 12}" width="32" height="24" fill="${fill}" stroke="#333"/>${label}</g>`;
        })
        .join("");
    return (
        `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" class="net-view">` +
        `<defs><marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="6" markerHeight="6" orient="auto-start-reverse"><path d="M 0 0 L 10 5 L 0 10 z" fill="#999"/></marker></defs>` +
        edges + nodes +
        `</svg>`
    );
}

export function renderEmptyState(message: string): string {
    return `<div class="empty-state">${esc(message)}</div>`;
}

import { describe, expect, it } from "vitest";

import { barChartRows, f1Table, whatIfDeltas } from "../src/charts.js";
import {
    renderBarSvg,
    renderBeeswarmSvg,
    renderDecisionSvg,
    renderDeltaTable,
    renderF1Table,
    renderForceSvg,
} from "../src/render.js";
import { fixture } from "./helpers.js";
import type { ExplainResponse, GlobalResponse, ReportResponse } from "../src/types.js";

const explain = fixture<ExplainResponse>("explain.json");
const globalExp = fixture<GlobalResponse>("global.json");
const report = fixture<ReportResponse>("report.json");

describe("svg renderers are pure functions of server payloads", () => {
    it("force svg is stable and well formed", () => {
        const a = renderForceSvg(explain.plots.force);
        const b = renderForceSvg(explain.plots.force);
        expect(a).toBe(b);
        expect(a.startsWith("<svg")).toBe(true);
        expect(a).toContain("force-chart");
        expect(a).toContain("<rect");
    });

    it("decision svg lists every feature label", () => {
        const svg = renderDecisionSvg(explain.plots.decision);
        for (const point of explain.plots.decision.points.slice(0, 3)) {
            expect(svg).toContain(point.name.replace(/&/g, "&amp;"));
        }
        expect(svg).toContain("polyline");
    });

    it("beeswarm svg draws a circle per point", () => {
        const target = globalExp.global.targets[0];
        const data = globalExp.plots.beeswarm[target];
        const svg = renderBeeswarmSvg(data);
        const expected = data.rows.reduce((n, r) => n + r.points.length, 0);
        expect(svg.match(/<circle/g)!.length).toBe(expected);
    });

    it("bar svg draws grouped bars per target", () => {
        const rows = barChartRows(globalExp.plots.bar, 6);
        const svg = renderBarSvg(rows);
        expect(svg.match(/<rect/g)!.length)
            .toBe(rows.length * globalExp.plots.bar.series.length);
    });

    it("f1 table bolds top two and stars the suggestion", () => {
        const html = renderF1Table(f1Table(report.reports, report.suggested));
        expect(html).toContain("★");
        expect(html.match(/<b>/g)!.length).toBeGreaterThanOrEqual(2);
    });

    it("delta table renders every alternative", () => {
        const body = fixture("whatif.json");
        const html = renderDeltaTable(whatIfDeltas(body));
        expect(html).toContain("<table");
        expect(html.match(/<tr><td>/g)!.length).toBe(Object.keys(body.delta).length);
    });
});

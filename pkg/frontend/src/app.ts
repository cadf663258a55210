/** Browser entry point: wires the API client, view state, and renderers into
 * the page. Charts come straight from server plot payloads. */

import { ApiClient } from "./api.js";
import { barChartRows, f1Table, whatIfDeltas } from "./charts.js";
import { layoutNet } from "./netview.js";
import {
    initialState,
    reconcile,
    selectDecisionPoint,
    selectKind,
    selectSession,
    selectTab,
    setOverride,
    ViewState,
} from "./state.js";
import {
    renderBarSvg,
    renderBeeswarmSvg,
    renderDecisionSvg,
    renderDeltaTable,
    renderEmptyState,
    renderF1Table,
    renderForceSvg,
    renderNetSvg,
} from "./render.js";
import type { DiscoverResponse, ReportResponse } from "./types.js";

const api = new ApiClient("");
let state: ViewState = initialState();
let discover: DiscoverResponse | null = null;
let report: ReportResponse | null = null;

function el(id: string): HTMLElement {
    const node = document.getElementById(id);
    if (!node) throw new Error(`missing element #${id}`);
    return node;
}

function renderModelBrowser(): void {
    if (!discover) {
        el("net").innerHTML = renderEmptyState("Upload a log and discover a model to begin.");
        return;
    }
    const layout = layoutNet(discover);
    el("net").innerHTML = layout.empty
        ? renderEmptyState("The discovered model has no decision points.")
        : renderNetSvg(layout);
    for (const node of document.querySelectorAll<SVGElement>(".net-view .decision")) {
        node.addEventListener("click", () => {
            const place = node.dataset.id!;
            state = selectDecisionPoint(state, place, discover!);
            void refreshDecisionPanel();
        });
    }
}

async function refreshDecisionPanel(): Promise<void> {
    if (!state.sessionId || !state.selectedDecisionPoint) return;
    try {
        report = await api.report(state.sessionId, state.selectedDecisionPoint);
    } catch {
        report = null;
    }
    state = reconcile(state, discover, report);
    el("training").innerHTML = report
        ? renderF1Table(f1Table(report.reports, report.suggested))
        : renderEmptyState("Not trained yet.");
    for (const row of document.querySelectorAll<HTMLTableRowElement>(".f1-table tbody tr")) {
        row.addEventListener("click", () => {
            if (report) state = selectKind(state, row.dataset.kind!, report);
        });
    }
}

async function runTraining(featureSpec: Record<string, string[]>): Promise<void> {
    if (!state.sessionId || !state.selectedDecisionPoint) return;
    const job = await api.train(state.sessionId, state.selectedDecisionPoint, featureSpec);
    el("training").innerHTML = renderEmptyState(`training… (${job.state})`);
    const final = await api.pollJob(state.sessionId, job.job_id, 500, (j) => {
        el("training").innerHTML = renderEmptyState(
            `training… ${(j.progress * 100).toFixed(0)}%`);
    });
    if (final.state === "failed") {
        el("training").innerHTML = renderEmptyState(`training failed: ${final.error}`);
        return;
    }
    await refreshDecisionPanel();
}

async function explainInstance(features: Record<string, unknown>): Promise<void> {
    if (!state.sessionId || !state.selectedDecisionPoint) return;
    const body = await api.explain(state.sessionId, state.selectedDecisionPoint, features,
                                   { method: "auto" });
    el("force").innerHTML = renderForceSvg(body.plots.force);
    el("decision").innerHTML = renderDecisionSvg(body.plots.decision);
}

async function showGlobal(): Promise<void> {
    if (!state.sessionId || !state.selectedDecisionPoint) return;
    const body = await api.globalExplanation(state.sessionId, state.selectedDecisionPoint,
                                             { n_permutations: 30 });
    el("global-bar").innerHTML = renderBarSvg(barChartRows(body.plots.bar, 10));
    const firstTarget = body.global.targets[0];
    if (firstTarget) {
        el("global-beeswarm").innerHTML =
            renderBeeswarmSvg(body.plots.beeswarm[firstTarget]);
    }
}

async function runWhatIf(features: Record<string, unknown>,
                         overrides: Record<string, unknown>): Promise<void> {
    if (!state.sessionId || !state.selectedDecisionPoint) return;
    const body = await api.whatIf(state.sessionId, state.selectedDecisionPoint,
                                  features, overrides);
    const labelOf = (t: string) => body.labels[t] ?? t;
    el("whatif").innerHTML =
        renderEmptyState(`before: ${labelOf(body.before.argmax)} → after: ${labelOf(body.after.argmax)}`) +
        renderDeltaTable(whatIfDeltas(body));
}

async function bootstrap(): Promise<void> {
    const upload = el("upload") as HTMLInputElement;
    upload.addEventListener("change", async () => {
        const file = upload.files?.[0];
        if (!file) return;
        const content = await file.text();
        const session = await api.createSession("xes", content);
        state = selectSession(state, session.session_id);
        discover = await api.discover(session.session_id);
        renderModelBrowser();
    });
    el("train-btn").addEventListener("click", () => {
        const raw = (el("feature-spec") as HTMLTextAreaElement).value;
        void runTraining(JSON.parse(raw));
    });
    el("explain-btn").addEventListener("click", () => {
        const raw = (el("instance") as HTMLTextAreaElement).value;
        void explainInstance(JSON.parse(raw));
    });
    el("global-btn").addEventListener("click", () => void showGlobal());
    el("whatif-btn").addEventListener("click", () => {
        const features = JSON.parse((el("instance") as HTMLTextAreaElement).value);
        const overrides = JSON.parse((el("overrides") as HTMLTextAreaElement).value);
        state = Object.entries(overrides).reduce(
            (s, [k, v]) => setOverride(s, k, v), state);
        void runWhatIf(features, overrides);
    });
    for (const tab of document.querySelectorAll<HTMLElement>("[data-tab]")) {
        tab.addEventListener("click", () => {
            state = selectTab(state, tab.dataset.tab as ViewState["activeTab"]);
        });
    }
    renderModelBrowser();
}

if (typeof document !== "undefined") {
    document.addEventListener("DOMContentLoaded", () => void bootstrap());
}

/** Dashboard view state: selections always reference entities the server
 * reported; anything stale is pruned on load. */

import type { DiscoverResponse, ReportResponse } from "./types.js";

export type PlotTab = "force" | "decision" | "beeswarm" | "global" | "whatif";

export interface ViewState {
    sessionId: string | null;
    selectedDecisionPoint: string | null;
    selectedKind: string | null;
    instanceFeatures: Record<string, unknown>;
    overrides: Record<string, unknown>;
    activeTab: PlotTab;
}

export function initialState(): ViewState {
    return {
        sessionId: null,
        selectedDecisionPoint: null,
        selectedKind: null,
        instanceFeatures: {},
        overrides: {},
        activeTab: "force",
    };
}

export function selectSession(state: ViewState, sessionId: string): ViewState {
    return { ...initialState(), sessionId, activeTab: state.activeTab };
}

export function selectDecisionPoint(state: ViewState, place: string,
                                    discover: DiscoverResponse): ViewState {
    if (!discover.decision_points.some((d) => d.place === place)) {
        throw new Error(`unknown decision point ${place}`);
    }
    return { ...state, selectedDecisionPoint: place, selectedKind: null, overrides: {} };
}

export function selectKind(state: ViewState, kind: string,
                           report: ReportResponse): ViewState {
    if (!(kind in report.reports)) {
        throw new Error(`unknown model kind ${kind}`);
    }
    return { ...state, selectedKind: kind };
}

export function setOverride(state: ViewState, feature: string,
                            value: unknown): ViewState {
    return { ...state, overrides: { ...state.overrides, [feature]: value } };
}

export function clearOverrides(state: ViewState): ViewState {
    return { ...state, overrides: {} };
}

export function selectTab(state: ViewState, tab: PlotTab): ViewState {
    return { ...state, activeTab: tab };
}

/** Prune selections that no longer exist server-side (validated on load). */
export function reconcile(state: ViewState, discover: DiscoverResponse | null,
                          report: ReportResponse | null): ViewState {
    let next = { ...state };
    if (
        next.selectedDecisionPoint !== null &&
        (!discover ||
            !discover.decision_points.some((d) => d.place === next.selectedDecisionPoint))
    ) {
        next = { ...next, selectedDecisionPoint: null, selectedKind: null };
    }
    if (next.selectedKind !== null && (!report || !(next.selectedKind in report.reports))) {
        next = { ...next, selectedKind: null };
    }
    return next;
}

export interface ValidationIssue {
    feature: string;
    message: string;
}

/** Inline validation for what-if overrides: numeric features must stay
 * numeric, and feature names must be known to the trained encoder. */
export function validateOverrides(overrides: Record<string, unknown>,
                                  knownSources: string[],
                                  numericSources: string[]): ValidationIssue[] {
    const issues: ValidationIssue[] = [];
    for (const [feature, value] of Object.entries(overrides)) {
        if (!knownSources.includes(feature)) {
            issues.push({ feature, message: "unknown feature" });
        } else if (
            numericSources.includes(feature) &&
            (typeof value !== "number" || !Number.isFinite(value))
        ) {
            issues.push({ feature, message: "must be a finite number" });
        }
    }
    return issues;
}

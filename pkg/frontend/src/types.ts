/** Payload types mirroring the service JSON responses. */

export interface SessionInfo {
    session_id: string;
    schema: Record<string, string>;
    trace_count: number;
    event_count: number;
    warnings: string[];
}

export interface TransitionRef {
    id: string;
    label: string | null;
}

export interface DecisionPointInfo {
    place: string;
    alternatives: TransitionRef[];
}

export interface NetPayload {
    places: string[];
    transitions: TransitionRef[];
    arcs: [string, string][];
    initial_marking: Record<string, number>;
    final_marking: Record<string, number>;
}

export interface DiscoverResponse {
    pnml: string;
    dot: string;
    net: NetPayload;
    decision_points: DecisionPointInfo[];
}

export interface JobStatus {
    job_id: string;
    place: string;
    state: "queued" | "running" | "done" | "failed";
    progress: number;
    error: string | null;
}

export interface CVReportPayload {
    kind: string;
    fold_f1: number[];
    mean_f1: number;
    params: Record<string, unknown>;
    degenerate: boolean;
    loo_fallback: boolean;
}

export interface ReportResponse {
    reports: Record<string, CVReportPayload>;
    suggested: string | null;
    degenerate: boolean;
    seed: number;
}

export interface PredictResponse {
    decision_mapping: Record<string, number>;
    argmax: string;
    labels: Record<string, string | null>;
}

export interface Attribution {
    name: string;
    value: number;
    feature_value: number | null;
}

export interface ExplanationPayload {
    target: string;
    base_value: number;
    predicted_value: number;
    method: string;
    attributions: Attribution[];
    metadata: Record<string, unknown>;
    se?: Record<string, number>;
}

export interface ForceSegment {
    name: string;
    value: number;
    start: number;
    end: number;
    feature_value: number | null;
}

export interface ForcePlotData {
    type: "force";
    target: string;
    base_value: number;
    predicted_value: number;
    segments: ForceSegment[];
}

export interface DecisionPlotPoint {
    name: string;
    value: number;
    cumulative: number;
}

export interface DecisionPlotData {
    type: "decision";
    target: string;
    base_value: number;
    predicted_value: number;
    points: DecisionPlotPoint[];
}

export interface BarEntry {
    name: string;
    mean_abs: number;
}

export interface BarPlotData {
    type: "bar";
    targets: string[];
    series: { target: string; bars: BarEntry[] }[];
    names: string[];
}

export interface BeeswarmRow {
    name: string;
    mean_abs: number;
    points: { value: number; feature_value: number }[];
}

export interface BeeswarmPlotData {
    type: "beeswarm";
    target: string;
    rows: BeeswarmRow[];
}

export interface ExplainResponse {
    explanation: ExplanationPayload;
    plots: {
        force: ForcePlotData;
        decision: DecisionPlotData;
        beeswarm: unknown;
        bar: unknown;
    };
}

export interface GlobalResponse {
    global: {
        targets: string[];
        unit_names: string[];
        unit_sources: string[];
        mean_abs: Record<string, number[]>;
        instance_count: number;
    };
    plots: {
        bar: BarPlotData;
        beeswarm: Record<string, BeeswarmPlotData>;
    };
    labels: Record<string, string | null>;
}

export interface SideDescription {
    decision_mapping: Record<string, number>;
    argmax: string;
    explanation: ExplanationPayload;
}

export interface WhatIfResponse {
    before: SideDescription;
    after: SideDescription;
    delta: Record<string, number>;
    labels: Record<string, string | null>;
}

import { describe, expect, it } from "vitest";

import {
    clearOverrides,
    initialState,
    reconcile,
    selectDecisionPoint,
    selectKind,
    selectSession,
    selectTab,
    setOverride,
    validateOverrides,
} from "../src/state.js";
import { fixture } from "./helpers.js";
import type { DiscoverResponse, ReportResponse } from "../src/types.js";

const discover = fixture<DiscoverResponse>("discover.json");
const report = fixture<ReportResponse>("report.json");
const session = fixture("session.json");

describe("view state", () => {
    it("selecting a session resets decision-point state", () => {
        let state = initialState();
        state = selectSession(state, session.session_id);
        expect(state.sessionId).toBe(session.session_id);
        expect(state.selectedDecisionPoint).toBeNull();
    });

    it("only server-side decision points are selectable", () => {
        let state = selectSession(initialState(), session.session_id);
        const place = discover.decision_points[0].place;
        state = selectDecisionPoint(state, place, discover);
        expect(state.selectedDecisionPoint).toBe(place);
        expect(() => selectDecisionPoint(state, "p999", discover)).toThrow();
    });

    it("only reported kinds are selectable", () => {
        let state = selectSession(initialState(), session.session_id);
        state = selectDecisionPoint(state, discover.decision_points[0].place, discover);
        const kind = Object.keys(report.reports)[0];
        state = selectKind(state, kind, report);
        expect(state.selectedKind).toBe(kind);
        expect(() => selectKind(state, "made-up", report)).toThrow();
    });

    it("reconcile prunes stale selections on load", () => {
        const stale = {
            ...initialState(),
            sessionId: session.session_id,
            selectedDecisionPoint: "gone",
            selectedKind: "gone",
        };
        const next = reconcile(stale, discover, report);
        expect(next.selectedDecisionPoint).toBeNull();
        expect(next.selectedKind).toBeNull();

        const valid = {
            ...initialState(),
            sessionId: session.session_id,
            selectedDecisionPoint: discover.decision_points[0].place,
            selectedKind: Object.keys(report.reports)[0],
        };
        expect(reconcile(valid, discover, report)).toEqual(valid);
    });

    it("overrides accumulate and clear", () => {
        let state = initialState();
        state = setOverride(state, "case:base price per item", 40);
        state = setOverride(state, "case:total price", 80);
        expect(Object.keys(state.overrides)).toHaveLength(2);
        state = clearOverrides(state);
        expect(state.overrides).toEqual({});
    });

    it("tab selection is tracked", () => {
        const state = selectTab(initialState(), "global");
        expect(state.activeTab).toBe("global");
    });

    it("validateOverrides flags unknown features and bad numerics", () => {
        const known = ["case:origin", "case:base price per item"];
        const numeric = ["case:base price per item"];
        const issues = validateOverrides(
            { "case:nonsense": 1, "case:base price per item": "forty" },
            known, numeric);
        expect(issues).toHaveLength(2);
        expect(issues[0].feature).toBe("case:nonsense");
        expect(issues[1].message).toContain("number");
        expect(validateOverrides({ "case:base price per item": 40 }, known, numeric))
            .toHaveLength(0);
    });
});

/** Typed client for the decision-mining service.
 *
 * Every supported call is declared in CALL_SHAPES with its OpenAPI path
 * template and the body keys the dashboard may send; the contract test suite
 * replays these shapes against the service's OpenAPI description.
 */

import type {
    DiscoverResponse,
    ExplainResponse,
    GlobalResponse,
    JobStatus,
    PredictResponse,
    ReportResponse,
    SessionInfo,
    WhatIfResponse,
} from "./types.js";

export interface CallShape {
    method: "get" | "post";
    path: string; // OpenAPI template, e.g. /sessions/{sid}/discover
    bodyKeys: string[];
    queryKeys: string[];
}

export const CALL_SHAPES: Record<string, CallShape> = {
    createSession: {
        method: "post",
        path: "/sessions",
        bodyKeys: ["format", "content", "mapping"],
        queryKeys: [],
    },
    discover: {
        method: "post",
        path: "/sessions/{sid}/discover",
        bodyKeys: [],
        queryKeys: [],
    },
    train: {
        method: "post",
        path: "/sessions/{sid}/decision-points/{place}/train",
        bodyKeys: ["feature_spec", "kinds", "seed", "folds"],
        queryKeys: [],
    },
    jobStatus: {
        method: "get",
        path: "/sessions/{sid}/jobs/{job_id}",
        bodyKeys: [],
        queryKeys: [],
    },
    report: {
        method: "get",
        path: "/sessions/{sid}/decision-points/{place}/report",
        bodyKeys: [],
        queryKeys: [],
    },
    predict: {
        method: "post",
        path: "/sessions/{sid}/decision-points/{place}/predict",
        bodyKeys: ["features", "events"],
        queryKeys: [],
    },
    explain: {
        method: "post",
        path: "/sessions/{sid}/decision-points/{place}/explain",
        bodyKeys: ["features", "events", "target", "method", "n_permutations", "seed"],
        queryKeys: [],
    },
    globalExplanation: {
        method: "get",
        path: "/sessions/{sid}/decision-points/{place}/global-explanation",
        bodyKeys: [],
        queryKeys: ["target", "exclude", "method", "n_permutations", "seed"],
    },
    whatIf: {
        method: "post",
        path: "/sessions/{sid}/decision-points/{place}/whatif",
        bodyKeys: ["features", "events", "overrides"],
        queryKeys: [],
    },
    openapi: {
        method: "get",
        path: "/spec",
        bodyKeys: [],
        queryKeys: [],
    },
};

export class ApiError extends Error {
    constructor(readonly status: number, message: string) {
        super(message);
    }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

function fill(template: string, params: Record<string, string>): string {
    return template.replace(/\{(\w+)\}/g, (_, key) => {
        const value = params[key];
        if (value === undefined) throw new Error(`missing path parameter ${key}`);
        return encodeURIComponent(value);
    });
}

export class ApiClient {
    constructor(
        private readonly baseUrl: string = "",
        private readonly fetchFn: FetchLike = (...args) => fetch(...args),
    ) {}

    private async call<T>(
        shape: CallShape,
        pathParams: Record<string, string>,
        body?: unknown,
        query?: Record<string, string>,
    ): Promise<T> {
        let url = this.baseUrl + fill(shape.path, pathParams);
        if (query && Object.keys(query).length) {
            url += "?" + new URLSearchParams(query).toString();
        }
        const init: RequestInit = { method: shape.method.toUpperCase() };
        if (body !== undefined) {
            init.headers = { "content-type": "application/json" };
            init.body = JSON.stringify(body);
        }
        const resp = await this.fetchFn(url, init);
        const doc = await resp.json();
        if (!resp.ok) {
            throw new ApiError(resp.status, doc?.message ?? resp.statusText);
        }
        return doc as T;
    }

    createSession(format: "xes" | "csv", content: string,
                  mapping?: Record<string, string>): Promise<SessionInfo> {
        const body: Record<string, unknown> = { format, content };
        if (mapping) body.mapping = mapping;
        return this.call(CALL_SHAPES.createSession, {}, body);
    }

    discover(sid: string): Promise<DiscoverResponse> {
        return this.call(CALL_SHAPES.discover, { sid });
    }

    train(sid: string, place: string, featureSpec: Record<string, string[]>,
          kinds?: string[], seed = 0): Promise<JobStatus> {
        const body: Record<string, unknown> = { feature_spec: featureSpec, seed };
        if (kinds) body.kinds = kinds;
        return this.call(CALL_SHAPES.train, { sid, place }, body);
    }

    jobStatus(sid: string, jobId: string): Promise<JobStatus> {
        return this.call(CALL_SHAPES.jobStatus, { sid, job_id: jobId });
    }

    async pollJob(sid: string, jobId: string, intervalMs = 300,
                  onUpdate?: (job: JobStatus) => void): Promise<JobStatus> {
        for (;;) {
            const job = await this.jobStatus(sid, jobId);
            onUpdate?.(job);
            if (job.state === "done" || job.state === "failed") return job;
            await new Promise((resolve) => setTimeout(resolve, intervalMs));
        }
    }

    report(sid: string, place: string): Promise<ReportResponse> {
        return this.call(CALL_SHAPES.report, { sid, place });
    }

    predict(sid: string, place: string,
            features: Record<string, unknown>): Promise<PredictResponse> {
        return this.call(CALL_SHAPES.predict, { sid, place }, { features });
    }

    explain(sid: string, place: string, features: Record<string, unknown>,
            options: { target?: string; method?: string; n_permutations?: number;
                       seed?: number } = {}): Promise<ExplainResponse> {
        return this.call(CALL_SHAPES.explain, { sid, place },
                         { features, ...options });
    }

    globalExplanation(sid: string, place: string,
                      options: { exclude?: string; n_permutations?: number } = {},
    ): Promise<GlobalResponse> {
        const query: Record<string, string> = {};
        if (options.exclude) query.exclude = options.exclude;
        if (options.n_permutations) query.n_permutations = String(options.n_permutations);
        return this.call(CALL_SHAPES.globalExplanation, { sid, place }, undefined, query);
    }

    whatIf(sid: string, place: string, features: Record<string, unknown>,
           overrides: Record<string, unknown>): Promise<WhatIfResponse> {
        return this.call(CALL_SHAPES.whatIf, { sid, place }, { features, overrides });
    }
}

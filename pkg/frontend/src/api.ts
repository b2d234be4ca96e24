/**
 * Typed client for the arena server. Every call carries a deadline; feedback
 * submissions carry an idempotency key so retries can never double-submit.
 */

import {
  ErrorBodySchema,
  EvaluatorInfoSchema,
  FeedbackAckSchema,
  FeedbackPayload,
  LeaderboardFilter,
  LeaderboardSnapshotSchema,
  RankingMethod,
  SessionRequestPayload,
  SessionViewSchema,
  type EvaluatorInfo,
  type FeedbackAck,
  type LeaderboardSnapshot,
  type SessionView,
} from "./schema.js";

export class ApiError extends Error {
  constructor(
    public readonly code: string,
    message: string,
    public readonly status: number,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export const SESSION_LOST_CODES = new Set([
  "session_expired",
  "session_closed",
  "session_not_found",
  "unknown_token",
]);

export function newIdempotencyKey(): string {
  const c = globalThis.crypto;
  if (c && "randomUUID" in c) return `console-${c.randomUUID()}`;
  return `console-${Date.now()}-${Math.floor(Math.random() * 1e9)}`;
}

export class ArenaApi {
  constructor(
    public readonly baseUrl: string,
    private readonly timeoutMs: number = 10_000,
    private readonly fetchFn: typeof fetch = (...args) => fetch(...args),
  ) {}

  private async request<T>(
    method: string,
    path: string,
    opts: { body?: unknown; headers?: Record<string, string> } = {},
  ): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchFn(this.baseUrl.replace(/\/$/, "") + path, {
        method,
        headers: {
          ...(opts.body !== undefined ? { "content-type": "application/json" } : {}),
          ...(opts.headers ?? {}),
        },
        body: opts.body !== undefined ? JSON.stringify(opts.body) : undefined,
        signal: AbortSignal.timeout(this.timeoutMs),
      });
    } catch (err) {
      throw new ApiError("transport", `cannot reach arena server: ${String(err)}`, 0);
    }
    const text = await response.text();
    const parsed: unknown = text ? JSON.parse(text) : {};
    if (!response.ok) {
      const body = ErrorBodySchema.safeParse(parsed);
      if (body.success) {
        throw new ApiError(body.data.error.code, body.data.error.message, response.status);
      }
      throw new ApiError("http_error", `HTTP ${response.status}`, response.status);
    }
    return parsed as T;
  }

  async registerEvaluator(evaluatorId: string): Promise<EvaluatorInfo> {
    const raw = await this.request<unknown>("POST", "/evaluators", {
      body: { evaluator_id: evaluatorId },
    });
    return EvaluatorInfoSchema.parse(raw);
  }

  async getEvaluator(evaluatorId: string): Promise<EvaluatorInfo> {
    return EvaluatorInfoSchema.parse(
      await this.request<unknown>("GET", `/evaluators/${encodeURIComponent(evaluatorId)}`),
    );
  }

  async startSession(evaluatorId: string, ownPolicyId?: string): Promise<SessionView> {
    const payload: SessionRequestPayload = { evaluator_id: evaluatorId };
    if (ownPolicyId) payload.policy_id = ownPolicyId;
    const raw = await this.request<unknown>("POST", "/sessions", { body: payload });
    return SessionViewSchema.parse(raw);
  }

  async getSession(sessionId: string): Promise<SessionView> {
    return SessionViewSchema.parse(
      await this.request<unknown>("GET", `/sessions/${encodeURIComponent(sessionId)}`),
    );
  }

  async submitFeedback(
    sessionId: string,
    payload: FeedbackPayload,
    idempotencyKey: string,
  ): Promise<FeedbackAck> {
    const raw = await this.request<unknown>(
      "POST",
      `/sessions/${encodeURIComponent(sessionId)}/feedback`,
      { body: payload, headers: { "idempotency-key": idempotencyKey } },
    );
    return FeedbackAckSchema.parse(raw);
  }

  async leaderboard(
    method: RankingMethod,
    filter: LeaderboardFilter,
  ): Promise<LeaderboardSnapshot> {
    const query = new URLSearchParams({ method, filter });
    const raw = await this.request<unknown>("GET", `/leaderboard?${query.toString()}`);
    return LeaderboardSnapshotSchema.parse(raw);
  }

  async fetchReportSummary(policyId: string): Promise<string | null> {
    // report summaries are optional static documents published next to the
    // API; a missing one renders as an empty state
    try {
      const response = await this.fetchFn(
        `${this.baseUrl.replace(/\/$/, "")}/reports/${encodeURIComponent(policyId)}`,
        { signal: AbortSignal.timeout(this.timeoutMs) },
      );
      if (!response.ok) return null;
      return await response.text();
    } catch {
      return null;
    }
  }
}

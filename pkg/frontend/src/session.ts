/**
 * Session lifecycle for one browser tab: at most one active session, a
 * deadline countdown derived from the server's timestamp, and resumption
 * after reload via GET /sessions/{id}. The only client-held state is the
 * session id pointer; everything else is refetched from the server.
 */

import { ApiError, ArenaApi, SESSION_LOST_CODES, newIdempotencyKey } from "./api.js";
import type { FormState } from "./form.js";
import { toPayload } from "./form.js";
import type { FeedbackAck, SessionView } from "./schema.js";

const STORAGE_KEY = "arenakit.active_session_id";

export type SessionPhase = "idle" | "active" | "submitted" | "lost";

export class SessionController {
  phase: SessionPhase = "idle";
  view: SessionView | null = null;
  lastError: ApiError | null = null;
  private idempotencyKey: string | null = null;

  constructor(
    private readonly api: ArenaApi,
    private readonly storage: Pick<Storage, "getItem" | "setItem" | "removeItem"> =
      globalThis.sessionStorage,
  ) {}

  async start(evaluatorId: string): Promise<SessionView> {
    if (this.phase === "active") {
      throw new Error("a session is already active in this tab");
    }
    const view = await this.api.startSession(evaluatorId);
    this.adopt(view);
    return view;
  }

  /** Re-attach to the session recorded before a reload, if any. */
  async resume(): Promise<SessionView | null> {
    const sessionId = this.storage.getItem(STORAGE_KEY);
    if (!sessionId) return null;
    let view: SessionView;
    try {
      view = await this.api.getSession(sessionId);
    } catch (err) {
      if (err instanceof ApiError && SESSION_LOST_CODES.has(err.code)) {
        this.markLost(err);
        return null;
      }
      throw err;
    }
    if (view.state !== "assigned") {
      this.storage.removeItem(STORAGE_KEY);
      return null;
    }
    this.adopt(view);
    return view;
  }

  private adopt(view: SessionView) {
    this.view = view;
    this.phase = "active";
    this.lastError = null;
    this.idempotencyKey = newIdempotencyKey();
    this.storage.setItem(STORAGE_KEY, view.session_id);
  }

  private markLost(err: ApiError) {
    this.phase = "lost";
    this.lastError = err;
    this.storage.removeItem(STORAGE_KEY);
  }

  /** Seconds until the server-side deadline; never negative. */
  countdownSeconds(nowMs: number = Date.now()): number {
    if (!this.view) return 0;
    return Math.max(0, (Date.parse(this.view.deadline) - nowMs) / 1000);
  }

  async submit(form: FormState, instruction: string, mediaRefs: string[] = []): Promise<FeedbackAck> {
    if (this.phase !== "active" || !this.view) {
      throw new Error("no active session");
    }
    const payload = toPayload(form, instruction, mediaRefs);
    try {
      const ack = await this.api.submitFeedback(
        this.view.session_id,
        payload,
        this.idempotencyKey ?? newIdempotencyKey(),
      );
      this.phase = "submitted";
      this.storage.removeItem(STORAGE_KEY);
      return ack;
    } catch (err) {
      if (err instanceof ApiError && SESSION_LOST_CODES.has(err.code)) {
        this.markLost(err); // terminal: no retry loop against a dead session
      }
      throw err;
    }
  }
}

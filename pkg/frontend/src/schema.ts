/**
 * Wire types for the arena server API, with runtime validation.
 * Request payload shapes are pinned by the JSON Schema golden files in
 * test/golden; these zod schemas are the in-app mirror of the same contract.
 */

import { z } from "zod";

export const SessionViewSchema = z.object({
  session_id: z.string().uuid(),
  endpoints: z.object({ A: z.string(), B: z.string() }),
  created_at: z.string(),
  deadline: z.string(),
  state: z.enum(["assigned", "completed", "cancelled"]),
});
export type SessionView = z.infer<typeof SessionViewSchema>;

export const FeedbackAckSchema = z.object({
  status: z.literal("ok"),
  session_id: z.string(),
  replayed: z.boolean(),
  earned: z.number().int(),
  balance: z.number().int(),
});
export type FeedbackAck = z.infer<typeof FeedbackAckSchema>;

export const LeaderboardEntrySchema = z.object({
  policy_id: z.string(),
  display_name: z.string(),
  open_source: z.boolean(),
  score: z.number(),
});

export const LeaderboardSnapshotSchema = z.object({
  method: z.string(),
  filter: z.string(),
  generated_at: z.string(),
  record_count: z.number().int(),
  entries: z.array(LeaderboardEntrySchema),
});
export type LeaderboardSnapshot = z.infer<typeof LeaderboardSnapshotSchema>;

export const EvaluatorInfoSchema = z.object({
  evaluator_id: z.string(),
  earned: z.number().int(),
  spent: z.number().int(),
  sponsored_base: z.number().int(),
  balance: z.number().int(),
});
export type EvaluatorInfo = z.infer<typeof EvaluatorInfoSchema>;

export const ErrorBodySchema = z.object({
  error: z.object({ code: z.string(), message: z.string() }),
});

export interface SessionRequestPayload {
  evaluator_id: string;
  policy_id?: string;
}

export interface FeedbackPayload {
  instruction: string;
  progress_a: number;
  progress_b: number;
  preference: "A" | "B" | "tie";
  explanation: string;
  media_refs: string[];
}

export const RANKING_METHODS = ["task_em", "bt", "elo", "progress"] as const;
export type RankingMethod = (typeof RANKING_METHODS)[number];
export const METHOD_LABELS: Record<RankingMethod, string> = {
  task_em: "TASK",
  bt: "BT",
  elo: "Elo",
  progress: "PROG",
};

export const LEADERBOARD_FILTERS = ["all", "open_source"] as const;
export type LeaderboardFilter = (typeof LEADERBOARD_FILTERS)[number];

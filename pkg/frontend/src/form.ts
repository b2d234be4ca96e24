/**
 * Feedback form state: two integer progress sliders, a preference selector,
 * and a required explanation. Submission stays disabled until every field is
 * valid; validation mirrors the server's rules so a well-behaved client
 * never triggers a 400.
 */

import type { FeedbackPayload } from "./schema.js";

export interface FormState {
  progressA: number;
  progressB: number;
  preference: "A" | "B" | "tie" | null;
  explanation: string;
}

export interface FieldErrors {
  progressA?: string;
  progressB?: string;
  preference?: string;
  explanation?: string;
}

export function emptyForm(): FormState {
  return { progressA: 50, progressB: 50, preference: null, explanation: "" };
}

function progressError(value: number): string | undefined {
  if (!Number.isInteger(value)) return "progress must be an integer";
  if (value < 0 || value > 100) return "progress must be between 0 and 100";
  return undefined;
}

export function validateForm(state: FormState): FieldErrors {
  const errors: FieldErrors = {};
  const a = progressError(state.progressA);
  if (a) errors.progressA = a;
  const b = progressError(state.progressB);
  if (b) errors.progressB = b;
  if (state.preference !== "A" && state.preference !== "B" && state.preference !== "tie") {
    errors.preference = "pick A, B or tie";
  }
  if (!state.explanation.trim()) {
    errors.explanation = "an explanation is required";
  }
  return errors;
}

export function isSubmittable(state: FormState): boolean {
  return Object.keys(validateForm(state)).length === 0;
}

export function toPayload(
  state: FormState,
  instruction: string,
  mediaRefs: string[] = [],
): FeedbackPayload {
  const errors = validateForm(state);
  if (Object.keys(errors).length > 0) {
    throw new Error(`form is not submittable: ${JSON.stringify(errors)}`);
  }
  if (!instruction.trim()) {
    throw new Error("instruction must be non-empty");
  }
  return {
    instruction,
    progress_a: state.progressA,
    progress_b: state.progressB,
    preference: state.preference as "A" | "B" | "tie",
    explanation: state.explanation,
    media_refs: mediaRefs,
  };
}

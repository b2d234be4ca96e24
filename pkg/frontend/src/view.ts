/**
 * Session page: request a blind pair, enter the task instruction, watch the
 * deadline countdown, fill in the feedback form, submit. Policies are only
 * ever labeled "Policy A" and "Policy B".
 */

import { ApiError } from "./api.js";
import { clear, el, errorBanner } from "./dom.js";
import { emptyForm, isSubmittable, validateForm, type FormState } from "./form.js";
import type { SessionController } from "./session.js";

export class SessionPanel {
  form: FormState = emptyForm();
  private countdownTimer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private readonly controller: SessionController,
    private readonly root: HTMLElement,
  ) {}

  renderIdle() {
    this.stopCountdown();
    const evaluatorInput = el("input", {
      type: "text", placeholder: "evaluator id", "data-role": "evaluator-id",
    });
    const startButton = el("button", { "data-role": "start-session" }, ["Start evaluation"]);
    startButton.addEventListener("click", () => {
      void this.start(evaluatorInput.value.trim());
    });
    clear(this.root).append(
      el("h2", {}, ["Run an evaluation"]),
      evaluatorInput,
      startButton,
      el("div", { "data-role": "banner-slot" }),
    );
  }

  async start(evaluatorId: string): Promise<void> {
    if (!evaluatorId) {
      this.banner("validation_failed", "enter an evaluator id first");
      return;
    }
    try {
      await this.controller.start(evaluatorId);
    } catch (err) {
      if (err instanceof ApiError) {
        this.banner(err.code, err.message);
        return;
      }
      throw err;
    }
    this.renderActive();
  }

  async resume(): Promise<boolean> {
    const view = await this.controller.resume();
    if (view) {
      this.renderActive();
      return true;
    }
    return false;
  }

  renderActive() {
    const view = this.controller.view!;
    this.form = emptyForm();
    const countdown = el("span", { "data-role": "countdown" });
    const instruction = el("input", {
      type: "text", placeholder: "task instruction", "data-role": "instruction",
    });

    const sliderA = this.progressSlider("progress-a");
    const sliderB = this.progressSlider("progress-b");
    const preference = el("div", { "data-role": "preference" });
    for (const value of ["A", "B", "tie"] as const) {
      const radio = el("input", {
        type: "radio", name: "preference", value, id: `pref-${value}`,
      });
      radio.addEventListener("change", () => {
        this.form.preference = value;
        this.refreshSubmitState();
      });
      preference.append(radio, el("label", { for: `pref-${value}` }, [
        value === "tie" ? "tie" : `Policy ${value}`,
      ]));
    }
    const explanation = el("textarea", { "data-role": "explanation", required: "" });
    explanation.addEventListener("input", () => {
      this.form.explanation = explanation.value;
      this.refreshSubmitState();
    });
    const submit = el("button", { "data-role": "submit-feedback", disabled: "" }, [
      "Submit feedback",
    ]);
    submit.addEventListener("click", () => {
      void this.submit(instruction.value);
    });

    clear(this.root).append(
      el("h2", {}, ["Blind A/B session"]),
      el("p", { "data-role": "session-id" }, [`session ${view.session_id}`]),
      el("p", {}, ["time remaining: ", countdown]),
      el("div", { class: "pair" }, [
        el("section", { "data-role": "side-A" }, [el("h3", {}, ["Policy A"])]),
        el("section", { "data-role": "side-B" }, [el("h3", {}, ["Policy B"])]),
      ]),
      el("label", {}, ["Task instruction", instruction]),
      el("label", {}, ["Policy A progress (0-100)", sliderA.wrap]),
      el("label", {}, ["Policy B progress (0-100)", sliderB.wrap]),
      el("div", {}, ["Which policy performed better?", preference]),
      el("label", {}, ["Why?", explanation]),
      submit,
      el("div", { "data-role": "field-errors" }),
      el("div", { "data-role": "banner-slot" }),
      el("div", { "data-role": "confirmation" }),
    );
    this.startCountdown(countdown);
    this.refreshSubmitState();
  }

  private progressSlider(role: "progress-a" | "progress-b") {
    const slider = el("input", {
      type: "range", min: "0", max: "100", step: "1", value: "50", "data-role": role,
    });
    const display = el("output", {}, ["50"]);
    slider.addEventListener("input", () => {
      const value = Number(slider.value);
      if (role === "progress-a") this.form.progressA = value;
      else this.form.progressB = value;
      display.textContent = slider.value;
      this.refreshSubmitState();
    });
    return { wrap: el("span", {}, [slider, display]), slider };
  }

  /** Re-read form validity; also used after devtools-style tampering. */
  refreshSubmitState() {
    const submit = this.root.querySelector<HTMLButtonElement>('[data-role="submit-feedback"]');
    if (!submit) return;
    // pick up any direct DOM manipulation of the sliders
    const sliderA = this.root.querySelector<HTMLInputElement>('[data-role="progress-a"]');
    const sliderB = this.root.querySelector<HTMLInputElement>('[data-role="progress-b"]');
    if (sliderA) this.form.progressA = Number(sliderA.value);
    if (sliderB) this.form.progressB = Number(sliderB.value);
    if (isSubmittable(this.form)) {
      submit.removeAttribute("disabled");
    } else {
      submit.setAttribute("disabled", "");
    }
    const errors = validateForm(this.form);
    const slot = this.root.querySelector<HTMLElement>('[data-role="field-errors"]');
    if (slot) {
      clear(slot);
      for (const [field, message] of Object.entries(errors)) {
        slot.append(el("p", { class: "field-error", "data-field": field }, [message]));
      }
    }
  }

  async submit(instruction: string): Promise<void> {
    if (!instruction.trim()) {
      this.banner("validation_failed", "the task instruction is required");
      return;
    }
    this.refreshSubmitState();
    if (!isSubmittable(this.form)) {
      this.banner("validation_failed", "fix the highlighted fields first");
      return;
    }
    try {
      const ack = await this.controller.submit(this.form, instruction);
      this.stopCountdown();
      const confirmation = this.root.querySelector<HTMLElement>('[data-role="confirmation"]');
      if (confirmation) {
        clear(confirmation).append(
          el("p", { "data-role": "credit-balance" }, [
            `Feedback recorded. Credits earned: ${ack.earned}, balance: ${ack.balance}.`,
          ]),
        );
      }
    } catch (err) {
      if (err instanceof ApiError) {
        if (this.controller.phase === "lost") {
          this.renderLost(err);
          return;
        }
        this.banner(err.code, err.message);
        return;
      }
      throw err;
    }
  }

  renderLost(err: ApiError) {
    this.stopCountdown();
    clear(this.root).append(
      el("h2", {}, ["Session lost"]),
      errorBanner(err.code, err.message),
      el("p", { "data-role": "session-lost" }, [
        "This session can no longer accept feedback. Start a new one when ready.",
      ]),
    );
  }

  private banner(code: string, message: string) {
    const slot = this.root.querySelector<HTMLElement>('[data-role="banner-slot"]');
    if (slot) clear(slot).append(errorBanner(code, message));
  }

  private startCountdown(node: HTMLElement) {
    this.stopCountdown();
    const update = () => {
      node.textContent = `${Math.round(this.controller.countdownSeconds())}s`;
    };
    update();
    this.countdownTimer = setInterval(update, 1000);
  }

  stopCountdown() {
    if (this.countdownTimer !== null) {
      clearInterval(this.countdownTimer);
      this.countdownTimer = null;
    }
  }
}

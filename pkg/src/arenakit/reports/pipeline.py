"""Report pipeline: categorize episodes, build and summarize policy reports.

Model output is never trusted: categories must match the closed taxonomy
verbatim, full reports must carry the nine template sections and only cite
known session ids, summaries must carry the nine bullet headings in order.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from ..ranking import Outcome
from .categories import TASK_CATEGORIES, is_task_category
from .refs import RefValidation, validate_refs
from .templates import (
    FULL_REPORT_SECTIONS,
    SUMMARY_HEADINGS,
    render_categorize_prompt,
    render_episode_block,
    render_full_report_prompt,
    render_summary_prompt,
)

CATEGORIZE_RETRIES = 2


class UnparseableCategoryError(Exception):
    pass


class ReportFormatError(Exception):
    pass


class RefValidationError(Exception):
    def __init__(self, validation: RefValidation):
        self.validation = validation
        lines = [v.describe() for v in validation.violations]
        super().__init__("report cites invalid session ids:\n" + "\n".join(lines))


@dataclass(frozen=True)
class EpisodeDossier:
    """Everything the report pipeline knows about one evaluated episode."""

    session_id: str
    instruction: str
    category: str
    scene: str
    result_summary: str
    outcome: Outcome  # head-to-head result for the policy under report

    def __post_init__(self):
        if not is_task_category(self.category):
            raise ValueError(f"{self.category!r} is not one of the task categories")


@dataclass(frozen=True)
class PolicyReport:
    policy_name: str
    text: str
    kind: str  # "full" | "summary"
    refs: tuple[str, ...] = ()


def categorize_episode(first_frames, instruction: str, model_client,
                       retries: int = CATEGORIZE_RETRIES) -> tuple[str, str]:
    """Ask the vision model for a category and scene description.

    The first response line must be a taxonomy entry verbatim; the model
    gets ``retries`` more attempts before the episode is rejected.
    """
    prompt = render_categorize_prompt(instruction)
    frames = tuple(first_frames)
    last = ""
    for _ in range(retries + 1):
        reply = model_client.complete(prompt, images=frames)
        lines = reply.strip().splitlines()
        category = lines[0].strip() if lines else ""
        if is_task_category(category):
            return category, "\n".join(lines[1:]).strip()
        last = category
    raise UnparseableCategoryError(
        f"model reply {last!r} is not one of the {len(TASK_CATEGORIES)} task categories")


def categorize_episodes(episodes, model_client, max_in_flight: int = 4):
    """Categorize (frames, instruction) pairs concurrently, preserving order."""
    episodes = list(episodes)
    with ThreadPoolExecutor(max_workers=max_in_flight) as pool:
        return list(pool.map(
            lambda ep: categorize_episode(ep[0], ep[1], model_client), episodes))


def _check_sections(text: str, headings, label: str) -> None:
    cursor = 0
    for heading in headings:
        found = text.find(heading, cursor)
        if found < 0:
            before = text.find(heading)
            if before >= 0:
                raise ReportFormatError(f"{label}: heading {heading!r} appears out of order")
            raise ReportFormatError(f"{label}: missing heading {heading!r}")
        cursor = found + len(heading)


def build_full_report(policy_name: str, dossiers, model_client) -> PolicyReport:
    """Render the full-report prompt, call the model, validate the result."""
    dossiers = list(dossiers)
    if not dossiers:
        raise ValueError("need at least one episode dossier")
    blocks = [render_episode_block(k + 1, d.session_id, d.instruction, d.category,
                                   d.scene, d.result_summary)
              for k, d in enumerate(dossiers)]
    prompt = render_full_report_prompt(policy_name, blocks)
    text = model_client.complete(prompt)
    _check_sections(text, FULL_REPORT_SECTIONS, "full report")
    validation = validate_refs(text, [d.session_id for d in dossiers])
    if not validation.ok:
        raise RefValidationError(validation)
    return PolicyReport(policy_name=policy_name, text=text, kind="full",
                        refs=tuple(content for _, content in validation.refs))


def summarize_report(full_report: PolicyReport, model_client) -> PolicyReport:
    """Condense a validated full report into the nine-bullet summary."""
    if full_report.kind != "full":
        raise ValueError("summarize_report expects a full report")
    prompt = render_summary_prompt(full_report.text)
    text = model_client.complete(prompt)
    _check_sections(text, SUMMARY_HEADINGS, "summary")
    return PolicyReport(policy_name=full_report.policy_name, text=text, kind="summary",
                        refs=full_report.refs)


def category_winrates(dossiers) -> dict:
    """Win/tie/loss rates per task category; only categories with data appear."""
    tallies: dict[str, dict[str, int]] = {}
    for dossier in dossiers:
        bucket = tallies.setdefault(dossier.category, {"win": 0, "tie": 0, "loss": 0})
        key = {Outcome.WIN: "win", Outcome.TIE: "tie", Outcome.LOSS: "loss"}[Outcome(dossier.outcome)]
        bucket[key] += 1
    out = {}
    for category, counts in tallies.items():
        total = counts["win"] + counts["tie"] + counts["loss"]
        out[category] = {
            "count": total,
            "win_rate": counts["win"] / total,
            "tie_rate": counts["tie"] / total,
            "loss_rate": counts["loss"] / total,
        }
    return out

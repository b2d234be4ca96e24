"""Qualitative analysis pipeline: categorization, reports, citation checks."""

from .categories import TASK_CATEGORIES, is_task_category
from .model_client import (
    HttpChatClient,
    ModelClientError,
    StubChatClient,
    StubChatServer,
)
from .pipeline import (
    EpisodeDossier,
    PolicyReport,
    RefValidationError,
    ReportFormatError,
    UnparseableCategoryError,
    build_full_report,
    categorize_episode,
    categorize_episodes,
    category_winrates,
    summarize_report,
)
from .refs import RefValidation, RefViolation, validate_refs
from .templates import (
    FULL_REPORT_SECTIONS,
    SUMMARY_HEADINGS,
    render_categorize_prompt,
    render_episode_block,
    render_full_report_prompt,
    render_summary_prompt,
)

__all__ = [
    "EpisodeDossier",
    "FULL_REPORT_SECTIONS",
    "HttpChatClient",
    "ModelClientError",
    "PolicyReport",
    "RefValidation",
    "RefValidationError",
    "RefViolation",
    "ReportFormatError",
    "StubChatClient",
    "StubChatServer",
    "SUMMARY_HEADINGS",
    "TASK_CATEGORIES",
    "UnparseableCategoryError",
    "build_full_report",
    "categorize_episode",
    "categorize_episodes",
    "category_winrates",
    "is_task_category",
    "render_categorize_prompt",
    "render_episode_block",
    "render_full_report_prompt",
    "render_summary_prompt",
    "summarize_report",
    "validate_refs",
]

"""The closed task-category taxonomy used by the report pipeline."""

TASK_CATEGORIES = (
    "Pick and Place",
    "Open / Close",
    "Move / Slide",
    "Knock Over / Topple",
    "Cover / Drape / Fold",
    "Group / Organize / Stack",
    "Find / Search",
    "Minimal or No Action",
    "Object Manipulation",
    "Sorting / Classification",
    "Tool Use",
)


def is_task_category(value: str) -> bool:
    """Membership is verbatim: no case folding, no whitespace tolerance."""
    return value in TASK_CATEGORIES

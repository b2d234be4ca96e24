"""Citation-tag validation for generated reports.

Reports cite evidence by wrapping session ids in ``<ref>...</ref>``. Every
tagged span must be a full, well-formed UUID that belongs to the known
session set; anything else is a violation. Violations are data, not
exceptions: callers decide whether to reject the report.
"""

from __future__ import annotations

import re
import uuid
from dataclasses import dataclass

REF_RE = re.compile(r"<ref>(.*?)</ref>", re.DOTALL)
_UUID_RE = re.compile(r"^[0-9a-fA-F]{8}-[0-9a-fA-F]{4}-[0-9a-fA-F]{4}-[0-9a-fA-F]{4}-[0-9a-fA-F]{12}$")


@dataclass(frozen=True)
class RefViolation:
    position: int
    content: str
    kind: str  # "malformed" | "unknown"

    def describe(self) -> str:
        if self.kind == "malformed":
            return (f"offset {self.position}: <ref>{self.content}</ref> is not a full UUID"
                    " (do not shorten, truncate or modify session ids)")
        return f"offset {self.position}: <ref>{self.content}</ref> cites a session id that does not exist"


@dataclass(frozen=True)
class RefValidation:
    refs: tuple[tuple[int, str], ...]
    violations: tuple[RefViolation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def _is_uuid(text: str) -> bool:
    if not _UUID_RE.match(text):
        return False
    try:
        uuid.UUID(text)
    except ValueError:
        return False
    return True


def validate_refs(text: str, known_session_ids) -> RefValidation:
    """Check every ``<ref>`` span in the text against the known id set."""
    known = {str(s).lower() for s in known_session_ids}
    refs = []
    violations = []
    for match in REF_RE.finditer(text):
        content = match.group(1)
        position = match.start()
        refs.append((position, content))
        if not _is_uuid(content):
            violations.append(RefViolation(position=position, content=content, kind="malformed"))
        elif content.lower() not in known:
            violations.append(RefViolation(position=position, content=content, kind="unknown"))
    return RefValidation(refs=tuple(refs), violations=tuple(violations))

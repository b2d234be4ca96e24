"""Central arena service and its HTTP API."""

from .app import build_service, create_app
from .core import ArenaConfig, ArenaService
from .errors import ArenaError
from .storage import Storage

__all__ = ["ArenaConfig", "ArenaError", "ArenaService", "Storage", "build_service", "create_app"]

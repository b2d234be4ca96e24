"""Run the arena server."""

from __future__ import annotations

import argparse

import uvicorn

from .app import build_service, create_app
from .core import ArenaConfig


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="arenakit-server", description="Central evaluation arena server.")
    parser.add_argument("--db", default="arena.db", help="sqlite database path (':memory:' for ephemeral)")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8400)
    parser.add_argument("--timeout-s", type=float, default=1800.0, help="session deadline")
    parser.add_argument("--max-open-sessions", type=int, default=3)
    parser.add_argument("--sponsored-base", type=int, default=0, help="free credits granted to new evaluators")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    config = ArenaConfig(session_timeout_s=args.timeout_s, max_open_sessions=args.max_open_sessions,
                         sponsored_base=args.sponsored_base, seed=args.seed)
    app = create_app(build_service(args.db, config))
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

"""Run a single synthetic policy server from the command line."""

from __future__ import annotations

import argparse
import signal
import threading

from .synthetic import SyntheticPolicySpec, serve_synthetic


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="arenakit-policy",
                                     description="Serve a synthetic policy over the inference protocol.")
    parser.add_argument("--policy-id", required=True, help="label baked into the policy's behavior seed")
    parser.add_argument("--skill", type=float, required=True, help="competence in [0, 1]")
    parser.add_argument("--latency-ms", type=float, default=0.0, help="simulated inference delay")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=0, help="0 binds an ephemeral port")
    args = parser.parse_args(argv)

    spec = SyntheticPolicySpec(policy_id=args.policy_id, skill=args.skill,
                               latency_ms=args.latency_ms, seed=args.seed)
    handle = serve_synthetic(spec, host=args.host, port=args.port)
    print(f"serving policy {spec.policy_id!r} (skill={spec.skill}) at {handle.endpoint}", flush=True)
    stop = threading.Event()
    signal.signal(signal.SIGINT, lambda *a: stop.set())
    signal.signal(signal.SIGTERM, lambda *a: stop.set())
    stop.wait()
    handle.stop()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

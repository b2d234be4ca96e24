"""Simulation harness CLI: world sampling, experiments, synthetic stack."""

from __future__ import annotations

import argparse
import signal
import sys
import threading

from ..gateway.synthetic import SyntheticPolicySpec, serve_synthetic
from .experiments import ExperimentConfig, run_drift_experiment, run_ranking_experiment
from .world import sample_world


def _add_world_args(parser):
    parser.add_argument("--policies", type=int, default=7)
    parser.add_argument("--buckets", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--psi-scale", type=float, default=0.3)
    parser.add_argument("--progress-noise", type=float, default=0.1)


def _add_experiment_args(parser):
    _add_world_args(parser)
    parser.add_argument("--grid", default="25,50,100,200,400,600",
                        help="comma-separated episode counts, ascending")
    parser.add_argument("--reps", type=int, default=20)
    parser.add_argument("--methods", default="task_em,bt,elo,progress")
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--out-dir", default="results")


def _experiment_config(args) -> ExperimentConfig:
    return ExperimentConfig(
        num_policies=args.policies,
        num_buckets=args.buckets,
        episode_grid=tuple(int(x) for x in args.grid.split(",")),
        methods=tuple(args.methods.split(",")),
        repetitions=args.reps,
        seed=args.seed,
        psi_scale=args.psi_scale,
        progress_noise=args.progress_noise,
        workers=args.workers,
    )


def _cmd_world(args) -> int:
    world = sample_world(args.policies, args.buckets, args.seed,
                         psi_scale=args.psi_scale, progress_noise=args.progress_noise)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(world.to_json())
        print(f"wrote {args.out}")
    else:
        print(world.to_json())
    return 0


def _print_summary(report):
    for row in report.summary_rows():
        print(f"{row['label']:>8}  M={row['episodes']:<5d} r={row['pearson_mean']:.4f}"
              f" +/- {row['pearson_std']:.4f}  mmrv={row['mmrv_mean']:.4f} +/- {row['mmrv_std']:.4f}")


def _cmd_rank_exp(args) -> int:
    report = run_ranking_experiment(_experiment_config(args))
    report.write(args.out_dir, "rank_exp")
    _print_summary(report)
    print(f"wrote {args.out_dir}/rank_exp_long.csv and rank_exp_summary.csv")
    return 0


def _cmd_drift_exp(args) -> int:
    report = run_drift_experiment(_experiment_config(args))
    report.write(args.out_dir, "drift_exp")
    _print_summary(report)
    print(f"wrote {args.out_dir}/drift_exp_long.csv and drift_exp_summary.csv")
    return 0


def _cmd_serve_env(args) -> int:
    """Start a bank of synthetic policy servers, optionally registering them
    with a running arena server."""
    skills = [float(x) for x in args.skills.split(",")]
    handles = []
    for idx, skill in enumerate(skills):
        spec = SyntheticPolicySpec(policy_id=f"{args.prefix}-{idx}", skill=skill,
                                   latency_ms=args.latency_ms, seed=args.seed + idx)
        handle = serve_synthetic(spec, host=args.host,
                                 port=0 if args.port_base == 0 else args.port_base + idx)
        handles.append(handle)
        print(f"policy {spec.policy_id} skill={skill} at {handle.endpoint}", flush=True)
    if args.register:
        import requests

        for handle in handles:
            resp = requests.post(args.register.rstrip("/") + "/policies", json={
                "display_name": handle.spec.policy_id,
                "endpoint": handle.endpoint,
                "open_source": True,
                "owner": args.owner,
            }, timeout=10)
            resp.raise_for_status()
            policy_id = resp.json()["policy_id"]
            if args.activate:
                requests.patch(f"{args.register.rstrip('/')}/policies/{policy_id}/status",
                               json={"status": "active"}, timeout=10).raise_for_status()
            print(f"registered {handle.spec.policy_id} as {policy_id}", flush=True)
    stop = threading.Event()
    signal.signal(signal.SIGINT, lambda *a: stop.set())
    signal.signal(signal.SIGTERM, lambda *a: stop.set())
    stop.wait()
    for handle in handles:
        handle.stop()
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="arenakit-sim", description="Synthetic evaluation harness.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_world = sub.add_parser("world", help="sample a ground-truth world and print it as JSON")
    _add_world_args(p_world)
    p_world.add_argument("-o", "--out", default=None)
    p_world.set_defaults(fn=_cmd_world)

    p_rank = sub.add_parser("rank-exp", help="ranking quality vs. number of comparisons")
    _add_experiment_args(p_rank)
    p_rank.set_defaults(fn=_cmd_rank_exp)

    p_drift = sub.add_parser("drift-exp", help="task drift + policy churn stress test")
    _add_experiment_args(p_drift)
    p_drift.set_defaults(fn=_cmd_drift_exp)

    p_env = sub.add_parser("serve-env", help="start synthetic policy servers for a live stack")
    p_env.add_argument("--skills", default="0.9,0.7,0.5,0.3", help="comma-separated skills, one server each")
    p_env.add_argument("--prefix", default="synthetic")
    p_env.add_argument("--host", default="127.0.0.1")
    p_env.add_argument("--port-base", type=int, default=0, help="0 binds ephemeral ports")
    p_env.add_argument("--latency-ms", type=float, default=0.0)
    p_env.add_argument("--seed", type=int, default=0)
    p_env.add_argument("--register", default=None, help="arena server URL to register the policies with")
    p_env.add_argument("--owner", default="sim-harness")
    p_env.add_argument("--activate", action="store_true", help="mark registered policies active")
    p_env.set_defaults(fn=_cmd_serve_env)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())

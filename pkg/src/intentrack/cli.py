"""Command-line entry point.

    intentrack run --preset case1 --methods B,A,G,P --seed 7 --out results/
    intentrack run --scenario my_scenario.json --trials 30 --jobs 4
    intentrack serve --port 8000 --preset case1

Exit codes: 0 success, 2 configuration error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .runner import ConfigError, RunPlan, bench, run
from .scenario import PRESETS, ScenarioError


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="intentrack", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a preset or scenario file")
    src = p_run.add_mutually_exclusive_group()
    src.add_argument("--preset", choices=sorted(PRESETS), default=None)
    src.add_argument("--scenario", metavar="FILE", default=None)
    p_run.add_argument("--methods", default="B,A,G,P", help="comma-separated variants")
    p_run.add_argument("--trials", type=int, default=1)
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--out", default="results")
    p_run.add_argument("--jobs", type=int, default=1)
    p_run.add_argument("--benchmark", action="store_true")

    p_serve = sub.add_parser("serve", help="start the live steering service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--preset", choices=sorted(PRESETS), default="case1")
    p_serve.add_argument("--seed", type=int, default=0)
    return parser


def _plan_from_args(args) -> RunPlan:
    methods = tuple(m.strip().upper() for m in args.methods.split(",") if m.strip())
    preset = args.preset
    if preset is None and args.scenario is None:
        preset = "case1"
    return RunPlan(
        preset=preset,
        scenario_path=args.scenario,
        methods=methods,
        trials=args.trials,
        seed=args.seed,
        out_dir=args.out,
        benchmark=args.benchmark,
        jobs=args.jobs,
    )


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            plan = _plan_from_args(args)
            artifacts = run(plan)
            print(json.dumps(artifacts, indent=2))
            if plan.benchmark:
                report = bench(plan)
                active = report["active_step_ms"]["mean"]
                rate = report["steps_per_second"]
                print(f"active step mean: {active:.3f} ms, loop rate: {rate:.0f} steps/s")
            return 0
        if args.command == "serve":
            import uvicorn

            from .service import create_app

            app = create_app(preset=args.preset, seed=args.seed)
            uvicorn.run(app, host=args.host, port=args.port)
            return 0
    except (ConfigError, ScenarioError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

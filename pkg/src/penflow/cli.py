"""Command-line experiment driver.

Subcommands: ``run`` (one experiment, artifacts to a directory),
``oracle`` (centralized reference solution only), ``sweep`` (one run
per seed into subdirectories), ``validate-config`` (parse and
materialize a config without running).

Exit codes: 0 converged / ok, 1 ran but did not meet the stopping rule,
2 infeasible instance, 3 numerical failure, 4 config or I/O problem.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from .errors import (
    ConfigError,
    DomainError,
    InfeasibleProblemError,
    NumericalFailureError,
)
from .harness import ExperimentConfig, build, generate_example, run_experiment, sweep
from .oracle import solve_centralized

EXIT_OK = 0
EXIT_NOT_CONVERGED = 1
EXIT_INFEASIBLE = 2
EXIT_NUMERICAL = 3
EXIT_CONFIG = 4


class _Parser(argparse.ArgumentParser):
    # usage errors must land in the config exit-code class, not
    # argparse's default SystemExit(2)
    def error(self, message):
        raise ConfigError(message)


def _add_common(p):
    p.add_argument("--example", type=int, choices=(1, 2),
                   help="generate a bundled example instance")
    p.add_argument("--config", help="experiment config JSON")
    p.add_argument("--seed", type=int, default=None,
                   help="generation seed (default 0 for --example)")
    p.add_argument("--alpha", type=float, default=None,
                   help="override integrator stepsize")
    p.add_argument("--max-steps", type=int, default=None,
                   help="override integrator step budget")
    p.add_argument("--gamma", type=float, default=None,
                   help="override penalty safety factor")
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--backend", default=None, choices=("numba", "numpy"),
                   help="kernel backend (default: PENFLOW_BACKEND or auto)")


def _resolve_config(args):
    if args.config is not None and args.example is not None:
        raise ConfigError("give either --config or --example, not both")
    if args.config is not None:
        cfg = ExperimentConfig.from_json(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
    elif args.example is not None:
        cfg = generate_example(args.example, 0 if args.seed is None else args.seed)
    else:
        raise ConfigError("one of --config or --example is required")
    if args.alpha is not None:
        cfg.integrator["alpha"] = args.alpha
    if args.max_steps is not None:
        cfg.integrator["max_steps"] = args.max_steps
    if args.gamma is not None:
        cfg.gamma = args.gamma
    if args.out is not None:
        cfg.out_dir = args.out
    return cfg


def _cmd_run(args):
    cfg = _resolve_config(args)
    result = run_experiment(cfg, backend=args.backend)
    s = result.summary
    print(
        f"status={s['status']} steps={s['total_steps']} "
        f"final_consensus={s['final_consensus']:.3e} "
        f"final_residual={s['final_residual']:.3e} out={result.out_dir}"
    )
    return EXIT_OK if result.converged else EXIT_NOT_CONVERGED


def _cmd_oracle(args):
    cfg = _resolve_config(args)
    problem, _, _ = build(cfg)
    sol = solve_centralized(problem.objectives, problem.sets,
                            backend=args.backend)
    out = cfg.out_dir
    if out is not None:
        os.makedirs(out, exist_ok=True)
        path = os.path.join(out, "oracle.json")
        with open(path, "w") as fh:
            json.dump(sol.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
        print(f"f_star={sol.f_star:.12g} -> {path}")
    else:
        print(f"f_star={sol.f_star:.12g}")
    return EXIT_OK


def _cmd_sweep(args):
    if args.out is None:
        raise ConfigError("sweep requires --out")
    results = sweep(args.example, args.seeds, args.out, jobs=args.jobs,
                    backend=args.backend)
    for out_dir, summary in results:
        print(
            f"{out_dir}: final_consensus={summary['final_consensus']:.3e} "
            f"slope={summary['slope']}"
        )
    return EXIT_OK


def _cmd_validate(args):
    cfg = ExperimentConfig.from_json(args.config)
    build(cfg)
    print(f"{args.config}: ok")
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="penflow",
                     description="distributed consensus flow experiments")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment end to end")
    _add_common(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_or = sub.add_parser("oracle", help="solve the centralized reference")
    _add_common(p_or)
    p_or.set_defaults(func=_cmd_oracle)

    p_sw = sub.add_parser("sweep", help="run several seeds of one example")
    p_sw.add_argument("--example", type=int, choices=(1, 2), required=True)
    p_sw.add_argument("--seeds", type=int, nargs="+", required=True)
    p_sw.add_argument("--out", default=None)
    p_sw.add_argument("--jobs", type=int, default=1)
    p_sw.add_argument("--backend", default=None, choices=("numba", "numpy"))
    p_sw.set_defaults(func=_cmd_sweep)

    p_val = sub.add_parser("validate-config", help="check a config file")
    p_val.add_argument("--config", required=True)
    p_val.set_defaults(func=_cmd_validate)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(
            level=logging.INFO if args.verbose else logging.WARNING,
            format="%(levelname)s %(name)s: %(message)s",
        )
        return args.func(args)
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibleProblemError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except NumericalFailureError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

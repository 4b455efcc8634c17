"""qwalk command line: run experiment configs, verify the acceptance suites.

Exit codes: 0 success, 2 invalid configuration or arguments, 3 runtime
warnings escalated by --strict or failed verification.
"""

from __future__ import annotations

import argparse
import sys

from .config import ConfigError, load_config
from .runner import run


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qwalk",
        description="Quantum-walk simulations: lattice, continuum, and orbit-composition coins.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one experiment config (TOML)")
    p_run.add_argument("config", help="path to the experiment TOML file")
    p_run.add_argument(
        "--strict", action="store_true", help="escalate runtime warnings to exit code 3"
    )
    p_run.add_argument("--out", metavar="DIR", default=None, help="output directory override")
    p_run.add_argument(
        "--workers",
        type=int,
        default=None,
        help="thread count for transforms (default: QWALK_WORKERS or all cores); never affects results",
    )

    p_verify = sub.add_parser("verify", help="run an acceptance suite")
    p_verify.add_argument("suite", choices=("lattice", "plancherel", "birkhoff", "all"))
    p_verify.add_argument("--workers", type=int, default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        try:
            cfg = load_config(args.config)
            result = run(cfg, out_dir=args.out, strict=args.strict, workers=args.workers)
        except ConfigError as e:
            print(str(e), file=sys.stderr)
            return 2
        for w in result.warnings:
            print(f"warning: {w}", file=sys.stderr)
        print(f"wrote {len(result.artifacts)} artifacts to {result.out_dir}")
        if result.exit_code == 3:
            print("strict mode: warnings escalated to exit 3", file=sys.stderr)
        return result.exit_code

    from .acceptance import run_suite

    results = run_suite(args.suite, workers=args.workers)
    return 0 if all(r.passed for r in results) else 3


if __name__ == "__main__":
    sys.exit(main())

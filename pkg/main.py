import argparse
import os
import sys
from pathlib import Path
from typing import List, Optional

# BLAS reads its thread count when numpy is first imported.
_THREADS = os.environ.get("VHP_THREADS", "1")
for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
    os.environ.setdefault(_var, _THREADS)

from core.config import AVAILABLE_SCENARIOS  # noqa: E402
from core.dependencies import get_settings  # noqa: E402
from dispatch.base import ScenarioJob  # noqa: E402
from dispatch.factory import get_dispatcher  # noqa: E402
from logging_config import get_logger, setup_root_logging  # noqa: E402

logger = get_logger("main")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vhp",
        description="Numerical laboratory for half-plane Navier-Stokes vorticity.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="Run scenarios from config files.")
    target = run.add_mutually_exclusive_group(required=True)
    target.add_argument(
        "--config",
        type=Path,
        action="append",
        help="Scenario config file. Repeat to run several scenarios.",
    )
    target.add_argument(
        "--list", action="store_true", help="Print the registered scenario names."
    )
    run.add_argument(
        "--out",
        type=Path,
        default=None,
        help="Output directory. With several configs, one subdirectory per run.",
    )
    run.add_argument(
        "--seed", type=int, default=None, help="Overrides the config seed."
    )
    return parser


def list_scenarios() -> None:
    for name, entry in AVAILABLE_SCENARIOS.items():
        print(f"{name:<24}{entry['description']}")


def build_jobs(
    configs: List[Path], out: Optional[Path], seed: Optional[int]
) -> List[ScenarioJob]:
    """
    One job per config file.

    A single config writes straight into `--out`; several configs each get
    a `<scenario>-<run id>` directory under it.
    """
    if len(configs) == 1:
        return [ScenarioJob(config_path=configs[0], out_dir=out, seed=seed)]
    return [ScenarioJob(config_path=c, root=out, seed=seed) for c in configs]


def main(argv: Optional[List[str]] = None) -> int:
    """
    Runs the `vhp` command line.

    Returns:
        0 when every run passes all of its gates; otherwise the largest exit
        code among the runs (1 gate failure, 2 unknown scenario, 3 invalid
        config, 4 diverged simulation).
    """
    args = build_parser().parse_args(argv)
    if args.list:
        list_scenarios()
        return 0

    settings = get_settings()
    setup_root_logging(settings.LOG_LEVEL)
    jobs = build_jobs(args.config, args.out, args.seed)
    logger.info(
        f"Dispatching {len(jobs)} job(s) on the '{settings.EXECUTION_BACKEND}' backend"
    )
    codes = get_dispatcher(settings).dispatch(jobs)
    for job, code in zip(jobs, codes):
        logger.info(f"{job.config_path}: exit code {code}")
    return max(codes, default=0)


def cli() -> None:
    sys.exit(main())


if __name__ == "__main__":
    cli()

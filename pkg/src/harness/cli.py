"""
Command-line entry point: python -m src.harness.cli <command> ...

Exit codes: 0 success, 2 configuration error, 3 runtime failure.
"""
from __future__ import annotations

import argparse
import asyncio
import json
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from src.benchgen.fidelity import FidelitySpec
from src.benchgen.synthetic import PRESET_NAMES, make_preset
from src.config.logging import get_logger, setup_logging
from src.config.settings import get_settings
from src.data.effective_dim import DEFAULT_BUDGET, estimate_effective_dim
from src.errors import BenchError, ConfigError
from src.harness.analysis import export_plotdata, fidelity_correlation
from src.harness.benchmarks import resolve_benchmark, save_benchmark
from src.harness.experiment import load_experiment, run_experiment
from src.harness.service import EvalService, serve_stdio, serve_tcp

logger = get_logger(__name__)

EXIT_OK = 0


def _fidelity(args) -> Optional[FidelitySpec]:
    if args.discrete is not None and args.continuous is not None:
        raise ConfigError("give at most one of --discrete and --continuous")
    if args.discrete is not None:
        return FidelitySpec(discrete=args.discrete)
    if args.continuous is not None:
        return FidelitySpec(continuous=args.continuous)
    return None


def _bench(args):
    return resolve_benchmark(args.benchmark, data_dir=args.data_dir)


def cmd_generate(args) -> int:
    if args.name not in PRESET_NAMES:
        raise ConfigError(f"unknown preset {args.name!r}; choose from {list(PRESET_NAMES)}")
    bench = make_preset(args.name, noise=args.noise, seed=args.seed)
    manifest_path, data_path = save_benchmark(bench, args.out)
    print(json.dumps({"manifest": str(manifest_path), "data": str(data_path), "lam_min": bench.lam_min, "lam_max": bench.lam_max}))
    return EXIT_OK


def cmd_run(args) -> int:
    manifest = load_experiment(args.manifest)
    summary = run_experiment(manifest, args.out, data_dir=args.data_dir)
    print(summary.model_dump_json(indent=2))
    return 3 if summary.failed else EXIT_OK


def cmd_eval(args) -> int:
    bench = _bench(args)
    if (args.z is None) == (args.uniform is None):
        raise ConfigError("give exactly one of --z and --uniform")
    try:
        z = json.loads(args.z) if args.z is not None else [args.uniform] * bench.d
    except json.JSONDecodeError as exc:
        raise ConfigError(f"--z is not a JSON list: {exc.msg}") from exc
    print(json.dumps(EvalService(bench).evaluate(z, _fidelity(args))))
    return EXIT_OK


def cmd_serve(args) -> int:
    bench = _bench(args)
    service = EvalService(bench)
    port = args.port if args.port is not None else get_settings().port
    if args.transport == "stdio":
        serve_stdio(service)
    elif args.transport == "tcp":
        asyncio.run(serve_tcp(service, args.host, port))
    elif args.transport == "http":
        import uvicorn

        from src.app import main as http_app

        http_app.service = service
        uvicorn.run(http_app.app, host=args.host, port=port)
    else:
        from src.producer_mcp import mcp_server

        mcp_server.service = service
        mcp_server.mcp.run()
    return EXIT_OK


def cmd_fidelity_corr(args) -> int:
    corr = fidelity_correlation(_bench(args), n_probes=args.probes, seed=args.probe_seed)
    print(json.dumps([[None if np.isnan(v) else float(v) for v in row] for row in corr]))
    return EXIT_OK


def cmd_export(args) -> int:
    table = export_plotdata(args.runs, axis=args.axis, reference_cost=args.reference_cost)
    if args.out:
        table.to_csv(args.out, index=False)
    else:
        table.to_csv(sys.stdout, index=False)
    return EXIT_OK


def cmd_bounds(args) -> int:
    bench = _bench(args)
    print(json.dumps({"name": bench.name, "lam_min": bench.lam_min, "lam_max": bench.lam_max}))
    return EXIT_OK


def cmd_estimate_de(args) -> int:
    bench = _bench(args)
    print(json.dumps({"name": bench.name, "effective_dim": estimate_effective_dim(bench, args.budget)}))
    return EXIT_OK


def _add_fidelity_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--discrete", type=int, default=None, help="discrete fidelity level 0..4")
    parser.add_argument("--continuous", type=float, default=None, help="continuous fidelity in [0, 1]")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wlasso-bench", description="Weighted-Lasso HPO benchmarks")
    parser.add_argument("--log-level", default=None, help="overrides $LOG_LEVEL")
    parser.add_argument("--data-dir", type=Path, default=None, help="overrides $WLASSO_DATA_DIR")
    parser.add_argument("--allow-download", action="store_true", help="fetch missing registry sources")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic benchmark manifest and data")
    p.add_argument("name")
    p.add_argument("--noise", action="store_true", help="noisy variant (SNR 3)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", type=Path, default=Path("benchmarks"))
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("run", help="run an experiment manifest")
    p.add_argument("manifest", type=Path)
    p.add_argument("--out", type=Path, default=Path("results"))
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("eval", help="evaluate one configuration")
    p.add_argument("benchmark")
    p.add_argument("--z", default=None, help="JSON list of d search-space coordinates")
    p.add_argument("--uniform", type=float, default=None, help="same coordinate for every feature")
    _add_fidelity_flags(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("serve", help="run the evaluation service")
    p.add_argument("benchmark")
    p.add_argument("--transport", choices=["stdio", "tcp", "http", "mcp"], default="stdio")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=None)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("fidelity-corr", help="Pearson correlation of losses across fidelities")
    p.add_argument("benchmark")
    p.add_argument("--probes", type=int, default=100)
    p.add_argument("--seed", dest="probe_seed", type=int, default=0)
    p.set_defaults(func=cmd_fidelity_corr)

    p = sub.add_parser("export", help="best-so-far curves as CSV")
    p.add_argument("runs", nargs="+", type=Path)
    p.add_argument("--axis", choices=["ordinal", "cost", "wall"], default="ordinal")
    p.add_argument("--reference-cost", type=float, default=None)
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("bounds", help="print lam_min and lam_max")
    p.add_argument("benchmark")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("estimate-de", help="effective dimension via Sparse-HO")
    p.add_argument("benchmark")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.set_defaults(func=cmd_estimate_de)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level)
    if args.allow_download:
        os.environ["WLASSO_ALLOW_DOWNLOAD"] = "1"
        get_settings.cache_clear()
    try:
        return args.func(args)
    except BenchError as exc:
        logger.error("%s", exc)
        return exc.exit_code
    except ValueError as exc:
        logger.error("invalid input: %s", exc)
        return 2
    except OSError as exc:
        logger.error("%s", exc)
        return 3


if __name__ == "__main__":
    sys.exit(main())

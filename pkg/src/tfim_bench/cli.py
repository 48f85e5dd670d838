"""Command-line front end: ``tfim-bench <command> [--config FILE] [--<key> VALUE ...]``.

Commands: ``exact``, ``vqe``, ``sample --backend {ideal_sampled,noisy}``,
``report [--import-rows CSV]``, ``pipeline`` (all of the above in order)
and ``reference OUT.csv`` (write the bundled published rows in import
format).

Exit codes: 0 success, 1 validation error, 2 numerical failure, 3 missing inputs.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import pipeline
from .config import KEYS, OUTPUT_DIR_ENV, load_config
from .errors import ConvergenceError, MissingInputError, ValidationError
from .estimator import BACKENDS
from .metrics import read_rows, reference_rows, write_rows

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2
EXIT_MISSING = 3

log = logging.getLogger("tfim_bench")


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors, which is our numerical-failure code
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _config_options():
    parent = _Parser(add_help=False)
    parent.add_argument("--config", type=Path, help="key = value config file")
    group = parent.add_argument_group("config overrides")
    for key in KEYS:
        help_text = None
        if key == "output_dir":
            help_text = f"run directory (default ${OUTPUT_DIR_ENV} or ./run)"
        group.add_argument(f"--{key}", dest=key, metavar="VALUE", help=help_text)
    parent.add_argument("-v", "--verbose", action="store_true")
    return parent


def build_parser():
    parent = _config_options()
    parser = _Parser(prog="tfim-bench", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("exact", parents=[parent], help="exact diagonalization sweep")
    sub.add_parser("vqe", parents=[parent], help="optimize the ansatz along the grid")
    p = sub.add_parser("sample", parents=[parent], help="shot-sampled execution of stored circuits")
    p.add_argument("--backend", choices=BACKENDS, default="ideal_sampled")
    p = sub.add_parser("report", parents=[parent], help="tables, metrics, figure data, manifest")
    p.add_argument("--import-rows", type=Path, dest="import_rows",
                   help="CSV of externally supplied rows (backend,h,energy,mz,...)")
    sub.add_parser("pipeline", parents=[parent], help="exact, vqe, sample x2, report")
    p = sub.add_parser("reference", help="write the bundled published rows in import format")
    p.add_argument("out", type=Path)
    return parser


def _setup_logging(run_dir: Path, verbose: bool):
    root = logging.getLogger("tfim_bench")
    root.setLevel(logging.DEBUG if verbose else logging.INFO)
    for h in list(root.handlers):
        root.removeHandler(h)
        h.close()
    fmt = logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s")
    stream = logging.StreamHandler(sys.stderr)
    stream.setFormatter(fmt)
    root.addHandler(stream)
    run_dir.mkdir(parents=True, exist_ok=True)
    fh = logging.FileHandler(run_dir / "run.log")
    fh.setFormatter(fmt)
    root.addHandler(fh)


def _dispatch(args, cfg):
    if args.command == "exact":
        pipeline.run_exact(cfg)
    elif args.command == "vqe":
        pipeline.run_vqe(cfg)
    elif args.command == "sample":
        pipeline.run_sample(cfg, args.backend)
    elif args.command == "report":
        imported = read_rows(args.import_rows) if args.import_rows else None
        pipeline.run_report(cfg, imported)
    elif args.command == "pipeline":
        pipeline.run_pipeline(cfg)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "reference":
        write_rows(args.out, reference_rows())
        return EXIT_OK
    try:
        overrides = {k: getattr(args, k) for k in KEYS}
        cfg = load_config(args.config, overrides)
    except ValidationError as exc:
        print(f"tfim-bench: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except MissingInputError as exc:
        print(f"tfim-bench: {exc}", file=sys.stderr)
        return EXIT_MISSING
    _setup_logging(cfg.run_dir, args.verbose)
    try:
        _dispatch(args, cfg)
    except MissingInputError as exc:
        log.error("missing input: %s", exc)
        return EXIT_MISSING
    except ValidationError as exc:
        log.error("validation error: %s", exc)
        return EXIT_VALIDATION
    except (ConvergenceError, ArithmeticError) as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERICAL
    finally:
        for h in list(log.handlers):
            log.removeHandler(h)
            h.close()
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

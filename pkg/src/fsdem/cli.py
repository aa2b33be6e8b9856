"""Command line entry point: ``fsdem {sweep,stability,benchmark,dummy}``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .data import ColumnSpec, NoiseSpec, generate_wealth_dummy, load_csv, write_csv
from .evaluators import MEASURES, EvaluatorConfig
from .exceptions import DataFormatError, FsdemError, IngestionError, InvalidRangeError
from .harness import BenchmarkConfig, emit_report, run_benchmark, run_stability_study, run_sweep
from .metrics import MetricRange
from .selectors import SELECTORS, SelectorConfig

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_PARTIAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load(spec: str, seed: int, label_column: str):
    if spec == "wealth":
        return generate_wealth_dummy(500, seed)
    label = int(label_column) if label_column.lstrip("-").isdigit() else label_column
    return load_csv(spec, ColumnSpec(label_column=label))


def cmd_sweep(args) -> int:
    data = _load(args.data, args.seed, args.label_column)
    a = args.a if args.a is not None else 1
    b = args.b if args.b is not None else data.d
    report = run_sweep(
        data,
        SelectorConfig(args.selector, seed=args.seed),
        EvaluatorConfig(args.measure, seed=args.seed),
        MetricRange(a, b),
        args.stride,
    )
    if args.out:
        emit_report([report], "json", args.out)
    print(json.dumps({k: report.to_dict()[k] for k in ("dataset_id", "selector_id", "measure_id", "fsdem", "stability", "bfi")}))
    return EXIT_OK


def cmd_stability(args) -> int:
    data = _load(args.data, args.seed, args.label_column)
    phi, kun = run_stability_study(
        data, SelectorConfig(args.selector, seed=args.seed), args.repeats, NoiseSpec(args.noise, args.seed), args.k
    )
    print(json.dumps({"dataset_id": data.dataset_id, "selector_id": args.selector, "k": args.k,
                      "repeats": args.repeats, "noise": args.noise, "nogueira": phi, "kuncheva": kun}))
    return EXIT_OK


def cmd_benchmark(args) -> int:
    try:
        config = BenchmarkConfig.from_json(args.config)
    except (FsdemError, TypeError, KeyError, ValueError) as exc:
        raise UsageError(f"bad benchmark config {args.config}: {exc}") from exc
    if args.out:
        config = replace(config, output_dir=args.out)
    reports, summary = run_benchmark(config, workers=args.workers)
    print(json.dumps({"runs": summary["runs"], "failed": summary["failed"], "output_dir": config.output_dir}))
    return EXIT_PARTIAL if summary["failed"] else EXIT_OK


def cmd_dummy(args) -> int:
    path = write_csv(generate_wealth_dummy(args.n, args.seed), Path(args.out), label_name="wealth")
    print(path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fsdem", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("sweep", help="FSDEM and stability of one selector on one dataset")
    s.add_argument("--data", required=True, help="CSV path or 'wealth'")
    s.add_argument("--selector", choices=SELECTORS, default="info_gain")
    s.add_argument("--measure", choices=MEASURES, default="accuracy")
    s.add_argument("--a", type=int, default=None)
    s.add_argument("--b", type=int, default=None)
    s.add_argument("--stride", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default=None)
    s.add_argument("--label-column", default="-1")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("stability", help="Phi-hat and Kuncheva index under noise")
    s.add_argument("--data", required=True)
    s.add_argument("--selector", choices=SELECTORS, default="info_gain")
    s.add_argument("--repeats", type=int, default=10)
    s.add_argument("--noise", type=float, default=0.1)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--label-column", default="-1")
    s.set_defaults(func=cmd_stability)

    s = sub.add_parser("benchmark", help="run a JSON benchmark config")
    s.add_argument("--config", required=True)
    s.add_argument("--workers", type=int, default=None)
    s.add_argument("--out", default=None, help="override output_dir")
    s.set_defaults(func=cmd_benchmark)

    s = sub.add_parser("dummy", help="write the synthetic wealth dataset as CSV")
    s.add_argument("--n", type=int, default=500)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_dummy)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (DataFormatError, IngestionError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (UsageError, InvalidRangeError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FsdemError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())

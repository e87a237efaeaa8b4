"""Command-line front end.

Exit status is 0 on success, 1 when a config or input file is invalid and
2 when a solver fails. Relative output paths land in ``--output-dir``, or in
``$SPIKESIM_OUTPUT_DIR`` when that is set, or in the current directory.
"""

import argparse
import json
import math
import sys
from pathlib import Path

from .exceptions import ConfigError, DataError, SpikeSimError
from .harness import (
    OUTPUT_DIR_ENV,
    Outputs,
    bench,
    load_config,
    output_dir,
    pattern_dict,
    read_spikes_csv,
    run_comparison,
    run_error_sweep,
    run_experiment,
)
from .spiketrain import (
    DEFAULT_MAX_PERIOD,
    classify_pattern,
    occupied_clusters,
    reset_histogram,
    reset_sequence,
)

EXIT_OK, EXIT_INVALID, EXIT_SOLVER = 0, 1, 2


def _floats(text):
    try:
        return [float(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected numbers, got {text!r}") from None


def _print_json(data):
    def clean(x):
        if isinstance(x, float) and not math.isfinite(x):
            return None
        if isinstance(x, dict):
            return {k: clean(v) for k, v in x.items()}
        if isinstance(x, list):
            return [clean(v) for v in x]
        return x

    print(json.dumps(clean(data), indent=2))


def _base_dir(args):
    return output_dir(args.output_dir)


def cmd_simulate(args):
    config = load_config(args.config)
    stem = Path(args.config).stem
    outs = config.outputs
    config = config.replace(
        outputs=Outputs(
            trajectory_path=outs.trajectory_path or (f"{stem}_trajectory.csv" if args.trajectory else None),
            spikes_path=outs.spikes_path or f"{stem}_spikes.csv",
            report_path=outs.report_path or f"{stem}_report.json",
        )
    )
    report = run_experiment(config, base_dir=_base_dir(args))
    _print_json(report.to_dict())


def cmd_compare(args):
    configs = [load_config(p) for p in args.configs]
    path = Path(args.out)
    if not path.is_absolute():
        path = _base_dir(args) / path
    rows = run_comparison(configs, csv_path=path, repeat=args.repeat)
    _print_json(rows)


def cmd_error_sweep(args):
    config = load_config(args.config)
    path = Path(args.out or f"{Path(args.config).stem}_error_sweep.csv")
    if not path.is_absolute():
        path = _base_dir(args) / path
    rows = run_error_sweep(config, args.taus, args.thetas, csv_path=path)
    _print_json(rows)


def cmd_classify(args):
    events = read_spikes_csv(args.spikes)
    seq = reset_sequence([w for _, w in events], args.skip)
    pattern = classify_pattern(seq, args.tol, args.max_period)
    hist = reset_histogram(seq, args.bins)
    _print_json(
        {
            "events": len(events),
            "transient_skip": seq.transient_skip,
            "pattern": pattern_dict(pattern),
            "tol_rule": "given" if args.tol is not None else "default: 5% of value range",
            "histogram": [{"center": c, "count": n} for c, n in hist],
            "occupied_clusters": occupied_clusters(hist),
        }
    )


def cmd_bench(args):
    config = load_config(args.config)
    report = bench(config, repeat=args.repeat)
    _print_json(report.to_dict())


def build_parser():
    parser = argparse.ArgumentParser(prog="spikesim", description="Simulate bidimensional spiking neuron models.")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_output_dir(p):
        p.add_argument(
            "--output-dir",
            default=None,
            help=f"directory for relative output paths (${OUTPUT_DIR_ENV} takes precedence)",
        )
        return p

    p = with_output_dir(sub.add_parser("simulate", help="run one experiment config and write its files"))
    p.add_argument("config")
    p.add_argument("--trajectory", action="store_true", help="also write the trajectory CSV")
    p.set_defaults(func=cmd_simulate)

    p = with_output_dir(sub.add_parser("compare", help="compare schemes on one problem"))
    p.add_argument("configs", nargs="+")
    p.add_argument("--out", default="comparison.csv")
    p.add_argument("--repeat", type=int, default=1)
    p.set_defaults(func=cmd_compare)

    p = with_output_dir(sub.add_parser("error-sweep", help="first-spike errors against the oracle"))
    p.add_argument("config")
    p.add_argument("--taus", type=_floats, required=True, help="step sizes, comma or space separated")
    p.add_argument("--thetas", type=_floats, required=True, help="cutoffs, comma or space separated")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_error_sweep)

    p = sub.add_parser("classify", help="classify the reset sequence of a spikes CSV")
    p.add_argument("spikes")
    p.add_argument("--skip", type=int, default=None, help="transient events to drop (default max(10, 20%%))")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--max-period", type=int, default=DEFAULT_MAX_PERIOD)
    p.add_argument("--bins", type=int, default=20)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("bench", help="median wall time and step count of a config")
    p.add_argument("config")
    p.add_argument("--repeat", type=int, default=None)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    try:
        args.func(args)
    except (ConfigError, DataError, OSError) as exc:
        print(f"spikesim: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SpikeSimError as exc:
        print(f"spikesim: solver error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ValueError as exc:
        print(f"spikesim: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


__all__ = ["build_parser", "main"]

"""Command-line experiment runner.

Usage::

    infousage <experiment> [--seed N] [--reps N] [--out DIR]
              [--format csv|json] [--svg] [--check] [--config FILE]

Each run writes ``<experiment>.<format>`` (and optionally an SVG line
chart) into the output directory.  The full configuration, seed included,
is embedded in every output file so a run can be replayed exactly.  The
environment variable ``INFOUSAGE_SEED`` supplies the default seed; a JSON
config file supplies defaults for any flag plus experiment-specific
parameters.

Exit codes: 0 success, 2 usage error, 3 configuration error, 4 filesystem
error, 5 check failure (--check with an unsatisfied bound).
"""

import argparse
import csv
import json
import os
import sys

import numpy as np

from .errors import ConfigurationError, InputError
from .experiments import EXPERIMENTS, run_experiment

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_FILESYSTEM = 4
EXIT_CHECK = 5


def _build_parser():
    p = argparse.ArgumentParser(
        prog="infousage",
        description="Run selection-bias simulation experiments.",
        epilog="Experiments: " + ", ".join(sorted(EXPERIMENTS)),
    )
    p.add_argument("experiment", help="experiment name")
    p.add_argument("--seed", type=int, default=None,
                   help="master seed (default: $INFOUSAGE_SEED or 0)")
    p.add_argument("--reps", type=int, default=None,
                   help="replication count override")
    p.add_argument("--out", default=".", help="output directory (default: .)")
    p.add_argument("--format", choices=("csv", "json"), default="csv",
                   help="data file format (default: csv)")
    p.add_argument("--svg", action="store_true", help="also emit an SVG chart")
    p.add_argument("--check", action="store_true",
                   help="fail (exit 5) if any bound check is unsatisfied")
    p.add_argument("--config", default=None, help="JSON config file")
    return p


def _load_config_file(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config file is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigurationError("config file must hold a JSON object")
    return cfg


def _jsonable(value):
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def write_csv(path, columns, rows, config):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("# config: " + json.dumps(config, sort_keys=True) + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_jsonable(v) for v in row])


def write_json(path, columns, rows, config, extra=None):
    doc = {
        "config": config,
        "columns": list(columns),
        "rows": [[_jsonable(v) for v in row] for row in rows],
    }
    if extra:
        doc.update(extra)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_svg(path, columns, rows, title):
    """Minimal line chart: first numeric column is x, the rest are series."""
    numeric = [
        [v for v in row] for row in rows
        if all(isinstance(v, (int, float, np.integer, np.floating))
               for v in row)
    ]
    width, height, pad = 640, 400, 50
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<text x="{width // 2}" y="20" text-anchor="middle" '
        f'font-size="14">{title}</text>',
        f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" '
        f'height="{height - 2 * pad}" fill="none" stroke="black"/>',
    ]
    if numeric:
        data = np.array(numeric, dtype=float)
        x = data[:, 0]
        ys = data[:, 1:]
        finite = np.isfinite(ys)
        y_lo = float(ys[finite].min()) if finite.any() else 0.0
        y_hi = float(ys[finite].max()) if finite.any() else 1.0
        x_lo, x_hi = float(x.min()), float(x.max())
        xs = x_hi - x_lo or 1.0
        yspan = y_hi - y_lo or 1.0

        def sx(v):
            return pad + (v - x_lo) / xs * (width - 2 * pad)

        def sy(v):
            return height - pad - (v - y_lo) / yspan * (height - 2 * pad)

        colors = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e",
                  "#8c564b", "#17becf"]
        for k in range(ys.shape[1]):
            col = ys[:, k]
            pts = " ".join(
                f"{sx(xv):.2f},{sy(yv):.2f}"
                for xv, yv in zip(x, col) if np.isfinite(yv)
            )
            color = colors[k % len(colors)]
            parts.append(
                f'<polyline points="{pts}" fill="none" stroke="{color}" '
                f'stroke-width="1.5"/>'
            )
            parts.append(
                f'<text x="{width - pad + 4}" y="{pad + 16 * k + 12}" '
                f'font-size="10" fill="{color}">{columns[k + 1]}</text>'
            )
        parts.append(
            f'<text x="{pad}" y="{height - pad + 20}" '
            f'font-size="10">{columns[0]}</text>'
        )
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK

    params = {}
    if args.config:
        try:
            cfg = _load_config_file(args.config)
        except ConfigurationError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        for key in ("seed", "reps", "out", "format", "svg", "check"):
            if key in cfg and getattr(args, key) in (None, ".", "csv", False):
                setattr(args, key, cfg.pop(key))
        params.update(cfg.pop("params", {}))
        cfg.pop("experiment", None)
        if cfg:
            print(f"error: unknown config keys: {sorted(cfg)}", file=sys.stderr)
            return EXIT_CONFIG

    if args.experiment not in EXPERIMENTS:
        print(f"error: unknown experiment {args.experiment!r}; choose from "
              + ", ".join(sorted(EXPERIMENTS)), file=sys.stderr)
        return EXIT_USAGE

    seed = args.seed
    if seed is None:
        env = os.environ.get("INFOUSAGE_SEED")
        try:
            seed = int(env) if env else 0
        except ValueError:
            print(f"error: INFOUSAGE_SEED={env!r} is not an integer",
                  file=sys.stderr)
            return EXIT_CONFIG

    # fail on an unwritable output directory before any simulation starts
    try:
        os.makedirs(args.out, exist_ok=True)
        probe = os.path.join(args.out, ".write-probe")
        with open(probe, "w"):
            pass
        os.remove(probe)
    except OSError as exc:
        print(f"error: output directory not writable: {exc}", file=sys.stderr)
        return EXIT_FILESYSTEM

    config = {
        "experiment": args.experiment,
        "seed": int(seed),
        "reps": args.reps,
        "format": args.format,
        "params": _jsonable(params),
    }
    try:
        result = run_experiment(args.experiment, seed=int(seed),
                                reps=args.reps, **params)
    except (InputError, ConfigurationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    base = os.path.join(args.out, args.experiment)
    try:
        if args.format == "csv":
            write_csv(base + ".csv", result["columns"], result["rows"], config)
        else:
            extra = {}
            if "checks" in result:
                extra["checks"] = [vars(c) for c in result["checks"]]
            if "exponent" in result:
                extra["exponent"] = result["exponent"]
            write_json(base + ".json", result["columns"], result["rows"],
                       config, extra)
        if args.svg:
            write_svg(base + ".svg", result["columns"], result["rows"],
                      args.experiment)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_FILESYSTEM

    checks = result.get("checks", [])
    failed = [c for c in checks if not c.satisfied]
    if checks:
        print(f"{args.experiment}: {len(checks) - len(failed)}/{len(checks)} "
              "bound checks satisfied")
        for c in failed:
            print(f"  UNSATISFIED {c.name}: bound={c.value:.4f} "
                  f"empirical={c.empirical:.4f}")
    if args.check and failed:
        return EXIT_CHECK
    print(f"wrote {base}.{args.format}" + (f" and {base}.svg" if args.svg else ""))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

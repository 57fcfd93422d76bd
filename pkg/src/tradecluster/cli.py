"""Command-line entry points: ``cluster`` and the ``trade-report`` recipe."""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .dataset import Column, adjust_for_rate, describe_table, descriptive_csv, impute_missing, load_csv
from .errors import ClusterError, MissingColumn
from .pipeline import PipelineConfig, run_pipeline
from .report import atomic_write, emit_matrices, emit_plots, emit_report, ensure_dir

SEED_ENV = "CLUSTER_SEED"


def _auto_or(kind):
    def parse(text: str):
        if text.lower() in ("auto", "off", "none"):
            return None
        try:
            return kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected auto/off or a {kind.__name__}, got {text!r}") from None
    return parse


def _rate(text: str):
    try:
        return float(text)
    except ValueError:
        return text


def _k_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected MIN,MAX, got {text!r}") from None
    return lo, hi


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {text!r}")
    return value


def _seed(args_seed: int) -> int:
    env = os.environ.get(SEED_ENV)
    if env is None or env.strip() == "":
        return args_seed
    try:
        return _u64(env.strip())
    except (ValueError, argparse.ArgumentTypeError):
        raise ClusterError(f"{SEED_ENV}={env!r} is not an unsigned 64-bit integer") from None


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--sigma", type=_auto_or(float), default=None, help="kernel bandwidth or 'auto' (median distance)")
    p.add_argument("--knn", type=_auto_or(int), default=None, help="keep k nearest neighbours per entity, or 'off'")
    p.add_argument("--laplacian", choices=["sym", "unnorm"], default="sym")
    p.add_argument("--k-range", type=_k_range, default=None, metavar="MIN,MAX")
    p.add_argument("--seed", type=_u64, default=0, help=f"RNG seed; the {SEED_ENV} environment variable overrides it")
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--silhouette-space", choices=["embedding", "features"], default="embedding")
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--plots", action="store_true", help="write SVG diagnostic plots")
    p.add_argument("--dump-matrices", action="store_true", help="write similarity.csv and eigenvalues.csv")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="cluster",
        description="Spectral clustering of entities described by tabular indicators.",
    )
    p.add_argument("--input", required=True, help="CSV with an entity_id column")
    p.add_argument("--columns", required=True, help="comma-separated indicator columns to cluster")
    p.add_argument("--adjust-rate", type=_rate, default=None, help="divide indicators by a number or a rate column")
    p.add_argument("--k", type=_auto_or(int), default=None, help="number of clusters or 'auto' (eigen-gap)")
    p.add_argument("--reference", default=None, help="column used to rank clusters into categories")
    p.add_argument("--categories", default=None, help="comma-separated category names, lowest rank first")
    p.add_argument("--unit", default="", help="unit label attached to the indicator columns")
    _add_common(p)
    return p


def _emit(run, out: Path, plots: bool, dump: bool) -> None:
    emit_report(run, out)
    if plots:
        emit_plots(run, out)
    if dump:
        emit_matrices(run, out)


def _fail(exc: BaseException) -> int:
    msg = " ".join(str(exc).split())
    print(f"error: {type(exc).__name__}: {msg}", file=sys.stderr)
    return 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        config = PipelineConfig(
            input=args.input,
            columns=tuple(c.strip() for c in args.columns.split(",") if c.strip()),
            adjust_rate=args.adjust_rate,
            sigma=args.sigma,
            knn=args.knn,
            laplacian=args.laplacian,
            k=args.k,
            k_range=args.k_range,
            seed=_seed(args.seed),
            restarts=args.restarts,
            silhouette_space=args.silhouette_space,
            reference=args.reference,
            categories=tuple(c.strip() for c in args.categories.split(",")) if args.categories else None,
            unit=args.unit,
        )
        run = run_pipeline(config)
        _emit(run, args.out, args.plots, args.dump_matrices)
    except (ClusterError, ValueError, OSError) as exc:
        return _fail(exc)
    shares = ", ".join(f"{s.category} {s.percent}% ({s.count})" for s in run.shares.shares)
    print(f"k={run.k} (eigen-gap choice {run.selection.chosen_k}); {shares}; wrote {args.out}")
    return 0


# --- trade-report recipe ---------------------------------------------------

TRADE_COLUMNS = ("export", "import", "net_export")


def build_trade_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="trade-report",
        description=(
            "Cluster export, import and net export separately (raw and, when a rate "
            "is given, rate-adjusted), writing one report per indicator plus a "
            "combined descriptive-statistics table."
        ),
    )
    p.add_argument("--input", required=True,
                   help="CSV with entity_id, export, import and optionally net_export and a rate column")
    p.add_argument("--rate", type=_rate, default=None,
                   help="exchange rate: a number or a column name (default: the 'rate' column when present)")
    p.add_argument("--unit", default="thousand USD")
    _add_common(p)
    return p


def trade_table(path, rate, unit: str):
    """Load a trade CSV, derive net_export if absent and add adjusted columns."""
    table = load_csv(path, units=unit)
    names = table.column_names
    for need in ("export", "import"):
        if need not in names:
            raise MissingColumn(need)
    if rate is None and "rate" in names:
        rate = "rate"
    table = impute_missing(table).table
    if "net_export" not in names:
        net = table.column("export").values - table.column("import").values
        table = table.with_columns([*table.columns, Column("net_export", net, unit)])
    base = [table.column(c) for c in TRADE_COLUMNS]
    cols = list(base)
    if rate is not None:
        rate_cols = [table.column(rate)] if isinstance(rate, str) else []
        adjusted = adjust_for_rate(table.with_columns(base + rate_cols), rate, list(TRADE_COLUMNS))
        cols += [Column(f"{c}_adjusted", adjusted.column(c).values, adjusted.column(c).unit) for c in TRADE_COLUMNS]
    return table.with_columns(cols), rate


def trade_main(argv=None) -> int:
    args = build_trade_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        table, rate = trade_table(args.input, args.rate, args.unit)
        out = ensure_dir(args.out)
        overview = {"schema": 1, "input": args.input, "rate": rate, "indicators": {}}
        for name in table.column_names:
            config = PipelineConfig(
                input=args.input,
                columns=(name,),
                sigma=args.sigma,
                knn=args.knn,
                laplacian=args.laplacian,
                k_range=args.k_range,
                seed=_seed(args.seed),
                restarts=args.restarts,
                silhouette_space=args.silhouette_space,
            )
            run = run_pipeline(config, table=table.select([name]))
            _emit(run, out / name, args.plots, args.dump_matrices)
            values = run.table.column(name).values
            overview["indicators"][name] = {
                "chosen_k": run.selection.chosen_k,
                "k_used": run.k,
                "silhouette_by_k": {str(k): v for k, v in sorted(run.selection.silhouette_by_k.items())},
                "shares": {s.category: {"count": s.count, "percent": s.percent} for s in run.shares.shares},
                "highest": {"entity_id": table.entity_ids[int(values.argmax())], "value": float(values.max())},
                "lowest": {"entity_id": table.entity_ids[int(values.argmin())], "value": float(values.min())},
            }
            print(f"{name}: k={run.k} " + " ".join(f"{s.category}={s.percent}%" for s in run.shares.shares))
        atomic_write(out / "descriptive_stats.csv", descriptive_csv(describe_table(table)))
        atomic_write(out / "overview.json", json.dumps(overview, indent=2, sort_keys=True) + "\n")
    except (ClusterError, ValueError, OSError) as exc:
        return _fail(exc)
    return 0


if __name__ == "__main__":
    sys.exit(main())

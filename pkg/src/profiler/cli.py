"""Non-interactive command line interface.

Every discovery/validation task kind runs directly over CSV files, e.g.::

    profiler discover_fd --dataset data.csv --separator ',' --has-header \
        --algo tane --error 0.05 --max-lhs 4 --threads 8 --sort-by error

    profiler validate_mfd --dataset readings.csv --lhs city --rhs temp \
        --metric absolute-difference --delta 5 --sort-by outliers

    profiler serve --port 8400 --data-dir ./profiler-data

Results print one line per instance (add ``--json`` for a JSON array);
metric validation renders the cluster screen with outliers marked ``x``.
Exit status: 0 on success, 1 on a runtime error, 2 on bad usage.
The interactive typo-cleaning pipeline lives in the web UI / HTTP API
only; the CLI stays non-interactive.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import arm, fd, ind, mfd, stats
from .dataset import NullMode, Table, infer_types, parse_csv
from .engine import results as R
from .errors import ProfilerError, ValidationError
from .mfd import MfdMetric, sort_clusters, sort_points


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="profiler",
        description="Discover and validate data patterns over CSV datasets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, multi_dataset=False):
        p.add_argument(
            "--dataset",
            action="append",
            required=True,
            metavar="FILE",
            help="CSV file; repeat for multi-table commands" if multi_dataset else "CSV file",
        )
        p.add_argument("--separator", default=",", help="field separator (default ,)")
        header = p.add_mutually_exclusive_group()
        header.add_argument("--has-header", dest="has_header", action="store_true", default=True)
        header.add_argument("--no-header", dest="has_header", action="store_false")
        p.add_argument(
            "--null-mode",
            choices=[m.value for m in NullMode],
            default=NullMode.NULL_EQUAL.value,
            help="null comparison semantics (default null-equal)",
        )
        p.add_argument("--sort-by", default=None, help="sort key, prefix - for descending")
        p.add_argument("--filter", default=None, help="regex over the text rendering")
        p.add_argument("--limit", type=int, default=None, help="print at most N items")
        p.add_argument("--json", action="store_true", help="emit a JSON document")

    p = sub.add_parser("discover_fd", help="discover exact/approximate functional dependencies")
    add_common(p)
    p.add_argument("--algo", default="tane", choices=["tane"])
    p.add_argument("--error", type=float, default=0.0, help="g3 error threshold in [0,1)")
    p.add_argument("--max-lhs", type=int, default=4)
    p.add_argument("--threads", type=int, default=1)

    p = sub.add_parser("validate_fd", help="validate one functional dependency")
    add_common(p)
    p.add_argument("--lhs", nargs="*", default=[], help="lhs columns (names or indexes)")
    p.add_argument("--rhs", required=True, help="rhs column (name or index)")
    p.add_argument("--error", type=float, default=0.0, help="holding threshold")

    p = sub.add_parser("validate_mfd", help="validate a metric dependency")
    add_common(p)
    p.add_argument("--lhs", nargs="+", required=True)
    p.add_argument("--rhs", nargs="+", required=True)
    p.add_argument("--metric", default=MfdMetric.ABSOLUTE.value, choices=[m.value for m in MfdMetric])
    p.add_argument("--delta", type=float, required=True)
    p.add_argument(
        "--points-sort-by",
        default="index",
        choices=["index", "distance", "outliers"],
        help="point order inside each cluster block",
    )

    p = sub.add_parser("discover_ind", help="discover unary inclusion dependencies")
    add_common(p, multi_dataset=True)

    p = sub.add_parser("validate_ind", help="validate one inclusion dependency")
    add_common(p, multi_dataset=True)
    p.add_argument("--dependent", required=True, metavar="TABLE.COLUMN")
    p.add_argument("--referenced", required=True, metavar="TABLE.COLUMN")
    p.add_argument("--missing-limit", type=int, default=10)

    p = sub.add_parser("mine_rules", help="mine frequent itemsets and association rules")
    add_common(p)
    p.add_argument("--algo", default="apriori", choices=["apriori", "fpgrowth"])
    p.add_argument("--min-support", type=float, required=True)
    p.add_argument("--min-confidence", type=float, default=None)
    p.add_argument("--layout", default="singular", choices=["singular", "tabular"])

    p = sub.add_parser("profile_stats", help="per-column simple statistics")
    add_common(p)

    p = sub.add_parser("serve", help="run the HTTP API and web UI")
    p.add_argument("--config", default=None, help="path to a JSON config file")
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--data-dir", default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--static-dir", default=None, help="directory with the built web client")

    return parser


def _load_tables(args) -> list[Table]:
    tables = []
    for path in args.dataset:
        table = parse_csv(
            path,
            separator=args.separator,
            has_header=args.has_header,
            null_mode=NullMode(args.null_mode),
        )
        tables.append(infer_types(table))
    return tables


def _emit(result: R.TaskResult, args, out) -> None:
    page = R.paginate(
        result,
        sort=args.sort_by,
        regex_filter=args.filter,
        page=0,
        page_size=args.limit or max(1, len(result.items)),
    )
    if args.json:
        json.dump(
            {"kind": result.kind, "summary": result.summary, **page.to_json()},
            out,
            indent=2,
            default=str,
        )
        out.write("\n")
        return
    for item in page.items:
        out.write(item["text"] + "\n")
    shown = len(page.items)
    if shown < page.total_count:
        out.write(f"... {page.total_count - shown} more (use --limit)\n")


def _column_ref(value: str):
    return int(value) if value.isdigit() else value


def _run_discover_fd(args, out) -> int:
    table = _load_tables(args)[0]
    config = fd.FdDiscoveryConfig(
        max_lhs=args.max_lhs, error_threshold=args.error, thread_count=args.threads
    )
    fds = fd.discover_fds(table, config)
    _emit(
        R.TaskResult(
            "discover_fd", tuple(R.fd_items(table, fds)), {"count": len(fds)}
        ),
        args,
        out,
    )
    return 0


def _run_validate_fd(args, out) -> int:
    table = _load_tables(args)[0]
    lhs = [table.column_index(_column_ref(c)) for c in args.lhs]
    rhs = table.column_index(_column_ref(args.rhs))
    report = fd.validate_fd(table, lhs, rhs, args.error)
    result = R.fd_validation_result(table, lhs, rhs, report)
    if not args.json:
        verdict = "HOLDS" if report.holds else "DOES NOT HOLD"
        out.write(f"{verdict} (error={report.error:.6g}, threshold={args.error:.6g})\n")
    _emit(result, args, out)
    return 0


def _render_mfd_screen(result, args, out) -> None:
    clusters = sort_clusters(result.clusters, args.sort_by or "index")
    out.write(
        ("HOLDS" if result.holds else "DOES NOT HOLD")
        + f" (delta={args.delta:.6g}, violating clusters: {len(clusters)})\n"
    )
    for i, cluster in enumerate(clusters, start=1):
        lhs_text = ", ".join("∅" if v is None else v for v in cluster.lhs_value)
        out.write(
            f"cluster #{i} lhs=({lhs_text}) size={len(cluster.points)} "
            f"outliers={cluster.outlier_count}\n"
        )
        for point in sort_points(cluster.points, args.points_sort_by):
            mark = "x" if point.is_outlier else " "
            values = ", ".join("∅" if v is None else v for v in point.values)
            distance = (
                "inf" if point.max_min_distance == float("inf")
                else f"{point.max_min_distance:.6g}"
            )
            out.write(f"  [{mark}] row {point.row_index}: {values} (distance {distance})\n")


def _run_validate_mfd(args, out) -> int:
    table = _load_tables(args)[0]
    query = mfd.MfdQuery(
        lhs=tuple(table.column_index(_column_ref(c)) for c in args.lhs),
        rhs=tuple(table.column_index(_column_ref(c)) for c in args.rhs),
        metric=MfdMetric(args.metric),
        delta=args.delta,
    )
    result = mfd.validate_mfd(table, query)
    if args.json:
        _emit(R.mfd_validation_result(result), args, out)
    else:
        _render_mfd_screen(result, args, out)
    return 0


def _run_discover_ind(args, out) -> int:
    tables = _load_tables(args)
    inds = ind.discover_unary_inds(tables)
    _emit(
        R.TaskResult("discover_ind", tuple(R.ind_items(inds)), {"count": len(inds)}),
        args,
        out,
    )
    return 0


def _parse_table_column(value: str) -> tuple[str, str]:
    if "." not in value:
        raise ValidationError(f"expected TABLE.COLUMN, got {value!r}")
    table, column = value.split(".", 1)
    return table, column


def _run_validate_ind(args, out) -> int:
    tables = _load_tables(args)

    def ref_of(raw: str) -> ind.ColumnRef:
        table_name, column = _parse_table_column(raw)
        table = next((t for t in tables if t.name == table_name), None)
        if table is None:
            from .errors import UnknownTable

            raise UnknownTable(
                f"no table named {table_name!r}; tables: {[t.name for t in tables]}"
            )
        col = table.column_index(_column_ref(column))
        return ind.ColumnRef(table.name, col, table.columns[col].name)

    the_ind = ind.Ind(ref_of(args.dependent), ref_of(args.referenced))
    holds, missing = ind.validate_ind(the_ind, tables, limit=args.missing_limit)
    if args.json:
        json.dump(
            {"holds": holds, "ind": the_ind.render(), "missing_sample": missing},
            out,
            indent=2,
        )
        out.write("\n")
    else:
        out.write(("HOLDS " if holds else "DOES NOT HOLD ") + the_ind.render() + "\n")
        for v in missing:
            out.write(f"  missing: {v}\n")
    return 0


def _run_mine_rules(args, out) -> int:
    txns = arm.load_transactions(
        args.dataset[0],
        separator=args.separator,
        has_header=args.has_header,
        layout=args.layout,
    )
    itemsets = arm.mine_frequent_itemsets(txns, args.min_support, args.algo)
    items = R.itemset_items(txns, itemsets)
    rule_count = 0
    if args.min_confidence is not None:
        rules = arm.derive_rules(itemsets, args.min_confidence)
        items += R.rule_items(txns, rules)
        rule_count = len(rules)
    _emit(
        R.TaskResult(
            "mine_rules",
            tuple(items),
            {"itemset_count": len(itemsets), "rule_count": rule_count},
        ),
        args,
        out,
    )
    return 0


def _run_profile_stats(args, out) -> int:
    table = _load_tables(args)[0]
    column_stats = stats.profile_table(table)
    _emit(
        R.TaskResult(
            "profile_stats",
            tuple(R.stats_items(column_stats)),
            {"columns": len(column_stats)},
        ),
        args,
        out,
    )
    return 0


def _run_serve(args, _out) -> int:
    import uvicorn

    from .engine import Engine, load_config
    from .engine.api import create_app

    config = load_config(
        args.config,
        data_dir=args.data_dir,
        workers=args.workers,
        host=args.host,
        port=args.port,
        static_dir=args.static_dir,
    )
    engine = Engine(config)
    app = create_app(engine)
    try:
        uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    finally:
        engine.close()
    return 0


_RUNNERS = {
    "discover_fd": _run_discover_fd,
    "validate_fd": _run_validate_fd,
    "validate_mfd": _run_validate_mfd,
    "discover_ind": _run_discover_ind,
    "validate_ind": _run_validate_ind,
    "mine_rules": _run_mine_rules,
    "profile_stats": _run_profile_stats,
    "serve": _run_serve,
}


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _RUNNERS[args.command](args, out)
    except ProfilerError as e:
        print(f"error [{e.code}]: {e}", file=sys.stderr)
        return 1
    except FileNotFoundError as e:
        print(f"error [FILE_NOT_FOUND]: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

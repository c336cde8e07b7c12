"""Command-line entry point.

Subcommands:
  lattice       build a diamond-lattice site file
  check-causal  evaluate causal queries with assertions against a site file
  run           execute a scenario file's checks, emit JSON-lines + CSV
  report        render a report file as a table, CSV, or plot data

Exit codes: 0 all checks pass (or matched their declared expectation),
1 unexpected verification failure, 2 input or schema error.
Reports are byte-identical across runs with the same seed; wall-clock
timings are suppressed unless --timings is given.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

from .errors import CausalqError, SchemaError
from .schema import load_queries, load_scenario, load_site, run_checks, run_query, save_site
from .site import build_diamond_lattice

OUTPUT_ENV = "CAUSALQ_OUTPUT_DIR"


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except CausalqError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="causalq", description=__doc__)
    sub = p.add_subparsers(required=True)

    lat = sub.add_parser("lattice", help="build a diamond-lattice site file")
    lat.add_argument("T", type=int)
    lat.add_argument("L", type=int)
    lat.add_argument("slope", type=int)
    lat.add_argument("--output", default=None)
    lat.set_defaults(func=cmd_lattice)

    chk = sub.add_parser("check-causal", help="run causal queries against a site")
    chk.add_argument("site")
    chk.add_argument("queries")
    chk.add_argument("--output", default=None)
    chk.set_defaults(func=cmd_check_causal)

    run = sub.add_parser("run", help="execute a scenario file")
    run.add_argument("scenario")
    run.add_argument("--seed", type=int, default=None, help="override the file's seed")
    run.add_argument("--output", default=None, help="output directory")
    run.add_argument("--tolerance-scale", type=float, default=1.0)
    run.add_argument("--timings", action="store_true",
                     help="record wall-clock runtimes (breaks byte-identity)")
    run.set_defaults(func=cmd_run)

    rep = sub.add_parser("report", help="render a JSON-lines report")
    rep.add_argument("report")
    rep.add_argument("--format", default="table", dest="fmt")
    rep.set_defaults(func=cmd_report)
    return p


def _outdir(arg) -> Path:
    base = arg or os.environ.get(OUTPUT_ENV) or "."
    path = Path(base)
    path.mkdir(parents=True, exist_ok=True)
    return path


# ----------------------------------------------------------------------


def cmd_lattice(args) -> int:
    if args.T < 1 or args.L < 0 or args.slope < 1:
        print("invalid extents: need T >= 1, L >= 0, slope >= 1", file=sys.stderr)
        return 2
    site = build_diamond_lattice(args.T, args.L, args.slope)
    out = Path(args.output) if args.output else _outdir(None) / f"lattice_{args.T}x{args.L}.json"
    save_site(site, out)
    print(f"wrote {site.n}-event site to {out}")
    return 0


def cmd_check_causal(args) -> int:
    site = load_site(args.site)
    queries = load_queries(args.queries)
    records = []
    failed = 0
    for q in queries:
        rep = run_query(site, q)
        records.append(rep.to_record())
        failed += 0 if rep.passed else 1
    if args.output:
        _write_jsonl(Path(args.output), records)
    for r in records:
        status = "ok" if r["pass"] else "FAIL"
        print(f"{status}  {r['check']}  {json.dumps(r['evidence'], sort_keys=True)}")
    print(f"{len(records) - failed}/{len(records)} queries passed")
    return 0 if failed == 0 else 1


def cmd_run(args) -> int:
    loaded = load_scenario(args.scenario)
    if args.seed is not None:
        loaded.seed = args.seed
    reports = run_checks(loaded, tol_scale=args.tolerance_scale)

    records = []
    for c, rep in zip(loaded.checks, reports):
        expected = c.get("expect", "pass")
        records.append(rep.to_record(expected=expected, include_runtime=args.timings))

    outdir = _outdir(args.output)
    jsonl = outdir / f"{loaded.name}.report.jsonl"
    summary = outdir / f"{loaded.name}.summary.csv"
    _write_jsonl(jsonl, records)
    _write_csv(summary, records)

    unmatched = [r for r in records if not r["pass"]]
    for r in records:
        status = "ok" if r["pass"] else "FAIL"
        print(f"{status}  {r['scenario']}::{r['check']} (expected {r['expected']})")
    print(f"wrote {jsonl} and {summary}")
    return 0 if not unmatched else 1


def cmd_report(args) -> int:
    records = _read_jsonl(Path(args.report))
    if args.fmt == "table":
        print(render_table(records), end="")
    elif args.fmt == "csv":
        print(render_csv(records), end="")
    elif args.fmt == "plotdata":
        print(render_plotdata(records), end="")
    else:
        print(f"unknown format {args.fmt!r}", file=sys.stderr)
        return 2
    return 0


# ----------------------------------------------------------------------
# Rendering and IO


def _write_jsonl(path: Path, records) -> None:
    with open(path, "w") as fh:
        for r in records:
            fh.write(json.dumps(r, sort_keys=True) + "\n")


def _read_jsonl(path: Path) -> list[dict]:
    records = []
    with open(path) as fh:
        for i, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise SchemaError(f"bad report line: {exc.msg}", line=i)
    return records


_CSV_COLUMNS = ("scenario", "check", "pass", "expected", "runtime_ms")


def _write_csv(path: Path, records) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(_CSV_COLUMNS)
        for r in records:
            w.writerow([r.get(c, "") for c in _CSV_COLUMNS])


def render_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(_CSV_COLUMNS)
    for r in records:
        w.writerow([r.get(c, "") for c in _CSV_COLUMNS])
    return buf.getvalue()


def render_table(records) -> str:
    if not records:
        return "(empty report)\n"
    rows = [
        (
            r.get("scenario", ""),
            r.get("check", ""),
            "pass" if r.get("pass") else "FAIL",
            str(r.get("expected", "")),
        )
        for r in records
    ]
    header = ("scenario", "check", "status", "expected")
    widths = [max(len(h), *(len(row[i]) for row in rows)) for i, h in enumerate(header)]
    lines = [
        "  ".join(h.ljust(widths[i]) for i, h in enumerate(header)),
        "  ".join("-" * w for w in widths),
    ]
    lines += ["  ".join(row[i].ljust(widths[i]) for i in range(len(header))) for row in rows]
    return "\n".join(lines) + "\n"


def render_plotdata(records) -> str:
    """Emit x/y series found in record evidence, for external plotting."""
    chunks = []
    for r in records:
        series = r.get("evidence", {}).get("series")
        if not series:
            continue
        lines = [f"# {r.get('scenario', '')}/{r.get('check', '')}"]
        lines += [f"{x} {y}" for x, y in zip(series["x"], series["y"])]
        chunks.append("\n".join(lines) + "\n")
    return "\n".join(chunks)


if __name__ == "__main__":
    sys.exit(main())

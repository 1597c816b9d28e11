"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 data/validation error.  Human
diagnostics go to stderr; stdout carries only machine payloads (report
output when -o is omitted, classify results).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import ingest, microbench, report
from .errors import IoError, OpbenchError, SchemaError, VersionError
from .graph_ir import GRAPH_VERSION, RECORDS_VERSION, load_graph, load_records
from .microbench import UBENCH_VERSION
from .profiler import TRACE_VERSION, ProfileConfig, profile_graph, save_trace
from .taxonomy import GROUP_ORDER, OperatorGroup, classify, load_rules


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage problems; the contract here is exit 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _load_rules_arg(args):
    path = getattr(args, "rules", None) or os.environ.get("OPBENCH_RULES")
    if path:
        return load_rules(path)
    return None


def _cmd_validate(args) -> int:
    # Dispatch on the version string so one verb covers every file kind.
    try:
        with open(args.file, "r", encoding="utf-8") as f:
            payload = json.load(f)
    except OSError as e:
        raise IoError(f"cannot read {args.file}: {e}") from e
    except json.JSONDecodeError as e:
        raise SchemaError(f"{args.file} is not valid JSON: {e}") from e
    version = payload.get("version") if isinstance(payload, dict) else None
    if version == GRAPH_VERSION:
        graph = load_graph(args.file)
        detail = (
            f"{len(graph.nodes)} nodes, {len(graph.graph_inputs)} inputs, "
            f"{len(graph.graph_outputs)} outputs"
        )
    elif version == TRACE_VERSION:
        run = ingest.parse_trace(args.file)
        detail = f"{len(run.samples)} samples, total {run.total_wall_time_us} us"
    elif version == RECORDS_VERSION:
        records = load_records(args.file)
        detail = f"{len(records)} shape records"
    elif version == UBENCH_VERSION:
        specs = microbench.load_specs(args.file)
        detail = f"{len(specs)} microbenchmark specs"
    else:
        raise VersionError(f"{args.file}: unknown or missing version {version!r}")
    print(f"OK: {args.file}: {version}: {detail}", file=sys.stderr)
    return 0


def _cmd_profile(args) -> int:
    graph = load_graph(args.graph)
    config = ProfileConfig(warmup=args.warmup, repeats=args.repeats, seed=args.seed)
    run = profile_graph(
        graph,
        config=config,
        rules=_load_rules_arg(args),
        model_name=args.model,
        batch_size=args.batch,
    )
    save_trace(run, args.out)
    print(
        f"profiled {run.model_name}: {len(run.samples)} samples, "
        f"total {run.total_wall_time_us:.1f} us -> {args.out}",
        file=sys.stderr,
    )
    return 0


def _cmd_ingest(args) -> int:
    rules = _load_rules_arg(args)
    if args.chrome:
        run = ingest.convert_chrome_trace(args.trace, mapping=rules)
    else:
        run = ingest.parse_trace(args.trace, rules=rules)
    save_trace(run, args.out)
    uncategorized = sum(1 for s in run.samples if s.group is OperatorGroup.Uncategorized)
    print(
        f"ingested {args.trace}: {len(run.samples)} samples "
        f"({uncategorized} uncategorized) -> {args.out}",
        file=sys.stderr,
    )
    return 0


def _cmd_report(args) -> int:
    rules = _load_rules_arg(args)
    b = report.breakdown(ingest.parse_trace(args.trace, rules=rules))
    if args.compare:
        other = report.breakdown(ingest.parse_trace(args.compare, rules=rules))
        payload = report.compare(b, other)
    else:
        payload = b
    text = report.emit(payload, args.format, path=args.out)
    if args.out is None:
        sys.stdout.write(text)
    else:
        print(f"wrote {args.format} report -> {args.out}", file=sys.stderr)
    return 0


def _cmd_ubench_gen(args) -> int:
    records = load_records(args.records)
    predicate = None
    if args.group or args.op:

        def predicate(r):
            if args.group and r.group != args.group:
                return False
            if args.op and r.op_name != args.op:
                return False
            return True

    specs = microbench.generate_specs(records, predicate)
    microbench.save_specs(specs, args.out)
    print(f"generated {len(specs)} specs from {len(records)} records -> {args.out}", file=sys.stderr)
    return 0


def _cmd_ubench_run(args) -> int:
    specs = microbench.load_specs(args.suite)
    config = microbench.MicrobenchConfig(warmup=args.warmup, iterations=args.iterations)
    entries = microbench.run_suite(specs, config)
    microbench.save_results(entries, args.out)
    print(microbench.format_summary(entries), file=sys.stderr)
    print(f"results -> {args.out}", file=sys.stderr)
    return 0


def _cmd_classify(args) -> int:
    group = classify(args.op_name, _load_rules_arg(args))
    print(f"{args.op_name}\t{group.value}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="opbench", description="Operator-level workload profiling and microbenchmarks.")
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("validate", help="check any versioned opbench JSON file")
    p.add_argument("file", help="graph, trace, records, or suite JSON file")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("profile", help="execute a graph with per-node timing")
    p.add_argument("graph", help="path to an opbench-graph/1 JSON file")
    p.add_argument("-o", "--out", required=True, help="output trace path")
    p.add_argument("--warmup", type=int, default=5)
    p.add_argument("--repeats", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--model", default=None, help="model name recorded in the trace")
    p.add_argument("--batch", type=int, default=None, help="batch size recorded in the trace")
    p.add_argument("--rules", default=None, help="classification rules JSON")
    p.set_defaults(func=_cmd_profile)

    p = sub.add_parser("ingest", help="normalize an external trace file")
    p.add_argument("trace", help="trace file path")
    p.add_argument("-o", "--out", required=True, help="normalized trace output path")
    p.add_argument("--chrome", action="store_true", help="input is Chrome trace event JSON")
    p.add_argument("--rules", default=None)
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("report", help="aggregate a trace into a per-group breakdown")
    p.add_argument("trace", help="opbench-trace/1 file")
    p.add_argument("--compare", default=None, help="second trace; emit b/a pct ratios")
    p.add_argument("--format", choices=list(report.EMIT_FORMATS), default="json")
    p.add_argument("-o", "--out", default=None, help="write to file instead of stdout")
    p.add_argument("--rules", default=None)
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("ubench", help="microbenchmark suites")
    usub = p.add_subparsers(dest="ubench_command", metavar="subcommand")

    g = usub.add_parser("gen", help="generate a spec suite from shape records")
    g.add_argument("records", help="opbench-records/1 file")
    g.add_argument("-o", "--out", required=True, help="suite output path")
    g.add_argument("--group", choices=[g.value for g in GROUP_ORDER], default=None)
    g.add_argument("--op", default=None, help="keep only records with this op_name")
    g.set_defaults(func=_cmd_ubench_gen)

    r = usub.add_parser("run", help="run a spec suite")
    r.add_argument("suite", help="opbench-ubench/1 file")
    r.add_argument("-o", "--out", required=True, help="results output path")
    r.add_argument("--warmup", type=int, default=10)
    r.add_argument("--iterations", type=int, default=100)
    r.set_defaults(func=_cmd_ubench_run)

    p = sub.add_parser("classify", help="one-shot operator name to group lookup")
    p.add_argument("op_name")
    p.add_argument("--rules", default=None)
    p.set_defaults(func=_cmd_classify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "func"):
        parser.print_usage(sys.stderr)
        return 1
    try:
        return args.func(args)
    except OpbenchError as e:
        print(f"opbench: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

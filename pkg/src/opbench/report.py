"""Aggregation of trace samples into per-group latency breakdowns.

Percentages are computed over the sum of graph-level sample self-times;
child kernel events are a drill-down detail and never enter the totals,
so nothing is double counted.  All nine operator groups appear in every
breakdown, zero-filled when absent, which keeps emitted CSV diffable
across runs.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

from .errors import BadAttr, EmptyError, IoError, SchemaError
from .graph_ir import canonical_dumps
from .profiler import ProfileRun
from .taxonomy import GROUP_ORDER, NON_GEMM_GROUPS, OperatorGroup

EMIT_FORMATS = ("json", "csv", "markdown", "plotdata")

CSV_COLUMNS = ("group", "time_us", "pct", "event_count", "flops")


@dataclass
class GroupStat:
    time_us: float = 0.0
    pct: float = 0.0
    event_count: int = 0
    flops: int = 0


@dataclass
class GroupBreakdown:
    per_group: dict[OperatorGroup, GroupStat]
    total_time_us: float
    gemm_pct: float
    nongemm_pct: float
    model_name: str = ""
    batch_size: int = 0


@dataclass
class RatioRow:
    a_pct: float
    b_pct: float
    ratio: float
    flag: str = ""


@dataclass
class ComparisonTable:
    rows: dict[OperatorGroup, RatioRow]
    nongemm: RatioRow
    a_name: str = "a"
    b_name: str = "b"


def breakdown(trace: ProfileRun) -> GroupBreakdown:
    """Per-group time/pct/count/flops over a trace's sample self-times.

    An empty trace (or one whose samples all take zero time) yields an
    all-zero breakdown rather than an error.
    """
    stats = {g: GroupStat() for g in GROUP_ORDER}
    for s in trace.samples:
        st = stats[s.group]
        st.time_us += s.wall_time_us
        st.event_count += 1
        st.flops += s.flops
    total = sum(st.time_us for st in stats.values())
    if total > 0:
        for st in stats.values():
            st.pct = 100.0 * st.time_us / total
    gemm_pct = stats[OperatorGroup.GEMM].pct
    nongemm_pct = sum(stats[g].pct for g in NON_GEMM_GROUPS)
    return GroupBreakdown(
        per_group=stats,
        total_time_us=total,
        gemm_pct=gemm_pct,
        nongemm_pct=nongemm_pct,
        model_name=trace.model_name,
        batch_size=trace.batch_size,
    )


def top_nongemm_group(b: GroupBreakdown) -> tuple[OperatorGroup, float]:
    """The most expensive non-GEMM group and its share of total time.

    Ties break toward the earlier group in enumeration order.
    """
    if all(b.per_group[g].event_count == 0 for g in NON_GEMM_GROUPS):
        raise EmptyError("no non-GEMM events in breakdown")
    best = None
    for g in NON_GEMM_GROUPS:
        st = b.per_group[g]
        if st.event_count == 0:
            continue
        if best is None or st.time_us > b.per_group[best].time_us:
            best = g
    return best, b.per_group[best].pct


def _ratio(a: float, b: float) -> tuple[float, str]:
    if a == 0.0 and b == 0.0:
        return 1.0, ""
    if a == 0.0:
        return math.inf, "inf"
    return b / a, ""


def compare(a: GroupBreakdown, b: GroupBreakdown) -> ComparisonTable:
    """Per-group pct ratios b/a; 0/0 gives 1, x/0 gives flagged infinity."""
    rows = {}
    for g in GROUP_ORDER:
        ratio, flag = _ratio(a.per_group[g].pct, b.per_group[g].pct)
        rows[g] = RatioRow(a_pct=a.per_group[g].pct, b_pct=b.per_group[g].pct, ratio=ratio, flag=flag)
    ng_ratio, ng_flag = _ratio(a.nongemm_pct, b.nongemm_pct)
    nongemm = RatioRow(a_pct=a.nongemm_pct, b_pct=b.nongemm_pct, ratio=ng_ratio, flag=ng_flag)
    return ComparisonTable(rows=rows, nongemm=nongemm, a_name=a.model_name or "a", b_name=b.model_name or "b")


def breakdown_to_json(b: GroupBreakdown) -> dict:
    return {
        "kind": "breakdown",
        "model_name": b.model_name,
        "batch_size": b.batch_size,
        "total_time_us": b.total_time_us,
        "gemm_pct": b.gemm_pct,
        "nongemm_pct": b.nongemm_pct,
        "groups": {
            g.value: {
                "time_us": st.time_us,
                "pct": st.pct,
                "event_count": st.event_count,
                "flops": st.flops,
            }
            for g, st in b.per_group.items()
        },
    }


def breakdown_from_json(obj: dict) -> GroupBreakdown:
    if not isinstance(obj, dict) or obj.get("kind") != "breakdown":
        raise SchemaError("not a breakdown object")
    groups = obj.get("groups", {})
    per_group = {}
    for g in GROUP_ORDER:
        raw = groups.get(g.value)
        if raw is None:
            raise SchemaError(f"breakdown object missing group {g.value}")
        per_group[g] = GroupStat(
            time_us=raw["time_us"], pct=raw["pct"], event_count=raw["event_count"], flops=raw["flops"],
        )
    return GroupBreakdown(
        per_group=per_group,
        total_time_us=obj["total_time_us"],
        gemm_pct=obj["gemm_pct"],
        nongemm_pct=obj["nongemm_pct"],
        model_name=obj.get("model_name", ""),
        batch_size=obj.get("batch_size", 0),
    )


def _ratio_json(r: RatioRow) -> dict:
    return {
        "a_pct": r.a_pct,
        "b_pct": r.b_pct,
        "ratio": "inf" if math.isinf(r.ratio) else r.ratio,
        "flag": r.flag,
    }


def comparison_to_json(c: ComparisonTable) -> dict:
    return {
        "kind": "comparison",
        "a": c.a_name,
        "b": c.b_name,
        "groups": {g.value: _ratio_json(r) for g, r in c.rows.items()},
        "nongemm": _ratio_json(c.nongemm),
    }


def _emit_breakdown(b: GroupBreakdown, fmt: str) -> str:
    if fmt == "json":
        return canonical_dumps(breakdown_to_json(b))
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for g in GROUP_ORDER:
            st = b.per_group[g]
            writer.writerow([g.value, repr(st.time_us), repr(st.pct), st.event_count, st.flops])
        return buf.getvalue()
    if fmt == "markdown":
        lines = [
            f"# Breakdown: {b.model_name or 'trace'} (batch {b.batch_size})",
            "",
            f"Total: {b.total_time_us:.3f} us, GEMM {b.gemm_pct:.2f}%, non-GEMM {b.nongemm_pct:.2f}%",
            "",
            "| Group | Time (us) | Pct | Events | FLOPs |",
            "| --- | ---: | ---: | ---: | ---: |",
        ]
        for g in GROUP_ORDER:
            st = b.per_group[g]
            lines.append(f"| {g.value} | {st.time_us:.3f} | {st.pct:.4f} | {st.event_count} | {st.flops} |")
        return "\n".join(lines) + "\n"
    payload = {
        "kind": "plotdata",
        "chart": "stacked-bar",
        "categories": [b.model_name or "trace"],
        "series": [{"name": g.value, "values": [b.per_group[g].pct]} for g in GROUP_ORDER],
    }
    return canonical_dumps(payload)


def _fmt_ratio(r: float) -> str:
    return "inf" if math.isinf(r) else repr(r)


def _emit_comparison(c: ComparisonTable, fmt: str) -> str:
    if fmt == "json":
        return canonical_dumps(comparison_to_json(c))
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["group", "a_pct", "b_pct", "ratio", "flag"])
        for g in GROUP_ORDER:
            r = c.rows[g]
            writer.writerow([g.value, repr(r.a_pct), repr(r.b_pct), _fmt_ratio(r.ratio), r.flag])
        r = c.nongemm
        writer.writerow(["NonGEMM", repr(r.a_pct), repr(r.b_pct), _fmt_ratio(r.ratio), r.flag])
        return buf.getvalue()
    if fmt == "markdown":
        lines = [
            f"# Comparison: {c.a_name} vs {c.b_name}",
            "",
            "| Group | a pct | b pct | ratio | flag |",
            "| --- | ---: | ---: | ---: | --- |",
        ]
        for g in GROUP_ORDER:
            r = c.rows[g]
            lines.append(f"| {g.value} | {r.a_pct:.4f} | {r.b_pct:.4f} | {_fmt_ratio(r.ratio)} | {r.flag} |")
        r = c.nongemm
        lines.append(f"| NonGEMM | {r.a_pct:.4f} | {r.b_pct:.4f} | {_fmt_ratio(r.ratio)} | {r.flag} |")
        return "\n".join(lines) + "\n"
    payload = {
        "kind": "plotdata",
        "chart": "stacked-bar",
        "categories": [c.a_name, c.b_name],
        "series": [{"name": g.value, "values": [c.rows[g].a_pct, c.rows[g].b_pct]} for g in GROUP_ORDER]
        + [{"name": "NonGEMM", "values": [c.nongemm.a_pct, c.nongemm.b_pct]}],
    }
    return canonical_dumps(payload)


def emit(obj, format: str, path=None) -> str:
    """Render a breakdown or comparison to one of the output formats.

    Returns the rendered text; also writes it to ``path`` when given.
    """
    if format not in EMIT_FORMATS:
        raise BadAttr(f"unknown emit format {format!r}; choose from {list(EMIT_FORMATS)}")
    if isinstance(obj, GroupBreakdown):
        text = _emit_breakdown(obj, format)
    elif isinstance(obj, ComparisonTable):
        text = _emit_comparison(obj, format)
    else:
        raise BadAttr(f"emit takes a GroupBreakdown or ComparisonTable, got {type(obj).__name__}")
    if path is not None:
        try:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as e:
            raise IoError(f"cannot write {path}: {e}") from e
    return text

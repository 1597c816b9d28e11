"""Bundled desk-scale fixture data.

Two runnable toy graphs, the 30-row operator shape catalogue, four
authored sample traces whose group proportions carry self-describing
`expected` blocks, and one Chrome-format trace for ingestion tests.  All
files are generated deterministically by scripts/gen_fixtures.py; a copy
lives at the repository root under fixtures/ for command-line use.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .. import report
from ..errors import FixtureError
from ..graph_ir import load_graph, load_records
from ..ingest import convert_chrome_trace, parse_trace
from ..taxonomy import classify

DATA_DIR = Path(__file__).parent / "data"

GRAPH_FIXTURES = ("toy_vit.graph.json", "toy_det.graph.json")
TRACE_FIXTURES = (
    "gpt2_sample.trace.json",
    "fasterrcnn_sample.trace.json",
    "avg_cpu.trace.json",
    "avg_gpu.trace.json",
)
RECORD_FIXTURE = "table2_records.json"
CHROME_FIXTURE = "chrome_50.json"

PCT_TOLERANCE = 0.01


def fixture_path(name: str) -> Path:
    path = DATA_DIR / name
    if not path.is_file():
        raise FixtureError(f"no bundled fixture named {name!r}")
    return path


def list_fixtures() -> list[str]:
    return sorted(p.name for p in DATA_DIR.glob("*.json"))


@dataclass
class FixtureCheck:
    name: str
    ok: bool
    detail: str = ""


@dataclass
class FixtureReport:
    checks: list[FixtureCheck] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> list[FixtureCheck]:
        return [c for c in self.checks if not c.ok]


def _check(checks: list[FixtureCheck], name: str, fn) -> None:
    try:
        detail = fn() or ""
        checks.append(FixtureCheck(name=name, ok=True, detail=detail))
    except Exception as e:
        checks.append(FixtureCheck(name=name, ok=False, detail=f"{type(e).__name__}: {e}"))


def _check_expected_block(trace) -> str:
    b = report.breakdown(trace)
    expected = trace.expected or {}
    for key, got in (("nongemm_pct", b.nongemm_pct), ("gemm_pct", b.gemm_pct)):
        if key in expected and abs(got - expected[key]) > PCT_TOLERANCE:
            raise FixtureError(f"{key}: breakdown gives {got}, expected {expected[key]}")
    if "top_group" in expected:
        group, pct = report.top_nongemm_group(b)
        if group.value != expected["top_group"]:
            raise FixtureError(f"top group is {group.value}, expected {expected['top_group']}")
        if "top_pct" in expected and abs(pct - expected["top_pct"]) > PCT_TOLERANCE:
            raise FixtureError(f"top pct is {pct}, expected {expected['top_pct']}")
    return f"nongemm {b.nongemm_pct:.2f}%"


def verify_fixtures() -> FixtureReport:
    """Validate every bundled fixture against its schema and expectations.

    Returns the per-file report on success; raises FixtureError listing
    the failing checks otherwise.
    """
    checks: list[FixtureCheck] = []

    def check_toy_vit():
        graph = load_graph(fixture_path("toy_vit.graph.json"))
        if len(graph.nodes) != 24:
            raise FixtureError(f"toy_vit has {len(graph.nodes)} nodes, expected 24")
        return "24 nodes"

    def check_toy_det():
        graph = load_graph(fixture_path("toy_det.graph.json"))
        ops = {n.op_name for n in graph.nodes}
        if "nms" not in ops or "interpolate" not in ops:
            raise FixtureError("toy_det must contain nms and interpolate nodes")
        return f"{len(graph.nodes)} nodes"

    def check_records():
        records = load_records(fixture_path(RECORD_FIXTURE))
        if len(records) != 30:
            raise FixtureError(f"{len(records)} records, expected 30")
        bad = [r.op_name for r in records if classify(r.op_name).value != r.group]
        if bad:
            raise FixtureError(f"classification mismatch for {bad}")
        return "30/30 classified"

    _check(checks, "toy_vit.graph.json", check_toy_vit)
    _check(checks, "toy_det.graph.json", check_toy_det)
    _check(checks, RECORD_FIXTURE, check_records)

    traces = {}
    for name in TRACE_FIXTURES:
        def check_trace(name=name):
            trace = parse_trace(fixture_path(name))
            traces[name] = trace
            return _check_expected_block(trace)
        _check(checks, name, check_trace)

    def check_pair():
        a = traces.get("avg_cpu.trace.json")
        b = traces.get("avg_gpu.trace.json")
        if a is None or b is None:
            raise FixtureError("avg pair unavailable")
        want = (b.expected or {}).get("nongemm_ratio_vs", {})
        table = report.compare(report.breakdown(a), report.breakdown(b))
        if "ratio" in want and abs(table.nongemm.ratio - want["ratio"]) > PCT_TOLERANCE:
            raise FixtureError(f"nongemm ratio {table.nongemm.ratio}, expected {want['ratio']}")
        return f"ratio {table.nongemm.ratio:.3f}"

    _check(checks, "avg pair ratio", check_pair)

    def check_chrome():
        trace = convert_chrome_trace(fixture_path(CHROME_FIXTURE))
        if not trace.samples:
            raise FixtureError("chrome fixture produced no samples")
        return f"{len(trace.samples)} samples"

    _check(checks, CHROME_FIXTURE, check_chrome)

    rep = FixtureReport(checks=checks)
    if not rep.ok:
        bad = "; ".join(f"{c.name}: {c.detail}" for c in rep.failures())
        raise FixtureError(f"fixture verification failed: {bad}")
    return rep

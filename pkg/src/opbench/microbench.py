"""Standalone operator microbenchmarks seeded from captured shape records.

Each spec pins an operator, its realistic input shapes (verbatim from the
source records, no normalization), its attrs, and a seed derived from the
record content, so a suite file is fully reproducible.  Input synthesis
is op-aware: normalization ops get parameter vectors, nms gets canonical
boxes and [0,1) scores, division gets denominators bounded away from
zero.  Ops without a registered kernel are kept in the suite and reported
as unrunnable rather than dropped.
"""

from __future__ import annotations

import hashlib
import statistics
import time
from dataclasses import dataclass

import numpy as np

from .errors import ExecError, SchemaError, UnrunnableSpec, VersionError
from .executor import is_runnable, run_op
from .graph_ir import ShapeRecord, canonical_dumps, read_json, write_json
from .kernels import Tensor, flops_for
from .taxonomy import OperatorGroup, normalize_name

UBENCH_VERSION = "opbench-ubench/1"
RESULTS_VERSION = "opbench-ubench-results/1"


@dataclass
class MicrobenchConfig:
    warmup: int = 10
    iterations: int = 100


@dataclass
class MicrobenchSpec:
    op_name: str
    group: OperatorGroup
    input_shapes: list[list[int]]
    attrs: dict
    source_model: str
    seed: int

    @property
    def runnable(self) -> bool:
        return is_runnable(self.op_name)

    def to_json(self) -> dict:
        return {
            "op_name": self.op_name,
            "group": self.group.value,
            "input_shapes": [list(s) for s in self.input_shapes],
            "attrs": self.attrs,
            "source_model": self.source_model,
            "seed": self.seed,
        }

    @classmethod
    def from_json(cls, obj: dict, where: str = "spec") -> "MicrobenchSpec":
        required = ("op_name", "group", "input_shapes", "attrs", "source_model", "seed")
        if not isinstance(obj, dict):
            raise SchemaError(f"{where}: expected an object")
        missing = [f for f in required if f not in obj]
        if missing:
            raise SchemaError(f"{where}: missing fields {missing}")
        try:
            group = OperatorGroup(obj["group"])
        except ValueError:
            raise SchemaError(f"{where}: unknown group {obj['group']!r}") from None
        return cls(
            op_name=obj["op_name"],
            group=group,
            input_shapes=[list(s) for s in obj["input_shapes"]],
            attrs=dict(obj["attrs"]),
            source_model=obj["source_model"],
            seed=obj["seed"],
        )


@dataclass
class MicrobenchResult:
    spec: MicrobenchSpec
    iterations: int
    warmup: int
    times_us: list[float]
    stats: dict
    flops: int
    throughput_gflops: float


@dataclass
class SuiteEntry:
    spec: MicrobenchSpec
    status: str  # ok | unrunnable | error
    result: MicrobenchResult | None = None
    message: str = ""


def record_seed(record: ShapeRecord) -> int:
    """Deterministic 63-bit seed from the record's canonical content."""
    payload = canonical_dumps({
        "op_name": record.op_name,
        "group": record.group,
        "input_shapes": [list(s) for s in record.input_shapes],
        "attrs": record.attrs,
        "source_model": record.source_model,
    })
    digest = hashlib.sha256(payload.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def generate_specs(records: list[ShapeRecord], predicate=None) -> list[MicrobenchSpec]:
    """One spec per record passing the predicate.

    Ordering: descending occurrence count, then op_name (stable for equal
    keys).  Shapes and attrs are carried over verbatim.
    """
    chosen = [r for r in records if predicate is None or predicate(r)]
    chosen.sort(key=lambda r: (-r.count, r.op_name))
    specs = []
    for r in chosen:
        try:
            group = OperatorGroup(r.group)
        except ValueError:
            raise SchemaError(f"record for {r.op_name!r} has unknown group {r.group!r}") from None
        specs.append(MicrobenchSpec(
            op_name=r.op_name,
            group=group,
            input_shapes=[list(s) for s in r.input_shapes],
            attrs=dict(r.attrs),
            source_model=r.source_model,
            seed=record_seed(r),
        ))
    return specs


_NORM_OPS_LAST_DIM = ("layer_norm", "layernorm", "native_layer_norm", "rms_norm", "rmsnorm", "llamarmsnorm")
_BATCHNORM_OPS = ("batch_norm", "batchnorm1d", "batchnorm2d", "batchnorm3d", "frozenbatchnorm2d")
_DIV_OPS = ("div", "true_divide", "truediv")
_BINARY_OPS = ("add", "add_", "sub", "mul") + _DIV_OPS
_NMS_OPS = ("nms", "batched_nms")


def _uniform(rng, shape, low=-1.0, high=1.0) -> Tensor:
    return Tensor(rng.uniform(low, high, size=shape).astype(np.float32))


def synthesize_op_inputs(spec: MicrobenchSpec) -> list[Tensor]:
    """Build input tensors for a spec, deterministically from its seed.

    The first declared shape is always the primary operand.  Parameter
    tensors required by the kernel but absent from the record (norm
    scales, running statistics, matmul right-hand sides) are synthesized
    with shapes implied by the primary operand.
    """
    rng = np.random.default_rng(spec.seed)
    name = normalize_name(spec.op_name)
    shapes = [tuple(s) for s in spec.input_shapes]
    if not shapes:
        raise ExecError(spec.op_name, "spec declares no input shapes")
    x_shape = shapes[0]

    if name in _NORM_OPS_LAST_DIM:
        inputs = [_uniform(rng, x_shape)]
        n = x_shape[-1]
        inputs.append(_uniform(rng, (n,)))
        if name not in ("rms_norm", "rmsnorm", "llamarmsnorm"):
            inputs.append(_uniform(rng, (n,)))
        return inputs
    if name in _BATCHNORM_OPS:
        c = x_shape[1]
        return [
            _uniform(rng, x_shape),
            _uniform(rng, (c,)),
            Tensor(rng.uniform(0.25, 1.25, size=(c,)).astype(np.float32)),
            _uniform(rng, (c,)),
            _uniform(rng, (c,)),
        ]
    if name in _NMS_OPS:
        n = x_shape[0]
        x1 = rng.uniform(0.0, 100.0, size=n)
        y1 = rng.uniform(0.0, 100.0, size=n)
        w = np.abs(rng.uniform(-50.0, 50.0, size=n))
        h = np.abs(rng.uniform(-50.0, 50.0, size=n))
        boxes = np.stack([x1, y1, x1 + w, y1 + h], axis=1).astype(np.float32)
        scores = rng.uniform(0.0, 1.0, size=n).astype(np.float32)
        return [Tensor(boxes), Tensor(scores)]
    if name in _BINARY_OPS:
        if "other" in spec.attrs or len(shapes) < 2:
            inputs = [_uniform(rng, x_shape)]
            if "other" not in spec.attrs:
                low, high = (0.5, 1.5) if name in _DIV_OPS else (-1.0, 1.0)
                inputs.append(Tensor(rng.uniform(low, high, size=x_shape).astype(np.float32)))
            return inputs
        a = _uniform(rng, shapes[0])
        if name in _DIV_OPS:
            return [a, Tensor(rng.uniform(0.5, 1.5, size=shapes[1]).astype(np.float32))]
        return [a, _uniform(rng, shapes[1])]
    if name in ("matmul", "bmm", "mm") and len(shapes) == 1:
        b_shape = x_shape[:-2] + (x_shape[-1], x_shape[-2])
        return [_uniform(rng, x_shape), _uniform(rng, b_shape)]
    if name == "linear" and len(shapes) == 1:
        k = x_shape[-1]
        return [_uniform(rng, x_shape), _uniform(rng, (k, k))]
    return [_uniform(rng, s) for s in shapes]


def _check_finite(outputs: list[Tensor], op_name: str) -> None:
    for t in outputs:
        if t.data.dtype == np.float32 and t.data.size and not np.isfinite(t.data).all():
            raise ExecError(op_name, "output contains non-finite values")


def run_spec(spec: MicrobenchSpec, config: MicrobenchConfig | None = None) -> MicrobenchResult:
    """Time one operator in isolation: warmup untimed, iterations timed.

    The stored stats are recomputable from times_us; the functional
    output is checked finite once before timing starts.
    """
    config = config or MicrobenchConfig()
    if config.iterations < 1:
        raise ExecError(spec.op_name, f"iterations must be >= 1, got {config.iterations}")
    if not spec.runnable:
        raise UnrunnableSpec(f"no kernel registered for operator {spec.op_name!r}")
    inputs = synthesize_op_inputs(spec)
    outputs = run_op(spec.op_name, inputs, spec.attrs)
    _check_finite(outputs, spec.op_name)
    flops = flops_for(
        spec.op_name,
        [t.spec for t in inputs],
        [t.spec for t in outputs],
        spec.attrs,
    )

    for _ in range(config.warmup):
        run_op(spec.op_name, inputs, spec.attrs)
    times_us = []
    for _ in range(config.iterations):
        t0 = time.perf_counter_ns()
        run_op(spec.op_name, inputs, spec.attrs)
        t1 = time.perf_counter_ns()
        times_us.append((t1 - t0) / 1000.0)

    stats = {
        "min": min(times_us),
        "median": statistics.median(times_us),
        "mean": statistics.fmean(times_us),
        "std": statistics.pstdev(times_us),
    }
    median = stats["median"]
    throughput = flops / (median * 1000.0) if flops > 0 and median > 0 else 0.0
    return MicrobenchResult(
        spec=spec,
        iterations=config.iterations,
        warmup=config.warmup,
        times_us=times_us,
        stats=stats,
        flops=flops,
        throughput_gflops=throughput,
    )


def run_suite(specs: list[MicrobenchSpec], config: MicrobenchConfig | None = None) -> list[SuiteEntry]:
    """Run specs serially in order; per-spec failures never abort the suite."""
    entries = []
    for spec in specs:
        try:
            result = run_spec(spec, config)
            entries.append(SuiteEntry(spec=spec, status="ok", result=result))
        except UnrunnableSpec as e:
            entries.append(SuiteEntry(spec=spec, status="unrunnable", message=str(e)))
        except Exception as e:
            entries.append(SuiteEntry(spec=spec, status="error", message=str(e)))
    return entries


def format_summary(entries: list[SuiteEntry]) -> str:
    """Fixed-width per-op summary table for terminal output."""
    lines = [f"{'op':<24} {'group':<20} {'status':<11} {'median_us':>12} {'gflops':>10}"]
    for e in entries:
        if e.result is not None:
            median = f"{e.result.stats['median']:.3f}"
            gflops = f"{e.result.throughput_gflops:.3f}"
        else:
            median, gflops = "-", "-"
        lines.append(f"{e.spec.op_name:<24} {e.spec.group.value:<20} {e.status:<11} {median:>12} {gflops:>10}")
    counts = {"ok": 0, "unrunnable": 0, "error": 0}
    for e in entries:
        counts[e.status] += 1
    lines.append(f"{len(entries)} specs: {counts['ok']} ok, {counts['unrunnable']} unrunnable, {counts['error']} error")
    return "\n".join(lines)


def save_specs(specs: list[MicrobenchSpec], path) -> None:
    write_json(path, {"version": UBENCH_VERSION, "specs": [s.to_json() for s in specs]})


def load_specs(path) -> list[MicrobenchSpec]:
    obj = read_json(path)
    if not isinstance(obj, dict):
        raise SchemaError(f"{path}: suite file must contain a JSON object")
    version = obj.get("version")
    if version is None:
        raise SchemaError(f"{path}: missing version field")
    if version != UBENCH_VERSION:
        raise VersionError(f"{path}: unsupported suite version {version!r}, expected {UBENCH_VERSION!r}")
    raw = obj.get("specs")
    if not isinstance(raw, list):
        raise SchemaError(f"{path}: specs must be a list")
    return [MicrobenchSpec.from_json(s, where=f"specs[{i}]") for i, s in enumerate(raw)]


def save_results(entries: list[SuiteEntry], path) -> None:
    rows = []
    for e in entries:
        row = {"spec": e.spec.to_json(), "status": e.status}
        if e.result is not None:
            row["iterations"] = e.result.iterations
            row["warmup"] = e.result.warmup
            row["times_us"] = e.result.times_us
            row["stats"] = e.result.stats
            row["flops"] = e.result.flops
            row["throughput_gflops"] = e.result.throughput_gflops
        if e.message:
            row["message"] = e.message
        rows.append(row)
    write_json(path, {"version": RESULTS_VERSION, "results": rows})

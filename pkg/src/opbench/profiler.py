"""Graph execution with per-operator wall-clock timing.

A profile run executes the graph warmup times untimed, then `repeats`
times with per-node timing.  The reported per-node time is the median
across repeats, and total_wall_time_us is the median of the whole-pass
wall times, so per-node bookkeeping overhead lands in the total rather
than in any node.  Timing uses time.perf_counter_ns.

Profiling must not perturb results: a profiled run produces bitwise the
same outputs as plain `execute_graph` on the same inputs.
"""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import ExecError, InputMismatch
from .executor import run_node, synthesize_tensor
from .graph_ir import OperatorGraph, ShapeRecord, canonical_dumps, topo_order, write_json
from .kernels import Tensor, flop_count
from .taxonomy import OperatorGroup, RuleSet, classify

TRACE_VERSION = "opbench-trace/1"

DEVICES = ("host", "device_external")


@dataclass
class ProfileConfig:
    warmup: int = 5
    repeats: int = 30
    seed: int = 0


@dataclass
class ProfileSample:
    """One timed operator invocation (or one ingested trace event)."""

    node_id: str
    op_name: str
    group: OperatorGroup
    wall_time_us: float
    flops: int
    input_shapes: list[list[int]]
    device: str = "host"
    attrs: dict = field(default_factory=dict)
    children: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        obj = {
            "node_id": self.node_id,
            "op_name": self.op_name,
            "group": self.group.value,
            "device": self.device,
            "wall_time_us": self.wall_time_us,
            "flops": self.flops,
            "input_shapes": [list(s) for s in self.input_shapes],
        }
        if self.attrs:
            obj["attrs"] = self.attrs
        if self.children:
            obj["children"] = self.children
        return obj


@dataclass
class ProfileRun:
    """A complete per-operator timing record for one model execution."""

    model_name: str
    batch_size: int
    repeats: int
    samples: list[ProfileSample]
    total_wall_time_us: float
    clock_resolution_ns: int | None = None
    expected: dict | None = None

    def to_json(self) -> dict:
        obj = {
            "version": TRACE_VERSION,
            "model_name": self.model_name,
            "batch_size": self.batch_size,
            "repeats": self.repeats,
            "samples": [s.to_json() for s in self.samples],
            "total_wall_time_us": self.total_wall_time_us,
        }
        if self.clock_resolution_ns is not None:
            obj["clock_resolution_ns"] = self.clock_resolution_ns
        if self.expected is not None:
            obj["expected"] = self.expected
        return obj


def save_trace(run: ProfileRun, path) -> None:
    write_json(path, run.to_json())


def make_inputs(graph: OperatorGraph, seed: int = 0, provided: dict[str, Tensor] | None = None) -> dict[str, Tensor]:
    """Input tensors for a graph, synthesized deterministically from seed.

    Entries in ``provided`` are used as-is after checking dims and dtype
    against the declared spec; everything else is drawn from one
    np.random.default_rng(seed) stream in declared graph-input order.
    """
    provided = dict(provided or {})
    declared = {name for name, _ in graph.graph_inputs}
    for name in provided:
        if name not in declared:
            raise InputMismatch(f"provided input {name!r} is not a graph input")
    rng = np.random.default_rng(seed)
    values: dict[str, Tensor] = {}
    for name, spec in graph.graph_inputs:
        if name in provided:
            t = provided[name]
            if tuple(t.dims) != tuple(spec.dims) or t.dtype != spec.dtype:
                raise InputMismatch(
                    f"input {name!r}: got {t.dtype}{list(t.dims)}, declared {spec.dtype}{list(spec.dims)}"
                )
            values[name] = t
        else:
            values[name] = synthesize_tensor(spec, rng)
    return values


def _run_pass(graph: OperatorGraph, inputs: dict[str, Tensor], order, node_times_ns=None):
    """One full execution; appends per-node ns to node_times_ns if given."""
    values = dict(inputs)
    for node in order:
        args = []
        for ref in node.inputs:
            if ref not in values:
                raise ExecError(node.id, f"undefined input value {ref!r}")
            args.append(values[ref])
        if node_times_ns is None:
            outs = run_node(node, args)
        else:
            t0 = time.perf_counter_ns()
            outs = run_node(node, args)
            t1 = time.perf_counter_ns()
            node_times_ns[node.id].append(t1 - t0)
        out_ids = node.output_ids()
        if len(outs) != len(out_ids):
            raise ExecError(node.id, f"kernel produced {len(outs)} outputs, declared {len(out_ids)}")
        for ref, tensor in zip(out_ids, outs):
            values[ref] = tensor
    return values


def _ordered_nodes(graph: OperatorGraph):
    node_map = graph.node_map()
    return [node_map[nid] for nid in topo_order(graph)]


def execute_graph(graph: OperatorGraph, inputs: dict[str, Tensor], return_all: bool = False) -> dict[str, Tensor]:
    """Run the graph once, untimed; returns the declared graph outputs.

    Declared output specs are not enforced against runtime shapes because
    data-dependent ops (nms) legitimately produce seed-dependent sizes.
    """
    values = _run_pass(graph, inputs, _ordered_nodes(graph))
    if return_all:
        return values
    return {ref: values[ref] for ref in graph.graph_outputs}


def profile_graph(
    graph: OperatorGraph,
    inputs: dict[str, Tensor] | None = None,
    config: ProfileConfig | None = None,
    rules: RuleSet | None = None,
    model_name: str | None = None,
    batch_size: int | None = None,
    return_outputs: bool = False,
):
    """Profile a graph: warmup passes untimed, then timed repeats.

    Returns a ProfileRun; with return_outputs=True returns
    (ProfileRun, outputs) where outputs come from the last timed pass.
    """
    config = config or ProfileConfig()
    if config.repeats < 1:
        raise InputMismatch(f"repeats must be >= 1, got {config.repeats}")
    if config.warmup < 0:
        raise InputMismatch(f"warmup must be >= 0, got {config.warmup}")
    order = _ordered_nodes(graph)
    values0 = make_inputs(graph, seed=config.seed, provided=inputs)

    for _ in range(config.warmup):
        _run_pass(graph, values0, order)

    node_times_ns: dict[str, list[int]] = {node.id: [] for node in order}
    pass_times_ns: list[int] = []
    values = values0
    for _ in range(config.repeats):
        p0 = time.perf_counter_ns()
        values = _run_pass(graph, values0, order, node_times_ns)
        p1 = time.perf_counter_ns()
        pass_times_ns.append(p1 - p0)

    samples = []
    for node in order:
        samples.append(ProfileSample(
            node_id=node.id,
            op_name=node.op_name,
            group=classify(node.op_name, rules),
            wall_time_us=statistics.median(node_times_ns[node.id]) / 1000.0,
            flops=flop_count(node),
            input_shapes=[list(values[ref].dims) for ref in node.inputs],
            device="host",
            attrs=dict(node.attrs),
        ))

    meta_model = model_name or graph.metadata.get("model_name", "graph")
    meta_batch = batch_size if batch_size is not None else graph.metadata.get("batch_size", 1)
    run = ProfileRun(
        model_name=meta_model,
        batch_size=int(meta_batch),
        repeats=config.repeats,
        samples=samples,
        total_wall_time_us=statistics.median(pass_times_ns) / 1000.0,
        clock_resolution_ns=max(1, int(time.get_clock_info("perf_counter").resolution * 1e9)),
    )
    if return_outputs:
        outputs = {ref: values[ref] for ref in graph.graph_outputs}
        return run, outputs
    return run


def capture_shape_records(run: ProfileRun, include_gemm: bool = False) -> list[ShapeRecord]:
    """Deduplicate profiled operator invocations into shape records.

    The dedup key is (op_name, input_shapes, attrs); records keep first
    occurrence order and count how many invocations collapsed into each.
    GEMM-group samples are skipped unless include_gemm is set, since the
    point of the corpus is the non-GEMM surface.
    """
    seen: dict[str, ShapeRecord] = {}
    for sample in run.samples:
        if sample.group is OperatorGroup.GEMM and not include_gemm:
            continue
        key = canonical_dumps({
            "op": sample.op_name,
            "shapes": [list(s) for s in sample.input_shapes],
            "attrs": sample.attrs,
        })
        if key in seen:
            seen[key].count += 1
        else:
            seen[key] = ShapeRecord(
                op_name=sample.op_name,
                group=sample.group.value,
                input_shapes=[list(s) for s in sample.input_shapes],
                attrs=dict(sample.attrs),
                source_model=run.model_name,
                count=1,
            )
    return list(seen.values())

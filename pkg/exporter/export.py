#!/usr/bin/env python3
"""Export a torch model as versioned operator-graph and trace JSON files.

Symbolically traces the model with one concrete input, propagates shapes
through the traced graph, times every node over repeated forward passes,
and writes "opbench-graph/1" + "opbench-trace/1" files. The files are
then checked with the `opbench` CLI (validate + ingest), and the share
of samples the builtin rules leave Uncategorized is recorded in the
trace's `expected` block.

The consumer side is reached only through those files and the CLI; this
script never imports the analysis package.

Usage:
    export.py --model resnet18 --input synthetic:3x224x224 --batch 1 --out DIR
    export.py --model squeezenet1_0 --input photo.png --batch 2 --out DIR
"""

from __future__ import annotations

import argparse
import json
import re
import shutil
import statistics
import subprocess
import sys
import time
from pathlib import Path

import torch
import torch.fx
from torch.fx.passes.shape_prop import ShapeProp, TensorMetadata

GRAPH_VERSION = "opbench-graph/1"
TRACE_VERSION = "opbench-trace/1"

# ops whose single scalar operand conventionally rides attrs["other"]
_SCALAR_OTHER_OPS = {"add", "sub", "mul", "truediv", "div", "floordiv", "pow", "rsub"}

_DTYPE_NAMES = {
    torch.float32: "f32",
    torch.int64: "i64",
    torch.bool: "bool",
}


class TraceError(RuntimeError):
    """Symbolic tracing failed, usually on input-dependent control flow."""


class ExportError(RuntimeError):
    """Anything else that prevents a well-formed export."""


def canonical_dumps(payload) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"


def write_json(path, payload) -> None:
    Path(path).write_text(canonical_dumps(payload), encoding="utf-8")


def dtype_name(dtype: torch.dtype) -> str:
    name = _DTYPE_NAMES.get(dtype)
    if name is None:
        raise ExportError(f"unsupported tensor dtype {dtype}")
    return name


def tensor_spec(meta) -> dict:
    dims = [int(d) for d in meta.shape]
    if not dims:
        dims = [1]
    return {"dims": dims, "dtype": dtype_name(meta.dtype)}


class _RecordingTracer(torch.fx.Tracer):
    """Stock tracer that remembers the deepest submodule it entered, so a
    tracing failure can name the offending path."""

    def __init__(self):
        super().__init__()
        self.current_module = "<root>"

    def call_module(self, m, forward, args, kwargs):
        previous = self.current_module
        self.current_module = self.path_of_module(m) or "<root>"
        try:
            return super().call_module(m, forward, args, kwargs)
        finally:
            self.current_module = previous


def symbolic_trace(model: torch.nn.Module, model_id: str) -> torch.fx.GraphModule:
    tracer = _RecordingTracer()
    try:
        graph = tracer.trace(model)
    except Exception as e:
        raise TraceError(
            f"cannot trace {model_id!r} (failing submodule: {tracer.current_module}): {e}"
        ) from e
    return torch.fx.GraphModule(tracer.root, graph)


def _sanitize_attr(value):
    """Map a python value onto the graph schema's attr domain, or None."""
    if isinstance(value, bool) or isinstance(value, (int, float, str)):
        return value
    if isinstance(value, (tuple, list)) and all(
        isinstance(v, int) and not isinstance(v, bool) for v in value
    ):
        return list(value)
    return None


def module_attrs(module: torch.nn.Module, qualname: str) -> dict:
    attrs = {"module": qualname}
    for key, value in vars(module).items():
        if key.startswith("_") or key == "training":
            continue
        clean = _sanitize_attr(value)
        if clean is not None:
            attrs[key] = clean
    return attrs


def op_name_of(node: torch.fx.Node, modules: dict) -> str:
    if node.op == "call_module":
        return type(modules[node.target]).__name__
    if node.op == "call_function":
        return getattr(node.target, "__name__", str(node.target))
    return str(node.target)  # call_method


def _flatten_operands(node: torch.fx.Node):
    """Split args/kwargs into fx Node operands and scalar attrs."""
    operands = []
    attrs = {}

    def visit(value, label):
        if isinstance(value, torch.fx.Node):
            operands.append(value)
            return
        if isinstance(value, (tuple, list)) and any(isinstance(v, torch.fx.Node) for v in value):
            for v in value:
                visit(v, label)
            return
        clean = _sanitize_attr(value)
        if clean is not None:
            attrs[label] = clean

    for i, arg in enumerate(node.args):
        visit(arg, f"arg{i}")
    for key in sorted(node.kwargs):
        visit(node.kwargs[key], key)
    return operands, attrs


def build_graph_payload(gm: torch.fx.GraphModule, model_id: str, batch_size: int) -> tuple[dict, dict]:
    """Convert a shape-annotated fx graph into the graph file payload.

    Returns (payload, info) where info carries the node list and value
    shapes the timing pass reuses.
    """
    modules = dict(gm.named_modules())
    value_spec: dict[str, dict] = {}
    value_alias: dict[str, str] = {}
    graph_inputs = []
    nodes = []
    graph_outputs = []
    timed_nodes = []

    def is_multi(meta) -> bool:
        return (
            not isinstance(meta, TensorMetadata)
            and isinstance(meta, (tuple, list))
            and all(isinstance(m, TensorMetadata) for m in meta)
        )

    def spec_of(node: torch.fx.Node) -> dict:
        meta = node.meta.get("tensor_meta")
        if not isinstance(meta, TensorMetadata):
            raise ExportError(f"node {node.name!r} ({node.op} {node.target}) has no tensor output")
        return tensor_spec(meta)

    for node in gm.graph.nodes:
        if node.op in ("placeholder", "get_attr"):
            spec = spec_of(node)
            graph_inputs.append({"id": node.name, "spec": spec})
            value_spec[node.name] = spec
            continue
        if node.op == "output":
            def collect(value):
                if isinstance(value, torch.fx.Node):
                    graph_outputs.append(value_alias.get(value.name, value.name))
                elif isinstance(value, (tuple, list)):
                    for v in value:
                        collect(v)
            collect(node.args)
            continue

        operands, attrs = _flatten_operands(node)
        meta = node.meta.get("tensor_meta")
        if meta is None:
            raise ExportError(f"node {node.name!r} ({node.op} {node.target}) has no tensor output")

        # a constant-index getitem over a multi-output producer resolves
        # to that producer's k-th value id instead of becoming a node
        if (
            node.op == "call_function"
            and getattr(node.target, "__name__", "") == "getitem"
            and len(operands) == 1
            and isinstance(node.args[1], int)
            and isinstance(meta, TensorMetadata)
            and is_multi(operands[0].meta.get("tensor_meta"))
        ):
            producer = operands[0].name
            k = node.args[1]
            alias = f"{producer}:{k}"
            value_alias[node.name] = alias
            value_spec[node.name] = value_spec[alias]
            continue

        if node.op == "call_module":
            attrs = {**module_attrs(modules[node.target], node.target), **attrs}

        input_ids = [value_alias.get(op.name, op.name) for op in operands]
        input_specs = [value_spec[vid] for vid in input_ids]
        if is_multi(meta):
            output_specs = [tensor_spec(m) for m in meta]
            for k, spec in enumerate(output_specs):
                value_spec[f"{node.name}:{k}"] = spec
        else:
            output_specs = [spec_of(node)]
            value_spec[node.name] = output_specs[0]

        nodes.append({
            "id": node.name,
            "op_name": op_name_of(node, modules),
            "attrs": attrs,
            "inputs": input_ids,
            "input_specs": input_specs,
            "output_specs": output_specs,
        })
        timed_nodes.append({
            "node_id": node.name,
            "op_name": op_name_of(node, modules),
            "input_shapes": [list(s["dims"]) for s in input_specs],
        })

    param_count = sum(p.numel() for p in gm.parameters())
    payload = {
        "version": GRAPH_VERSION,
        "metadata": {
            "model_name": model_id,
            "batch_size": batch_size,
            "param_count": int(param_count),
            "exporter": "torch-fx",
        },
        "graph_inputs": graph_inputs,
        "nodes": nodes,
        "graph_outputs": graph_outputs,
    }
    return payload, {"timed_nodes": timed_nodes}


class _TimingInterpreter(torch.fx.Interpreter):
    """One forward pass with a perf_counter_ns span around every op node."""

    def __init__(self, gm):
        super().__init__(gm)
        self.node_ns: dict[str, int] = {}

    def run_node(self, node):
        if node.op in ("call_module", "call_function", "call_method"):
            t0 = time.perf_counter_ns()
            result = super().run_node(node)
            self.node_ns[node.name] = time.perf_counter_ns() - t0
            return result
        return super().run_node(node)


def time_graph(gm: torch.fx.GraphModule, example: torch.Tensor, warmup: int, repeats: int):
    per_node: dict[str, list[int]] = {}
    pass_walls = []
    with torch.no_grad():
        for _ in range(warmup):
            _TimingInterpreter(gm).run(example)
        for _ in range(repeats):
            interp = _TimingInterpreter(gm)
            t0 = time.perf_counter_ns()
            interp.run(example)
            pass_walls.append(time.perf_counter_ns() - t0)
            for name, ns in interp.node_ns.items():
                per_node.setdefault(name, []).append(ns)
    node_us = {name: statistics.median(ns_list) / 1000.0 for name, ns_list in per_node.items()}
    total_us = statistics.median(pass_walls) / 1000.0
    # the trace schema bounds sample sums by 1.05x total; medians taken
    # per node can exceed the median pass wall on a noisy host
    total_us = max(total_us, sum(node_us.values()))
    return node_us, total_us


def build_trace_payload(model_id: str, batch_size: int, repeats: int, info: dict,
                        node_us: dict, total_us: float) -> dict:
    samples = []
    for entry in info["timed_nodes"]:
        samples.append({
            "node_id": entry["node_id"],
            "op_name": entry["op_name"],
            "device": "host",
            "wall_time_us": node_us.get(entry["node_id"], 0.0),
            "flops": 0,
            "input_shapes": entry["input_shapes"],
        })
    return {
        "version": TRACE_VERSION,
        "model_name": model_id,
        "batch_size": batch_size,
        "repeats": repeats,
        "samples": samples,
        "total_wall_time_us": total_us,
    }


def load_model(model_id: str) -> torch.nn.Module:
    import torchvision.models

    try:
        factory = torchvision.models.get_model_builder(model_id)
    except Exception:
        factory = getattr(torchvision.models, model_id, None)
    if factory is None:
        raise ExportError(f"unknown model id {model_id!r}")
    model = factory(weights=None)
    model.eval()
    return model


def build_input(source: str, batch_size: int) -> torch.Tensor:
    if source.startswith("synthetic:"):
        shape_text = source[len("synthetic:"):]
        try:
            dims = [int(d) for d in re.split(r"[x,]", shape_text) if d]
        except ValueError:
            dims = []
        if not dims or any(d < 1 for d in dims):
            raise ExportError(f"bad synthetic shape {shape_text!r}; expected e.g. synthetic:3x224x224")
        gen = torch.Generator().manual_seed(0)
        return torch.rand((batch_size, *dims), generator=gen)

    from PIL import Image
    from torchvision import transforms

    path = Path(source)
    if not path.is_file():
        raise ExportError(f"input file not found: {source}")
    preprocess = transforms.Compose([
        transforms.Resize(256),
        transforms.CenterCrop(224),
        transforms.ToTensor(),
        transforms.Normalize(mean=[0.485, 0.456, 0.406], std=[0.229, 0.224, 0.225]),
    ])
    with Image.open(path) as img:
        x = preprocess(img.convert("RGB"))
    return x.unsqueeze(0).repeat(batch_size, 1, 1, 1)


def opbench_command() -> list[str]:
    if shutil.which("opbench"):
        return ["opbench"]
    return [sys.executable, "-m", "opbench.cli"]


def run_opbench(*args) -> subprocess.CompletedProcess:
    cmd = opbench_command() + [str(a) for a in args]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    if proc.returncode != 0:
        raise ExportError(
            f"`{' '.join(cmd)}` failed (exit {proc.returncode}): {proc.stderr.strip()}"
        )
    return proc


def check_and_annotate(graph_path: Path, trace_path: Path, out_dir: Path) -> float:
    """Validate both files through the CLI and stamp the measured
    Uncategorized share into the trace's expected block."""
    run_opbench("validate", graph_path)
    run_opbench("validate", trace_path)
    normalized = out_dir / (trace_path.stem + ".normalized.json")
    proc = run_opbench("ingest", trace_path, "-o", normalized)
    m = re.search(r"(\d+) samples \((\d+) uncategorized\)", proc.stderr)
    if not m:
        raise ExportError(f"cannot parse ingest summary: {proc.stderr.strip()}")
    total, uncategorized = int(m.group(1)), int(m.group(2))
    normalized.unlink()
    pct = 100.0 * uncategorized / total if total else 0.0

    payload = json.loads(trace_path.read_text(encoding="utf-8"))
    payload["expected"] = {"uncategorized_pct": pct}
    write_json(trace_path, payload)
    run_opbench("validate", trace_path)
    return pct


def export(model_id: str, input_source: str, batch_size: int, out_dir: Path,
           warmup: int = 1, repeats: int = 5) -> tuple[Path, Path, float]:
    if batch_size < 1:
        raise ExportError(f"batch size must be >= 1, got {batch_size}")
    model = load_model(model_id)
    example = build_input(input_source, batch_size)
    gm = symbolic_trace(model, model_id)
    with torch.no_grad():
        ShapeProp(gm).propagate(example)

    graph_payload, info = build_graph_payload(gm, model_id, batch_size)
    node_us, total_us = time_graph(gm, example, warmup, repeats)
    trace_payload = build_trace_payload(model_id, batch_size, repeats, info, node_us, total_us)

    out_dir.mkdir(parents=True, exist_ok=True)
    graph_path = out_dir / f"{model_id}.graph.json"
    trace_path = out_dir / f"{model_id}.trace.json"
    write_json(graph_path, graph_payload)
    write_json(trace_path, trace_payload)
    pct = check_and_annotate(graph_path, trace_path, out_dir)
    return graph_path, trace_path, pct


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="export.py",
        description="Trace a torchvision model and emit opbench graph + trace files.",
    )
    parser.add_argument("--model", required=True, help="torchvision model id, e.g. resnet18")
    parser.add_argument("--input", required=True,
                        help="image file path, or synthetic:SHAPE (e.g. synthetic:3x224x224)")
    parser.add_argument("--batch", type=int, default=1, help="batch size (>= 1)")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--warmup", type=int, default=1)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args(argv)

    if args.batch < 1:
        parser.error(f"--batch must be >= 1, got {args.batch}")
    try:
        graph_path, trace_path, pct = export(
            args.model, args.input, args.batch, Path(args.out),
            warmup=args.warmup, repeats=args.repeats,
        )
    except (TraceError, ExportError) as e:
        print(f"export.py: error: {e}", file=sys.stderr)
        return 2
    print(f"graph -> {graph_path}", file=sys.stderr)
    print(f"trace -> {trace_path} (uncategorized {pct:.1f}%)", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())

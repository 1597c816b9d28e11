#!/usr/bin/env python
"""Regenerate every bundled fixture file deterministically.

Writes the canonical copies into src/opbench/fixtures/data/ and mirrors
them into fixtures/ at the repository root for command-line use.  All
content is hand-authored here; nothing depends on wall-clock time or
unseeded randomness, so reruns are byte-identical.
"""

from __future__ import annotations

import math
import shutil
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(REPO / "src"))

from opbench.graph_ir import (  # noqa: E402
    GraphNode,
    OperatorGraph,
    ShapeRecord,
    TensorSpec,
    save_graph,
    save_records,
    write_json,
)
from opbench.profiler import ProfileRun, ProfileSample, save_trace  # noqa: E402
from opbench.taxonomy import OperatorGroup, classify  # noqa: E402

DATA_DIR = REPO / "src" / "opbench" / "fixtures" / "data"
ROOT_FIXTURES = REPO / "fixtures"


def f32(*dims: int) -> TensorSpec:
    return TensorSpec(dims=tuple(dims), dtype="f32")


def build_toy_vit() -> OperatorGraph:
    """A one-block ViT-style classifier: patch embed, self-attention,
    GELU MLP, linear head.  24 nodes, every group except RoI/interp."""
    d = 32
    t = 16
    inputs = [
        ("x", f32(1, t, 48)),
        ("w_patch", f32(d, 48)), ("b_patch", f32(d)),
        ("g1", f32(d)), ("be1", f32(d)),
        ("w_q", f32(d, d)), ("b_q", f32(d)),
        ("w_k", f32(d, d)), ("b_k", f32(d)),
        ("w_v", f32(d, d)), ("b_v", f32(d)),
        ("w_o", f32(d, d)), ("b_o", f32(d)),
        ("g2", f32(d)), ("be2", f32(d)),
        ("w_fc1", f32(2 * d, d)), ("b_fc1", f32(2 * d)),
        ("w_fc2", f32(d, 2 * d)), ("b_fc2", f32(d)),
        ("w_head", f32(10, t * d)), ("b_head", f32(10)),
    ]
    spec_of = dict(inputs)

    nodes: list[GraphNode] = []

    def node(nid, op, in_ids, out_spec, **attrs):
        nodes.append(GraphNode(
            id=nid,
            op_name=op,
            attrs=attrs,
            inputs=list(in_ids),
            input_specs=[spec_of[i] for i in in_ids],
            output_specs=[out_spec],
        ))
        spec_of[nid] = out_spec

    node("n01", "view", ["x"], f32(t, 48), sizes=[t, 48])
    node("n02", "linear", ["n01", "w_patch", "b_patch"], f32(t, d))
    node("n03", "view", ["n02"], f32(1, t, d), sizes=[1, t, d])
    node("n04", "layer_norm", ["n03", "g1", "be1"], f32(1, t, d), eps=1e-05)
    node("n05", "linear", ["n04", "w_q", "b_q"], f32(1, t, d))
    node("n06", "linear", ["n04", "w_k", "b_k"], f32(1, t, d))
    node("n07", "linear", ["n04", "w_v", "b_v"], f32(1, t, d))
    node("n08", "permute", ["n06"], f32(1, d, t), dims=[0, 2, 1])
    node("n09", "matmul", ["n05", "n08"], f32(1, t, t))
    node("n10", "div", ["n09"], f32(1, t, t), other=math.sqrt(d))
    node("n11", "softmax", ["n10"], f32(1, t, t), dim=-1)
    node("n12", "dropout", ["n11"], f32(1, t, t))
    node("n13", "matmul", ["n12", "n07"], f32(1, t, d))
    node("n14", "contiguous", ["n13"], f32(1, t, d))
    node("n15", "linear", ["n14", "w_o", "b_o"], f32(1, t, d))
    node("n16", "add", ["n15", "n03"], f32(1, t, d))
    node("n17", "layer_norm", ["n16", "g2", "be2"], f32(1, t, d), eps=1e-05)
    node("n18", "linear", ["n17", "w_fc1", "b_fc1"], f32(1, t, 2 * d))
    node("n19", "gelu", ["n18"], f32(1, t, 2 * d))
    node("n20", "linear", ["n19", "w_fc2", "b_fc2"], f32(1, t, d))
    node("n21", "add", ["n20", "n16"], f32(1, t, d))
    node("n22", "reshape", ["n21"], f32(1, t * d), sizes=[1, t * d])
    node("n23", "linear", ["n22", "w_head", "b_head"], f32(1, 10))
    node("n24", "softmax", ["n23"], f32(1, 10), dim=-1)

    return OperatorGraph(
        nodes=nodes,
        graph_inputs=inputs,
        graph_outputs=["n24"],
        metadata={"model_name": "toy_vit", "batch_size": 1, "param_count": 27274},
    )


def build_toy_det() -> OperatorGraph:
    """A small detection head: conv backbone, frozen batch norm, bilinear
    upsample, box/score heads, softmax scores, NMS.  The batch-norm
    variance is squared in-graph so synthesized uniform inputs stay
    valid statistics."""
    inputs = [
        ("img", f32(1, 3, 16, 16)),
        ("w_conv1", f32(8, 3, 3, 3)),
        ("bn_mean", f32(8)), ("bn_vr", f32(8)), ("bn_g", f32(8)), ("bn_b", f32(8)),
        ("w_conv2", f32(8, 8, 3, 3)),
        ("w_box", f32(40, 2048)), ("b_box", f32(40)),
        ("w_score", f32(10, 2048)), ("b_score", f32(10)),
    ]
    spec_of = dict(inputs)
    nodes: list[GraphNode] = []

    def node(nid, op, in_ids, out_spec, **attrs):
        nodes.append(GraphNode(
            id=nid,
            op_name=op,
            attrs=attrs,
            inputs=list(in_ids),
            input_specs=[spec_of[i] for i in in_ids],
            output_specs=[out_spec],
        ))
        spec_of[nid] = out_spec

    node("d01", "conv2d", ["img", "w_conv1"], f32(1, 8, 16, 16), stride=1, padding=1)
    node("d02", "mul", ["bn_vr", "bn_vr"], f32(8))
    node("d03", "batch_norm", ["d01", "bn_mean", "d02", "bn_g", "bn_b"], f32(1, 8, 16, 16), eps=1e-05)
    node("d04", "relu", ["d03"], f32(1, 8, 16, 16))
    node("d05", "interpolate", ["d04"], f32(1, 8, 32, 32), out_h=32, out_w=32, mode="bilinear")
    node("d06", "conv2d", ["d05", "w_conv2"], f32(1, 8, 16, 16), stride=2, padding=1)
    node("d07", "silu", ["d06"], f32(1, 8, 16, 16))
    node("d08", "reshape", ["d07"], f32(1, 2048), sizes=[1, 2048])
    node("d09", "linear", ["d08", "w_box", "b_box"], f32(1, 40))
    node("d10", "linear", ["d08", "w_score", "b_score"], f32(1, 10))
    node("d11", "view", ["d09"], f32(10, 4), sizes=[10, 4])
    node("d12", "view", ["d10"], f32(10), sizes=[10])
    node("d13", "softmax", ["d12"], f32(10), dim=-1)
    node("d14", "mul", ["d11"], f32(10, 4), other=16.0)
    # nms output length is data dependent; the declared dims are the
    # upper bound (all boxes kept).
    nodes.append(GraphNode(
        id="d15",
        op_name="nms",
        attrs={"score_threshold": 0.0, "iou_threshold": 0.5},
        inputs=["d14", "d13"],
        input_specs=[spec_of["d14"], spec_of["d13"]],
        output_specs=[TensorSpec(dims=(10,), dtype="i64")],
    ))

    return OperatorGraph(
        nodes=nodes,
        graph_inputs=inputs,
        graph_outputs=["d14", "d15"],
        metadata={"model_name": "toy_det", "batch_size": 1},
    )


def build_table2_records() -> list[ShapeRecord]:
    """The 30-row operator catalogue: op, group, example shape, source
    model, and the framework module that implemented it."""
    rows = [
        # op_name, group, input_shapes, attrs, source_model, count
        ("ReLu", "Activation", [[2, 64, 533]], {"impl": "Torch.nn.modules.activation"}, "DETR", 8),
        ("GELU", "Activation", [[1, 97, 4096]], {"impl": "Torch.nn.modules.activation"}, "ViT-l16", 24),
        ("GELU", "Activation", [[1, 8, 6400]], {"impl": "transformers.activations.GELUActivation"}, "GPT2-XL", 48),
        ("SiLu", "Activation", [[1, 10, 11008]], {"impl": "Torch.nn"}, "Llama-2", 32),
        ("SiLu", "Activation", [[1, 66, 11008]], {"impl": "Torch.nn"}, "Llama-2", 32),
        ("LayerNorm", "Normalization", [[2, 16384, 32]], {"impl": "Torch.nn.modules.normalization", "eps": 1e-05}, "Segformer", 16),
        ("BatchNorm2d", "Normalization", [[2, 256, 128, 128]], {"impl": "Torch.nn.modules.batchnorm", "eps": 1e-05}, "Segformer", 4),
        ("LlamaRMSNorm", "Normalization", [[1, 10, 4096]], {"impl": "transformers.models.llama", "eps": 1e-06}, "Llama", 65),
        ("FrozenBatchNorm2d", "Normalization", [[1, 1024, 50, 68]], {"impl": "torchvision.ops.misc", "eps": 1e-05}, "MaskRCNN", 53),
        ("FrozenBatchNorm2d", "Normalization", [[2, 850, 256]], {"impl": "transformers.models.detr", "eps": 1e-05}, "DETR", 104),
        ("LayerNorm", "Normalization", [[2, 850, 256]], {"impl": "Torch.nn.modules.normalization", "eps": 1e-05}, "DETR", 60),
        ("LayerNorm", "Normalization", [[2, 100, 256]], {"impl": "Torch.nn.modules.normalization", "eps": 1e-05}, "DETR", 12),
        ("Add", "ElemwiseArithmetic", [[2, 16384, 32]], {"impl": "Torch.add"}, "Segformer", 18),
        ("Mul", "ElemwiseArithmetic", [[1, 10, 11008]], {"impl": "Torch.mul"}, "Llama-2", 30),
        ("Neg", "ElemwiseArithmetic", [[1, 32, 10, 64]], {"impl": "Torch.neg"}, "Llama-2", 28),
        ("TrueDiv", "ElemwiseArithmetic", [[2, 1, 16384, 256]], {"impl": "Torch.true_divide"}, "Segformer", 10),
        ("TrueDiv", "ElemwiseArithmetic", [[1, 25, 8, 8]], {"impl": "Torch.true_divide", "other": 8.0}, "GPT2-XL", 36),
        ("Contiguous", "Memory", [[2, 32, 128, 128]], {"impl": "Torch.Tensor.contiguous"}, "Segformer", 14),
        ("Contiguous", "Memory", [[1, 10, 32, 128]], {"impl": "Torch.Tensor"}, "Llama-2", 44),
        ("Permute", "Memory", [[1, 768, 196]], {"impl": "Torch.permute", "dims": [0, 2, 1]}, "ViT-b16", 2),
        ("Permute", "Memory", [[1, 8, 25, 64]], {"impl": "Torch.permute", "dims": [0, 2, 1, 3]}, "GPT2-XL", 96),
        ("Split", "Memory", [[1, 8, 4800]], {"impl": "Torch.split", "split_size": 1600, "dim": 2}, "GPT2-XL", 48),
        ("View", "Memory", [[1, 8, 1600]], {"impl": "Torch.Tensor.view", "sizes": [1, 8, 25, 64]}, "GPT2-XL", 144),
        ("Reshape", "Memory", [[1, 768, 14, 14]], {"impl": "Torch.reshape", "sizes": [1, 768, 196]}, "ViT-b16", 1),
        ("Expand", "Memory", [[1, 1, 768]], {"impl": "Torch.Tensor.expand", "sizes": [1, 197, 768]}, "ViT-b16", 1),
        ("Squeeze", "Memory", [[1, 1, 10, 128]], {"impl": "Torch.squeeze", "dim": 1}, "Llama-2", 64),
        ("Softmax", "LogitComputation", [[1, 25, 8, 8]], {"impl": "Torch.nn.Functional.softmax", "dim": -1}, "DETR", 20),
        ("Softmax", "LogitComputation", [[2, 1, 16384, 256]], {"impl": "Torch.nn.Functional.softmax", "dim": -1}, "Segformer", 10),
        ("NMS", "RoiSelection", [[4663, 4], [4663]], {"impl": "torchvision.ops.nms", "iou_threshold": 0.5, "score_threshold": 0.05}, "MaskRCNN", 5),
        ("Interpolate", "Interpolation", [[2, 256, 128, 128]], {"impl": "Torch.nn.Functional", "out_h": 64, "out_w": 64, "mode": "bilinear"}, "Segformer", 6),
    ]
    records = [
        ShapeRecord(op_name=op, group=group, input_shapes=shapes, attrs=attrs, source_model=model, count=count)
        for op, group, shapes, attrs, model, count in rows
    ]
    for r in records:
        assert classify(r.op_name).value == r.group, f"{r.op_name} classifies as {classify(r.op_name).value}"
    return records


def _sample(nid, op, us, shapes, device, attrs=None, children=None):
    return ProfileSample(
        node_id=nid,
        op_name=op,
        group=classify(op),
        wall_time_us=us,
        flops=0,
        input_shapes=shapes,
        device=device,
        attrs=attrs or {},
        children=children or [],
    )


def build_gpt2_trace() -> ProfileRun:
    """One transformer block's worth of events, 1000 us total.

    Authored proportions: GEMM 23%, Activation 23%, Memory 20%,
    ElemwiseArithmetic 14%, Normalization 12%, LogitComputation 8%;
    non-GEMM share 77% with Activation the top non-GEMM group at 23%.
    These are reconstructions of reported proportions, not measurements.
    """
    dev = "device_external"
    samples = [
        _sample("ev0000", "LayerNorm", 60.0, [[1, 8, 1600]], dev, {"eps": 1e-05}),
        _sample("ev0001", "Conv1D", 60.0, [[1, 8, 1600]], dev),
        _sample("ev0002", "split", 50.0, [[1, 8, 4800]], dev, {"split_size": 1600, "dim": 2}),
        _sample("ev0003", "view", 30.0, [[1, 8, 1600]], dev, {"sizes": [1, 8, 25, 64]}),
        _sample("ev0004", "permute", 30.0, [[1, 8, 25, 64]], dev, {"dims": [0, 2, 1, 3]}),
        _sample("ev0005", "matmul", 25.0, [[1, 25, 8, 64], [1, 25, 64, 8]], dev),
        _sample("ev0006", "truediv", 50.0, [[1, 25, 8, 8]], dev, {"other": 8.0}),
        _sample("ev0007", "Softmax", 80.0, [[1, 25, 8, 8]], dev, {"dim": -1},
                children=[{"kernel_name": "softmax_warp_forward", "wall_time_us": 75.0}]),
        _sample("ev0008", "matmul", 25.0, [[1, 25, 8, 8], [1, 25, 8, 64]], dev),
        _sample("ev0009", "permute", 25.0, [[1, 25, 8, 64]], dev, {"dims": [0, 2, 1, 3]}),
        _sample("ev0010", "contiguous", 35.0, [[1, 8, 25, 64]], dev),
        _sample("ev0011", "view", 30.0, [[1, 8, 25, 64]], dev, {"sizes": [1, 8, 1600]}),
        _sample("ev0012", "Conv1D", 40.0, [[1, 8, 1600]], dev),
        _sample("ev0013", "add", 45.0, [[1, 8, 1600], [1, 8, 1600]], dev),
        _sample("ev0014", "LayerNorm", 60.0, [[1, 8, 1600]], dev, {"eps": 1e-05}),
        _sample("ev0015", "Conv1D", 50.0, [[1, 8, 1600]], dev),
        _sample("ev0016", "GELUActivation", 230.0, [[1, 8, 6400]], dev),
        _sample("ev0017", "Conv1D", 30.0, [[1, 8, 6400]], dev),
        _sample("ev0018", "add", 45.0, [[1, 8, 1600], [1, 8, 1600]], dev),
    ]
    assert sum(s.wall_time_us for s in samples) == 1000.0
    return ProfileRun(
        model_name="gpt2_sample",
        batch_size=1,
        repeats=1,
        samples=samples,
        total_wall_time_us=1000.0,
        expected={
            "nongemm_pct": 77.0,
            "gemm_pct": 23.0,
            "top_group": "Activation",
            "top_pct": 23.0,
        },
    )


def build_fasterrcnn_trace() -> ProfileRun:
    """Detection-style events, 1000 us total: GEMM 18%, Normalization
    60.5% (top non-GEMM), Memory 9%, RoiSelection 7%, Elemwise 3%,
    Activation 2.5%; non-GEMM share 82%."""
    dev = "device_external"
    samples = [
        _sample("ev0000", "conv2d", 100.0, [[1, 3, 800, 800]], dev, {"stride": 2, "padding": 3}),
        _sample("ev0001", "FrozenBatchNorm2d", 305.0, [[1, 256, 200, 200]], dev, {"eps": 1e-05}),
        _sample("ev0002", "relu", 25.0, [[1, 256, 200, 200]], dev),
        _sample("ev0003", "conv2d", 80.0, [[1, 256, 200, 200]], dev, {"stride": 1, "padding": 1}),
        _sample("ev0004", "FrozenBatchNorm2d", 300.0, [[1, 1024, 50, 68]], dev, {"eps": 1e-05}),
        _sample("ev0005", "add", 30.0, [[1, 1024, 50, 68], [1, 1024, 50, 68]], dev),
        _sample("ev0006", "reshape", 45.0, [[1, 1024, 50, 68]], dev, {"sizes": [1, 1024, 3400]}),
        _sample("ev0007", "nms", 70.0, [[4663, 4], [4663]], dev, {"iou_threshold": 0.5, "score_threshold": 0.05}),
        _sample("ev0008", "contiguous", 45.0, [[1000, 4]], dev),
    ]
    assert sum(s.wall_time_us for s in samples) == 1000.0
    return ProfileRun(
        model_name="fasterrcnn_sample",
        batch_size=1,
        repeats=1,
        samples=samples,
        total_wall_time_us=1000.0,
        expected={
            "nongemm_pct": 82.0,
            "gemm_pct": 18.0,
            "top_group": "Normalization",
            "top_pct": 60.5,
        },
    )


def build_avg_pair() -> tuple[ProfileRun, ProfileRun]:
    """The CPU/GPU pair: the same op mix, authored at non-GEMM 27% on
    the CPU run and 55% on the GPU run (ratio about 2.037)."""
    def mk(device, times):
        linear_t, matmul_t, ln_t, gelu_t, view_t, add_t = times
        samples = [
            _sample("ev0000", "linear", linear_t, [[8, 512, 768]], device),
            _sample("ev0001", "matmul", matmul_t, [[8, 12, 512, 64], [8, 12, 64, 512]], device),
            _sample("ev0002", "LayerNorm", ln_t, [[8, 512, 768]], device, {"eps": 1e-05}),
            _sample("ev0003", "gelu", gelu_t, [[8, 512, 3072]], device),
            _sample("ev0004", "view", view_t, [[8, 512, 768]], device, {"sizes": [8, 512, 12, 64]}),
            _sample("ev0005", "add", add_t, [[8, 512, 768], [8, 512, 768]], device),
        ]
        assert sum(s.wall_time_us for s in samples) == 1000.0
        return samples

    cpu = ProfileRun(
        model_name="avg_cpu",
        batch_size=8,
        repeats=1,
        samples=mk("host", (400.0, 330.0, 100.0, 80.0, 50.0, 40.0)),
        total_wall_time_us=1000.0,
        expected={"nongemm_pct": 27.0, "gemm_pct": 73.0},
    )
    gpu = ProfileRun(
        model_name="avg_gpu",
        batch_size=8,
        repeats=1,
        samples=mk("device_external", (250.0, 200.0, 200.0, 150.0, 110.0, 90.0)),
        total_wall_time_us=1000.0,
        expected={
            "nongemm_pct": 55.0,
            "gemm_pct": 45.0,
            "nongemm_ratio_vs": {"trace": "avg_cpu.trace.json", "ratio": 2.037},
        },
    )
    return cpu, gpu


def build_chrome_events() -> dict:
    """50 X events across three lanes with two-to-three-level nesting,
    touching boundaries, zero-duration events, and one input_dims arg."""
    events = []

    def x(name, ts, dur, pid, tid, args=None):
        ev = {"name": name, "ph": "X", "ts": ts, "dur": dur, "pid": pid, "tid": tid}
        if args:
            ev["args"] = args
        events.append(ev)

    # Lane (1,1): five linear blocks, each with two children and one
    # grandchild nested in the first child.
    for k in range(5):
        base = k * 1000
        x("aten::linear", base, 800, 1, 1)
        x("sgemm_kernel", base + 100, 200, 1, 1)
        x("dram_copy", base + 150, 50, 1, 1)
        x("aten::view", base + 400, 200, 1, 1)

    # Lane (1,2): ten back-to-back roots (each event starts exactly when
    # the previous one ends), then five sparse roots.
    flat = ["aten::layer_norm", "aten::gelu"] * 5
    for j, name in enumerate(flat):
        x(name, j * 500, 500, 1, 2)
    sparse = ["aten::softmax", "aten::add", "aten::reshape", "aten::nms", "aten::interpolate"]
    for j, name in enumerate(sparse):
        args = {"input_dims": [[1, 25, 8, 8]]} if j == 0 else None
        x(name, 10000 + j * 1000, 300, 1, 2, args)

    # Lane (2,7): three forward blocks with four children each,
    # exercising zero-dur children and edge-touching containment.
    x("forward_block0", 0, 1000, 2, 7)
    x("cudaEventRecord", 0, 0, 2, 7)
    x("volta_sgemm", 100, 300, 2, 7)
    x("vectorized_elementwise", 400, 300, 2, 7)
    x("reduce_kernel", 700, 300, 2, 7)

    x("forward_block1", 2000, 1000, 2, 7)
    x("volta_sgemm", 2100, 400, 2, 7, {"input_dims": [[8, 512, 64], [8, 64, 512]]})
    x("cudaStreamSync", 2500, 0, 2, 7)
    x("softmax_warp_forward", 2600, 200, 2, 7)
    x("elementwise_kernel", 2900, 100, 2, 7)

    x("forward_block2", 4000, 1000, 2, 7)
    x("im2col_kernel", 4000, 500, 2, 7)
    x("gemm_kernel", 4500, 250, 2, 7)
    x("col2im_kernel", 4750, 125, 2, 7)
    x("cudaEventRecord", 4875, 0, 2, 7)

    assert len(events) == 50
    events.append({"name": "process_name", "ph": "M", "pid": 1, "args": {"name": "python"}})
    events.append({"name": "process_name", "ph": "M", "pid": 2, "args": {"name": "worker"}})
    return {
        "traceEvents": events,
        "displayTimeUnit": "ms",
        "otherData": {"model_name": "chrome_sample", "root_events": 23},
    }


def main() -> None:
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    ROOT_FIXTURES.mkdir(parents=True, exist_ok=True)

    save_graph(build_toy_vit(), DATA_DIR / "toy_vit.graph.json")
    save_graph(build_toy_det(), DATA_DIR / "toy_det.graph.json")
    save_records(build_table2_records(), DATA_DIR / "table2_records.json")
    save_trace(build_gpt2_trace(), DATA_DIR / "gpt2_sample.trace.json")
    save_trace(build_fasterrcnn_trace(), DATA_DIR / "fasterrcnn_sample.trace.json")
    cpu, gpu = build_avg_pair()
    save_trace(cpu, DATA_DIR / "avg_cpu.trace.json")
    save_trace(gpu, DATA_DIR / "avg_gpu.trace.json")
    write_json(DATA_DIR / "chrome_50.json", build_chrome_events())

    for path in sorted(DATA_DIR.glob("*.json")):
        shutil.copy2(path, ROOT_FIXTURES / path.name)
        print(f"wrote {path.relative_to(REPO)} (+ fixtures/{path.name})")


if __name__ == "__main__":
    main()

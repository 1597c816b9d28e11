"""Dispatch from operator names to reference kernels.

The profiler and the microbenchmark runner both execute nodes through
`run_node`, so there is exactly one place that knows how an op name plus
attrs maps onto a kernel call.  Parameter tensors (weights, norm scales,
running statistics) arrive as ordinary node inputs, in the positional
order documented next to each adapter.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .errors import BadAttr, ExecError, ShapeMismatch
from .graph_ir import GraphNode, TensorSpec
from .kernels import Tensor
from .taxonomy import normalize_name


def _one(ins: list[Tensor], node_op: str) -> Tensor:
    if len(ins) != 1:
        raise ShapeMismatch(f"{node_op}: expected 1 input, got {len(ins)}")
    return ins[0]


def _linear(ins, attrs):
    if len(ins) not in (2, 3):
        raise ShapeMismatch(f"linear: expected 2 or 3 inputs (x, weight[, bias]), got {len(ins)}")
    return [kernels.linear(*ins)]


def _matmul(ins, attrs):
    if len(ins) != 2:
        raise ShapeMismatch(f"matmul: expected 2 inputs, got {len(ins)}")
    return [kernels.matmul(ins[0], ins[1])]


def _conv1d(ins, attrs):
    if len(ins) != 2:
        raise ShapeMismatch(f"conv1d: expected 2 inputs (x, weight), got {len(ins)}")
    return [kernels.conv1d(ins[0], ins[1], stride=attrs.get("stride", 1), padding=attrs.get("padding", 0))]


def _conv2d(ins, attrs):
    if len(ins) != 2:
        raise ShapeMismatch(f"conv2d: expected 2 inputs (x, weight), got {len(ins)}")
    return [kernels.conv2d(
        ins[0], ins[1],
        stride=attrs.get("stride", 1),
        padding=attrs.get("padding", 0),
        method=attrs.get("method", "im2col"),
    )]


def _layer_norm(ins, attrs):
    if not 1 <= len(ins) <= 3:
        raise ShapeMismatch(f"layer_norm: expected x[, gamma[, beta]], got {len(ins)} inputs")
    gamma = ins[1] if len(ins) > 1 else None
    beta = ins[2] if len(ins) > 2 else None
    return [kernels.layer_norm(ins[0], gamma, beta, eps=attrs.get("eps", 1e-5))]


def _batch_norm(ins, attrs):
    if not 3 <= len(ins) <= 5:
        raise ShapeMismatch(f"batch_norm: expected x, mean, var[, gamma[, beta]], got {len(ins)} inputs")
    gamma = ins[3] if len(ins) > 3 else None
    beta = ins[4] if len(ins) > 4 else None
    return [kernels.batch_norm_inference(ins[0], ins[1], ins[2], gamma, beta, eps=attrs.get("eps", 1e-5))]


def _rms_norm(ins, attrs):
    if len(ins) not in (1, 2):
        raise ShapeMismatch(f"rms_norm: expected x[, gamma], got {len(ins)} inputs")
    gamma = ins[1] if len(ins) > 1 else None
    return [kernels.rms_norm(ins[0], gamma, eps=attrs.get("eps", 1e-6))]


def _softmax(ins, attrs):
    return [kernels.softmax(_one(ins, "softmax"), dim=attrs.get("dim", -1))]


def _activation(kind):
    def run(ins, attrs):
        return [kernels.activation(kind, _one(ins, kind))]
    return run


def _elementwise(kind):
    def run(ins, attrs):
        if kind == "neg":
            return [kernels.elementwise("neg", _one(ins, "neg"))]
        if len(ins) == 2:
            return [kernels.elementwise(kind, ins[0], ins[1])]
        if len(ins) == 1 and "other" in attrs:
            return [kernels.elementwise(kind, ins[0], attrs["other"])]
        raise ShapeMismatch(f"{kind}: expected two inputs or one input plus an 'other' attr")
    return run


def _sizes_attr(attrs, key="sizes"):
    sizes = attrs.get(key)
    if not isinstance(sizes, list) or not sizes:
        raise BadAttr(f"missing or invalid {key!r} attr: {sizes!r}")
    return sizes


def _view(ins, attrs):
    return [kernels.view(_one(ins, "view"), _sizes_attr(attrs))]


def _reshape(ins, attrs):
    return [kernels.reshape(_one(ins, "reshape"), _sizes_attr(attrs))]


def _permute(ins, attrs):
    return [kernels.permute(_one(ins, "permute"), _sizes_attr(attrs, "dims"))]


def _transpose(ins, attrs):
    x = _one(ins, "transpose")
    d0, d1 = attrs.get("dim0", 0), attrs.get("dim1", 1)
    dims = list(range(x.data.ndim))
    try:
        dims[d0], dims[d1] = dims[d1], dims[d0]
    except IndexError:
        raise BadAttr(f"transpose: axes ({d0}, {d1}) out of range for rank {x.data.ndim}") from None
    return [kernels.permute(x, dims)]


def _contiguous(ins, attrs):
    return [kernels.contiguous(_one(ins, "contiguous"))]


def _split(ins, attrs):
    if "split_size" not in attrs:
        raise BadAttr("split: missing 'split_size' attr")
    return kernels.split(_one(ins, "split"), attrs["split_size"], dim=attrs.get("dim", 0))


def _concat(ins, attrs):
    return [kernels.concat(list(ins), dim=attrs.get("dim", 0))]


def _expand(ins, attrs):
    return [kernels.expand(_one(ins, "expand"), _sizes_attr(attrs))]


def _squeeze(ins, attrs):
    return [kernels.squeeze(_one(ins, "squeeze"), dim=attrs.get("dim"))]


def _unsqueeze(ins, attrs):
    x = _one(ins, "unsqueeze")
    if "dim" not in attrs:
        raise BadAttr("unsqueeze: missing 'dim' attr")
    sizes = list(x.data.shape)
    dim = attrs["dim"]
    if not -len(sizes) - 1 <= dim <= len(sizes):
        raise BadAttr(f"unsqueeze: dim {dim} out of range")
    sizes.insert(dim % (len(sizes) + 1), 1)
    return [kernels.reshape(x, sizes)]


def _flatten(ins, attrs):
    x = _one(ins, "flatten")
    start = attrs.get("start_dim", 0)
    return [kernels.reshape(x, list(x.data.shape[:start]) + [-1])]


def _dropout(ins, attrs):
    return [kernels.dropout(_one(ins, "dropout"))]


def _nms(ins, attrs):
    if len(ins) != 2:
        raise ShapeMismatch(f"nms: expected 2 inputs (boxes, scores), got {len(ins)}")
    kept = kernels.nms(
        ins[0], ins[1],
        score_threshold=attrs.get("score_threshold", 0.0),
        iou_threshold=attrs.get("iou_threshold", 0.5),
    )
    return [Tensor(np.asarray(kept, dtype=np.int64))]


def _interpolate(ins, attrs):
    for key in ("out_h", "out_w"):
        if key not in attrs:
            raise BadAttr(f"interpolate: missing {key!r} attr")
    return [kernels.interpolate(
        _one(ins, "interpolate"), attrs["out_h"], attrs["out_w"], mode=attrs.get("mode", "bilinear"),
    )]


_DISPATCH = {
    "linear": _linear,
    "addmm": _linear,
    "matmul": _matmul,
    "bmm": _matmul,
    "mm": _matmul,
    "conv1d": _conv1d,
    "conv2d": _conv2d,
    "convolution": _conv2d,
    "layer_norm": _layer_norm,
    "layernorm": _layer_norm,
    "native_layer_norm": _layer_norm,
    "batch_norm": _batch_norm,
    "batchnorm1d": _batch_norm,
    "batchnorm2d": _batch_norm,
    "batchnorm3d": _batch_norm,
    "frozenbatchnorm2d": _batch_norm,
    "rms_norm": _rms_norm,
    "rmsnorm": _rms_norm,
    "llamarmsnorm": _rms_norm,
    "softmax": _softmax,
    "relu": _activation("relu"),
    "relu_": _activation("relu"),
    "gelu": _activation("gelu"),
    "geluactivation": _activation("gelu"),
    "newgeluactivation": _activation("gelu"),
    "silu": _activation("silu"),
    "siluactivation": _activation("silu"),
    "add": _elementwise("add"),
    "add_": _elementwise("add"),
    "sub": _elementwise("sub"),
    "mul": _elementwise("mul"),
    "div": _elementwise("div"),
    "true_divide": _elementwise("div"),
    "truediv": _elementwise("div"),
    "neg": _elementwise("neg"),
    "view": _view,
    "reshape": _reshape,
    "permute": _permute,
    "transpose": _transpose,
    "contiguous": _contiguous,
    "split": _split,
    "cat": _concat,
    "concat": _concat,
    "expand": _expand,
    "squeeze": _squeeze,
    "unsqueeze": _unsqueeze,
    "flatten": _flatten,
    "dropout": _dropout,
    "nms": _nms,
    "batched_nms": _nms,
    "interpolate": _interpolate,
    "upsample": _interpolate,
    "upsamplebilinear2d": _interpolate,
    "upsamplenearest2d": _interpolate,
}


def is_runnable(op_name: str) -> bool:
    """True when `run_node` has a kernel adapter for this operator."""
    return normalize_name(op_name) in _DISPATCH


def runnable_ops() -> list[str]:
    return sorted(_DISPATCH)


def run_op(op_name: str, inputs: list[Tensor], attrs: dict | None = None) -> list[Tensor]:
    """Execute one operator by name on already-materialized tensors."""
    fn = _DISPATCH.get(normalize_name(op_name))
    if fn is None:
        raise ExecError(op_name, f"no kernel registered for operator {op_name!r}")
    return fn(list(inputs), attrs or {})


def run_node(node: GraphNode, inputs: list[Tensor]) -> list[Tensor]:
    """Execute a graph node; kernel failures become ExecError(node.id)."""
    try:
        return run_op(node.op_name, inputs, node.attrs)
    except ExecError:
        raise
    except Exception as e:
        raise ExecError(node.id, f"{node.op_name}: {e}") from e


def synthesize_tensor(spec: TensorSpec, rng: np.random.Generator) -> Tensor:
    """Deterministic input synthesis from a tensor spec.

    f32 draws uniform [-1, 1); i64 draws small non-negative ints; bool
    draws fair coins.  Callers that need op-aware distributions (box
    coordinates, safe divisors) build those on top.
    """
    if spec.dtype == "f32":
        data = rng.uniform(-1.0, 1.0, size=spec.dims).astype(np.float32)
    elif spec.dtype == "i64":
        data = rng.integers(0, 10, size=spec.dims, dtype=np.int64)
    else:
        data = rng.integers(0, 2, size=spec.dims).astype(np.bool_)
    return Tensor(data)

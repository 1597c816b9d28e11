"""Reference tensor kernels with FLOP accounting.

These are deliberately simple, framework-free implementations backed by
numpy.  Accuracy beats speed: every kernel whose math involves reductions
or transcendentals accumulates in float64 and casts the result back to
float32, so outputs are deterministic and match high-precision oracles to
within one float32 rounding.

Conventions used throughout:

* a MAC counts as 2 FLOPs;
* linear: 2*M*N*K (+M*N when bias is present);
* conv1d / conv2d: 2 * output_elements * Cin * prod(kernel);
* matmul family: 2 * output_elements * K;
* normalization ops: 8 per input element;
* relu 1, gelu 15, silu 5 per element; other elementwise 1 per element;
* softmax: 5 per input element;
* memory ops, dropout, nms, and interpolate: 0.

The per-element constants for transcendental-heavy ops are declared
conventions, not measurements; they only need to be stated and stable.

Memory ops follow view semantics: view/permute/expand/squeeze (and
reshape on contiguous input) alias the source buffer and perform no data
copy; `copy_count()` exposes a counter that materializing paths bump so
tests can assert the zero-copy property.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import BadAttr, ShapeMismatch, UnknownOpWarning
from .graph_ir import GraphNode, TensorSpec
from .taxonomy import OperatorGroup, classify, normalize_name

_NP_DTYPES = {"f32": np.float32, "i64": np.int64, "bool": np.bool_}
_DTYPE_NAMES = {np.dtype(np.float32): "f32", np.dtype(np.int64): "i64", np.dtype(np.bool_): "bool"}

_COPY_COUNT = 0


def copy_count() -> int:
    """Number of buffer materializations performed by memory ops so far."""
    return _COPY_COUNT


def _note_copy() -> None:
    global _COPY_COUNT
    _COPY_COUNT += 1


@dataclass
class Tensor:
    """A dense tensor: numpy storage plus an aliasing marker.

    ``alias_of`` is True when this tensor is a view of another tensor's
    storage (no copy happened at creation).
    """

    data: np.ndarray
    alias_of: bool = False

    @classmethod
    def from_array(cls, arr, dtype: str | None = None) -> "Tensor":
        np_dtype = _NP_DTYPES[dtype] if dtype else None
        data = np.asarray(arr, dtype=np_dtype)
        if data.dtype not in _DTYPE_NAMES:
            data = data.astype(np.float32)
        return cls(data=data)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def dtype(self) -> str:
        return _DTYPE_NAMES[self.data.dtype]

    @property
    def spec(self) -> TensorSpec:
        item = self.data.itemsize
        return TensorSpec(
            dims=self.data.shape,
            strides=tuple(s // item for s in self.data.strides),
            dtype=self.dtype,
        )

    def numel(self) -> int:
        return self.data.size

    def is_contiguous(self) -> bool:
        return self.data.flags["C_CONTIGUOUS"]


def _as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor.from_array(x)


def _f32(t: Tensor, op: str) -> np.ndarray:
    if t.data.dtype != np.float32:
        raise ShapeMismatch(f"{op}: expected f32 operand, got {t.dtype}")
    return t.data


def _out(arr: np.ndarray) -> Tensor:
    return Tensor(data=np.ascontiguousarray(arr.astype(np.float32, copy=False)))


# ---------------------------------------------------------------------------
# GEMM operators
# ---------------------------------------------------------------------------

def linear(input: Tensor, weight: Tensor, bias: Tensor | None = None) -> Tensor:
    """out[m, n] = sum_k input[m, k] * weight[n, k] + bias[n].

    Leading input dimensions beyond the last are treated as a flattened M,
    so [B, T, K] inputs work the way framework linear layers do.
    """
    x, w = _f32(input, "linear"), _f32(weight, "linear")
    if w.ndim != 2 or x.ndim < 1 or x.shape[-1] != w.shape[1]:
        raise ShapeMismatch(f"linear: input [..,{x.shape[-1] if x.ndim else '?'}] vs weight {w.shape}")
    y = np.matmul(x.astype(np.float64), w.T.astype(np.float64))
    if bias is not None:
        b = _f32(bias, "linear")
        if b.shape != (w.shape[0],):
            raise ShapeMismatch(f"linear: bias {b.shape} != ({w.shape[0]},)")
        y = y + b.astype(np.float64)
    return _out(y)


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """Batched matrix product over the two trailing dimensions."""
    x, y = _f32(a, "matmul"), _f32(b, "matmul")
    if x.ndim < 2 or y.ndim < 2 or x.shape[-1] != y.shape[-2]:
        raise ShapeMismatch(f"matmul: {x.shape} @ {y.shape}")
    try:
        out = np.matmul(x.astype(np.float64), y.astype(np.float64))
    except ValueError as e:
        raise ShapeMismatch(f"matmul: {x.shape} @ {y.shape}: {e}") from e
    return _out(out)


def _conv_out_len(size: int, kernel: int, stride: int, padding: int) -> int:
    return (size + 2 * padding - kernel) // stride + 1


def _check_conv_attrs(stride: int, padding: int) -> None:
    if not isinstance(stride, int) or stride < 1:
        raise BadAttr(f"stride must be an int >= 1, got {stride!r}")
    if not isinstance(padding, int) or padding < 0:
        raise BadAttr(f"padding must be a non-negative int, got {padding!r}")


def conv1d(input: Tensor, weight: Tensor, stride: int = 1, padding: int = 0) -> Tensor:
    """Direct 1-d convolution: nested-loop semantics with zero padding."""
    _check_conv_attrs(stride, padding)
    x, w = _f32(input, "conv1d"), _f32(weight, "conv1d")
    if x.ndim != 3 or w.ndim != 3 or x.shape[1] != w.shape[1]:
        raise ShapeMismatch(f"conv1d: input {x.shape} vs weight {w.shape}")
    batch, cin, length = x.shape
    cout, _, kl = w.shape
    lout = _conv_out_len(length, kl, stride, padding)
    if lout < 1:
        raise ShapeMismatch(f"conv1d: output length {lout} < 1")
    xp = np.zeros((batch, cin, length + 2 * padding), dtype=np.float64)
    xp[:, :, padding:padding + length] = x
    w64 = w.astype(np.float64)
    out = np.zeros((batch, cout, lout), dtype=np.float64)
    for k in range(kl):
        window = xp[:, :, k:k + stride * (lout - 1) + 1:stride]
        out += np.einsum("bcl,oc->bol", window, w64[:, :, k])
    return _out(out)


def im2col(x: np.ndarray, kh: int, kw: int, stride: int, padding: int) -> np.ndarray:
    """Unfold [B,C,H,W] into [B, C*kh*kw, Hout*Wout] patch columns."""
    batch, cin, h, w = x.shape
    hout = _conv_out_len(h, kh, stride, padding)
    wout = _conv_out_len(w, kw, stride, padding)
    xp = np.zeros((batch, cin, h + 2 * padding, w + 2 * padding), dtype=x.dtype)
    xp[:, :, padding:padding + h, padding:padding + w] = x
    col = np.empty((batch, cin, kh, kw, hout, wout), dtype=x.dtype)
    for i in range(kh):
        for j in range(kw):
            col[:, :, i, j] = xp[:, :, i:i + stride * (hout - 1) + 1:stride, j:j + stride * (wout - 1) + 1:stride]
    return col.reshape(batch, cin * kh * kw, hout * wout)


def conv2d(
    input: Tensor,
    weight: Tensor,
    stride: int = 1,
    padding: int = 0,
    method: str = "im2col",
) -> Tensor:
    """2-d convolution, either direct loops or im2col lowered to the
    linear GEMM path; both methods agree to float32 rounding."""
    _check_conv_attrs(stride, padding)
    if method not in ("direct", "im2col"):
        raise BadAttr(f"conv2d: unknown method {method!r}")
    x, w = _f32(input, "conv2d"), _f32(weight, "conv2d")
    if x.ndim != 4 or w.ndim != 4 or x.shape[1] != w.shape[1]:
        raise ShapeMismatch(f"conv2d: input {x.shape} vs weight {w.shape}")
    batch, cin, h, wd = x.shape
    cout, _, kh, kw = w.shape
    hout = _conv_out_len(h, kh, stride, padding)
    wout = _conv_out_len(wd, kw, stride, padding)
    if hout < 1 or wout < 1:
        raise ShapeMismatch(f"conv2d: output {hout}x{wout} has an empty axis")

    if method == "direct":
        xp = np.zeros((batch, cin, h + 2 * padding, wd + 2 * padding), dtype=np.float64)
        xp[:, :, padding:padding + h, padding:padding + wd] = x
        w64 = w.astype(np.float64)
        out = np.zeros((batch, cout, hout, wout), dtype=np.float64)
        for i in range(kh):
            for j in range(kw):
                window = xp[:, :, i:i + stride * (hout - 1) + 1:stride, j:j + stride * (wout - 1) + 1:stride]
                out += np.einsum("bchw,oc->bohw", window, w64[:, :, i, j])
        return _out(out)

    col = im2col(x.astype(np.float64), kh, kw, stride, padding)
    flat = col.transpose(0, 2, 1).reshape(batch * hout * wout, cin * kh * kw)
    y = linear(Tensor(flat.astype(np.float32)), Tensor(w.reshape(cout, -1)))
    out = y.data.reshape(batch, hout * wout, cout).transpose(0, 2, 1).reshape(batch, cout, hout, wout)
    return _out(out)


# ---------------------------------------------------------------------------
# Normalization
# ---------------------------------------------------------------------------

def layer_norm(input: Tensor, gamma: Tensor | None = None, beta: Tensor | None = None, eps: float = 1e-5) -> Tensor:
    """Normalize over the last dimension with biased (population) variance."""
    x = _f32(input, "layer_norm").astype(np.float64)
    n = x.shape[-1]
    for name, p in (("gamma", gamma), ("beta", beta)):
        if p is not None and p.data.shape != (n,):
            raise ShapeMismatch(f"layer_norm: {name} {p.data.shape} != ({n},)")
    mean = x.mean(axis=-1, keepdims=True)
    var = np.square(x - mean).mean(axis=-1, keepdims=True)
    y = (x - mean) / np.sqrt(var + eps)
    if gamma is not None:
        y = y * gamma.data.astype(np.float64)
    if beta is not None:
        y = y + beta.data.astype(np.float64)
    return _out(y)


def batch_norm_inference(
    input: Tensor,
    running_mean: Tensor,
    running_var: Tensor,
    gamma: Tensor | None = None,
    beta: Tensor | None = None,
    eps: float = 1e-5,
) -> Tensor:
    """Frozen-statistics batch norm over channel axis 1 (any rank >= 2)."""
    x = _f32(input, "batch_norm").astype(np.float64)
    if x.ndim < 2:
        raise ShapeMismatch(f"batch_norm: input rank {x.ndim} < 2")
    c = x.shape[1]
    stat_shape = (1, c) + (1,) * (x.ndim - 2)
    vecs = {"running_mean": running_mean, "running_var": running_var, "gamma": gamma, "beta": beta}
    for name, p in vecs.items():
        if p is not None and p.data.shape != (c,):
            raise ShapeMismatch(f"batch_norm: {name} {p.data.shape} != ({c},)")
    mean = running_mean.data.astype(np.float64).reshape(stat_shape)
    var = running_var.data.astype(np.float64).reshape(stat_shape)
    # negative stored variance is bad data, not a crash: IEEE NaN propagates
    with np.errstate(invalid="ignore"):
        y = (x - mean) / np.sqrt(var + eps)
    if gamma is not None:
        y = y * gamma.data.astype(np.float64).reshape(stat_shape)
    if beta is not None:
        y = y + beta.data.astype(np.float64).reshape(stat_shape)
    return _out(y)


def rms_norm(input: Tensor, gamma: Tensor | None = None, eps: float = 1e-6) -> Tensor:
    """y = x / sqrt(mean(x^2) + eps) * gamma, over the last dimension."""
    x = _f32(input, "rms_norm").astype(np.float64)
    n = x.shape[-1]
    if gamma is not None and gamma.data.shape != (n,):
        raise ShapeMismatch(f"rms_norm: gamma {gamma.data.shape} != ({n},)")
    rms = np.sqrt(np.square(x).mean(axis=-1, keepdims=True) + eps)
    y = x / rms
    if gamma is not None:
        y = y * gamma.data.astype(np.float64)
    return _out(y)


# ---------------------------------------------------------------------------
# Softmax and activations
# ---------------------------------------------------------------------------

def softmax(input: Tensor, dim: int = -1) -> Tensor:
    """Max-subtracted stable softmax along ``dim``."""
    x = _f32(input, "softmax")
    if not -x.ndim <= dim < x.ndim:
        raise BadAttr(f"softmax: dim {dim} out of range for rank {x.ndim}")
    x64 = x.astype(np.float64)
    shifted = x64 - x64.max(axis=dim, keepdims=True)
    e = np.exp(shifted)
    return _out(e / e.sum(axis=dim, keepdims=True))


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


ACTIVATION_KINDS = ("relu", "gelu", "silu")


def activation(kind: str, input: Tensor) -> Tensor:
    """Elementwise nonlinearity; gelu uses the exact erf formulation."""
    if kind not in ACTIVATION_KINDS:
        raise BadAttr(f"activation: unknown kind {kind!r}")
    x = _f32(input, kind)
    if kind == "relu":
        return _out(np.maximum(x, np.float32(0)))
    x64 = x.astype(np.float64)
    if kind == "gelu":
        return _out(x64 * 0.5 * (1.0 + special.erf(x64 / np.sqrt(2.0))))
    return _out(x64 * _sigmoid(x64))


# ---------------------------------------------------------------------------
# Elementwise arithmetic
# ---------------------------------------------------------------------------

ELEMENTWISE_KINDS = ("add", "sub", "mul", "div", "neg")


def elementwise(kind: str, a: Tensor, b=None) -> Tensor:
    """Binary/unary elementwise op; b may be a tensor or a scalar.

    Broadcasting follows trailing-dimension rules (size-1 axes stretch).
    Division by zero on f32 propagates IEEE inf/nan rather than raising.
    """
    if kind not in ELEMENTWISE_KINDS:
        raise BadAttr(f"elementwise: unknown kind {kind!r}")
    x = a.data
    if kind == "neg":
        if b is not None:
            raise BadAttr("neg takes no second operand")
        return Tensor(np.ascontiguousarray(-x))
    if b is None:
        raise ShapeMismatch(f"{kind}: missing second operand")
    y = b.data if isinstance(b, Tensor) else np.asarray(b, dtype=x.dtype)
    try:
        np.broadcast_shapes(x.shape, y.shape)
    except ValueError:
        raise ShapeMismatch(f"{kind}: shapes {x.shape} and {y.shape} are not broadcastable") from None
    with np.errstate(divide="ignore", invalid="ignore"):
        if kind == "add":
            out = x + y
        elif kind == "sub":
            out = x - y
        elif kind == "mul":
            out = x * y
        else:
            out = np.true_divide(x, y)
    if out.dtype not in _DTYPE_NAMES:
        out = out.astype(np.float32 if np.issubdtype(out.dtype, np.floating) else np.int64)
    return Tensor(np.ascontiguousarray(out))


# ---------------------------------------------------------------------------
# Memory operations (aliasing where the op semantics allow it)
# ---------------------------------------------------------------------------

def _resolve_sizes(sizes, numel: int) -> tuple[int, ...]:
    sizes = list(sizes)
    if sizes.count(-1) > 1:
        raise BadAttr(f"sizes {sizes}: at most one -1 allowed")
    if -1 in sizes:
        rest = 1
        for s in sizes:
            if s != -1:
                rest *= s
        if rest == 0 or numel % rest:
            raise ShapeMismatch(f"cannot infer -1 in {sizes} for {numel} elements")
        sizes[sizes.index(-1)] = numel // rest
    return tuple(sizes)


def view(input: Tensor, sizes) -> Tensor:
    """Zero-copy reinterpretation; requires a contiguous input."""
    if not input.is_contiguous():
        raise ShapeMismatch("view: input must be contiguous (use reshape or contiguous)")
    shape = _resolve_sizes(sizes, input.numel())
    if int(np.prod(shape, dtype=np.int64)) != input.numel():
        raise ShapeMismatch(f"view: {shape} has wrong element count for {input.dims}")
    return Tensor(input.data.reshape(shape), alias_of=True)


def reshape(input: Tensor, sizes) -> Tensor:
    """Aliases when the input is contiguous, otherwise materializes."""
    if input.is_contiguous():
        return view(input, sizes)
    shape = _resolve_sizes(sizes, input.numel())
    if int(np.prod(shape, dtype=np.int64)) != input.numel():
        raise ShapeMismatch(f"reshape: {shape} has wrong element count for {input.dims}")
    _note_copy()
    return Tensor(np.ascontiguousarray(input.data).reshape(shape))


def permute(input: Tensor, dims) -> Tensor:
    if sorted(dims) != list(range(input.data.ndim)):
        raise BadAttr(f"permute: {list(dims)} is not a permutation of axes of rank {input.data.ndim}")
    return Tensor(np.transpose(input.data, dims), alias_of=True)


def contiguous(input: Tensor) -> Tensor:
    if input.is_contiguous():
        return Tensor(input.data, alias_of=True)
    _note_copy()
    return Tensor(np.ascontiguousarray(input.data))


def split(input: Tensor, split_size: int, dim: int = 0) -> list[Tensor]:
    """Chunks of ``split_size`` along ``dim`` (last may be smaller); views."""
    if not isinstance(split_size, int) or split_size < 1:
        raise BadAttr(f"split: split_size must be an int >= 1, got {split_size!r}")
    ndim = input.data.ndim
    if not -ndim <= dim < ndim:
        raise BadAttr(f"split: dim {dim} out of range")
    dim %= ndim
    n = input.data.shape[dim]
    pieces = []
    for start in range(0, n, split_size):
        index = [slice(None)] * ndim
        index[dim] = slice(start, min(start + split_size, n))
        pieces.append(Tensor(input.data[tuple(index)], alias_of=True))
    return pieces


def concat(inputs: list[Tensor], dim: int = 0) -> Tensor:
    if not inputs:
        raise ShapeMismatch("concat: need at least one input")
    ndim = inputs[0].data.ndim
    if not -ndim <= dim < ndim:
        raise BadAttr(f"concat: dim {dim} out of range")
    dim %= ndim
    base = list(inputs[0].data.shape)
    for t in inputs[1:]:
        other = list(t.data.shape)
        if len(other) != ndim or any(i != dim and other[i] != base[i] for i in range(ndim)):
            raise ShapeMismatch(f"concat: shapes {base} and {other} differ off axis {dim}")
    _note_copy()
    return Tensor(np.ascontiguousarray(np.concatenate([t.data for t in inputs], axis=dim)))


def expand(input: Tensor, sizes) -> Tensor:
    """Stretch size-1 axes without copying (-1 keeps the source size)."""
    src = input.data.shape
    if len(sizes) != len(src):
        raise ShapeMismatch(f"expand: sizes {list(sizes)} must match rank {len(src)}")
    target = tuple(src[i] if s == -1 else s for i, s in enumerate(sizes))
    for have, want in zip(src, target):
        if have != want and have != 1:
            raise ShapeMismatch(f"expand: cannot stretch axis of size {have} to {want}")
    return Tensor(np.broadcast_to(input.data, target), alias_of=True)


def squeeze(input: Tensor, dim: int | None = None) -> Tensor:
    if dim is None:
        return Tensor(np.squeeze(input.data), alias_of=True)
    ndim = input.data.ndim
    if not -ndim <= dim < ndim:
        raise BadAttr(f"squeeze: dim {dim} out of range")
    dim %= ndim
    if input.data.shape[dim] != 1:
        return Tensor(input.data, alias_of=True)
    return Tensor(np.squeeze(input.data, axis=dim), alias_of=True)


def dropout(input: Tensor) -> Tensor:
    """Inference-mode dropout: the identity, aliasing its input."""
    return Tensor(input.data, alias_of=True)


# ---------------------------------------------------------------------------
# RoI selection and interpolation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Box:
    """Axis-aligned pixel box; canonical form has x2 >= x1 and y2 >= y1."""

    x1: float
    y1: float
    x2: float
    y2: float

    def canonical(self) -> "Box":
        return Box(min(self.x1, self.x2), min(self.y1, self.y2), max(self.x1, self.x2), max(self.y1, self.y2))

    def area(self) -> float:
        return (self.x2 - self.x1) * (self.y2 - self.y1)


def box_iou(a: Box, b: Box) -> float:
    """IoU of two canonical boxes; any zero-area operand gives 0."""
    area_a, area_b = a.area(), b.area()
    if area_a == 0.0 or area_b == 0.0:
        return 0.0
    iw = min(a.x2, b.x2) - max(a.x1, b.x1)
    ih = min(a.y2, b.y2) - max(a.y1, b.y1)
    if iw <= 0.0 or ih <= 0.0:
        return 0.0
    inter = iw * ih
    return inter / (area_a + area_b - inter)


def nms(boxes, scores, score_threshold: float = 0.0, iou_threshold: float = 0.5) -> list[int]:
    """Greedy non-maximum suppression.

    Boxes below the score threshold are dropped; survivors are visited in
    descending score order (ties by ascending original index) and each kept
    box suppresses remaining boxes whose IoU with it exceeds the threshold.
    Returns kept original indices in kept order.
    """
    for name, thr in (("score_threshold", score_threshold), ("iou_threshold", iou_threshold)):
        if not 0.0 <= thr <= 1.0:
            raise BadAttr(f"nms: {name} must lie in [0, 1], got {thr}")
    if isinstance(boxes, Tensor):
        boxes = boxes.data
    if isinstance(boxes, (list, tuple)) and boxes and isinstance(boxes[0], Box):
        arr = np.array([[b.x1, b.y1, b.x2, b.y2] for b in boxes], dtype=np.float64)
    else:
        arr = np.asarray(boxes, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[1] != 4:
            raise ShapeMismatch(f"nms: boxes must be [N, 4], got {arr.shape}")
    sc = np.asarray(scores.data if isinstance(scores, Tensor) else scores, dtype=np.float64).reshape(-1)
    if len(sc) != len(arr):
        raise ShapeMismatch(f"nms: {len(arr)} boxes vs {len(sc)} scores")

    x1 = np.minimum(arr[:, 0], arr[:, 2])
    y1 = np.minimum(arr[:, 1], arr[:, 3])
    x2 = np.maximum(arr[:, 0], arr[:, 2])
    y2 = np.maximum(arr[:, 1], arr[:, 3])
    areas = (x2 - x1) * (y2 - y1)

    order = sorted((i for i in range(len(sc)) if sc[i] >= score_threshold), key=lambda i: (-sc[i], i))
    remaining = np.array(order, dtype=np.int64)
    kept: list[int] = []
    while remaining.size:
        top = int(remaining[0])
        kept.append(top)
        rest = remaining[1:]
        iw = np.maximum(0.0, np.minimum(x2[top], x2[rest]) - np.maximum(x1[top], x1[rest]))
        ih = np.maximum(0.0, np.minimum(y2[top], y2[rest]) - np.maximum(y1[top], y1[rest]))
        inter = iw * ih
        union = areas[top] + areas[rest] - inter
        with np.errstate(divide="ignore", invalid="ignore"):
            iou = np.where((areas[top] == 0.0) | (areas[rest] == 0.0), 0.0, inter / union)
        remaining = rest[iou <= iou_threshold]
    return kept


def interpolate(input: Tensor, out_h: int, out_w: int, mode: str = "bilinear") -> Tensor:
    """Spatial resize of a [B, C, H, W] tensor.

    nearest maps dst -> floor(dst * in/out); bilinear uses half-pixel
    centers, src = (dst + 0.5) * in/out - 0.5, with edge clamping.
    """
    if mode not in ("nearest", "bilinear"):
        raise BadAttr(f"interpolate: unknown mode {mode!r}")
    if not (isinstance(out_h, int) and isinstance(out_w, int)) or out_h < 1 or out_w < 1:
        raise BadAttr(f"interpolate: output size {out_h}x{out_w} must be >= 1")
    x = _f32(input, "interpolate")
    if x.ndim != 4:
        raise ShapeMismatch(f"interpolate: expected [B,C,H,W], got {x.shape}")
    _, _, h, w = x.shape

    if mode == "nearest":
        ys = np.minimum((np.arange(out_h) * (h / out_h)).astype(np.int64), h - 1)
        xs = np.minimum((np.arange(out_w) * (w / out_w)).astype(np.int64), w - 1)
        return _out(x[:, :, ys][:, :, :, xs])

    sy = np.clip((np.arange(out_h, dtype=np.float64) + 0.5) * (h / out_h) - 0.5, 0.0, h - 1)
    sx = np.clip((np.arange(out_w, dtype=np.float64) + 0.5) * (w / out_w) - 0.5, 0.0, w - 1)
    y0 = np.floor(sy).astype(np.int64)
    x0 = np.floor(sx).astype(np.int64)
    y1 = np.minimum(y0 + 1, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    wy = (sy - y0).reshape(1, 1, out_h, 1)
    wx = (sx - x0).reshape(1, 1, 1, out_w)
    x64 = x.astype(np.float64)
    top = x64[:, :, y0][:, :, :, x0] * (1 - wx) + x64[:, :, y0][:, :, :, x1] * wx
    bot = x64[:, :, y1][:, :, :, x0] * (1 - wx) + x64[:, :, y1][:, :, :, x1] * wx
    return _out(top * (1 - wy) + bot * wy)


# ---------------------------------------------------------------------------
# FLOP accounting
# ---------------------------------------------------------------------------

_ACTIVATION_FLOPS = {"relu": 1, "gelu": 15, "silu": 5}
_ZERO_FLOP_UNCATEGORIZED = {"dropout", "identity"}


def _numel(spec: TensorSpec) -> int:
    return spec.numel()


def flops_for(op_name: str, input_specs: list[TensorSpec], output_specs: list[TensorSpec], attrs: dict | None = None) -> int:
    """FLOPs for one operator invocation under the module conventions.

    Unknown operators yield 0 and raise an UnknownOpWarning instead of
    failing, so accounting over mixed traces never aborts.
    """
    name = normalize_name(op_name)
    group = classify(op_name)
    attrs = attrs or {}

    if group is OperatorGroup.GEMM:
        if name == "linear" and len(input_specs) >= 2:
            k = input_specs[0].dims[-1]
            n = input_specs[1].dims[0]
            m = _numel(input_specs[0]) // k
            flops = 2 * m * n * k
            if len(input_specs) >= 3:
                flops += m * n
            return flops
        if name in ("conv1d", "conv2d", "convolution") and len(input_specs) >= 2 and output_specs:
            w = input_specs[1].dims
            cin_k = w[1]
            for kd in w[2:]:
                cin_k *= kd
            return 2 * _numel(output_specs[0]) * cin_k
        if name in ("matmul", "bmm", "mm", "addmm", "baddbmm") and input_specs and output_specs:
            a = input_specs[1].dims if name in ("addmm", "baddbmm") and len(input_specs) >= 3 else input_specs[0].dims
            flops = 2 * _numel(output_specs[0]) * a[-1]
            if name in ("addmm", "baddbmm"):
                flops += _numel(output_specs[0])
            return flops
    elif group is OperatorGroup.Normalization and input_specs:
        return 8 * _numel(input_specs[0])
    elif group is OperatorGroup.Activation and input_specs:
        per = next((v for key, v in _ACTIVATION_FLOPS.items() if key in name), 1)
        return per * _numel(input_specs[0])
    elif group is OperatorGroup.ElemwiseArithmetic:
        target = output_specs[0] if output_specs else (input_specs[0] if input_specs else None)
        if target is not None:
            return _numel(target)
    elif group is OperatorGroup.LogitComputation and input_specs:
        return 5 * _numel(input_specs[0])
    elif group in (OperatorGroup.Memory, OperatorGroup.RoiSelection, OperatorGroup.Interpolation):
        return 0
    elif group is OperatorGroup.Uncategorized and name in _ZERO_FLOP_UNCATEGORIZED:
        return 0

    warnings.warn(f"no FLOP convention for operator {op_name!r}; counting 0", UnknownOpWarning, stacklevel=2)
    return 0


def flop_count(node: GraphNode) -> int:
    """FLOPs for a graph node with complete input/output specs."""
    return flops_for(node.op_name, node.input_specs, node.output_specs, node.attrs)

import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from opbench.errors import BadAttr, ShapeMismatch, UnknownOpWarning
from opbench.graph_ir import GraphNode, TensorSpec
from opbench import kernels as K

from .conftest import rand_t, t
from . import oracles


def rel_err(got, want):
    got = np.asarray(got, dtype=np.float64)
    want = np.asarray(want, dtype=np.float64)
    denom = max(float(np.linalg.norm(want.ravel())), 1e-30)
    return float(np.linalg.norm((got - want).ravel())) / denom


# --- GEMM family ---

def test_linear_identity():
    eye = t(np.eye(2))
    zero = t([0.0, 0.0])
    out = K.linear(eye, eye, zero)
    assert np.array_equal(out.data, np.eye(2, dtype=np.float32))


def test_linear_hand_example():
    # all-ones M=1, K=4, N=2 with unit bias
    x = t(np.ones((1, 4)))
    w = t(np.ones((2, 4)))
    b = t([1.0, 1.0])
    out = K.linear(x, w, b)
    assert out.data.tolist() == [[5.0, 5.0]]


def test_linear_matches_oracle(rng):
    x = rand_t(rng, 3, 3)
    w = rand_t(rng, 3, 3)
    b = rand_t(rng, 3)
    got = K.linear(x, w, b)
    want = oracles.linear_oracle(x.data, w.data, b.data)
    assert rel_err(got.data, want) <= 1e-6


def test_linear_nd_input(rng):
    x = rand_t(rng, 2, 5, 4)
    w = rand_t(rng, 3, 4)
    got = K.linear(x, w)
    want = oracles.linear_oracle(x.data, w.data)
    assert got.dims == (2, 5, 3)
    assert rel_err(got.data, want) <= 1e-6


def test_linear_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        K.linear(t(np.ones((2, 3))), t(np.ones((4, 5))))
    with pytest.raises(ShapeMismatch):
        K.linear(t(np.ones((2, 3))), t(np.ones((4, 3))), t(np.ones(5)))


def test_matmul_matches_oracle(rng):
    a = rand_t(rng, 2, 3, 4)
    b = rand_t(rng, 2, 4, 5)
    got = K.matmul(a, b)
    want = oracles.matmul_oracle(a.data, b.data)
    assert rel_err(got.data, want) <= 1e-6


def test_matmul_rejects_bad_inner_dim():
    with pytest.raises(ShapeMismatch):
        K.matmul(t(np.ones((2, 3))), t(np.ones((4, 2))))


def test_conv1d_identity_kernel(rng):
    x = rand_t(rng, 1, 1, 5)
    w = t(np.ones((1, 1, 1)))
    out = K.conv1d(x, w)
    assert np.allclose(out.data, x.data)


def test_conv1d_zero_input_with_padding():
    x = t(np.zeros((1, 2, 5)))
    w = t(np.ones((3, 2, 3)))
    out = K.conv1d(x, w, stride=1, padding=1)
    assert out.dims == (1, 3, 5)
    assert not out.data.any()


def test_conv1d_matches_oracle(rng):
    x = rand_t(rng, 1, 2, 5)
    w = rand_t(rng, 3, 2, 3)
    for stride, padding in [(1, 0), (1, 1), (2, 1)]:
        got = K.conv1d(x, w, stride=stride, padding=padding)
        want = oracles.conv1d_oracle(x.data, w.data, stride, padding)
        assert rel_err(got.data, want) <= 1e-6


def test_conv1d_bad_attrs():
    x = t(np.ones((1, 1, 4)))
    w = t(np.ones((1, 1, 2)))
    with pytest.raises(BadAttr):
        K.conv1d(x, w, stride=0)
    with pytest.raises(BadAttr):
        K.conv1d(x, w, padding=-1)


def test_conv1d_empty_output_rejected():
    with pytest.raises(ShapeMismatch):
        K.conv1d(t(np.ones((1, 1, 2))), t(np.ones((1, 1, 5))))


def test_conv2d_one_by_one_identity(rng):
    x = rand_t(rng, 1, 1, 4, 4)
    w = t(np.ones((1, 1, 1, 1)))
    out = K.conv2d(x, w)
    assert np.allclose(out.data, x.data)


def test_conv2d_hand_sum():
    x = t(np.ones((1, 1, 2, 2)))
    w = t(np.ones((1, 1, 2, 2)))
    out = K.conv2d(x, w)
    assert out.data.tolist() == [[[[4.0]]]]


def test_conv2d_direct_equals_im2col(rng):
    x = rand_t(rng, 1, 3, 8, 8)
    w = rand_t(rng, 4, 3, 3, 3)
    for stride, padding in [(1, 0), (1, 1), (2, 1)]:
        d = K.conv2d(x, w, stride=stride, padding=padding, method="direct")
        i = K.conv2d(x, w, stride=stride, padding=padding, method="im2col")
        assert rel_err(i.data, d.data) <= 1e-5


def test_conv2d_matches_oracle(rng):
    x = rand_t(rng, 2, 2, 5, 6)
    w = rand_t(rng, 3, 2, 3, 2)
    got = K.conv2d(x, w, stride=2, padding=1)
    want = oracles.conv2d_oracle(x.data, w.data, 2, 1)
    assert rel_err(got.data, want) <= 1e-6


def test_conv2d_unknown_method():
    with pytest.raises(BadAttr):
        K.conv2d(t(np.ones((1, 1, 2, 2))), t(np.ones((1, 1, 1, 1))), method="winograd")


# --- normalization ---

def test_layer_norm_constant_slice():
    out = K.layer_norm(t([[5.0, 5.0, 5.0, 5.0]]))
    assert np.allclose(out.data, 0.0)


def test_layer_norm_matches_two_pass_oracle():
    x = t([[1.0, 2.0, 3.0, 4.0]])
    got = K.layer_norm(x)
    want = oracles.layer_norm_oracle(x.data)
    assert rel_err(got.data, want) <= 1e-6


def test_layer_norm_affine(rng):
    x = rand_t(rng, 2, 6, 8)
    g = rand_t(rng, 8)
    b = rand_t(rng, 8)
    got = K.layer_norm(x, g, b, eps=1e-5)
    want = oracles.layer_norm_oracle(x.data, g.data, b.data, eps=1e-5)
    assert rel_err(got.data, want) <= 1e-6


def test_layer_norm_slice_statistics(rng):
    x = rand_t(rng, 2, 16, 32)
    out = K.layer_norm(x).data.astype(np.float64)
    mu = out.mean(axis=-1)
    var = out.var(axis=-1)
    assert np.abs(mu).max() < 1e-6
    assert np.abs(var - 1.0).max() < 1e-4


def test_layer_norm_param_length_checked(rng):
    with pytest.raises(ShapeMismatch):
        K.layer_norm(rand_t(rng, 2, 4), gamma=t(np.ones(3)))


def test_batch_norm_identity_stats(rng):
    x = rand_t(rng, 1, 4, 2, 2)
    mean = t(np.zeros(4))
    var = t(np.ones(4))
    out = K.batch_norm_inference(x, mean, var, eps=0.0)
    assert np.allclose(out.data, x.data, atol=1e-7)


def test_batch_norm_matches_oracle(rng):
    x = rand_t(rng, 1, 4, 2, 2)
    mean = rand_t(rng, 4)
    var = t(rng.uniform(0.5, 1.5, 4))
    g = rand_t(rng, 4)
    b = rand_t(rng, 4)
    got = K.batch_norm_inference(x, mean, var, g, b, eps=1e-5)
    want = oracles.batch_norm_oracle(x.data, mean.data, var.data, g.data, b.data, eps=1e-5)
    assert rel_err(got.data, want) <= 1e-6


def test_batch_norm_gamma_zero_beta_seven(rng):
    x = rand_t(rng, 1, 3, 2, 2)
    out = K.batch_norm_inference(
        x, t(np.zeros(3)), t(np.ones(3)), t(np.zeros(3)), t(np.full(3, 7.0)))
    assert np.allclose(out.data, 7.0)


def test_batch_norm_3d_input(rng):
    # channel axis is 1 regardless of rank
    x = rand_t(rng, 2, 5, 7)
    mean = rand_t(rng, 5)
    var = t(rng.uniform(0.5, 1.5, 5))
    got = K.batch_norm_inference(x, mean, var)
    want = oracles.batch_norm_oracle(x.data, mean.data, var.data)
    assert rel_err(got.data, want) <= 1e-6


def test_rms_norm_ones():
    out = K.rms_norm(t([[1.0, 1.0, 1.0]]), eps=0.0)
    assert np.allclose(out.data, 1.0)


def test_rms_norm_zero_input():
    out = K.rms_norm(t([[0.0, 0.0]]), eps=1e-6)
    assert not out.data.any()


def test_rms_norm_matches_oracle(rng):
    x = rand_t(rng, 1, 10, 64)
    g = rand_t(rng, 64)
    got = K.rms_norm(x, g, eps=1e-6)
    want = oracles.rms_norm_oracle(x.data, g.data, eps=1e-6)
    assert rel_err(got.data, want) <= 1e-6


# --- softmax and activations ---

def test_softmax_uniform():
    out = K.softmax(t([0.0, 0.0, 0.0, 0.0]))
    assert np.allclose(out.data, 0.25)


def test_softmax_overflow_stability():
    out = K.softmax(t([1000.0, 1000.0]))
    assert np.abs(out.data.astype(np.float64) - 0.5).max() <= 1e-9


def test_softmax_slices_sum_to_one(rng):
    x = rand_t(rng, 1, 25, 8, 8)
    out = K.softmax(x, dim=-1)
    sums = out.data.astype(np.float64).sum(axis=-1)
    assert np.abs(sums - 1.0).max() <= 1e-6
    assert (out.data > 0).all() and (out.data <= 1).all()


def test_softmax_matches_oracle(rng):
    x = rand_t(rng, 3, 5)
    for dim in (0, 1, -1):
        got = K.softmax(x, dim=dim)
        want = oracles.softmax_oracle(x.data, dim)
        assert rel_err(got.data, want) <= 1e-6


def test_softmax_dim_out_of_range(rng):
    with pytest.raises(BadAttr):
        K.softmax(rand_t(rng, 2, 2), dim=2)


def test_relu_hand_values():
    out = K.activation("relu", t([-1.0, 0.0, 2.0]))
    assert out.data.tolist() == [0.0, 0.0, 2.0]


def test_gelu_silu_odd_points():
    assert K.activation("gelu", t([0.0])).data[0] == 0.0
    assert K.activation("silu", t([0.0])).data[0] == 0.0


def test_gelu_matches_erf_oracle(rng):
    x = rand_t(rng, 64)
    got = K.activation("gelu", x)
    want = oracles.gelu_oracle(x.data)
    assert np.abs(got.data.astype(np.float64) - want).max() <= 1e-6


def test_silu_matches_oracle(rng):
    x = rand_t(rng, 64)
    got = K.activation("silu", x)
    want = oracles.silu_oracle(x.data)
    assert np.abs(got.data.astype(np.float64) - want).max() <= 1e-6


def test_activation_unknown_kind(rng):
    with pytest.raises(BadAttr):
        K.activation("mish", rand_t(rng, 2))


# --- elementwise ---

def test_add_zero_identity(rng):
    x = rand_t(rng, 3, 4)
    out = K.elementwise("add", x, 0.0)
    assert np.array_equal(out.data, x.data)


def test_neg_involution(rng):
    x = rand_t(rng, 5)
    out = K.elementwise("neg", K.elementwise("neg", x))
    assert np.array_equal(out.data, x.data)


def test_broadcast_mul_matches_expansion(rng):
    a = rand_t(rng, 2, 3)
    b = rand_t(rng, 1, 3)
    got = K.elementwise("mul", a, b)
    want = a.data.astype(np.float64) * np.broadcast_to(b.data, (2, 3)).astype(np.float64)
    assert rel_err(got.data, want) <= 1e-6


def test_div_by_zero_propagates():
    out = K.elementwise("div", t([1.0, -1.0, 0.0]), t([0.0, 0.0, 0.0]))
    assert np.isposinf(out.data[0])
    assert np.isneginf(out.data[1])
    assert np.isnan(out.data[2])


def test_elementwise_scalar_operand(rng):
    x = rand_t(rng, 2, 2)
    out = K.elementwise("div", x, 2.0)
    assert np.allclose(out.data, x.data / 2.0)


def test_elementwise_non_broadcastable(rng):
    with pytest.raises(ShapeMismatch):
        K.elementwise("add", rand_t(rng, 2, 3), rand_t(rng, 2, 4))


def test_elementwise_unknown_kind(rng):
    with pytest.raises(BadAttr):
        K.elementwise("xor", rand_t(rng, 2), rand_t(rng, 2))


# --- memory operators ---

def test_view_aliases_and_preserves_values(rng):
    x = rand_t(rng, 1, 8, 1600)
    before = K.copy_count()
    out = K.view(x, [1, 8, 25, 64])
    assert K.copy_count() == before
    assert out.alias_of
    assert out.dims == (1, 8, 25, 64)
    assert np.array_equal(out.data.reshape(-1), x.data.reshape(-1))
    assert np.shares_memory(out.data, x.data)


def test_view_requires_contiguous(rng):
    x = K.permute(rand_t(rng, 2, 3), [1, 0])
    with pytest.raises(ShapeMismatch):
        K.view(x, [6])


def test_view_wrong_numel(rng):
    with pytest.raises(ShapeMismatch):
        K.view(rand_t(rng, 4), [5])


def test_view_infers_minus_one(rng):
    out = K.view(rand_t(rng, 2, 6), [2, -1, 3])
    assert out.dims == (2, 2, 3)


def test_reshape_aliases_contiguous(rng):
    x = rand_t(rng, 2, 6)
    before = K.copy_count()
    out = K.reshape(x, [3, 4])
    assert out.alias_of and K.copy_count() == before


def test_reshape_copies_non_contiguous(rng):
    x = K.permute(rand_t(rng, 2, 3), [1, 0])
    before = K.copy_count()
    out = K.reshape(x, [6])
    assert K.copy_count() == before + 1
    assert not out.alias_of
    assert out.data.tolist() == x.data.reshape(-1).tolist()


def test_permute_involution(rng):
    x = rand_t(rng, 2, 3, 4)
    out = K.permute(K.permute(x, [2, 0, 1]), [1, 2, 0])
    assert np.array_equal(out.data, x.data)


def test_permute_is_alias(rng):
    x = rand_t(rng, 2, 3)
    before = K.copy_count()
    out = K.permute(x, [1, 0])
    assert out.alias_of and K.copy_count() == before
    assert np.shares_memory(out.data, x.data)


def test_permute_rejects_non_permutation(rng):
    with pytest.raises(BadAttr):
        K.permute(rand_t(rng, 2, 3), [0, 0])


def test_contiguous_aliases_when_already_packed(rng):
    x = rand_t(rng, 2, 3)
    before = K.copy_count()
    out = K.contiguous(x)
    assert out.alias_of and K.copy_count() == before


def test_contiguous_materializes_strided(rng):
    x = K.permute(rand_t(rng, 2, 3), [1, 0])
    before = K.copy_count()
    out = K.contiguous(x)
    assert K.copy_count() == before + 1
    assert out.is_contiguous()
    assert np.array_equal(out.data, x.data)


def test_split_concat_roundtrip(rng):
    x = rand_t(rng, 1, 8, 4800)
    parts = K.split(x, 1600, dim=2)
    assert [p.dims for p in parts] == [(1, 8, 1600)] * 3
    assert all(p.alias_of for p in parts)
    back = K.concat(parts, dim=2)
    assert np.array_equal(back.data, x.data)


def test_split_uneven_tail(rng):
    parts = K.split(rand_t(rng, 7), 3)
    assert [p.dims for p in parts] == [(3,), (3,), (1,)]


def test_concat_shape_check(rng):
    with pytest.raises(ShapeMismatch):
        K.concat([rand_t(rng, 2, 3), rand_t(rng, 2, 4)], dim=0)


def test_expand_stretches_singleton(rng):
    x = rand_t(rng, 1, 1, 768)
    out = K.expand(x, [1, 197, 768])
    assert out.dims == (1, 197, 768)
    assert out.alias_of
    assert np.array_equal(out.data[0, 5], x.data[0, 0])


def test_expand_rejects_non_singleton_stretch(rng):
    with pytest.raises(ShapeMismatch):
        K.expand(rand_t(rng, 1, 2, 3), [1, 4, 3])


def test_squeeze_all_and_dim(rng):
    x = rand_t(rng, 1, 1, 10, 1)
    assert K.squeeze(x).dims == (10,)
    assert K.squeeze(x, dim=1).dims == (1, 10, 1)
    assert K.squeeze(x).alias_of


def test_dropout_is_identity_alias(rng):
    x = rand_t(rng, 3, 3)
    out = K.dropout(x)
    assert out.alias_of
    assert np.array_equal(out.data, x.data)


# --- nms and interpolation ---

def test_nms_single_box():
    assert K.nms([[0, 0, 10, 10]], [0.9]) == [0]


def test_nms_identical_boxes_suppress():
    boxes = [[0, 0, 10, 10], [0, 0, 10, 10]]
    assert K.nms(boxes, [0.9, 0.8], iou_threshold=0.5) == [0]


def test_nms_tie_breaks_by_index():
    boxes = [[0, 0, 10, 10], [100, 100, 110, 110]]
    assert K.nms(boxes, [0.7, 0.7]) == [0, 1]
    # swapping rows flips the winner deterministically
    assert K.nms(boxes[::-1], [0.7, 0.7]) == [0, 1]


def test_nms_score_threshold_drops():
    boxes = [[0, 0, 1, 1], [5, 5, 6, 6]]
    assert K.nms(boxes, [0.9, 0.05], score_threshold=0.1) == [0]


def test_nms_zero_area_never_suppressed():
    boxes = [[0, 0, 10, 10], [5, 5, 5, 5]]
    assert K.nms(boxes, [0.9, 0.8], iou_threshold=0.0) == [0, 1]


def test_nms_uncanonical_boxes():
    # x2 < x1 etc. are canonicalized before IoU
    boxes = [[10, 10, 0, 0], [0, 0, 10, 10]]
    assert K.nms(boxes, [0.9, 0.8], iou_threshold=0.5) == [0]


def test_nms_threshold_validation():
    with pytest.raises(BadAttr):
        K.nms([[0, 0, 1, 1]], [0.5], iou_threshold=1.5)
    with pytest.raises(BadAttr):
        K.nms([[0, 0, 1, 1]], [0.5], score_threshold=-0.1)


def test_nms_matches_oracle_small(rng):
    for _ in range(25):
        n = int(rng.integers(1, 40))
        boxes = np.concatenate(
            [rng.uniform(0, 50, (n, 2)), rng.uniform(0, 50, (n, 2))], axis=1
        ).astype(np.float32)
        boxes[:, 2:] += boxes[:, :2]
        scores = rng.uniform(0, 1, n).astype(np.float32)
        thr = float(rng.uniform(0.1, 0.9))
        got = K.nms(boxes, scores, iou_threshold=thr)
        want = oracles.nms_oracle(boxes, scores, iou_threshold=thr)
        assert got == want


def test_box_iou_zero_area():
    a = K.Box(0, 0, 0, 10).canonical()
    b = K.Box(0, 0, 10, 10).canonical()
    assert K.box_iou(a, b) == 0.0


def test_nms_accepts_box_objects():
    boxes = [K.Box(0, 0, 10, 10), K.Box(0, 0, 10, 10)]
    assert K.nms(boxes, [0.9, 0.8]) == [0]


def test_interpolate_identity_size(rng):
    x = rand_t(rng, 1, 2, 4, 4)
    for mode in ("nearest", "bilinear"):
        out = K.interpolate(x, 4, 4, mode=mode)
        assert np.allclose(out.data, x.data, atol=1e-7)


def test_interpolate_constant_upscale():
    x = t(np.full((1, 1, 3, 3), 7.0))
    out = K.interpolate(x, 6, 6, mode="bilinear")
    assert np.allclose(out.data, 7.0)


def test_interpolate_bilinear_matches_oracle(rng):
    x = rand_t(rng, 1, 2, 4, 4)
    got = K.interpolate(x, 8, 8, mode="bilinear")
    want = oracles.bilinear_oracle(x.data, 8, 8)
    assert rel_err(got.data, want) <= 1e-5


def test_interpolate_downscale_matches_oracle(rng):
    x = rand_t(rng, 2, 3, 8, 8)
    got = K.interpolate(x, 3, 5, mode="bilinear")
    want = oracles.bilinear_oracle(x.data, 3, 5)
    assert rel_err(got.data, want) <= 1e-5


def test_interpolate_nearest_matches_oracle(rng):
    x = rand_t(rng, 1, 1, 5, 7)
    got = K.interpolate(x, 9, 4, mode="nearest")
    want = oracles.nearest_oracle(x.data, 9, 4)
    assert np.array_equal(got.data.astype(np.float64), want)


def test_interpolate_bad_attrs(rng):
    x = rand_t(rng, 1, 1, 2, 2)
    with pytest.raises(BadAttr):
        K.interpolate(x, 0, 4)
    with pytest.raises(BadAttr):
        K.interpolate(x, 4, 4, mode="bicubic")
    with pytest.raises(ShapeMismatch):
        K.interpolate(rand_t(rng, 2, 2), 4, 4)


# --- FLOP accounting ---

def _specs(*shapes):
    return [TensorSpec(dims=tuple(s)) for s in shapes]


def test_flops_linear_hand_example():
    # M=1, K=4, N=2 with bias: 2*1*2*4 + 1*2 = 18
    got = K.flops_for("linear", _specs((1, 4), (2, 4), (2,)), _specs((1, 2)))
    assert got == 18


def test_flops_linear_square():
    assert K.flops_for("linear", _specs((3, 3), (3, 3)), _specs((3, 3))) == 54
    assert K.flops_for("linear", _specs((3, 3), (3, 3), (3,)), _specs((3, 3))) == 63


def test_flops_linear_monotone_in_m():
    one = K.flops_for("linear", _specs((4, 8), (16, 8)), _specs((4, 16)))
    two = K.flops_for("linear", _specs((8, 8), (16, 8)), _specs((8, 16)))
    assert two == 2 * one


def test_flops_conv2d_example():
    got = K.flops_for(
        "conv2d", _specs((1, 1, 3, 3), (1, 1, 2, 2)), _specs((1, 1, 2, 2)))
    assert got == 32


def test_flops_matmul():
    got = K.flops_for("matmul", _specs((2, 3, 4), (2, 4, 5)), _specs((2, 3, 5)))
    assert got == 2 * 2 * 3 * 5 * 4


def test_flops_per_element_conventions():
    spec = _specs((2, 8))
    out = _specs((2, 8))
    assert K.flops_for("LayerNorm", spec, out) == 8 * 16
    assert K.flops_for("rms_norm", spec, out) == 8 * 16
    assert K.flops_for("relu", spec, out) == 16
    assert K.flops_for("GELU", spec, out) == 15 * 16
    assert K.flops_for("SiLu", spec, out) == 5 * 16
    assert K.flops_for("add", spec + spec, out) == 16
    assert K.flops_for("Softmax", spec, out) == 5 * 16


def test_flops_zero_for_memory_roi_interp():
    spec = _specs((4, 4))
    assert K.flops_for("view", spec, spec) == 0
    assert K.flops_for("nms", _specs((10, 4), (10,)), _specs((10,))) == 0
    assert K.flops_for("interpolate", _specs((1, 1, 4, 4)), _specs((1, 1, 8, 8))) == 0
    assert K.flops_for("dropout", spec, spec) == 0


def test_flops_unknown_op_warns():
    with pytest.warns(UnknownOpWarning):
        got = K.flops_for("embedding", _specs((4,)), _specs((4, 8)))
    assert got == 0


def test_flop_count_uses_node_specs():
    node = GraphNode(
        id="n", op_name="linear",
        inputs=["x", "w"],
        input_specs=_specs((3, 3), (3, 3)),
        output_specs=_specs((3, 3)),
    )
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert K.flop_count(node) == 54


# --- property tests ---

@given(arrays(np.float32, st.tuples(st.integers(1, 4), st.integers(1, 8)),
              elements=st.floats(-50, 50, width=32)))
def test_softmax_rows_sum_to_one_property(arr):
    out = K.softmax(t(arr), dim=-1)
    sums = out.data.astype(np.float64).sum(axis=-1)
    assert np.abs(sums - 1.0).max() <= 1e-6


@given(arrays(np.float32, st.tuples(st.integers(1, 4), st.integers(2, 8)),
              elements=st.floats(-50, 50, width=32)))
def test_layer_norm_zero_mean_property(arr):
    out = K.layer_norm(t(arr)).data.astype(np.float64)
    assert np.abs(out.mean(axis=-1)).max() < 1e-6


@settings(max_examples=30)
@given(st.data())
def test_nms_oracle_property(data):
    n = data.draw(st.integers(1, 25))
    rng = np.random.default_rng(data.draw(st.integers(0, 2**31 - 1)))
    pts = rng.uniform(0, 30, (n, 4)).astype(np.float32)
    scores = rng.uniform(0, 1, n).astype(np.float32)
    thr = data.draw(st.floats(0.05, 0.95))
    assert K.nms(pts, scores, iou_threshold=thr) == oracles.nms_oracle(
        pts, scores, iou_threshold=thr)

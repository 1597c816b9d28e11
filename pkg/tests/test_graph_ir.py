import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opbench.errors import SchemaError, ValidationError
from opbench.graph_ir import (
    GraphNode,
    OperatorGraph,
    ShapeRecord,
    TensorSpec,
    canonical_dumps,
    load_graph,
    load_records,
    save_graph,
    save_records,
    topo_order,
)

from .conftest import tiny_graph
from .oracles import is_topo_order


# --- TensorSpec ---

def test_spec_roundtrip():
    spec = TensorSpec(dims=(2, 3, 4), strides=(12, 4, 1), dtype="f32")
    again = TensorSpec.from_json(spec.to_json())
    assert again == spec


def test_spec_rejects_empty_dims():
    with pytest.raises(ValidationError):
        TensorSpec(dims=()).validate()


def test_spec_rejects_zero_dim():
    with pytest.raises(ValidationError):
        TensorSpec(dims=(3, 0)).validate()


def test_spec_rejects_oversized():
    with pytest.raises(ValidationError):
        TensorSpec(dims=(2**16, 2**16)).validate()


def test_spec_rejects_bad_dtype():
    with pytest.raises(ValidationError):
        TensorSpec(dims=(1,), dtype="f16").validate()


def test_spec_rejects_stride_length_mismatch():
    with pytest.raises(ValidationError):
        TensorSpec(dims=(2, 2), strides=(1,)).validate()


def test_spec_rejects_unknown_field():
    with pytest.raises(SchemaError):
        TensorSpec.from_json({"dims": [1], "dtype": "f32", "layout": "nchw"})


@given(
    dims=st.lists(st.integers(min_value=1, max_value=8), min_size=1, max_size=4),
    dtype=st.sampled_from(["f32", "i64", "bool"]),
)
def test_spec_json_roundtrip_property(dims, dtype):
    spec = TensorSpec(dims=tuple(dims), dtype=dtype)
    spec.validate()
    text = canonical_dumps(spec.to_json())
    again = TensorSpec.from_json(json.loads(text))
    assert canonical_dumps(again.to_json()) == text


# --- GraphNode ---

def test_node_output_ids_single():
    node = GraphNode(id="n", op_name="relu", output_specs=[TensorSpec(dims=(1,))])
    assert node.output_ids() == ["n"]


def test_node_output_ids_multi():
    specs = [TensorSpec(dims=(1,))] * 3
    node = GraphNode(id="n", op_name="split", output_specs=specs)
    assert node.output_ids() == ["n:0", "n:1", "n:2"]


def test_node_rejects_unknown_field():
    obj = GraphNode(id="n", op_name="relu").to_json()
    obj["color"] = "red"
    with pytest.raises(SchemaError):
        GraphNode.from_json(obj)


def test_node_rejects_non_scalar_attr():
    with pytest.raises(SchemaError):
        GraphNode.from_json({
            "id": "n", "op_name": "relu", "attrs": {"w": {"nested": 1}},
            "inputs": [], "input_specs": [], "output_specs": [],
        })


def test_node_accepts_int_list_attr():
    node = GraphNode.from_json({
        "id": "n", "op_name": "permute", "attrs": {"dims": [0, 2, 1]},
        "inputs": [], "input_specs": [], "output_specs": [],
    })
    assert node.attrs["dims"] == [0, 2, 1]


# --- OperatorGraph validation ---

def test_valid_graph_passes():
    tiny_graph().validate()


def test_duplicate_node_id_rejected():
    g = tiny_graph()
    g.nodes[1].id = "a"
    with pytest.raises(ValidationError):
        g.validate()


def test_node_id_shadowing_input_rejected():
    g = tiny_graph()
    g.nodes[0].id = "x"
    with pytest.raises(ValidationError):
        g.validate()


def test_undefined_input_rejected():
    g = tiny_graph()
    g.nodes[0].inputs = ["ghost"]
    with pytest.raises(ValidationError):
        g.validate()


def test_consumer_before_producer_rejected():
    g = tiny_graph()
    g.nodes.reverse()
    with pytest.raises(ValidationError):
        g.validate()


def test_unproduced_output_rejected():
    g = tiny_graph()
    g.graph_outputs = ["nowhere"]
    with pytest.raises(ValidationError):
        g.validate()


def test_colon_in_node_id_rejected():
    g = tiny_graph()
    g.nodes[0].id = "a:0"
    with pytest.raises(ValidationError):
        g.validate()


def test_graph_missing_version_rejected():
    obj = tiny_graph().to_json()
    del obj["version"]
    with pytest.raises(SchemaError):
        OperatorGraph.from_json(obj)


def test_graph_wrong_version_rejected():
    obj = tiny_graph().to_json()
    obj["version"] = "opbench-graph/9"
    with pytest.raises(SchemaError):
        OperatorGraph.from_json(obj)


# --- topo_order ---

def test_topo_order_is_file_order_for_valid_graphs():
    g = tiny_graph()
    assert topo_order(g) == ["a", "b"]


def test_topo_order_satisfies_oracle(fixture_dir):
    g = load_graph(fixture_dir / "toy_vit.graph.json")
    order = topo_order(g)
    producer_of = {}
    for n in g.nodes:
        for out in n.output_ids():
            producer_of[out] = n.id
    assert is_topo_order(order, g.node_map(), producer_of)


def test_topo_order_reports_cycle():
    spec = TensorSpec(dims=(1,))
    g = OperatorGraph(
        nodes=[
            GraphNode(id="a", op_name="relu", inputs=["b"], input_specs=[spec], output_specs=[spec]),
            GraphNode(id="b", op_name="relu", inputs=["a"], input_specs=[spec], output_specs=[spec]),
        ],
        graph_inputs=[],
        graph_outputs=["a"],
    )
    with pytest.raises(ValidationError, match="cycle"):
        topo_order(g)


def test_topo_order_multi_output_values(fixture_dir):
    # split produces id:k values; consumers must still resolve to the node
    spec3 = TensorSpec(dims=(6,))
    spec1 = TensorSpec(dims=(2,))
    g = OperatorGraph(
        nodes=[
            GraphNode(id="s", op_name="split", attrs={"split_size": 2}, inputs=["x"],
                      input_specs=[spec3], output_specs=[spec1, spec1, spec1]),
            GraphNode(id="c", op_name="concat", attrs={"dim": 0}, inputs=["s:2", "s:0", "s:1"],
                      input_specs=[spec1, spec1, spec1], output_specs=[spec3]),
        ],
        graph_inputs=[("x", spec3)],
        graph_outputs=["c"],
    )
    g.validate()
    assert topo_order(g) == ["s", "c"]


# --- file round-trips ---

def test_graph_file_roundtrip(tmp_path, fixture_dir):
    src = fixture_dir / "toy_vit.graph.json"
    first = src.read_bytes()
    g = load_graph(src)
    out = tmp_path / "again.json"
    save_graph(g, out)
    assert out.read_bytes() == first


def test_records_file_roundtrip(tmp_path, fixture_dir):
    src = fixture_dir / "table2_records.json"
    records = load_records(src)
    out = tmp_path / "again.json"
    save_records(records, out)
    assert out.read_bytes() == src.read_bytes()


def test_records_wrong_version_rejected(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"version": "opbench-records/2", "records": []}')
    with pytest.raises(SchemaError):
        load_records(p)


def test_record_validates_shapes():
    r = ShapeRecord(op_name="Add", group="ElemwiseArithmetic", input_shapes=[[0, 3]])
    with pytest.raises(ValidationError):
        r.validate()


@st.composite
def graphs(draw):
    """Linear chains of unary ops with varying shapes; always valid."""
    n_nodes = draw(st.integers(min_value=1, max_value=6))
    dims = tuple(draw(st.lists(st.integers(1, 5), min_size=1, max_size=3)))
    spec = TensorSpec(dims=dims)
    nodes = []
    prev = "x"
    for i in range(n_nodes):
        nid = f"n{i}"
        op = draw(st.sampled_from(["relu", "gelu", "contiguous", "dropout"]))
        nodes.append(GraphNode(id=nid, op_name=op, inputs=[prev], input_specs=[spec], output_specs=[spec]))
        prev = nid
    meta = {"model_name": draw(st.text(alphabet="abcxyz", min_size=0, max_size=6))}
    return OperatorGraph(nodes=nodes, graph_inputs=[("x", spec)], graph_outputs=[prev], metadata=meta)


@settings(max_examples=40)
@given(graphs())
def test_graph_json_roundtrip_property(g):
    g.validate()
    text = canonical_dumps(g.to_json())
    again = OperatorGraph.from_json(json.loads(text))
    assert canonical_dumps(again.to_json()) == text
    assert is_topo_order(
        topo_order(again),
        again.node_map(),
        {out: n.id for n in again.nodes for out in n.output_ids()},
    )

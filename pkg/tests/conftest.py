import numpy as np
import pytest

from opbench.fixtures import DATA_DIR
from opbench.graph_ir import GraphNode, OperatorGraph, TensorSpec
from opbench.kernels import Tensor


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def t(arr, dtype=np.float32) -> Tensor:
    return Tensor.from_array(np.asarray(arr, dtype=dtype))


def rand_t(rng, *dims) -> Tensor:
    return Tensor.from_array(rng.uniform(-1.0, 1.0, size=dims).astype(np.float32))


def tiny_graph() -> OperatorGraph:
    """x -> relu -> softmax, the smallest useful pipeline."""
    spec = TensorSpec(dims=(2, 4))
    return OperatorGraph(
        nodes=[
            GraphNode(id="a", op_name="relu", inputs=["x"], input_specs=[spec], output_specs=[spec]),
            GraphNode(id="b", op_name="softmax", attrs={"dim": -1}, inputs=["a"], input_specs=[spec], output_specs=[spec]),
        ],
        graph_inputs=[("x", spec)],
        graph_outputs=["b"],
        metadata={"model_name": "tiny", "batch_size": 2},
    )


@pytest.fixture
def fixture_dir():
    return DATA_DIR

"""Operator-graph intermediate representation and its on-disk JSON format.

A graph file is a single JSON object with version "opbench-graph/1":

    {
      "version": "opbench-graph/1",
      "metadata": {...},
      "graph_inputs": [{"id": str, "spec": TensorSpec}, ...],
      "nodes": [{"id", "op_name", "attrs", "inputs",
                 "input_specs", "output_specs"}, ...],
      "graph_outputs": [value_id, ...]
    }

TensorSpec objects look like {"dims": [int], "strides": [int]?, "dtype":
"f32"|"i64"|"bool"}.  Value ids follow a fixed convention: a node with a
single output produces the value named by its node id; a node with k > 1
outputs produces "<id>:0" ... "<id>:k-1".  Node and graph-input ids may
therefore not contain ':'.  Nodes appear in producer-before-consumer order,
so file order is always a valid execution order.

Serialization is canonical (sorted keys, no insignificant whitespace, one
trailing newline) so byte-level round-trip comparisons are meaningful.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import IoError, SchemaError, ValidationError

GRAPH_VERSION = "opbench-graph/1"
RECORDS_VERSION = "opbench-records/1"

DTYPES = ("f32", "i64", "bool")
MAX_ELEMENTS = 2**31

AttrValue = str | int | float | bool | list


def canonical_dumps(payload) -> str:
    """Serialize to the canonical interchange form (deterministic bytes)."""
    return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"


def write_json(path, payload) -> None:
    try:
        Path(path).write_text(canonical_dumps(payload), encoding="utf-8")
    except OSError as e:
        raise IoError(f"cannot write {path}: {e}") from e


def read_json(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise IoError(f"cannot read {path}: {e}") from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"{path}: malformed JSON: {e}") from e


@dataclass(frozen=True)
class TensorSpec:
    """Shape/stride/dtype descriptor for one operator input or output.

    Strides are in elements, not bytes; absent strides mean contiguous
    row-major layout.
    """

    dims: tuple[int, ...]
    strides: tuple[int, ...] | None = None
    dtype: str = "f32"

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(self.dims))
        if self.strides is not None:
            object.__setattr__(self, "strides", tuple(self.strides))

    def validate(self, where: str = "spec") -> None:
        if not self.dims:
            raise ValidationError(f"{where}: dims must be non-empty")
        if any(not isinstance(d, int) or d < 1 for d in self.dims):
            raise ValidationError(f"{where}: every dim must be an int >= 1, got {list(self.dims)}")
        if self.numel() > MAX_ELEMENTS:
            raise ValidationError(f"{where}: element count {self.numel()} exceeds 2^31")
        if self.strides is not None:
            if len(self.strides) != len(self.dims):
                raise ValidationError(f"{where}: strides length {len(self.strides)} != dims length {len(self.dims)}")
            if any(not isinstance(s, int) or s < 0 for s in self.strides):
                raise ValidationError(f"{where}: strides must be non-negative ints")
        if self.dtype not in DTYPES:
            raise ValidationError(f"{where}: unknown dtype {self.dtype!r}")

    def numel(self) -> int:
        n = 1
        for d in self.dims:
            n *= d
        return n

    def to_json(self) -> dict:
        out: dict = {"dims": list(self.dims), "dtype": self.dtype}
        if self.strides is not None:
            out["strides"] = list(self.strides)
        return out

    @classmethod
    def from_json(cls, obj, where: str = "spec") -> "TensorSpec":
        if not isinstance(obj, dict):
            raise SchemaError(f"{where}: TensorSpec must be an object, got {type(obj).__name__}")
        unknown = set(obj) - {"dims", "strides", "dtype"}
        if unknown:
            raise SchemaError(f"{where}: unknown TensorSpec fields {sorted(unknown)}")
        if "dims" not in obj or "dtype" not in obj:
            raise SchemaError(f"{where}: TensorSpec requires 'dims' and 'dtype'")
        if obj["dtype"] not in DTYPES:
            raise SchemaError(f"{where}: dtype must be one of {list(DTYPES)}, got {obj['dtype']!r}")
        return cls(dims=tuple(obj["dims"]), strides=tuple(obj["strides"]) if "strides" in obj else None, dtype=obj["dtype"])


def _check_attrs(attrs, where: str) -> None:
    if not isinstance(attrs, dict):
        raise SchemaError(f"{where}: attrs must be an object")
    for k, v in attrs.items():
        if not isinstance(k, str):
            raise SchemaError(f"{where}: attr keys must be strings")
        if isinstance(v, (str, bool, int, float)):
            continue
        if isinstance(v, list) and all(isinstance(x, int) and not isinstance(x, bool) for x in v):
            continue
        raise SchemaError(f"{where}: attr {k!r} must be a scalar, string, or int list")


@dataclass
class GraphNode:
    """One operator invocation: op name, attributes, and recorded specs."""

    id: str
    op_name: str
    attrs: dict = field(default_factory=dict)
    inputs: list[str] = field(default_factory=list)
    input_specs: list[TensorSpec] = field(default_factory=list)
    output_specs: list[TensorSpec] = field(default_factory=list)

    def output_ids(self) -> list[str]:
        if len(self.output_specs) <= 1:
            return [self.id]
        return [f"{self.id}:{k}" for k in range(len(self.output_specs))]

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "op_name": self.op_name,
            "attrs": dict(self.attrs),
            "inputs": list(self.inputs),
            "input_specs": [s.to_json() for s in self.input_specs],
            "output_specs": [s.to_json() for s in self.output_specs],
        }

    @classmethod
    def from_json(cls, obj) -> "GraphNode":
        if not isinstance(obj, dict):
            raise SchemaError("node entry must be an object")
        node_id = obj.get("id")
        where = f"node '{node_id}'" if isinstance(node_id, str) else "node <missing id>"
        required = {"id", "op_name", "attrs", "inputs", "input_specs", "output_specs"}
        missing = required - set(obj)
        if missing:
            raise SchemaError(f"{where}: missing fields {sorted(missing)}")
        unknown = set(obj) - required
        if unknown:
            raise SchemaError(f"{where}: unknown fields {sorted(unknown)}")
        if not isinstance(obj["id"], str) or not isinstance(obj["op_name"], str):
            raise SchemaError(f"{where}: id and op_name must be strings")
        if not isinstance(obj["inputs"], list) or not all(isinstance(x, str) for x in obj["inputs"]):
            raise SchemaError(f"{where}: inputs must be a list of value ids")
        _check_attrs(obj["attrs"], where)
        return cls(
            id=obj["id"],
            op_name=obj["op_name"],
            attrs=obj["attrs"],
            inputs=list(obj["inputs"]),
            input_specs=[TensorSpec.from_json(s, f"{where} input_specs[{i}]") for i, s in enumerate(obj["input_specs"])],
            output_specs=[TensorSpec.from_json(s, f"{where} output_specs[{i}]") for i, s in enumerate(obj["output_specs"])],
        )


@dataclass
class OperatorGraph:
    """A serializable, topologically-ordered operator graph."""

    nodes: list[GraphNode] = field(default_factory=list)
    graph_inputs: list[tuple[str, TensorSpec]] = field(default_factory=list)
    graph_outputs: list[str] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def validate(self) -> None:
        """Check every structural invariant; raises ValidationError."""
        available: set[str] = set()
        input_ids: set[str] = set()
        for vid, spec in self.graph_inputs:
            if ":" in vid:
                raise ValidationError(f"graph input '{vid}': ids may not contain ':'")
            if vid in input_ids:
                raise ValidationError(f"graph input '{vid}': duplicate id")
            spec.validate(f"graph input '{vid}'")
            input_ids.add(vid)
            available.add(vid)

        node_ids: set[str] = set()
        produced: set[str] = set()
        for node in self.nodes:
            where = f"node '{node.id}'"
            if not node.id or ":" in node.id:
                raise ValidationError(f"{where}: node ids must be non-empty and ':'-free")
            if node.id in node_ids or node.id in input_ids:
                raise ValidationError(f"{where}: duplicate id")
            if len(node.input_specs) != len(node.inputs):
                raise ValidationError(
                    f"{where}: input_specs length {len(node.input_specs)} != inputs length {len(node.inputs)}"
                )
            for vid in node.inputs:
                if vid not in available:
                    raise ValidationError(f"{where}: input '{vid}' is not a graph input or earlier node output")
            for i, spec in enumerate(node.input_specs):
                spec.validate(f"{where} input_specs[{i}]")
            for i, spec in enumerate(node.output_specs):
                spec.validate(f"{where} output_specs[{i}]")
            _check_attrs(node.attrs, where)
            node_ids.add(node.id)
            for out in node.output_ids():
                if node.output_specs:
                    available.add(out)
                    produced.add(out)

        for vid in self.graph_outputs:
            if vid not in produced:
                raise ValidationError(f"graph output '{vid}' is not produced by any node")

        if not isinstance(self.metadata, dict) or any(not isinstance(k, str) for k in self.metadata):
            raise ValidationError("metadata must be an object with string keys")

    def node_map(self) -> dict[str, GraphNode]:
        return {n.id: n for n in self.nodes}

    def to_json(self) -> dict:
        return {
            "version": GRAPH_VERSION,
            "metadata": dict(self.metadata),
            "graph_inputs": [{"id": vid, "spec": spec.to_json()} for vid, spec in self.graph_inputs],
            "nodes": [n.to_json() for n in self.nodes],
            "graph_outputs": list(self.graph_outputs),
        }

    @classmethod
    def from_json(cls, obj) -> "OperatorGraph":
        if not isinstance(obj, dict):
            raise SchemaError("graph file must contain a JSON object")
        required = {"version", "metadata", "graph_inputs", "nodes", "graph_outputs"}
        missing = required - set(obj)
        if missing:
            raise SchemaError(f"graph object missing fields {sorted(missing)}")
        if obj["version"] != GRAPH_VERSION:
            raise SchemaError(f"unknown graph version {obj['version']!r}, expected {GRAPH_VERSION!r}")
        gi = []
        for i, entry in enumerate(obj["graph_inputs"]):
            if not isinstance(entry, dict) or set(entry) != {"id", "spec"}:
                raise SchemaError(f"graph_inputs[{i}] must be {{id, spec}}")
            gi.append((entry["id"], TensorSpec.from_json(entry["spec"], f"graph input '{entry['id']}'")))
        if not isinstance(obj["nodes"], list):
            raise SchemaError("nodes must be a list")
        nodes = [GraphNode.from_json(n) for n in obj["nodes"]]
        if not isinstance(obj["graph_outputs"], list) or not all(isinstance(x, str) for x in obj["graph_outputs"]):
            raise SchemaError("graph_outputs must be a list of value ids")
        return cls(nodes=nodes, graph_inputs=gi, graph_outputs=list(obj["graph_outputs"]), metadata=obj["metadata"])


@dataclass
class ShapeRecord:
    """Deduplicated (operator, input shapes, attrs) tuple from a profiling run."""

    op_name: str
    group: str
    input_shapes: list[list[int]]
    attrs: dict = field(default_factory=dict)
    source_model: str = ""
    count: int = 1

    def validate(self, where: str = "record") -> None:
        if not self.input_shapes:
            raise ValidationError(f"{where}: input_shapes must be non-empty")
        for dims in self.input_shapes:
            TensorSpec(dims=tuple(dims)).validate(where)
        _check_attrs(self.attrs, where)

    def to_json(self) -> dict:
        return {
            "op_name": self.op_name,
            "group": self.group,
            "input_shapes": [list(s) for s in self.input_shapes],
            "attrs": dict(self.attrs),
            "source_model": self.source_model,
            "count": self.count,
        }

    @classmethod
    def from_json(cls, obj, where: str = "record") -> "ShapeRecord":
        required = {"op_name", "group", "input_shapes", "attrs", "source_model", "count"}
        if not isinstance(obj, dict) or not required <= set(obj):
            raise SchemaError(f"{where}: requires fields {sorted(required)}")
        return cls(
            op_name=obj["op_name"],
            group=obj["group"],
            input_shapes=[list(s) for s in obj["input_shapes"]],
            attrs=obj["attrs"],
            source_model=obj["source_model"],
            count=obj["count"],
        )


def load_graph(path) -> OperatorGraph:
    """Load and validate an "opbench-graph/1" file."""
    graph = OperatorGraph.from_json(read_json(path))
    graph.validate()
    return graph


def save_graph(graph: OperatorGraph, path) -> None:
    """Validate and write a graph in canonical form (round-trip stable)."""
    graph.validate()
    write_json(path, graph.to_json())


def topo_order(graph: OperatorGraph) -> list[str]:
    """Execution order over node ids: producers first, stable file-order ties.

    Valid graphs are stored producer-before-consumer, so this returns file
    order for them; Kahn's algorithm is still run so cycles in
    programmatically built graphs are reported instead of looping.
    """
    producer_of: dict[str, str] = {}
    for node in graph.nodes:
        for out in node.output_ids():
            if node.output_specs:
                producer_of[out] = node.id

    order_index = {n.id: i for i, n in enumerate(graph.nodes)}
    deps: dict[str, set[str]] = {}
    dependents: dict[str, set[str]] = {n.id: set() for n in graph.nodes}
    for node in graph.nodes:
        ds = {producer_of[v] for v in node.inputs if v in producer_of}
        ds.discard(node.id)
        deps[node.id] = ds
        for d in ds:
            dependents[d].add(node.id)

    ready = sorted((nid for nid, ds in deps.items() if not ds), key=order_index.__getitem__)
    out: list[str] = []
    pending = {nid: len(ds) for nid, ds in deps.items()}
    while ready:
        nid = ready.pop(0)
        out.append(nid)
        released = []
        for dep in dependents[nid]:
            pending[dep] -= 1
            if pending[dep] == 0:
                released.append(dep)
        if released:
            ready = sorted(ready + released, key=order_index.__getitem__)
    if len(out) != len(graph.nodes):
        stuck = sorted(set(order_index) - set(out))
        raise ValidationError(f"graph contains a cycle involving {stuck}")
    return out


def load_records(path) -> list[ShapeRecord]:
    """Load an "opbench-records/1" shape-record file."""
    obj = read_json(path)
    if not isinstance(obj, dict) or obj.get("version") != RECORDS_VERSION:
        raise SchemaError(f"{path}: expected a {RECORDS_VERSION!r} object")
    records = [ShapeRecord.from_json(r, f"records[{i}]") for i, r in enumerate(obj.get("records", []))]
    for i, r in enumerate(records):
        r.validate(f"records[{i}]")
    return records


def save_records(records: list[ShapeRecord], path) -> None:
    write_json(path, {"version": RECORDS_VERSION, "records": [r.to_json() for r in records]})

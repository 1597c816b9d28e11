"""Operator-level workload profiling and microbenchmarking.

The package breaks a model forward pass into operator events, groups
them with an ordered rule table, measures per-operator wall time, and
replays recorded shapes as standalone microbenchmarks.  Everything
speaks versioned JSON so traces can come from the bundled executor, a
Chrome trace, or any external tool that writes the same schema.
"""

from opbench.errors import (
    AttributionError,
    BadAttr,
    EmptyError,
    ExecError,
    FixtureError,
    InputMismatch,
    IoError,
    OpbenchError,
    SchemaError,
    ShapeMismatch,
    UnknownOpWarning,
    UnrunnableSpec,
    ValidationError,
    VersionError,
)
from opbench.graph_ir import (
    GRAPH_VERSION,
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
from opbench.taxonomy import (
    GROUP_ORDER,
    NON_GEMM_GROUPS,
    OperatorGroup,
    RuleSet,
    classify,
    default_rules,
    is_gemm,
    load_rules,
    normalize_name,
)
from opbench.kernels import Tensor, copy_count, flop_count, flops_for
from opbench.executor import is_runnable, run_node, run_op, runnable_ops
from opbench.profiler import (
    TRACE_VERSION,
    ProfileConfig,
    ProfileRun,
    ProfileSample,
    capture_shape_records,
    execute_graph,
    profile_graph,
    save_trace,
)
from opbench.ingest import convert_chrome_trace, parse_trace
from opbench.report import (
    ComparisonTable,
    GroupBreakdown,
    breakdown,
    compare,
    emit,
    top_nongemm_group,
)
from opbench.microbench import (
    MicrobenchConfig,
    MicrobenchResult,
    MicrobenchSpec,
    generate_specs,
    load_specs,
    run_spec,
    run_suite,
    save_specs,
)
from opbench.fixtures import fixture_path, list_fixtures, verify_fixtures

__version__ = "0.1.0"

__all__ = [
    "AttributionError",
    "BadAttr",
    "ComparisonTable",
    "EmptyError",
    "ExecError",
    "FixtureError",
    "GRAPH_VERSION",
    "GROUP_ORDER",
    "GraphNode",
    "GroupBreakdown",
    "InputMismatch",
    "IoError",
    "MicrobenchConfig",
    "MicrobenchResult",
    "MicrobenchSpec",
    "NON_GEMM_GROUPS",
    "OpbenchError",
    "OperatorGraph",
    "OperatorGroup",
    "ProfileConfig",
    "ProfileRun",
    "ProfileSample",
    "RuleSet",
    "SchemaError",
    "ShapeMismatch",
    "ShapeRecord",
    "TRACE_VERSION",
    "Tensor",
    "TensorSpec",
    "UnknownOpWarning",
    "UnrunnableSpec",
    "ValidationError",
    "VersionError",
    "breakdown",
    "canonical_dumps",
    "capture_shape_records",
    "classify",
    "compare",
    "convert_chrome_trace",
    "copy_count",
    "default_rules",
    "emit",
    "execute_graph",
    "fixture_path",
    "flop_count",
    "flops_for",
    "generate_specs",
    "is_gemm",
    "is_runnable",
    "list_fixtures",
    "load_graph",
    "load_records",
    "load_rules",
    "load_specs",
    "normalize_name",
    "parse_trace",
    "profile_graph",
    "run_node",
    "run_op",
    "run_spec",
    "run_suite",
    "runnable_ops",
    "save_graph",
    "save_records",
    "save_specs",
    "save_trace",
    "top_nongemm_group",
    "topo_order",
    "verify_fixtures",
]

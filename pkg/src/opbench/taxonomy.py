"""Classification of operator names into functional groups.

Classification is purely name-driven: the final dotted segment of the
operator name is lowercased and matched against an ordered rule list,
first match wins.  Unmatched names fall through to Uncategorized; nothing
is ever dropped.  The builtin rules encode the GEMM family (matmul,
linear, conv1d/conv2d and friends) plus the non-GEMM groups: normalization,
activation, memory/view ops, elementwise arithmetic, logit computation
(softmax), RoI selection, and interpolation.  Users may overlay their own
rules from a JSON file; overlays are consulted before the builtin list.
"""

from __future__ import annotations

import fnmatch
from dataclasses import dataclass, field
from enum import Enum

from .errors import SchemaError
from .graph_ir import read_json


class OperatorGroup(Enum):
    GEMM = "GEMM"
    Normalization = "Normalization"
    Activation = "Activation"
    Memory = "Memory"
    ElemwiseArithmetic = "ElemwiseArithmetic"
    LogitComputation = "LogitComputation"
    RoiSelection = "RoiSelection"
    Interpolation = "Interpolation"
    Uncategorized = "Uncategorized"


GROUP_ORDER = list(OperatorGroup)
NON_GEMM_GROUPS = [g for g in GROUP_ORDER if g is not OperatorGroup.GEMM]


def is_gemm(group: OperatorGroup) -> bool:
    """True iff the group is GEMM; everything else counts as non-GEMM."""
    return group is OperatorGroup.GEMM


def normalize_name(op_name: str) -> str:
    """Strip namespace prefixes ("torch.nn...GELU", "aten::view") and case."""
    tail = op_name.rsplit(".", 1)[-1]
    tail = tail.rsplit("::", 1)[-1]
    return tail.strip().lower()


@dataclass
class RuleSet:
    """Ordered (pattern, group) rules; patterns are exact or fnmatch globs."""

    rules: list[tuple[str, OperatorGroup]] = field(default_factory=list)
    source: str = "builtin"

    def __post_init__(self):
        seen = set()
        for pattern, _ in self.rules:
            if pattern in seen:
                raise SchemaError(f"rules ({self.source}): duplicate pattern {pattern!r}")
            seen.add(pattern)

    def match(self, normalized: str) -> OperatorGroup | None:
        for pattern, group in self.rules:
            if pattern == normalized:
                return group
            if any(c in pattern for c in "*?[") and fnmatch.fnmatchcase(normalized, pattern):
                return group
        return None


def _r(group: OperatorGroup, *patterns: str) -> list[tuple[str, OperatorGroup]]:
    return [(p, group) for p in patterns]


# Exact names first, broad globs last: "frozenbatchnorm2d" must win
# before the trailing "*norm*" catch-all.
_BUILTIN_RULES: list[tuple[str, OperatorGroup]] = (
    _r(OperatorGroup.RoiSelection, "nms", "batched_nms", "roi_align", "roi_pool", "roi_*")
    + _r(OperatorGroup.Interpolation, "interpolate", "upsample*", "*interpolat*")
    + _r(
        OperatorGroup.Normalization,
        "frozenbatchnorm2d",
        "batchnorm1d",
        "batchnorm2d",
        "batchnorm3d",
        "batch_norm",
        "layernorm",
        "layer_norm",
        "native_layer_norm",
        "rmsnorm",
        "rms_norm",
        "llamarmsnorm",
    )
    + _r(
        OperatorGroup.GEMM,
        "linear",
        "matmul",
        "bmm",
        "mm",
        "addmm",
        "baddbmm",
        "conv1d",
        "conv2d",
        "convolution",
    )
    + _r(OperatorGroup.Activation, "relu", "relu_", "relu6", "*gelu*", "*silu*")
    + _r(OperatorGroup.LogitComputation, "softmax", "*softmax*")
    + _r(
        OperatorGroup.Memory,
        "view",
        "reshape",
        "permute",
        "contiguous",
        "split",
        "split_with_sizes",
        "expand",
        "expand_as",
        "squeeze",
        "unsqueeze",
        "cat",
        "concat",
        "transpose",
        "t",
        "flatten",
        "chunk",
        "getitem",
        "index",
        "slice",
    )
    + _r(
        OperatorGroup.ElemwiseArithmetic,
        "add",
        "add_",
        "sub",
        "rsub",
        "mul",
        "div",
        "true_divide",
        "truediv",
        "neg",
        "pow",
        "sqrt",
        "rsqrt",
    )
    + _r(OperatorGroup.Normalization, "*norm*")
)


def default_rules() -> RuleSet:
    """The builtin rule set covering the full operator catalogue."""
    return RuleSet(rules=list(_BUILTIN_RULES), source="builtin")


def load_rules(path, overlay_builtin: bool = True) -> RuleSet:
    """Load a JSON rules file: [{"pattern": str, "group": str}, ...].

    File rules are consulted before the builtin list unless
    overlay_builtin is False.
    """
    obj = read_json(path)
    if not isinstance(obj, list):
        raise SchemaError(f"{path}: rules file must be a JSON list")
    rules: list[tuple[str, OperatorGroup]] = []
    for i, entry in enumerate(obj):
        if not isinstance(entry, dict) or set(entry) != {"pattern", "group"}:
            raise SchemaError(f"{path}: rules[{i}] must be {{pattern, group}}")
        try:
            group = OperatorGroup(entry["group"])
        except ValueError:
            raise SchemaError(f"{path}: rules[{i}]: unknown group {entry['group']!r}") from None
        rules.append((entry["pattern"].lower(), group))
    if overlay_builtin:
        have = {p for p, _ in rules}
        rules += [(p, g) for p, g in _BUILTIN_RULES if p not in have]
    return RuleSet(rules=rules, source=str(path))


def classify(op_name: str, rules: RuleSet | None = None) -> OperatorGroup:
    """Map an operator name to its group; unmatched names are Uncategorized."""
    if rules is None:
        rules = default_rules()
    group = rules.match(normalize_name(op_name))
    return group if group is not None else OperatorGroup.Uncategorized

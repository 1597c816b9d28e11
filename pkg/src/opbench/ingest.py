"""Parsing externally produced trace files into the normalized form.

Two wire formats are accepted: the native "opbench-trace/1" JSON written
by the profiler (and by other tools that target it), and the Chrome trace
event format that mainstream framework profilers can export.  Both land
in the same in-memory ProfileRun shape, so reporting does not care where
a trace came from.
"""

from __future__ import annotations

from pathlib import Path

from .errors import AttributionError, SchemaError, ValidationError, VersionError
from .graph_ir import read_json
from .profiler import DEVICES, TRACE_VERSION, ProfileRun, ProfileSample
from .taxonomy import OperatorGroup, RuleSet, classify

NormalizedTrace = ProfileRun

_SAMPLE_REQUIRED = ("node_id", "op_name", "device", "wall_time_us", "flops", "input_shapes")
_SAMPLE_OPTIONAL = ("group", "attrs", "children")
_RUN_REQUIRED = ("version", "model_name", "batch_size", "repeats", "samples", "total_wall_time_us")
_RUN_OPTIONAL = ("clock_resolution_ns", "expected")

# Child kernel events may exceed their parent only by clock slop.
CHILD_SUM_TOLERANCE = 1.01
# Per-node bookkeeping lands in the total, never the other way around.
TOTAL_SUM_TOLERANCE = 1.05


def _require_number(obj, field: str, where: str, minimum=None):
    value = obj.get(field)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"{where}: field {field!r} must be a number, got {value!r}")
    if minimum is not None and value < minimum:
        raise ValidationError(f"{where}: field {field!r} must be >= {minimum}, got {value!r}")
    return value


def _parse_shapes(raw, where: str) -> list[list[int]]:
    if not isinstance(raw, list):
        raise SchemaError(f"{where}: input_shapes must be a list of dims lists")
    shapes = []
    for dims in raw:
        if not isinstance(dims, list) or any(isinstance(d, bool) or not isinstance(d, int) or d < 0 for d in dims):
            raise SchemaError(f"{where}: bad dims entry {dims!r} in input_shapes")
        shapes.append(list(dims))
    return shapes


def _parse_children(raw, where: str, parent_time: float) -> list[dict]:
    if not isinstance(raw, list):
        raise SchemaError(f"{where}: children must be a list")
    children = []
    total = 0.0
    for entry in raw:
        if not isinstance(entry, dict) or set(entry) != {"kernel_name", "wall_time_us"}:
            raise SchemaError(f"{where}: child events need exactly kernel_name and wall_time_us")
        if not isinstance(entry["kernel_name"], str):
            raise SchemaError(f"{where}: child kernel_name must be a string")
        t = entry["wall_time_us"]
        if isinstance(t, bool) or not isinstance(t, (int, float)) or t < 0:
            raise SchemaError(f"{where}: child wall_time_us must be a non-negative number")
        total += t
        children.append(dict(entry))
    if total > parent_time * CHILD_SUM_TOLERANCE:
        raise ValidationError(
            f"{where}: child kernel times sum to {total} us, exceeding parent {parent_time} us by more than 1%"
        )
    return children


def _parse_sample(obj, index: int, rules: RuleSet | None) -> ProfileSample:
    where = f"samples[{index}]"
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: expected an object")
    unknown = set(obj) - set(_SAMPLE_REQUIRED) - set(_SAMPLE_OPTIONAL)
    if unknown:
        raise SchemaError(f"{where}: unknown fields {sorted(unknown)}")
    missing = [f for f in _SAMPLE_REQUIRED if f not in obj]
    if missing:
        raise SchemaError(f"{where}: missing fields {missing}")
    if not isinstance(obj["node_id"], str) or not isinstance(obj["op_name"], str):
        raise SchemaError(f"{where}: node_id and op_name must be strings")
    where = f"samples[{index}] ({obj['node_id']})"
    if obj["device"] not in DEVICES:
        raise ValidationError(f"{where}: device must be one of {list(DEVICES)}, got {obj['device']!r}")
    wall = _require_number(obj, "wall_time_us", where, minimum=0)
    flops = obj["flops"]
    if isinstance(flops, bool) or not isinstance(flops, int) or flops < 0:
        raise SchemaError(f"{where}: flops must be a non-negative integer")
    shapes = _parse_shapes(obj["input_shapes"], where)

    if "group" in obj:
        try:
            group = OperatorGroup(obj["group"])
        except ValueError:
            raise ValidationError(f"{where}: unknown group {obj['group']!r}") from None
    else:
        group = classify(obj["op_name"], rules)

    attrs = obj.get("attrs", {})
    if not isinstance(attrs, dict):
        raise SchemaError(f"{where}: attrs must be an object")
    children = _parse_children(obj.get("children", []), where, wall)
    return ProfileSample(
        node_id=obj["node_id"],
        op_name=obj["op_name"],
        group=group,
        wall_time_us=wall,
        flops=flops,
        input_shapes=shapes,
        device=obj["device"],
        attrs=dict(attrs),
        children=children,
    )


def parse_trace(path, rules: RuleSet | None = None) -> NormalizedTrace:
    """Load an "opbench-trace/1" file, classifying samples without a group.

    Sample order in the file is preserved; no event is dropped, including
    Uncategorized ones.
    """
    obj = read_json(path)
    if not isinstance(obj, dict):
        raise SchemaError(f"{path}: trace file must contain a JSON object")
    version = obj.get("version")
    if version is None:
        raise SchemaError(f"{path}: missing version field")
    if version != TRACE_VERSION:
        raise VersionError(f"{path}: unsupported trace version {version!r}, expected {TRACE_VERSION!r}")
    unknown = set(obj) - set(_RUN_REQUIRED) - set(_RUN_OPTIONAL)
    if unknown:
        raise SchemaError(f"{path}: unknown fields {sorted(unknown)}")
    missing = [f for f in _RUN_REQUIRED if f not in obj]
    if missing:
        raise SchemaError(f"{path}: missing fields {missing}")
    if not isinstance(obj["model_name"], str):
        raise SchemaError(f"{path}: model_name must be a string")
    for field in ("batch_size", "repeats"):
        v = obj[field]
        if isinstance(v, bool) or not isinstance(v, int) or v < 0:
            raise SchemaError(f"{path}: {field} must be a non-negative integer")
    total = _require_number(obj, "total_wall_time_us", str(path), minimum=0)
    if not isinstance(obj["samples"], list):
        raise SchemaError(f"{path}: samples must be a list")

    samples = [_parse_sample(s, i, rules) for i, s in enumerate(obj["samples"])]
    seen_ids = set()
    for s in samples:
        if s.node_id in seen_ids:
            raise ValidationError(f"{path}: duplicate sample node_id {s.node_id!r}")
        seen_ids.add(s.node_id)
    sample_sum = sum(s.wall_time_us for s in samples)
    if sample_sum > total * TOTAL_SUM_TOLERANCE:
        raise ValidationError(
            f"{path}: sample times sum to {sample_sum} us, exceeding total {total} us by more than 5%"
        )

    clock = obj.get("clock_resolution_ns")
    if clock is not None and (isinstance(clock, bool) or not isinstance(clock, int) or clock < 0):
        raise SchemaError(f"{path}: clock_resolution_ns must be a non-negative integer")
    expected = obj.get("expected")
    if expected is not None and not isinstance(expected, dict):
        raise SchemaError(f"{path}: expected block must be an object")
    return ProfileRun(
        model_name=obj["model_name"],
        batch_size=obj["batch_size"],
        repeats=obj["repeats"],
        samples=samples,
        total_wall_time_us=total,
        clock_resolution_ns=clock,
        expected=expected,
    )


class _Event:
    __slots__ = ("name", "ts", "dur", "seq", "args", "parent", "children")

    def __init__(self, name, ts, dur, seq, args):
        self.name = name
        self.ts = ts
        self.dur = dur
        self.seq = seq
        self.args = args
        self.parent = None
        self.children = []

    @property
    def end(self):
        return self.ts + self.dur


def _event_shapes(args) -> list[list[int]]:
    dims = args.get("input_dims") if isinstance(args, dict) else None
    if not isinstance(dims, list):
        return []
    shapes = []
    for entry in dims:
        if not isinstance(entry, list) or any(isinstance(d, bool) or not isinstance(d, int) or d < 0 for d in entry):
            return []
        shapes.append(list(entry))
    return shapes


def convert_chrome_trace(path, mapping: RuleSet | None = None, model_name: str | None = None) -> NormalizedTrace:
    """Convert Chrome-trace-event JSON into a normalized trace.

    Only complete ("X") events are considered.  Within one (pid, tid)
    lane, ts/dur interval containment builds a parent/child forest; the
    top-level events become samples and their direct children become
    kernel child events.  Events that overlap a lane neighbor without
    being nested inside it are a hard error, since the time cannot be
    attributed to either side.
    """
    obj = read_json(path)
    if isinstance(obj, list):
        raw_events = obj
    elif isinstance(obj, dict) and isinstance(obj.get("traceEvents"), list):
        raw_events = obj["traceEvents"]
    else:
        raise SchemaError(f"{path}: expected a JSON event array or an object with traceEvents")

    lanes: dict[tuple, list[_Event]] = {}
    seq = 0
    for entry in raw_events:
        if not isinstance(entry, dict) or entry.get("ph") != "X":
            continue
        name = entry.get("name")
        ts = entry.get("ts")
        dur = entry.get("dur", 0)
        if not isinstance(name, str):
            raise SchemaError(f"{path}: X event #{seq} has no name")
        if isinstance(ts, bool) or not isinstance(ts, (int, float)):
            raise SchemaError(f"{path}: X event {name!r} has no numeric ts")
        if isinstance(dur, bool) or not isinstance(dur, (int, float)) or dur < 0:
            raise SchemaError(f"{path}: X event {name!r} has invalid dur {dur!r}")
        lane = (entry.get("pid", 0), entry.get("tid", 0))
        lanes.setdefault(lane, []).append(_Event(name, ts, dur, seq, entry.get("args", {})))
        seq += 1

    roots: list[_Event] = []
    for lane_events in lanes.values():
        lane_events.sort(key=lambda e: (e.ts, -e.dur, e.seq))
        stack: list[_Event] = []
        for ev in lane_events:
            while stack and ev.ts >= stack[-1].end:
                stack.pop()
            if stack:
                parent = stack[-1]
                if ev.end > parent.end:
                    raise AttributionError(
                        f"{path}: event {ev.name!r} [ts={ev.ts}, dur={ev.dur}] overlaps "
                        f"{parent.name!r} [ts={parent.ts}, dur={parent.dur}] without nesting"
                    )
                ev.parent = parent
                parent.children.append(ev)
            else:
                roots.append(ev)
            stack.append(ev)

    roots.sort(key=lambda e: (e.ts, e.seq))
    samples = []
    for i, ev in enumerate(roots):
        children = sorted(ev.children, key=lambda c: (c.ts, c.seq))
        samples.append(ProfileSample(
            node_id=f"ev{i:04d}",
            op_name=ev.name,
            group=classify(ev.name, mapping),
            wall_time_us=ev.dur,
            flops=0,
            input_shapes=_event_shapes(ev.args),
            device="device_external",
            attrs={},
            children=[{"kernel_name": c.name, "wall_time_us": c.dur} for c in children],
        ))

    name = model_name
    if name is None and isinstance(obj, dict):
        other = obj.get("otherData")
        if isinstance(other, dict) and isinstance(other.get("model_name"), str):
            name = other["model_name"]
    if name is None:
        name = Path(path).stem
    return ProfileRun(
        model_name=name,
        batch_size=0,
        repeats=1,
        samples=samples,
        total_wall_time_us=sum(s.wall_time_us for s in samples),
        clock_resolution_ns=None,
        expected=None,
    )

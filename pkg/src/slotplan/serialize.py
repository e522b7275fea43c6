"""Versioned JSON documents for problems, schedules, weights, and edits.

One canonical byte form per document: keys sorted, two-space indent, a
trailing newline, UTF-8.  Serializing a parsed canonical document reproduces
it byte for byte, and the problem hash embedded in schedule documents is the
SHA-256 of exactly those canonical problem bytes.  Parsing is strict: any
field this module does not know is rejected, and every diagnostic carries the
JSON path of the offending element.

Normalization: an all-neutral slot preference and an empty location-penalty
table both serialize to nothing and load back as ``None``.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any, Mapping

from .generator import GenParams
from .model import (
    Activity,
    DepKind,
    Dependency,
    GroupMode,
    Location,
    Mark,
    ModelError,
    Problem,
    Resource,
    ResourceGroup,
    Schedule,
    TimeGrid,
    TimePreference,
)
from .feasibility import Violation, check_schedule
from .session import (
    AddActivity,
    AddDependency,
    Detach,
    Edit,
    PlaceAndFix,
    RemoveActivity,
    RemoveDependency,
    SetDuration,
    SetSlotMark,
    SetWeights,
    Unfix,
)
from .solver import HeuristicWeights, LocationRule, Strategy

PROBLEM_FORMAT = "slotplan-problem"
SCHEDULE_FORMAT = "slotplan-schedule"
WEIGHTS_FORMAT = "slotplan-weights"
GENPARAMS_FORMAT = "slotplan-genparams"
VERSION = 1


class FormatError(ValueError):
    """Malformed or unacceptable document; `path` locates the offender."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class StaleScheduleError(FormatError):
    """Schedule document was saved against a different problem."""


class UnsoundScheduleError(ValueError):
    """Parsed schedule breaks hard constraints; carries the evidence."""

    def __init__(self, schedule: Schedule, violations: list[Violation]):
        self.schedule = schedule
        self.violations = violations
        first = violations[0].detail if violations else ""
        super().__init__(
            f"schedule document is unsound ({len(violations)} violation(s)); first: {first}"
        )


def canonical_bytes(doc: dict) -> bytes:
    return (json.dumps(doc, ensure_ascii=False, indent=2, sort_keys=True) + "\n").encode()


# ---------------------------------------------------------------------------
# strict readers

def _decode(data: bytes | str) -> Any:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as e:
            raise FormatError("$", f"not valid UTF-8: {e}") from None
    try:
        return json.loads(data)
    except json.JSONDecodeError as e:
        raise FormatError("$", f"invalid document: {e.msg} at line {e.lineno} column {e.colno}") from None


def _obj(value: Any, path: str, fields: Mapping[str, bool]) -> dict:
    """`fields` maps allowed keys to whether they are required."""
    if not isinstance(value, dict):
        raise FormatError(path, f"expected an object, got {type(value).__name__}")
    for key in value:
        if key not in fields:
            raise FormatError(f"{path}.{key}", "unknown field")
    for key, required in fields.items():
        if required and key not in value:
            raise FormatError(path, f"missing required field {key!r}")
    return value


def _list(value: Any, path: str) -> list:
    if not isinstance(value, list):
        raise FormatError(path, f"expected an array, got {type(value).__name__}")
    return value


def _str(value: Any, path: str) -> str:
    if not isinstance(value, str):
        raise FormatError(path, f"expected a string, got {type(value).__name__}")
    return value


def _int(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise FormatError(path, f"expected an integer, got {type(value).__name__}")
    return value


def _num(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise FormatError(path, f"expected a number, got {type(value).__name__}")
    return float(value)


def _bool(value: Any, path: str) -> bool:
    if not isinstance(value, bool):
        raise FormatError(path, f"expected a boolean, got {type(value).__name__}")
    return value


def _slots(value: Any, path: str, total: int) -> list[int]:
    out = []
    for i, v in enumerate(_list(value, path)):
        s = _int(v, f"{path}[{i}]")
        if not 0 <= s < total:
            raise FormatError(f"{path}[{i}]", f"slot {s} outside grid of {total} slots")
        out.append(s)
    return out


def _id_list(value: Any, path: str) -> list[str]:
    return [_str(v, f"{path}[{i}]") for i, v in enumerate(_list(value, path))]


def _enum(value: Any, path: str, enum_cls) -> Any:
    name = _str(value, path)
    try:
        return enum_cls(name)
    except ValueError:
        options = ", ".join(e.value for e in enum_cls)
        raise FormatError(path, f"expected one of {options}, got {name!r}") from None


def _header(doc: Any, expected_format: str) -> dict:
    if not isinstance(doc, dict):
        raise FormatError("$", f"expected an object, got {type(doc).__name__}")
    got = doc.get("format")
    if got != expected_format:
        raise FormatError("$.format", f"expected {expected_format!r}, got {got!r}")
    version = doc.get("version")
    if version != VERSION:
        raise FormatError("$.version", f"unsupported version {version!r}, expected {VERSION}")
    return doc


# ---------------------------------------------------------------------------
# problems

def _marks_out(entry: dict, prefs: TimePreference | None) -> None:
    if prefs is None:
        return
    if prefs.hard_slots:
        entry["hard"] = sorted(prefs.hard_slots)
    if prefs.soft_slots:
        entry["soft"] = sorted(prefs.soft_slots)


def _marks_in(obj: dict, path: str, total: int) -> TimePreference | None:
    hard = _slots(obj["hard"], f"{path}.hard", total) if "hard" in obj else []
    soft = _slots(obj["soft"], f"{path}.soft", total) if "soft" in obj else []
    if not hard and not soft:
        return None
    return TimePreference.from_sets(total, soft=soft, hard=hard)


def _location_prefs_out(prefs: Mapping[object, float]) -> list[dict]:
    bare = []
    exact = []
    for key, penalty in prefs.items():
        if isinstance(key, tuple):
            start, selection = key
            exact.append({"start": start, "selection": sorted(selection), "penalty": float(penalty)})
        else:
            bare.append({"start": key, "penalty": float(penalty)})
    bare.sort(key=lambda e: e["start"])
    exact.sort(key=lambda e: (e["start"], e["selection"]))
    return bare + exact


def _location_prefs_in(value: Any, path: str) -> dict:
    out: dict = {}
    for i, raw in enumerate(_list(value, path)):
        p = f"{path}[{i}]"
        entry = _obj(raw, p, {"start": True, "selection": False, "penalty": True})
        start = _int(entry["start"], f"{p}.start")
        penalty = _num(entry["penalty"], f"{p}.penalty")
        if "selection" in entry:
            key: object = (start, frozenset(_id_list(entry["selection"], f"{p}.selection")))
        else:
            key = start
        if key in out:
            raise FormatError(p, "duplicate location preference entry")
        out[key] = penalty
    return out


def problem_to_doc(problem: Problem) -> dict:
    resources = []
    for r in problem.resources:
        entry: dict = {"id": r.id}
        if r.name:
            entry["name"] = r.name
        if r.kind:
            entry["kind"] = r.kind
        _marks_out(entry, r.prefs)
        resources.append(entry)
    activities = []
    for a in problem.activities:
        entry = {"id": a.id, "duration": a.duration}
        if a.name:
            entry["name"] = a.name
        entry["groups"] = [
            {"mode": g.mode.value, "members": list(g.members)} for g in a.groups
        ]
        _marks_out(entry, a.prefs)
        if a.location_prefs:
            entry["location_prefs"] = _location_prefs_out(a.location_prefs)
        activities.append(entry)
    return {
        "format": PROBLEM_FORMAT,
        "version": VERSION,
        "grid": {"days": problem.grid.days, "slots_per_day": problem.grid.slots_per_day},
        "resources": resources,
        "activities": activities,
        "dependencies": [
            {"kind": d.kind.value, "first": d.first, "second": d.second}
            for d in problem.dependencies
        ],
    }


def problem_from_doc(doc: Any) -> Problem:
    doc = _header(doc, PROBLEM_FORMAT)
    _obj(doc, "$", {
        "format": True, "version": True, "grid": True,
        "resources": True, "activities": True, "dependencies": True,
    })
    g = _obj(doc["grid"], "$.grid", {"days": True, "slots_per_day": True})
    try:
        grid = TimeGrid(_int(g["days"], "$.grid.days"), _int(g["slots_per_day"], "$.grid.slots_per_day"))
    except ModelError as e:
        raise FormatError("$.grid", str(e)) from None
    total = grid.total_slots

    resources = []
    for i, raw in enumerate(_list(doc["resources"], "$.resources")):
        p = f"$.resources[{i}]"
        entry = _obj(raw, p, {"id": True, "name": False, "kind": False, "hard": False, "soft": False})
        resources.append(
            Resource(
                id=_str(entry["id"], f"{p}.id"),
                name=_str(entry.get("name", ""), f"{p}.name"),
                kind=_str(entry.get("kind", ""), f"{p}.kind"),
                prefs=_marks_in(entry, p, total),
            )
        )

    activities = []
    for i, raw in enumerate(_list(doc["activities"], "$.activities")):
        p = f"$.activities[{i}]"
        entry = _obj(raw, p, {
            "id": True, "name": False, "duration": True, "groups": True,
            "hard": False, "soft": False, "location_prefs": False,
        })
        groups = []
        for j, raw_g in enumerate(_list(entry["groups"], f"{p}.groups")):
            gp = f"{p}.groups[{j}]"
            g_entry = _obj(raw_g, gp, {"mode": True, "members": True})
            try:
                groups.append(
                    ResourceGroup(
                        _enum(g_entry["mode"], f"{gp}.mode", GroupMode),
                        tuple(_id_list(g_entry["members"], f"{gp}.members")),
                    )
                )
            except ModelError as e:
                raise FormatError(gp, str(e)) from None
        prefs = _marks_in(entry, p, total)
        loc_prefs = (
            _location_prefs_in(entry["location_prefs"], f"{p}.location_prefs")
            if "location_prefs" in entry
            else None
        )
        try:
            activities.append(
                Activity(
                    id=_str(entry["id"], f"{p}.id"),
                    duration=_int(entry["duration"], f"{p}.duration"),
                    groups=tuple(groups),
                    name=_str(entry.get("name", ""), f"{p}.name"),
                    prefs=prefs,
                    location_prefs=loc_prefs or None,
                )
            )
        except ModelError as e:
            raise FormatError(p, str(e)) from None

    dependencies = []
    for i, raw in enumerate(_list(doc["dependencies"], "$.dependencies")):
        p = f"$.dependencies[{i}]"
        entry = _obj(raw, p, {"kind": True, "first": True, "second": True})
        try:
            dependencies.append(
                Dependency(
                    _enum(entry["kind"], f"{p}.kind", DepKind),
                    _str(entry["first"], f"{p}.first"),
                    _str(entry["second"], f"{p}.second"),
                )
            )
        except ModelError as e:
            raise FormatError(p, str(e)) from None

    try:
        return Problem(
            grid=grid,
            resources=tuple(resources),
            activities=tuple(activities),
            dependencies=tuple(dependencies),
        )
    except ModelError as e:
        raise FormatError("$", str(e)) from None


def save_problem(problem: Problem) -> bytes:
    return canonical_bytes(problem_to_doc(problem))


def load_problem(data: bytes | str) -> Problem:
    return problem_from_doc(_decode(data))


def problem_hash(problem: Problem) -> str:
    return hashlib.sha256(save_problem(problem)).hexdigest()


# ---------------------------------------------------------------------------
# schedules

def schedule_to_doc(problem: Problem, schedule: Schedule) -> dict:
    return {
        "format": SCHEDULE_FORMAT,
        "version": VERSION,
        "problem_hash": problem_hash(problem),
        "assignment": [
            {
                "activity": a_id,
                "start": loc.start,
                "selection": sorted(loc.selection),
            }
            for a_id, loc in sorted(schedule.assignment.items())
        ],
        "fixed": sorted(schedule.fixed),
    }


def schedule_from_doc(doc: Any, problem: Problem, *, allow_unsound: bool = False) -> Schedule:
    doc = _header(doc, SCHEDULE_FORMAT)
    _obj(doc, "$", {
        "format": True, "version": True, "problem_hash": True,
        "assignment": True, "fixed": True,
    })
    embedded = _str(doc["problem_hash"], "$.problem_hash")
    actual = problem_hash(problem)
    if embedded != actual:
        raise StaleScheduleError(
            "$.problem_hash",
            f"schedule was saved for a different problem ({embedded[:12]}… != {actual[:12]}…)",
        )
    assignment: dict[str, Location] = {}
    for i, raw in enumerate(_list(doc["assignment"], "$.assignment")):
        p = f"$.assignment[{i}]"
        entry = _obj(raw, p, {"activity": True, "start": True, "selection": True})
        a_id = _str(entry["activity"], f"{p}.activity")
        if a_id in assignment:
            raise FormatError(p, f"activity {a_id!r} assigned twice")
        if a_id not in problem.activity_by_id:
            raise FormatError(f"{p}.activity", f"unknown activity {a_id!r}")
        selection = frozenset(_id_list(entry["selection"], f"{p}.selection"))
        assignment[a_id] = Location(_int(entry["start"], f"{p}.start"), selection)
    fixed = set()
    for i, raw in enumerate(_list(doc["fixed"], "$.fixed")):
        p = f"$.fixed[{i}]"
        f_id = _str(raw, p)
        if f_id not in problem.activity_by_id:
            raise FormatError(p, f"unknown activity {f_id!r}")
        fixed.add(f_id)
    schedule = Schedule(assignment=assignment, fixed=fixed)
    if not allow_unsound:
        violations = check_schedule(problem, schedule)
        if violations:
            raise UnsoundScheduleError(schedule, violations)
    return schedule


def save_schedule(problem: Problem, schedule: Schedule) -> bytes:
    return canonical_bytes(schedule_to_doc(problem, schedule))


def load_schedule(data: bytes | str, problem: Problem, *, allow_unsound: bool = False) -> Schedule:
    return schedule_from_doc(_decode(data), problem, allow_unsound=allow_unsound)


# ---------------------------------------------------------------------------
# weights

_WEIGHT_FIELDS = (
    "w_removed", "w_deps", "w_places", "w_places_free",
    "w_conflicts", "w_repeat_evict", "w_conflict_no_resched", "w_soft",
    "w_dist_prev", "w_user_pref", "sample_probability", "location_group_factor",
)
_COUNT_FIELDS = ("tabu_length", "max_iterations", "location_best_count", "resched_scan_limit")


def weights_to_doc(weights: HeuristicWeights) -> dict:
    doc: dict = {"format": WEIGHTS_FORMAT, "version": VERSION}
    for name in _WEIGHT_FIELDS:
        doc[name] = float(getattr(weights, name))
    for name in _COUNT_FIELDS:
        doc[name] = int(getattr(weights, name))
    doc["strategy"] = weights.strategy.value
    doc["location_rule"] = weights.location_rule.value
    return doc


def weights_from_doc(doc: Any) -> HeuristicWeights:
    doc = _header(doc, WEIGHTS_FORMAT)
    allowed = {"format": True, "version": True}
    allowed.update({name: False for name in _WEIGHT_FIELDS + _COUNT_FIELDS})
    allowed.update({"strategy": False, "location_rule": False})
    _obj(doc, "$", allowed)
    kwargs: dict = {}
    for name in _WEIGHT_FIELDS:
        if name in doc:
            kwargs[name] = _num(doc[name], f"$.{name}")
    for name in _COUNT_FIELDS:
        if name in doc:
            kwargs[name] = _int(doc[name], f"$.{name}")
    if "strategy" in doc:
        kwargs["strategy"] = _enum(doc["strategy"], "$.strategy", Strategy)
    if "location_rule" in doc:
        kwargs["location_rule"] = _enum(doc["location_rule"], "$.location_rule", LocationRule)
    try:
        return HeuristicWeights(**kwargs)
    except ModelError as e:
        raise FormatError("$", str(e)) from None


def save_weights(weights: HeuristicWeights) -> bytes:
    return canonical_bytes(weights_to_doc(weights))


def load_weights(data: bytes | str) -> HeuristicWeights:
    return weights_from_doc(_decode(data))


# ---------------------------------------------------------------------------
# generator parameters

_GEN_INT_FIELDS = ("n_teachers", "n_classes", "n_rooms", "days", "slots_per_day", "seed")
_GEN_NUM_FIELDS = ("fill_percent", "dependency_density", "soft_density")


def genparams_to_doc(params: GenParams) -> dict:
    doc: dict = {"format": GENPARAMS_FORMAT, "version": VERSION}
    for name in _GEN_INT_FIELDS:
        doc[name] = int(getattr(params, name))
    for name in _GEN_NUM_FIELDS:
        doc[name] = float(getattr(params, name))
    doc["durations"] = list(params.durations)
    return doc


def genparams_from_doc(doc: Any) -> GenParams:
    doc = _header(doc, GENPARAMS_FORMAT)
    allowed = {"format": True, "version": True, "durations": False}
    allowed.update({name: False for name in _GEN_INT_FIELDS + _GEN_NUM_FIELDS})
    _obj(doc, "$", allowed)
    kwargs: dict = {}
    for name in _GEN_INT_FIELDS:
        if name in doc:
            kwargs[name] = _int(doc[name], f"$.{name}")
    for name in _GEN_NUM_FIELDS:
        if name in doc:
            kwargs[name] = _num(doc[name], f"$.{name}")
    if "durations" in doc:
        pair = _list(doc["durations"], "$.durations")
        if len(pair) != 2:
            raise FormatError("$.durations", f"expected [lo, hi], got {len(pair)} element(s)")
        kwargs["durations"] = (_int(pair[0], "$.durations[0]"), _int(pair[1], "$.durations[1]"))
    try:
        return GenParams(**kwargs)
    except ModelError as e:
        raise FormatError("$", str(e)) from None


def save_genparams(params: GenParams) -> bytes:
    return canonical_bytes(genparams_to_doc(params))


def load_genparams(data: bytes | str) -> GenParams:
    return genparams_from_doc(_decode(data))


# ---------------------------------------------------------------------------
# edits

_MARK_NAMES = {Mark.NEUTRAL: "neutral", Mark.SOFT: "soft", Mark.HARD: "hard"}
_MARKS_BY_NAME = {v: k for k, v in _MARK_NAMES.items()}


def _location_to_doc(loc: Location) -> dict:
    return {"start": loc.start, "selection": sorted(loc.selection)}


def _location_from_doc(value: Any, path: str) -> Location:
    entry = _obj(value, path, {"start": True, "selection": True})
    return Location(
        _int(entry["start"], f"{path}.start"),
        frozenset(_id_list(entry["selection"], f"{path}.selection")),
    )


def _dependency_to_doc(dep: Dependency) -> dict:
    return {"kind": dep.kind.value, "first": dep.first, "second": dep.second}


def _dependency_from_doc(value: Any, path: str) -> Dependency:
    entry = _obj(value, path, {"kind": True, "first": True, "second": True})
    try:
        return Dependency(
            _enum(entry["kind"], f"{path}.kind", DepKind),
            _str(entry["first"], f"{path}.first"),
            _str(entry["second"], f"{path}.second"),
        )
    except ModelError as e:
        raise FormatError(path, str(e)) from None


def _activity_to_doc(activity: Activity) -> dict:
    entry: dict = {"id": activity.id, "duration": activity.duration}
    if activity.name:
        entry["name"] = activity.name
    entry["groups"] = [
        {"mode": g.mode.value, "members": list(g.members)} for g in activity.groups
    ]
    _marks_out(entry, activity.prefs)
    if activity.location_prefs:
        entry["location_prefs"] = _location_prefs_out(activity.location_prefs)
    return entry


def _activity_from_doc(value: Any, path: str, total: int) -> Activity:
    entry = _obj(value, path, {
        "id": True, "name": False, "duration": True, "groups": True,
        "hard": False, "soft": False, "location_prefs": False,
    })
    groups = []
    for j, raw_g in enumerate(_list(entry["groups"], f"{path}.groups")):
        gp = f"{path}.groups[{j}]"
        g_entry = _obj(raw_g, gp, {"mode": True, "members": True})
        try:
            groups.append(
                ResourceGroup(
                    _enum(g_entry["mode"], f"{gp}.mode", GroupMode),
                    tuple(_id_list(g_entry["members"], f"{gp}.members")),
                )
            )
        except ModelError as e:
            raise FormatError(gp, str(e)) from None
    loc_prefs = (
        _location_prefs_in(entry["location_prefs"], f"{path}.location_prefs")
        if "location_prefs" in entry
        else None
    )
    try:
        return Activity(
            id=_str(entry["id"], f"{path}.id"),
            duration=_int(entry["duration"], f"{path}.duration"),
            groups=tuple(groups),
            name=_str(entry.get("name", ""), f"{path}.name"),
            prefs=_marks_in(entry, path, total),
            location_prefs=loc_prefs or None,
        )
    except ModelError as e:
        raise FormatError(path, str(e)) from None


def edit_to_doc(edit: Edit) -> dict:
    if isinstance(edit, PlaceAndFix):
        return {"kind": edit.kind, "activity": edit.activity, "location": _location_to_doc(edit.location)}
    if isinstance(edit, (Unfix, Detach, RemoveActivity)):
        return {"kind": edit.kind, "activity": edit.activity}
    if isinstance(edit, SetDuration):
        return {"kind": edit.kind, "activity": edit.activity, "duration": edit.duration}
    if isinstance(edit, (AddDependency, RemoveDependency)):
        return {"kind": edit.kind, "dependency": _dependency_to_doc(edit.dependency)}
    if isinstance(edit, SetSlotMark):
        return {"kind": edit.kind, "entity": edit.entity, "slot": edit.slot, "mark": _MARK_NAMES[edit.mark]}
    if isinstance(edit, AddActivity):
        return {"kind": edit.kind, "activity": _activity_to_doc(edit.activity)}
    if isinstance(edit, SetWeights):
        return {"kind": edit.kind, "weights": weights_to_doc(edit.weights)}
    raise FormatError("$", f"unsupported edit {type(edit).__name__}")


def edit_from_doc(doc: Any, total_slots: int) -> Edit:
    if not isinstance(doc, dict):
        raise FormatError("$", f"expected an object, got {type(doc).__name__}")
    kind = doc.get("kind")
    if kind == PlaceAndFix.kind:
        entry = _obj(doc, "$", {"kind": True, "activity": True, "location": True})
        return PlaceAndFix(
            _str(entry["activity"], "$.activity"),
            _location_from_doc(entry["location"], "$.location"),
        )
    if kind in (Unfix.kind, Detach.kind, RemoveActivity.kind):
        entry = _obj(doc, "$", {"kind": True, "activity": True})
        cls = {Unfix.kind: Unfix, Detach.kind: Detach, RemoveActivity.kind: RemoveActivity}[kind]
        return cls(_str(entry["activity"], "$.activity"))
    if kind == SetDuration.kind:
        entry = _obj(doc, "$", {"kind": True, "activity": True, "duration": True})
        return SetDuration(_str(entry["activity"], "$.activity"), _int(entry["duration"], "$.duration"))
    if kind in (AddDependency.kind, RemoveDependency.kind):
        entry = _obj(doc, "$", {"kind": True, "dependency": True})
        cls = {AddDependency.kind: AddDependency, RemoveDependency.kind: RemoveDependency}[kind]
        return cls(_dependency_from_doc(entry["dependency"], "$.dependency"))
    if kind == SetSlotMark.kind:
        entry = _obj(doc, "$", {"kind": True, "entity": True, "slot": True, "mark": True})
        mark_name = _str(entry["mark"], "$.mark")
        if mark_name not in _MARKS_BY_NAME:
            raise FormatError("$.mark", f"expected one of neutral, soft, hard, got {mark_name!r}")
        return SetSlotMark(
            _str(entry["entity"], "$.entity"),
            _int(entry["slot"], "$.slot"),
            _MARKS_BY_NAME[mark_name],
        )
    if kind == AddActivity.kind:
        entry = _obj(doc, "$", {"kind": True, "activity": True})
        return AddActivity(_activity_from_doc(entry["activity"], "$.activity", total_slots))
    if kind == SetWeights.kind:
        entry = _obj(doc, "$", {"kind": True, "weights": True})
        return SetWeights(weights_from_doc(entry["weights"]))
    raise FormatError("$.kind", f"unknown edit kind {kind!r}")

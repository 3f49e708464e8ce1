"""Timed execution traces: data model, JSON-lines ingestion, canonical output.

A trace file is UTF-8 text. Line 1 is a schema object mapping field names to
one of "number" | "boolean" | "point2". Every following line is one record
object carrying "t" (seconds) plus exactly the schema fields, in time order.
Point values are two-element [x, y] arrays. All numbers must be finite.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from enum import Enum
from typing import IO, Mapping, Union

from .errors import TraceError


class Kind(Enum):
    """Value kinds carried by trace fields and inferred for expressions."""

    NUMBER = "number"
    BOOLEAN = "boolean"
    POINT2 = "point2"


@dataclass(frozen=True)
class Point2:
    """A Cartesian map coordinate in meters."""

    x: float
    y: float


Value = Union[float, bool, Point2]

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class TraceSchema:
    """Ordered field-name/kind declarations; the time field t is implicit."""

    fields: tuple[tuple[str, Kind], ...]

    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.fields)

    def as_dict(self) -> dict[str, Kind]:
        return dict(self.fields)


@dataclass(frozen=True)
class TraceMessage:
    t: float
    values: Mapping[str, Value]


@dataclass(frozen=True)
class Trace:
    schema: TraceSchema
    messages: tuple[TraceMessage, ...]


def _strict_json_object(line: str, lineno: int, what: str) -> dict:
    """json.loads restricted to objects, rejecting duplicate keys and NaN/Infinity."""

    def no_duplicates(pairs):
        obj = {}
        for key, value in pairs:
            if key in obj:
                raise TraceError(f"duplicate {what} field '{key}'", line=lineno)
            obj[key] = value
        return obj

    def reject_constant(text):
        raise TraceError(f"non-finite number {text} is not admitted", line=lineno)

    try:
        obj = json.loads(line, object_pairs_hook=no_duplicates, parse_constant=reject_constant)
    except TraceError:
        raise
    except json.JSONDecodeError as exc:
        raise TraceError(f"malformed {what}: {exc.msg}", line=lineno) from exc
    if not isinstance(obj, dict):
        raise TraceError(f"{what} must be a JSON object", line=lineno)
    return obj


def _as_finite_number(value: object, where: str, lineno: int) -> float:
    # bool is an int subclass; it must not pass as a number.
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise TraceError(f"{where} must be a number", line=lineno)
    value = float(value)
    if not math.isfinite(value):
        raise TraceError(f"{where} must be finite", line=lineno)
    return value


def _coerce(kind: Kind, raw: object, where: str, lineno: int) -> Value:
    if kind is Kind.NUMBER:
        return _as_finite_number(raw, where, lineno)
    if kind is Kind.BOOLEAN:
        if not isinstance(raw, bool):
            raise TraceError(f"{where} must be true or false", line=lineno)
        return raw
    if not isinstance(raw, list) or len(raw) != 2:
        raise TraceError(f"{where} must be a two-element [x, y] array", line=lineno)
    x = _as_finite_number(raw[0], f"{where}[0]", lineno)
    y = _as_finite_number(raw[1], f"{where}[1]", lineno)
    return Point2(x, y)


def _parse_schema(line: str, lineno: int) -> TraceSchema:
    obj = _strict_json_object(line, lineno, "schema")
    fields: list[tuple[str, Kind]] = []
    for name, kind_text in obj.items():
        if name == "t":
            raise TraceError("'t' is implicit and cannot be redeclared", line=lineno)
        if not _NAME_RE.match(name):
            raise TraceError(f"invalid field name '{name}'", line=lineno)
        try:
            kind = Kind(kind_text)
        except ValueError:
            raise TraceError(
                f"field '{name}' has unknown kind {kind_text!r} "
                "(expected number, boolean, or point2)",
                line=lineno,
            ) from None
        fields.append((name, kind))
    return TraceSchema(tuple(fields))


def parse_trace(source: Union[str, bytes, IO[str], IO[bytes]]) -> Trace:
    """Parse a trace file, enforcing schema conformance and time monotonicity.

    Diagnostics name the offending (1-based) file line.
    """
    if hasattr(source, "read"):
        source = source.read()  # type: ignore[union-attr]
    if isinstance(source, bytes):
        try:
            source = source.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise TraceError(f"trace file is not valid UTF-8: {exc}") from exc

    schema: TraceSchema | None = None
    messages: list[TraceMessage] = []
    prev_t: float | None = None
    record_no = 0
    for lineno, line in enumerate(source.splitlines(), start=1):
        if not line.strip():
            continue
        if schema is None:
            schema = _parse_schema(line, lineno)
            continue
        record_no += 1
        obj = _strict_json_object(line, lineno, "record")
        if "t" not in obj:
            raise TraceError(f"record {record_no}: missing field 't'", line=lineno)
        t = _as_finite_number(obj["t"], "field 't'", lineno)
        declared = schema.as_dict()
        for name in obj:
            if name != "t" and name not in declared:
                raise TraceError(
                    f"record {record_no}: unexpected field '{name}'", line=lineno
                )
        values: dict[str, Value] = {}
        for name, kind in schema.fields:
            if name not in obj:
                raise TraceError(
                    f"record {record_no}: missing field '{name}'", line=lineno
                )
            values[name] = _coerce(kind, obj[name], f"field '{name}'", lineno)
        if prev_t is not None and t < prev_t:
            raise TraceError(
                f"record {record_no}: decreasing timestamp {t!r} after {prev_t!r}",
                line=lineno,
            )
        prev_t = t
        messages.append(TraceMessage(t=t, values=values))
    if schema is None:
        raise TraceError("empty trace file: missing schema line")
    return Trace(schema=schema, messages=tuple(messages))


def _json_value(value: Value) -> object:
    if isinstance(value, Point2):
        return [value.x, value.y]
    return value


def dump_trace(trace: Trace) -> str:
    """Canonical serialization: schema line, then records with 't' first and
    fields in schema declaration order. parse_trace(dump_trace(tr)) == tr."""
    lines = [json.dumps({name: kind.value for name, kind in trace.schema.fields})]
    for msg in trace.messages:
        obj: dict[str, object] = {"t": msg.t}
        for name, _ in trace.schema.fields:
            obj[name] = _json_value(msg.values[name])
        lines.append(json.dumps(obj))
    return "\n".join(lines) + "\n"


def duration(trace: Trace) -> float:
    """Elapsed seconds between the first and last message (0 if fewer than 2)."""
    if len(trace.messages) < 2:
        return 0.0
    return trace.messages[-1].t - trace.messages[0].t


def concat_traces(first: Trace, second: Trace) -> Trace:
    """Join two traces over the same schema; time must stay non-decreasing."""
    if first.schema.as_dict() != second.schema.as_dict():
        raise TraceError("cannot concatenate traces with different schemas")
    if first.messages and second.messages and second.messages[0].t < first.messages[-1].t:
        raise TraceError("concatenation would make timestamps decrease")
    return Trace(schema=first.schema, messages=first.messages + second.messages)

"""Abstract syntax for oracle definitions plus the canonical pretty-printer.

The printer is precedence-aware and emits the minimal parentheses needed so
that re-parsing its output reproduces the tree structurally.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

from .trace import Point2, Value


class Frequency(Enum):
    """How often a scoring function's action is applied.

    FIRST fires at most once per trace; ACTION_SUM once per firing unit
    (every event-true message, or once per maximal sequence when a condition
    is present); ALL_SUM at every message where event and condition hold.
    """

    FIRST = "first"
    ACTION_SUM = "action_sum"
    ALL_SUM = "all_sum"


@dataclass(frozen=True)
class Literal:
    value: Value


@dataclass(frozen=True)
class Ident:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str  # "-" | "not"
    operand: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str  # + - * / and or < <= > >= == !=
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple["Expr", ...]


Expr = Union[Literal, Ident, Unary, Binary, Call]


@dataclass(frozen=True)
class Notification:
    """On firing, set the named timers of the target scoring function."""

    target: str
    bindings: tuple[tuple[str, Expr], ...]


@dataclass(frozen=True)
class ScoringFunction:
    name: str
    event: Expr
    frequency: Frequency
    condition: Optional[Expr] = None
    action: Optional[Expr] = None  # absent action contributes delta 0
    notifications: tuple[Notification, ...] = ()
    initial: float = 0.0


@dataclass(frozen=True)
class OracleDefinition:
    constants: tuple[tuple[str, Value], ...] = ()
    functions: tuple[ScoringFunction, ...] = ()
    summary: Optional[Expr] = None  # None means: sum of all function scores

    def constant_map(self) -> dict[str, Value]:
        return dict(self.constants)

    def function_names(self) -> tuple[str, ...]:
        return tuple(fn.name for fn in self.functions)


# Binding strength, loosest to tightest: or < and < not < comparison
# < additive < multiplicative < unary minus < call/primary.
_BINARY_PREC = {
    "or": 1,
    "and": 2,
    "<": 4, "<=": 4, ">": 4, ">=": 4, "==": 4, "!=": 4,
    "+": 5, "-": 5,
    "*": 6, "/": 6,
}
_NOT_PREC = 3
_NEG_PREC = 7
_ATOM_PREC = 8


def _prec(expr: Expr) -> int:
    if isinstance(expr, Binary):
        return _BINARY_PREC[expr.op]
    if isinstance(expr, Unary):
        return _NEG_PREC if expr.op == "-" else _NOT_PREC
    return _ATOM_PREC


def format_number(value: float) -> str:
    return repr(float(value))


def format_literal(value: Value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Point2):
        return f"point({format_number(value.x)}, {format_number(value.y)})"
    return format_number(value)


def format_expr(expr: Expr) -> str:
    if isinstance(expr, Literal):
        return format_literal(expr.value)
    if isinstance(expr, Ident):
        return expr.name
    if isinstance(expr, Unary):
        inner = format_expr(expr.operand)
        if expr.op == "not":
            if _prec(expr.operand) < _NOT_PREC:
                inner = f"({inner})"
            return f"not {inner}"
        # A bare numeric literal would fuse with the minus sign into a
        # (different) negative literal, so it keeps its parentheses.
        numeric_literal = isinstance(expr.operand, Literal) and not isinstance(
            expr.operand.value, (bool, Point2)
        )
        if numeric_literal or _prec(expr.operand) < _NEG_PREC:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(expr, Binary):
        prec = _BINARY_PREC[expr.op]
        left = format_expr(expr.left)
        if _prec(expr.left) < prec:
            left = f"({left})"
        right = format_expr(expr.right)
        # All binary operators parse left-associatively.
        if _prec(expr.right) <= prec:
            right = f"({right})"
        return f"{left} {expr.op} {right}"
    if isinstance(expr, Call):
        args = ", ".join(format_expr(a) for a in expr.args)
        return f"{expr.name}({args})"
    raise TypeError(f"not an expression node: {expr!r}")


def _format_notification(notif: Notification) -> str:
    bindings = ", ".join(
        f"({timer}, {format_expr(value)})" for timer, value in notif.bindings
    )
    return f"({notif.target}, [{bindings}])"


def _format_function(fn: ScoringFunction) -> str:
    params = [f"event = {format_expr(fn.event)}"]
    if fn.condition is not None:
        params.append(f"condition = {format_expr(fn.condition)}")
    if fn.action is not None:
        params.append(f"action = {format_expr(fn.action)}")
    params.append(f"frequency = {fn.frequency.value}")
    if fn.initial != 0.0:
        params.append(f"initial = {format_number(fn.initial)}")
    if fn.notifications:
        notifs = ", ".join(_format_notification(n) for n in fn.notifications)
        params.append(f"notifications = [{notifs}]")
    body = ",\n    ".join(params)
    return f"{fn.name} = scoring_function(\n    {body});"


def format_od(od: OracleDefinition) -> str:
    """Canonical source text; parse_od(format_od(od)) equals od structurally.

    Constants come first, then scoring functions in declaration order, then
    an explicit summary clause (the implicit default is spelled out as
    `summary = sum`).
    """
    blocks: list[str] = []
    if od.constants:
        blocks.append(
            "\n".join(
                f"const {name} = {format_literal(value)};"
                for name, value in od.constants
            )
        )
    for fn in od.functions:
        blocks.append(_format_function(fn))
    if od.summary is None:
        blocks.append("summary = sum;")
    else:
        blocks.append(f"summary = {format_expr(od.summary)};")
    return "\n\n".join(blocks) + "\n"

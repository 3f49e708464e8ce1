"""Expression evaluation over message environments.

Evaluation is pure and deterministic. `and`/`or` short-circuit, so a guard
can protect a partial expression: `false and (1 / 0 > 0)` is false, not an
error. Numeric comparison is exact double comparison; tolerance belongs to
the oracle author (write `abs(a - b) < eps`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

from .errors import EvalError
from .syntax import Binary, Call, Expr, Ident, Literal, Unary, format_expr
from .trace import Point2, Value


@dataclass
class Env:
    """Bindings visible to one expression evaluation.

    `fields` holds the current message's values (including "t"); `timers`
    the evaluating function's timers; `seq_time` is bound only while a
    condition is evaluated; `scores` only while the summary is evaluated.
    """

    fields: Mapping[str, Value] = field(default_factory=dict)
    constants: Mapping[str, Value] = field(default_factory=dict)
    timers: Mapping[str, float] = field(default_factory=dict)
    seq_time: float | None = None
    scores: Mapping[str, float] = field(default_factory=dict)


def eval_expr(expr: Expr, env: Env) -> Value:
    if isinstance(expr, Literal):
        return expr.value
    if isinstance(expr, Ident):
        name = expr.name
        if name == "seq_time":
            if env.seq_time is None:
                raise EvalError("seq_time is not bound outside a condition")
            return env.seq_time
        for namespace in (env.fields, env.constants, env.timers, env.scores):
            if name in namespace:
                return namespace[name]
        raise EvalError(f"unbound identifier '{name}'")
    if isinstance(expr, Unary):
        if expr.op == "not":
            return not eval_expr(expr.operand, env)
        return -eval_expr(expr.operand, env)
    if isinstance(expr, Binary):
        op = expr.op
        if op == "and":
            return bool(eval_expr(expr.left, env)) and bool(eval_expr(expr.right, env))
        if op == "or":
            return bool(eval_expr(expr.left, env)) or bool(eval_expr(expr.right, env))
        left = eval_expr(expr.left, env)
        right = eval_expr(expr.right, env)
        if op == "+":
            return left + right
        if op == "-":
            return left - right
        if op == "*":
            return left * right
        if op == "/":
            if right == 0:
                raise EvalError(f"division by zero in '{format_expr(expr)}'")
            return left / right
        if op == "<":
            return left < right
        if op == "<=":
            return left <= right
        if op == ">":
            return left > right
        if op == ">=":
            return left >= right
        if op == "==":
            return left == right
        if op == "!=":
            return left != right
        raise EvalError(f"unknown operator '{op}'")
    if isinstance(expr, Call):
        args = [eval_expr(arg, env) for arg in expr.args]
        if expr.name == "distance":
            a, b = args
            assert isinstance(a, Point2) and isinstance(b, Point2)
            return math.hypot(a.x - b.x, a.y - b.y)
        if expr.name == "abs":
            return abs(args[0])
        if expr.name == "min":
            return min(args)
        if expr.name == "max":
            return max(args)
        raise EvalError(f"unknown function '{expr.name}'")
    raise TypeError(f"not an expression node: {expr!r}")

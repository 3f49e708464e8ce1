"""Streaming scoring engine: folds a trace through an oracle definition.

Each message is processed in three phases:

1. Timers. Every timer of every function decreases by the time elapsed
   since the previous message (0 for the first message); timers may go
   negative.
2. Evaluation, in declaration order. Each function's event is evaluated
   over the message fields, constants, and its own timers. While the event
   holds, consecutive messages form a maximal sequence; `seq_time` is the
   time elapsed since the sequence opened. The condition (if any) gates
   firing. Firing cadence by frequency mode:
     - first: at most once per trace, at the first message where the event
       and condition hold.
     - action_sum without condition: at every event-true message.
     - action_sum with condition: once per maximal sequence, at the first
       message of the sequence where the condition holds.
     - all_sum: at every message where event and condition hold.
   Firing adds the action's value (0 when absent) to the score and queues
   the function's notifications with values evaluated right there.
3. Notification. Queued notifications set the targeted timers; the effect
   is visible from the next message onward, which makes the result
   independent of declaration order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .checker import CheckedOracle
from .errors import EngineError, EvalError
from .evaluate import Env, eval_expr
from .syntax import Frequency, ScoringFunction
from .trace import Trace, TraceMessage


@dataclass(frozen=True)
class Firing:
    """One score update: which function fired at which message, the score
    delta, and the (target, timer, value) notifications it dispatched."""

    message_index: int
    function: str
    delta: float
    notifications: tuple[tuple[str, str, float], ...] = ()


@dataclass(frozen=True)
class ScoreReport:
    """Final per-function scores (declaration order), the summary score, and
    the firing log."""

    scores: tuple[tuple[str, float], ...]
    summary: float
    firings: tuple[Firing, ...] = ()

    def score_map(self) -> dict[str, float]:
        return dict(self.scores)


class _FunctionState:
    __slots__ = (
        "fn", "score", "fired_first", "in_sequence", "sequence_start",
        "fired_this_sequence", "timers",
    )

    def __init__(self, fn: ScoringFunction, timer_names: frozenset[str]):
        self.fn = fn
        self.score = fn.initial
        self.fired_first = False
        self.in_sequence = False
        self.sequence_start = 0.0
        self.fired_this_sequence = False
        self.timers = {name: 0.0 for name in sorted(timer_names)}


def summarize(checked: CheckedOracle, scores: tuple[tuple[str, float], ...]) -> float:
    """Evaluate the summary over final scores; the default is their sum,
    accumulated in declaration order."""
    od = checked.od
    if od.summary is None:
        total = 0.0
        for _, score in scores:
            total += score
        return total
    env = Env(constants=od.constant_map(), scores=dict(scores))
    try:
        result = eval_expr(od.summary, env)
    except EvalError as exc:
        raise EvalError(f"summary: {exc}") from exc
    return float(result)


class ScoringEngine:
    """Feed messages in time order via step(), then finalize().

    One engine scores one trace; construct a fresh engine per trace. The
    checked oracle itself is immutable and shareable.
    """

    def __init__(self, checked: CheckedOracle):
        self._checked = checked
        self._constants = checked.od.constant_map()
        self._states = [
            _FunctionState(fn, checked.timers[fn.name]) for fn in checked.od.functions
        ]
        self._prev_t: float | None = None
        self._index = 0
        self._firings: list[Firing] = []

    def step(self, message: TraceMessage) -> None:
        t = message.t
        if self._prev_t is not None and t < self._prev_t:
            raise EngineError(
                f"message {self._index}: timestamp {t!r} decreases below {self._prev_t!r}"
            )
        # Phase 1: timers.
        dt = 0.0 if self._prev_t is None else t - self._prev_t
        for state in self._states:
            for name in state.timers:
                state.timers[name] -= dt

        # Phase 2: evaluate in declaration order, deferring notifications.
        env = Env(fields={**message.values, "t": t}, constants=self._constants)
        queued: list[tuple[str, str, float]] = []
        for state in self._states:
            fn = state.fn
            env.timers = state.timers
            env.seq_time = None
            try:
                event_true = eval_expr(fn.event, env)
                if event_true:
                    if not state.in_sequence:
                        state.in_sequence = True
                        state.sequence_start = t
                        state.fired_this_sequence = False
                    cond_ok = True
                    if fn.condition is not None:
                        env.seq_time = t - state.sequence_start
                        cond_ok = bool(eval_expr(fn.condition, env))
                        env.seq_time = None
                    if fn.frequency is Frequency.FIRST:
                        fire = cond_ok and not state.fired_first
                    elif fn.frequency is Frequency.ACTION_SUM:
                        if fn.condition is None:
                            fire = True
                        else:
                            fire = cond_ok and not state.fired_this_sequence
                    else:
                        fire = cond_ok
                    if fire:
                        if fn.frequency is Frequency.FIRST:
                            state.fired_first = True
                        elif fn.frequency is Frequency.ACTION_SUM and fn.condition is not None:
                            state.fired_this_sequence = True
                        delta = 0.0
                        if fn.action is not None:
                            delta = float(eval_expr(fn.action, env))
                        state.score += delta
                        dispatched: list[tuple[str, str, float]] = []
                        for notif in fn.notifications:
                            for timer, value_expr in notif.bindings:
                                value = float(eval_expr(value_expr, env))
                                dispatched.append((notif.target, timer, value))
                        queued.extend(dispatched)
                        self._firings.append(
                            Firing(self._index, fn.name, delta, tuple(dispatched))
                        )
                else:
                    state.in_sequence = False
            except EvalError as exc:
                raise EvalError(
                    f"message {self._index} (t={t!r}), function '{fn.name}': {exc}"
                ) from exc

        # Phase 3: apply notifications (overwrite semantics).
        if queued:
            by_name = {state.fn.name: state for state in self._states}
            for target, timer, value in queued:
                by_name[target].timers[timer] = value

        self._prev_t = t
        self._index += 1

    def finalize(self) -> ScoreReport:
        scores = tuple((state.fn.name, state.score) for state in self._states)
        return ScoreReport(
            scores=scores,
            summary=summarize(self._checked, scores),
            firings=tuple(self._firings),
        )


def _require_matching_schema(checked: CheckedOracle, trace: Trace) -> None:
    if checked.schema.as_dict() != trace.schema.as_dict():
        raise EngineError("trace schema does not match the one the oracle was checked against")


def score_trace(checked: CheckedOracle, trace: Trace) -> ScoreReport:
    """Score one trace: init, fold step over messages, finalize."""
    _require_matching_schema(checked, trace)
    engine = ScoringEngine(checked)
    for message in trace.messages:
        engine.step(message)
    return engine.finalize()


def report_to_json(report: ScoreReport, include_firings: bool = False) -> str:
    """Machine-readable report; floats render via shortest round-trip repr."""
    obj: dict[str, object] = {
        "scores": {name: value for name, value in report.scores},
        "summary": report.summary,
    }
    if include_firings:
        obj["firings"] = [
            {
                "message_index": f.message_index,
                "function": f.function,
                "delta": f.delta,
                "notifications": [
                    {"target": target, "timer": timer, "value": value}
                    for target, timer, value in f.notifications
                ],
            }
            for f in report.firings
        ]
    return json.dumps(obj)


def report_to_text(report: ScoreReport, include_firings: bool = False) -> str:
    lines = [f"{name}: {value!r}" for name, value in report.scores]
    lines.append(f"summary: {report.summary!r}")
    if include_firings:
        lines.append(f"firings ({len(report.firings)}):")
        for f in report.firings:
            note = ""
            if f.notifications:
                parts = ", ".join(
                    f"{target}.{timer}={value!r}"
                    for target, timer, value in f.notifications
                )
                note = f" notify {parts}"
            lines.append(f"  [{f.message_index}] {f.function} delta={f.delta!r}{note}")
    return "\n".join(lines) + "\n"

"""Streaming engine semantics: sequences, conditions, timers, summaries."""

import json

import pytest

from _drive import drive, listing_suite
from odl import (
    EngineError,
    EvalError,
    GEN_SCHEMA,
    Kind,
    ScoringEngine,
    Trace,
    TraceMessage,
    TraceSchema,
    check_od,
    load_builtin,
    parse_od,
    parse_trace,
    report_to_json,
    report_to_text,
    score_trace,
)

BOOL_SCHEMA = TraceSchema((("collision", Kind.BOOLEAN),))


def scored(source: str, trace: Trace):
    return score_trace(check_od(parse_od(source), trace.schema), trace)


def bool_trace(times_and_flags):
    return Trace(
        schema=BOOL_SCHEMA,
        messages=tuple(
            TraceMessage(t=float(t), values={"collision": flag})
            for t, flag in times_and_flags
        ),
    )


def test_collision_times_five_worked_example():
    trace = parse_trace(
        '{"collision": "boolean"}\n{"t": 1, "collision": true}\n{"t": 2, "collision": true}\n'
    )
    report = scored(
        "hits = scoring_function(event = collision, action = 5, frequency = action_sum);",
        trace,
    )
    assert report.summary == 10.0


def test_speeding_counts_per_message():
    source = (
        "const MAX_SPEED = 20;\n"
        "speeding = scoring_function(event = speed > MAX_SPEED, action = -1, "
        "frequency = action_sum);"
    )
    schema = TraceSchema((("speed", Kind.NUMBER),))
    trace = Trace(
        schema=schema,
        messages=tuple(
            TraceMessage(t=float(i), values={"speed": s})
            for i, s in enumerate((10.0, 25.0, 30.0))
        ),
    )
    report = score_trace(check_od(parse_od(source), schema), trace)
    assert report.score_map() == {"speeding": -2.0}
    assert [f.message_index for f in report.firings] == [1, 2]


def test_listing_suite_hand_scores():
    suite = listing_suite()
    assert len(suite) >= 12
    oracles = {
        name: parse_od(load_builtin(name))
        for name in ("listing1", "listing2", "listing3", "listing4")
    }
    for case_name, trace, expected in suite:
        for od_name, od in oracles.items():
            report = score_trace(check_od(od, trace.schema), trace)
            assert report.summary == pytest.approx(expected[od_name], abs=1e-9), (
                case_name,
                od_name,
                report.score_map(),
            )


def test_initial_scores():
    trace = bool_trace([])
    report = scored(
        "f = scoring_function(event = collision, frequency = first, initial = 100);",
        trace,
    )
    assert report.score_map() == {"f": 100.0}
    assert report.summary == 100.0


def test_timer_starts_at_zero_so_event_false_before_notification():
    # listing4-style: a collision on the very first message finds the timer
    # at 0, and `expiration > 0` is false.
    trace = drive([{"t": 0.0, "collision": True}])
    report = score_trace(
        check_od(parse_od(load_builtin("listing4")), GEN_SCHEMA), trace
    )
    assert report.score_map() == {"collisions": 0.0, "deceleration": 0.0}


def test_summary_expressions():
    source = (
        "speeding = scoring_function(event = collision, action = -1, frequency = action_sum);\n"
        "arrival = scoring_function(event = collision, action = 0.5, frequency = action_sum);\n"
        "summary = 0.5 * speeding + 4 * arrival;"
    )
    trace = bool_trace([(0, True), (1, True)])
    report = scored(source, trace)
    assert report.score_map() == {"speeding": -2.0, "arrival": 1.0}
    assert report.summary == 0.5 * -2.0 + 4 * 1.0
    # report order follows declaration order
    assert tuple(name for name, _ in report.scores) == ("speeding", "arrival")


def test_zero_message_trace_summarizes_initials():
    source = (
        "a = scoring_function(event = collision, frequency = first, initial = 3);\n"
        "b = scoring_function(event = collision, frequency = first, initial = -1);"
    )
    report = scored(source, bool_trace([]))
    assert report.summary == 2.0
    assert report.firings == ()


def test_first_mode_fires_at_most_once():
    trace = bool_trace([(0, True), (1, False), (2, True), (3, True)])
    report = scored(
        "f = scoring_function(event = collision, action = 1, frequency = first);", trace
    )
    assert report.score_map() == {"f": 1.0}
    assert len(report.firings) == 1


def test_action_sum_with_condition_fires_once_per_sequence():
    # two event-true sequences, each longer than 1 s
    trace = bool_trace([(0, True), (1, True), (2, True), (3, False), (4, True), (5, True), (6, True)])
    report = scored(
        "f = scoring_function(event = collision, condition = seq_time > 1, "
        "action = -1, frequency = action_sum);",
        trace,
    )
    assert report.score_map() == {"f": -2.0}
    assert [f.message_index for f in report.firings] == [2, 6]


def test_all_sum_fires_at_every_qualifying_message():
    trace = bool_trace([(0, True), (1, True), (2, True)])
    report = scored(
        "f = scoring_function(event = collision, condition = seq_time > 1, "
        "action = 1, frequency = all_sum);",
        trace,
    )
    assert report.score_map() == {"f": 1.0}  # only t=2 has seq_time 2 > 1


def test_equal_timestamps_have_zero_dt():
    # the repeated timestamp keeps seq_time at 0, so the condition never holds
    trace = bool_trace([(1, True), (1, True), (1, True)])
    report = scored(
        "f = scoring_function(event = collision, condition = seq_time > 0, "
        "action = 1, frequency = all_sum);",
        trace,
    )
    assert report.score_map() == {"f": 0.0}


def test_missing_action_counts_as_firing_with_zero_delta():
    trace = bool_trace([(0, True)])
    report = scored("f = scoring_function(event = collision, frequency = all_sum);", trace)
    assert report.score_map() == {"f": 0.0}
    assert len(report.firings) == 1
    assert report.firings[0].delta == 0.0


def test_self_notification_chain():
    # Once fired, the function keeps itself armed via its own timer.
    source = (
        "f = scoring_function(event = collision or tm > 0, action = 1, "
        "frequency = all_sum, notifications = [(f, [(tm, 10)])]);"
    )
    trace = bool_trace([(0, True), (1, False), (2, False)])
    report = scored(source, trace)
    assert report.score_map() == {"f": 3.0}


def test_notification_overwrites_timer():
    # second arming overwrites the first (no max/accumulate semantics)
    source = (
        "watch = scoring_function(event = collision and tm > 0, action = 1, frequency = all_sum);\n"
        "arm = scoring_function(event = not collision, action = 0, frequency = all_sum, "
        "notifications = [(watch, [(tm, 0.5)])]);"
    )
    # armed at t=0 and t=1 (overwrite to 0.5 each); collision at t=1.4:
    # dt=0.4, timer 0.5-0.4=0.1>0 -> fires.
    trace = bool_trace([(0, False), (1, False), (1.4, True)])
    report = scored(source, trace)
    assert report.score_map()["watch"] == 1.0
    # but a 0.6 s gap drains it
    trace2 = bool_trace([(0, False), (1, False), (1.6, True)])
    report2 = scored(source, trace2)
    assert report2.score_map()["watch"] == 0.0


def test_notifications_recorded_in_firing_log():
    trace = drive(
        [{"t": t, "acceleration": -2.0} for t in (0.0, 1.0, 2.0, 2.5)]
    )
    report = score_trace(
        check_od(parse_od(load_builtin("listing4")), GEN_SCHEMA), trace
    )
    notifying = [f for f in report.firings if f.notifications]
    assert notifying
    assert notifying[0].notifications == (("collisions", "expiration", 0.5),)


def test_timestamp_regression_rejected():
    checked = check_od(
        parse_od("f = scoring_function(event = collision, frequency = first);"),
        BOOL_SCHEMA,
    )
    engine = ScoringEngine(checked)
    engine.step(TraceMessage(t=2.0, values={"collision": False}))
    with pytest.raises(EngineError, match="decreases"):
        engine.step(TraceMessage(t=1.0, values={"collision": False}))


def test_schema_mismatch_rejected():
    checked = check_od(
        parse_od("f = scoring_function(event = collision, frequency = first);"),
        BOOL_SCHEMA,
    )
    other = Trace(schema=TraceSchema((("speed", Kind.NUMBER),)), messages=())
    with pytest.raises(EngineError, match="schema"):
        score_trace(checked, other)


def test_evaluation_error_carries_message_context():
    source = "f = scoring_function(event = collision, action = 1 / (t - 1), frequency = all_sum);"
    trace = bool_trace([(0, True), (1, True)])
    with pytest.raises(EvalError, match=r"message 1 \(t=1.0\), function 'f'"):
        scored(source, trace)


def test_determinism_bit_identical():
    trace = drive([{"t": float(i) * 0.5, "speed": 25.0} for i in range(20)])
    checked = check_od(parse_od(load_builtin("listing1")), GEN_SCHEMA)
    assert score_trace(checked, trace) == score_trace(checked, trace)


def test_firing_log_sums_to_score_delta():
    trace = bool_trace([(0, True), (1, True), (2, False), (3, True)])
    report = scored(
        "f = scoring_function(event = collision, action = 2.5, frequency = action_sum, initial = 4);",
        trace,
    )
    acc = 4.0
    for firing in report.firings:
        acc += firing.delta
    assert acc == report.score_map()["f"]


def test_report_serialization():
    trace = bool_trace([(0, True)])
    report = scored(
        "f = scoring_function(event = collision, action = 5, frequency = action_sum);", trace
    )
    obj = json.loads(report_to_json(report))
    assert obj == {"scores": {"f": 5.0}, "summary": 5.0}
    obj = json.loads(report_to_json(report, include_firings=True))
    assert obj["firings"] == [
        {"message_index": 0, "function": "f", "delta": 5.0, "notifications": []}
    ]
    text = report_to_text(report, include_firings=True)
    assert "f: 5.0" in text
    assert "summary: 5.0" in text
    assert "[0] f delta=5.0" in text

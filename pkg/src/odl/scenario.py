"""Deterministic episode-driven trace generation.

A scenario stands in for a driving simulator: it declares a duration, a
sampling tick, route constants, and a list of property episodes (speeding,
lane_departure, collision, deceleration, arrival). The generated trace
carries fields {speed, acceleration, position, road_normal, collision}.
Seeded jitter is bounded so it can never cross an oracle threshold on its
own; scores are therefore predictable from the scenario alone, and identical
(scenario, seed) pairs yield byte-identical trace files.

This is a property-episode generator, not a vehicle model: the channels are
deliberately independent (braking episodes do not move the speed channel).
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from typing import Mapping

from .errors import ScenarioError
from .trace import Kind, Point2, Trace, TraceMessage, TraceSchema

EPISODE_KINDS = ("speeding", "lane_departure", "collision", "deceleration", "arrival")

# Schema of every generated trace; unit conventions: m/s, m/s^2, meters.
GEN_SCHEMA = TraceSchema(
    (
        ("speed", Kind.NUMBER),
        ("acceleration", Kind.NUMBER),
        ("position", Kind.POINT2),
        ("road_normal", Kind.NUMBER),
        ("collision", Kind.BOOLEAN),
    )
)

# Geometry margins: the arrival radius used by the bundled oracles is 12 m;
# keeping the standoff at 16 m and the arrival approach at 8 m leaves the
# threshold uncrossable by accident.
_ARRIVAL_CLEARANCE = 8.0
_STANDOFF = 16.0

_EPISODE_PARAMS = {
    "speeding": {"peak_speed"},
    "lane_departure": {"offset"},
    "collision": set(),
    "deceleration": {"rate"},
    "arrival": set(),
}


@dataclass(frozen=True)
class Episode:
    kind: str
    start: float
    end: float
    params: Mapping[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class Scenario:
    duration: float
    tick: float
    speed_limit: float = 22.35
    destination: Point2 = Point2(1000.0, 0.0)
    route_start: Point2 = Point2(0.0, 0.0)
    route_end: Point2 = Point2(1000.0, 0.0)
    lane_width: float = 3.7
    episodes: tuple[Episode, ...] = ()


def _dist(a: Point2, b: Point2) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def _episodes_of(scenario: Scenario, kind: str) -> list[Episode]:
    return [ep for ep in scenario.episodes if ep.kind == kind]


def validate_scenario(scenario: Scenario) -> None:
    if not (math.isfinite(scenario.tick) and scenario.tick > 0):
        raise ScenarioError("tick must be a positive number of seconds")
    if not (math.isfinite(scenario.duration) and scenario.duration >= 0):
        raise ScenarioError("duration must be a non-negative number of seconds")
    if scenario.speed_limit < 1.0:
        raise ScenarioError("speed_limit must be at least 1 m/s")
    if _dist(scenario.route_start, scenario.destination) < _STANDOFF:
        raise ScenarioError(
            f"route start must lie at least {_STANDOFF} m from the destination"
        )
    for ep in scenario.episodes:
        if ep.kind not in EPISODE_KINDS:
            raise ScenarioError(f"unknown episode kind '{ep.kind}'")
        if not (0.0 <= ep.start <= ep.end <= scenario.duration):
            raise ScenarioError(
                f"{ep.kind} episode [{ep.start}, {ep.end}] must lie within "
                f"[0, {scenario.duration}] with start <= end"
            )
        unknown = set(ep.params) - _EPISODE_PARAMS[ep.kind]
        if unknown:
            raise ScenarioError(
                f"{ep.kind} episode has unknown params {sorted(unknown)}"
            )
        if ep.kind == "collision":
            if ep.end != ep.start:
                raise ScenarioError("collision episodes are instantaneous (end = start)")
        else:
            # Every interval episode must contain a sample tick, otherwise
            # its effect would silently vanish from the trace.
            first_tick = math.ceil((ep.start - 1e-9) / scenario.tick)
            if first_tick * scenario.tick > ep.end + 1e-9:
                raise ScenarioError(
                    f"{ep.kind} episode [{ep.start}, {ep.end}] contains no "
                    f"sample tick (tick = {scenario.tick})"
                )
        if ep.kind == "speeding":
            peak = ep.params.get("peak_speed", scenario.speed_limit + 3.0)
            if peak <= scenario.speed_limit:
                raise ScenarioError(
                    "speeding episode peak_speed must exceed the speed limit"
                )
        if ep.kind == "deceleration":
            if ep.params.get("rate", -2.0) >= 0.0:
                raise ScenarioError("deceleration episode rate must be negative")
        if ep.kind == "lane_departure":
            offset = ep.params.get("offset", scenario.lane_width)
            near_line = min(
                abs(offset - scenario.lane_width),
                abs(offset - 2.0 * scenario.lane_width),
            )
            if near_line > 0.25:
                raise ScenarioError(
                    "lane_departure offset must sit within 0.25 m of the lane "
                    "line (lane_width or 2*lane_width)"
                )
    for kind in EPISODE_KINDS:
        spans = sorted(_episodes_of(scenario, kind), key=lambda ep: (ep.start, ep.end))
        for prev, cur in zip(spans, spans[1:]):
            if cur.start < prev.end:
                raise ScenarioError(
                    f"{kind} episodes [{prev.start}, {prev.end}] and "
                    f"[{cur.start}, {cur.end}] overlap"
                )
    if _episodes_of(scenario, "arrival"):
        if _dist(scenario.route_end, scenario.destination) > _ARRIVAL_CLEARANCE:
            raise ScenarioError(
                f"arrival episodes require the route end within "
                f"{_ARRIVAL_CLEARANCE} m of the destination"
            )


def _active(episodes: list[Episode], t: float) -> Episode | None:
    for ep in episodes:
        if ep.start - 1e-9 <= t <= ep.end + 1e-9:
            return ep
    return None


def _lerp(a: Point2, b: Point2, frac: float) -> Point2:
    return Point2(a.x + (b.x - a.x) * frac, a.y + (b.y - a.y) * frac)


def _standoff_progress(scenario: Scenario) -> float:
    """Largest route fraction that keeps the vehicle >= 16 m from the
    destination all the way; used when no arrival episode exists."""
    steps = 2048
    best = 0.0
    for k in range(steps + 1):
        frac = k / steps
        if _dist(_lerp(scenario.route_start, scenario.route_end, frac),
                 scenario.destination) < _STANDOFF:
            break
        best = frac
    return best


def generate_trace(scenario: Scenario, seed: int) -> Trace:
    """Sample the scenario at its tick; injects each episode exactly on its
    interval. Pure in (scenario, seed)."""
    validate_scenario(scenario)
    rng = random.Random(seed)
    n = int(math.floor(scenario.duration / scenario.tick + 1e-9)) + 1
    last = n - 1

    speeding = _episodes_of(scenario, "speeding")
    lane = _episodes_of(scenario, "lane_departure")
    decel = _episodes_of(scenario, "deceleration")
    arrivals = _episodes_of(scenario, "arrival")
    collision_ticks = {
        min(last, max(0, int(math.floor(ep.start / scenario.tick + 0.5))))
        for ep in _episodes_of(scenario, "collision")
    }

    arrival_start = min(ep.start for ep in arrivals) if arrivals else None
    cap = None if arrivals else _standoff_progress(scenario)
    cruise = 0.6 * scenario.speed_limit

    messages = []
    for i in range(n):
        t = i * scenario.tick
        jitter_speed = rng.uniform(-0.15, 0.15)
        jitter_acc = rng.uniform(0.0, 0.02)
        jitter_road = rng.uniform(-0.05, 0.05)

        ep = _active(speeding, t)
        if ep is not None:
            speed = ep.params.get("peak_speed", scenario.speed_limit + 3.0) + abs(jitter_speed)
        else:
            speed = cruise + jitter_speed

        ep = _active(decel, t)
        if ep is not None:
            acceleration = ep.params.get("rate", -2.0) - jitter_acc
        else:
            acceleration = jitter_acc

        ep = _active(lane, t)
        if ep is not None:
            road_normal = ep.params.get("offset", scenario.lane_width) + jitter_road
        else:
            road_normal = jitter_road

        if arrival_start is not None:
            frac = 1.0 if arrival_start <= 0 else min(t / arrival_start, 1.0)
        else:
            frac = (t / scenario.duration if scenario.duration > 0 else 0.0) * cap
        position = _lerp(scenario.route_start, scenario.route_end, frac)

        messages.append(
            TraceMessage(
                t=t,
                values={
                    "speed": speed,
                    "acceleration": acceleration,
                    "position": position,
                    "road_normal": road_normal,
                    "collision": i in collision_ticks,
                },
            )
        )
    return Trace(schema=GEN_SCHEMA, messages=tuple(messages))


def _point_from_json(raw: object, what: str) -> Point2:
    if (
        not isinstance(raw, list)
        or len(raw) != 2
        or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in raw)
    ):
        raise ScenarioError(f"{what} must be a two-element [x, y] array")
    return Point2(float(raw[0]), float(raw[1]))


def _number_from_json(raw: object, what: str) -> float:
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise ScenarioError(f"{what} must be a number")
    value = float(raw)
    if not math.isfinite(value):
        raise ScenarioError(f"{what} must be finite")
    return value


def load_scenario(text: str) -> Scenario:
    """Parse a scenario file: a JSON object with duration, tick, optional
    constants {speed_limit, destination, route_start, route_end, lane_width},
    and episodes [{kind, start, end?, params?}]."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"malformed scenario file: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise ScenarioError("scenario file must be a JSON object")
    unknown = set(obj) - {"duration", "tick", "constants", "episodes"}
    if unknown:
        raise ScenarioError(f"unknown scenario keys {sorted(unknown)}")
    for required in ("duration", "tick"):
        if required not in obj:
            raise ScenarioError(f"scenario is missing '{required}'")

    constants = obj.get("constants", {})
    if not isinstance(constants, dict):
        raise ScenarioError("constants must be an object")
    unknown = set(constants) - {
        "speed_limit", "destination", "route_start", "route_end", "lane_width",
    }
    if unknown:
        raise ScenarioError(f"unknown constants {sorted(unknown)}")
    defaults = Scenario(duration=0.0, tick=1.0)

    episodes = []
    raw_episodes = obj.get("episodes", [])
    if not isinstance(raw_episodes, list):
        raise ScenarioError("episodes must be an array")
    for idx, raw in enumerate(raw_episodes):
        if not isinstance(raw, dict):
            raise ScenarioError(f"episode {idx} must be an object")
        unknown = set(raw) - {"kind", "start", "end", "params"}
        if unknown:
            raise ScenarioError(f"episode {idx} has unknown keys {sorted(unknown)}")
        if "kind" not in raw or "start" not in raw:
            raise ScenarioError(f"episode {idx} needs 'kind' and 'start'")
        start = _number_from_json(raw["start"], f"episode {idx} start")
        end = _number_from_json(raw.get("end", start), f"episode {idx} end")
        params = raw.get("params", {})
        if not isinstance(params, dict):
            raise ScenarioError(f"episode {idx} params must be an object")
        episodes.append(
            Episode(
                kind=str(raw["kind"]),
                start=start,
                end=end,
                params={
                    key: _number_from_json(value, f"episode {idx} param '{key}'")
                    for key, value in params.items()
                },
            )
        )

    scenario = Scenario(
        duration=_number_from_json(obj["duration"], "duration"),
        tick=_number_from_json(obj["tick"], "tick"),
        speed_limit=(
            _number_from_json(constants["speed_limit"], "speed_limit")
            if "speed_limit" in constants
            else defaults.speed_limit
        ),
        destination=(
            _point_from_json(constants["destination"], "destination")
            if "destination" in constants
            else defaults.destination
        ),
        route_start=(
            _point_from_json(constants["route_start"], "route_start")
            if "route_start" in constants
            else defaults.route_start
        ),
        route_end=(
            _point_from_json(constants["route_end"], "route_end")
            if "route_end" in constants
            else defaults.route_end
        ),
        lane_width=(
            _number_from_json(constants["lane_width"], "lane_width")
            if "lane_width" in constants
            else defaults.lane_width
        ),
        episodes=tuple(episodes),
    )
    validate_scenario(scenario)
    return scenario

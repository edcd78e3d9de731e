"""Domain model for a bi-directional airspace corridor with reallocatable lanes.

A corridor connecting two vertiport clusters is partitioned into
``lane_count`` physical lanes. At any slot each lane is either active in one
of the two directions (providing ``lane_throughput`` aircraft of capacity per
slot), flushing after a deactivation, or idle. Time is discrete:
``horizon`` slots of ``slot_minutes`` minutes starting at ``horizon_start``
(minutes since midnight).

A schedule is the pair of per-slot active lane counts ``(y_fwd, y_rev)``.
Events follow from the schedule: per direction,

    a[t] = max(0, y[t] - y[t-1])    lanes activated from idle (no flush needed)
    v[t] = max(0, y[t-1] - y[t])    lanes deactivated (each starts a flush)

A lane deactivated at slot t occupies flush capacity during slots
t .. t+flush_slots-1 and rejoins the idle pool at t + flush_slots. Physical
capacity therefore requires, for every slot t,

    y_fwd[t] + y_rev[t]
      + sum over k in [t-flush_slots+1, t] of (v_fwd[k] + v_rev[k])
      <= lane_count

with deactivations at k < 0 supplied by the initial state. Equivalently,
total activations at slot t may not exceed the idle pool left over after
active and flushing lanes are accounted for.

Scoring a schedule against a demand series F uses, per slot and direction,
shortfall s = max(0, F - K*y) and waste w = max(0, K*y - F), combined as

    Z = c_unserved * total_shortfall
      + c_switch   * total_deactivations
      + c_waste    * total_waste
"""

from __future__ import annotations

import csv
import json
import operator
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

__all__ = [
    "DimensionError",
    "CorridorSpec",
    "CostWeights",
    "DemandSeries",
    "InitialState",
    "LaneSchedule",
    "ScheduleEvents",
    "SlotOutcome",
    "Violation",
    "derive_events",
    "check_feasibility",
    "slot_outcomes",
    "objective",
    "minutes_to_clock",
    "clock_to_minutes",
    "demand_to_csv",
    "demand_from_csv",
    "schedule_to_csv",
    "schedule_from_csv",
    "demand_to_json",
    "demand_from_json",
    "schedule_to_json",
    "schedule_from_json",
]


class DimensionError(ValueError):
    """A sequence does not match the corridor's horizon or flush window."""


def _as_int_tuple(values: Iterable, name: str, minimum: int = 0) -> tuple[int, ...]:
    out = []
    for pos, value in enumerate(values):
        try:
            item = operator.index(value)
        except TypeError as exc:
            raise ValueError(f"{name}[{pos}] must be an integer, got {value!r}") from exc
        if item < minimum:
            raise ValueError(f"{name}[{pos}] must be >= {minimum}, got {item}")
        out.append(item)
    return tuple(out)


def minutes_to_clock(minutes: float) -> str:
    """Render minutes since midnight as HH:MM (24:00 allowed for day end)."""
    total = int(round(minutes))
    return f"{total // 60:02d}:{total % 60:02d}"


def clock_to_minutes(text: str) -> float:
    """Parse an HH:MM string into minutes since midnight."""
    parts = text.strip().split(":")
    if len(parts) != 2:
        raise ValueError(f"expected HH:MM, got {text!r}")
    hours, mins = int(parts[0]), int(parts[1])
    if not (0 <= mins < 60) or hours < 0:
        raise ValueError(f"invalid clock time {text!r}")
    return float(hours * 60 + mins)


@dataclass(frozen=True)
class CorridorSpec:
    """Physical and temporal parameters of one bi-directional corridor.

    ``fwd`` is the node_i -> node_j direction throughout the package.
    """

    node_i: str = "CC"
    node_j: str = "SV"
    lane_count: int = 6
    lane_throughput: int = 6
    flush_slots: int = 2
    slot_minutes: float = 10.0
    horizon: int = 120
    horizon_start: float = 240.0

    def __post_init__(self):
        if self.lane_count < 1:
            raise ValueError("lane_count must be >= 1")
        if self.lane_throughput < 1:
            raise ValueError("lane_throughput must be >= 1")
        if self.flush_slots < 0:
            raise ValueError("flush_slots must be >= 0")
        if self.slot_minutes <= 0:
            raise ValueError("slot_minutes must be > 0")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if not 0 <= self.horizon_start < 1440:
            raise ValueError("horizon_start must lie within one day")
        if self.horizon * self.slot_minutes > 1440:
            raise ValueError("horizon must fit within a single operating day")

    @property
    def horizon_end(self) -> float:
        """End of the operating window, minutes since midnight."""
        return self.horizon_start + self.horizon * self.slot_minutes

    def slot_start(self, slot: int) -> float:
        return self.horizon_start + slot * self.slot_minutes

    def slot_of(self, minutes: float) -> int:
        """Slot index containing a clock time; may fall outside [0, horizon)."""
        return int((minutes - self.horizon_start) // self.slot_minutes)

    def clock_label(self, slot: int) -> str:
        return minutes_to_clock(self.slot_start(slot))


@dataclass(frozen=True)
class CostWeights:
    """Penalty weights for unserved demand, lane deactivations, and idle capacity."""

    c_unserved: float = 1.0
    c_switch: float = 0.1
    c_waste: float = 0.01

    def __post_init__(self):
        for name in ("c_unserved", "c_switch", "c_waste"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


@dataclass(frozen=True)
class DemandSeries:
    """Exogenous per-slot aircraft demand for both directions."""

    fwd: tuple[int, ...]
    rev: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "fwd", _as_int_tuple(self.fwd, "fwd"))
        object.__setattr__(self, "rev", _as_int_tuple(self.rev, "rev"))
        if len(self.fwd) != len(self.rev):
            raise DimensionError(
                f"fwd and rev lengths differ: {len(self.fwd)} vs {len(self.rev)}"
            )

    def __len__(self) -> int:
        return len(self.fwd)

    def total(self) -> int:
        return sum(self.fwd) + sum(self.rev)

    def peak(self) -> int:
        """Largest combined per-slot demand across both directions."""
        return max((f + r for f, r in zip(self.fwd, self.rev)), default=0)

    @staticmethod
    def zeros(horizon: int) -> "DemandSeries":
        return DemandSeries(fwd=(0,) * horizon, rev=(0,) * horizon)


@dataclass(frozen=True)
class InitialState:
    """Corridor state when the planning window opens.

    ``y0_fwd``/``y0_rev`` are the active lane counts in the slot before the
    horizon. The deactivation histories are ordered oldest to newest and
    cover the slots immediately before the horizon; sequences shorter than
    ``flush_slots`` imply zeros further back.
    """

    y0_fwd: int = 0
    y0_rev: int = 0
    v_history_fwd: tuple[int, ...] = ()
    v_history_rev: tuple[int, ...] = ()

    def __post_init__(self):
        if self.y0_fwd < 0 or self.y0_rev < 0:
            raise ValueError("initial lane counts must be non-negative")
        object.__setattr__(
            self, "v_history_fwd", _as_int_tuple(self.v_history_fwd, "v_history_fwd")
        )
        object.__setattr__(
            self, "v_history_rev", _as_int_tuple(self.v_history_rev, "v_history_rev")
        )

    def history_totals(self, flush_slots: int) -> tuple[int, ...]:
        """Combined deactivations for slots -flush_slots .. -1, oldest first."""
        if max(len(self.v_history_fwd), len(self.v_history_rev)) > flush_slots:
            raise DimensionError(
                "deactivation history longer than the flush window"
            )
        fwd = (0,) * (flush_slots - len(self.v_history_fwd)) + self.v_history_fwd
        rev = (0,) * (flush_slots - len(self.v_history_rev)) + self.v_history_rev
        return tuple(f + r for f, r in zip(fwd, rev))

    def occupied(self, flush_slots: int) -> int:
        """Lanes active or flushing at the slot before the horizon opens."""
        return self.y0_fwd + self.y0_rev + sum(self.history_totals(flush_slots))


@dataclass(frozen=True)
class LaneSchedule:
    """Per-slot active lane counts for both directions."""

    y_fwd: tuple[int, ...]
    y_rev: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "y_fwd", _as_int_tuple(self.y_fwd, "y_fwd"))
        object.__setattr__(self, "y_rev", _as_int_tuple(self.y_rev, "y_rev"))
        if len(self.y_fwd) != len(self.y_rev):
            raise DimensionError(
                f"y_fwd and y_rev lengths differ: {len(self.y_fwd)} vs {len(self.y_rev)}"
            )

    def __len__(self) -> int:
        return len(self.y_fwd)

    def validate_against(self, spec: CorridorSpec) -> None:
        """Check horizon length and per-slot lane bounds against a spec."""
        if len(self) != spec.horizon:
            raise DimensionError(
                f"schedule length {len(self)} does not match horizon {spec.horizon}"
            )
        for t, (yf, yr) in enumerate(zip(self.y_fwd, self.y_rev)):
            if yf > spec.lane_count or yr > spec.lane_count:
                raise ValueError(
                    f"slot {t}: lane count exceeds {spec.lane_count}"
                )
            if yf + yr > spec.lane_count:
                raise ValueError(
                    f"slot {t}: y_fwd + y_rev = {yf + yr} exceeds {spec.lane_count}"
                )

    @staticmethod
    def constant(horizon: int, y_fwd: int, y_rev: int) -> "LaneSchedule":
        return LaneSchedule(y_fwd=(y_fwd,) * horizon, y_rev=(y_rev,) * horizon)


@dataclass(frozen=True)
class ScheduleEvents:
    """Per-slot lane activations and deactivations implied by a schedule."""

    a_fwd: tuple[int, ...]
    a_rev: tuple[int, ...]
    v_fwd: tuple[int, ...]
    v_rev: tuple[int, ...]

    def total_deactivations(self) -> int:
        return sum(self.v_fwd) + sum(self.v_rev)


@dataclass(frozen=True)
class SlotOutcome:
    """Shortfall, waste, and served aircraft for one slot and direction.

    Exactly one of shortfall and waste can be positive: capacity below
    demand produces shortfall, capacity above demand produces waste.
    """

    shortfall: int
    waste: int
    served: int


@dataclass(frozen=True)
class Violation:
    """One feasibility defect found in a schedule.

    ``slot`` is -1 for defects in the initial state. ``kind`` is one of
    ``capacity`` (active plus flushing lanes exceed the corridor),
    ``activation_exceeds_idle`` (a direction activates more lanes than the
    idle pool holds), or ``init_capacity``.
    """

    slot: int
    kind: str
    excess: int
    detail: str = ""


def _events_one_direction(y: Sequence[int], y0: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    activations, deactivations = [], []
    prev = y0
    for current in y:
        activations.append(max(0, current - prev))
        deactivations.append(max(0, prev - current))
        prev = current
    return tuple(activations), tuple(deactivations)


def derive_events(
    schedule: LaneSchedule, init: InitialState, spec: CorridorSpec | None = None
) -> ScheduleEvents:
    """Derive the canonical activation/deactivation events of a schedule.

    The decomposition is minimal: per direction and slot at most one of
    a[t], v[t] is positive, and y[t] = y[t-1] - v[t] + a[t] holds exactly
    with y[-1] taken from the initial state.
    """
    if spec is not None and len(schedule) != spec.horizon:
        raise DimensionError(
            f"schedule length {len(schedule)} does not match horizon {spec.horizon}"
        )
    a_fwd, v_fwd = _events_one_direction(schedule.y_fwd, init.y0_fwd)
    a_rev, v_rev = _events_one_direction(schedule.y_rev, init.y0_rev)
    return ScheduleEvents(a_fwd=a_fwd, a_rev=a_rev, v_fwd=v_fwd, v_rev=v_rev)


def check_feasibility(
    schedule: LaneSchedule, spec: CorridorSpec, init: InitialState
) -> list[Violation]:
    """Return every capacity defect of a schedule; empty means feasible.

    Checks, per slot: active lanes in both directions plus all lanes still
    flushing from deactivations in the trailing flush window must fit within
    the corridor, and activations in each direction must be drawn from the
    idle pool. The initial state itself is checked against the corridor's
    lane count and reported at slot -1.
    """
    schedule.validate_against(spec)
    tau = spec.flush_slots
    lanes = spec.lane_count
    violations: list[Violation] = []

    hist = init.history_totals(tau)
    if init.occupied(tau) > lanes:
        violations.append(
            Violation(
                slot=-1,
                kind="init_capacity",
                excess=init.occupied(tau) - lanes,
                detail="initial active plus flushing lanes exceed the corridor",
            )
        )

    events = derive_events(schedule, init, spec)
    # Combined per-slot deactivations for slots -tau .. horizon-1.
    v_all = list(hist) + [f + r for f, r in zip(events.v_fwd, events.v_rev)]

    prev_f, prev_r = init.y0_fwd, init.y0_rev
    for t in range(spec.horizon):
        # Window k = t-tau+1 .. t maps to v_all[t+1 .. t+tau] (offset tau).
        flushing = sum(v_all[t + 1 : t + tau + 1]) if tau > 0 else 0
        load = schedule.y_fwd[t] + schedule.y_rev[t] + flushing
        if load > lanes:
            violations.append(
                Violation(
                    slot=t,
                    kind="capacity",
                    excess=load - lanes,
                    detail=f"active {schedule.y_fwd[t]}+{schedule.y_rev[t]} "
                    f"plus flushing {flushing} exceed {lanes}",
                )
            )
        # Idle pool before this slot's events: deactivations at slot t free
        # their lanes only after the flush, never within slot t itself
        # (except with flush_slots == 0, where the window above is empty).
        flushing_before = sum(v_all[t + 1 : t + tau]) if tau > 0 else 0
        idle = lanes - prev_f - prev_r - flushing_before
        for direction, act in (("fwd", events.a_fwd[t]), ("rev", events.a_rev[t])):
            if act > idle:
                violations.append(
                    Violation(
                        slot=t,
                        kind="activation_exceeds_idle",
                        excess=act - idle,
                        detail=f"{direction} activates {act} with idle pool {idle}",
                    )
                )
        prev_f, prev_r = schedule.y_fwd[t], schedule.y_rev[t]
    return violations


def slot_outcomes(
    schedule: LaneSchedule, demand: DemandSeries, spec: CorridorSpec
) -> tuple[tuple[SlotOutcome, ...], tuple[SlotOutcome, ...]]:
    """Per-slot shortfall/waste/served for both directions (fwd, rev)."""
    if len(schedule) != spec.horizon or len(demand) != spec.horizon:
        raise DimensionError("schedule and demand must match the spec horizon")
    k = spec.lane_throughput

    def one(y_seq, f_seq):
        out = []
        for y, f in zip(y_seq, f_seq):
            cap = k * y
            out.append(
                SlotOutcome(
                    shortfall=max(0, f - cap),
                    waste=max(0, cap - f),
                    served=min(f, cap),
                )
            )
        return tuple(out)

    return one(schedule.y_fwd, demand.fwd), one(schedule.y_rev, demand.rev)


def objective(
    schedule: LaneSchedule,
    demand: DemandSeries,
    weights: CostWeights,
    spec: CorridorSpec,
    init: InitialState,
) -> float:
    """Total penalty Z of a schedule against a demand series.

    Shortfall and waste follow the max-decomposition per slot and direction;
    deactivations are the canonical events. Only deactivations carry the
    switching cost, activations from idle are free. Totals are accumulated
    in integer arithmetic and weighted once, so equal schedules always
    produce bit-equal Z.
    """
    out_fwd, out_rev = slot_outcomes(schedule, demand, spec)
    events = derive_events(schedule, init, spec)
    total_shortfall = sum(o.shortfall for o in out_fwd) + sum(o.shortfall for o in out_rev)
    total_waste = sum(o.waste for o in out_fwd) + sum(o.waste for o in out_rev)
    total_deact = events.total_deactivations()
    return (
        weights.c_unserved * total_shortfall
        + weights.c_switch * total_deact
        + weights.c_waste * total_waste
    )


# ---------------------------------------------------------------------------
# Serialization. CSV columns are slot,clock_time,fwd,rev for both schedules
# and demand series; JSON documents embed the corridor spec so a file is
# self-describing. Integer payloads round-trip bit-exact.
# ---------------------------------------------------------------------------

_CSV_HEADER = ["slot", "clock_time", "fwd", "rev"]


def _series_to_csv(fwd: Sequence[int], rev: Sequence[int], spec: CorridorSpec, path) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(_CSV_HEADER)
        for t, (f, r) in enumerate(zip(fwd, rev)):
            writer.writerow([t, spec.clock_label(t), f, r])


def _series_from_csv(path) -> tuple[tuple[int, ...], tuple[int, ...]]:
    fwd, rev = [], []
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != _CSV_HEADER:
            raise ValueError(f"{path}: expected header {_CSV_HEADER}, got {header}")
        for row_num, row in enumerate(reader, start=2):
            if len(row) != 4:
                raise ValueError(f"{path}: row {row_num} has {len(row)} fields")
            fwd.append(int(row[2]))
            rev.append(int(row[3]))
    return tuple(fwd), tuple(rev)


def demand_to_csv(demand: DemandSeries, spec: CorridorSpec, path) -> None:
    _series_to_csv(demand.fwd, demand.rev, spec, path)


def demand_from_csv(path) -> DemandSeries:
    fwd, rev = _series_from_csv(path)
    return DemandSeries(fwd=fwd, rev=rev)


def schedule_to_csv(schedule: LaneSchedule, spec: CorridorSpec, path) -> None:
    _series_to_csv(schedule.y_fwd, schedule.y_rev, spec, path)


def schedule_from_csv(path) -> LaneSchedule:
    fwd, rev = _series_from_csv(path)
    return LaneSchedule(y_fwd=fwd, y_rev=rev)


def _spec_to_dict(spec: CorridorSpec) -> dict:
    return {
        "node_i": spec.node_i,
        "node_j": spec.node_j,
        "lane_count": spec.lane_count,
        "lane_throughput": spec.lane_throughput,
        "flush_slots": spec.flush_slots,
        "slot_minutes": spec.slot_minutes,
        "horizon": spec.horizon,
        "horizon_start": spec.horizon_start,
    }


def spec_from_dict(payload: dict) -> CorridorSpec:
    return CorridorSpec(**payload)


def demand_to_json(demand: DemandSeries, spec: CorridorSpec, path) -> None:
    payload = {"corridor": _spec_to_dict(spec), "fwd": list(demand.fwd), "rev": list(demand.rev)}
    Path(path).write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def demand_from_json(path) -> tuple[DemandSeries, CorridorSpec]:
    payload = json.loads(Path(path).read_text())
    return (
        DemandSeries(fwd=tuple(payload["fwd"]), rev=tuple(payload["rev"])),
        spec_from_dict(payload["corridor"]),
    )


def schedule_to_json(schedule: LaneSchedule, spec: CorridorSpec, path) -> None:
    payload = {
        "corridor": _spec_to_dict(spec),
        "y_fwd": list(schedule.y_fwd),
        "y_rev": list(schedule.y_rev),
    }
    Path(path).write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def schedule_from_json(path) -> tuple[LaneSchedule, CorridorSpec]:
    payload = json.loads(Path(path).read_text())
    return (
        LaneSchedule(y_fwd=tuple(payload["y_fwd"]), y_rev=tuple(payload["y_rev"])),
        spec_from_dict(payload["corridor"]),
    )

"""Closed-loop simulation: trace -> bus -> gate -> shutter.

Latency is measured from the ground-truth motion onset in the trace, not from
the sampled event, so it includes the wait for the next bus request. Under the
default timing model the worst case is one period plus one transaction plus
the processing delay: 1000 + 420 + 50 = 1470 us.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .bus import DEFAULT_PERIOD_US, BusConfig, sampling_schedule, transaction_duration_us
from .detector import DetectorConfig, GateCommand, classify_omega, run_gate
from .errors import ScheduleInfeasibleError, ValidationError
from .shutter import BLUR_BOUND, OpticalTimeline, ShutterModel, apply_commands
from .trace import MotionTrace

LATENCY_BUDGET_US = 2000.0


@dataclass(frozen=True)
class SimConfig:
    bus: BusConfig = field(default_factory=BusConfig)
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    shutter: ShutterModel = field(default_factory=ShutterModel)
    period_us: int = DEFAULT_PERIOD_US
    # add the shutter's optical fall time to each latency
    include_optical_latency: bool = False

    def __post_init__(self):
        if self.period_us <= 0 or int(self.period_us) != self.period_us:
            raise ValidationError(f"period_us must be a positive integer, got {self.period_us}")
        duration = transaction_duration_us(self.bus)
        if not duration < self.period_us:
            raise ScheduleInfeasibleError(
                f"schedule infeasible: transaction takes {duration:g} us "
                f"but the sampling period is {self.period_us} us"
            )

    def worst_case_latency_us(self) -> float:
        bound = self.period_us + transaction_duration_us(self.bus) + self.detector.processing_delay_us
        if self.include_optical_latency:
            bound += self.shutter.blur_onset_us()
        return bound


class LatencyRecord(NamedTuple):
    onset_us: int
    gated_us: float
    latency_us: float


@dataclass(frozen=True)
class SimResult:
    commands: tuple[GateCommand, ...]
    timeline: OpticalTimeline
    latencies: tuple[LatencyRecord, ...]
    blur_fraction: float
    # onsets whose motion ended before any request saw it
    missed_onsets: tuple[int, ...] = ()
    n_events: int = 0

    @property
    def worst_latency_us(self) -> float | None:
        return max((r.latency_us for r in self.latencies), default=None)


def _motion_runs(trace: MotionTrace, threshold_dps: float) -> tuple[np.ndarray, np.ndarray]:
    """Start and end times of each supra-threshold run; ends are exclusive."""
    flags = classify_omega(trace.omega, threshold_dps)
    if not flags.size:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty
    prev = np.concatenate(([False], flags[:-1]))
    nxt = np.concatenate((flags[1:], [False]))
    starts = trace.t_us[flags & ~prev]
    last = np.flatnonzero(flags & ~nxt)
    following = trace.t_us[np.minimum(last + 1, len(trace) - 1)]
    ends = np.where(last + 1 < len(trace), following, trace.duration_us)
    return starts, ends.astype(np.int64)


def motion_onsets(trace: MotionTrace, threshold_dps: float) -> np.ndarray:
    """Timestamps of the first supra-threshold sample of each motion run.

    A trace that starts in motion has an onset at its first sample.
    """
    return _motion_runs(trace, threshold_dps)[0]


def _pair_onsets(
    trace: MotionTrace, commands: Sequence[GateCommand], cfg: SimConfig
) -> tuple[list[LatencyRecord], list[int]]:
    """Attribute each drive-off to the motion run whose sample triggered it.

    The triggering request is recovered from the command time as
    ``issue - processing delay - transaction``; the trace sample held at that
    request must be in motion, otherwise the commands do not belong to this
    trace. Runs that no request ever landed in are returned as missed.
    """
    threshold = cfg.detector.threshold_dps
    starts, ends = _motion_runs(trace, threshold)
    lag = cfg.detector.processing_delay_us + transaction_duration_us(cfg.bus)
    optical = cfg.shutter.blur_onset_us() if cfg.include_optical_latency else 0.0

    drive = True
    records: list[LatencyRecord] = []
    for cmd in commands:
        if cmd.drive_on == drive:
            raise ValidationError(
                f"command at {cmd.issue_us} us repeats drive_on={drive}; commands must alternate"
            )
        drive = cmd.drive_on
        if cmd.drive_on:
            continue
        request = round(cmd.issue_us - lag)
        run = int(np.searchsorted(starts, request, side="right")) - 1
        if run < 0 or not request < ends[run] or request % cfg.period_us:
            raise ValidationError(
                f"drive-off at {cmd.issue_us} us does not follow a sampled motion sample in the trace"
            )
        onset = int(starts[run])
        gated = cmd.issue_us + optical
        records.append(LatencyRecord(onset, gated, gated - onset))

    period = cfg.period_us
    first_request = -(-starts // period) * period
    missed = starts[first_request >= ends].tolist()
    return records, missed


def measure_gate_latency(
    trace: MotionTrace, commands: Sequence[GateCommand], cfg: SimConfig | None = None
) -> list[LatencyRecord]:
    """One record per drive-off: onset of the motion run that caused it, and the delay.

    Motion runs first sampled while the shutter is already blurred record
    nothing. A burst that ends unseen between two requests is reported by
    :func:`run_simulation` in ``missed_onsets`` instead.
    """
    return _pair_onsets(trace, commands, cfg or SimConfig())[0]


def blur_fraction(timeline: OpticalTimeline) -> float:
    """Share of the timeline with transparency below 10 %."""
    total = timeline.end_us
    if not total > 0:
        raise ValidationError("zero-length timeline")
    blurred = 0.0
    for seg in timeline.segments:
        a, b = seg.start_level, seg.end_level
        if a < BLUR_BOUND and b < BLUR_BOUND:
            blurred += seg.duration_us
        elif a < BLUR_BOUND or b < BLUR_BOUND:
            cross = (BLUR_BOUND - a) / (b - a)
            below = cross if a < BLUR_BOUND else 1.0 - cross
            blurred += below * seg.duration_us
    return blurred / total


def run_simulation(trace: MotionTrace, cfg: SimConfig | None = None) -> SimResult:
    cfg = cfg or SimConfig()
    schedule = sampling_schedule(trace, cfg.period_us, cfg.bus)
    gate = run_gate(schedule, cfg.detector)
    commands = gate.commands
    end = float(trace.duration_us)
    if commands:
        end = max(end, commands[-1].issue_us)
    timeline = apply_commands(cfg.shutter, commands, end, initial_drive_on=True)
    if end > 0:
        fraction = blur_fraction(timeline)
    else:
        fraction = 0.0
    records, missed = _pair_onsets(trace, commands, cfg)
    return SimResult(
        commands=tuple(commands),
        timeline=timeline,
        latencies=tuple(records),
        blur_fraction=fraction,
        missed_onsets=tuple(missed),
        n_events=len(schedule),
    )

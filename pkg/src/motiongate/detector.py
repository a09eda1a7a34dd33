"""The motion gate: a two-state machine driving the shutter.

A sample counts as motion when the absolute angular speed on any axis is at
or above the threshold (6.1 deg/s by default); equality blurs. While CLEAR,
the first motion sample blurs immediately. While BLURRED, the gate returns to
CLEAR once every axis has stayed below threshold for ``clear_dwell_us``
(zero by default, i.e. memoryless). A command is emitted only on a mode
change, ``processing_delay_us`` after the sample became available.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .bus import SampleEvent, SampleSchedule
from .errors import SequencingError, ValidationError
from .trace import GyroSample

DEFAULT_THRESHOLD_DPS = 6.1


@dataclass(frozen=True)
class DetectorConfig:
    threshold_dps: float = DEFAULT_THRESHOLD_DPS
    clear_dwell_us: float = 0.0
    processing_delay_us: float = 50.0

    def __post_init__(self):
        if not self.threshold_dps > 0:
            raise ValidationError(f"threshold_dps must be > 0, got {self.threshold_dps}")
        if not self.clear_dwell_us >= 0:
            raise ValidationError(f"clear_dwell_us must be >= 0, got {self.clear_dwell_us}")
        if not self.processing_delay_us >= 0:
            raise ValidationError(
                f"processing_delay_us must be >= 0, got {self.processing_delay_us}"
            )


class Mode(enum.Enum):
    CLEAR = "clear"
    BLURRED = "blurred"


@dataclass(frozen=True)
class GateState:
    mode: Mode = Mode.CLEAR
    below_since_us: float | None = None
    last_ready_us: float | None = None


@dataclass(frozen=True)
class GateCommand:
    """``drive_on=True`` starts the square wave (clear); ``False`` stops it (blur)."""

    issue_us: float
    drive_on: bool


def classify_sample(sample: GyroSample, cfg: DetectorConfig | None = None) -> bool:
    """True when any axis reaches the threshold in absolute value."""
    cfg = cfg or DetectorConfig()
    w = (sample.wx, sample.wy, sample.wz)
    if not all(math.isfinite(c) for c in w):
        raise ValidationError("non-finite angular velocity")
    return max(abs(c) for c in w) >= cfg.threshold_dps


def classify_omega(omega, threshold_dps: float = DEFAULT_THRESHOLD_DPS) -> np.ndarray:
    """Vectorised :func:`classify_sample` over an ``(n, 3)`` array."""
    w = np.asarray(omega, dtype=np.float64).reshape(-1, 3)
    if not np.all(np.isfinite(w)):
        raise ValidationError("non-finite angular velocity")
    return np.max(np.abs(w), axis=1) >= threshold_dps


def step(
    state: GateState, event: SampleEvent, cfg: DetectorConfig | None = None
) -> tuple[GateState, GateCommand | None]:
    cfg = cfg or DetectorConfig()
    ready = event.ready_us
    if state.last_ready_us is not None and ready < state.last_ready_us:
        raise SequencingError(
            f"event ready at {ready} us arrived after one ready at {state.last_ready_us} us"
        )
    issue = ready + cfg.processing_delay_us

    if classify_sample(event.sample, cfg):
        new = GateState(Mode.BLURRED, None, ready)
        if state.mode is Mode.CLEAR:
            return new, GateCommand(issue, False)
        return new, None

    below = state.below_since_us if state.below_since_us is not None else ready
    if state.mode is Mode.BLURRED and ready >= below + cfg.clear_dwell_us:
        return GateState(Mode.CLEAR, below, ready), GateCommand(issue, True)
    return replace(state, below_since_us=below, last_ready_us=ready), None


class GateRun(NamedTuple):
    commands: list[GateCommand]
    blurred: np.ndarray  # mode after each event, True = BLURRED
    final_state: GateState


def run_gate(
    schedule: SampleSchedule,
    cfg: DetectorConfig | None = None,
    initial: GateState | None = None,
) -> GateRun:
    """Fold :func:`step` over a whole schedule.

    Works on runs of equal motion flags rather than single events, which keeps
    twenty-minute sessions fast; results are identical to stepping one event
    at a time.
    """
    cfg = cfg or DetectorConfig()
    state = initial or GateState()
    n = len(schedule)
    blurred = np.zeros(n, dtype=bool)
    commands: list[GateCommand] = []
    if n == 0:
        return GateRun(commands, blurred, state)

    ready = schedule.ready_us
    if np.any(np.diff(ready) < 0):
        raise SequencingError("schedule is not ordered by ready time")
    if state.last_ready_us is not None and ready[0] < state.last_ready_us:
        raise SequencingError("schedule starts before the state's last event")
    flags = classify_omega(schedule.omega, cfg.threshold_dps)
    delay = cfg.processing_delay_us

    mode = state.mode
    below = state.below_since_us
    edges = np.flatnonzero(np.diff(flags)) + 1
    starts = np.concatenate(([0], edges))
    stops = np.concatenate((edges, [n]))
    for a, b in zip(starts.tolist(), stops.tolist()):
        if flags[a]:
            if mode is Mode.CLEAR:
                commands.append(GateCommand(float(ready[a]) + delay, False))
                mode = Mode.BLURRED
            below = None
            blurred[a:b] = True
            continue
        if below is None:
            below = float(ready[a])
        if mode is Mode.BLURRED:
            k = a + int(np.searchsorted(ready[a:b], below + cfg.clear_dwell_us, side="left"))
            blurred[a:k] = True
            if k < b:
                commands.append(GateCommand(float(ready[k]) + delay, True))
                mode = Mode.CLEAR
    final = GateState(mode, below, float(ready[-1]))
    return GateRun(commands, blurred, final)

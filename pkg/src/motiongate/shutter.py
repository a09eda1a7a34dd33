"""Liquid-crystal shutter: drive commands in, transparency over time out.

The sheet is binary in the optical sense. Driven by the square wave it is
clear (``transparency_clear``); undriven it diffuses, with transmitted light
below 10 %. The drive frequency and voltage are carried for completeness but
do not modulate transparency. Optional ``rise_us``/``fall_us`` give a linear
optical transition; when a command arrives mid-transition the new ramp starts
from the current level at the same slope.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .detector import GateCommand
from .errors import SequencingError, ValidationError

BLUR_BOUND = 0.10


@dataclass(frozen=True)
class DriveSignal:
    frequency_hz: float = 1000.0
    vpp: float = 80.0

    def __post_init__(self):
        if not self.frequency_hz > 0 or not self.vpp > 0:
            raise ValidationError("frequency_hz and vpp must be > 0")


@dataclass(frozen=True)
class ShutterModel:
    transparency_clear: float = 0.70
    transparency_blur: float = 0.08
    rise_us: float = 0.0
    fall_us: float = 0.0
    drive: DriveSignal = DriveSignal()

    def __post_init__(self):
        if not 0.0 <= self.transparency_blur < BLUR_BOUND <= self.transparency_clear <= 1.0:
            raise ValidationError(
                "need 0 <= transparency_blur < 0.10 <= transparency_clear <= 1, got "
                f"blur={self.transparency_blur}, clear={self.transparency_clear}"
            )
        if not (self.rise_us >= 0 and self.fall_us >= 0):
            raise ValidationError("rise_us and fall_us must be >= 0")

    def level(self, drive_on: bool) -> float:
        return self.transparency_clear if drive_on else self.transparency_blur

    def blur_onset_us(self) -> float:
        """Time from drive-off (starting fully clear) until transparency drops below 10 %."""
        span = self.transparency_clear - self.transparency_blur
        return self.fall_us * (self.transparency_clear - BLUR_BOUND) / span


class Segment(NamedTuple):
    """Half-open interval ``[start_us, end_us)`` with a linear level profile.

    Constant segments have ``start_level == end_level``.
    """

    start_us: float
    end_us: float
    start_level: float
    end_level: float

    @property
    def duration_us(self) -> float:
        return self.end_us - self.start_us

    @property
    def is_constant(self) -> bool:
        return self.start_level == self.end_level

    def at(self, t_us: float) -> float:
        if self.is_constant:
            return self.start_level
        frac = (t_us - self.start_us) / self.duration_us
        return self.start_level + frac * (self.end_level - self.start_level)


@dataclass(frozen=True)
class OpticalTimeline:
    segments: tuple[Segment, ...]

    def __post_init__(self):
        prev_end = 0.0
        for seg in self.segments:
            if seg.start_us != prev_end or not seg.end_us > seg.start_us:
                raise ValidationError(f"segments not contiguous/increasing at {seg}")
            if not (0 <= seg.start_level <= 1 and 0 <= seg.end_level <= 1):
                raise ValidationError(f"transparency outside [0, 1] in {seg}")
            prev_end = seg.end_us
        object.__setattr__(self, "_starts", [s.start_us for s in self.segments])

    @property
    def end_us(self) -> float:
        return self.segments[-1].end_us if self.segments else 0.0

    def __len__(self) -> int:
        return len(self.segments)

    def __iter__(self):
        return iter(self.segments)


def _check_order(commands: Sequence[GateCommand]) -> None:
    for prev, cur in zip(commands, commands[1:]):
        if cur.issue_us < prev.issue_us:
            raise SequencingError(
                f"command at {cur.issue_us} us follows one at {prev.issue_us} us"
            )


def apply_commands(
    model: ShutterModel,
    commands: Iterable[GateCommand],
    session_end_us: float,
    initial_drive_on: bool = True,
) -> OpticalTimeline:
    """Build the transparency timeline over ``[0, session_end_us]``.

    Commands that repeat the current drive state are ignored.
    """
    commands = list(commands)
    _check_order(commands)
    if commands and session_end_us < commands[-1].issue_us:
        raise ValidationError(
            f"session_end_us {session_end_us} precedes last command at {commands[-1].issue_us}"
        )
    if commands and commands[0].issue_us < 0:
        raise ValidationError("commands must not precede t=0")

    span = model.transparency_clear - model.transparency_blur
    segments: list[Segment] = []
    cur_t = 0.0
    level = model.level(initial_drive_on)
    drive = initial_drive_on
    ramp: Segment | None = None  # full planned ramp, may be cut short

    def emit(seg: Segment) -> None:
        if not seg.end_us > seg.start_us:
            return
        last = segments[-1] if segments else None
        if last and last.is_constant and seg.is_constant and last.end_level == seg.start_level:
            segments[-1] = last._replace(end_us=seg.end_us)
        else:
            segments.append(seg)

    def advance(t: float) -> None:
        nonlocal cur_t, level, ramp
        while cur_t < t:
            if ramp is not None:
                end = min(t, ramp.end_us)
                emit(Segment(cur_t, end, ramp.at(cur_t), ramp.at(end)))
                cur_t = end
                if end == ramp.end_us:
                    level, ramp = ramp.end_level, None
            else:
                emit(Segment(cur_t, t, level, level))
                cur_t = t
        if ramp is not None and cur_t < ramp.end_us:
            level = ramp.at(cur_t)

    for cmd in commands:
        if cmd.drive_on == drive:
            continue
        advance(cmd.issue_us)
        current = level
        target = model.level(cmd.drive_on)
        ramp_us = (model.rise_us if cmd.drive_on else model.fall_us) * abs(target - current) / span
        if ramp_us > 0:
            ramp = Segment(cmd.issue_us, cmd.issue_us + ramp_us, current, target)
        else:
            ramp, level = None, target
        drive = cmd.drive_on
    advance(session_end_us)
    return OpticalTimeline(tuple(segments))


def transparency_at(timeline: OpticalTimeline, t_us: float) -> float:
    if not timeline.segments or not 0 <= t_us <= timeline.end_us:
        raise ValidationError(f"t_us={t_us} outside timeline [0, {timeline.end_us}]")
    if t_us == timeline.end_us:
        return timeline.segments[-1].end_level
    i = bisect.bisect_right(timeline._starts, t_us) - 1
    return timeline.segments[i].at(t_us)

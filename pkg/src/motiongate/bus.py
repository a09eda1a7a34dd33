"""IIC transaction timing and the periodic gyro polling schedule.

Transaction model (declared, not measured): the processor writes the device
address and the register index, issues a repeated START, writes the address
again with the read bit and clocks in ``payload_bytes`` of data. Every byte
costs 9 clocks (8 data bits plus ACK/NACK); START, repeated START and STOP
are charged ``framing_clocks`` in total. With the defaults this is
``(9 * (3 + 6) + 3) / 200 kHz = 420 us``.

Clock stretching, NACK retries and bus faults are not modelled.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Iterator, overload

import numpy as np

from .errors import ScheduleInfeasibleError, ValidationError
from .trace import GyroSample, MotionTrace

CLOCKS_PER_BYTE = 9
DEFAULT_PERIOD_US = 1000


@dataclass(frozen=True)
class BusConfig:
    clock_hz: float = 200_000.0
    payload_bytes: int = 6
    addressing_bytes: int = 3
    framing_clocks: int = 3

    def __post_init__(self):
        if not self.clock_hz > 0:
            raise ValidationError(f"clock_hz must be > 0, got {self.clock_hz}")
        if self.payload_bytes < 1:
            raise ValidationError(f"payload_bytes must be >= 1, got {self.payload_bytes}")
        if self.addressing_bytes < 0 or self.framing_clocks < 0:
            raise ValidationError("addressing_bytes and framing_clocks must be >= 0")


def transaction_clocks(cfg: BusConfig) -> int:
    return CLOCKS_PER_BYTE * (cfg.addressing_bytes + cfg.payload_bytes) + cfg.framing_clocks


def transaction_duration_us(cfg: BusConfig) -> float:
    """Wall time of one gyro read in microseconds."""
    if not cfg.clock_hz > 0:
        raise ValidationError("clock_hz must be > 0")
    return transaction_clocks(cfg) * 1e6 / cfg.clock_hz


@dataclass(frozen=True)
class SampleEvent:
    request_us: int
    ready_us: float
    sample: GyroSample

    def __post_init__(self):
        if not self.ready_us > self.request_us:
            raise ValidationError("ready_us must be later than request_us")


class SampleSchedule(Sequence):
    """Read-only sequence of :class:`SampleEvent`, stored as arrays.

    ``request_us``, ``ready_us`` and ``omega`` are exposed directly for
    vectorised consumers; ``sample_t_us`` holds the timestamp of the trace
    sample that was held at each request.
    """

    def __init__(self, request_us, ready_us, sample_t_us, omega):
        self.request_us = np.asarray(request_us, dtype=np.int64)
        self.ready_us = np.asarray(ready_us, dtype=np.float64)
        self.sample_t_us = np.asarray(sample_t_us, dtype=np.int64)
        self.omega = np.asarray(omega, dtype=np.float64).reshape(-1, 3)

    def __len__(self) -> int:
        return int(self.request_us.shape[0])

    @overload
    def __getitem__(self, i: int) -> SampleEvent: ...
    @overload
    def __getitem__(self, i: slice) -> list[SampleEvent]: ...

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[k] for k in range(*i.indices(len(self)))]
        wx, wy, wz = self.omega[i].tolist()
        return SampleEvent(
            int(self.request_us[i]),
            float(self.ready_us[i]),
            GyroSample(int(self.sample_t_us[i]), wx, wy, wz),
        )

    def __iter__(self) -> Iterator[SampleEvent]:
        for k in range(len(self)):
            yield self[k]

    def __repr__(self) -> str:
        return f"SampleSchedule(n={len(self)})"


def sampling_schedule(
    trace: MotionTrace,
    period_us: int = DEFAULT_PERIOD_US,
    cfg: BusConfig | None = None,
) -> SampleSchedule:
    """Poll ``trace`` every ``period_us`` starting at t=0.

    Each request holds the latest trace sample at or before the request time
    (zero-order hold). Requests issued before the first trace sample have
    nothing to read and are dropped. Requests stop at the end of the trace.
    """
    cfg = cfg or BusConfig()
    if period_us <= 0 or int(period_us) != period_us:
        raise ValidationError(f"period_us must be a positive integer, got {period_us}")
    duration = transaction_duration_us(cfg)
    if not duration < period_us:
        raise ScheduleInfeasibleError(
            f"schedule infeasible: transaction takes {duration:g} us "
            f"but the sampling period is {period_us} us"
        )
    period_us = int(period_us)
    if not len(trace):
        return SampleSchedule([], [], [], np.zeros((0, 3)))
    requests = np.arange(0, trace.duration_us, period_us, dtype=np.int64)
    held = np.searchsorted(trace.t_us, requests, side="right") - 1
    keep = held >= 0
    requests, held = requests[keep], held[keep]
    return SampleSchedule(
        requests,
        requests + duration,
        trace.t_us[held],
        trace.omega[held],
    )

"""Head-motion traces: angular-velocity time series in degrees/second.

A trace is stored column-wise (integer microsecond timestamps plus an
``(n, 3)`` float array) so that twenty-minute sessions at 1 kHz stay cheap.
Individual samples are materialised as :class:`GyroSample` on access.

The CSV format is::

    t_us,wx_dps,wy_dps,wz_dps
    0,0.000000,0.000000,0.000000
    1000,5.000000,-3.000000,2.000000

Timestamps are written as integers and velocities with six decimals, so
``parse_trace(serialize_trace(t))`` is exact for any trace whose velocities
are already rounded to six decimals (generated traces are).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, NamedTuple, TextIO

import numpy as np

from .errors import ParseError, ValidationError

CSV_HEADER = "t_us,wx_dps,wy_dps,wz_dps"
VELOCITY_DECIMALS = 6


@dataclass(frozen=True)
class GyroSample:
    """One angular-velocity reading, degrees/second per axis."""

    t_us: int
    wx: float
    wy: float
    wz: float

    def __post_init__(self):
        if self.t_us < 0:
            raise ValidationError(f"t_us must be >= 0, got {self.t_us}")
        if not all(math.isfinite(w) for w in (self.wx, self.wy, self.wz)):
            raise ValidationError(f"non-finite angular velocity at t_us={self.t_us}")

    @property
    def omega(self) -> tuple[float, float, float]:
        return (self.wx, self.wy, self.wz)

    def __neg__(self) -> GyroSample:
        return GyroSample(self.t_us, -self.wx, -self.wy, -self.wz)


class MotionTrace:
    """Ordered gyro samples with a nominal sampling rate.

    Parameters
    ----------
    t_us : array_like of int
        Strictly increasing, non-negative timestamps in microseconds.
    omega : array_like, shape (n, 3)
        Angular velocity in degrees/second.
    nominal_rate_hz : float
        Rate of the underlying signal; used to define where the trace ends.
    """

    __slots__ = ("t_us", "omega", "nominal_rate_hz")

    def __init__(self, t_us, omega, nominal_rate_hz: float = 1000.0):
        t = np.asarray(t_us)
        if t.size and not np.issubdtype(t.dtype, np.integer):
            if not np.all(np.equal(np.mod(t, 1), 0)):
                raise ValidationError("timestamps must be integer microseconds")
        t = t.astype(np.int64).reshape(-1)
        w = np.asarray(omega, dtype=np.float64).reshape(-1, 3) if t.size else np.zeros((0, 3))
        if w.shape[0] != t.shape[0]:
            raise ValidationError(f"{t.shape[0]} timestamps but {w.shape[0]} velocity rows")
        if not nominal_rate_hz > 0:
            raise ValidationError(f"nominal_rate_hz must be > 0, got {nominal_rate_hz}")
        if t.size:
            if t[0] < 0:
                raise ValidationError("timestamps must be >= 0")
            bad = np.flatnonzero(np.diff(t) <= 0)
            if bad.size:
                i = int(bad[0]) + 1
                raise ValidationError(
                    f"timestamps not strictly increasing at sample {i} "
                    f"({int(t[i - 1])} then {int(t[i])})"
                )
            if not np.all(np.isfinite(w)):
                raise ValidationError("non-finite angular velocity in trace")
        t.flags.writeable = False
        w.flags.writeable = False
        self.t_us = t
        self.omega = w
        self.nominal_rate_hz = float(nominal_rate_hz)

    @classmethod
    def from_samples(cls, samples, nominal_rate_hz: float = 1000.0) -> MotionTrace:
        samples = list(samples)
        t = [s.t_us for s in samples]
        w = [s.omega for s in samples]
        return cls(np.array(t, dtype=np.int64), np.array(w, dtype=np.float64), nominal_rate_hz)

    def __len__(self) -> int:
        return int(self.t_us.shape[0])

    def __getitem__(self, i: int) -> GyroSample:
        wx, wy, wz = self.omega[i].tolist()
        return GyroSample(int(self.t_us[i]), wx, wy, wz)

    def __iter__(self) -> Iterator[GyroSample]:
        for t, (wx, wy, wz) in zip(self.t_us.tolist(), self.omega.tolist()):
            yield GyroSample(t, wx, wy, wz)

    @property
    def samples(self) -> list[GyroSample]:
        return list(self)

    @property
    def sample_interval_us(self) -> int:
        return max(1, round(1e6 / self.nominal_rate_hz))

    @property
    def duration_us(self) -> int:
        """End of the trace: last timestamp plus one nominal sample interval."""
        if not len(self):
            return 0
        return int(self.t_us[-1]) + self.sample_interval_us

    def __eq__(self, other) -> bool:
        if not isinstance(other, MotionTrace):
            return NotImplemented
        return (
            self.nominal_rate_hz == other.nominal_rate_hz
            and np.array_equal(self.t_us, other.t_us)
            and np.array_equal(self.omega, other.omega)
        )

    def __repr__(self) -> str:
        return (
            f"MotionTrace(n={len(self)}, duration_us={self.duration_us}, "
            f"nominal_rate_hz={self.nominal_rate_hz:g})"
        )


def _infer_rate(t_us: np.ndarray) -> float:
    if t_us.shape[0] < 2:
        return 1000.0
    return 1e6 / float(np.median(np.diff(t_us)))


def parse_trace(text: str | TextIO, nominal_rate_hz: float | None = None) -> MotionTrace:
    """Parse trace CSV text (or an open text stream) into a :class:`MotionTrace`.

    When ``nominal_rate_hz`` is omitted it is inferred from the median
    timestamp step (1 kHz for traces with fewer than two samples).
    """
    if not isinstance(text, str):
        text = text.read()
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0].strip() != CSV_HEADER:
        raise ParseError(f"expected header {CSV_HEADER!r}", line=1)

    ts: list[int] = []
    ws: list[tuple[float, float, float]] = []
    isfinite = math.isfinite
    prev = -1
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.rstrip("\r").split(",")
        if len(fields) != 4:
            raise ParseError(f"expected 4 columns, got {len(fields)}", line=lineno)
        try:
            t = int(fields[0])
            row = (float(fields[1]), float(fields[2]), float(fields[3]))
        except ValueError as exc:
            raise ParseError(f"non-numeric field ({exc})", line=lineno) from None
        if not (isfinite(row[0]) and isfinite(row[1]) and isfinite(row[2])):
            raise ParseError("non-finite angular velocity", line=lineno)
        if t < 0:
            raise ParseError(f"negative timestamp {t}", line=lineno)
        if t <= prev:
            raise ValidationError(
                f"line {lineno}: timestamps not strictly increasing ({prev} then {t})"
            )
        prev = t
        ts.append(t)
        ws.append(row)
    t_arr = np.array(ts, dtype=np.int64)
    w_arr = np.array(ws, dtype=np.float64).reshape(-1, 3)
    rate = nominal_rate_hz if nominal_rate_hz is not None else _infer_rate(t_arr)
    return MotionTrace(t_arr, w_arr, rate)


def serialize_trace(trace: MotionTrace) -> str:
    rows = [CSV_HEADER]
    rows.extend(
        "%d,%.6f,%.6f,%.6f" % (t, wx, wy, wz)
        for t, (wx, wy, wz) in zip(trace.t_us.tolist(), trace.omega.tolist())
    )
    return "\n".join(rows) + "\n"


def read_trace(path, nominal_rate_hz: float | None = None) -> MotionTrace:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_trace(fh, nominal_rate_hz)


def write_trace(path, trace: MotionTrace) -> None:
    Path(path).write_text(serialize_trace(trace), encoding="utf-8", newline="\n")


# --------------------------------------------------------------------------
# Synthetic session traces
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class TraceGenConfig:
    """Parameters of a synthetic viewing session.

    Defaults mirror the viewing protocol: a 20 minute session in which the
    participant never dwells on one target for more than 20 s. The noise,
    peak speed and turn duration are placeholders, not gyroscope datasheet
    values.
    """

    session_s: float = 1200.0
    max_fixation_s: float = 20.0
    fixation_noise_dps: float = 1.0
    turn_peak_dps: float = 100.0
    turn_duration_ms: float = 800.0
    seed: int = 0
    rate_hz: float = 1000.0

    def __post_init__(self):
        if not self.session_s > 0:
            raise ValidationError(f"session_s must be > 0, got {self.session_s}")
        if not self.max_fixation_s > 0:
            raise ValidationError(f"max_fixation_s must be > 0, got {self.max_fixation_s}")
        if not self.fixation_noise_dps >= 0:
            raise ValidationError("fixation_noise_dps must be >= 0")
        if not self.turn_peak_dps > self.fixation_noise_dps:
            raise ValidationError("turn_peak_dps must exceed fixation_noise_dps")
        if not self.turn_duration_ms > 0:
            raise ValidationError("turn_duration_ms must be > 0")
        if not 0 < self.rate_hz <= 1e6:
            raise ValidationError("rate_hz must be in (0, 1e6]")
        if int(self.seed) != self.seed or self.seed < 0:
            raise ValidationError(f"seed must be a non-negative integer, got {self.seed}")


class TurnSegment(NamedTuple):
    start_us: int
    end_us: int  # exclusive
    axis: int  # 0=x, 1=y, 2=z
    sign: int


def _rng(seed: int) -> np.random.Generator:
    # PCG64 is pinned explicitly so golden traces do not depend on numpy's default.
    return np.random.Generator(np.random.PCG64(int(seed)))


def _plan(cfg: TraceGenConfig, rng: np.random.Generator, n: int) -> list[tuple[int, int, int, int]]:
    rate = cfg.rate_hz
    turn_len = max(1, round(cfg.turn_duration_ms * rate / 1000.0))
    turn_s = turn_len / rate
    # Quiet time between two turns' supra-threshold parts is < fixation + one turn,
    # so capping fixation at max - turn keeps every inter-turn gap under the bound.
    if cfg.max_fixation_s > turn_s:
        hi = cfg.max_fixation_s - turn_s
        lo = 0.25 * hi
    else:
        hi, lo = cfg.max_fixation_s, 0.0
    plan = []
    cursor = 0
    while True:
        cursor += int(rng.uniform(lo, hi) * rate)
        if cursor >= n:
            break
        axis = int(rng.integers(3))
        sign = 1 if rng.random() < 0.5 else -1
        stop = min(n, cursor + turn_len)
        plan.append((cursor, stop, axis, sign))
        cursor += turn_len
    return plan


def _trapezoid(length: int) -> np.ndarray:
    ramp = max(1, length // 4)
    k = np.arange(length)
    return np.minimum(1.0, np.minimum(k + 1, length - k) / ramp)


def _n_samples(cfg: TraceGenConfig) -> int:
    return max(1, int(round(cfg.session_s * cfg.rate_hz)))


def _timestamps(n: int, rate_hz: float) -> np.ndarray:
    return np.round(np.arange(n) * (1e6 / rate_hz)).astype(np.int64)


def plan_session(cfg: TraceGenConfig) -> list[TurnSegment]:
    """Head turns that :func:`generate_session_trace` will place for ``cfg``."""
    n = _n_samples(cfg)
    t = _timestamps(n, cfg.rate_hz)
    step = round(1e6 / cfg.rate_hz)
    segments = []
    for start, stop, axis, sign in _plan(cfg, _rng(cfg.seed), n):
        end = int(t[stop]) if stop < n else int(t[-1]) + step
        segments.append(TurnSegment(int(t[start]), end, axis, sign))
    return segments


def generate_session_trace(cfg: TraceGenConfig | None = None) -> MotionTrace:
    """Synthesize a seated viewing session.

    Fixation periods are per-axis Gaussian noise with standard deviation
    ``fixation_noise_dps``; each head turn adds a trapezoidal velocity
    profile peaking at ``turn_peak_dps`` on one axis chosen uniformly at
    random, with random sign. Output is rounded to the CSV precision so a
    generated trace survives a file round trip unchanged.
    """
    cfg = cfg or TraceGenConfig()
    n = _n_samples(cfg)
    rng = _rng(cfg.seed)
    plan = _plan(cfg, rng, n)
    omega = rng.normal(0.0, cfg.fixation_noise_dps, size=(n, 3))
    turn_len = max(1, round(cfg.turn_duration_ms * cfg.rate_hz / 1000.0))
    profile = _trapezoid(turn_len) * cfg.turn_peak_dps
    for start, stop, axis, sign in plan:
        omega[start:stop, axis] += sign * profile[: stop - start]
    omega = np.round(omega, VELOCITY_DECIMALS)
    omega += 0.0  # normalise -0.0
    return MotionTrace(_timestamps(n, cfg.rate_hz), omega, cfg.rate_hz)

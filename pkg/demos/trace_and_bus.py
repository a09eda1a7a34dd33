"""
A synthetic head-motion trace and the bus that samples it
=========================================================

A session is a stream of near-still fixations broken by short head turns.
The bus polls the gyro once per millisecond; each read takes a fixed number
of clock cycles before the sample reaches the detector.
"""

import numpy as np

from motiongate import BusConfig, TraceGenConfig, generate_session_trace
from motiongate.trace import plan_session
from motiongate.bus import sampling_schedule, transaction_clocks, transaction_duration_us

# One minute of motion at 1 kHz, seeded so the numbers below are stable.
cfg = TraceGenConfig(session_s=60, seed=3)
trace = generate_session_trace(cfg)
print(len(trace), "samples,", trace.duration_us / 1e6, "s")

# The plan says where the turns are. Gaps between turns stay under the
# maximum fixation length.
turns = plan_session(cfg)
starts = np.array([t.start_us for t in turns])
print(len(turns), "turns; longest gap between turn starts:", np.diff(starts).max() / 1e6, "s")

# Speed is the largest absolute axis rate.
speed = np.abs(trace.omega).max(axis=1)
print("median speed %.2f dps, peak %.1f dps" % (np.median(speed), speed.max()))

# %%
# Bus timing
# ----------
# Nine clocks per byte (eight bits plus an ack), three address bytes, six
# payload bytes, and three clocks of start/stop framing.

bus = BusConfig()
print(transaction_clocks(bus), "clocks =", transaction_duration_us(bus), "us per read")

schedule = sampling_schedule(trace, 1000, bus)
print(len(schedule), "reads; first ready at", schedule.ready_us[0], "us")

# Each read sees the newest sample at or before the request.
lag = schedule.request_us - schedule.sample_t_us
print("request-to-sample lag: max", lag.max(), "us")

# A faster poll than the transaction allows is refused.
try:
    sampling_schedule(trace, 400, bus)
except ValueError as exc:
    print(exc)

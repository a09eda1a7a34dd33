"""
How fast the shutter blurs after a head turn starts
===================================================

The detector blurs the shutter when any axis reaches 6.1 dps. Latency is
counted from the first trace sample over the threshold to the command that
cuts the drive, so it includes waiting for the next bus read.
"""

import numpy as np

from motiongate import MotionTrace, SimConfig, TraceGenConfig, generate_session_trace, run_simulation

sim = SimConfig()
print("worst case by construction:", sim.worst_case_latency_us(), "us")

result = run_simulation(generate_session_trace(TraceGenConfig(session_s=120, seed=5)), sim)
lat = np.array([r.latency_us for r in result.latencies])
print(len(result.commands), "commands,", lat.size, "onsets")
print("latency min/mean/max: %.0f / %.0f / %.0f us" % (lat.min(), lat.mean(), lat.max()))
print("blurred %.1f %% of the session" % (100 * result.blur_fraction))

# %%
# The 1 kHz trace lines its onsets up with bus reads, so every latency is
# the same. Putting the onset one microsecond after a read shows the other
# end of the range.

late = MotionTrace([0, 1, 1000, 2000], [[0, 0, 0], [0, 10, 0], [0, 10, 0], [0, 10, 0]])
print("onset just after a read:", run_simulation(late).latencies[0].latency_us, "us")

# %%
# A slow liquid crystal adds its fall time before the view is actually
# below 10 % transparency.

from motiongate import ShutterModel

slow = SimConfig(shutter=ShutterModel(fall_us=2000), include_optical_latency=True)
print("with a 2 ms fall: %.0f us" % run_simulation(late, slow).latencies[0].latency_us)

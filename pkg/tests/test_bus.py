import numpy as np
import pytest

from motiongate.bus import BusConfig, SampleEvent, sampling_schedule, transaction_duration_us
from motiongate.errors import ScheduleInfeasibleError, ValidationError
from motiongate.trace import GyroSample, MotionTrace, TraceGenConfig, generate_session_trace
from oracles import held_index_bruteforce


def test_default_transaction_is_420us():
    # (9 * (3 + 6) + 3) clocks / 200 kHz
    assert transaction_duration_us(BusConfig()) == pytest.approx(84 / 200_000 * 1e6)
    assert transaction_duration_us(BusConfig()) == pytest.approx(420.0)


def test_single_byte_at_9mhz_is_one_us():
    cfg = BusConfig(clock_hz=9e6, payload_bytes=1, addressing_bytes=0, framing_clocks=0)
    assert transaction_duration_us(cfg) == pytest.approx(1.0)


@pytest.mark.parametrize("payload", [1, 6, 14])
def test_doubling_clock_halves_duration(payload):
    slow = transaction_duration_us(BusConfig(clock_hz=100_000, payload_bytes=payload))
    fast = transaction_duration_us(BusConfig(clock_hz=200_000, payload_bytes=payload))
    assert fast == pytest.approx(slow / 2)


def test_zero_clock_rejected():
    with pytest.raises(ValidationError):
        BusConfig(clock_hz=0)


def _three_ms_trace():
    return MotionTrace([0, 1000, 2000], [[1, 0, 0], [2, 0, 0], [3, 0, 0]])


def test_three_ms_schedule():
    sched = sampling_schedule(_three_ms_trace(), 1000, BusConfig())
    assert [e.request_us for e in sched] == [0, 1000, 2000]
    assert [e.ready_us for e in sched] == pytest.approx([420, 1420, 2420])
    assert [e.sample.wx for e in sched] == [1, 2, 3]


def test_empty_trace_empty_schedule():
    empty = MotionTrace([], np.zeros((0, 3)))
    assert len(sampling_schedule(empty)) == 0


def test_infeasible_period():
    with pytest.raises(ScheduleInfeasibleError, match="infeasible"):
        sampling_schedule(_three_ms_trace(), 400, BusConfig())


def test_fourteen_byte_burst_still_feasible():
    cfg = BusConfig(payload_bytes=14)
    assert transaction_duration_us(cfg) == pytest.approx((9 * 17 + 3) * 5)
    assert len(sampling_schedule(_three_ms_trace(), 1000, cfg)) == 3


def test_sample_and_hold_matches_bruteforce():
    rng = np.random.default_rng(3)
    t = np.cumsum(rng.integers(1, 3000, size=300))
    t[0] = 0
    w = rng.normal(size=(300, 3))
    tr = MotionTrace(t, w)
    sched = sampling_schedule(tr, 1000)
    t_list = t.tolist()
    for ev in sched:
        i = held_index_bruteforce(t_list, ev.request_us)
        assert ev.sample.t_us == t_list[i]
        assert ev.sample.omega == tuple(w[i])


def test_requests_before_first_sample_dropped():
    tr = MotionTrace([2500, 3000], [[1, 0, 0], [2, 0, 0]])
    assert [e.request_us for e in sampling_schedule(tr)] == [3000]


def test_schedule_ordering_and_spacing():
    tr = generate_session_trace(TraceGenConfig(session_s=5, seed=2))
    sched = sampling_schedule(tr)
    assert np.all(np.diff(sched.ready_us) == 1000)
    assert np.all(sched.ready_us > sched.request_us)
    assert len(sched) == 5000


def test_sample_event_invariant():
    with pytest.raises(ValidationError):
        SampleEvent(100, 100.0, GyroSample(0, 0, 0, 0))

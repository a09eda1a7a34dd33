import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from motiongate.bus import SampleEvent, SampleSchedule, sampling_schedule
from motiongate.detector import (
    DetectorConfig,
    GateCommand,
    GateState,
    Mode,
    classify_omega,
    classify_sample,
    run_gate,
    step,
)
from motiongate.errors import SequencingError, ValidationError
from motiongate.trace import GyroSample, MotionTrace

finite = st.floats(-1000, 1000, allow_nan=False)


def _event(ready, w, request=None):
    request = int(ready) - 1 if request is None else request
    return SampleEvent(request, float(ready), GyroSample(max(request, 0), *w))


@pytest.mark.parametrize(
    "w, expected",
    [
        ((5.0, -3.0, 2.0), False),
        ((0.0, 6.2, 0.0), True),
        ((0.0, 0.0, 0.0), False),
        ((0.0, -7.0, 0.0), True),
        ((6.1, 0.0, 0.0), True),  # equality blurs
        ((0.0, 0.0, -6.1), True),
        ((6.0999, 6.0999, -6.0999), False),
    ],
)
def test_classify_sample(w, expected):
    assert classify_sample(GyroSample(0, *w), DetectorConfig()) is expected


def test_classify_rejects_non_finite():
    with pytest.raises(ValidationError):
        classify_omega([[np.nan, 0, 0]])


def test_step_clear_to_blurred():
    state, cmd = step(GateState(), _event(1420, (0, 6.2, 0), request=1000), DetectorConfig())
    assert state.mode is Mode.BLURRED
    assert cmd == GateCommand(issue_us=1470, drive_on=False)


def test_step_no_chatter():
    state, cmd = step(GateState(), _event(420, (0, 0, 0)), DetectorConfig())
    assert state.mode is Mode.CLEAR
    assert cmd is None


def test_step_blurred_to_clear_dwell_zero():
    blurred = GateState(Mode.BLURRED, None, 4420.0)
    state, cmd = step(blurred, _event(5000, (1.0, 1.0, 1.0)), DetectorConfig(clear_dwell_us=0))
    assert state.mode is Mode.CLEAR
    assert cmd == GateCommand(issue_us=5050, drive_on=True)


def test_step_dwell_holds_blur():
    cfg = DetectorConfig(clear_dwell_us=2000)
    state = GateState(Mode.BLURRED, None, 0.0)
    cmds = []
    for k, ready in enumerate([1420, 2420, 3420, 4420]):
        state, cmd = step(state, _event(ready, (0, 0, 0)), cfg)
        cmds.append(cmd)
    # below since 1420; 3420 - 1420 >= 2000 releases
    assert cmds[:2] == [None, None]
    assert cmds[2] == GateCommand(3470, True)
    assert cmds[3] is None


def test_step_out_of_order():
    state, _ = step(GateState(), _event(2000, (0, 0, 0)))
    with pytest.raises(SequencingError):
        step(state, _event(1000, (0, 0, 0)))


def test_config_validation():
    for kw in ({"threshold_dps": 0}, {"clear_dwell_us": -1}, {"processing_delay_us": -1}):
        with pytest.raises(ValidationError):
            DetectorConfig(**kw)


@given(finite, finite, finite)
def test_sign_symmetry(wx, wy, wz):
    s = GyroSample(0, wx, wy, wz)
    assert classify_sample(s) == classify_sample(-s)


@given(finite, finite, finite, st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_monotonicity(wx, wy, wz, a, b, c):
    s = GyroSample(0, wx, wy, wz)
    smaller = GyroSample(0, wx * a, wy * b, wz * c)
    if not classify_sample(s):
        assert not classify_sample(smaller)


def _fold(schedule, cfg, state=None):
    state = state or GateState()
    modes, cmds = [], []
    for ev in schedule:
        state, cmd = step(state, ev, cfg)
        modes.append(state.mode is Mode.BLURRED)
        if cmd:
            cmds.append(cmd)
    return state, np.array(modes, dtype=bool), cmds


def _random_schedule(seed, n=2000, scale=6.0):
    rng = np.random.default_rng(seed)
    req = np.arange(n) * 1000
    return SampleSchedule(req, req + 420.0, req, rng.normal(0, scale, size=(n, 3)))


@pytest.mark.parametrize("dwell", [0, 1000, 2500, 10_000])
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_run_gate_matches_stepwise_fold(seed, dwell):
    cfg = DetectorConfig(clear_dwell_us=dwell)
    sched = _random_schedule(seed)
    run = run_gate(sched, cfg)
    final, modes, cmds = _fold(sched, cfg)
    assert run.commands == cmds
    assert np.array_equal(run.blurred, modes)
    assert run.final_state == final


def test_commands_alternate():
    run = run_gate(_random_schedule(9, n=5000), DetectorConfig(clear_dwell_us=1500))
    flags = [c.drive_on for c in run.commands]
    assert flags[0] is False
    assert all(flags[i] != flags[i + 1] for i in range(len(flags) - 1))


def test_replay_is_deterministic():
    sched = _random_schedule(4)
    a, b = run_gate(sched), run_gate(sched)
    assert a.commands == b.commands
    assert np.array_equal(a.blurred, b.blurred)
    assert a.final_state == b.final_state


def test_run_gate_from_trace():
    tr = MotionTrace([0, 1000, 2000, 3000], [[0, 0, 0], [0, 9, 0], [0, 0, 0], [0, 0, 0]])
    run = run_gate(sampling_schedule(tr))
    assert run.commands == [GateCommand(1470.0, False), GateCommand(2470.0, True)]

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cdnf import (
    DimensionError,
    ModelParams,
    ModelState,
    ParameterError,
    StimulusSpec,
    gen_coherent,
    integrate,
    process_frame,
    rectify,
    run_sequence,
    spike,
)
from cdnf.model import logistic


def test_params_defaults():
    p = ModelParams()
    assert p.i_thre == pytest.approx(0.506)
    assert p.i_thre == 0.5 + p.epsilon
    assert p.alpha_on + p.alpha_off == 1.0
    assert p.sigma2 == pytest.approx(1.0)
    with pytest.raises(ParameterError):
        ModelParams(integration_gate="bogus")
    with pytest.raises(ParameterError):
        ModelParams(sigma_c=0)


def test_integrate_examples():
    assert integrate(np.full((4, 4), -0.3)) == 0.5
    assert integrate(np.ones((4, 4))) == pytest.approx(0.73106, abs=5e-6)
    assert logistic(-1.0) == pytest.approx(0.26894, abs=5e-6)


def test_integrate_gates():
    v = np.array([[0.1, 0.3], [-1.0, 0.0]])
    pos = integrate(v, ModelParams())
    above = integrate(v, ModelParams(integration_gate="above_h"))
    assert pos > above > 0.5
    from cdnf import theta

    assert above == pytest.approx(logistic(theta(0.3) / 4))


@pytest.mark.parametrize("iv,expected", [(0.5, False), (0.507, True), (0.506, False)])
def test_spike_threshold(iv, expected):
    assert spike(iv) is expected


def test_identical_frames_give_baseline():
    frames = np.full((2, 20, 20), 0.6)
    trace = run_sequence(frames)
    assert len(trace) == 2
    np.testing.assert_array_equal(trace.iv, 0.5)
    assert trace.first_spike is None
    assert trace.non_converged_frames == []


def test_singleton_clip_rejected():
    with pytest.raises(DimensionError):
        run_sequence(np.zeros((1, 10, 10)))


def test_resolution_mismatch():
    state = ModelState.initial((10, 10))
    with pytest.raises(DimensionError):
        process_frame(state, np.zeros((10, 11)))


def test_first_frame_sees_no_change():
    state = ModelState.initial((12, 12))
    state, record, snap = process_frame(state, np.eye(12), keep_snapshot=True)
    assert record.t == 0 and record.iv == 0.5
    np.testing.assert_array_equal(snap["p_on"], 0.0)
    assert state.t == 1


def test_determinism():
    seq = gen_coherent(StimulusSpec(resolution=(60, 60), duration=20))
    a, b = run_sequence(seq), run_sequence(seq)
    np.testing.assert_array_equal(a.iv, b.iv)


def test_iv_never_below_baseline_with_positive_gate():
    rng = np.random.default_rng(5)
    trace = run_sequence(rng.random((6, 30, 30)))
    assert (trace.iv >= 0.5).all() and (trace.iv < 1).all()


def test_snapshots_shape():
    seq = gen_coherent(StimulusSpec(resolution=(40, 40), duration=5))
    trace = run_sequence(seq, snapshots=True)
    assert len(trace.snapshots) == 5
    assert set(trace.snapshots[2]) == {"p_on", "p_off", "u_on", "u_off", "v_s"}


def test_time_reversal_swaps_on_off():
    seq = gen_coherent(StimulusSpec(resolution=(50, 50), duration=12)).frames
    rev = seq[::-1]
    T = len(seq)
    for k in range(1, T):
        on, off = rectify(seq[k] - seq[k - 1])
        # the same transition played backwards
        r_on, r_off = rectify(rev[T - k] - rev[T - k - 1])
        np.testing.assert_array_equal(on, r_off)
        np.testing.assert_array_equal(off, r_on)


def test_cold_start_receding_matches_inverted_reversed_looming():
    spec = StimulusSpec(resolution=(60, 60), duration=16)
    loom = gen_coherent(spec)
    recede = gen_coherent(StimulusSpec(**dict(spec.to_dict(), kind="receding"))).frames
    params = ModelParams().with_solver(warm_start=False)
    # playing a receding clip backwards with inverted contrast reproduces the
    # looming clip's ON/OFF inputs frame for frame
    mirrored = (1.0 - recede)[::-1]
    np.testing.assert_array_equal(1.0 - mirrored, loom.frames)
    a = run_sequence(loom.inverted(), params).iv
    b = run_sequence(1.0 - loom.frames, params).iv
    np.testing.assert_array_equal(a, b)


@settings(max_examples=10, deadline=None)
@given(st.floats(0, 1), st.integers(2, 4))
def test_static_scene_property(level, T):
    trace = run_sequence(np.full((T, 16, 16), level))
    np.testing.assert_array_equal(trace.iv, 0.5)
    assert not trace.spikes.any()


def test_dark_looming_spikes_translating_does_not():
    loom = run_sequence(gen_coherent(StimulusSpec(kind="looming")))
    bar = run_sequence(gen_coherent(StimulusSpec(kind="translating")))
    assert loom.first_spike is not None
    assert bar.first_spike is None

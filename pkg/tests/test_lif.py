import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from neurorx.errors import ConfigurationError, StimulusError
from neurorx.lif import (
    LifParams, LifState, integrate_interval, interspike_interval, run_on_waveform, simulate_samples,
)
from neurorx.signal import Waveform

from oracles import stepped_lif

NOMINAL = LifParams(tau_m_us=0.5, v_th=0.5)


def test_first_spike_time():
    _, spikes = integrate_interval(LifState(), NOMINAL, 1.0, 1.0)
    assert spikes[0] == pytest.approx(0.34657, abs=1e-3)  # 1 ns
    assert spikes[0] == pytest.approx(0.5 * math.log(2), rel=1e-12)


def test_subthreshold_input_never_fires():
    state, spikes = integrate_interval(LifState(), NOMINAL, 0.4, 1000.0)
    assert spikes == []
    assert state.v == pytest.approx(0.4)


def test_fourteen_spikes_per_symbol():
    _, spikes = integrate_interval(LifState(), NOMINAL, 1.0, 5.0)
    assert len(spikes) == 14 == math.floor(5 / (0.5 * math.log(2)))


def test_waveform_constant_plus_one():
    w = Waveform(np.ones(64), 64, 5.0)
    assert len(run_on_waveform(NOMINAL, w)) == 14


@pytest.mark.parametrize("level", [0.0, -1.0])
def test_waveform_silent_or_negative(level):
    w = Waveform(np.full(640, level), 64, 5.0)
    assert len(run_on_waveform(NOMINAL, w)) == 0


def test_empty_waveform_rejected():
    with pytest.raises(ValueError):
        run_on_waveform(NOMINAL, Waveform(np.zeros(0), 64, 5.0))


@pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
def test_invalid_stimulus(bad):
    with pytest.raises(StimulusError, match="invalid stimulus"):
        integrate_interval(LifState(), NOMINAL, bad, 1.0)
    with pytest.raises(StimulusError):
        run_on_waveform(NOMINAL, Waveform(np.array([0.0, bad]), 64, 5.0))


def test_params_validation():
    with pytest.raises(ConfigurationError):
        LifParams(v_th=0.0)
    with pytest.raises(ConfigurationError):
        LifParams(v_reset=0.6)
    with pytest.raises(ConfigurationError):
        LifParams(tau_m_us=0.0)
    assert LifParams(v_rest=-0.2).v_reset == -0.2


@pytest.mark.parametrize("current", [0.6, 1.0, 2.0, 7.5])
def test_interspike_interval_closed_form(current):
    _, spikes = integrate_interval(LifState(), NOMINAL, current, 20.0)
    isi = np.diff(spikes)
    expected = 0.5 * math.log(current / (current - 0.5))
    assert np.allclose(isi, expected, rtol=0, atol=1e-12)
    assert interspike_interval(NOMINAL, current) == pytest.approx(expected)


def test_many_spikes_within_one_interval():
    _, spikes = integrate_interval(LifState(), NOMINAL, 20.0, 1.0)
    assert len(spikes) == math.floor(1.0 / (0.5 * math.log(20 / 19.5)))


def test_refractory_period_extends_interval():
    p = LifParams(tau_m_us=0.5, v_th=0.5, refractory_us=0.1)
    _, spikes = integrate_interval(LifState(), p, 1.0, 5.0)
    assert np.allclose(np.diff(spikes), 0.5 * math.log(2) + 0.1)
    # refractoriness carries over sample boundaries
    train, _, _ = simulate_samples(p, np.ones(64), 5 / 64)
    assert np.allclose(train.times_us, spikes)


def test_perfect_integrator():
    p = LifParams(tau_m_us=0.5, v_th=0.5, leak_enabled=False)
    _, spikes = integrate_interval(LifState(), p, 1.0, 1.0)
    assert np.allclose(spikes, [0.25, 0.5, 0.75])
    # without leak a negative input drives the membrane down linearly
    state, _ = integrate_interval(LifState(), p, -1.0, 1.0)
    assert state.v == pytest.approx(-2.0)


def test_chaining_matches_single_interval():
    s1, a = integrate_interval(LifState(), NOMINAL, 1.3, 1.7)
    s2, b = integrate_interval(s1, NOMINAL, 1.3, 2.3)
    _, whole = integrate_interval(LifState(), NOMINAL, 1.3, 4.0)
    assert np.allclose(a + b, whole, atol=1e-12)
    assert s2.t_us == pytest.approx(4.0)


def test_spike_on_boundary_fires_in_next_interval():
    t_star = 0.5 * math.log(2)
    state, spikes = integrate_interval(LifState(), NOMINAL, 1.0, t_star)
    assert spikes == [] or spikes[0] < t_star
    if not spikes:
        _, nxt = integrate_interval(state, NOMINAL, 1.0, 0.1)
        assert nxt[0] == pytest.approx(t_star, abs=1e-12)


segments_st = st.lists(
    st.tuples(st.integers(50, 400).map(lambda n: n / 1000), st.floats(-1.5, 4.0)),
    min_size=1, max_size=12,
)


@settings(max_examples=40, deadline=None)
@given(segments=segments_st)
def test_matches_stepped_reference(segments):
    state, exact = LifState(), []
    for dur, cur in segments:
        state, sp = integrate_interval(state, NOMINAL, cur, dur)
        exact += sp
    ref = stepped_lif(segments)
    assert len(exact) == len(ref)
    assert np.all(np.abs(np.array(exact) - ref) <= 2e-3)


@given(x=st.lists(st.floats(-3, 6), min_size=1, max_size=200), shift=st.integers(1, 50))
def test_time_invariance(x, shift):
    dt = 5 / 64
    base, _, _ = simulate_samples(NOMINAL, x, dt)
    delayed, _, _ = simulate_samples(NOMINAL, [0.0] * shift + x, dt)
    assert np.allclose(delayed.times_us, base.times_us + shift * dt, atol=1e-9)
    offset, _, _ = simulate_samples(NOMINAL, x, dt, LifState(t_us=2.5))
    assert np.allclose(offset.times_us, base.times_us + 2.5, atol=1e-9)


@given(i1=st.floats(0.51, 10), extra=st.floats(0, 10), horizon=st.floats(0.1, 20))
def test_spike_count_monotone_in_input(i1, extra, horizon):
    _, a = integrate_interval(LifState(), NOMINAL, i1, horizon)
    _, b = integrate_interval(LifState(), NOMINAL, i1 + extra, horizon)
    assert len(b) >= len(a)


@given(x=st.lists(st.floats(-50, 50), min_size=1, max_size=100))
def test_potential_never_above_threshold(x):
    state = LifState()
    for v in x:
        state, _ = integrate_interval(state, NOMINAL, v, 5 / 64)
        assert state.v <= NOMINAL.v_th


def test_per_sample_counts_agree_with_times():
    rng = np.random.default_rng(5)
    x = 1 + 4 * rng.standard_normal(5000)
    train, counts, _ = simulate_samples(NOMINAL, x, 5 / 64)
    assert counts.sum() == len(train)
    idx = np.floor(train.times_us / (5 / 64) + 1e-9).astype(int)
    assert np.array_equal(np.bincount(idx, minlength=len(x)), counts)

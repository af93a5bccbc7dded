import math
from dataclasses import replace

import pytest

from neurorx.errors import ConfigurationError, TrialError
from neurorx.harness import (
    DetectorSpec, ExperimentSpec, parse_detector, power_profile, raster_trace, run_ber_sweep,
    run_preamble_sweep, run_trial, wilson_interval,
)

ALL = ("neuro-static", "neuro-adaptive", "adc-8", "adc-32", "adc-64", "ideal-ml")


def small(**kw):
    base = dict(snr_points_db=(0.0,), trials_per_point=20, bits_per_frame=4, detectors=ALL, master_seed=11)
    base.update(kw)
    return ExperimentSpec(**base)


def test_parse_detector():
    assert parse_detector("adc-32") == DetectorSpec("adc", 32)
    assert parse_detector("neuro-adaptive", 50).preamble_symbols == 50
    assert parse_detector("neuro-static").preamble_symbols == 0
    with pytest.raises(ConfigurationError):
        parse_detector("adc-x")
    with pytest.raises(ConfigurationError):
        parse_detector("matched-filter")


@pytest.mark.parametrize("kw", [dict(trials_per_point=0), dict(bits_per_frame=0), dict(detectors=()),
                                dict(snr_points_db=()), dict(master_seed=-1), dict(master_seed=2**64),
                                dict(detectors=("adc-48",))])
def test_invalid_specs(kw):
    with pytest.raises(ConfigurationError):
        small(**kw)


@pytest.mark.parametrize("det", ALL)
def test_noiseless_trial_has_no_errors(det):
    spec = small(snr_points_db=(math.inf,), detectors=(det,), bits_per_frame=20)
    assert all(run_trial(spec, spec.detectors[0], 0, t) == 0 for t in range(5))


def test_trial_determinism():
    spec = small(snr_points_db=(-2.0,))
    for det in spec.detectors:
        assert [run_trial(spec, det, 0, t) for t in range(5)] == [run_trial(spec, det, 0, t) for t in range(5)]


def test_trial_index_bounds():
    spec = small()
    with pytest.raises(ValueError):
        run_trial(spec, spec.detectors[0], 0, spec.trials_per_point)


def test_trial_errors_carry_context(monkeypatch):
    import neurorx.harness as h

    def boom(*a, **k):
        raise RuntimeError("detector exploded")

    spec = small(detectors=("ideal-ml",))
    monkeypatch.setattr(h, "apply_awgn", boom)
    with pytest.raises(TrialError, match="ideal-ml") as info:
        run_trial(spec, spec.detectors[0], 0, 3)
    assert info.value.trial_index == 3


def test_sweep_records_shape_and_invariants():
    spec = small(snr_points_db=(-2.0, 4.0))
    recs = run_ber_sweep(spec)
    assert [(r.snr_db, r.detector) for r in recs] == [(s, d) for s in (-2.0, 4.0) for d in ALL]
    for r in recs:
        assert r.ber == r.bit_errors / (spec.trials_per_point * spec.bits_per_frame)
        assert 0 <= r.ci95_low <= r.ber <= r.ci95_high <= 1
        assert r.trials == 20 and r.repetition == 3
    assert {r.detector: r.preamble_symbols for r in recs}["neuro-adaptive"] == 300
    assert {r.detector: r.samples_per_symbol for r in recs}["adc-8"] == 8


def test_results_independent_of_worker_count():
    spec = small(detectors=("neuro-adaptive", "adc-8"), trials_per_point=12)
    assert run_ber_sweep(spec) == run_ber_sweep(replace(spec, workers=2))


def test_detector_streams_are_distinct():
    spec = small(detectors=("adc-64", "adc-32"))
    a, b = spec.detectors
    assert a.key != b.key


def test_preamble_sweep_records():
    spec = small(detectors=("neuro-adaptive",), trials_per_point=5)
    recs = run_preamble_sweep(spec, [5, 20])
    assert [(r.preamble_symbols, r.detector) for r in recs] == [(5, "neuro-adaptive"), (20, "neuro-adaptive")]


def test_preamble_sweep_rejects_zero_length():
    with pytest.raises(ConfigurationError, match="no calibration interval"):
        run_preamble_sweep(small(detectors=("neuro-adaptive",)), [0, 5])


def test_wilson_interval_known_value():
    # 10 errors in 100: Wilson 95% interval
    z = 1.959963984540054
    p, n = 0.1, 100
    centre = (p + z * z / (2 * n)) / (1 + z * z / n)
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / (1 + z * z / n)
    lo, hi = wilson_interval(10, 100)
    assert lo == pytest.approx(centre - half) and hi == pytest.approx(centre + half)


def test_pure_noise_ber_is_half():
    spec = small(snr_points_db=(-60.0,), trials_per_point=4000, bits_per_frame=1,
                 detectors=("neuro-static", "adc-8", "ideal-ml"), repetition=1)
    for r in run_ber_sweep(spec):
        if r.detector != "neuro-static":
            assert r.ci95_low <= 0.5 <= r.ci95_high


def test_ber_falls_with_snr():
    spec = small(snr_points_db=(-2.0, 0.0, 2.0, 4.0), trials_per_point=1500, bits_per_frame=1,
                 detectors=("neuro-static", "adc-32", "ideal-ml"))
    recs = run_ber_sweep(spec)
    for det in ("neuro-static", "adc-32", "ideal-ml"):
        curve = [r for r in recs if r.detector == det]
        for a, b in zip(curve, curve[2:]):  # +4 dB apart
            assert b.ci95_low <= a.ci95_high
            assert b.ber <= a.ber


def test_raster_trace_noiseless():
    tx, rx, spikes, plan = raster_trace(n_symbols=20, snr_db=math.inf, preamble_symbols=0, bits=[1] * 20)
    assert (rx.samples == tx.samples).all()
    assert len(spikes) in (288, 289)  # 20 symbols x 14.4


def test_power_profiles():
    counts, elapsed = power_profile("silent", n_bits=10)
    assert counts == {"selif": 0, "sdlif": 0}
    assert elapsed == pytest.approx(150.0)
    counts, _ = power_profile("ones", n_bits=1, repetition=1)
    assert counts["selif"] == 14
    with pytest.raises(ConfigurationError):
        power_profile("bursty")

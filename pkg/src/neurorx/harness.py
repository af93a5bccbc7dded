"""Seeded Monte Carlo BER experiments.

Every trial draws its bits and noise from a private stream keyed by
``(master_seed, snr_index, detector key, trial_index)``, so results are
identical whatever the number of workers or the order trials run in.
"""

from __future__ import annotations

import functools
import logging
import math
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy.stats import binomtest

from . import digital_rx, neuro_rx
from .channel import NoiseModel, NoiseSpec, apply_awgn, noise_rng
from .errors import ConfigurationError, TrialError
from .lif import LifParams
from .signal import FramePlan, build_frame

log = logging.getLogger(__name__)

__all__ = [
    "DETECTOR_KINDS",
    "DEFAULT_DETECTORS",
    "DetectorSpec",
    "ExperimentSpec",
    "BerRecord",
    "parse_detector",
    "run_trial",
    "run_ber_sweep",
    "run_preamble_sweep",
    "wilson_interval",
]

DETECTOR_KINDS = ("neuro-static", "neuro-adaptive", "adc", "ideal-ml")
DEFAULT_DETECTORS = ("neuro-static", "neuro-adaptive", "adc-8", "adc-32", "adc-64", "ideal-ml")
DEFAULT_SNR_GRID = tuple(float(s) for s in range(-2, 11))


@dataclass(frozen=True)
class DetectorSpec:
    kind: str
    samples_per_symbol: int | None = None  # ADC only
    preamble_symbols: int = 0  # adaptive only

    def __post_init__(self):
        if self.kind not in DETECTOR_KINDS:
            raise ConfigurationError(f"unknown detector kind {self.kind!r}")
        if self.kind == "adc" and not self.samples_per_symbol:
            raise ConfigurationError("ADC detector needs samples_per_symbol")

    @property
    def name(self) -> str:
        return f"adc-{self.samples_per_symbol}" if self.kind == "adc" else self.kind

    @property
    def key(self) -> int:
        return zlib.crc32(f"{self.name}/p{self.preamble_symbols}".encode())


def parse_detector(name: str, preamble_symbols: int = 300) -> DetectorSpec:
    """``neuro-static``, ``neuro-adaptive``, ``ideal-ml`` or ``adc-<samples/symbol>``."""
    name = name.strip()
    if name.startswith("adc-"):
        try:
            sps = int(name[4:])
        except ValueError:
            raise ConfigurationError(f"bad ADC detector {name!r}") from None
        return DetectorSpec("adc", samples_per_symbol=sps)
    if name == "neuro-adaptive":
        return DetectorSpec(name, preamble_symbols=preamble_symbols)
    return DetectorSpec(name)


@dataclass(frozen=True)
class ExperimentSpec:
    snr_points_db: tuple[float, ...] = DEFAULT_SNR_GRID
    trials_per_point: int = 100_000
    bits_per_frame: int = 100
    detectors: tuple[DetectorSpec, ...] = tuple(parse_detector(d) for d in DEFAULT_DETECTORS)
    master_seed: int = 2025
    noise_model: NoiseModel = NoiseModel.BANDWIDTH_SCALED
    repetition: int = 3
    symbol_duration_us: float = 5.0
    samples_per_symbol: int = 64
    selif: LifParams = field(default_factory=LifParams)
    dv_m: float = 1.0
    adc_bits: int = 2
    adc_full_scale: float = 2.0
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "snr_points_db", tuple(float(s) for s in self.snr_points_db))
        object.__setattr__(self, "noise_model", NoiseModel(self.noise_model))
        dets = tuple(parse_detector(d) if isinstance(d, str) else d for d in self.detectors)
        object.__setattr__(self, "detectors", dets)
        if self.trials_per_point < 1:
            raise ConfigurationError("trials_per_point must be >= 1")
        if self.bits_per_frame < 1:
            raise ConfigurationError("bits_per_frame must be >= 1")
        if not self.detectors:
            raise ConfigurationError("at least one detector is required")
        if not self.snr_points_db:
            raise ConfigurationError("at least one SNR point is required")
        if self.master_seed < 0 or self.master_seed >= 2**64:
            raise ConfigurationError("master_seed must be an unsigned 64-bit integer")
        if self.workers < 1:
            raise ConfigurationError("workers must be >= 1")
        for d in self.detectors:
            _receiver(self, d)  # surface configuration errors before any trial runs


@dataclass(frozen=True)
class BerRecord:
    snr_db: float
    detector: str
    repetition: int
    samples_per_symbol: int | None
    preamble_symbols: int
    trials: int
    bit_errors: int
    ber: float
    ci95_low: float
    ci95_high: float


def wilson_interval(errors: int, n: int) -> tuple[float, float]:
    ci = binomtest(int(errors), int(n)).proportion_ci(0.95, method="wilson")
    return float(ci.low), float(ci.high)


@functools.lru_cache(maxsize=64)
def _receiver(spec: ExperimentSpec, det: DetectorSpec) -> tuple[FramePlan, Callable]:
    plan = FramePlan(
        data_bits=(),
        repetition=spec.repetition,
        preamble_symbols=det.preamble_symbols,
        symbol_duration_us=spec.symbol_duration_us,
        base_samples_per_symbol=spec.samples_per_symbol,
    )
    if det.kind == "ideal-ml":
        return plan, digital_rx.ideal_ml_detect
    if det.kind == "adc":
        cfg = digital_rx.AdcConfig(spec.adc_bits, det.samples_per_symbol, spec.adc_full_scale)
        if spec.samples_per_symbol % cfg.samples_per_symbol:
            raise ConfigurationError(
                f"incompatible rate: {cfg.samples_per_symbol} does not divide {spec.samples_per_symbol}"
            )
        return plan, functools.partial(_digital, cfg=cfg)
    mode = neuro_rx.AdaptiveThreshold() if det.kind == "neuro-adaptive" else neuro_rx.StaticThreshold()
    cfg = neuro_rx.NeuroDetectorConfig(
        selif=spec.selif,
        dv_m=spec.dv_m,
        threshold_mode=mode,
        repetition=spec.repetition,
        preamble_symbols=det.preamble_symbols,
    )
    return plan, functools.partial(_neuro, cfg=cfg)


def _digital(rx, plan, cfg):
    return digital_rx.receive(rx, plan, cfg)


def _neuro(rx, plan, cfg):
    return neuro_rx.detect_bits(neuro_rx.encode(cfg.selif, rx), plan, cfg)[0]


def run_trial(spec: ExperimentSpec, detector: DetectorSpec, snr_index: int, trial_index: int) -> int:
    """Bit errors of one independent frame at ``spec.snr_points_db[snr_index]``."""
    if not 0 <= trial_index < spec.trials_per_point:
        raise ValueError(f"trial index {trial_index} out of range")
    snr_db = spec.snr_points_db[snr_index]
    try:
        template, detect = _receiver(spec, detector)
        rng = noise_rng([spec.master_seed, snr_index, detector.key, trial_index])
        bits = rng.integers(0, 2, spec.bits_per_frame)
        plan = template.with_bits(bits)
        rx = apply_awgn(build_frame(plan), NoiseSpec(snr_db, spec.noise_model), rng=rng)
        return int(np.count_nonzero(detect(rx, plan) != bits))
    except Exception as exc:
        raise TrialError(str(exc), detector=detector.name, snr_db=snr_db, trial_index=trial_index) from exc


def _run_chunk(args) -> int:
    spec, det, snr_index, start, stop = args
    return sum(run_trial(spec, det, snr_index, t) for t in range(start, stop))


def _chunks(spec: ExperimentSpec, jobs, chunk: int):
    for det, snr_index in jobs:
        for start in range(0, spec.trials_per_point, chunk):
            yield spec, det, snr_index, start, min(start + chunk, spec.trials_per_point)


def _count_errors(spec: ExperimentSpec, jobs: Sequence[tuple[DetectorSpec, int]]) -> dict:
    chunk = max(1, math.ceil(spec.trials_per_point / (4 * spec.workers)))
    tasks = list(_chunks(spec, jobs, chunk))
    totals = {(det, i): 0 for det, i in jobs}
    if spec.workers == 1:
        results = map(_run_chunk, tasks)
    else:
        pool = ProcessPoolExecutor(max_workers=spec.workers)
        results = pool.map(_run_chunk, tasks)
    try:
        for task, errors in zip(tasks, results):
            totals[(task[1], task[2])] += errors
    finally:
        if spec.workers > 1:
            pool.shutdown(cancel_futures=True)
    return totals


def _record(spec: ExperimentSpec, det: DetectorSpec, snr_index: int, errors: int) -> BerRecord:
    n_bits = spec.trials_per_point * spec.bits_per_frame
    low, high = wilson_interval(errors, n_bits)
    return BerRecord(
        snr_db=spec.snr_points_db[snr_index],
        detector=det.name,
        repetition=spec.repetition,
        samples_per_symbol=det.samples_per_symbol,
        preamble_symbols=det.preamble_symbols,
        trials=spec.trials_per_point,
        bit_errors=errors,
        ber=errors / n_bits,
        ci95_low=low,
        ci95_high=high,
    )


def run_ber_sweep(spec: ExperimentSpec) -> list[BerRecord]:
    """One record per (SNR point, detector), SNR-major."""
    jobs = [(det, i) for i in range(len(spec.snr_points_db)) for det in spec.detectors]
    log.info("BER sweep: %d jobs x %d trials", len(jobs), spec.trials_per_point)
    totals = _count_errors(spec, jobs)
    return [_record(spec, det, i, totals[(det, i)]) for det, i in jobs]


def run_preamble_sweep(spec: ExperimentSpec, preamble_lengths: Sequence[int]) -> list[BerRecord]:
    """Adaptive-threshold detector at each preamble length; one record per
    (SNR point, length)."""
    detectors = tuple(DetectorSpec("neuro-adaptive", preamble_symbols=int(p)) for p in preamble_lengths)
    return run_ber_sweep(replace(spec, detectors=detectors))


def raster_trace(
    n_symbols: int = 20,
    snr_db: float = 4.0,
    preamble_symbols: int = 5,
    repetition: int = 1,
    seed: int = 0,
    bits: Sequence[int] | None = None,
    symbol_duration_us: float = 5.0,
    samples_per_symbol: int = 64,
    noise_model: NoiseModel | str = NoiseModel.BANDWIDTH_SCALED,
    selif: LifParams | None = None,
):
    """Transmitted and received waveforms plus the encoder's spikes for one
    frame of ``n_symbols`` data symbols. Returns ``(tx, rx, spikes, plan)``."""
    if n_symbols < 1 or n_symbols % repetition:
        raise ConfigurationError("symbol count must be a positive multiple of the repetition factor")
    rng = noise_rng([seed, 0])
    if bits is None:
        bits = rng.integers(0, 2, n_symbols // repetition)
    plan = FramePlan(tuple(bits), repetition, preamble_symbols, symbol_duration_us, samples_per_symbol)
    tx = build_frame(plan)
    rx = apply_awgn(tx, NoiseSpec(snr_db, noise_model), rng=rng)
    spikes = neuro_rx.encode(selif or LifParams(), rx)
    return tx, rx, spikes, plan


TRAFFIC_PROFILES = ("ones", "random", "silent")


def power_profile(
    traffic: str = "ones",
    n_bits: int = 100,
    repetition: int = 3,
    snr_db: float = math.inf,
    seed: int = 0,
    symbol_duration_us: float = 5.0,
    samples_per_symbol: int = 64,
    selif: LifParams | None = None,
):
    """Run a traffic profile through the encoder.

    Returns ``(spike_counts, elapsed_us)``. The detection neuron is charged
    once per routed input spike, so both neurons see the same event count.
    """
    if traffic not in TRAFFIC_PROFILES:
        raise ConfigurationError(f"unknown traffic profile {traffic!r}")
    if n_bits < 1:
        raise ConfigurationError("traffic profile needs at least one bit")
    rng = noise_rng([seed, 1])
    if traffic == "random":
        bits = rng.integers(0, 2, n_bits)
    else:
        bits = np.ones(n_bits, dtype=np.int64)
    plan = FramePlan(tuple(bits), repetition, 0, symbol_duration_us, samples_per_symbol)
    tx = build_frame(plan)
    if traffic == "silent":
        tx = type(tx)(np.zeros(len(tx)), tx.samples_per_symbol, tx.symbol_duration_us)
    rx = apply_awgn(tx, NoiseSpec(snr_db), rng=rng)
    spikes = neuro_rx.encode(selif or LifParams(), rx)
    return {"selif": len(spikes), "sdlif": len(spikes)}, rx.duration_us

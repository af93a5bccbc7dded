"""Conventional baseline: b-bit ADC + sum-and-sign ML decoder, and the
unquantized ML oracle."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .signal import FramePlan, Waveform

__all__ = [
    "AdcConfig",
    "quantize",
    "sample_and_quantize",
    "digital_detect",
    "ideal_ml_detect",
    "compute_llr",
    "receive",
]


@dataclass(frozen=True)
class AdcConfig:
    bits: int = 2
    samples_per_symbol: int = 64
    full_scale: float = 2.0

    def __post_init__(self):
        if self.bits < 1:
            raise ConfigurationError("ADC needs at least one bit")
        if self.samples_per_symbol < 1:
            raise ConfigurationError("samples per symbol must be >= 1")
        if not self.full_scale > 0:
            raise ConfigurationError("full scale must be positive")

    @property
    def step(self) -> float:
        return 2.0 * self.full_scale / 2**self.bits

    @property
    def levels(self) -> np.ndarray:
        return -self.full_scale + (np.arange(2**self.bits) + 0.5) * self.step


def quantize(x, cfg: AdcConfig) -> np.ndarray:
    """Uniform mid-rise quantizer. Inputs on a bin edge go to the upper bin;
    anything outside ``[-full_scale, full_scale]`` lands in the end bins."""
    x = np.asarray(x, dtype=np.float64)
    # interior bin edges; comparing against them keeps tiny inputs exact
    edges = -cfg.full_scale + cfg.step * np.arange(1, 2**cfg.bits)
    return cfg.levels[np.searchsorted(edges, x, side="right")]


def sample_and_quantize(w: Waveform, cfg: AdcConfig) -> np.ndarray:
    k = w.samples_per_symbol
    if k % cfg.samples_per_symbol:
        raise ConfigurationError(
            f"incompatible rate: {cfg.samples_per_symbol} samples/symbol does not divide {k}"
        )
    return quantize(w.samples[:: k // cfg.samples_per_symbol], cfg)


def _sum_sign(values: np.ndarray, group: int) -> np.ndarray:
    if len(values) % group:
        raise ValueError(f"{len(values)} samples do not split into groups of {group}")
    sums = values.reshape(-1, group).sum(axis=1)
    return (sums >= 0).astype(np.int64)  # zero sum -> +1


def digital_detect(levels, repetition: int, samples_per_symbol: int = 1) -> np.ndarray:
    """Bits from quantized samples: sign of the sum over each bit's
    ``repetition * samples_per_symbol`` levels, ties to +1."""
    return _sum_sign(np.asarray(levels, dtype=np.float64), repetition * samples_per_symbol)


def ideal_ml_detect(w: Waveform, plan: FramePlan) -> np.ndarray:
    k = plan.base_samples_per_symbol
    data = w.samples[plan.preamble_symbols * k:]
    return _sum_sign(data, plan.repetition * k)


def compute_llr(samples, sigma_sq: float) -> float:
    """Log-likelihood ratio of +1 versus -1 for i.i.d. Gaussian observations."""
    if not sigma_sq > 0:
        raise ValueError("sigma_sq must be positive")
    return 2.0 / sigma_sq * float(np.sum(samples))


def receive(rx: Waveform, plan: FramePlan, cfg: AdcConfig) -> np.ndarray:
    """ADC the data part of ``rx`` and decode it."""
    levels = sample_and_quantize(rx, cfg)
    skip = plan.preamble_symbols * cfg.samples_per_symbol
    return digital_detect(levels[skip:], plan.repetition, cfg.samples_per_symbol)

"""Transmit frames: silent preamble followed by repetition-coded BPSK data."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .errors import ConfigurationError

__all__ = ["FramePlan", "Waveform", "Window", "build_frame", "symbol_windows"]


@dataclass(frozen=True)
class FramePlan:
    """Symbol schedule of one transmission.

    ``repetition`` is the repetition factor n; every data bit occupies n
    consecutive symbol slots after ``preamble_symbols`` silent slots.
    """

    data_bits: tuple[int, ...] = ()
    repetition: int = 3
    preamble_symbols: int = 0
    symbol_duration_us: float = 5.0
    base_samples_per_symbol: int = 64

    def __post_init__(self):
        bits = tuple(int(b) for b in self.data_bits)
        if any(b not in (0, 1) for b in bits):
            raise ConfigurationError("data bits must be 0 or 1")
        object.__setattr__(self, "data_bits", bits)
        if not self.symbol_duration_us > 0:
            raise ConfigurationError("symbol duration must be positive")
        if self.repetition < 1:
            raise ConfigurationError("repetition factor must be >= 1")
        if self.preamble_symbols < 0:
            raise ConfigurationError("preamble length must be >= 0")
        if self.base_samples_per_symbol < 1:
            raise ConfigurationError("base samples per symbol must be >= 1")

    @property
    def total_symbols(self) -> int:
        return self.preamble_symbols + self.repetition * len(self.data_bits)

    @property
    def base_rate_hz(self) -> float:
        return self.base_samples_per_symbol / (self.symbol_duration_us * 1e-6)

    @property
    def sample_period_us(self) -> float:
        return self.symbol_duration_us / self.base_samples_per_symbol

    def with_bits(self, bits: Sequence[int]) -> "FramePlan":
        return FramePlan(
            data_bits=tuple(bits),
            repetition=self.repetition,
            preamble_symbols=self.preamble_symbols,
            symbol_duration_us=self.symbol_duration_us,
            base_samples_per_symbol=self.base_samples_per_symbol,
        )


@dataclass(frozen=True, eq=False)
class Waveform:
    """Uniformly sampled real baseband signal, piecewise constant between samples.

    Sample ``i`` holds the amplitude over ``[i, i + 1) / base_rate_hz``.
    """

    samples: np.ndarray
    samples_per_symbol: int
    symbol_duration_us: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=np.float64)
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    @property
    def base_rate_hz(self) -> float:
        return self.samples_per_symbol / (self.symbol_duration_us * 1e-6)

    @property
    def sample_period_us(self) -> float:
        return self.symbol_duration_us / self.samples_per_symbol

    @property
    def duration_us(self) -> float:
        return len(self.samples) * self.sample_period_us

    def times_us(self) -> np.ndarray:
        """Start time of every sample."""
        return np.arange(len(self.samples)) * self.sample_period_us

    def __len__(self):
        return len(self.samples)


class Window(NamedTuple):
    start_us: float
    end_us: float
    kind: str  # "preamble" or "data"
    bit_index: int  # -1 for preamble slots


def build_frame(plan: FramePlan) -> Waveform:
    """Noiseless waveform for ``plan``: zeros over the preamble, then ``2b - 1``
    held for ``repetition`` symbols per bit."""
    if not plan.data_bits and plan.preamble_symbols == 0:
        raise ConfigurationError("empty frame")
    k = plan.base_samples_per_symbol
    levels = 2.0 * np.asarray(plan.data_bits, dtype=np.float64) - 1.0
    samples = np.concatenate(
        [np.zeros(plan.preamble_symbols * k), np.repeat(levels, plan.repetition * k)]
    )
    return Waveform(samples, k, plan.symbol_duration_us)


def symbol_windows(plan: FramePlan) -> list[Window]:
    t_sym = plan.symbol_duration_us
    windows = [
        Window(s * t_sym, (s + 1) * t_sym, "preamble", -1)
        for s in range(plan.preamble_symbols)
    ]
    n = plan.repetition
    for b in range(len(plan.data_bits)):
        first = plan.preamble_symbols + n * b
        windows.append(Window(first * t_sym, (first + n) * t_sym, "data", b))
    return windows

"""Two-neuron spiking receiver.

The encoding neuron turns the received baseband waveform into spikes. A
schedule-driven gate routes spikes emitted during the silent preamble to the
threshold input of the detection neuron and data-period spikes to its
membrane. The detection neuron is a leak-free counter that is cleared at the
start of every ``n``-symbol bit window; the bit is +1 iff it fires, i.e. iff
``N_spikes * dv_m >= theta``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError
from .lif import LifParams, LifState, SpikeTrain, run_on_waveform
from .signal import FramePlan, Waveform, symbol_windows

__all__ = [
    "StaticThreshold",
    "AdaptiveThreshold",
    "NeuroDetectorConfig",
    "BitDecision",
    "DecisionTrace",
    "encode",
    "calibrate_threshold",
    "detect_bits",
    "receive",
]


@dataclass(frozen=True)
class StaticThreshold:
    theta: float | None = None  # None -> 7 * n * dv_m


@dataclass(frozen=True)
class AdaptiveThreshold:
    dv_floor: float | None = None  # None -> 0.5 * dv_m


@dataclass(frozen=True)
class NeuroDetectorConfig:
    selif: LifParams = field(default_factory=LifParams)
    dv_m: float = 1.0
    threshold_mode: StaticThreshold | AdaptiveThreshold = field(default_factory=StaticThreshold)
    repetition: int = 3
    preamble_symbols: int = 0

    def __post_init__(self):
        if not self.dv_m > 0:
            raise ConfigurationError("dv_m must be positive")
        if self.repetition < 1:
            raise ConfigurationError("repetition factor must be >= 1")
        if self.adaptive and self.preamble_symbols <= 0:
            raise ConfigurationError("no calibration interval")

    @property
    def adaptive(self) -> bool:
        return isinstance(self.threshold_mode, AdaptiveThreshold)

    @property
    def static_theta(self) -> float:
        theta = getattr(self.threshold_mode, "theta", None)
        # half of the ~14 spikes a +1 symbol produces, per repetition
        return 7.0 * self.repetition * self.dv_m if theta is None else float(theta)

    @property
    def dv_floor(self) -> float:
        floor = getattr(self.threshold_mode, "dv_floor", None)
        return 0.5 * self.dv_m if floor is None else float(floor)

    @property
    def dv_noise(self) -> float:
        """Threshold increment per preamble spike."""
        if self.preamble_symbols <= 0:
            raise ConfigurationError("no calibration interval")
        return self.repetition * self.dv_m / self.preamble_symbols


@dataclass(frozen=True)
class BitDecision:
    spike_count: int
    accumulated_potential: float
    threshold_used: float
    decision: int  # -1 or +1


@dataclass(frozen=True)
class DecisionTrace:
    bits: list[BitDecision]
    noise_spike_count: int | None = None
    theta_adaptive: float | None = None

    def decisions(self) -> np.ndarray:
        return np.array([b.decision for b in self.bits], dtype=np.int64)

    def to_dict(self) -> dict:
        return {
            "noise_spike_count": self.noise_spike_count,
            "theta_adaptive": self.theta_adaptive,
            "bits": [b.__dict__ for b in self.bits],
        }


def encode(selif: LifParams, rx: Waveform) -> SpikeTrain:
    return run_on_waveform(selif, rx, LifState(v=selif.v_rest))


def _check_plan(plan: FramePlan, cfg: NeuroDetectorConfig):
    if plan.repetition != cfg.repetition or plan.preamble_symbols != cfg.preamble_symbols:
        raise ConfigurationError(
            f"frame (n={plan.repetition}, preamble={plan.preamble_symbols}) does not match "
            f"detector (n={cfg.repetition}, preamble={cfg.preamble_symbols})"
        )


def calibrate_threshold(spikes: SpikeTrain, plan: FramePlan, cfg: NeuroDetectorConfig) -> tuple[float, int]:
    """Adaptive threshold from the preamble's noise-induced spikes.

    Returns ``(theta, N_noise)`` with ``theta = max(dv_floor, N_noise * dV_n)``.
    """
    if not cfg.adaptive:
        raise ConfigurationError("threshold calibration requires adaptive mode")
    _check_plan(plan, cfg)
    n_noise = spikes.count_in(0.0, plan.preamble_symbols * plan.symbol_duration_us)
    return max(cfg.dv_floor, n_noise * cfg.dv_noise), n_noise


def detect_bits(spikes: SpikeTrain, plan: FramePlan, cfg: NeuroDetectorConfig):
    """Per-bit decisions from the encoder's spikes over the whole frame.

    Returns ``(bits, trace)`` with bits in {0, 1}.
    """
    _check_plan(plan, cfg)
    if cfg.adaptive:
        theta, n_noise = calibrate_threshold(spikes, plan, cfg)
    else:
        theta, n_noise = cfg.static_theta, None

    data = [w for w in symbol_windows(plan) if w.kind == "data"]
    if data:
        edges = np.array([w.start_us for w in data] + [data[-1].end_us])
        idx = np.searchsorted(spikes.times_us, edges, side="left")
        counts = np.diff(idx)
    else:
        counts = np.zeros(0, dtype=np.int64)
    decisions = []
    for c in counts:
        potential = int(c) * cfg.dv_m
        decisions.append(BitDecision(int(c), potential, theta, 1 if potential >= theta else -1))
    trace = DecisionTrace(decisions, n_noise, theta if cfg.adaptive else None)
    bits = (counts * cfg.dv_m >= theta).astype(np.int64)
    return bits, trace


def receive(rx: Waveform, plan: FramePlan, cfg: NeuroDetectorConfig):
    """Encode ``rx`` and detect; returns ``(bits, trace, spikes)``."""
    spikes = encode(cfg.selif, rx)
    bits, trace = detect_bits(spikes, plan, cfg)
    return bits, trace, spikes

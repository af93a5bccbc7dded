"""Event-exact leaky integrate-and-fire neuron driven by piecewise-constant input.

Between input changes the membrane obeys

    tau_m dV/dt = -(V - V_rest) + I

whose solution is an exponential relaxation towards ``V_rest + I``. Threshold
crossings are solved in closed form, so spike times carry no step-size error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba
import numpy as np

from .errors import ConfigurationError, StimulusError
from .signal import Waveform

__all__ = [
    "LifParams",
    "LifState",
    "SpikeTrain",
    "integrate_interval",
    "run_on_waveform",
    "simulate_samples",
    "interspike_interval",
]


@dataclass(frozen=True)
class LifParams:
    tau_m_us: float = 0.5
    v_rest: float = 0.0
    v_th: float = 0.5
    v_reset: float | None = None  # None -> v_rest
    refractory_us: float = 0.0
    leak_enabled: bool = True

    def __post_init__(self):
        if self.v_reset is None:
            object.__setattr__(self, "v_reset", self.v_rest)
        if not self.tau_m_us > 0:
            raise ConfigurationError("tau_m must be positive")
        if not self.v_th > self.v_rest:
            raise ConfigurationError("v_th must exceed v_rest")
        if not self.v_th > self.v_reset:
            raise ConfigurationError("v_th must exceed v_reset")
        if self.refractory_us < 0:
            raise ConfigurationError("refractory period must be >= 0")


@dataclass(frozen=True)
class LifState:
    v: float = 0.0
    t_us: float = 0.0
    refractory_until_us: float = 0.0


@dataclass(frozen=True, eq=False)
class SpikeTrain:
    times_us: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __post_init__(self):
        t = np.asarray(self.times_us, dtype=np.float64)
        if t.size > 1 and not np.all(np.diff(t) > 0):
            raise ValueError("spike times must be strictly increasing")
        object.__setattr__(self, "times_us", t)

    def __len__(self):
        return len(self.times_us)

    def count_in(self, start_us: float, end_us: float) -> int:
        """Spikes in the half-open window ``[start_us, end_us)``."""
        lo, hi = np.searchsorted(self.times_us, [start_us, end_us], side="left")
        return int(hi - lo)


@numba.njit(cache=True)
def _lif_kernel(x, dt, t0, tau, v_rest, v_th, v_reset, refractory, leak, v, refr_left):
    n = x.shape[0]
    counts = np.zeros(n, np.int64)
    times = np.empty(max(16, n // 4), np.float64)
    n_spikes = 0
    decay = math.exp(-dt / tau)
    for i in range(n):
        current = x[i]
        target = v_rest + current
        u = 0.0
        while True:
            if refr_left > 0.0:
                if refr_left >= dt - u:
                    refr_left -= dt - u
                    break
                u += refr_left
                refr_left = 0.0
            rem = dt - u
            # time until the membrane reaches v_th at constant input
            if v >= v_th:
                t_hit = 0.0
            elif leak:
                if target > v_th:
                    t_hit = tau * math.log((target - v) / (target - v_th))
                else:
                    t_hit = math.inf
            elif current > 0.0:
                t_hit = tau * (v_th - v) / current
            else:
                t_hit = math.inf
            if t_hit < rem:
                u += t_hit
                if n_spikes == times.shape[0]:
                    grown = np.empty(2 * n_spikes, np.float64)
                    grown[:n_spikes] = times
                    times = grown
                times[n_spikes] = t0 + i * dt + u
                n_spikes += 1
                counts[i] += 1
                v = v_reset
                refr_left = refractory
                continue
            if leak:
                if u == 0.0:
                    v = target + (v - target) * decay
                else:
                    v = target + (v - target) * math.exp(-rem / tau)
            else:
                v = v + current * rem / tau
            if v > v_th:
                v = v_th  # crossing exactly at the edge fires at the next sample
            break
    return times[:n_spikes], counts, v, refr_left


def simulate_samples(params: LifParams, samples, dt_us: float, initial: LifState | None = None):
    """Drive the neuron with ``samples``, each held for ``dt_us``.

    Returns ``(SpikeTrain, per-sample spike counts, final LifState)``.
    """
    x = np.ascontiguousarray(samples, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise StimulusError("invalid stimulus")
    if not dt_us > 0:
        raise ValueError("dt must be positive")
    st = initial or LifState(v=params.v_rest)
    refr_left = max(0.0, st.refractory_until_us - st.t_us)
    times, counts, v, refr_left = _lif_kernel(
        x, float(dt_us), float(st.t_us), params.tau_m_us, params.v_rest, params.v_th,
        params.v_reset, params.refractory_us, params.leak_enabled, float(st.v), refr_left,
    )
    t_end = st.t_us + len(x) * dt_us
    final = LifState(v=float(v), t_us=t_end, refractory_until_us=t_end + refr_left)
    return SpikeTrain(times), counts, final


def integrate_interval(state: LifState, params: LifParams, input_current: float, dt_us: float):
    """Advance ``state`` by ``dt_us`` under a constant input.

    Returns the new state and the spike times emitted in ``[t, t + dt_us)``.
    """
    if not math.isfinite(input_current):
        raise StimulusError("invalid stimulus")
    train, _, final = simulate_samples(params, [input_current], dt_us, state)
    return final, train.times_us.tolist()


def run_on_waveform(params: LifParams, w: Waveform, initial: LifState | None = None) -> SpikeTrain:
    if len(w) == 0:
        raise ValueError("waveform is empty")
    train, _, _ = simulate_samples(params, w.samples, w.sample_period_us, initial)
    return train


def interspike_interval(params: LifParams, current: float) -> float:
    """Steady-state spike period for a constant input (inf if sub-threshold)."""
    if params.leak_enabled:
        target = params.v_rest + current
        if target <= params.v_th:
            return math.inf
        travel = params.tau_m_us * math.log((target - params.v_reset) / (target - params.v_th))
    else:
        if current <= 0:
            return math.inf
        travel = params.tau_m_us * (params.v_th - params.v_reset) / current
    return travel + params.refractory_us

"""Dynamic-power bookkeeping for the spiking front end.

Each spike costs roughly the energy of charging the membrane capacitor to
threshold, ``0.5 * C_m * v_th**2`` (pF and V give pJ directly). The ADC side
is a reference band of published figures for 2-bit converters at a few MS/s,
not a model.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Mapping

from .digital_rx import AdcConfig

__all__ = ["PowerModel", "NeuronPower", "PowerReport", "AdcComparison",
           "estimate_front_end_power", "compare_with_adc"]


@dataclass(frozen=True)
class PowerModel:
    energy_per_spike_pj: float = 5.0
    c_m_pf: float | None = None
    v_th_volts: float | None = None
    adc_power_mw_reference: tuple[float, float] = (0.5, 1.0)
    gate_power_pw: float = 5.0

    def __post_init__(self):
        if not self.energy_per_spike_pj > 0:
            raise ValueError("energy per spike must be positive")
        if (self.c_m_pf is None) != (self.v_th_volts is None):
            raise ValueError("c_m_pf and v_th_volts must be given together")
        lo, hi = self.adc_power_mw_reference
        if not 0 < lo <= hi:
            raise ValueError("ADC reference band must satisfy 0 < low <= high")

    @property
    def spike_energy_pj(self) -> float:
        if self.c_m_pf is not None:
            return 0.5 * self.c_m_pf * self.v_th_volts**2
        return self.energy_per_spike_pj


@dataclass(frozen=True)
class NeuronPower:
    name: str
    spikes: int
    energy_pj: float
    energy_per_symbol_pj: float
    avg_power_uw: float


@dataclass(frozen=True)
class PowerReport:
    neurons: list[NeuronPower]
    elapsed_us: float
    symbols: float
    symbol_rate_ksym_s: float
    gate_power_uw: float
    total_energy_pj: float
    total_power_uw: float
    adc_reference_mw: tuple[float, float]
    meta: dict = field(default_factory=dict)

    def neuron(self, name: str) -> NeuronPower:
        return next(n for n in self.neurons if n.name == name)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class AdcComparison:
    neuromorphic_uw: float
    adc_reference_mw: tuple[float, float]
    adc_sample_rate_msps: float
    ratio_to_low: float
    ratio_to_high: float
    neuromorphic_lower: bool


def estimate_front_end_power(
    spike_counts: Mapping[str, int],
    elapsed_us: float,
    model: PowerModel,
    symbol_duration_us: float = 5.0,
) -> PowerReport:
    """Energy and average power per neuron over ``elapsed_us``.

    ``spike_counts`` maps neuron name to the number of spike events it
    handled. µW = pJ/µs.
    """
    if not elapsed_us > 0:
        raise ValueError("elapsed time must be positive")
    e_spike = model.spike_energy_pj
    symbols = elapsed_us / symbol_duration_us
    neurons = []
    for name, count in spike_counts.items():
        energy = int(count) * e_spike
        neurons.append(NeuronPower(name, int(count), energy, energy / symbols, energy / elapsed_us))
    gate_uw = model.gate_power_pw * 1e-6
    total_energy = sum(n.energy_pj for n in neurons)
    return PowerReport(
        neurons=neurons,
        elapsed_us=elapsed_us,
        symbols=symbols,
        symbol_rate_ksym_s=1e3 / symbol_duration_us,
        gate_power_uw=gate_uw,
        total_energy_pj=total_energy + gate_uw * elapsed_us,
        total_power_uw=total_energy / elapsed_us + gate_uw,
        adc_reference_mw=tuple(model.adc_power_mw_reference),
        meta={"energy_per_spike_pj": e_spike},
    )


def compare_with_adc(report: PowerReport, adc: AdcConfig, model: PowerModel) -> AdcComparison:
    lo, hi = model.adc_power_mw_reference
    total = report.total_power_uw
    return AdcComparison(
        neuromorphic_uw=total,
        adc_reference_mw=(lo, hi),
        adc_sample_rate_msps=adc.samples_per_symbol * report.symbol_rate_ksym_s / 1e3,
        ratio_to_low=total / (lo * 1e3),
        ratio_to_high=total / (hi * 1e3),
        neuromorphic_lower=total < lo * 1e3,
    )

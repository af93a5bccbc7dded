"""Figures written next to the CSV outputs. Uses the non-interactive Agg backend."""

from __future__ import annotations

from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "neuro-static": dict(color="tab:red", marker="s"),
    "neuro-adaptive": dict(color="tab:green", marker="o"),
    "adc-8": dict(color="tab:blue", marker="v", ls="--"),
    "adc-32": dict(color="tab:blue", marker="^", ls="-."),
    "adc-64": dict(color="tab:blue", marker="D", ls=":"),
    "ideal-ml": dict(color="k", marker="", ls="-"),
}


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_ber(records, path, by="detector", title=None):
    """BER vs SNR, one curve per ``by`` value (``detector`` or ``preamble_symbols``)."""
    curves = defaultdict(list)
    for r in records:
        curves[getattr(r, by)].append(r)
    fig, ax = plt.subplots(figsize=(5.5, 4))
    for key, recs in curves.items():
        recs = sorted(recs, key=lambda r: r.snr_db)
        x = [r.snr_db for r in recs]
        # zero-error points cannot sit on a log axis
        y = [r.ber if r.bit_errors else float("nan") for r in recs]
        label = f"preamble {key}" if by == "preamble_symbols" else str(key)
        style = STYLE.get(key, {}) if by == "detector" else {"marker": "o"}
        ax.semilogy(x, y, label=label, **style)
    ax.set_xlabel("SNR (dB)")
    ax.set_ylabel("BER")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    if title:
        ax.set_title(title)
    return _save(fig, path)


def plot_raster(tx, rx, spikes, plan, path):
    fig, (top, bottom) = plt.subplots(2, 1, sharex=True, figsize=(9, 4.5),
                                      gridspec_kw={"height_ratios": [2, 1]})
    t = tx.times_us()
    top.step(t, rx.samples, where="post", color="tab:red", lw=0.6, label="received")
    top.step(t, tx.samples, where="post", color="tab:blue", lw=1.5, label="transmitted")
    top.set_ylabel("amplitude")
    top.legend(loc="upper right", fontsize=8)
    bottom.eventplot(spikes.times_us, colors="k", linelengths=0.8)
    bottom.set_yticks([])
    bottom.set_xlabel("time (µs)")
    bottom.set_ylabel("spikes")
    if plan.preamble_symbols:
        end = plan.preamble_symbols * plan.symbol_duration_us
        for ax in (top, bottom):
            ax.axvspan(0, end, color="tab:green", alpha=0.12)
            ax.axvline(end, color="tab:green", ls="--", lw=1)
    return _save(fig, path)


def plot_power(report, comparison, path):
    fig, ax = plt.subplots(figsize=(5, 3.5))
    names = [n.name for n in report.neurons] + ["total", "ADC low", "ADC high"]
    lo, hi = comparison.adc_reference_mw
    values = [n.avg_power_uw for n in report.neurons] + [report.total_power_uw, lo * 1e3, hi * 1e3]
    colors = ["tab:green"] * (len(report.neurons) + 1) + ["tab:blue"] * 2
    ax.bar(names, values, color=colors)
    ax.set_yscale("log")
    ax.set_ylabel("power (µW)")
    return _save(fig, path)

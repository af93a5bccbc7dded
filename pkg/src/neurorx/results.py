"""CSV/JSON serialization of experiment outputs.

Floats are written with ``repr`` so every file parses back to the exact
records that produced it.
"""

from __future__ import annotations

import csv
import io
import json
import platform
from dataclasses import asdict
from typing import Iterable

import numpy as np

from .harness import BerRecord
from .power import NeuronPower, PowerReport

BER_COLUMNS = (
    "snr_db", "detector", "repetition", "samples_per_symbol", "preamble_symbols",
    "trials", "bit_errors", "ber", "ci95_low", "ci95_high",
)
RASTER_COLUMNS = ("time_us", "series", "value")
POWER_COLUMNS = ("component", "spikes", "energy_pj", "energy_per_symbol_pj", "avg_power_uw")


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _write_rows(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def ber_csv(records: Iterable[BerRecord]) -> str:
    return _write_rows(BER_COLUMNS, ([getattr(r, c) for c in BER_COLUMNS] for r in records))


def read_ber_csv(text: str) -> list[BerRecord]:
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        out.append(BerRecord(
            snr_db=float(row["snr_db"]),
            detector=row["detector"],
            repetition=int(row["repetition"]),
            samples_per_symbol=int(row["samples_per_symbol"]) if row["samples_per_symbol"] else None,
            preamble_symbols=int(row["preamble_symbols"]),
            trials=int(row["trials"]),
            bit_errors=int(row["bit_errors"]),
            ber=float(row["ber"]),
            ci95_low=float(row["ci95_low"]),
            ci95_high=float(row["ci95_high"]),
        ))
    return out


def ber_json(records: Iterable[BerRecord]) -> str:
    return json.dumps([asdict(r) for r in records], indent=1)


def raster_rows(tx, rx, spikes) -> list[tuple[float, str, float]]:
    t = tx.times_us()
    rows = [(float(ti), "tx", float(v)) for ti, v in zip(t, tx.samples)]
    rows += [(float(ti), "rx", float(v)) for ti, v in zip(t, rx.samples)]
    rows += [(float(ti), "spike", 1.0) for ti in spikes.times_us]
    return rows


def raster_csv(rows) -> str:
    return _write_rows(RASTER_COLUMNS, rows)


def read_raster_csv(text: str) -> list[tuple[float, str, float]]:
    return [(float(r["time_us"]), r["series"], float(r["value"]))
            for r in csv.DictReader(io.StringIO(text))]


def raster_json(rows) -> str:
    return json.dumps([dict(zip(RASTER_COLUMNS, r)) for r in rows])


def power_csv(report: PowerReport) -> str:
    rows = [(n.name, n.spikes, n.energy_pj, n.energy_per_symbol_pj, n.avg_power_uw) for n in report.neurons]
    gate_energy = report.gate_power_uw * report.elapsed_us
    rows.append(("gate", 0, gate_energy, gate_energy / report.symbols, report.gate_power_uw))
    rows.append(("total", sum(n.spikes for n in report.neurons), report.total_energy_pj,
                 report.total_energy_pj / report.symbols, report.total_power_uw))
    return _write_rows(POWER_COLUMNS, rows)


def read_power_csv(text: str) -> list[NeuronPower]:
    """Rows of a power CSV, gate and total rows included."""
    return [NeuronPower(r["component"], int(r["spikes"]), float(r["energy_pj"]),
                        float(r["energy_per_symbol_pj"]), float(r["avg_power_uw"]))
            for r in csv.DictReader(io.StringIO(text))]


def metadata(**extra) -> dict:
    import matplotlib
    import numba
    import scipy

    from . import __version__

    meta = {
        "versions": {
            "neurorx": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "numba": numba.__version__,
            "matplotlib": matplotlib.__version__,
        },
        "assumptions": {
            "pulse_shape": "rectangular NRZ, piecewise-constant base samples",
            "adc_quantizer": "uniform mid-rise, clipped at +/-full_scale, bin edges go to the upper bin",
            "adc_sampling": "point samples of the base waveform, no anti-alias averaging",
            "tie_rule": "zero sum / equality decides +1",
            "adaptive_theta_floor": "max(0.5*dv_m, N_noise*dV_n)",
            "sdlif": "leak-free counter cleared at every bit window",
        },
    }
    meta.update(extra)
    return meta

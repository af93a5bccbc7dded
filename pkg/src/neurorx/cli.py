"""Command-line front end.

Settings come from built-in defaults, then an optional INI config file
(``--config`` or ``$NEURORX_CONFIG``; ``[common]`` plus a section named after
the subcommand), then command-line flags. Flags win.
"""

from __future__ import annotations

import argparse
import configparser
import json
import logging
import math
import os
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import harness, results
from .channel import NoiseModel
from .digital_rx import AdcConfig
from .errors import NeuroRxError
from .power import PowerModel, compare_with_adc, estimate_front_end_power

log = logging.getLogger("neurorx")

CONFIG_ENV = "NEURORX_CONFIG"

DEFAULTS = {
    "snr_start": -2.0,
    "snr_stop": 10.0,
    "snr_step": 1.0,
    "snr": 4.0,
    "trials": 100_000,
    "bits_per_frame": 100,
    "repetition": 3,
    "preamble": "300",
    "detectors": ",".join(harness.DEFAULT_DETECTORS),
    "samples_per_symbol": 64,
    "noise_model": NoiseModel.BANDWIDTH_SCALED.value,
    "seed": 2025,
    "format": "csv",
    "energy_per_spike": 5.0,
    "workers": 1,
    "symbols": 20,
    "traffic": "ones",
    "bits": 100,
}
SUBCOMMAND_DEFAULTS = {
    "preamble-sweep": {"preamble": "5,20,50,300"},
    "raster": {"repetition": 1, "preamble": "5"},
    "power": {"snr": "inf", "preamble": "0"},
}
TYPES = {
    "snr_start": float, "snr_stop": float, "snr_step": float, "snr": float,
    "trials": int, "bits_per_frame": int, "repetition": int, "samples_per_symbol": int,
    "seed": int, "energy_per_spike": float, "workers": int, "symbols": int, "bits": int,
    "preamble": str, "detectors": str, "noise_model": str, "format": str, "traffic": str,
}


class UsageError(NeuroRxError):
    pass


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help=f"INI config file (default: ${CONFIG_ENV})")
    common.add_argument("--out", help="output file (stdout if omitted)")
    common.add_argument("--format", choices=["csv", "json"])
    common.add_argument("--plot", action="store_true", help="also write a PNG figure next to --out")
    common.add_argument("--seed", type=int, help="master seed (unsigned 64-bit)")
    common.add_argument("--repetition", type=int, help="repetition factor n")
    common.add_argument("--samples-per-symbol", type=int, help="base simulation samples per symbol")
    common.add_argument("--noise-model", choices=[m.value for m in NoiseModel])
    common.add_argument("-v", "--verbose", action="store_true")

    sweep = argparse.ArgumentParser(add_help=False)
    sweep.add_argument("--snr-start", type=float)
    sweep.add_argument("--snr-stop", type=float)
    sweep.add_argument("--snr-step", type=float)
    sweep.add_argument("--trials", type=int, help="frames per SNR point")
    sweep.add_argument("--bits-per-frame", type=int)
    sweep.add_argument("--workers", type=int)

    parser = argparse.ArgumentParser(prog="neurorx", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", parents=[common, sweep], help="BER vs SNR for several detectors")
    p.add_argument("--detectors", help="comma list: neuro-static,neuro-adaptive,adc-<N>,ideal-ml")
    p.add_argument("--preamble", help="preamble symbols of the adaptive detector")

    p = sub.add_parser("preamble-sweep", parents=[common, sweep], help="adaptive detector BER per preamble length")
    p.add_argument("--preamble", help="comma list of preamble lengths")

    p = sub.add_parser("raster", parents=[common], help="tx/rx waveforms and encoder spikes for one frame")
    p.add_argument("--snr", type=float, help="SNR in dB ('inf' for noiseless)")
    p.add_argument("--symbols", type=int, help="data symbols in the frame")
    p.add_argument("--preamble", help="silent preamble symbols")

    p = sub.add_parser("power", parents=[common], help="front-end power estimate vs ADC reference")
    p.add_argument("--snr", type=float)
    p.add_argument("--traffic", choices=harness.TRAFFIC_PROFILES)
    p.add_argument("--bits", type=int, help="data bits in the traffic profile")
    p.add_argument("--energy-per-spike", type=float, help="pJ per spike")
    return parser


def resolve(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    cfg.update(SUBCOMMAND_DEFAULTS.get(args.command, {}))
    path = args.config or os.environ.get(CONFIG_ENV)
    if path:
        ini = configparser.ConfigParser()
        if not ini.read(path):
            raise UsageError(f"cannot read config file {path}")
        for section in ("common", args.command):
            if ini.has_section(section):
                for key, value in ini.items(section):
                    key = key.replace("-", "_")
                    if key not in TYPES:
                        raise UsageError(f"unknown config key {key!r} in [{section}]")
                    cfg[key] = value
    for key, value in vars(args).items():
        if value is not None and key in TYPES:
            cfg[key] = value
    try:
        return {k: TYPES[k](v) if k in TYPES else v for k, v in cfg.items()}
    except ValueError as exc:
        raise UsageError(f"bad setting: {exc}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _snr_grid(cfg) -> list[float]:
    start, stop, step = cfg["snr_start"], cfg["snr_stop"], cfg["snr_step"]
    if not step > 0 or stop < start:
        raise UsageError("SNR grid needs step > 0 and stop >= start")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 10) for i in range(count)]


def _experiment(cfg, detectors) -> harness.ExperimentSpec:
    if cfg["trials"] < 1:
        raise UsageError("--trials must be >= 1")
    return harness.ExperimentSpec(
        snr_points_db=_snr_grid(cfg),
        trials_per_point=cfg["trials"],
        bits_per_frame=cfg["bits_per_frame"],
        detectors=tuple(detectors),
        master_seed=cfg["seed"],
        noise_model=cfg["noise_model"],
        repetition=cfg["repetition"],
        samples_per_symbol=cfg["samples_per_symbol"],
        workers=cfg["workers"],
    )


def _spec_meta(spec: harness.ExperimentSpec) -> dict:
    return {
        "master_seed": spec.master_seed,
        "noise_model": spec.noise_model.value,
        "snr_points_db": list(spec.snr_points_db),
        "trials_per_point": spec.trials_per_point,
        "bits_per_frame": spec.bits_per_frame,
        "repetition": spec.repetition,
        "symbol_duration_us": spec.symbol_duration_us,
        "base_samples_per_symbol": spec.samples_per_symbol,
        "selif": asdict(spec.selif),
        "dv_m": spec.dv_m,
        "adc": {"bits": spec.adc_bits, "full_scale": spec.adc_full_scale},
        "detectors": [d.name for d in spec.detectors],
    }


def cmd_sweep(cfg) -> tuple[str, dict, callable]:
    preamble = _int_list(cfg["preamble"])
    if len(preamble) != 1:
        raise UsageError("sweep takes a single --preamble length")
    names = [d for d in cfg["detectors"].split(",") if d.strip()]
    spec = _experiment(cfg, [harness.parse_detector(d, preamble[0]) for d in names])
    records = harness.run_ber_sweep(spec)
    text = results.ber_csv(records) if cfg["format"] == "csv" else results.ber_json(records)

    def plot(path):
        from .plotting import plot_ber
        return plot_ber(records, path, title=f"BER, rate 1/{spec.repetition} repetition")

    return text, _spec_meta(spec), plot


def cmd_preamble_sweep(cfg):
    lengths = _int_list(cfg["preamble"])
    if not lengths:
        raise UsageError("--preamble needs at least one length")
    spec = _experiment(cfg, [harness.parse_detector("neuro-adaptive", lengths[0])])
    records = harness.run_preamble_sweep(spec, lengths)
    text = results.ber_csv(records) if cfg["format"] == "csv" else results.ber_json(records)
    meta = _spec_meta(spec)
    meta["preamble_lengths"] = lengths

    def plot(path):
        from .plotting import plot_ber
        return plot_ber(records, path, by="preamble_symbols", title="Adaptive threshold vs preamble length")

    return text, meta, plot


def cmd_raster(cfg):
    preamble = _int_list(cfg["preamble"])
    if len(preamble) != 1 or preamble[0] < 0:
        raise UsageError("raster takes a single non-negative --preamble length")
    tx, rx, spikes, plan = harness.raster_trace(
        n_symbols=cfg["symbols"], snr_db=cfg["snr"], preamble_symbols=preamble[0],
        repetition=cfg["repetition"], seed=cfg["seed"],
        samples_per_symbol=cfg["samples_per_symbol"], noise_model=cfg["noise_model"],
    )
    rows = results.raster_rows(tx, rx, spikes)
    text = results.raster_csv(rows) if cfg["format"] == "csv" else results.raster_json(rows)
    meta = {
        "snr_db": cfg["snr"], "seed": cfg["seed"], "noise_model": cfg["noise_model"],
        "data_bits": list(plan.data_bits), "repetition": plan.repetition,
        "preamble_symbols": plan.preamble_symbols, "symbol_duration_us": plan.symbol_duration_us,
        "base_samples_per_symbol": plan.base_samples_per_symbol, "spikes": len(spikes),
    }

    def plot(path):
        from .plotting import plot_raster
        return plot_raster(tx, rx, spikes, plan, path)

    return text, meta, plot


def cmd_power(cfg):
    if not cfg["energy_per_spike"] > 0:
        raise UsageError("--energy-per-spike must be positive")
    counts, elapsed = harness.power_profile(
        traffic=cfg["traffic"], n_bits=cfg["bits"], repetition=cfg["repetition"],
        snr_db=cfg["snr"], seed=cfg["seed"], samples_per_symbol=cfg["samples_per_symbol"],
    )
    model = PowerModel(energy_per_spike_pj=cfg["energy_per_spike"])
    report = estimate_front_end_power(counts, elapsed, model)
    comparison = compare_with_adc(report, AdcConfig(samples_per_symbol=64), model)
    meta = {
        "traffic": cfg["traffic"], "bits": cfg["bits"], "repetition": cfg["repetition"],
        "snr_db": cfg["snr"], "energy_per_spike_pj": model.spike_energy_pj,
        "symbol_rate_ksym_s": report.symbol_rate_ksym_s,
        "adc_comparison": asdict(comparison),
        "adc_reference_note": "published 2-bit ADC figures at a few MS/s, not a model",
    }
    if cfg["format"] == "csv":
        text = results.power_csv(report)
    else:
        text = json.dumps(_jsonable({"report": report.to_dict(), "adc_comparison": asdict(comparison)}), indent=1)

    def plot(path):
        from .plotting import plot_power
        return plot_power(report, comparison, path)

    return text, meta, plot


COMMANDS = {
    "sweep": cmd_sweep,
    "preamble-sweep": cmd_preamble_sweep,
    "raster": cmd_raster,
    "power": cmd_power,
}


def _jsonable(o):
    if isinstance(o, dict):
        return {k: _jsonable(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_jsonable(v) for v in o]
    if isinstance(o, np.generic):
        o = o.item()
    if isinstance(o, float) and not math.isfinite(o):
        return str(o)
    return o


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve(args)
        if args.plot and not args.out:
            raise UsageError("--plot needs --out")
        text, meta, plot = COMMANDS[args.command](cfg)
    except NeuroRxError as exc:
        print(f"neurorx {args.command}: error: {exc}", file=sys.stderr)
        return 2 if isinstance(exc, (UsageError, ValueError)) else 1

    meta = results.metadata(command=args.command, format=cfg["format"], **meta)
    if not args.out:
        sys.stdout.write(text)
        return 0
    out = Path(args.out)
    out.write_text(text)
    out.with_name(out.name + ".meta.json").write_text(
        json.dumps(_jsonable(meta), indent=1) + "\n")
    if args.plot:
        plot(out.with_suffix(".png"))
    return 0


if __name__ == "__main__":
    sys.exit(main())

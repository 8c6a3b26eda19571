"""Command-line front end: ``urdd {gen,sweep,scaling,ensemble}``."""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import List, Optional

import numpy as np

from . import SCHEMA_VERSION, __version__
from .ensemble import DDRun, EnsembleSpec, storage_curves, write_storage_csv
from .pulses import IntegratorConfig, PulseShape
from .sequences import (
    PhaseSequence,
    baseline,
    by_name,
    format_pi,
    from_json_dict,
    parse_pi,
    symmetric_ur,
    to_json_dict,
    ur_phases,
)
from .su2 import DomainError
from .sweeps import SweepGrid, fidelity_map, scaling_fit, write_map_csv, write_map_pgm

EXIT_USAGE = 2
EXIT_IO = 3


class ConfigError(Exception):
    pass


class OutputError(Exception):
    pass


FAMILIES = ("ur", "ur-sym", "cpmg", "xy4", "xy8", "kdd", "kdd-xy4")


def _sign(text: str) -> int:
    if text in ("+", "+1", "1"):
        return 1
    if text in ("-", "-1"):
        return -1
    raise argparse.ArgumentTypeError(f"sign must be + or -, got {text!r}")


def _csv_list(conv):
    def parse(text: str):
        try:
            return [conv(x) for x in text.split(",") if x.strip()]
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None
    return parse


def _load_config(path: str, allowed: set) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    if cfg.get("schemaVersion") != SCHEMA_VERSION:
        raise ConfigError(f"schemaVersion must be {SCHEMA_VERSION}")
    unknown = set(cfg) - allowed - {"schemaVersion"}
    if unknown:
        raise ConfigError(f"unknown config fields: {sorted(unknown)}")
    return cfg


def _check_keys(d, allowed: set, where: str) -> dict:
    if not isinstance(d, dict):
        raise ConfigError(f"{where} must be a JSON object")
    unknown = set(d) - allowed
    if unknown:
        raise ConfigError(f"unknown fields in {where}: {sorted(unknown)}")
    return d


def _sequence_from_config(spec, sign: int = 1) -> PhaseSequence:
    if isinstance(spec, str):
        return by_name(spec, sign)
    _check_keys(spec, {"name", "n", "phi2_over_pi", "phases_over_pi"}, "sequence")
    return from_json_dict(spec)


def _shape_from_config(d: Optional[dict], default: PulseShape) -> PulseShape:
    if d is None:
        return default
    _check_keys(d, {"kind", "duration", "peakRabi", "gaussianWidth", "chirpRate"}, "pulse")
    return PulseShape(
        kind=d.get("kind", default.kind),
        duration=float(d.get("duration", default.duration)),
        peak_rabi=float(d.get("peakRabi", default.peak_rabi)),
        gaussian_width=d.get("gaussianWidth"),
        chirp_rate=float(d.get("chirpRate", 0.0)),
    )


def _open_out(path: str):
    try:
        return open(path, "w", encoding="utf-8", newline="\n")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror}") from None


# -- commands -----------------------------------------------------------------


def cmd_gen(args) -> int:
    fam = args.family
    if fam == "ur":
        if args.n is None:
            raise DomainError("--n is required for the UR family")
        phi2 = symmetric_ur(args.n, args.sign).phi2_over_pi if args.phi2_over_pi is None \
            else parse_pi(args.phi2_over_pi)
        seq = ur_phases(args.n, phi2, args.sign)
    elif fam == "ur-sym":
        if args.n is None:
            raise DomainError("--n is required for the UR family")
        seq = symmetric_ur(args.n, args.sign)
    else:
        seq = baseline(fam.replace("-", "_"))
        if args.n is not None and args.n != seq.n:
            raise DomainError(f"{seq.name} has {seq.n} pulses, not {args.n}")
    out = sys.stdout
    if args.format == "json":
        out.write(json.dumps(to_json_dict(seq)) + "\n")
    else:
        out.write("index,phase_over_pi\n")
        for k, x in enumerate(seq.phases_over_pi, start=1):
            out.write(f"{k},{format_pi(x)}\n")
    return 0


SWEEP_KEYS = {"sequence", "sign", "totalPulses", "tauOverT", "grid", "pulse", "stepsPerPulse"}


def cmd_sweep(args) -> int:
    cfg = _load_config(args.config, SWEEP_KEYS)
    try:
        seq = _sequence_from_config(cfg.get("sequence", "UR20"), int(cfg.get("sign", 1)))
        g = _check_keys(cfg.get("grid", {}), {"detuningRange", "amplitudeRange", "resolution"}, "grid")
        grid = SweepGrid(
            tuple(g.get("detuningRange", (-0.5, 0.5))),
            tuple(g.get("amplitudeRange", (-0.5, 0.5))),
            tuple(g.get("resolution", (101, 101))),
        )
        shape = _shape_from_config(cfg.get("pulse"), PulseShape())
        result = fidelity_map(
            seq, int(cfg.get("totalPulses", 120)), grid,
            tau_over_T=float(cfg.get("tauOverT", 4.0)), shape=shape,
            integrator=IntegratorConfig(int(cfg.get("stepsPerPulse", 2000))),
            threads=args.threads,
        )
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(str(exc)) from None
    with _open_out(args.out) as fh:
        write_map_csv(result, fh)
    if args.heatmap:
        with _open_out(args.heatmap) as fh:
            write_map_pgm(result, fh)
    return 0


def cmd_scaling(args) -> int:
    if not 0 < args.p_min < args.p_max < 1:
        raise DomainError("need 0 < p-min < p-max < 1")
    if args.points < 2:
        raise DomainError("need at least 2 points")
    qs = list(np.logspace(math.log10(1 - args.p_max), math.log10(1 - args.p_min), args.points))
    phi2 = None if args.phi2_over_pi is None else parse_pi(args.phi2_over_pi)
    fits = scaling_fit(args.n_list, qs, alpha=args.alpha, delta=args.delta, phi2_over_pi=phi2)
    fh = sys.stdout if args.out is None else _open_out(args.out)
    try:
        fh.write("n,slope,points_used,flagged\n")
        for f in fits:
            fh.write(f"{f.n},{f.slope:.17g},{f.points_used},{int(f.flagged)}\n")
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


ENSEMBLE_KEYS = {"ensemble", "pulse", "tau", "idealPulses", "stepsPerPulse"}


def cmd_ensemble(args) -> int:
    cfg = _load_config(args.config, ENSEMBLE_KEYS)
    try:
        spec = EnsembleSpec.from_json_dict(cfg.get("ensemble", {}))
        default = PulseShape("rectangular", 10e-6, 2 * math.pi * 50e3)
        run = DDRun(
            _shape_from_config(cfg.get("pulse"), default),
            float(cfg.get("tau", 40e-6)),
            bool(cfg.get("idealPulses", False)),
            IntegratorConfig(int(cfg.get("stepsPerPulse", 2000))),
        )
        seqs = [None if s.lower() == "none" else by_name(s) for s in args.sequences]
        rows = storage_curves(spec, seqs, run, args.times, threads=args.threads)
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(str(exc)) from None
    with _open_out(args.out) as fh:
        write_storage_csv(rows, fh)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="urdd", description=__doc__)
    ap.add_argument("--version", action="version",
                    version=f"schemaVersion {SCHEMA_VERSION} build urdd-{__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="emit a phase sequence")
    g.add_argument("--family", choices=FAMILIES, required=True)
    g.add_argument("--n", type=int)
    g.add_argument("--phi2-over-pi", dest="phi2_over_pi")
    g.add_argument("--sign", type=_sign, default=1)
    g.add_argument("--format", choices=("json", "csv"), default="json")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("sweep", help="fidelity map over detuning and amplitude error")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--heatmap")
    s.add_argument("--threads", type=int, default=1)
    s.set_defaults(func=cmd_sweep)

    c = sub.add_parser("scaling", help="fit the order of error compensation")
    c.add_argument("--n-list", dest="n_list", type=_csv_list(int), default=[4, 8, 12, 16, 20])
    c.add_argument("--p-min", dest="p_min", type=float, default=0.99)
    c.add_argument("--p-max", dest="p_max", type=float, default=0.9999)
    c.add_argument("--points", type=int, default=10)
    c.add_argument("--alpha", type=float, default=0.1)
    c.add_argument("--delta", type=float, default=0.1)
    c.add_argument("--phi2-over-pi", dest="phi2_over_pi")
    c.add_argument("--out")
    c.set_defaults(func=cmd_scaling)

    e = sub.add_parser("ensemble", help="storage-efficiency proxy of an inhomogeneous ensemble")
    e.add_argument("--config", required=True)
    e.add_argument("--sequences", type=_csv_list(str), required=True)
    e.add_argument("--times", type=_csv_list(float), required=True)
    e.add_argument("--out", required=True)
    e.add_argument("--threads", type=int, default=1)
    e.set_defaults(func=cmd_ensemble)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, ConfigError) as exc:
        print(f"urdd {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OutputError as exc:
        print(f"urdd {args.command}: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

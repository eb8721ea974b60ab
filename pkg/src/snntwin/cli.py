"""``snn-twin`` command-line front end.

Exit codes: 0 success, 1 verification failure, 2 configuration error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import io
import json
import os
import sys
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from pathlib import Path

from . import analysis
from .energy import (
    HardwareProfile,
    WorkloadConfig,
    compute_advantage,
    total_energy,
)
from .errors import ConfigurationError, DomainError
from .exact import as_fraction, fmt_float
from .profiles import PRESET_NAMES, PROFILE_DIR_ENV, builtin_profiles, profile_to_dict, resolve_profile
from .twin import Scenario, scenario_sparsity
from .verify import run_verification

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3

SCENARIO_HELP = (
    "scenario named from the SNN's side: worst (gamma = 1 - s_r), "
    "average (gamma = 1 - 2 s_r T/(T+1)), best (gamma = 1 - s_r T). "
    "A QNN-relative 'best case for the QNN' is the SNN's worst."
)


class CliError(Exception):
    def __init__(self, message, code=EXIT_CONFIG):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class RunManifest:
    command: str
    config: str | None
    hw: str | None
    out: str | None
    format: str
    seed: int | None = None

    @classmethod
    def from_args(cls, args, default_format="json"):
        out = getattr(args, "out", None)
        fmt = getattr(args, "format", None)
        ext = Path(out).suffix.lower().lstrip(".") if out else ""
        if ext in ("csv", "json"):
            if fmt and fmt != ext:
                raise CliError(f"--format {fmt} conflicts with output file extension .{ext}")
            fmt = ext
        return cls(
            command=args.command,
            config=getattr(args, "config", None),
            hw=getattr(args, "hw", None),
            out=out,
            format=fmt or default_format,
            seed=getattr(args, "seed", None),
        )


# -- argument parsing helpers ---------------------------------------------

def parse_int_list(text: str) -> list[int]:
    """``"1..8"`` (inclusive) or ``"1,2,4"``."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            lo, hi = part.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    if not out:
        raise argparse.ArgumentTypeError(f"empty integer list {text!r}")
    return out


def parse_grid(text: str) -> list[Fraction]:
    """``"start:stop:step"`` (inclusive, exact) or a comma list of decimals."""
    try:
        if ":" in text:
            start, stop, step = (as_fraction(x) for x in text.split(":"))
            if step <= 0:
                raise argparse.ArgumentTypeError("grid step must be positive")
            n = int((stop - start) / step)
            return [start + i * step for i in range(n + 1)]
        return [as_fraction(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}: {exc}") from None


def exact_number(text: str) -> Fraction:
    try:
        return as_fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _emit(text: str, manifest: RunManifest):
    if manifest.out:
        try:
            Path(manifest.out).write_text(text)
        except OSError as exc:
            raise CliError(f"cannot write {manifest.out}: {exc}", EXIT_IO) from exc
    else:
        sys.stdout.write(text)


def _profiles(names: list[str]) -> list[HardwareProfile]:
    return [resolve_profile(n) for n in names]


# -- commands -------------------------------------------------------------

def _load_workload(args) -> tuple[WorkloadConfig, str | None]:
    doc = {}
    if args.config:
        try:
            with open(args.config) as fh:
                doc = json.load(fh, parse_float=Decimal)
        except OSError as exc:
            raise CliError(f"cannot read {args.config}: {exc}", EXIT_IO) from exc
        except json.JSONDecodeError as exc:
            raise CliError(f"{args.config}: invalid JSON ({exc})") from exc
    if args.preset:
        preset = {m.name: m for m in analysis.MODEL_PRESETS}.get(args.preset)
        if preset is None:
            raise CliError(f"unknown model preset {args.preset!r}")
        doc.setdefault("T", preset.T)
        doc.setdefault("s_r", preset.s_r)
    for key in ("T", "s_r", "gamma", "n_src", "weight_bits", "scenario"):
        val = getattr(args, key, None)
        if val is not None:
            doc[key] = val
    for key in ("T", "s_r"):
        if key not in doc:
            raise CliError(f"workload needs {key!r} (use --{key.replace('_', '-')}, --preset or --config)")
    T = int(doc["T"])
    s_r = as_fraction(doc["s_r"])
    scenario = None
    if "gamma" in doc:
        gamma = as_fraction(doc["gamma"])
    else:
        scenario = Scenario.parse(doc.get("scenario", "average"))
        gamma = scenario_sparsity(s_r, T, scenario)
    cfg = WorkloadConfig(
        n_src=int(doc.get("n_src", 4096)), T=T, s_r=s_r, gamma=gamma, weight_bits=int(doc.get("weight_bits", 8))
    )
    return cfg, scenario.value if scenario else None


def _breakdown_dict(b) -> dict:
    return {
        "compute_pj": float(b.compute_pj),
        "data_pj": float(b.data_pj),
        "total_pj": float(b.total_pj),
        "transmission_mode": b.transmission_mode,
        "aggregated": b.aggregated,
        "terms": {k: float(v) for k, v in b.terms.items()},
    }


def cmd_energy(args) -> int:
    manifest = RunManifest.from_args(args)
    cfg, scenario = _load_workload(args)
    hw = resolve_profile(args.hw)
    snn, qnn = total_energy(cfg, hw, args.snn_mode, strict_log2=args.strict_log2)
    ratio = float(snn.total_pj / qnn.total_pj) if qnn.total_pj else None
    adv = compute_advantage(cfg, hw, exact=args.exact)
    if manifest.format == "csv":
        rec = analysis.evaluate_point(args.preset or "custom", hw, scenario or "fixed-gamma", cfg, args.snn_mode)
        _emit(analysis.csv_text([rec]), manifest)
        return EXIT_OK
    report = {
        "hw": hw.name,
        "workload": {
            "n_src": cfg.n_src, "T": cfg.T, "s_r": float(cfg.s_r), "gamma": float(cfg.gamma),
            "weight_bits": cfg.weight_bits, "activation_bits": cfg.activation_bits, "scenario": scenario,
        },
        "snn": _breakdown_dict(snn),
        "qnn": _breakdown_dict(qnn),
        "e_snn_total_pj": float(snn.total_pj),
        "e_qnn_total_pj": float(qnn.total_pj),
        "ratio": float(fmt_float(ratio, 6)) if ratio is not None else None,
        "compute_advantage": {"holds": adv.holds, "margin": float(adv.margin), "closed_form": adv.closed_form,
                              "exact": args.exact},
    }
    _emit(analysis.json_text(report), manifest)
    return EXIT_OK


def cmd_breakeven(args) -> int:
    manifest = RunManifest.from_args(args, default_format="json" if args.json else "text")
    hw = resolve_profile(args.hw)
    results = [analysis.breakeven_spike_rate(T, args.n_src, args.gamma, args.weight_bits, hw) for T in args.T]
    notes = analysis.breakeven_annotations(results)
    if manifest.format == "json":
        _emit(analysis.json_text({"results": analysis.breakeven_to_json(results), "annotations": notes}), manifest)
    elif manifest.format == "csv":
        buf = io.StringIO()
        analysis.write_breakeven_csv(results, buf)
        _emit(buf.getvalue(), manifest)
    else:
        lines = [f"hw={hw.name} n_src={args.n_src} gamma={fmt_float(args.gamma)} weight_bits={args.weight_bits}",
                 f"{'T':>3} {'bits':>4} {'s_star':>10} {'segment':>7}  status"]
        for r in results:
            s = fmt_float(r.s_star, 6) if r.s_star is not None else "none"
            reason = {"infeasible": "infeasible (QNN cheaper even at zero spikes)",
                      "snn_always_wins": "SNN cheaper at every rate"}.get(r.status, r.status)
            lines.append(f"{r.T:>3} {r.T.bit_length():>4} {s:>10} {r.segment or '-':>7}  {reason}")
        for k, v in notes.items():
            lines.append(f"{k}: {'n/a' if v is None else fmt_float(v, 6)}")
        _emit("\n".join(lines) + "\n", manifest)
    return EXIT_OK


def cmd_sweep(args) -> int:
    manifest = RunManifest.from_args(args, default_format="csv")
    hw = resolve_profile(args.hw)
    records, breakevens = analysis.sensitivity(args.T, args.s_r, args.weight_bits, args.n_src, hw, args.gamma)
    if manifest.format == "json":
        payload = {"records": analysis.records_to_json(records), "breakeven": analysis.breakeven_to_json(breakevens)}
        _emit(analysis.json_text(payload), manifest)
        return EXIT_OK
    _emit(analysis.csv_text(records), manifest)
    buf = io.StringIO()
    analysis.write_breakeven_csv(breakevens, buf)
    if manifest.out:
        p = Path(manifest.out)
        companion = RunManifest(manifest.command, None, manifest.hw,
                                str(p.with_name(p.stem + "_breakeven" + p.suffix)), "csv")
        _emit(buf.getvalue(), companion)
    else:
        sys.stdout.write("\n")
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


def cmd_landscape(args) -> int:
    manifest = RunManifest.from_args(args, default_format="csv")
    hws = _profiles(args.hw)
    models = analysis.MODEL_PRESETS
    if args.models:
        by_name = {m.name: m for m in models}
        unknown = [m for m in args.models if m not in by_name]
        if unknown:
            raise CliError(f"unknown model preset(s): {', '.join(unknown)}")
        models = [by_name[m] for m in args.models]
    records = analysis.landscape(models, hws, tuple(Scenario), n_src=args.n_src, weight_bits=args.weight_bits)
    if manifest.format == "json":
        _emit(analysis.json_text(analysis.records_to_json(records)), manifest)
    else:
        _emit(analysis.csv_text(records), manifest)
    return EXIT_OK


def cmd_verify(args) -> int:
    manifest = RunManifest.from_args(args, default_format="text")
    rep = run_verification(args.trials, args.seed, args.max_n_src, args.max_T, args.max_weight)
    d = rep.as_dict()
    if manifest.format == "json":
        _emit(analysis.json_text(d), manifest)
    else:
        _emit("".join(f"{k}: {v}\n" for k, v in d.items()), manifest)
    return EXIT_OK if rep.passed else EXIT_VERIFY


def cmd_presets(args) -> int:
    if args.dump:
        hw = resolve_profile(args.dump)
        sys.stdout.write(json.dumps(profile_to_dict(hw), indent=2) + "\n")
        return EXIT_OK
    for hw in builtin_profiles().values():
        sys.stdout.write(
            f"{hw.name}: e_move_sparse={fmt_float(hw.e_move_sparse)} pJ/bit, "
            f"e_move_dense={fmt_float(hw.e_move_dense)} pJ/bit, e_acc={fmt_float(hw.e_acc)} pJ\n"
        )
    pdir = os.environ.get(PROFILE_DIR_ENV)
    if pdir and Path(pdir).is_dir():
        for p in sorted(Path(pdir).glob("*.json")):
            sys.stdout.write(f"{p.stem}: user profile ({p})\n")
    for m in analysis.MODEL_PRESETS:
        sys.stdout.write(f"model {m.name}: T={m.T}, s_r={fmt_float(m.s_r)}\n")
    return EXIT_OK


# -- parser ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="snn-twin", description="SNN/QNN twin energy analysis")
    sub = p.add_subparsers(dest="command", required=True)

    def out_flags(sp, formats=("csv", "json")):
        sp.add_argument("--out", help="output file (stdout if omitted)")
        sp.add_argument("--format", choices=formats)

    e = sub.add_parser("energy", help="energy breakdown at one operating point", description=SCENARIO_HELP)
    e.add_argument("--hw", default="typical-neuromorphic", help="profile name or JSON path")
    e.add_argument("--config", help="workload JSON with n_src, T, s_r, gamma|scenario, weight_bits")
    e.add_argument("--preset", help="model preset: " + ", ".join(m.name for m in analysis.MODEL_PRESETS))
    e.add_argument("--T", type=int)
    e.add_argument("--s-r", dest="s_r", type=exact_number)
    e.add_argument("--gamma", type=exact_number, help="QNN sparsity; overrides --scenario")
    e.add_argument("--scenario", choices=[s.value for s in Scenario], help=SCENARIO_HELP)
    e.add_argument("--n-src", dest="n_src", type=int)
    e.add_argument("--weight-bits", dest="weight_bits", type=int)
    e.add_argument("--snn-mode", choices=["auto", "sparse", "dense", "aggregated"], default="auto")
    e.add_argument("--exact", action="store_true", help="keep the 1/N_src term in the compute condition")
    e.add_argument("--strict-log2", action="store_true", help="aggregated mode: use log2(T) bits")
    out_flags(e)
    e.set_defaults(func=cmd_energy)

    b = sub.add_parser("breakeven", help="breakeven spike rate per window length")
    b.add_argument("--hw", default="typical-neuromorphic")
    b.add_argument("--T", type=parse_int_list, default=list(range(1, 9)), help="e.g. 1..8 or 2,4,8")
    b.add_argument("--n-src", dest="n_src", type=int, default=4096)
    b.add_argument("--gamma", type=exact_number, default=Fraction("0.8"))
    b.add_argument("--weight-bits", dest="weight_bits", type=int, default=8)
    b.add_argument("--json", action="store_true")
    out_flags(b, ("text", "csv", "json"))
    b.set_defaults(func=cmd_breakeven)

    s = sub.add_parser("sweep", help="energy vs spike rate sensitivity grid")
    s.add_argument("--hw", default="typical-neuromorphic")
    s.add_argument("--T", type=parse_int_list, default=list(range(1, 9)))
    s.add_argument("--s-r", dest="s_r", type=parse_grid, default=parse_grid("0:0.5:0.01"))
    s.add_argument("--weight-bits", dest="weight_bits", type=parse_int_list, default=[4, 8])
    s.add_argument("--n-src", dest="n_src", type=parse_int_list, default=[64, 4096])
    s.add_argument("--gamma", type=exact_number, default=Fraction("0.8"))
    out_flags(s)
    s.set_defaults(func=cmd_sweep)

    ls = sub.add_parser("landscape", help="preset models x hardware x scenarios")
    ls.add_argument("--hw", type=lambda t: [x for x in t.split(",") if x], default=list(PRESET_NAMES))
    ls.add_argument("--models", type=lambda t: [x for x in t.split(",") if x])
    ls.add_argument("--n-src", dest="n_src", type=int, default=4096)
    ls.add_argument("--weight-bits", dest="weight_bits", type=int, default=8)
    out_flags(ls)
    ls.set_defaults(func=cmd_landscape)

    v = sub.add_parser("verify", help="randomized simulator vs closed-form check")
    v.add_argument("--trials", type=int, default=10000)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--max-n-src", dest="max_n_src", type=int, default=16)
    v.add_argument("--max-T", dest="max_T", type=int, default=32)
    v.add_argument("--max-weight", dest="max_weight", type=exact_number,
                   help="draw each weight up to this multiple of theta (allows premise violations)")
    out_flags(v, ("text", "json"))
    v.set_defaults(func=cmd_verify)

    pr = sub.add_parser("presets", help="list built-in profiles and model presets")
    pr.add_argument("--dump", metavar="NAME", help="print a profile as JSON")
    pr.set_defaults(func=cmd_presets)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (ConfigurationError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

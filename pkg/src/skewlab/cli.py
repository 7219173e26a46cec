"""Command-line front end.

Subcommands: analyze, deskew, tdt, skew, batch, synth. Data goes to
stdout or --out; warnings and diagnostics go to stderr. Exit codes:
0 on success, 1 on runtime failure (including any per-file failure in
batch), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from io import StringIO
from pathlib import Path

import numpy as np

from . import _kernels
from .batch import analyze_batch, record_from_result, write_report_csv, write_report_json
from .conventional import Excitation, phase_skew, tdt_response, tdt_skew
from .deskew import FomConfig, apply_deskew, compute_sild, solve_deskew
from .errors import EmptyInput, SkewlabError
from .network import to_mixed_mode
from .synth import (
    ChannelSpec,
    LineSpec,
    SeDelaySpec,
    build_channel,
    frequency_grid,
    make_coupled_pair,
    make_uncoupled_pair,
)
from .touchstone import TouchstoneOptions, parse_touchstone, write_touchstone

_SUFFIX = {"k": 1e3, "m": 1e6, "g": 1e9, "t": 1e12}


def _freq(text: str) -> float:
    """Frequency argument: plain/scientific Hz, or with a k/m/g/t suffix."""
    t = text.strip().lower()
    mult = 1.0
    if t and t[-1] in _SUFFIX:
        mult = _SUFFIX[t[-1]]
        t = t[:-1]
    try:
        value = float(t) * mult
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad frequency {text!r}") from None
    return value


def _emit(text: str, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _pairs(x, y):
    return [
        [float(a), float(b) if math.isfinite(b) else None]
        for a, b in zip(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    ]


def _fom_config(args) -> FomConfig:
    return FomConfig(
        f_b=args.fb,
        f_r=args.fr,
        f_t=args.ft,
        f_min=args.fmin,
        f_max=args.fmax,
        grid_step=args.grid_step,
    )


def _add_fom_args(p: argparse.ArgumentParser):
    p.add_argument("--fb", type=_freq, default=106.25e9, help="baud rate in Hz (default 106.25g)")
    p.add_argument("--fr", type=_freq, default=None, help="rolloff corner (default 0.75*fb)")
    p.add_argument("--ft", type=_freq, default=None, help="transmitter corner (default fb)")
    p.add_argument("--fmin", type=_freq, default=None, help="band start (default lowest measured)")
    p.add_argument("--fmax", type=_freq, default=None, help="band stop (default min(fb, highest))")
    p.add_argument("--grid-step", type=_freq, default=10e6, help="FOM grid step (default 10m)")


def _cmd_analyze(args) -> int:
    net = parse_touchstone(args.file)
    cfg = _fom_config(args)
    res = compute_sild(net, cfg)
    record = record_from_result(str(args.file), res, cfg)
    if args.format == "json":
        payload = {
            "source_id": record.source_id,
            "fom_sild_db": res.fom_sild,
            "direction_residual_db": res.direction_residual,
            "reciprocity_quality": res.reciprocity_quality,
            "enforced_reciprocity": res.enforced_reciprocity,
            "record": {
                "source_id": record.source_id,
                "fom_sild_db": record.fom_sild,
                "max_abs_sild_db": record.max_abs_sild,
                "f_min_hz": record.band[0],
                "f_max_hz": record.band[1],
                "reciprocity_quality": record.reciprocity_quality,
                "flags": {
                    "enforced_reciprocity": record.flags.enforced_reciprocity,
                    "nonconverged_points": record.flags.nonconverged_points,
                },
            },
            "sild": _pairs(res.frequencies, res.sild),
            "eq_skew": _pairs(res.frequencies, res.eq_skew),
        }
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
    else:
        buf = StringIO()
        buf.write(f"# fom_sild_db={res.fom_sild!r}\n")
        buf.write(f"# max_abs_sild_db={float(record.max_abs_sild)!r}\n")
        buf.write(f"# direction_residual_db={res.direction_residual!r}\n")
        buf.write(f"# reciprocity_quality={res.reciprocity_quality!r}\n")
        buf.write("frequency_hz,sild_db,eq_skew_s\n")
        for f, s, e in zip(res.frequencies, res.sild, res.eq_skew):
            buf.write(f"{float(f)!r},{float(s)!r},{float(e)!r}\n")
        _emit(buf.getvalue(), args.out)
    return 0


def _cmd_deskew(args) -> int:
    net = parse_touchstone(args.file)
    sol = solve_deskew(net)
    bad = int(np.count_nonzero(~sol.usable))
    if bad:
        print(
            f"warning: {bad} of {sol.frequencies.size} frequencies did not converge",
            file=sys.stderr,
        )
    corrected = apply_deskew(net, sol)
    write_touchstone(
        corrected, args.out, TouchstoneOptions(frequency_unit=args.unit, fmt=args.fmt)
    )
    print(
        f"de-skewed {args.file} -> {args.out} "
        f"(max residual skew {np.max(sol.residual_skew):.3g} s)",
        file=sys.stderr,
    )
    return 0


def _cmd_tdt(args) -> int:
    net = parse_touchstone(args.file)
    exc = Excitation(
        kind=args.excitation,
        rise_time=args.rise_time,
        amplitude=args.amplitude,
        bit_time=args.bit_time,
        bit_count=args.bits,
    )
    trace = tdt_response(net, exc)
    skew = tdt_skew(trace, args.threshold)
    if args.format == "json":
        payload = {
            "tdt_skew_s": skew,
            "threshold": args.threshold,
            "trace": [
                [float(t), float(p), float(n)]
                for t, p, n in zip(trace.time, trace.v_p, trace.v_n)
            ],
        }
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
    else:
        buf = StringIO()
        buf.write(f"# tdt_skew_s={float(skew)!r}\n")
        buf.write(f"# threshold={args.threshold!r}\n")
        buf.write("time_s,v_p,v_n\n")
        for t, p, n in zip(trace.time, trace.v_p, trace.v_n):
            buf.write(f"{float(t)!r},{float(p)!r},{float(n)!r}\n")
        _emit(buf.getvalue(), args.out)
    return 0


def _cmd_skew(args) -> int:
    net = parse_touchstone(args.file)
    profile = phase_skew(to_mixed_mode(net), args.direction)
    if args.format == "json":
        payload = {
            "direction": profile.direction,
            "skew": _pairs(profile.frequencies, profile.skew),
            "t_first": _pairs(profile.frequencies, profile.t_first),
            "t_second": _pairs(profile.frequencies, profile.t_second),
        }
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
    else:
        buf = StringIO()
        buf.write("frequency_hz,skew_s\n")
        for f, s in zip(profile.frequencies, profile.skew):
            buf.write(f"{float(f)!r},{float(s)!r}\n")
        _emit(buf.getvalue(), args.out)
    return 0


def _cmd_batch(args) -> int:
    files: list[str] = []
    for p in args.paths:
        path = Path(p)
        if path.is_dir():
            files.extend(sorted(str(q) for q in path.glob("*.s4p")))
        else:
            files.append(str(path))
    if not files:
        raise EmptyInput(f"no Touchstone files under {', '.join(args.paths)}")
    report = analyze_batch(
        files,
        cfg=_fom_config(args),
        bin_width=args.bin_width,
        thresholds=[float(t) for t in args.thresholds.split(",")],
    )
    if args.csv:
        with open(args.csv, "w") as fh:
            write_report_csv(report, fh)
    buf = StringIO()
    write_report_json(report, buf)
    _emit(buf.getvalue(), args.out)
    for source, message in report.errors:
        print(f"failed: {source}: {message}", file=sys.stderr)
    print(
        f"analyzed {len(report.records)} of {len(files)} files",
        file=sys.stderr,
    )
    return 1 if report.errors else 0


def _cmd_synth(args) -> int:
    grid = frequency_grid(args.f_start, args.f_stop, args.points)
    spec = LineSpec(
        length=args.length,
        odd_delay_per_m=args.delay_per_m,
        even_delay_per_m=args.delay_per_m * (1.04 if args.coupled else 1.0),
        loss_coeff=args.loss,
        p_excess_delay=args.skew_ps * 1e-12,
    )
    if args.se_delay_ps:
        net = build_channel(
            ChannelSpec(segments=[SeDelaySpec(delay_p=args.se_delay_ps * 1e-12), spec], grid=grid)
        )
    elif args.coupled:
        net = make_coupled_pair(spec, grid)
    else:
        net = make_uncoupled_pair(spec, grid)
    write_touchstone(net, args.out, TouchstoneOptions(fmt=args.fmt))
    print(f"wrote {args.out} ({args.points} points)", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="skewlab",
        description="Intra-pair skew impact analysis for 4-port differential channels "
        f"(solver backend: {_kernels.BACKEND})",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="SILD curve, figure of merit and fleet record")
    p.add_argument("file")
    _add_fom_args(p)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("deskew", help="write the phase-corrected network")
    p.add_argument("file")
    p.add_argument("--out", required=True)
    p.add_argument("--unit", default="GHz", help="output frequency unit")
    p.add_argument("--fmt", default="RI", help="output value format (RI, MA, DB)")
    p.set_defaults(func=_cmd_deskew)

    p = sub.add_parser("tdt", help="transmitted step/pulse responses and TDT skew")
    p.add_argument("file")
    p.add_argument("--excitation", choices=("step", "pulse"), default="step")
    p.add_argument("--rise-time", type=float, default=10e-12, help="20-80%% rise, seconds")
    p.add_argument("--bits", type=int, default=1)
    p.add_argument("--bit-time", type=float, default=None, help="seconds per bit (pulse)")
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_tdt)

    p = sub.add_parser("skew", help="per-frequency phase skew profile")
    p.add_argument("file")
    p.add_argument("--direction", choices=("21", "12"), default="21")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_skew)

    p = sub.add_parser("batch", help="analyze many files and aggregate the distribution")
    p.add_argument("paths", nargs="+", help="directories (*.s4p) and/or files")
    _add_fom_args(p)
    p.add_argument("--thresholds", default="0.1,0.2,0.3", help="comma-separated dB thresholds")
    p.add_argument("--bin-width", type=float, default=0.05, help="histogram bin width, dB")
    p.add_argument("--csv", default=None, help="also write records as CSV here")
    p.add_argument("--out", default=None, help="JSON report path (default stdout)")
    p.set_defaults(func=_cmd_batch)

    p = sub.add_parser("synth", help="generate a synthetic channel as Touchstone")
    p.add_argument("--skew-ps", type=float, default=0.0, help="P-line excess delay, ps")
    p.add_argument("--coupled", action="store_true", help="coupled pair (4%% mode split)")
    p.add_argument("--se-delay-ps", type=float, default=0.0, help="prepend a P-only delay, ps")
    p.add_argument("--f-start", type=_freq, default=10e6)
    p.add_argument("--f-stop", type=_freq, default=110e9)
    p.add_argument("--points", type=int, default=1100)
    p.add_argument("--length", type=float, default=0.5, help="meters")
    p.add_argument("--loss", type=float, default=8.0, help="dB/(m*sqrt(GHz))")
    p.add_argument("--delay-per-m", type=float, default=3.6e-9, help="odd-mode delay, s/m")
    p.add_argument("--fmt", default="RI", help="Touchstone value format")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_synth)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SkewlabError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Fleet-style batch analysis: run the SILD pipeline over many files and
aggregate the figure-of-merit distribution.

Parallelism is capped by the SKEWLAB_THREADS environment variable
(unset or 0 means one worker per CPU); records always come back in
input order regardless of worker count.
"""

from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .deskew import FomConfig, compute_sild
from .errors import EmptyInput, SkewlabError
from .touchstone import parse_touchstone

REPORT_SCHEMA = "skewlab-report/1"

CSV_HEADER = (
    "source_id,fom_sild_db,max_abs_sild_db,f_min_hz,f_max_hz,reciprocity_quality,flags"
)


@dataclass
class RecordFlags:
    enforced_reciprocity: bool = False
    nonconverged_points: int = 0

    def tokens(self) -> list[str]:
        out = []
        if self.enforced_reciprocity:
            out.append("enforced_reciprocity")
        if self.nonconverged_points:
            out.append(f"nonconverged_points={self.nonconverged_points}")
        return out


@dataclass
class ChannelRecord:
    source_id: str
    fom_sild: float
    max_abs_sild: float
    band: tuple[float, float]
    reciprocity_quality: float
    flags: RecordFlags = field(default_factory=RecordFlags)


@dataclass
class BatchReport:
    records: list[ChannelRecord]
    histogram: list[tuple[float, float, int]]
    fraction_below: list[tuple[float, float]]
    errors: list[tuple[str, str]]


def _thread_count() -> int:
    raw = os.environ.get("SKEWLAB_THREADS", "0")
    n = int(raw)
    if n < 0:
        raise ValueError(f"SKEWLAB_THREADS={raw!r} must be >= 0")
    return n if n > 0 else (os.cpu_count() or 1)


def record_from_result(source_id: str, res, cfg: FomConfig | None = None) -> ChannelRecord:
    """Condense one SILD analysis into a fleet record."""
    f = res.frequencies
    rcfg = (cfg or FomConfig()).resolve(f)
    sel = (f >= rcfg.f_min) & (f <= rcfg.f_max) & ~res.excluded
    max_abs = float(np.max(np.abs(res.sild[sel]))) if np.any(sel) else 0.0
    return ChannelRecord(
        source_id=source_id,
        fom_sild=res.fom_sild,
        max_abs_sild=max_abs,
        band=(rcfg.f_min, rcfg.f_max),
        reciprocity_quality=res.reciprocity_quality,
        flags=RecordFlags(
            enforced_reciprocity=res.enforced_reciprocity,
            nonconverged_points=int(np.count_nonzero(res.excluded)),
        ),
    )


def _analyze_one(path, cfg: FomConfig | None) -> ChannelRecord:
    net = parse_touchstone(path)
    res = compute_sild(net, cfg)
    return record_from_result(str(path), res, cfg)


def fom_histogram(values, bin_width: float = 0.05) -> list[tuple[float, float, int]]:
    """Half-open bins [k*w, (k+1)*w) climbing from 0 dB to cover the data."""
    if bin_width <= 0.0:
        raise ValueError("bin_width must be positive")
    vals = np.asarray(list(values), dtype=float)
    if vals.size == 0:
        return []
    if np.any(vals < 0.0):
        raise ValueError("figure-of-merit values must be non-negative")
    nbins = int(np.floor(np.max(vals) / bin_width)) + 1
    idx = np.minimum(np.floor(vals / bin_width).astype(int), nbins - 1)
    counts = np.bincount(idx, minlength=nbins)
    return [(k * bin_width, (k + 1) * bin_width, int(counts[k])) for k in range(nbins)]


def fraction_below(values, thresholds) -> list[tuple[float, float]]:
    """Fraction of values strictly below each threshold."""
    vals = np.asarray(list(values), dtype=float)
    if vals.size == 0:
        raise EmptyInput("no values to aggregate")
    return [(float(t), float(np.count_nonzero(vals < t) / vals.size)) for t in thresholds]


def analyze_batch(
    paths,
    cfg: FomConfig | None = None,
    bin_width: float = 0.05,
    thresholds=(0.1, 0.2, 0.3),
) -> BatchReport:
    """Run the SILD pipeline over many Touchstone files.

    Files that fail to parse or analyze become entries in the report's
    errors list rather than aborting the run; histogram counts plus
    error count always equal the number of input paths.
    """
    paths = [str(p) for p in paths]
    if not paths:
        raise EmptyInput("no input files")

    def work(path: str):
        try:
            return _analyze_one(path, cfg)
        except (SkewlabError, OSError, ValueError) as exc:
            return (path, f"{type(exc).__name__}: {exc}")

    workers = min(_thread_count(), len(paths))
    if workers == 1:
        outcomes = [work(p) for p in paths]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(work, paths))

    records = [o for o in outcomes if isinstance(o, ChannelRecord)]
    errors = [o for o in outcomes if not isinstance(o, ChannelRecord)]
    foms = [r.fom_sild for r in records]
    return BatchReport(
        records=records,
        histogram=fom_histogram(foms, bin_width),
        fraction_below=fraction_below(foms, thresholds) if records else [],
        errors=errors,
    )


def report_to_dict(report: BatchReport) -> dict:
    return {
        "schema": REPORT_SCHEMA,
        "records": [
            {
                "source_id": r.source_id,
                "fom_sild_db": r.fom_sild,
                "max_abs_sild_db": r.max_abs_sild,
                "f_min_hz": r.band[0],
                "f_max_hz": r.band[1],
                "reciprocity_quality": r.reciprocity_quality,
                "flags": {
                    "enforced_reciprocity": r.flags.enforced_reciprocity,
                    "nonconverged_points": r.flags.nonconverged_points,
                },
            }
            for r in report.records
        ],
        "histogram": [[lo, hi, n] for lo, hi, n in report.histogram],
        "fraction_below": [[t, frac] for t, frac in report.fraction_below],
        "errors": [{"source_id": s, "error": msg} for s, msg in report.errors],
    }


def write_report_json(report: BatchReport, stream):
    json.dump(report_to_dict(report), stream, indent=2)
    stream.write("\n")


def write_report_csv(report: BatchReport, stream):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER.split(","))
    for r in report.records:
        writer.writerow(
            [
                r.source_id,
                f"{r.fom_sild:.12g}",
                f"{r.max_abs_sild:.12g}",
                f"{r.band[0]:.12g}",
                f"{r.band[1]:.12g}",
                f"{r.reciprocity_quality:.12g}",
                ";".join(r.flags.tokens()),
            ]
        )

"""Conventional intra-pair skew metrics: phase skew, the cosine loss
model, TDT threshold skew, D-to-C conversion delta and equivalent
integrated phase skew (EIPS).

Sign convention used throughout: per-path delays are positive phase
delays t = -unwrapped_phase/(2*pi*f), and skew is the P-path delay minus
the N-path delay. A pair whose P conductor is the slower one therefore
has positive skew, which also matches the TDT definition below
(first-crossing time of v_p minus that of v_n).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._math import DB_FLOOR, TWO_PI, magnitude_db, unwrap_masked
from .errors import (
    EmptyBand,
    InsufficientBandwidth,
    NoCrossing,
    PortCountMismatch,
)
from .network import MixedModeNetwork, SingleEndedNetwork, _pair_entries
from .deskew import FomConfig, fom_weight

# below this magnitude the phase of a transmission term is meaningless
DEGENERATE_MAGNITUDE = 1e-9

# 20-80% span of a raised-cosine edge as a fraction of its full duration
_EDGE_FRACTION = (np.pi - 2.0 * np.arccos(0.6)) / np.pi


@dataclass
class SkewProfile:
    """Per-frequency intra-pair phase skew in one propagation direction.

    t_first/t_second are the P- and N-path phase delays; skew is their
    difference. excluded marks frequencies where either magnitude was
    too small for a meaningful phase (values there are NaN).
    """

    frequencies: np.ndarray
    skew: np.ndarray
    direction: str
    t_first: np.ndarray
    t_second: np.ndarray
    excluded: np.ndarray


@dataclass
class Excitation:
    """TDT drive: a raised-cosine-edged step or pulse.

    rise_time is the 20-80% rise in seconds; the edge is placed so its
    50% instant sits at rise_time/2 on the output time axis. For pulses,
    bit_count*bit_time sets the flat-top duration between edge centers.
    """

    kind: str = "step"
    rise_time: float = 10e-12
    amplitude: float = 1.0
    bit_time: float | None = None
    bit_count: int = 1

    def __post_init__(self):
        if self.kind not in ("step", "pulse"):
            raise ValueError(f"excitation kind {self.kind!r} (step or pulse)")
        if self.rise_time <= 0.0:
            raise ValueError("rise_time must be positive")
        if self.kind == "pulse":
            if self.bit_time is None or self.bit_time <= 0.0:
                raise ValueError("pulse excitation needs a positive bit_time")
            if self.bit_count < 1:
                raise ValueError("bit_count must be at least 1")


@dataclass
class TdtTrace:
    """Single-ended transmitted step/pulse responses of the two conductors."""

    time: np.ndarray
    v_p: np.ndarray
    v_n: np.ndarray


def phase_skew(mm: MixedModeNetwork, direction: str = "21") -> SkewProfile:
    """Intra-pair skew from the single-ended responses to differential drive.

    Direction "21" (left to right) uses ssd21/ssd41, "12" uses
    ssd12/ssd32. Phases are unwrapped along frequency with the lowest
    valid point anchored in (-pi, pi].
    """
    if direction == "21":
        first, second = mm.ssd21, mm.ssd41
    elif direction == "12":
        first, second = mm.ssd12, mm.ssd32
    else:
        raise ValueError(f"direction {direction!r} (must be '21' or '12')")
    f = mm.frequencies
    valid = (np.abs(first) >= DEGENERATE_MAGNITUDE) & (np.abs(second) >= DEGENERATE_MAGNITUDE)
    t_first = -unwrap_masked(np.angle(first), valid) / (TWO_PI * f)
    t_second = -unwrap_masked(np.angle(second), valid) / (TWO_PI * f)
    return SkewProfile(
        frequencies=f,
        skew=t_first - t_second,
        direction=direction,
        t_first=t_first,
        t_second=t_second,
        excluded=~valid,
    )


def skew_loss(t_skew, frequencies, floor: float = DB_FLOOR) -> np.ndarray:
    """Differential loss of an ideal pair with the given flat skew:
    20*log10|cos(pi f t)|, floored at `floor` dB near the nulls."""
    f = np.asarray(frequencies, dtype=float)
    t = np.asarray(t_skew, dtype=float)
    return magnitude_db(np.cos(np.pi * f * t), floor=floor)


def dc_conversion_delta(mm: MixedModeNetwork, direction: str = "21") -> np.ndarray:
    """Differential-to-common conversion relative to the differential thru,
    20*log10|scd| - 20*log10|sdd|, floored at the dB floor.

    NaN where the differential thru itself is degenerate.
    """
    if direction == "21":
        scd, sdd = mm.scd21, mm.sdd21
    elif direction == "12":
        scd, sdd = mm.scd12, mm.sdd12
    else:
        raise ValueError(f"direction {direction!r} (must be '21' or '12')")
    # ratio before the log so an exact-zero conversion lands exactly on
    # the floor sentinel instead of floor minus the thru loss
    with np.errstate(divide="ignore", invalid="ignore"):
        raw = 20.0 * np.log10(np.abs(scd) / np.abs(sdd))
    delta = np.maximum(raw, DB_FLOOR)
    return np.where(np.abs(sdd) < DEGENERATE_MAGNITUDE, np.nan, delta)


def _raised_cosine_edge(t: np.ndarray, center: float, width: float) -> np.ndarray:
    """0 -> 1 transition of full duration `width` centered at `center`."""
    x = np.clip((t - center) / width + 0.5, 0.0, 1.0)
    return 0.5 * (1.0 - np.cos(np.pi * x))


def _dc_extrapolated_spectrum(f_target, f_meas, vals) -> np.ndarray:
    """Linear-in-re/im resample with a DC point extrapolated as magnitude
    from the two lowest measured frequencies, zero phase."""
    m0, m1 = np.abs(vals[0]), np.abs(vals[1])
    dc = max(m0 - f_meas[0] * (m1 - m0) / (f_meas[1] - f_meas[0]), 0.0)
    xp = np.concatenate(([0.0], f_meas))
    re = np.interp(f_target, xp, np.concatenate(([dc], vals.real)))
    im = np.interp(f_target, xp, np.concatenate(([0.0], vals.imag)))
    return re + 1j * im


def _estimate_delay(f: np.ndarray, thru: np.ndarray) -> float:
    mag = np.abs(thru)
    if np.max(mag) < 1e-12:
        return 0.0
    slope = np.polyfit(f, np.unwrap(np.angle(thru)), 1)[0]
    return max(-slope / TWO_PI, 0.0)


def tdt_response(net: SingleEndedNetwork, exc: Excitation) -> TdtTrace:
    """Transmitted responses of both conductors to the same excitation.

    The excitation spectrum is applied to the resampled P and N thru
    terms on a uniform grid up to the measured maximum (time step
    1/(2*f_max)); the missing DC point is extrapolated from the two
    lowest measured frequencies. The window is at least four times the
    estimated channel delay plus the excitation duration, and the output
    is real by construction (Hermitian spectrum). Raises
    InsufficientBandwidth when the excitation still has more than 1% of
    its peak transmitted spectral content at the measured band edge.
    """
    if net.n_ports != 4:
        raise PortCountMismatch("TDT needs a 4-port network")
    s21 = _pair_entries(net)[0]
    s43 = _pair_entries(net)[2]
    f = net.frequencies
    dt = 1.0 / (2.0 * f[-1])

    edge_width = exc.rise_time / _EDGE_FRACTION
    # internal launch: rising-edge center a touch inside the window
    t0 = edge_width / 2.0 + 2.0 * dt
    exc_end = t0 + edge_width / 2.0
    if exc.kind == "pulse":
        exc_end += exc.bit_count * exc.bit_time
    t_delay = max(_estimate_delay(f, s21), _estimate_delay(f, s43))
    window = max(4.0 * (t_delay + exc_end), 64.0 * dt)
    n = 1 << int(np.ceil(np.log2(window / dt)))

    t = dt * np.arange(n)
    x = _raised_cosine_edge(t, t0, edge_width)
    if exc.kind == "pulse":
        x = x - _raised_cosine_edge(t, t0 + exc.bit_count * exc.bit_time, edge_width)
    x *= exc.amplitude

    spectrum = np.fft.rfft(np.diff(x, prepend=0.0))
    f_grid = np.fft.rfftfreq(n, dt)
    traces = []
    for thru in (s21, s43):
        product = spectrum * _dc_extrapolated_spectrum(f_grid, f, thru)
        peak = np.max(np.abs(product))
        if peak > 0.0 and np.abs(product[-1]) >= 0.01 * peak:
            raise InsufficientBandwidth(
                f"excitation content at {f[-1]:.4g} Hz is "
                f"{np.abs(product[-1]) / peak:.1%} of peak (needs < 1%)"
            )
        traces.append(np.cumsum(np.fft.irfft(product, n=n)))

    # shift so the launched edge's 50% instant sits at rise_time/2
    return TdtTrace(time=t - (t0 - exc.rise_time / 2.0), v_p=traces[0], v_n=traces[1])


def _first_crossing(time: np.ndarray, v: np.ndarray, threshold_fraction: float) -> float:
    peak_idx = np.argmax(np.abs(v))
    amp = v[peak_idx]
    if amp == 0.0:
        raise NoCrossing("trace is identically zero")
    # normalize by the signed peak so the search follows the main polarity
    w = v / amp
    above = w >= threshold_fraction
    if above[0]:
        return float(time[0])
    idx = np.flatnonzero(above)
    if idx.size == 0:
        raise NoCrossing(f"trace never reaches {threshold_fraction:.0%} of its peak")
    i = idx[0]
    frac = (threshold_fraction - w[i - 1]) / (w[i] - w[i - 1])
    return float(time[i - 1] + frac * (time[i] - time[i - 1]))


def tdt_skew(trace: TdtTrace, threshold_fraction: float = 0.5) -> float:
    """First-crossing time difference: v_p minus v_n at a fraction of each
    trace's settled (peak) amplitude, linearly interpolated between samples."""
    if not 0.0 < threshold_fraction < 1.0:
        raise ValueError("threshold_fraction must lie strictly between 0 and 1")
    return _first_crossing(trace.time, trace.v_p, threshold_fraction) - _first_crossing(
        trace.time, trace.v_n, threshold_fraction
    )


def eips(
    profile: SkewProfile,
    weight=None,
    f_min: float | None = None,
    f_max: float | None = None,
) -> float:
    """Equivalent integrated phase skew: the weight-averaged |skew| over a band.

    trapezoid(W * |skew|) / trapezoid(W) over the selected band, using
    only non-excluded points. weight defaults to the signaling-band
    weight of the figure of merit; pass an explicit per-frequency array
    to override.
    """
    f = profile.frequencies
    w = fom_weight(f, FomConfig()) if weight is None else np.asarray(weight, dtype=float)
    if w.shape != f.shape:
        raise ValueError("weight array must match the frequency axis")
    lo = f[0] if f_min is None else f_min
    hi = f[-1] if f_max is None else f_max
    sel = (f >= lo) & (f <= hi) & ~profile.excluded & np.isfinite(profile.skew)
    if np.count_nonzero(sel) < 2:
        raise EmptyBand(f"fewer than two usable skew points in [{lo:.6g}, {hi:.6g}] Hz")
    den = np.trapezoid(w[sel], f[sel])
    if den <= 0.0:
        raise EmptyBand("weight integrates to zero over the band")
    return float(np.trapezoid(w[sel] * np.abs(profile.skew[sel]), f[sel]) / den)

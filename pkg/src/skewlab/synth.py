"""Synthetic differential channels with known ground truth.

These generators produce exactly reciprocal, matched (reflection-free)
networks from closed-form models, which makes them usable as oracles:
every metric in the package has a known expected value on them.

Loss follows a sqrt-frequency law: |H(f)| = 10^(-alpha * L * sqrt(f/1GHz) / 20)
with alpha in dB/(m*sqrt(GHz)).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyInput
from .network import DEFAULT_PORT_MAP, SingleEndedNetwork, cascade

TWO_PI = 2.0 * np.pi


@dataclass
class LineSpec:
    """A differential transmission-line segment.

    odd/even mode delays are per meter; p/n excess delays are lumped
    per-conductor asymmetries (seconds, may be negative) split equally
    between the two ends of the segment.
    """

    length: float
    odd_delay_per_m: float
    even_delay_per_m: float
    loss_coeff: float = 0.0
    p_excess_delay: float = 0.0
    n_excess_delay: float = 0.0

    def __post_init__(self):
        if self.length <= 0.0:
            raise ValueError("length must be positive")
        if self.odd_delay_per_m <= 0.0 or self.even_delay_per_m <= 0.0:
            raise ValueError("mode delays must be positive")
        if self.loss_coeff < 0.0:
            raise ValueError("loss coefficient must be non-negative")


@dataclass
class SeDelaySpec:
    """A lossless matched single-ended delay element (seconds per conductor)."""

    delay_p: float = 0.0
    delay_n: float = 0.0


@dataclass
class ChannelSpec:
    """Left-to-right sequence of segments sharing one frequency grid."""

    segments: list = field(default_factory=list)
    grid: np.ndarray | None = None


def frequency_grid(f_start: float, f_stop: float, points: int) -> np.ndarray:
    """Uniform grid in Hz, strictly increasing and positive."""
    if not 0.0 < f_start < f_stop:
        raise ValueError("need 0 < f_start < f_stop")
    if points < 2:
        raise ValueError("need at least two grid points")
    return np.linspace(f_start, f_stop, points)


def _loss_magnitude(f: np.ndarray, loss_coeff: float, length: float) -> np.ndarray:
    return 10.0 ** (-loss_coeff * length * np.sqrt(f / 1e9) / 20.0)


def _excess_phase(f: np.ndarray, spec: LineSpec):
    """Per-end phase factors for the lumped per-conductor excess delays."""
    ep = np.exp(-1j * TWO_PI * f * spec.p_excess_delay / 2.0)
    en = np.exp(-1j * TWO_PI * f * spec.n_excess_delay / 2.0)
    return ep, en


def make_uncoupled_pair(spec: LineSpec, grid) -> SingleEndedNetwork:
    """Two isolated conductors: no FEXT, no reflections.

    Each conductor is a delay of length*odd_delay_per_m plus its excess
    delay, with the common loss law.
    """
    f = np.asarray(grid, dtype=float)
    h = _loss_magnitude(f, spec.loss_coeff, spec.length)
    t = spec.length * spec.odd_delay_per_m
    thru_p = h * np.exp(-1j * TWO_PI * f * (t + spec.p_excess_delay))
    thru_n = h * np.exp(-1j * TWO_PI * f * (t + spec.n_excess_delay))
    s = np.zeros((f.size, 4, 4), dtype=complex)
    s[:, 1, 0] = s[:, 0, 1] = thru_p
    s[:, 3, 2] = s[:, 2, 3] = thru_n
    return SingleEndedNetwork(f, s, DEFAULT_PORT_MAP)


def make_coupled_pair(spec: LineSpec, grid) -> SingleEndedNetwork:
    """Coupled pair built in mode space and converted to single-ended.

    The differential and common modes are pure delayed/lossy paths
    (zero mode conversion, zero reflection); converting back to
    single-ended terms yields thru = (odd + even)/2 and
    fext = (even - odd)/2, so far-end crosstalk appears exactly when the
    mode delays differ. Equal mode delays reduce to the uncoupled pair.
    """
    f = np.asarray(grid, dtype=float)
    h = _loss_magnitude(f, spec.loss_coeff, spec.length)
    d = h * np.exp(-1j * TWO_PI * f * spec.length * spec.odd_delay_per_m)
    c = h * np.exp(-1j * TWO_PI * f * spec.length * spec.even_delay_per_m)
    thru = 0.5 * (d + c)
    fext = 0.5 * (c - d)
    ep, en = _excess_phase(f, spec)
    s = np.zeros((f.size, 4, 4), dtype=complex)
    s[:, 1, 0] = s[:, 0, 1] = thru * ep * ep
    s[:, 3, 2] = s[:, 2, 3] = thru * en * en
    s[:, 1, 2] = s[:, 2, 1] = fext * ep * en
    s[:, 3, 0] = s[:, 0, 3] = fext * ep * en
    return SingleEndedNetwork(f, s, DEFAULT_PORT_MAP)


def make_se_delay(delay_p: float, delay_n: float, grid) -> SingleEndedNetwork:
    """Lossless matched per-conductor delay element."""
    f = np.asarray(grid, dtype=float)
    s = np.zeros((f.size, 4, 4), dtype=complex)
    s[:, 1, 0] = s[:, 0, 1] = np.exp(-1j * TWO_PI * f * delay_p)
    s[:, 3, 2] = s[:, 2, 3] = np.exp(-1j * TWO_PI * f * delay_n)
    return SingleEndedNetwork(f, s, DEFAULT_PORT_MAP)


def _build_segment(seg, grid) -> SingleEndedNetwork:
    if isinstance(seg, LineSpec):
        return make_coupled_pair(seg, grid)
    if isinstance(seg, SeDelaySpec):
        return make_se_delay(seg.delay_p, seg.delay_n, grid)
    if isinstance(seg, SingleEndedNetwork):
        return seg
    raise TypeError(f"unsupported segment type {type(seg).__name__}")


def build_channel(spec: ChannelSpec) -> SingleEndedNetwork:
    """Cascade the segments left to right on the shared grid."""
    if not spec.segments:
        raise EmptyInput("channel spec has no segments")
    nets = [_build_segment(seg, spec.grid) for seg in spec.segments]
    out = nets[0]
    for nxt in nets[1:]:
        out = cascade(out, nxt)
    return out

"""De-skewing phase corrections and the skew-induced loss metrics.

The central object is the pair (tau1, tau2) of phase corrections, one per
frequency, modeling ideal phase shifters on the two P-line ports. They
are chosen so the intra-pair skew of the corrected network vanishes in
both propagation directions; the difference between the measured and the
corrected differential insertion loss is the skew-induced insertion-loss
deviation (SILD), and its weighted RMS over the signaling band is the
scalar figure of merit.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._math import TWO_PI, magnitude_db
from .errors import EmptyBand, GridMismatch, GridOutOfRange, PortCountMismatch
from .network import (
    SingleEndedNetwork,
    _pair_entries,
    enforce_reciprocity,
    reciprocity_metric,
    to_mixed_mode,
)

# Reciprocity quality below which measured data is symmetrized first.
RECIPROCITY_THRESHOLD = 0.99

# Default signaling rate: 106.25 GBd (224 Gb/s PAM4).
DEFAULT_BAUD = 106.25e9


@dataclass
class DeskewSolution:
    """Per-frequency phase corrections and solver diagnostics.

    tau1/tau2 are wrapped to (-pi, pi]; *_unwrapped are continuous along
    the frequency axis. residual_skew is the larger of the two
    residual direction skews after correction, in seconds. degenerate
    marks weakly coupled points where only tau1 + tau2 is determined and
    the symmetric split was used.
    """

    frequencies: np.ndarray
    tau1: np.ndarray
    tau2: np.ndarray
    tau1_unwrapped: np.ndarray
    tau2_unwrapped: np.ndarray
    converged: np.ndarray
    iterations: np.ndarray
    residual_skew: np.ndarray
    degenerate: np.ndarray

    @property
    def usable(self) -> np.ndarray:
        """Points where the correction is meaningful (converged or degenerate)."""
        return self.converged | self.degenerate


@dataclass
class FomConfig:
    """Weight and band settings for the scalar figure of merit.

    None fields resolve against a network's grid: f_r defaults to
    0.75*f_b, f_t to f_b, f_min to the lowest measured frequency and
    f_max to min(f_b, highest measured).
    """

    f_b: float = DEFAULT_BAUD
    f_r: float | None = None
    f_t: float | None = None
    f_min: float | None = None
    f_max: float | None = None
    grid_step: float = 10e6

    def __post_init__(self):
        if self.f_b <= 0.0 or self.grid_step <= 0.0:
            raise ValueError("f_b and grid_step must be positive")
        for name in ("f_r", "f_t", "f_min", "f_max"):
            v = getattr(self, name)
            if v is not None and v <= 0.0:
                raise ValueError(f"{name} must be positive")

    def resolve(self, frequencies: np.ndarray) -> "FomConfig":
        """Fill None fields from the grid and validate against it."""
        f = np.asarray(frequencies, dtype=float)
        f_r = 0.75 * self.f_b if self.f_r is None else self.f_r
        f_t = self.f_b if self.f_t is None else self.f_t
        f_min = f[0] if self.f_min is None else self.f_min
        f_max = min(self.f_b, f[-1]) if self.f_max is None else self.f_max
        if f_max > f[-1] * (1.0 + 1e-12):
            raise GridOutOfRange(
                f"FOM band edge {f_max:.6g} Hz exceeds measured {f[-1]:.6g} Hz"
            )
        if not f_min < f_max:
            raise EmptyBand(f"empty FOM band [{f_min:.6g}, {f_max:.6g}] Hz")
        return FomConfig(self.f_b, f_r, f_t, f_min, f_max, self.grid_step)


@dataclass
class SildResult:
    """SILD curve plus derived quantities.

    sild is the direction-averaged curve in dB (NaN at excluded points),
    direction_residual the worst direction disagreement, eq_skew the
    per-frequency equivalent skew in seconds. excluded marks frequencies
    where the solver produced no usable correction.
    """

    frequencies: np.ndarray
    sild: np.ndarray
    fom_sild: float
    eq_skew: np.ndarray
    direction_residual: float
    excluded: np.ndarray
    reciprocity_quality: float
    enforced_reciprocity: bool
    solution: DeskewSolution


def solve_deskew(
    net: SingleEndedNetwork,
    damping: float = 0.7,
    tol: float = 1e-12,
    fp_iters: int = 50,
    max_iters: int = 200,
    weak_coupling_ratio: float = 1e-6,
) -> DeskewSolution:
    """Find per-frequency (tau1, tau2) nulling the corrected intra-pair skew.

    The grid is walked lowest frequency first, warm-starting each solve
    from the previous point; the first point starts at (0, 0). Points
    that fail to converge within max_iters keep their flags False and
    their residuals as found.
    """
    if net.n_ports != 4:
        raise PortCountMismatch("de-skewing needs a 4-port network")
    s21, s23, s43, s41, s12, s14, s34, s32 = _pair_entries(net)
    tau1, tau2, iters, conv, degen, res21, res12 = _kernels.solve_deskew_grid(
        s21, s23, s43, s41, s12, s14, s34, s32,
        damping, tol, fp_iters, max_iters, weak_coupling_ratio,
    )
    residual = np.maximum(np.abs(res21), np.abs(res12)) / (TWO_PI * net.frequencies)
    return DeskewSolution(
        frequencies=net.frequencies.copy(),
        tau1=tau1,
        tau2=tau2,
        tau1_unwrapped=np.unwrap(tau1),
        tau2_unwrapped=np.unwrap(tau2),
        converged=conv,
        iterations=iters,
        residual_skew=residual,
        degenerate=degen,
    )


def apply_deskew(net: SingleEndedNetwork, sol: DeskewSolution) -> SingleEndedNetwork:
    """Attach the ideal phase shifters to the two P-line ports.

    Entry (i, j) picks up exp(-i(phi_i + phi_j)) with phi = tau1 at the
    P left port, tau2 at the P right port and zero at the N ports, so
    magnitudes are untouched everywhere.
    """
    if net.n_ports != 4:
        raise PortCountMismatch("de-skewing needs a 4-port network")
    f = net.frequencies
    if sol.frequencies.size != f.size or not np.allclose(
        sol.frequencies, f, rtol=1e-12, atol=0.0
    ):
        raise GridMismatch("solution grid does not match the network grid")
    pm = net.port_map
    phi = np.zeros((f.size, 4))
    phi[:, pm.p_left - 1] = sol.tau1
    phi[:, pm.p_right - 1] = sol.tau2
    factor = np.exp(-1j * (phi[:, :, None] + phi[:, None, :]))
    return SingleEndedNetwork(f.copy(), net.s * factor, net.port_map)


def fom_weight(frequencies, cfg: FomConfig) -> np.ndarray:
    """Spectral weight: PAM4 symbol spectrum shaped by receiver filters.

    sinc^2(f/f_b) times an 8th-order reflection-rolloff term in f/f_r and
    a 4th-order transmitter-bandwidth term in f/f_t.
    """
    f = np.asarray(frequencies, dtype=float)
    f_r = 0.75 * cfg.f_b if cfg.f_r is None else cfg.f_r
    f_t = cfg.f_b if cfg.f_t is None else cfg.f_t
    return (
        np.sinc(f / cfg.f_b) ** 2
        / (1.0 + (f / f_r) ** 8)
        / (1.0 + (f / f_t) ** 4)
    )


def fom_sild(
    frequencies,
    sild_db,
    cfg: FomConfig | None = None,
    excluded=None,
    take_root: bool = True,
) -> float:
    """Weighted aggregate of the SILD curve over the signaling band.

    The curve is resampled onto a uniform grid (f_min..f_max, grid_step),
    excluded points bridged linearly, and aggregated as
    sqrt(mean(W * SILD^2)). take_root=False gives the plain weighted mean
    square instead of its root.
    """
    f = np.asarray(frequencies, dtype=float)
    vals = np.asarray(sild_db, dtype=float)
    cfg = (cfg or FomConfig()).resolve(f)
    if excluded is None:
        valid = np.isfinite(vals)
    else:
        valid = ~np.asarray(excluded, dtype=bool) & np.isfinite(vals)
    if valid.sum() < 2:
        raise EmptyBand("fewer than two usable SILD points")
    steps = int(np.floor((cfg.f_max - cfg.f_min) / cfg.grid_step + 1e-9))
    grid = cfg.f_min + cfg.grid_step * np.arange(steps + 1)
    resampled = np.interp(grid, f[valid], vals[valid])
    w = fom_weight(grid, cfg)
    mean_sq = float(np.mean(w * resampled**2))
    return float(np.sqrt(mean_sq)) if take_root else mean_sq


def eq_skew(sild_db, frequencies) -> np.ndarray:
    """Equivalent uncoupled-pair skew reproducing a given SILD at each f.

    Inverts SILD = 20*log10|cos(pi f t)|; positive SILD (ratio > 1)
    clamps to zero skew.
    """
    f = np.asarray(frequencies, dtype=float)
    ratio = np.clip(10.0 ** (np.asarray(sild_db, dtype=float) / 20.0), 0.0, 1.0)
    return np.arccos(ratio) / (np.pi * f)


def compute_sild(net: SingleEndedNetwork, cfg: FomConfig | None = None) -> SildResult:
    """Full SILD analysis of one 4-port network.

    Data with reciprocity quality below RECIPROCITY_THRESHOLD is
    symmetrized first (reported via enforced_reciprocity). SILD is
    computed independently in both propagation directions from the
    common solution, averaged, and the worst direction disagreement kept
    as direction_residual. Points without a usable correction are NaN.
    """
    if net.n_ports != 4:
        raise PortCountMismatch("SILD needs a 4-port network")
    rec = reciprocity_metric(net)
    enforced = False
    work = net
    if rec.quality < RECIPROCITY_THRESHOLD:
        warnings.warn(
            f"reciprocity quality {rec.quality:.4f} below {RECIPROCITY_THRESHOLD}; "
            "symmetrizing the data",
            stacklevel=2,
        )
        work = enforce_reciprocity(net)
        enforced = True

    sol = solve_deskew(work)
    corrected = apply_deskew(work, sol)
    mm = to_mixed_mode(work)
    mm0 = to_mixed_mode(corrected)

    sild_fwd = magnitude_db(mm.sdd21) - magnitude_db(mm0.sdd21)
    sild_rev = magnitude_db(mm.sdd12) - magnitude_db(mm0.sdd12)
    excluded = ~sol.usable
    if np.all(excluded):
        raise EmptyBand("solver produced no usable frequencies")
    direction_residual = float(np.max(np.abs(sild_fwd - sild_rev)[~excluded]))
    sild = 0.5 * (sild_fwd + sild_rev)
    sild[excluded] = np.nan

    fom = fom_sild(net.frequencies, sild, cfg, excluded=excluded)
    return SildResult(
        frequencies=net.frequencies.copy(),
        sild=sild,
        fom_sild=fom,
        eq_skew=eq_skew(sild, net.frequencies),
        direction_residual=direction_residual,
        excluded=excluded,
        reciprocity_quality=rec.quality,
        enforced_reciprocity=enforced,
        solution=sol,
    )

"""Single-ended network container, mixed-mode conversion, cascading,
resampling and reciprocity checks for 2- and 4-port S-parameter data.

Port semantics for 4-port data follow the usual differential-pair layout:
one conductor of the pair is the P line, the other the N line, each with a
left and a right port. The mapping from physical ports (1..4) to those
roles is carried by a PortMap; the default is P: 1 -> 2, N: 3 -> 4.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    GridMismatch,
    GridOutOfRange,
    NonMonotonicFrequency,
    PortCountMismatch,
    SingularConversion,
)

_RT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class PortMap:
    """Assignment of the four physical ports to pair roles.

    p_left/p_right are the two ports of the P conductor, n_left/n_right
    of the N conductor. Together they must be a permutation of {1,2,3,4}.
    """

    p_left: int = 1
    p_right: int = 2
    n_left: int = 3
    n_right: int = 4

    def __post_init__(self):
        ports = (self.p_left, self.p_right, self.n_left, self.n_right)
        if sorted(ports) != [1, 2, 3, 4]:
            raise ValueError(f"port map {ports} is not a permutation of 1..4")


DEFAULT_PORT_MAP = PortMap()


@dataclass
class SingleEndedNetwork:
    """Frequency-sampled single-ended S-parameters.

    frequencies: strictly increasing, positive, in Hz, at least two points.
    s: complex array of shape (nf, n, n) with n in {2, 4}.
    port_map: required for 4-port data (defaults to P: 1->2, N: 3->4),
        must be None for 2-port data.
    """

    frequencies: np.ndarray
    s: np.ndarray
    port_map: PortMap | None = field(default=None)

    def __post_init__(self):
        f = np.asarray(self.frequencies, dtype=float)
        s = np.asarray(self.s, dtype=complex)
        if f.ndim != 1 or f.size < 2:
            raise ValueError("need a 1-D frequency axis with at least two points")
        if not np.all(np.isfinite(f)) or f[0] <= 0.0:
            raise ValueError("frequencies must be finite and positive")
        if np.any(np.diff(f) <= 0.0):
            raise NonMonotonicFrequency("frequency axis is not strictly increasing")
        if s.ndim != 3 or s.shape[0] != f.size or s.shape[1] != s.shape[2]:
            raise ValueError(f"S array shape {s.shape} does not match {f.size} frequencies")
        n = s.shape[1]
        if n not in (2, 4):
            raise PortCountMismatch(f"{n}-port networks are not supported (2 or 4 only)")
        if not np.all(np.isfinite(s)):
            raise ValueError("S-parameters contain non-finite entries")
        if n == 4:
            if self.port_map is None:
                self.port_map = DEFAULT_PORT_MAP
        elif self.port_map is not None:
            raise PortCountMismatch("port_map only applies to 4-port networks")
        self.frequencies = f
        self.s = s

    @property
    def n_ports(self) -> int:
        return self.s.shape[1]


@dataclass
class MixedModeNetwork:
    """Mixed-mode and single-ended-to-mixed transmission terms of a pair.

    Naming: sdd21 is differential-in differential-out transmission in the
    left-to-right direction, scd21 the differential-to-common conversion in
    that direction, and so on; ssd21/ssd41 are the single-ended responses
    at the P and N right-side ports to differential drive on the left,
    ssd12/ssd32 their right-to-left counterparts.
    """

    frequencies: np.ndarray
    sdd21: np.ndarray
    sdd12: np.ndarray
    scd21: np.ndarray
    scd12: np.ndarray
    scc21: np.ndarray
    scc12: np.ndarray
    sdc21: np.ndarray
    sdc12: np.ndarray
    ssd21: np.ndarray
    ssd41: np.ndarray
    ssd12: np.ndarray
    ssd32: np.ndarray


@dataclass
class ReciprocityReport:
    quality: float
    max_abs_asymmetry: float
    worst_frequency: float
    worst_entry: tuple[int, int]


def _pair_entries(net: SingleEndedNetwork):
    """The eight transmission entries of a 4-port in pair-role terms.

    Returns (s21, s23, s43, s41, s12, s14, s34, s32) where the generic
    index convention is that of the default port map, resolved through
    the network's actual map.
    """
    if net.n_ports != 4:
        raise PortCountMismatch("pair operations need a 4-port network")
    pm = net.port_map
    a, b, c, d = pm.p_left - 1, pm.p_right - 1, pm.n_left - 1, pm.n_right - 1
    s = net.s
    return (
        s[:, b, a],  # s21: P left -> P right
        s[:, b, c],  # s23: N left -> P right
        s[:, d, c],  # s43: N left -> N right
        s[:, d, a],  # s41: P left -> N right
        s[:, a, b],  # s12
        s[:, a, d],  # s14
        s[:, c, d],  # s34
        s[:, c, b],  # s32
    )


def to_mixed_mode(net: SingleEndedNetwork) -> MixedModeNetwork:
    """Convert a 4-port single-ended network to mixed-mode transmission terms.

    The differential/common modes on each side are the usual (a_p -+ a_n)/sqrt(2)
    combinations of the single-ended waves, so e.g.
    sdd21 = (s21 - s23 - s41 + s43)/2 and ssd21 = (s21 - s23)/sqrt(2).
    """
    s21, s23, s43, s41, s12, s14, s34, s32 = _pair_entries(net)
    return MixedModeNetwork(
        frequencies=net.frequencies,
        sdd21=0.5 * (s21 - s23 - s41 + s43),
        sdd12=0.5 * (s12 - s14 - s32 + s34),
        scd21=0.5 * (s21 - s23 + s41 - s43),
        scd12=0.5 * (s12 - s14 + s32 - s34),
        scc21=0.5 * (s21 + s23 + s41 + s43),
        scc12=0.5 * (s12 + s14 + s32 + s34),
        sdc21=0.5 * (s21 + s23 - s41 - s43),
        sdc12=0.5 * (s12 + s14 - s32 - s34),
        ssd21=(s21 - s23) / _RT2,
        ssd41=(s43 - s41) / _RT2,
        ssd12=(s12 - s14) / _RT2,
        ssd32=(s34 - s32) / _RT2,
    )


def _canonical_s(net: SingleEndedNetwork) -> np.ndarray:
    """S array permuted to canonical port order (P_L, P_R, N_L, N_R)."""
    pm = net.port_map
    perm = np.array([pm.p_left, pm.p_right, pm.n_left, pm.n_right]) - 1
    return net.s[:, perm[:, None], perm[None, :]]


_LEFT = np.array([0, 2])   # canonical left-side ports (P_L, N_L)
_RIGHT = np.array([1, 3])  # canonical right-side ports (P_R, N_R)


def _check_invertible(m: np.ndarray, freqs: np.ndarray, what: str):
    det = np.linalg.det(m)
    scale = np.maximum(np.sum(np.abs(m) ** 2, axis=(1, 2)) / 2.0, 1e-300)
    bad = np.abs(det) < 1e-12 * scale
    if np.any(bad):
        fbad = freqs[bad]
        head = ", ".join(f"{x:.6g}" for x in fbad[:5])
        raise SingularConversion(
            f"{what} is singular at {fbad.size} frequencies (Hz: {head}"
            + (", ..." if fbad.size > 5 else "")
            + ")"
        )


def _s_to_t(s: np.ndarray, freqs: np.ndarray) -> np.ndarray:
    s_ll = s[:, _LEFT[:, None], _LEFT[None, :]]
    s_lr = s[:, _LEFT[:, None], _RIGHT[None, :]]
    s_rl = s[:, _RIGHT[:, None], _LEFT[None, :]]
    s_rr = s[:, _RIGHT[:, None], _RIGHT[None, :]]
    _check_invertible(s_rl, freqs, "left-to-right transmission block")
    inv_rl = np.linalg.inv(s_rl)
    t = np.empty_like(s)
    t[:, :2, :2] = inv_rl
    t[:, :2, 2:] = -inv_rl @ s_rr
    t[:, 2:, :2] = s_ll @ inv_rl
    t[:, 2:, 2:] = s_lr - s_ll @ inv_rl @ s_rr
    return t


def _t_to_s(t: np.ndarray, freqs: np.ndarray) -> np.ndarray:
    t11 = t[:, :2, :2]
    t12 = t[:, :2, 2:]
    t21 = t[:, 2:, :2]
    t22 = t[:, 2:, 2:]
    _check_invertible(t11, freqs, "cascaded transfer block")
    inv11 = np.linalg.inv(t11)
    s = np.empty_like(t)
    s[:, _LEFT[:, None], _LEFT[None, :]] = t21 @ inv11
    s[:, _LEFT[:, None], _RIGHT[None, :]] = t22 - t21 @ inv11 @ t12
    s[:, _RIGHT[:, None], _LEFT[None, :]] = inv11
    s[:, _RIGHT[:, None], _RIGHT[None, :]] = -inv11 @ t12
    return s


def cascade(a: SingleEndedNetwork, b: SingleEndedNetwork) -> SingleEndedNetwork:
    """Cascade two 4-port networks, a's right-side ports into b's left-side.

    P mates with P and N with N. Both networks must share the frequency
    grid. The result uses the default port map. Raises SingularConversion
    where the scattering-to-transfer conversion breaks down.
    """
    if a.n_ports != 4 or b.n_ports != 4:
        raise PortCountMismatch("cascade needs two 4-port networks")
    if a.frequencies.size != b.frequencies.size or not np.allclose(
        a.frequencies, b.frequencies, rtol=1e-12, atol=0.0
    ):
        raise GridMismatch("cascade operands use different frequency grids")
    t = _s_to_t(_canonical_s(a), a.frequencies) @ _s_to_t(_canonical_s(b), b.frequencies)
    s = _t_to_s(t, a.frequencies)
    return SingleEndedNetwork(a.frequencies.copy(), s, DEFAULT_PORT_MAP)


def resample(net: SingleEndedNetwork, frequencies) -> SingleEndedNetwork:
    """Linear-in-real/imag resample onto a new grid within the measured span."""
    fnew = np.asarray(frequencies, dtype=float)
    f = net.frequencies
    if fnew.ndim != 1 or fnew.size < 2 or np.any(np.diff(fnew) <= 0.0):
        raise NonMonotonicFrequency("target grid must be strictly increasing with >= 2 points")
    if fnew[0] < f[0] or fnew[-1] > f[-1]:
        raise GridOutOfRange(
            f"target grid [{fnew[0]:.6g}, {fnew[-1]:.6g}] Hz exceeds measured "
            f"span [{f[0]:.6g}, {f[-1]:.6g}] Hz"
        )
    n = net.n_ports
    out = np.empty((fnew.size, n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            out[:, i, j] = np.interp(fnew, f, net.s[:, i, j].real) + 1j * np.interp(
                fnew, f, net.s[:, i, j].imag
            )
    return SingleEndedNetwork(fnew, out, net.port_map)


def reciprocity_metric(net: SingleEndedNetwork) -> ReciprocityReport:
    """Aggregate reciprocity quality in [0, 1].

    quality = 1 - sqrt(sum |Sij - Sji|^2 / sum |Sij + Sji|^2) over all
    frequencies and unordered port pairs i < j. 1 means exactly reciprocal.
    """
    s = net.s
    n = net.n_ports
    iu, ju = np.triu_indices(n, k=1)
    diff = s[:, iu, ju] - s[:, ju, iu]
    tot = s[:, iu, ju] + s[:, ju, iu]
    num = np.sum(np.abs(diff) ** 2)
    den = np.sum(np.abs(tot) ** 2)
    if den == 0.0:
        # all-zero off-diagonals are trivially reciprocal; a nonzero
        # antisymmetric residual with zero symmetric part is the opposite
        quality = 1.0 if num == 0.0 else 0.0
    else:
        quality = max(0.0, 1.0 - np.sqrt(num / den))
    absdiff = np.abs(diff)
    kf, kp = np.unravel_index(np.argmax(absdiff), absdiff.shape)
    return ReciprocityReport(
        quality=float(quality),
        max_abs_asymmetry=float(absdiff[kf, kp]),
        worst_frequency=float(net.frequencies[kf]),
        worst_entry=(int(iu[kp]) + 1, int(ju[kp]) + 1),
    )


def enforce_reciprocity(net: SingleEndedNetwork) -> SingleEndedNetwork:
    """Symmetrize: S <- (S + S^T)/2 per frequency."""
    s = 0.5 * (net.s + np.transpose(net.s, (0, 2, 1)))
    return SingleEndedNetwork(net.frequencies.copy(), s, net.port_map)

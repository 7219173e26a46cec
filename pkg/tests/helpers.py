"""Shared network builders used across the suite."""

from __future__ import annotations

import numpy as np

from skewlab import SingleEndedNetwork


def random_network(rng, n_ports: int = 4, n_freq: int = 5, reciprocal: bool = True,
                   f_start: float = 1e9, f_stop: float = 50e9) -> SingleEndedNetwork:
    """Random complex network with entries bounded away from blowing up."""
    f = np.linspace(f_start, f_stop, n_freq)
    s = rng.standard_normal((n_freq, n_ports, n_ports)) * 0.3 \
        + 1j * rng.standard_normal((n_freq, n_ports, n_ports)) * 0.3
    if reciprocal:
        s = 0.5 * (s + np.transpose(s, (0, 2, 1)))
    return SingleEndedNetwork(frequencies=f, s=s)


def random_coupled_channel(rng, grid) -> SingleEndedNetwork:
    """Reciprocal coupled pair with random per-line excess delays.

    Built directly from the synthesis helpers so the deskew tests get
    channels whose injected skew is known.
    """
    from skewlab import ChannelSpec, LineSpec, build_channel

    split = 1.0 + rng.uniform(0.01, 0.08)
    spec = LineSpec(
        length=rng.uniform(0.1, 0.6),
        odd_delay_per_m=3.6e-9,
        even_delay_per_m=3.6e-9 * split,
        loss_coeff=rng.uniform(2.0, 12.0),
        p_excess_delay=rng.uniform(-2e-12, 2e-12),
        n_excess_delay=rng.uniform(-2e-12, 2e-12),
    )
    return build_channel(ChannelSpec(segments=[spec], grid=grid))

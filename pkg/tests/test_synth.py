"""Synthetic channel generator checks.

These networks are the verification oracles for the solver tests, so
their own contracts get pinned hard: losslessness, reciprocity, exact
placement of injected skew, and the coupled/uncoupled consistency limit.
"""

from __future__ import annotations

import numpy as np
import pytest

from skewlab import (
    ChannelSpec,
    EmptyInput,
    LineSpec,
    SeDelaySpec,
    build_channel,
    frequency_grid,
    make_coupled_pair,
    make_se_delay,
    make_uncoupled_pair,
    reciprocity_metric,
    to_mixed_mode,
)

GRID = frequency_grid(10e6, 50e9, 101)


def test_frequency_grid():
    g = frequency_grid(1e9, 2e9, 11)
    assert g[0] == 1e9 and g[-1] == 2e9 and len(g) == 11
    np.testing.assert_allclose(np.diff(g), 0.1e9)
    with pytest.raises(ValueError):
        frequency_grid(2e9, 1e9, 11)
    with pytest.raises(ValueError):
        frequency_grid(1e9, 2e9, 1)


def test_uncoupled_pair_is_two_isolated_lines():
    spec = LineSpec(length=0.5, odd_delay_per_m=3.6e-9, even_delay_per_m=3.6e-9,
                    p_excess_delay=2e-12)
    # unwrapping a 1.8 ns line needs steps below 1/(2*1.8ns) = 278 MHz
    dense = frequency_grid(10e6, 50e9, 1001)
    net = make_uncoupled_pair(spec, dense)
    s = net.s
    # no cross coupling, no reflection anywhere
    for i, j in [(0, 2), (0, 3), (1, 2), (1, 3)]:
        assert np.max(np.abs(s[:, i, j])) == 0.0
        assert np.max(np.abs(s[:, j, i])) == 0.0
    for i in range(4):
        assert np.max(np.abs(s[:, i, i])) == 0.0
    # P path is 1.8 ns + 2 ps, N path 1.8 ns
    tp = -np.unwrap(np.angle(s[:, 1, 0])) / (2 * np.pi * dense)
    tn = -np.unwrap(np.angle(s[:, 3, 2])) / (2 * np.pi * dense)
    assert tp[-1] == pytest.approx(1.8e-9 + 2e-12, rel=1e-9)
    assert tn[-1] == pytest.approx(1.8e-9, rel=1e-9)


def test_lossless_lines_have_unit_magnitude():
    spec = LineSpec(length=0.4, odd_delay_per_m=3.6e-9, even_delay_per_m=3.8e-9,
                    p_excess_delay=1.5e-12, n_excess_delay=-0.5e-12)
    for maker in (make_uncoupled_pair, make_coupled_pair):
        net = maker(spec, GRID)
        u, sv, vh = np.linalg.svd(net.s)
        assert np.max(np.abs(sv - 1.0)) < 1e-12 or maker is make_uncoupled_pair
        # transmission magnitudes are exactly 1 without loss
        if maker is make_uncoupled_pair:
            np.testing.assert_allclose(np.abs(net.s[:, 1, 0]), 1.0, atol=1e-12)


def test_loss_profile():
    spec = LineSpec(length=0.5, odd_delay_per_m=3.6e-9, even_delay_per_m=3.6e-9,
                    loss_coeff=8.0)
    net = make_uncoupled_pair(spec, GRID)
    # sqrt-f law: loss_coeff dB per meter at 1 GHz
    expect_db = -8.0 * 0.5 * np.sqrt(GRID / 1e9)
    got_db = 20 * np.log10(np.abs(net.s[:, 1, 0]))
    np.testing.assert_allclose(got_db, expect_db, atol=1e-9)


def test_coupled_equal_mode_delays_reduce_to_uncoupled():
    spec = LineSpec(length=0.5, odd_delay_per_m=3.6e-9, even_delay_per_m=3.6e-9,
                    loss_coeff=5.0, p_excess_delay=1e-12, n_excess_delay=-1e-12)
    a = make_coupled_pair(spec, GRID)
    b = make_uncoupled_pair(spec, GRID)
    np.testing.assert_allclose(a.s, b.s, atol=1e-12)


def test_coupled_pair_fext_from_mode_split():
    spec = LineSpec(length=0.5, odd_delay_per_m=3.6e-9, even_delay_per_m=3.744e-9)
    net = make_coupled_pair(spec, GRID)
    s = net.s
    # thru and far-end coupling from the even/odd picture
    t_odd = 3.6e-9 * 0.5
    t_even = 3.744e-9 * 0.5
    thru = 0.5 * (np.exp(-2j * np.pi * GRID * t_odd) + np.exp(-2j * np.pi * GRID * t_even))
    fext = 0.5 * (np.exp(-2j * np.pi * GRID * t_even) - np.exp(-2j * np.pi * GRID * t_odd))
    np.testing.assert_allclose(s[:, 1, 0], thru, atol=1e-12)
    np.testing.assert_allclose(s[:, 1, 2], fext, atol=1e-12)
    np.testing.assert_allclose(s[:, 3, 2], thru, atol=1e-12)
    # differential output sees pure odd mode
    mm = to_mixed_mode(net)
    np.testing.assert_allclose(mm.sdd21, np.exp(-2j * np.pi * GRID * t_odd), atol=1e-12)
    np.testing.assert_allclose(np.abs(mm.scd21), 0.0, atol=1e-12)


def test_reciprocity_of_generators(rng):
    for _ in range(5):
        spec = LineSpec(
            length=rng.uniform(0.1, 1.0),
            odd_delay_per_m=3.6e-9,
            even_delay_per_m=3.6e-9 * rng.uniform(1.0, 1.1),
            loss_coeff=rng.uniform(0.0, 10.0),
            p_excess_delay=rng.uniform(-3e-12, 3e-12),
            n_excess_delay=rng.uniform(-3e-12, 3e-12),
        )
        net = make_coupled_pair(spec, GRID)
        assert reciprocity_metric(net).quality == pytest.approx(1.0, abs=1e-13)


def test_se_delay_block():
    net = make_se_delay(3e-12, 1e-12, GRID)
    np.testing.assert_allclose(net.s[:, 1, 0], np.exp(-2j * np.pi * GRID * 3e-12),
                               atol=1e-14)
    np.testing.assert_allclose(net.s[:, 3, 2], np.exp(-2j * np.pi * GRID * 1e-12),
                               atol=1e-14)
    assert np.max(np.abs(net.s[:, 1, 2])) == 0.0
    np.testing.assert_allclose(net.s, np.transpose(net.s, (0, 2, 1)), atol=0)


def test_excess_delay_skews_single_ended_paths():
    base = LineSpec(length=0.5, odd_delay_per_m=3.6e-9, even_delay_per_m=3.744e-9)
    skewed = LineSpec(length=0.5, odd_delay_per_m=3.6e-9, even_delay_per_m=3.744e-9,
                      p_excess_delay=2e-12)
    a = make_coupled_pair(base, GRID)
    b = make_coupled_pair(skewed, GRID)
    # the P-line thru acquires the full 2 ps, the FEXT terms half of it
    # (one end on each line), the N-line thru none
    ratio = b.s[:, 1, 0] / a.s[:, 1, 0]
    np.testing.assert_allclose(ratio, np.exp(-2j * np.pi * GRID * 2e-12), atol=1e-12)
    ratio = b.s[:, 1, 2] / a.s[:, 1, 2]
    np.testing.assert_allclose(ratio, np.exp(-2j * np.pi * GRID * 1e-12), atol=1e-12)
    np.testing.assert_allclose(b.s[:, 3, 2], a.s[:, 3, 2], atol=1e-14)


def test_build_channel_cascades_in_order():
    cable = LineSpec(length=0.2, odd_delay_per_m=3.6e-9, even_delay_per_m=3.7e-9,
                     loss_coeff=4.0)
    spec = ChannelSpec(segments=[SeDelaySpec(delay_p=2e-12), cable], grid=GRID)
    net = build_channel(spec)
    ref = make_coupled_pair(cable, GRID)
    shift = make_se_delay(2e-12, 0.0, GRID)
    from skewlab import cascade
    np.testing.assert_allclose(net.s, cascade(shift, ref).s, atol=1e-12)


def test_build_channel_accepts_prebuilt_networks():
    cable = make_coupled_pair(
        LineSpec(length=0.2, odd_delay_per_m=3.6e-9, even_delay_per_m=3.7e-9), GRID)
    net = build_channel(ChannelSpec(segments=[cable], grid=GRID))
    np.testing.assert_allclose(net.s, cable.s, atol=0)


def test_build_channel_empty():
    with pytest.raises(EmptyInput):
        build_channel(ChannelSpec(segments=[], grid=GRID))


def test_spec_validation():
    with pytest.raises(ValueError):
        LineSpec(length=-1.0, odd_delay_per_m=3.6e-9, even_delay_per_m=3.6e-9)
    with pytest.raises(ValueError):
        LineSpec(length=1.0, odd_delay_per_m=0.0, even_delay_per_m=3.6e-9)
    with pytest.raises(ValueError):
        LineSpec(length=1.0, odd_delay_per_m=3.6e-9, even_delay_per_m=3.6e-9,
                 loss_coeff=-2.0)
    with pytest.raises(TypeError):
        build_channel(ChannelSpec(segments=["not a segment"], grid=GRID))

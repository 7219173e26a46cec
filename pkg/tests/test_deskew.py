"""Phase-alignment solver, SILD and the weighted figure of merit.

The synthetic generators provide channels with exactly known skew, so
most expectations here are closed forms rather than regression values.
"""

from __future__ import annotations

import numpy as np
import pytest

from skewlab import (
    ChannelSpec,
    EmptyBand,
    FomConfig,
    GridMismatch,
    GridOutOfRange,
    LineSpec,
    SeDelaySpec,
    apply_deskew,
    build_channel,
    compute_sild,
    eq_skew,
    fom_sild,
    fom_weight,
    frequency_grid,
    make_se_delay,
    make_uncoupled_pair,
    solve_deskew,
    to_mixed_mode,
)

from helpers import random_coupled_channel

GRID = frequency_grid(10e6, 50e9, 500)


def _uncoupled(delta, grid=GRID, loss=4.0):
    spec = LineSpec(length=0.25, odd_delay_per_m=3.6e-9, even_delay_per_m=3.6e-9,
                    loss_coeff=loss, p_excess_delay=delta)
    return make_uncoupled_pair(spec, grid)


# -------------------------------------------------------------------- solver

def test_zero_skew_gives_zero_alignment():
    sol = solve_deskew(_uncoupled(0.0))
    assert np.all(sol.usable)
    np.testing.assert_allclose(sol.tau1, 0.0, atol=1e-12)
    np.testing.assert_allclose(sol.tau2, 0.0, atol=1e-12)
    np.testing.assert_allclose(sol.residual_skew, 0.0, atol=1e-27)


def test_uncoupled_pair_takes_degenerate_branch():
    sol = solve_deskew(_uncoupled(3e-12))
    assert np.all(sol.degenerate)
    assert np.all(sol.iterations == 0)
    # both ends share the alignment: tau1 == tau2 == wrap(arg(S21 S43*)/2)
    np.testing.assert_allclose(sol.tau1, sol.tau2, atol=0)


def test_uncoupled_phase_sum_identity():
    delta = 2e-12
    net = _uncoupled(delta)
    sol = solve_deskew(net)
    target = np.angle(net.s[:, 1, 0] * np.conj(net.s[:, 3, 2]))
    total = np.angle(np.exp(1j * (sol.tau1 + sol.tau2)))
    np.testing.assert_allclose(total, target, atol=1e-10)


def test_coupled_channels_converge_and_null_the_skew(rng):
    grid = frequency_grid(10e6, 60e9, 240)
    for _ in range(8):
        net = random_coupled_channel(rng, grid)
        sol = solve_deskew(net)
        assert np.all(sol.usable)
        assert np.max(sol.residual_skew) < 1e-15  # well under a femtosecond
        # alignment really removes the in-pair skew: the deskewed network
        # solves to zero
        aligned = apply_deskew(net, sol)
        again = solve_deskew(aligned)
        assert np.max(np.abs(again.tau1)) < 1e-9
        assert np.max(np.abs(again.tau2)) < 1e-9


def test_apply_deskew_preserves_magnitudes(rng):
    net = random_coupled_channel(rng, GRID)
    sol = solve_deskew(net)
    out = apply_deskew(net, sol)
    np.testing.assert_allclose(np.abs(out.s), np.abs(net.s), atol=1e-14)


def test_apply_deskew_rotates_single_ended_thru():
    net = _uncoupled(3e-12)
    sol = solve_deskew(net)
    out = apply_deskew(net, sol)
    # S21 picks up e^{-i(tau1+0)} on the P lane pair... both ports of the
    # P lane carry tau1/tau2 so the thru rotates by their sum
    expect = net.s[:, 1, 0] * np.exp(-1j * (sol.tau1 + sol.tau2))
    np.testing.assert_allclose(out.s[:, 1, 0], expect, atol=1e-14)
    # N-lane entries are untouched
    np.testing.assert_allclose(out.s[:, 3, 2], net.s[:, 3, 2], atol=0)


def test_apply_deskew_grid_mismatch(rng):
    net = random_coupled_channel(rng, GRID)
    other = random_coupled_channel(rng, frequency_grid(10e6, 50e9, 77))
    with pytest.raises(GridMismatch):
        apply_deskew(net, solve_deskew(other))


def test_solution_unwrapped_tracks_injected_delay():
    delta = 3e-12
    net = _uncoupled(delta)
    sol = solve_deskew(net)
    # tau1 + tau2 unwrapped equals -2 pi f delta
    total = sol.tau1_unwrapped + sol.tau2_unwrapped
    np.testing.assert_allclose(total, -2 * np.pi * GRID * delta, atol=1e-8)


# ---------------------------------------------------------------------- SILD

def test_sild_closed_form_uncoupled():
    delta = 3e-12
    res = compute_sild(_uncoupled(delta))
    expect = 20 * np.log10(np.abs(np.cos(np.pi * GRID * delta)))
    np.testing.assert_allclose(res.sild, expect, atol=1e-9)
    assert res.direction_residual < 1e-12
    assert not np.any(res.excluded)
    assert res.reciprocity_quality == pytest.approx(1.0, abs=1e-12)
    assert not res.enforced_reciprocity


def test_sild_direction_symmetry(rng):
    for _ in range(4):
        net = random_coupled_channel(rng, GRID)
        res = compute_sild(net)
        assert res.direction_residual < 1e-9


def test_sild_zero_for_skewless_channel():
    spec = LineSpec(length=0.5, odd_delay_per_m=3.6e-9, even_delay_per_m=3.72e-9,
                    loss_coeff=8.0)
    net = build_channel(ChannelSpec(segments=[spec], grid=GRID))
    res = compute_sild(net)
    np.testing.assert_allclose(res.sild, 0.0, atol=1e-9)
    assert res.fom_sild == pytest.approx(0.0, abs=1e-9)


def test_compute_sild_enforces_weak_reciprocity(rng):
    net = random_coupled_channel(rng, GRID)
    s = net.s.copy()
    s[:, 1, 0] *= 1.5  # badly nonreciprocal
    from skewlab import SingleEndedNetwork
    broken = SingleEndedNetwork(net.frequencies, s)
    with pytest.warns(UserWarning, match="reciprocity"):
        res = compute_sild(broken)
    assert res.enforced_reciprocity
    assert res.reciprocity_quality < 0.99


# ------------------------------------------------------------------- weights

def test_weight_frozen_values():
    cfg = FomConfig()
    f = np.array([0.0, 106.25e9 / 4, 106.25e9 / 2, 106.25e9])
    w = fom_weight(f, cfg)
    assert w[0] == pytest.approx(1.0, abs=1e-15)
    assert w[1] == pytest.approx(0.8072924582147124, rel=1e-12)
    assert w[2] == pytest.approx(0.36712000531674455, rel=1e-12)
    assert w[3] == pytest.approx(0.0, abs=1e-15)


def test_weight_factors_multiply():
    # reflection and transmitter poles at custom corners
    cfg = FomConfig(f_b=50e9, f_r=10e9, f_t=20e9)
    f = np.array([10e9])
    x = f / 50e9
    expect = (np.sinc(x) ** 2) / (1 + (f / 10e9) ** 8) / (1 + (f / 20e9) ** 4)
    np.testing.assert_allclose(fom_weight(f, cfg), expect, rtol=1e-14)


def test_fom_homogeneity_and_root_switch():
    f = frequency_grid(10e6, 106.25e9, 300)
    sild = -0.5 * np.ones_like(f)
    cfg = FomConfig(f_min=10e6, f_max=106.25e9)
    a = fom_sild(f, sild, cfg)
    b = fom_sild(f, 2.0 * sild, cfg)
    assert b == pytest.approx(2.0 * a, rel=1e-12)
    sq = fom_sild(f, sild, cfg, take_root=False)
    assert sq == pytest.approx(a * a, rel=1e-12)


def test_fom_constant_input_equals_weighted_mean():
    f = frequency_grid(10e6, 106.25e9, 300)
    c = -0.8
    cfg = FomConfig()
    got = fom_sild(f, np.full_like(f, c), cfg)
    # evaluate the same uniform grid the metric integrates over
    step = 10e6
    n = int(np.floor((106.25e9 - 10e6) / step + 1e-9))
    g = 10e6 + step * np.arange(n + 1)
    expect = abs(c) * np.sqrt(np.mean(fom_weight(g, FomConfig())))
    assert got == pytest.approx(expect, rel=1e-9)


def test_fom_closed_form_three_ps():
    """End to end frozen value for the 3 ps pair over the full band."""
    grid = frequency_grid(10e6, 110e9, 1100)
    spec = LineSpec(length=0.25, odd_delay_per_m=3.6e-9, even_delay_per_m=3.6e-9,
                    loss_coeff=4.0, p_excess_delay=3e-12)
    res = compute_sild(make_uncoupled_pair(spec, grid))
    # independent evaluation of the same closed form on the metric grid
    assert res.fom_sild == pytest.approx(0.44595065959670005, rel=1e-4)


def test_fom_band_validation():
    f = frequency_grid(10e6, 50e9, 100)
    sild = np.zeros_like(f)
    with pytest.raises(GridOutOfRange):
        fom_sild(f, sild, FomConfig(f_max=60e9))
    with pytest.raises(EmptyBand):
        fom_sild(f, sild, FomConfig(f_min=40e9, f_max=40e9))
    with pytest.raises(EmptyBand):
        fom_sild(f, sild, FomConfig(), excluded=np.ones_like(f, dtype=bool))


def test_fom_default_band_caps_at_baud():
    # measured band extends past f_b; the default metric band must stop
    # at f_b, so points above contribute nothing
    f = frequency_grid(10e6, 120e9, 1200)
    sild = np.where(f > 106.25e9, 50.0, -1.0)  # huge garbage above f_b
    a = fom_sild(f, sild, FomConfig())
    b = fom_sild(f, np.full_like(f, -1.0), FomConfig())
    assert a == pytest.approx(b, rel=1e-6)


def test_fom_config_resolution():
    f = frequency_grid(1e9, 40e9, 40)
    r = FomConfig().resolve(f)
    assert r.f_b == 106.25e9
    assert r.f_r == pytest.approx(0.75 * 106.25e9)
    assert r.f_t == 106.25e9
    assert r.f_min == 1e9
    assert r.f_max == 40e9  # capped by the measurement


# ----------------------------------------------------------- equivalent skew

def test_eq_skew_inverts_cosine_law():
    delta = 2e-12
    f = frequency_grid(1e9, 100e9, 200)
    sild = 20 * np.log10(np.abs(np.cos(np.pi * f * delta)))
    t = eq_skew(sild, f)
    below_null = f < 0.5 / delta
    np.testing.assert_allclose(t[below_null], delta, rtol=1e-9)


def test_eq_skew_clamps_positive_sild():
    f = np.array([1e9, 2e9])
    t = eq_skew(np.array([0.5, 1.0]), f)
    np.testing.assert_allclose(t, 0.0, atol=0)


def test_eq_skew_from_full_pipeline():
    delta = 3e-12
    res = compute_sild(_uncoupled(delta))
    k = np.argmin(np.abs(GRID - 53.125e9))
    assert res.eq_skew[k] == pytest.approx(delta, rel=1e-6)

"""Adaptive integrator and convergence detection."""
import math
import random

import pytest

from bufchem import (
    BufferedConfig,
    Haldane,
    IntegratorSettings,
    Monod,
    SingleParams,
    basin_probe,
    classify_portrait,
    detect_convergence,
    find_equilibria,
    integrate,
)
from conftest import draw_buffered_config


def test_linear_washout_decay_matches_closed_form():
    # with no biomass the substrate relaxes exponentially to the feed
    params = SingleParams(Monod(2.0, 1.0), 3.0, 0.7)
    traj = integrate(params, (0.5, 0.0),
                     IntegratorSettings(t_end=6.0))
    for t, (s, x) in zip(traj.times, traj.states):
        exact = 3.0 + (0.5 - 3.0) * math.exp(-0.7 * t)
        assert s == pytest.approx(exact, abs=1e-7)
        assert x == 0.0


def test_default_horizon_scales_with_dilution():
    params = SingleParams(Monod(2.0, 1.0), 3.0, 0.5)
    traj = integrate(params, (3.0, 0.1))
    assert traj.times[-1] == pytest.approx(200.0 / 0.5, abs=1e-9)


def test_equilibrium_is_a_fixed_point(reference_model):
    cfg = BufferedConfig(reference_model, 1.4, 1.0, 0.35, 0.48)
    eq = next(e for e in find_equilibria(cfg) if e.x1 > 0.0)
    traj = integrate(cfg, eq.state, IntegratorSettings(t_end=25.0))
    final = traj.final
    for a, b in zip(final, eq.state):
        assert a == pytest.approx(b, abs=1e-7)


def test_mass_balance_decay_envelope(reference_model):
    # S2 + X2 - S_in decays like exp(-alpha D t) along the flow
    cfg = BufferedConfig(reference_model, 1.4, 1.0, 0.35, 0.48)
    rate = cfg.alpha * cfg.D
    settings = IntegratorSettings(t_end=40.0, max_step=0.05 / rate)
    traj = integrate(cfg, (1.4, 0.2, 0.1, 0.05), settings)
    initial_gap = abs(0.1 + 0.05 - 1.4)
    for t, state in zip(traj.times, traj.states):
        gap = abs(state[2] + state[3] - 1.4)
        bound = initial_gap * math.exp(-rate * t) * (1 + 1e-6) + 1e-11
        assert gap <= bound


def test_single_chemostat_mass_balance_envelope():
    rng = random.Random(17)
    for _ in range(10):
        mu_max = rng.uniform(0.5, 4.0)
        K_s = rng.uniform(0.1, 2.0)
        D = rng.uniform(0.2, 1.5)
        S_in = rng.uniform(0.5, 3.0)
        params = SingleParams(Monod(mu_max, K_s), S_in, D)
        s0, x0 = rng.uniform(0.0, 2 * S_in), rng.uniform(0.01, 2 * S_in)
        traj = integrate(params, (s0, x0),
                         IntegratorSettings(t_end=30.0 / D))
        t = traj.times[-1]
        gap = abs(sum(traj.final) - S_in)
        bound = abs(s0 + x0 - S_in) * math.exp(-D * t) * (1 + 1e-5) + 1e-9
        assert gap <= bound


def test_states_stay_nonnegative(reference_model):
    cfg = BufferedConfig(reference_model, 1.4, 1.0, 0.35, 0.48)
    traj = integrate(cfg, (0.0, 1e-6, 0.0, 1e-6),
                     IntegratorSettings(t_end=50.0))
    for state in traj.states:
        assert all(c >= -1e-12 for c in state)


def test_rejects_negative_initial_state(reference_model):
    cfg = BufferedConfig(reference_model, 1.4, 1.0, 0.35, 0.48)
    with pytest.raises(ValueError):
        integrate(cfg, (1.0, -0.1, 1.0, 0.1))


def test_settings_validation():
    with pytest.raises(ValueError):
        IntegratorSettings(rel_tol=0.0)
    with pytest.raises(ValueError):
        IntegratorSettings(abs_tol=1.0)
    with pytest.raises(ValueError):
        IntegratorSettings(t_end=-1.0)
    with pytest.raises(ValueError):
        IntegratorSettings(max_step=0.0)


def test_max_step_respected():
    params = SingleParams(Monod(2.0, 1.0), 3.0, 0.5)
    traj = integrate(params, (3.0, 0.5),
                     IntegratorSettings(t_end=5.0, max_step=0.25))
    diffs = [b - a for a, b in zip(traj.times[:-1], traj.times[1:])]
    assert max(diffs) <= 0.25 + 1e-12


def test_stop_condition_truncates():
    params = SingleParams(Monod(2.0, 1.0), 3.0, 0.5)
    traj = integrate(params, (3.0, 0.5),
                     IntegratorSettings(t_end=100.0),
                     stop_condition=lambda t, y: t >= 2.0)
    assert traj.times[-1] < 100.0
    assert traj.times[-1] >= 2.0


def test_tolerances_control_accuracy():
    params = SingleParams(Monod(2.0, 1.0), 3.0, 0.5)
    loose = integrate(params, (2.0, 0.3),
                      IntegratorSettings(rel_tol=1e-5, abs_tol=1e-8,
                                         t_end=10.0))
    tight = integrate(params, (2.0, 0.3),
                      IntegratorSettings(rel_tol=1e-11, abs_tol=1e-12,
                                         t_end=10.0))
    assert loose.accepted_steps < tight.accepted_steps
    for a, b in zip(loose.final, tight.final):
        assert a == pytest.approx(b, abs=1e-4)


def test_buffer_invasion_from_trace_inoculum(reference_model):
    # tiny buffer biomass grows back and drags the pair to coexistence
    rng = random.Random(19)
    for _ in range(3):
        cfg = draw_buffered_config(rng, subcritical_buffer=True)
        eq = [e for e in find_equilibria(cfg) if e.x1 > 0.0 and e.x2 > 0.0]
        if len(eq) != 1:
            continue
        horizon = 400.0 / (cfg.alpha * cfg.D)
        traj = integrate(cfg, (cfg.S_in, 0.0, cfg.S_in, 1e-8),
                         IntegratorSettings(t_end=horizon))
        assert detect_convergence(traj, [eq[0]], eps=1e-5) == 0


def test_detect_convergence_picks_right_candidate():
    params = SingleParams(Monod(2.0, 1.0), 3.0, 1.0)
    portrait = classify_portrait(params)
    candidates = [e for e in portrait.equilibria]
    traj = integrate(params, (3.0, 0.5), IntegratorSettings(t_end=60.0))
    label = detect_convergence(traj, candidates, eps=1e-6)
    assert label is not None
    assert candidates[label].X > 0.0


def test_detect_convergence_none_when_far():
    params = SingleParams(Monod(2.0, 1.0), 3.0, 1.0)
    traj = integrate(params, (3.0, 0.5), IntegratorSettings(t_end=0.01))
    assert detect_convergence(traj, [(3.0, 0.0)], eps=1e-6) is None


def test_basin_probe_bistable_grid(reference_model):
    params = SingleParams(reference_model, 1.4, 1.0)
    portrait = classify_portrait(params)
    washout = next(e for e in portrait.equilibria if e.X == 0.0)
    positive = next(e for e in portrait.equilibria
                    if e.X > 0.0 and e.tag == "positive_attracting")
    grid = [(s, x) for s in (0.1, 0.4, 0.7, 1.0, 1.3)
            for x in (0.001, 0.01, 0.1, 0.5, 1.0)]
    labels = basin_probe(params, grid, candidates=[washout, positive])
    assert set(labels) >= {0, 1}


def test_basin_probe_includes_eps_validation(reference_model):
    params = SingleParams(reference_model, 1.4, 1.0)
    with pytest.raises(ValueError):
        basin_probe(params, [(1.0, 1.0)], candidates=[(1.4, 0.0)],
                    eps=0.0)

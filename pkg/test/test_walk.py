# -*- coding: utf-8 -*-

# Copyright 2025 The sinailab Authors
#  MIT License (https://opensource.org/licenses/MIT)

import numpy as np
import pytest

from sinailab.confinement import exit_time_survival
from sinailab.env import EnvDistribution, potential_from_probs, sample_env
from sinailab.utils import RandomStream
from sinailab.walk import (
    BUDGET,
    HittingTimeSampler,
    WalkTrajectory,
    WindowExceededError,
    checkpoint_schedule,
    corollary_target,
    embedded_walk,
    embedding_check,
    inverse_tail_check,
    localization_stats,
    localization_summary,
    power_weight,
    required_width,
    rescaled_path,
    s0_target,
    sample_T,
    simulate_replicas,
    simulate_walk,
    tail_slope,
    variational_sup,
    weighted_integral,
)

A_MAX = np.log(1000.0)


@pytest.fixture
def fair():
    return potential_from_probs(np.full(601, 0.5), first_site=-300)


@pytest.fixture(scope="module")
def sampler():
    return HittingTimeSampler()


def test_checkpoint_schedule():
    n = checkpoint_schedule(A_MAX, 0.1)
    assert n[0] == 1
    assert n[-1] == 1000
    assert np.all(np.diff(n) > 0)
    with pytest.raises(ValueError):
        checkpoint_schedule(0.0)
    with pytest.raises(ValueError):
        checkpoint_schedule(A_MAX, 1.5)


def test_required_width():
    assert required_width(1000) == 191
    assert required_width(1) == required_width(2)


def test_simulate_walk(fair):
    traj = simulate_walk(fair, A_MAX, RandomStream(0, "walk"))
    assert traj.max_time == 1000
    assert traj.is_legal()
    assert len(traj.head) == 1001
    np.testing.assert_array_equal(traj.positions % 2, traj.n % 2)
    np.testing.assert_allclose(traj.t[-1], 1.0)
    again = simulate_walk(fair, A_MAX, RandomStream(0, "walk"))
    np.testing.assert_array_equal(again.positions, traj.positions)
    assert traj.position_at(1000) == (1000, int(traj.positions[-1]))


def test_simulate_walk_needs_room(fair):
    narrow = potential_from_probs(np.full(101, 0.5), first_site=-50)
    with pytest.raises(ValueError):
        simulate_walk(narrow, A_MAX, RandomStream(0))
    drifting = potential_from_probs(np.full(401, 0.99), first_site=-200)
    with pytest.raises(WindowExceededError):
        simulate_walk(drifting, A_MAX, RandomStream(0), margin=0.1)


def test_replicas_do_not_depend_on_workers(fair):
    one = simulate_replicas(fair, 5.0, RandomStream(1), 4, n_jobs=1)
    two = simulate_replicas(fair, 5.0, RandomStream(1), 4, n_jobs=2)
    for a, b in zip(one, two):
        np.testing.assert_array_equal(a.positions, b.positions)
    assert not np.array_equal(one[0].positions, one[1].positions)


def test_trajectory_validation():
    with pytest.raises(ValueError):
        WalkTrajectory([1, 2, 3], [1, 0], 1.0)
    with pytest.raises(ValueError):
        WalkTrajectory([1, 3, 2], [1, 0, 1], 1.0)


def test_rescaled_path_and_weighted_integral():
    n = checkpoint_schedule(5.0)
    traj = WalkTrajectory(n, np.full(len(n), 100), 5.0)
    scale = 25.0 * np.log(np.log(5.0))
    path = rescaled_path(traj, 5.0)
    assert path.horizon == 1.0
    np.testing.assert_allclose(path([0.5, 1.0]), 100.0 / scale)
    np.testing.assert_allclose(weighted_integral(traj, 5.0, 0.0), 100.0 / scale, rtol=1e-12)
    np.testing.assert_allclose(weighted_integral(traj, 5.0, 1.0), 50.0 / scale, rtol=1e-12)
    with pytest.raises(ValueError):
        weighted_integral(traj, 5.0, -1.0)
    with pytest.raises(ValueError):
        rescaled_path(traj, 2.0)
    with pytest.raises(ValueError):
        rescaled_path(traj, 6.0)


def test_localization_in_a_flat_potential(fair):
    traj = simulate_walk(fair, A_MAX, RandomStream(2))
    stats = localization_stats(traj, fair, [1.0, 3.0, A_MAX])
    np.testing.assert_array_equal(stats.bottoms, 0.0)
    np.testing.assert_array_equal(stats.deviation, np.abs(stats.positions))
    assert len(stats.to_rows()) == 3
    summary = localization_summary([stats, stats])
    assert summary["n_environments"] == 2
    assert summary["median"] == stats.normalized.tolist()
    with pytest.raises(ValueError):
        localization_stats(traj, fair, [A_MAX + 1.0])
    with pytest.raises(ValueError):
        localization_summary([])


def test_sampler_inverts_the_survival(sampler):
    u = np.linspace(0.01, 0.99, 50)
    t = sampler.invert(u)
    assert np.all(np.diff(t) < 0)
    np.testing.assert_allclose(exit_time_survival(t), u, atol=1e-4)
    # past the table the leading exponential term is inverted exactly
    far = sampler.invert(np.array([1e-30]))
    np.testing.assert_allclose(exit_time_survival(far), 1e-30, rtol=1e-6)
    with pytest.raises(ValueError):
        HittingTimeSampler(t_min=1.0, t_max=0.5)


def test_sample_T(sampler):
    assert isinstance(sample_T(sampler, RandomStream(0)), float)
    draws = sample_T(sampler, RandomStream(3, "T"), size=200000, block_size=50000)
    again = sample_T(sampler, RandomStream(3, "T"), size=200000, block_size=50000)
    np.testing.assert_array_equal(draws, again)
    # E T = 1 and Var T = 2 / 3 for the exit time of (-1, 1)
    se = np.sqrt(2.0 / 3.0 / len(draws))
    assert abs(draws.mean() - 1.0) < 5 * se


def test_tail_slope(sampler):
    draws = sample_T(sampler, RandomStream(4, "tail"), size=1000000)
    result = tail_slope(draws)
    assert result["target"] == pytest.approx(-np.pi ** 2 / 8)
    assert result["relative_error"] < 0.05
    with pytest.raises(ValueError):
        tail_slope([0.5, 1.0])


def test_inverse_tail_check(sampler):
    draws = sample_T(sampler, RandomStream(5, "inverse"), size=100000)
    result = inverse_tail_check(draws)
    assert result["passed"]
    assert len(result["x"]) == 12


def test_embedded_walk(fair):
    sites, times = embedded_walk(fair, 5000, RandomStream(6, "embedded"), m=8)
    assert np.all(np.abs(np.diff(np.concatenate([[0], sites]))) == 1)
    # the lattice exit time of (-m, m) from 0 has mean m^2
    se = np.sqrt(2.0 / 3.0 / len(times))
    assert abs(times.mean() - 1.0) < 5 * se


@pytest.mark.slow
def test_embedding_check():
    pot = sample_env(EnvDistribution(), 300, RandomStream(7, "env"))
    result = embedding_check(pot, n=200, n_replicas=500, rng=RandomStream(7), n_jobs=-1)
    assert result["passed"]
    assert result["ks_p"] > 0.01


@pytest.mark.parametrize("r", [0.0, 1.0, 2.5])
def test_corollary_constants(r):
    s0 = s0_target(r)
    np.testing.assert_allclose(corollary_target(r), BUDGET / 2 * s0 ** (r + 3), rtol=1e-12)


@pytest.mark.parametrize("r", [0.0, 1.0, 2.5])
def test_variational_sup_power_weight(r):
    result = variational_sup(power_weight(r), n_grid=2000)
    assert result.monotone
    np.testing.assert_allclose(result.s0, s0_target(r), rtol=1e-8)
    np.testing.assert_allclose(result.closed_form, corollary_target(r), rtol=1e-8)
    np.testing.assert_allclose(result.lp_value, result.greedy_value, rtol=1e-6)
    assert result.agreement < 1e-4
    assert abs(result.optimizer.times[0] - s0_target(r)) <= 2.0 / 2000
    assert result.to_dict()["jump"]["at"] == result.optimizer.times[0]


def test_variational_sup_without_closed_form():
    result = variational_sup(lambda t: np.where(t < 0.5, 1.0, 0.0), n_grid=1000)
    assert not result.monotone
    assert result.closed_form is None and result.s0 is None
    assert result.agreement == pytest.approx(abs(result.lp_value - result.greedy_value))


def test_variational_sup_rejects_bad_input():
    with pytest.raises(ValueError):
        variational_sup(lambda t: -t)
    with pytest.raises(ValueError):
        variational_sup(power_weight(1.0), n_grid=1)
    with pytest.raises(ValueError):
        power_weight(-1.0)

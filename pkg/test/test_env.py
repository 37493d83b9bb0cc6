# -*- coding: utf-8 -*-

# Copyright 2025 The sinailab Authors
#  MIT License (https://opensource.org/licenses/MIT)

import numpy as np
import pytest

from sinailab.env import (
    EnvDistribution,
    GridPath,
    potential_from_probs,
    potential_from_values,
    read_path,
    read_path_csv,
    sample_brownian,
    sample_env,
    write_path,
    write_path_csv,
)
from sinailab.utils import RandomStream


def test_grid_path_invariants():
    path = GridPath(0.5, 2, 1, [1.0, -1.0, 0.0, 2.0])
    np.testing.assert_allclose(path.times, [-1.0, -0.5, 0.0, 0.5])
    assert path(0.25) == pytest.approx(1.0)
    assert path(-0.75) == pytest.approx(0.0)
    assert path.extrema(-1.0, 0.5) == (-1.0, 2.0)
    np.testing.assert_allclose(path.mirror().values, [2.0, 0.0, -1.0, 1.0])
    np.testing.assert_allclose(path.side(-1), [0.0, -1.0, 1.0])
    with pytest.raises(ValueError):
        GridPath(0.5, 1, 1, [1.0, 1.0, 0.0])
    with pytest.raises(ValueError):
        GridPath(0.0, 1, 1, [1.0, 0.0, 0.0])
    with pytest.raises(ValueError):
        GridPath(1.0, 1, 1, [1.0, 0.0])


def test_from_values_repins():
    path = GridPath.from_values([3.0, 1.0, 2.0], dt=0.1)
    np.testing.assert_allclose(path.values, [2.0, 0.0, 1.0])
    assert path.left_n == 1


def test_sample_brownian_single_point():
    path = sample_brownian(1.0, 0, 0, RandomStream(0, "t"))
    np.testing.assert_array_equal(path.values, [0.0])


def test_sample_brownian_rejects_bad_arguments():
    with pytest.raises(ValueError):
        sample_brownian(0.0, 1, 1, RandomStream(0))
    with pytest.raises(ValueError):
        sample_brownian(0.1, -1, 1, RandomStream(0))


def test_sample_brownian_is_deterministic():
    a = sample_brownian(0.01, 50, 70, RandomStream(11, "bm"))
    b = sample_brownian(0.01, 50, 70, RandomStream(11, "bm"))
    np.testing.assert_array_equal(a.values, b.values)
    assert a.values[a.left_n] == 0.0
    # a longer wing extends the shorter one
    c = sample_brownian(0.01, 50, 100, RandomStream(11, "bm"))
    np.testing.assert_array_equal(c.values[: a.n_points], a.values)


def test_sample_brownian_endpoint_variance():
    stream = RandomStream(5, "variance")
    ends = np.array(
        [sample_brownian(0.01, 0, 100, stream.generator(i)).values[-1] for i in range(10000)]
    )
    sq = ends ** 2
    se = sq.std(ddof=1) / np.sqrt(len(sq))
    assert abs(sq.mean() - 1.0) < 5 * se


def test_scaled_path_keeps_increment_variance_ratio():
    path = sample_brownian(0.01, 2000, 2000, RandomStream(3, "scale"))
    scaled = path.rescale(2.0)
    ratio = np.var(np.diff(path.values)) / path.dt
    scaled_ratio = np.var(np.diff(scaled.values)) / scaled.dt
    np.testing.assert_allclose(scaled_ratio, ratio, rtol=1e-12)
    np.testing.assert_allclose(ratio, 1.0, rtol=0.1)


def test_path_files_round_trip(tmp_path):
    path = sample_brownian(0.25, 3, 4, RandomStream(1, "io"))
    write_path(path, str(tmp_path / "p.sinp"))
    back = read_path(str(tmp_path / "p.sinp"))
    assert (back.dt, back.left_n, back.right_n) == (0.25, 3, 4)
    np.testing.assert_array_equal(back.values, path.values)
    with open(str(tmp_path / "p.sinp"), "rb") as f:
        assert f.read(4) == b"SINP"

    write_path_csv(path, str(tmp_path / "p.csv"))
    back = read_path_csv(str(tmp_path / "p.csv"))
    np.testing.assert_array_equal(back.values, path.values)


def test_read_path_rejects_other_files(tmp_path):
    (tmp_path / "bad").write_bytes(b"NOPE" + bytes(40))
    with pytest.raises(ValueError):
        read_path(str(tmp_path / "bad"))


def test_potential_examples():
    np.testing.assert_allclose(potential_from_probs([0.5, 0.5, 0.5]).values, 0.0)
    pot = potential_from_probs([1 / (1 + np.e)])
    np.testing.assert_allclose(pot.V(1), 1.0)
    pot = potential_from_probs([1 / (1 + np.e), np.e / (1 + np.e)])
    np.testing.assert_allclose(pot.values, [0.0, 1.0, 0.0], atol=1e-12)


def test_potential_rejects_bad_probabilities():
    with pytest.raises(ValueError):
        potential_from_probs([0.5, 1.0])
    with pytest.raises(ValueError):
        potential_from_probs([0.0])


def test_potential_round_trip():
    probs = np.random.default_rng(0).uniform(0.05, 0.95, 21)
    pot = potential_from_probs(probs, first_site=-10)
    assert pot.V(0) == 0.0
    np.testing.assert_allclose(np.diff(pot.values), np.log((1 - probs) / probs), atol=1e-12)
    back = potential_from_values(pot.values, pot.left_n)
    np.testing.assert_allclose(back.probs, probs, atol=1e-12)
    assert back.first_site == -10


def test_potential_as_path():
    pot = potential_from_probs([0.3, 0.6, 0.4], first_site=-1)
    path = pot.as_path()
    assert path.dt == 1.0
    assert path.left_n == 2
    np.testing.assert_allclose(path.values, pot.values)


@pytest.mark.parametrize("law", ["two-point", "truncated-gaussian"])
def test_sample_env_moments(law):
    pot = sample_env(EnvDistribution("iid-log-odds", law), 50000, RandomStream(2, law))
    lo = pot.log_odds
    assert len(lo) == 100001
    se = lo.std(ddof=1) / np.sqrt(len(lo))
    assert abs(lo.mean()) < 5 * se
    assert abs(lo.var() - 1.0) < 0.03


def test_sample_env_is_deterministic_and_nested():
    dist = EnvDistribution("brownian")
    a = sample_env(dist, 100, RandomStream(4, "env"))
    b = sample_env(dist, 100, RandomStream(4, "env"))
    np.testing.assert_array_equal(a.probs, b.probs)
    wide = sample_env(dist, 200, RandomStream(4, "env"))
    np.testing.assert_array_equal(wide.prob(np.arange(-100, 101)), a.prob(np.arange(-100, 101)))


def test_env_distribution_rejects_unknown_laws():
    with pytest.raises(ValueError):
        EnvDistribution("levy")
    with pytest.raises(ValueError):
        EnvDistribution("iid-log-odds", "cauchy")
    with pytest.raises(ValueError):
        sample_env(EnvDistribution(), 0, RandomStream(0))

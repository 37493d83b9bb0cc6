# -*- coding: utf-8 -*-

# Copyright 2025 The sinailab Authors
#  MIT License (https://opensource.org/licenses/MIT)

import numpy as np
import pytest

from sinailab.occupation import (
    NotInMError,
    OccupationMeasure,
    StepFunction,
    StepSpec,
    envelopes,
    in_neighborhood,
    lw_distance,
    mc_tightness,
    occupation,
    outside_tightness_set,
    read_measure,
    rescale_measure,
    spec_from_function,
    tightness_set_check,
    wells_function,
    write_measure,
    z_process,
)
from sinailab.utils import RandomStream
from sinailab.wells import WellProcess


@pytest.fixture
def spec():
    return StepSpec([1.0, 2.0], [1.0, -1.0])


def test_step_spec_validation():
    with pytest.raises(ValueError):
        StepSpec([2.0, 1.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        StepSpec([1.0, 2.0], [1.0, 0.0])
    with pytest.raises(ValueError):
        StepSpec([1.0, 2.0], [2.0, 1.0])
    with pytest.raises(ValueError):
        StepSpec([1.0], [1.0, 2.0])


def test_step_spec_indices():
    spec = StepSpec([1.0, 2.0, 3.0], [1.0, -1.0, -2.0])
    assert spec.tail_indices == [2, 3]
    assert spec.prev_same(3) == 2
    assert spec.prev_same(2) == 0
    assert spec.next_same(1) == spec.inf == 4
    assert (spec.alpha, spec.beta) == (1, 2)
    assert spec.h_at(spec.inf) == 6.0
    assert spec.x_at(spec.inf) == -1.0
    np.testing.assert_allclose(spec.increments(), [1.0, 1.0, 1.0])
    assert spec.mesh == 1.0
    assert StepSpec.from_dict(spec.to_dict()).to_dict() == spec.to_dict()


def test_step_function_is_left_continuous(spec):
    phi = spec.phi()
    np.testing.assert_allclose(phi([0.5, 1.0, 1.5, 2.0, 2.5]), [0.0, 0.0, 1.0, 1.0, -1.0])
    np.testing.assert_allclose(phi.right_limit([1.0, 2.0]), [1.0, -1.0])
    back = spec_from_function(phi)
    np.testing.assert_allclose(back.h, spec.h)
    np.testing.assert_allclose(back.x, spec.x)


def test_occupation_examples(spec):
    mu = occupation(StepFunction.zero(), 3.0)
    np.testing.assert_allclose(mu.segments, [[0.0, 3.0, 0.0]])
    assert mu.mass == 3.0
    mu = occupation(spec, 3.0)
    np.testing.assert_allclose(mu.segments, [[0, 1, 0], [1, 2, 1], [2, 3, -1]])
    assert mu.mass == 3.0


def test_restrict_and_back_to_function(spec):
    mu = occupation(spec, 3.0)
    short = mu.restrict(1.5)
    np.testing.assert_allclose(short.segments, [[0, 1, 0], [1, 1.5, 1]])
    assert short.total_horizon == 1.5
    assert mu.restrict(10.0).total_horizon == 3.0
    phi = mu.as_function()
    np.testing.assert_allclose(phi.times, [1.0, 2.0])
    np.testing.assert_allclose(phi([0.5, 1.5, 2.5]), [0.0, 1.0, -1.0])
    assert occupation(phi, 3.0).to_dict() == mu.to_dict()


def test_measure_validation():
    with pytest.raises(ValueError):
        OccupationMeasure([[0.0, 1.0, 0.0], [1.5, 2.0, 1.0]], 2.0)
    with pytest.raises(ValueError):
        OccupationMeasure([[0.0, 1.0, 0.0]], 2.0)
    with pytest.raises(ValueError):
        occupation(StepFunction.zero(), 0.0)


def test_envelopes(spec):
    f, g, s_plus, s_minus = envelopes(occupation(spec, 3.0))
    np.testing.assert_allclose(f.times, [1.0])
    np.testing.assert_allclose(f.levels, [1.0])
    np.testing.assert_allclose(g.times, [2.0])
    np.testing.assert_allclose(g.levels, [1.0])
    assert s_plus == 2.0
    assert s_minus == np.inf


def test_envelopes_of_the_time_axis():
    f, g, s_plus, s_minus = envelopes(occupation(StepFunction.zero(), 4.0))
    assert len(f) == len(g) == 0
    assert s_plus == s_minus == 0.0


def test_envelopes_reject_measures_outside_m():
    with pytest.raises(NotInMError):
        envelopes(OccupationMeasure([[0, 1, 0], [1, 2, 2], [2, 3, 1]], 3.0))
    with pytest.raises(NotInMError):
        envelopes(OccupationMeasure([[0, 1, 1], [1, 2, -1], [2, 3, 0]], 3.0))


def test_rescale_measure(spec):
    mu = occupation(spec, 3.0)
    np.testing.assert_array_equal(rescale_measure(mu, 1.0).segments, mu.segments)
    np.testing.assert_allclose(rescale_measure(mu, 2.0).segments[1], [2.0, 4.0, 4.0])
    twice = rescale_measure(rescale_measure(mu, 2.0), 3.0)
    np.testing.assert_allclose(twice.segments, rescale_measure(mu, 6.0).segments)
    with pytest.raises(ValueError):
        rescale_measure(mu, 0.0)


def test_z_process():
    a = np.e ** 2
    wp = WellProcess([a], [a * a * np.log(np.log(a))])
    z = z_process(wp, a)
    np.testing.assert_allclose(z([0.5, 1.0, 1.5]), [0.0, 0.0, 1.0])
    empty = z_process(WellProcess([], []), a)
    np.testing.assert_array_equal(empty([0.5, 3.0]), 0.0)
    with pytest.raises(ValueError):
        z_process(wp, 2.0)


def test_in_neighborhood(spec):
    beyond = occupation(StepSpec([1.0, 2.0], [1.5, -1.5]), 3.0)
    itself = occupation(spec, 3.0)
    flat = occupation(StepFunction.zero(), 3.0)
    for eps in (0.05, 0.2, 0.45):
        assert in_neighborhood(beyond, spec, eps)
        assert not in_neighborhood(itself, spec, eps)
        assert not in_neighborhood(flat, spec, eps)
    with pytest.raises(ValueError):
        in_neighborhood(beyond, spec, 0.5)


def test_in_neighborhood_is_monotone_in_eps(spec):
    # the level 1.5 starts at h_1 + 0.1
    nu = occupation(StepSpec([1.1, 2.0], [1.5, -1.5]), 3.0)
    answers = [in_neighborhood(nu, spec, eps) for eps in (0.05, 0.1, 0.15, 0.3)]
    assert answers == [False, False, True, True]


def test_tightness_set_check():
    assert tightness_set_check(occupation(StepSpec([1.0, 2.0], [2.0, -2.0]), 3.0), 2.0)
    mu = OccupationMeasure([[0.0, 0.5, 0.0], [0.5, 0.9, 4.0], [0.9, 1.0, 0.0]], 1.0)
    assert not tightness_set_check(mu, 2.0)
    with pytest.raises(ValueError):
        tightness_set_check(mu, 0.0)


@pytest.mark.parametrize("name", ["mu.csv", "mu.json"])
def test_measure_files(tmp_path, spec, name):
    mu = occupation(spec, 3.0)
    write_measure(mu, str(tmp_path / name))
    back = read_measure(str(tmp_path / name))
    np.testing.assert_array_equal(back.segments, mu.segments)
    assert back.total_horizon == 3.0


def test_lw_distance(spec):
    mu = occupation(spec, 4.0)
    np.testing.assert_allclose(lw_distance(mu, mu, max_window=6), 0.0, atol=1e-10)
    distances = []
    for n in (2, 4, 8, 16):
        nu = occupation(StepSpec([1.0 + 1.0 / n, 2.0], [1.0, -1.0]), 4.0)
        d = lw_distance(mu, nu, max_window=6)
        np.testing.assert_allclose(d, lw_distance(nu, mu, max_window=6), rtol=1e-9)
        assert 0.0 < d <= 1.0
        distances.append(d)
    assert all(a > b for a, b in zip(distances[:-1], distances[1:]))


def test_lw_distance_separates_measures_within_a_grid_cell():
    mu = OccupationMeasure([[0.0, 1 / 32, 1.0], [1 / 32, 1.0, 0.0]], 1.0)
    nu = OccupationMeasure([[0.0, 1 / 32, 0.0], [1 / 32, 1 / 16, 1.0], [1 / 16, 1.0, 0.0]], 1.0)
    assert lw_distance(mu, nu) > 0.0
    # another segmentation of the same measure
    split = OccupationMeasure([[0.0, 1 / 32, 1.0], [1 / 32, 0.5, 0.0], [0.5, 1.0, 0.0]], 1.0)
    np.testing.assert_allclose(lw_distance(mu, split), 0.0, atol=1e-12)


def test_lw_distance_sums_the_tail_exactly(spec):
    mu = occupation(spec, 4.0)
    nu = occupation(StepSpec([1.5, 2.0], [1.0, -1.0]), 4.0)
    full = lw_distance(mu, nu)
    # beyond the covering window every term repeats the last one
    np.testing.assert_allclose(full, lw_distance(mu, nu, max_window=12), atol=2.0 ** -12)
    assert 0.0 < full <= 1.0


def _random_measure(gen, horizon=4.0):
    n = int(gen.integers(1, 4))
    h = np.sort(gen.choice(np.arange(1, 12), size=n, replace=False)) / 4.0
    size = np.cumsum(gen.uniform(0.2, 1.0, size=n))
    x = size * (-1.0) ** np.arange(n) * gen.choice([-1.0, 1.0])
    return occupation(StepSpec(h, x), horizon)


def test_lw_distance_is_a_metric():
    gen = np.random.default_rng(0)
    for _ in range(10):
        mu, nu, rho = (_random_measure(gen) for _ in range(3))
        d_mn, d_nr, d_mr = lw_distance(mu, nu), lw_distance(nu, rho), lw_distance(mu, rho)
        assert d_mr <= d_mn + d_nr + 1e-9
        np.testing.assert_allclose(d_mn, lw_distance(nu, mu), rtol=1e-9, atol=1e-10)
        if not np.array_equal(mu.segments, nu.segments):
            assert d_mn > 0.0


def test_wells_function_and_tightness_set():
    wp = WellProcess([0.0], [10.0], 0.5)
    f = wells_function(wp, 2.0)
    np.testing.assert_allclose(f([0.25, 0.75]), [5.0, 0.0])
    assert outside_tightness_set(wp, 2.0, 1.0)
    assert not outside_tightness_set(wp, 10.0, 1.0)


@pytest.mark.slow
def test_mc_tightness_matches_the_strip_cost():
    fit = mc_tightness(
        a=2.0,
        M_grid=(2, 3, 4, 5),
        n_particles=300,
        rng=RandomStream(0, "tightness"),
        n_replicates=4,
        dt=0.02,
        extension=8.0,
        n_jobs=-1,
    )
    assert fit.target == pytest.approx(-2.0 * np.pi ** 2 / 8)
    assert abs(fit.slope - fit.target) <= 0.2 * abs(fit.target)

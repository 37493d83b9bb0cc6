# -*- coding: utf-8 -*-

# Copyright 2025 The sinailab Authors
#  MIT License (https://opensource.org/licenses/MIT)

import numpy as np
import pytest
from scipy import integrate

from sinailab.confinement import (
    BLOCK_KINDS,
    Program,
    Segment,
    SeriesTruncationError,
    ZeroHitsError,
    binomial_estimate,
    block_program,
    block_target,
    confinement_event_prob,
    confinement_prob,
    estimate,
    event_exact,
    event_program,
    exit_time_survival,
    fit_exit_constant,
    fit_lower_constant,
    fit_rate,
    fit_upper_constant,
    mc_block_cost,
    mc_rate,
    q_kernel,
    reflected_confinement_prob,
    replicate_estimate,
    run_plain,
)
from sinailab.confinement.engine import _advance
from sinailab.utils import RandomStream


def test_q_kernel_examples():
    np.testing.assert_allclose(q_kernel(1.0, 0.5, 0.5), 2 * np.exp(-np.pi ** 2 / 2), rtol=1e-12)
    assert q_kernel(1.3, 0.3, 0.7) == q_kernel(1.3, 0.7, 0.3)
    # scaling to width h
    np.testing.assert_allclose(
        q_kernel(8.0, 0.6, 1.4, h=2.0), q_kernel(2.0, 0.3, 0.7) / 2.0, rtol=1e-12
    )


def test_q_kernel_chapman_kolmogorov():
    s, t, x, y = 0.4, 0.7, 0.3, 0.8
    value, _ = integrate.quad(
        lambda z: q_kernel(s, x, z) * q_kernel(t, z, y), 0.0, 1.0, epsabs=1e-13, limit=200
    )
    np.testing.assert_allclose(value, q_kernel(s + t, x, y), atol=1e-10)


def test_q_kernel_rejects_small_times_and_outside_points():
    with pytest.raises(SeriesTruncationError):
        q_kernel(1e-3, 0.5, 0.5)
    with pytest.raises(ValueError):
        q_kernel(1.0, 0.0, 0.5)
    with pytest.raises(ValueError):
        q_kernel(1.0, 0.5, 1.2)


def test_confinement_prob():
    np.testing.assert_allclose(confinement_prob(1.0, 0.5), 0.0091574, atol=1e-7)
    assert confinement_prob(1.0, 1e-9) < 1e-10
    np.testing.assert_allclose(
        confinement_event_prob(1.0, 0.5, 0.0, 1.0), confinement_prob(1.0, 0.5), rtol=1e-12
    )
    assert confinement_event_prob(1.0, 0.5, 0.1, 0.9) < confinement_prob(1.0, 0.5)


def test_reflected_confinement_is_an_exit_time():
    for t in (0.5, 1.0, 3.0):
        np.testing.assert_allclose(
            reflected_confinement_prob(t, 0.0, 1.0), exit_time_survival(t), rtol=1e-10
        )


@pytest.mark.parametrize("start", [0.05, 0.2, 0.5, 0.8, 0.95])
def test_exact_event_slopes_on_a_start_lattice(start):
    # log-slopes between two late times do not depend on where the path starts
    a = np.log([event_exact("a", t, z=start) for t in (3.0, 4.0)])
    np.testing.assert_allclose(a[1] - a[0], -np.pi ** 2 / 2, rtol=1e-6)
    b = np.log([event_exact("b", t, w=start) for t in (10.0, 12.0)])
    np.testing.assert_allclose((b[1] - b[0]) / 2.0, -np.pi ** 2 / 8, rtol=1e-6)


def test_exit_time_survival():
    assert exit_time_survival(0.0) == 1.0
    # the image series and the eigenfunction series meet at the switch time
    np.testing.assert_allclose(
        exit_time_survival(0.25 - 1e-12), exit_time_survival(0.25), rtol=1e-9
    )
    values = exit_time_survival(np.linspace(0.0, 5.0, 51))
    assert np.all(np.diff(values) <= 0)
    with pytest.raises(ValueError):
        exit_time_survival(-1.0)


def test_fitted_constants():
    assert fit_upper_constant() <= 2.5
    assert fit_lower_constant(0.1) > 0.0
    c = fit_exit_constant()
    np.testing.assert_allclose(c, 4 / np.pi, rtol=1e-3)


def test_fit_rate_on_exact_data():
    grid = [1.0, 2.0, 3.0, 4.0]
    estimates = [
        replicate_estimate([1.0 - 2.0 * t, 1.0 - 2.0 * t + 0.01], 100) for t in grid
    ]
    fit = fit_rate(grid, estimates, target=-2.0)
    np.testing.assert_allclose(fit.slope, -2.0, rtol=1e-6)
    assert fit.within(1e-5)
    assert fit.to_dict()["variable"] == "t"


def test_fit_rate_rejects_zero_hits():
    estimates = [binomial_estimate(10, 100), binomial_estimate(0, 100)]
    with pytest.raises(ZeroHitsError):
        fit_rate([1.0, 2.0], estimates)
    with pytest.raises(ValueError):
        fit_rate([1.0], estimates[:1])


def test_estimates():
    est = binomial_estimate(25, 100)
    assert est.estimate == 0.25
    np.testing.assert_allclose(est.std_error, np.sqrt(0.25 * 0.75 / 100))
    assert est.hits == 25
    empty = replicate_estimate([-np.inf, -np.inf], 10)
    assert empty.estimate == 0.0
    assert empty.n_samples == 20


def test_program_validation():
    with pytest.raises(ValueError):
        Segment(0.0)
    with pytest.raises(ValueError):
        Segment(1.0, mode="sticky")
    with pytest.raises(ValueError):
        Segment(1.0, lo=1.0, hi=0.0)
    with pytest.raises(ValueError):
        Program([])
    with pytest.raises(ValueError):
        Program([Segment(1.0)], start=0.0, start_min=1.0)
    with pytest.raises(ValueError):
        event_program("d", 1.0)


def _one_reflected_cell(hi):
    # a flat step whose bridge dips to -1 and peaks at +1
    alive = np.ones(1, dtype=bool)
    u = np.full((1, 1), np.exp(-2.0))
    flags = np.zeros(1, dtype=np.bool_)
    _advance(np.zeros(1), np.zeros(1), np.zeros(1), flags, flags.copy(), alive,
             np.zeros((1, 1)), u, u.copy(), 1.0, True, -1.0, hi,
             -np.inf, np.inf, -np.inf, np.inf)
    return bool(alive[0])


def test_reflected_cell_maximum_is_bounded_from_above():
    # the reflected process may reach 1 - (-1) = 2 inside the cell
    assert not _one_reflected_cell(1.5)
    assert _one_reflected_cell(2.5)


def test_plain_estimate_does_not_depend_on_workers():
    program = event_program("a", 0.5, dt=1e-2)
    one = run_plain(program, 3000, RandomStream(0, "workers"), block_size=500, n_jobs=1)
    two = run_plain(program, 3000, RandomStream(0, "workers"), block_size=500, n_jobs=2)
    assert one.hits == two.hits


@pytest.mark.parametrize("event", ["a", "b"])
def test_plain_estimate_matches_exact(event):
    program = event_program(event, 1.0, dt=1e-3)
    est = estimate(program, 20000, RandomStream(1, event), method="plain")
    exact = event_exact(event, 1.0)
    assert abs(est.estimate - exact) < 5 * est.std_error
    assert est.meta["method"] == "plain"


def test_auto_method_switches_to_splitting():
    program = event_program("a", 0.5, dt=1e-2)
    est = estimate(program, 200, RandomStream(2), forecast=1e-6, n_replicates=2)
    assert est.meta["method"] == "splitting"
    with pytest.raises(ValueError):
        estimate(program, 200, RandomStream(2), method="exact")


def test_block_targets():
    np.testing.assert_allclose(
        block_target("C", eps=0.1, delta=0.05),
        -(np.pi ** 2 / 2) * 0.95 / 1.01 ** 2,
        rtol=1e-12,
    )
    np.testing.assert_allclose(
        block_target("B", delta=0.1), 2.0 * block_target("B", delta=0.05), rtol=1e-12
    )
    parts = sum(block_target(kind) for kind in ("RC", "HR", "RB"))
    np.testing.assert_allclose(block_target("Gamma"), parts, rtol=1e-12)


def test_block_programs():
    for kind in BLOCK_KINDS:
        program = block_program(kind, 3.0)
        assert program.duration > 0
    assert len(block_program("Gamma", 3.0).segments) == 3
    with pytest.raises(ValueError):
        block_program("C", 3.0, x=1.0, y=1.0)
    with pytest.raises(ValueError):
        block_program("B", 3.0, h=2.0, h2=1.0)
    with pytest.raises(ValueError):
        block_program("D", 3.0)


@pytest.mark.slow
def test_mc_rate_interval_event():
    t_grid = [1.0, 1.5, 2.0, 2.5]
    fit = mc_rate(
        "a", t_grid, 4000, RandomStream(3), dt=1e-3, method="splitting", n_replicates=8
    )
    exact = np.log([event_exact("a", t) for t in t_grid])
    exact_slope = np.polyfit(t_grid, exact, 1)[0]
    assert abs(fit.slope - exact_slope) < 0.05 * abs(exact_slope)
    assert fit.target == pytest.approx(-np.pi ** 2 / 2)


@pytest.mark.slow
def test_mc_block_cost_confinement_block():
    fit = mc_block_cost("C", 4000, RandomStream(4), M_grid=[2, 3, 4], dt=0.01)
    assert fit.within(0.15)

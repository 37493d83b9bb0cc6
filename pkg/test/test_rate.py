# -*- coding: utf-8 -*-

# Copyright 2025 The sinailab Authors
#  MIT License (https://opensource.org/licenses/MIT)

import numpy as np
import pytest

from sinailab.occupation import (
    StepFunction,
    StepSpec,
    envelopes,
    lw_distance,
    occupation,
    rescale_measure,
)
from sinailab.rate import (
    RefinementError,
    in_K,
    rate,
    rate_of_envelopes,
    rate_of_measure,
    rate_of_spec,
    shrink,
    step_approximate,
)


def _random_spec(gen, max_n=6):
    n = int(gen.integers(1, max_n + 1))
    h = np.cumsum(0.05 + gen.exponential(size=n))
    signs = gen.choice([-1.0, 1.0], size=n)
    x = np.empty(n)
    for sign in (-1.0, 1.0):
        idx = np.nonzero(signs == sign)[0]
        x[idx] = sign * np.sort(0.1 + gen.exponential(size=len(idx)))
    return StepSpec(h, x)


def test_rate_of_spec_examples():
    value = rate_of_spec(StepSpec([1.0, 2.0], [1.0, -1.0]))
    np.testing.assert_allclose(value.value, 17 * np.pi ** 2 / 32, rtol=1e-12)
    assert [term.tail for term in value.breakdown] == [False, True]
    extremal = StepSpec([1.0], [8 / np.pi ** 2])
    np.testing.assert_allclose(rate(extremal), 1.0, rtol=1e-12)
    np.testing.assert_allclose(rate(StepSpec([1.0], [1.0])), np.pi ** 2 / 8, rtol=1e-12)


def test_rate_of_envelopes_examples():
    f = StepFunction([1.0], [8 / np.pi ** 2])
    g = StepFunction.zero()
    np.testing.assert_allclose(rate_of_envelopes(f, g, 0.0, np.inf).value, 1.0, rtol=1e-12)
    assert rate_of_envelopes(g, g, 0.0, 0.0).value == 0.0


def test_jump_at_zero_gives_infinite_rate():
    f = StepFunction([0.0], [1.0])
    assert rate_of_envelopes(f, StepFunction.zero(), 0.0, np.inf).value == np.inf


def test_rate_of_envelopes_rejects_bad_input():
    f = StepFunction([1.0, 2.0], [2.0, 1.0])
    with pytest.raises(ValueError):
        rate_of_envelopes(f, StepFunction.zero(), 0.0, np.inf)
    with pytest.raises(ValueError):
        rate_of_envelopes(StepFunction.zero(), StepFunction.zero(), np.inf, np.inf)


def test_exchange_rule():
    # mirror images have the same rate
    spec = StepSpec([1.0, 2.0, 3.0], [1.0, -1.0, 2.0])
    mirrored = StepSpec(spec.h, -spec.x)
    np.testing.assert_allclose(rate(spec), rate(mirrored), rtol=1e-12)
    f, g, s_plus, s_minus = envelopes(occupation(spec, 6.0))
    assert np.isinf(s_plus)
    np.testing.assert_allclose(
        rate_of_envelopes(f, g, s_minus, s_plus).value, rate(spec), rtol=1e-12
    )


def test_dual_path_agrees_on_random_specs():
    gen = np.random.default_rng(0)
    for _ in range(100):
        spec = _random_spec(gen)
        mu = occupation(spec, 2.0 * spec.h[-1])
        np.testing.assert_allclose(
            rate_of_measure(mu).value, rate_of_spec(spec).value, rtol=1e-12
        )


@pytest.mark.parametrize("a", [0.5, 2.0, 10.0])
def test_rate_is_scale_invariant(a):
    gen = np.random.default_rng(1)
    for _ in range(20):
        spec = _random_spec(gen)
        np.testing.assert_allclose(rate(spec.scaled(a)), rate(spec), rtol=1e-12)
        mu = occupation(spec, 2.0 * spec.h[-1])
        np.testing.assert_allclose(rate(rescale_measure(mu, a)), rate(mu), rtol=1e-12)


def test_a_longer_tail_lowers_the_rate():
    two_sided = StepSpec([1.0, 2.0], [-1.0, 1.0])
    one_sided = StepSpec([1.0, 2.0], [1.0, 2.0])
    np.testing.assert_allclose(two_sided.increments(), one_sided.increments())
    assert one_sided.tail_indices == [1, 2]
    assert rate(one_sided) < rate(two_sided)


def test_in_K():
    assert in_K(StepSpec([1.0], [8 / np.pi ** 2]))
    assert not in_K(StepSpec([1.0], [1.0]))
    assert in_K(StepSpec([], []))
    assert rate(StepSpec([], [])) == 0.0


def test_shrink():
    spec = StepSpec([1.0, 2.0], [1.0, -1.0])
    mu = occupation(spec, 4.0)
    np.testing.assert_array_equal(shrink(mu, 0.0).segments, mu.segments)
    np.testing.assert_allclose(rate(shrink(spec, 0.5)), 17 * np.pi ** 2 / 64, rtol=1e-12)
    np.testing.assert_allclose(rate(shrink(mu, 0.5)), 17 * np.pi ** 2 / 64, rtol=1e-12)
    with pytest.raises(ValueError):
        shrink(mu, 1.0)


def _cubic(t):
    return 2.0 * min(t, 1.0) ** 3 / 3.0


@pytest.fixture
def cubic_measure():
    # the graph of 2 t^3 / 3 on [0, 1], as a fine step measure
    times = np.arange(1, 4096) / 4096
    return occupation(StepFunction(times, [_cubic(t) for t in times]), 1.0)


def test_step_approximate_keeps_step_pairs():
    spec = StepSpec([1.0, 2.0], [1.0, -1.0])
    env = envelopes(occupation(spec, 4.0))
    approx = step_approximate(env.f, env.g, 1e-9, env.s_minus, env.s_plus, horizon=4.0)
    np.testing.assert_allclose(rate(approx), rate(spec), atol=1e-9)
    distance = lw_distance(occupation(approx, 4.0), occupation(spec, 4.0))
    np.testing.assert_allclose(distance, 0.0, atol=1e-9)


def test_step_approximate_continuous_envelope(cubic_measure):
    # int t^-2 d(2 t^3 / 3) over (0, 1] is 2, all of it one-sided
    target = 2.0 * np.pi ** 2 / 8
    gaps = []
    for delta in (0.1, 0.05):
        spec = step_approximate(
            _cubic,
            lambda t: 0.0,
            delta,
            s_minus=0.0,
            s_plus=np.inf,
            horizon=1.0,
            reference=cubic_measure,
        )
        gap = abs(rate(spec) - target)
        assert gap < delta
        assert lw_distance(occupation(spec, 1.0), cubic_measure) < delta
        gaps.append(gap)
    assert gaps[1] <= gaps[0]


def test_step_approximate_needs_a_close_measure():
    spec = StepSpec([1.0, 2.0], [1.0, -1.0])
    env = envelopes(occupation(spec, 4.0))
    # right envelopes, but the time sits on the axis
    flat = occupation(StepFunction.zero(), 4.0)
    with pytest.raises(RefinementError) as excinfo:
        step_approximate(
            env.f, env.g, 0.1, env.s_minus, env.s_plus, horizon=4.0,
            n_start=4, max_cells=16, reference=flat,
        )
    assert excinfo.value.gap < 0.1


def test_step_approximate_budget(cubic_measure):
    with pytest.raises(RefinementError) as excinfo:
        step_approximate(
            _cubic, lambda t: 0.0, 1e-12, s_minus=0.0, horizon=1.0,
            n_start=4, max_cells=16, reference=cubic_measure,
        )
    assert excinfo.value.gap > 1e-12
    with pytest.raises(ValueError):
        step_approximate(_cubic, lambda t: 0.0, 0.1, s_minus=0.0, reference=cubic_measure)
    with pytest.raises(ValueError):
        step_approximate(_cubic, lambda t: 0.0, 0.1, s_minus=0.0, horizon=1.0)

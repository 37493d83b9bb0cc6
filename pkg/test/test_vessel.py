# -*- coding: utf-8 -*-

# Copyright 2025 The sinailab Authors
#  MIT License (https://opensource.org/licenses/MIT)

import numpy as np
import pytest

from sinailab.env import GridPath
from sinailab.experiments.vessel import DEFAULT_LATTICE
from sinailab.occupation import StepFunction, StepSpec
from sinailab.utils import RandomStream
from sinailab.vessel import (
    InfeasibleGeometryError,
    VesselSpec,
    construct_witness,
    default_M_grid,
    f_sharp,
    mc_vessel_prob,
    skorokhod_closeness,
    skorokhod_distance,
    v_profile,
    vessel_membership,
    vessel_program,
    vessel_rate_target,
    witness_margin,
)


@pytest.fixture
def vspec():
    return VesselSpec(StepSpec([1.0, 2.0], [1.0, -1.0]), 0.05, 0.05)


@pytest.mark.parametrize("delta, eps", [(0.2, 0.1), (0.05, 0.05)])
def test_witness_is_a_member(delta, eps):
    n_feasible = 0
    for h, x in DEFAULT_LATTICE:
        try:
            vspec = VesselSpec(StepSpec(h, x), delta, eps)
        except InfeasibleGeometryError:
            continue
        n_feasible += 1
        report = vessel_membership(construct_witness(vspec), vspec)
        assert report.passed, report.first_failure
    assert n_feasible > 0


def test_blocks(vspec):
    names = [b.name for b in vspec.side_blocks(1)]
    assert names == ["E0:C", "E0:B", "E1:C", "E1:H", "E1:B"]
    names = [b.name for b in vspec.side_blocks(-1)]
    assert names == ["E0:C", "E0:B", "E2:RC", "E2:HR", "E2:RB"]
    assert vspec.extent(1) == pytest.approx(1.05)
    rb = vspec.side_blocks(-1)[-1]
    assert rb.h == 4.0
    assert rb.cap == pytest.approx(0.05 ** 2)
    assert witness_margin(vspec) == pytest.approx(0.05 ** 2 / 4)
    assert VesselSpec.from_dict(vspec.to_dict()).to_dict() == vspec.to_dict()


def test_witness_margin_is_capped_for_deep_first_wells():
    deep = VesselSpec(StepSpec([3.0, 6.0], [1.0, -1.0]), 0.05, 0.05)
    # the eps^2 cap of the reflected blocks does not grow with h
    assert witness_margin(deep) == pytest.approx(0.05 ** 2 / 4)
    shallow = VesselSpec(StepSpec([0.5, 1.0], [1.0, -1.0]), 0.05, 0.05)
    assert witness_margin(shallow) == pytest.approx(0.05 ** 2 * 0.5 / 4)
    for vs in (deep, shallow):
        report = vessel_membership(construct_witness(vs), vs)
        assert report.passed, report.first_failure


def test_infeasible_geometry():
    spec = StepSpec([1.0, 2.0], [1.0, -1.0])
    with pytest.raises(InfeasibleGeometryError):
        VesselSpec(spec, 0.1, 0.6)
    with pytest.raises(ValueError):
        VesselSpec(spec, 0.0, 0.1)
    with pytest.raises(ValueError):
        VesselSpec(spec, 0.1, 1.0)
    with pytest.raises(ValueError):
        VesselSpec(StepSpec([], []), 0.1, 0.1)


def test_lowered_barrier_fails_its_block(vspec):
    witness = construct_witness(vspec)
    values = witness.values.copy()
    barrier = (witness.times >= 0.05) & (witness.times <= 0.0525)
    values[barrier] = np.minimum(values[barrier], 0.9)
    path = GridPath(witness.dt, witness.left_n, witness.right_n, values)
    report = vessel_membership(path, vspec)
    assert not report
    assert (report.first_failure.name, report.first_failure.side) == ("E0:B", 1)
    assert report.to_dict()["first_failure"]["name"] == "E0:B"


def test_flat_and_short_paths(vspec):
    flat = GridPath.from_values(np.zeros(241), dt=0.01, origin=120)
    assert not vessel_membership(flat, vspec)
    short = GridPath.from_values(np.zeros(101), dt=0.01, origin=50)
    with pytest.raises(ValueError):
        vessel_membership(short, vspec)


def test_witness_depths(vspec):
    witness = construct_witness(vspec)
    profile = v_profile(witness, vspec)
    # barrier peak 1.025, hole bottom -0.04875, far barrier peak 2.05
    np.testing.assert_allclose(profile.v, [1.025, 2.09875, 4.0], rtol=1e-9)
    assert profile.passed
    closeness = skorokhod_closeness(witness, vspec)
    assert closeness.distance <= closeness.bound
    assert closeness.bound == pytest.approx(2 * 0.05 * 2.0 * 1.05)


def test_profile_of_a_non_member_is_unchecked(vspec):
    flat = GridPath.from_values(np.zeros(241), dt=0.01, origin=120)
    assert v_profile(flat, vspec).passed is None
    with pytest.raises(ValueError):
        skorokhod_closeness(flat, vspec)


def test_f_sharp():
    path = GridPath.from_values([2.0, -1.0, 0.5, -1.5, 3.0], dt=1.0, origin=2)
    assert f_sharp(path, -2.0, 2.0) == pytest.approx(4.5)
    assert f_sharp(path, 2.0, -2.0) == pytest.approx(3.5)
    assert f_sharp(path, 1.0, 1.0) == 0.0
    with pytest.raises(ValueError):
        f_sharp(path, 0.0, 5.0)


def test_skorokhod_distance():
    phi = StepSpec([1.0, 2.0], [1.0, -1.0]).phi()
    assert skorokhod_distance(phi, phi, 4.0) == 0.0
    late = StepFunction([1.1], [1.0])
    on_time = StepFunction([1.0], [1.0])
    assert skorokhod_distance(late, on_time, 3.0) == pytest.approx(0.1)
    with pytest.raises(ValueError):
        skorokhod_distance(phi, phi, 0.0)


def test_vessel_rate_target():
    spec = StepSpec([1.0, 2.0], [1.0, -1.0])
    target = vessel_rate_target(VesselSpec(spec, 0.05, 0.05))
    np.testing.assert_allclose(target["I"], 17 * np.pi ** 2 / 32, rtol=1e-12)
    assert len(target["blocks"]) == 10
    np.testing.assert_allclose(
        target["rate"], -sum(b["cost"] for b in target["blocks"]), rtol=1e-12
    )
    tiny = vessel_rate_target(VesselSpec(spec, 1e-4, 1e-4))
    np.testing.assert_allclose(-tiny["rate"], tiny["I"], rtol=1e-3)


def test_rate_gap_shrinks_with_delta_and_eps():
    spec = StepSpec([1.0, 2.0], [1.0, -1.0])
    gaps = []
    for delta, eps in [(0.1, 0.05), (0.05, 0.025), (0.025, 0.0125)]:
        target = vessel_rate_target(VesselSpec(spec, delta, eps))
        gaps.append(abs(target["rate"] + target["I"]))
    assert gaps[0] > gaps[1] > gaps[2]


def test_vessel_program(vspec):
    right = vessel_program(vspec, 1, 100.0)
    assert [s.name for s in right.segments] == ["E0:C", "E0:B", "E1:C", "E1:H", "E1:B"]
    assert right.duration == pytest.approx(105.0)
    left = vessel_program(vspec, -1, 100.0)
    assert [s.mode for s in left.segments][2:] == ["reflected"] * 3
    assert default_M_grid(vspec) == [300, 600, 1200]


def test_mc_vessel_prob_rejects_bad_scales(vspec):
    with pytest.raises(ValueError):
        mc_vessel_prob(vspec, [100.0], 10, RandomStream(0))
    with pytest.raises(ValueError):
        mc_vessel_prob(vspec, [1e5, 2e5], 10, RandomStream(0))


@pytest.mark.slow
def test_mc_vessel_prob_within_band():
    vspec = VesselSpec(StepSpec([1.0], [1.0]), 0.05, 0.05)
    fit, summary = mc_vessel_prob(
        vspec, [100, 150, 200], 500, RandomStream(0, "vessel"),
        method="splitting", n_replicates=4,
    )
    assert summary["I"] == pytest.approx(np.pi ** 2 / 8)
    assert summary["within_band"]
    assert fit.variable == "M"

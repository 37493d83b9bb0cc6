# -*- coding: utf-8 -*-

# Copyright 2025 The sinailab Authors
#  MIT License (https://opensource.org/licenses/MIT)

"""Restriction sets of paths whose process of wells follows a step spec.

A vessel is the intersection of events E_0, E_1, .., E_N, each a chain of
blocks on one wing of the path:

    C(x, y, h)  on [x (1 + delta), y (1 - delta)]: f stays in [-eps^2 h, h];
    H(y, h)     on [y (1 - delta), y]: f stays in [-eps h, h] and visits
                below -eps h + eps^2 h;
    B(y, h)     on [y, y (1 + delta)]: f stays in [-eps^2 h, h (1 + eps)]
                and visits above h.

E_0 puts a confinement and a barrier on both sides of the origin. For an
index off the final run of constant sign, E_i = C(w_i, x_i, h_i) H(x_i, h_i)
B(x_i, h_{i^+}). On the final run the blocks RC, HR and RB constrain the
path reflected from its running minimum after w_q (1 + delta), and f may not
rise more than eps^2 above its value at w_i (1 + delta). Every block ends
with its observed process in [0, h - eps h].

Times are absolute distances from the origin; the side says which wing.
"""

from dataclasses import dataclass

import numpy as np

from sinailab.confinement.montecarlo import block_cost_rate
from sinailab.occupation.step import StepSpec
from sinailab.rate.rate import rate_of_spec

__all__ = ["InfeasibleGeometryError", "Block", "VesselSpec", "vessel_rate_target"]


class InfeasibleGeometryError(RuntimeError):
    """The block geometry of a vessel cannot be realized for (h, x, delta, eps)."""


@dataclass(frozen=True)
class Block:
    """One block of a vessel event.

    Args:
        event (int): Index i of E_i (0 for the start).
        kind (str): "C", "H", "B" or the reflected "RC", "HR", "RB".
        side (int): +1 for the right wing, -1 for the left wing.
        t0 (float): Start, as a distance from the origin.
        t1 (float): End, as a distance from the origin.
        h (float): Height; the barrier height for B and RB.
        eps (float): Margin parameter.
        anchor (bool): Starts a stretch where f - f(t0) <= eps^2.
        reset (bool): The reflection starts at t0.

    """

    event: int
    kind: str
    side: int
    t0: float
    t1: float
    h: float
    eps: float
    anchor: bool = False
    reset: bool = False

    @property
    def reflected(self):
        return self.kind in ("RC", "HR", "RB")

    @property
    def duration(self):
        return self.t1 - self.t0

    @property
    def lo(self):
        if self.reflected:
            return 0.0
        if self.kind == "H":
            return -self.eps * self.h
        return -self.eps ** 2 * self.h

    @property
    def hi(self):
        if self.kind in ("B", "RB"):
            return self.h * (1 + self.eps)
        return self.h

    @property
    def vis_lo(self):
        if self.kind == "H":
            return -self.eps * self.h + self.eps ** 2 * self.h
        if self.kind == "HR":
            return 0.0
        return None

    @property
    def vis_hi(self):
        return self.h if self.kind in ("B", "RB") else None

    @property
    def end_window(self):
        return 0.0, self.h * (1 - self.eps)

    @property
    def cap(self):
        return self.eps ** 2 if self.reflected else np.inf

    def cost(self):
        """Decay rate of the block in M."""
        return block_cost_rate(self.kind, self.h, self.eps) * self.duration

    @property
    def name(self):
        return f"E{self.event}:{self.kind}"

    def to_dict(self):
        return {
            "event": self.event,
            "kind": self.kind,
            "side": self.side,
            "t0": self.t0,
            "t1": self.t1,
            "h": self.h,
            "cost": self.cost(),
        }


@dataclass(frozen=True, eq=False)
class VesselSpec:
    """A step spec together with the vessel parameters delta and eps.

    Args:
        spec (StepSpec): Target step function.
        delta (float): Relative block length in (0, 1).
        eps (float): Margin in (0, mesh / 2).

    Raises:
        InfeasibleGeometryError: If some block is empty or the depth
            brackets of consecutive wells overlap.

    """

    spec: StepSpec
    delta: float
    eps: float

    def __post_init__(self):
        if self.spec.N == 0:
            raise ValueError("a vessel needs a non-empty step spec")
        if not 0 < self.delta < 1:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if not 0 < self.eps < 1:
            raise ValueError(f"eps must lie in (0, 1), got {self.eps}")
        object.__setattr__(self, "delta", float(self.delta))
        object.__setattr__(self, "eps", float(self.eps))
        self._check_geometry()

    def _check_geometry(self):
        spec, eps = self.spec, self.eps
        if not eps < spec.mesh / 2:
            raise InfeasibleGeometryError(f"eps={eps} is not below mesh / 2 = {spec.mesh / 2}")
        tail = set(spec.tail_indices)
        for i in spec.indices:
            if i in tail:
                continue
            h_i, h_prev = spec.h_at(i), spec.h_at(i - 1)
            if not -eps * h_i + eps ** 2 * h_i < -eps * h_prev:
                raise InfeasibleGeometryError(
                    f"the hole of index {i} is not deeper than the hole of index {i - 1}"
                )
        brackets = self.depth_brackets()
        for i in range(1, spec.N):
            if not brackets[i - 1][1] < brackets[i][0]:
                raise InfeasibleGeometryError(
                    f"depth brackets of indices {i} and {i + 1} overlap: "
                    f"{brackets[i - 1]} and {brackets[i]}"
                )
        for block in self.blocks():
            if not block.duration > 0:
                raise InfeasibleGeometryError(
                    f"block {block.name} on side {block.side:+d} is empty "
                    f"([{block.t0:g}, {block.t1:g}])"
                )

    @property
    def first_of_other_sign(self):
        """alpha v beta: the first index whose sign differs from x_1."""
        return max(self.spec.alpha, self.spec.beta)

    def w(self, i):
        """w_i = x_{i^-}, or x_i delta for the first index of each sign."""
        spec = self.spec
        prev = spec.prev_same(i)
        if prev == 0:
            return spec.x_at(i) * self.delta
        return spec.x_at(prev)

    def blocks(self):
        """All blocks, in the order E_0, E_1, .., E_N."""
        spec, d, eps = self.spec, self.delta, self.eps
        out = []
        for first in (spec.alpha, spec.beta):
            x, h = spec.x_at(first), spec.h_at(first)
            side, ax = int(np.sign(x)), abs(x)
            out.append(Block(0, "C", side, 0.0, ax * d, h, eps))
            out.append(Block(0, "B", side, ax * d, ax * d * (1 + d), h, eps))
        tail = spec.tail_indices
        for i in spec.indices:
            x, h = spec.x_at(i), spec.h_at(i)
            h_next = spec.h_at(spec.next_same(i))
            side, ax, aw = int(np.sign(x)), abs(x), abs(self.w(i))
            if i in tail:
                out.append(
                    Block(i, "RC", side, aw * (1 + d), ax * (1 - d), h, eps,
                          anchor=True, reset=i == tail[0])
                )
                out.append(Block(i, "HR", side, ax * (1 - d), ax, h, eps))
                out.append(Block(i, "RB", side, ax, ax * (1 + d), h_next, eps))
            else:
                out.append(Block(i, "C", side, aw * (1 + d), ax * (1 - d), h, eps))
                out.append(Block(i, "H", side, ax * (1 - d), ax, h, eps))
                out.append(Block(i, "B", side, ax, ax * (1 + d), h_next, eps))
        return out

    def side_blocks(self, side):
        """Blocks of one wing in time order."""
        return sorted(
            (b for b in self.blocks() if b.side == side), key=lambda b: b.t0
        )

    def extent(self, side):
        blocks = self.side_blocks(side)
        return max(b.t1 for b in blocks) if blocks else 0.0

    def depth_brackets(self):
        """Intervals [lo, hi] that contain the well depths v_1 .. v_N."""
        spec, eps = self.spec, self.eps
        tail = set(spec.tail_indices)
        out = []
        for i in spec.indices:
            h_i, h_prev = spec.h_at(i), spec.h_at(i - 1)
            if i == 1:
                h_ab = spec.h_at(self.first_of_other_sign)
                out.append((h_i, h_i + eps * (h_i + eps * h_ab)))
            elif spec.prev_same(i) in tail:
                out.append((h_i, h_i + eps * h_i))
            else:
                out.append((h_i + (eps - eps ** 2) * h_prev, h_i + eps * (h_i + h_prev)))
        return out

    def closeness_bound(self):
        """Upper bound on the Skorokhod distance of x_f to Phi on [0, 2 h_N]."""
        spec, d = self.spec, self.delta
        shift = 2 * self.eps * float(spec.h[-1]) * (1 + self.eps)
        return max(shift, d * (1 + d) * float(np.max(np.abs(spec.x))))

    def to_dict(self):
        return {"spec": self.spec.to_dict(), "delta": self.delta, "eps": self.eps}

    @classmethod
    def from_dict(cls, d):
        return cls(StepSpec.from_dict(d["spec"]), d["delta"], d["eps"])


def vessel_rate_target(vspec):
    """Exact limit of M^-1 log P(B(M .) in the vessel) and its parts.

    Returns:
        dict: "rate" (the sum of minus the block costs), "I" (the rate
            function of the spec) and "blocks" (per-block costs).

    """
    blocks = vspec.blocks()
    return {
        "rate": -float(sum(b.cost() for b in blocks)),
        "I": rate_of_spec(vspec.spec).value,
        "blocks": [b.to_dict() for b in blocks],
    }

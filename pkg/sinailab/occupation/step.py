# -*- coding: utf-8 -*-

# Copyright 2025 The sinailab Authors
#  MIT License (https://opensource.org/licenses/MIT)

"""Step specifications and left-continuous step functions.

Indices of a StepSpec are 1-based. Index 0 is the start (h_0 = 0, x_0 = 0) and
index N + 1 stands for infinity (h = 2 h_N, x = -x_1).
"""

from dataclasses import dataclass

import numpy as np

__all__ = ["StepSpec", "StepFunction", "spec_from_function"]


@dataclass(frozen=True, eq=False)
class StepFunction:
    """A left-continuous step function on [0, inf).

    The value is `initial` on [0, times[0]], levels[k] on
    (times[k], times[k + 1]] and levels[-1] after times[-1].

    Args:
        times (ndarray): Strictly increasing jump times (>= 0).
        levels (ndarray): Value after each jump.
        initial (float): Value before the first jump.
        horizon (float): Right end of the domain of interest, if any.

    """

    times: np.ndarray
    levels: np.ndarray
    initial: float = 0.0
    horizon: float = None

    def __post_init__(self):
        times = np.array(self.times, dtype=np.float64).reshape(-1)
        levels = np.array(self.levels, dtype=np.float64).reshape(-1)
        if len(times) != len(levels):
            raise ValueError(
                f"got {len(times)} jump times but {len(levels)} levels"
            )
        if np.any(times < 0) or np.any(np.diff(times) <= 0):
            raise ValueError("jump times must be non-negative and strictly increasing")
        if self.horizon is not None and not self.horizon > 0:
            raise ValueError(f"horizon must be positive, got {self.horizon}")
        times.setflags(write=False)
        levels.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "initial", float(self.initial))

    @classmethod
    def zero(cls, horizon=None):
        return cls([], [], 0.0, horizon)

    def __len__(self):
        return len(self.times)

    def __call__(self, t):
        t = np.asarray(t, dtype=np.float64)
        k = np.searchsorted(self.times, t, side="left") - 1
        padded = np.concatenate([[self.initial], self.levels])
        return padded[k + 1]

    def right_limit(self, t):
        """f(t+), the value just after t."""
        t = np.asarray(t, dtype=np.float64)
        k = np.searchsorted(self.times, t, side="right") - 1
        padded = np.concatenate([[self.initial], self.levels])
        return padded[k + 1]

    def jumps(self):
        """(times, sizes) of the nonzero jumps."""
        before = np.concatenate([[self.initial], self.levels[:-1]])
        sizes = self.levels - before
        keep = sizes != 0
        return self.times[keep], sizes[keep]

    def is_nondecreasing(self):
        return bool(np.all(np.diff(np.concatenate([[self.initial], self.levels])) >= 0))

    def pieces(self, horizon=None):
        """Maximal constant pieces (t0, t1, level) covering [0, horizon].

        Pieces of equal level are merged and jumps at or after the horizon
        are dropped.
        """
        horizon = self.horizon if horizon is None else horizon
        if horizon is None or not horizon > 0:
            raise ValueError(f"horizon must be positive, got {horizon}")
        inside = self.times < horizon
        edges = np.concatenate([[0.0], self.times[inside], [horizon]])
        values = np.concatenate([[self.initial], self.levels[inside]])
        out = []
        for t0, t1, v in zip(edges[:-1], edges[1:], values):
            if t1 <= t0:
                continue
            if out and out[-1][2] == v:
                out[-1] = (out[-1][0], float(t1), out[-1][2])
            else:
                out.append((float(t0), float(t1), float(v)))
        return out

    def scaled(self, time_scale, level_scale):
        """t -> level_scale * f(t / time_scale)."""
        horizon = None if self.horizon is None else self.horizon * time_scale
        return StepFunction(
            self.times * time_scale,
            self.levels * level_scale,
            self.initial * level_scale,
            horizon,
        )

    def to_dict(self):
        return {
            "times": self.times.tolist(),
            "levels": self.levels.tolist(),
            "initial": self.initial,
            "horizon": self.horizon,
        }


@dataclass(frozen=True, eq=False)
class StepSpec:
    """A step specification (h, x) in the class of sign-monotone step functions.

    Args:
        h (ndarray): Strictly increasing positive depths h_1 .. h_N.
        x (ndarray): Nonzero locations x_1 .. x_N, with |x| nondecreasing
            along indices of the same sign.

    """

    h: np.ndarray
    x: np.ndarray

    def __post_init__(self):
        h = np.array(self.h, dtype=np.float64).reshape(-1)
        x = np.array(self.x, dtype=np.float64).reshape(-1)
        if len(h) != len(x):
            raise ValueError(f"got {len(h)} depths but {len(x)} locations")
        if np.any(h <= 0) or np.any(np.diff(h) <= 0):
            raise ValueError(f"depths must be positive and strictly increasing, got {h}")
        if np.any(x == 0):
            raise ValueError(f"locations must be nonzero, got {x}")
        for sign in (1.0, -1.0):
            same = np.abs(x[np.sign(x) == sign])
            if np.any(np.diff(same) < 0):
                raise ValueError(
                    f"|x| must be nondecreasing along indices of the same sign, got {x}"
                )
        h.setflags(write=False)
        x.setflags(write=False)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "x", x)

    @property
    def N(self):
        return len(self.h)

    @property
    def inf(self):
        """Index standing for infinity."""
        return self.N + 1

    @property
    def indices(self):
        return list(range(1, self.N + 1))

    def h_at(self, i):
        if i == 0:
            return 0.0
        if i == self.inf:
            return 2.0 * float(self.h[-1])
        return float(self.h[i - 1])

    def x_at(self, i):
        if i == 0:
            return 0.0
        if i == self.inf:
            return -float(self.x[0])
        return float(self.x[i - 1])

    def sign(self, i):
        return int(np.sign(self.x_at(i)))

    def prev_same(self, i):
        """i^-: the previous index with the sign of x_i, or 0."""
        for j in range(i - 1, 0, -1):
            if self.sign(j) == self.sign(i):
                return j
        return 0

    def next_same(self, i):
        """i^+: the next index with the sign of x_i, or infinity."""
        for j in range(i + 1, self.N + 1):
            if self.sign(j) == self.sign(i):
                return j
        return self.inf

    @property
    def alpha(self):
        """First index with a positive location."""
        pos = np.nonzero(self.x > 0)[0]
        return int(pos[0]) + 1 if len(pos) else self.inf

    @property
    def beta(self):
        """First index with a negative location."""
        neg = np.nonzero(self.x < 0)[0]
        return int(neg[0]) + 1 if len(neg) else self.inf

    @property
    def tail_indices(self):
        """The final run of indices of constant sign."""
        if self.N == 0:
            return []
        q = self.N
        while q > 1 and self.sign(q - 1) == self.sign(self.N):
            q -= 1
        return list(range(q, self.N + 1))

    @property
    def q(self):
        tail = self.tail_indices
        return tail[0] if tail else self.inf

    @property
    def mesh(self):
        if self.N == 0:
            return np.inf
        return float(np.min(np.diff(np.concatenate([[0.0], self.h]))))

    def increments(self):
        """|x_i - x_{i^-}| for every index."""
        return np.array(
            [abs(self.x_at(i) - self.x_at(self.prev_same(i))) for i in self.indices]
        )

    def scaled(self, a):
        """The spec of the rescaled measure: depths times a, locations times a^2."""
        if not a > 0:
            raise ValueError(f"scale must be positive, got {a}")
        return StepSpec(self.h * a, self.x * a * a)

    def phi(self, horizon=None):
        """The step function 0 on [0, h_1], x_i on (h_i, h_{i+1}]."""
        return StepFunction(self.h, self.x, 0.0, horizon)

    def __repr__(self):
        return f"StepSpec(h={self.h.tolist()}, x={self.x.tolist()})"

    def to_dict(self):
        return {"h": self.h.tolist(), "x": self.x.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(d["h"], d["x"])


def spec_from_function(phi):
    """StepSpec of a step function that starts at 0.

    Args:
        phi (StepFunction): Function with initial value 0 and nonzero levels.

    Returns:
        StepSpec: Its (h, x) description.

    """
    if phi.initial != 0.0:
        raise ValueError(f"function must start at 0, got {phi.initial}")
    times, levels = phi.times, phi.levels
    changed = np.concatenate([[levels[0] != 0.0], np.diff(levels) != 0]) if len(levels) else []
    return StepSpec(times[changed], levels[changed])

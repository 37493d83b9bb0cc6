# -*- coding: utf-8 -*-

# Copyright 2025 The sinailab Authors
#  MIT License (https://opensource.org/licenses/MIT)

"""Two-sided grid paths.

A GridPath is a real path on the uniform grid t_k = k * dt, k = -left_n..right_n,
pinned at the origin and evaluated between grid points by linear
interpolation.
"""

import logging
import struct
from dataclasses import dataclass

import numpy as np

from sinailab.utils import RandomStream, atomic_open, read_csv, write_csv

__all__ = [
    "GridPath",
    "sample_brownian",
    "write_path",
    "read_path",
    "write_path_csv",
    "read_path_csv",
]

PATH_MAGIC = b"SINP"
PATH_VERSION = 1
_HEADER = struct.Struct("<4sIdQQ")

# cells per counter block when drawing a wing
_WING_BLOCK = 4096


@dataclass(frozen=True, eq=False)
class GridPath:
    """Piecewise-linear path on a uniform two-sided grid.

    Args:
        dt (float): Grid spacing.
        left_n (int): Number of cells left of 0.
        right_n (int): Number of cells right of 0.
        values (ndarray): Values at the left_n + right_n + 1 grid points.

    """

    dt: float
    left_n: int
    right_n: int
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.left_n < 0 or self.right_n < 0:
            raise ValueError(
                f"cell counts must be non-negative, got {self.left_n}, {self.right_n}"
            )
        if values.ndim != 1 or len(values) != self.left_n + self.right_n + 1:
            raise ValueError(
                f"expected {self.left_n + self.right_n + 1} values, got {values.shape}"
            )
        if values[self.left_n] != 0.0:
            raise ValueError(
                f"path must be pinned at the origin, got value {values[self.left_n]}"
            )
        values.setflags(write=False)
        object.__setattr__(self, "dt", float(self.dt))
        object.__setattr__(self, "left_n", int(self.left_n))
        object.__setattr__(self, "right_n", int(self.right_n))
        object.__setattr__(self, "values", values)

    @classmethod
    def from_values(cls, values, dt=1.0, origin=None):
        """Build a path from raw grid values, re-pinning it at `origin`.

        Args:
            values (array-like): Grid values from left to right.
            dt (float): Grid spacing.
            origin (int): Index of t = 0. Defaults to the middle point.

        """
        values = np.asarray(values, dtype=np.float64)
        if origin is None:
            origin = (len(values) - 1) // 2
        if not 0 <= origin < len(values):
            raise ValueError(f"origin index {origin} outside 0..{len(values) - 1}")
        return cls(dt, origin, len(values) - 1 - origin, values - values[origin])

    @property
    def n_points(self):
        return len(self.values)

    @property
    def t_min(self):
        return -self.left_n * self.dt

    @property
    def t_max(self):
        return self.right_n * self.dt

    @property
    def times(self):
        return (np.arange(self.n_points) - self.left_n) * self.dt

    def __call__(self, t):
        return np.interp(t, self.times, self.values)

    def index(self, t, side="left"):
        """Grid index of `t`: floor for side="left", ceil for side="right"."""
        x = (np.asarray(t, dtype=np.float64) / self.dt) + self.left_n
        # absorb round-off so that grid times map onto their own index
        x = np.where(np.abs(x - np.rint(x)) < 1e-9, np.rint(x), x)
        k = np.floor(x) if side == "left" else np.ceil(x)
        return np.clip(k, 0, self.n_points - 1).astype(np.int64)

    def covers(self, t0, t1):
        eps = 1e-9 * self.dt
        return self.t_min - eps <= min(t0, t1) and max(t0, t1) <= self.t_max + eps

    def window(self, t0, t1):
        """Values of the interpolated path at t0, t1 and every grid point between."""
        if t0 > t1:
            t0, t1 = t1, t0
        k0 = int(self.index(t0, side="right"))
        k1 = int(self.index(t1, side="left"))
        inner = self.values[k0 : k1 + 1] if k1 >= k0 else np.empty(0)
        return np.concatenate([[self(t0)], inner, [self(t1)]])

    def extrema(self, t0, t1):
        """(min, max) of the interpolated path on [t0, t1]."""
        w = self.window(t0, t1)
        return float(w.min()), float(w.max())

    def mirror(self):
        """The path t -> f(-t)."""
        return GridPath(self.dt, self.right_n, self.left_n, self.values[::-1].copy())

    def rescale(self, c):
        """The path t -> c f(t / c^2), represented exactly on a c^2 dt grid."""
        if not c > 0:
            raise ValueError(f"scale must be positive, got {c}")
        return GridPath(self.dt * c * c, self.left_n, self.right_n, c * self.values)

    def side(self, sign):
        """One wing as an array indexed by |t| / dt, starting at the origin."""
        if sign > 0:
            return self.values[self.left_n :]
        return self.values[: self.left_n + 1][::-1]

    def __repr__(self):
        return (
            f"GridPath(dt={self.dt}, left_n={self.left_n}, right_n={self.right_n})"
        )


def _wing_increments(stream, n, wing):
    """Gaussian cell increments of one wing, drawn in counter blocks.

    Block b of the right wing uses counter 2b, of the left wing 2b + 1, so a
    longer wing extends a shorter one drawn from the same stream.
    """
    chunks = []
    for b in range(-(-n // _WING_BLOCK)):
        gen = stream.generator(2 * b + wing)
        chunks.append(gen.standard_normal(_WING_BLOCK))
    if len(chunks) == 0:
        return np.empty(0)
    return np.concatenate(chunks)[:n]


def sample_brownian(dt, left_n, right_n, rng):
    """Sample a two-sided Brownian path pinned at 0.

    Args:
        dt (float): Grid spacing.
        left_n (int): Number of cells left of 0.
        right_n (int): Number of cells right of 0.
        rng (RandomStream or numpy.random.Generator): Source of randomness.

    Returns:
        GridPath: Sampled path.

    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if left_n < 0 or right_n < 0:
        raise ValueError(f"cell counts must be non-negative, got {left_n}, {right_n}")
    if isinstance(rng, RandomStream):
        right = _wing_increments(rng, right_n, 0)
        left = _wing_increments(rng, left_n, 1)
    else:
        right = rng.standard_normal(right_n)
        left = rng.standard_normal(left_n)
    scale = np.sqrt(dt)
    right = np.concatenate([[0.0], np.cumsum(right) * scale])
    left = np.concatenate([[0.0], np.cumsum(left) * scale])
    values = np.concatenate([left[::-1], right[1:]])
    return GridPath(dt, left_n, right_n, values)


def write_path(path, filename):
    """Write the binary path format: SINP header then little-endian f64 values."""
    header = _HEADER.pack(
        PATH_MAGIC, PATH_VERSION, path.dt, path.left_n, path.right_n
    )
    with atomic_open(filename, "wb") as f:
        f.write(header)
        f.write(np.ascontiguousarray(path.values, dtype="<f8").tobytes())


def read_path(filename):
    with open(filename, "rb") as f:
        raw = f.read()
    if len(raw) < _HEADER.size:
        raise ValueError(f"{filename} is too short to hold a path header")
    magic, version, dt, left_n, right_n = _HEADER.unpack_from(raw)
    if magic != PATH_MAGIC:
        raise ValueError(f"{filename} is not a path file (magic {magic!r})")
    if version != PATH_VERSION:
        raise ValueError(f"unsupported path file version {version}")
    values = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    logging.debug(f"Read path with {len(values)} points from {filename}.")
    return GridPath(dt, left_n, right_n, values.astype(np.float64))


def write_path_csv(path, filename):
    rows = [{"t": repr(float(t)), "value": repr(float(v))} for t, v in zip(path.times, path.values)]
    write_csv(rows, filename, fieldnames=["t", "value"])


def read_path_csv(filename):
    rows, _ = read_csv(filename, dict_reader=True)
    times = np.array([float(r["t"]) for r in rows])
    values = np.array([float(r["value"]) for r in rows])
    if len(times) < 2:
        raise ValueError(f"{filename} holds fewer than two points")
    dt = times[1] - times[0]
    origin = int(np.argmin(np.abs(times)))
    return GridPath(dt, origin, len(values) - 1 - origin, values)

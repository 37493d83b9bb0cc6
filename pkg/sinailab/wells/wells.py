# -*- coding: utf-8 -*-

# Copyright 2025 The sinailab Authors
#  MIT License (https://opensource.org/licenses/MIT)

"""Wells of a grid path and the process of wells.

For a strict local minimum x0 of f, its well [a, c] is the maximal interval on
which f(x0) is the minimum, f(a) is the maximum of f on [a, x0] and f(c) the
maximum on [x0, c]. The depth is min(f(a), f(c)) - f(x0). The process of
wells x_f(h) is the smallest minimiser of the minimal well of depth at least h
that contains the origin, or 0 if there is none.

On a grid path every extremum sits on a grid point, so the whole computation
runs on the value array. A flat bottom is represented by its leftmost point.
"""

import logging
from dataclasses import dataclass

import numpy as np
from numba import njit

__all__ = [
    "Well",
    "WellProcess",
    "enumerate_wells",
    "well_of",
    "wells_process",
    "wells_bruteforce",
    "x_scaling_check",
]


@dataclass(frozen=True)
class Well:
    """A well of a grid path (times in path units).

    Args:
        a (float): Left end.
        c (float): Right end.
        bottom (float): Location of the minimum.
        depth (float): min(f(a), f(c)) - f(bottom).
        truncated (bool): The depth is limited by a side that runs into the
            path boundary, so it is only a lower bound.

    """

    a: float
    c: float
    bottom: float
    depth: float
    truncated: bool = False

    def contains(self, t):
        return self.a <= t <= self.c

    @property
    def length(self):
        return self.c - self.a


@dataclass(frozen=True, eq=False)
class WellProcess:
    """The left-continuous step function h -> x_f(h).

    x(h) = 0 for h <= depths[0], x(h) = locations[k] for h in
    (depths[k], depths[k + 1]] with depths[K] = max_depth, and x(h) = 0 beyond
    max_depth. The first jump may sit at depth 0.

    Args:
        depths (ndarray): Strictly increasing jump depths.
        locations (ndarray): Value after each jump.
        max_depth (float): Depth of the deepest well containing the origin.
        resolved_depth (float): Largest depth not affected by truncated wells.

    """

    depths: np.ndarray
    locations: np.ndarray
    max_depth: float = np.inf
    resolved_depth: float = np.inf

    def __post_init__(self):
        depths = np.array(self.depths, dtype=np.float64).reshape(-1)
        locations = np.array(self.locations, dtype=np.float64).reshape(-1)
        if len(depths) != len(locations):
            raise ValueError("depths and locations must have the same length")
        if np.any(depths < 0) or np.any(np.diff(depths) <= 0):
            raise ValueError("depths must be non-negative and strictly increasing")
        max_depth = float(self.max_depth) if len(depths) else 0.0
        if len(depths) and not max_depth > depths[-1]:
            raise ValueError(
                f"max_depth {max_depth} must exceed the last jump {depths[-1]}"
            )
        depths.setflags(write=False)
        locations.setflags(write=False)
        object.__setattr__(self, "depths", depths)
        object.__setattr__(self, "locations", locations)
        object.__setattr__(self, "max_depth", max_depth)
        object.__setattr__(
            self, "resolved_depth", float(min(self.resolved_depth, max_depth))
        )

    def __len__(self):
        return len(self.depths)

    def __call__(self, h):
        h = np.asarray(h, dtype=np.float64)
        if len(self.depths) == 0:
            return np.zeros_like(h)
        k = np.searchsorted(self.depths, h, side="left") - 1
        out = self.locations[np.clip(k, 0, None)]
        return np.where((k < 0) | (h <= 0) | (h > self.max_depth), 0.0, out)

    @property
    def piece_ends(self):
        """Right end of every constant piece."""
        return np.concatenate([self.depths[1:], [self.max_depth]])

    def mirror(self):
        return WellProcess(
            self.depths, -self.locations, self.max_depth, self.resolved_depth
        )

    def scaled(self, c):
        """Process of c f(t / c^2): depths times c, locations times c^2."""
        return WellProcess(
            c * self.depths,
            c * c * self.locations,
            c * self.max_depth,
            c * self.resolved_depth,
        )

    def is_sign_monotone(self):
        """|x| is nondecreasing along pieces of the same sign."""
        for sign in (1.0, -1.0):
            same = self.locations[np.sign(self.locations) == sign]
            if np.any(np.diff(np.abs(same)) < 0):
                return False
        return True

    def to_rows(self):
        return [
            {"h": float(h), "h_end": float(e), "x": float(x)}
            for h, e, x in zip(self.depths, self.piece_ends, self.locations)
        ]

    def to_dict(self):
        return {
            "depths": self.depths.tolist(),
            "locations": self.locations.tolist(),
            "max_depth": self.max_depth,
            "resolved_depth": self.resolved_depth,
        }


@njit(cache=True)
def _local_minima(v):
    # leftmost point of every flat stretch that is strictly lower than both
    # of its neighbours; boundary points never qualify
    n = len(v)
    out = np.empty(n, dtype=np.int64)
    m = 0
    k = 1
    while k < n - 1:
        if v[k] < v[k - 1]:
            j = k
            while j + 1 < n and v[j + 1] == v[k]:
                j += 1
            if j + 1 < n and v[j + 1] > v[k]:
                out[m] = k
                m += 1
            k = j + 1
        else:
            k += 1
    return out[:m]


@njit(cache=True)
def _smaller_neighbours(v):
    # nearest strictly smaller sample on each side, -1 / n when there is none
    n = len(v)
    prev = np.empty(n, dtype=np.int64)
    nxt = np.empty(n, dtype=np.int64)
    stack = np.empty(n, dtype=np.int64)
    top = 0
    for i in range(n):
        while top > 0 and v[stack[top - 1]] >= v[i]:
            top -= 1
        prev[i] = stack[top - 1] if top > 0 else -1
        stack[top] = i
        top += 1
    top = 0
    for i in range(n - 1, -1, -1):
        while top > 0 and v[stack[top - 1]] >= v[i]:
            top -= 1
        nxt[i] = stack[top - 1] if top > 0 else n
        stack[top] = i
        top += 1
    return prev, nxt


@njit(cache=True)
def _sparse_argmax(v, rightmost):
    n = len(v)
    levels = 1
    while (1 << levels) <= n:
        levels += 1
    table = np.empty((levels, n), dtype=np.int64)
    for i in range(n):
        table[0, i] = i
    for k in range(1, levels):
        half = 1 << (k - 1)
        for i in range(n - (1 << k) + 1):
            p = table[k - 1, i]
            q = table[k - 1, i + half]
            if rightmost:
                table[k, i] = q if v[q] >= v[p] else p
            else:
                table[k, i] = p if v[p] >= v[q] else q
    return table


@njit(cache=True)
def _query_argmax(v, table, lo, hi, rightmost):
    k = 0
    while (1 << (k + 1)) <= hi - lo + 1:
        k += 1
    p = table[k, lo]
    q = table[k, hi - (1 << k) + 1]
    if rightmost:
        return q if v[q] >= v[p] else p
    return p if v[p] >= v[q] else q


@njit(cache=True)
def _well_table(v):
    bottoms = _local_minima(v)
    prev, nxt = _smaller_neighbours(v)
    left_table = _sparse_argmax(v, False)
    right_table = _sparse_argmax(v, True)
    n = len(v)
    m = len(bottoms)
    a = np.empty(m, dtype=np.int64)
    c = np.empty(m, dtype=np.int64)
    left_open = np.empty(m, dtype=np.bool_)
    right_open = np.empty(m, dtype=np.bool_)
    for j in range(m):
        k = bottoms[j]
        a[j] = _query_argmax(v, left_table, prev[k] + 1, k, False)
        c[j] = _query_argmax(v, right_table, k, nxt[k] - 1, True)
        left_open[j] = prev[k] < 0
        right_open[j] = nxt[k] >= n
    return bottoms, a, c, left_open, right_open


def _wells_bruteforce_table(v):
    """Same table as _well_table, by direct scans of the definitions."""
    n = len(v)
    rows = []
    for k in range(1, n - 1):
        if not v[k] < v[k - 1]:
            continue
        j = k
        while j + 1 < n and v[j + 1] == v[k]:
            j += 1
        if j + 1 >= n or not v[j + 1] > v[k]:
            continue
        lower_left = np.nonzero(v[:k] < v[k])[0]
        lower_right = np.nonzero(v[k + 1 :] < v[k])[0]
        lo = lower_left[-1] + 1 if len(lower_left) else 0
        hi = k + lower_right[0] if len(lower_right) else n - 1
        left = v[lo : k + 1]
        right = v[k : hi + 1]
        a = lo + int(np.nonzero(left == left.max())[0][0])
        c = k + int(np.nonzero(right == right.max())[0][-1])
        rows.append((k, a, c, len(lower_left) == 0, len(lower_right) == 0))
    if len(rows) == 0:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty, empty, empty.astype(bool), empty.astype(bool)
    return tuple(np.array(col) for col in zip(*rows))


def enumerate_wells(path, method="fast"):
    """Every well of the path.

    Args:
        path (GridPath): Path.
        method (str): "fast" (monotone stacks and range-maximum tables) or
            "bruteforce" (linear scans per minimum).

    Returns:
        list: Wells ordered by bottom.

    """
    v = np.ascontiguousarray(path.values)
    if method == "fast":
        bottoms, a, c, left_open, right_open = _well_table(v)
    elif method == "bruteforce":
        bottoms, a, c, left_open, right_open = _wells_bruteforce_table(v)
    else:
        raise ValueError(f"unknown method {method!r}")
    wells = []
    for k, ka, kc, lo, ro in zip(bottoms, a, c, left_open, right_open):
        left_rise = v[ka] - v[k]
        right_rise = v[kc] - v[k]
        depth = min(left_rise, right_rise)
        truncated = bool((lo and left_rise <= right_rise) or (ro and right_rise <= left_rise))
        wells.append(
            Well(
                a=float((ka - path.left_n) * path.dt),
                c=float((kc - path.left_n) * path.dt),
                bottom=float((k - path.left_n) * path.dt),
                depth=float(depth),
                truncated=truncated,
            )
        )
    return wells


def well_of(path, x0):
    """The well of the local minimum at x0.

    Args:
        path (GridPath): Path.
        x0 (float): Grid location of a strict local minimum.

    Returns:
        Well: Its well; `truncated` flags a depth that is only a lower bound.

    """
    k = int(np.rint(x0 / path.dt)) + path.left_n
    if not 0 <= k < path.n_points or abs((k - path.left_n) * path.dt - x0) > 1e-9 * max(
        1.0, abs(x0)
    ):
        raise ValueError(f"{x0} is not a grid point of {path}")
    v = np.ascontiguousarray(path.values)
    bottoms = _local_minima(v)
    if k not in set(bottoms.tolist()):
        raise ValueError(f"{x0} is not a local minimum of the path")
    for well in enumerate_wells(path):
        if well.bottom == (k - path.left_n) * path.dt:
            return well
    raise RuntimeError(f"no well found at {x0}")


def _process_from_wells(wells, cap=True):
    """Jump list of the process of wells from the wells containing 0.

    Returns:
        tuple: (jump depths, locations, max_depth, resolved depth, uncapped
            max_depth).

    """
    inside = [w for w in wells if w.contains(0.0)]
    inside.sort(key=lambda w: (w.length, w.bottom))
    ends, locations = [], []
    current = 0.0
    resolved = None
    for w in inside:
        if w.truncated and resolved is None:
            resolved = current
        if w.depth > current:
            ends.append(w.depth)
            locations.append(w.bottom)
            current = w.depth
    if resolved is None:
        resolved = current
    reached = ends[-1] if ends else 0.0
    if cap and resolved < reached:
        keep = sum(e <= resolved for e in ends)
        ends, locations = ends[:keep], locations[:keep]
    depths = [0.0] + ends[:-1]
    max_depth = ends[-1] if ends else 0.0
    return depths if ends else [], locations, max_depth, resolved, reached


def wells_process(path, cap=True):
    """Compute the process of wells x_f(h) of a grid path.

    A well that runs into the path boundary only has a lower bound on its
    depth, and a longer path could place a shorter well of that depth around
    the origin. By default the process stops at the largest depth no such
    well can affect.

    Args:
        path (GridPath): Path.
        cap (bool): Cap max_depth at the resolved depth. With False the
            boundary values are read as walls, as for a path that is the
            whole environment.

    Returns:
        WellProcess: Jump list; x(h) = 0 beyond max_depth.

    """
    depths, locations, max_depth, resolved, reached = _process_from_wells(
        enumerate_wells(path), cap
    )
    wp = WellProcess(depths, locations, max_depth, resolved)
    if resolved < reached:
        logging.warning(
            f"Wells resolved up to depth {resolved:.4g} of {reached:.4g} on {path}"
            + ("; max_depth capped." if cap else ".")
        )
    return wp


def wells_bruteforce(path, h, wells=None):
    """x_f(h) by direct enumeration of every well.

    Args:
        path (GridPath): Path.
        h (float): Depth (> 0).
        wells (list): Output of enumerate_wells(path, "bruteforce"), to reuse
            across depths.

    Returns:
        float: Location of the smallest minimiser of the minimal well of
            depth at least h containing 0, or 0.0.

    """
    if not h > 0:
        raise ValueError(f"depth must be positive, got {h}")
    if wells is None:
        wells = enumerate_wells(path, method="bruteforce")
    deep = [w for w in wells if w.depth >= h and w.contains(0.0)]
    if len(deep) == 0:
        return 0.0
    return min(deep, key=lambda w: (w.length, w.bottom)).bottom


def x_scaling_check(path, c, rtol=1e-9):
    """Check x_g(c h) = c^2 x_f(h) for g(t) = c f(t / c^2).

    Args:
        path (GridPath): Path.
        c (float): Scale.
        rtol (float): Relative tolerance on depths and locations.

    Returns:
        bool: Whether both jump lists agree after scaling.

    """
    if not c > 0:
        raise ValueError(f"scale must be positive, got {c}")
    expected = wells_process(path).scaled(c)
    scaled = wells_process(path.rescale(c))
    if len(expected) != len(scaled):
        return False
    return bool(
        np.allclose(scaled.depths, expected.depths, rtol=rtol, atol=0.0)
        and np.allclose(scaled.locations, expected.locations, rtol=rtol, atol=0.0)
        and np.isclose(scaled.max_depth, expected.max_depth, rtol=rtol, atol=0.0)
    )

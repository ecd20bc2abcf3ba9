"""Configurations at p = 1/2 and path/crossing queries.

A configuration assigns one bit per site of the box of radius n (1 = open),
stored row-major from (-n, -n), i.e. ``grid[y + n, x + n]``.  Sampling is a
pure function of ``(master_seed, trial_id)``: the bit stream for a trial is
drawn from a Philox counter generator keyed with exactly those two words, so
trials are independent and reproducible in any execution order.
"""

from __future__ import annotations

from dataclasses import dataclass
from collections import deque
from enum import Enum

import numpy as np
from scipy import ndimage

from .geometry import Rect, Vertex, NEIGHBOR_OFFSETS

# 6-neighbor structuring element, rows indexed by dy, columns by dx.
TRI_STRUCTURE = np.array([[0, 1, 1],
                          [1, 1, 1],
                          [1, 1, 0]], dtype=bool)

OPEN, CLOSED = 1, 0


class EndpointRule(Enum):
    STRICT = "strict"
    EXEMPT_ENDPOINTS = "endpoint-exempt"


@dataclass
class Configuration:
    n: int
    grid: np.ndarray  # uint8, shape (2n+1, 2n+1), grid[y+n, x+n]
    master_seed: int
    trial_id: int

    def __post_init__(self) -> None:
        w = 2 * self.n + 1
        if self.grid.shape != (w, w):
            raise ValueError("grid shape does not match box radius")

    @property
    def width(self) -> int:
        return 2 * self.n + 1

    def state(self, v: Vertex) -> int:
        return int(self.grid[v[1] + self.n, v[0] + self.n])

    def is_open(self, v: Vertex) -> bool:
        return self.state(v) == OPEN

    def in_box(self, v: Vertex) -> bool:
        return max(abs(v[0]), abs(v[1])) <= self.n

    def open_mask(self) -> np.ndarray:
        return self.grid == OPEN

    def closed_mask(self) -> np.ndarray:
        return self.grid == CLOSED

    def point_reflected(self) -> "Configuration":
        """The configuration reflected through the origin.

        (x, y) -> (-x, -y) is the lattice automorphism that swaps top and
        bottom; the plain flip y -> -y does not preserve the diagonal bonds.
        """
        return Configuration(self.n, self.grid[::-1, ::-1].copy(),
                             self.master_seed, self.trial_id)

    def with_state(self, v: Vertex, state: int) -> "Configuration":
        g = self.grid.copy()
        g[v[1] + self.n, v[0] + self.n] = state
        return Configuration(self.n, g, self.master_seed, self.trial_id)


def trial_bit_generator(master_seed: int, trial_id: int) -> np.random.Generator:
    """Per-trial random stream: Philox keyed by (master_seed, trial_id)."""
    key = np.array([master_seed & 0xFFFFFFFFFFFFFFFF,
                    trial_id & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_config(n: int, master_seed: int, trial_id: int) -> Configuration:
    """i.i.d. Bernoulli(1/2) site states on the box of radius n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    w = 2 * n + 1
    g = trial_bit_generator(master_seed, trial_id)
    grid = g.integers(0, 2, size=(w, w), dtype=np.uint8)
    return Configuration(n=n, grid=grid, master_seed=master_seed, trial_id=trial_id)


def config_from_bits(n: int, bits: np.ndarray, master_seed: int = 0,
                     trial_id: int = 0) -> Configuration:
    w = 2 * n + 1
    grid = np.asarray(bits, dtype=np.uint8).reshape(w, w)
    return Configuration(n=n, grid=grid, master_seed=master_seed, trial_id=trial_id)


@dataclass
class PathQuery:
    state: int
    from_set: frozenset[Vertex]
    to_set: frozenset[Vertex]
    region: frozenset[Vertex]
    endpoint_rule: EndpointRule = EndpointRule.STRICT


def _bfs_reach(config: Configuration, seeds: set[Vertex],
               passable, targets: set[Vertex]) -> Vertex | None:
    """First target reached from seeds through passable sites, else None."""
    seen = set(seeds)
    q = deque(seeds)
    while q:
        v = q.popleft()
        if v in targets:
            return v
        x, y = v
        for dx, dy in NEIGHBOR_OFFSETS:
            w = (x + dx, y + dy)
            if w not in seen and (w in targets or passable(w)):
                seen.add(w)
                q.append(w)
    return None


def connected(config: Configuration, q: PathQuery) -> bool:
    """Is there a path from ``from_set`` to ``to_set`` within ``region``?

    STRICT requires the queried state on every path vertex.  The
    endpoint-exempt rule requires it only on interior vertices, which must
    also avoid both endpoint sets; single-vertex paths are allowed whenever
    the two sets meet (no state condition applies in the exempt rule, and the
    state applies to that one vertex under STRICT).
    """
    region = q.region
    if q.endpoint_rule is EndpointRule.STRICT:
        ok = lambda v: v in region and config.in_box(v) and config.state(v) == q.state
        starts = {v for v in q.from_set if ok(v)}
        targets = {v for v in q.to_set if ok(v)}
        if starts & targets:
            return True
        return _bfs_reach(config, starts, ok, targets) is not None
    # endpoint-exempt: interiors carry the state and avoid both endpoint sets
    if (q.from_set & q.to_set & region):
        return True
    interior_ok = lambda v: (v in region and config.in_box(v)
                             and config.state(v) == q.state
                             and v not in q.from_set and v not in q.to_set)
    starts = {v for v in q.from_set if v in region}
    targets = {v for v in q.to_set if v in region}
    # direct adjacency between the two sets also yields a two-vertex path
    for v in starts:
        x, y = v
        for dx, dy in NEIGHBOR_OFFSETS:
            if (x + dx, y + dy) in targets:
                return True
    return _bfs_reach(config, starts, interior_ok, targets) is not None


def _labels(mask: np.ndarray) -> np.ndarray:
    lab, _ = ndimage.label(mask, structure=TRI_STRUCTURE)
    return lab


def open_labels(config: Configuration) -> np.ndarray:
    return _labels(config.open_mask())


def closed_labels(config: Configuration) -> np.ndarray:
    return _labels(config.closed_mask())


def side_arm_mask(config: Configuration, state: int, side: str) -> np.ndarray:
    """Sites with a chain of ``state`` neighbors reaching the given side.

    A site qualifies if it lies on the side itself, or if it is adjacent to a
    ``state`` cluster containing a site of that side (the site's own state is
    irrelevant).
    """
    n = config.n
    mask = config.open_mask() if state == OPEN else config.closed_mask()
    lab = _labels(mask)
    w = 2 * n + 1
    side_sel = np.zeros((w, w), dtype=bool)
    if side == "bottom":
        side_sel[0, :] = True
    elif side == "top":
        side_sel[-1, :] = True
    elif side == "left":
        side_sel[:, 0] = True
    elif side == "right":
        side_sel[:, -1] = True
    else:
        raise ValueError(f"unknown side {side!r}")
    touching = np.unique(lab[side_sel & mask])
    touching = touching[touching > 0]
    flags = np.zeros(lab.max() + 1, dtype=bool)
    flags[touching] = True
    anchored = flags[lab] & mask
    reach = ndimage.binary_dilation(anchored, structure=TRI_STRUCTURE)
    return reach | side_sel


def closed_arm_to_side(config: Configuration, x: Vertex, side: str) -> bool:
    """Chain of closed sites from a neighbor of x to the side (x exempt),
    or x already on the side."""
    m = side_arm_mask(config, CLOSED, side)
    return bool(m[x[1] + config.n, x[0] + config.n])


def side_touch_labels(lab: np.ndarray, mask: np.ndarray, col: str) -> np.ndarray:
    """Boolean flags per label id touching the given box side."""
    if col == "left":
        sel = lab[:, 0][mask[:, 0]]
    elif col == "right":
        sel = lab[:, -1][mask[:, -1]]
    elif col == "bottom":
        sel = lab[0, :][mask[0, :]]
    else:
        sel = lab[-1, :][mask[-1, :]]
    flags = np.zeros(lab.max() + 1, dtype=bool)
    flags[np.unique(sel)] = True
    flags[0] = False
    return flags


def crossing_exists(config: Configuration, rect: Rect, state: int,
                    orientation: str) -> bool:
    """Strict monochrome crossing of the rectangle (all vertices the state)."""
    n = config.n
    sub = config.grid[rect.y_min + n: rect.y_max + n + 1,
                      rect.x_min + n: rect.x_max + n + 1]
    mask = sub == state
    if not mask.any():
        return False
    lab = _labels(mask)
    if orientation == "h":
        a = np.unique(lab[:, 0][mask[:, 0]])
        b = np.unique(lab[:, -1][mask[:, -1]])
    elif orientation == "v":
        a = np.unique(lab[0, :][mask[0, :]])
        b = np.unique(lab[-1, :][mask[-1, :]])
    else:
        raise ValueError("orientation must be 'h' or 'v'")
    return bool(np.intersect1d(a[a > 0], b[b > 0]).size)


def _crossing_path(config: Configuration, rect: Rect, state: int,
                   orientation: str) -> list[Vertex] | None:
    if orientation == "h":
        starts = [(rect.x_min, y) for y in range(rect.y_min, rect.y_max + 1)]
        at_goal = lambda v: v[0] == rect.x_max
    else:
        starts = [(x, rect.y_min) for x in range(rect.x_min, rect.x_max + 1)]
        at_goal = lambda v: v[1] == rect.y_max
    ok = lambda v: v in rect and config.in_box(v) and config.state(v) == state
    starts = [v for v in starts if ok(v)]
    prev: dict[Vertex, Vertex | None] = {v: None for v in starts}
    q = deque(starts)
    while q:
        v = q.popleft()
        if at_goal(v):
            path = [v]
            while prev[path[-1]] is not None:
                path.append(prev[path[-1]])
            path.reverse()
            return path
        x, y = v
        for dx, dy in NEIGHBOR_OFFSETS:
            w = (x + dx, y + dy)
            if w not in prev and ok(w):
                prev[w] = v
                q.append(w)
    return None


def horizontal_crossing(config: Configuration, rect: Rect,
                        state: int) -> list[Vertex] | None:
    """A strict left-to-right crossing path of the rectangle, or None."""
    return _crossing_path(config, rect, state, "h")


def vertical_crossing(config: Configuration, rect: Rect,
                      state: int) -> list[Vertex] | None:
    """A strict bottom-to-top crossing path of the rectangle, or None."""
    return _crossing_path(config, rect, state, "v")


def box_rect(n: int) -> Rect:
    return Rect(-n, n, -n, n)


def tunnels(path: list[Vertex], rect: Rect, orientation: str) -> bool:
    """Does the path stay inside the rectangle wherever it overlaps the
    rectangle's strip?  h checks the x-range strip, v the y-range strip."""
    if orientation == "h":
        return all(v in rect for v in path if rect.x_min <= v[0] <= rect.x_max)
    if orientation == "v":
        return all(v in rect for v in path if rect.y_min <= v[1] <= rect.y_max)
    raise ValueError("orientation must be 'h' or 'v'")


def two_disjoint_arms(config: Configuration, x: Vertex, state: int,
                      target_a: set[Vertex], target_b: set[Vertex],
                      region: set[Vertex]) -> bool:
    """Two internally disjoint chains from x, one into each target set.

    All chain vertices other than x carry the state and lie in the region;
    the far endpoints carry the state too unless a chain degenerates to x
    itself sitting on its target.  Detected as a unit-vertex-capacity flow of
    value 2 from x to a sink fed through capacity-1 aggregators, one per
    target side.
    """
    from .disjoint import arms_from_point
    if x not in region:
        raise ValueError("x must lie in the region")
    in_a, in_b = x in target_a, x in target_b
    if in_a and in_b:
        return True
    allowed = {v for v in region
               if config.in_box(v) and config.state(v) == state and v != x}
    if in_a or in_b:
        # one trivial chain; the other is a plain reachability question
        target = target_b if in_a else target_a
        goal = {v for v in allowed if v in target}
        seeds = {w for w in _nbrs(x) if w in allowed}
        if not goal:
            return False
        return _bfs_reach(config, seeds, lambda v: v in allowed, goal) is not None
    return arms_from_point(x, allowed, target_a, target_b) >= 2


def _nbrs(v: Vertex) -> list[Vertex]:
    x, y = v
    return [(x + dx, y + dy) for dx, dy in NEIGHBOR_OFFSETS]

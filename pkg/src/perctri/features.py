"""Geometric feature sets of one configuration.

Three site sets are extracted per configuration: the lowest left-right
crossing (an ordered simple path), the pioneering sites hanging at or below
it, and the pivotal sites through which every crossing must pass.  The
definitional route computes "on some simple crossing" with a block-cut
decomposition; the production route traces the open/closed interface from
the lower-left corner and loop-erases its open side, which yields the same
path and runs in time proportional to the interface length.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .geometry import Vertex, NEIGHBOR_OFFSETS, common_neighbors
from .percolation import (
    Configuration, OPEN, CLOSED, TRI_STRUCTURE,
    side_arm_mask, open_labels, side_touch_labels, two_disjoint_arms,
)
from .disjoint import simple_path_vertices


@dataclass
class FeatureSets:
    gamma: list[Vertex]
    L: frozenset[Vertex]
    F: frozenset[Vertex]
    H_top: frozenset[Vertex]
    Q: frozenset[Vertex]


@dataclass
class ExplorationTrace:
    probes: list[tuple[Vertex, int]]
    terminal_side: str  # "right" (crossing exists) or "top"
    discovered_open: frozenset[Vertex]


class InterfaceError(RuntimeError):
    """The interface walk violated its step budget; internal error."""


def _mask_conn_lr(config: Configuration) -> tuple[np.ndarray, bool]:
    """Open sites whose cluster touches both the left and right columns."""
    mask = config.open_mask()
    lab = open_labels(config)
    fl = side_touch_labels(lab, mask, "left")
    fr = side_touch_labels(lab, mask, "right")
    both = fl & fr
    return both[lab] & mask, bool(both.any())


def pioneering_mask(config: Configuration) -> np.ndarray:
    """Open sites connected to both sides with a closed chain to the bottom."""
    conn, _ = _mask_conn_lr(config)
    return conn & side_arm_mask(config, CLOSED, "bottom")


def pioneering_set(config: Configuration) -> frozenset[Vertex]:
    n = config.n
    ys, xs = np.nonzero(pioneering_mask(config))
    return frozenset(zip((xs - n).tolist(), (ys - n).tolist()))


def on_some_crossing_set(config: Configuration) -> frozenset[Vertex]:
    """Open sites lying on at least one simple open left-right crossing.

    Block-cut route: the open subgraph is augmented with virtual terminals
    attached to the open sites of the left and right columns; a site
    qualifies iff it lies in a biconnected block on the terminal-to-terminal
    chain of the block-cut tree (cut vertices on the chain belong to two
    such blocks).
    """
    n = config.n
    mask = config.open_mask()
    adj: dict = {}
    ys, xs = np.nonzero(mask)
    opens = set(zip((xs - n).tolist(), (ys - n).tolist()))
    for v in opens:
        lst = [w for w in _nbrs(v) if w in opens]
        if v[0] == -n:
            lst.append("S")
            adj.setdefault("S", []).append(v)
        if v[0] == n:
            lst.append("T")
            adj.setdefault("T", []).append(v)
        adj[v] = lst
    if "S" not in adj or "T" not in adj:
        return frozenset()
    return frozenset(simple_path_vertices(adj, "S", "T"))


def _nbrs(v: Vertex) -> list[Vertex]:
    x, y = v
    return [(x + dx, y + dy) for dx, dy in NEIGHBOR_OFFSETS]


def lowest_crossing_by_definition(config: Configuration) -> frozenset[Vertex]:
    """Sites on some crossing that also have a closed chain to the bottom."""
    cross = on_some_crossing_set(config)
    if not cross:
        return frozenset()
    arm = side_arm_mask(config, CLOSED, "bottom")
    n = config.n
    return frozenset(v for v in cross if arm[v[1] + n, v[0] + n])


def _walk(config: Configuration, record_probes: bool):
    """Interface walk between the open region attached to a virtual open
    column left of the box and the closed region attached to a virtual closed
    row below it.

    Returns (terminal_side, loop-erased open path, probes, discovered_open).
    The open path is the lowest crossing when the walk exits right.
    """
    n = config.n
    w = config.width
    flat = config.grid.tobytes()
    budget = 12 * w * w + 48

    def probe(s: Vertex) -> int | str:
        x, y = s
        if x > n:
            return "right"
        if y > n:
            return "top"
        if y < -n:
            return CLOSED
        if x < -n:
            return OPEN
        return flat[(y + n) * w + (x + n)]

    u: Vertex = (-n - 1, -n)
    v: Vertex = (-n - 1, -n - 1)
    prev: Vertex = (-n - 2, -n)

    path: list[Vertex] = []
    pos: dict[Vertex, int] = {}
    probes: list[tuple[Vertex, int]] = []
    discovered: set[Vertex] = set()

    steps = 0
    while True:
        steps += 1
        if steps > budget:
            raise InterfaceError("interface walk exceeded its step budget")
        c1, c2 = common_neighbors(u, v)
        nxt = c2 if c1 == prev else c1
        s = probe(nxt)
        if s == "right":
            return "right", path, probes, discovered
        if s == "top":
            return "top", [], probes, discovered
        in_box = config.in_box(nxt)
        if in_box and record_probes:
            probes.append((nxt, int(s)))
        if s == OPEN:
            if in_box:
                discovered.add(nxt)
                if nxt in pos:
                    k = pos[nxt]
                    for dropped in path[k + 1:]:
                        del pos[dropped]
                    del path[k + 1:]
                else:
                    pos[nxt] = len(path)
                    path.append(nxt)
            else:
                # back on the virtual column: restart the recorded path
                path.clear()
                pos.clear()
            prev, u = u, nxt
        else:
            prev, v = v, nxt


def explore_interface(config: Configuration) -> ExplorationTrace:
    terminal, _, probes, discovered = _walk(config, record_probes=True)
    return ExplorationTrace(probes=probes, terminal_side=terminal,
                            discovered_open=frozenset(discovered))


def lowest_crossing(config: Configuration) -> list[Vertex]:
    """The lowest open left-right crossing as an ordered simple path.

    Empty when no crossing exists.  The path endpoints lie on the left and
    right columns; failure of that structure is an internal error.
    """
    terminal, path, _, _ = _walk(config, record_probes=False)
    if terminal == "top":
        return []
    n = config.n
    if not path or path[0][0] != -n or path[-1][0] != n:
        raise InterfaceError("interface exited right without a spanning path")
    return path


def order_gamma(L: set[Vertex], n: int) -> list[Vertex]:
    """Order a path-shaped site set into a simple path from its left-column
    site to its right-column site, preferring the lowest then leftmost
    neighbor; backtracks over ties so any valid simple-path order is found."""
    if not L:
        return []
    left = [v for v in L if v[0] == -n]
    right = [v for v in L if v[0] == n]
    if len(left) != 1 or len(right) != 1:
        raise ValueError("crossing set must meet each of the two columns once")
    order = {}
    for v in L:
        order[v] = sorted((w for w in _nbrs(v) if w in L),
                          key=lambda p: (p[1], p[0]))
    goal = right[0]
    total = len(L)
    path = [left[0]]
    used = {left[0]}
    iters = [iter(order[left[0]])]
    while iters:
        try:
            w = next(iters[-1])
        except StopIteration:
            iters.pop()
            used.discard(path.pop())
            continue
        if w in used:
            continue
        if w == goal:
            if len(path) + 1 == total:
                return path + [goal]
            continue
        path.append(w)
        used.add(w)
        iters.append(iter(order[w]))
    raise ValueError("site set admits no simple-path order")


def pivotal_set(config: Configuration) -> frozenset[Vertex]:
    """Sites on both the lowest and the highest crossing.

    The highest crossing is the lowest one of the point-reflected
    configuration.  Equivalently: lowest-crossing sites with a closed chain
    to the top (the two closed chains of such a site are automatically
    disjoint, since a shared closed site would give a closed top-bottom
    crossing, impossible next to an open left-right one).
    """
    gamma = lowest_crossing(config)
    if not gamma:
        return frozenset()
    arm_top = side_arm_mask(config, CLOSED, "top")
    n = config.n
    return frozenset(v for v in gamma if arm_top[v[1] + n, v[0] + n])


def highest_crossing_set(config: Configuration) -> frozenset[Vertex]:
    """Vertex set of the highest crossing: the lowest crossing of the
    point-reflected configuration, mapped back."""
    reflected = config.point_reflected()
    return frozenset((-x, -y) for x, y in lowest_crossing(reflected))


def pivotal_direct(config: Configuration) -> frozenset[Vertex]:
    """Event-by-event pivotal test: on some crossing, plus two internally
    disjoint closed chains to the top and bottom sides (flow-checked)."""
    cross = on_some_crossing_set(config)
    if not cross:
        return frozenset()
    n = config.n
    arm_top = side_arm_mask(config, CLOSED, "top")
    arm_bot = side_arm_mask(config, CLOSED, "bottom")
    top = {(x, n) for x in range(-n, n + 1)}
    bot = {(x, -n) for x in range(-n, n + 1)}
    region = {(x, y) for x in range(-n, n + 1) for y in range(-n, n + 1)}
    out = set()
    for v in cross:
        if not (arm_top[v[1] + n, v[0] + n] and arm_bot[v[1] + n, v[0] + n]):
            continue
        if two_disjoint_arms(config, v, CLOSED, top, bot, region):
            out.add(v)
    return frozenset(out)


def pivotal_flip_oracle(config: Configuration) -> frozenset[Vertex]:
    """Open sites whose single flip to closed destroys every open crossing."""
    conn, exists = _mask_conn_lr(config)
    if not exists:
        return frozenset()
    n = config.n
    ys, xs = np.nonzero(conn)
    out = set()
    for x, y in zip((xs - n).tolist(), (ys - n).tolist()):
        g = config.grid.copy()
        g[y + n, x + n] = CLOSED
        lab, _ = ndimage.label(g == OPEN, structure=TRI_STRUCTURE)
        fl = side_touch_labels(lab, g == OPEN, "left")
        fr = side_touch_labels(lab, g == OPEN, "right")
        if not (fl & fr).any():
            out.add((x, y))
    return frozenset(out)


def feature_sets(config: Configuration) -> FeatureSets:
    gamma = lowest_crossing(config)
    L = frozenset(gamma)
    F = pioneering_set(config)
    H = highest_crossing_set(config)
    Q = frozenset(L & H)
    if not (Q <= L <= F):
        raise AssertionError("feature set inclusions violated")
    return FeatureSets(gamma=gamma, L=L, F=F, H_top=H, Q=Q)


def feature_counts(config: Configuration) -> tuple[int, int, int]:
    """(|lowest crossing|, |pioneering set|, |pivotal set|), zeros when no
    crossing exists.  The inclusion pivotal <= lowest <= pioneering is
    asserted on every call."""
    n = config.n
    conn, exists = _mask_conn_lr(config)
    if not exists:
        return (0, 0, 0)
    arm_bot = side_arm_mask(config, CLOSED, "bottom")
    f_mask = conn & arm_bot
    gamma = lowest_crossing(config)
    if not gamma:
        raise AssertionError("crossing exists but the interface exited top")
    arm_top = side_arm_mask(config, CLOSED, "top")
    n_q = 0
    for x, y in gamma:
        if not f_mask[y + n, x + n]:
            raise AssertionError("lowest crossing escaped the pioneering set")
        if arm_top[y + n, x + n]:
            n_q += 1
    n_l = len(gamma)
    n_f = int(f_mask.sum())
    if not (n_q <= n_l <= n_f):
        raise AssertionError("feature count inclusions violated")
    return (n_l, n_f, n_q)


def below_gamma_region(config: Configuration, gamma: list[Vertex]) -> np.ndarray:
    """Component of the virtual bottom layer in the box minus the crossing."""
    n = config.n
    w = config.width
    blocked = np.zeros((w, w), dtype=bool)
    for x, y in gamma:
        blocked[y + n, x + n] = True
    free = ~blocked
    lab, _ = ndimage.label(free, structure=TRI_STRUCTURE)
    seeds = np.unique(lab[0, :][free[0, :]])
    seeds = seeds[seeds > 0]
    flags = np.zeros(lab.max() + 1, dtype=bool)
    flags[seeds] = True
    return flags[lab] & free

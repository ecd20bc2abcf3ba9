"""Multi-chain events: annulus arms, tunneled variants, half-plane and
horseshoe three-arm crossings.

Chain conventions follow the path rules of the core module: designated
endpoint sites (the ring of the inner box, the outer boundary ring, or the
anchor site itself) are exempt from the state requirement, interior sites
carry it strictly.  Disjointness within one state is decided by a
unit-vertex-capacity flow on the reduced subgraph of clusters that actually
touch both boundary rings; cross-state chains are disjoint automatically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .geometry import (Box, Vertex, Horseshoe, NEIGHBOR_OFFSETS,
                       restricted_rects, semi_ring)
from .percolation import Configuration, OPEN, CLOSED, TRI_STRUCTURE, crossing_exists
from .disjoint import disjoint_crossings, arms_from_point, point_to_ring_arms


@dataclass(frozen=True)
class ArmSpec:
    """Annulus arm event description: kappa chains from the ring of
    B(center, inner) to the boundary ring of the ambient box."""

    kappa: int
    center: Vertex = (0, 0)
    inner: int = 0

    def __post_init__(self) -> None:
        if self.kappa not in (2, 3, 4):
            raise ValueError("kappa must be 2, 3 or 4")
        if self.inner < 0:
            raise ValueError("inner radius must be >= 0")

    def label(self) -> str:
        cx, cy = self.center
        if (cx, cy) == (0, 0):
            return f"U{self.kappa}(m={self.inner})"
        return f"U{self.kappa}(m={self.inner},x=({cx},{cy}))"


def _dilate(mask: np.ndarray) -> np.ndarray:
    return ndimage.binary_dilation(mask, structure=TRI_STRUCTURE)


def _nbr6(v: Vertex) -> list[Vertex]:
    x, y = v
    return [(x + dx, y + dy) for dx, dy in NEIGHBOR_OFFSETS]


def _mask_cells(mask: np.ndarray, n: int) -> set[Vertex]:
    ys, xs = np.nonzero(mask)
    return set(zip((xs - n).tolist(), (ys - n).tolist()))


def _grid_mask(n: int, cells) -> np.ndarray:
    w = 2 * n + 1
    m = np.zeros((w, w), dtype=bool)
    for x, y in cells:
        m[y + n, x + n] = True
    return m


class _RingProblem:
    """Crossings between two exempt rings through a masked interior."""

    def __init__(self, config: Configuration, interior_mask: np.ndarray,
                 ring_a: list[Vertex], ring_b: list[Vertex]):
        self.config = config
        self.n = config.n
        self.interior_mask = interior_mask
        self.ring_a = ring_a
        self.ring_b = ring_b
        self.ring_a_mask = _grid_mask(self.n, ring_a)
        self.ring_b_mask = _grid_mask(self.n, ring_b)
        self._adjacent_rings: bool | None = None

    def rings_adjacent(self) -> bool:
        if self._adjacent_rings is None:
            self._adjacent_rings = bool(
                (_dilate(self.ring_a_mask) & self.ring_b_mask).any())
        return self._adjacent_rings

    def _allowed(self, state: int) -> np.ndarray:
        st = self.config.open_mask() if state == OPEN else self.config.closed_mask()
        return st & self.interior_mask

    def connecting_mask(self, state: int) -> np.ndarray:
        """Interior clusters of the state adjacent to both rings."""
        allowed = self._allowed(state)
        lab, nlab = ndimage.label(allowed, structure=TRI_STRUCTURE)
        if nlab == 0:
            return np.zeros_like(allowed)
        near_a = _dilate(self.ring_a_mask) & allowed
        near_b = _dilate(self.ring_b_mask) & allowed
        fa = np.zeros(nlab + 1, dtype=bool)
        fb = np.zeros(nlab + 1, dtype=bool)
        fa[np.unique(lab[near_a])] = True
        fb[np.unique(lab[near_b])] = True
        fa[0] = fb[0] = False
        return (fa & fb)[lab] & allowed

    def crossing_count(self, state: int, need: int = 2,
                       sink_groups: list[tuple[set[Vertex], int]] | None = None,
                       ) -> int:
        """Vertex-disjoint ring-to-ring crossings of the state, capped.

        A degenerate single-site inner ring is the common start of all its
        chains (they share only that site), so it carries capacity ``need``
        instead of 1.
        """
        conn = self.connecting_mask(state)
        cells = _mask_cells(conn, self.n)
        if len(self.ring_a) == 1:
            x = self.ring_a[0]
            groups = sink_groups if sink_groups is not None \
                else [(set(self.ring_b), need)]
            return point_to_ring_arms(x, cells, groups, need=need)
        if not self.rings_adjacent() and not conn.any():
            return 0
        return disjoint_crossings(cells, set(self.ring_a), set(self.ring_b),
                                  need=need, sink_groups=sink_groups)

    def has_crossing(self, state: int) -> bool:
        if self.rings_adjacent():
            return True
        return bool(self.connecting_mask(state).any())


def _annulus_problem(config: Configuration, center: Vertex, inner: int) -> _RingProblem:
    n = config.n
    cx, cy = center
    if max(abs(cx), abs(cy)) + inner >= n:
        raise ValueError("inner box must lie in the interior of the ambient box")
    w = 2 * n + 1
    yy, xx = np.mgrid[-n:n + 1, -n:n + 1]
    inner_cheb = np.maximum(np.abs(xx - cx), np.abs(yy - cy))
    outer_cheb = np.maximum(np.abs(xx), np.abs(yy))
    interior = (outer_cheb <= n - 1) & (inner_cheb > inner)
    ring_in = Box(center, inner).ring()
    ring_out = Box((0, 0), n).ring()
    return _RingProblem(config, interior, ring_in, ring_out)


def annulus_arm_profile(config: Configuration, center: Vertex = (0, 0),
                        inner: int = 0) -> tuple[int, int]:
    """(open crossings, closed crossings) of the annulus, each capped at 2."""
    prob = _annulus_problem(config, center, inner)
    o = 1 if prob.has_crossing(OPEN) else 0
    if o:
        o = prob.crossing_count(OPEN, need=2)
    c = 1 if prob.has_crossing(CLOSED) else 0
    if c:
        c = prob.crossing_count(CLOSED, need=2)
    return o, c


def annulus_arm_event(config: Configuration, spec: ArmSpec) -> bool:
    """kappa = 2: one open and one closed ring-to-ring chain; kappa = 3: two
    disjoint open plus one closed; kappa = 4: two disjoint open plus two
    disjoint closed."""
    prob = _annulus_problem(config, spec.center, spec.inner)
    if not (prob.has_crossing(OPEN) and prob.has_crossing(CLOSED)):
        return False
    if spec.kappa == 2:
        return True
    if prob.crossing_count(OPEN, need=2) < 2:
        return False
    if spec.kappa == 3:
        return True
    return prob.crossing_count(CLOSED, need=2) >= 2


class PointArmEvaluator:
    """Per-configuration cache for chain counts from many anchor sites to the
    boundary ring.

    Global cluster labels are computed once per state; the anchor site is
    excluded from the flow's vertex set instead, which keeps the counts exact
    while sharing all the heavy work across anchors.
    """

    def __init__(self, config: Configuration, batch: bool = False):
        self.config = config
        n = config.n
        self.n = n
        self._batch = batch
        w = 2 * n + 1
        inner = np.zeros((w, w), dtype=bool)
        inner[1:-1, 1:-1] = True
        self.ring_set = set(Box((0, 0), n).ring())
        self._per_state = {}
        self._two_sets: dict[int, frozenset[Vertex]] = {}
        for state in (OPEN, CLOSED):
            st = config.open_mask() if state == OPEN else config.closed_mask()
            allowed = st & inner
            lab, nlab = ndimage.label(allowed, structure=TRI_STRUCTURE)
            edge = np.zeros(nlab + 1, dtype=bool)
            for sl in (lab[1, 1:-1], lab[-2, 1:-1], lab[1:-1, 1], lab[1:-1, -2]):
                edge[np.unique(sl)] = True
            edge[0] = False
            self._per_state[state] = (lab, edge, {})

    def _two_chain_set(self, state: int) -> frozenset[Vertex]:
        """Sites of the state with two internally disjoint chains of that
        state to the ring: cells sharing a biconnected block with a virtual
        apex attached to every ring-adjacent cell."""
        if state not in self._two_sets:
            from .disjoint import biconnected_blocks
            n = self.n
            lab, edge, _ = self._per_state[state]
            mask = lab > 0
            ys, xs = np.nonzero(mask)
            cells = set(zip((xs - n).tolist(), (ys - n).tolist()))
            adj: dict = {"Z": []}
            for v in cells:
                lst = [u for u in _nbr6(v) if u in cells]
                if max(abs(v[0]), abs(v[1])) == n - 1:
                    lst.append("Z")
                    adj["Z"].append(v)
                adj[v] = lst
            out = set()
            if adj["Z"]:
                for blk in biconnected_blocks(adj, ["Z"]):
                    if "Z" in blk:
                        out |= blk
                out.discard("Z")
            self._two_sets[state] = frozenset(out)
        return self._two_sets[state]

    def _cluster_cells(self, state: int, lid: int) -> set[Vertex]:
        lab, _, cache = self._per_state[state]
        if lid not in cache:
            ys, xs = np.nonzero(lab == lid)
            n = self.n
            cache[lid] = set(zip((xs - n).tolist(), (ys - n).tolist()))
        return cache[lid]

    def count(self, x: Vertex, state: int, need: int) -> int:
        """Chains from x of the given state to the ring, capped at min(need, 2)."""
        n = self.n
        cx, cy = x
        if max(abs(cx), abs(cy)) == n - 1:
            # x has at least two ring neighbors; bare two-site chains suffice
            return min(need, 2)
        lab, edge, _ = self._per_state[state]
        if self.config.state(x) == state:
            lid = int(lab[cy + n, cx + n])
            if lid == 0 or not edge[lid]:
                return 0
            if need == 1:
                return 1
            if self._batch:
                return 2 if x in self._two_chain_set(state) else 1
            cells = self._cluster_cells(state, lid) - {x}
            return point_to_ring_arms(x, cells, [(self.ring_set, need)],
                                      need=need)
        # x carries the other state: chains start at its state neighbors
        reaching: set[int] = set()
        for dx, dy in NEIGHBOR_OFFSETS:
            px, py = cx + dx, cy + dy
            if abs(px) <= n - 1 and abs(py) <= n - 1:
                lid = int(lab[py + n, px + n])
                if lid and edge[lid]:
                    reaching.add(lid)
        if not reaching:
            return 0
        if need == 1:
            return 1
        if len(reaching) >= 2:
            # distinct clusters cannot share a reachable ring site, so one
            # chain through each is already a disjoint pair
            return 2
        cells = self._cluster_cells(state, next(iter(reaching)))
        return point_to_ring_arms(x, cells, [(self.ring_set, need)], need=need)

    def profile(self, x: Vertex, need_open: int = 2, need_closed: int = 2,
                ) -> tuple[int, int]:
        if max(abs(x[0]), abs(x[1])) >= self.n:
            raise ValueError("x must lie strictly inside the box")
        return (self.count(x, OPEN, need_open),
                self.count(x, CLOSED, need_closed))


def point_arm_profile(config: Configuration, x: Vertex) -> tuple[int, int]:
    """(open chains, closed chains) from the exempt site x to the exempt
    boundary ring of the ambient box, each capped at 2.

    Interior chain sites live strictly inside the box and never revisit x;
    two chains of one state share only x.
    """
    return PointArmEvaluator(config).profile(x)


# --- tunneled events -------------------------------------------------------

def _strip_masks(n: int):
    """Allowed-region masks for arms tunneling through the side rectangles.

    Horizontal arms must stay inside R1/R3 wherever they enter the left or
    right quarter strips; vertical arms likewise for R2/R4.  The full-width
    slabs S2/S4 impose no constraint inside the box.
    """
    h = n // 2
    yy, xx = np.mgrid[-n:n + 1, -n:n + 1]
    horizontal = ((np.abs(xx) < h) | (np.abs(yy) <= h))
    vertical = ((np.abs(yy) < h) | (np.abs(xx) <= h))
    return horizontal, vertical


def restricted_arm_event(config: Configuration, x: Vertex, kappa: int) -> bool:
    """Tunneled kappa-arm event at x (x must lie in the quarter box).

    The arms run from x to the named sides of the box, staying inside the
    side rectangles wherever they enter the outer quarter strips, and the
    rectangles carry the monochrome crossings that seal the arms in:
    vertical open crossings of R1 and R3 plus a horizontal closed crossing
    of R2 (kappa = 3; kappa = 4 adds R4), or horizontal open/closed
    crossings of S4/S2 (kappa = 2).
    """
    return RestrictedEvaluator(config).event(x, kappa)


def _side_cells(n: int, side: str) -> set[Vertex]:
    if side == "left":
        return {(-n, y) for y in range(-n, n + 1)}
    if side == "right":
        return {(n, y) for y in range(-n, n + 1)}
    if side == "bottom":
        return {(x, -n) for x in range(-n, n + 1)}
    return {(x, n) for x in range(-n, n + 1)}


def _masked_arm(config: Configuration, x: Vertex, state: int, side: str,
                mask: np.ndarray | None) -> bool:
    """One chain from x (exempt) to the side through masked state sites."""
    n = config.n
    st = config.open_mask() if state == OPEN else config.closed_mask()
    allowed = st if mask is None else (st & mask)
    allowed = allowed.copy()
    allowed[x[1] + n, x[0] + n] = False
    lab, nlab = ndimage.label(allowed, structure=TRI_STRUCTURE)
    if side == "bottom":
        edge = lab[0, :][allowed[0, :]]
    elif side == "top":
        edge = lab[-1, :][allowed[-1, :]]
    elif side == "left":
        edge = lab[:, 0][allowed[:, 0]]
    else:
        edge = lab[:, -1][allowed[:, -1]]
    good = np.zeros(nlab + 1, dtype=bool)
    good[np.unique(edge)] = True
    good[0] = False
    for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1)):
        wx, wy = x[0] + dx, x[1] + dy
        if abs(wx) <= n and abs(wy) <= n and good[lab[wy + n, wx + n]]:
            return True
    return False


def _two_masked_arms(config: Configuration, x: Vertex, state: int,
                     mask: np.ndarray, side_a: str, side_b: str) -> bool:
    """Two internally disjoint chains from x to two opposite sides, all chain
    sites inside the joint tunneling mask."""
    n = config.n
    if not (_masked_arm(config, x, state, side_a, mask)
            and _masked_arm(config, x, state, side_b, mask)):
        return False
    st = config.open_mask() if state == OPEN else config.closed_mask()
    allowed_mask = st & mask
    allowed_mask = allowed_mask.copy()
    allowed_mask[x[1] + n, x[0] + n] = False
    cells = _mask_cells(allowed_mask, n)
    return arms_from_point(x, cells, _side_cells(n, side_a),
                           _side_cells(n, side_b)) >= 2


class RestrictedEvaluator:
    """Per-configuration cache for evaluating tunneled arm events at many
    anchor sites: the rectangle-crossing conjuncts and the strip masks are
    shared; only the per-anchor arms are recomputed."""

    def __init__(self, config: Configuration):
        self.config = config
        n = config.n
        rects = restricted_rects(n)
        self._conj = {
            "R1": crossing_exists(config, rects["R1"], OPEN, "v"),
            "R3": crossing_exists(config, rects["R3"], OPEN, "v"),
            "R2": crossing_exists(config, rects["R2"], CLOSED, "h"),
            "R4": crossing_exists(config, rects["R4"], CLOSED, "h"),
            "S4": crossing_exists(config, rects["S4"], OPEN, "h"),
            "S2": crossing_exists(config, rects["S2"], CLOSED, "h"),
        }
        self._masks = _strip_masks(n)

    def event(self, x: Vertex, kappa: int) -> bool:
        config = self.config
        n = config.n
        if max(abs(x[0]), abs(x[1])) > n // 4:
            raise ValueError("x must lie in the quarter box")
        conj = self._conj
        if kappa == 2:
            if not (conj["S4"] and conj["S2"]):
                return False
            return (_masked_arm(config, x, OPEN, "top", None)
                    and _masked_arm(config, x, CLOSED, "bottom", None))
        if kappa not in (3, 4):
            raise ValueError("kappa must be 2, 3 or 4")
        if not (conj["R1"] and conj["R3"] and conj["R2"]):
            return False
        if kappa == 4 and not conj["R4"]:
            return False
        horiz, vert = self._masks
        if not _two_masked_arms(config, x, OPEN, horiz, "left", "right"):
            return False
        if kappa == 3:
            return _masked_arm(config, x, CLOSED, "bottom", vert)
        return _two_masked_arms(config, x, CLOSED, vert, "bottom", "top")


# --- half-plane and horseshoe three-arm events -----------------------------

def _ring_order_index(ring: tuple[Vertex, ...]) -> dict[Vertex, int]:
    return {v: i for i, v in enumerate(ring)}


def _separated_three_arm(config: Configuration,
                         interior_mask: np.ndarray,
                         open_sources_mask: np.ndarray,
                         closed_source_spec,
                         ring: tuple[Vertex, ...]) -> bool:
    """Core of the half-plane/horseshoe detectors: an open chain whose ring
    endpoint strictly separates the ring endpoints of two disjoint closed
    chains.

    ``open_sources_mask`` marks exempt seed sites for the open chain;
    ``closed_source_spec`` is either ("point", x) for two chains rooted at an
    exempt site or ("ring", cells) for chains from exempt ring cells.
    """
    n = config.n
    if not ring:
        return False
    ring_mask = _grid_mask(n, ring)
    order = _ring_order_index(ring)

    open_allowed = config.open_mask() & interior_mask
    lab, nlab = ndimage.label(open_allowed, structure=TRI_STRUCTURE)
    near_src = _dilate(open_sources_mask) & open_allowed
    good = np.zeros(nlab + 1, dtype=bool)
    good[np.unique(lab[near_src])] = True
    good[0] = False
    open_reach = good[lab] & open_allowed
    endpoint_mask = _dilate(open_reach | open_sources_mask) & ring_mask
    ys, xs = np.nonzero(endpoint_mask)
    open_endpoints = sorted(order[(x - n, y - n)]
                            for x, y in zip(xs.tolist(), ys.tolist()))
    if not open_endpoints:
        return False

    closed_allowed = config.closed_mask() & interior_mask
    kind, payload = closed_source_spec
    if kind == "point":
        seed_mask = np.zeros_like(closed_allowed)
        seed_mask[payload[1] + n, payload[0] + n] = True
    else:
        seed_mask = _grid_mask(n, payload)
    lab_c, nlab_c = ndimage.label(closed_allowed, structure=TRI_STRUCTURE)
    near = _dilate(seed_mask) & closed_allowed
    good_c = np.zeros(nlab_c + 1, dtype=bool)
    good_c[np.unique(lab_c[near])] = True
    good_c[0] = False
    closed_reach = good_c[lab_c] & closed_allowed
    cend_mask = _dilate(closed_reach | seed_mask) & ring_mask
    ys, xs = np.nonzero(cend_mask)
    closed_candidates = sorted(order[(x - n, y - n)]
                               for x, y in zip(xs.tolist(), ys.tolist()))
    if len(closed_candidates) < 2:
        return False
    lo, hi = closed_candidates[0], closed_candidates[-1]
    # only splits with closed candidates strictly on both sides can succeed;
    # between consecutive candidates all split points are equivalent
    candidate_os: list[int] = []
    seen_gaps: set[tuple[int, int]] = set()
    cidx = np.asarray(closed_candidates)
    for o in open_endpoints:
        if not (lo < o < hi):
            continue
        gap = (int(np.searchsorted(cidx, o, side="left")),
               int(np.searchsorted(cidx, o, side="right")))
        if gap in seen_gaps:
            continue
        seen_gaps.add(gap)
        candidate_os.append(o)
    if not candidate_os:
        return False
    cells = _mask_cells(closed_reach, n)
    if kind == "point":
        x = payload
        if point_to_ring_arms(x, cells, [(set(ring), 2)]) < 2:
            return False
        for o in candidate_os:
            groups = [(set(ring[:o]), 1), (set(ring[o + 1:]), 1)]
            if point_to_ring_arms(x, cells, groups) >= 2:
                return True
        return False
    sources = set(payload)
    if disjoint_crossings(cells, sources, set(ring), need=2) < 2:
        return False
    for o in candidate_os:
        groups = [(set(ring[:o]), 1), (set(ring[o + 1:]), 1)]
        if disjoint_crossings(cells, sources, set(ring), need=2,
                              sink_groups=groups) >= 2:
            return True
    return False


def halfplane_three_arm(config: Configuration, rho_box: Box) -> bool:
    """One open and two disjoint closed chains from the center of the box's
    attached edge to the semi-ring just outside the box, the open chain's
    endpoint strictly between the closed ones in ring order."""
    n = config.n
    cx, cy = rho_box.center
    r = rho_box.radius
    if cx + r != n:
        raise ValueError("box must be attached to the right boundary")
    if abs(cy) + r + 1 > n or cx - r - 1 < -n:
        raise ValueError("inner boundary ring does not fit in the ambient box")
    y_prime = (n, cy)
    ring = tuple(semi_ring(rho_box.center, r + 1, "right"))
    yy, xx = np.mgrid[-n:n + 1, -n:n + 1]
    inside = (np.maximum(np.abs(xx - cx), np.abs(yy - cy)) <= r)
    inside[y_prime[1] + n, y_prime[0] + n] = False
    src = np.zeros_like(inside)
    src[y_prime[1] + n, y_prime[0] + n] = True
    return _separated_three_arm(config, inside, src, ("point", y_prime), ring)


def horseshoe_three_arm(config: Configuration, shoe: Horseshoe) -> bool:
    """One open and two disjoint closed crossings of the horseshoe from the
    outer to the inner boundary, ordered closed/open/closed along the outer
    boundary."""
    n = config.n
    if not shoe.inner_boundary or not shoe.outer_boundary:
        return False
    region = shoe.region()
    inner_set = set(shoe.inner_boundary)
    outer_set = set(shoe.outer_boundary)
    interiors = {v for v in region
                 if v not in inner_set and v not in outer_set
                 and max(abs(v[0]), abs(v[1])) <= n}
    interior_mask = _grid_mask(n, interiors)
    src_mask = _grid_mask(n, shoe.inner_boundary)
    return _separated_three_arm(config, interior_mask, src_mask,
                                ("ring", shoe.inner_boundary),
                                tuple(shoe.outer_boundary))

"""Integer geometry of the triangular lattice realized on Z^2.

Sites are pairs (x, y); the six neighbors of a site are the horizontal and
vertical unit steps plus the two diagonal steps (1, -1) and (-1, 1).  Distances
are Chebyshev: ``norm((x, y)) = max(|x|, |y|)``.  All dyadic radii ``2**-k * n``
are floored when used as box radii; membership thresholds for the ring
partitions are evaluated exactly in integer arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

Vertex = tuple[int, int]

NEIGHBOR_OFFSETS: tuple[Vertex, ...] = (
    (1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1),
)

# For an edge u -> u+d the two triangles containing it have third corners
# u + c for c in _EDGE_COMMONS[d].
_EDGE_COMMONS: dict[Vertex, tuple[Vertex, Vertex]] = {
    (1, 0): ((0, 1), (1, -1)),
    (-1, 0): ((0, -1), (-1, 1)),
    (0, 1): ((1, 0), (-1, 1)),
    (0, -1): ((-1, 0), (1, -1)),
    (1, -1): ((1, 0), (0, -1)),
    (-1, 1): ((-1, 0), (0, 1)),
}


def neighbors(v: Vertex) -> set[Vertex]:
    """The six lattice neighbors of ``v``."""
    x, y = v
    return {(x + dx, y + dy) for dx, dy in NEIGHBOR_OFFSETS}


def are_adjacent(u: Vertex, v: Vertex) -> bool:
    return (v[0] - u[0], v[1] - u[1]) in _EDGE_COMMONS


def common_neighbors(u: Vertex, v: Vertex) -> tuple[Vertex, Vertex]:
    """Third corners of the two triangles containing the edge (u, v)."""
    d = (v[0] - u[0], v[1] - u[1])
    c1, c2 = _EDGE_COMMONS[d]
    return (u[0] + c1[0], u[1] + c1[1]), (u[0] + c2[0], u[1] + c2[1])


def norm(v: Vertex) -> int:
    return max(abs(v[0]), abs(v[1]))


def chebyshev(u: Vertex, v: Vertex) -> int:
    return max(abs(u[0] - v[0]), abs(u[1] - v[1]))


@dataclass(frozen=True)
class Box:
    """Chebyshev ball: all sites within ``radius`` of ``center``."""

    center: Vertex
    radius: int

    def __post_init__(self) -> None:
        if self.radius < 0:
            raise ValueError("box radius must be non-negative")

    def __contains__(self, v: Vertex) -> bool:
        return chebyshev(v, self.center) <= self.radius

    def vertices(self) -> list[Vertex]:
        cx, cy = self.center
        r = self.radius
        return [(cx + dx, cy + dy)
                for dy in range(-r, r + 1) for dx in range(-r, r + 1)]

    def ring(self) -> list[Vertex]:
        """Outermost ring (= boundary of the box as a vertex set)."""
        cx, cy = self.center
        r = self.radius
        if r == 0:
            return [(cx, cy)]
        out = []
        for x in range(cx - r, cx + r + 1):
            out.append((x, cy - r))
            out.append((x, cy + r))
        for y in range(cy - r + 1, cy + r):
            out.append((cx - r, y))
            out.append((cx + r, y))
        return out

    def side(self, which: str) -> list[Vertex]:
        """Full edge row/column of the box; corners belong to both sides."""
        cx, cy = self.center
        r = self.radius
        if which == "left":
            return [(cx - r, cy + t) for t in range(-r, r + 1)]
        if which == "right":
            return [(cx + r, cy + t) for t in range(-r, r + 1)]
        if which == "bottom":
            return [(cx + t, cy - r) for t in range(-r, r + 1)]
        if which == "top":
            return [(cx + t, cy + r) for t in range(-r, r + 1)]
        raise ValueError(f"unknown side {which!r}")


@dataclass(frozen=True)
class Rect:
    x_min: int
    x_max: int
    y_min: int
    y_max: int

    def __post_init__(self) -> None:
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise ValueError("empty rectangle")

    def __contains__(self, v: Vertex) -> bool:
        return self.x_min <= v[0] <= self.x_max and self.y_min <= v[1] <= self.y_max

    def vertices(self) -> list[Vertex]:
        return [(x, y) for y in range(self.y_min, self.y_max + 1)
                for x in range(self.x_min, self.x_max + 1)]


def box(n: int) -> Box:
    """The centered box of radius ``n``."""
    return Box((0, 0), n)


def boundary(vertices: set[Vertex]) -> set[Vertex]:
    """Sites of the set adjacent to some site outside the set."""
    return {v for v in vertices if any(w not in vertices for w in neighbors(v))}


def interior(vertices: set[Vertex]) -> set[Vertex]:
    return vertices - boundary(vertices)


def dyadic_radius(k: int, n: int) -> int:
    """floor(2**-k * n) for k >= 0."""
    if k < 0:
        raise ValueError("negative dyadic exponent")
    return n >> k if k < n.bit_length() else 0


def ring_count(n: int) -> int:
    """Index of the outermost ring: smallest j with 2**-j * n <= 1."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return (n - 1).bit_length()


def annulus_index(n: int, v: Vertex) -> int:
    """Ring index of ``v`` in the dyadic shell partition of the box.

    Shell 0 is the inner half box (norm <= n/2), shell j for 0 < j < j0 is
    the set with (1 - 2**-j) n < norm <= (1 - 2**-(j+1)) n, and shell j0 is
    the outermost ring norm == n.  Thresholds are exact (integer arithmetic).
    """
    r = norm(v)
    if r > n:
        raise ValueError(f"{v} outside box of radius {n}")
    j0 = ring_count(n)
    if r == n:
        return j0
    if 2 * r <= n:
        return 0
    j = 1
    # unique j with (2**j - 1) n < 2**j r and 2**(j+1) r <= (2**(j+1) - 1) n
    while not (((1 << j) - 1) * n < (1 << j) * r
               and (1 << (j + 1)) * r <= ((1 << (j + 1)) - 1) * n):
        j += 1
    return min(j, j0)


def dual_index(n: int, v: Vertex) -> int:
    """Corner-trim index: how late ``v`` survives as corners are cut.

    Index j* is the smallest one with min(|x|, |y|) <= (1 - 2**-(j*+1)) n.
    The four exact corners never satisfy any threshold; they are removed
    last and receive the maximal index (= ring_count(n)).
    """
    x, y = v
    if norm(v) > n:
        raise ValueError(f"{v} outside box of radius {n}")
    m = min(abs(x), abs(y))
    if m == n:
        return ring_count(n)
    j = 0
    while not ((1 << (j + 1)) * m <= ((1 << (j + 1)) - 1) * n):
        j += 1
    return j


@dataclass
class AnnulusPartition:
    """Dyadic shell partition of the box of radius n, precomputed per vertex."""

    n: int
    j0: int = field(init=False)
    index_of: dict[Vertex, int] = field(init=False)

    def __post_init__(self) -> None:
        self.j0 = ring_count(self.n)
        self.index_of = {v: annulus_index(self.n, v) for v in box(self.n).vertices()}

    def cells(self) -> list[set[Vertex]]:
        out: list[set[Vertex]] = [set() for _ in range(self.j0 + 1)]
        for v, j in self.index_of.items():
            out[j].add(v)
        return out


@dataclass
class DualPartition:
    """Corner-trim partition of the box of radius n."""

    n: int
    index_of: dict[Vertex, int] = field(init=False)

    def __post_init__(self) -> None:
        self.index_of = {v: dual_index(self.n, v) for v in box(self.n).vertices()}

    def cells(self) -> list[set[Vertex]]:
        top = max(self.index_of.values())
        out: list[set[Vertex]] = [set() for _ in range(top + 1)]
        for v, j in self.index_of.items():
            out[j].add(v)
        return out


def shell_index(n: int, x: Vertex, y: Vertex) -> int:
    """Generic dyadic shell of ``y`` around ``x``: the unique m with
    2**-(m+1) n < chebyshev(x, y) <= 2**-m n, capped at ring_count(n)
    (the innermost cell is the whole ball of radius 2**-j0 n)."""
    d = chebyshev(x, y)
    if d > n:
        raise ValueError("shell index undefined beyond the box scale")
    j0 = ring_count(n)
    if (1 << j0) * d <= n:
        return j0
    return (n // d).bit_length() - 1


def local_annulus_index(x: Vertex, j: int, n: int, y: Vertex) -> int:
    """Shell of ``y`` in the local dyadic net around ``x``.

    Defined for y within the quarter-scale ball B(x, 2**-(j+2) n); the shells
    run from m = j + 2 outward-in, the innermost cell being the whole ball of
    radius 2**-j0 n.
    """
    d = chebyshev(x, y)
    if (1 << (j + 2)) * d > n:
        raise ValueError(f"{y} outside the local net of {x} at scale j={j}")
    m = shell_index(n, x, y)
    if m < j + 2:
        raise ValueError("inconsistent local shell")  # unreachable given the guard
    return m


def restricted_rects(n: int) -> dict[str, Rect]:
    """The six side rectangles used by the tunneled arm events.

    R1..R4 sit on the left, bottom, right and top sides (counterclockwise
    from the left); S2 and S4 are the full-width bottom and top slabs.
    Bounds n/2 are floored.
    """
    if n < 4:
        raise ValueError("n must be >= 4")
    h = n // 2
    return {
        "R1": Rect(-n, -h, -h, h),
        "R2": Rect(-h, h, -n, -h),
        "R3": Rect(h, n, -h, h),
        "R4": Rect(-h, h, h, n),
        "S2": Rect(-n, n, -n, -h),
        "S4": Rect(-n, n, h, n),
    }


_SIDE_TO_AXIS = {"right": (1, 0), "left": (-1, 0), "top": (0, 1), "bottom": (0, -1)}


def semi_ring(center: Vertex, radius: int, removed_side: str) -> list[Vertex]:
    """Ring of the given radius minus the removed side's row/column, ordered
    counterclockwise from one end of the removed side to the other."""
    cx, cy = center
    r = radius
    ax, ay = _SIDE_TO_AXIS[removed_side]
    # Counterclockwise ring starting just after the removed side's exit corner.
    full: list[Vertex] = []
    for t in range(-r, r + 1):          # right column, bottom to top
        full.append((cx + r, cy + t))
    for t in range(r - 1, -r - 1, -1):  # top row, right to left
        full.append((cx + t, cy + r))
    for t in range(r - 1, -r - 1, -1):  # left column, top to bottom
        full.append((cx - r, cy + t))
    for t in range(-r + 1, r):          # bottom row, left to right
        full.append((cx + t, cy - r))
    if removed_side == "right":
        line = lambda v: v[0] == cx + r
    elif removed_side == "left":
        line = lambda v: v[0] == cx - r
    elif removed_side == "top":
        line = lambda v: v[1] == cy + r
    else:
        line = lambda v: v[1] == cy - r
    kept = [v for v in full if not line(v)]
    # Rotate the kept arc so that it starts adjacent to the removed side and
    # runs counterclockwise to the other end.
    if removed_side == "right":
        start_key = lambda v: v[1] == cy + r and v[0] == cx + r - 1
    elif removed_side == "top":
        start_key = lambda v: v[0] == cx - r and v[1] == cy + r - 1
    elif removed_side == "left":
        start_key = lambda v: v[1] == cy - r and v[0] == cx - r + 1
    else:
        start_key = lambda v: v[0] == cx + r and v[1] == cy - r + 1
    for i, v in enumerate(kept):
        if start_key(v):
            return kept[i:] + kept[:i]
    return kept


@dataclass(frozen=True)
class Horseshoe:
    """Region between two boxes sharing a centered edge on one side.

    ``inner_boundary`` is the semi-ring one step outside the inner box and
    ``outer_boundary`` the semi-ring of the outer box itself, both with the
    shared-side row/column removed and ordered counterclockwise.
    """

    inner: Box
    outer: Box
    side: str
    inner_boundary: tuple[Vertex, ...]
    outer_boundary: tuple[Vertex, ...]

    def region(self) -> set[Vertex]:
        inner = self.inner
        return {v for v in self.outer.vertices() if v not in inner}


def make_horseshoe(n: int, center: Vertex, rho: int, nu: int, side: str) -> Horseshoe:
    """Horseshoe between B(center, 2**rho) and the box of radius 2**nu sharing
    the same ``side`` edge line on the boundary of the ambient box of radius n.

    Requires 2**rho <= 2**nu <= n and the inner box's attachment edge to lie
    on the ambient boundary.
    """
    if side not in _SIDE_TO_AXIS:
        raise ValueError(f"unknown side {side!r}")
    r1, r2 = 1 << rho, 1 << nu
    if not (r1 <= r2 <= n):
        raise ValueError("need 2**rho <= 2**nu <= n")
    ax, ay = _SIDE_TO_AXIS[side]
    cx, cy = center
    if ax:
        attached = cx + ax * r1 == ax * n
    else:
        attached = cy + ay * r1 == ay * n
    if not attached:
        raise ValueError("inner box attachment edge must lie on the ambient boundary")
    # Outer box: same attachment line, centered on the inner box's edge.
    if ax:
        c2 = (ax * (n - r2), cy)
        if abs(cy) + r2 > n:
            raise ValueError("outer box does not fit in the ambient box")
    else:
        c2 = (cx, ay * (n - r2))
        if abs(cx) + r2 > n:
            raise ValueError("outer box does not fit in the ambient box")
    inner = Box(center, r1)
    outer = Box(c2, r2)
    if r1 == r2:
        ib: tuple[Vertex, ...] = ()
        ob: tuple[Vertex, ...] = ()
    else:
        ib = tuple(semi_ring(center, r1 + 1, side))
        ob = tuple(semi_ring(c2, r2, side))
    return Horseshoe(inner=inner, outer=outer, side=side,
                     inner_boundary=ib, outer_boundary=ob)

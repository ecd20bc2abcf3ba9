"""Near-to chains over vertex tuples, the nested root decomposition, the
disjoint box family it induces, and the gap-based separating rectangle.

Everything here is pure integer geometry on a box of radius n: no
configurations are involved.  Radii of the form 2**-k * n are floored; shell
memberships are exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .geometry import (Box, Rect, Vertex, annulus_index, chebyshev,
                       dyadic_radius, shell_index)


def choose_c(tau: int) -> int:
    """Smallest chain-scale constant c >= 2 for tuples of size tau.

    Sufficient conditions: (tau-1) * 2**(1-2c) <= 1/8 (chains stay within one
    shell of their root) and 8 * tau * 2**-(2c+4) < 1 (boxes stay clear)."""
    if tau < 1:
        raise ValueError("tau must be >= 1")
    c = 2
    while not ((tau - 1) * (1 << 4) <= (1 << (2 * c))
               and 8 * tau < (1 << (2 * c + 4))):
        c += 1
    return c


@dataclass(frozen=True)
class VertexTuple:
    """Distinct sites of the box of radius n, sorted by ring index (ties keep
    the input order), with the chain-scale constant attached."""

    n: int
    vertices: tuple[Vertex, ...]
    c: int
    ring_indices: tuple[int, ...]

    @classmethod
    def build(cls, n: int, vertices, c: int | None = None) -> "VertexTuple":
        vs = list(vertices)
        if len(set(vs)) != len(vs):
            raise ValueError("tuple vertices must be distinct")
        if c is None:
            c = choose_c(len(vs))
        order = sorted(range(len(vs)), key=lambda i: (annulus_index(n, vs[i]), i))
        vs = tuple(vs[i] for i in order)
        js = tuple(annulus_index(n, v) for v in vs)
        return cls(n=n, vertices=vs, c=c, ring_indices=js)


@dataclass
class ChainNode:
    vertex: Vertex
    label: tuple[int, ...]  # child indices along the path from the root; () = root
    m: int                  # shell around the parent; ring index for roots
    children: list["ChainNode"] = field(default_factory=list)

    def walk(self):
        yield self
        for ch in self.children:
            yield from ch.walk()

    def box_exponent(self) -> int:
        """m(w): the first child's shell if a child exists, else own m."""
        return self.children[0].m if self.children else self.m


@dataclass
class ChainGraph:
    n: int
    c: int
    roots: list[ChainNode]

    def nodes(self):
        for r in self.roots:
            yield from r.walk()


def _near_radius(n: int, c: int, shell: int) -> int:
    return dyadic_radius(shell + 2 * c, n)


def _chained_to(target_idx: int, pool: list[int], all_idx: list[int],
                reaches) -> set[int]:
    """Members of ``pool`` with a relation chain (through any tuple vertex)
    to the target."""
    # reverse reachability in the relation digraph
    frontier = [target_idx]
    reached = {target_idx}
    while frontier:
        u = frontier.pop()
        for v in all_idx:
            if v not in reached and reaches(v, u):
                reached.add(v)
                frontier.append(v)
    return {v for v in pool if v in reached and v != target_idx}


def build_chain_graph(tup: VertexTuple) -> ChainGraph:
    """Greedy root extraction under the near-to relation, then the recursive
    local decomposition of each root's chained set.

    Ties for distance-minimizing choices break to the lexicographically
    smallest site; subsequent local roots are taken deepest-shell-first.
    """
    n, c = tup.n, tup.c
    vs = tup.vertices
    js = tup.ring_indices
    idx = list(range(len(vs)))

    def near(v: int, u: int) -> bool:
        # v is near to u: v in B(u, 2**-(j_u + 2c) n)
        return v != u and chebyshev(vs[v], vs[u]) <= _near_radius(n, c, js[u])

    unassigned = set(idx)
    roots: list[ChainNode] = []
    root_members: list[tuple[int, set[int]]] = []
    while unassigned:
        e = min(unassigned)
        unassigned.discard(e)
        members = _chained_to(e, sorted(unassigned), idx, near)
        unassigned -= members
        root_members.append((e, members))

    def decompose(parent: int, pool: set[int], prefix: tuple[int, ...]
                  ) -> list[ChainNode]:
        if not pool:
            return []
        pv = vs[parent]

        def local_rel(v: int, u: int) -> bool:
            if v == u:
                return False
            shell_u = shell_index(n, pv, vs[u])
            return chebyshev(vs[v], vs[u]) <= _near_radius(n, c, shell_u)

        ordering = sorted(pool, key=lambda i: (-shell_index(n, pv, vs[i]),
                                               chebyshev(vs[i], pv), vs[i]))
        children: list[ChainNode] = []
        remaining = list(ordering)
        first = True
        while remaining:
            if first:
                r = min(remaining, key=lambda i: (chebyshev(vs[i], pv), vs[i]))
                first = False
            else:
                r = remaining[0]
            remaining.remove(r)
            members = _chained_to(r, remaining, sorted(pool), local_rel)
            remaining = [i for i in remaining if i not in members]
            label = prefix + (len(children) + 1,)
            node = ChainNode(vertex=vs[r], label=label,
                             m=shell_index(n, pv, vs[r]))
            node.children = decompose(r, members, label)
            children.append(node)
        return children

    for e, members in root_members:
        root = ChainNode(vertex=vs[e], label=(), m=js[e])
        root.children = decompose(e, members, ())
        roots.append(root)
    return ChainGraph(n=n, c=c, roots=roots)


def chain_inequalities_hold(graph: ChainGraph) -> bool:
    """The shell-index inequalities of the decomposition: each first child at
    least 2c deeper than its parent, later children at least c deeper, and
    children shells non-increasing."""
    c = graph.c
    for node in graph.nodes():
        base = node.m
        last = None
        for k, ch in enumerate(node.children):
            need = 2 * c if k == 0 else c
            if ch.m < base + need:
                return False
            if last is not None and ch.m > last:
                return False
            last = ch.m
    return True


@dataclass
class BoxFamily:
    graph: ChainGraph
    s: int
    boxes: list[tuple[ChainNode, Box]]


def disjoint_box_family(graph: ChainGraph) -> BoxFamily:
    """Boxes B(w, floor(2**-(m(w)+s) n)) at every graph vertex, s = 2c + 4;
    raises if any two overlap."""
    s = 2 * graph.c + 4
    n = graph.n
    boxes = []
    for node in graph.nodes():
        r = dyadic_radius(node.box_exponent() + s, n)
        boxes.append((node, Box(node.vertex, r)))
    for i in range(len(boxes)):
        for j in range(i + 1, len(boxes)):
            bi, bj = boxes[i][1], boxes[j][1]
            if chebyshev(bi.center, bj.center) <= bi.radius + bj.radius:
                raise AssertionError(
                    f"box overlap between {boxes[i][0].label} at {bi.center} "
                    f"and {boxes[j][0].label} at {bj.center}")
    return BoxFamily(graph=graph, s=s, boxes=boxes)


@dataclass(frozen=True)
class SeparationInput:
    anchor: Vertex
    boxes: tuple[Box, ...]
    scale: int | None = None  # override for the gap-construction scale

    def __post_init__(self) -> None:
        for b in self.boxes:
            if self.anchor in b:
                raise ValueError("anchor must lie outside every box")

    def distance_scale(self) -> int:
        if self.scale is not None:
            return self.scale
        return max(chebyshev(b.center, self.anchor) for b in self.boxes)


def separating_rectangle(inp: SeparationInput) -> Rect | None:
    """A nearly-square rectangle around the anchor whose sides pass through
    coordinate gaps, so every box lies entirely inside or entirely outside.

    Half-sides land between scale/10 and scale/5 and the center sits within
    scale/20 of the anchor.  Returns None when the diameter hypothesis
    (16 * sum of box diameters <= scale, with room for the integer grid)
    fails.
    """
    D = inp.distance_scale()
    total_diam = sum(2 * b.radius for b in inp.boxes)
    if 16 * total_diam > D or D < 27 * (len(inp.boxes) + 1):
        return None
    ax, ay = inp.anchor
    lo, hi = -(-D // 10), D // 5  # ceil, floor

    def pick(center: int, spans: list[tuple[int, int]], positive: bool) -> int | None:
        # a box straddles a max-side at X iff min <= X < max, and a min-side
        # at X iff min < X <= max
        if positive:
            rng = range(center + lo, center + hi + 1)
            bad = lambda a, b, cand: a <= cand < b
        else:
            rng = range(center - lo, center - hi - 1, -1)
            bad = lambda a, b, cand: a < cand <= b
        for cand in rng:
            if all(not bad(a, b, cand) for a, b in spans):
                return cand
        return None

    xspans = [(b.center[0] - b.radius, b.center[0] + b.radius) for b in inp.boxes]
    yspans = [(b.center[1] - b.radius, b.center[1] + b.radius) for b in inp.boxes]
    x_hi = pick(ax, xspans, True)
    x_lo = pick(ax, xspans, False)
    y_hi = pick(ay, yspans, True)
    y_lo = pick(ay, yspans, False)
    if None in (x_hi, x_lo, y_hi, y_lo):
        raise RuntimeError("gap search failed despite the diameter hypothesis")
    return Rect(x_lo, x_hi, y_lo, y_hi)


def box_inside(b: Box, r: Rect) -> bool:
    return (r.x_min <= b.center[0] - b.radius
            and b.center[0] + b.radius <= r.x_max
            and r.y_min <= b.center[1] - b.radius
            and b.center[1] + b.radius <= r.y_max)


def box_outside(b: Box, r: Rect) -> bool:
    return (b.center[0] + b.radius < r.x_min
            or b.center[0] - b.radius > r.x_max
            or b.center[1] + b.radius < r.y_min
            or b.center[1] - b.radius > r.y_max)


def proposition2_rectangle(graph: ChainGraph, root: int = 0
                           ) -> tuple[Rect, int, list[Box]] | None:
    """Separating rectangle for one root's family at the near-to scale
    D = 2**-(j + 2c) n, with the non-root boxes shrunk just enough to meet
    the diameter hypothesis.  Returns (rectangle, shrink exponent, shrunk
    boxes)."""
    fam = disjoint_box_family(graph)
    rnode = graph.roots[root]
    comp = set(id(x) for x in rnode.walk())
    others = [(node, b) for node, b in fam.boxes
              if id(node) in comp and node is not rnode]
    if not others:
        return None
    D = dyadic_radius(rnode.m + 2 * graph.c, graph.n)
    c0 = 0
    while True:
        shrunk = [Box(b.center, b.radius >> c0) for _, b in others]
        if 16 * sum(2 * s.radius for s in shrunk) <= D:
            break
        c0 += 1
    inp = SeparationInput(anchor=rnode.vertex, boxes=tuple(shrunk), scale=D)
    rect = separating_rectangle(inp)
    if rect is None:
        return None
    return rect, c0, shrunk

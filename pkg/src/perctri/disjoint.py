"""Vertex-disjoint path detection and block-cut decomposition.

The flow routines answer "how many vertex-disjoint chains exist" questions on
small induced subgraphs of the lattice: every lattice site becomes a
capacity-1 node (split into in/out halves), designated endpoint sites are
state-exempt, and optional sink aggregators with capacity 1 force one chain
per target side.  Flow values are never needed beyond 2 or 3, so plain BFS
augmentation is used.
"""

from __future__ import annotations

from collections import deque

from .geometry import Vertex, NEIGHBOR_OFFSETS


class _FlowNet:
    def __init__(self) -> None:
        self.to: list[int] = []
        self.cap: list[int] = []
        self.adj: list[list[int]] = []

    def add_node(self) -> int:
        self.adj.append([])
        return len(self.adj) - 1

    def add_edge(self, u: int, v: int, c: int) -> None:
        self.adj[u].append(len(self.to))
        self.to.append(v)
        self.cap.append(c)
        self.adj[v].append(len(self.to))
        self.to.append(u)
        self.cap.append(0)

    def maxflow(self, s: int, t: int, limit: int) -> int:
        flow = 0
        to, cap, adj = self.to, self.cap, self.adj
        while flow < limit:
            prev_edge = [-1] * len(adj)
            prev_edge[s] = -2
            q = deque([s])
            while q:
                u = q.popleft()
                if u == t:
                    break
                for e in adj[u]:
                    v = to[e]
                    if cap[e] > 0 and prev_edge[v] == -1:
                        prev_edge[v] = e
                        q.append(v)
            if prev_edge[t] == -1:
                break
            v = t
            while v != s:
                e = prev_edge[v]
                cap[e] -= 1
                cap[e ^ 1] += 1
                v = to[e ^ 1]
            flow += 1
        return flow


def _neighbors(v: Vertex) -> list[Vertex]:
    x, y = v
    return [(x + dx, y + dy) for dx, dy in NEIGHBOR_OFFSETS]


def disjoint_crossings(interior: set[Vertex],
                       sources: set[Vertex],
                       sinks: set[Vertex],
                       need: int = 2,
                       sink_groups: list[tuple[set[Vertex], int]] | None = None,
                       ) -> int:
    """Number (capped at ``need``) of fully vertex-disjoint chains from the
    source set to the sink set whose interior vertices lie in ``interior``.

    Sources and sinks are endpoint sites (capacity 1 each, no state demanded
    here; the caller prefilters ``interior`` by state).  A chain may consist
    of a source directly adjacent to a sink.  When ``sink_groups`` is given,
    each group is throttled to its own capacity, so a flow of 2 over two
    groups means one chain per group.
    """
    net = _FlowNet()
    node_in: dict[Vertex, int] = {}
    node_out: dict[Vertex, int] = {}

    def split(v: Vertex, c: int) -> None:
        node_in[v] = net.add_node()
        node_out[v] = net.add_node()
        net.add_edge(node_in[v], node_out[v], c)

    sources = set(sources)
    sinks = set(sinks) - sources
    interior = set(interior) - sources - sinks
    touchable = set()
    for v in interior | sources:
        for w in _neighbors(v):
            if w in sinks:
                touchable.add(w)
    sinks = touchable

    S = net.add_node()
    T = net.add_node()
    for v in sources:
        split(v, 1)
        net.add_edge(S, node_in[v], 1)
    for v in sinks:
        split(v, 1)
    for v in interior:
        split(v, 1)
    sink_set = sinks
    for v in interior | sources:
        for w in _neighbors(v):
            if w in sink_set or w in interior:
                net.add_edge(node_out[v], node_in[w], 1)
    if sink_groups is None:
        for v in sinks:
            net.add_edge(node_out[v], T, 1)
    else:
        for group, c in sink_groups:
            agg = net.add_node()
            net.add_edge(agg, T, c)
            for v in group:
                if v in sink_set:
                    net.add_edge(node_out[v], agg, 1)
    return net.maxflow(S, T, need)


def arms_from_point(x: Vertex, allowed: set[Vertex],
                    target_a: set[Vertex], target_b: set[Vertex],
                    ) -> int:
    """Flow value (capped at 2) from x through ``allowed`` sites into the two
    target sides, one unit per side.  ``allowed`` excludes x; target sites
    must belong to ``allowed`` to be usable as chain endpoints."""
    net = _FlowNet()
    node_in: dict[Vertex, int] = {}
    node_out: dict[Vertex, int] = {}
    for v in allowed:
        node_in[v] = net.add_node()
        node_out[v] = net.add_node()
        net.add_edge(node_in[v], node_out[v], 1)
    S = net.add_node()
    T = net.add_node()
    x_node = net.add_node()
    net.add_edge(S, x_node, 2)
    for w in _neighbors(x):
        if w in node_in:
            net.add_edge(x_node, node_in[w], 1)
    for v in allowed:
        for w in _neighbors(v):
            if w in node_in:
                net.add_edge(node_out[v], node_in[w], 1)
    agg_a = net.add_node()
    agg_b = net.add_node()
    net.add_edge(agg_a, T, 1)
    net.add_edge(agg_b, T, 1)
    for v in allowed & target_a:
        net.add_edge(node_out[v], agg_a, 1)
    for v in allowed & target_b:
        net.add_edge(node_out[v], agg_b, 1)
    return net.maxflow(S, T, 2)


def point_to_ring_arms(x: Vertex, interior: set[Vertex],
                       ring_groups: list[tuple[set[Vertex], int]],
                       need: int = 2) -> int:
    """Vertex-disjoint chains from the exempt site x through ``interior``
    onto exempt ring sites, throttled per ring group.

    Ring sites have capacity 1 (two chains may not share a ring endpoint);
    x itself carries capacity ``need``.  A chain may step from x directly
    onto a ring site.
    """
    ring_all: set[Vertex] = set()
    for group, _ in ring_groups:
        ring_all |= group
    interior = set(interior) - ring_all - {x}
    # only ring sites adjacent to the usable graph can be endpoints
    touchable = set()
    for v in interior:
        for w in _neighbors(v):
            if w in ring_all:
                touchable.add(w)
    for w in _neighbors(x):
        if w in ring_all:
            touchable.add(w)

    net = _FlowNet()
    node_in: dict[Vertex, int] = {}
    node_out: dict[Vertex, int] = {}

    def split(v: Vertex) -> None:
        node_in[v] = net.add_node()
        node_out[v] = net.add_node()
        net.add_edge(node_in[v], node_out[v], 1)

    S = net.add_node()
    T = net.add_node()
    x_node = net.add_node()
    net.add_edge(S, x_node, need)
    for v in interior:
        split(v)
    for v in touchable:
        split(v)
    for w in _neighbors(x):
        if w in node_in:
            net.add_edge(x_node, node_in[w], 1)
    for v in interior:
        for w in _neighbors(v):
            if w in node_in:
                net.add_edge(node_out[v], node_in[w], 1)
    for group, c in ring_groups:
        grp = group & touchable
        if not grp:
            continue
        agg = net.add_node()
        net.add_edge(agg, T, c)
        for v in grp:
            net.add_edge(node_out[v], agg, 1)
    return net.maxflow(S, T, need)


def biconnected_blocks(adj: dict, nodes) -> list[set]:
    """Biconnected components (as vertex sets) of an undirected simple graph
    given by an adjacency dict; iterative Hopcroft-Tarjan."""
    disc: dict = {}
    low: dict = {}
    blocks: list[set] = []
    estack: list[tuple] = []
    timer = 0
    for s in nodes:
        if s in disc or s not in adj:
            continue
        disc[s] = low[s] = timer
        timer += 1
        work = [(s, None, iter(adj[s]))]
        while work:
            v, parent, it = work[-1]
            descended = False
            for w in it:
                if w == parent:
                    continue
                if w not in disc:
                    estack.append((v, w))
                    disc[w] = low[w] = timer
                    timer += 1
                    work.append((w, v, iter(adj[w])))
                    descended = True
                    break
                if disc[w] < disc[v]:
                    estack.append((v, w))
                    if disc[w] < low[v]:
                        low[v] = disc[w]
            if descended:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                if low[v] < low[u]:
                    low[u] = low[v]
                if low[v] >= disc[u]:
                    comp: set = set()
                    while estack:
                        e = estack.pop()
                        comp.add(e[0])
                        comp.add(e[1])
                        if e == (u, v):
                            break
                    if comp:
                        blocks.append(comp)
    return blocks


def simple_path_vertices(adj: dict, s, t) -> set:
    """All vertices lying on at least one simple s-t path.

    Equals the union of the biconnected blocks along the s-t chain of the
    block-cut tree (s and t excluded from the result).
    """
    if s not in adj or t not in adj:
        return set()
    blocks = biconnected_blocks(adj, list(adj))
    containing: dict = {}
    for i, blk in enumerate(blocks):
        for v in blk:
            containing.setdefault(v, []).append(i)
    if s not in containing or t not in containing:
        return set()
    # BFS over the bipartite incidence structure: vertex nodes <-> block ids.
    start, goal = ("v", s), ("v", t)
    prev: dict = {start: None}
    q = deque([start])
    found = False
    while q and not found:
        node = q.popleft()
        if node == goal:
            found = True
            break
        kind, payload = node
        if kind == "v":
            for i in containing.get(payload, ()):
                nxt = ("b", i)
                if nxt not in prev:
                    prev[nxt] = node
                    q.append(nxt)
        else:
            for v in blocks[payload]:
                if len(containing.get(v, ())) > 1 or v in (s, t):
                    nxt = ("v", v)
                    if nxt not in prev:
                        prev[nxt] = node
                        q.append(nxt)
    if goal not in prev:
        return set()
    out: set = set()
    node = goal
    while node is not None:
        kind, payload = node
        if kind == "b":
            out |= blocks[payload]
        node = prev[node]
    out.discard(s)
    out.discard(t)
    return out

import numpy as np
import pytest

from conftest import all_open, all_closed, from_sites

from perctri.geometry import NEIGHBOR_OFFSETS
from perctri.percolation import (OPEN, box_rect, config_from_bits,
                                 crossing_exists, sample_config)
from perctri.features import (
    below_gamma_region, explore_interface, feature_counts, feature_sets,
    highest_crossing_set, lowest_crossing, lowest_crossing_by_definition,
    on_some_crossing_set, order_gamma, pioneering_set, pivotal_direct,
    pivotal_flip_oracle, pivotal_set,
)


def _enumerate_crossing_vertices(config):
    """Brute force: union of vertex sets of all simple open left-right
    crossings (depth-first over simple paths)."""
    n = config.n
    opens = {(x, y) for x in range(-n, n + 1) for y in range(-n, n + 1)
             if config.is_open((x, y))}
    out = set()
    stack = []
    for start in sorted(v for v in opens if v[0] == -n):
        stack.append((start, frozenset({start})))
        while stack:
            v, path = stack.pop()
            if v[0] == n:
                out |= path  # a crossing; longer extensions still count
            for dx, dy in NEIGHBOR_OFFSETS:
                w = (v[0] + dx, v[1] + dy)
                if w in opens and w not in path:
                    stack.append((w, path | {w}))
    return out


def _brute_lowest(config):
    """All simple crossings; the lowest is the one inside every other
    crossing's on-or-beneath region."""
    from scipy import ndimage
    from perctri.percolation import TRI_STRUCTURE
    n = config.n
    opens = {(x, y) for x in range(-n, n + 1) for y in range(-n, n + 1)
             if config.is_open((x, y))}
    crossings = []
    stack = []
    for start in sorted(v for v in opens if v[0] == -n):
        stack.append((start, (start,)))
        while stack:
            v, path = stack.pop()
            if v[0] == n:
                crossings.append(path)
            for dx, dy in NEIGHBOR_OFFSETS:
                w = (v[0] + dx, v[1] + dy)
                if w in opens and w not in path:
                    stack.append((w, path + (w,)))
    if not crossings:
        return None

    def on_or_beneath_region(path):
        w = 2 * n + 1
        blocked = np.zeros((w, w), dtype=bool)
        for x, y in path:
            blocked[y + n, x + n] = True
        free = ~blocked
        lab, _ = ndimage.label(free, structure=TRI_STRUCTURE)
        seeds = np.unique(lab[0, :][free[0, :]])
        flags = np.zeros(lab.max() + 1, dtype=bool)
        flags[seeds[seeds > 0]] = True
        below = flags[lab] & free
        region = {(x, y) for x in range(-n, n + 1) for y in range(-n, n + 1)
                  if below[y + n, x + n]}
        return region | set(path)

    regions = [on_or_beneath_region(p) for p in crossings]
    qualifying = [p for p in crossings
                  if all(set(p) <= r for r in regions)]
    assert qualifying
    # chord shortcuts of the lowest crossing also qualify; the crossing
    # itself is the maximal qualifying vertex set
    lowest = max(qualifying, key=lambda p: len(p))
    for p in qualifying:
        assert set(p) <= set(lowest)
    return lowest


def test_on_some_crossing_all_open():
    n = 2
    c = all_open(n)
    assert on_some_crossing_set(c) == frozenset(
        (x, y) for x in range(-n, n + 1) for y in range(-n, n + 1))


def test_on_some_crossing_none():
    assert on_some_crossing_set(all_closed(2)) == frozenset()


def test_on_some_crossing_exhaustive_n1():
    for bits in range(512):
        arr = np.array([(bits >> i) & 1 for i in range(9)], dtype=np.uint8)
        c = config_from_bits(1, arr)
        assert on_some_crossing_set(c) == _enumerate_crossing_vertices(c), bits


def test_on_some_crossing_brute_n2(rng):
    for _ in range(40):
        bits = int(rng.integers(0, 1 << 25))
        arr = np.array([(bits >> i) & 1 for i in range(25)], dtype=np.uint8)
        c = config_from_bits(2, arr)
        assert on_some_crossing_set(c) == _enumerate_crossing_vertices(c)


def test_lowest_crossing_all_open():
    n = 2
    g = lowest_crossing(all_open(n))
    assert g == [(x, -n) for x in range(-n, n + 1)]
    assert feature_counts(all_open(n)) == (5, 5, 0)


def test_lowest_crossing_middle_row():
    c = from_sites(1, [(-1, 0), (0, 0), (1, 0)])
    assert set(lowest_crossing(c)) == {(-1, 0), (0, 0), (1, 0)}
    assert pivotal_set(c) == {(-1, 0), (0, 0), (1, 0)}


def test_lowest_is_brute_minimal_exhaustive_n1():
    for bits in range(512):
        arr = np.array([(bits >> i) & 1 for i in range(9)], dtype=np.uint8)
        c = config_from_bits(1, arr)
        brute = _brute_lowest(c)
        walk = lowest_crossing(c)
        if brute is None:
            assert walk == []
        else:
            assert set(walk) == set(brute), bits


def test_lowest_is_brute_minimal_sampled_n2(rng):
    for _ in range(30):
        bits = int(rng.integers(0, 1 << 25))
        arr = np.array([(bits >> i) & 1 for i in range(25)], dtype=np.uint8)
        c = config_from_bits(2, arr)
        brute = _brute_lowest(c)
        walk = lowest_crossing(c)
        if brute is None:
            assert walk == []
        else:
            assert set(walk) == set(brute)


@pytest.mark.parametrize("n", [4, 8])
def test_walk_matches_definition(n):
    for t in range(250):
        c = sample_config(n, 246, t)
        assert set(lowest_crossing(c)) == lowest_crossing_by_definition(c)


def test_pioneering_all_open():
    n = 2
    assert pioneering_set(all_open(n)) == frozenset(
        (x, -n) for x in range(-n, n + 1))


def test_pioneering_no_crossing():
    assert pioneering_set(all_closed(2)) == frozenset()


def test_pioneering_exhaustive_n1():
    # direct per-site event evaluation as an independent oracle
    def oracle(c):
        out = set()
        full = [(x, y) for x in range(-1, 2) for y in range(-1, 2)]
        opens = {v for v in full if c.is_open(v)}
        for v in opens:
            comp = {v}
            stack = [v]
            while stack:
                u = stack.pop()
                for dx, dy in NEIGHBOR_OFFSETS:
                    w = (u[0] + dx, u[1] + dy)
                    if w in opens and w not in comp:
                        comp.add(w)
                        stack.append(w)
            if not any(u[0] == -1 for u in comp):
                continue
            if not any(u[0] == 1 for u in comp):
                continue
            from perctri.percolation import closed_arm_to_side
            if closed_arm_to_side(c, v, "bottom"):
                out.add(v)
        return out

    for bits in range(512):
        arr = np.array([(bits >> i) & 1 for i in range(9)], dtype=np.uint8)
        c = config_from_bits(1, arr)
        assert pioneering_set(c) == oracle(c), bits


def test_exploration_terminals():
    n = 4
    assert explore_interface(all_open(n)).terminal_side == "right"
    assert explore_interface(all_closed(n)).terminal_side == "top"
    t = explore_interface(all_open(n))
    assert t.discovered_open <= {(x, y) for x in range(-n, n + 1)
                                 for y in (-n, -n + 1)}


@pytest.mark.parametrize("n", [8])
def test_exploration_matches_crossing(n):
    for t in range(300):
        c = sample_config(n, 31415, t)
        trace = explore_interface(c)
        has = crossing_exists(c, box_rect(n), OPEN, "h")
        assert (trace.terminal_side == "right") == has


def test_exploration_f_agreement_report():
    # the discovered-open set usually but not always equals the pioneering
    # set; the event-based set is the normative one, so only report the rate
    n = 8
    agree = 0
    total = 400
    for t in range(total):
        c = sample_config(n, 2718, t)
        if explore_interface(c).discovered_open == pioneering_set(c):
            agree += 1
    print(f"\nexploration/pioneering agreement rate at n={n}: "
          f"{agree}/{total} = {agree / total:.3f}")


def test_pivotal_triple_exhaustive_n1():
    for bits in range(512):
        arr = np.array([(bits >> i) & 1 for i in range(9)], dtype=np.uint8)
        c = config_from_bits(1, arr)
        a = pivotal_set(c)
        assert a == pivotal_direct(c) == pivotal_flip_oracle(c), bits
        assert a == frozenset(set(lowest_crossing(c)) & highest_crossing_set(c))


@pytest.mark.parametrize("n", [4, 8])
def test_pivotal_triple_sampled(n):
    for t in range(150):
        c = sample_config(n, 161, t)
        a = pivotal_set(c)
        assert a == pivotal_direct(c) == pivotal_flip_oracle(c)


def test_flip_oracle_two_disjoint_crossings():
    # two vertex-disjoint crossings: no single flip can cut both
    n = 2
    c = from_sites(n, [(x, -2) for x in range(-2, 3)]
                   + [(x, 2) for x in range(-2, 3)])
    assert pivotal_flip_oracle(c) == frozenset()
    assert pivotal_set(c) == frozenset()


def test_reflection_equivariance():
    for t in range(120):
        c = sample_config(6, 99991, t)
        r = c.point_reflected()
        L = set(lowest_crossing(c))
        H = {(-x, -y) for (x, y) in highest_crossing_set(r)}
        # reflecting swaps the roles of lowest and highest
        assert {(-x, -y) for (x, y) in lowest_crossing(r)} == \
            highest_crossing_set(c)
        assert H == L
        q = pivotal_set(c)
        q_r = {(-x, -y) for (x, y) in pivotal_set(r)}
        assert q == q_r


def test_below_gamma_has_no_crossing():
    n = 8
    for t in range(150):
        c = sample_config(n, 888, t)
        gamma = lowest_crossing(c)
        if not gamma:
            continue
        region = below_gamma_region(c, gamma)
        sub = region & c.open_mask()
        from scipy import ndimage
        from perctri.percolation import TRI_STRUCTURE
        lab, _ = ndimage.label(sub, structure=TRI_STRUCTURE)
        left = set(np.unique(lab[:, 0][sub[:, 0]])) - {0}
        right = set(np.unique(lab[:, -1][sub[:, -1]])) - {0}
        assert not (left & right)


def test_feature_counts_all_closed():
    assert feature_counts(all_closed(3)) == (0, 0, 0)


def test_feature_sets_inclusions():
    for t in range(100):
        fs = feature_sets(sample_config(6, 4242, t))
        assert fs.Q <= fs.L <= fs.F
        assert fs.L == frozenset(fs.gamma)


def test_order_gamma_handles_chords():
    # a dip below a chord: (0,0)-(1,-1) is a lattice edge but the path
    # runs (0,0), (0,-1), (1,-1)
    L = {(-1, 1), (0, 0), (0, -1), (1, -1)}
    out = order_gamma(L, 1)
    assert out == [(-1, 1), (0, 0), (0, -1), (1, -1)]
    for a, b in zip(out, out[1:]):
        assert b in {(a[0] + dx, a[1] + dy) for dx, dy in NEIGHBOR_OFFSETS}


def test_order_gamma_rejects_non_path():
    with pytest.raises(ValueError):
        order_gamma({(-1, 0), (1, 0)}, 1)  # disconnected columns
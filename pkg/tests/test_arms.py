import numpy as np
import pytest

from conftest import all_open, all_closed, closed_sites

from perctri.geometry import Box, make_horseshoe
from perctri.percolation import (CLOSED, OPEN, config_from_bits, sample_config)
from perctri.arms import (
    ArmSpec, RestrictedEvaluator, annulus_arm_event, annulus_arm_profile,
    halfplane_three_arm, horseshoe_three_arm, point_arm_profile,
    restricted_arm_event,
)
from perctri.bitgrid import BitGrid


def test_all_open_has_no_closed_arm():
    assert not annulus_arm_event(all_open(8), ArmSpec(2, (0, 0), 1))


def test_spokes_witness_four_arms():
    n = 8
    c = closed_sites(n, [(0, y) for y in range(1, n + 1)]
                     + [(0, y) for y in range(-n, 0)])
    assert annulus_arm_profile(c, (0, 0), 0) == (2, 2)
    for kappa in (2, 3, 4):
        assert annulus_arm_event(c, ArmSpec(kappa, (0, 0), 0))


def test_annulus_matches_bitgrid_n2(rng):
    bg = BitGrid(2)
    samples = rng.integers(0, 1 << 25, size=400, dtype=np.int64)
    events = bg.center_arm_events(samples)
    for i, bits in enumerate(samples.tolist()):
        c = config_from_bits(2, bg.unpack(bits).reshape(-1))
        for kappa, key in ((2, "U2"), (3, "U3"), (4, "U4")):
            assert annulus_arm_event(c, ArmSpec(kappa, (0, 0), 0)) == \
                bool(events[key][i]), (bits, kappa)


def test_annulus_exact_probability_n1():
    # every chain at radius 1 is a bare two-site chain with exempt ends, so
    # each event holds on all 512 configurations
    g = BitGrid(1)
    for bits in range(0, 512, 7):
        c = config_from_bits(1, g.unpack(bits).reshape(-1))
        assert annulus_arm_event(c, ArmSpec(3, (0, 0), 0))


def test_nesting_invariant(rng):
    # an event to a larger ambient ring implies the event to a smaller one
    for t in range(60):
        big = sample_config(12, 606, t)
        small = config_from_bits(
            6, big.grid[6:-6, 6:-6].reshape(-1).copy())
        for kappa in (2, 3, 4):
            if annulus_arm_event(big, ArmSpec(kappa, (0, 0), 1)):
                assert annulus_arm_event(small, ArmSpec(kappa, (0, 0), 1))


def test_monotone_in_kappa(rng):
    for t in range(80):
        c = sample_config(8, 607, t)
        e2 = annulus_arm_event(c, ArmSpec(2, (0, 0), 1))
        e3 = annulus_arm_event(c, ArmSpec(3, (0, 0), 1))
        e4 = annulus_arm_event(c, ArmSpec(4, (0, 0), 1))
        assert (not e4 or e3) and (not e3 or e2)


def test_pivotal_implies_four_point_arms():
    from perctri.features import pivotal_set
    n = 6
    hits = 0
    for t in range(200):
        c = sample_config(n, 608, t)
        for x in pivotal_set(c):
            if max(abs(x[0]), abs(x[1])) >= n:
                continue
            hits += 1
            o, cl = point_arm_profile(c, x)
            assert o >= 2 and cl >= 2, (t, x)
    assert hits > 10


def test_point_profile_matches_annulus_zero(rng):
    for t in range(120):
        c = sample_config(5, 609, t)
        for x in ((0, 0), (2, -1), (-3, 3)):
            assert point_arm_profile(c, x) == annulus_arm_profile(c, x, 0)


def test_halfplane_witness():
    n, r = 8, 4
    c = closed_sites(n, [(8, y) for y in range(1, r + 1)]
                     + [(8, y) for y in range(-r, 0)])
    assert halfplane_three_arm(c, Box((n - r, 0), r))


def test_halfplane_all_open_false():
    assert not halfplane_three_arm(all_open(8), Box((4, 0), 4))


def test_halfplane_order_matters():
    # two closed chains on the same side of the open one: no separation
    n, r = 8, 4
    # open west ray stays (row 0); both closed rays above it
    c = closed_sites(n, [(8, y) for y in (1, 2)] + [(7, y) for y in (3, 4)])
    # closed chains reach the ring only in the upper arc; open endpoint is
    # not between them
    assert not halfplane_three_arm(c, Box((n - r, 0), r))


def _halfplane_brute(config, rho_box):
    """Exhaustive reference: enumerate pairs of vertex-disjoint closed simple
    paths from y' to the ring with an open-reachable ring site strictly
    between their endpoints."""
    from perctri.geometry import semi_ring, NEIGHBOR_OFFSETS
    n = config.n
    cx, cy = rho_box.center
    r = rho_box.radius
    y_prime = (n, cy)
    ring = list(semi_ring(rho_box.center, r + 1, "right"))
    order = {v: i for i, v in enumerate(ring)}
    inside = {(x, y) for x in range(-n, n + 1) for y in range(-n, n + 1)
              if max(abs(x - cx), abs(y - cy)) <= r and (x, y) != y_prime}

    def chains(state):
        # all simple chains y' -> ring through `state` sites, as
        # (frozenset(interior sites), ring endpoint index)
        found = set()
        stack = [(y_prime, frozenset())]
        while stack:
            v, used = stack.pop()
            for dx, dy in NEIGHBOR_OFFSETS:
                w = (v[0] + dx, v[1] + dy)
                if w in order:
                    found.add((used, order[w]))
                elif (w in inside and w not in used
                      and config.state(w) == state):
                    if len(used) < 11:
                        stack.append((w, used | {w}))
        return found

    open_ends = {e for _, e in chains(OPEN)}
    closed = list(chains(CLOSED))
    for i, (ua, ea) in enumerate(closed):
        for ub, eb in closed[i + 1:]:
            if ua & ub or ea == eb:
                continue
            lo, hi = min(ea, eb), max(ea, eb)
            if any(lo < o < hi for o in open_ends):
                return True
    return False


@pytest.mark.parametrize("seed", [11, 12])
def test_halfplane_matches_brute_force(seed):
    n, r = 3, 2
    box = Box((n - r, 0), r)
    for t in range(150):
        c = sample_config(n, seed, t)
        assert halfplane_three_arm(c, box) == _halfplane_brute(c, box), t


def test_horseshoe_witness():
    shoe = make_horseshoe(8, (6, 0), 1, 3, "right")
    c = closed_sites(8, [(x, 3) for x in range(-8, 9)]
                     + [(x, -3) for x in range(-8, 9)])
    assert horseshoe_three_arm(c, shoe)
    assert not horseshoe_three_arm(all_open(8), shoe)
    assert not horseshoe_three_arm(all_closed(8), shoe)


def test_horseshoe_degenerate_empty():
    shoe = make_horseshoe(8, (6, 0), 1, 1, "right")
    c = sample_config(8, 5, 0)
    assert not horseshoe_three_arm(c, shoe)


def test_restricted_witnesses():
    n = 8
    grid = np.zeros((17, 17), dtype=np.uint8)
    grid[0 + n, :] = 1
    for y in range(-4, 5):
        grid[y + n, -6 + n] = 1
        grid[y + n, 6 + n] = 1
    for y in range(-n, n + 1):
        if y != 0:
            grid[y + n, 0 + n] = 0
    c = config_from_bits(n, grid.reshape(-1))
    assert restricted_arm_event(c, (0, 0), 4)
    assert restricted_arm_event(c, (0, 0), 3)
    assert not restricted_arm_event(all_open(n), (0, 0), 3)

    grid2 = np.zeros((17, 17), dtype=np.uint8)
    for y in range(1, n + 1):
        grid2[y + n, 0 + n] = 1
    grid2[6 + n, :] = 1
    c2 = config_from_bits(n, grid2.reshape(-1))
    assert restricted_arm_event(c2, (0, 0), 2)


def test_restricted_requires_quarter_box():
    with pytest.raises(ValueError):
        restricted_arm_event(all_open(8), (5, 0), 3)


def test_restricted_implies_point_arms():
    # the tunneled event is a sub-event of the unrestricted one
    n = 8
    found = 0
    for t in range(4000):
        c = sample_config(n, 610, t)
        ev = RestrictedEvaluator(c)
        for kappa in (2, 3, 4):
            if ev.event((0, 0), kappa):
                found += 1
                o, cl = point_arm_profile(c, (0, 0))
                assert o >= (2 if kappa >= 3 else 1)
                assert cl >= (2 if kappa == 4 else 1)
        if found > 25:
            break
    assert found > 0
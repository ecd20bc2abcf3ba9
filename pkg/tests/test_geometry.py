import pytest
from hypothesis import given, settings, strategies as st

from perctri.geometry import (
    AnnulusPartition, DualPartition, Rect, annulus_index, boundary,
    box, chebyshev, dual_index, dyadic_radius, interior, local_annulus_index,
    make_horseshoe, neighbors, restricted_rects, ring_count, semi_ring,
    shell_index,
)

coord = st.integers(-500, 500)


def test_neighbors_origin():
    assert neighbors((0, 0)) == {(1, 0), (-1, 0), (0, 1), (0, -1),
                                 (1, -1), (-1, 1)}


def test_neighbors_translation():
    base = neighbors((0, 0))
    assert neighbors((2, 3)) == {(x + 2, y + 3) for x, y in base}


@given(st.tuples(coord, coord), st.tuples(coord, coord))
@settings(max_examples=300)
def test_neighbor_symmetry(u, v):
    assert (u in neighbors(v)) == (v in neighbors(u))


def test_neighbor_count():
    assert len(neighbors((7, -11))) == 6


def test_boundary_box1():
    cells = set(box(1).vertices())
    assert boundary(cells) == cells - {(0, 0)}
    assert interior(cells) == {(0, 0)}


def test_boundary_singleton():
    assert boundary({(3, 4)}) == {(3, 4)}


def test_boundary_box2():
    cells = set(box(2).vertices())
    assert len(boundary(cells)) == 16
    assert len(interior(cells)) == 9


def test_ring_count_values():
    assert [ring_count(n) for n in (1, 2, 3, 4, 5, 8, 9, 16)] == \
        [0, 1, 2, 2, 3, 3, 4, 4]


def test_annulus_index_examples():
    assert annulus_index(8, (0, 0)) == 0
    assert annulus_index(8, (8, 0)) == 3 == ring_count(8)
    assert annulus_index(8, (6, 0)) == 1


def test_annulus_index_outside():
    with pytest.raises(ValueError):
        annulus_index(8, (9, 0))


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8, 16, 31, 32, 33, 64])
def test_annulus_partition_and_size_bound(n):
    part = AnnulusPartition(n)
    cells = part.cells()
    total = sum(len(c) for c in cells)
    assert total == (2 * n + 1) ** 2
    if n > 1:
        assert cells[part.j0] == {v for v in part.index_of
                                  if max(abs(v[0]), abs(v[1])) == n}
    for j, cell in enumerate(cells):
        assert len(cell) * (1 << j) <= 16 * n * n


def test_dual_index_examples():
    assert dual_index(8, (0, 8)) == 0
    top = max(dual_index(8, v) for v in box(8).vertices())
    assert dual_index(8, (8, 8)) == top


@pytest.mark.parametrize("n", [2, 5, 8, 16, 33, 64])
def test_dual_partition_and_compatibility(n):
    dual = DualPartition(n)
    assert len(dual.index_of) == (2 * n + 1) ** 2
    for v, jstar in dual.index_of.items():
        j = annulus_index(n, v)
        assert jstar <= j, (v, j, jstar)


@pytest.mark.parametrize("n", [8, 16, 32, 64, 128, 256])
def test_dual_intersection_bound(n):
    # |A_j ∩ A*_{j*}| <= 64 * 2^(-j-j*) * n^2 for all j* <= j
    counts: dict[tuple[int, int], int] = {}
    for v in box(n).vertices():
        key = (annulus_index(n, v), dual_index(n, v))
        counts[key] = counts.get(key, 0) + 1
    for (j, jstar), cnt in counts.items():
        assert cnt * (1 << (j + jstar)) <= 64 * n * n, (n, j, jstar, cnt)


@pytest.mark.parametrize("n", [5, 8, 16, 64])
def test_annulus_membership_geometry(n):
    # a site of A_j plus any step shorter than 2^-(j+1) n stays in the box:
    # the largest such integer step is (n - 1) >> (j + 1)
    for v in box(n).vertices():
        j = annulus_index(n, v)
        step = (n - 1) >> (j + 1)
        assert max(abs(v[0]), abs(v[1])) + step <= n, (v, j)


def test_local_annulus_examples():
    assert local_annulus_index((0, 0), 0, 64, (10, 0)) == 2
    assert local_annulus_index((5, 5), 0, 64, (5, 5)) == ring_count(64)
    with pytest.raises(ValueError):
        local_annulus_index((0, 0), 0, 64, (17, 0))


@pytest.mark.parametrize("n", [32, 64, 128])
def test_local_annulus_size_bound(n):
    # |a_m| <= 2^(-2m+2) n^2 away from the innermost cell, for dyadic n
    # (integer rounding breaks the constant for other n); the innermost cell
    # of a dyadic box is a full radius-1 ball of 9 sites, which overshoots
    # that bound by a constant
    x = (0, 0)
    counts: dict[int, int] = {}
    r = dyadic_radius(2, n)
    for dx in range(-r, r + 1):
        for dy in range(-r, r + 1):
            m = local_annulus_index(x, 0, n, (dx, dy))
            counts[m] = counts.get(m, 0) + 1
    j0 = ring_count(n)
    for m, cnt in counts.items():
        if m < j0:
            assert cnt * (1 << (2 * m)) <= 4 * n * n
        else:
            assert cnt <= 9


def test_half_distance_boxes_disjoint():
    # y in a_m(x) with m < j0 gives disjoint quarter-distance boxes
    n = 64
    x = (3, -2)
    for y in [(10, 0), (3, 14), (-5, -2), (4, -1)]:
        m = shell_index(n, x, y)
        if m >= ring_count(n):
            continue
        r = dyadic_radius(m + 2, n)
        assert chebyshev(x, y) > 2 * r


def test_restricted_rects_examples():
    r = restricted_rects(8)
    assert r["R1"] == Rect(-8, -4, -4, 4)
    assert r["S4"] == Rect(-8, 8, 4, 8)
    # R2 is R1 rotated a quarter turn
    assert r["R2"] == Rect(-4, 4, -8, -4)
    with pytest.raises(ValueError):
        restricted_rects(3)


def test_horseshoe_region_count():
    shoe = make_horseshoe(16, (16 - 2, 0), 1, 3, "right")
    assert len(shoe.region()) == 17 * 17 - 5 * 5


def test_horseshoe_degenerate():
    shoe = make_horseshoe(16, (14, 0), 1, 1, "right")
    assert shoe.inner_boundary == () and shoe.outer_boundary == ()
    assert shoe.region() == set()


def test_horseshoe_boundaries_disjoint_and_ordered():
    for nu in (2, 3):
        shoe = make_horseshoe(16, (14, 0), 1, nu, "right")
        ib, ob = shoe.inner_boundary, shoe.outer_boundary
        assert set(ib).isdisjoint(ob)
        for ring in (ib, ob):
            for a, b in zip(ring, ring[1:]):
                assert chebyshev(a, b) == 1 and (a in neighbors(b))
        region = shoe.region()
        assert set(ib) <= region and set(ob) <= region


def test_horseshoe_validation():
    with pytest.raises(ValueError):
        make_horseshoe(16, (0, 0), 1, 3, "right")  # not attached
    with pytest.raises(ValueError):
        make_horseshoe(16, (14, 12), 1, 3, "right")  # outer box does not fit


def test_horseshoe_other_sides():
    for side, center in (("left", (-14, 0)), ("top", (0, 14)),
                         ("bottom", (0, -14))):
        shoe = make_horseshoe(16, center, 1, 3, side)
        assert len(shoe.region()) == 17 * 17 - 5 * 5


def test_semi_ring_excludes_removed_side():
    ring = semi_ring((6, 0), 3, "right")
    assert all(v[0] != 9 for v in ring)
    assert len(ring) == 8 * 3 - 2 * 3 - 1

"""Bit-parallel evaluation of feature sets on tiny boxes.

Whole configurations of the radius-1 or radius-2 box are packed into single
integers (one bit per site, row-major from the lower-left corner, 1 = open),
and all floods, masks and Menger-type disjointness tests are evaluated with
vectorized bitwise operations over arrays of millions of packed
configurations at once.  This provides the exact-enumeration oracle against
which the general per-configuration pipeline is validated.
"""

from __future__ import annotations

import numpy as np

DTYPE = np.int64


class BitGrid:
    """Vectorized feature evaluation for the box of radius n (n <= 2)."""

    def __init__(self, n: int):
        if n < 1 or n > 2:
            raise ValueError("bit-packed engine supports n in {1, 2} only")
        self.n = n
        self.w = 2 * n + 1
        self.size = self.w * self.w
        w = self.w

        def mask(pred) -> int:
            m = 0
            for y in range(-n, n + 1):
                for x in range(-n, n + 1):
                    if pred(x, y):
                        m |= 1 << ((y + n) * w + (x + n))
            return m

        self.full = mask(lambda x, y: True)
        self.left = mask(lambda x, y: x == -n)
        self.right = mask(lambda x, y: x == n)
        self.bottom = mask(lambda x, y: y == -n)
        self.top = mask(lambda x, y: y == n)
        self.ring = mask(lambda x, y: max(abs(x), abs(y)) == n)
        self.center = 1 << ((n * w) + n)
        # (shift, source mask): spread by the six lattice steps
        self.shifts = [
            (1, mask(lambda x, y: x < n)),            # east
            (-1, mask(lambda x, y: x > -n)),          # west
            (w, mask(lambda x, y: y < n)),            # north
            (-w, mask(lambda x, y: y > -n)),          # south
            (-(w - 1), mask(lambda x, y: x < n and y > -n)),  # (+1, -1)
            (w - 1, mask(lambda x, y: x > -n and y < n)),     # (-1, +1)
        ]
        self.bit_of = {}
        for y in range(-n, n + 1):
            for x in range(-n, n + 1):
                self.bit_of[(x, y)] = 1 << ((y + n) * w + (x + n))

    def spread(self, s):
        out = 0
        for sh, src in self.shifts:
            part = s & src
            out = out | (part << sh if sh > 0 else part >> -sh)
        return out

    def flood(self, seed, allowed):
        cur = seed & allowed
        while True:
            nxt = (self.spread(cur) & allowed) | cur
            if np.array_equal(nxt, cur):
                return cur
            cur = nxt

    def _connected_lr(self, m):
        """(reach-from-left, reach-from-right) within the open sites of m."""
        ol = self.flood(m & self.left, m)
        orr = self.flood(m & self.right, m)
        return ol, orr

    def feature_masks(self, m):
        """Per-configuration bit masks of the feature sets.

        Returns a dict with packed masks: crossing indicator, sites on some
        simple crossing ("A"), the lowest/highest-crossing sets, pioneering
        sites and pivotal sites.
        """
        m = np.asarray(m, dtype=DTYPE)
        ol, orr = self._connected_lr(m)
        conn = ol & orr
        closed = ~m & self.full
        cb = self.flood(closed & self.bottom, closed)
        ct = self.flood(closed & self.top, closed)
        arm_b = self.bottom | self.spread(cb)
        arm_t = self.top | self.spread(ct)
        # a site sits on some simple crossing iff it reaches both columns and
        # no single other open site separates it from both simultaneously
        bad = np.zeros_like(m)
        for v, bit in self.bit_of.items():
            m_w = m & ~np.asarray(bit, dtype=DTYPE)
            ol_w = self.flood(m_w & self.left, m_w)
            or_w = self.flood(m_w & self.right, m_w)
            bad |= conn & ~ol_w & ~or_w & ~np.asarray(bit, dtype=DTYPE)
        a = conn & ~bad
        lmask = a & arm_b
        hmask = a & arm_t
        qmask = lmask & arm_t
        fmask = m & ol & orr & arm_b
        return {
            "crossing": (ol & orr) != 0,
            "A": a,
            "L": lmask,
            "H": hmask,
            "Q": qmask,
            "F": fmask,
        }

    def _point_to_ring(self, states, w_removed=None):
        """Reachability from the center to the outer ring through carrying
        interior sites, with an optional site removed."""
        interior = self.full & ~self.ring & ~self.center
        allowed = states & interior
        if w_removed is not None and not (w_removed & self.ring):
            allowed = allowed & ~w_removed
        reach = self.flood(self.spread(self.center) & allowed, allowed)
        ends = (self.spread(reach) | self.spread(self.center)) & self.ring
        if w_removed is not None and (w_removed & self.ring):
            ends = ends & ~w_removed
        return ends != 0

    def center_arm_events(self, m):
        """Indicators of the 2-, 3- and 4-chain events from the center to the
        boundary ring (one open + one closed; two disjoint open + one closed;
        two disjoint open + two disjoint closed)."""
        m = np.asarray(m, dtype=DTYPE)
        closed = ~m & self.full
        conn_o = self._point_to_ring(m)
        conn_c = self._point_to_ring(closed)
        two_o = conn_o.copy()
        two_c = conn_c.copy()
        for v, bit in self.bit_of.items():
            if bit == self.center:
                continue
            if not (bit & (self.ring | (self.full & ~self.ring & ~self.center))):
                continue
            b = np.asarray(bit, dtype=DTYPE)
            two_o &= self._point_to_ring(m, b)
            two_c &= self._point_to_ring(closed, b)
        return {
            "U2": conn_o & conn_c,
            "U3": two_o & conn_c,
            "U4": two_o & two_c,
        }

    def popcount(self, arr):
        return np.bitwise_count(np.asarray(arr, dtype=np.uint64)).astype(np.int64)

    def pack(self, grid: np.ndarray) -> int:
        """Pack a (w, w) uint8 grid (grid[y+n, x+n]) into an integer."""
        bits = 0
        flat = grid.reshape(-1)
        for i, b in enumerate(flat):
            if b:
                bits |= 1 << i
        return bits

    def unpack(self, bits: int) -> np.ndarray:
        flat = np.array([(bits >> i) & 1 for i in range(self.size)],
                        dtype=np.uint8)
        return flat.reshape(self.w, self.w)


def enumerate_exact(n: int, taus=(1, 2, 3), batch_bits: int = 20, progress=None):
    """Exact sums over all 2**(2n+1)^2 configurations.

    Returns (totals, denominator_log2) where totals maps
    quantity -> {tau: integer sum} for the set sizes and
    event -> count for the center arm events.
    """
    g = BitGrid(n)
    total = 1 << g.size
    batch = min(total, 1 << batch_bits)
    sums = {q: {t: 0 for t in taus} for q in ("L", "F", "Q")}
    events = {"U2": 0, "U3": 0, "U4": 0, "crossing": 0}
    start = 0
    while start < total:
        stop = min(start + batch, total)
        m = np.arange(start, stop, dtype=DTYPE)
        masks = g.feature_masks(m)
        for q in ("L", "F", "Q"):
            c = g.popcount(masks[q])
            for t in taus:
                sums[q][t] += int((c.astype(np.int64) ** t).sum())
        events["crossing"] += int(masks["crossing"].sum())
        arms = g.center_arm_events(m)
        for k in ("U2", "U3", "U4"):
            events[k] += int(arms[k].sum())
        if progress is not None:
            progress(stop, total)
        start = stop
    return {"sums": sums, "events": events, "log2_denominator": g.size}

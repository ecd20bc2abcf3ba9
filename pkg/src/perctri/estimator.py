"""Monte Carlo estimation, exact enumeration, and log-log exponent fits.

Trials are a pure function of (master_seed, trial_id), so they can be
partitioned across worker processes arbitrarily: accumulation uses exact
integer sums, which makes every estimate byte-identical regardless of the
worker count (the PERCTRI_WORKERS environment variable only changes wall
time).
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .geometry import Box, Vertex, make_horseshoe
from .percolation import sample_config, OPEN, CLOSED
from .features import feature_counts
from .arms import (ArmSpec, annulus_arm_profile, halfplane_three_arm,
                   horseshoe_three_arm, PointArmEvaluator,
                   RestrictedEvaluator)
from . import bitgrid

_CHUNK = 256  # trials per work unit; fixed so results never depend on workers


def worker_count(explicit: int | None = None) -> int:
    if explicit is not None:
        return max(1, explicit)
    env = os.environ.get("PERCTRI_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


@dataclass
class EstimateRow:
    n: int
    quantity: str
    tau: int
    trials: int
    mean: float
    stderr: float
    master_seed: int


@dataclass
class EstimateTable:
    rows: list[EstimateRow] = field(default_factory=list)

    def select(self, quantity: str, tau: int | None = None) -> list[EstimateRow]:
        return [r for r in self.rows
                if r.quantity == quantity and (tau is None or r.tau == tau)]

    def csv_lines(self) -> list[str]:
        out = ["n,quantity,tau,trials,mean,stderr,seed"]
        for r in self.rows:
            out.append(f"{r.n},{r.quantity},{r.tau},{r.trials},"
                       f"{r.mean!r},{r.stderr!r},{r.master_seed}")
        return out


def _mean_stderr(s1: int, s2: int, t: int) -> tuple[float, float]:
    mean = s1 / t
    if t < 2:
        return mean, float("nan")
    var = (s2 - s1 * s1 / t) / (t - 1)
    var = max(var, 0.0)
    return mean, math.sqrt(var / t)


def _run_chunks(fn, args_list, workers: int):
    if workers <= 1 or len(args_list) <= 1:
        return [fn(a) for a in args_list]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, args_list, chunksize=1))


def _moment_chunk(args):
    n, taus, seed, lo, hi = args
    acc = {q: {t: [0, 0] for t in taus} for q in ("L", "F", "Q")}
    for trial in range(lo, hi):
        c = sample_config(n, seed, trial)
        counts = dict(zip(("L", "F", "Q"), feature_counts(c)))
        for q, v in counts.items():
            for t in taus:
                p = v ** t
                acc[q][t][0] += p
                acc[q][t][1] += p * p
    return acc


def run_moments(n_list, tau_list, trials, master_seed: int,
                workers: int | None = None) -> EstimateTable:
    """Unconditional moments of the feature set sizes (no-crossing trials
    contribute zero) with exact integer accumulation.

    ``trials`` is an int, or a mapping from box radius to trial count.
    """
    taus = tuple(sorted(set(int(t) for t in tau_list)))
    if any(t < 1 for t in taus):
        raise ValueError("tau must be >= 1")
    w = worker_count(workers)
    table = EstimateTable()
    for n in n_list:
        t = trials[n] if isinstance(trials, dict) else int(trials)
        if t < 2:
            raise ValueError("need at least 2 trials")
        args = [(n, taus, master_seed, lo, min(lo + _CHUNK, t))
                for lo in range(0, t, _CHUNK)]
        parts = _run_chunks(_moment_chunk, args, w)
        for tau in taus:
            for q in ("L", "F", "Q"):
                s1 = sum(p[q][tau][0] for p in parts)
                s2 = sum(p[q][tau][1] for p in parts)
                mean, se = _mean_stderr(s1, s2, t)
                table.rows.append(EstimateRow(n=n, quantity=q, tau=tau,
                                              trials=t, mean=mean,
                                              stderr=se,
                                              master_seed=master_seed))
    return table


def _arm_chunk(args):
    kind, params, seed, lo, hi = args
    hits = 0
    if kind == "annulus":
        n, need_o, need_c, inner, center = params
        for trial in range(lo, hi):
            c = sample_config(n, seed, trial)
            o, cl = annulus_arm_profile(c, center, inner)
            if o >= need_o and cl >= need_c:
                hits += 1
    elif kind == "point":
        n, need_o, need_c, center = params
        for trial in range(lo, hi):
            c = sample_config(n, seed, trial)
            pev = PointArmEvaluator(c)
            cl = pev.count(center, CLOSED, need_c)
            if cl < need_c:
                continue
            if pev.count(center, OPEN, need_o) >= need_o:
                hits += 1
    elif kind == "halfplane":
        n, r = params
        for trial in range(lo, hi):
            c = sample_config(n, seed, trial)
            if halfplane_three_arm(c, Box((n - r, 0), r)):
                hits += 1
    elif kind == "horseshoe":
        n, rho, nu = params
        shoe = make_horseshoe(n, (n - (1 << rho), 0), rho, nu, "right")
        for trial in range(lo, hi):
            c = sample_config(n, seed, trial)
            if horseshoe_three_arm(c, shoe):
                hits += 1
    else:
        raise ValueError(f"unknown arm kind {kind!r}")
    return hits


def _bernoulli_row(n, quantity, hits, trials, seed) -> EstimateRow:
    mean, se = _mean_stderr(hits, hits, trials)  # 0/1 values: sum == sum of squares
    return EstimateRow(n=n, quantity=quantity, tau=1, trials=trials,
                       mean=mean, stderr=se, master_seed=seed)


def run_arms(kind: str, ladder, trials, master_seed: int,
             kappa: int = 3, inner: int = 0, rho: int = 1,
             center: Vertex = (0, 0), needs: tuple[int, int] | None = None,
             workers: int | None = None) -> EstimateTable:
    """Event probabilities along a ladder.

    kind "annulus": ladder of ambient radii n, chains from the ring of
    B(center, inner) to the boundary.  kind "point": same with the chains
    rooted at the single site (inner radius 0 shorthand).  kind "halfplane":
    ladder of attached-box radii r.  kind "horseshoe": fixed rho, ladder of
    outer exponents nu (ambient n = 2**nu).
    """
    ladder = tuple(ladder)
    if len(ladder) < 3:
        raise ValueError("ladder must have at least 3 radii")
    w = worker_count(workers)
    table = EstimateTable()
    per_point = trials if not callable(trials) else None
    for step in ladder:
        t = per_point if per_point is not None else trials(step)
        if needs is not None:
            need_o, need_c = needs
        else:
            need_o = 2 if kappa >= 3 else 1
            need_c = 2 if kappa == 4 else 1
        if kind == "annulus":
            n = step
            params = (n, need_o, need_c, inner, center)
            label = ArmSpec(kappa, center, inner).label()
        elif kind == "point":
            n = step
            params = (n, need_o, need_c, center)
            label = f"U{kappa}(point)"
        elif kind == "halfplane":
            n = step + 1
            params = (n, step)
            label = "E(halfplane)"
        elif kind == "horseshoe":
            nu = step
            n = 1 << nu
            params = (n, rho, nu)
            label = f"J(rho={rho})"
        else:
            raise ValueError(f"unknown arm kind {kind!r}")
        args = [(kind, params, master_seed, lo, min(lo + _CHUNK, t))
                for lo in range(0, t, _CHUNK)]
        hits = sum(_run_chunks(_arm_chunk, args, w))
        table.rows.append(_bernoulli_row(step, label, hits, t, master_seed))
    return table


def _point_events_chunk(args):
    n, seed, lo, hi = args
    hits = [0, 0, 0]  # U2, U3, U4
    for trial in range(lo, hi):
        c = sample_config(n, seed, trial)
        pev = PointArmEvaluator(c, batch=True)
        c1 = pev.count((0, 0), CLOSED, 1)
        if c1 == 0:
            continue
        o = pev.count((0, 0), OPEN, 2)
        if o >= 1:
            hits[0] += 1
        if o >= 2:
            hits[1] += 1
            if pev.count((0, 0), CLOSED, 2) >= 2:
                hits[2] += 1
    return hits


def run_point_events(ladder, trials, master_seed: int,
                     workers: int | None = None) -> EstimateTable:
    """Probabilities of the 2-, 3- and 4-chain events rooted at the center,
    all three evaluated on shared trials per ladder point."""
    w = worker_count(workers)
    table = EstimateTable()
    for n in ladder:
        t = trials[n] if isinstance(trials, dict) else int(trials)
        args = [(n, master_seed, lo, min(lo + _CHUNK, t))
                for lo in range(0, t, _CHUNK)]
        parts = _run_chunks(_point_events_chunk, args, w)
        for i, kappa in enumerate((2, 3, 4)):
            hits = sum(p[i] for p in parts)
            table.rows.append(_bernoulli_row(n, f"U{kappa}(point)", hits, t,
                                             master_seed))
    return table


@dataclass
class ExponentFit:
    slope: float
    intercept: float
    r_squared: float
    residuals: list[float]
    points: list[tuple[float, float]]
    weighting: str


def fit_exponent(rows, weighting: str = "none") -> ExponentFit:
    """Least-squares slope of log(mean) against log(n).

    ``rows`` may be EstimateRow objects or (n, mean, stderr) triples.
    Weighting "inverse-relvar" weights each point by (mean/stderr)**2, the
    inverse variance of log(mean).  Nonpositive means are dropped with a
    warning.
    """
    pts = []
    for r in rows:
        if isinstance(r, EstimateRow):
            n, mean, se = r.n, r.mean, r.stderr
        else:
            n, mean, se = r
        if mean <= 0:
            warnings.warn(f"dropping nonpositive mean at n={n}")
            continue
        pts.append((float(n), float(mean), float(se)))
    if len(pts) < 3:
        raise ValueError("need at least 3 positive points to fit")
    xs = [math.log(p[0]) for p in pts]
    ys = [math.log(p[1]) for p in pts]
    if weighting == "inverse-relvar":
        ws = [(p[1] / p[2]) ** 2 if p[2] > 0 else 1.0 for p in pts]
    elif weighting == "none":
        ws = [1.0] * len(pts)
    else:
        raise ValueError(f"unknown weighting {weighting!r}")
    sw = sum(ws)
    mx = sum(w * x for w, x in zip(ws, xs)) / sw
    my = sum(w * y for w, y in zip(ws, ys)) / sw
    sxx = sum(w * (x - mx) ** 2 for w, x in zip(ws, xs))
    sxy = sum(w * (x - mx) * (y - my) for w, x, y in zip(ws, xs, ys))
    slope = sxy / sxx
    intercept = my - slope * mx
    resid = [y - (intercept + slope * x) for x, y in zip(xs, ys)]
    syy = sum(w * (y - my) ** 2 for w, y in zip(ws, ys))
    ssr = sum(w * e * e for w, e in zip(ws, resid))
    r2 = 1.0 - ssr / syy if syy > 0 else 1.0
    return ExponentFit(slope=slope, intercept=intercept, r_squared=r2,
                       residuals=resid, points=list(zip(xs, ys)),
                       weighting=weighting)


@dataclass
class ExactResult:
    n: int
    moments: dict[str, dict[int, Fraction]]
    arm_probabilities: dict[str, Fraction]
    crossing_probability: Fraction


def exact_enumeration(n: int, taus=(1, 2, 3), progress=None) -> ExactResult:
    """Exact rational expectations over all configurations of the box of
    radius n (n <= 2): moments of the three feature set sizes and the
    probabilities of the 2-, 3- and 4-chain events at the center."""
    if n not in (1, 2):
        raise ValueError("exact enumeration supports n in {1, 2} only")
    taus = tuple(sorted(set(int(t) for t in taus)))
    if any(t < 1 or t > 3 for t in taus):
        raise ValueError("tau must lie in 1..3")
    res = bitgrid.enumerate_exact(n, taus=taus, progress=progress)
    denom = 1 << res["log2_denominator"]
    moments = {q: {t: Fraction(res["sums"][q][t], denom) for t in taus}
               for q in ("L", "F", "Q")}
    arms = {k: Fraction(v, denom) for k, v in res["events"].items()
            if k.startswith("U")}
    return ExactResult(n=n, moments=moments, arm_probabilities=arms,
                       crossing_probability=Fraction(res["events"]["crossing"],
                                                     denom))


def second_moment_ratio(n_list, trials: int, master_seed: int,
                        workers: int | None = None) -> ExponentFit:
    """Fitted slope of log E(|L|^2) against log n."""
    table = run_moments(n_list, (2,), trials, master_seed, workers=workers)
    return fit_exponent(table.select("L", 2))


@dataclass
class RatioCell:
    x: Vertex
    p_unrestricted: float
    p_restricted: float
    ratio: float | None
    ratio_stderr: float | None


@dataclass
class RatioReport:
    n: int
    kappa: int
    trials: int
    cells: list[RatioCell]

    def max_ratio(self) -> tuple[float, float]:
        """(max ratio, its stderr); zero-denominator cells are skipped."""
        best = None
        for cell in self.cells:
            if cell.ratio is not None and (best is None or cell.ratio > best.ratio):
                best = cell
        if best is None:
            return float("nan"), float("nan")
        return best.ratio, best.ratio_stderr


def _ratio_chunk(args):
    n, kappas, grid, seed, lo, hi = args
    u_hits = {k: [0] * len(grid) for k in kappas}
    t_hits = {k: [0] * len(grid) for k in kappas}
    want4 = 4 in kappas
    for trial in range(lo, hi):
        c = sample_config(n, seed, trial)
        pev = PointArmEvaluator(c, batch=True)
        rev = None
        for i, x in enumerate(grid):
            c1 = pev.count(x, CLOSED, 1)
            if c1 == 0:
                continue  # every event here needs a closed chain
            o2 = pev.count(x, OPEN, 2)
            u = {}
            u[2] = o2 >= 1
            u[3] = o2 >= 2
            u[4] = o2 >= 2 and want4 and pev.count(x, CLOSED, 2) >= 2
            for k in kappas:
                if u.get(k):
                    u_hits[k][i] += 1
                    # tunneled event implies the unrestricted one
                    if rev is None:
                        rev = RestrictedEvaluator(c)
                    if rev.event(x, k):
                        t_hits[k][i] += 1
    return u_hits, t_hits


def restricted_ratio_reports(kappas, n: int, trials: int, master_seed: int,
                             workers: int | None = None) -> dict[int, RatioReport]:
    """Per-site tables of unrestricted vs tunneled arm frequencies over a
    5 x 5 grid in the quarter box, one table per kappa, sharing trials."""
    kappas = tuple(sorted(set(kappas)))
    q = n // 4
    steps = sorted({-q, -q // 2, 0, q // 2, q})
    grid = [(x, y) for y in steps for x in steps]
    w = worker_count(workers)
    args = [(n, kappas, grid, master_seed, lo, min(lo + _CHUNK, trials))
            for lo in range(0, trials, _CHUNK)]
    parts = _run_chunks(_ratio_chunk, args, w)
    out = {}
    for k in kappas:
        cells = []
        for i, x in enumerate(grid):
            hu = sum(p[0][k][i] for p in parts)
            ht = sum(p[1][k][i] for p in parts)
            pu, pt = hu / trials, ht / trials
            if ht == 0:
                cells.append(RatioCell(x, pu, pt, None, None))
                continue
            ratio = pu / pt
            rel = math.sqrt(max(1 - pu, 0.0) / max(hu, 1)
                            + max(1 - pt, 0.0) / ht)
            cells.append(RatioCell(x, pu, pt, ratio, ratio * rel))
        out[k] = RatioReport(n=n, kappa=k, trials=trials, cells=cells)
    return out


def restricted_ratio_report(kappa: int, n: int, trials: int, master_seed: int,
                            workers: int | None = None) -> RatioReport:
    """Per-site table of unrestricted vs tunneled arm frequencies over a
    5 x 5 grid in the quarter box."""
    return restricted_ratio_reports((kappa,), n, trials, master_seed,
                                    workers=workers)[kappa]

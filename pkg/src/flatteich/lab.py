"""Thin-triangle experiments: certified lower bounds on the thinness of
the twist triangles, sweeps over n, the torus control and a four-point
delta for finite metric samples.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .bounds import (
    INF,
    DistBound,
    ExtInterval,
    annulus_meets_core,
    annulus_modulus,
    certify_pair,
    ext_interval,
)
from .curves import holonomy_stats, transport_curve
from .exact import Number
from .errors import AnnulusTouchesCore, NotAMetric, UnboundedLeg
from .surface import plumb, rotate_structure
from .torus import distance_matrix, torus_triangle, triangle_sample_points
from .twist import TriangleInstance, triangle_vertices

# leg i twists about beta_i; the curve that stays short along it is the other gamma
LEGS = {1: ("beta1", "gamma2", "A2"), 2: ("beta2", "gamma1", "A1")}


def _sin_sigma(inst: TriangleInstance) -> float:
    return math.sin(inst.params.sigma)


def plumb_grid(inst: TriangleInstance, cid: str, grid: int):
    """(dh, twist_fraction) samples covering [0, dh_max(n)] x [0, n], exact rationals."""
    h = inst.x0.base.cylinder(cid).height
    dh_max = Fraction(float(h) * (1 / _sin_sigma(inst) - 1))
    n = abs(inst.n)
    steps = max(grid - 1, 1)
    return [(dh_max * i / steps, Fraction(n) * j / steps) for i in range(grid) for j in range(grid)]


def uniform_leg_bound(inst: TriangleInstance, leg_id: int, grid: int = 8) -> Number:
    """Upper bound for ext of the off-leg curve, valid along the whole leg.

    The bound is 1/mod of the fixture annulus around the off-leg curve; the
    annulus misses the twisting core, so plumbing and twisting in that
    cylinder leave it isometric.  That invariance is re-checked exactly on
    a grid x grid sample of plumbing parameters.
    """
    beta_role, gamma_role, ann_role = LEGS[leg_id]
    gamma = inst.curves[inst.roles[gamma_role]]
    ann = inst.annuli[ann_role]
    if inst.n == 0:
        return ext_interval(gamma, inst.x0, tuple(inst.annuli.values())).hi
    cid = inst.curves[inst.roles[beta_role]].core_of
    s0 = inst.x0.surface
    if annulus_meets_core(s0, ann, cid):
        raise AnnulusTouchesCore(f"annulus {ann.name} meets the core of {cid}, the twisting cylinder of leg {leg_id}")
    mod0 = annulus_modulus(s0, ann)
    for dh, tw in plumb_grid(inst, cid, grid):
        mod = annulus_modulus(plumb(s0, cid, dh, tw), ann)
        if mod != mod0:
            raise AnnulusTouchesCore(
                f"annulus {ann.name} changes modulus under plumbing of {cid} (dh={dh}, twist={tw})")
    return 1 / mod0


@dataclass
class TriangleExperiment:
    instance: TriangleInstance
    uniform_leg_ext_hi: Tuple[Number, Number]
    ystar_ext_lo: Dict[str, Number]
    delta_lo: float
    constants: Dict[str, float] = field(default_factory=dict)
    sandwich: List[DistBound] = field(default_factory=list)
    ms: float = 0.0

    @property
    def n(self) -> int:
        return self.instance.n


def delta_lower_bound(inst: TriangleInstance, leg_hi: Optional[Tuple[Number, Number]] = None,
                      grid: int = 8) -> float:
    """Certified lower bound for the distance from y* to the union of the legs at x0."""
    if leg_hi is None:
        leg_hi = (uniform_leg_bound(inst, 1, grid), uniform_leg_bound(inst, 2, grid))
    if INF in leg_hi:
        raise UnboundedLeg("a leg has no finite uniform extremal-length bound")
    if inst.n == 0:
        return 0.0
    ann = tuple(inst.annuli.values())
    vals = []
    for leg in (1, 2):
        gamma = inst.curves[inst.roles[LEGS[leg][1]]]
        lo = ext_interval(gamma, inst.y_star, ann).lo
        vals.append(0.5 * math.log(float(lo) / float(leg_hi[leg - 1])) if lo > 0 else -INF)
    return max(0.0, min(vals))


def _sandwich(inst: TriangleInstance) -> List[DistBound]:
    """Kerckhoff lower bound against the explicit stretch for each vertex pair."""
    if inst.n == 0:
        return []
    ann = tuple(inst.annuli.values())
    names = [inst.roles[r] for r in ("beta1", "beta2", "gamma1", "gamma2")]
    pts = inst.vertices()
    ext = {vn: [ext_interval(inst.curves[c], p, ann) for c in names] for vn, p in pts.items()}
    Kn = inst.params.K
    pairs = [("x0", "y1", Kn), ("x0", "y2", Kn), ("y1", "y2", Kn),
             ("y1", "y*", inst.n), ("y*", "y2", max(Kn / inst.n, 1.0))]
    out = []
    for a, b, K in pairs:
        out.append(certify_pair(list(zip(ext[a], ext[b])), K, f"n={inst.n} {a}-{b}"))
    return out


def _constants(inst: TriangleInstance, leg_hi, ystar_lo) -> Dict[str, float]:
    """Measured stand-ins for the constants of the growth argument."""
    n = inst.n
    if n == 0:
        return {}
    ann = tuple(inst.annuli.values())
    g1 = inst.curves[inst.roles["gamma1"]]
    g2 = inst.curves[inst.roles["gamma2"]]
    q = rotate_structure(inst.y1.surface, inst.theta_12)
    st1 = holonomy_stats(transport_curve(g1, inst.y1), q)
    st2 = holonomy_stats(transport_curve(g2, inst.y1), q)
    e2 = ext_interval(g2, inst.y2, ann).lo
    return {
        "c0": float(e2) / n ** 2,
        "c2": st2.h,
        "c3": st1.v / n,
        "c4": min(float(v) for v in ystar_lo.values()) / n,
        "c5": max(float(v) for v in leg_hi),
    }


def run_triangle(fixture, n: int, grid: int = 8, sandwich: bool = True) -> TriangleExperiment:
    t0 = time.perf_counter()
    inst = triangle_vertices(fixture, n)
    leg_hi = (uniform_leg_bound(inst, 1, grid), uniform_leg_bound(inst, 2, grid))
    ann = tuple(inst.annuli.values())
    ystar_lo = {}
    for r in ("gamma1", "gamma2"):
        ystar_lo[r] = ext_interval(inst.curves[inst.roles[r]], inst.y_star, ann).lo
    delta = delta_lower_bound(inst, leg_hi, grid)
    sw = _sandwich(inst) if sandwich else []
    consts = _constants(inst, leg_hi, ystar_lo)
    ms = (time.perf_counter() - t0) * 1000
    return TriangleExperiment(inst, leg_hi, ystar_lo, delta, consts, sw, ms)


# -- four-point delta -------------------------------------------------------

def check_metric(D, tol: float = 1e-9) -> np.ndarray:
    D = np.asarray(D, dtype=float)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise NotAMetric(f"distance matrix must be square, got shape {D.shape}")
    if not np.all(np.isfinite(D)):
        raise NotAMetric("distance matrix has non-finite entries")
    if np.max(np.abs(D - D.T), initial=0) > tol:
        i, j = np.unravel_index(np.argmax(np.abs(D - D.T)), D.shape)
        raise NotAMetric(f"distance matrix is not symmetric at ({i}, {j})")
    if np.max(np.abs(np.diag(D)), initial=0) > tol:
        raise NotAMetric("distance matrix has a nonzero diagonal")
    if np.min(D, initial=0) < -tol:
        raise NotAMetric("distance matrix has negative entries")
    viol = D[:, None, :] - D[:, :, None] - D[None, :, :].transpose(0, 2, 1)
    # viol[i, k, j] = D[i, j] - D[i, k] - D[k, j]
    if viol.size and viol.max() > tol:
        i, k, j = np.unravel_index(np.argmax(viol), viol.shape)
        raise NotAMetric(f"triangle inequality fails for points {i}, {k}, {j}")
    return D


def four_point_delta(D) -> float:
    """Largest four-point defect: (largest - middle pair sum) / 4 over all quadruples.

    With this normalisation a Euclidean unit square gives (sqrt 2 - 1)/2 and
    tree metrics give 0.
    """
    D = check_metric(D)
    n = D.shape[0]
    if n < 4:
        return 0.0
    best = 0.0
    quads = np.array(list(combinations(range(n), 4)), dtype=np.intp)
    for chunk in np.array_split(quads, max(1, len(quads) // 200_000 + 1)):
        a, b, c, d = chunk.T
        sums = np.stack([D[a, b] + D[c, d], D[a, c] + D[b, d], D[a, d] + D[b, c]], axis=1)
        sums.sort(axis=1)
        best = max(best, float(np.max(sums[:, 2] - sums[:, 1])) / 4)
    return best


# -- sweeps ----------------------------------------------------------------

@dataclass
class Fit:
    slope: Optional[float]
    intercept: Optional[float]
    r2: Optional[float]
    residuals: Tuple[float, ...] = ()


def log_fit(ns: Sequence[int], ys: Sequence[float]) -> Fit:
    """Least-squares line of ys against log n."""
    x = np.log(np.asarray(ns, dtype=float))
    y = np.asarray(ys, dtype=float)
    if len(set(ns)) < 2:
        return Fit(None, None, None)
    slope, intercept = np.polyfit(x, y, 1)
    pred = slope * x + intercept
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return Fit(float(slope), float(intercept), r2, tuple(float(r) for r in y - pred))


@dataclass
class SweepRow:
    n: int
    K_n: float
    delta_lo: float
    ext_lo_gamma1: float
    ext_lo_gamma2: float
    leg_hi_1: float
    leg_hi_2: float
    ms: float
    constants: Dict[str, float] = field(default_factory=dict)


@dataclass
class SweepResult:
    rows: List[SweepRow]
    fit: Fit
    sandwich: List[DistBound] = field(default_factory=list)


def _row(args) -> Tuple[SweepRow, List[DistBound]]:
    fixture, n, grid = args
    ex = run_triangle(fixture, n, grid)
    row = SweepRow(n, ex.instance.params.K, ex.delta_lo, float(ex.ystar_ext_lo["gamma1"]),
                   float(ex.ystar_ext_lo["gamma2"]), float(ex.uniform_leg_ext_hi[0]),
                   float(ex.uniform_leg_ext_hi[1]), ex.ms, ex.constants)
    return row, ex.sandwich


def sweep(n_list: Sequence[int], fixture, grid: int = 8, workers: int = 1) -> SweepResult:
    ns = sorted(set(int(n) for n in n_list))
    if not ns:
        raise ValueError("n_list is empty")
    jobs = [(fixture, n, grid) for n in ns]
    if workers > 1 and len(ns) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_row, jobs))
    else:
        results = [_row(j) for j in jobs]
    rows = [r for r, _ in results]
    sandwich = [d for _, ds in results for d in ds]
    return SweepResult(rows, log_fit([r.n for r in rows], [r.delta_lo for r in rows]), sandwich)


@dataclass
class TorusRow:
    n: int
    delta_lo: float  # sampled thin-triangle delta
    delta_star: float
    four_point: float


def torus_sweep(n_list: Sequence[int], samples: int = 257) -> Tuple[List[TorusRow], Fit]:
    rows = []
    for n in sorted(set(int(n) for n in n_list)):
        tri = torus_triangle(n, samples)
        fp = four_point_delta(distance_matrix(triangle_sample_points(n)))
        rows.append(TorusRow(n, tri.delta_thin, tri.delta_star, fp))
    return rows, log_fit([r.n for r in rows], [r.delta_lo for r in rows])

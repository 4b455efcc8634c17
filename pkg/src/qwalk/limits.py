"""Measure-level comparison tools driving the convergence checks.

Every supported measure is reduced to a weighted-atom view: empirical
measures natively, grid densities as one atom per cell with weight
value * cell volume, lattice distributions as one atom per site.  On
top of that view live the characteristic function (the operational
surrogate for weak convergence), CDF/Kolmogorov-Smirnov distances,
raw moments, and the sweep driver that records distances to a limit
law across a list of step counts n.

Characteristic-function convention: phi(z) = integral of exp(+i z.x)
against the measure, with no normalization prefactor.  Transforms of
wavefunctions elsewhere in the package use the unitary convention with
a (2*pi)^(-d/2) factor; the two differ only by that constant and by the
sign of the exponent, which is immaterial for the distances computed
here (they pair conjugate-symmetric grids).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .lattice import LatticeDistribution
from .measures import DensityOnGrid, EmpiricalMeasure

DEFAULT_ZETA_WINDOW = 8.0
DEFAULT_ZETA_POINTS = 257
MAX_MOMENT_ORDER = 8


def as_atoms(measure) -> tuple[np.ndarray, np.ndarray]:
    """Weighted-atom view: points of shape (m, d) and weights of shape (m,)."""
    if isinstance(measure, EmpiricalMeasure):
        return measure.points_2d(), measure.weights
    if isinstance(measure, DensityOnGrid):
        coords = measure.axis_coords()
        if measure.d == 1:
            pts = coords[:, None]
        else:
            mesh = np.meshgrid(*([coords] * measure.d), indexing="ij")
            pts = np.stack([g.reshape(-1) for g in mesh], axis=1)
        w = measure.values.reshape(-1) * measure.dx**measure.d
        return pts, w
    if isinstance(measure, LatticeDistribution):
        return measure.sites().astype(np.float64)[:, None], measure.probs
    raise TypeError(f"unsupported measure type: {type(measure).__name__}")


def measure_dim(measure) -> int:
    pts, _ = as_atoms(measure)
    return pts.shape[1]


def characteristic_function(measure, zeta_grid: np.ndarray) -> np.ndarray:
    """phi(z) = sum_i w_i exp(i z . x_i) for each z in the grid.

    zeta_grid has shape (K,) for one-dimensional measures or (K, d).
    """
    pts, w = as_atoms(measure)
    zg = np.asarray(zeta_grid, dtype=np.float64)
    if zg.ndim == 1:
        zg = zg[:, None]
    if zg.shape[1] != pts.shape[1]:
        raise ValueError(f"zeta grid dimension {zg.shape[1]} != measure dimension {pts.shape[1]}")
    out = np.zeros(zg.shape[0], dtype=np.complex128)
    # chunk over atoms to bound the phase-matrix size
    chunk = max(1, int(4e6) // max(zg.shape[0], 1))
    for start in range(0, pts.shape[0], chunk):
        sl = slice(start, start + chunk)
        out += np.exp(1j * (zg @ pts[sl].T)) @ w[sl]
    return out


def default_zeta_grid(d: int, window: float = DEFAULT_ZETA_WINDOW, points: int = DEFAULT_ZETA_POINTS) -> np.ndarray:
    if not (window > 0):
        raise ValueError(f"zeta window must be positive, got {window}")
    axis = np.linspace(-window, window, points)
    if d == 1:
        return axis
    mesh = np.meshgrid(*([axis] * d), indexing="ij")
    return np.stack([g.reshape(-1) for g in mesh], axis=1)


def cf_distance(
    m1,
    m2,
    window: float = DEFAULT_ZETA_WINDOW,
    points: int = DEFAULT_ZETA_POINTS,
) -> float:
    """sup over the zeta grid of |phi_1 - phi_2|: a pseudometric on measures."""
    d = measure_dim(m1)
    if measure_dim(m2) != d:
        raise ValueError("measures have different dimensions")
    zg = default_zeta_grid(d, window, points)
    return float(np.max(np.abs(characteristic_function(m1, zg) - characteristic_function(m2, zg))))


def _cdf_on(points: np.ndarray, sorted_atoms: np.ndarray, cum_weights: np.ndarray) -> np.ndarray:
    idx = np.searchsorted(sorted_atoms, points, side="right")
    out = np.zeros(points.shape[0])
    nz = idx > 0
    out[nz] = cum_weights[idx[nz] - 1]
    return out


def _marginal(pts: np.ndarray, w: np.ndarray, axis: int) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(pts[:, axis], kind="stable")
    return pts[order, axis], np.cumsum(w[order])


def ks_distance(m1, m2) -> float:
    """sup |F1 - F2| over the merged support; per-marginal maximum for d = 2.

    Both CDFs are piecewise constant (atomized view), so the supremum is
    attained at a merged atom position.
    """
    d = measure_dim(m1)
    if measure_dim(m2) != d:
        raise ValueError("measures have different dimensions")
    if d > 2:
        raise ValueError(f"ks_distance supports d <= 2, got d={d}")
    p1, w1 = as_atoms(m1)
    p2, w2 = as_atoms(m2)
    worst = 0.0
    for axis in range(d):
        a1, c1 = _marginal(p1, w1, axis)
        a2, c2 = _marginal(p2, w2, axis)
        merged = np.concatenate([a1, a2])
        merged.sort(kind="stable")
        f1 = _cdf_on(merged, a1, c1)
        f2 = _cdf_on(merged, a2, c2)
        worst = max(worst, float(np.max(np.abs(f1 - f2))))
    return worst


def _levy_feasible(a1, c1, a2, c2, eps: float) -> bool:
    # sup_x (F1(x) - F2(x + eps)) over a pair of right-continuous step
    # functions is attained at a breakpoint of either term
    events = np.concatenate([a1, a2 - eps])
    gap = _cdf_on(events, a1, c1) - _cdf_on(events + eps, a2, c2)
    return bool(np.max(gap, initial=0.0) <= eps)


def _levy_1d(a1, c1, a2, c2, atol: float) -> float:
    def ok(eps: float) -> bool:
        return _levy_feasible(a1, c1, a2, c2, eps) and _levy_feasible(a2, c2, a1, c1, eps)

    if ok(0.0):
        return 0.0
    lo, hi = 0.0, 1.0
    while hi - lo > atol:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def levy_distance(m1, m2, atol: float = 1e-12) -> float:
    """Lévy distance between one-dimensional marginals (max over coordinates).

    Smallest eps with F1(x - eps) - eps <= F2(x) <= F1(x + eps) + eps for
    all x, found by bisection to atol with the sup conditions evaluated
    exactly at the step-CDF breakpoints.  Unlike the KS distance this
    metrizes weak convergence even when the limit CDF has jumps, e.g.
    laws concentrating on a shrinking neighborhood of a point approach
    the point mass at rate O(spread) here but stay at KS distance ~ 1/2.
    """
    d = measure_dim(m1)
    if measure_dim(m2) != d:
        raise ValueError("measures have different dimensions")
    if d > 2:
        raise ValueError(f"levy_distance supports d <= 2, got d={d}")
    p1, w1 = as_atoms(m1)
    p2, w2 = as_atoms(m2)
    worst = 0.0
    for axis in range(d):
        a1, c1 = _marginal(p1, w1, axis)
        a2, c2 = _marginal(p2, w2, axis)
        worst = max(worst, _levy_1d(a1, c1, a2, c2, atol))
    return worst


def ks_distance_to_cdf(measure, cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """One-sample KS distance of a one-dimensional measure to a continuous CDF."""
    pts, w = as_atoms(measure)
    if pts.shape[1] != 1:
        raise ValueError("ks_distance_to_cdf requires a one-dimensional measure")
    order = np.argsort(pts[:, 0], kind="stable")
    atoms = pts[order, 0]
    cum = np.cumsum(w[order])
    target = np.asarray(cdf(atoms), dtype=np.float64)
    below = np.concatenate([[0.0], cum[:-1]])
    return float(np.max(np.maximum(np.abs(cum - target), np.abs(below - target))))


def moments(measure, max_order: int) -> np.ndarray:
    """Raw moments per coordinate: out[k, a] = integral of x_a^k, k = 0..max_order."""
    if not (1 <= max_order <= MAX_MOMENT_ORDER):
        raise ValueError(f"max_order must be in 1..{MAX_MOMENT_ORDER}, got {max_order}")
    pts, w = as_atoms(measure)
    d = pts.shape[1]
    out = np.empty((max_order + 1, d))
    out[0] = w.sum()
    power = np.ones_like(pts)
    for k in range(1, max_order + 1):
        power = power * pts
        out[k] = w @ power
    return out


@dataclass
class SweepEntry:
    n: int
    cf_distance: float
    ks_distance: float | None
    moments: np.ndarray
    warnings: list[str] = field(default_factory=list)


@dataclass
class ConvergenceReport:
    walk: str
    entries: list[SweepEntry]
    cf_nonincreasing: bool
    ks_nonincreasing: bool | None
    zeta_window: float
    zeta_points: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "walk": self.walk,
            "zeta_window": self.zeta_window,
            "zeta_points": self.zeta_points,
            "cf_nonincreasing": self.cf_nonincreasing,
            "ks_nonincreasing": self.ks_nonincreasing,
            "entries": [
                {
                    "n": e.n,
                    "cf_distance": e.cf_distance,
                    "ks_distance": e.ks_distance,
                    "moments": e.moments.tolist(),
                    "warnings": e.warnings,
                }
                for e in self.entries
            ],
        }


def convergence_sweep(
    walk: Callable[[int], Any],
    n_list: Sequence[int],
    limit,
    walk_name: str = "walk",
    window: float = DEFAULT_ZETA_WINDOW,
    points: int = DEFAULT_ZETA_POINTS,
    with_ks: bool = True,
    moment_order: int = 4,
) -> ConvergenceReport:
    """Run the walk at each n, measure distances to the limit law.

    walk maps n to a measure (any supported variant).  n_list must be a
    nonempty strictly increasing sequence of positive integers.
    """
    ns = list(n_list)
    if not ns:
        raise ValueError("n_list must not be empty")
    if any(n < 1 for n in ns):
        raise ValueError("n_list entries must be >= 1")
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("n_list must be strictly increasing")
    entries = []
    for n in ns:
        m = walk(n)
        cfd = cf_distance(m, limit, window=window, points=points)
        ksd = ks_distance(m, limit) if with_ks else None
        mom = moments(m, moment_order)
        warn = []
        meta = getattr(m, "meta", None)
        if isinstance(meta, dict):
            warn = list(meta.get("warnings", []))
        entries.append(SweepEntry(n, cfd, ksd, mom, warn))
    cfs = [e.cf_distance for e in entries]
    cf_mono = all(b <= a for a, b in zip(cfs, cfs[1:]))
    ks_mono = None
    if with_ks:
        kss = [e.ks_distance for e in entries]
        ks_mono = all(b <= a for a, b in zip(kss, kss[1:]))
    return ConvergenceReport(
        walk=walk_name,
        entries=entries,
        cf_nonincreasing=cf_mono,
        ks_nonincreasing=ks_mono,
        zeta_window=window,
        zeta_points=points,
    )

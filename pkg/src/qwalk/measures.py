"""Measure-like containers shared across the walk modules.

Two representations of a probability measure on R^d are used throughout:
a nonnegative density sampled on a regular grid (DensityOnGrid) and a
weighted point-mass measure (EmpiricalMeasure).  Both are plain data;
the comparison operations live in qwalk.limits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

MASS_TOL = 1e-10


@dataclass
class DensityOnGrid:
    """Probability density on the regular grid {(-L + k*dx) : 0 <= k < N}^d.

    values has shape (N,)*d and is indexed by the per-axis grid index.
    The grid convention matches GridSpec: dx = 2L/N and the points run
    from -L to L - dx inclusive.
    """

    d: int
    L: float
    N: int
    values: np.ndarray
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.d not in (1, 2):
            raise ValueError(f"d must be 1 or 2, got {self.d}")
        if self.values.shape != (self.N,) * self.d:
            raise ValueError(
                f"values shape {self.values.shape} does not match (N,)*d = {(self.N,) * self.d}"
            )
        if np.any(self.values < -1e-14):
            raise ValueError("density values must be nonnegative")

    @property
    def dx(self) -> float:
        return 2.0 * self.L / self.N

    def axis_coords(self) -> np.ndarray:
        return (np.arange(self.N) - self.N // 2) * self.dx

    def integral(self) -> float:
        return float(self.values.sum()) * self.dx**self.d

    def check_normalized(self, tol: float = MASS_TOL) -> None:
        total = self.integral()
        if abs(total - 1.0) > tol:
            raise ValueError(f"density integrates to {total!r}, not 1 within {tol}")


@dataclass
class EmpiricalMeasure:
    """Weighted point masses sum_i weights[i] * delta(atoms[i]).

    atoms has shape (m,) for d=1 or (m, d); weights are nonnegative and
    sum to 1 within MASS_TOL.  meta records provenance (seed, sample
    count, walk step n, warnings) for reproducibility.
    """

    atoms: np.ndarray
    weights: np.ndarray
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.atoms = np.asarray(self.atoms, dtype=np.float64)
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if self.atoms.ndim not in (1, 2):
            raise ValueError("atoms must have shape (m,) or (m, d)")
        if self.weights.ndim != 1 or self.weights.shape[0] != self.atoms.shape[0]:
            raise ValueError("weights must be a vector matching atoms")
        if np.any(self.weights < 0):
            raise ValueError("weights must be nonnegative")
        total = float(self.weights.sum())
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {total!r}, not 1 within 1e-12")

    @property
    def d(self) -> int:
        return 1 if self.atoms.ndim == 1 else self.atoms.shape[1]

    def points_2d(self) -> np.ndarray:
        """Atoms as an (m, d) array regardless of storage shape."""
        if self.atoms.ndim == 1:
            return self.atoms[:, None]
        return self.atoms

"""Initial-state builders shared by the walks and the experiment runner.

Product states psi0(x, y) = phi0(x) chi0(y) are assembled from 1-d
factor profiles.  All profiles are L2-normalized in closed form; grid
states are renormalized after sampling so truncation residue does not
leak into the norm invariants (the applied factor is reported).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grids import GridSpec, GridWavefunction


@dataclass(frozen=True)
class GaussianProfile:
    """phi(x) = (pi w^2)^(-1/4) exp(-(x-c)^2 / (2 w^2) + i k x)."""

    center: float = 0.0
    width: float = 1.0
    momentum: float = 0.0

    def __post_init__(self) -> None:
        if not (self.width > 0):
            raise ValueError(f"width must be positive, got {self.width}")

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        amp = (np.pi * self.width**2) ** -0.25
        out = amp * np.exp(-((x - self.center) ** 2) / (2.0 * self.width**2))
        if self.momentum != 0.0:
            return out * np.exp(1j * self.momentum * x)
        return out.astype(np.complex128)

    def sample_position(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw from |phi|^2, the normal law with sd width/sqrt(2)."""
        return rng.normal(self.center, self.width / np.sqrt(2.0), size=size)


@dataclass(frozen=True)
class BoxProfile:
    """phi(x) = (b-a)^(-1/2) on [a, b), zero elsewhere."""

    a: float
    b: float

    def __post_init__(self) -> None:
        if not (self.b > self.a):
            raise ValueError(f"box needs b > a, got a={self.a}, b={self.b}")

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        inside = (x >= self.a) & (x < self.b)
        return inside.astype(np.complex128) / np.sqrt(self.b - self.a)

    def sample_position(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.uniform(self.a, self.b, size=size)


Profile = GaussianProfile | BoxProfile


def product_state(
    spec: GridSpec,
    phi0,
    chi0,
    normalize: bool = True,
) -> tuple[GridWavefunction, float]:
    """Sample phi0(x) chi0(y) on the grid.

    phi0 and chi0 are either a single profile (applied to every axis of
    the group) or a sequence of d profiles.  Returns the state and the
    norm the raw sampling had before renormalization.
    """
    d = spec.d
    phis = _as_profiles(phi0, d)
    chis = _as_profiles(chi0, d)
    x = spec.axis_coords()
    factors = [p(x) for p in phis] + [c(x) for c in chis]
    values = factors[0]
    for f in factors[1:]:
        values = np.multiply.outer(values, f)
    psi = GridWavefunction(spec, values)
    raw_norm = psi.norm()
    if normalize:
        psi = psi.normalized()
    return psi, raw_norm


def _as_profiles(p, d: int) -> list:
    if callable(p):
        return [p] * d
    profiles = list(p)
    if len(profiles) != d:
        raise ValueError(f"expected {d} factor profiles, got {len(profiles)}")
    return profiles

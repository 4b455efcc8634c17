"""Hadamard walk on the integer lattice.

The walker-and-coin state lives in l2(Z) (x) C^2 and is stored densely
on a finite window of sites (the support stays an interval, so a pair
of complex vectors with an explicit start offset is the natural fit).
One step flips the coin by the Hadamard unitary

    |H> -> (|H> + |T>)/sqrt(2),   |T> -> (|H> - |T>)/sqrt(2)

and then shifts heads amplitude one site up and tails one site down.
The rescaled position law (site/n after n steps) concentrates on
[-1/sqrt(2), 1/sqrt(2)] for large n.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .measures import EmpiricalMeasure

_SQRT2 = np.sqrt(2.0)


@dataclass
class LatticeState:
    """Amplitudes on sites offset .. offset+len-1, one vector per coin face."""

    offset: int
    amps_h: np.ndarray
    amps_t: np.ndarray

    def __post_init__(self) -> None:
        self.amps_h = np.asarray(self.amps_h, dtype=np.complex128)
        self.amps_t = np.asarray(self.amps_t, dtype=np.complex128)
        if self.amps_h.ndim != 1 or self.amps_h.shape != self.amps_t.shape:
            raise ValueError("amps_h and amps_t must be equal-length vectors")

    @property
    def width(self) -> int:
        return self.amps_h.shape[0]

    def sites(self) -> np.ndarray:
        return self.offset + np.arange(self.width)

    def norm(self) -> float:
        total = np.vdot(self.amps_h, self.amps_h).real + np.vdot(self.amps_t, self.amps_t).real
        return float(np.sqrt(total))

    def normalized(self) -> "LatticeState":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero state")
        return LatticeState(self.offset, self.amps_h / n, self.amps_t / n)


@dataclass
class LatticeDistribution:
    """Measurement probabilities over sites offset .. offset+len-1."""

    offset: int
    probs: np.ndarray

    def __post_init__(self) -> None:
        self.probs = np.asarray(self.probs, dtype=np.float64)
        if self.probs.ndim != 1:
            raise ValueError("probs must be a vector")
        if np.any(self.probs < 0):
            raise ValueError("probabilities must be nonnegative")

    def sites(self) -> np.ndarray:
        return self.offset + np.arange(self.probs.shape[0])

    def total(self) -> float:
        return float(self.probs.sum())


def basis_state(site: int = 0, coin: str = "H") -> LatticeState:
    """|site> (x) |coin>."""
    if coin not in ("H", "T"):
        raise ValueError(f"coin must be 'H' or 'T', got {coin!r}")
    h = np.array([1.0 if coin == "H" else 0.0], dtype=np.complex128)
    t = np.array([1.0 if coin == "T" else 0.0], dtype=np.complex128)
    return LatticeState(site, h, t)


def hadamard_step(state: LatticeState) -> LatticeState:
    """One walk step; the window grows by one site on each side."""
    h = (state.amps_h + state.amps_t) / _SQRT2
    t = (state.amps_h - state.amps_t) / _SQRT2
    w = state.width
    new_h = np.zeros(w + 2, dtype=np.complex128)
    new_t = np.zeros(w + 2, dtype=np.complex128)
    new_h[2:] = h  # heads moved one site up
    new_t[:w] = t  # tails moved one site down
    return LatticeState(state.offset - 1, new_h, new_t)


def evolve(state: LatticeState, n: int) -> LatticeState:
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    for _ in range(n):
        state = hadamard_step(state)
    return state


def lattice_distribution(state: LatticeState) -> LatticeDistribution:
    probs = (
        state.amps_h.real**2
        + state.amps_h.imag**2
        + state.amps_t.real**2
        + state.amps_t.imag**2
    )
    return LatticeDistribution(state.offset, probs)


def rescaled_lattice_measure(dist: LatticeDistribution, n: int) -> EmpiricalMeasure:
    """The law of site/n: point masses at j/n weighted by P(j)."""
    if n < 1:
        raise ValueError(f"rescaling requires n >= 1, got {n}")
    total = dist.total()
    if abs(total - 1.0) > 1e-12:
        raise ValueError(f"distribution mass is {total!r}, not 1 within 1e-12")
    atoms = dist.sites() / float(n)
    return EmpiricalMeasure(atoms, dist.probs, meta={"n": n, "kind": "rescaled_lattice"})


def mass_outside(measure: EmpiricalMeasure, lo: float, hi: float) -> float:
    """Total weight of atoms outside the closed interval [lo, hi]."""
    pts = measure.atoms if measure.atoms.ndim == 1 else measure.atoms[:, 0]
    outside = (pts < lo) | (pts > hi)
    return float(measure.weights[outside].sum())

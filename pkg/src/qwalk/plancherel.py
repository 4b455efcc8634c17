"""The walk whose coin flip is the Fourier transform on the y variables.

One step is U = S (I x F): transform the y axes, then translate x by y.
On the torus grid both pieces are exactly unitary:

  * the y transform is the unitary centered DFT (qwalk.grids.dft), which
    toggles the y axes between the primal and dual sampling grids;
  * the translation by the current y sample values is exact index
    arithmetic when the y grid coincides with the x grid, and otherwise
    is carried out spectrally (forward x transform, multiplication by
    exp(-i zeta . y), inverse x transform), i.e. band-limited periodic
    translation with no interpolation error on the grid's own modes.

Because the dual of the dual grid is the primal grid, the y axes simply
alternate between the two grids along the evolution, and every quantity
downstream (densities, norms) weights axes by their current spacing.
"""

from __future__ import annotations

import numpy as np

from .grids import (
    BOUNDARY_GUARD,
    GridWavefunction,
    boundary_mass,
    dft,
    shear,
)
from .measures import DensityOnGrid


def _spectral_x_translation(psi: GridWavefunction, workers: int | None = None) -> GridWavefunction:
    """out(x, y) = in(x - y, y) for y sampled off the x grid (periodic, band-limited)."""
    d = psi.spec.d
    N = psi.spec.N
    g = dft(psi, axes="x", direction="forward", workers=workers)
    zeta = psi.spec.axis_coords(dual=True)
    y = psi.y_coords()
    vals = g.values.copy()
    for a in range(d):
        shape_z = [1] * (2 * d)
        shape_z[a] = N
        shape_y = [1] * (2 * d)
        shape_y[d + a] = N
        vals *= np.exp(-1j * zeta.reshape(shape_z) * y.reshape(shape_y))
    g = GridWavefunction(psi.spec, vals, x_dual=g.x_dual, y_dual=g.y_dual, warnings=g.warnings)
    return dft(g, axes="x", direction="inverse", workers=workers)


def plancherel_step(psi: GridWavefunction, workers: int | None = None) -> GridWavefunction:
    """One step: y-axis Fourier transform, then translation of x by y.

    Exactly norm preserving.  Appends a warning when the post-step
    boundary mass exceeds the truncation guard.
    """
    if psi.x_dual:
        raise ValueError("walk states keep the x axes on the primal grid")
    flipped = dft(psi, axes="y", direction="forward", workers=workers)
    if flipped.y_dual == flipped.x_dual:
        out = shear(flipped)
    else:
        out = _spectral_x_translation(flipped, workers=workers)
    bm = boundary_mass(out)
    if bm > BOUNDARY_GUARD:
        out = out.with_warning(f"boundary_mass={bm:.3e} exceeds {BOUNDARY_GUARD:g} after step")
    return out


def evolve(psi0: GridWavefunction, n: int, workers: int | None = None) -> GridWavefunction:
    """n-fold application of the step operator (n = 0 returns the input)."""
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    psi = psi0
    for _ in range(n):
        psi = plancherel_step(psi, workers=workers)
    return psi


def evolve_through(psi0: GridWavefunction, n_list, workers: int | None = None):
    """Yield (n, U^n psi0) at each n of a strictly increasing list, stepping once."""
    previous = -1
    psi = psi0
    steps_done = 0
    for n in n_list:
        if n <= previous:
            raise ValueError("n_list must be strictly increasing")
        previous = n
        for _ in range(n - steps_done):
            psi = plancherel_step(psi, workers=workers)
        steps_done = n
        yield n, psi


def position_density(psi: GridWavefunction) -> DensityOnGrid:
    """P(x) = integral over y of |psi(x, y)|^2, on the primal x grid."""
    if psi.x_dual:
        raise ValueError("position density requires x on the primal grid")
    d = psi.spec.d
    prob = psi.values.real**2 + psi.values.imag**2
    vals = prob.sum(axis=psi.y_axes) * psi.y_spacing**d
    return DensityOnGrid(
        d=d,
        L=psi.spec.L,
        N=psi.spec.N,
        values=vals,
        meta={"boundary_mass": boundary_mass(psi), "warnings": list(psi.warnings)},
    )


def rescaled_density(P: DensityOnGrid, n: int) -> DensityOnGrid:
    """Q_n(x) = n^d P(n x): relabel the grid to [-L/n, L/n), scale values by n^d."""
    if n < 1:
        raise ValueError(f"rescaling requires n >= 1, got {n}")
    return DensityOnGrid(
        d=P.d,
        L=P.L / n,
        N=P.N,
        values=P.values * float(n) ** P.d,
        meta={**P.meta, "rescaled_by": n},
    )


def limit_density(psi0: GridWavefunction, workers: int | None = None) -> DensityOnGrid:
    """Ballistic limit of the rescaled position densities.

    Computed from the x-axis Fourier transform Phi of the initial state:
    the limit density at x is 2^d * integral over y of |Phi(-2x, y)|^2.
    The -2x argument is evaluated exactly on dual-grid points, so the
    result lives on the induced x grid with spacing pi/(2L), and no
    interpolation is performed.
    """
    d = psi0.spec.d
    N = psi0.spec.N
    if psi0.x_dual:
        raise ValueError("limit density requires x on the primal grid")
    phi = dft(psi0, axes="x", direction="forward", workers=workers)
    prob = phi.values.real**2 + phi.values.imag**2
    dens_dual = prob.sum(axis=phi.y_axes) * phi.y_spacing**d * 2.0**d
    # zeta = -2x maps the x index m to the dual index (N - m) mod N per axis
    rev = (N - np.arange(N)) % N
    vals = dens_dual[np.ix_(*([rev] * d))]
    delta = np.pi / (2.0 * psi0.spec.L)
    return DensityOnGrid(
        d=d,
        L=delta * N / 2.0,
        N=N,
        values=vals,
        meta={"kind": "limit_density"},
    )


def check_u4_identity(psi: GridWavefunction, workers: int | None = None) -> float:
    """Relative L2 error of the four-step dispersion identity.

    In the x-frequency picture four steps act as multiplication by
    exp(i |zeta|^2); returns ||F1 U^4 psi - exp(i zeta^2) F1 psi|| / ||psi||.
    The identity is exact in the continuum; on the grid the error is
    dominated by truncation and vanishes under box refinement for
    well-contained states.
    """
    d = psi.spec.d
    N = psi.spec.N
    phi0 = dft(psi, axes="x", direction="forward", workers=workers)
    psi4 = evolve(psi, 4, workers=workers)
    phi4 = dft(psi4, axes="x", direction="forward", workers=workers)
    zeta = psi.spec.axis_coords(dual=True)
    zsq = np.zeros((N,) * d)
    for a in range(d):
        shape = [1] * d
        shape[a] = N
        zsq = zsq + (zeta**2).reshape(shape)
    phase = np.exp(1j * zsq).reshape((N,) * d + (1,) * d)
    diff = phi4.values - phase * phi0.values
    num = np.sqrt(phi4.cell_measure * np.vdot(diff, diff).real)
    return float(num / psi.norm())

"""Periodic torus grids, unitary discrete Fourier transforms, and the shear map.

Wavefunctions psi(x, y) on [-L, L)^{2d} are truncated periodically and
sampled on N points per axis.  Two sampling grids per axis arise:

  primal grid:  x_k = (k - N/2) * dx,        dx = 2L/N
  dual grid:    z_k = (k - N/2) * (pi / L)

The dual grid is where the discrete Fourier transform of a primal-grid
sampling lives; it obeys the reciprocity dx_dual = 2*pi / (N * dx).
The dual of the dual grid is the primal grid again, so transforming an
axis simply toggles which of the two grids that axis is sampled on.
GridWavefunction tracks this per axis group (x-axes, y-axes), and all
norms and integrals weight each axis by its current spacing.

``dft`` approximates the continuous transform with kernel
(2*pi)^(-d/2) * exp(-i x.z) (forward; +i for inverse), so grid values
approximate continuum function values directly, and the discrete
Parseval identity holds exactly up to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
import scipy.fft as sfft

from ._threads import resolve_workers

NORM_TOL = 1e-10
BOUNDARY_GUARD = 1e-6


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class GridSpec:
    """Geometry of the truncation box: d in {1, 2}, box [-L, L), N points per axis."""

    d: int
    L: float
    N: int

    def __post_init__(self) -> None:
        if self.d not in (1, 2):
            raise ValueError(f"d must be 1 or 2, got {self.d}")
        if not (self.L > 0):
            raise ValueError(f"L must be positive, got {self.L}")
        if not (_is_power_of_two(self.N) and self.N >= 8):
            raise ValueError(f"N must be a power of two >= 8, got {self.N}")

    @property
    def dx(self) -> float:
        return 2.0 * self.L / self.N

    @property
    def dual_dx(self) -> float:
        return np.pi / self.L

    def axis_coords(self, dual: bool = False) -> np.ndarray:
        s = self.dual_dx if dual else self.dx
        return (np.arange(self.N) - self.N // 2) * s

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * (2 * self.d)


@dataclass
class GridWavefunction:
    """Samples of psi(x, y) on the (x-grid) x (y-grid) product.

    values axes are ordered (x_1..x_d, y_1..y_d).  x_dual / y_dual say
    which grid each axis group is currently sampled on.  warnings
    accumulates evolution-time diagnostics (boundary-mass guard).
    """

    spec: GridSpec
    values: np.ndarray
    x_dual: bool = False
    y_dual: bool = False
    warnings: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.complex128)
        if self.values.shape != self.spec.shape:
            raise ValueError(
                f"values shape {self.values.shape} does not match spec shape {self.spec.shape}"
            )

    @property
    def x_axes(self) -> tuple[int, ...]:
        return tuple(range(self.spec.d))

    @property
    def y_axes(self) -> tuple[int, ...]:
        return tuple(range(self.spec.d, 2 * self.spec.d))

    @property
    def x_spacing(self) -> float:
        return self.spec.dual_dx if self.x_dual else self.spec.dx

    @property
    def y_spacing(self) -> float:
        return self.spec.dual_dx if self.y_dual else self.spec.dx

    def x_coords(self) -> np.ndarray:
        return self.spec.axis_coords(self.x_dual)

    def y_coords(self) -> np.ndarray:
        return self.spec.axis_coords(self.y_dual)

    @property
    def cell_measure(self) -> float:
        d = self.spec.d
        return self.x_spacing**d * self.y_spacing**d

    def norm(self) -> float:
        return float(np.sqrt(self.cell_measure * np.vdot(self.values, self.values).real))

    def normalized(self) -> "GridWavefunction":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero wavefunction")
        return replace(self, values=self.values / n)

    def with_warning(self, message: str) -> "GridWavefunction":
        return replace(self, warnings=self.warnings + (message,))


def dft(
    psi: GridWavefunction,
    axes: str = "both",
    direction: str = "forward",
    workers: int | None = None,
) -> GridWavefunction:
    """Unitary discrete approximation of the continuous Fourier transform.

    axes selects the transformed group: "x", "y", or "both".  forward
    uses the kernel (2*pi)^(-1/2) exp(-i x z) per axis, inverse the
    conjugate kernel.  Either direction toggles the selected group
    between the primal and dual grids.  Exactly norm-preserving
    (Parseval) and exactly inverted by the opposite direction.
    """
    if axes not in ("x", "y", "both"):
        raise ValueError(f"axes must be 'x', 'y' or 'both', got {axes!r}")
    if direction not in ("forward", "inverse"):
        raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")

    spec = psi.spec
    N = spec.N
    nworkers = resolve_workers(workers)

    groups: list[tuple[tuple[int, ...], float, str]] = []
    if axes in ("x", "both"):
        groups.append((psi.x_axes, psi.x_spacing, "x"))
    if axes in ("y", "both"):
        groups.append((psi.y_axes, psi.y_spacing, "y"))

    all_axes = tuple(ax for grp, _, _ in groups for ax in grp)
    # Centered DFT: ifftshift moves the origin sample to index 0, fftshift
    # centers the output; together they realize sum_j f(x_j) e^{-i x_j z_k}
    # exactly on the symmetric grids (N even).
    work = np.fft.ifftshift(psi.values, axes=all_axes)
    if direction == "forward":
        work = sfft.fftn(work, axes=all_axes, workers=nworkers)
    else:
        work = sfft.ifftn(work, axes=all_axes, workers=nworkers)
    work = np.fft.fftshift(work, axes=all_axes)

    scale = 1.0
    for grp, s_in, _ in groups:
        per_axis = s_in / np.sqrt(2.0 * np.pi)
        if direction == "inverse":
            per_axis *= N  # ifftn divides by N per axis; the Riemann sum does not
        scale *= per_axis ** len(grp)
    work = work * scale

    x_dual = psi.x_dual if axes == "y" else not psi.x_dual
    y_dual = psi.y_dual if axes == "x" else not psi.y_dual
    return GridWavefunction(spec, work, x_dual=x_dual, y_dual=y_dual, warnings=psi.warnings)


def shear(psi: GridWavefunction, inverse: bool = False) -> GridWavefunction:
    """(S psi)(x, y) = psi(x - y, y) by exact cyclic index arithmetic.

    Requires the x and y axes to be sampled on the same grid so that
    every y value is an x grid point; each paired axis is then shifted
    by the signed y index, with no interpolation.  A permutation of the
    samples, hence exactly norm preserving; inverse=True applies S^-1.
    """
    if psi.x_dual != psi.y_dual:
        raise ValueError(
            "shear requires x and y axes on the same grid "
            "(use the spectral translation for mixed grids)"
        )
    N = psi.spec.N
    half = N // 2
    d = psi.spec.d
    sign = 1 if inverse else -1
    k = np.arange(N)
    if d == 1:
        # out[i, j] = in[(i +/- (j - N/2)) mod N, j]
        rows = (k[:, None] + sign * (k[None, :] - half)) % N
        out = psi.values[rows, k[None, :]]
    else:
        i1 = k[:, None, None, None]
        i2 = k[None, :, None, None]
        j1 = k[None, None, :, None]
        j2 = k[None, None, None, :]
        out = psi.values[
            (i1 + sign * (j1 - half)) % N,
            (i2 + sign * (j2 - half)) % N,
            j1,
            j2,
        ]
    return GridWavefunction(
        psi.spec, out, x_dual=psi.x_dual, y_dual=psi.y_dual, warnings=psi.warnings
    )


def boundary_mass(psi: GridWavefunction) -> float:
    """Probability mass in the outermost two grid shells of every axis.

    Guard for periodic-truncation artifacts: evolution is faithful to
    the plane only while this stays below BOUNDARY_GUARD.
    """
    N = psi.spec.N
    prob = (psi.values.real**2 + psi.values.imag**2) * psi.cell_measure
    total = float(prob.sum())
    inner = prob
    for ax in range(prob.ndim):
        sl = [slice(None)] * prob.ndim
        sl[ax] = slice(2, N - 2)
        inner = inner[tuple(sl)]
    return max(total - float(inner.sum()), 0.0)


def random_wavefunction(spec: GridSpec, rng: np.random.Generator) -> GridWavefunction:
    """Normalized wavefunction with iid uniform[-1,1) real and imaginary parts."""
    shape = spec.shape
    v = rng.random(shape) * 2.0 - 1.0 + 1j * (rng.random(shape) * 2.0 - 1.0)
    return GridWavefunction(spec, v).normalized()


CSV_HEADER_PREFIX = "#"


def wavefunction_to_csv(psi: GridWavefunction, path) -> None:
    """Debug serialization: one row per sample, (x-index..., y-index..., re, im).

    A comment header records d, L, N and the per-group grid flags so the
    file round-trips without external context.
    """
    spec = psi.spec
    d = spec.d
    idx_names = [f"x{a+1}-index" for a in range(d)] + [f"y{a+1}-index" for a in range(d)]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(
            f"{CSV_HEADER_PREFIX} d={d} L={spec.L!r} N={spec.N} "
            f"x_dual={int(psi.x_dual)} y_dual={int(psi.y_dual)}\n"
        )
        fh.write(",".join(idx_names + ["re", "im"]) + "\n")
        flat = psi.values.reshape(-1)
        grids = np.indices(spec.shape).reshape(2 * d, -1)
        cols = [grids[a] for a in range(2 * d)] + [flat.real, flat.imag]
        fmt = ["%d"] * (2 * d) + ["%.17g", "%.17g"]
        np.savetxt(fh, np.column_stack(cols), fmt=fmt, delimiter=",")


def wavefunction_from_csv(path) -> GridWavefunction:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline()
        if not header.startswith(CSV_HEADER_PREFIX):
            raise ValueError(f"{path}: missing metadata header line")
        meta = dict(tok.split("=", 1) for tok in header[1:].split())
        d = int(meta["d"])
        spec = GridSpec(d=d, L=float(meta["L"]), N=int(meta["N"]))
        x_dual = bool(int(meta.get("x_dual", "0")))
        y_dual = bool(int(meta.get("y_dual", "0")))
        fh.readline()  # column names
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    values = np.zeros(spec.shape, dtype=np.complex128)
    idx = tuple(data[:, a].astype(np.intp) for a in range(2 * d))
    values[idx] = data[:, 2 * d] + 1j * data[:, 2 * d + 1]
    return GridWavefunction(spec, values, x_dual=x_dual, y_dual=y_dual)

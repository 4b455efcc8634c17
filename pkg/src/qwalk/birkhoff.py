"""Walks whose coin flip composes with an invertible measure-preserving map.

The n-step state has the closed form

    (U^n psi0)(x, omega) = psi0(x - S_n(omega), T^n(omega)),
    S_n(omega) = sum_{j=0}^{n-1} h(T^j(omega)),

so the walk is never evolved by mutating a function-space state: the
estimators below evaluate the closed form directly, which makes step
counts like 10^4 routine.  Two independent estimators of the position
law are provided, a Monte Carlo sampler (general states) and an
Omega-quadrature (product states), so each can validate the other.

Shipped systems: rotation of the circle [0,1) by alpha (irrational or
rational) and the baker's map on the unit square, both preserving
Lebesgue measure.  Step functions h are trigonometric polynomials (or
constants) per output coordinate, evaluated on the circle coordinate
directly and on the first (expanding) coordinate of the square.

Deep dyadic orbits: one baker step doubles one coordinate, so a float
sample exhausts its 53 mantissa bits after ~50 steps.  When an orbit
routine receives an RNG it extends the sample on the fly with fresh
uniform bits in a 53-bit integer register, which simulates the exact
map on a random point whose unseen binary digits are drawn lazily.
This is distribution-exact for Lebesgue samples at any depth.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .measures import DensityOnGrid, EmpiricalMeasure

CHUNK = 4096
_REG_BITS = 53
_REG_MASK = np.uint64((1 << _REG_BITS) - 1)
_REG_SCALE = 2.0**-_REG_BITS
_TOP_SHIFT = np.uint64(_REG_BITS - 1)
_ONE = np.uint64(1)

STABILIZATION_TOL = 1e-2
STABILIZATION_QUANTILE = 0.99


@dataclass(frozen=True)
class TrigPolynomial:
    """c0 + sum_m (cos_m * cos(2 pi m theta) + sin_m * sin(2 pi m theta))."""

    const: float = 0.0
    cos: tuple[float, ...] = ()
    sin: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "cos", tuple(float(c) for c in self.cos))
        object.__setattr__(self, "sin", tuple(float(s) for s in self.sin))

    def __call__(self, theta: np.ndarray) -> np.ndarray:
        theta = np.asarray(theta, dtype=np.float64)
        out = np.full(theta.shape, self.const)
        for m, a in enumerate(self.cos, start=1):
            if a != 0.0:
                out += a * np.cos((2.0 * np.pi * m) * theta)
        for m, b in enumerate(self.sin, start=1):
            if b != 0.0:
                out += b * np.sin((2.0 * np.pi * m) * theta)
        return out

    @property
    def is_constant(self) -> bool:
        return all(c == 0.0 for c in self.cos) and all(s == 0.0 for s in self.sin)

    def bound(self) -> float:
        return abs(self.const) + sum(abs(c) for c in self.cos) + sum(abs(s) for s in self.sin)


def constant_h(v) -> tuple[TrigPolynomial, ...]:
    vs = np.atleast_1d(np.asarray(v, dtype=np.float64))
    return tuple(TrigPolynomial(const=float(c)) for c in vs)


class DynamicalSystem:
    """Invertible Lebesgue-preserving map with a step function h: Omega -> R^d."""

    space: str
    name: str
    h: tuple[TrigPolynomial, ...]

    @property
    def d(self) -> int:
        return len(self.h)

    @property
    def h_is_constant(self) -> bool:
        return all(p.is_constant for p in self.h)

    def h_values(self) -> np.ndarray:
        """The constant vector h when h is constant."""
        if not self.h_is_constant:
            raise ValueError("h is not constant")
        return np.array([p.const for p in self.h])

    def angle(self, omega: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def h_eval(self, omega: np.ndarray) -> np.ndarray:
        """h at a batch of points; shape (m, d)."""
        theta = self.angle(omega)
        return np.stack([p(theta) for p in self.h], axis=-1)

    def forward(self, omega: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def inverse(self, omega: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        raise NotImplementedError

    def orbit(self, omega: np.ndarray, direction: str, rng: np.random.Generator | None):
        """Stateful vectorized orbit stepper; .advance() returns the next point."""
        raise NotImplementedError


class _FloatOrbit:
    """Orbit by repeated application of a pointwise float map."""

    def __init__(self, omega: np.ndarray, step: Callable[[np.ndarray], np.ndarray]):
        self._omega = omega
        self._step = step

    def advance(self) -> np.ndarray:
        self._omega = self._step(self._omega)
        return self._omega

    @property
    def current(self) -> np.ndarray:
        return self._omega


@dataclass(frozen=True)
class CircleRotation(DynamicalSystem):
    """T(omega) = omega + alpha mod 1 on [0,1); h evaluated at omega itself."""

    alpha: float
    h: tuple[TrigPolynomial, ...] = (TrigPolynomial(cos=(1.0,)),)
    name: str = "rotation"
    space: str = "circle"

    def angle(self, omega: np.ndarray) -> np.ndarray:
        return np.asarray(omega, dtype=np.float64)

    def forward(self, omega: np.ndarray) -> np.ndarray:
        return np.mod(np.asarray(omega, dtype=np.float64) + self.alpha, 1.0)

    def inverse(self, omega: np.ndarray) -> np.ndarray:
        return np.mod(np.asarray(omega, dtype=np.float64) - self.alpha, 1.0)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.random(size)

    def orbit(self, omega, direction, rng=None):
        step = self.forward if direction == "forward" else self.inverse
        return _FloatOrbit(np.asarray(omega, dtype=np.float64), step)


class _BakerRegisterOrbit:
    """Baker orbit with lazy bit replenishment of the expanding coordinate.

    backward: v doubles each step; its register sheds the top bit into u
    and takes a fresh uniform bit at the bottom.  forward: the mirror
    image with u expanding.
    """

    def __init__(self, omega: np.ndarray, direction: str, rng: np.random.Generator):
        om = np.asarray(omega, dtype=np.float64)
        self._direction = direction
        self._rng = rng
        u = om[..., 0].copy()
        v = om[..., 1].copy()
        if direction == "backward":
            self._contracting = u
            self._register = np.floor(v * 2.0**_REG_BITS).astype(np.uint64)
        else:
            self._contracting = v
            self._register = np.floor(u * 2.0**_REG_BITS).astype(np.uint64)

    def advance(self) -> np.ndarray:
        top = self._register >> _TOP_SHIFT
        fresh = self._rng.integers(0, 2, size=self._register.shape, dtype=np.uint64)
        self._register = ((self._register << _ONE) & _REG_MASK) | fresh
        self._contracting = (self._contracting + top.astype(np.float64)) * 0.5
        return self.current

    @property
    def current(self) -> np.ndarray:
        expanding = self._register.astype(np.float64) * _REG_SCALE
        if self._direction == "backward":
            return np.stack([self._contracting, expanding], axis=-1)
        return np.stack([expanding, self._contracting], axis=-1)


@dataclass(frozen=True)
class BakerMap(DynamicalSystem):
    """T(u, v) = (2u mod 1, (v + floor(2u))/2); h evaluated at the u coordinate."""

    h: tuple[TrigPolynomial, ...] = (TrigPolynomial(cos=(1.0,)),)
    name: str = "baker"
    space: str = "square"

    def angle(self, omega: np.ndarray) -> np.ndarray:
        return np.asarray(omega, dtype=np.float64)[..., 0]

    def forward(self, omega: np.ndarray) -> np.ndarray:
        om = np.asarray(omega, dtype=np.float64)
        u, v = om[..., 0], om[..., 1]
        b = np.floor(2.0 * u)
        return np.stack([2.0 * u - b, (v + b) * 0.5], axis=-1)

    def inverse(self, omega: np.ndarray) -> np.ndarray:
        om = np.asarray(omega, dtype=np.float64)
        u, v = om[..., 0], om[..., 1]
        b = np.floor(2.0 * v)
        return np.stack([(u + b) * 0.5, 2.0 * v - b], axis=-1)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.random((size, 2))

    def orbit(self, omega, direction, rng=None):
        if rng is not None:
            return _BakerRegisterOrbit(omega, direction, rng)
        step = self.forward if direction == "forward" else self.inverse
        return _FloatOrbit(np.asarray(omega, dtype=np.float64), step)


def _as_batch(sys: DynamicalSystem, omega) -> tuple[np.ndarray, bool]:
    om = np.asarray(omega, dtype=np.float64)
    if sys.space == "circle":
        if om.ndim == 0:
            return om[None], True
        return om, False
    if om.ndim == 1:
        return om[None, :], True
    return om, False


def _orbit_sum(
    sys: DynamicalSystem,
    omega: np.ndarray,
    n_terms: int,
    direction: str,
    rng: np.random.Generator | None = None,
    include_start: bool = False,
    snapshot_at: int | None = None,
):
    """Sum of h over n_terms consecutive orbit points.

    include_start counts h(omega) as the first term; otherwise the first
    term is h at the first mapped point.  Returns (total, snapshot,
    final_omega) where snapshot is the partial sum after snapshot_at
    terms (None when not requested).
    """
    if direction not in ("forward", "backward"):
        raise ValueError(f"direction must be 'forward' or 'backward', got {direction!r}")
    if n_terms < 1:
        raise ValueError(f"need at least one term, got {n_terms}")
    orbit = sys.orbit(omega, direction, rng)
    if include_start:
        total = sys.h_eval(orbit.current)
        done = 1
    else:
        total = sys.h_eval(orbit.advance())
        done = 1
    snap = None
    if snapshot_at is not None and done >= snapshot_at:
        snap = total.copy()
    while done < n_terms:
        total = total + sys.h_eval(orbit.advance())
        done += 1
        if snapshot_at is not None and done == snapshot_at:
            snap = total.copy()
    return total, snap, orbit.current


def trajectory_sum(
    sys: DynamicalSystem,
    omega,
    n: int,
    direction: str = "forward",
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """forward: sum_{j=0}^{n-1} h(T^j omega); backward: sum_{j=1}^{n} h(T^-j omega).

    Pass an RNG to extend dyadic orbits (baker) beyond float depth; the
    rotation orbit is an isometry and never needs it.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    om, scalar = _as_batch(sys, omega)
    total, _, _ = _orbit_sum(
        sys, om, n, direction, rng=rng, include_start=(direction == "forward")
    )
    return total[0] if scalar else total


def birkhoff_average(
    sys: DynamicalSystem,
    omega,
    n: int,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """(1/n) sum_{j=0}^{n-1} h(T^-j omega): the ergodic average along the past orbit."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    om, scalar = _as_batch(sys, omega)
    if sys.h_is_constant:
        # the time average of a constant is that constant, exactly
        out = np.broadcast_to(sys.h_values(), (om.shape[0], sys.d)).copy()
        return out[0] if scalar else out
    total, _, _ = _orbit_sum(sys, om, n, "backward", rng=rng, include_start=True)
    avg = total / n
    return avg[0] if scalar else avg


@dataclass
class CoinDensity:
    """Probability density over Omega relative to the invariant measure.

    Either closed form (fn) or piecewise constant on a circle grid
    (grid_values at midpoints (j+1/2)/M).  None of both means uniform.
    The density is normalized at construction on a fine midpoint grid
    (spectrally exact for trigonometric-polynomial densities).
    """

    fn: Callable[[np.ndarray], np.ndarray] | None = None
    grid_values: np.ndarray | None = None
    space: str = "circle"
    meta: dict[str, Any] = field(default_factory=dict)

    _norm: float = field(init=False, default=1.0)
    _bound: float = field(init=False, default=1.0)

    def __post_init__(self) -> None:
        if self.fn is not None and self.grid_values is not None:
            raise ValueError("give either fn or grid_values, not both")
        if self.grid_values is not None:
            if self.space != "circle":
                raise ValueError("grid coin densities are supported on the circle only")
            vals = np.asarray(self.grid_values, dtype=np.float64)
            if vals.ndim != 1 or np.any(vals < 0):
                raise ValueError("grid_values must be a nonnegative vector")
            total = vals.mean()  # midpoint rule on [0,1)
            if total <= 0:
                raise ValueError("grid coin density has zero mass")
            self.grid_values = vals / total
        elif self.fn is not None:
            probe = self._probe_points()
            vals = np.asarray(self.fn(probe), dtype=np.float64)
            if np.any(vals < -1e-12):
                raise ValueError("coin density function takes negative values")
            total = float(vals.mean())
            if total <= 0:
                raise ValueError("coin density has zero mass")
            self._norm = total
            self._bound = float(vals.max()) / total * 1.01

    def _probe_points(self) -> np.ndarray:
        m = 1 << 14
        mid = (np.arange(m) + 0.5) / m
        if self.space == "circle":
            return mid
        k = 1 << 10
        mid = (np.arange(k) + 0.5) / k
        uu, vv = np.meshgrid(mid, mid, indexing="ij")
        return np.stack([uu.reshape(-1), vv.reshape(-1)], axis=-1)

    @property
    def is_uniform(self) -> bool:
        return self.fn is None and self.grid_values is None

    def __call__(self, omega: np.ndarray) -> np.ndarray:
        omega = np.asarray(omega, dtype=np.float64)
        base_shape = omega.shape if self.space == "circle" else omega.shape[:-1]
        if self.is_uniform:
            return np.ones(base_shape)
        if self.grid_values is not None:
            m = self.grid_values.shape[0]
            idx = np.minimum((omega * m).astype(np.intp), m - 1)
            return self.grid_values[idx]
        return np.asarray(self.fn(omega), dtype=np.float64) / self._norm

    def sample(self, rng: np.random.Generator, size: int, sys: DynamicalSystem) -> np.ndarray:
        """Draw omega with law (density) d P, via the system's base sampler."""
        if self.space != sys.space:
            raise ValueError(
                f"coin density lives on the {self.space} but the system on the {sys.space}"
            )
        if self.is_uniform:
            return sys.sample(rng, size)
        if self.grid_values is not None:
            m = self.grid_values.shape[0]
            cells = rng.choice(m, size=size, p=self.grid_values / self.grid_values.sum())
            return (cells + rng.random(size)) / m
        out = np.empty((size, 2)) if self.space == "square" else np.empty(size)
        filled = 0
        while filled < size:
            cand = sys.sample(rng, size - filled)
            dens = self(cand)
            if np.any(dens > self._bound):
                raise RuntimeError(
                    "coin density exceeds its rejection bound; refusing to sample biased"
                )
            keep = rng.random(len(dens)) * self._bound < dens
            kept = cand[keep]
            out[filled : filled + len(kept)] = kept
            filled += len(kept)
        return out


@dataclass
class ProductSampler:
    """(y, omega) sampler for product initial states phi0(x) chi0(omega).

    profiles: one position profile per walker coordinate (objects with
    sample_position); coin: the law of omega.
    """

    profiles: tuple
    coin: CoinDensity
    system: DynamicalSystem

    def __post_init__(self) -> None:
        if len(self.profiles) != self.system.d:
            raise ValueError(
                f"need {self.system.d} position profiles, got {len(self.profiles)}"
            )

    def sample(self, rng: np.random.Generator, size: int) -> tuple[np.ndarray, np.ndarray]:
        y = np.stack([p.sample_position(rng, size) for p in self.profiles], axis=-1)
        omega = self.coin.sample(rng, size, self.system)
        return y, omega


def _chunk_rng(seed: int, *key: int) -> np.random.Generator:
    # one independent stream per (seed, purpose-tag, ..., chunk index):
    # chunked draws make results independent of worker count, the tag
    # keeps walk/limit/diagnostic streams disjoint
    return np.random.default_rng(np.random.SeedSequence((int(seed),) + tuple(int(k) for k in key)))


def sample_rescaled_position(
    sys: DynamicalSystem,
    sampler: ProductSampler,
    n: int,
    samples: int,
    seed: int,
    chunk: int = CHUNK,
) -> EmpiricalMeasure:
    """Monte Carlo draw from the rescaled position law after n steps.

    Each sample emits x = (y + sum_{j=1}^{n} h(T^-j omega)) / n with
    (y, omega) drawn from the initial state.  Samples are produced in
    fixed-size chunks with per-chunk RNG streams derived from
    (seed, chunk index), so results do not depend on worker count.
    """
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    out = np.empty((samples, sys.d))
    filled = 0
    index = 0
    while filled < samples:
        size = min(chunk, samples - filled)
        rng = _chunk_rng(seed, 0, n, index)
        y, omega = sampler.sample(rng, size)
        back, _, _ = _orbit_sum(sys, omega, n, "backward", rng=rng, include_start=False)
        out[filled : filled + size] = (y + back) / n
        filled += size
        index += 1
    atoms = out[:, 0] if sys.d == 1 else out
    weights = np.full(samples, 1.0 / samples)
    return EmpiricalMeasure(
        atoms,
        weights,
        meta={"seed": seed, "samples": samples, "n": n, "system": sys.name, "chunk": chunk},
    )


def limit_pushforward(
    sys: DynamicalSystem,
    coin: CoinDensity,
    n_avg: int,
    samples: int,
    seed: int,
    chunk: int = CHUNK,
    stab_tol: float = STABILIZATION_TOL,
) -> EmpiricalMeasure:
    """Empirical estimate of the limit law: h-averages along past orbits.

    Draws omega from the coin law and emits the n_avg-term ergodic
    average.  The truncation of the (rate-free) ergodic limit is
    monitored by comparing against the n_avg/2-term average; the
    fraction of samples within stab_tol per coordinate is reported, with
    a warning when it drops below STABILIZATION_QUANTILE.
    """
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    if n_avg < 2:
        raise ValueError(f"n_avg must be >= 2, got {n_avg}")
    meta: dict[str, Any] = {
        "seed": seed,
        "samples": samples,
        "n_avg": n_avg,
        "system": sys.name,
        "chunk": chunk,
    }
    weights = np.full(samples, 1.0 / samples)
    if sys.h_is_constant:
        v = sys.h_values()
        atoms = np.tile(v, (samples, 1))
        meta["stabilized_fraction"] = 1.0
        out = atoms[:, 0] if sys.d == 1 else atoms
        return EmpiricalMeasure(out, weights, meta=meta)
    half = n_avg // 2
    atoms = np.empty((samples, sys.d))
    stable = 0
    filled = 0
    index = 0
    while filled < samples:
        size = min(chunk, samples - filled)
        rng = _chunk_rng(seed, 1, n_avg, index)
        omega = coin.sample(rng, size, sys)
        om, _ = _as_batch(sys, omega)
        total, snap, _ = _orbit_sum(
            sys, om, n_avg, "backward", rng=rng, include_start=True, snapshot_at=half
        )
        avg = total / n_avg
        avg_half = snap / half
        stable += int(np.sum(np.all(np.abs(avg - avg_half) < stab_tol, axis=-1)))
        atoms[filled : filled + size] = avg
        filled += size
        index += 1
    frac = stable / samples
    meta["stabilized_fraction"] = frac
    if frac < STABILIZATION_QUANTILE:
        meta["warnings"] = [
            f"ergodic averages stabilized for only {frac:.3f} of samples "
            f"(tol {stab_tol:g} at n_avg={n_avg} vs {half})"
        ]
    out = atoms[:, 0] if sys.d == 1 else atoms
    return EmpiricalMeasure(out, weights, meta=meta)


def omega_nodes(sys: DynamicalSystem, n: int, nodes: int | tuple[int, int] | None = None):
    """Quadrature nodes and weights on Omega (midpoint rule on the torus).

    The circle rule is spectrally accurate for trigonometric integrands
    at any n.  The baker integrand is piecewise smooth on 2^n dyadic
    strips, so the u resolution must refine with n; the default 2^(n+4)
    midpoints keep the cells 16x finer than the finest strip, and the
    node budget guard rejects depths the rule cannot afford.
    """
    if sys.space == "circle":
        m = nodes if isinstance(nodes, int) else 4096
        pts = (np.arange(m) + 0.5) / m
        return pts, np.full(m, 1.0 / m)
    if isinstance(nodes, tuple):
        mu, mv = nodes
    else:
        mu, mv = 2 ** (n + 4), 64
    if mu * mv > 1 << 23:
        raise ValueError(
            f"baker quadrature needs {mu}x{mv} nodes at n={n} to resolve the dyadic "
            "strips; beyond the node budget, use the Monte Carlo sampler instead"
        )
    u = (np.arange(mu) + 0.5) / mu
    v = (np.arange(mv) + 0.5) / mv
    uu, vv = np.meshgrid(u, v, indexing="ij")
    pts = np.stack([uu.reshape(-1), vv.reshape(-1)], axis=-1)
    return pts, np.full(mu * mv, 1.0 / (mu * mv))


def pn_quadrature(
    sys: DynamicalSystem,
    phi0,
    coin: CoinDensity,
    n: int,
    L: float,
    N: int,
    nodes: int | tuple[int, int] | None = None,
    chunk: int = 8192,
) -> DensityOnGrid:
    """Position density after n steps by direct quadrature of the closed form.

    P_n(x) = sum_nodes w * coin(T^n omega) * |phi0(x - S_n(omega))|^2 for
    a product initial state.  Restricted to scalar step functions (d=1);
    the Monte Carlo path covers everything else.  n = 0 returns the
    initial density |phi0|^2.
    """
    if sys.d != 1:
        raise ValueError("quadrature is implemented for d=1 step functions only")
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    if coin.space != sys.space:
        raise ValueError(
            f"coin density lives on the {coin.space} but the system on the {sys.space}"
        )
    if coin.grid_values is not None:
        raise ValueError("quadrature needs a closed-form coin density (fn or uniform)")
    x = (np.arange(N) - N // 2) * (2.0 * L / N)
    pts, w = omega_nodes(sys, n, nodes)
    if n == 0:
        s_n = np.zeros((pts.shape[0], 1))
        end = pts
    else:
        s_n, _, end = _orbit_sum(sys, pts, n, "forward", include_start=True)
    cw = w * coin(end)
    vals = np.zeros(N)
    s_flat = s_n[:, 0]
    for start in range(0, s_flat.shape[0], chunk):
        sl = slice(start, start + chunk)
        block = phi0(x[None, :] - s_flat[sl, None])
        vals += cw[sl] @ (block.real**2 + block.imag**2)
    dens = DensityOnGrid(d=1, L=L, N=N, values=vals, meta={"n": n, "system": sys.name})
    total = dens.integral()
    dens.meta["integral"] = total
    if abs(total - 1.0) > 1e-8:
        dens.meta["warnings"] = [
            f"quadrature mass {total!r} off unity by {abs(total-1.0):.2e}; "
            "widen the x grid or refine the Omega nodes"
        ]
    return dens


def measure_preservation_ks(
    sys: DynamicalSystem, samples: int = 100_000, seed: int = 0
) -> float:
    """Largest per-coordinate KS distance of T(omega), omega ~ P, to P itself."""
    from .limits import ks_distance_to_cdf

    rng = _chunk_rng(seed, 2, 0)
    om = sys.sample(rng, samples)
    mapped = sys.forward(om)
    cols = mapped[:, None] if mapped.ndim == 1 else mapped
    worst = 0.0
    for a in range(cols.shape[1]):
        m = EmpiricalMeasure(cols[:, a], np.full(samples, 1.0 / samples))
        worst = max(worst, ks_distance_to_cdf(m, lambda t: np.clip(t, 0.0, 1.0)))
    return worst

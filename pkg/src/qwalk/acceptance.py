"""Executable verification suite behind `qwalk verify`.

Each criterion is a function returning a CriterionResult with named
sub-checks; a criterion passes only if every sub-check passes (including
its runtime budget where one is declared).  Everything is seeded, so the
suite is deterministic run to run and across worker counts.
"""

from __future__ import annotations

import contextlib
import io
import os
import sys
import tempfile
import time
from dataclasses import dataclass, field

import numpy as np

from .birkhoff import (
    BakerMap,
    CircleRotation,
    CoinDensity,
    ProductSampler,
    TrigPolynomial,
    constant_h,
    limit_pushforward,
    pn_quadrature,
    sample_rescaled_position,
)
from .grids import GridSpec, dft, random_wavefunction
from .lattice import (
    LatticeState,
    basis_state,
    evolve as lattice_evolve,
    hadamard_step,
    lattice_distribution,
    mass_outside,
    rescaled_lattice_measure,
)
from .limits import cf_distance, characteristic_function, default_zeta_grid, ks_distance_to_cdf, moments
from .plancherel import (
    check_u4_identity,
    evolve,
    limit_density,
    plancherel_step,
    position_density,
    rescaled_density,
)
from .states import GaussianProfile, product_state

GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass
class CriterionResult:
    cid: str
    name: str
    passed: bool
    seconds: float
    details: list[str] = field(default_factory=list)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.cid} {self.name} ({self.seconds:.1f}s)"


class _Checks:
    def __init__(self) -> None:
        self.items: list[tuple[str, bool]] = []

    def add(self, label: str, good: bool) -> None:
        self.items.append((label, bool(good)))

    def le(self, label: str, value: float, bound: float) -> None:
        self.add(f"{label}: {value:.3e} <= {bound:g}", value <= bound)

    def finish(self, cid: str, name: str, t0: float, budget: float | None = None) -> CriterionResult:
        dt = time.perf_counter() - t0
        if budget is not None:
            self.add(f"runtime {dt:.1f}s < {budget:.0f}s", dt < budget)
        return CriterionResult(
            cid=cid,
            name=name,
            passed=all(ok for _, ok in self.items),
            seconds=dt,
            details=[("ok   " if ok else "FAIL ") + label for label, ok in self.items],
        )


def _random_lattice_state(rng: np.random.Generator) -> LatticeState:
    width = int(rng.integers(1, 24))
    offset = int(rng.integers(-9, 10))
    amps = rng.normal(size=(2, width)) + 1j * rng.normal(size=(2, width))
    state = LatticeState(offset=offset, amps_h=amps[0], amps_t=amps[1])
    return state.normalized()


def _random_gaussian_profile(rng: np.random.Generator) -> GaussianProfile:
    return GaussianProfile(
        center=float(rng.uniform(-1, 1)),
        width=float(rng.uniform(0.6, 1.6)),
        momentum=float(rng.uniform(-1, 1)),
    )


def _random_trig(rng: np.random.Generator, bound: float = 1.0) -> TrigPolynomial:
    return TrigPolynomial(
        const=float(rng.uniform(-0.5, 0.5)),
        cos=(float(rng.uniform(-bound, bound)),),
        sin=(float(rng.uniform(-bound, bound)),),
    )


def criterion_1(workers: int | None = None) -> CriterionResult:
    """Every step operator conserves norm / total mass within 1e-10."""
    t0 = time.perf_counter()
    checks = _Checks()
    rng = np.random.default_rng(101)

    worst = 0.0
    for _ in range(100):
        state = _random_lattice_state(rng)
        worst = max(worst, abs(hadamard_step(state).norm() - 1.0))
    checks.le("lattice step norm drift over 100 random states", worst, 1e-10)

    spec = GridSpec(d=1, L=8.0, N=128)
    worst = 0.0
    for i in range(100):
        psi = random_wavefunction(spec, rng)
        if i % 2:
            psi = dft(psi, axes="y", workers=workers)  # start from the dual y-grid
        worst = max(worst, abs(plancherel_step(psi, workers=workers).norm() - 1.0))
    checks.le("continuum step norm drift over 100 random states", worst, 1e-10)

    worst = 0.0
    for i in range(100):
        profile = _random_gaussian_profile(rng)
        h = (_random_trig(rng),)
        if i % 5 == 0:
            system = BakerMap(h=h)
            coin = CoinDensity(space="square")
            n = int(rng.integers(0, 5))
        else:
            system = CircleRotation(alpha=float(rng.random()), h=h)
            if i % 3 == 0:
                chi = _random_trig(rng, bound=0.4)
                coin = CoinDensity(fn=lambda om, chi=chi: (1.0 + chi(om)) ** 2)
            else:
                coin = CoinDensity()
            n = int(rng.integers(0, 13))
        reach = abs(profile.center) + 6 * profile.width + n * h[0].bound() + 2
        N = 256 if system.space == "square" else 512
        dens = pn_quadrature(system, profile, coin, n=n, L=reach, N=N)
        worst = max(worst, abs(dens.integral() - 1.0))
    checks.le("orbit quadrature mass drift over 100 random states", worst, 1e-10)

    return checks.finish("1", "unitarity", t0, budget=60.0)


def criterion_2(workers: int | None = None) -> CriterionResult:
    """Four steps act in the spectral picture as the quadratic phase
    e^{i zeta^2}; the residual must fall strictly under grid refinement."""
    t0 = time.perf_counter()
    checks = _Checks()
    errors = []
    for L, N in ((8.0, 128), (16.0, 256), (32.0, 512)):
        spec = GridSpec(d=1, L=L, N=N)
        psi0, _ = product_state(spec, GaussianProfile(width=3.0), GaussianProfile(width=3.0))
        errors.append(check_u4_identity(psi0, workers=workers))
    checks.add(
        f"residuals strictly decreasing: {', '.join(f'{e:.3e}' for e in errors)}",
        all(b < a for a, b in zip(errors, errors[1:])),
    )
    checks.le("final residual", errors[-1], 1e-6)
    return checks.finish("2", "four-step-phase-identity", t0, budget=60.0)


def criterion_3(workers: int | None = None) -> CriterionResult:
    """Gaussian input: limit density matches (2/sqrt(pi)) e^{-4x^2} and the
    rescaled laws approach it along n = 4m."""
    t0 = time.perf_counter()
    checks = _Checks()

    spec = GridSpec(d=1, L=16.0, N=256)
    psi0, _ = product_state(spec, GaussianProfile(), GaussianProfile())
    q = limit_density(psi0, workers=workers)
    x = q.axis_coords()
    target = (2.0 / np.sqrt(np.pi)) * np.exp(-4.0 * x**2)
    checks.le("limit density vs analytic Gaussian (L=16, N=256)", float(np.max(np.abs(q.values - target))), 1e-6)

    sweep_spec = GridSpec(d=1, L=128.0, N=1024)
    psi0, _ = product_state(sweep_spec, GaussianProfile(), GaussianProfile())
    q_inf = limit_density(psi0, workers=workers)
    steps = [4, 8, 16, 32, 64]
    cfs = []
    psi = psi0
    done = 0
    for n in steps:
        psi = evolve(psi, n - done, workers=workers)
        done = n
        qn = rescaled_density(position_density(psi), n)
        cfs.append(cf_distance(qn, q_inf))
    checks.add(
        "cf distance nonincreasing over n=4,8,16,32,64: " + ", ".join(f"{c:.4f}" for c in cfs),
        all(b <= a for a, b in zip(cfs, cfs[1:])),
    )
    checks.le("final cf distance", cfs[-1], 0.02)
    return checks.finish("3", "gaussian-limit-law", t0, budget=300.0)


def criterion_4(workers: int | None = None) -> CriterionResult:
    """The limit density does not depend on the coin factor chi0."""
    t0 = time.perf_counter()
    checks = _Checks()
    from .states import BoxProfile

    spec = GridSpec(d=1, L=16.0, N=256)
    phi = GaussianProfile()
    a, _ = product_state(spec, phi, GaussianProfile(width=1.7))
    b, _ = product_state(spec, phi, BoxProfile(-1.0, 2.0))
    qa = limit_density(a, workers=workers)
    qb = limit_density(b, workers=workers)
    checks.le(
        "limit densities for Gaussian vs box coin factor",
        float(np.max(np.abs(qa.values - qb.values))),
        1e-10,
    )
    return checks.finish("4", "coin-factor-independence", t0)


def criterion_5(workers: int | None = None) -> CriterionResult:
    """Stepping the initial state leaves the limit density unchanged."""
    t0 = time.perf_counter()
    checks = _Checks()
    spec = GridSpec(d=1, L=16.0, N=256)
    psi0, _ = product_state(spec, GaussianProfile(), GaussianProfile())
    base = limit_density(psi0, workers=workers)
    psi = psi0
    worst = 0.0
    for p in range(1, 5):
        psi = plancherel_step(psi, workers=workers)
        qp = limit_density(psi, workers=workers)
        worst = max(worst, float(np.max(np.abs(qp.values - base.values))))
    checks.le("limit density drift over 1..4 initial steps", worst, 1e-6)
    return checks.finish("5", "step-invariance-of-limit", t0)


def criterion_6(workers: int | None = None) -> CriterionResult:
    """Orbit-average limit laws: exact point mass for constant step, a
    point-mass limit for the irrational rotation, the arcsine law for the
    half rotation with a doubled harmonic."""
    t0 = time.perf_counter()
    checks = _Checks()

    worst = 0.0
    for n_avg in (2, 10, 1000):
        system = CircleRotation(alpha=GOLDEN, h=constant_h([0.4]))
        lim = limit_pushforward(system, CoinDensity(), n_avg=n_avg, samples=2000, seed=601)
        worst = max(worst, float(np.max(np.abs(lim.atoms - 0.4))))
    checks.add(f"constant step: atoms exactly at 0.4 for all n_avg (drift {worst:.1e})", worst == 0.0)

    rot = CircleRotation(alpha=GOLDEN, h=(TrigPolynomial(cos=(1.0,)),))
    uniform = CoinDensity()
    lim = limit_pushforward(rot, uniform, n_avg=10_000, samples=100_000, seed=602)
    m2 = float(moments(lim, 2)[2, 0])
    checks.le("golden rotation: limit second moment at n_avg=1e4", m2, 1e-3)

    sampler = ProductSampler((GaussianProfile(),), uniform, rot)
    cfs = []
    for n in (100, 1000, 10_000):
        emp = sample_rescaled_position(rot, sampler, n=n, samples=100_000, seed=602)
        cfs.append(cf_distance(emp, lim))
    checks.add(
        "golden rotation: cf distance to limit decreasing over n=1e2,1e3,1e4: "
        + ", ".join(f"{c:.2e}" for c in cfs),
        all(b < a for a, b in zip(cfs, cfs[1:])),
    )

    arc = CircleRotation(alpha=0.5, h=(TrigPolynomial(cos=(0.0, 1.0)),))
    lim_arc = limit_pushforward(arc, uniform, n_avg=1000, samples=100_000, seed=603)
    arcsine = lambda v: np.arccos(np.clip(-np.asarray(v, dtype=np.float64), -1.0, 1.0)) / np.pi
    checks.le("half rotation: KS distance to arcsine law", ks_distance_to_cdf(lim_arc, arcsine), 0.01)

    return checks.finish("6", "orbit-average-limits", t0, budget=600.0)


def criterion_7(workers: int | None = None) -> CriterionResult:
    """The Monte Carlo and quadrature estimators of the rescaled law agree
    in characteristic function within 3 standard errors."""
    t0 = time.perf_counter()
    checks = _Checks()
    rot = CircleRotation(alpha=GOLDEN, h=(TrigPolynomial(cos=(1.0,)),))
    uniform = CoinDensity()
    profile = GaussianProfile()
    sampler = ProductSampler((profile,), uniform, rot)
    zg = default_zeta_grid(1)
    for n in (1, 4, 16):
        dens = pn_quadrature(rot, profile, uniform, n=n, L=float(8 + n), N=1024)
        phi_q = characteristic_function(rescaled_density(dens, n), zg)
        emp = sample_rescaled_position(rot, sampler, n=n, samples=100_000, seed=700 + n)
        phi_m = characteristic_function(emp, zg)
        x = emp.atoms
        se = np.sqrt(
            (
                np.var(np.cos(np.outer(zg, x)), axis=1)
                + np.var(np.sin(np.outer(zg, x)), axis=1)
            )
            / x.shape[0]
        )
        ratio = float(np.max(np.abs(phi_m - phi_q) / np.maximum(se, 1e-12)))
        checks.le(f"n={n}: max |cf_mc - cf_quad| in standard errors", ratio, 3.0)
    return checks.finish("7", "estimator-cross-validation", t0)


def _dense_lattice_step(half: int) -> np.ndarray:
    # basis index 2*(site+half) + face with face 0=heads, 1=tails
    dim = 2 * (2 * half + 1)
    U = np.zeros((dim, dim))
    r = 2.0**-0.5
    for s in range(-half, half + 1):
        col_h = 2 * (s + half)
        col_t = col_h + 1
        if s + 1 <= half:
            row = 2 * (s + 1 + half)
            U[row, col_h] += r
            U[row, col_t] += r
        if s - 1 >= -half:
            row = 2 * (s - 1 + half) + 1
            U[row, col_h] += r
            U[row, col_t] -= r
    return U


def criterion_8(workers: int | None = None) -> CriterionResult:
    """Rescaled lattice walk mass concentrates on [-1/sqrt2, 1/sqrt2], and
    the step agrees with a dense matrix oracle at small n."""
    t0 = time.perf_counter()
    checks = _Checks()
    lo = -(2.0**-0.5) - 0.05
    hi = (2.0**-0.5) + 0.05

    state = basis_state(0, "H")
    state = lattice_evolve(state, 100)
    m100 = mass_outside(rescaled_lattice_measure(lattice_distribution(state), 100), lo, hi)
    state = lattice_evolve(state, 100)
    m200 = mass_outside(rescaled_lattice_measure(lattice_distribution(state), 200), lo, hi)
    checks.le("outside mass at n=200", m200, 0.05)
    checks.add(f"outside mass nonincreasing: {m100:.2e} (n=100) -> {m200:.2e} (n=200)", m200 <= m100)

    half = 12
    U = _dense_lattice_step(half)
    rng = np.random.default_rng(801)
    worst = 0.0
    for _ in range(5):
        amps = rng.normal(size=(2, 5)) + 1j * rng.normal(size=(2, 5))
        state = LatticeState(offset=-2, amps_h=amps[0], amps_t=amps[1]).normalized()
        vec = np.zeros(U.shape[0], dtype=np.complex128)
        for i, s in enumerate(state.sites()):
            vec[2 * (s + half)] = state.amps_h[i]
            vec[2 * (s + half) + 1] = state.amps_t[i]
        for _n in range(8):
            state = hadamard_step(state)
            vec = U @ vec
            ref_h = np.zeros(2 * half + 1, dtype=np.complex128)
            ref_t = np.zeros(2 * half + 1, dtype=np.complex128)
            for i, s in enumerate(state.sites()):
                ref_h[s + half] = state.amps_h[i]
                ref_t[s + half] = state.amps_t[i]
            worst = max(worst, float(np.max(np.abs(ref_h - vec[0::2]))))
            worst = max(worst, float(np.max(np.abs(ref_t - vec[1::2]))))
    checks.le("entrywise drift vs dense oracle, n <= 8", worst, 1e-10)
    return checks.finish("8", "lattice-support", t0)


_DETERMINISM_CONFIGS = {
    "plancherel.toml": """\
walk = "plancherel"

[grid]
d = 1
L = 8.0
N = 128

[initial]
form = "product"

[[initial.position]]
type = "gaussian"

[[initial.coin]]
type = "gaussian"

[evolve]
steps = [4, 8]
""",
    "birkhoff.toml": """\
walk = "birkhoff"
seed = 4242

[system]
type = "rotation"
alpha = 0.6180339887498949

[[system.step]]
cos = [1.0]

[initial]

[[initial.position]]
type = "gaussian"

[initial.coin]
type = "uniform"

[evolve]
steps = [5, 10]
samples = 3000
n_avg = 50

[quadrature]
L = 12.0
N = 128
""",
}


def criterion_9(workers: int | None = None) -> CriterionResult:
    """Repeated `qwalk run` with one config and seed writes byte-identical
    CSV bodies at any worker count."""
    t0 = time.perf_counter()
    checks = _Checks()
    from .cli import main as cli_main

    def read_csvs(d: str) -> dict[str, bytes]:
        out = {}
        for name in sorted(os.listdir(d)):
            if name.endswith(".csv"):
                with open(os.path.join(d, name), "rb") as f:
                    out[name] = f.read()
        return out

    with tempfile.TemporaryDirectory() as tmp:
        for cfg_name, text in _DETERMINISM_CONFIGS.items():
            cfg_path = os.path.join(tmp, cfg_name)
            with open(cfg_path, "w", encoding="utf-8") as f:
                f.write(text)
            runs = {}
            for tag, env_workers in (("a", "1"), ("b", "1"), ("c", "2")):
                out_dir = os.path.join(tmp, cfg_name.split(".")[0] + tag)
                old = os.environ.get("QWALK_WORKERS")
                os.environ["QWALK_WORKERS"] = env_workers
                sink = io.StringIO()
                try:
                    with contextlib.redirect_stdout(sink), contextlib.redirect_stderr(sink):
                        code = cli_main(["run", cfg_path, "--out", out_dir])
                finally:
                    if old is None:
                        os.environ.pop("QWALK_WORKERS", None)
                    else:
                        os.environ["QWALK_WORKERS"] = old
                checks.add(f"{cfg_name} run {tag} (workers={env_workers}) exits 0", code == 0)
                runs[tag] = read_csvs(out_dir)
            same_names = set(runs["a"]) == set(runs["b"]) == set(runs["c"]) and len(runs["a"]) > 0
            checks.add(f"{cfg_name}: identical artifact sets ({len(runs['a'])} CSVs)", same_names)
            if same_names:
                checks.add(
                    f"{cfg_name}: repeat run byte-identical",
                    all(runs["a"][k] == runs["b"][k] for k in runs["a"]),
                )
                checks.add(
                    f"{cfg_name}: worker count does not change bytes",
                    all(runs["a"][k] == runs["c"][k] for k in runs["a"]),
                )
    return checks.finish("9", "determinism", t0)


CRITERIA = {
    "1": criterion_1,
    "2": criterion_2,
    "3": criterion_3,
    "4": criterion_4,
    "5": criterion_5,
    "6": criterion_6,
    "7": criterion_7,
    "8": criterion_8,
    "9": criterion_9,
}

SUITES = {
    "lattice": ("1", "8"),
    "plancherel": ("1", "2", "3", "4", "5"),
    "birkhoff": ("1", "6", "7"),
    "all": tuple(CRITERIA),
}


def run_suite(suite: str, workers: int | None = None, stream=None) -> list[CriterionResult]:
    """Run every criterion in a suite, printing one line per criterion."""
    stream = stream or sys.stdout
    results = []
    for cid in SUITES[suite]:
        res = CRITERIA[cid](workers=workers)
        results.append(res)
        print(res.line(), file=stream, flush=True)
        if not res.passed:
            for d in res.details:
                print(f"    {d}", file=stream)
    n_pass = sum(r.passed for r in results)
    print(f"{n_pass}/{len(results)} criteria passed", file=stream)
    return results

"""Experiment runner: walk dispatch, artifact emission, and the run manifest.

Artifacts per run directory:
  p_n<k>.csv       position density/distribution after k steps
  q_n<k>.csv       rescaled (position/k) measure
  q_limit.csv      limit-law estimate (when enabled)
  *.meta.json      metadata for empirical (sampled) measures
  report.json/.csv convergence diagnostics across the step list
  manifest.json    config echo, versions, seed, wall time, warnings

All floating-point output carries 17 significant digits; CSV bodies are
deterministic for a fixed (config, seed) at any worker count.
"""

from __future__ import annotations

import json
import os
import platform
import time
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import scipy

from . import __version__
from ._threads import resolve_workers
from .birkhoff import (
    BakerMap,
    CircleRotation,
    CoinDensity,
    ProductSampler,
    TrigPolynomial,
    limit_pushforward,
    pn_quadrature,
    sample_rescaled_position,
)
from .config import ConfigError, ExperimentConfig, emit_config
from .grids import GridSpec, wavefunction_from_csv
from .lattice import (
    basis_state,
    evolve as lattice_evolve,
    lattice_distribution,
    mass_outside,
    rescaled_lattice_measure,
)
from .limits import (
    cf_distance,
    convergence_sweep,
    moments,
)
from .measures import DensityOnGrid, EmpiricalMeasure
from .plancherel import evolve_through, limit_density, position_density, rescaled_density
from .states import BoxProfile, GaussianProfile, product_state

SUPPORT_HALF_WIDTH = 2.0**-0.5
SUPPORT_SLACK = 0.05


@dataclass
class RunResult:
    exit_code: int
    out_dir: str
    artifacts: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    report: dict | None = None


def _fmt(x: float) -> str:
    return "%.17g" % float(x)


def _write_text(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    except OSError as e:
        raise RuntimeError(f"cannot write artifact {path}: {e}") from e


def _meta_line(meta: dict[str, Any]) -> str:
    parts = [f"{k}={v}" for k, v in meta.items() if v is not None]
    return "# " + " ".join(parts)


def emit_density(dens: DensityOnGrid, path: str, meta: dict[str, Any]) -> None:
    """CSV with one row per grid point: x[,x2],value."""
    header = dict(meta)
    header.update({"d": dens.d, "L": repr(dens.L), "N": dens.N})
    cols = ["x", "value"] if dens.d == 1 else ["x1", "x2", "value"]
    lines = [_meta_line(header), ",".join(cols)]
    ax = dens.axis_coords()
    if dens.d == 1:
        for x, v in zip(ax, dens.values):
            lines.append(f"{_fmt(x)},{_fmt(v)}")
    else:
        for i, x1 in enumerate(ax):
            row = dens.values[i]
            for x2, v in zip(ax, row):
                lines.append(f"{_fmt(x1)},{_fmt(x2)},{_fmt(v)}")
    _write_text(path, "\n".join(lines) + "\n")


def emit_empirical(em: EmpiricalMeasure, path: str, meta: dict[str, Any]) -> None:
    """CSV of (coords..., weight) atoms plus a JSON metadata sidecar."""
    cols = ["x", "weight"] if em.d == 1 else ["x1", "x2", "weight"]
    lines = [_meta_line(meta), ",".join(cols)]
    pts = em.points_2d()
    for row, w in zip(pts, em.weights):
        lines.append(",".join(_fmt(v) for v in row) + f",{_fmt(w)}")
    _write_text(path, "\n".join(lines) + "\n")
    side = dict(meta)
    side.update({k: v for k, v in em.meta.items() if _jsonable(v)})
    side["atoms"] = int(pts.shape[0])
    side["columns"] = cols
    _write_text(os.path.splitext(path)[0] + ".meta.json", json.dumps(side, indent=2) + "\n")


def _jsonable(v) -> bool:
    return isinstance(v, (str, int, float, bool, list, tuple)) or v is None


def emit_report(report: dict, json_path: str, csv_path: str) -> None:
    """report.json plus a flat (n, metric, value) CSV for plotting."""
    _write_text(json_path, json.dumps(report, indent=2) + "\n")
    lines = ["n,metric,value"]
    for entry in report.get("entries", []):
        n = entry["n"]
        for key, val in entry.items():
            if key in ("n", "warnings") or val is None:
                continue
            if key == "moments":
                arr = np.asarray(val)
                for k in range(arr.shape[0]):
                    for a in range(arr.shape[1]):
                        tag = f"moment{k}" if arr.shape[1] == 1 else f"moment{k}[{a}]"
                        lines.append(f"{n},{tag},{_fmt(arr[k, a])}")
            elif isinstance(val, (int, float)):
                lines.append(f"{n},{key},{_fmt(val)}")
    _write_text(csv_path, "\n".join(lines) + "\n")


def build_profile(p) -> GaussianProfile | BoxProfile:
    if p.type == "gaussian":
        return GaussianProfile(center=p.center, width=p.width, momentum=p.momentum)
    return BoxProfile(a=p.a, b=p.b)


def build_profiles(specs, d: int):
    objs = [build_profile(p) for p in specs]
    if len(objs) == 1 and d > 1:
        objs = objs * d
    return tuple(objs)


def build_system(sc) -> CircleRotation | BakerMap:
    h = tuple(TrigPolynomial(const=t.const, cos=tuple(t.cos), sin=tuple(t.sin)) for t in sc.step)
    if sc.type == "rotation":
        return CircleRotation(alpha=sc.alpha, h=h)
    return BakerMap(h=h)


def build_coin(ini, space: str) -> CoinDensity:
    if ini.coin_type in (None, "uniform"):
        return CoinDensity(space=space)
    chi = TrigPolynomial(
        const=ini.coin_trig.const, cos=tuple(ini.coin_trig.cos), sin=tuple(ini.coin_trig.sin)
    )
    if space == "circle":
        fn = lambda om: chi(om) ** 2
    else:
        fn = lambda om: chi(np.asarray(om)[..., 0]) ** 2
    return CoinDensity(fn=fn, space=space)


def _run_hadamard(cfg: ExperimentConfig, out: str, ctx: dict) -> dict:
    state = basis_state(site=cfg.initial.site, coin=cfg.initial.coin_face)
    lo = -SUPPORT_HALF_WIDTH - SUPPORT_SLACK
    hi = SUPPORT_HALF_WIDTH + SUPPORT_SLACK
    entries = []
    measures = []
    done = 0
    for n in cfg.evolve.steps:
        state = lattice_evolve(state, n - done)
        done = n
        dist = lattice_distribution(state)
        emit_density_path = os.path.join(out, f"p_n{n}.csv")
        lines = [_meta_line({"walk": "hadamard", "kind": "distribution", "n": n}), "site,probability"]
        for s, pr in zip(dist.sites(), dist.probs):
            lines.append(f"{s},{_fmt(pr)}")
        _write_text(emit_density_path, "\n".join(lines) + "\n")
        ctx["artifacts"].append(f"p_n{n}.csv")
        q = rescaled_lattice_measure(dist, n)
        emit_empirical(q, os.path.join(out, f"q_n{n}.csv"), {"walk": "hadamard", "kind": "rescaled", "n": n})
        ctx["artifacts"] += [f"q_n{n}.csv", f"q_n{n}.meta.json"]
        measures.append(q)
        entries.append(
            {
                "n": n,
                "outside_mass": mass_outside(q, lo, hi),
                "moments": moments(q, 4).tolist(),
            }
        )
    for i, entry in enumerate(entries):
        if i + 1 < len(entries):
            entry["cf_to_next"] = cf_distance(
                measures[i], measures[i + 1], cfg.evolve.zeta_window, cfg.evolve.zeta_points
            )
    masses = [e["outside_mass"] for e in entries]
    return {
        "walk": "hadamard",
        "support_interval": [lo, hi],
        "zeta_window": cfg.evolve.zeta_window,
        "zeta_points": cfg.evolve.zeta_points,
        "outside_nonincreasing": all(b <= a + 1e-12 for a, b in zip(masses, masses[1:])),
        "entries": entries,
    }


def _load_grid_file(cfg: ExperimentConfig):
    path = cfg.initial.file
    if not os.path.isabs(path) and cfg.base_dir:
        path = os.path.join(cfg.base_dir, path)
    try:
        psi = wavefunction_from_csv(path)
    except OSError as e:
        raise ConfigError([f"initial.file: cannot read {path}: {e}"]) from e
    g = cfg.grid
    s = psi.spec
    if (s.d, s.L, s.N) != (g.d, g.L, g.N):
        raise ConfigError(
            [
                f"initial.file: grid mismatch, file has d={s.d} L={s.L} N={s.N} "
                f"but [grid] says d={g.d} L={g.L} N={g.N}"
            ]
        )
    if psi.x_dual or psi.y_dual:
        raise ConfigError(["initial.file: initial states must be sampled on the primal grids"])
    n = psi.norm()
    if not np.isfinite(n) or n < 1e-12:
        raise ConfigError([f"initial.file: state is not normalizable (norm {n!r})"])
    return psi.normalized(), n


def _run_plancherel(cfg: ExperimentConfig, out: str, ctx: dict, workers: int | None) -> dict:
    spec = GridSpec(d=cfg.grid.d, L=cfg.grid.L, N=cfg.grid.N)
    if cfg.initial.form == "grid-file":
        psi0, raw_norm = _load_grid_file(cfg)
    else:
        phis = build_profiles(cfg.initial.position, spec.d)
        chis = build_profiles(cfg.initial.coin, spec.d)
        psi0, raw_norm = product_state(spec, phis, chis)
    ctx["manifest"]["initial_norm"] = raw_norm
    rescaled = {}
    for n, psi in evolve_through(psi0, cfg.evolve.steps, workers=workers):
        for w in psi.warnings:
            if w not in ctx["warnings"]:
                ctx["warnings"].append(w)
        dens = position_density(psi)
        emit_density(dens, os.path.join(out, f"p_n{n}.csv"), {"walk": "plancherel", "kind": "density", "n": n})
        q = rescaled_density(dens, n)
        emit_density(q, os.path.join(out, f"q_n{n}.csv"), {"walk": "plancherel", "kind": "rescaled", "n": n})
        ctx["artifacts"] += [f"p_n{n}.csv", f"q_n{n}.csv"]
        rescaled[n] = q
    if not cfg.evolve.limit:
        return None
    q_inf = limit_density(psi0, workers=workers)
    emit_density(q_inf, os.path.join(out, "q_limit.csv"), {"walk": "plancherel", "kind": "limit"})
    ctx["artifacts"].append("q_limit.csv")
    report = convergence_sweep(
        lambda n: rescaled[n],
        cfg.evolve.steps,
        q_inf,
        walk_name="plancherel",
        window=cfg.evolve.zeta_window,
        points=cfg.evolve.zeta_points,
    )
    return report.to_dict()


def _run_birkhoff(cfg: ExperimentConfig, out: str, ctx: dict) -> dict:
    try:
        system = build_system(cfg.system)
        coin = build_coin(cfg.initial, system.space)
        profiles = build_profiles(cfg.initial.position, system.d)
        sampler = ProductSampler(profiles, coin, system)
    except ValueError as e:
        raise ConfigError([str(e)]) from e
    walked = {}
    for n in cfg.evolve.steps:
        em = sample_rescaled_position(system, sampler, n, cfg.evolve.samples, cfg.seed)
        emit_empirical(
            em,
            os.path.join(out, f"q_n{n}.csv"),
            {"walk": "birkhoff", "kind": "rescaled", "n": n},
        )
        ctx["artifacts"] += [f"q_n{n}.csv", f"q_n{n}.meta.json"]
        walked[n] = em
        if cfg.quadrature is not None:
            dens = pn_quadrature(
                system, profiles[0], coin, n, cfg.quadrature.L, cfg.quadrature.N
            )
            for w in dens.meta.get("warnings", []):
                if w not in ctx["warnings"]:
                    ctx["warnings"].append(w)
            emit_density(
                dens,
                os.path.join(out, f"p_n{n}.csv"),
                {"walk": "birkhoff", "kind": "density", "n": n},
            )
            ctx["artifacts"].append(f"p_n{n}.csv")
    if not cfg.evolve.limit:
        return None
    lim = limit_pushforward(system, coin, cfg.evolve.n_avg, cfg.evolve.samples, cfg.seed)
    for w in lim.meta.get("warnings", []):
        if w not in ctx["warnings"]:
            ctx["warnings"].append(w)
    emit_empirical(
        lim,
        os.path.join(out, "q_limit.csv"),
        {"walk": "birkhoff", "kind": "limit", "n_avg": cfg.evolve.n_avg},
    )
    ctx["artifacts"] += ["q_limit.csv", "q_limit.meta.json"]
    report = convergence_sweep(
        lambda n: walked[n],
        cfg.evolve.steps,
        lim,
        walk_name="birkhoff",
        window=cfg.evolve.zeta_window,
        points=cfg.evolve.zeta_points,
        with_ks=system.d <= 2,
    )
    return report.to_dict()


def run(
    cfg: ExperimentConfig,
    out_dir: str | None = None,
    strict: bool = False,
    workers: int | None = None,
) -> RunResult:
    """Execute a validated config; returns exit code 0, or 3 when --strict
    escalates runtime warnings.  Raises ConfigError (exit 2 territory) for
    problems only detectable at build time (bad grid file, zero-mass coin)."""
    out = out_dir or cfg.output_dir or "qwalk_out"
    os.makedirs(out, exist_ok=True)
    n_workers = resolve_workers(workers)
    ctx: dict[str, Any] = {"artifacts": [], "warnings": [], "manifest": {}}
    t0 = time.perf_counter()
    if cfg.walk == "hadamard":
        report = _run_hadamard(cfg, out, ctx)
    elif cfg.walk == "plancherel":
        report = _run_plancherel(cfg, out, ctx, workers)
    else:
        report = _run_birkhoff(cfg, out, ctx)
    wall = time.perf_counter() - t0
    if report is not None:
        emit_report(report, os.path.join(out, "report.json"), os.path.join(out, "report.csv"))
        ctx["artifacts"] += ["report.json", "report.csv"]
    manifest = {
        "package": "artifact",
        "version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "walk": cfg.walk,
        "seed": cfg.seed,
        "workers": n_workers,
        "wall_time_s": wall,
        "strict": strict,
        "warnings": ctx["warnings"],
        "artifacts": ctx["artifacts"],
        "config_toml": emit_config(cfg),
    }
    manifest.update(ctx["manifest"])
    _write_text(os.path.join(out, "manifest.json"), json.dumps(manifest, indent=2) + "\n")
    ctx["artifacts"].append("manifest.json")
    code = 3 if (strict and ctx["warnings"]) else 0
    return RunResult(
        exit_code=code,
        out_dir=out,
        artifacts=ctx["artifacts"],
        warnings=ctx["warnings"],
        report=report,
    )

"""Run configuration: TOML parsing, validation, and round-trip emission.

One TOML document describes one experiment.  Validation accumulates
every problem found (not only the first) and rejects unknown keys, so a
typo cannot silently fall back to a default.  parse_config(emit_config(c))
reproduces c exactly; the emitter writes the fully normalized form with
defaults filled in.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

WALKS = ("hadamard", "plancherel", "birkhoff")

_MISSING = object()


class ConfigError(ValueError):
    """Invalid configuration; .errors lists every problem found."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__(
            "invalid configuration:\n" + "\n".join(f"  - {e}" for e in self.errors)
        )


@dataclass
class ProfileConfig:
    """One position or coin amplitude factor: gaussian or box."""

    type: str
    center: float = 0.0
    width: float = 1.0
    momentum: float = 0.0
    a: float = 0.0
    b: float = 1.0

    def to_table(self) -> dict[str, Any]:
        if self.type == "gaussian":
            return {
                "type": "gaussian",
                "center": self.center,
                "width": self.width,
                "momentum": self.momentum,
            }
        return {"type": "box", "a": self.a, "b": self.b}


@dataclass
class TrigConfig:
    """Coefficients of c0 + sum_m (cos_m cos(2 pi m t) + sin_m sin(2 pi m t))."""

    const: float = 0.0
    cos: list[float] = field(default_factory=list)
    sin: list[float] = field(default_factory=list)

    def to_table(self) -> dict[str, Any]:
        return {"const": self.const, "cos": list(self.cos), "sin": list(self.sin)}


@dataclass
class GridConfig:
    d: int
    L: float
    N: int


@dataclass
class InitialConfig:
    # hadamard
    site: int | None = None
    coin_face: str | None = None
    # plancherel / birkhoff product form
    form: str | None = None
    position: list[ProfileConfig] = field(default_factory=list)
    coin: list[ProfileConfig] = field(default_factory=list)
    file: str | None = None
    # birkhoff coin density over Omega
    coin_type: str | None = None
    coin_trig: TrigConfig | None = None


@dataclass
class SystemConfig:
    type: str
    alpha: float | None = None
    step: list[TrigConfig] = field(default_factory=list)


@dataclass
class EvolveConfig:
    steps: list[int]
    limit: bool = True
    zeta_window: float = 8.0
    zeta_points: int = 257
    samples: int | None = None
    n_avg: int | None = None


@dataclass
class QuadratureConfig:
    L: float
    N: int


@dataclass
class ExperimentConfig:
    walk: str
    evolve: EvolveConfig
    initial: InitialConfig
    seed: int | None = None
    output_dir: str | None = None
    grid: GridConfig | None = None
    system: SystemConfig | None = None
    quadrature: QuadratureConfig | None = None
    base_dir: str | None = field(default=None, compare=False)


class _Ctx:
    def __init__(self) -> None:
        self.errors: list[str] = []

    def error(self, path: str, msg: str) -> None:
        self.errors.append(f"{path}: {msg}")

    def reject_unknown(self, table: dict, path: str, allowed: set[str]) -> None:
        prefix = f"{path}." if path else ""
        for k in sorted(set(table) - allowed):
            self.error(f"{prefix}{k}", "unknown key")

    def get(self, table: dict, key: str, path: str, kind, default=_MISSING):
        """Typed lookup; records an error and returns None/default on failure."""
        full = f"{path}.{key}" if path else key
        if key not in table:
            if default is _MISSING:
                self.error(full, "required key missing")
                return None
            return default
        v = table[key]
        if kind is float:
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                self.error(full, f"expected a number, got {v!r}")
                return None
            return float(v)
        if kind is int:
            if isinstance(v, bool) or not isinstance(v, int):
                self.error(full, f"expected an integer, got {v!r}")
                return None
            return v
        if kind is bool:
            if not isinstance(v, bool):
                self.error(full, f"expected true/false, got {v!r}")
                return None
            return v
        if kind is str:
            if not isinstance(v, str):
                self.error(full, f"expected a string, got {v!r}")
                return None
            return v
        if kind is dict:
            if not isinstance(v, dict):
                self.error(full, f"expected a table, got {v!r}")
                return None
            return v
        if kind is list:
            if not isinstance(v, list):
                self.error(full, f"expected an array, got {v!r}")
                return None
            return v
        raise AssertionError(kind)

    def float_list(self, table: dict, key: str, path: str, default=_MISSING):
        v = self.get(table, key, path, list, default=default)
        if v is default or v is None:
            return [] if v is None else list(v)
        out = []
        for i, x in enumerate(v):
            if isinstance(x, bool) or not isinstance(x, (int, float)):
                self.error(f"{path}.{key}[{i}]" if path else f"{key}[{i}]", "expected a number")
                return []
            out.append(float(x))
        return out


def _parse_profile(tab: Any, path: str, ctx: _Ctx) -> ProfileConfig:
    fallback = ProfileConfig(type="gaussian")
    if not isinstance(tab, dict):
        ctx.error(path, "expected a table with a 'type' key")
        return fallback
    kind = ctx.get(tab, "type", path, str)
    if kind == "gaussian":
        ctx.reject_unknown(tab, path, {"type", "center", "width", "momentum"})
        center = ctx.get(tab, "center", path, float, default=0.0)
        width = ctx.get(tab, "width", path, float, default=1.0)
        momentum = ctx.get(tab, "momentum", path, float, default=0.0)
        if width is not None and width <= 0:
            ctx.error(f"{path}.width", f"must be positive, got {width}")
        return ProfileConfig(
            type="gaussian",
            center=center or 0.0,
            width=width if width else 1.0,
            momentum=momentum or 0.0,
        )
    if kind == "box":
        ctx.reject_unknown(tab, path, {"type", "a", "b"})
        a = ctx.get(tab, "a", path, float)
        b = ctx.get(tab, "b", path, float)
        if a is not None and b is not None and not (b > a):
            ctx.error(path, f"box needs b > a, got a={a}, b={b}")
        return ProfileConfig(type="box", a=a if a is not None else 0.0, b=b if b is not None else 1.0)
    if kind is not None:
        ctx.error(f"{path}.type", f"must be 'gaussian' or 'box', got {kind!r}")
    return fallback


def _parse_profile_list(table: dict, key: str, path: str, ctx: _Ctx, count: int, required: bool):
    full = f"{path}.{key}"
    raw = ctx.get(table, key, path, list, default=None)
    if raw is None:
        if required:
            ctx.error(full, "required key missing")
        return []
    if not raw:
        ctx.error(full, "needs at least one profile table")
        return []
    out = [_parse_profile(t, f"{full}[{i}]", ctx) for i, t in enumerate(raw)]
    if len(out) not in (1, count):
        ctx.error(full, f"needs 1 or {count} profile tables, got {len(out)}")
    return out


def _parse_trig(tab: Any, path: str, ctx: _Ctx) -> TrigConfig:
    if not isinstance(tab, dict):
        ctx.error(path, "expected a table of trig coefficients")
        return TrigConfig()
    ctx.reject_unknown(tab, path, {"const", "cos", "sin"})
    return TrigConfig(
        const=ctx.get(tab, "const", path, float, default=0.0) or 0.0,
        cos=ctx.float_list(tab, "cos", path, default=None),
        sin=ctx.float_list(tab, "sin", path, default=None),
    )


def _parse_steps(table: dict, path: str, ctx: _Ctx) -> list[int]:
    raw = ctx.get(table, "steps", path, list)
    if raw is None:
        return []
    out: list[int] = []
    for i, v in enumerate(raw):
        if isinstance(v, bool) or not isinstance(v, int):
            ctx.error(f"{path}.steps[{i}]", f"expected an integer, got {v!r}")
            return []
        out.append(v)
    if not out:
        ctx.error(f"{path}.steps", "needs at least one step count")
    for i, v in enumerate(out):
        if v < 1:
            ctx.error(f"{path}.steps[{i}]", f"step count must be >= 1, got {v}")
    if any(b <= a for a, b in zip(out, out[1:])):
        ctx.error(f"{path}.steps", f"must be strictly increasing, got {out}")
    return out


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a TOML experiment document.

    Raises ConfigError carrying the complete list of problems.
    """
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError([f"TOML syntax: {e}"]) from e

    ctx = _Ctx()
    walk = ctx.get(doc, "walk", "", str)
    if walk is not None and walk not in WALKS:
        ctx.error("walk", f"must be one of {', '.join(WALKS)}; got {walk!r}")
        walk = None

    top_allowed = {"walk", "seed", "output", "initial", "evolve"}
    if walk == "plancherel":
        top_allowed |= {"grid"}
    elif walk == "birkhoff":
        top_allowed |= {"system", "quadrature"}
    ctx.reject_unknown(doc, "", top_allowed)

    seed = ctx.get(doc, "seed", "", int, default=None)
    output_dir = None
    if "output" in doc:
        out_tab = ctx.get(doc, "output", "", dict)
        if out_tab is not None:
            ctx.reject_unknown(out_tab, "output", {"directory"})
            output_dir = ctx.get(out_tab, "directory", "output", str)

    evolve_tab = ctx.get(doc, "evolve", "", dict, default=None)
    initial_tab = ctx.get(doc, "initial", "", dict, default=None)
    if evolve_tab is None:
        ctx.error("evolve", "required table missing")
        evolve_tab = {}
    if initial_tab is None:
        ctx.error("initial", "required table missing")
        initial_tab = {}

    steps = _parse_steps(evolve_tab, "evolve", ctx)
    zeta_window = ctx.get(evolve_tab, "zeta_window", "evolve", float, default=8.0)
    zeta_points = ctx.get(evolve_tab, "zeta_points", "evolve", int, default=257)
    if zeta_window is not None and zeta_window <= 0:
        ctx.error("evolve.zeta_window", f"must be positive, got {zeta_window}")
    if zeta_points is not None and zeta_points < 2:
        ctx.error("evolve.zeta_points", f"needs at least 2 points, got {zeta_points}")

    grid = None
    system = None
    quadrature = None
    initial = InitialConfig()
    evolve = EvolveConfig(
        steps=steps, zeta_window=zeta_window or 8.0, zeta_points=zeta_points or 257
    )

    if walk == "hadamard":
        ctx.reject_unknown(evolve_tab, "evolve", {"steps", "zeta_window", "zeta_points"})
        ctx.reject_unknown(initial_tab, "initial", {"site", "coin"})
        site = ctx.get(initial_tab, "site", "initial", int, default=0)
        face = ctx.get(initial_tab, "coin", "initial", str, default="H")
        if face is not None and face not in ("H", "T"):
            ctx.error("initial.coin", f"must be 'H' or 'T', got {face!r}")
        initial = InitialConfig(site=site if site is not None else 0, coin_face=face or "H")
        evolve.limit = False

    elif walk == "plancherel":
        ctx.reject_unknown(
            evolve_tab, "evolve", {"steps", "zeta_window", "zeta_points", "limit"}
        )
        evolve.limit = ctx.get(evolve_tab, "limit", "evolve", bool, default=True)
        grid_tab = ctx.get(doc, "grid", "", dict)
        if grid_tab is not None:
            ctx.reject_unknown(grid_tab, "grid", {"d", "L", "N"})
            gd = ctx.get(grid_tab, "d", "grid", int)
            gL = ctx.get(grid_tab, "L", "grid", float)
            gN = ctx.get(grid_tab, "N", "grid", int)
            if gd is not None and gd not in (1, 2):
                ctx.error("grid.d", f"must be 1 or 2, got {gd}")
            if gL is not None and gL <= 0:
                ctx.error("grid.L", f"must be positive, got {gL}")
            if gN is not None and (gN < 8 or not _is_pow2(gN)):
                ctx.error("grid.N", f"must be a power of two >= 8, got {gN}")
            if None not in (gd, gL, gN):
                grid = GridConfig(d=gd, L=gL, N=gN)
        d = grid.d if grid else 1
        form = ctx.get(initial_tab, "form", "initial", str, default="product")
        if form == "product":
            ctx.reject_unknown(initial_tab, "initial", {"form", "position", "coin"})
            initial = InitialConfig(
                form="product",
                position=_parse_profile_list(initial_tab, "position", "initial", ctx, d, True),
                coin=_parse_profile_list(initial_tab, "coin", "initial", ctx, d, True),
            )
        elif form == "grid-file":
            ctx.reject_unknown(initial_tab, "initial", {"form", "file"})
            initial = InitialConfig(form="grid-file", file=ctx.get(initial_tab, "file", "initial", str))
        else:
            ctx.error("initial.form", f"must be 'product' or 'grid-file', got {form!r}")

    elif walk == "birkhoff":
        ctx.reject_unknown(
            evolve_tab,
            "evolve",
            {"steps", "zeta_window", "zeta_points", "limit", "samples", "n_avg"},
        )
        evolve.limit = ctx.get(evolve_tab, "limit", "evolve", bool, default=True)
        evolve.samples = ctx.get(evolve_tab, "samples", "evolve", int, default=100_000)
        evolve.n_avg = ctx.get(evolve_tab, "n_avg", "evolve", int, default=10_000)
        if evolve.samples is not None and evolve.samples < 1:
            ctx.error("evolve.samples", f"must be >= 1, got {evolve.samples}")
        if evolve.n_avg is not None and evolve.n_avg < 2:
            ctx.error("evolve.n_avg", f"must be >= 2, got {evolve.n_avg}")
        if seed is None:
            ctx.error("seed", "required for stochastic (birkhoff) runs")

        sys_tab = ctx.get(doc, "system", "", dict)
        if sys_tab is not None:
            ctx.reject_unknown(sys_tab, "system", {"type", "alpha", "step"})
            stype = ctx.get(sys_tab, "type", "system", str)
            alpha = None
            if stype == "rotation":
                alpha = ctx.get(sys_tab, "alpha", "system", float)
            elif stype == "baker":
                if "alpha" in sys_tab:
                    ctx.error("system.alpha", "only rotation systems take alpha")
            elif stype is not None:
                ctx.error("system.type", f"must be 'rotation' or 'baker', got {stype!r}")
            raw_step = ctx.get(sys_tab, "step", "system", list)
            hs = []
            if raw_step is not None:
                if not raw_step:
                    ctx.error("system.step", "needs at least one coordinate table")
                hs = [_parse_trig(t, f"system.step[{i}]", ctx) for i, t in enumerate(raw_step)]
            if stype in ("rotation", "baker"):
                system = SystemConfig(type=stype, alpha=alpha, step=hs)

        d = len(system.step) if system and system.step else 1
        ctx.reject_unknown(initial_tab, "initial", {"position", "coin"})
        position = _parse_profile_list(initial_tab, "position", "initial", ctx, d, True)
        coin_type = "uniform"
        coin_trig = None
        coin_tab = ctx.get(initial_tab, "coin", "initial", dict, default=None)
        if coin_tab is not None:
            kind = ctx.get(coin_tab, "type", "initial.coin", str, default="uniform")
            if kind == "uniform":
                ctx.reject_unknown(coin_tab, "initial.coin", {"type"})
            elif kind == "trig":
                ctx.reject_unknown(coin_tab, "initial.coin", {"type", "const", "cos", "sin"})
                coin_trig = _parse_trig(
                    {k: v for k, v in coin_tab.items() if k != "type"}, "initial.coin", ctx
                )
                coin_type = "trig"
                if coin_trig.const == 0 and not any(coin_trig.cos) and not any(coin_trig.sin):
                    ctx.error("initial.coin", "trig coin amplitude is identically zero")
            else:
                ctx.error("initial.coin.type", f"must be 'uniform' or 'trig', got {kind!r}")
        initial = InitialConfig(position=position, coin_type=coin_type, coin_trig=coin_trig)

        if "quadrature" in doc:
            q_tab = ctx.get(doc, "quadrature", "", dict)
            if q_tab is not None:
                ctx.reject_unknown(q_tab, "quadrature", {"L", "N"})
                qL = ctx.get(q_tab, "L", "quadrature", float)
                qN = ctx.get(q_tab, "N", "quadrature", int)
                if qL is not None and qL <= 0:
                    ctx.error("quadrature.L", f"must be positive, got {qL}")
                if qN is not None and (qN < 8 or qN % 2):
                    ctx.error("quadrature.N", f"must be an even integer >= 8, got {qN}")
                if None not in (qL, qN):
                    quadrature = QuadratureConfig(L=qL, N=qN)
                if system is not None and len(system.step) > 1:
                    ctx.error("quadrature", "only available for one-dimensional step functions")

    if ctx.errors:
        raise ConfigError(ctx.errors)
    return ExperimentConfig(
        walk=walk,
        seed=seed,
        output_dir=output_dir,
        grid=grid,
        system=system,
        quadrature=quadrature,
        initial=initial,
        evolve=evolve,
    )


def load_config(path: str) -> ExperimentConfig:
    """parse_config on a file; relative grid-file paths resolve against it."""
    import os

    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise ConfigError([f"cannot read config {path}: {e}"]) from e
    cfg = parse_config(text)
    cfg.base_dir = os.path.dirname(os.path.abspath(path))
    return cfg


def _toml_scalar(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, str):
        escaped = v.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    if isinstance(v, list):
        return "[" + ", ".join(_toml_scalar(x) for x in v) + "]"
    raise TypeError(f"cannot emit {v!r}")


def _emit_table(lines: list[str], header: str, items: dict) -> None:
    lines.append(header)
    for k, v in items.items():
        if v is not None:
            lines.append(f"{k} = {_toml_scalar(v)}")
    lines.append("")


def emit_config(cfg: ExperimentConfig) -> str:
    """Serialize back to TOML; parse_config(emit_config(c)) == c."""
    lines: list[str] = [f"walk = {_toml_scalar(cfg.walk)}"]
    if cfg.seed is not None:
        lines.append(f"seed = {cfg.seed}")
    lines.append("")
    if cfg.output_dir is not None:
        _emit_table(lines, "[output]", {"directory": cfg.output_dir})
    if cfg.grid is not None:
        _emit_table(lines, "[grid]", {"d": cfg.grid.d, "L": cfg.grid.L, "N": cfg.grid.N})
    if cfg.system is not None:
        _emit_table(lines, "[system]", {"type": cfg.system.type, "alpha": cfg.system.alpha})
        for t in cfg.system.step:
            _emit_table(lines, "[[system.step]]", t.to_table())

    ini = cfg.initial
    if cfg.walk == "hadamard":
        _emit_table(lines, "[initial]", {"site": ini.site, "coin": ini.coin_face})
    elif cfg.walk == "plancherel":
        _emit_table(lines, "[initial]", {"form": ini.form, "file": ini.file})
        for p in ini.position:
            _emit_table(lines, "[[initial.position]]", p.to_table())
        for p in ini.coin:
            _emit_table(lines, "[[initial.coin]]", p.to_table())
    else:
        lines.append("[initial]")
        lines.append("")
        for p in ini.position:
            _emit_table(lines, "[[initial.position]]", p.to_table())
        coin: dict[str, Any] = {"type": ini.coin_type}
        if ini.coin_trig is not None:
            coin.update(ini.coin_trig.to_table())
        _emit_table(lines, "[initial.coin]", coin)

    ev: dict[str, Any] = {"steps": list(cfg.evolve.steps)}
    if cfg.walk != "hadamard":
        ev["limit"] = cfg.evolve.limit
    if cfg.walk == "birkhoff":
        ev["samples"] = cfg.evolve.samples
        ev["n_avg"] = cfg.evolve.n_avg
    ev["zeta_window"] = cfg.evolve.zeta_window
    ev["zeta_points"] = cfg.evolve.zeta_points
    _emit_table(lines, "[evolve]", ev)
    if cfg.quadrature is not None:
        _emit_table(lines, "[quadrature]", {"L": cfg.quadrature.L, "N": cfg.quadrature.N})
    return "\n".join(lines)

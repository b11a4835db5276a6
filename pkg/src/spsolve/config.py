"""Run configuration: TOML or JSON files mapped onto typed settings."""
from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .functionals import Params
from .grid import RadialGrid, make_grid
from .solvers import SolverOptions
from .weights import WeightModel

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - exercised on 3.10 only
    import tomli as tomllib

__all__ = ["ConfigError", "RunConfig", "load_config", "parse_config", "MODES", "SWEEP_AXES"]

MODES = ("groundstate", "continuation", "mountain_pass", "excited", "nonexistence", "verify")
SWEEP_AXES = ("lambda", "q", "kbar", "m", "mu")


class ConfigError(ValueError):
    """Unreadable or inadmissible configuration."""


@dataclass
class RunConfig:
    params: Params
    weight: WeightModel
    grid_spec: dict
    mode: str = "groundstate"
    options: SolverOptions = field(default_factory=SolverOptions)
    nodes: int = 1
    mu_ladder: list | None = None
    out_dir: Path = Path("out")
    formats: tuple = ("csv", "json", "svg")
    sweep_param: str | None = None
    sweep_values: list = field(default_factory=list)
    raw: dict = field(default_factory=dict)

    def grid(self) -> RadialGrid:
        return make_grid(
            self.params.dim,
            float(self.grid_spec.get("r_max", 10.0)),
            int(self.grid_spec.get("n", 2048)),
            str(self.grid_spec.get("spacing", "uniform")),
        )


def load_config(path) -> dict:
    path = Path(path)
    try:
        text = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        if path.suffix.lower() == ".json":
            return json.loads(text.decode("utf-8"))
        return tomllib.loads(text.decode("utf-8"))
    except (ValueError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc


def _weight_from(d: dict, problem: dict) -> WeightModel:
    d = dict(d)
    kind = d.pop("kind", "constant")
    if kind == "homogeneous" and "kbar" not in d and "kbar" in problem:
        d["kbar"] = problem["kbar"]
    if kind == "coercive" and "table" in d:
        table = d.pop("table")
        return WeightModel.coercive_table([row[0] for row in table], [row[1] for row in table])
    return WeightModel.from_dict({"kind": kind, **d})


def parse_config(raw: dict, overrides: dict | None = None) -> RunConfig:
    """Validate a config tree; every admissibility failure raises ConfigError."""
    overrides = overrides or {}
    raw = dict(raw or {})
    problem = dict(raw.get("problem", {}))
    weight = dict(raw.get("weight", {}))
    grid = dict(raw.get("grid", {}))
    solver = dict(raw.get("solver", {}))
    output = dict(raw.get("output", {}))
    sweep = dict(raw.get("sweep", {}))
    try:
        params = Params(
            dim=int(problem.get("dim", 3)),
            q=float(problem.get("q", 3.0)),
            lam=float(problem.get("lambda", 1.0)),
            mu=float(problem.get("mu", 1.0)),
            nu=problem.get("nu"),
            kbar=problem.get("kbar"),
            k=problem.get("k"),
        )
        wm = _weight_from(weight, problem)
        opt_kw = {}
        for key in (
            "tol", "constraint_tol", "max_iters", "armijo", "step0", "switch_tol",
            "newton_iters", "n_path", "relax_sweeps", "seed",
        ):
            if key in solver:
                opt_kw[key] = solver[key]
        for key in ("tol", "seed"):
            if overrides.get(key) is not None:
                opt_kw[key] = overrides[key]
        options = SolverOptions(**opt_kw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    mode = solver.get("mode", "groundstate")
    if mode not in MODES:
        raise ConfigError(f"unknown solver mode {mode!r}; expected one of {MODES}")
    ladder = problem.get("mu_ladder")
    if ladder is not None:
        ladder = [float(x) for x in ladder]
        if any(not (0.5 <= x <= 1.0) for x in ladder) or any(b <= a for a, b in zip(ladder, ladder[1:])):
            raise ConfigError("mu_ladder must increase strictly inside [1/2, 1]")
    if mode in ("groundstate", "continuation", "mountain_pass", "excited") and params.is_critical:
        raise ConfigError(
            f"q = 2*-1 = {params.q:g}: combining the Nehari and Pohozaev identities gives "
            "int u^2 <= 0, so no nontrivial solution exists (critical nonexistence)"
        )
    if mode in ("groundstate", "continuation", "mountain_pass", "excited") and params.q <= 2:
        raise ConfigError(f"q={params.q:g} <= 2: nontrivial solutions are only sought for q > 2")
    if mode in ("groundstate", "continuation") and params.q < 3 and params.lam > 0:
        if wm.kind not in ("homogeneous", "constant") and params.kbar is None:
            raise ConfigError("q < 3 needs a homogeneous weight (fibering constraint)")
        from .functionals import _fiber_nu_kbar

        try:
            _fiber_nu_kbar(params, wm)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    param = sweep.get("param")
    if param is not None and param not in SWEEP_AXES:
        raise ConfigError(f"invalid sweep axis {param!r}; expected one of {SWEEP_AXES}")
    try:
        cfg = RunConfig(
            params=params,
            weight=wm,
            grid_spec=grid,
            mode=mode,
            options=options,
            nodes=int(solver.get("nodes", 1)),
            mu_ladder=ladder,
            out_dir=Path(overrides.get("out") or output.get("directory", "out")),
            formats=tuple(output.get("formats", ("csv", "json", "svg"))),
            sweep_param=param,
            sweep_values=list(sweep.get("values", [])),
            raw=raw,
        )
        cfg.grid()
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    return cfg

"""Command line front end: ``spsolve {run,sweep,plot,verify}``."""
from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import diagnostics, solvers
from .config import ConfigError, RunConfig, load_config, parse_config
from .fibering import FiberPolynomial, fiber_argmax
from .fields import Field
from .functionals import (
    Params,
    coulomb_sobolev_gap,
    energy,
    gradient_field,
)
from .grid import make_grid
from .plotting import line_plot_svg, plot_file
from .poisson import phi_identity_residual, solve_phi
from .weights import WeightModel

log = logging.getLogger("spsolve")

EXIT_OK, EXIT_CONFIG, EXIT_NOT_CONVERGED = 0, 1, 2


# ---------------------------------------------------------------------------
# serialisation


def format_number(x) -> str:
    return format(float(x), ".17g")


def to_json(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with every float written to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}"{k}": {to_json(v, indent, _level + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[" + ", ".join(to_json(v, indent, _level + 1) for v in obj) + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_number(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, (str, Path)):
        import json

        return json.dumps(str(obj))
    raise TypeError(f"cannot serialise {type(obj)}")


def write_profile_csv(path: Path, u: Field, phi: Field):
    lines = ["r,u,phi"]
    for r, a, b in zip(u.grid.r, u.v, phi.v):
        lines.append(f"{format_number(r)},{format_number(a)},{format_number(b)}")
    path.write_text("\n".join(lines) + "\n", newline="\n")


def write_table_csv(path: Path, header: list, rows: list):
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for v in row:
            if isinstance(v, (bool, np.bool_)):
                cells.append("true" if v else "false")
            elif isinstance(v, (int, np.integer)):
                cells.append(str(int(v)))
            else:
                cells.append(format_number(v))
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n", newline="\n")


# ---------------------------------------------------------------------------
# verify suite


def verify_suite(seed: int = 42, n: int = 512) -> list[tuple[str, bool, str]]:
    """Invariant checks on seeded random fields; one record per check."""
    rng = np.random.default_rng(seed)
    grid = make_grid(3, 10.0, n)
    weights = [
        WeightModel.constant(1.0),
        WeightModel.homogeneous(1.0),
        WeightModel.homogeneous(2.0),
        WeightModel.vanishing_ball(r0=2.0, rho_inf=1.0),
    ]
    results = []

    def bump():
        v = np.zeros(grid.n)
        for _ in range(3):
            a, c, w = rng.uniform(-2, 2), rng.uniform(0, 5), rng.uniform(0.5, 2)
            v += a * np.exp(-(((grid.r - c) / w) ** 2))
        v *= 1 - (grid.r / grid.r_max) ** 2
        v[-1] = 0.0
        return Field(grid, v)

    worst = 0.0
    for i in range(20):
        rho = weights[i % 4]
        u = bump()
        worst = max(worst, phi_identity_residual(grid, rho, u, solve_phi(grid, rho, u)))
    results.append(("energy identity", worst <= 1e-6, f"max residual {worst:.3g}"))

    gap = min(coulomb_sobolev_gap(bump(), weights[2]) for _ in range(20))
    results.append(("coulomb-sobolev", gap >= -1e-8, f"min gap {gap:.3g}"))

    p = Params(dim=3, q=3.5, lam=1.0)
    ratios = []
    for _ in range(5):
        u, v = bump(), bump()
        gv = float(np.dot(grid.w, gradient_field(u, p, weights[2]).v * v.v))
        errs = []
        for eps in (1e-2, 5e-3, 2.5e-3):
            fd = (energy(u + eps * v, p, weights[2]).total - energy(u - eps * v, p, weights[2]).total) / (2 * eps)
            errs.append(abs(fd - gv))
        ratios += [errs[0] / errs[1], errs[1] / errs[2]]
    results.append(("gradient consistency", min(ratios) >= 3.5, f"min ratio {min(ratios):.3g}"))

    fp = FiberPolynomial(1.0, 1.0, 1.0, 1.0, (3.0, 1.0, 1.0, 5.0))
    t = fiber_argmax(fp)
    results.append(("fiber worked case", abs(t - 1) < 1e-12 and abs(float(fp(t)) - 2) < 1e-12, f"t*={t!r}"))

    s = diagnostics.s_lambda_const(3.0, 4.0, 1.0)
    results.append(("S_lambda closed form", s == 1.0 / 1728.0, f"{s!r}"))
    return results


# ---------------------------------------------------------------------------
# run


def _params_for(cfg: RunConfig) -> Params:
    return cfg.params


def _random_init(grid, seed: int) -> Field:
    rng = np.random.default_rng(seed)
    v = np.zeros(grid.n)
    for _ in range(3):
        a, c, w = rng.uniform(0.5, 5), rng.uniform(0, 3), rng.uniform(0.5, 2)
        v += a * np.exp(-(((grid.r - c) / w) ** 2))
    v[-1] = 0.0
    return Field(grid, v)


def execute(cfg: RunConfig) -> tuple[int, dict, Field | None]:
    """Run the configured mode; returns (exit code, report dict, profile)."""
    grid = cfg.grid()
    p, rho, opts = _params_for(cfg), cfg.weight, cfg.options
    mode = cfg.mode
    if mode == "verify":
        checks = verify_suite(opts.seed)
        ok = all(c[1] for c in checks)
        return (EXIT_OK if ok else EXIT_NOT_CONVERGED), {
            "mode": mode,
            "converged": ok,
            "checks": [{"name": n, "passed": b, "detail": d} for n, b, d in checks],
        }, None
    if mode == "groundstate":
        rep = solvers.solve_groundstate(p, rho, grid, None, opts)
    elif mode == "continuation":
        ladder = cfg.mu_ladder or [0.5, 0.6, 0.7, 0.8, 0.9, 1.0]
        try:
            rep = solvers.continuation_mu(p, rho, grid, ladder, opts)
        except RuntimeError as exc:
            return EXIT_NOT_CONVERGED, {"mode": mode, "converged": False, "error": str(exc)}, None
    elif mode == "excited":
        rep = solvers.excited_state(p, rho, grid, cfg.nodes, opts)
    elif mode == "mountain_pass":
        gs = solvers.solve_groundstate(p, rho, grid, None, opts)
        end = solvers.make_endpoint(solvers.gaussian_init(grid), p, rho)
        level, top, _ = solvers.mountain_pass_estimate(p, rho, grid, end, None, opts, return_path=True)
        report = {
            "mode": mode,
            "mountain_pass_level": level,
            "nehari_level": gs.level,
            "relative_gap": (level - gs.level) / abs(gs.level),
            "converged": gs.converged,
        }
        return (EXIT_OK if gs.converged else EXIT_NOT_CONVERGED), report, top
    elif mode == "nonexistence":
        init = _random_init(grid, opts.seed)
        fl = solvers.nonexistence_flow(p, rho, grid, init, opts)
        report = {
            "mode": mode,
            "decayed": fl.decayed,
            "final_h1": fl.final_h1,
            "converged": fl.decayed,
            "trace": [list(t) for t in fl.trace],
        }
        return (EXIT_OK if fl.decayed else EXIT_NOT_CONVERGED), report, None
    else:  # pragma: no cover - parse_config rejects unknown modes
        raise ConfigError(f"unknown mode {mode}")
    report = {"mode": mode, **rep.to_dict()}
    return (EXIT_OK if rep.converged else EXIT_NOT_CONVERGED), report, rep.u


def run(cfg: RunConfig) -> int:
    code, report, u = execute(cfg)
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    if "json" in cfg.formats:
        (out / "report.json").write_text(to_json(report) + "\n", newline="\n")
    if u is not None:
        phi = solve_phi(u.grid, cfg.weight, u)
        if "csv" in cfg.formats:
            write_profile_csv(out / "profile.csv", u, phi)
        if "svg" in cfg.formats:
            svg = line_plot_svg(u.grid.r, {"u": u.v, "phi": phi.v}, f"{cfg.mode} profile", "r")
            (out / "profile.svg").write_text(svg, newline="\n")
    return code


# ---------------------------------------------------------------------------
# sweep

SWEEP_HEADER = ["value", "level", "grad_residual", "nehari_residual", "pohozaev_residual", "converged"]


def _sweep_point(args):
    raw, param, value, overrides = args
    raw = {k: dict(v) if isinstance(v, dict) else v for k, v in raw.items()}
    problem = raw.setdefault("problem", {})
    solver = raw.setdefault("solver", {})
    if param == "lambda":
        problem["lambda"] = value
    elif param == "q":
        problem["q"] = value
    elif param == "mu":
        problem["mu"] = value
    elif param == "kbar":
        problem["kbar"] = value
        w = raw.setdefault("weight", {})
        if w.get("kind", "homogeneous") == "homogeneous":
            w["kind"] = "homogeneous"
            w["kbar"] = value
    elif param == "m":
        solver["mode"] = "excited"
        solver["nodes"] = int(value)
    if solver.get("mode") not in ("groundstate", "excited"):
        solver["mode"] = "groundstate"
    nan = float("nan")
    try:
        cfg = parse_config(raw, overrides)
        code, rep, _ = execute(cfg)
        return [value, rep.get("level", nan), rep.get("grad_residual", nan), rep.get("nehari_residual", nan),
                rep.get("pohozaev_residual", nan), bool(rep.get("converged", False))]
    except Exception as exc:  # a failed point still yields a row
        log.warning("sweep point %s=%r failed: %s", param, value, exc)
        return [value, nan, nan, nan, nan, False]


def sweep(raw: dict, param: str, values, out_dir: Path, threads: int = 1, overrides=None) -> Path:
    """One solve per axis value; rows ordered by the given values."""
    from .config import SWEEP_AXES

    if param not in SWEEP_AXES:
        raise ConfigError(f"invalid sweep axis {param!r}; expected one of {SWEEP_AXES}")
    values = sorted(float(v) if param != "m" else int(v) for v in values)
    jobs = [(raw, param, v, overrides or {}) for v in values]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(_sweep_point, jobs))
    else:
        rows = [_sweep_point(j) for j in jobs]
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "sweep.csv"
    write_table_csv(path, [param] + SWEEP_HEADER[1:], rows)
    return path


# ---------------------------------------------------------------------------
# entry point


def _threads(arg) -> int:
    if arg is not None:
        return max(1, int(arg))
    env = os.environ.get("SPSOLVE_THREADS")
    return max(1, int(env)) if env else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="spsolve", description="Radial Schrodinger-Poisson solver")
    sub = ap.add_subparsers(dest="verb", required=True)

    def common(sp):
        sp.add_argument("--config", type=Path)
        sp.add_argument("--out", type=Path)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--threads", type=int, default=None)
        sp.add_argument("--tol", type=float, default=None)
        sp.add_argument("-v", "--verbose", action="store_true")

    common(sub.add_parser("run", help="solve one configuration"))
    sw = sub.add_parser("sweep", help="solve along a parameter axis")
    common(sw)
    sw.add_argument("--param", choices=("lambda", "q", "kbar", "m", "mu"))
    sw.add_argument("--values", type=str, default=None, help="comma-separated values")
    pl = sub.add_parser("plot", help="render CSV results to SVG")
    common(pl)
    pl.add_argument("files", nargs="+", type=Path)
    common(sub.add_parser("verify", help="run the invariant suite"))
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    overrides = {"tol": args.tol, "seed": args.seed, "out": args.out}
    try:
        if args.verb == "plot":
            for f in args.files:
                for path in plot_file(f, args.out):
                    print(path)
            return EXIT_OK
        raw = load_config(args.config) if args.config else {}
        if args.verb == "verify":
            raw.setdefault("solver", {})["mode"] = "verify"
            cfg = parse_config(raw, overrides)
            code, report, _ = execute(cfg)
            for c in report["checks"]:
                print(f"{'PASS' if c['passed'] else 'FAIL'} {c['name']}: {c['detail']}")
            return code
        cfg = parse_config(raw, overrides)
        if args.verb == "run":
            code = run(cfg)
            print(f"wrote results to {cfg.out_dir} (exit {code})")
            return code
        param = args.param or cfg.sweep_param
        if param is None:
            raise ConfigError("sweep needs an axis (--param or [sweep].param)")
        if args.values is not None:
            values = [v for v in args.values.split(",") if v.strip()]
        else:
            values = cfg.sweep_values
        path = sweep(raw, param, values, cfg.out_dir, _threads(args.threads), overrides)
        print(path)
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

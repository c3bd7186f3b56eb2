"""Command-line driver: config files, the time loop, snapshots and studies.

Config files are flat ``key = value`` lines with section prefixes::

    problem.name = orszag_tang
    problem.t_end = 0.5
    scheme.mode = multid
    scheme.integrator = imex
    grid.nx = 64
    grid.ny = 64
    output.dir = out
    output.interval = 0.1

``problem.*`` keys other than ``name`` are passed to the problem factory.
Blank lines and ``#`` comments are ignored.
"""
from __future__ import annotations

import argparse
import ast
import csv
import math
import os
import sys
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import diagnostics as diag
from . import problems
from .grid import ConfigError
from .maxwell_flux import Mode
from .state import NVAR, SPECIES, AdmissibilityError, fluid_pressure
from .timeint import Discretization, SchemeConfig, compute_dt, step

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ADMISSIBILITY = 3

CSV_COLUMNS = ("t", "dt", "divB_L1", "divB_L2", "divE_res_L1", "divE_res_L2",
               "entropy_total", "reconnected_flux")


# ---------------------------------------------------------------- config

def _parse_value(text):
    try:
        return ast.literal_eval(text)
    except (ValueError, SyntaxError):
        return text


def _format_value(value):
    return repr(value) if isinstance(value, (int, float, bool)) else str(value)


@dataclass
class RunConfig:
    problem: str
    overrides: dict = field(default_factory=dict)
    mode: str = "multid"
    integrator: Optional[str] = None  # None: the problem's default
    cfl: Optional[float] = None
    order: int = 2
    backend: str = "numba"
    nx: Optional[int] = None
    ny: Optional[int] = None
    out_dir: Optional[str] = None
    interval: float = 0.0  # snapshot cadence in time units; 0 keeps first and last only
    seed: int = 0
    threads: int = 1  # accepted for interface stability; the kernels are serial

    # -- text form
    def to_text(self) -> str:
        lines = [f"problem.name = {self.problem}"]
        lines += [f"problem.{k} = {_format_value(v)}" for k, v in sorted(self.overrides.items())]
        scheme = {"mode": self.mode, "integrator": self.integrator, "cfl": self.cfl,
                  "order": self.order, "backend": self.backend}
        lines += [f"scheme.{k} = {_format_value(v)}" for k, v in scheme.items() if v is not None]
        lines += [f"grid.{k} = {v}" for k, v in (("nx", self.nx), ("ny", self.ny)) if v is not None]
        output = {"dir": self.out_dir, "interval": self.interval, "seed": self.seed,
                  "threads": self.threads}
        lines += [f"output.{k} = {_format_value(v)}" for k, v in output.items() if v is not None]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        values = {}
        for num, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {num}: expected key = value, got {raw!r}")
            key, value = (s.strip() for s in line.split("=", 1))
            if "." not in key:
                raise ConfigError(f"line {num}: key {key!r} lacks a section prefix")
            values[key] = value
        if "problem.name" not in values:
            raise ConfigError("problem.name is required")
        cfg = cls(problem=values.pop("problem.name"))
        known = {
            "scheme.mode": ("mode", str), "scheme.integrator": ("integrator", str),
            "scheme.cfl": ("cfl", float), "scheme.order": ("order", int),
            "scheme.backend": ("backend", str), "grid.nx": ("nx", int), "grid.ny": ("ny", int),
            "output.dir": ("out_dir", str), "output.interval": ("interval", float),
            "output.seed": ("seed", int), "output.threads": ("threads", int),
        }
        for key, value in values.items():
            section, name = key.split(".", 1)
            if section == "problem":
                cfg.overrides[name] = _parse_value(value)
            elif key in known:
                attr, kind = known[key]
                try:
                    setattr(cfg, attr, kind(value))
                except ValueError:
                    raise ConfigError(f"{key}: cannot read {value!r} as {kind.__name__}") from None
            else:
                raise ConfigError(f"unknown config key {key!r}")
        return cfg

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            with open(path) as fh:
                return cls.from_text(fh.read())
        except OSError as err:
            raise ConfigError(f"cannot read config {path}: {err}") from None

    # -- resolved objects
    def problem_spec(self):
        try:
            return problems.get_problem(self.problem, **self.overrides)
        except TypeError as err:
            raise ConfigError(f"bad override for {self.problem}: {err}") from None

    def scheme(self, spec) -> SchemeConfig:
        try:
            return SchemeConfig(mode=self.mode, integrator=self.integrator or spec.integrator,
                                cfl=self.cfl, order=self.order, backend=self.backend)
        except ValueError as err:
            raise ConfigError(str(err)) from None

    def grid(self, spec):
        try:
            return spec.make_grid(self.nx, self.ny)
        except ValueError as err:
            raise ConfigError(str(err)) from None


# ---------------------------------------------------------------- snapshots

def write_snapshot(U, grid, path, t=0.0, gas=None):
    """Header ``nx ny xmin xmax ymin ymax t``, then one row per cell (j-major)
    with the 18 conserved fields followed by p_I and p_E."""
    Ui = grid.interior(U)
    rows = np.empty((grid.nx * grid.ny, NVAR + 2))
    for j in range(grid.ny):
        block = rows[j * grid.nx:(j + 1) * grid.nx]
        block[:, :NVAR] = Ui[:, :, j].T
    gammas = gas.gammas if gas is not None else (5.0 / 3.0, 5.0 / 3.0)
    for k, (sl, gam) in enumerate(zip(SPECIES, gammas)):
        p = fluid_pressure(Ui[sl], gam)
        rows[:, NVAR + k] = p.T.reshape(-1)
    with open(path, "w") as fh:
        fh.write("%d %d %.17g %.17g %.17g %.17g %.17g\n"
                 % (grid.nx, grid.ny, grid.xmin, grid.xmax, grid.ymin, grid.ymax, t))
        np.savetxt(fh, rows, fmt="%.17g")


def read_snapshot(path):
    """Return (header dict, rows) with rows of shape (nx*ny, 20)."""
    with open(path) as fh:
        head = fh.readline().split()
        rows = np.loadtxt(fh, ndmin=2)
    nx, ny = int(head[0]), int(head[1])
    xmin, xmax, ymin, ymax, t = (float(v) for v in head[2:])
    return dict(nx=nx, ny=ny, xmin=xmin, xmax=xmax, ymin=ymin, ymax=ymax, t=t), rows


def snapshot_field(rows, nx, ny):
    """Interior conserved field (18, nx, ny) from snapshot rows."""
    return np.stack([rows[:, k].reshape(ny, nx).T for k in range(NVAR)])


# ---------------------------------------------------------------- time loop

@dataclass
class RunResult:
    status: int
    U: np.ndarray
    t: float
    steps: int
    rows: list
    snapshots: list
    message: str = ""


def _targets(t_end, interval):
    if interval and interval > 0.0:
        n = int(math.floor(t_end / interval + 1e-9))
        out = [k * interval for k in range(1, n + 1) if k * interval < t_end * (1 - 1e-14)]
        return out + [t_end]
    return [t_end]


def diagnostics_row(U_old, res, t, dt, grid, gas, gem_B0=None):
    divB = diag.divB_norms(res.U, grid)
    divE = diag.divE_residual(U_old, res.U, res.currents, res.weights, dt, grid, gas.eps0)
    flux = diag.reconnected_flux(res.U, grid, gem_B0) if gem_B0 is not None else math.nan
    return (t, dt) + divB + divE + (diag.total_entropy(res.U, grid, gas), flux)


def simulate(cfg: RunConfig, diagnostics=True, snapshots=True, log=None):
    """Run ``cfg`` to its end time; never raises on admissibility failure."""
    spec = cfg.problem_spec()
    grid = cfg.grid(spec)
    scheme = cfg.scheme(spec)
    disc = Discretization(grid, spec.gas, scheme, problems.forcing(spec))
    U = problems.init(spec, grid)
    gem_B0 = spec.params.get("B0") if spec.name == "gem" else None

    out = cfg.out_dir if snapshots else None
    if out:
        os.makedirs(out, exist_ok=True)
    saved = []

    def save(U, t):
        if out:
            path = os.path.join(out, f"snapshot_{len(saved):05d}.txt")
            write_snapshot(U, grid, path, t, spec.gas)
            saved.append(path)

    csv_fh = writer = None
    if out and diagnostics:
        csv_fh = open(os.path.join(out, "diagnostics.csv"), "w", newline="")
        writer = csv.writer(csv_fh)
        writer.writerow(CSV_COLUMNS)

    t, steps, rows = 0.0, 0, []
    save(U, t)
    status, message = EXIT_OK, ""
    try:
        if spec.t_end > 0.0:
            for target in _targets(spec.t_end, cfg.interval):
                while t < target:
                    dt = compute_dt(U, grid, spec.gas, scheme.cfl, scheme.mode)
                    if t + dt >= target or target - (t + dt) < 1e-12 * dt:
                        dt, t_new = target - t, target
                    else:
                        t_new = t + dt
                    res = step(U, t, dt, disc)
                    if diagnostics:
                        row = diagnostics_row(U, res, t_new, dt, grid, spec.gas, gem_B0)
                        rows.append(row)
                        if writer:
                            writer.writerow([repr(float(v)) for v in row])
                    U, t = res.U, t_new
                    steps += 1
                save(U, t)
            if log:
                log(f"{spec.name}: reached t = {t:.6g} in {steps} steps")
    except AdmissibilityError as err:
        status = EXIT_ADMISSIBILITY
        message = f"admissibility failure at t = {t:.17g}: {err}"
        if log:
            log(message)
    finally:
        if csv_fh:
            csv_fh.close()
    return RunResult(status, U, t, steps, rows, saved, message)


# ---------------------------------------------------------------- studies

def convergence_errors(U, grid, spec, t):
    err = grid.interior(U)[0, :, 0] - problems.exact_density(grid.x, t)
    return float(np.mean(np.abs(err))), float(np.sqrt(np.mean(err * err)))


def converge(cfg: RunConfig, levels: int):
    """Errors of rho_I on ``levels`` doubling grids starting at cfg.nx.

    Returns rows (n, L1, L1 order, L2, L2 order); the first order entries
    are None.
    """
    if cfg.problem != "accuracy1d":
        raise ConfigError("converge needs the accuracy1d problem")
    if levels < 1:
        raise ConfigError("levels must be >= 1")
    n0 = cfg.nx or problems.get_problem(cfg.problem, **cfg.overrides).nx
    table = []
    for k in range(levels):
        level = RunConfig(**{**cfg.__dict__, "nx": n0 * 2 ** k, "ny": 1, "out_dir": None})
        res = simulate(level, diagnostics=False, snapshots=False)
        if res.status != EXIT_OK:
            raise AdmissibilityError(res.message)
        spec = level.problem_spec()
        e1, e2 = convergence_errors(res.U, level.grid(spec), spec, res.t)
        o1 = o2 = None
        if table:
            o1 = math.log2(table[-1][1] / e1)
            o2 = math.log2(table[-1][3] / e2)
        table.append((n0 * 2 ** k, e1, o1, e2, o2))
    return table


def compare(cfg: RunConfig, modes=("multid", "phm", "none"), samples=50):
    """Divergence-error series of several Maxwell modes sampled at common times.

    Returns (times, {mode: array (len(times), 4)}) with columns divB_L1,
    divB_L2, divE_res_L1, divE_res_L2.
    """
    spec = cfg.problem_spec()
    interval = cfg.interval if cfg.interval > 0 else spec.t_end / samples
    series = {}
    times = None
    for mode in modes:
        run = RunConfig(**{**cfg.__dict__, "mode": Mode.parse(mode).value,
                           "interval": interval, "out_dir": None})
        res = simulate(run, diagnostics=True, snapshots=False)
        if res.status != EXIT_OK:
            raise AdmissibilityError(f"{mode}: {res.message}")
        targets = _targets(spec.t_end, interval)
        picked = [r for r in res.rows if any(r[0] == tt for tt in targets)]
        series[mode] = np.array([r[2:6] for r in picked])
        times = [r[0] for r in picked]
    return times, series


# ---------------------------------------------------------------- entry point

def _apply_flags(cfg, args):
    if args.cells:
        parts = args.cells.lower().split("x")
        try:
            cfg.nx = int(parts[0])
            cfg.ny = int(parts[1]) if len(parts) > 1 else 1
        except ValueError:
            raise ConfigError(f"--cells expects NX or NXxNY, got {args.cells!r}") from None
    if args.cfl is not None:
        cfg.cfl = args.cfl
    if args.integrator:
        cfg.integrator = args.integrator
    if args.mode:
        cfg.mode = args.mode
    if args.tend is not None:
        cfg.overrides["t_end"] = args.tend
    if args.out:
        cfg.out_dir = args.out
    if args.threads:
        cfg.threads = args.threads
    return cfg


def build_parser():
    parser = argparse.ArgumentParser(prog="twofluid", description="Two-fluid plasma solver")
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("config")
    common.add_argument("--cells")
    common.add_argument("--cfl", type=float)
    common.add_argument("--integrator", choices=("rk2", "rk3", "imex"))
    common.add_argument("--mode", choices=("multid", "phm", "none"))
    common.add_argument("--tend", type=float)
    common.add_argument("--out")
    common.add_argument("--threads", type=int)
    sub.add_parser("run", parents=[common], help="run one simulation")
    p = sub.add_parser("converge", parents=[common], help="grid-convergence study")
    p.add_argument("--levels", type=int, default=5)
    p = sub.add_parser("compare", parents=[common], help="compare Maxwell modes")
    p.add_argument("--modes", default="multid,phm,none")
    return parser


def _order(o):
    return "" if o is None else f"{o:.4f}"


def _log(msg):
    print(msg, file=sys.stderr)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = _apply_flags(RunConfig.load(args.config), args)
        if args.command == "run":
            res = simulate(cfg, log=_log)
            return res.status
        if args.command == "converge":
            t0 = time.time()
            table = converge(cfg, args.levels)
            lines = ["n,L1,L1_order,L2,L2_order"]
            for n, e1, o1, e2, o2 in table:
                lines.append(f"{n},{e1:.6e},{_order(o1)},{e2:.6e},{_order(o2)}")
            print("\n".join(lines))
            _log(f"converge: {time.time() - t0:.1f} s")
            if cfg.out_dir:
                os.makedirs(cfg.out_dir, exist_ok=True)
                with open(os.path.join(cfg.out_dir, "converge.csv"), "w") as fh:
                    fh.write("\n".join(lines) + "\n")
            return EXIT_OK
        modes = [m.strip() for m in args.modes.split(",") if m.strip()]
        times, series = compare(cfg, modes)
        header = ["t"] + [f"{col}_{m}" for m in modes for col in CSV_COLUMNS[2:6]]
        lines = [",".join(header)]
        for k, t in enumerate(times):
            vals = [repr(float(t))] + [repr(float(v)) for m in modes for v in series[m][k]]
            lines.append(",".join(vals))
        print("\n".join(lines))
        if cfg.out_dir:
            os.makedirs(cfg.out_dir, exist_ok=True)
            with open(os.path.join(cfg.out_dir, "compare.csv"), "w") as fh:
                fh.write("\n".join(lines) + "\n")
        return EXIT_OK
    except AdmissibilityError as err:
        _log(f"admissibility failure: {err}")
        return EXIT_ADMISSIBILITY
    except (ConfigError, ValueError) as err:
        _log(f"config error: {err}")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

"""Benchmark set-ups: initial data, parameters and manufactured forcing.

All problems use mu0 = 1, so eps0 = 1/c^2 throughout, and the ideal Ohm
field of the implemented equations is E = -u x B.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .grid import BoundaryKind, ConfigError, Grid2D
from .state import BX, BY, BZ, ELC, EX, EZ, ION, NVAR, GasParams, prim_to_cons

GAMMA = 5.0 / 3.0


@dataclass(frozen=True)
class ProblemSpec:
    name: str
    gas: GasParams
    nx: int
    ny: int
    xmin: float
    xmax: float
    ymin: float = 0.0
    ymax: float = 1.0
    bc_x: BoundaryKind = BoundaryKind.PERIODIC
    bc_y: BoundaryKind = BoundaryKind.PERIODIC
    t_end: float = 1.0
    integrator: str = "imex"
    params: dict = field(default_factory=dict)

    @property
    def is_1d(self) -> bool:
        return self.name in ONE_D

    def make_grid(self, nx=None, ny=None) -> Grid2D:
        nx = self.nx if nx is None else int(nx)
        ny = self.ny if ny is None else int(ny)
        if self.is_1d and ny != 1:
            raise ConfigError(f"{self.name} is one-dimensional and needs ny = 1")
        return Grid2D(nx, ny, self.xmin, self.xmax, self.ymin, self.ymax, self.bc_x, self.bc_y)


def _prim(grid):
    return np.zeros((NVAR, grid.nx, grid.ny))


def _set_species(W, sl, rho, ux=0.0, uy=0.0, uz=0.0, p=1.0):
    W[sl.start] = rho
    W[sl.start + 1] = ux
    W[sl.start + 2] = uy
    W[sl.start + 3] = uz
    W[sl.start + 4] = p


# ---------------------------------------------------------------- accuracy

def accuracy1d(**kw) -> ProblemSpec:
    """Manufactured smooth solution on [0, 1], periodic.

    With c = 1, eps0 = 1, r_I = 1, r_E = -2 the forcing in the E_x row
    cancels -j_x/eps0 exactly, so every field is a pure advection at unit
    speed and rho_I = rho_E = 2 + sin(2 pi (x - t)).
    """
    gas = GasParams(GAMMA, GAMMA, r_I=1.0, r_E=-2.0, c=1.0, eps0=1.0)
    spec = ProblemSpec("accuracy1d", gas, 32, 1, 0.0, 1.0, t_end=2.0, integrator="rk2")
    return replace(spec, **kw)


def _init_accuracy(spec, grid):
    x, _ = grid.meshgrid()
    W = _prim(grid)
    s = np.sin(2.0 * np.pi * x)
    for sl in (ION, ELC):
        _set_species(W, sl, 2.0 + s, ux=1.0, p=1.0)
    W[BY] = s
    W[EZ] = -s
    return W


def accuracy_forcing(grid, t):
    """Forcing vector on the interior: -(2 + sin 2 pi (x - t)) in the E_x row."""
    x, _ = grid.meshgrid()
    S = np.zeros((NVAR, grid.nx, grid.ny))
    S[EX] = -(2.0 + np.sin(2.0 * np.pi * (x - t)))
    return S


def exact_density(x, t):
    """Exact rho_I = rho_E of the accuracy problem."""
    return 2.0 + np.sin(2.0 * np.pi * (np.asarray(x) - t))


# ---------------------------------------------------------------- Brio-Wu

def briowu(larmor=0.1, debye=0.01, mass_ratio=1836.0, c=None, **kw) -> ProblemSpec:
    """Two-fluid Brio-Wu shock tube on [0, 1] with outflow ends.

    r_I = 1/larmor, r_E = -mass_ratio r_I. The Debye length fixes
    eps0 = debye^2 and, with mu0 = 1, c = 1/debye. Passing ``c`` keeps
    eps0 and changes mu0 = 1/(c^2 eps0) instead.
    """
    if c is None:
        c = 1.0 / debye
    r_I = 1.0 / larmor
    eps0 = debye * debye
    gas = GasParams(GAMMA, GAMMA, r_I=r_I, r_E=-mass_ratio * r_I, c=c, eps0=eps0)
    spec = ProblemSpec(
        "briowu", gas, 2000, 1, 0.0, 1.0, bc_x=BoundaryKind.OUTFLOW, t_end=0.1,
        integrator="imex", params={"larmor": larmor, "debye": debye, "mass_ratio": mass_ratio},
    )
    return replace(spec, **kw)


def _init_briowu(spec, grid):
    x, _ = grid.meshgrid()
    me = 1.0 / spec.params["mass_ratio"]
    left = x < 0.5
    rho = np.where(left, 1.0, 0.125)
    p = np.where(left, 5e-5, 5e-6)
    W = _prim(grid)
    _set_species(W, ION, rho, p=p)
    _set_species(W, ELC, rho * me, p=p)
    W[BX] = 0.75
    W[BY] = np.where(left, 1.0, -1.0)
    return W


# ---------------------------------------------------------------- soliton

def soliton(larmor=1e-2, debye=1.0, mass_ratio=25.0, length=12.0, **kw) -> ProblemSpec:
    """Soliton on [0, 12], periodic.

    r_I = 1/larmor, r_E = -mass_ratio r_I, eps0 = debye^2, c = 1/debye.
    Ions carry p_I = p_E / 100; velocities and fields start at zero.
    """
    r_I = 1.0 / larmor
    gas = GasParams(GAMMA, GAMMA, r_I=r_I, r_E=-mass_ratio * r_I, c=1.0 / debye, eps0=debye * debye)
    spec = ProblemSpec(
        "soliton", gas, 1500, 1, 0.0, length, t_end=5.0, integrator="imex",
        params={"larmor": larmor, "debye": debye, "mass_ratio": mass_ratio},
    )
    return replace(spec, **kw)


def _init_soliton(spec, grid):
    x, _ = grid.meshgrid()
    L = spec.xmax - spec.xmin
    rho_i = 1.0 + np.exp(-25.0 * np.abs(x - L / 3.0))
    p_e = 5.0 * rho_i
    W = _prim(grid)
    _set_species(W, ION, rho_i, p=p_e / 100.0)
    _set_species(W, ELC, rho_i / spec.params["mass_ratio"], p=p_e)
    return W


# ---------------------------------------------------------------- Orszag-Tang

def orszag_tang(**kw) -> ProblemSpec:
    """Two-fluid Orszag-Tang vortex on [0, 2 pi]^2, periodic, c = 1."""
    gas = GasParams(GAMMA, GAMMA, r_I=2.434602, r_E=-60.865062, c=1.0, eps0=1.0)
    spec = ProblemSpec(
        "orszag_tang", gas, 64, 64, 0.0, 2.0 * np.pi, 0.0, 2.0 * np.pi,
        t_end=np.pi, integrator="imex", params={"rho": 25.0 / 9.0, "mass_ratio": 25.0},
    )
    return replace(spec, **kw)


def _init_orszag_tang(spec, grid):
    x, y = grid.meshgrid()
    rho = spec.params["rho"]
    mr = spec.params["mass_ratio"]
    ux, uy = -np.sin(y), np.sin(x)
    W = _prim(grid)
    _set_species(W, ION, mr / (mr + 1.0) * rho, ux, uy, p=spec.gas.gamma_I / 2.0)
    _set_species(W, ELC, rho / (mr + 1.0), ux, uy, p=spec.gas.gamma_E / 2.0)
    W[BX] = -np.sin(y)
    W[BY] = np.sin(2.0 * x)
    _ohm(W)
    return W


def _ohm(W):
    # E = -u x B with the common species velocity
    u = W[ION.start + 1:ION.start + 4]
    Bv = W[BX:BZ + 1]
    W[EX] = -(u[1] * Bv[2] - u[2] * Bv[1])
    W[EX + 1] = -(u[2] * Bv[0] - u[0] * Bv[2])
    W[EZ] = -(u[0] * Bv[1] - u[1] * Bv[0])


# ---------------------------------------------------------------- rotor

def rotor(**kw) -> ProblemSpec:
    """Two-fluid rotor on [-0.5, 1.5]^2 with zero-gradient boundaries, c = 1."""
    gas = GasParams(GAMMA, GAMMA, r_I=25.495097, r_E=-637.377439, c=1.0, eps0=1.0)
    spec = ProblemSpec(
        "rotor", gas, 128, 128, -0.5, 1.5, -0.5, 1.5,
        bc_x=BoundaryKind.OUTFLOW, bc_y=BoundaryKind.OUTFLOW, t_end=0.295,
        integrator="imex", params={"mass_ratio": 25.0},
    )
    return replace(spec, **kw)


def _init_rotor(spec, grid):
    x, y = grid.meshgrid()
    mr = spec.params["mass_ratio"]
    fi, fe = mr / (mr + 1.0), 1.0 / (mr + 1.0)
    dx, dy = x - 0.5, y - 0.5
    r = np.hypot(dx, dy)
    f = (0.115 - r) / 0.015
    inner = r < 0.1
    outer = r > 0.115
    scale = np.where(inner, 10.0, np.where(outer, 1.0, 1.0 + 9.0 * f))
    rs = np.where(r > 0.0, r, 1.0)
    ux = np.where(inner, -dy / 0.1, np.where(outer, 0.0, -f * dy / rs))
    uy = np.where(inner, dx / 0.1, np.where(outer, 0.0, f * dx / rs))
    W = _prim(grid)
    _set_species(W, ION, fi * scale, ux, uy, p=0.5)
    _set_species(W, ELC, fe * scale, ux, uy, p=0.5)
    W[BX] = 2.5 / math.sqrt(4.0 * math.pi)
    return W


# ---------------------------------------------------------------- GEM

def gem(psi0=0.1, lam=0.5, B0=1.0, c=10.0, **kw) -> ProblemSpec:
    """GEM reconnection: periodic in x, conducting walls at y = +-Ly/2.

    r_I = 1 makes the ion inertial length unity for the sheet density;
    c = 10 with eps0 = 1/c^2.
    """
    gas = GasParams(GAMMA, GAMMA, r_I=1.0, r_E=-25.0, c=c, eps0=1.0 / (c * c))
    Lx, Ly = 8.0 * np.pi, 4.0 * np.pi
    spec = ProblemSpec(
        "gem", gas, 128, 64, -Lx / 2, Lx / 2, -Ly / 2, Ly / 2,
        bc_x=BoundaryKind.PERIODIC, bc_y=BoundaryKind.WALL, t_end=40.0, integrator="imex",
        params={"psi0": psi0, "lam": lam, "B0": B0, "mass_ratio": 25.0},
    )
    return replace(spec, **kw)


def _init_gem(spec, grid):
    x, y = grid.meshgrid()
    P = spec.params
    lam, B0, psi0 = P["lam"], P["B0"], P["psi0"]
    Lx, Ly = spec.xmax - spec.xmin, spec.ymax - spec.ymin
    sech2 = 1.0 / np.cosh(y / lam) ** 2
    n = sech2 + 0.2
    p_i = 5.0 * n * B0 / 12.0
    rho_e = n / P["mass_ratio"]
    J = -(B0 / lam) * sech2
    W = _prim(grid)
    _set_species(W, ION, n, p=p_i)
    _set_species(W, ELC, rho_e, uz=J / (spec.gas.r_E * rho_e), p=p_i / 5.0)
    kx, ky = 2.0 * np.pi / Lx, np.pi / Ly
    W[BX] = B0 * np.tanh(y / lam) - psi0 * ky * np.cos(kx * x) * np.sin(ky * y)
    W[BY] = psi0 * kx * np.sin(kx * x) * np.cos(ky * y)
    return W


# ---------------------------------------------------------------- registry

REGISTRY: dict[str, Callable[..., ProblemSpec]] = {
    "accuracy1d": accuracy1d,
    "briowu": briowu,
    "soliton": soliton,
    "orszag_tang": orszag_tang,
    "rotor": rotor,
    "gem": gem,
}
ONE_D = {"accuracy1d", "briowu", "soliton"}

_INIT = {
    "accuracy1d": _init_accuracy,
    "briowu": _init_briowu,
    "soliton": _init_soliton,
    "orszag_tang": _init_orszag_tang,
    "rotor": _init_rotor,
    "gem": _init_gem,
}


def get_problem(name, **kw) -> ProblemSpec:
    try:
        factory = REGISTRY[name]
    except KeyError:
        raise ConfigError(f"unknown problem {name!r}; choose from {sorted(REGISTRY)}") from None
    return factory(**kw)


def init(spec: ProblemSpec, grid: Grid2D) -> np.ndarray:
    """Ghosted conserved field with the problem's initial data at cell centres."""
    if spec.is_1d and not grid.is_1d:
        raise ConfigError(f"{spec.name} is one-dimensional and needs ny = 1")
    if not spec.is_1d and grid.is_1d:
        raise ConfigError(f"{spec.name} is two-dimensional")
    W = _INIT[spec.name](spec, grid)
    return grid.with_ghosts(prim_to_cons(W, spec.gas))


def forcing(spec: ProblemSpec) -> Optional[Callable]:
    """Manufactured forcing callable (grid, t) -> array, or None."""
    return accuracy_forcing if spec.name == "accuracy1d" else None


def forcing_vector(spec: ProblemSpec, x, t):
    """Forcing at points x and time t, components on the leading axis."""
    if spec.name != "accuracy1d":
        raise ConfigError(f"{spec.name} has no manufactured forcing")
    x = np.asarray(x, dtype=float)
    S = np.zeros((NVAR,) + x.shape)
    S[EX] = -(2.0 + np.sin(2.0 * np.pi * (x - t)))
    return S


def exact_solution(spec: ProblemSpec, x, t):
    """Exact primitive state of the accuracy problem at points x and time t."""
    if spec.name != "accuracy1d":
        raise ConfigError("an exact solution is only known for accuracy1d")
    x = np.asarray(x, dtype=float)
    W = np.zeros((NVAR,) + x.shape)
    s = np.sin(2.0 * np.pi * (x - t))
    for sl in (ION, ELC):
        _set_species(W, sl, 2.0 + s, ux=1.0, p=1.0)
    W[BY] = s
    W[EZ] = -s
    return W

"""Residual assembly, time-step control and the SSP/IMEX steppers.

Fields are ghosted arrays of shape (18, nx+2g, ny+2g). Every stepper
refills ghosts before each residual evaluation and returns a StepResult
carrying the stage current densities that enter the discrete Gauss-law
balance of that step.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import _kernels
from .fluid_flux import sweep_fluxes
from .grid import Grid2D, fill_ghosts
from .maxwell_flux import Mode, maxwell_fluxes
from .source import current_density, eval_source, implicit_inplace, implicit_source_stage
from .state import EM, NVAR, SPECIES, AdmissibilityError, GasParams, check_fluid

IMEX_BETA = 1.0 - 1.0 / math.sqrt(2.0)

Forcing = Callable[[Grid2D, float], Optional[np.ndarray]]


class Integrator(enum.Enum):
    RK2 = "rk2"
    RK3 = "rk3"
    IMEX = "imex"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ValueError(f"unknown integrator {value!r}") from None


DEFAULT_CFL = {Integrator.RK2: 0.2, Integrator.RK3: 0.2, Integrator.IMEX: 0.45}


@dataclass
class SchemeConfig:
    mode: Mode = Mode.MULTID
    integrator: Integrator = Integrator.IMEX
    cfl: Optional[float] = None
    order: int = 2
    backend: str = "numba"  # "numpy" selects the array reference path

    def __post_init__(self):
        self.mode = Mode.parse(self.mode)
        self.integrator = Integrator.parse(self.integrator)
        if self.cfl is None:
            self.cfl = DEFAULT_CFL[self.integrator]
        if not 0.0 < self.cfl < 1.0:
            raise ValueError(f"cfl must lie in (0, 1), got {self.cfl}")
        if self.order not in (1, 2):
            raise ValueError("order must be 1 or 2")
        if self.backend not in ("numba", "numpy"):
            raise ValueError(f"unknown backend {self.backend!r}")

    @property
    def phm(self) -> bool:
        return self.mode is Mode.PHM


@dataclass
class Discretization:
    """Everything a stepper needs besides the field itself."""

    grid: Grid2D
    gas: GasParams
    scheme: SchemeConfig = field(default_factory=SchemeConfig)
    forcing: Optional[Forcing] = None


@dataclass
class StepResult:
    """New field plus the stage states whose currents enter Gauss's law."""

    U: np.ndarray
    stages: list  # ghosted stage fields
    weights: tuple
    gas: GasParams

    @property
    def currents(self):
        return [current_density(V, self.gas) for V in self.stages]


# ---------------------------------------------------------------- dt

def max_speeds(U, grid, gas, mode=Mode.MULTID):
    """Per-cell (Lambda_x, Lambda_y) over the interior."""
    Ui = grid.interior(U)
    lam_x = lam_y = None
    for sl, gam in zip(SPECIES, gas.gammas):
        Ua = Ui[sl]
        p = check_fluid(Ua, gam)
        a = np.sqrt(gam * p / Ua[0])
        sx = np.abs(Ua[1] / Ua[0]) + a
        sy = np.abs(Ua[2] / Ua[0]) + a
        lam_x = sx if lam_x is None else np.maximum(lam_x, sx)
        lam_y = sy if lam_y is None else np.maximum(lam_y, sy)
    cmax = gas.c
    if Mode.parse(mode) is Mode.PHM:
        cmax = max(gas.c, gas.kappa * gas.c, gas.xi * gas.c)
    return np.maximum(lam_x, cmax), np.maximum(lam_y, cmax)


def compute_dt(U, grid, gas, cfl, mode=Mode.MULTID):
    """CFL-limited step; the y term is dropped on 1D grids."""
    lam_x, lam_y = max_speeds(U, grid, gas, mode)
    rate = lam_x / grid.dx
    if not grid.is_1d:
        rate = rate + lam_y / grid.dy
    return cfl / float(np.max(rate))


# ---------------------------------------------------------------- residual

def _sweep(Ua, gam, direction, scheme, g):
    if scheme.backend == "numpy":
        return sweep_fluxes(Ua, gam, direction, scheme.order, g)
    F, bad = _kernels.fluid_sweep(Ua, gam, direction, scheme.order, g)
    if bad >= 0:
        check_fluid(Ua, gam)  # raises with the cell location
        raise AdmissibilityError("inadmissible fluid state", cell=bad)
    return F


def residual(U, grid, gas, scheme, t=0.0, forcing=None):
    """Flux-difference operator L(U) on the interior, plus any forcing at t.

    ``U`` must have its ghosts filled.
    """
    g = grid.nghost
    nx, ny = grid.nx, grid.ny
    L = np.zeros((NVAR, nx, ny))
    for sl, gam in zip(SPECIES, gas.gammas):
        Fx = _sweep(U[sl, :, g:g + ny], gam, 0, scheme, g)
        L[sl] -= (Fx[:, 1:] - Fx[:, :-1]) / grid.dx
        if not grid.is_1d:
            Ut = np.swapaxes(U[sl, g:g + nx, :], 1, 2)
            Fy = np.swapaxes(_sweep(Ut, gam, 1, scheme, g), 1, 2)
            L[sl] -= (Fy[:, :, 1:] - Fy[:, :, :-1]) / grid.dy
    Fx, Fy, _ = maxwell_fluxes(U, grid, gas, scheme.mode, scheme.order, scheme.backend)
    L[EM] -= (Fx[:, 1:] - Fx[:, :-1]) / grid.dx
    if Fy is not None:
        L[EM] -= (Fy[:, :, 1:] - Fy[:, :, :-1]) / grid.dy
    if forcing is not None:
        S = forcing(grid, t)
        if S is not None:
            L += S
    return L


def explicit_rhs(U, disc, t):
    """L(U) + s(U) on the interior."""
    scheme = disc.scheme
    R = residual(U, disc.grid, disc.gas, scheme, t, disc.forcing)
    R += eval_source(disc.grid.interior(U), disc.gas, scheme.phm, scheme.backend)
    return R


def _stage(base, update, grid):
    """Ghosted copy of ``base`` whose interior is replaced by ``update``."""
    V = np.empty_like(base)
    grid.interior(V)[...] = update
    return fill_ghosts(V, grid)


def _implicit(base_int, h, disc):
    """Ghosted solution of U* = base + h s(U*)."""
    grid, gas, scheme = disc.grid, disc.gas, disc.scheme
    if scheme.backend == "numpy":
        return grid.with_ghosts(implicit_source_stage(base_int, h, gas, scheme.phm, "numpy"))
    V = grid.allocate()
    I = grid.interior(V)
    I[...] = base_int
    implicit_inplace(I, h, gas, scheme.phm)
    fill_ghosts(V, grid)
    return V


# ---------------------------------------------------------------- steppers

def rk2_step(U, t, dt, disc):
    """SSP-RK2: two forward-Euler stages averaged with the initial state."""
    grid = disc.grid
    U0 = fill_ghosts(U.copy(), grid)
    I0 = grid.interior(U0)
    U1 = _stage(U0, I0 + dt * explicit_rhs(U0, disc, t), grid)
    R1 = explicit_rhs(U1, disc, t + dt)
    R1 *= dt
    R1 += grid.interior(U1)
    R1 += I0
    R1 *= 0.5
    return StepResult(_stage(U0, R1, grid), [U0, U1], (0.5, 0.5), disc.gas)


def rk3_step(U, t, dt, disc):
    """Shu-Osher SSP-RK3."""
    grid = disc.grid
    U0 = fill_ghosts(U.copy(), grid)
    I0 = grid.interior(U0)
    U1 = _stage(U0, I0 + dt * explicit_rhs(U0, disc, t), grid)
    I1 = grid.interior(U1)
    U2 = _stage(U0, 0.75 * I0 + 0.25 * (I1 + dt * explicit_rhs(U1, disc, t + dt)), grid)
    I2 = grid.interior(U2)
    Un = _stage(U0, I0 / 3.0 + 2.0 / 3.0 * (I2 + dt * explicit_rhs(U2, disc, t + 0.5 * dt)), grid)
    return StepResult(Un, [U0, U1, U2], (1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0), disc.gas)


def imex_step(U, t, dt, disc):
    """IMEX-SSP2(2,2,2): sources implicit with coefficient beta dt, fluxes explicit."""
    grid, gas, scheme = disc.grid, disc.gas, disc.scheme
    beta = IMEX_BETA
    U0 = fill_ghosts(U.copy(), grid)
    I0 = grid.interior(U0)

    U1 = _implicit(I0, beta * dt, disc)
    I1 = grid.interior(U1)
    L1 = residual(U1, grid, gas, scheme, t, disc.forcing)
    s1 = eval_source(I1, gas, scheme.phm, scheme.backend)

    U2 = _implicit(I0 + dt * (L1 + (1.0 - 2.0 * beta) * s1), beta * dt, disc)
    I2 = grid.interior(U2)
    L2 = residual(U2, grid, gas, scheme, t + dt, disc.forcing)
    s2 = eval_source(I2, gas, scheme.phm, scheme.backend)

    L1 += L2
    L1 += s1
    L1 += s2
    L1 *= 0.5 * dt
    L1 += I0
    return StepResult(_stage(U0, L1, grid), [U1, U2], (0.5, 0.5), gas)


STEPPERS = {Integrator.RK2: rk2_step, Integrator.RK3: rk3_step, Integrator.IMEX: imex_step}


def step(U, t, dt, disc):
    return STEPPERS[disc.scheme.integrator](U, t, dt, disc)

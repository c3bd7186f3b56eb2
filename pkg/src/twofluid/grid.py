"""Uniform cell-centred mesh with ghost layers and boundary filling."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .state import BY, EX, EZ, NVAR


class BoundaryKind(enum.Enum):
    PERIODIC = "periodic"
    OUTFLOW = "outflow"
    WALL = "wall"  # perfectly conducting wall, y-axis only

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {"neumann": "outflow", "conducting_wall": "wall", "conducting": "wall"}
        return cls(aliases.get(key, key))


class ConfigError(ValueError):
    pass


_KIND_CODE = {BoundaryKind.PERIODIC: 0, BoundaryKind.OUTFLOW: 1, BoundaryKind.WALL: 2}

# wall reflection: wall-normal velocity and B_y odd, tangential E odd
WALL_SIGNS = np.ones(NVAR)
WALL_SIGNS[[2, 7, BY, EX, EZ]] = -1.0


@dataclass(frozen=True)
class Grid2D:
    nx: int
    ny: int
    xmin: float = 0.0
    xmax: float = 1.0
    ymin: float = 0.0
    ymax: float = 1.0
    bc_x: BoundaryKind = BoundaryKind.PERIODIC
    bc_y: BoundaryKind = BoundaryKind.PERIODIC
    nghost: int = 2
    dx: float = field(init=False)
    dy: float = field(init=False)

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise ConfigError("grid needs at least one cell per axis")
        if self.nghost < 2:
            raise ConfigError("second-order stencils need nghost >= 2")
        if not (self.xmax > self.xmin and self.ymax > self.ymin):
            raise ConfigError("empty domain")
        object.__setattr__(self, "bc_x", BoundaryKind.parse(self.bc_x))
        object.__setattr__(self, "bc_y", BoundaryKind.parse(self.bc_y))
        if self.bc_x is BoundaryKind.WALL:
            raise ConfigError("conducting walls are only supported on the y axis")
        if self.ny == 1 and self.bc_y is not BoundaryKind.PERIODIC:
            raise ConfigError("1D runs (ny=1) require periodic y boundaries")
        object.__setattr__(self, "dx", (self.xmax - self.xmin) / self.nx)
        object.__setattr__(self, "dy", (self.ymax - self.ymin) / self.ny)

    @property
    def is_1d(self) -> bool:
        return self.ny == 1

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx + 2 * self.nghost, self.ny + 2 * self.nghost)

    @property
    def x(self) -> np.ndarray:
        return self.xmin + (np.arange(self.nx) + 0.5) * self.dx

    @property
    def y(self) -> np.ndarray:
        return self.ymin + (np.arange(self.ny) + 0.5) * self.dy

    def meshgrid(self):
        return np.meshgrid(self.x, self.y, indexing="ij")

    def allocate(self, nvar: int = NVAR) -> np.ndarray:
        return np.zeros((nvar,) + self.shape)

    def interior(self, U: np.ndarray) -> np.ndarray:
        g = self.nghost
        return U[..., g:g + self.nx, g:g + self.ny]

    def with_ghosts(self, Uint: np.ndarray) -> np.ndarray:
        U = self.allocate(Uint.shape[0])
        self.interior(U)[...] = Uint
        return fill_ghosts(U, self)


def fill_ghosts(U: np.ndarray, grid: Grid2D) -> np.ndarray:
    """Populate ghost layers in place (x first, then y so corners are consistent)."""
    if U.shape[0] > NVAR:
        raise ValueError("fill_ghosts expects at most 18 components")
    signs = np.ascontiguousarray(WALL_SIGNS[: U.shape[0]])
    _kernels.fill_ghosts(U, grid.nx, grid.ny, grid.nghost,
                         _KIND_CODE[grid.bc_x], _KIND_CODE[grid.bc_y], signs)
    return U

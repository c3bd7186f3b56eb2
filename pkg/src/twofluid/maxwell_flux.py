"""Co-located Maxwell fluxes.

Three treatments of the electromagnetic block are available:

``MULTID``
    Vertex-centred multidimensional Riemann solver. E_z and c^2 B_z are
    resolved once per vertex from four diagonal MinMod traces and shared by
    the four faces meeting there, so the discrete curl of the face fluxes
    has zero vertex divergence. The out-of-plane rows use 1D Rusanov.
``NONE``
    Upwind (|A|) fluxes face by face, no constraint handling.
``PHM``
    Perfectly hyperbolic Maxwell with correction potentials psi, phi,
    Rusanov fluxes with the largest of c, kappa c, xi c.

The electromagnetic block is indexed locally as
(Bx, By, Bz, Ex, Ey, Ez, psi, phi).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .limiters import minmod
from .state import EM

LBX, LBY, LBZ, LEX, LEY, LEZ, LPSI, LPHI = range(8)
NEM = 8


class Mode(enum.Enum):
    MULTID = "multid"
    PHM = "phm"
    NONE = "none"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ValueError(f"unknown Maxwell mode {value!r}") from None


@dataclass
class VertexEM:
    """Vertex values Ez~ and Bz~ at (i+1/2, j+1/2)."""

    Ez: np.ndarray
    Bz: np.ndarray
    c: float

    @property
    def c2Bz(self):
        return self.c**2 * self.Bz


def physical_flux(M, c, direction, kappa=0.0, xi=0.0):
    """Flux of the (PHM-)Maxwell block; kappa = xi = 0 gives plain Maxwell."""
    c2 = c * c
    F = np.zeros_like(M, dtype=float)
    if direction == 0:
        F[LBX] = kappa * M[LPSI]
        F[LBY] = -M[LEZ]
        F[LBZ] = M[LEY]
        F[LEX] = xi * c2 * M[LPHI]
        F[LEY] = c2 * M[LBZ]
        F[LEZ] = -c2 * M[LBY]
        F[LPSI] = kappa * c2 * M[LBX]
        F[LPHI] = xi * M[LEX]
    else:
        F[LBX] = M[LEZ]
        F[LBY] = kappa * M[LPSI]
        F[LBZ] = -M[LEX]
        F[LEX] = -c2 * M[LBZ]
        F[LEY] = xi * c2 * M[LPHI]
        F[LEZ] = c2 * M[LBX]
        F[LPSI] = kappa * c2 * M[LBY]
        F[LPHI] = xi * M[LEY]
    return F


# ---------------------------------------------------------------- traces

def _shift(M, di, dj, nx, ny):
    """Cell (i+di, j+dj) for every vertex i, j in [-1, n-1] (2 ghost layers)."""
    return M[:, 1 + di:nx + 2 + di, 1 + dj:ny + 2 + dj]


def diag_traces(M, order=2):
    """Diagonal traces (LD, RD, RU, LU) at every vertex of the block.

    ``M`` has shape (ncomp, nx+4, ny+4) including two ghost layers; the
    result has shape (ncomp, nx+1, ny+1) for vertices i+1/2, j+1/2 with
    i in [-1, nx-1], j in [-1, ny-1]. A lone 4x4 block yields one vertex.
    """
    nx = M.shape[1] - 4
    ny = M.shape[2] - 4

    def S(di, dj):
        return _shift(M, di, dj, nx, ny)

    c00, c10, c11, c01 = S(0, 0), S(1, 0), S(1, 1), S(0, 1)
    if order == 1:
        return c00, c10, c11, c01
    LD = c00 + 0.5 * minmod(c00 - S(-1, -1), c11 - c00)
    RD = c10 - 0.5 * minmod(c10 - c01, S(2, -1) - c10)
    RU = c11 - 0.5 * minmod(c11 - c00, S(2, 2) - c11)
    LU = c01 + 0.5 * minmod(c01 - S(-1, 2), c10 - c01)
    return LD, RD, RU, LU


def vertex_solve(LD, RD, RU, LU, c):
    """Multidimensional Riemann solve at a vertex from its four corner traces.

    Each trace is an EM block (Bx, By, Bz, Ex, Ey, Ez, ...) on the leading
    axis. The dissipative part uses only the light speed c.
    """
    Ez = 0.25 * (LD[LEZ] + RD[LEZ] + RU[LEZ] + LU[LEZ])
    Ez = Ez + 0.5 * c * (0.5 * (RD[LBY] + RU[LBY]) - 0.5 * (LD[LBY] + LU[LBY]))
    Ez = Ez - 0.5 * c * (0.5 * (LU[LBX] + RU[LBX]) - 0.5 * (LD[LBX] + RD[LBX]))

    c2Bz = 0.25 * c * c * (LD[LBZ] + RD[LBZ] + RU[LBZ] + LU[LBZ])
    # dissipation -(c/2)(dEy/dx - dEx/dy): upwind for both Ey (x-faces) and Ex (y-faces)
    c2Bz = c2Bz + 0.5 * c * (0.5 * (LU[LEX] + RU[LEX]) - 0.5 * (LD[LEX] + RD[LEX]))
    c2Bz = c2Bz - 0.5 * c * (0.5 * (RD[LEY] + RU[LEY]) - 0.5 * (LD[LEY] + LU[LEY]))
    return VertexEM(Ez=Ez, Bz=c2Bz / (c * c), c=c)


def face_traces(M, order=2):
    """MinMod traces at faces along axis 1.

    ``M`` has shape (ncomp, n+4, K); returns (minus, plus) of shape
    (ncomp, n+1, K) for faces k+1/2, k in [-1, n-1].
    """
    n = M.shape[1] - 4
    Um = M[:, 0:n + 1]
    U0 = M[:, 1:n + 2]
    U1 = M[:, 2:n + 3]
    U2 = M[:, 3:n + 4]
    if order == 1:
        return U0, U1
    minus = U0 + 0.5 * minmod(U0 - Um, U1 - U0)
    plus = U1 - 0.5 * minmod(U1 - U0, U2 - U1)
    return minus, plus


def rusanov_face_components(minus, plus, direction, c):
    """1D Rusanov fluxes of the out-of-plane rows (F_Bz, F_Ez)."""
    dBz = plus[LBZ] - minus[LBZ]
    dEz = plus[LEZ] - minus[LEZ]
    if direction == 0:
        F_Bz = 0.5 * (minus[LEY] + plus[LEY]) - 0.5 * c * dBz
        F_Ez = -0.5 * c * c * (minus[LBY] + plus[LBY]) - 0.5 * c * dEz
    else:
        F_Bz = -0.5 * (minus[LEX] + plus[LEX]) - 0.5 * c * dBz
        F_Ez = 0.5 * c * c * (minus[LBX] + plus[LBX]) - 0.5 * c * dEz
    return F_Bz, F_Ez


def _upwind_flux(minus, plus, c, direction):
    # Maxwell's |A| in a normal direction is c times the projector onto the
    # transverse fields; the normal components carry no flux and no dissipation.
    F = 0.5 * (physical_flux(minus, c, direction) + physical_flux(plus, c, direction))
    transverse = (LBY, LBZ, LEY, LEZ) if direction == 0 else (LBX, LBZ, LEX, LEZ)
    for k in transverse:
        F[k] -= 0.5 * c * (plus[k] - minus[k])
    return F


def _rusanov_flux(minus, plus, c, direction, kappa, xi):
    s = max(c, kappa * c, xi * c)
    F = 0.5 * (physical_flux(minus, c, direction, kappa, xi)
               + physical_flux(plus, c, direction, kappa, xi))
    return F - 0.5 * s * (plus - minus)


# ---------------------------------------------------------------- assembly

def assemble_multid(vertex, x_faces, y_faces, c):
    """Face fluxes of the multidimensional scheme.

    ``vertex`` covers vertices (i+1/2, j+1/2), i in [-1, nx-1], j in
    [-1, ny-1]. ``x_faces``/``y_faces`` are (minus, plus) face traces of
    the interior rows/columns; ``y_faces`` may be None (1D).
    """
    Ez, c2Bz = vertex.Ez, vertex.c2Bz
    minus, plus = x_faces
    Fx = np.zeros((NEM,) + minus.shape[1:])
    Fx[LBY] = -0.5 * (Ez[:, 1:] + Ez[:, :-1])
    Fx[LEY] = 0.5 * (c2Bz[:, 1:] + c2Bz[:, :-1])
    Fx[LBZ], Fx[LEZ] = rusanov_face_components(minus, plus, 0, c)
    Fy = None
    if y_faces is not None:
        minus, plus = y_faces
        Fy = np.zeros((NEM,) + minus.shape[1:])
        Fy[LBX] = 0.5 * (Ez[1:, :] + Ez[:-1, :])
        Fy[LEX] = -0.5 * (c2Bz[1:, :] + c2Bz[:-1, :])
        Fy[LBZ], Fy[LEZ] = rusanov_face_components(minus, plus, 1, c)
    return Fx, Fy


_MODE_CODE = {Mode.MULTID: 0, Mode.NONE: 1, Mode.PHM: 2}


def _compiled_fluxes(M, grid, params, mode, order):
    c = params.c
    kap = params.kappa if mode is Mode.PHM else 0.0
    xi = params.xi if mode is Mode.PHM else 0.0
    code = _MODE_CODE[mode]
    vertex = None
    if mode is Mode.MULTID:
        Ez, c2Bz = _kernels.vertex_fields(M, c, order)
        vertex = VertexEM(Ez, c2Bz / (c * c), c)
    else:
        Ez = c2Bz = np.zeros((1, 1))
    Fx = _kernels.face_fluxes(M, c, kap, xi, code, order, 0, Ez, c2Bz)
    Fy = None
    if not grid.is_1d:
        MT = np.ascontiguousarray(np.swapaxes(M, 1, 2))
        Fy = _kernels.face_fluxes(MT, c, kap, xi, code, order, 1,
                                  np.ascontiguousarray(Ez.T), np.ascontiguousarray(c2Bz.T))
        Fy = np.swapaxes(Fy, 1, 2)
    return Fx, Fy, vertex


def maxwell_fluxes(U, grid, params, mode=Mode.MULTID, order=2, backend="numpy"):
    """Electromagnetic face fluxes for a ghost-filled field.

    Returns (Fx, Fy, vertex): Fx has shape (8, nx+1, ny) at x-faces i+1/2,
    i in [-1, nx-1]; Fy has shape (8, nx, ny+1), or is None for 1D grids;
    vertex holds the shared vertex values (None unless MULTID).
    """
    mode = Mode.parse(mode)
    g = grid.nghost
    nx, ny = grid.nx, grid.ny
    # trim to exactly two ghost layers
    M = U[EM, g - 2:g + nx + 2, g - 2:g + ny + 2]
    if backend == "numba":
        return _compiled_fluxes(np.ascontiguousarray(M), grid, params, mode, order)
    c = params.c
    x_faces = face_traces(M[:, :, 2:2 + ny], order)
    y_faces = None
    if not grid.is_1d:
        t = face_traces(np.swapaxes(M[:, 2:2 + nx, :], 1, 2), order)
        y_faces = tuple(np.swapaxes(a, 1, 2) for a in t)

    vertex = None
    if mode is Mode.MULTID:
        vertex = vertex_solve(*diag_traces(M, order), c)
        Fx, Fy = assemble_multid(vertex, x_faces, y_faces, c)
    elif mode is Mode.NONE:
        Fx = _upwind_flux(*x_faces, c, 0)
        Fy = None if y_faces is None else _upwind_flux(*y_faces, c, 1)
    else:
        kap, xi = params.kappa, params.xi
        Fx = _rusanov_flux(*x_faces, c, 0, kap, xi)
        Fy = None if y_faces is None else _rusanov_flux(*y_faces, c, 1, kap, xi)
    return Fx, Fy, vertex

"""Vertex divergences, constraint-error norms, entropy and reconnected flux."""
from __future__ import annotations

import math

import numpy as np

from .grid import BoundaryKind
from .state import BX, BY, EX, EY, SPECIES, entropy


def _vertex_range(n, kind):
    # periodic axes have n distinct vertices, bounded axes n-1 interior ones
    return n if kind is BoundaryKind.PERIODIC else n - 1


def vertex_divergence(Ax, Ay, grid):
    """Four-cell divergence at vertices (i+1/2, j+1/2) from ghosted cell data.

    Returns an array of shape (nvx, nvy): all distinct vertices on periodic
    axes, interior vertices on bounded axes.
    """
    g = grid.nghost
    nvx = _vertex_range(grid.nx, grid.bc_x)
    nvy = _vertex_range(grid.ny, grid.bc_y)
    i0, i1 = slice(g, g + nvx), slice(g + 1, g + 1 + nvx)
    j0, j1 = slice(g, g + nvy), slice(g + 1, g + 1 + nvy)
    dAx = (Ax[i1, j1] - Ax[i0, j1]) + (Ax[i1, j0] - Ax[i0, j0])
    dAy = (Ay[i1, j1] - Ay[i1, j0]) + (Ay[i0, j1] - Ay[i0, j0])
    return 0.5 * dAx / grid.dx + 0.5 * dAy / grid.dy


def norms(values, grid):
    """(L1, L2) with the 1/(Nx Ny) normalization."""
    n = grid.nx * grid.ny
    a = np.abs(values)
    return float(np.sum(a) / n), float(math.sqrt(np.sum(a * a) / n))


def div_B(U, grid):
    return vertex_divergence(U[BX], U[BY], grid)


def div_E(U, grid):
    return vertex_divergence(U[EX], U[EY], grid)


def divB_norms(U, grid):
    return norms(div_B(U, grid), grid)


def divE_residual_field(U_old, U_new, currents, weights, dt, grid, eps0):
    """div E^{n+1} - (div E^n - dt/eps0 sum_k w_k div j^(k)) at every vertex."""
    if not currents or len(currents) != len(weights):
        raise ValueError("stage currents and weights are required for the Gauss-law residual")
    r = div_E(U_new, grid) - div_E(U_old, grid)
    for w, j in zip(weights, currents):
        r = r + (dt * w / eps0) * vertex_divergence(j[0], j[1], grid)
    return r


def divE_residual(U_old, U_new, currents, weights, dt, grid, eps0):
    """(L1, L2) norms of the discrete Gauss-law residual of one step."""
    return norms(divE_residual_field(U_old, U_new, currents, weights, dt, grid, eps0), grid)


def total_entropy(U, grid, gas):
    """dx dy sum of e_I + e_E over the interior."""
    Ui = grid.interior(U)
    tot = 0.0
    for sl, gam in zip(SPECIES, gas.gammas):
        tot += float(np.sum(entropy(Ui[sl], gam)))
    return tot * grid.dx * grid.dy


def reconnected_flux(U, grid, B0=1.0):
    """(1/(2 B0)) integral of |B_y| along y = 0 (midpoint rule).

    When y = 0 falls on a cell face the two adjacent rows are averaged.
    """
    By = grid.interior(U)[BY]
    pos = (0.0 - grid.ymin) / grid.dy
    k = int(round(pos))
    if abs(pos - k) < 1e-9 and 0 < k < grid.ny:
        row = 0.5 * (By[:, k - 1] + By[:, k])
    else:
        row = By[:, min(max(int(math.floor(pos)), 0), grid.ny - 1)]
    return float(np.sum(np.abs(row)) * grid.dx / (2.0 * B0))

"""Lorentz-force and current source terms, and the implicit source stage."""
from __future__ import annotations

import numpy as np

from . import _kernels
from .state import EX, EZ, PHI, SPECIES, check_fluid

_E = slice(EX, EZ + 1)


def _cross(a, b):
    return np.stack([
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ])


def charge_density(U, g):
    return g.r_I * U[0] + g.r_E * U[5]


def current_density(U, g):
    """j = sum r_a rho_a u_a = sum r_a m_a, shape (3, ...)."""
    return g.r_I * U[1:4] + g.r_E * U[6:9]


def eval_source(U, g, phm=False, backend="numpy"):
    """Source vector s(U) on the 18-slot layout.

    Momentum r rho (E + u x B), energy r rho u.E, electric field -j/eps0 and,
    with ``phm``, xi rho_c/eps0 in the phi row.
    """
    U = np.asarray(U, dtype=float)
    S = np.zeros_like(U)
    if backend == "numba" and U.ndim == 3:
        _kernels.eval_source(U, g.r_I, g.r_E, g.eps0, g.xi, phm, S)
        return S
    Bv = U[10:13]
    Ev = U[_E]
    for sl, gam, r in zip(SPECIES, g.gammas, g.ratios):
        Ua = U[sl]
        check_fluid(Ua, gam)
        rho, m = Ua[0], Ua[1:4]
        S[sl.start + 1:sl.start + 4] = r * (rho * Ev + _cross(m, Bv))
        S[sl.start + 4] = r * np.sum(m * Ev, axis=0)
    S[_E] = -current_density(U, g) / g.eps0
    if phm:
        S[PHI] = g.xi * charge_density(U, g) / g.eps0
    return S


def _rotation_block(K, Bv, coef, row):
    # K[row:row+3, row:row+3] = coef * [m x B] operator
    bx, by, bz = Bv
    K[..., row, row + 1] = coef * bz
    K[..., row, row + 2] = -coef * by
    K[..., row + 1, row] = -coef * bz
    K[..., row + 1, row + 2] = coef * bx
    K[..., row + 2, row] = coef * by
    K[..., row + 2, row + 1] = -coef * bx


def implicit_source_stage(U_base, dt_coeff, g, phm=False, backend="numpy"):
    """Solve U* = U_base + dt_coeff * s(U*) exactly, cell by cell.

    Densities and B are source-free, so the momenta and E solve a linear
    9x9 system. In the variables w_a = m_a / sqrt(rho_a), F = sqrt(eps0) E
    the coupling matrix is skew-symmetric and I - h K is always invertible.
    Energies follow from the solved momenta and field.
    """
    U_base = np.asarray(U_base, dtype=float)
    if dt_coeff < 0.0:
        raise ValueError("dt_coeff must be nonnegative")
    out = U_base.copy()
    if dt_coeff == 0.0:
        return out
    h = dt_coeff
    for sl, gam in zip(SPECIES, g.gammas):
        check_fluid(U_base[sl], gam)
    if backend == "numba":
        return _implicit_compiled(U_base, h, g, phm)

    shape = U_base.shape[1:]
    sq = [np.sqrt(U_base[0]), np.sqrt(U_base[5])]
    se = np.sqrt(g.eps0)
    A = np.zeros(shape + (9, 9))
    idx = np.arange(9)
    A[..., idx, idx] = 1.0
    Bv = U_base[10:13]
    rhs = np.empty(shape + (9,))
    for k, (sl, r) in enumerate(zip(SPECIES, g.ratios)):
        row = 3 * k
        # w - h r (w x B) - h r sqrt(rho/eps0) F = w0
        _rotation_block(A, Bv, -h * r, row)
        coup = h * r * sq[k] / se
        for d in range(3):
            A[..., row + d, 6 + d] = -coup
            A[..., 6 + d, row + d] = coup
        rhs[..., row:row + 3] = np.moveaxis(U_base[sl.start + 1:sl.start + 4] / sq[k], 0, -1)
    rhs[..., 6:9] = np.moveaxis(U_base[_E] * se, 0, -1)

    try:
        x = np.linalg.solve(A, rhs[..., None])[..., 0]
    except np.linalg.LinAlgError as err:
        raise FloatingPointError("singular implicit source system") from err
    x = np.moveaxis(x, -1, 0)

    E_new = x[6:9] / se
    out[_E] = E_new
    for k, (sl, r, gam) in enumerate(zip(SPECIES, g.ratios, g.gammas)):
        m_new = x[3 * k:3 * k + 3] * sq[k]
        out[sl.start + 1:sl.start + 4] = m_new
        out[sl.start + 4] = U_base[sl.start + 4] + h * r * np.sum(m_new * E_new, axis=0)
        check_fluid(out[sl], gam)
    if phm:
        out[PHI] = U_base[PHI] + h * g.xi * charge_density(U_base, g) / g.eps0
    return out


def implicit_inplace(U, h, g, phm=False):
    """Compiled solve of U* = U + h s(U*) overwriting the (18, nx, ny) view ``U``.

    The fluid states are not checked; callers that need the guarantee use
    ``implicit_source_stage``.
    """
    bad = _kernels.implicit_stage(U, h, g.r_I, g.r_E, g.eps0, g.xi, phm)
    if bad >= 0:
        ny = U.shape[2]
        raise FloatingPointError(f"singular implicit source system in cell {divmod(bad, ny)}")
    return U


def _implicit_compiled(U_base, h, g, phm):
    out = np.array(U_base, dtype=float, order="C")
    implicit_inplace(out.reshape(out.shape[0], -1, 1), h, g, phm)
    for sl, gam in zip(SPECIES, g.gammas):
        check_fluid(out[sl], gam)
    return out

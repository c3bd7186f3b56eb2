"""Compiled per-face and per-cell kernels.

These mirror the array implementations in ``fluid_flux`` and ``source``
one operation at a time; the array versions stay the reference and the
test-suite checks that both agree to round-off.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit

_SERIES = 1e-2  # keep in step with fluid_flux.LOGMEAN_SERIES_THRESHOLD


@njit(cache=True, inline="always")
def _minmod(a, b):
    if a * b > 0.0:
        return a if abs(a) <= abs(b) else b
    return 0.0


@njit(cache=True, inline="always")
def _log_mean(a, b):
    f = (a - b) / (a + b)
    if abs(f) < _SERIES:
        u = f * f
        return (a + b) / (2.0 * (1.0 + u * (1.0 / 3.0 + u * (1.0 / 5.0 + u * (1.0 / 7.0)))))
    return (a - b) / (2.0 * math.atanh(f))


@njit(cache=True)
def _entropy_vars(Ua, gamma, swap, V):
    # V in the rotated frame (normal velocity first); returns the flat index
    # of the first state with rho <= 0 or p <= 0 (or NaN), else -1
    M, K = Ua.shape[1], Ua.shape[2]
    n1 = 2 if swap else 1
    n2 = 1 if swap else 2
    for k in range(M):
        for c in range(K):
            rho = Ua[0, k, c]
            u = Ua[n1, k, c] / rho
            v = Ua[n2, k, c] / rho
            w = Ua[3, k, c] / rho
            q2 = u * u + v * v + w * w
            p = (gamma - 1.0) * (Ua[4, k, c] - 0.5 * rho * q2)
            if not (rho > 0.0 and p > 0.0):
                return k * K + c
            s = math.log(p) - gamma * math.log(rho)
            b = rho / (2.0 * p)
            V[0, k, c] = (gamma - s) / (gamma - 1.0) - b * q2
            V[1, k, c] = 2.0 * b * u
            V[2, k, c] = 2.0 * b * v
            V[3, k, c] = 2.0 * b * w
            V[4, k, c] = -2.0 * b
    return -1


@njit(cache=True)
def fluid_sweep(Ua, gamma, direction, order, g):
    """Entropy-stable fluxes at all faces of a sweep along axis 1.

    Returns (F, bad): bad is -1, or the flat index of an inadmissible state,
    in which case F is not computed.
    """
    M, K = Ua.shape[1], Ua.shape[2]
    n = M - 2 * g
    swap = direction == 1
    n1 = 2 if swap else 1
    n2 = 1 if swap else 2
    V = np.empty((5, M, K))
    F = np.empty((5, n + 1, K))
    bad = _entropy_vars(Ua, gamma, swap, V)
    if bad >= 0:
        return F, bad
    R = np.empty((5, 5))
    Fl = np.empty(5)
    am = np.empty(5)
    a0 = np.empty(5)
    ap = np.empty(5)
    lam = np.empty(5)
    for f in range(n + 1):
        kL = g - 1 + f
        kR = kL + 1
        for c in range(K):
            rL = Ua[0, kL, c]
            uL = Ua[n1, kL, c] / rL
            vL = Ua[n2, kL, c] / rL
            wL = Ua[3, kL, c] / rL
            pL = (gamma - 1.0) * (Ua[4, kL, c] - 0.5 * rL * (uL * uL + vL * vL + wL * wL))
            rR = Ua[0, kR, c]
            uR = Ua[n1, kR, c] / rR
            vR = Ua[n2, kR, c] / rR
            wR = Ua[3, kR, c] / rR
            pR = (gamma - 1.0) * (Ua[4, kR, c] - 0.5 * rR * (uR * uR + vR * vR + wR * wR))

            # entropy-conservative part
            bL = rL / (2.0 * pL)
            bR = rR / (2.0 * pR)
            rho_ln = _log_mean(rL, rR)
            beta_ln = _log_mean(bL, bR)
            u = 0.5 * (uL + uR)
            v = 0.5 * (vL + vR)
            w = 0.5 * (wL + wR)
            q2 = 0.5 * (uL * uL + vL * vL + wL * wL + uR * uR + vR * vR + wR * wR)
            p_hat = 0.5 * (rL + rR) / (bL + bR)
            Fl[0] = rho_ln * u
            Fl[1] = p_hat + u * Fl[0]
            Fl[2] = v * Fl[0]
            Fl[3] = w * Fl[0]
            Fl[4] = (0.5 / ((gamma - 1.0) * beta_ln) - 0.5 * q2) * Fl[0] + u * Fl[1] + v * Fl[2] + w * Fl[3]

            # scaled eigenvectors at the arithmetic-mean state
            rho = 0.5 * (rL + rR)
            p = 0.5 * (pL + pR)
            a = math.sqrt(gamma * p / rho)
            k2 = u * u + v * v + w * w
            H = a * a / (gamma - 1.0) + 0.5 * k2
            s_ac = math.sqrt(rho / (2.0 * gamma))
            s_en = math.sqrt((gamma - 1.0) * rho / gamma)
            s_sh = math.sqrt(p)
            R[0, 0] = s_ac
            R[1, 0] = (u - a) * s_ac
            R[2, 0] = v * s_ac
            R[3, 0] = w * s_ac
            R[4, 0] = (H - u * a) * s_ac
            R[0, 1] = s_en
            R[1, 1] = u * s_en
            R[2, 1] = v * s_en
            R[3, 1] = w * s_en
            R[4, 1] = 0.5 * k2 * s_en
            R[0, 2] = 0.0
            R[1, 2] = 0.0
            R[2, 2] = s_sh
            R[3, 2] = 0.0
            R[4, 2] = v * s_sh
            R[0, 3] = 0.0
            R[1, 3] = 0.0
            R[2, 3] = 0.0
            R[3, 3] = s_sh
            R[4, 3] = w * s_sh
            R[0, 4] = s_ac
            R[1, 4] = (u + a) * s_ac
            R[2, 4] = v * s_ac
            R[3, 4] = w * s_ac
            R[4, 4] = (H + u * a) * s_ac
            floor = 1e-12 * a
            lam[0] = max(abs(u - a), floor)
            lam[1] = max(abs(u), floor)
            lam[2] = lam[1]
            lam[3] = lam[1]
            lam[4] = max(abs(u + a), floor)

            # characteristic jumps of the entropy variables
            for j in range(5):
                s0 = 0.0
                sm = 0.0
                sp = 0.0
                for i in range(5):
                    s0 += R[i, j] * (V[i, kR, c] - V[i, kL, c])
                    if order == 2:
                        sm += R[i, j] * (V[i, kL, c] - V[i, kL - 1, c])
                        sp += R[i, j] * (V[i, kR + 1, c] - V[i, kR, c])
                a0[j] = s0
                am[j] = sm
                ap[j] = sp
            for j in range(5):
                jump = a0[j]
                if order == 2:
                    jump -= 0.5 * (_minmod(am[j], a0[j]) + _minmod(a0[j], ap[j]))
                a0[j] = lam[j] * jump
            for i in range(5):
                d = 0.0
                for j in range(5):
                    d += R[i, j] * a0[j]
                Fl[i] -= 0.5 * d

            F[0, f, c] = Fl[0]
            F[n1, f, c] = Fl[1]
            F[n2, f, c] = Fl[2]
            F[3, f, c] = Fl[3]
            F[4, f, c] = Fl[4]
    return F, -1


@njit(cache=True)
def _solve_inplace(A, b, n):
    # Gaussian elimination with partial pivoting; returns False if singular
    for k in range(n):
        piv = k
        big = abs(A[k, k])
        for i in range(k + 1, n):
            if abs(A[i, k]) > big:
                big = abs(A[i, k])
                piv = i
        if big == 0.0:
            return False
        if piv != k:
            for j in range(n):
                tmp = A[k, j]
                A[k, j] = A[piv, j]
                A[piv, j] = tmp
            tmp = b[k]
            b[k] = b[piv]
            b[piv] = tmp
        for i in range(k + 1, n):
            m = A[i, k] / A[k, k]
            if m != 0.0:
                for j in range(k, n):
                    A[i, j] -= m * A[k, j]
                b[i] -= m * b[k]
    for k in range(n - 1, -1, -1):
        s = b[k]
        for j in range(k + 1, n):
            s -= A[k, j] * b[j]
        b[k] = s / A[k, k]
    return True


@njit(cache=True)
def implicit_stage(U, h, r_I, r_E, eps0, xi, phm):
    """In-place exact solve of U* = U + h s(U*) on an (18, nx, ny) block.

    Returns the flat index of the first singular cell, or -1.
    """
    A = np.empty((9, 9))
    b = np.empty(9)
    se = math.sqrt(eps0)
    ny = U.shape[2]
    for ci in range(U.shape[1]):
        for cj in range(ny):
            bx = U[10, ci, cj]
            by = U[11, ci, cj]
            bz = U[12, ci, cj]
            for i in range(9):
                for j in range(9):
                    A[i, j] = 0.0
                A[i, i] = 1.0
            for s in range(2):
                base = 5 * s
                row = 3 * s
                r = r_I if s == 0 else r_E
                sq = math.sqrt(U[base, ci, cj])
                coef = -h * r
                A[row, row + 1] = coef * bz
                A[row, row + 2] = -coef * by
                A[row + 1, row] = -coef * bz
                A[row + 1, row + 2] = coef * bx
                A[row + 2, row] = coef * by
                A[row + 2, row + 1] = -coef * bx
                coup = h * r * sq / se
                for d in range(3):
                    A[row + d, 6 + d] = -coup
                    A[6 + d, row + d] = coup
                    b[row + d] = U[base + 1 + d, ci, cj] / sq
            for d in range(3):
                b[6 + d] = U[13 + d, ci, cj] * se
            if not _solve_inplace(A, b, 9):
                return ci * ny + cj
            for d in range(3):
                U[13 + d, ci, cj] = b[6 + d] / se
            for s in range(2):
                base = 5 * s
                r = r_I if s == 0 else r_E
                sq = math.sqrt(U[base, ci, cj])
                mE = 0.0
                for d in range(3):
                    m = b[3 * s + d] * sq
                    U[base + 1 + d, ci, cj] = m
                    mE += m * U[13 + d, ci, cj]
                U[base + 4, ci, cj] += h * r * mE
            if phm:
                U[17, ci, cj] += h * xi * (r_I * U[0, ci, cj] + r_E * U[5, ci, cj]) / eps0
    return -1


# ---------------------------------------------------------------- Maxwell
# EM block layout (Bx, By, Bz, Ex, Ey, Ez, psi, phi); mode codes 0 MultiD,
# 1 upwind (no cleaning), 2 PHM Rusanov.

@njit(cache=True, inline="always")
def _diag(M, k, i, j, order, which):
    # corner trace of component k at vertex (i, j); (i, j) index cell (0, 0)
    c00 = M[k, i, j]
    c10 = M[k, i + 1, j]
    c11 = M[k, i + 1, j + 1]
    c01 = M[k, i, j + 1]
    if which == 0:  # LD
        if order == 1:
            return c00
        return c00 + 0.5 * _minmod(c00 - M[k, i - 1, j - 1], c11 - c00)
    if which == 1:  # RD
        if order == 1:
            return c10
        return c10 - 0.5 * _minmod(c10 - c01, M[k, i + 2, j - 1] - c10)
    if which == 2:  # RU
        if order == 1:
            return c11
        return c11 - 0.5 * _minmod(c11 - c00, M[k, i + 2, j + 2] - c11)
    if order == 1:  # LU
        return c01
    return c01 + 0.5 * _minmod(c01 - M[k, i - 1, j + 2], c10 - c01)


@njit(cache=True)
def vertex_fields(M, c, order):
    """Ez~ and c^2 Bz~ at vertices (i+1/2, j+1/2), i, j from -1."""
    nvx = M.shape[1] - 3
    nvy = M.shape[2] - 3
    Ez = np.empty((nvx, nvy))
    c2Bz = np.empty((nvx, nvy))
    for iv in range(nvx):
        i = iv + 1
        for jv in range(nvy):
            j = jv + 1
            ezs = 0.0
            bzs = 0.0
            for w in range(4):
                ezs += _diag(M, 5, i, j, order, w)
                bzs += _diag(M, 2, i, j, order, w)
            by_r = _diag(M, 1, i, j, order, 1) + _diag(M, 1, i, j, order, 2)
            by_l = _diag(M, 1, i, j, order, 0) + _diag(M, 1, i, j, order, 3)
            bx_u = _diag(M, 0, i, j, order, 3) + _diag(M, 0, i, j, order, 2)
            bx_d = _diag(M, 0, i, j, order, 0) + _diag(M, 0, i, j, order, 1)
            ex_u = _diag(M, 3, i, j, order, 3) + _diag(M, 3, i, j, order, 2)
            ex_d = _diag(M, 3, i, j, order, 0) + _diag(M, 3, i, j, order, 1)
            ey_r = _diag(M, 4, i, j, order, 1) + _diag(M, 4, i, j, order, 2)
            ey_l = _diag(M, 4, i, j, order, 0) + _diag(M, 4, i, j, order, 3)
            Ez[iv, jv] = 0.25 * ezs + 0.25 * c * (by_r - by_l) - 0.25 * c * (bx_u - bx_d)
            c2Bz[iv, jv] = 0.25 * c * c * bzs + 0.25 * c * (ex_u - ex_d) - 0.25 * c * (ey_r - ey_l)
    return Ez, c2Bz


@njit(cache=True, inline="always")
def _phys(q, c, direction, kappa, xi, out):
    c2 = c * c
    if direction == 0:
        out[0] = kappa * q[6]
        out[1] = -q[5]
        out[2] = q[4]
        out[3] = xi * c2 * q[7]
        out[4] = c2 * q[2]
        out[5] = -c2 * q[1]
        out[6] = kappa * c2 * q[0]
        out[7] = xi * q[3]
    else:
        out[0] = q[5]
        out[1] = kappa * q[6]
        out[2] = -q[3]
        out[3] = -c2 * q[2]
        out[4] = xi * c2 * q[7]
        out[5] = c2 * q[0]
        out[6] = kappa * c2 * q[1]
        out[7] = xi * q[4]


@njit(cache=True)
def face_fluxes(M, c, kappa, xi, mode, order, direction, Ez, c2Bz):
    """EM fluxes at faces along axis 1 of ``M`` (8, n+4, K+4).

    For direction 1 the caller passes the transposed block and the
    transposed vertex arrays. Returns (8, n+1, K).
    """
    n = M.shape[1] - 4
    K = M.shape[2] - 4
    F = np.zeros((8, n + 1, K))
    qm = np.empty(8)
    qp = np.empty(8)
    fm = np.empty(8)
    fp = np.empty(8)
    s = max(c, kappa * c, xi * c)
    # transverse component indices of B and E in this direction
    bt = 1 if direction == 0 else 0
    et = 4 if direction == 0 else 3
    sgn = 1.0 if direction == 0 else -1.0
    for f in range(n + 1):
        for col in range(K):
            jj = col + 2
            for k in range(8):
                um = M[k, f, jj]
                u0 = M[k, f + 1, jj]
                u1 = M[k, f + 2, jj]
                u2 = M[k, f + 3, jj]
                if order == 2:
                    qm[k] = u0 + 0.5 * _minmod(u0 - um, u1 - u0)
                    qp[k] = u1 - 0.5 * _minmod(u1 - u0, u2 - u1)
                else:
                    qm[k] = u0
                    qp[k] = u1
            if mode == 0:
                F[bt, f, col] = -sgn * 0.5 * (Ez[f, col + 1] + Ez[f, col])
                F[et, f, col] = sgn * 0.5 * (c2Bz[f, col + 1] + c2Bz[f, col])
                # out-of-plane rows by 1D Rusanov
                F[2, f, col] = sgn * 0.5 * (qm[et] + qp[et]) - 0.5 * c * (qp[2] - qm[2])
                F[5, f, col] = -sgn * 0.5 * c * c * (qm[bt] + qp[bt]) - 0.5 * c * (qp[5] - qm[5])
            elif mode == 1:
                _phys(qm, c, direction, 0.0, 0.0, fm)
                _phys(qp, c, direction, 0.0, 0.0, fp)
                for k in range(6):
                    F[k, f, col] = 0.5 * (fm[k] + fp[k])
                for k in (bt, 2, et, 5):
                    F[k, f, col] -= 0.5 * c * (qp[k] - qm[k])
            else:
                _phys(qm, c, direction, kappa, xi, fm)
                _phys(qp, c, direction, kappa, xi, fp)
                for k in range(8):
                    F[k, f, col] = 0.5 * (fm[k] + fp[k]) - 0.5 * s * (qp[k] - qm[k])
    return F


# ---------------------------------------------------------------- ghosts
# boundary codes: 0 periodic, 1 outflow, 2 wall

@njit(cache=True, inline="always")
def _source_index(k, n, kind):
    # interior index feeding ghost index k (k < 0 or k >= n)
    if kind == 0:
        return k % n
    if kind == 1:
        return 0 if k < 0 else n - 1
    return -1 - k if k < 0 else 2 * n - 1 - k


@njit(cache=True)
def fill_ghosts(U, nx, ny, g, kind_x, kind_y, signs):
    nv = U.shape[0]
    src = np.empty(2 * g, dtype=np.int64)
    dst = np.empty(2 * g, dtype=np.int64)
    for q in range(g):
        dst[q] = q
        src[q] = _source_index(q - g, nx, kind_x) + g
        dst[g + q] = nx + g + q
        src[g + q] = _source_index(nx + q, nx, kind_x) + g
    flip = kind_x == 2
    for v in range(nv):
        s = signs[v] if flip else 1.0
        for q in range(2 * g):
            for j in range(g, ny + g):
                U[v, dst[q], j] = s * U[v, src[q], j]
    for q in range(g):
        src[q] = _source_index(q - g, ny, kind_y) + g
        dst[g + q] = ny + g + q
        src[g + q] = _source_index(ny + q, ny, kind_y) + g
    flip = kind_y == 2
    for v in range(nv):
        s = signs[v] if flip else 1.0
        for i in range(nx + 2 * g):
            for q in range(2 * g):
                U[v, i, dst[q]] = s * U[v, i, src[q]]


# ---------------------------------------------------------------- sources

@njit(cache=True)
def eval_source(U, r_I, r_E, eps0, xi, phm, S):
    """Explicit source s(U) of an (18, nx, ny) block into ``S``."""
    for i in range(U.shape[1]):
        for j in range(U.shape[2]):
            bx = U[10, i, j]
            by = U[11, i, j]
            bz = U[12, i, j]
            ex = U[13, i, j]
            ey = U[14, i, j]
            ez = U[15, i, j]
            jx = 0.0
            jy = 0.0
            jz = 0.0
            for sp in range(2):
                base = 5 * sp
                r = r_I if sp == 0 else r_E
                rho = U[base, i, j]
                mx = U[base + 1, i, j]
                my = U[base + 2, i, j]
                mz = U[base + 3, i, j]
                S[base, i, j] = 0.0
                S[base + 1, i, j] = r * (rho * ex + (my * bz - mz * by))
                S[base + 2, i, j] = r * (rho * ey + (mz * bx - mx * bz))
                S[base + 3, i, j] = r * (rho * ez + (mx * by - my * bx))
                S[base + 4, i, j] = r * (mx * ex + my * ey + mz * ez)
                jx += r * mx
                jy += r * my
                jz += r * mz
            for k in range(10, 13):
                S[k, i, j] = 0.0
            S[13, i, j] = -jx / eps0
            S[14, i, j] = -jy / eps0
            S[15, i, j] = -jz / eps0
            S[16, i, j] = 0.0
            S[17, i, j] = xi * (r_I * U[0, i, j] + r_E * U[5, i, j]) / eps0 if phm else 0.0

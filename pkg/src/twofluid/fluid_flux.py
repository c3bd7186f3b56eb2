"""Entropy-conservative and entropy-stable fluxes for one Euler species.

Species blocks are ``(rho, mx, my, mz, ener)`` with components on the
leading axis. ``direction`` is 0 for x-faces and 1 for y-faces.

The second-order flux reconstructs entropy variables in the scaled
characteristic basis ``W = R^T V`` with MinMod, which keeps the sign of
every characteristic jump and therefore the entropy inequality.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .limiters import minmod
from .state import check_fluid, entropy_vars

_SWAP = [0, 2, 1, 3, 4]

# below this |(a-b)/(a+b)| the log mean uses its series; truncation ~ f^8/9
LOGMEAN_SERIES_THRESHOLD = 1e-2


def log_mean(a, b):
    """Logarithmic mean (a - b)/(log a - log b) of positive numbers.

    Written as (a - b) / (2 atanh(f)), f = (a - b)/(a + b), which is well
    conditioned away from f = 0; for small f the Ismail-Roe series
    (a + b) / (2 (1 + f^2/3 + f^4/5 + f^6/7)) takes over.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(~(a > 0.0)) or np.any(~(b > 0.0)):
        raise ValueError("log_mean needs strictly positive arguments")
    f = (a - b) / (a + b)
    u = f * f
    small = np.abs(f) < LOGMEAN_SERIES_THRESHOLD
    series = (a + b) / (2.0 * (1.0 + u * (1.0 / 3.0 + u * (1.0 / 5.0 + u * (1.0 / 7.0)))))
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = (a - b) / (2.0 * np.arctanh(f))
    return np.where(small, series, direct)


def _rotate(Ua, direction):
    return Ua[_SWAP] if direction == 1 else Ua


def _prims(Ua, gamma):
    p = check_fluid(Ua, gamma)
    rho = Ua[0]
    return rho, Ua[1] / rho, Ua[2] / rho, Ua[3] / rho, p


def ec_flux(UL, UR, gamma, direction=0):
    """Kinetic-energy preserving, entropy-conservative two-point flux.

    Uses arithmetic means of velocity and rho, logarithmic means of rho and
    beta = rho / (2 p); satisfies [V] . F = [rho u_n] exactly.
    """
    UL = _rotate(np.asarray(UL, dtype=float), direction)
    UR = _rotate(np.asarray(UR, dtype=float), direction)
    rL, uL, vL, wL, pL = _prims(UL, gamma)
    rR, uR, vR, wR, pR = _prims(UR, gamma)
    bL = rL / (2.0 * pL)
    bR = rR / (2.0 * pR)
    rho_ln = log_mean(rL, rR)
    beta_ln = log_mean(bL, bR)
    rho_avg = 0.5 * (rL + rR)
    beta_avg = 0.5 * (bL + bR)
    u = 0.5 * (uL + uR)
    v = 0.5 * (vL + vR)
    w = 0.5 * (wL + wR)
    q2 = 0.5 * (uL**2 + vL**2 + wL**2 + uR**2 + vR**2 + wR**2)
    p_hat = rho_avg / (2.0 * beta_avg)

    F = np.empty(np.broadcast(UL, UR).shape)
    F[0] = rho_ln * u
    F[1] = p_hat + u * F[0]
    F[2] = v * F[0]
    F[3] = w * F[0]
    F[4] = (0.5 / ((gamma - 1.0) * beta_ln) - 0.5 * q2) * F[0] + u * F[1] + v * F[2] + w * F[3]
    return _rotate(F, direction)


@dataclass
class EigenSystem:
    """Entropy-scaled right eigenvectors and absolute wave speeds.

    ``R[row, col]`` maps characteristic ``col`` to conserved ``row``;
    ``lam`` holds |u-a|, |u|, |u|, |u|, |u+a| (with a tiny floor).
    """

    R: np.ndarray
    lam: np.ndarray

    def diffusion(self):
        """D = R diag(lam) R^T."""
        return np.einsum("ik...,k...,jk...->ij...", self.R, self.lam, self.R)


def average_state(UL, UR, gamma, average="arithmetic"):
    """Face state (rho, u, v, w, p) at which the diffusion matrix is evaluated."""
    if average != "arithmetic":
        raise ValueError(f"unknown averaging {average!r}")
    L = _prims(UL, gamma)
    R = _prims(UR, gamma)
    return tuple(0.5 * (a + b) for a, b in zip(L, R))


def eigen_system(UL, UR, gamma, direction=0, average="arithmetic"):
    """Scaled eigen-decomposition of the flux Jacobian at the face average.

    With Barth's scaling R~ = R S^(1/2), S = diag(rho/(2g), (g-1)rho/g, p, p,
    rho/(2g)), one has R~ R~^T = dU/dV.
    """
    UL = _rotate(np.asarray(UL, dtype=float), direction)
    UR = _rotate(np.asarray(UR, dtype=float), direction)
    rho, u, v, w, p = average_state(UL, UR, gamma, average)
    a = np.sqrt(gamma * p / rho)
    H = a * a / (gamma - 1.0) + 0.5 * (u * u + v * v + w * w)
    zero = np.zeros_like(rho)
    one = np.ones_like(rho)

    s_ac = np.sqrt(rho / (2.0 * gamma))
    s_en = np.sqrt((gamma - 1.0) * rho / gamma)
    s_sh = np.sqrt(p)
    cols = [
        [one, u - a, v, w, H - u * a],
        [one, u, v, w, 0.5 * (u * u + v * v + w * w)],
        [zero, zero, one, zero, v],
        [zero, zero, zero, one, w],
        [one, u + a, v, w, H + u * a],
    ]
    scale = [s_ac, s_en, s_sh, s_sh, s_ac]
    R = np.empty((5, 5) + rho.shape)
    for k in range(5):
        for row in range(5):
            R[row, k] = cols[k][row] * scale[k]
    floor = 1e-12 * a
    lam = np.stack([np.abs(u - a), np.abs(u), np.abs(u), np.abs(u), np.abs(u + a)])
    lam = np.maximum(lam, floor)
    if direction == 1:
        R = R[_SWAP]
    return EigenSystem(R, lam)


def _project(R, x):
    """R^T x for stacked matrices."""
    return np.einsum("ij...,i...->j...", R, x)


def _apply(R, x):
    return np.einsum("ij...,j...->i...", R, x)


def scaled_minmod_traces(Um, U0, Up, eig_left, eig_right, gamma):
    """Left/right face traces of cell ``U0`` in entropy variables.

    ``eig_left`` belongs to the face between ``Um`` and ``U0``,
    ``eig_right`` to the face between ``U0`` and ``Up``. Each trace is a
    MinMod-limited linear reconstruction of W = R^T V using that face's
    eigenvectors, mapped back through (R^T)^-1.
    """
    Vm, V0, Vp = (entropy_vars(np.asarray(x, float), gamma) for x in (Um, U0, Up))
    traces = []
    for eig, sign in ((eig_left, -1.0), (eig_right, 1.0)):
        Wm, W0, Wp = (_project(eig.R, x) for x in (Vm, V0, Vp))
        Wt = W0 + sign * 0.5 * minmod(W0 - Wm, Wp - W0)
        RT = np.moveaxis(np.swapaxes(eig.R, 0, 1), (0, 1), (-2, -1))
        try:
            Vt = np.linalg.solve(RT, np.moveaxis(Wt, 0, -1)[..., None])[..., 0]
        except np.linalg.LinAlgError as err:
            raise FloatingPointError("singular eigenvector matrix") from err
        traces.append(np.moveaxis(Vt, -1, 0))
    return traces[0], traces[1]


def es_flux(Um, UL, UR, Up, gamma, direction=0, order=2):
    """Entropy-stable flux at the face between ``UL`` and ``UR``.

    F = F_ec - 1/2 D [[V~]], where [[V~]] is the jump of the reconstructed
    entropy variables; with ``order=1`` the plain jump [V] is used.
    """
    Um, UL, UR, Up = (np.asarray(x, dtype=float) for x in (Um, UL, UR, Up))
    F = ec_flux(UL, UR, gamma, direction)
    eig = eigen_system(UL, UR, gamma, direction)
    Vm, VL, VR, Vp = (entropy_vars(x, gamma) for x in (Um, UL, UR, Up))
    jump = _characteristic_jump(eig.R, VL - Vm, VR - VL, Vp - VR, order)
    return F - 0.5 * _apply(eig.R, eig.lam * jump)


def _characteristic_jump(R, dV_left, dV_mid, dV_right, order):
    """[[W~]] = W~(right trace) - W~(left trace) at a face.

    Since both traces use the same R, the diffusion D [[V~]] equals
    R Lambda [[W~]] and no inverse is needed.
    """
    a0 = _project(R, dV_mid)
    if order == 1:
        return a0
    am = _project(R, dV_left)
    ap = _project(R, dV_right)
    return a0 - 0.5 * (minmod(am, a0) + minmod(a0, ap))


def sweep_fluxes(Ua, gamma, direction, order=2, nghost=2):
    """Fluxes at every face of a sweep.

    ``Ua`` has shape (5, M, K) with the sweep along axis 1 and ``nghost``
    ghost cells at each end. Returns (5, M - 2*nghost + 1, K): the faces
    from the left boundary to the right boundary of the interior.
    """
    g = nghost
    n = Ua.shape[1] - 2 * g
    V = entropy_vars(Ua, gamma)
    dV = V[:, 1:] - V[:, :-1]  # dV[:, k] is the jump across face k+1/2
    k0, k1 = g - 1, g + n  # faces k+1/2 for k in [g-1, g+n-1]
    UL = Ua[:, k0:k1]
    UR = Ua[:, k0 + 1:k1 + 1]
    F = ec_flux(UL, UR, gamma, direction)
    eig = eigen_system(UL, UR, gamma, direction)
    jump = _characteristic_jump(eig.R, dV[:, k0 - 1:k1 - 1], dV[:, k0:k1], dV[:, k0 + 1:k1 + 1], order)
    return F - 0.5 * _apply(eig.R, eig.lam * jump)

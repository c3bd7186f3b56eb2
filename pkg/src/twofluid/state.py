"""Conserved/primitive layouts, ideal-gas closure and entropy variables.

Every array carries its components on the leading axis, so the same
functions accept a single state (shape ``(18,)``) or a whole field
(shape ``(18, nx, ny)``).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

NVAR = 18

# species blocks: (rho, mx, my, mz, ener)
ION = slice(0, 5)
ELC = slice(5, 10)
SPECIES = (ION, ELC)

BX, BY, BZ = 10, 11, 12
EX, EY, EZ = 13, 14, 15
PSI, PHI = 16, 17
B = slice(10, 13)
E = slice(13, 16)
EM = slice(10, 18)

NAMES = (
    "rho_I", "mx_I", "my_I", "mz_I", "ener_I",
    "rho_E", "mx_E", "my_E", "mz_E", "ener_E",
    "Bx", "By", "Bz", "Ex", "Ey", "Ez", "psi", "phi",
)


class AdmissibilityError(ValueError):
    """Raised when a state leaves the set rho > 0, p > 0."""

    def __init__(self, message, cell=None, time=None):
        super().__init__(message)
        self.cell = cell
        self.time = time


@dataclass(frozen=True)
class GasParams:
    """Physical constants in code units.

    ``r_I``/``r_E`` are charge-to-mass ratios, ``kappa``/``xi`` the
    cleaning speeds (in units of ``c``) used only by the PHM Maxwell mode.
    """

    gamma_I: float = 5.0 / 3.0
    gamma_E: float = 5.0 / 3.0
    r_I: float = 1.0
    r_E: float = -1.0
    c: float = 1.0
    eps0: float = 1.0
    kappa: float = 1.0
    xi: float = 1.0

    def __post_init__(self):
        if self.gamma_I <= 1.0 or self.gamma_E <= 1.0:
            raise ValueError("adiabatic indices must exceed 1")
        if self.c <= 0.0 or self.eps0 <= 0.0:
            raise ValueError("c and eps0 must be positive")

    @property
    def mu0(self) -> float:
        return 1.0 / (self.c**2 * self.eps0)

    @property
    def gammas(self) -> tuple[float, float]:
        return (self.gamma_I, self.gamma_E)

    @property
    def ratios(self) -> tuple[float, float]:
        return (self.r_I, self.r_E)


def _first_bad(mask: np.ndarray):
    if mask.ndim == 0:
        return None
    idx = np.argwhere(mask)
    return tuple(int(k) for k in idx[0]) if len(idx) else None


def fluid_pressure(Ua: np.ndarray, gamma: float) -> np.ndarray:
    """Pressure of one species block ``(rho, mx, my, mz, ener)``."""
    rho = Ua[0]
    kin = 0.5 * (Ua[1] ** 2 + Ua[2] ** 2 + Ua[3] ** 2) / rho
    return (gamma - 1.0) * (Ua[4] - kin)


def check_fluid(Ua: np.ndarray, gamma: float, label: str = "") -> np.ndarray:
    """Return the pressure, raising AdmissibilityError outside rho>0, p>0."""
    rho = Ua[0]
    bad = ~(rho > 0.0)
    if np.any(bad):
        raise AdmissibilityError(
            f"nonpositive density{label} at cell {_first_bad(bad)}", cell=_first_bad(bad)
        )
    p = fluid_pressure(Ua, gamma)
    bad = ~(p > 0.0)
    if np.any(bad):
        raise AdmissibilityError(
            f"nonpositive pressure{label} at cell {_first_bad(bad)}", cell=_first_bad(bad)
        )
    return p


def fluid_prim(Ua: np.ndarray, gamma: float) -> np.ndarray:
    """Species conserved block -> (rho, ux, uy, uz, p)."""
    p = check_fluid(Ua, gamma)
    W = np.empty_like(Ua)
    W[0] = Ua[0]
    W[1:4] = Ua[1:4] / Ua[0]
    W[4] = p
    return W


def fluid_cons(Wa: np.ndarray, gamma: float) -> np.ndarray:
    """Species primitive block (rho, ux, uy, uz, p) -> conserved block."""
    rho, p = Wa[0], Wa[4]
    if np.any(~(rho > 0.0)) or np.any(~(p > 0.0)):
        raise AdmissibilityError("nonpositive density or pressure in primitive state")
    U = np.empty_like(Wa)
    U[0] = rho
    U[1:4] = rho * Wa[1:4]
    U[4] = p / (gamma - 1.0) + 0.5 * rho * (Wa[1] ** 2 + Wa[2] ** 2 + Wa[3] ** 2)
    return U


def prim_to_cons(W: np.ndarray, g: GasParams) -> np.ndarray:
    """Full 18-slot primitive -> conserved. Electromagnetic slots are copied."""
    W = np.asarray(W, dtype=float)
    U = np.empty_like(W)
    for sl, gam in zip(SPECIES, g.gammas):
        U[sl] = fluid_cons(W[sl], gam)
    U[EM] = W[EM]
    return U


def cons_to_prim(U: np.ndarray, g: GasParams) -> np.ndarray:
    """Full 18-slot conserved -> primitive (rho, u, p per species; B, E, psi, phi)."""
    U = np.asarray(U, dtype=float)
    W = np.empty_like(U)
    for sl, gam, name in zip(SPECIES, g.gammas, ("ion", "electron")):
        try:
            W[sl] = fluid_prim(U[sl], gam)
        except AdmissibilityError as err:
            raise AdmissibilityError(f"{name}: {err}", cell=err.cell) from None
    W[EM] = U[EM]
    return W


def sound_speed(Wa: np.ndarray, gamma: float) -> np.ndarray:
    return np.sqrt(gamma * Wa[4] / Wa[0])


def physical_entropy(rho, p, gamma):
    """s = log p - gamma log rho."""
    return np.log(p) - gamma * np.log(rho)


def entropy(Ua: np.ndarray, gamma: float) -> np.ndarray:
    """Mathematical entropy e = -rho s / (gamma - 1) of one species."""
    p = check_fluid(Ua, gamma)
    return -Ua[0] * physical_entropy(Ua[0], p, gamma) / (gamma - 1.0)


def entropy_vars(Ua: np.ndarray, gamma: float) -> np.ndarray:
    """Entropy variables V = de/dU of one species.

    With b = rho / (2p):
    V = ((gamma - s)/(gamma - 1) - b|u|^2, 2b u, -2b).
    """
    p = check_fluid(Ua, gamma)
    rho = Ua[0]
    u = Ua[1:4] / rho
    s = physical_entropy(rho, p, gamma)
    b = rho / (2.0 * p)
    V = np.empty_like(Ua, dtype=float)
    V[0] = (gamma - s) / (gamma - 1.0) - b * (u[0] ** 2 + u[1] ** 2 + u[2] ** 2)
    V[1:4] = 2.0 * b * u
    V[4] = -2.0 * b
    return V


def euler_flux(Ua: np.ndarray, gamma: float, direction: int) -> np.ndarray:
    """Physical flux of one species in x (direction=0) or y (direction=1)."""
    p = check_fluid(Ua, gamma)
    un = Ua[1 + direction] / Ua[0]
    F = un * Ua
    F[1 + direction] += p
    F[4] += un * p
    return F


def entropy_flux(Ua: np.ndarray, gamma: float, direction: int) -> np.ndarray:
    """q = e u_dir."""
    return entropy(Ua, gamma) * Ua[1 + direction] / Ua[0]


def entropy_potential(Ua: np.ndarray, gamma: float, direction: int) -> np.ndarray:
    """chi = V . f - q, which for the ideal gas reduces to rho u_dir."""
    check_fluid(Ua, gamma)
    return np.asarray(Ua[1 + direction], dtype=float).copy()

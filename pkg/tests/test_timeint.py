import math

import numpy as np
import pytest

from twofluid import problems
from twofluid.grid import Grid2D, fill_ghosts
from twofluid.source import eval_source
from twofluid.state import GasParams, fluid_cons, prim_to_cons
from twofluid.timeint import (
    IMEX_BETA,
    Discretization,
    SchemeConfig,
    compute_dt,
    residual,
    step,
)

from .conftest import GAMMA, random_state

LINEAR = [1, 2, 3, 6, 7, 8, 13, 14, 15]


def _uniform(grid, q):
    U = grid.allocate()
    U[...] = q[:, None, None]
    return U


def _rest_state(a=1.0):
    q = np.zeros(18)
    for base in (0, 5):
        q[base:base + 5] = fluid_cons(np.array([1.0, 0, 0, 0, a * a / GAMMA]), GAMMA)
    return q


def _smooth_field(grid, rng, amp=0.2):
    x, y = grid.meshgrid()
    kx = 2 * np.pi / (grid.xmax - grid.xmin)
    ky = 2 * np.pi / (grid.ymax - grid.ymin)
    U = grid.allocate()
    I = grid.interior(U)
    ph = rng.uniform(0, 2 * np.pi, 18)
    wave = lambda k: np.sin(kx * x + ph[k]) * np.cos(ky * y + 2 * ph[k])  # noqa: E731
    for base in (0, 5):
        W = np.stack([1.0 + amp * wave(base), amp * wave(base + 1), amp * wave(base + 2),
                      amp * wave(base + 3), 1.0 + amp * wave(base + 4)])
        I[base:base + 5] = fluid_cons(W, GAMMA)
    for k in range(10, 18):
        I[k] = amp * wave(k)
    return fill_ghosts(U, grid)


# ---------------------------------------------------------------- dt

def test_compute_dt_example():
    gas = GasParams(r_I=1, r_E=-1, c=10.0, eps0=0.01)
    grid = Grid2D(10, 10)
    U = _uniform(grid, _rest_state())
    assert compute_dt(U, grid, gas, 0.45) == pytest.approx(2.25e-3, rel=1e-14)
    grid1 = Grid2D(10, 1)
    assert compute_dt(_uniform(grid1, _rest_state()), grid1, gas, 0.45) == pytest.approx(4.5e-3)


def test_compute_dt_monotone_in_c(rng):
    grid = Grid2D(8, 8)
    U = _smooth_field(grid, rng)
    dts = [compute_dt(U, grid, GasParams(c=c, eps0=1 / c**2), 0.3) for c in (0.1, 1, 3, 10, 30)]
    assert all(a >= b for a, b in zip(dts, dts[1:]))


def test_compute_dt_phm_speed():
    grid = Grid2D(10, 10)
    U = _uniform(grid, _rest_state(0.01))
    gas = GasParams(c=1.0, kappa=2.0, xi=0.5)
    assert compute_dt(U, grid, gas, 0.4, "phm") == pytest.approx(0.5 * compute_dt(U, grid, gas, 0.4))


def test_scheme_validation():
    with pytest.raises(ValueError):
        SchemeConfig(cfl=1.2)
    with pytest.raises(ValueError):
        SchemeConfig(order=3)
    assert SchemeConfig(integrator="rk2").cfl == 0.2
    assert SchemeConfig(integrator="imex").cfl == 0.45


# ---------------------------------------------------------------- residual

@pytest.mark.parametrize("mode", ["multid", "none", "phm"])
@pytest.mark.parametrize("backend", ["numpy", "numba"])
def test_free_stream(rng, mode, backend):
    grid = Grid2D(6, 5, bc_x="outflow", bc_y="wall")
    q = random_state(rng, 1)[:, 0]
    q[[2, 7, 11, 13, 15]] = 0.0  # wall-compatible
    U = _uniform(grid, q)
    L = residual(U, grid, GasParams(c=2.0, eps0=0.25), SchemeConfig(mode=mode, backend=backend))
    assert np.max(np.abs(L)) <= 1e-13 * max(1.0, np.max(np.abs(q)))


@pytest.mark.parametrize("mode", ["multid", "none", "phm"])
def test_residual_telescopes(rng, mode):
    grid = Grid2D(9, 7)
    U = grid.allocate()
    grid.interior(U)[...] = random_state(rng, 63).reshape(18, 9, 7)
    fill_ghosts(U, grid)
    L = residual(U, grid, GasParams(c=1.5, eps0=0.4), SchemeConfig(mode=mode))
    totals = np.abs(L.sum(axis=(1, 2)))
    scale = np.abs(L).sum(axis=(1, 2)) + 1e-300
    assert np.all(totals <= 1e-12 * scale + 1e-13)


def _exact_rate(spec, x, t, delta=1e-5):
    U = lambda s: prim_to_cons(problems.exact_solution(spec, x, s), spec.gas)  # noqa: E731
    return (U(t + delta) - U(t - delta)) / (2 * delta)


def test_residual_second_order_on_accuracy_data():
    spec = problems.accuracy1d()
    errs = []
    for n in (128, 256):
        grid = spec.make_grid(n, 1)
        U = problems.init(spec, grid)
        rate = residual(U, grid, spec.gas, SchemeConfig(), 0.0, problems.forcing(spec))
        rate += eval_source(grid.interior(U), spec.gas)
        exact = _exact_rate(spec, grid.meshgrid()[0], 0.0)
        errs.append(np.mean(np.abs(rate - exact), axis=(1, 2)))
    active = errs[0] > 1e-9
    assert active[[0, 1, 4, 5, 6, 9, 11, 15]].all()
    assert np.all(np.log2(errs[0][active] / errs[1][active]) >= 1.9)


# ---------------------------------------------------------------- steppers

def _source_matrix(q, gas):
    base = q.copy()
    base[LINEAR] = 0.0
    s0 = eval_source(base, gas)[LINEAR]
    K = np.empty((9, 9))
    for k, idx in enumerate(LINEAR):
        probe = base.copy()
        probe[idx] = 1.0
        K[:, k] = eval_source(probe, gas)[LINEAR] - s0
    return K


@pytest.mark.parametrize("integrator,coeffs", [("rk2", [1, 1, 1 / 2]), ("rk3", [1, 1, 1 / 2, 1 / 6])])
def test_stability_polynomial(integrator, coeffs):
    gas = GasParams(r_I=1.3, r_E=-2.1, c=1.0, eps0=1.0)
    grid = Grid2D(4, 4)
    q = _rest_state()
    q[[1, 7, 13]] = 0.3, -0.2, 0.1
    q[4] += 1.0
    q[9] += 1.0
    q[10:13] = 0.4, -0.5, 0.8
    U = _uniform(grid, q)
    dt = 0.05
    new = step(U, 0.0, dt, Discretization(grid, gas, SchemeConfig(integrator=integrator))).U
    Z = dt * _source_matrix(q, gas)
    P = sum(c * np.linalg.matrix_power(Z, k) for k, c in enumerate(coeffs))
    np.testing.assert_allclose(grid.interior(new)[LINEAR, 0, 0], P @ q[LINEAR], rtol=1e-13, atol=1e-14)


def test_zero_operator_keeps_state(rng):
    gas = GasParams(r_I=0.0, r_E=0.0)
    grid = Grid2D(5, 5)
    U = _uniform(grid, random_state(rng, 1)[:, 0])
    for integ in ("rk2", "rk3", "imex"):
        new = step(U, 0.0, 0.1, Discretization(grid, gas, SchemeConfig(integrator=integ))).U
        np.testing.assert_allclose(new, U, rtol=1e-13, atol=1e-14)


def test_imex_without_sources_is_heun(rng):
    gas = GasParams(r_I=0.0, r_E=0.0, c=1.2, eps0=1 / 1.44)
    grid = Grid2D(8, 6)
    U = _smooth_field(grid, rng)
    scheme = SchemeConfig(integrator="imex")
    dt = 0.01
    new = step(U, 0.0, dt, Discretization(grid, gas, scheme)).U
    L1 = residual(U, grid, gas, scheme)
    U2 = grid.with_ghosts(grid.interior(U) + dt * L1)
    L2 = residual(U2, grid, gas, scheme)
    ref = grid.interior(U) + 0.5 * dt * (L1 + L2)
    np.testing.assert_allclose(grid.interior(new), ref, rtol=1e-14, atol=1e-14)


def _scaled_norm(q, gas):
    w = np.concatenate([q[1:4] / np.sqrt(q[0]), q[6:9] / np.sqrt(q[5]), q[13:16] * np.sqrt(gas.eps0)])
    return np.linalg.norm(w)


def test_imex_bounded_for_stiff_sources():
    gas = GasParams(r_I=1e8, r_E=-1e8, c=1.0, eps0=1.0)
    grid = Grid2D(3, 3)
    q = _rest_state()
    q[1], q[4] = 0.5, q[4] + 0.125
    q[14] = 0.3
    q[12] = 1.0
    q[4] += 10.0
    q[9] += 10.0
    U = _uniform(grid, q)
    new = step(U, 0.0, 1.0, Discretization(grid, gas, SchemeConfig(integrator="imex"))).U
    after = grid.interior(new)[:, 0, 0]
    assert np.all(np.isfinite(after))
    assert _scaled_norm(after, gas) <= _scaled_norm(q, gas) * (1 + 1e-12)
    assert abs(IMEX_BETA - (1 - 1 / math.sqrt(2))) < 1e-16


@pytest.mark.parametrize("integrator", ["rk2", "rk3", "imex"])
def test_mass_conserved_and_momentum_balance(rng, integrator):
    gas = GasParams(r_I=0.7, r_E=-1.1, c=1.5, eps0=1 / 2.25)
    grid = Grid2D(10, 8)
    U = _smooth_field(grid, rng)
    disc = Discretization(grid, gas, SchemeConfig(integrator=integrator))
    res = step(U, 0.0, 0.01, disc)
    I0, I1 = grid.interior(U), grid.interior(res.U)
    for k in (0, 5):
        assert abs(I1[k].sum() - I0[k].sum()) <= 1e-13 * I0[k].sum()
    if integrator == "rk2":
        S = sum(w * eval_source(grid.interior(V), gas) for w, V in zip(res.weights, res.stages))
        dm = I1[[1, 2, 3, 6, 7, 8]].sum(axis=(1, 2)) - I0[[1, 2, 3, 6, 7, 8]].sum(axis=(1, 2))
        np.testing.assert_allclose(dm, 0.01 * S[[1, 2, 3, 6, 7, 8]].sum(axis=(1, 2)), atol=1e-12)


def test_step_does_not_modify_input(rng):
    grid = Grid2D(6, 6)
    U = _smooth_field(grid, rng)
    before = U.copy()
    step(U, 0.0, 0.01, Discretization(grid, GasParams(), SchemeConfig()))
    np.testing.assert_array_equal(U, before)


@pytest.mark.parametrize("integrator", ["rk2", "rk3", "imex"])
def test_backends_agree_over_steps(rng, integrator):
    spec = problems.orszag_tang()
    grid = spec.make_grid(16, 16)
    U = problems.init(spec, grid)
    out = {}
    for backend in ("numpy", "numba"):
        V = U
        disc = Discretization(grid, spec.gas, SchemeConfig(integrator=integrator, backend=backend))
        for _ in range(3):
            V = step(V, 0.0, 0.01, disc).U
        out[backend] = V
    np.testing.assert_allclose(out["numba"], out["numpy"], rtol=1e-11, atol=1e-11)

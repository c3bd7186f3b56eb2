import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from twofluid.grid import Grid2D, fill_ghosts
from twofluid.limiters import minmod
from twofluid.maxwell_flux import (
    LBX,
    LBY,
    LBZ,
    LEX,
    LEY,
    LEZ,
    Mode,
    diag_traces,
    face_traces,
    maxwell_fluxes,
    physical_flux,
    rusanov_face_components,
    vertex_solve,
)
from twofluid.state import EM, GasParams
from twofluid.timeint import SchemeConfig, residual

from .conftest import random_state


def _field(rng, grid, gas_like=None):
    U = grid.allocate()
    I = grid.interior(U)
    I[...] = random_state(rng, grid.nx * grid.ny).reshape(18, grid.nx, grid.ny)
    I[16:18] = 0.1 * rng.standard_normal((2, grid.nx, grid.ny))
    return fill_ghosts(U, grid)


def test_minmod_values():
    assert minmod(1.0, 2.0) == 1.0
    assert minmod(-1.0, 2.0) == 0.0
    assert minmod(-3.0, -2.0) == -2.0
    assert minmod(2.0, 2.0) == 2.0


def test_uniform_traces():
    M = np.ones((8, 4, 4)) * np.arange(1, 9)[:, None, None]
    for tr in diag_traces(M, 2):
        np.testing.assert_array_equal(tr[:, 0, 0], np.arange(1, 9))


def test_linear_diagonal_traces():
    # f = i + j: LD and RU reach the vertex value exactly
    i, j = np.meshgrid(np.arange(4.0), np.arange(4.0), indexing="ij")
    M = np.broadcast_to(i + j, (8, 4, 4)).copy()
    LD, RD, RU, LU = diag_traces(M, 2)
    vertex = 1.5 + 1.5  # cell (1, 1) to (2, 2) meet at (1.5, 1.5)
    assert LD[0, 0, 0] == vertex and RU[0, 0, 0] == vertex


def test_vertex_solve_consistency():
    q = np.arange(1.0, 9.0)
    v = vertex_solve(q, q, q, q, c=3.0)
    assert v.Ez == pytest.approx(q[LEZ])
    assert v.Bz == pytest.approx(q[LBZ])


def test_vertex_solve_by_jump():
    left, right = np.zeros(8), np.zeros(8)
    right[LBY] = 1.0
    c = 2.5
    v = vertex_solve(left, right, right, left, c)
    assert v.Ez == pytest.approx(c / 2)


def _first_order_vertex(M, c):
    # cell-average formulas written out with explicit cell indices
    nvx, nvy = M.shape[1] - 3, M.shape[2] - 3
    Ez = np.empty((nvx, nvy))
    c2Bz = np.empty((nvx, nvy))
    for a in range(nvx):
        for b in range(nvy):
            i, j = a + 1, b + 1
            q00, q10, q11, q01 = M[:, i, j], M[:, i + 1, j], M[:, i + 1, j + 1], M[:, i, j + 1]
            Ez[a, b] = (0.25 * (q00[LEZ] + q10[LEZ] + q11[LEZ] + q01[LEZ])
                        + 0.25 * c * (q10[LBY] + q11[LBY] - q00[LBY] - q01[LBY])
                        - 0.25 * c * (q01[LBX] + q11[LBX] - q00[LBX] - q10[LBX]))
            c2Bz[a, b] = (0.25 * c * c * (q00[LBZ] + q10[LBZ] + q11[LBZ] + q01[LBZ])
                          + 0.25 * c * (q01[LEX] + q11[LEX] - q00[LEX] - q10[LEX])
                          - 0.25 * c * (q10[LEY] + q11[LEY] - q00[LEY] - q01[LEY]))
    return Ez, c2Bz


def test_first_order_vertex_matches_cell_average_formulas(rng):
    M = rng.standard_normal((8, 9, 8))
    v = vertex_solve(*diag_traces(M, 1), 1.7)
    Ez, c2Bz = _first_order_vertex(M, 1.7)
    np.testing.assert_allclose(v.Ez, Ez, rtol=1e-14, atol=1e-14)
    np.testing.assert_allclose(v.c2Bz, c2Bz, rtol=1e-14, atol=1e-14)


def test_viscosity_form(rng):
    # E~ = mu_x mu_y Ez + nu (delta_x mu_y By - delta_y mu_x Bx), nu = c h / 2
    h, c = 0.1, 1.3
    M = rng.standard_normal((8, 6, 6))
    v = vertex_solve(*diag_traces(M, 1), c)
    q = M[:, 1:4, 1:4]
    avg = lambda f: 0.25 * (f[:-1, :-1] + f[1:, :-1] + f[1:, 1:] + f[:-1, 1:])  # noqa: E731
    dx_my = lambda f: 0.5 * (f[1:, :-1] + f[1:, 1:] - f[:-1, :-1] - f[:-1, 1:]) / h  # noqa: E731
    dy_mx = lambda f: 0.5 * (f[:-1, 1:] + f[1:, 1:] - f[:-1, :-1] - f[1:, :-1]) / h  # noqa: E731
    nu = 0.5 * c * h
    expected = avg(q[LEZ]) + nu * (dx_my(q[LBY]) - dy_mx(q[LBX]))
    np.testing.assert_allclose(v.Ez[0:2, 0:2], expected, rtol=1e-13, atol=1e-13)


def test_rusanov_components():
    q = np.arange(1.0, 9.0)
    c = 1.5
    F_Bz, F_Ez = rusanov_face_components(q, q, 0, c)
    assert F_Bz == q[LEY] and F_Ez == pytest.approx(-c * c * q[LBY])
    minus, plus = np.zeros(8), np.zeros(8)
    plus[LBZ] = 1.0
    F_Bz, _ = rusanov_face_components(minus, plus, 0, c=2.0)
    assert F_Bz == -1.0


@given(st.integers(0, 2**32 - 1), st.sampled_from([0, 1]))
def test_rusanov_split(seed, direction):
    rng = np.random.default_rng(seed)
    a, b = rng.standard_normal(8), rng.standard_normal(8)
    c = 1.7
    Fab = np.array(rusanov_face_components(a, b, direction, c))
    Fba = np.array(rusanov_face_components(b, a, direction, c))
    central = 0.5 * (physical_flux(a, c, direction) + physical_flux(b, c, direction))[[LBZ, LEZ]]
    np.testing.assert_allclose(0.5 * (Fab + Fba), central, atol=1e-14)
    np.testing.assert_allclose(0.5 * (Fab - Fba), -0.5 * c * (b - a)[[LBZ, LEZ]], atol=1e-14)


@pytest.mark.parametrize("mode", list(Mode))
@pytest.mark.parametrize("backend", ["numpy", "numba"])
def test_uniform_flux_is_physical(rng, mode, backend):
    grid = Grid2D(5, 4)
    gas = GasParams(c=2.0, eps0=0.25)
    U = grid.allocate()
    q = rng.standard_normal(18)
    q[16:18] = 0.0
    U[...] = q[:, None, None]
    Fx, Fy, _ = maxwell_fluxes(U, grid, gas, mode, 2, backend)
    k = 1.0 if mode is Mode.PHM else 0.0
    for F, d in ((Fx, 0), (Fy, 1)):
        exact = physical_flux(q[EM], 2.0, d, kappa=k, xi=k)[:, None, None]
        np.testing.assert_allclose(F, exact * np.ones(F.shape), atol=1e-14)


def test_multid_rows_from_shared_vertices(rng):
    grid = Grid2D(6, 5)
    gas = GasParams(c=1.3, eps0=0.6)
    U = _field(rng, grid)
    Fx, Fy, vertex = maxwell_fluxes(U, grid, gas, Mode.MULTID, 2)
    np.testing.assert_array_equal(Fx[LBY], -0.5 * (vertex.Ez[:, 1:] + vertex.Ez[:, :-1]))
    np.testing.assert_array_equal(Fx[LEY], 0.5 * (vertex.c2Bz[:, 1:] + vertex.c2Bz[:, :-1]))
    np.testing.assert_array_equal(Fy[LBX], 0.5 * (vertex.Ez[1:] + vertex.Ez[:-1]))
    np.testing.assert_array_equal(Fy[LEX], -0.5 * (vertex.c2Bz[1:] + vertex.c2Bz[:-1]))
    assert not Fx[LBX].any() and not Fx[LEX].any()


def test_face_traces_shapes(rng):
    M = rng.standard_normal((8, 10, 3))
    minus, plus = face_traces(M, 2)
    assert minus.shape == plus.shape == (8, 7, 3)


@pytest.mark.parametrize("order", [1, 2])
def test_multid_equals_none_on_y_uniform_data(rng, order):
    grid = Grid2D(16, 4)
    gas = GasParams(r_I=1.0, r_E=-2.0, c=1.5, eps0=1 / 2.25)
    line = random_state(rng, 16)
    U = grid.allocate()
    grid.interior(U)[...] = line[:, :, None]
    fill_ghosts(U, grid)
    Fm = maxwell_fluxes(U, grid, gas, Mode.MULTID, order)[0]
    Fn = maxwell_fluxes(U, grid, gas, Mode.NONE, order)[0]
    np.testing.assert_allclose(Fm[:6], Fn[:6], rtol=1e-13, atol=1e-13)
    Lm = residual(U, grid, gas, SchemeConfig(mode="multid", order=order))
    Ln = residual(U, grid, gas, SchemeConfig(mode="none", order=order))
    np.testing.assert_allclose(Lm, Ln, rtol=1e-12, atol=1e-12)


def test_discrete_curl_div_commute(rng):
    # delta_x mu_y (delta_y mu_x E) = delta_y mu_x (delta_x mu_y E) on a periodic vertex field
    E = rng.standard_normal((12, 9))
    dx = lambda f: np.roll(f, -1, 0) - f  # noqa: E731
    dy = lambda f: np.roll(f, -1, 1) - f  # noqa: E731
    mx = lambda f: 0.5 * (np.roll(f, -1, 0) + f)  # noqa: E731
    my = lambda f: 0.5 * (np.roll(f, -1, 1) + f)  # noqa: E731
    lhs = dx(my(dy(mx(E))))
    rhs = dy(mx(dx(my(E))))
    np.testing.assert_allclose(lhs, rhs, atol=1e-14)


@given(st.integers(0, 2**32 - 1), st.sampled_from(list(Mode)), st.sampled_from([1, 2]),
       st.sampled_from([("periodic", "periodic"), ("outflow", "wall"), ("periodic", "wall")]))
def test_compiled_matches_reference(seed, mode, order, bcs):
    rng = np.random.default_rng(seed)
    grid = Grid2D(7, 5, bc_x=bcs[0], bc_y=bcs[1])
    gas = GasParams(c=1.9, eps0=1 / 3.61, kappa=0.5, xi=1.5)
    U = _field(rng, grid)
    a = maxwell_fluxes(U, grid, gas, mode, order, "numpy")
    b = maxwell_fluxes(U, grid, gas, mode, order, "numba")
    np.testing.assert_allclose(b[0], a[0], rtol=1e-13, atol=1e-13)
    np.testing.assert_allclose(b[1], a[1], rtol=1e-13, atol=1e-13)
    if mode is Mode.MULTID:
        np.testing.assert_allclose(b[2].Ez, a[2].Ez, rtol=1e-13, atol=1e-13)


def test_mode_parse():
    assert Mode.parse("MultiD") is Mode.MULTID
    with pytest.raises(ValueError):
        Mode.parse("yee")

import numpy as np
import pytest

from twofluid import problems
from twofluid.diagnostics import divB_norms
from twofluid.grid import BoundaryKind, ConfigError, Grid2D
from twofluid.state import BX, BY, EX, EZ, cons_to_prim, check_fluid

ALL = sorted(problems.REGISTRY)


def _small(spec):
    return spec.make_grid(40, 1) if spec.is_1d else spec.make_grid(24, 16)


def test_accuracy_profile():
    spec = problems.accuracy1d()
    assert problems.exact_density(0.25, 0.0) == pytest.approx(3.0)
    assert problems.exact_density(1.25, 1.0) == pytest.approx(3.0)
    grid = Grid2D(4, 1)
    W = cons_to_prim(grid.interior(problems.init(spec, grid)), spec.gas)
    np.testing.assert_allclose(W[0, :, 0], 2.0 + np.sin(2 * np.pi * grid.x), rtol=1e-14)
    np.testing.assert_allclose(W[BY, :, 0], -W[EZ, :, 0])
    g = spec.gas
    assert (g.c, g.eps0, g.r_I, g.r_E) == (1.0, 1.0, 1.0, -2.0)


def test_briowu_parameters():
    spec = problems.briowu()
    assert spec.gas.c == pytest.approx(100.0)
    assert spec.gas.eps0 == pytest.approx(1e-4)
    assert spec.gas.mu0 == pytest.approx(1.0)
    assert problems.briowu(c=10.0).gas.mu0 == pytest.approx(100.0)
    assert spec.gas.r_I == pytest.approx(10.0)
    assert spec.gas.r_E == pytest.approx(-18360.0)
    assert spec.bc_x is BoundaryKind.OUTFLOW
    grid = spec.make_grid(10, 1)
    W = cons_to_prim(grid.interior(problems.init(spec, grid)), spec.gas)
    assert W[4, 0, 0] == pytest.approx(5e-5) and W[4, -1, 0] == pytest.approx(5e-6)
    assert W[0, 0, 0] == pytest.approx(1.0) and W[0, -1, 0] == pytest.approx(0.125)
    assert W[5, 0, 0] == pytest.approx(1.0 / 1836)
    np.testing.assert_allclose(W[BX], 0.75)
    assert W[BY, 0, 0] == 1.0 and W[BY, -1, 0] == -1.0


@pytest.mark.parametrize("larmor,r_I", [(0.1, 10.0), (1e-3, 1000.0), (1e-6, 1e6)])
def test_soliton_ratios(larmor, r_I):
    spec = problems.soliton(larmor=larmor)
    assert spec.gas.r_I == pytest.approx(r_I)
    assert spec.gas.r_E == pytest.approx(-25 * r_I)
    assert spec.xmax - spec.xmin == 12.0


def test_soliton_profile():
    spec = problems.soliton()
    grid = spec.make_grid(1200, 1)
    W = cons_to_prim(grid.interior(problems.init(spec, grid)), spec.gas)
    k = np.argmax(W[0, :, 0])
    assert grid.x[k] == pytest.approx(4.0, abs=grid.dx)
    np.testing.assert_allclose(W[9], 100 * W[4], rtol=1e-12)
    assert not W[[1, 2, 3, 6, 7, 8]].any() and not W[10:].any()


def test_orszag_tang_ohm_field():
    spec = problems.orszag_tang()
    grid = spec.make_grid(16, 16)
    W = cons_to_prim(grid.interior(problems.init(spec, grid)), spec.gas)
    u = W[1:4]
    B = W[10:13]
    np.testing.assert_allclose(W[13:16], -np.cross(u, B, axis=0), atol=1e-14)
    np.testing.assert_allclose(W[1:4], W[6:9], atol=1e-14)
    np.testing.assert_allclose(W[0] + W[5], 25 / 9, rtol=1e-14)


@pytest.mark.parametrize("name", ALL)
def test_initial_data_admissible(name):
    spec = problems.get_problem(name)
    grid = _small(spec)
    U = problems.init(spec, grid)
    for sl, gam in ((slice(0, 5), spec.gas.gamma_I), (slice(5, 10), spec.gas.gamma_E)):
        assert np.all(check_fluid(U[sl], gam) > 0)
    assert np.all(np.isfinite(U))


@pytest.mark.parametrize("name", ALL)
def test_eps0_is_inverse_c_squared(name):
    g = problems.get_problem(name).gas
    assert g.eps0 * g.c ** 2 == pytest.approx(1.0)


def test_forcing_vector():
    spec = problems.accuracy1d()
    S = problems.forcing_vector(spec, 0.0, 0.0)
    assert S[EX] == pytest.approx(-2.0)
    assert np.count_nonzero(S) == 1
    np.testing.assert_allclose(problems.forcing_vector(spec, 0.3, 0.1)[EX],
                               problems.forcing_vector(spec, 1.2, 0.0)[EX], rtol=1e-14)
    grid = Grid2D(8, 1)
    np.testing.assert_allclose(problems.accuracy_forcing(grid, 0.2),
                               problems.forcing_vector(spec, grid.meshgrid()[0], 0.2))
    assert problems.forcing(problems.gem()) is None
    with pytest.raises(ConfigError):
        problems.forcing_vector(problems.gem(), 0.0, 0.0)


def test_exact_solution_periodic_in_time():
    spec = problems.accuracy1d()
    x = np.linspace(0, 1, 17)
    np.testing.assert_allclose(problems.exact_solution(spec, x, 2.0),
                               problems.exact_solution(spec, x, 0.0), atol=1e-14)


def test_configuration_errors():
    with pytest.raises(ConfigError):
        problems.get_problem("kelvin_helmholtz")
    spec = problems.briowu()
    with pytest.raises(ConfigError):
        spec.make_grid(10, 4)
    with pytest.raises(ConfigError):
        problems.init(spec, Grid2D(10, 4))
    with pytest.raises(ConfigError):
        problems.init(problems.orszag_tang(), Grid2D(10, 1))
    with pytest.raises(ConfigError):
        problems.exact_solution(spec, 0.0, 0.0)


def test_overrides_apply():
    spec = problems.get_problem("gem", psi0=0.2, nx=32)
    assert spec.params["psi0"] == 0.2 and spec.nx == 32
    assert problems.get_problem("gem", c=20.0).gas.eps0 == pytest.approx(1 / 400)


def test_gem_geometry():
    spec = problems.gem()
    assert spec.bc_y is BoundaryKind.WALL and spec.bc_x is BoundaryKind.PERIODIC
    assert (spec.xmax - spec.xmin, spec.ymax - spec.ymin) == pytest.approx((8 * np.pi, 4 * np.pi))


@pytest.mark.parametrize("name", ["orszag_tang", "gem"])
def test_initial_divB_is_truncation_error(name):
    spec = problems.get_problem(name)
    errs = [divB_norms(problems.init(spec, spec.make_grid(n, n)), spec.make_grid(n, n))[0]
            for n in (32, 64)]
    assert errs[1] <= errs[0] / 3.5

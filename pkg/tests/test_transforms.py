import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

import oracles
from freesum import measures as M
from freesum.errors import PreconditionError
from freesum.transforms import (
    HalfPlanePoint,
    cauchy_transform,
    default_eta,
    semicircle_cauchy,
    stieltjes_invert,
    write_trace_csv,
)

OMEGA = M.Semicircle()
GOLDEN = (math.sqrt(5) - 1) / 2  # 0.618034...


def test_half_plane_point_validates():
    assert HalfPlanePoint(0.3, 0.7).z == 0.3 + 0.7j
    with pytest.raises(PreconditionError):
        HalfPlanePoint(1.0, 0.0)
    with pytest.raises(PreconditionError):
        cauchy_transform(OMEGA, 1.0 - 0.1j)


def test_point_mass():
    z = 0.3 + 0.7j
    assert cauchy_transform(M.Atomic.delta(0.0), HalfPlanePoint(0.3, 0.7)) == pytest.approx(1 / z)


def test_semicircle_at_i_matches_quadrature():
    ref = oracles.cauchy_quad(oracles.semicircle_pdf, -2, 2, 1j)
    assert ref == pytest.approx(-GOLDEN * 1j, abs=1e-9)
    assert cauchy_transform(OMEGA, 1j) == pytest.approx(ref, abs=1e-12)
    assert semicircle_cauchy(1j) == pytest.approx(-GOLDEN * 1j, abs=1e-14)


def test_semicircle_cauchy_at_2i():
    assert semicircle_cauchy(2j) == pytest.approx(1j * (2 - math.sqrt(8)) / 2, abs=1e-14)
    ref = oracles.cauchy_quad(oracles.semicircle_pdf, -2, 2, 2j)
    assert semicircle_cauchy(2j) == pytest.approx(ref, abs=1e-9)


def test_semicircle_closed_form_agrees_with_measure_on_grid():
    rng = np.random.default_rng(0)
    z = rng.uniform(-4, 4, 100) + 1j * rng.uniform(0.01, 3, 100)
    a = semicircle_cauchy(z)
    b = cauchy_transform(OMEGA, z)
    assert np.max(np.abs(a - b)) < 1e-9


@pytest.mark.parametrize("lam,alpha", [(0.3, 2.0), (4.0, 0.25), (1.5, 1.0), (2.0, -0.5)])
def test_free_poisson_matches_quadrature(lam, alpha):
    m = M.FreePoisson(lam, alpha)
    lo, hi = m.support_interval()
    loc, mas = m.atoms()
    for z in (0.4 + 0.3j, -1.0 + 0.05j, 3.0 + 2.0j):
        a, b = sorted([alpha * (1 - math.sqrt(lam)) ** 2, alpha * (1 + math.sqrt(lam)) ** 2])
        ref = oracles.cauchy_quad(m.density, a, b, z) + sum(w / (z - p) for p, w in zip(loc, mas))
        assert cauchy_transform(m, z) == pytest.approx(ref, abs=1e-8)


def test_grid_density_transform_matches_quadrature():
    x = np.linspace(-1, 2, 7)
    f = np.array([0, 1, 3, 2, 2, 1, 0.0])
    g = M.GridDensity(x, f)
    pdf = lambda t: float(np.interp(t, g.grid, g.values))
    for z in (0.1 + 1e-4j, 0.5 + 0.5j, 5 + 1j):
        assert cauchy_transform(g, z) == pytest.approx(oracles.cauchy_quad(pdf, -1, 2, z), abs=1e-7)


def test_empirical_is_atomic_average():
    s = np.array([-1.0, 0.5, 0.5, 2.0])
    z = 0.2 + 0.3j
    assert cauchy_transform(M.Empirical(s), z) == pytest.approx(np.mean(1 / (z - s)))


def test_vectorized_shape():
    z = np.full((3, 4), 1j)
    assert cauchy_transform(OMEGA, z).shape == (3, 4)


# ------------------------------------------------------------- inversion

def test_invert_semicircle_density_at_zero():
    g = stieltjes_invert(semicircle_cauchy, (-3, 3), 2048, 1e-3)
    assert g.density(0.0) == pytest.approx(1 / math.pi, abs=2e-3)
    assert g.eta == 1e-3


def test_invert_point_mass():
    d0 = M.Atomic.delta(0.0)
    g = stieltjes_invert(lambda z: cauchy_transform(d0, z), (-1, 1), 4096, 1e-2)
    assert g.density(0.0) == pytest.approx(g.density_bound())
    # raw Poisson-kernel mass on the window, before renormalization
    x = np.linspace(-1, 1, 4096)
    raw = integrate.trapezoid(-cauchy_transform(d0, x + 1e-2j).imag / math.pi, x)
    assert raw == pytest.approx(1.0, abs=2e-2)
    inside = g.cdf(10e-2) - g.cdf_left(-10e-2)
    assert inside >= 0.93


def test_invert_round_trip():
    g = stieltjes_invert(lambda z: cauchy_transform(OMEGA, z), (-3, 3), 8192, 1e-3)
    assert M.kolmogorov_distance(g, OMEGA) <= 5e-3


def test_invert_validation():
    with pytest.raises(PreconditionError):
        stieltjes_invert(semicircle_cauchy, (-3, 3), 4)
    with pytest.raises(PreconditionError):
        stieltjes_invert(semicircle_cauchy, (-3, 3), 64, 2.0)
    with pytest.raises(PreconditionError):
        stieltjes_invert(semicircle_cauchy, (3, -3), 64)


def test_default_eta():
    assert default_eta((-3, 3), 2400) == pytest.approx(0.01)


def test_trace_csv(tmp_path):
    z = np.array([1j, 2j])
    p = tmp_path / "t.csv"
    write_trace_csv(p, z, semicircle_cauchy(z))
    lines = p.read_text().splitlines()
    assert lines[0] == "re_z,im_z,re_g,im_g" and len(lines) == 3


# ------------------------------------------------------------ properties

laws = st.one_of(
    st.builds(M.Semicircle, st.floats(0.1, 4.0), st.floats(-2, 2)),
    st.builds(M.FreePoisson, st.floats(0.1, 5.0), st.sampled_from([-1.5, 0.5, 2.0])),
    st.lists(st.floats(-3, 3), min_size=1, max_size=20).map(lambda s: M.Empirical(np.array(s))),
)
upper = st.tuples(st.floats(-6, 6), st.floats(1e-3, 5)).map(lambda t: complex(*t))


@given(laws, upper)
def test_nevanlinna(m, z):
    assert cauchy_transform(m, z).imag < 0


@given(laws, st.sampled_from([10.0, 100.0]), st.floats(0.2, math.pi - 0.2))
def test_decay(m, r, theta):
    z = r * complex(math.cos(theta), math.sin(theta))
    lhs = abs(z * cauchy_transform(m, z) - 1)
    assert lhs <= (m.moment(2) + 1) / z.imag


@given(st.floats(0.1, 4.0))
def test_semicircle_branch_continuity(v):
    x = np.linspace(-5, 5, 20001)
    g = semicircle_cauchy(x + 0.5j, v)
    # the derivative is bounded by 1/Im(z)^2 = 4, so steps stay below 4 dx
    assert np.max(np.abs(np.diff(g))) <= 4 * (x[1] - x[0]) + 1e-12
    assert np.all(np.abs(semicircle_cauchy(x + 0.5j)) <= 1.0)

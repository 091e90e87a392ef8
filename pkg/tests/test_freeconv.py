import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from freesum import measures as M
from freesum.errors import ConvergenceError, ParameterError, PreconditionError
from freesum.freeconv import (
    AtomList,
    convolution_atoms,
    convolution_window,
    fold_transforms,
    free_clt_distribution,
    free_convolve,
    free_convolve_transform,
    free_power_transform,
    nfold_atoms,
    subordinate,
)
from freesum.transforms import semicircle_cauchy, stieltjes_invert

OMEGA = M.Semicircle()
BERN = M.Atomic.from_pairs([(-1, 0.5), (1, 0.5)])


def grid_gap(g, cdf):
    """sup |F_g - cdf| over the grid nodes and cell midpoints of ``g``."""
    x = g.grid
    pts = np.concatenate([x, 0.5 * (x[1:] + x[:-1])])
    return float(np.max(np.abs(g.cdf(pts) - cdf(pts))))


# ---------------------------------------------------------- oracles

def test_projection_identity_exact():
    # A = 2P - 1, B = 2Q - 1 with Q spanned by a Haar frame: eig(A + B) = +-2 s_k
    rng = np.random.default_rng(5)
    N = 64
    q = oracles.haar_frame(N, rng)
    a = np.diag(np.concatenate([np.ones(N // 2), -np.ones(N // 2)]))
    b = 2 * q @ q.conj().T - np.eye(N)
    direct = np.linalg.eigvalsh(a + b)
    assert np.max(np.abs(direct - oracles.frame_spectrum(q))) < 1e-10


def test_projection_oracle_matches_conjugation_in_law():
    rng = np.random.default_rng(6)
    direct = np.concatenate([oracles.bernoulli_sum_direct(128, rng) for _ in range(8)])
    proj = np.concatenate([oracles.bernoulli_sum_projections(128, rng) for _ in range(8)])
    assert M.kolmogorov_distance(M.Empirical(direct), M.Empirical(proj)) < 0.06


def test_bernoulli_pair_is_arcsine():
    g = free_convolve(BERN, BERN, resolution=24000, eta=1e-5)
    assert grid_gap(g, oracles.arcsine_cdf) <= 5e-3


def test_semicircle_pair():
    g = free_convolve(OMEGA, OMEGA)
    assert M.kolmogorov_distance(g, M.Semicircle(2.0)) <= 5e-3


def test_semicircle_semigroup_with_centers():
    g = free_convolve(M.Semicircle(0.5, 1.0), M.Semicircle(1.5, -0.25))
    assert M.kolmogorov_distance(g, M.Semicircle(2.0, 0.75)) <= 5e-3


def test_free_poisson_semigroup():
    g = free_convolve(M.FreePoisson(1.5, 1.0), M.FreePoisson(2.0, 1.0), resolution=8192)
    assert M.kolmogorov_distance(g, M.FreePoisson(3.5, 1.0)) <= 5e-3


@pytest.mark.parametrize("a", [-1.3, 0.0, 0.7])
def test_point_mass_shifts(a):
    g = free_convolve(M.Atomic.delta(a), OMEGA)
    assert M.kolmogorov_distance(g, M.shift(OMEGA, a)) <= 2e-3


def test_subordination_closed_form():
    # for two semicircles omega1 = z - v2 G(z)
    z = np.array([0.3 + 0.2j, -1 + 1j, 2.5 + 0.01j])
    res = subordinate(OMEGA, M.Semicircle(2.0), z)
    assert res.converged.all()
    g = semicircle_cauchy(z, 3.0)
    assert np.max(np.abs(res.omega1 - (z - 2.0 * g))) < 1e-10
    assert np.all(res.omega1.imag >= z.imag) and np.all(res.omega2.imag >= z.imag)


def test_subordination_diagnostics(tmp_path):
    res = subordinate(BERN, OMEGA, np.array([0.1 + 0.1j, 1j]))
    p = tmp_path / "s.csv"
    res.write_csv(p)
    assert len(p.read_text().splitlines()) == 3
    assert res.worst_residual < 1e-10 and res.failure_fraction == 0.0


def test_nonconvergence_reported():
    with pytest.raises(ConvergenceError):
        free_convolve(BERN, BERN, resolution=512, eta=1e-4, max_iter=2)


def test_parameter_checks():
    with pytest.raises(ParameterError):
        subordinate(OMEGA, OMEGA, np.array([1j]), tol=1e-16)
    with pytest.raises(PreconditionError):
        subordinate(OMEGA, OMEGA, np.array([1.0 + 0j]))


def test_window():
    assert convolution_window(BERN, OMEGA) == (-4.0, 4.0)


# ------------------------------------------------------------ free CLT

def test_clt_of_semicircle_is_stable():
    g = free_clt_distribution(OMEGA, 16)
    assert M.kolmogorov_distance(g, OMEGA) <= 5e-3


def test_clt_of_bernoulli_n2_is_scaled_arcsine():
    g = free_clt_distribution(BERN, 2, resolution=16384, eta=1e-5)
    assert grid_gap(g, lambda x: oracles.arcsine_cdf(math.sqrt(2) * x)) <= 5e-3


def test_clt_of_bernoulli_n64():
    g = free_clt_distribution(BERN, 64)
    assert M.kolmogorov_distance(g, OMEGA) <= 0.05


def test_power_matches_binary_fold():
    z = np.array([0.2 + 0.3j, 1.5 + 0.05j])
    a = free_power_transform(BERN, 4)(z)
    b = fold_transforms([BERN] * 4)(z)
    assert np.max(np.abs(a - b)) < 1e-9


def test_clt_checks():
    with pytest.raises(PreconditionError):
        free_clt_distribution(M.Atomic.from_pairs([(0, 0.5), (1, 0.5)]), 4)
    with pytest.raises(ParameterError):
        free_clt_distribution(OMEGA, 1)


# --------------------------------------------------------------- atoms

def test_atoms_examples():
    d0 = AtomList.from_pairs([(0.0, 1.0)])
    a2 = AtomList.from_pairs([(-1.0, 0.3), (2.0, 0.7)])
    assert convolution_atoms(d0, a2).as_dict() == pytest.approx(a2.as_dict(), abs=1e-15)
    q = AtomList.from_pairs([(0, 0.75), (1, 0.25)])
    assert convolution_atoms(q, q).as_dict() == {0.0: 0.5}
    assert len(convolution_atoms(AtomList.from_measure(BERN), AtomList.from_measure(BERN))) == 0


def test_nfold_examples():
    assert nfold_atoms(AtomList.from_pairs([(1.5, 1.0)]), 5).as_dict() == {7.5: 1.0}
    r = nfold_atoms(AtomList.from_pairs([(0, 0.9), (1, 0.1)]), 3)
    assert list(r.as_dict()) == [0.0] and r.masses[0] == pytest.approx(0.7, abs=1e-15)
    assert len(nfold_atoms(AtomList.from_pairs([(0, 0.6), (1, 0.4)]), 3)) == 0


def test_atom_list_validation(tmp_path):
    with pytest.raises(ParameterError):
        AtomList.from_pairs([(0, 0.6), (0, 0.3)])
    with pytest.raises(ParameterError):
        AtomList.from_pairs([(0, 0.6), (1, 0.6)])
    a = AtomList.from_pairs([(1, 0.25), (0, 0.75)])
    assert a.locations.tolist() == [0.0, 1.0]
    a.write_csv(tmp_path / "a.csv")
    assert isinstance(a.to_measure(), M.Atomic)


def test_atom_seen_by_numeric_convolution():
    a = M.Atomic.from_pairs([(0.0, 0.8), (1.0, 0.2)])
    b = M.Atomic.from_pairs([(0.5, 0.7), (-1.0, 0.3)])
    atoms = convolution_atoms(AtomList.from_measure(a), AtomList.from_measure(b))
    assert atoms.as_dict() == pytest.approx({-1.0: 0.1, 0.5: 0.5}, abs=1e-15)
    eta = 1e-3
    g = free_convolve(a, b, resolution=16384, eta=eta)
    mass = g.cdf(0.5 + 10 * eta) - g.cdf_left(0.5 - 10 * eta)
    assert mass >= 0.8 * 0.5


pair_masses = st.lists(st.floats(0.02, 1.0), min_size=1, max_size=4)


@st.composite
def atom_lists(draw):
    w = np.array(draw(pair_masses))
    w = w / w.sum()
    locs = draw(st.lists(st.integers(-20, 20), min_size=w.size, max_size=w.size, unique=True))
    return AtomList(np.array(locs) / 4.0, w)


@given(atom_lists(), atom_lists())
def test_atoms_properties(a, b):
    ab, ba = convolution_atoms(a, b), convolution_atoms(b, a)
    assert ab.as_dict() == pytest.approx(ba.as_dict())
    assert np.all(ab.masses > 0) and ab.masses.sum() <= 1 + 1e-12
    # every atom needs an atom of mass above 1/2 on one side
    assert len(ab) == 0 or max(a.masses.max(), b.masses.max()) > 0.5


# ----------------------------------------------------- numeric properties

@st.composite
def atomic_laws(draw, max_atoms=3):
    k = draw(st.integers(1, max_atoms))
    locs = draw(st.lists(st.integers(-8, 8), min_size=k, max_size=k, unique=True))
    w = np.array(draw(st.lists(st.floats(0.1, 1.0), min_size=k, max_size=k)))
    return M.Atomic(np.sort(np.array(locs) / 4.0), (w / w.sum())[np.argsort(locs)])


@settings(max_examples=8)
@given(atomic_laws(), atomic_laws())
def test_moments_add(a, b):
    g = free_convolve(a, b, resolution=8192, eta=1e-3)
    assert g.mean == pytest.approx(a.mean + b.mean, abs=1e-3)
    assert g.variance == pytest.approx(a.variance + b.variance, rel=5e-3, abs=1e-3)


@settings(max_examples=6)
@given(atomic_laws(), atomic_laws())
def test_symmetry(a, b):
    w = convolution_window(a, b)
    ab = free_convolve(a, b, window=w, resolution=4096)
    ba = free_convolve(b, a, window=w, resolution=4096)
    assert M.kolmogorov_distance(ab, ba) <= 2e-3


@settings(max_examples=4)
@given(atomic_laws(2), atomic_laws(2), atomic_laws(2))
def test_associativity(a, b, c):
    lo = sum(m.support_interval()[0] for m in (a, b, c)) - 1
    hi = sum(m.support_interval()[1] for m in (a, b, c)) + 1
    # the outer solve sees the inner one's rounding, so its tolerance is looser
    left = free_convolve_transform(free_convolve_transform(a, b), c, tol=1e-10)
    right = free_convolve_transform(a, free_convolve_transform(b, c), tol=1e-10)
    gl = stieltjes_invert(left, (lo, hi), 1024)
    gr = stieltjes_invert(right, (lo, hi), 1024)
    assert M.kolmogorov_distance(gl, gr) <= 5e-3

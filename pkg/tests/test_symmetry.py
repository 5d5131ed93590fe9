import json

import numpy as np
import pytest

from conftest import fiber_points, load
from rigidcmap.cmap import FiberPoint
from rigidcmap.jets import jet, polynomial
from rigidcmap.symmetry import (
    Lattice,
    LatticeError,
    SymplecticVectorReal,
    duality_check,
    invariance_check,
    lattice_image,
    lattice_reduce,
    parse_lattice,
    periodicity_residual,
    psi_map,
    psi_real_matrix,
    translate,
)

CUBIC = polynomial(1, [(1 / 6, (3,))])
QUAD1 = polynomial(1, [(0.5j, (2,))])


def vec(*x):
    return SymplecticVectorReal.from_array(x)


def test_psi_examples():
    J = jet(CUBIC, [1j])
    assert psi_map(J, vec(1, 0))[0] == pytest.approx(1j)
    assert psi_map(J, vec(0, 0))[0] == 0


def test_translate_examples():
    out = translate(CUBIC, vec(1, 0), FiberPoint([1j], [1]))
    np.testing.assert_allclose(out.z, [1j])
    np.testing.assert_allclose(out.w, [0], atol=1e-15)
    at = FiberPoint([0.5 + 1j], [2 - 1j])
    assert np.array_equal(translate(CUBIC, vec(0, 0), at).w, at.w)


def test_translate_group_law():
    rng = np.random.default_rng(1)
    for _ in range(100):
        at = FiberPoint([rng.normal() + 1j * rng.uniform(0.2, 2)], [rng.normal() + 1j * rng.normal()])
        v = vec(*rng.integers(-3, 4, 2))
        u = vec(*rng.integers(-3, 4, 2))
        back = translate(CUBIC, -v, translate(CUBIC, v, at))
        # (w + a) - a is exact only up to one rounding
        assert np.max(np.abs(back.w - at.w)) <= 4 * np.finfo(float).eps * max(1.0, np.abs(at.w).max())
        both = translate(CUBIC, u + v, at)
        seq = translate(CUBIC, u, translate(CUBIC, v, at))
        assert np.max(np.abs(both.w - seq.w)) <= 1e-13


def test_symplectic_vector_must_be_real():
    with pytest.raises(ValueError):
        SymplecticVectorReal([1j], [0])


def test_invariance_quadratic(quadratic3):
    rep = invariance_check(quadratic3, vec(1, -2, 0.5, 3, 0, 1), fiber_points("quadratic_n3", count=5))
    assert rep.omega == 0
    assert rep.potential <= 1e-12 and rep.metric <= 1e-14


def test_invariance_cubic():
    rng = np.random.default_rng(2)
    samples = [FiberPoint([rng.normal() + 1j * rng.uniform(0.3, 2)], [rng.normal() + 1j * rng.normal()])
               for _ in range(20)]
    rep = invariance_check(CUBIC, vec(1, 2), samples)
    assert rep.omega <= 1e-12 and rep.potential <= 1e-10 and rep.metric <= 1e-10


def test_invariance_cone_chart(stu_chart):
    rng = np.random.default_rng(3)
    v = SymplecticVectorReal.from_array(rng.uniform(-1, 1, 6))
    rep = invariance_check(stu_chart, v, fiber_points("stu_chart_n3", count=20, seed=4))
    assert rep.omega <= 1e-12 and rep.potential <= 1e-10 and rep.metric <= 1e-10


def test_simple_transitivity():
    rng = np.random.default_rng(4)
    F = load("stu_chart_n3")
    for at in fiber_points("stu_chart_n3", count=10):
        assert np.linalg.matrix_rank(psi_real_matrix(jet(F, at.z))) == 6
    assert np.linalg.matrix_rank(psi_real_matrix(jet(CUBIC, [rng.normal() + 1j]))) == 2


# ---------------------------------------------------------------- lattices

def test_lattice_parsing():
    lat = parse_lattice(json.dumps({"basis": [[1, 0], [0, 1]]}), 1)
    np.testing.assert_array_equal(lat.basis, np.eye(2))
    lat = parse_lattice(json.dumps({"basis": [[1, 0], [1, 1]]}), 1)
    np.testing.assert_array_equal(lat.generator(1).array, [1, 1])
    assert parse_lattice("standard", 2).n == 2
    with pytest.raises(LatticeError):
        parse_lattice(json.dumps({"basis": [[1, 2], [2, 4]]}), 1)
    with pytest.raises(LatticeError):
        parse_lattice(json.dumps({"basis": np.eye(4).tolist()}), 1)


def test_reduce_fundamental_domain_and_translate():
    lat = Lattice.standard(1)
    z = [0.3 + 1.2j]
    J = jet(CUBIC, z)
    P = lattice_image(J, lat)
    w = P @ np.array([0.25, 0.5])
    red = lattice_reduce(CUBIC, z, lat, w)
    assert np.array_equal(red.coefficients, [0, 0])
    assert np.array_equal(red.representative, w)
    red = lattice_reduce(CUBIC, z, lat, w + P[:, 0])
    assert np.array_equal(red.coefficients, [1, 0])


def test_reduce_example_value():
    red = lattice_reduce(QUAD1, [0.0], Lattice.standard(1), [2.3 + 5.7j])
    np.testing.assert_array_equal(red.coefficients, [-3, -6])
    np.testing.assert_allclose(red.representative, [-0.7 - 0.3j], atol=1e-14)


def test_reduce_idempotent_and_periodic():
    F = load("stu_chart_n3")
    lat = Lattice.standard(3)
    for at in fiber_points("stu_chart_n3", count=10, seed=5, fiber_radius=4.0):
        residual, red = periodicity_residual(F, at.z, lat, at.w)
        assert residual <= 1e-10
        again = lattice_reduce(F, at.z, lat, red.representative)
        assert np.array_equal(again.coefficients, np.zeros(6, dtype=int))
        assert np.array_equal(again.representative, red.representative)


def test_reduce_rejects_degenerate_point():
    with pytest.raises(LatticeError):
        lattice_reduce(CUBIC, [1.0], Lattice.standard(1), [0.5])


# ---------------------------------------------------------------- duality

def test_duality_orthogonal_on_quadratic(quadratic3):
    theta = 0.7
    A = np.array([[np.cos(theta), -np.sin(theta), 0], [np.sin(theta), np.cos(theta), 0], [0, 0, 1]])
    rng = np.random.default_rng(6)
    rep = duality_check(quadratic3, A, [rng.normal(size=3) + 1j * rng.normal(size=3) for _ in range(5)])
    assert rep.membership <= 1e-14 and rep.isometry <= 1e-14


def test_duality_unimodular_scaling_on_stu_chart(stu_chart):
    lam, mu = 1.7, 0.4
    A = np.diag([lam, mu, 1 / (lam * mu)])
    rep = duality_check(stu_chart, A, [np.array([1j, 2 + 1j, -0.5j]), np.array([0.3, 1j, 1.0])])
    assert rep.membership <= 1e-12


def test_duality_mismatch_on_cubic():
    rep = duality_check(CUBIC, [[2.0]], [np.array([1j])])
    assert rep.membership > 0.1
    assert rep.isometry is None

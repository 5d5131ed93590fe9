import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rigidcmap import jets
from rigidcmap.jets import (
    JetOrderError,
    PoleError,
    PrepotentialError,
    euler_residual,
    jet,
    parse_prepotential,
    polynomial,
    very_special,
)


def doc(**kw):
    return json.dumps(kw)


# ---------------------------------------------------------------- parsing

def test_parse_single_quadratic_term():
    F = parse_prepotential(doc(n=1, kind="polynomial", terms=[{"coeff": [0, 0.5], "exponents": [2]}]))
    assert F.kind == "polynomial" and F.dim == 1
    assert F.terms == ((0.5j, (2,)),)
    assert jet(F, [2.0], order=0).value == pytest.approx(2j)


def test_parse_very_special_monomial():
    F = parse_prepotential(doc(n=1, kind="very-special-cubic", cubic=[{"indices": [1, 1, 1], "value": 1 / 6}]))
    assert F.dim == 2
    z = np.array([2.0, 3.0 + 1j])
    assert jet(F, z, order=0).value == pytest.approx(z[1] ** 3 / (6 * z[0]))


def test_parse_duplicate_term():
    text = doc(n=1, kind="polynomial", terms=[{"coeff": [1, 0], "exponents": [2]}, {"coeff": [2, 0], "exponents": [2]}])
    with pytest.raises(PrepotentialError, match="duplicate term"):
        parse_prepotential(text)


@pytest.mark.parametrize(
    "text",
    [
        "not json",
        doc(n=0, kind="polynomial", terms=[]),
        doc(n=1, kind="rational", terms=[]),
        doc(n=1, kind="polynomial", terms=[{"coeff": [1, 0], "exponents": [2, 1]}]),
        doc(n=1, kind="polynomial", terms=[{"coeff": [1, 0], "exponents": [-1]}]),
        doc(n=1, kind="very-special-cubic", cubic=[{"indices": [1, 1, 1], "value": [1, 0.5]}]),
        doc(n=1, kind="very-special-cubic", cubic=[{"indices": [1, 1, 2], "value": 1}]),
        doc(n=2, kind="very-special-cubic",
            cubic=[{"indices": [1, 1, 2], "value": 1}, {"indices": [1, 1, 2], "value": 2}]),
    ],
)
def test_parse_rejects(text):
    with pytest.raises(PrepotentialError):
        parse_prepotential(text)


def test_nonsymmetric_cubic_is_symmetrized():
    F = parse_prepotential(doc(n=3, kind="very-special-cubic", cubic=[{"indices": [1, 2, 3], "value": 1}]))
    c = F.cubic
    for p in itertools.permutations(range(3)):
        np.testing.assert_array_equal(c, np.transpose(c, p))
    assert c[0, 1, 2] == pytest.approx(1 / 6)
    z = np.array([2.0, 1 + 1j, 2 - 1j, 0.5j])
    assert jet(F, z, order=0).value == pytest.approx(z[1] * z[2] * z[3] / z[0])


def test_constant_terms_normalized_away():
    F = polynomial(1, [(5.0, (0,)), (1.0, (2,))])
    assert F.terms == ((1.0, (2,)),)


def test_document_round_trip():
    F = parse_prepotential(doc(n=2, kind="very-special-cubic",
                               cubic=[{"indices": [1, 1, 2], "value": 3.0}, {"indices": [2, 2, 2], "value": -1.0}],
                               terms=[{"coeff": [0, 1], "exponents": [2, 0, 0]}]))
    G = parse_prepotential(jets.prepotential_to_document(F))
    np.testing.assert_allclose(G.cubic, F.cubic, rtol=1e-15)
    assert G.terms == F.terms


# ---------------------------------------------------------------- jets

def test_jet_quadratic():
    F = polynomial(1, [(0.5j, (2,))])
    J = jet(F, [3 + 4j], order=2)
    assert J.grad[0] == -4 + 3j
    assert J.hess[0, 0] == 1j


def test_jet_cubic_at_i():
    F = polynomial(1, [(1 / 6, (3,))])
    J = jet(F, [1j], order=4)
    assert J.grad[0] == pytest.approx(-0.5)
    assert J.hess[0, 0] == pytest.approx(1j)
    assert J.third[0, 0, 0] == pytest.approx(1)
    assert J.fourth[0, 0, 0, 0] == 0


def test_jet_order_bookkeeping():
    F = polynomial(2, [(1.0, (1, 1))])
    J = jet(F, [1.0, 2.0], order=2)
    assert J.order == 2 and J.third is None
    with pytest.raises(JetOrderError):
        J.tensor(3)
    with pytest.raises(JetOrderError):
        jet(F, [1.0, 2.0], order=5)


def test_very_special_pole():
    F = very_special(1, {(0, 0, 0): 1.0})
    with pytest.raises(PoleError):
        jet(F, [0.0, 1.0])


def test_very_special_quotient_rule_against_polynomial_expansion():
    F = very_special(2, {(0, 0, 1): 1.0, (1, 1, 1): 2.0})
    z = np.array([0.7 - 0.2j, 1 + 1j, -0.5 + 2j])
    J = jet(F, z, order=4)
    h = z[1] ** 2 * z[2] + 2 * z[2] ** 3  # entries spell out h term by term
    assert J.value == pytest.approx(h / z[0])
    assert J.grad[0] == pytest.approx(-h / z[0] ** 2)
    assert J.hess[0, 0] == pytest.approx(2 * h / z[0] ** 3)
    assert J.third[0, 0, 0] == pytest.approx(-6 * h / z[0] ** 4)
    assert J.fourth[0, 0, 0, 0] == pytest.approx(24 * h / z[0] ** 5)
    assert J.hess[1, 2] == pytest.approx(2 * z[1] / z[0])
    assert J.third[0, 1, 2] == pytest.approx(-2 * z[1] / z[0] ** 2)


@st.composite
def random_polynomials(draw):
    n = draw(st.integers(1, 4))
    exps = draw(st.lists(st.tuples(*[st.integers(0, 5)] * n).filter(lambda e: 0 < sum(e) <= 5),
                         min_size=1, max_size=6, unique=True))
    coeffs = draw(st.lists(st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
                           min_size=len(exps), max_size=len(exps)))
    z = draw(st.lists(st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False),
                      min_size=n, max_size=n))
    return polynomial(n, list(zip(coeffs, exps))), np.array(z)


@settings(max_examples=50, deadline=None)
@given(random_polynomials())
def test_derivative_tensors_bit_symmetric(case):
    F, z = case
    J = jet(F, z, order=4)
    for k in (2, 3, 4):
        T = J.tensor(k)
        for p in itertools.permutations(range(k)):
            np.testing.assert_array_equal(T, np.transpose(T, p))


@settings(max_examples=50, deadline=None)
@given(random_polynomials())
def test_hessian_matches_fd_of_gradient(case):
    F, z = case
    h = 1e-5
    J = jet(F, z, order=2)
    for k in range(F.dim):
        e = np.zeros(F.dim)
        e[k] = h
        fd = (jet(F, z + e, order=1).grad - jet(F, z - e, order=1).grad) / (2 * h)
        scale = max(np.max(np.abs(J.hess)), 1.0)
        np.testing.assert_allclose(fd, J.hess[:, k], rtol=0, atol=1e-7 * scale)


# ---------------------------------------------------------------- oracle kind

def _exp_oracle(z):
    # F = exp(z1 + 2 z2): every derivative is a product of the direction weights
    a = np.array([1.0, 2.0])
    e = np.exp(a @ z)
    return [e, a * e, np.einsum("i,j->ij", a, a) * e, np.einsum("i,j,k->ijk", a, a, a) * e]


def test_oracle_kind():
    F = jets.from_oracle(2, _exp_oracle, order=3)
    z = np.array([0.1 + 0.2j, -0.3j])
    J = jet(F, z, order=3)
    assert J.value == pytest.approx(np.exp(z[0] + 2 * z[1]))
    assert J.third[1, 1, 1] == pytest.approx(8 * J.value)
    with pytest.raises(JetOrderError):
        jet(F, z, order=4)


def test_oracle_asymmetry_rejected():
    def bad(z):
        return [0j, np.zeros(2), np.array([[0, 1], [0, 0]], dtype=complex)]

    with pytest.raises(PrepotentialError):
        jet(jets.from_oracle(2, bad, order=2), [0, 0], order=2)


# ---------------------------------------------------------------- Euler residual

def test_euler_examples():
    F = very_special(1, {(0, 0, 0): 1.0})
    assert euler_residual(F, [1, 2]) == 0
    G = very_special(1, {(0, 0, 0): 1.0}, terms=[(1.0, (1, 0))])
    assert euler_residual(G, [1, 2]) == pytest.approx(-1)
    Q = polynomial(3, [(0.5j, e) for e in [(2, 0, 0), (0, 2, 0), (0, 0, 2)]])
    assert euler_residual(Q, [0.3 + 1j, -2, 5j]) == 0


def test_euler_vanishes_for_very_special():
    rng = np.random.default_rng(11)
    c = rng.normal(size=(3, 3, 3))
    F = very_special(3, c)
    for _ in range(100):
        z = rng.normal(size=4) + 1j * rng.normal(size=4)
        z[0] += 0.5 * np.sign(z[0].real)
        scale = abs(jet(F, z, order=0).value) + 1
        assert abs(euler_residual(F, z)) <= 1e-12 * scale

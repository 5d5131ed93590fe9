"""Translation action of the real symplectic vector group, lattices and duality maps.

A real vector ``v = (v^1..v^n, v_1..v_n)`` acts on ``T*M`` by

    z -> z,   w_i -> w_i - i (v_i - sum_j F_ij(z) v^j).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .base_geometry import base_metric, general_position_check
from .cmap import FiberPoint, hk_metric, hk_potential
from .jets import Prepotential, PrepotentialJet, jet

LATTICE_RANK_TOL = 1e-12
REDUCE_SNAP = 1e-9


class LatticeError(ValueError):
    pass


@dataclass(frozen=True)
class SymplecticVectorReal:
    v_up: np.ndarray
    v_down: np.ndarray

    def __post_init__(self):
        up = np.atleast_1d(np.asarray(self.v_up))
        down = np.atleast_1d(np.asarray(self.v_down))
        if np.iscomplexobj(up) or np.iscomplexobj(down):
            raise ValueError("symplectic vector components must be real")
        object.__setattr__(self, "v_up", up.astype(float))
        object.__setattr__(self, "v_down", down.astype(float))

    @property
    def array(self) -> np.ndarray:
        return np.concatenate([self.v_up, self.v_down])

    @classmethod
    def from_array(cls, x) -> "SymplecticVectorReal":
        x = np.asarray(x, dtype=float)
        d = len(x) // 2
        return cls(x[:d], x[d:])

    def __add__(self, other):
        return SymplecticVectorReal(self.v_up + other.v_up, self.v_down + other.v_down)

    def __neg__(self):
        return SymplecticVectorReal(-self.v_up, -self.v_down)


@dataclass(frozen=True)
class Lattice:
    """Columns of ``basis`` are the generators in ``(v^1..v^n, v_1..v_n)`` order."""

    basis: np.ndarray

    def __post_init__(self):
        B = np.array(self.basis, dtype=float)
        if B.ndim != 2 or B.shape[0] != B.shape[1] or B.shape[0] % 2:
            raise LatticeError(f"lattice basis must be 2n x 2n, got shape {B.shape}")
        normalized = B / np.linalg.norm(B, axis=0)
        if abs(np.linalg.det(normalized)) < LATTICE_RANK_TOL:
            raise LatticeError("lattice basis is rank deficient")
        B.setflags(write=False)
        object.__setattr__(self, "basis", B)

    @property
    def n(self) -> int:
        return self.basis.shape[0] // 2

    @classmethod
    def standard(cls, n: int) -> "Lattice":
        return cls(np.eye(2 * n))

    def generator(self, a: int) -> SymplecticVectorReal:
        return SymplecticVectorReal.from_array(self.basis[:, a])


def parse_lattice(text, n: int) -> Lattice:
    """Lattice from ``{"basis": [[...2n reals] x 2n]}`` (one generator per inner list) or ``"standard"``."""
    if isinstance(text, str) and text.strip() == "standard":
        return Lattice.standard(n)
    try:
        doc = json.loads(text) if isinstance(text, (str, bytes)) else text
    except json.JSONDecodeError as exc:
        raise LatticeError(f"malformed lattice document: {exc}") from exc
    if doc == "standard":
        return Lattice.standard(n)
    if not isinstance(doc, dict) or "basis" not in doc:
        raise LatticeError("lattice document needs a 'basis' field")
    if doc["basis"] == "standard":
        return Lattice.standard(n)
    lattice = Lattice(np.array(doc["basis"], dtype=float).T)
    if lattice.n != n:
        raise LatticeError(f"lattice has rank {2 * lattice.n}, expected {2 * n}")
    return lattice


def load_lattice(path, n: int) -> Lattice:
    if path == "standard":
        return Lattice.standard(n)
    with open(path) as fh:
        return parse_lattice(fh.read(), n)


def psi_map(J: PrepotentialJet, v: SymplecticVectorReal) -> np.ndarray:
    """``psi_z(v)_i = -(v_i - sum_j F_ij(z) v^j)``; the action shifts ``w`` by ``i psi``."""
    return -(v.v_down - J.tensor(2) @ v.v_up)


def psi_real_matrix(J: PrepotentialJet) -> np.ndarray:
    """Real ``2n x 2n`` matrix of ``v -> i psi_z(v)`` in ``(Re, Im)`` output coordinates."""
    d = J.dim
    cols = np.empty((d, 2 * d), dtype=complex)
    for a in range(2 * d):
        e = np.zeros(2 * d)
        e[a] = 1.0
        cols[:, a] = 1j * psi_map(J, SymplecticVectorReal.from_array(e))
    return np.vstack([cols.real, cols.imag])


def translate(F: Prepotential, v: SymplecticVectorReal, at: FiberPoint) -> FiberPoint:
    J = jet(F, at.z, order=2)
    return FiberPoint(at.z, at.w + 1j * psi_map(J, v))


def translation_jacobian(J: PrepotentialJet, v: SymplecticVectorReal) -> np.ndarray:
    """Holomorphic Jacobian of the action: ``dw~_i/dz^k = i sum_j F_ijk v^j``."""
    d = J.dim
    Jac = np.eye(2 * d, dtype=complex)
    Jac[d:, :d] = 1j * np.einsum("ijk,j->ik", J.tensor(3), v.v_up)
    return Jac


@dataclass(frozen=True)
class InvarianceReport:
    omega: float
    potential: float
    metric: float


def invariance_check(F: Prepotential, v: SymplecticVectorReal, samples) -> InvarianceReport:
    """Max residuals over ``samples`` of: Omega pullback, potential shift, G pullback.

    The potential is expected to change by ``-2 sum v^j (w_j + wbar_j) + sum g_ij v^i v^j``.
    """
    res_omega = res_pot = res_metric = 0.0
    for at in samples:
        J = jet(F, at.z, order=3)
        d = J.dim
        Jac = translation_jacobian(J, v)
        W = np.block([[np.zeros((d, d)), np.eye(d)], [-np.eye(d), np.zeros((d, d))]])
        res_omega = max(res_omega, float(np.max(np.abs(Jac.T @ W @ Jac - W))))

        moved = FiberPoint(at.z, at.w + 1j * psi_map(J, v))
        g = base_metric(J).g
        s = 2.0 * at.w.real
        expected = -2.0 * v.v_up @ s + v.v_up @ g @ v.v_up
        delta = hk_potential(F, moved) - hk_potential(F, at)
        res_pot = max(res_pot, abs(delta - expected))

        G0 = hk_metric(F, at).matrix
        G1 = hk_metric(F, moved).matrix
        pulled = Jac.T @ G1 @ np.conj(Jac)
        res_metric = max(res_metric, float(np.max(np.abs(pulled - G0))))
    return InvarianceReport(omega=res_omega, potential=res_pot, metric=res_metric)


@dataclass(frozen=True)
class Reduction:
    representative: np.ndarray
    coefficients: np.ndarray


def lattice_image(J: PrepotentialJet, lattice: Lattice) -> np.ndarray:
    """``n x 2n`` complex matrix with columns ``i psi_z(gamma_a)``."""
    return np.column_stack([1j * psi_map(J, lattice.generator(a)) for a in range(2 * lattice.n)])


def lattice_reduce(F: Prepotential, z, lattice: Lattice, w) -> Reduction:
    """Write ``w = representative + i psi_z(sum m_a gamma_a)`` with lattice coordinates of
    the representative in the half-open unit cube."""
    J = jet(F, z, order=2)
    if not general_position_check(J).passed:
        raise LatticeError("psi_z(Gamma) is rank deficient at a degenerate base point")
    P = lattice_image(J, lattice)
    Pr = np.vstack([P.real, P.imag])
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    x = np.linalg.solve(Pr, np.concatenate([w.real, w.imag]))
    nearest = np.round(x)
    x = np.where(np.abs(x - nearest) < REDUCE_SNAP, nearest, x)
    m = np.floor(x).astype(int)
    return Reduction(representative=w - P @ m, coefficients=m)


def periodicity_residual(F: Prepotential, z, lattice: Lattice, w) -> tuple:
    """Compare ``G`` at ``w`` with ``G`` at its lattice reduction.

    The lattice translation moving the representative back to ``w`` has a
    nontrivial ``dz -> dw`` Jacobian, so ``G(w)`` is pulled back before comparing.
    Returns ``(residual, reduction)``.
    """
    red = lattice_reduce(F, z, lattice, w)
    J = jet(F, z, order=3)
    v = SymplecticVectorReal.from_array(lattice.basis @ red.coefficients)
    Jac = translation_jacobian(J, v)
    G_w = hk_metric(F, FiberPoint(z, w)).matrix
    G_rep = hk_metric(F, FiberPoint(z, red.representative)).matrix
    return float(np.max(np.abs(Jac.T @ G_w @ np.conj(Jac) - G_rep))), red


@dataclass(frozen=True)
class DualityReport:
    membership: float
    isometry: float | None


def duality_check(F: Prepotential, A, samples, tol: float = 1e-10) -> DualityReport:
    """Test ``phi = diag(A, A^-T)`` for preserving ``M`` and acting isometrically.

    The isometry residual is only computed when membership holds within ``tol``.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    AinvT = np.linalg.inv(A).T
    member = 0.0
    iso = 0.0
    for z in samples:
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        j0 = jet(F, z, order=2)
        j1 = jet(F, A @ z, order=2)
        member = max(member, float(np.max(np.abs(j1.grad - AinvT @ j0.grad))))
        g0 = 2.0 * j0.hess.imag
        g1 = 2.0 * j1.hess.imag
        iso = max(iso, float(np.max(np.abs(A.T @ g1 @ A - g0))))
    return DualityReport(membership=member, isometry=iso if member <= tol else None)

"""Conic prepotentials on ``C^{n+1}``: affine chart, third fundamental form,
formal-moduli conditions, the projective special-Kaehler form, Hodge data and
intermediate-Jacobian fibers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .base_geometry import gamma_form, gamma_matrix, general_position_check, tangent_frame
from .jets import (
    ORACLE,
    VERY_SPECIAL,
    Prepotential,
    PrepotentialError,
    PrepotentialJet,
    _cubic_terms,
    euler_residual,
    from_oracle,
    jet,
    polynomial,
)
from .symmetry import Lattice, lattice_image

EULER_TOL = 1e-9
PERIOD_RCOND = 1e-8


class ConeConditionError(ValueError):
    """The prepotential is not degree-2 homogeneous at the requested point."""


@dataclass(frozen=True)
class ConeChart:
    F_hat: Prepotential
    q: np.ndarray
    z: np.ndarray
    lowered: Prepotential
    jet: PrepotentialJet

    @property
    def n(self) -> int:
        return len(self.q)


def lift(q) -> np.ndarray:
    return np.concatenate([[1.0 + 0j], np.atleast_1d(np.asarray(q, dtype=complex))])


def lower_prepotential(F_hat: Prepotential) -> Prepotential:
    """``f(q) = F_hat(1, q)`` as a prepotential in ``n`` variables."""
    n = F_hat.dim - 1
    if F_hat.kind == ORACLE:

        def evaluate(q):
            j = jet(F_hat, lift(q), order=F_hat.oracle_order)
            tensors = [j.value] + [j.tensor(k) for k in range(1, F_hat.oracle_order + 1)]
            return [t if k == 0 else t[(slice(1, None),) * k] for k, t in enumerate(tensors)]

        return from_oracle(n, evaluate, F_hat.oracle_order)

    merged = {}
    for c, e in F_hat.terms:
        merged[e[1:]] = merged.get(e[1:], 0j) + c
    if F_hat.kind == VERY_SPECIAL:
        for c, e in _cubic_terms(F_hat.cubic):
            merged[e] = merged.get(e, 0j) + c
    return polynomial(n, [(c, e) for e, c in merged.items() if c != 0 and sum(e) > 0])


def cone_chart(F_hat: Prepotential, q, tol: float = EULER_TOL) -> ConeChart:
    z = lift(q)
    residual = abs(euler_residual(F_hat, z))
    if residual > tol:
        raise ConeConditionError(f"cone condition violated: Euler residual {residual:.3e} at z = {z}")
    lowered = lower_prepotential(F_hat)
    order = min(3, lowered.max_order)
    return ConeChart(F_hat=F_hat, q=z[1:], z=z, lowered=lowered, jet=jet(lowered, z[1:], order=order))


def third_fundamental_form(F_hat: Prepotential, q) -> np.ndarray:
    """Third derivatives ``f_ijk`` of the lowered prepotential at ``q``."""
    if F_hat.kind != VERY_SPECIAL:
        raise PrepotentialError("theta not defined in scalar realization for this kind of cone")
    chart = cone_chart(F_hat, q)
    return np.array(chart.jet.tensor(3))


@dataclass(frozen=True)
class FormalModuliRecord:
    point: np.ndarray
    cone: bool
    positivity: bool
    negativity: bool | None
    eigenvalues: np.ndarray
    euler_residual: float
    gamma_uu: float
    general_position: bool

    @property
    def passed(self) -> bool:
        return bool(self.cone and self.positivity and self.negativity)


def _orthogonal_complement(g: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Columns spanning ``{xi : gamma(xi, u) = 0}`` in the ``d/dz^A`` frame."""
    c = g @ np.conj(z)  # gamma(xi, u) = xi^T g conj(z)
    return scipy.linalg.null_space(c[None, :])


def formal_moduli_check(F_hat: Prepotential, samples, euler_tol: float = EULER_TOL) -> list:
    """Evaluate the three formal-moduli-space conditions at each sample of ``M``'s base."""
    records = []
    for z in samples:
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        J = jet(F_hat, z, order=2)
        euler = abs(euler_residual(F_hat, z))
        gp = general_position_check(J).passed
        g = 2.0 * J.hess.imag
        gamma_uu = float((z @ g @ np.conj(z)).real)
        positivity = gamma_uu > 0
        negativity = None
        eig = np.zeros(0)
        if positivity:
            N = _orthogonal_complement(g, z)
            restricted = N.T @ g @ np.conj(N)
            eig = np.linalg.eigvalsh(0.5 * (restricted + restricted.conj().T))
            negativity = bool(gp and np.all(eig < 0))
        records.append(
            FormalModuliRecord(
                point=z,
                cone=euler <= euler_tol,
                positivity=positivity,
                negativity=negativity,
                eigenvalues=eig,
                euler_residual=euler,
                gamma_uu=gamma_uu,
                general_position=gp,
            )
        )
    return records


def projective_special_metric(u, v) -> float:
    """``gamma(v,v)/gamma(u,u) - |gamma(u,v)/gamma(u,u)|^2`` for ambient ``u``, ``v``."""
    guu = gamma_form(u, u).real
    if abs(guu) < 1e-14 * max(1.0, float(np.vdot(u, u).real)):
        raise ZeroDivisionError("gamma(u, u) vanishes")
    return float(gamma_form(v, v).real / guu - abs(gamma_form(u, v) / guu) ** 2)


@dataclass(frozen=True)
class HodgeDecomposition:
    u: np.ndarray
    H30: np.ndarray
    H21: np.ndarray
    H12: np.ndarray
    H03: np.ndarray

    @property
    def stacked(self) -> np.ndarray:
        return np.column_stack([self.H30, self.H21, self.H12, self.H03])


def hodge_structure(F_hat: Prepotential, z) -> HodgeDecomposition:
    """``H30 = C u``, ``H21 = T_uM cap u^perp`` and their conjugates at ``u = (z, grad F(z))``."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    record = formal_moduli_check(F_hat, [z])[0]
    if not record.passed:
        raise ValueError(f"formal moduli conditions fail at z = {z}")
    J = jet(F_hat, z, order=2)
    u = np.concatenate([z, J.grad])
    frame = tangent_frame(J)  # ambient images of d/dz^A
    g = 2.0 * J.hess.imag
    N = _orthogonal_complement(g, z)
    # Gram-Schmidt against -gamma, which is positive definite on H21
    Hg = gamma_matrix(len(z))
    basis = []
    for col in (frame @ N).T:
        v = col.copy()
        for e in basis:
            v = v - (v @ Hg @ np.conj(e)) / (e @ Hg @ np.conj(e)) * e
        v = v / np.sqrt(-(v @ Hg @ np.conj(v)).real)
        basis.append(v)
    H21 = np.column_stack(basis)
    return HodgeDecomposition(u=u, H30=u[:, None], H21=H21, H12=np.conj(H21), H03=np.conj(u)[:, None])


@dataclass(frozen=True)
class JacobianFiber:
    z: np.ndarray
    lattice_image: np.ndarray
    real_rank: int
    period_matrix: np.ndarray | None
    rcond: float


def jacobian_fiber(F: Prepotential, z, lattice: Lattice, rcond: float = PERIOD_RCOND) -> JacobianFiber:
    """Lattice image ``i psi_z(Gamma)`` in ``T*_zM`` and its normalized period matrix."""
    J = jet(F, z, order=2)
    if not general_position_check(J).passed:
        raise ValueError("base point is not in general position")
    P = lattice_image(J, lattice)
    d = J.dim
    rank = int(np.linalg.matrix_rank(np.vstack([P.real, P.imag])))
    if rank < 2 * d:
        raise ValueError(f"lattice image has real rank {rank} < {2 * d}")
    P1, P2 = P[:, :d], P[:, d:]
    rc = 1.0 / np.linalg.cond(P1)
    period = np.linalg.solve(P1, P2) if rc >= rcond else None
    return JacobianFiber(z=J.z, lattice_image=P, real_rank=rank, period_matrix=period, rcond=float(rc))

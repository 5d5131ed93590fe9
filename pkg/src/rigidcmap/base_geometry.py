"""Ambient symplectic data on ``T*C^n`` and the induced geometry of ``M = image(dF)``.

Coordinates on the ambient space are ``(q^1..q^n, p_1..p_n)`` with
``omega = sum dq^i ^ dp_i`` and ``tau`` componentwise complex conjugation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .jets import Prepotential, PrepotentialJet, jet

DEGENERACY_RATIO = 1e-10


class NondegenerateCheckFailed(ValueError):
    """The induced metric ``g = 2 Im F_ij`` is (numerically) degenerate."""


@dataclass(frozen=True)
class AmbientPoint:
    q: np.ndarray
    p: np.ndarray

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.q, self.p])


@dataclass(frozen=True)
class BaseMetric:
    z: np.ndarray
    g: np.ndarray
    g_inv: np.ndarray
    signature: tuple


def _as_vector(u) -> np.ndarray:
    if isinstance(u, AmbientPoint):
        return u.vector
    return np.asarray(u, dtype=complex)


def signature(matrix: np.ndarray, rtol: float = 0.0) -> tuple:
    """Counts of positive and negative eigenvalues of a Hermitian matrix."""
    ev = np.linalg.eigvalsh(matrix)
    cut = rtol * np.max(np.abs(ev)) if ev.size else 0.0
    return int(np.sum(ev > cut)), int(np.sum(ev < -cut))


def embed_point(F: Prepotential, z) -> AmbientPoint:
    """The point ``(z, grad F(z))`` of ``M``."""
    j = jet(F, z, order=1)
    return AmbientPoint(q=j.z, p=np.array(j.grad))


def omega(u, v) -> complex:
    """Standard complex symplectic form ``sum q^i p'_i - p_i q'^i``."""
    u, v = _as_vector(u), _as_vector(v)
    n = len(u) // 2
    return complex(np.dot(u[:n], v[n:]) - np.dot(u[n:], v[:n]))


def gamma_form(u, v) -> complex:
    """``gamma(u, v) = i * omega(u, conj(v))``; Hermitian of signature (n, n)."""
    return 1j * omega(u, np.conj(_as_vector(v)))


def gamma_matrix(n: int) -> np.ndarray:
    """Hermitian matrix ``Hg`` with ``gamma(u, v) = u^T Hg conj(v)``."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, 1j * eye], [-1j * eye, zero]])


def base_metric(J: PrepotentialJet, ratio: float = DEGENERACY_RATIO) -> BaseMetric:
    """``g_ij = i (conj F_ij - F_ij) = 2 Im F_ij`` with inverse and signature.

    Raises
    ------
    NondegenerateCheckFailed
        If ``min |eigenvalue| / max |eigenvalue|`` of ``g`` falls below ``ratio``.
    """
    F2 = J.tensor(2)
    g = 2.0 * F2.imag
    ev = np.linalg.eigvalsh(g)
    top = np.max(np.abs(ev))
    if top == 0 or np.min(np.abs(ev)) / top < ratio:
        raise NondegenerateCheckFailed(f"base metric is degenerate at z = {J.z}")
    g_inv = np.linalg.inv(g)
    g_inv = 0.5 * (g_inv + g_inv.T)
    return BaseMetric(z=J.z, g=g, g_inv=g_inv, signature=(int(np.sum(ev > 0)), int(np.sum(ev < 0))))


def base_potential(F: Prepotential, z) -> float:
    """``K^M(z) = i sum (z^i conj F_i - conj z^i F_i)``."""
    j = jet(F, z, order=1)
    value = 1j * (np.dot(j.z, np.conj(j.grad)) - np.dot(np.conj(j.z), j.grad))
    return float(value.real)


@dataclass(frozen=True)
class GeneralPositionReport:
    passed: bool
    min_singular_value: float


def general_position_check(J: PrepotentialJet, ratio: float = DEGENERACY_RATIO) -> GeneralPositionReport:
    """Whether ``T_mM`` and ``tau T_mM`` are transverse, i.e. ``Im F_ij`` is invertible."""
    sv = np.linalg.svd(J.tensor(2).imag, compute_uv=False)
    smallest = float(sv[-1])
    passed = bool(sv[0] > 0 and smallest / sv[0] >= ratio)
    return GeneralPositionReport(passed=passed, min_singular_value=smallest)


def tangent_frame(J: PrepotentialJet) -> np.ndarray:
    """Columns ``(e_i, F_i.)`` spanning ``T_mM`` inside the ambient space."""
    return np.vstack([np.eye(J.dim), J.tensor(2)])


def lagrangean_residual(J: PrepotentialJet) -> float:
    """Max ``|omega(t_i, t_j)|`` over the tangent frame."""
    T = tangent_frame(J)
    n = J.dim
    W = np.block([[np.zeros((n, n)), np.eye(n)], [-np.eye(n), np.zeros((n, n))]])
    return float(np.max(np.abs(T.T @ W @ T)))

"""The rigid c-map: the hyper-Kaehler metric on ``T*M`` built from a prepotential.

Coordinates on ``T*M`` are ``(z^1..z^n, w_1..w_n)``; combined indices run over
the unprimed block first and the primed (fiber) block second. All metric
entries follow ``G_IJ = d^2 K / dz^I dzbar^J``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fd
from .base_geometry import BaseMetric, base_metric, base_potential, signature
from .jets import JetOrderError, Prepotential, PrepotentialJet, jet

# Re G gives J2^2 = -Id / 2 for the potential normalization K^M + g^{-1}(w + wbar, w + wbar);
# the triple is rescaled by sqrt(2) so the J_a square to -Id exactly.
TRIPLE_SCALE = np.sqrt(2.0)


@dataclass(frozen=True)
class FiberPoint:
    z: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "z", np.atleast_1d(np.asarray(self.z, dtype=complex)))
        object.__setattr__(self, "w", np.atleast_1d(np.asarray(self.w, dtype=complex)))
        if self.z.shape != self.w.shape:
            raise ValueError("base and fiber coordinates must have equal length")

    @property
    def coords(self) -> np.ndarray:
        return np.concatenate([self.z, self.w])

    @classmethod
    def from_coords(cls, x) -> "FiberPoint":
        x = np.asarray(x, dtype=complex)
        d = len(x) // 2
        return cls(x[:d], x[d:])


@dataclass(frozen=True)
class HermitianBlockMetric:
    """``G = [[A, B^T], [conj(B), C]]`` with ``B[i, j] = G_{j i'}``."""

    at: FiberPoint
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    signature: tuple

    @property
    def matrix(self) -> np.ndarray:
        return np.block([[self.A, self.B.T], [np.conj(self.B), self.C]])


@dataclass(frozen=True)
class ChristoffelTensor:
    """``entries[I, J, K] = Gamma^I_{JK}``."""

    at: FiberPoint
    entries: np.ndarray

    @property
    def dim(self) -> int:
        return self.entries.shape[0] // 2


def _fiber_jet(F: Prepotential, at: FiberPoint, order: int) -> PrepotentialJet:
    if len(at.z) != F.dim:
        raise ValueError(f"fiber point has {len(at.z)} base coordinates, prepotential expects {F.dim}")
    if order > F.max_order:
        raise JetOrderError(f"need derivatives to order {order}, prepotential supplies {F.max_order}")
    return jet(F, at.z, order=order)


def hk_potential(F: Prepotential, at: FiberPoint) -> float:
    """``K = K^M(z) + sum g^{ij} (w_i + wbar_i)(w_j + wbar_j)``."""
    base = base_metric(_fiber_jet(F, at, 2))
    s = 2.0 * at.w.real
    return base_potential(F, at.z) + float(s @ base.g_inv @ s)


def _contract(a: np.ndarray, T: np.ndarray) -> np.ndarray:
    """``sum_p a_p T[p, ...]``."""
    return np.tensordot(a, T, axes=(0, 0))


class _Blocks:
    """Pieces of G at one point: ``A = g + 2 M H Mbar``, ``B^T = 2i M H``, ``C = 2H``.

    Here ``H = g^{-1}``, ``s = w + wbar``, ``a = H s`` and ``M = sum_p a_p F_p..``.
    """

    def __init__(self, J: PrepotentialJet, s: np.ndarray):
        self.base = base_metric(J)
        self.g = self.base.g
        self.H = self.base.g_inv
        self.F3 = J.tensor(3)
        self.F3bar = np.conj(self.F3)
        self.s = s
        self.a = self.H @ s
        self.M = _contract(self.a, self.F3)
        self.Mbar = _contract(self.a, self.F3bar)

    def assemble(self):
        H, M, Mbar = self.H, self.M, self.Mbar
        A = self.g + 2.0 * M @ H @ Mbar
        top_right = 2j * M @ H
        C = 2.0 * H
        return A, top_right.T, C


def hk_metric(F: Prepotential, at: FiberPoint) -> HermitianBlockMetric:
    """Block form of ``G`` from the jet of ``F`` to third order."""
    blocks = _Blocks(_fiber_jet(F, at, 3), 2.0 * at.w.real)
    A, B, C = blocks.assemble()
    G = np.block([[A, B.T], [np.conj(B), C]])
    return HermitianBlockMetric(at=at, A=A, B=B, C=C, signature=signature(G))


def hk_metric_inverse(Gb: HermitianBlockMetric, base: BaseMetric) -> np.ndarray:
    """Closed form ``[[g^-1, -b/2], [-conj(b)^T/2, (g + conj(b)^T g b / 2)/2]]``."""
    b = Gb.B
    g, H = base.g, base.g_inv
    bbar_t = np.conj(b).T
    return np.block([[H, -0.5 * b], [-0.5 * bbar_t, 0.5 * (g + 0.5 * bbar_t @ g @ b)]])


def metric_derivatives(F: Prepotential, at: FiberPoint) -> np.ndarray:
    """Holomorphic derivatives ``dG[K, J, L] = d G_JL / dz^K`` from the order-4 jet."""
    J = _fiber_jet(F, at, 4)
    blk = _Blocks(J, 2.0 * at.w.real)
    H, M, Mbar, F3, F3bar = blk.H, blk.M, blk.Mbar, blk.F3, blk.F3bar
    F4 = J.tensor(4)
    d = J.dim
    out = np.zeros((2 * d, 2 * d, 2 * d), dtype=complex)

    def pack(dA, dTR, dBL, dC):
        return np.block([[dA, dTR], [dBL, dC]])

    a_F4 = _contract(blk.a, F4)  # sum_p a_p F_pijk
    for k in range(d):
        # base direction z^k: dH = i H F_k H, dg = -i F_k
        dH = 1j * H @ F3[k] @ H
        da = dH @ blk.s
        dM = _contract(da, F3) + a_F4[:, :, k]
        dMbar = _contract(da, F3bar)
        dA = -1j * F3[k] + 2.0 * (dM @ H @ Mbar + M @ dH @ Mbar + M @ H @ dMbar)
        dTR = 2j * (dM @ H + M @ dH)
        dBL = -2j * (dH @ Mbar + H @ dMbar)
        out[k] = pack(dA, dTR, dBL, 2.0 * dH)
    zero = np.zeros((d, d))
    for k in range(d):
        # fiber direction w_k: only s moves, ds = e_k
        da = H[:, k]
        dM = _contract(da, F3)
        dMbar = _contract(da, F3bar)
        dA = 2.0 * (dM @ H @ Mbar + M @ H @ dMbar)
        out[d + k] = pack(dA, 2j * dM @ H, -2j * H @ dMbar, zero)
    return out


def christoffel(F: Prepotential, at: FiberPoint) -> ChristoffelTensor:
    """``Gamma^I_{JK} = sum_L G^{LI} G_{JL,K}`` from analytic derivatives of ``G``."""
    Gb = hk_metric(F, at)
    Ginv = np.linalg.inv(Gb.matrix)
    dG = metric_derivatives(F, at)
    entries = np.einsum("li,kjl->ijk", Ginv, dG)
    return ChristoffelTensor(at=at, entries=entries)


@dataclass(frozen=True)
class ParallelReport:
    max_residual_i: float
    max_residual_ii: float


def parallel_symplectic_check(Gamma: ChristoffelTensor) -> ParallelReport:
    """Deviation from the symmetries equivalent to ``nabla Omega = 0``.

    (i)  ``Gamma^i_{Jk} = -Gamma^{k'}_{Ji'}``
    (ii) ``Gamma^i_{Jk'} = Gamma^k_{Ji'}`` and ``Gamma^{i'}_{Jk} = Gamma^{k'}_{Ji}``
    """
    G = Gamma.entries
    d = Gamma.dim
    lo, hi = slice(0, d), slice(d, 2 * d)
    # G[I, J, K] -> rearrange to [i, J, k] blocks
    uu = G[lo, :, lo]  # Gamma^i_{Jk}
    pp = G[hi, :, hi]  # Gamma^{i'}_{Jk'}
    up = G[lo, :, hi]  # Gamma^i_{Jk'}
    pu = G[hi, :, lo]  # Gamma^{i'}_{Jk}
    swap = (2, 1, 0)
    res_i = uu + np.transpose(pp, swap)
    res_ii = np.concatenate(
        [(up - np.transpose(up, swap)).ravel(), (pu - np.transpose(pu, swap)).ravel()]
    )
    return ParallelReport(float(np.max(np.abs(res_i))), float(np.max(np.abs(res_ii))))


def real_basis_map(d: int) -> np.ndarray:
    """``E`` with complex coordinates ``= E @ x`` for ``x = (Re z, Im z, Re w, Im w)``."""
    eye = np.eye(d)
    zero = np.zeros((d, d))
    return np.block([[eye, 1j * eye, zero, zero], [zero, zero, eye, 1j * eye]])


def real_metric(Gb: HermitianBlockMetric) -> np.ndarray:
    """``<x, y> = Re G(x, y)`` as a real symmetric ``4n x 4n`` matrix."""
    E = real_basis_map(len(Gb.at.z))
    Gr = (E.T @ Gb.matrix @ np.conj(E)).real
    return 0.5 * (Gr + Gr.T)


def hypercomplex_triple(Gb: HermitianBlockMetric):
    """``(J1, J2, J3)`` as real matrices in the basis ``(Re z, Im z, Re w, Im w)``.

    ``J1`` is multiplication by ``i``; ``J2`` and ``J3`` solve
    ``<J2 v, w> + i <J3 v, w> = sqrt(2) Omega(v, w)`` with
    ``Omega = sum dz^i ^ dw_i`` and ``<.,.> = Re G``.
    """
    d = len(Gb.at.z)
    E = real_basis_map(d)
    Gr = real_metric(Gb)
    if np.linalg.matrix_rank(Gr) < 4 * d:
        raise np.linalg.LinAlgError("real part of G is singular")
    eye = np.eye(d)
    zero = np.zeros((d, d))
    W = np.block([[zero, eye], [-eye, zero]])
    Om = E.T @ W @ E
    Ginv = np.linalg.inv(Gr)
    # <J v, w> = v^T J^T Gr w = v^T Omr w  =>  J = Gr^-1 Omr^T = -Gr^-1 Omr
    J2 = -TRIPLE_SCALE * Ginv @ Om.real
    J3 = -TRIPLE_SCALE * Ginv @ Om.imag
    block_i = np.block([[zero, -eye], [eye, zero]])
    J1 = np.kron(np.eye(2), block_i)
    return J1, J2, J3


def quaternion_residuals(J1, J2, J3, Gr) -> dict:
    """Max-abs deviations from the quaternion relations and metric compatibility."""
    I = np.eye(J1.shape[0])

    def m(x):
        return float(np.max(np.abs(x)))

    return {
        "square": max(m(J @ J + I) for J in (J1, J2, J3)),
        "product": max(m(J1 @ J2 - J3), m(J2 @ J1 + J3)),
        "compatibility": max(m(J.T @ Gr @ J - Gr) for J in (J1, J2, J3)),
    }


def curvature(F: Prepotential, at: FiberPoint, h: float = 1e-4) -> np.ndarray:
    """``R[I, J, K, L] = -d Gamma^I_{JK} / dzbar^L`` by central differences."""
    x = at.coords

    def gamma_at(y):
        return christoffel(F, FiberPoint.from_coords(y)).entries

    m = len(x)
    R = np.empty((m, m, m, m), dtype=complex)
    for L in range(m):
        R[..., L] = -fd.antiholomorphic_derivative(gamma_at, x, L, h=h)
    return R

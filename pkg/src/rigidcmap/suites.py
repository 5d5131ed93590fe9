"""Per-point verification suites run by ``cmap check``."""

from __future__ import annotations

import numpy as np

from . import fd
from .base_geometry import NondegenerateCheckFailed, base_metric, general_position_check
from .cmap import (
    FiberPoint,
    christoffel,
    hk_metric,
    hk_metric_inverse,
    hk_potential,
    hypercomplex_triple,
    parallel_symplectic_check,
    quaternion_residuals,
    real_metric,
)
from .jets import Prepotential, jet
from .report import CheckRecord
from .symmetry import Lattice, SymplecticVectorReal, invariance_check, lattice_reduce, periodicity_residual

SUITES = (
    "hessian",
    "hermitian",
    "inverse",
    "parallel",
    "quaternion",
    "translation",
    "periodicity",
)

DEFAULT_TOLERANCES = {
    "general_position": 1e10,
    "hessian": 1e-6,
    "hermitian": 1e-12,
    "inverse": 1e-10,
    "parallel_i": 1e-8,
    "parallel_ii": 1e-8,
    "quaternion_square": 1e-9,
    "quaternion_product": 1e-9,
    "quaternion_compatibility": 1e-9,
    "translation_omega": 1e-12,
    "translation_potential": 1e-10,
    "translation_metric": 1e-10,
    "periodicity": 1e-10,
    "reduction_idempotence": 0.0,
}


def hessian_residual(F: Prepotential, at: FiberPoint, h: float = 1e-4) -> float:
    """Relative max deviation of the finite-difference Hessian of ``K`` from ``G``."""
    G = hk_metric(F, at).matrix
    H = fd.wirtinger_hessian(lambda x: hk_potential(F, FiberPoint.from_coords(x)), at.coords, h=h)
    return float(np.max(np.abs(H - G)) / np.max(np.abs(G)))


def translation_vector(seed: int, index: int, n: int, scale: float = 1.0) -> SymplecticVectorReal:
    rng = np.random.default_rng([seed, index])
    return SymplecticVectorReal.from_array(scale * rng.uniform(-1.0, 1.0, 2 * n))


def run_point(
    F: Prepotential,
    at: FiberPoint,
    index: int,
    suites=SUITES,
    tolerances=None,
    lattice: Lattice | None = None,
    seed: int = 0,
) -> list:
    """All selected checks at one fiber point, as :class:`CheckRecord` values."""
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    recs = []

    def add(name, residual, **detail):
        recs.append(CheckRecord(name, index, float(residual), tol[name], detail))

    J = jet(F, at.z, order=min(4, F.max_order))
    # residual is the condition number of Im F_ij; the default cap mirrors the 1e-10 ratio
    gp = general_position_check(J, ratio=1.0 / tol["general_position"])
    sv = np.linalg.svd(J.tensor(2).imag, compute_uv=False)
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else float("inf")
    add("general_position", cond, min_singular_value=gp.min_singular_value)
    if not gp.passed:
        return recs
    try:
        base = base_metric(J)
    except NondegenerateCheckFailed:
        recs[-1].residual = float("inf")
        return recs

    Gb = hk_metric(F, at)
    G = Gb.matrix
    d = len(at.z)
    if "hessian" in suites:
        add("hessian", hessian_residual(F, at))
    if "hermitian" in suites:
        add("hermitian", np.max(np.abs(G - G.conj().T)))
    if "inverse" in suites:
        add("inverse", np.max(np.abs(G @ hk_metric_inverse(Gb, base) - np.eye(2 * d))))
    if "parallel" in suites:
        rep = parallel_symplectic_check(christoffel(F, at))
        add("parallel_i", rep.max_residual_i)
        add("parallel_ii", rep.max_residual_ii)
    if "quaternion" in suites:
        q = quaternion_residuals(*hypercomplex_triple(Gb), real_metric(Gb))
        for key, value in q.items():
            add(f"quaternion_{key}", value)
    if "translation" in suites:
        v = translation_vector(seed, index, d)
        rep = invariance_check(F, v, [at])
        add("translation_omega", rep.omega, v=v.array)
        add("translation_potential", rep.potential, v=v.array)
        add("translation_metric", rep.metric, v=v.array)
    if "periodicity" in suites:
        lat = lattice if lattice is not None else Lattice.standard(d)
        residual, red = periodicity_residual(F, at.z, lat, at.w)
        add("periodicity", residual, coefficients=red.coefficients)
        again = lattice_reduce(F, at.z, lat, red.representative)
        add("reduction_idempotence", np.max(np.abs(again.coefficients)))
    return recs

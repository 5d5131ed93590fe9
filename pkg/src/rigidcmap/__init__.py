"""Numerical rigid c-map: hyper-Kaehler metrics on T*M from holomorphic prepotentials."""

from .base_geometry import (
    AmbientPoint,
    BaseMetric,
    NondegenerateCheckFailed,
    base_metric,
    base_potential,
    embed_point,
    gamma_form,
    general_position_check,
)
from .cmap import (
    ChristoffelTensor,
    FiberPoint,
    HermitianBlockMetric,
    christoffel,
    curvature,
    hk_metric,
    hk_metric_inverse,
    hk_potential,
    hypercomplex_triple,
    parallel_symplectic_check,
)
from .jets import Prepotential, PrepotentialJet, euler_residual, jet, parse_prepotential
from .moduli import (
    cone_chart,
    formal_moduli_check,
    hodge_structure,
    jacobian_fiber,
    projective_special_metric,
    third_fundamental_form,
)
from .symmetry import (
    Lattice,
    SymplecticVectorReal,
    duality_check,
    invariance_check,
    lattice_reduce,
    psi_map,
    translate,
)

__version__ = "0.1.0"

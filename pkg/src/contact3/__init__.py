"""Left-invariant geometry of 3D non-unimodular metric Lie algebras.

Builds the algebras in their adapted orthonormal basis, enumerates unit
geodesic vectors in closed form (with a brute-force sphere-scan oracle),
constructs and classifies almost contact metric structures whose Reeb
vector is annihilated by d(eta), and decides contact and normality
conditions numerically.
"""

from .lie_core import (
    LieAlgebra3,
    LinearFunctional,
    MilnorParameters,
    ad_matrix,
    bracket,
    canonical_L_action,
    from_functional,
    from_milnor,
    invariant_D,
    is_unimodular,
    jacobi_residual,
    milnor_invariant_D,
    pqr_from_milnor,
    unimodular_kernel,
)
from .metric_geometry import (
    CircleFamily,
    GeodesicEnumeration,
    Metric3,
    enumerate_unit_geodesics,
    geodesic_brute_force,
    geodesic_defect,
    is_geodesic_vector,
    levi_civita,
    sectional_curvature,
    inplane_geodesic_angles,
)
from .contact_structures import (
    AlmostContactStructure,
    PhiBasis,
    build_structure,
    check_ker_condition,
    d_eta,
    fundamental_two_form,
    is_contact_form,
    is_contact_metric,
    lie_derivative_eta,
    nijenhuis_normality_residual,
    structure_from_basis,
    xi_in_ker_deta,
)
from .classification import (
    AdmissibilityError,
    ClassificationReport,
    NotGeodesicError,
    PhiBasisStructure,
    classify,
    classify_representatives,
    construct_case1,
    construct_case2,
    construct_case3,
    construct_case4,
    construct_case5,
    construct_case6,
    is_isomorphic,
    normal_scan,
)
from .tolerances import default_tol

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityError",
    "AlmostContactStructure",
    "CircleFamily",
    "ClassificationReport",
    "GeodesicEnumeration",
    "NotGeodesicError",
    "LieAlgebra3",
    "LinearFunctional",
    "Metric3",
    "MilnorParameters",
    "PhiBasis",
    "PhiBasisStructure",
    "ad_matrix",
    "bracket",
    "build_structure",
    "canonical_L_action",
    "check_ker_condition",
    "classify",
    "classify_representatives",
    "construct_case1",
    "construct_case2",
    "construct_case3",
    "construct_case4",
    "construct_case5",
    "construct_case6",
    "d_eta",
    "default_tol",
    "enumerate_unit_geodesics",
    "from_functional",
    "from_milnor",
    "fundamental_two_form",
    "geodesic_brute_force",
    "geodesic_defect",
    "invariant_D",
    "is_contact_form",
    "is_contact_metric",
    "is_geodesic_vector",
    "is_isomorphic",
    "is_unimodular",
    "jacobi_residual",
    "levi_civita",
    "lie_derivative_eta",
    "milnor_invariant_D",
    "nijenhuis_normality_residual",
    "normal_scan",
    "pqr_from_milnor",
    "sectional_curvature",
    "inplane_geodesic_angles",
    "structure_from_basis",
    "unimodular_kernel",
    "xi_in_ker_deta",
]

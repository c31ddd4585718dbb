"""Volumes of differentiable stacks presented by groupoids.

Exact big-integer rational volumes for finite groupoids, including
Morita-equivalence transfer through linking groupoids, plus numerical
volumes and orbit-space densities for a fixed catalog of analytic
Lie-groupoid models.
"""

from .catalog import CATALOG, build_model
from .errors import (
    NumericalFailure,
    SchemaError,
    StackVolError,
    ValidationFailure,
    ValidationReport,
    Violation,
)
from .families import (
    CriticalPointError,
    PoissonFamilyModel,
    SymplecticModel,
    leaf_measure_product,
    natural_leaf_measure,
    poisson_stack_density,
    symplectic_bk_volume,
)
from .finite import (
    FiniteGroupoid,
    Orbit,
    OrbitDecomposition,
    WeightData,
    action_groupoid,
    block_groupoid,
    cardinality,
    classifying_groupoid,
    disjoint_union,
    empty_groupoid,
    fiber_volume,
    finite_sets_cardinality,
    invariant_section,
    orbit_set_measure,
    orbit_volume,
    orbits,
    pair_groupoid,
    random_groupoid,
    random_invariant_weights,
    random_positive_rescaling,
    restrict_to_objects,
    validate,
)
from .groups import FiniteGroup, group_zoo
from .morita import (
    Bibundle,
    MoritaVolumeReport,
    block_bibundle,
    compose_bibundles,
    extend_invariant_section,
    identity_bibundle,
    linking_groupoid,
    morita_volume_check,
    random_morita_triple,
    random_morita_weights,
    restrict_full,
    transfer_section,
    validate_bibundle,
)
from .quadrature import (
    NonConvergenceError,
    QuadratureResult,
    integrate_1d,
    integrate_box,
    integrate_disk,
    integrate_mc,
)
from .smooth import (
    ActionModel,
    BoxChart,
    GroupModel,
    OrbitChart,
    PointChart,
    check_invariance,
    fiber_integral,
    finite_action_model,
    group_volume,
    homogeneous_volume,
    pushforward_density,
    stack_volume,
    stack_volume_vs_pushforward,
)
from .su2 import (
    CartanData,
    adjoint_orbit_density,
    gaussian_test_function,
    su2_cartan,
    weyl_integration_check,
)

__version__ = "0.1.0"

__all__ = [
    "ActionModel",
    "Bibundle",
    "BoxChart",
    "CATALOG",
    "CartanData",
    "CriticalPointError",
    "FiniteGroup",
    "FiniteGroupoid",
    "GroupModel",
    "MoritaVolumeReport",
    "NonConvergenceError",
    "NumericalFailure",
    "Orbit",
    "OrbitChart",
    "OrbitDecomposition",
    "PointChart",
    "PoissonFamilyModel",
    "QuadratureResult",
    "SchemaError",
    "StackVolError",
    "SymplecticModel",
    "ValidationFailure",
    "ValidationReport",
    "Violation",
    "WeightData",
    "action_groupoid",
    "adjoint_orbit_density",
    "block_bibundle",
    "block_groupoid",
    "build_model",
    "cardinality",
    "check_invariance",
    "classifying_groupoid",
    "compose_bibundles",
    "disjoint_union",
    "empty_groupoid",
    "extend_invariant_section",
    "fiber_integral",
    "fiber_volume",
    "finite_action_model",
    "finite_sets_cardinality",
    "gaussian_test_function",
    "group_volume",
    "group_zoo",
    "homogeneous_volume",
    "identity_bibundle",
    "integrate_1d",
    "integrate_box",
    "integrate_disk",
    "integrate_mc",
    "invariant_section",
    "leaf_measure_product",
    "linking_groupoid",
    "morita_volume_check",
    "natural_leaf_measure",
    "orbit_set_measure",
    "orbit_volume",
    "orbits",
    "pair_groupoid",
    "poisson_stack_density",
    "pushforward_density",
    "random_groupoid",
    "random_invariant_weights",
    "random_morita_triple",
    "random_morita_weights",
    "random_positive_rescaling",
    "restrict_full",
    "restrict_to_objects",
    "stack_volume",
    "stack_volume_vs_pushforward",
    "su2_cartan",
    "symplectic_bk_volume",
    "transfer_section",
    "validate",
    "validate_bibundle",
    "weyl_integration_check",
]

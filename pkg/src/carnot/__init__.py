"""Lie algebra cohomology, Rumin complex and Hoelder exponent bounds for Carnot groups."""

__version__ = "carnot-bounds/1"

from .algebra import (AlgebraSpec, CarnotAlgebra, builtin, hausdorff_dimension, load,
                      parse_spec, serialize, validate)
from .bounds import BoundsReport, holder_report, weight_invariant_lower
from .cohomology import CohomologyTable, closed_one_forms, compute_cohomology, verify_duality
from .exterior import Form, ce_differential, hodge_star, wedge
from .isotropic import (HorizontalSubspace, dimension_check, is_isotropic, is_regular,
                        model_form, random_search, theta_data)
from .rumin import RuminData, build_rumin, verify_rumin_identities

__all__ = [
    "AlgebraSpec", "BoundsReport", "CarnotAlgebra", "CohomologyTable", "Form",
    "HorizontalSubspace", "RuminData", "build_rumin", "builtin", "ce_differential",
    "closed_one_forms", "compute_cohomology", "dimension_check", "hausdorff_dimension",
    "hodge_star", "holder_report", "is_isotropic", "is_regular", "load", "model_form",
    "parse_spec", "random_search", "serialize", "theta_data", "validate",
    "verify_duality", "verify_rumin_identities", "wedge", "weight_invariant_lower",
]

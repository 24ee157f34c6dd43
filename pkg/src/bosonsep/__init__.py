"""Rank-one properties and degrees of separability of two- and three-boson pure states."""

from .catalog import ENTRIES, catalog_state
from .classify import (
    ClassificationReport,
    SeparabilityClass,
    TwoBosonClass,
    TwoBosonReport,
    classify,
    classify_two_boson,
    taxonomy_from_gram,
)
from .decompose import (
    ConstituentTriple,
    GramRelation,
    NoTriple,
    TwoBosonVerdict,
    constituent_triple,
    extract_cofactor,
    sym_product_fit,
    takagi,
    takagi_factorize,
)
from .exceptions import BosonSepError
from .properties import ExpectationProfile, at_least_one, expectation_profile, residual_objective
from .propsearch import PropertySet, SearchConfig, find_properties, find_property_in_subspace, majorana_roots
from .symstate import (
    BosonicPureState,
    TwoBosonState,
    change_basis,
    from_matrix,
    partial_trace_one,
    sym_product,
    symmetrize,
)

__version__ = "0.1.0"

__all__ = [
    "BosonSepError",
    "BosonicPureState",
    "ClassificationReport",
    "ConstituentTriple",
    "ENTRIES",
    "ExpectationProfile",
    "GramRelation",
    "NoTriple",
    "PropertySet",
    "SearchConfig",
    "SeparabilityClass",
    "TwoBosonClass",
    "TwoBosonReport",
    "TwoBosonState",
    "TwoBosonVerdict",
    "at_least_one",
    "catalog_state",
    "change_basis",
    "classify",
    "classify_two_boson",
    "constituent_triple",
    "expectation_profile",
    "extract_cofactor",
    "find_properties",
    "find_property_in_subspace",
    "from_matrix",
    "majorana_roots",
    "partial_trace_one",
    "residual_objective",
    "sym_product",
    "sym_product_fit",
    "symmetrize",
    "takagi",
    "takagi_factorize",
    "taxonomy_from_gram",
]

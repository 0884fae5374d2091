"""Coherent configurations: WL closure, Cartan schemes, structure checks and recognition."""

from .analysis import (
    BaseNumber,
    Indistinguishing,
    SAlphaGraph,
    SeparabilityCertificate,
    SMax,
    StructureReport,
    base_number,
    component_sets,
    criterion_report,
    indistinguishing_numbers,
    pu_profile,
    pu_table,
    salpha_graph,
    separability_certificate,
    smax_relation,
)
from .cartan import CartanSchemeBundle, SpecialRelations, build_sl2, cartan_scheme, generic_scheme
from .core import (
    BudgetExceeded,
    CoherentConfiguration,
    ColoredGraph,
    InputError,
    IntersectionTensor,
    ViolationReport,
    complete_configuration,
    cycle_graph,
    fibers,
    intersection_tensor,
    is_homogeneous,
    is_one_regular,
    regular_points,
    trivial_configuration,
    valencies,
    verify_coherence,
)
from .fields import FiniteField, finite_field
from .lie import LieBoundReport, family_data, lie_bound_check, lie_order, order_candidates
from .permgroup import (
    CosetAction,
    PermutationGroup,
    chi_via_formula,
    closure,
    coset_action,
    double_cosets,
    group_indistinguishing,
    inv_config,
    is_simple,
    permutation_character,
    relation_coset_bijection,
    sylow_subgroup,
)
from .recognition import IsoResult, RecognitionReport, aut_group, iso_graphs, iso_set, recognize_cartan
from .wl import RefinementTrace, compatible_closure, m_extension, point_extension, wl_closure

__version__ = "0.1.0"

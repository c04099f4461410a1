"""Finite groupoids, their transition algebras, proposition lattices,
states and dynamics."""

from .groupoid import (
    Groupoid,
    OrbitDecomposition,
    Transition,
    ValidationReport,
    Violation,
    cyclic_group,
    direct_product,
    discrete_groupoid,
    disjoint_union,
    group_groupoid,
    has_abelian_isotropy,
    is_totally_disconnected,
    orbit_decomposition,
    pair_groupoid,
    symmetric_group,
    validate,
)
from .algebra import (
    FUNDAMENTAL,
    LEFT_REGULAR,
    AlgebraElement,
    Operator,
    algebra_basis,
    commutant,
    double_commutant_dimension,
    fundamental,
    is_abelian,
    isotropy_character_table,
    character_diagonalization,
    left_regular,
    multiply,
    involution,
    operator_norm,
    product_transition,
    representation_matrix,
    span_dimension,
    tensor_embed,
    unit_element,
)
from .lattice import (
    CertificationError,
    ClassicalityVerdict,
    ConvergenceError,
    LatticeReport,
    LawViolation,
    Proposition,
    canonical_propositions,
    certify_proposition,
    check_boolean,
    classicality_verdict,
    complement,
    is_proposition,
    join,
    leq,
    meet,
    meet_unsymmetrized,
    range_intersection_projection,
    spectral_projections,
    transition_proposition,
    unit_proposition,
)
from .states import (
    StateFn,
    amplitude,
    classical_distribution,
    decoherence_functional,
    interference,
    is_factorizable,
    pure_state,
    quantum_measure,
    state_from_density,
    state_from_phi,
    state_from_transition_phases,
)
from .dynamics import (
    BlockStructure,
    EvolutionTrace,
    Hamiltonian,
    SchmidtDiagnostics,
    TheoremReport,
    block_structure,
    entanglement_counterexample,
    evolve,
    hamiltonian_from_element,
    hamiltonian_from_matrix,
    heisenberg,
    parse_grid,
    schmidt_diagnostics,
    separability_theorem_check,
)
from .formats import (
    FormatError,
    dump_element,
    dump_groupoid_text,
    dump_history_sets,
    dump_operator,
    dump_state,
    fixture_path,
    load_element,
    load_groupoid,
    load_history_sets,
    load_operator,
    load_state,
    parse_groupoid_text,
    save_groupoid,
)

__version__ = "0.1.0"

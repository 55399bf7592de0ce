"""Sound spectral upper bounds on the value of XOR constraint instances.

The toolkit decomposes 3-uniform instances around heavy vertex pairs, builds
subset-indexed clause-membership matrices, and certifies value bounds from
their spectral norms, with exact brute-force oracles and locally-decodable-
code fixtures for validating every step at desk scale.
"""

from ._version import VERSION as __version__
from .certificates import RefutationCertificate
from .errors import (
    CapacityError,
    ContractViolationError,
    InfeasibilityError,
    InputError,
    ToolkitError,
)
from .hypergraph import (
    DecompositionResult,
    Hypergraph,
    MatchingFamily,
    check_decomposition,
    decompose,
    degree,
    duplicate_heavy_pairs,
    family_from_text,
    family_to_text,
    suggest_pair_threshold,
)
from .ldc import (
    AlphabetReduction,
    BlackBoxCode,
    GeneralAlphabetCode,
    LinearCode,
    NormalLdc,
    WeakLdcCode,
    WldcReductionResult,
    alphabet_reduce,
    as_weak_2ldc,
    codeword_signs,
    hadamard_fixture,
    instance_from_ldc,
    pad_to_next_arity,
    verify_normal,
    weak_2ldc_blocklength_check,
    weak_ldc_reduction,
)
from .matrices import (
    HalfClauseSet,
    KikuchiMatrix,
    LiftedAssignment,
    assemble_kikuchi,
    build_clause_kikuchi,
    build_even_kikuchi,
    build_odd_kikuchi,
    clause_entry_target,
    counting_margin_holds,
    equalize,
    half_clauses,
    lift,
    matrix_from_text,
    matrix_to_text,
    member_matrix,
    quadratic_form,
    suggest_subset_size,
)
from .refuter import (
    BinomialRatioResult,
    SignExpectationSummary,
    binomial_ratio,
    expectation_over_signs,
    refute_3xor,
    refute_even_q,
    refute_via_decomposition,
)
from .spectral import (
    KhintchineRecord,
    SpectralBound,
    khintchine_audit,
    power_iteration_estimate,
    refute_2xor,
    spectral_norm_upper,
)
from .subsets import SubsetIndexer
from .xor import (
    CauchySchwarzAudit,
    DerivedClause,
    DerivedFourXor,
    Partition,
    XorInstance,
    brute_force_bipartite_val,
    brute_force_val,
    cauchy_schwarz_audit,
    derive_4xor,
    enumerate_partitions,
    enumerate_sign_vectors,
    evaluate,
    evaluate_unnormalized,
    instance_from_text,
    instance_to_text,
    random_partition,
    random_signs,
)

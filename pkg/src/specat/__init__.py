"""Semiadditive categories over matrices and lattice-valued relations.

Three families of instances (dense scalar matrices over real, complex, and
non-negative real scalars; ordinary relations; relations valued in a finite
complete Heyting algebra), generic biproduct constructions with a randomized
law suite, verified spectral decompositions of endo-arrows, and
lattice-hom-induced functors that carry decompositions between instances.
"""

from .core import (
    Arrow,
    ArrowSampler,
    ArrowTypeError,
    BiproductWitness,
    DecompositionError,
    LatticeError,
    LawCheck,
    LawReport,
    ParseError,
    PreconditionError,
    SemiadditiveCategory,
    SpecatError,
    Tolerance,
    UnsupportedDomainError,
    check_biproduct_axioms,
    check_zero_object,
    codiagonal,
    copair,
    diagonal,
    fold_biproduct,
    oplus,
    pair,
    run_law_suite,
    sum_via_biproduct,
)
from .functors import (
    LatticeHom,
    SemiadditiveFunctor,
    check_cmon_functor,
    check_cmon_functor_exhaustive,
    identity_hom,
    induced_functor,
    map_decomposition,
    principal_filter_hom,
)
from .matrices import (
    COMPLEX,
    MAT_C,
    MAT_NN,
    MAT_R,
    NONNEGATIVE,
    REAL,
    MatrixCategory,
    ScalarDomain,
    ScalarMatrix,
    is_monomial,
    monomial_inverse,
)
from .relations import (
    REL,
    HeytingTable,
    LRelation,
    RelationCategory,
    b4,
    bool_algebra,
    chain,
)
from .spectral import (
    Block,
    EquitableQuotient,
    Partition,
    SpectralDecomposition,
    coarsest_equitable_partition,
    compose_decompositions,
    detect_blocks,
    fold_to_binary,
    reduced_transition_matrix,
    residual_part,
    separate_components,
    sum_decompositions,
    verify_decomposition,
    walk_matrix,
)

__version__ = "0.1.0"

__all__ = [
    "Arrow",
    "ArrowSampler",
    "ArrowTypeError",
    "BiproductWitness",
    "Block",
    "COMPLEX",
    "DecompositionError",
    "EquitableQuotient",
    "HeytingTable",
    "LRelation",
    "LatticeError",
    "LatticeHom",
    "LawCheck",
    "LawReport",
    "MAT_C",
    "MAT_NN",
    "MAT_R",
    "MatrixCategory",
    "NONNEGATIVE",
    "ParseError",
    "Partition",
    "PreconditionError",
    "REAL",
    "REL",
    "RelationCategory",
    "ScalarDomain",
    "ScalarMatrix",
    "SemiadditiveCategory",
    "SemiadditiveFunctor",
    "SpecatError",
    "SpectralDecomposition",
    "Tolerance",
    "UnsupportedDomainError",
    "b4",
    "bool_algebra",
    "chain",
    "check_biproduct_axioms",
    "check_cmon_functor",
    "check_cmon_functor_exhaustive",
    "check_zero_object",
    "coarsest_equitable_partition",
    "codiagonal",
    "compose_decompositions",
    "copair",
    "detect_blocks",
    "diagonal",
    "fold_biproduct",
    "fold_to_binary",
    "identity_hom",
    "induced_functor",
    "is_monomial",
    "map_decomposition",
    "monomial_inverse",
    "oplus",
    "pair",
    "principal_filter_hom",
    "reduced_transition_matrix",
    "residual_part",
    "run_law_suite",
    "separate_components",
    "sum_decompositions",
    "sum_via_biproduct",
    "verify_decomposition",
    "walk_matrix",
]

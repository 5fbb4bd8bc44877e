"""Exact resonance analysis and certified ergodization times for linear torus flows."""

from .scalars import (
    BasisConstant,
    DyadicInterval,
    IndependenceSuspectError,
    ONE,
    RealScalar,
    compare,
    dot,
    enclose,
    sign,
)
from .lattice import (
    IntLattice,
    SuccessiveMinima,
    TransferenceReport,
    dual_basis,
    enumerate_in_box,
    gram_det,
    hnf,
    integer_kernel,
    orthogonal_integer_complement,
    shortest_vector,
    successive_minima,
    transference_check,
)
from .resonance import PsiValue, ResonanceData, analyze, psi, theorem1_delta_max
from .approx import CertificateReport, PeriodicApproximation, certify, find_periodic_basis
from .ergodization import (
    DensityStatus,
    DensityVerdict,
    DiophantineReport,
    ErgodizationBracket,
    HitResult,
    OrbitSegment,
    Theorem1Bound,
    constructive_hit,
    diophantine_bound,
    distance_to_orbit,
    ergodization_time_bracket,
    is_delta_dense,
    theorem1_bound,
)
from .circle import (
    GapProfile,
    RotationNumber,
    Theorem2Report,
    dirichlet_pair,
    ergodization_steps,
    gap_profile,
    theorem2_check,
)
from .errors import BasisSearchExhaustedError, DiophantineConditionError, DomainError
from .vectorspec import BUILTIN_VECTORS, VectorSpec, load_vector_spec, resolve_vector

__version__ = "0.1.0"

__all__ = [
    "BUILTIN_VECTORS",
    "BasisConstant",
    "BasisSearchExhaustedError",
    "CertificateReport",
    "DensityStatus",
    "DensityVerdict",
    "DiophantineConditionError",
    "DiophantineReport",
    "DomainError",
    "DyadicInterval",
    "ErgodizationBracket",
    "GapProfile",
    "HitResult",
    "IndependenceSuspectError",
    "IntLattice",
    "ONE",
    "OrbitSegment",
    "PeriodicApproximation",
    "PsiValue",
    "RealScalar",
    "ResonanceData",
    "RotationNumber",
    "SuccessiveMinima",
    "Theorem1Bound",
    "Theorem2Report",
    "TransferenceReport",
    "VectorSpec",
    "analyze",
    "certify",
    "compare",
    "constructive_hit",
    "diophantine_bound",
    "dirichlet_pair",
    "distance_to_orbit",
    "dot",
    "dual_basis",
    "enclose",
    "enumerate_in_box",
    "ergodization_steps",
    "ergodization_time_bracket",
    "find_periodic_basis",
    "gap_profile",
    "gram_det",
    "hnf",
    "integer_kernel",
    "is_delta_dense",
    "load_vector_spec",
    "orthogonal_integer_complement",
    "psi",
    "resolve_vector",
    "shortest_vector",
    "sign",
    "successive_minima",
    "theorem1_bound",
    "theorem1_delta_max",
    "theorem2_check",
    "transference_check",
]

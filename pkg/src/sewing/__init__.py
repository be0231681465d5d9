"""Open/closed sewing constraints: world-sheet surgery, tensor evaluation,
relation checks, Cardy-algebra round trips and rewrite certificates."""
from .cardy import (
    CardyAlgebra,
    FrobeniusAlgebra,
    Retract,
    build_solution,
    check_cardy,
    check_frobenius,
    extract_cardy,
    round_trip_iso,
    split_idempotent,
)
from .corpus import build_corpus
from .errors import CheckFailed, InternalInvariantViolation, ParseError, SewingError
from .evaluator import Decomposition, SewingSolution, check_decomposition_independence, evaluate
from .generators import GENERATORS, generator_signature
from .library import library_solutions, load_library
from .relations import RELATION_IDS, check_all, check_relation
from .rewrite import DerivationCertificate, apply_rule, eliminate_cylinder, prove_equal, replay
from .scalar import ClosedOnly, Full, Zero, classify_scalar
from .tensor import LabelSpaces, Tensor, contract, permute, psi, psi_inverse
from .worldsheet import ClosedBoundary, OpenBoundary, WorldSheetSignature, disc, same_homeo_class, sew, tensor

__all__ = [
    "CardyAlgebra", "FrobeniusAlgebra", "Retract", "build_solution", "check_cardy", "check_frobenius",
    "extract_cardy", "round_trip_iso", "split_idempotent", "build_corpus", "CheckFailed",
    "InternalInvariantViolation", "ParseError", "SewingError", "Decomposition", "SewingSolution",
    "check_decomposition_independence", "evaluate", "GENERATORS", "generator_signature",
    "library_solutions", "load_library", "RELATION_IDS", "check_all", "check_relation",
    "DerivationCertificate", "apply_rule", "eliminate_cylinder", "prove_equal", "replay",
    "ClosedOnly", "Full", "Zero", "classify_scalar", "LabelSpaces", "Tensor", "contract", "permute",
    "psi", "psi_inverse", "ClosedBoundary", "OpenBoundary", "WorldSheetSignature", "disc",
    "same_homeo_class", "sew", "tensor",
]

"""msshare: individually secure multi-secret sharing for monotone access
structures over a prime field, with machine-checked verification.

Pipeline: parse an access structure, build the additive single-secret plan,
replace eligible shares with message combinations to obtain a multi-secret
plan, deal and reconstruct concrete values, and verify decodability plus
per-message security by rank certificates and an exhaustive entropy oracle.
"""

from .access import AccessStructure, SubsetClassification, UnusedParticipantWarning, parse_dnf
from .dealing import ShareBundle, deal, reconstruct
from .documents import (
    bundle_from_document,
    bundle_to_document,
    canonical_json,
    document_digest,
    plan_digest,
    plan_from_document,
    plan_to_document,
)
from .errors import (
    BadCoefficient,
    BadMessageIndex,
    BudgetExceeded,
    DocumentError,
    FormulaSyntaxError,
    InconsistentShares,
    InconsistentSystem,
    InvalidShareId,
    LengthMismatch,
    MissingShareValue,
    ModulusTooSmall,
    MsshareError,
    NegationNotAllowed,
    NonPrimeModulus,
    NotAntichain,
    NotAuthorized,
    OutOfRangeParticipant,
    PlanInvariantError,
    ResourceGuardError,
    ShareIsReplaceable,
    SingletonClause,
    TooManyParticipants,
    UnderdeterminedMessage,
    ValidationError,
)
from .field import Field, Matrix, SolutionSpace, solve
from .scheme import (
    RateReport,
    SchemePlan,
    ShareId,
    ShareSpec,
    apply_replacements,
    build_single_secret,
    default_fixed_assignment,
    force_replace,
    is_replaceable,
    rate,
    replaceable_set,
    validate_plan,
)
from .verify import (
    DecodabilityReport,
    Entropy,
    EntropyReport,
    ForcedReplacementReport,
    MutualInformation,
    RepMatrix,
    SecurityCheck,
    SecurityReport,
    check_decodability,
    check_security_all,
    check_security_rank,
    entropy_oracle,
    forced_replacement_report,
    representative_matrix,
)

__version__ = "0.1.0"

__all__ = [
    "AccessStructure",
    "BadCoefficient",
    "BadMessageIndex",
    "BudgetExceeded",
    "DecodabilityReport",
    "DocumentError",
    "Entropy",
    "EntropyReport",
    "Field",
    "ForcedReplacementReport",
    "FormulaSyntaxError",
    "InconsistentShares",
    "InconsistentSystem",
    "InvalidShareId",
    "LengthMismatch",
    "Matrix",
    "MissingShareValue",
    "ModulusTooSmall",
    "MsshareError",
    "MutualInformation",
    "NegationNotAllowed",
    "NonPrimeModulus",
    "NotAntichain",
    "NotAuthorized",
    "OutOfRangeParticipant",
    "PlanInvariantError",
    "RateReport",
    "RepMatrix",
    "ResourceGuardError",
    "SchemePlan",
    "SecurityCheck",
    "SecurityReport",
    "ShareBundle",
    "ShareId",
    "ShareIsReplaceable",
    "ShareSpec",
    "SingletonClause",
    "SolutionSpace",
    "SubsetClassification",
    "TooManyParticipants",
    "UnderdeterminedMessage",
    "UnusedParticipantWarning",
    "ValidationError",
    "apply_replacements",
    "build_single_secret",
    "bundle_from_document",
    "bundle_to_document",
    "canonical_json",
    "check_decodability",
    "check_security_all",
    "check_security_rank",
    "deal",
    "default_fixed_assignment",
    "document_digest",
    "entropy_oracle",
    "force_replace",
    "forced_replacement_report",
    "is_replaceable",
    "parse_dnf",
    "plan_digest",
    "plan_from_document",
    "plan_to_document",
    "rate",
    "reconstruct",
    "replaceable_set",
    "representative_matrix",
    "solve",
    "validate_plan",
]

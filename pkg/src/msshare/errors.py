"""Exception hierarchy shared by all msshare modules.

Every error raised by the library derives from MsshareError.  The CLI maps
the three mid-level families to distinct exit codes: ValidationError -> 2,
NotAuthorized -> 3, InconsistentShares -> 4, ResourceGuardError -> 5.
"""


class MsshareError(Exception):
    """Base class for all library errors."""


class ValidationError(MsshareError):
    """Input violates a structural rule (exit code 2 at the CLI)."""


# --- field construction ---

class NonPrimeModulus(ValidationError):
    pass


class ModulusTooSmall(ValidationError):
    pass


# --- linear algebra ---

class InconsistentSystem(MsshareError):
    """Right-hand side is not in the column space of the matrix."""


# --- access structures ---

class FormulaSyntaxError(ValidationError):
    pass


class NegationNotAllowed(FormulaSyntaxError):
    pass


class SingletonClause(ValidationError):
    """A one-participant clause would hand that participant the secret."""


class NotAntichain(ValidationError):
    """An explicit basis contains a clause that covers another clause."""


class OutOfRangeParticipant(ValidationError):
    pass


# --- scheme construction ---

class InvalidShareId(ValidationError):
    pass


class BadCoefficient(ValidationError):
    """Replacement coefficient a in {0, 1} or b = 0 (mod q)."""


class InvalidReplacementTarget(ValidationError):
    """Share cannot be force-replaced (already carries a replacement)."""


class PlanInvariantError(ValidationError):
    """A scheme plan fails one of its structural invariants."""


# --- dealing / reconstruction ---

class LengthMismatch(ValidationError):
    pass


class MissingShareValue(ValidationError):
    pass


class NotAuthorized(MsshareError):
    """Subset is not authorized; reconstruction contract is void (exit 3)."""


class InconsistentShares(MsshareError):
    """Dealt values contradict the plan's linear relations (exit 4)."""


class UnderdeterminedMessage(MsshareError):
    """Internal assertion: an authorized subset failed to pin a message.

    Unreachable for plans built through the public constructors; reaching it
    indicates a plan-invariant bug or a plan produced by the unsafe
    force-replacement path.
    """


# --- verification ---

class BadMessageIndex(ValidationError):
    pass


class ShareIsReplaceable(ValidationError):
    """The negative-test harness was pointed at a replaceable share."""


class ResourceGuardError(MsshareError):
    """An enumeration guard tripped (exit 5)."""


class TooManyParticipants(ResourceGuardError):
    pass


class BudgetExceeded(ResourceGuardError):
    pass


# --- documents ---

class DocumentError(ValidationError):
    """Malformed or mismatched document (bad schema, digest mismatch)."""

"""Monotone access structures: parsing, validation, subset classification.

An access structure is given by its basis, the minimal authorized subsets.
A subset is authorized exactly when it covers some basis clause.  Formulas
use the grammar ``(P1&P2)|(P2&P3)``: ``&`` for conjunction, ``|`` for
disjunction, optional parentheses per clause, whitespace ignored.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass
from itertools import combinations

from .errors import (
    FormulaSyntaxError,
    NegationNotAllowed,
    NotAntichain,
    OutOfRangeParticipant,
    SingletonClause,
    TooManyParticipants,
)

ENUMERATION_GUARD = 20

_NEGATION_CHARS = ("!", "~", "¬")


class UnusedParticipantWarning(UserWarning):
    """A participant appears in no basis clause and would hold no shares."""


@dataclass(frozen=True)
class AccessStructure:
    """Participant count n plus the ordered basis of minimal authorized sets.

    Clauses are numbered 1..r in the stored order.  Invariants (checked by
    the constructor): every clause has at least two participants, indices
    lie in [1, n], and no clause contains another (antichain).
    """

    n: int
    basis: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise OutOfRangeParticipant("participant count must be positive")
        if not self.basis:
            raise NotAntichain("basis must contain at least one clause")
        seen_participants: set[int] = set()
        for clause in self.basis:
            if len(clause) < 2:
                raise SingletonClause(
                    f"clause {_format_clause(clause)} has fewer than two participants; "
                    "a lone participant's share would be the secret itself"
                )
            for p in clause:
                if not 1 <= p <= self.n:
                    raise OutOfRangeParticipant(f"participant P{p} outside [1, {self.n}]")
            seen_participants |= clause
        for a, b in combinations(self.basis, 2):
            if a <= b or b <= a:
                small, large = (a, b) if a <= b else (b, a)
                raise NotAntichain(
                    f"clause {_format_clause(large)} covers {_format_clause(small)}; "
                    "basis must list only minimal authorized subsets"
                )
        unused = set(range(1, self.n + 1)) - seen_participants
        if unused:
            warnings.warn(
                f"participants {sorted(unused)} appear in no clause and receive no shares",
                UnusedParticipantWarning,
                stacklevel=2,
            )

    @property
    def r(self) -> int:
        return len(self.basis)

    def clause(self, i: int) -> frozenset[int]:
        """Clause by 1-based index."""
        if not 1 <= i <= self.r:
            raise IndexError(f"clause index {i} outside [1, {self.r}]")
        return self.basis[i - 1]

    def is_authorized(self, subset) -> bool:
        subset = self._check_subset(subset)
        return any(clause <= subset for clause in self.basis)

    def classify(self, subset) -> "SubsetClassification":
        subset = self._check_subset(subset)
        authorized = self.is_authorized(subset)
        maximal = False
        if not authorized:
            maximal = all(
                self.is_authorized(subset | {p})
                for p in range(1, self.n + 1)
                if p not in subset
            )
        return SubsetClassification(subset, authorized, maximal)

    def maximal_unauthorized(self, guard: int = ENUMERATION_GUARD) -> tuple[frozenset[int], ...]:
        """All unauthorized subsets that become authorized by adding any one
        absent participant.  Brute force over 2^n, guarded."""
        if self.n > guard:
            raise TooManyParticipants(
                f"{self.n} participants exceed the 2^n enumeration guard ({guard})"
            )
        found = []
        universe = range(1, self.n + 1)
        for mask in range(1 << self.n):
            subset = frozenset(p for p in universe if mask >> (p - 1) & 1)
            if self.is_authorized(subset):
                continue
            if all(self.is_authorized(subset | {p}) for p in universe if p not in subset):
                found.append(subset)
        found.sort(key=lambda s: tuple(sorted(s)))
        return tuple(found)

    def authorized_subsets(self, guard: int = ENUMERATION_GUARD) -> tuple[frozenset[int], ...]:
        """Every authorized subset, canonically sorted.  Brute force, guarded."""
        if self.n > guard:
            raise TooManyParticipants(
                f"{self.n} participants exceed the 2^n enumeration guard ({guard})"
            )
        universe = range(1, self.n + 1)
        found = [
            frozenset(p for p in universe if mask >> (p - 1) & 1)
            for mask in range(1 << self.n)
        ]
        found = [s for s in found if self.is_authorized(s)]
        found.sort(key=lambda s: tuple(sorted(s)))
        return tuple(found)

    def formula(self) -> str:
        """Render back to the DNF grammar; a parse fixed point."""
        return "|".join(
            "(" + "&".join(f"P{p}" for p in sorted(clause)) + ")" for clause in self.basis
        )

    def _check_subset(self, subset) -> frozenset[int]:
        subset = frozenset(subset)
        for p in subset:
            if not 1 <= p <= self.n:
                raise OutOfRangeParticipant(f"participant P{p} outside [1, {self.n}]")
        return subset


@dataclass(frozen=True)
class SubsetClassification:
    subset: frozenset[int]
    authorized: bool
    maximal_unauthorized: bool


def minimize_clauses(clauses) -> list[frozenset[int]]:
    """Drop duplicates and supersets, keeping first occurrences (monotone
    absorption: a clause covering another adds no authorized subsets)."""
    minimal: list[frozenset[int]] = []
    for clause in clauses:
        if any(kept <= clause for kept in minimal):
            continue
        minimal = [kept for kept in minimal if not clause <= kept]
        minimal.append(clause)
    return minimal


def parse_dnf(formula: str, n: int | None = None) -> AccessStructure:
    """Parse a monotone DNF formula into an AccessStructure.

    Positive literals only.  Clauses that cover another clause are dropped;
    single-participant clauses are rejected.  n defaults to the highest
    participant index mentioned.
    """
    for ch in _NEGATION_CHARS:
        if ch in formula:
            raise NegationNotAllowed(f"negation ({ch!r}) is not allowed in a monotone formula")
    clauses = []
    for chunk in _split_disjunction(formula):
        clause = _parse_clause(chunk)
        if len(clause) == 1:
            raise SingletonClause(
                f"clause {_format_clause(clause)} has a single participant; "
                "that participant's share would be the secret itself"
            )
        clauses.append(clause)
    if not clauses:
        raise FormulaSyntaxError("empty formula")
    basis = minimize_clauses(clauses)
    # Mentioned participants stay in the universe even when their only
    # clause was absorbed; they just hold no shares (warned downstream).
    highest = max(max(c) for c in clauses)
    if n is None:
        n = highest
    elif n < highest:
        raise OutOfRangeParticipant(f"formula mentions P{highest} but n={n}")
    return AccessStructure(n, tuple(basis))


def _split_disjunction(formula: str) -> list[str]:
    parts = formula.split("|")
    if any(not part.strip() for part in parts):
        raise FormulaSyntaxError("empty clause in disjunction")
    return parts


def _parse_clause(chunk: str) -> frozenset[int]:
    text = chunk.strip()
    depth_stripped = text
    if depth_stripped.startswith("(") and depth_stripped.endswith(")"):
        depth_stripped = depth_stripped[1:-1]
    if "(" in depth_stripped or ")" in depth_stripped:
        raise FormulaSyntaxError(f"unbalanced or nested parentheses in {text!r}")
    participants = set()
    for literal in depth_stripped.split("&"):
        literal = literal.strip()
        match = re.fullmatch(r"[Pp](\d+)", literal)
        if not match:
            raise FormulaSyntaxError(f"expected a literal like P3, got {literal!r}")
        index = int(match.group(1))
        if index < 1:
            raise OutOfRangeParticipant("participant indices start at 1")
        participants.add(index)
    if not participants:
        raise FormulaSyntaxError(f"empty clause {text!r}")
    return frozenset(participants)


def _format_clause(clause) -> str:
    return "{" + ",".join(f"P{p}" for p in sorted(clause)) + "}"

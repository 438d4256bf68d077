"""Symbolic scheme plans: the monotone-circuit construction and the
share-replacement transform that turns it into a multi-secret scheme.

A plan assigns one share S_j^A_i to every participant P_j of every basis
clause A_i.  Shares are linear forms over the variable basis
(M_1..M_m, then one free variable per random share).  Three share kinds:

* random   -- a unit vector on its own free variable,
* fixed    -- one per clause, M_1 minus the clause's other shares, stored
              fully expanded over the basis,
* replaced -- a*M_1 + b*M_ell with a outside {0, 1} and b nonzero,
              carrying a fresh message.

Replacement is only sound for shares where every basis clause either
contains the share's owner or contains the rest of the share's clause;
force_replace skips that check on purpose so verifiers can demonstrate the
resulting decodability failure.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple

from .access import AccessStructure
from .errors import (
    BadCoefficient,
    InvalidReplacementTarget,
    InvalidShareId,
    PlanInvariantError,
)
from .field import Field, unit_vector

RANDOM = "random"
FIXED = "fixed"
REPLACED = "replaced"

DEFAULT_COEFFICIENTS = (2, 1)

_SHARE_ID = re.compile(r"S(\d+)\^A(\d+)")


class ShareId(NamedTuple):
    """Identifies share S_participant^A_clause.  Natural tuple order is
    clause-major, the canonical order for plan tables."""

    clause: int
    participant: int

    def label(self) -> str:
        return f"S{self.participant}^A{self.clause}"

    @classmethod
    def parse(cls, text: str) -> "ShareId":
        match = _SHARE_ID.fullmatch(text.strip())
        if not match:
            raise InvalidShareId(f"expected a share id like S2^A1, got {text!r}")
        return cls(clause=int(match.group(2)), participant=int(match.group(1)))


def participant_major(ids: Iterable[ShareId]) -> list[ShareId]:
    """Sort share ids by (participant, clause): the order in which a
    subset's shares are stacked into a representative matrix."""
    return sorted(ids, key=lambda s: (s.participant, s.clause))


@dataclass(frozen=True)
class ShareSpec:
    """One row of a plan table.

    form is the share's linear form over (M_1..M_m, free randoms).
    Replaced shares keep their (a, b) pair and message index; the form is
    derivable from them but stored expanded for direct matrix use.
    """

    kind: str
    form: tuple[int, ...]
    message_index: int | None = None
    coefficients: tuple[int, int] | None = None


@dataclass(frozen=True)
class RateReport:
    messages: int
    total_shares: int
    rate: Fraction


@dataclass(frozen=True)
class SchemePlan:
    """A complete symbolic scheme over F_q for an access structure.

    table maps every ShareId to its spec, in clause-major order.  unsafe
    marks plans produced by force_replace: their structural invariants are
    deliberately not guaranteed.
    """

    gamma: AccessStructure
    q: int
    message_count: int
    table: dict[ShareId, ShareSpec]
    unsafe: bool = False

    def share_ids(self) -> tuple[ShareId, ...]:
        return tuple(self.table)

    def random_share_ids(self) -> tuple[ShareId, ...]:
        return tuple(s for s, spec in self.table.items() if spec.kind == RANDOM)

    @property
    def free_random_count(self) -> int:
        return len(self.random_share_ids())

    @property
    def width(self) -> int:
        """Length of every form: message count plus free random count."""
        return self.message_count + self.free_random_count

    @property
    def total_shares(self) -> int:
        return len(self.table)

    def variable_labels(self) -> tuple[str, ...]:
        return tuple(f"M{i}" for i in range(1, self.message_count + 1)) + tuple(
            s.label() for s in self.random_share_ids()
        )

    def shares_of(self, participant: int) -> tuple[ShareId, ...]:
        return tuple(s for s in self.table if s.participant == participant)

    def shares_of_subset(self, subset) -> tuple[ShareId, ...]:
        """All shares held by a subset, in participant-major order."""
        members = set(subset)
        return tuple(participant_major(s for s in self.table if s.participant in members))

    def clause_shares(self, clause_index: int) -> tuple[ShareId, ...]:
        return tuple(s for s in self.table if s.clause == clause_index)

    def fixed_shares(self) -> tuple[ShareId, ...]:
        return tuple(s for s, spec in self.table.items() if spec.kind == FIXED)

    def replaced_shares(self) -> tuple[ShareId, ...]:
        return tuple(s for s, spec in self.table.items() if spec.kind == REPLACED)

    def form(self, share: ShareId) -> tuple[int, ...]:
        spec = self.table.get(share)
        if spec is None:
            raise InvalidShareId(f"{share.label()} is not a share of this plan")
        return spec.form


def all_share_ids(gamma: AccessStructure) -> tuple[ShareId, ...]:
    """Every share the construction assigns, in clause-major order."""
    return tuple(
        ShareId(i, p)
        for i, clause in enumerate(gamma.basis, 1)
        for p in sorted(clause)
    )


def check_share_id(gamma: AccessStructure, share: ShareId) -> None:
    if not 1 <= share.clause <= gamma.r or share.participant not in gamma.clause(share.clause):
        raise InvalidShareId(
            f"{share.label()} does not exist: P{share.participant} is not in clause A{share.clause}"
        )


def is_replaceable(gamma: AccessStructure, share: ShareId) -> bool:
    """A share may carry a message only if every basis clause either
    contains its owner or contains the rest of its clause."""
    check_share_id(gamma, share)
    rest = gamma.clause(share.clause) - {share.participant}
    return all(
        share.participant in other or rest <= other for other in gamma.basis
    )


def replaceable_set(gamma: AccessStructure) -> tuple[ShareId, ...]:
    return tuple(s for s in all_share_ids(gamma) if is_replaceable(gamma, s))


def default_fixed_assignment(gamma: AccessStructure) -> dict[int, ShareId]:
    """Pick the share to fix in each clause.

    A clause whose shares are all replaceable must sacrifice one of them;
    otherwise fixing a non-replaceable share keeps every replaceable share
    available.  Tie-break: highest participant index.
    """
    replaceable = set(replaceable_set(gamma))
    assignment = {}
    for i, clause in enumerate(gamma.basis, 1):
        non_replaceable = [p for p in clause if ShareId(i, p) not in replaceable]
        pool = non_replaceable if non_replaceable else sorted(clause)
        assignment[i] = ShareId(i, max(pool))
    return assignment


def build_single_secret(
    gamma: AccessStructure,
    q: int,
    fixed: Iterable[ShareId | str] | None = None,
) -> SchemePlan:
    """The monotone-circuit single-secret plan: per clause, one fixed share
    and the rest uniform randoms, so each clause's shares sum to M_1."""
    Field(q)
    assignment = _resolve_fixed(gamma, fixed)
    kinds: dict[ShareId, tuple] = {}
    for share in all_share_ids(gamma):
        kinds[share] = (FIXED,) if assignment[share.clause] == share else (RANDOM,)
    plan = _materialize(gamma, q, kinds, unsafe=False)
    validate_plan(plan)
    return plan


def apply_replacements(
    plan: SchemePlan,
    coefficients=None,
    fixed: Iterable[ShareId | str] | None = None,
    message_map: Mapping[ShareId | str, int] | None = None,
) -> SchemePlan:
    """Transform a single-secret plan into a multi-secret plan.

    Steps: classify replaceable shares; designate one fixed share per
    clause (default assignment, overridable); rewrite every replaceable
    non-fixed share to a*M_1 + b*M_ell with a fresh message index; expand
    fixed shares so every clause still sums to M_1.

    coefficients is either one (a, b) pair for all replacements or a
    mapping from share id to (a, b).  message_map pins message indices to
    replaced shares; unpinned shares take the remaining indices in
    clause-major order.
    """
    if plan.unsafe:
        raise PlanInvariantError("cannot run replacements on an unsafe plan")
    if plan.message_count != 1:
        raise PlanInvariantError("replacements start from a single-secret plan")
    gamma, q = plan.gamma, plan.q

    assignment = _resolve_fixed(gamma, fixed)
    replaced = [
        s for s in replaceable_set(gamma) if assignment[s.clause] != s
    ]
    m = 1 + len(replaced)

    indices = _resolve_message_map(replaced, m, message_map)
    pairs = _resolve_coefficients(q, replaced, coefficients)

    kinds: dict[ShareId, tuple] = {}
    for share in all_share_ids(gamma):
        if share in indices:
            a, b = pairs[share]
            kinds[share] = (REPLACED, a, b, indices[share])
        elif assignment[share.clause] == share:
            kinds[share] = (FIXED,)
        else:
            kinds[share] = (RANDOM,)
    out = _materialize(gamma, q, kinds, unsafe=False)
    validate_plan(out)
    return out


def force_replace(plan: SchemePlan, share: ShareId | str, a: int, b: int) -> SchemePlan:
    """Rewrite one share to a*M_1 + b*M_(m+1) without the replaceability
    check.  The result is marked unsafe: decodability is expected to fail
    when the share was not replaceable, and forcing a fixed share also
    breaks its clause sum.  Verification harness use only."""
    share = _as_share_id(share)
    check_share_id(plan.gamma, share)
    a, b = _check_pair(plan.q, a, b)
    current = plan.table[share].kind
    if current == REPLACED:
        raise InvalidReplacementTarget(f"{share.label()} already carries a replacement")
    kinds = _semantic_kinds(plan)
    kinds[share] = (REPLACED, a, b, plan.message_count + 1)
    return _materialize(plan.gamma, plan.q, kinds, unsafe=True)


def rate(plan: SchemePlan) -> RateReport:
    """Messages per share, as an exact rational."""
    return RateReport(
        messages=plan.message_count,
        total_shares=plan.total_shares,
        rate=Fraction(plan.message_count, plan.total_shares),
    )


def validate_plan(plan: SchemePlan) -> None:
    """Check every structural invariant; raise PlanInvariantError on the
    first violation.  Unsafe plans skip the clause-sum and one-fixed-share
    checks, which force_replace may deliberately break."""
    gamma, q = plan.gamma, plan.q
    ids = all_share_ids(gamma)
    if tuple(plan.table) != ids:
        raise PlanInvariantError("share table does not match the access structure")

    width = plan.width
    for share, spec in plan.table.items():
        if len(spec.form) != width:
            raise PlanInvariantError(f"{share.label()} form has wrong length")
        if any(not 0 <= v < q for v in spec.form):
            raise PlanInvariantError(f"{share.label()} form not reduced mod q")

    m = plan.message_count
    replaced = plan.replaced_shares()
    if len(replaced) != m - 1:
        raise PlanInvariantError("message count must be one more than replaced count")
    indices = sorted(plan.table[s].message_index for s in replaced)
    if indices != list(range(2, m + 1)):
        raise PlanInvariantError("replaced shares must carry message indices 2..m exactly once")

    random_cols = {}
    for offset, share in enumerate(plan.random_share_ids()):
        random_cols[share] = m + offset
    for share, spec in plan.table.items():
        if spec.kind == RANDOM:
            if spec.form != unit_vector(width, random_cols[share]):
                raise PlanInvariantError(f"{share.label()} must be a unit vector on its own variable")
        elif spec.kind == REPLACED:
            a, b = spec.coefficients
            if a % q in (0, 1) or b % q == 0:
                raise PlanInvariantError(f"{share.label()} has forbidden coefficients")
            expected = [0] * width
            expected[0], expected[spec.message_index - 1] = a % q, b % q
            if spec.form != tuple(expected):
                raise PlanInvariantError(f"{share.label()} form disagrees with its coefficients")

    if plan.unsafe:
        return
    for i in range(1, gamma.r + 1):
        clause_ids = plan.clause_shares(i)
        kinds = [plan.table[s].kind for s in clause_ids]
        if kinds.count(FIXED) != 1:
            raise PlanInvariantError(f"clause A{i} must fix exactly one share")
        total = [0] * width
        for s in clause_ids:
            total = [(x + y) % q for x, y in zip(total, plan.table[s].form)]
        if tuple(total) != unit_vector(width, 0):
            raise PlanInvariantError(f"shares of clause A{i} do not sum to M1")


# --- internals ---


def _materialize(gamma: AccessStructure, q: int, kinds: Mapping[ShareId, tuple], unsafe: bool) -> SchemePlan:
    """Turn a semantic kind table into a plan with expanded forms."""
    ids = all_share_ids(gamma)
    replaced = [s for s in ids if kinds[s][0] == REPLACED]
    randoms = [s for s in ids if kinds[s][0] == RANDOM]
    m = 1 + len(replaced)
    width = m + len(randoms)
    random_col = {s: m + i for i, s in enumerate(randoms)}

    forms: dict[ShareId, tuple[int, ...]] = {}
    for share in ids:
        entry = kinds[share]
        if entry[0] == RANDOM:
            forms[share] = unit_vector(width, random_col[share])
        elif entry[0] == REPLACED:
            _, a, b, ell = entry
            vec = [0] * width
            vec[0], vec[ell - 1] = a % q, b % q
            forms[share] = tuple(vec)
    for share in ids:
        if kinds[share][0] != FIXED:
            continue
        total = list(unit_vector(width, 0))
        for sibling in ids:
            if sibling.clause == share.clause and sibling != share:
                total = [(x - y) % q for x, y in zip(total, forms[sibling])]
        forms[share] = tuple(total)

    table = {}
    for share in ids:
        entry = kinds[share]
        if entry[0] == REPLACED:
            _, a, b, ell = entry
            table[share] = ShareSpec(REPLACED, forms[share], message_index=ell,
                                     coefficients=(a % q, b % q))
        else:
            table[share] = ShareSpec(entry[0], forms[share])
    return SchemePlan(gamma=gamma, q=q, message_count=m, table=table, unsafe=unsafe)


def _semantic_kinds(plan: SchemePlan) -> dict[ShareId, tuple]:
    kinds: dict[ShareId, tuple] = {}
    for share, spec in plan.table.items():
        if spec.kind == REPLACED:
            a, b = spec.coefficients
            kinds[share] = (REPLACED, a, b, spec.message_index)
        else:
            kinds[share] = (spec.kind,)
    return kinds


def _as_share_id(value: ShareId | str) -> ShareId:
    return value if isinstance(value, ShareId) else ShareId.parse(value)


def _resolve_fixed(gamma: AccessStructure, pins: Iterable[ShareId | str] | None) -> dict[int, ShareId]:
    assignment = default_fixed_assignment(gamma)
    if pins is None:
        return assignment
    pinned_clauses: set[int] = set()
    for pin in pins:
        share = _as_share_id(pin)
        check_share_id(gamma, share)
        if share.clause in pinned_clauses:
            raise InvalidShareId(f"clause A{share.clause} has more than one pinned fixed share")
        pinned_clauses.add(share.clause)
        assignment[share.clause] = share
    return assignment


def _check_pair(q: int, a: int, b: int) -> tuple[int, int]:
    a, b = a % q, b % q
    if a in (0, 1):
        raise BadCoefficient(
            f"a = {a} (mod {q}) is forbidden: a clause missing the share's owner "
            "could peel the new message off the clause sum"
        )
    if b == 0:
        raise BadCoefficient("b = 0 (mod q) would drop the new message from the share")
    return a, b


def _resolve_coefficients(q: int, replaced: list[ShareId], coefficients) -> dict[ShareId, tuple[int, int]]:
    if coefficients is None:
        coefficients = DEFAULT_COEFFICIENTS
    if isinstance(coefficients, tuple):
        a, b = _check_pair(q, *coefficients)
        return {s: (a, b) for s in replaced}
    pairs = {}
    by_id = {_as_share_id(k): v for k, v in coefficients.items()}
    for share in replaced:
        a, b = by_id.get(share, DEFAULT_COEFFICIENTS)
        pairs[share] = _check_pair(q, a, b)
    unknown = set(by_id) - set(replaced)
    if unknown:
        labels = ", ".join(s.label() for s in sorted(unknown))
        raise InvalidShareId(f"coefficient overrides for shares that are not replaced: {labels}")
    return pairs


def _resolve_message_map(
    replaced: list[ShareId], m: int, message_map: Mapping[ShareId | str, int] | None
) -> dict[ShareId, int]:
    indices: dict[ShareId, int] = {}
    if message_map:
        for key, ell in message_map.items():
            share = _as_share_id(key)
            if share not in replaced:
                raise InvalidShareId(f"{share.label()} is not a replaced share")
            if not 2 <= ell <= m:
                raise PlanInvariantError(f"message index {ell} outside [2, {m}]")
            if ell in indices.values():
                raise PlanInvariantError(f"message index {ell} pinned twice")
            indices[share] = ell
    remaining = [ell for ell in range(2, m + 1) if ell not in indices.values()]
    for share in replaced:
        if share not in indices:
            indices[share] = remaining.pop(0)
    return indices

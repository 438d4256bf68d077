"""Deal concrete share values and reconstruct messages from them.

Dealing samples every free random variable uniformly and evaluates each
share's linear form at (messages, randoms).  Reconstruction solves the
linear system formed by the forms of the shares a subset holds; for an
authorized subset every message coordinate is uniquely determined.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import field as ff
from .errors import (
    InconsistentShares,
    InconsistentSystem,
    LengthMismatch,
    MissingShareValue,
    NotAuthorized,
    UnderdeterminedMessage,
)
from .scheme import SchemePlan, ShareId


@dataclass(frozen=True)
class ShareBundle:
    """Dealt values, grouped per participant in participant-major order."""

    q: int
    assignments: dict[int, tuple[tuple[ShareId, int], ...]]

    def participants(self) -> tuple[int, ...]:
        return tuple(self.assignments)

    def value(self, share: ShareId) -> int:
        for sid, value in self.assignments.get(share.participant, ()):
            if sid == share:
                return value
        raise MissingShareValue(f"bundle has no value for {share.label()}")

    def restrict(self, subset) -> "ShareBundle":
        members = set(subset)
        kept = {p: shares for p, shares in self.assignments.items() if p in members}
        return ShareBundle(self.q, kept)


def deal(plan: SchemePlan, messages: Sequence[int], rng) -> ShareBundle:
    """Evaluate the plan at the given messages and fresh uniform randoms.

    rng is any caller-owned seedable source with randrange (random.Random
    works); identical plan, messages, and seed give an identical bundle.
    """
    q = plan.q
    if len(messages) != plan.message_count:
        raise LengthMismatch(
            f"expected {plan.message_count} messages, got {len(messages)}"
        )
    messages = [v % q for v in messages]
    randoms = [rng.randrange(q) for _ in plan.random_share_ids()]
    point = messages + randoms

    values = {
        share: sum(c * x for c, x in zip(spec.form, point)) % q
        for share, spec in plan.table.items()
    }
    if not plan.unsafe:
        for i in range(1, plan.gamma.r + 1):
            total = sum(values[s] for s in plan.clause_shares(i)) % q
            if total != messages[0]:
                raise AssertionError(f"clause A{i} values do not sum to M1")

    assignments: dict[int, list[tuple[ShareId, int]]] = {}
    for participant in sorted({s.participant for s in plan.table}):
        assignments[participant] = [
            (s, values[s]) for s in sorted(plan.shares_of(participant))
        ]
    return ShareBundle(q, {p: tuple(v) for p, v in assignments.items()})


def reconstruct(plan: SchemePlan, subset, bundle: ShareBundle) -> tuple[int, ...]:
    """Recover all messages from the shares held by an authorized subset.

    Raises NotAuthorized for subsets outside the access structure,
    InconsistentShares when values contradict the plan's linear relations
    (corruption), and UnderdeterminedMessage if a message coordinate is not
    pinned down, which cannot happen for plans built by the public
    constructors.
    """
    subset = frozenset(subset)
    if not plan.gamma.is_authorized(subset):
        members = ",".join(f"P{p}" for p in sorted(subset))
        raise NotAuthorized(f"{{{members}}} is not an authorized subset")

    shares = plan.shares_of_subset(subset)
    fq = ff.Field(plan.q)
    matrix = ff.Matrix.from_rows(fq, [plan.form(s) for s in shares])
    rhs = [bundle.value(s) for s in shares]
    try:
        solution = ff.solve(matrix, rhs)
    except InconsistentSystem as exc:
        raise InconsistentShares(
            "share values contradict the plan; at least one value is corrupted"
        ) from exc

    for ell in range(plan.message_count):
        if not solution.coordinate_determined(ell):
            raise UnderdeterminedMessage(
                f"message M{ell + 1} is not determined by an authorized subset's shares; "
                "the plan violates its decodability contract"
            )
    return solution.particular[: plan.message_count]

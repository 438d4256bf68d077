"""Machine-check decodability and individual security of a scheme plan.

Two independent routes certify security:

* rank certificates: a subset's shares stacked into their representative
  matrix leak nothing about message ell exactly when the matrix and its
  ell-column-zeroed variant both have full row rank;
* an exhaustive entropy oracle: enumerate every assignment of the variable
  basis, tabulate the exact joint distributions, and decide zero mutual
  information by literal distribution equality, no tolerances.

The oracle never calls the rank code, so the two can cross-check each
other.  forced_replacement_report demonstrates the decodability failure
caused by replacing a share that fails the replaceability condition.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import log2

import numpy as np

from . import field as ff
from .errors import (
    BadMessageIndex,
    BudgetExceeded,
    ShareIsReplaceable,
)
from .scheme import (
    SchemePlan,
    ShareId,
    force_replace,
    is_replaceable,
)

DEFAULT_ORACLE_BUDGET = 10_000_000
_CHUNK = 1 << 17


# --- representative matrices and rank certificates ---


@dataclass(frozen=True)
class RepMatrix:
    """The linear forms of a subset's shares, stacked participant-major."""

    matrix: ff.Matrix
    subset: tuple[int, ...]
    row_labels: tuple[ShareId, ...]
    column_labels: tuple[str, ...]


@dataclass(frozen=True)
class SecurityCheck:
    subset: tuple[int, ...]
    message: int
    share_count: int
    rank: int
    rank_conditioned: int
    secure: bool
    pivots: tuple[tuple[int, int], ...]
    pivots_conditioned: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class SecurityReport:
    checks: tuple[SecurityCheck, ...]
    overall: bool
    subset_mode: str  # "maximal" or "exhaustive"


@dataclass(frozen=True)
class DecodabilityCheck:
    clause: int
    message: int
    ok: bool


@dataclass(frozen=True)
class DecodabilityReport:
    checks: tuple[DecodabilityCheck, ...]
    all_pass: bool

    def failures(self) -> tuple[DecodabilityCheck, ...]:
        return tuple(c for c in self.checks if not c.ok)


def representative_matrix(plan: SchemePlan, subset) -> RepMatrix:
    members = tuple(sorted(set(subset)))
    shares = plan.shares_of_subset(members)
    fq = ff.Field(plan.q)
    matrix = ff.Matrix.from_rows(fq, [plan.form(s) for s in shares]) if shares else ff.Matrix(fq, ())
    return RepMatrix(
        matrix=matrix,
        subset=members,
        row_labels=shares,
        column_labels=plan.variable_labels(),
    )


def check_security_rank(plan: SchemePlan, subset, message: int) -> SecurityCheck:
    """Secure iff the representative matrix and its message-column-zeroed
    variant both have rank equal to the number of shares held."""
    if not 1 <= message <= plan.message_count:
        raise BadMessageIndex(f"message index {message} outside [1, {plan.message_count}]")
    rep = representative_matrix(plan, subset)
    t = rep.matrix.nrows
    rank_full, pivots_full = rep.matrix.rank_profile() if t else (0, ())
    conditioned = rep.matrix.zero_column(message - 1) if t else rep.matrix
    rank_cond, pivots_cond = conditioned.rank_profile() if t else (0, ())
    return SecurityCheck(
        subset=rep.subset,
        message=message,
        share_count=t,
        rank=rank_full,
        rank_conditioned=rank_cond,
        secure=rank_full == t and rank_cond == t,
        pivots=pivots_full,
        pivots_conditioned=pivots_cond,
    )


def check_security_all(plan: SchemePlan, exhaustive: bool = False, guard: int = 20) -> SecurityReport:
    """Check every message against every maximal unauthorized subset.

    Maximality suffices: a sub-subset's shares are a row subset of a
    full-rank stack.  exhaustive=True cross-validates against every
    unauthorized subset instead.
    """
    if exhaustive:
        subsets = _all_unauthorized(plan, guard)
        mode = "exhaustive"
    else:
        subsets = plan.gamma.maximal_unauthorized(guard)
        mode = "maximal"
    checks = tuple(
        check_security_rank(plan, subset, ell)
        for subset in subsets
        for ell in range(1, plan.message_count + 1)
    )
    return SecurityReport(checks=checks, overall=all(c.secure for c in checks), subset_mode=mode)


def _all_unauthorized(plan: SchemePlan, guard: int):
    gamma = plan.gamma
    gamma.maximal_unauthorized(guard)  # reuse the guard check
    universe = range(1, gamma.n + 1)
    return tuple(
        subset
        for mask in range(1 << gamma.n)
        for subset in [frozenset(p for p in universe if mask >> (p - 1) & 1)]
        if not gamma.is_authorized(subset)
    )


def check_decodability(plan: SchemePlan) -> DecodabilityReport:
    """Every basis clause must span every message: e_Mell in the row space
    of the stacked forms of the shares its participants hold."""
    checks = []
    for i in range(1, plan.gamma.r + 1):
        rep = representative_matrix(plan, plan.gamma.clause(i))
        for ell in range(1, plan.message_count + 1):
            target = ff.unit_vector(plan.width, ell - 1)
            checks.append(DecodabilityCheck(i, ell, rep.matrix.row_space_contains(target)))
    return DecodabilityReport(tuple(checks), all(c.ok for c in checks))


# --- exhaustive entropy oracle ---


@dataclass(frozen=True)
class Entropy:
    """An exact entropy.  When every outcome count is a power of q the
    value is exactly log_q_coefficient * log2(q); bits is the float view."""

    log_q_coefficient: Fraction | None
    bits: float
    uniform: bool

    def is_exactly(self, coefficient) -> bool:
        return self.log_q_coefficient is not None and self.log_q_coefficient == Fraction(coefficient)


@dataclass(frozen=True)
class MutualInformation:
    """zero is decided by exact count equality, never by float compare."""

    zero: bool
    log_q_coefficient: Fraction | None
    bits: float


@dataclass(frozen=True)
class EntropyReport:
    subset: tuple[int, ...]
    share_ids: tuple[ShareId, ...]
    assignment_count: int
    distinct_share_tuples: int
    share_tuple_uniform: bool
    share_entropy: Entropy
    conditional_share_entropy: dict[int, Entropy]
    mutual_information: dict[int, MutualInformation]
    message_entropy_given_shares: dict[int, Entropy]

    def all_messages_hidden(self) -> bool:
        return all(mi.zero for mi in self.mutual_information.values())

    def all_messages_determined(self) -> bool:
        return all(e.is_exactly(0) for e in self.message_entropy_given_shares.values())


def entropy_oracle(plan: SchemePlan, subset, budget: int = DEFAULT_ORACLE_BUDGET) -> EntropyReport:
    """Enumerate all q^(m+k) equally likely assignments of (messages,
    randoms) and measure the exact distribution of the subset's share
    tuple, alone and jointly with each message."""
    q = plan.q
    v = plan.width
    total = q**v
    if total > budget:
        raise BudgetExceeded(
            f"{q}^{v} = {total} assignments exceed the enumeration budget ({budget})"
        )

    members = tuple(sorted(set(subset)))
    shares = plan.shares_of_subset(members)
    coeffs = np.array([plan.form(s) for s in shares], dtype=np.int64).reshape(len(shares), v)

    share_counts: Counter = Counter()
    joint_counts: dict[int, Counter] = {ell: Counter() for ell in range(1, plan.message_count + 1)}
    for lo in range(0, total, _CHUNK):
        hi = min(lo + _CHUNK, total)
        idx = np.arange(lo, hi, dtype=np.int64)
        digits = np.empty((hi - lo, v), dtype=np.int64)
        for j in range(v):
            digits[:, j] = (idx // q**j) % q
        values = digits @ coeffs.T % q
        keys = _radix_keys(values, q)
        uniq, counts = np.unique(keys, return_counts=True)
        share_counts.update(dict(zip(uniq.tolist(), counts.tolist())))
        for ell in joint_counts:
            jkeys = keys * q + digits[:, ell - 1]
            uniq, counts = np.unique(jkeys, return_counts=True)
            joint_counts[ell].update(dict(zip(uniq.tolist(), counts.tolist())))

    share_entropy = _entropy_from_counts(share_counts.values(), total, q)
    conditional: dict[int, Entropy] = {}
    mutual: dict[int, MutualInformation] = {}
    residual: dict[int, Entropy] = {}
    for ell, joint in joint_counts.items():
        conditional[ell] = _conditional_share_entropy(joint, q, total)
        mutual[ell] = _mutual_information(share_counts, joint, q, share_entropy, conditional[ell])
        residual[ell] = _difference(_entropy_from_counts(joint.values(), total, q), share_entropy)

    return EntropyReport(
        subset=members,
        share_ids=shares,
        assignment_count=total,
        distinct_share_tuples=len(share_counts),
        share_tuple_uniform=len(set(share_counts.values())) == 1,
        share_entropy=share_entropy,
        conditional_share_entropy=conditional,
        mutual_information=mutual,
        message_entropy_given_shares=residual,
    )


def _radix_keys(values: np.ndarray, q: int) -> np.ndarray:
    t = values.shape[1]
    if t == 0:
        return np.zeros(values.shape[0], dtype=np.int64)
    if q ** (t + 1) <= 2**62:
        weights = np.array([q**i for i in range(t)], dtype=np.int64)
        return values @ weights
    # Python-int fallback for wide stacks; exact, just slower.
    weights_obj = np.array([q**i for i in range(t)], dtype=object)
    return values.astype(object) @ weights_obj


def _power_of(count: int, q: int) -> int | None:
    exp = 0
    while count % q == 0:
        count //= q
        exp += 1
    return exp if count == 1 else None


def _entropy_from_counts(counts, total: int, q: int) -> Entropy:
    counts = list(counts)
    uniform = len(set(counts)) <= 1
    exponents = [_power_of(c, q) for c in counts]
    total_exp = _power_of(total, q)
    if total_exp is not None and all(e is not None for e in exponents):
        coefficient = Fraction(sum(c * (total_exp - e) for c, e in zip(counts, exponents)), total)
        return Entropy(coefficient, float(coefficient) * log2(q), uniform)
    bits = sum(c / total * log2(total / c) for c in counts if c)
    return Entropy(None, bits, uniform)


def _conditional_share_entropy(joint: Counter, q: int, total: int) -> Entropy:
    """H(shares | message) as the average over the q message values; each
    conditional slice has exactly total/q assignments."""
    per_value: dict[int, list[int]] = {val: [] for val in range(q)}
    for key, count in joint.items():
        per_value[key % q].append(count)
    slice_total = total // q
    slices = [_entropy_from_counts(counts, slice_total, q) for counts in per_value.values()]
    if all(s.log_q_coefficient is not None for s in slices):
        coefficient = sum((s.log_q_coefficient for s in slices), Fraction(0)) / q
        bits = float(coefficient) * log2(q)
    else:
        coefficient = None
        bits = sum(s.bits for s in slices) / q
    uniform = all(s.uniform for s in slices)
    return Entropy(coefficient, bits, uniform)


def _mutual_information(
    share_counts: Counter, joint: Counter, q: int, h_shares: Entropy, h_cond: Entropy
) -> MutualInformation:
    zero = all(
        joint.get(key * q + val, 0) * q == count
        for key, count in share_counts.items()
        for val in range(q)
    )
    if h_shares.log_q_coefficient is not None and h_cond.log_q_coefficient is not None:
        coefficient = h_shares.log_q_coefficient - h_cond.log_q_coefficient
        return MutualInformation(zero, coefficient, float(coefficient) * log2(q))
    return MutualInformation(zero, None, h_shares.bits - h_cond.bits)


def _difference(joint_entropy: Entropy, marginal: Entropy) -> Entropy:
    """H(message | shares) through the chain rule H(S, M) - H(S).  The
    uniform flag here means: an exact whole number of field symbols."""
    if joint_entropy.log_q_coefficient is not None and marginal.log_q_coefficient is not None:
        coefficient = joint_entropy.log_q_coefficient - marginal.log_q_coefficient
        return Entropy(
            coefficient, joint_entropy.bits - marginal.bits, coefficient.denominator == 1
        )
    return Entropy(None, joint_entropy.bits - marginal.bits, False)


# --- negative harness: replacing a non-replaceable share ---


@dataclass(frozen=True)
class ForcedReplacementReport:
    forced_share: ShareId
    message_index: int
    decodability: DecodabilityReport
    failing_clauses: tuple[int, ...]
    oracle_checked: bool
    residual_entropy: dict[int, Entropy]
    confirmed: bool


def forced_replacement_report(
    plan: SchemePlan,
    share: ShareId | str,
    a: int,
    b: int,
    budget: int = DEFAULT_ORACLE_BUDGET,
) -> ForcedReplacementReport:
    """Force-replace a non-replaceable share and document the damage.

    The forced message must become undecodable for at least one basis
    clause, and where the oracle budget permits, the residual uncertainty
    of that message for a failing clause is exactly one field symbol.
    """
    share = share if isinstance(share, ShareId) else ShareId.parse(share)
    if is_replaceable(plan.gamma, share):
        raise ShareIsReplaceable(
            f"{share.label()} satisfies the replaceability condition; "
            "forcing it would not demonstrate a failure"
        )
    forced = force_replace(plan, share, a, b)
    new_index = forced.message_count
    decode = check_decodability(forced)
    failing = tuple(
        sorted({c.clause for c in decode.failures() if c.message == new_index})
    )

    residual: dict[int, Entropy] = {}
    oracle_checked = False
    if forced.q ** forced.width <= budget:
        oracle_checked = True
        for i in range(1, forced.gamma.r + 1):
            report = entropy_oracle(forced, forced.gamma.clause(i), budget)
            residual[i] = report.message_entropy_given_shares[new_index]

    confirmed = bool(failing)
    if oracle_checked:
        confirmed = confirmed and any(residual[i].is_exactly(1) for i in failing)
    return ForcedReplacementReport(
        forced_share=share,
        message_index=new_index,
        decodability=decode,
        failing_clauses=failing,
        oracle_checked=oracle_checked,
        residual_entropy=residual,
        confirmed=confirmed,
    )

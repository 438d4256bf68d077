import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from msshare import (
    InconsistentShares,
    LengthMismatch,
    MissingShareValue,
    NotAuthorized,
    ShareBundle,
    ShareId,
    UnderdeterminedMessage,
    apply_replacements,
    build_single_secret,
    deal,
    force_replace,
    parse_dnf,
    reconstruct,
)

from conftest import random_coefficients, random_structure


class TestDeal:
    def test_replaced_share_value_is_message_combination(self, example_multi):
        # S2^A1 = 2*M1 + M2 regardless of the sampled randoms.
        for seed in (0, 42, 99):
            bundle = deal(example_multi, [1, 2, 3, 4], random.Random(seed))
            assert bundle.value(ShareId.parse("S2^A1")) == (2 * 1 + 2) % 5

    def test_clause_values_sum_to_first_message(self, example_multi):
        bundle = deal(example_multi, [1, 2, 3, 4], random.Random(42))
        for i in range(1, example_multi.gamma.r + 1):
            total = sum(bundle.value(s) for s in example_multi.clause_shares(i)) % 5
            assert total == 1

    def test_zero_secret_single_plan(self, example_single):
        for seed in (1, 2, 3):
            bundle = deal(example_single, [0], random.Random(seed))
            for i in range(1, example_single.gamma.r + 1):
                total = sum(bundle.value(s) for s in example_single.clause_shares(i)) % 5
                assert total == 0

    def test_two_party_all_zero_messages(self):
        plan = apply_replacements(build_single_secret(parse_dnf("(P1&P2)"), 5))
        bundle = deal(plan, [0, 0], random.Random(7))
        assert bundle.value(ShareId(1, 1)) == 0
        assert bundle.value(ShareId(1, 2)) == 0

    def test_deterministic_for_seed(self, example_multi):
        one = deal(example_multi, [1, 2, 3, 4], random.Random(5))
        two = deal(example_multi, [1, 2, 3, 4], random.Random(5))
        assert one == two

    def test_length_mismatch(self, example_multi):
        with pytest.raises(LengthMismatch):
            deal(example_multi, [1, 2, 3], random.Random(0))

    def test_values_reduced_mod_q(self, example_multi):
        bundle = deal(example_multi, [6, 7, 8, 9], random.Random(0))
        same = deal(example_multi, [1, 2, 3, 4], random.Random(0))
        assert bundle == same

    def test_bundle_grouping(self, example_multi):
        bundle = deal(example_multi, [1, 2, 3, 4], random.Random(0))
        assert bundle.participants() == (1, 2, 3, 4)
        assert [s.label() for s, _ in bundle.assignments[1]] == ["S1^A1", "S1^A2"]
        restricted = bundle.restrict({2, 3})
        assert restricted.participants() == (2, 3)
        with pytest.raises(MissingShareValue):
            restricted.value(ShareId.parse("S1^A1"))


class TestReconstruct:
    def test_example_subsets(self, example_multi):
        bundle = deal(example_multi, [1, 2, 3, 4], random.Random(42))
        for subset in ({1, 2, 4}, {1, 3, 4}, {2, 3}, {1, 2, 3}, {1, 2, 3, 4}):
            got = reconstruct(example_multi, subset, bundle.restrict(subset))
            assert got == (1, 2, 3, 4)

    def test_unauthorized_subset_rejected(self, example_multi):
        bundle = deal(example_multi, [1, 2, 3, 4], random.Random(42))
        with pytest.raises(NotAuthorized):
            reconstruct(example_multi, {1, 2}, bundle.restrict({1, 2}))

    def test_tampered_share_detected_with_redundancy(self, example_multi):
        bundle = deal(example_multi, [1, 2, 3, 4], random.Random(42))
        full = set(range(1, 5))
        for victim in [s for s, _ in bundle.assignments[4]]:
            tampered = {
                p: tuple(
                    (s, (v + 1) % 5 if s == victim else v) for s, v in shares
                )
                for p, shares in bundle.assignments.items()
            }
            with pytest.raises(InconsistentShares):
                reconstruct(example_multi, full, ShareBundle(5, tampered))

    def test_missing_share_value(self, example_multi):
        bundle = deal(example_multi, [1, 2, 3, 4], random.Random(42))
        with pytest.raises(MissingShareValue):
            reconstruct(example_multi, {2, 3}, bundle.restrict({2}))

    def test_forced_plan_leaves_message_underdetermined(self, example_multi):
        forced = force_replace(example_multi, "S1^A1", 2, 1)
        bundle = deal(forced, [1, 2, 3, 4, 2], random.Random(3))
        with pytest.raises(UnderdeterminedMessage):
            reconstruct(forced, {2, 3}, bundle.restrict({2, 3}))
        # Clauses containing P1 still decode everything.
        got = reconstruct(forced, {1, 2, 4}, bundle.restrict({1, 2, 4}))
        assert got == (1, 2, 3, 4, 2)

    def test_roundtrip_over_random_plans(self):
        rng = random.Random(31)
        for _ in range(25):
            gamma = random_structure(rng)
            q = rng.choice([3, 5, 7])
            plan = apply_replacements(
                build_single_secret(gamma, q),
                coefficients=random_coefficients(rng, q),
            )
            messages = [rng.randrange(q) for _ in range(plan.message_count)]
            bundle = deal(plan, messages, random.Random(rng.randrange(2**32)))
            for subset in gamma.authorized_subsets():
                got = reconstruct(plan, subset, bundle.restrict(subset))
                assert got == tuple(messages)

    def test_word_sized_modulus(self, example_gamma):
        # Rank-certificate paths have no enumeration limits; a plan over a
        # large prime deals and reconstructs like any other.
        q = 2**31 - 1
        plan = apply_replacements(build_single_secret(example_gamma, q))
        messages = [123456789, 2**30, 7, q - 1]
        bundle = deal(plan, messages, random.Random(8))
        assert reconstruct(plan, {2, 3}, bundle.restrict({2, 3})) == tuple(messages)


@given(
    structure_seed=st.integers(0, 2**32),
    deal_seed=st.integers(0, 2**32),
    q=st.sampled_from([3, 5, 7, 11]),
)
@settings(max_examples=60, deadline=None)
def test_roundtrip_property(structure_seed, deal_seed, q):
    rng = random.Random(structure_seed)
    gamma = random_structure(rng)
    plan = apply_replacements(build_single_secret(gamma, q))
    messages = [rng.randrange(q) for _ in range(plan.message_count)]
    bundle = deal(plan, messages, random.Random(deal_seed))
    clause = gamma.clause(1 + structure_seed % gamma.r)
    assert reconstruct(plan, clause, bundle.restrict(clause)) == tuple(messages)

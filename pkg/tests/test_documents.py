import json
import random

import pytest

from msshare import (
    DocumentError,
    apply_replacements,
    build_single_secret,
    bundle_from_document,
    bundle_to_document,
    canonical_json,
    deal,
    force_replace,
    plan_digest,
    plan_from_document,
    plan_to_document,
)
from msshare.documents import BUNDLE_KIND, PLAN_KIND, load_document

from conftest import random_coefficients, random_structure

# Canonical digest of the worked example's pinned plan document; guards
# against accidental format drift.
EXAMPLE_PLAN_DIGEST = "d0c7f0494ef2e406d92bd4ee3252b4ea4fd6cb4fababd99ed0861ddcff5c45b2"


class TestPlanDocuments:
    def test_roundtrip(self, example_multi):
        doc = plan_to_document(example_multi)
        again = plan_from_document(doc)
        assert again == example_multi

    def test_roundtrip_through_text(self, example_multi):
        text = canonical_json(plan_to_document(example_multi))
        again = plan_from_document(load_document(text, PLAN_KIND))
        assert again == example_multi

    def test_canonical_bytes_are_stable(self, example_multi):
        one = canonical_json(plan_to_document(example_multi))
        two = canonical_json(plan_to_document(example_multi))
        assert one == two
        assert plan_digest(example_multi) == EXAMPLE_PLAN_DIGEST

    def test_field_elements_are_decimal_strings(self, example_multi):
        doc = plan_to_document(example_multi)
        assert doc["q"] == "5"
        for entry in doc["shares"]:
            assert all(isinstance(v, str) and v.isdigit() for v in entry["coefficients"])

    @pytest.mark.filterwarnings("ignore::msshare.UnusedParticipantWarning")
    def test_roundtrip_random_plans(self):
        rng = random.Random(3)
        for _ in range(20):
            gamma = random_structure(rng)
            q = rng.choice([3, 5, 7])
            plan = apply_replacements(
                build_single_secret(gamma, q),
                coefficients=random_coefficients(rng, q),
            )
            assert plan_from_document(plan_to_document(plan)) == plan

    def test_roundtrip_unsafe_plan(self, example_multi):
        forced = force_replace(example_multi, "S1^A1", 2, 1)
        doc = plan_to_document(forced)
        assert doc["unsafe"] is True
        again = plan_from_document(doc)
        assert again == forced
        assert again.unsafe

    def test_single_secret_roundtrip(self, example_single):
        assert plan_from_document(plan_to_document(example_single)) == example_single

    def test_rejects_unknown_version(self, example_multi):
        text = canonical_json({**plan_to_document(example_multi), "format_version": "9"})
        with pytest.raises(DocumentError):
            load_document(text, PLAN_KIND)

    def test_rejects_wrong_kind(self, example_multi):
        text = canonical_json(plan_to_document(example_multi))
        with pytest.raises(DocumentError):
            load_document(text, BUNDLE_KIND)

    def test_rejects_tampered_coefficients(self, example_multi):
        doc = plan_to_document(example_multi)
        doc = json.loads(canonical_json(doc))
        for entry in doc["shares"]:
            if entry["id"] == "S4^A1":
                entry["coefficients"][0] = "3"
        with pytest.raises(DocumentError):
            plan_from_document(doc)

    def test_rejects_invalid_json(self):
        with pytest.raises(DocumentError):
            load_document("{not json", PLAN_KIND)
        with pytest.raises(DocumentError):
            load_document('["list"]', PLAN_KIND)


class TestBundleDocuments:
    def test_roundtrip(self, example_multi):
        bundle = deal(example_multi, [1, 2, 3, 4], random.Random(42))
        doc = bundle_to_document(bundle, example_multi)
        assert doc["plan_digest"] == plan_digest(example_multi)
        again = bundle_from_document(doc, example_multi)
        assert again == bundle

    def test_digest_mismatch_rejected(self, example_multi, example_single):
        bundle = deal(example_multi, [1, 2, 3, 4], random.Random(42))
        doc = bundle_to_document(bundle, example_multi)
        with pytest.raises(DocumentError):
            bundle_from_document(doc, example_single)

    def test_digest_check_can_be_skipped(self, example_multi):
        bundle = deal(example_multi, [1, 2, 3, 4], random.Random(42))
        doc = bundle_to_document(bundle, example_multi)
        doc["plan_digest"] = "0" * 64
        assert bundle_from_document(doc, example_multi, check_digest=False) == bundle

    def test_values_are_decimal_strings(self, example_multi):
        bundle = deal(example_multi, [1, 2, 3, 4], random.Random(42))
        doc = bundle_to_document(bundle, example_multi)
        for entry in doc["participants"]:
            for item in entry["shares"]:
                assert isinstance(item["value"], str)

    def test_modulus_mismatch_rejected(self, example_multi):
        bundle = deal(example_multi, [1, 2, 3, 4], random.Random(42))
        doc = bundle_to_document(bundle, example_multi)
        doc["q"] = "7"
        doc["plan_digest"] = plan_digest(example_multi)
        with pytest.raises(DocumentError):
            bundle_from_document(doc, example_multi)

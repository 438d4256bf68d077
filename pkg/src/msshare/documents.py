"""Bit-exact document formats for plans, dealt shares, and reports.

Documents are UTF-8 JSON with sorted keys and no insignificant whitespace,
so identical content always serializes to identical bytes.  Field elements
travel as decimal strings.  A share bundle embeds the SHA-256 digest of its
plan's canonical bytes, and reconstruction refuses a bundle whose digest
does not match the plan it is given.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any

from .access import AccessStructure
from .dealing import ShareBundle
from .errors import DocumentError
from .scheme import (
    FIXED,
    RANDOM,
    REPLACED,
    SchemePlan,
    ShareId,
    _materialize,
    validate_plan,
)

FORMAT_VERSION = "1"
PLAN_KIND = "scheme-plan"
BUNDLE_KIND = "share-bundle"
REPORT_KIND = "verification-report"
ANALYSIS_KIND = "analysis"


def canonical_json(document: dict[str, Any]) -> str:
    return json.dumps(document, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def canonical_bytes(document: dict[str, Any]) -> bytes:
    return canonical_json(document).encode("utf-8")


def document_digest(document: dict[str, Any]) -> str:
    return hashlib.sha256(canonical_bytes(document)).hexdigest()


def load_document(text: str, expected_kind: str) -> dict[str, Any]:
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"not valid JSON: {exc}") from exc
    if not isinstance(document, dict):
        raise DocumentError("document must be a JSON object")
    if document.get("format_version") != FORMAT_VERSION:
        raise DocumentError(
            f"unsupported format_version {document.get('format_version')!r}"
        )
    if document.get("kind") != expected_kind:
        raise DocumentError(
            f"expected a {expected_kind} document, got {document.get('kind')!r}"
        )
    return document


# --- scheme plans ---


def plan_to_document(plan: SchemePlan) -> dict[str, Any]:
    shares = []
    replacement_config: dict[str, Any] = {}
    for share, spec in plan.table.items():
        entry: dict[str, Any] = {
            "id": share.label(),
            "clause": share.clause,
            "participant": share.participant,
            "kind": spec.kind,
            "coefficients": [str(v) for v in spec.form],
        }
        if spec.kind == REPLACED:
            a, b = spec.coefficients
            entry["message_index"] = spec.message_index
            entry["a"] = str(a)
            entry["b"] = str(b)
            replacement_config[share.label()] = {
                "a": str(a),
                "b": str(b),
                "message_index": spec.message_index,
            }
        shares.append(entry)
    return {
        "format_version": FORMAT_VERSION,
        "kind": PLAN_KIND,
        "q": str(plan.q),
        "participants": plan.gamma.n,
        "basis": [sorted(clause) for clause in plan.gamma.basis],
        "message_count": plan.message_count,
        "variables": list(plan.variable_labels()),
        "shares": shares,
        "configuration": {
            "tie_break": "highest-participant",
            "fixed": [s.label() for s in plan.fixed_shares()],
            "replacements": replacement_config,
        },
        "unsafe": plan.unsafe,
    }


def plan_from_document(document: dict[str, Any]) -> SchemePlan:
    try:
        gamma = AccessStructure(
            n=int(document["participants"]),
            basis=tuple(frozenset(clause) for clause in document["basis"]),
        )
        q = int(document["q"])
        unsafe = bool(document.get("unsafe", False))
        share_entries = document["shares"]
        message_count = int(document["message_count"])
    except (KeyError, TypeError, ValueError) as exc:
        raise DocumentError(f"malformed plan document: {exc}") from exc

    kinds: dict[ShareId, tuple] = {}
    stored_forms: dict[ShareId, tuple[int, ...]] = {}
    for entry in share_entries:
        try:
            share = ShareId(clause=int(entry["clause"]), participant=int(entry["participant"]))
            kind = entry["kind"]
            stored_forms[share] = tuple(int(v) for v in entry["coefficients"])
            if kind == REPLACED:
                kinds[share] = (REPLACED, int(entry["a"]), int(entry["b"]), int(entry["message_index"]))
            elif kind in (RANDOM, FIXED):
                kinds[share] = (kind,)
            else:
                raise DocumentError(f"unknown share kind {kind!r}")
        except (KeyError, TypeError, ValueError) as exc:
            raise DocumentError(f"malformed share entry: {exc}") from exc

    plan = _materialize(gamma, q, kinds, unsafe=unsafe)
    if plan.message_count != message_count:
        raise DocumentError("message_count disagrees with the replacement entries")
    for share, spec in plan.table.items():
        stored = stored_forms.get(share)
        if stored is None:
            raise DocumentError(f"plan document is missing share {share.label()}")
        if stored != spec.form:
            raise DocumentError(
                f"stored coefficients for {share.label()} disagree with its kind; "
                "document is inconsistent"
            )
    if list(document.get("variables", plan.variable_labels())) != list(plan.variable_labels()):
        raise DocumentError("variable labels disagree with the share table")
    if not unsafe:
        validate_plan(plan)
    return plan


def plan_digest(plan: SchemePlan) -> str:
    return document_digest(plan_to_document(plan))


# --- dealt share bundles ---


def bundle_to_document(bundle: ShareBundle, plan: SchemePlan) -> dict[str, Any]:
    return {
        "format_version": FORMAT_VERSION,
        "kind": BUNDLE_KIND,
        "plan_digest": plan_digest(plan),
        "q": str(bundle.q),
        "participants": [
            {
                "participant": participant,
                "shares": [{"id": s.label(), "value": str(v)} for s, v in shares],
            }
            for participant, shares in bundle.assignments.items()
        ],
    }


def bundle_from_document(
    document: dict[str, Any], plan: SchemePlan, check_digest: bool = True
) -> ShareBundle:
    if check_digest:
        expected = plan_digest(plan)
        if document.get("plan_digest") != expected:
            raise DocumentError(
                "share bundle was dealt for a different plan (digest mismatch)"
            )
    try:
        q = int(document["q"])
        assignments = {}
        for entry in document["participants"]:
            participant = int(entry["participant"])
            shares = tuple(
                (ShareId.parse(item["id"]), int(item["value"]) % q)
                for item in entry["shares"]
            )
            assignments[participant] = shares
    except (KeyError, TypeError, ValueError) as exc:
        raise DocumentError(f"malformed share bundle: {exc}") from exc
    if q != plan.q:
        raise DocumentError(f"bundle modulus {q} differs from plan modulus {plan.q}")
    return ShareBundle(q, assignments)

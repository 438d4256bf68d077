"""Command-line surface: analyze, build, deal, reconstruct, verify, and the
forced-replacement demo.

All documents stream through stdin/stdout ("-") or files.  Text output is
tab-delimited; --json switches to the canonical document formats.  Exit
codes: 0 ok, 1 verification found violations, 2 validation error,
3 subset not authorized, 4 inconsistent share values, 5 enumeration guard.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from . import documents as docs
from . import verify as ver
from .access import AccessStructure, parse_dnf
from .dealing import deal, reconstruct
from .errors import (
    InconsistentShares,
    MsshareError,
    NotAuthorized,
    ResourceGuardError,
    ValidationError,
)
from .scheme import (
    ShareId,
    apply_replacements,
    build_single_secret,
    default_fixed_assignment,
    rate,
    replaceable_set,
)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_VALIDATION = 2
EXIT_NOT_AUTHORIZED = 3
EXIT_INCONSISTENT = 4
EXIT_GUARD = 5


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="msshare",
        description=(
            "Build individually secure multi-secret sharing schemes for monotone "
            "access structures, deal and reconstruct shares over a prime field, "
            "and machine-verify decodability and security."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="classify shares and report achievable rates")
    _add_structure_args(analyze)
    analyze.add_argument("--json", action="store_true", help="emit a canonical JSON document")
    analyze.add_argument("--output", "-o", default="-", help="output path, - for stdout")
    analyze.set_defaults(handler=_cmd_analyze)

    build = sub.add_parser("build", help="build a multi-secret scheme plan document")
    _add_structure_args(build)
    build.add_argument("--fix", action="append", default=[],
                       help="pin fixed shares, e.g. --fix S4^A1,S3^A3 (repeatable)")
    build.add_argument("--coeff", action="append", default=[],
                       help="replacement coefficients: 'a,b' for all or 'S2^A1=a,b' (repeatable)")
    build.add_argument("--map", action="append", default=[], dest="message_map",
                       help="pin message indices, e.g. --map S2^A1=2 (repeatable)")
    build.add_argument("--output", "-o", default="-", help="output path, - for stdout")
    build.set_defaults(handler=_cmd_build)

    deal_cmd = sub.add_parser("deal", help="deal concrete share values from a plan")
    deal_cmd.add_argument("plan", help="plan document path, - for stdin")
    deal_cmd.add_argument("--messages", required=True, help="comma-separated values, e.g. 1,2,3,4")
    deal_cmd.add_argument("--seed", type=int, default=0, help="seed for the share randomness")
    deal_cmd.add_argument("--output", "-o", default="-", help="output path, - for stdout")
    deal_cmd.set_defaults(handler=_cmd_deal)

    rec = sub.add_parser("reconstruct", help="recover all messages from a subset's shares")
    rec.add_argument("plan", help="plan document path, - for stdin")
    rec.add_argument("shares", help="share bundle document path, - for stdin")
    rec.add_argument("--subset", help="restrict to these participants, e.g. 2,3 (default: all in bundle)")
    rec.add_argument("--output", "-o", default="-", help="output path, - for stdout")
    rec.set_defaults(handler=_cmd_reconstruct)

    verify_cmd = sub.add_parser("verify", help="verify decodability and individual security")
    verify_cmd.add_argument("plan", help="plan document path, - for stdin")
    verify_cmd.add_argument("--mode", choices=["rank", "oracle", "both"], default="rank",
                            help="rank certificates, exhaustive entropy oracle, or both")
    verify_cmd.add_argument("--budget", type=int, default=ver.DEFAULT_ORACLE_BUDGET,
                            help="maximum number of oracle assignments")
    verify_cmd.add_argument("--exhaustive", action="store_true",
                            help="check every unauthorized subset, not just maximal ones")
    verify_cmd.add_argument("--json", action="store_true", help="emit a canonical JSON report")
    verify_cmd.add_argument("--figures", metavar="DIR",
                            help="also render verdict heatmaps as PNG files into DIR")
    verify_cmd.add_argument("--output", "-o", default="-", help="output path, - for stdout")
    verify_cmd.set_defaults(handler=_cmd_verify)

    demo = sub.add_parser(
        "theorem2-demo",
        help="force-replace a non-replaceable share and show the decodability failure",
    )
    demo.add_argument("plan", help="plan document path, - for stdin")
    demo.add_argument("--share", required=True, help="non-replaceable share to force, e.g. S1^A1")
    demo.add_argument("--coeff", default="2,1", help="replacement pair a,b (default 2,1)")
    demo.add_argument("--budget", type=int, default=ver.DEFAULT_ORACLE_BUDGET,
                      help="maximum number of oracle assignments")
    demo.add_argument("--json", action="store_true", help="emit a canonical JSON report")
    demo.add_argument("--output", "-o", default="-", help="output path, - for stdout")
    demo.set_defaults(handler=_cmd_demo)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except NotAuthorized as exc:
        return _fail(exc, EXIT_NOT_AUTHORIZED)
    except InconsistentShares as exc:
        return _fail(exc, EXIT_INCONSISTENT)
    except ResourceGuardError as exc:
        return _fail(exc, EXIT_GUARD)
    except (ValidationError, MsshareError) as exc:
        return _fail(exc, EXIT_VALIDATION)
    except OSError as exc:
        print(f"error[io]: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


def console_main() -> None:
    sys.exit(main())


def _fail(exc: Exception, code: int) -> int:
    print(f"error[{type(exc).__name__}]: {exc}", file=sys.stderr)
    return code


# --- command handlers ---


def _cmd_analyze(args) -> int:
    gamma, q = _load_structure(args)
    single = build_single_secret(gamma, q)
    multi = apply_replacements(single)
    replaceable = replaceable_set(gamma)
    fixed = [default_fixed_assignment(gamma)[i] for i in range(1, gamma.r + 1)]
    single_rate, multi_rate = rate(single), rate(multi)

    if args.json:
        document = {
            "format_version": docs.FORMAT_VERSION,
            "kind": docs.ANALYSIS_KIND,
            "q": str(q),
            "participants": gamma.n,
            "basis": [sorted(c) for c in gamma.basis],
            "formula": gamma.formula(),
            "total_shares": multi.total_shares,
            "replaceable": [s.label() for s in replaceable],
            "fixed": [s.label() for s in fixed],
            "message_count": multi.message_count,
            "rate_single_secret": str(single_rate.rate),
            "rate_multi_secret": str(multi_rate.rate),
        }
        _write(args.output, docs.canonical_json(document) + "\n")
        return EXIT_OK

    lines = [
        f"participants\t{gamma.n}",
        f"clauses\t{gamma.r}",
        f"formula\t{gamma.formula()}",
        f"q\t{q}",
        f"total_shares\t{multi.total_shares}",
        "replaceable\t" + ",".join(s.label() for s in replaceable),
        "fixed\t" + ",".join(s.label() for s in fixed),
        f"messages\t{multi.message_count}",
        f"rate_single_secret\t{single_rate.rate}",
        f"rate_multi_secret\t{multi_rate.rate}",
    ]
    _write(args.output, "\n".join(lines) + "\n")
    return EXIT_OK


def _cmd_build(args) -> int:
    gamma, q = _load_structure(args)
    pins = _parse_share_list(args.fix)
    message_map = _parse_message_map(args.message_map)
    single = build_single_secret(gamma, q, fixed=pins or None)
    coefficients = _parse_coefficients(args.coeff, gamma, pins)
    plan = apply_replacements(
        single,
        coefficients=coefficients,
        fixed=pins or None,
        message_map=message_map or None,
    )
    _write(args.output, docs.canonical_json(docs.plan_to_document(plan)) + "\n")
    return EXIT_OK


def _cmd_deal(args) -> int:
    plan = docs.plan_from_document(docs.load_document(_read(args.plan), docs.PLAN_KIND))
    values = _parse_int_list(args.messages, "messages")
    if len(values) != plan.message_count:
        raise ValidationError(
            f"expected {plan.message_count} messages, got {len(values)}"
        )
    for value in values:
        if not 0 <= value < plan.q:
            raise ValidationError(f"message value {value} outside [0, {plan.q})")
    bundle = deal(plan, values, random.Random(args.seed))
    _write(args.output, docs.canonical_json(docs.bundle_to_document(bundle, plan)) + "\n")
    return EXIT_OK


def _cmd_reconstruct(args) -> int:
    if args.plan == "-" and args.shares == "-":
        raise ValidationError("plan and shares cannot both come from stdin")
    plan = docs.plan_from_document(docs.load_document(_read(args.plan), docs.PLAN_KIND))
    bundle = docs.bundle_from_document(
        docs.load_document(_read(args.shares), docs.BUNDLE_KIND), plan
    )
    if args.subset:
        subset = frozenset(_parse_participants(args.subset))
        bundle = bundle.restrict(subset)
    else:
        subset = frozenset(bundle.participants())
    messages = reconstruct(plan, subset, bundle)
    _write(args.output, ",".join(str(v) for v in messages) + "\n")
    return EXIT_OK


def _cmd_verify(args) -> int:
    plan = docs.plan_from_document(docs.load_document(_read(args.plan), docs.PLAN_KIND))
    decode = ver.check_decodability(plan)
    security = oracle_section = None
    if args.mode in ("rank", "both"):
        security = ver.check_security_all(plan, exhaustive=args.exhaustive)
    if args.mode in ("oracle", "both"):
        oracle_section = _run_oracle(plan, args.budget, security)

    ok = decode.all_pass
    if security is not None:
        ok = ok and security.overall
    if oracle_section is not None:
        ok = ok and oracle_section["all_hidden"] and oracle_section["all_determined"]
        if security is not None:
            ok = ok and oracle_section["agrees_with_rank"]

    if args.figures:
        from . import figures

        paths = figures.render_verification_figures(decode, security, Path(args.figures))
        for path in paths:
            print(f"figure\t{path}", file=sys.stderr)

    if args.json:
        _write(args.output, docs.canonical_json(
            _report_document(plan, args.mode, ok, decode, security, oracle_section)
        ) + "\n")
    else:
        _write(args.output, _report_text(args.mode, ok, decode, security, oracle_section))
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


def _cmd_demo(args) -> int:
    plan = docs.plan_from_document(docs.load_document(_read(args.plan), docs.PLAN_KIND))
    a, b = _parse_pair(args.coeff)
    report = ver.forced_replacement_report(plan, args.share, a, b, budget=args.budget)

    if args.json:
        document = {
            "format_version": docs.FORMAT_VERSION,
            "kind": "forced-replacement-report",
            "forced_share": report.forced_share.label(),
            "forced_message": report.message_index,
            "decodability": [
                {"clause": c.clause, "message": c.message, "ok": c.ok}
                for c in report.decodability.checks
            ],
            "failing_clauses": list(report.failing_clauses),
            "oracle_checked": report.oracle_checked,
            "residual_entropy": {
                f"A{i}": _entropy_json(e) for i, e in report.residual_entropy.items()
            },
            "confirmed": report.confirmed,
        }
        _write(args.output, docs.canonical_json(document) + "\n")
    else:
        lines = [
            f"forced_share\t{report.forced_share.label()}",
            f"forced_message\tM{report.message_index}",
        ]
        for check in report.decodability.failures():
            lines.append(f"decode_fail\tA{check.clause}\tM{check.message}")
        for i, entropy in sorted(report.residual_entropy.items()):
            lines.append(f"residual\tA{i}\t{_coeff_str(entropy)}")
        lines.append(f"confirmed\t{'yes' if report.confirmed else 'no'}")
        _write(args.output, "\n".join(lines) + "\n")
    return EXIT_OK if report.confirmed else EXIT_VERIFY_FAILED


# --- verification report assembly ---


def _run_oracle(plan, budget, security):
    subsets = plan.gamma.maximal_unauthorized()
    subset_reports = [ver.entropy_oracle(plan, subset, budget) for subset in subsets]
    clause_reports = {
        i: ver.entropy_oracle(plan, plan.gamma.clause(i), budget)
        for i in range(1, plan.gamma.r + 1)
    }
    all_hidden = all(r.all_messages_hidden() for r in subset_reports)
    all_determined = all(r.all_messages_determined() for r in clause_reports.values())

    agrees = True
    if security is not None:
        rank_verdicts = {(c.subset, c.message): c.secure for c in security.checks}
        for report in subset_reports:
            for ell, mi in report.mutual_information.items():
                verdict = rank_verdicts.get((report.subset, ell))
                if verdict is not None and verdict != mi.zero:
                    agrees = False
    return {
        "budget": budget,
        "subset_reports": subset_reports,
        "clause_reports": clause_reports,
        "all_hidden": all_hidden,
        "all_determined": all_determined,
        "agrees_with_rank": agrees,
    }


def _entropy_json(entropy: ver.Entropy) -> dict:
    coefficient = entropy.log_q_coefficient
    return {
        "log_q_coefficient": None if coefficient is None else str(coefficient),
        "uniform": entropy.uniform,
    }


def _coeff_str(entropy: ver.Entropy) -> str:
    if entropy.log_q_coefficient is None:
        return f"~{entropy.bits:.6f}bits"
    return str(entropy.log_q_coefficient)


def _report_document(plan, mode, ok, decode, security, oracle_section) -> dict:
    document = {
        "format_version": docs.FORMAT_VERSION,
        "kind": docs.REPORT_KIND,
        "plan_digest": docs.plan_digest(plan),
        "q": str(plan.q),
        "message_count": plan.message_count,
        "mode": mode,
        "overall": ok,
        "decodability": {
            "all_pass": decode.all_pass,
            "checks": [
                {"clause": c.clause, "message": c.message, "ok": c.ok}
                for c in decode.checks
            ],
        },
    }
    if security is not None:
        document["security"] = {
            "overall": security.overall,
            "subset_mode": security.subset_mode,
            "checks": [
                {
                    "subset": list(c.subset),
                    "message": c.message,
                    "share_count": c.share_count,
                    "rank": c.rank,
                    "rank_conditioned": c.rank_conditioned,
                    "secure": c.secure,
                    "pivots": [list(p) for p in c.pivots],
                    "pivots_conditioned": [list(p) for p in c.pivots_conditioned],
                }
                for c in security.checks
            ],
        }
    if oracle_section is not None:
        document["oracle"] = {
            "budget": oracle_section["budget"],
            "agrees_with_rank": oracle_section["agrees_with_rank"],
            "subsets": [
                {
                    "subset": list(r.subset),
                    "assignments": r.assignment_count,
                    "share_entropy": _entropy_json(r.share_entropy),
                    "share_tuple_uniform": r.share_tuple_uniform,
                    "per_message": [
                        {
                            "message": ell,
                            "conditional_share_entropy": _entropy_json(
                                r.conditional_share_entropy[ell]
                            ),
                            "mutual_information_zero": r.mutual_information[ell].zero,
                        }
                        for ell in sorted(r.mutual_information)
                    ],
                }
                for r in oracle_section["subset_reports"]
            ],
            "clauses": [
                {
                    "clause": i,
                    "per_message": [
                        {
                            "message": ell,
                            "entropy_given_shares": _entropy_json(
                                r.message_entropy_given_shares[ell]
                            ),
                        }
                        for ell in sorted(r.message_entropy_given_shares)
                    ],
                }
                for i, r in sorted(oracle_section["clause_reports"].items())
            ],
        }
    return document


def _report_text(mode, ok, decode, security, oracle_section) -> str:
    lines = ["# decodability"]
    for check in decode.checks:
        lines.append(f"A{check.clause}\tM{check.message}\t{'ok' if check.ok else 'FAIL'}")
    if security is not None:
        lines.append(f"# security (rank certificates, {security.subset_mode} unauthorized subsets)")
        for c in security.checks:
            subset = ",".join(f"P{p}" for p in c.subset)
            status = "secure" if c.secure else "INSECURE"
            lines.append(
                f"{subset}\tM{c.message}\tt={c.share_count}\trank={c.rank}"
                f"\tcond={c.rank_conditioned}\t{status}"
            )
    if oracle_section is not None:
        lines.append("# oracle (exact entropies as multiples of log2 q)")
        for r in oracle_section["subset_reports"]:
            subset = ",".join(f"P{p}" for p in r.subset)
            lines.append(
                f"{subset}\tH(S)\t{_coeff_str(r.share_entropy)}"
                f"\tuniform={'yes' if r.share_tuple_uniform else 'no'}"
            )
            for ell in sorted(r.mutual_information):
                zero = r.mutual_information[ell].zero
                lines.append(
                    f"{subset}\tM{ell}\tH(S|M)={_coeff_str(r.conditional_share_entropy[ell])}"
                    f"\tI_zero={'yes' if zero else 'NO'}"
                )
        for i, r in sorted(oracle_section["clause_reports"].items()):
            for ell in sorted(r.message_entropy_given_shares):
                lines.append(
                    f"A{i}\tM{ell}\tH(M|S)={_coeff_str(r.message_entropy_given_shares[ell])}"
                )
        if security is not None:
            agrees = oracle_section["agrees_with_rank"]
            lines.append(f"# oracle_rank_agreement\t{'yes' if agrees else 'NO'}")
    lines.append(f"overall\t{'pass' if ok else 'FAIL'}")
    return "\n".join(lines) + "\n"


# --- input parsing helpers ---


def _add_structure_args(parser) -> None:
    parser.add_argument("formula", nargs="?",
                        help="monotone DNF formula, e.g. '(P1&P2&P4)|(P2&P3)'")
    parser.add_argument("--basis-file", help="JSON basis: [[1,2,4],[2,3]] or {participants, basis}")
    parser.add_argument("--q", type=int, required=True, help="prime field modulus, at least 3")


def _load_structure(args) -> tuple[AccessStructure, int]:
    if args.formula and args.basis_file:
        raise ValidationError("give either a formula or --basis-file, not both")
    if args.formula:
        return parse_dnf(args.formula), args.q
    if args.basis_file:
        raw = json.loads(_read(args.basis_file))
        if isinstance(raw, dict):
            basis = [frozenset(c) for c in raw["basis"]]
            n = int(raw.get("participants") or max(max(c) for c in basis))
        else:
            basis = [frozenset(c) for c in raw]
            n = max(max(c) for c in basis)
        return AccessStructure(n, tuple(basis)), args.q
    raise ValidationError("an access structure is required (formula or --basis-file)")


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _write(path: str, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _parse_int_list(text: str, what: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError as exc:
        raise ValidationError(f"could not parse {what} {text!r}: {exc}") from exc


def _parse_participants(text: str) -> list[int]:
    parts = [part.strip().lstrip("Pp") for part in text.split(",") if part.strip()]
    try:
        return [int(part) for part in parts]
    except ValueError as exc:
        raise ValidationError(f"could not parse participants {text!r}") from exc


def _parse_share_list(items: list[str]) -> list[ShareId]:
    shares = []
    for item in items:
        for chunk in item.split(","):
            if chunk.strip():
                shares.append(ShareId.parse(chunk))
    return shares


def _parse_pair(text: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValidationError(f"expected a pair like 2,1, got {text!r}")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise ValidationError(f"could not parse pair {text!r}") from exc


def _parse_coefficients(items: list[str], gamma, pins):
    """--coeff entries: bare 'a,b' sets the default pair, 'SID=a,b' pins one
    share.  Returns what apply_replacements expects."""
    default_pair = None
    per_share: dict[ShareId, tuple[int, int]] = {}
    for item in items:
        if "=" in item:
            name, _, pair = item.partition("=")
            per_share[ShareId.parse(name)] = _parse_pair(pair)
        else:
            if default_pair is not None:
                raise ValidationError("only one default --coeff pair may be given")
            default_pair = _parse_pair(item)
    if not per_share:
        return default_pair
    if default_pair is not None:
        from .scheme import _resolve_fixed  # resolved pins decide what gets replaced

        assignment = _resolve_fixed(gamma, pins or None)
        for share in replaceable_set(gamma):
            if assignment[share.clause] != share and share not in per_share:
                per_share[share] = default_pair
    return per_share


def _parse_message_map(items: list[str]) -> dict[ShareId, int]:
    mapping: dict[ShareId, int] = {}
    for item in items:
        for chunk in item.split(","):
            if not chunk.strip():
                continue
            name, sep, index = chunk.partition("=")
            if not sep:
                raise ValidationError(f"expected SID=index, got {chunk!r}")
            try:
                mapping[ShareId.parse(name)] = int(index)
            except ValueError as exc:
                raise ValidationError(f"bad message index in {chunk!r}") from exc
    return mapping

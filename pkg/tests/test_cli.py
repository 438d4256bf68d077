import io
import json

import pytest

from msshare import (
    UnusedParticipantWarning,
    canonical_json,
    force_replace,
    plan_to_document,
)
from msshare.cli import main

from conftest import EXAMPLE_FORMULA

MAP_ARGS = ["--map", "S2^A1=2,S2^A3=3,S3^A2=4"]


def run(capsys, argv, stdin=None, monkeypatch=None):
    if stdin is not None:
        assert monkeypatch is not None
        monkeypatch.setattr("sys.stdin", io.StringIO(stdin))
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture()
def plan_path(tmp_path, capsys):
    path = tmp_path / "plan.json"
    code = main(["build", EXAMPLE_FORMULA, "--q", "5", *MAP_ARGS, "-o", str(path)])
    capsys.readouterr()
    assert code == 0
    return path


@pytest.fixture()
def shares_path(tmp_path, plan_path, capsys):
    path = tmp_path / "shares.json"
    code = main(["deal", str(plan_path), "--messages", "1,2,3,4", "--seed", "42",
                 "-o", str(path)])
    capsys.readouterr()
    assert code == 0
    return path


class TestAnalyze:
    def test_text_output(self, capsys):
        code, out, _ = run(capsys, ["analyze", EXAMPLE_FORMULA, "--q", "5"])
        assert code == 0
        fields = dict(line.split("\t", 1) for line in out.strip().splitlines())
        assert fields["replaceable"] == "S2^A1,S3^A2,S2^A3,S3^A3"
        assert fields["fixed"] == "S4^A1,S4^A2,S3^A3"
        assert fields["messages"] == "4"
        assert fields["rate_single_secret"] == "1/8"
        assert fields["rate_multi_secret"] == "1/2"

    def test_json_output(self, capsys):
        code, out, _ = run(capsys, ["analyze", EXAMPLE_FORMULA, "--q", "5", "--json"])
        assert code == 0
        doc = json.loads(out)
        assert doc["kind"] == "analysis"
        assert doc["message_count"] == 4
        assert doc["rate_multi_secret"] == "1/2"

    def test_two_party(self, capsys):
        code, out, _ = run(capsys, ["analyze", "(P1&P2)", "--q", "5"])
        assert code == 0
        fields = dict(line.split("\t", 1) for line in out.strip().splitlines())
        assert fields["replaceable"] == "S1^A1,S2^A1"
        assert fields["messages"] == "2"
        assert fields["rate_multi_secret"] == "1"

    def test_structure_with_nothing_replaceable(self, capsys):
        code, out, _ = run(capsys, ["analyze", "(P1&P2)|(P3&P4)", "--q", "5"])
        assert code == 0
        fields = dict(line.split("\t", 1) for line in out.strip().splitlines())
        assert fields["replaceable"] == ""
        assert fields["messages"] == "1"
        assert fields["rate_multi_secret"] == fields["rate_single_secret"] == "1/4"

    def test_singleton_clause_exits_2_with_diagnostic(self, capsys):
        code, _, err = run(capsys, ["analyze", "(P1)", "--q", "5"])
        assert code == 2
        assert "SingletonClause" in err

    def test_composite_modulus_exits_2(self, capsys):
        code, _, err = run(capsys, ["analyze", "(P1&P2)", "--q", "6"])
        assert code == 2
        assert "NonPrimeModulus" in err

    def test_basis_file(self, tmp_path, capsys):
        basis = tmp_path / "basis.json"
        basis.write_text(json.dumps([[1, 2, 4], [1, 3, 4], [2, 3]]))
        code, out, _ = run(capsys, ["analyze", "--basis-file", str(basis), "--q", "5"])
        assert code == 0
        assert "rate_multi_secret\t1/2" in out

    def test_basis_file_dict_form(self, tmp_path, capsys):
        basis = tmp_path / "basis.json"
        basis.write_text(json.dumps({"participants": 5, "basis": [[1, 2], [2, 3]]}))
        with pytest.warns(UnusedParticipantWarning):  # P4, P5 hold no shares
            code, out, _ = run(capsys, ["analyze", "--basis-file", str(basis), "--q", "5"])
        assert code == 0
        assert "participants\t5" in out


class TestBuild:
    def test_matches_library_document(self, plan_path, example_multi):
        assert plan_path.read_text().strip() == canonical_json(plan_to_document(example_multi))

    def test_byte_identical_across_runs(self, tmp_path, capsys):
        outs = []
        for name in ("a.json", "b.json"):
            path = tmp_path / name
            assert main(["build", EXAMPLE_FORMULA, "--q", "5", *MAP_ARGS, "-o", str(path)]) == 0
            capsys.readouterr()
            outs.append(path.read_bytes())
        assert outs[0] == outs[1]

    def test_forbidden_coefficient_exits_2(self, capsys):
        code, _, err = run(capsys, ["build", EXAMPLE_FORMULA, "--q", "5", "--coeff", "1,1"])
        assert code == 2
        assert "BadCoefficient" in err

    def test_coefficient_and_fix_options(self, capsys):
        code, out, _ = run(capsys, [
            "build", EXAMPLE_FORMULA, "--q", "7",
            "--coeff", "3,2", "--coeff", "S2^A1=4,5", "--fix", "S1^A1",
        ])
        assert code == 0
        doc = json.loads(out)
        repl = doc["configuration"]["replacements"]
        assert repl["S2^A1"] == {"a": "4", "b": "5", "message_index": 2}
        assert repl["S3^A2"]["a"] == "3"
        assert "S1^A1" in doc["configuration"]["fixed"]

    def test_stdout_stdin_streaming(self, capsys, monkeypatch):
        code, out, _ = run(capsys, ["build", EXAMPLE_FORMULA, "--q", "5", *MAP_ARGS])
        assert code == 0
        code, out2, _ = run(capsys, ["verify", "-", "--mode", "rank"],
                            stdin=out, monkeypatch=monkeypatch)
        assert code == 0
        assert "overall\tpass" in out2


class TestDeal:
    def test_document_contents(self, shares_path, plan_path):
        doc = json.loads(shares_path.read_text())
        plan_doc = json.loads(plan_path.read_text())
        values = [
            int(item["value"])
            for entry in doc["participants"]
            for item in entry["shares"]
        ]
        assert len(values) == 8
        assert all(0 <= v < 5 for v in values)
        assert doc["plan_digest"]
        # Per-clause sums equal M1 = 1.
        by_id = {
            item["id"]: int(item["value"])
            for entry in doc["participants"]
            for item in entry["shares"]
        }
        for clause in (1, 2, 3):
            ids = [e["id"] for e in plan_doc["shares"] if e["clause"] == clause]
            assert sum(by_id[i] for i in ids) % 5 == 1

    def test_deterministic_for_seed(self, tmp_path, plan_path, capsys):
        blobs = []
        for name in ("s1.json", "s2.json"):
            path = tmp_path / name
            assert main(["deal", str(plan_path), "--messages", "1,2,3,4",
                         "--seed", "9", "-o", str(path)]) == 0
            capsys.readouterr()
            blobs.append(path.read_bytes())
        assert blobs[0] == blobs[1]

    def test_wrong_message_count_exits_2(self, plan_path, capsys):
        code, _, err = run(capsys, ["deal", str(plan_path), "--messages", "1,2"])
        assert code == 2

    def test_out_of_range_value_exits_2(self, plan_path, capsys):
        code, _, err = run(capsys, ["deal", str(plan_path), "--messages", "1,2,3,7"])
        assert code == 2
        assert "outside" in err


class TestReconstruct:
    def test_authorized_pair(self, plan_path, shares_path, capsys):
        code, out, _ = run(capsys, ["reconstruct", str(plan_path), str(shares_path),
                                    "--subset", "2,3"])
        assert code == 0
        assert out.strip() == "1,2,3,4"

    def test_all_participants_default(self, plan_path, shares_path, capsys):
        code, out, _ = run(capsys, ["reconstruct", str(plan_path), str(shares_path)])
        assert code == 0
        assert out.strip() == "1,2,3,4"

    def test_subset_accepts_p_prefixes(self, plan_path, shares_path, capsys):
        code, out, _ = run(capsys, ["reconstruct", str(plan_path), str(shares_path),
                                    "--subset", "P2,P3"])
        assert code == 0
        assert out.strip() == "1,2,3,4"

    def test_unauthorized_subset_exits_3(self, plan_path, shares_path, capsys):
        code, _, err = run(capsys, ["reconstruct", str(plan_path), str(shares_path),
                                    "--subset", "3,4"])
        assert code == 3
        assert "NotAuthorized" in err

    def test_tampered_value_exits_4(self, tmp_path, plan_path, shares_path, capsys):
        doc = json.loads(shares_path.read_text())
        doc["participants"][0]["shares"][0]["value"] = str(
            (int(doc["participants"][0]["shares"][0]["value"]) + 1) % 5
        )
        tampered = tmp_path / "tampered.json"
        tampered.write_text(canonical_json(doc))
        code, _, err = run(capsys, ["reconstruct", str(plan_path), str(tampered)])
        assert code == 4
        assert "InconsistentShares" in err

    def test_digest_mismatch_exits_2(self, tmp_path, shares_path, capsys):
        other_plan = tmp_path / "other.json"
        assert main(["build", "(P1&P2)", "--q", "5", "-o", str(other_plan)]) == 0
        capsys.readouterr()
        code, _, err = run(capsys, ["reconstruct", str(other_plan), str(shares_path)])
        assert code == 2
        assert "digest" in err


class TestVerify:
    def test_both_modes_pass(self, plan_path, capsys):
        code, out, _ = run(capsys, ["verify", str(plan_path), "--mode", "both"])
        assert code == 0
        assert "overall\tpass" in out
        assert out.count("secure") == 20

    def test_json_report(self, plan_path, capsys):
        code, out, _ = run(capsys, ["verify", str(plan_path), "--mode", "both", "--json"])
        assert code == 0
        doc = json.loads(out)
        assert doc["overall"] is True
        assert doc["security"]["overall"] is True
        assert len(doc["security"]["checks"]) == 20
        assert all(c["pivots"] for c in doc["security"]["checks"])
        assert doc["oracle"]["agrees_with_rank"] is True

    def test_forced_plan_fails_with_exit_1(self, tmp_path, example_multi, capsys):
        forced = force_replace(example_multi, "S1^A1", 2, 1)
        path = tmp_path / "forced.json"
        path.write_text(canonical_json(plan_to_document(forced)) + "\n")
        code, out, _ = run(capsys, ["verify", str(path), "--mode", "both"])
        assert code == 1
        assert "A3\tM5\tFAIL" in out

    def test_oracle_budget_exits_5(self, tmp_path, capsys):
        path = tmp_path / "big.json"
        assert main(["build", EXAMPLE_FORMULA, "--q", "1009", "-o", str(path)]) == 0
        capsys.readouterr()
        code, _, err = run(capsys, ["verify", str(path), "--mode", "oracle"])
        assert code == 5
        assert "BudgetExceeded" in err

    def test_exhaustive_flag(self, plan_path, capsys):
        code, out, _ = run(capsys, ["verify", str(plan_path), "--exhaustive"])
        assert code == 0
        assert "exhaustive" in out

    def test_oracle_only_mode(self, plan_path, capsys):
        code, out, _ = run(capsys, ["verify", str(plan_path), "--mode", "oracle"])
        assert code == 0
        assert "H(S)" in out
        assert "rank=" not in out

    def test_report_written_to_file(self, tmp_path, plan_path, capsys):
        out_path = tmp_path / "report.json"
        code, _, _ = run(capsys, ["verify", str(plan_path), "--json", "-o", str(out_path)])
        assert code == 0
        assert json.loads(out_path.read_text())["overall"] is True

    def test_figures_rendered(self, tmp_path, plan_path, capsys):
        figdir = tmp_path / "figs"
        code, _, _ = run(capsys, ["verify", str(plan_path), "--figures", str(figdir)])
        assert code == 0
        for name in ("decodability.png", "security_rank.png"):
            data = (figdir / name).read_bytes()
            assert data[:8] == b"\x89PNG\r\n\x1a\n"


class TestPipelineDeterminism:
    def test_analyze_and_verify_byte_identical_across_runs(self, plan_path, capsys):
        outs = []
        for _ in range(2):
            code, out, _ = run(capsys, ["analyze", EXAMPLE_FORMULA, "--q", "5", "--json"])
            assert code == 0
            outs.append(out)
        assert outs[0] == outs[1]

        reports = []
        for _ in range(2):
            code, out, _ = run(capsys, ["verify", str(plan_path), "--mode", "both", "--json"])
            assert code == 0
            reports.append(out)
        assert reports[0] == reports[1]


class TestDemo:
    def test_confirmed_failure_exits_0(self, plan_path, capsys):
        code, out, _ = run(capsys, ["theorem2-demo", str(plan_path), "--share", "S1^A1"])
        assert code == 0
        assert "decode_fail\tA3\tM5" in out
        assert "residual\tA3\t1" in out
        assert "confirmed\tyes" in out

    def test_json_report(self, plan_path, capsys):
        code, out, _ = run(capsys, ["theorem2-demo", str(plan_path), "--share", "S1^A1",
                                    "--json"])
        assert code == 0
        doc = json.loads(out)
        assert doc["failing_clauses"] == [3]
        assert doc["residual_entropy"]["A3"]["log_q_coefficient"] == "1"
        assert doc["confirmed"] is True

    def test_replaceable_share_exits_2(self, plan_path, capsys):
        code, _, err = run(capsys, ["theorem2-demo", str(plan_path), "--share", "S2^A1"])
        assert code == 2
        assert "ShareIsReplaceable" in err

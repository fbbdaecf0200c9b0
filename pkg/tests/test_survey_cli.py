import json
import subprocess
import sys

import pytest

from theta_selmer import cassels, cli, survey
from theta_selmer.monsky import THETA_2PI3, THETA_PI3


def run_cli(*argv):
    proc = subprocess.run(
        [sys.executable, "-m", "theta_selmer.cli", *argv],
        capture_output=True, text=True, timeout=600,
    )
    return proc.returncode, proc.stdout, proc.stderr


def test_analyze_row_fields():
    row = survey.analyze(365, THETA_PI3)
    assert row.n == 365 and row.theta == THETA_PI3
    assert row.template == "A2" and row.s2 == 2
    assert row.certificate_kind == cassels.KIND_THM71
    assert row.residue24 == 5 and row.parity_ok


def test_csv_column_order():
    rows = [survey.analyze(m, THETA_PI3, with_certificate=False) for m in (1, 2, 3)]
    out = survey.rows_to_csv(rows)
    header = out.splitlines()[0]
    assert header == ",".join(survey.CSV_FIELDS)
    assert header.startswith("n,theta,eta,ntilde,t,residue24,template,s2")


def test_scan_parity_small():
    report, failures, rows = survey.scan_parity(120)
    assert report.passed and not failures
    assert report.counts["checked"] == len(rows)
    # m = 6 mod 24 rows are odd for pi/3 and even for 2pi/3
    for r in rows:
        if r.residue24 == 6:
            want = "odd" if r.theta == THETA_PI3 else "even"
            assert r.parity_predicted == want


def test_scan_oracle_small():
    failures, triples = survey.scan_oracle(30)
    assert not failures
    assert len(triples) == 2 * len([m for m in range(1, 31) if survey.is_squarefree(m)])


def test_determinism_and_parallel_equals_serial():
    rows_a = survey.survey_range(80, jobs=1)
    rows_b = survey.survey_range(80, jobs=1)
    rows_p = survey.survey_range(80, jobs=2)
    assert survey.rows_to_csv(rows_a) == survey.rows_to_csv(rows_b)
    assert survey.rows_to_csv(rows_a) == survey.rows_to_csv(rows_p)


def test_density_report_shape():
    reports = survey.scan_r4_density(4000)
    assert len(reports) == 4
    neg0 = reports[0]
    assert "D<0" in neg0.population and neg0.size > 0
    total = sum(neg0.counts.values())
    assert total == neg0.size


def test_certification_scan_small():
    rep = survey.scan_certification("cor15", 300)
    assert rep.passed and rep.fraction == 1.0
    rep = survey.scan_certification("f5", 600)
    assert rep.size >= 3
    rep = survey.scan_certification("f5", 30)
    assert rep.empty and rep.passed


def test_cli_analyze_json():
    code, out, err = run_cli("analyze", "365", "--theta", "pi3", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["certificate_kind"] == cassels.KIND_THM71
    assert doc["s2"] == 2


def test_cli_analyze_not_squarefree_exit_64():
    code, out, err = run_cli("analyze", "12", "--theta", "pi3")
    assert code == 64
    assert "squarefree" in err


def test_cli_usage_error_exit_64():
    code, out, err = run_cli("analyze", "5")
    assert code == 64


def test_cli_verify_parity():
    code, out, err = run_cli("verify-parity", "--max", "150")
    assert code == 0
    doc = json.loads(out)
    assert doc["passed"] is True


def test_cli_verify_oracle():
    code, out, err = run_cli("verify-oracle", "--max", "12")
    assert code == 0
    doc = json.loads(out)
    assert doc["failures"] == []


def test_cli_certify_json():
    code, out, err = run_cli("certify", "221", "--theta", "pi3")
    assert code == 0
    doc = json.loads(out)
    assert doc["kind"] == cassels.KIND_CASSELS


def test_certify_transcript_deterministic():
    code1, out1, _ = run_cli("certify", "221", "--theta", "pi3")
    code2, out2, _ = run_cli("certify", "221", "--theta", "pi3")
    assert code1 == code2 == 0
    assert out1 == out2


def test_cli_survey_csv_deterministic():
    code1, out1, _ = run_cli("survey", "--max", "40")
    code2, out2, _ = run_cli("survey", "--max", "40", "--jobs", "2")
    assert code1 == code2 == 0
    assert out1 == out2
    assert out1.splitlines()[0] == ",".join(survey.CSV_FIELDS)


def test_cli_parser_rejects_bad_theta():
    code, out, err = run_cli("analyze", "5", "--theta", "pi4")
    assert code == 64

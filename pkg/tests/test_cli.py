"""
命令行测试
所有路径均为绝对路径；退出码与文件产物
"""

import json
import math

import pandas as pd
import pytest

from core.csp import satisfied_mask
from core.oracles import assignment_block
from rsat_cli import (
    EXIT_CAP,
    EXIT_DOMAIN,
    EXIT_FORMAT,
    EXIT_MISMATCH,
    EXIT_OK,
    EXIT_SATISFIABLE,
    EXIT_UNREALIZABLE,
    EXIT_USAGE,
    cli_main,
)
from utils.formats import parse_assignment, parse_dfa, parse_dnf, parse_gcnf, parse_sample

EARLY_GCNF = """p gcsp 5 4 2 1
S 1 2
S 1 3
S -1 4
S 1 5
"""


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


def full_domain_sample_text(dim, labels):
    rows = assignment_block(0, 1 << dim, dim)
    body = ["".join("+" if v == 1 else "-" for v in row) + f" {label}" for row, label in zip(rows.tolist(), labels)]
    return "\n".join([f"p sample {dim} {len(labels)}"] + body) + "\n"


class TestGen:
    """gen 命令测试"""

    @pytest.mark.smoke
    def test_random(self, tmp_artifacts):
        out = tmp_artifacts / "f.gcnf"
        report = tmp_artifacts / "r.json"
        assert cli_main(["gen", "--n", "10", "--m", "20", "--pred", "sat3", "--seed", "1",
                         "-o", str(out), "--json-report", str(report)]) == EXIT_OK
        formula = parse_gcnf(out.read_text(encoding="utf-8"))
        assert formula.n == 10 and formula.m == 20
        data = json.loads(report.read_text(encoding="utf-8"))
        assert data["stage"] == "gen"
        assert data["seed"] == 1
        assert str(out) in data["provenance"]["outputs"]

    def test_planted_with_assignment(self, tmp_artifacts):
        out, psi_out = tmp_artifacts / "p.gcnf", tmp_artifacts / "p.psi"
        assert cli_main(["gen", "--n", "12", "--m", "50", "--pred", "tkm2x2", "--seed", "2", "--planted",
                         "--psi-out", str(psi_out), "-o", str(out)]) == EXIT_OK
        formula = parse_gcnf(out.read_text(encoding="utf-8"))
        psi = parse_assignment(psi_out.read_text(encoding="utf-8"))
        assert satisfied_mask(formula, psi).all()

    def test_report_is_reproducible(self, tmp_artifacts):
        out, report = tmp_artifacts / "f.gcnf", tmp_artifacts / "r.json"
        argv = ["gen", "--n", "8", "--m", "16", "--pred", "ntkm2x2", "--seed", "7", "--mixed",
                "-o", str(out), "--json-report", str(report)]
        assert cli_main(argv) == EXIT_OK
        first = (out.read_bytes(), report.read_bytes())
        assert cli_main(argv) == EXIT_OK
        assert (out.read_bytes(), report.read_bytes()) == first

    def test_table_predicate_rejected(self, tmp_artifacts):
        assert cli_main(["gen", "--n", "4", "--m", "2", "--pred", "table2:0110", "--seed", "1",
                         "-o", str(tmp_artifacts / "x")]) == EXIT_DOMAIN


class TestReduce:
    """reduce 子命令测试"""

    @pytest.fixture
    def sat2_file(self, tmp_artifacts):
        path = tmp_artifacts / "sat2.gcnf"
        assert cli_main(["gen", "--n", "40", "--m", "640", "--pred", "sat2", "--seed", "5", "-o", str(path)]) == EXIT_OK
        return path

    @pytest.mark.smoke
    def test_stages(self, tmp_artifacts, sat2_file):
        packed, mixed, sample = (tmp_artifacts / name for name in ("packed.gcnf", "mixed.gcnf", "sample.txt"))
        assert cli_main(["reduce", "pack", "--input", str(sat2_file), "--params", "2,2,64", "-o", str(packed)]) == EXIT_OK
        packed_formula = parse_gcnf(packed.read_text(encoding="utf-8"))
        assert packed_formula.m == 10
        assert packed_formula.polarity_counts() == {"tkm2x2": 10}

        assert cli_main(["reduce", "negate", "--input", str(packed), "--seed", "3", "-o", str(mixed)]) == EXIT_OK
        assert parse_gcnf(mixed.read_text(encoding="utf-8")).m == 10

        assert cli_main(["reduce", "sample", "--input", str(mixed), "-o", str(sample)]) == EXIT_OK
        parsed = parse_sample(sample.read_text(encoding="utf-8"))
        assert parsed.dim == 2 * 4 * 40
        assert parsed.m == 10

    def test_empty_formula_keeps_header_shape(self, tmp_artifacts):
        source = write(tmp_artifacts / "empty.gcnf", "p gcsp 5 0 2 3\n")
        mixed, sample = tmp_artifacts / "mixed.gcnf", tmp_artifacts / "sample.txt"
        assert cli_main(["reduce", "negate", "--input", source, "--seed", "1", "-o", str(mixed)]) == EXIT_OK
        assert mixed.read_text(encoding="utf-8") == "p gcsp 5 0 2 3\n"
        assert cli_main(["reduce", "sample", "--input", str(mixed), "-o", str(sample)]) == EXIT_OK
        parsed = parse_sample(sample.read_text(encoding="utf-8"))
        assert parsed.m == 0
        assert parsed.dim == 2 * 6 * 5

    def test_pipeline_stage(self, tmp_artifacts, sat2_file):
        sample = tmp_artifacts / "sample.txt"
        report = tmp_artifacts / "r.json"
        assert cli_main(["reduce", "pipeline", "--input", str(sat2_file), "--params", "2,2,64", "--seed", "1",
                         "-o", str(sample), "--json-report", str(report)]) == EXIT_OK
        data = json.loads(report.read_text(encoding="utf-8"))
        assert data["verdicts"]["pack"] == "packed"
        assert data["statistics"]["dim"] == 320

    def test_early_verdict(self, tmp_artifacts):
        source = write(tmp_artifacts / "early.gcnf", EARLY_GCNF)
        report = tmp_artifacts / "r.json"
        assert cli_main(["reduce", "pack", "--input", source, "--params", "2,2,4",
                         "--json-report", str(report)]) == EXIT_SATISFIABLE
        assert json.loads(report.read_text(encoding="utf-8"))["verdicts"]["pack"] == "satisfiable"

    def test_missing_params(self, tmp_artifacts, sat2_file):
        assert cli_main(["reduce", "pack", "--input", str(sat2_file)]) == EXIT_DOMAIN

    def test_malformed_input(self, tmp_artifacts):
        source = write(tmp_artifacts / "bad.gcnf", "p gcsp 3 1 2 1\nS 1 9\n")
        assert cli_main(["reduce", "pipeline", "--input", source, "--params", "2,2,4", "--seed", "1"]) == EXIT_FORMAT

    def test_missing_file(self, tmp_artifacts):
        assert cli_main(["reduce", "sample", "--input", str(tmp_artifacts / "none.gcnf")]) == EXIT_USAGE


class TestPipelineAndVerify:
    """pipeline 与 verify 命令测试"""

    @pytest.fixture
    def planted_dir(self, tmp_artifacts):
        assert cli_main(["pipeline", "--planted", "--params", "2,2,64", "--n", "32", "--m", "640", "--seed", "4",
                         "--out-dir", str(tmp_artifacts)]) == EXIT_OK
        return tmp_artifacts

    @pytest.mark.smoke
    def test_artifacts(self, planted_dir):
        for name in ("source.gcnf", "planted.psi", "packed.gcnf", "mixed.gcnf", "sample.txt"):
            assert (planted_dir / name).exists()
        assert parse_gcnf((planted_dir / "source.gcnf").read_text(encoding="utf-8")).m == 640

    def test_random_side_has_no_assignment(self, tmp_artifacts):
        assert cli_main(["pipeline", "--params", "2,2,64", "--n", "32", "--m", "640", "--seed", "4",
                         "--out-dir", str(tmp_artifacts)]) == EXIT_OK
        assert not (tmp_artifacts / "planted.psi").exists()
        assert (tmp_artifacts / "sample.txt").exists()

    def test_flag_overrides_profile(self, tmp_artifacts):
        report = tmp_artifacts / "r.json"
        code = cli_main(["pipeline", "--profile", "desk", "--no-planted", "--seed", "2",
                         "--out-dir", str(tmp_artifacts), "--json-report", str(report)])
        assert code == EXIT_OK
        data = json.loads(report.read_text(encoding="utf-8"))
        assert data["parameters"]["planted"] is False
        assert not (tmp_artifacts / "planted.psi").exists()

    def test_profile_planted_default(self, tmp_artifacts):
        report = tmp_artifacts / "r.json"
        assert cli_main(["pipeline", "--profile", "desk", "--seed", "2", "--out-dir", str(tmp_artifacts),
                         "--json-report", str(report)]) == EXIT_OK
        assert json.loads(report.read_text(encoding="utf-8"))["parameters"]["planted"] is True
        assert (tmp_artifacts / "planted.psi").exists()

    def test_verify_zero_error(self, planted_dir):
        assert cli_main(["verify", "--sample", str(planted_dir / "sample.txt"),
                         "--assignment", str(planted_dir / "planted.psi")]) == EXIT_OK

    def test_verify_reports_tampered_line(self, planted_dir, capsys):
        path = planted_dir / "sample.txt"
        lines = path.read_text(encoding="utf-8").splitlines()
        instance, label = lines[3].split()
        lines[3] = f"{instance} {1 - int(label)}"
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        capsys.readouterr()
        assert cli_main(["verify", "--sample", str(path), "--assignment", str(planted_dir / "planted.psi")]) == EXIT_MISMATCH
        assert capsys.readouterr().out == f"{path}:4: mismatch\n"

    def test_verify_report_provenance(self, tmp_artifacts):
        out, report = tmp_artifacts / "f.gcnf", tmp_artifacts / "r.json"
        assert cli_main(["gen", "--n", "6", "--m", "4", "--pred", "sat2", "--seed", "1",
                         "-o", str(out), "--json-report", str(report)]) == EXIT_OK
        assert cli_main(["verify", "--report", str(report)]) == EXIT_OK
        out.write_text(out.read_text(encoding="utf-8") + "c 修改\n", encoding="utf-8")
        assert cli_main(["verify", "--report", str(report)]) == EXIT_MISMATCH

    def test_verify_requires_inputs(self, tmp_artifacts):
        assert cli_main(["verify"]) == EXIT_DOMAIN
        sample = write(tmp_artifacts / "s.txt", "p sample 1 1\n+ 1\n")
        assert cli_main(["verify", "--sample", sample]) == EXIT_DOMAIN


class TestRealizeAndAutomata:
    """realize 与 automata 命令测试"""

    def test_realize(self, tmp_artifacts):
        psi = write(tmp_artifacts / "psi", "+-+--\n")
        out, halfspaces = tmp_artifacts / "h.dnf", tmp_artifacts / "h.json"
        assert cli_main(["realize", "--assignment", psi, "--complement", "--halfspaces-out", str(halfspaces),
                         "-o", str(out)]) == EXIT_OK
        dnf = parse_dnf(out.read_text(encoding="utf-8"))
        assert dnf.n_vars == 2 * 4 * 5
        assert len(json.loads(halfspaces.read_text(encoding="utf-8"))) == dnf.clause_count

    @pytest.mark.smoke
    def test_build_run_verify(self, tmp_artifacts, capsys):
        dnf = write(tmp_artifacts / "f.dnf", "p dnf 2 1\n1 -2 0\n")
        dfa = tmp_artifacts / "f.dfa"
        assert cli_main(["automata", "build", "--dnf", dnf, "-o", str(dfa)]) == EXIT_OK
        assert parse_dfa(dfa.read_text(encoding="utf-8")).n_states >= 1

        capsys.readouterr()
        assert cli_main(["automata", "run", "--dfa", str(dfa), "--word", "+-"]) == EXIT_OK
        assert capsys.readouterr().out == "1\n"
        assert cli_main(["automata", "run", "--dfa", str(dfa), "--word", "++"]) == EXIT_OK
        assert capsys.readouterr().out == "0\n"

        assert cli_main(["automata", "verify", "--dnf", dnf]) == EXIT_OK

    def test_verify_cap(self, tmp_artifacts):
        dnf = write(tmp_artifacts / "wide.dnf", "p dnf 17 1\n1 0\n")
        assert cli_main(["automata", "verify", "--dnf", dnf]) == EXIT_CAP

    def test_strict_violation(self, tmp_artifacts):
        dnf = write(tmp_artifacts / "f.dnf", "p dnf 1 2\n1 0\n-1 0\n")
        assert cli_main(["automata", "build", "--dnf", dnf, "--strict"]) == EXIT_DOMAIN


class TestScatterCommands:
    """scatter 子命令测试"""

    @pytest.mark.smoke
    def test_hoeffding(self, capsys):
        capsys.readouterr()
        assert cli_main(["scatter", "hoeffding", "--m", "32"]) == EXIT_OK
        assert capsys.readouterr().out == "4.0 0.25\n"
        assert cli_main(["scatter", "hoeffding", "--m", "32", "--beta", "0.125"]) == EXIT_OK
        assert capsys.readouterr().out == "9.0 0.125\n"

    def test_bound(self, capsys):
        capsys.readouterr()
        assert cli_main(["scatter", "bound", "--alpha", "0.5", "--beta", "0.75", "--n", "8", "--mode", "quadratic"]) == EXIT_OK
        assert float(capsys.readouterr().out) == pytest.approx(math.exp(-1.0))
        assert cli_main(["scatter", "bound", "--alpha", "0.75", "--beta", "0.5", "--n", "8"]) == EXIT_DOMAIN

    def test_check(self, tmp_artifacts):
        report = tmp_artifacts / "r.json"
        assert cli_main(["scatter", "check", "--m", "16", "--dim", "4", "--hypotheses", "3", "--trials", "2000",
                         "--seed", "1", "--json-report", str(report)]) == EXIT_OK
        data = json.loads(report.read_text(encoding="utf-8"))
        assert data["verdicts"]["scattered"] is True
        assert data["statistics"]["trials"] == 2000


class TestDistinguishCommand:
    """distinguish 命令测试"""

    @pytest.mark.smoke
    def test_memorizer_realizable(self, tmp_artifacts):
        sample = write(tmp_artifacts / "s.txt", full_domain_sample_text(3, [0, 1, 1, 0, 1, 0, 0, 1]))
        csv = tmp_artifacts / "trials.csv"
        assert cli_main(["distinguish", "--sample", sample, "--learner", "memorizer", "--draws", "all",
                         "--trials", "3", "--seed", "1", "--trials-csv", str(csv)]) == EXIT_OK
        frame = pd.read_csv(csv)
        assert len(frame) == 3
        assert set(frame["verdict"]) == {"realizable"}

    def test_constant_unrealizable(self, tmp_artifacts):
        sample = write(tmp_artifacts / "s.txt", full_domain_sample_text(3, [0, 1, 1, 0, 1, 0, 0, 1]))
        assert cli_main(["distinguish", "--sample", sample, "--learner", "constant", "--draws", "all",
                         "--seed", "1"]) == EXIT_UNREALIZABLE

    def test_bad_draws(self, tmp_artifacts):
        sample = write(tmp_artifacts / "s.txt", full_domain_sample_text(1, [0, 1]))
        assert cli_main(["distinguish", "--sample", sample, "--learner", "memorizer", "--draws", "many",
                         "--seed", "1"]) == EXIT_DOMAIN

    def test_learner_cap(self, tmp_artifacts):
        sample = write(tmp_artifacts / "s.txt", "p sample 12 1\n++++++++++++ 1\n")
        assert cli_main(["distinguish", "--sample", sample, "--learner", "bf-dnf", "--draws", "all",
                         "--seed", "1"]) == EXIT_CAP

    def test_empty_sample(self, tmp_artifacts):
        sample = write(tmp_artifacts / "s.txt", "p sample 3 0\n")
        assert cli_main(["distinguish", "--sample", sample, "--learner", "memorizer", "--seed", "1"]) == EXIT_DOMAIN


class TestUsage:
    """参数错误测试"""

    def test_unknown_command(self):
        assert cli_main(["frobnicate"]) == EXIT_USAGE

    def test_missing_seed(self):
        assert cli_main(["gen", "--n", "4", "--m", "2", "--pred", "sat2"]) == EXIT_USAGE

    def test_bad_params(self, tmp_artifacts):
        source = write(tmp_artifacts / "early.gcnf", EARLY_GCNF)
        assert cli_main(["reduce", "pack", "--input", source, "--params", "2,2"]) == EXIT_USAGE

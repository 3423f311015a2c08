import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from rotinv.cli import (
    MatrixFileError,
    format_matrix_file,
    main,
    parse_matrix_file,
    report_from_document,
    report_to_document,
)
from rotinv.linalg import SquareMatrix
from rotinv.rotation import validate_rotation

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def identity3(tmp_path):
    path = tmp_path / "id3.txt"
    path.write_text("3\n1.0 0.0 0.0\n0.0 1.0 0.0\n0.0 0.0 1.0\n")
    return str(path)

@pytest.fixture
def diag12(tmp_path):
    path = tmp_path / "diag12.txt"
    path.write_text("2\n1 0\n0 2\n")
    return str(path)


class TestMatrixFileFormat:
    def test_round_trip(self):
        m = SquareMatrix([[0.5, -1.25], [3.0, 1e-17]])
        assert parse_matrix_file(format_matrix_file(m)) == m

    def test_rejects_wrong_row_count(self):
        with pytest.raises(MatrixFileError):
            parse_matrix_file("2\n1 0\n")

    def test_rejects_wrong_row_width(self):
        with pytest.raises(MatrixFileError):
            parse_matrix_file("2\n1 0 0\n0 1\n")

    def test_rejects_bad_order_line(self):
        with pytest.raises(MatrixFileError):
            parse_matrix_file("2.5\n1 0\n0 1\n")

    def test_rejects_non_finite(self):
        with pytest.raises(MatrixFileError):
            parse_matrix_file("1\ninf\n")

    def test_rejects_empty(self):
        with pytest.raises(MatrixFileError):
            parse_matrix_file("")


class TestMakeRotation:
    def test_e1_to_e2(self, capsys):
        code, out, _ = run(capsys, "make-rotation", "1 0", "0 1")
        assert code == 0
        q = parse_matrix_file(out)
        assert np.max(np.abs(q.data - [[0.0, -1.0], [1.0, 0.0]])) <= 1e-10
        validate_rotation(q)

    def test_identity_in_one_dimension(self, capsys):
        code, out, _ = run(capsys, "make-rotation", "1", "1")
        assert code == 0
        assert out == (GOLDEN / "make_rotation_identity1.txt").read_text()

    def test_impossible_flip_cites_determinant(self, capsys):
        code, out, err = run(capsys, "make-rotation", "1", "-1")
        assert code == 1
        assert out == ""
        assert "det Q = 1" in err

    def test_unequal_lengths(self, capsys):
        code, _, err = run(capsys, "make-rotation", "1 0", "0 1 0")
        assert code == 2 and "equal length" in err

    def test_rejects_far_from_unit(self, capsys):
        code, _, err = run(capsys, "make-rotation", "2 0", "0 1")
        assert code == 2 and "unit norm" in err

    def test_normalizes_near_unit_input(self, capsys):
        code, out, _ = run(capsys, "make-rotation", "1.0000001 0", "0 1")
        assert code == 0
        validate_rotation(parse_matrix_file(out))

    def test_rejects_garbage(self, capsys):
        code, _, _ = run(capsys, "make-rotation", "abc", "0 1")
        assert code == 2

    def test_out_flag_writes_file(self, capsys, tmp_path):
        target = tmp_path / "q.txt"
        code, out, _ = run(capsys, "make-rotation", "0 1", "1 0", "--out", str(target))
        assert code == 0 and out == ""
        validate_rotation(parse_matrix_file(target.read_text()))


class TestCheckQuadratic:
    def test_identity_golden(self, capsys, identity3):
        code, out, _ = run(capsys, "check-quadratic", identity3, "--json")
        assert code == 0
        assert out == (GOLDEN / "check_quadratic_identity3.json").read_text()
        doc = json.loads(out)
        assert doc["verdict"] == "objective" and doc["alpha"] == 1.0

    def test_diagonal_witness(self, capsys, diag12):
        code, out, _ = run(capsys, "check-quadratic", diag12, "--json")
        assert code == 1
        doc = json.loads(out)
        assert doc["verdict"] == "not_objective"
        assert doc["witness"]["f_x"] == pytest.approx(1.0, abs=1e-12)
        assert doc["witness"]["f_qx"] == pytest.approx(2.0, abs=1e-12)
        validate_rotation(SquareMatrix(doc["witness"]["q"]))

    def test_human_readable(self, capsys, diag12):
        code, out, _ = run(capsys, "check-quadratic", diag12)
        assert code == 1
        assert "verdict: not_objective" in out

    def test_loose_tolerance_flag(self, capsys, diag12):
        code, out, _ = run(capsys, "check-quadratic", diag12, "--tol", "10", "--json")
        assert code == 0
        assert json.loads(out)["verdict"] == "objective"

    def test_malformed_file(self, capsys, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("2\n1 0 0\n0 1\n")
        code, _, err = run(capsys, "check-quadratic", str(bad))
        assert code == 2 and "row 1" in err

    def test_missing_file(self, capsys):
        code, _, err = run(capsys, "check-quadratic", "/no/such/file")
        assert code == 2 and "cannot read" in err

    def test_json_document_round_trips(self, capsys, diag12):
        _, out, _ = run(capsys, "check-quadratic", diag12, "--json")
        doc = json.loads(out)
        report, seed = report_from_document(doc)
        assert report_to_document(report, seed) == doc


class TestCheckFunction:
    def test_radial_is_inconclusive(self, capsys):
        code, out, _ = run(
            capsys, "check-function", "norm(x)^2 + sin(norm(x))",
            "--dim", "3", "--trials", "300", "--json",
        )
        assert code == 3
        doc = json.loads(out)
        assert doc["verdict"] == "inconclusive"
        assert doc["trials"] == 300
        assert doc["seed"] == 0

    def test_coordinate_is_refuted(self, capsys):
        code, out, _ = run(capsys, "check-function", "x1", "--dim", "2", "--json")
        assert code == 1
        doc = json.loads(out)
        assert doc["verdict"] == "not_objective"
        assert "witness" in doc
        report, _ = report_from_document(doc)  # witness rotation re-validates

    def test_dimension_one_is_objective(self, capsys):
        code, out, _ = run(capsys, "check-function", "x1^2", "--dim", "1", "--json")
        assert code == 0
        assert json.loads(out)["verdict"] == "objective"

    def test_parse_error_exits_2(self, capsys):
        code, _, err = run(capsys, "check-function", "x0", "--dim", "2")
        assert code == 2 and "offset 0" in err

    def test_out_of_range_variable(self, capsys):
        code, _, err = run(capsys, "check-function", "x3", "--dim", "2")
        assert code == 2 and "x3" in err

    def test_profile_argument_rejected(self, capsys):
        code, _, err = run(capsys, "check-function", "t^2", "--dim", "2")
        assert code == 2 and "t is not allowed" in err

    def test_domain_error_during_trials(self, capsys):
        code, _, err = run(capsys, "check-function", "log(x1-20)", "--dim", "2")
        assert code == 2 and "evaluation failed" in err

    def test_rerun_is_byte_identical(self, capsys):
        args = ("check-function", "x1*x2", "--dim", "3", "--trials", "200", "--seed", "11", "--json")
        code1, out1, _ = run(capsys, *args)
        code2, out2, _ = run(capsys, *args)
        assert (code1, out1) == (code2, out2)

    def test_seed_is_echoed_and_reproduces(self, capsys):
        args = ("check-function", "x1", "--dim", "2", "--seed", "42", "--json")
        _, out, _ = run(capsys, *args)
        assert json.loads(out)["seed"] == 42


class TestProfile:
    def test_golden_csv(self, capsys):
        code, out, _ = run(capsys, "profile", "norm(x)^2", "--dim", "5", "--radii", "0,1,2")
        assert code == 0
        assert out == (GOLDEN / "profile_norm_sq.csv").read_text()

    def test_log_at_zero_names_the_radius(self, capsys):
        code, _, err = run(capsys, "profile", "log(norm(x))", "--dim", "2", "--radii", "0,1")
        assert code == 2
        assert "radius 0.0" in err

    def test_non_objective_function_still_has_a_profile(self, capsys):
        code, out, _ = run(capsys, "profile", "x1", "--dim", "2", "--radii", "1")
        assert code == 0
        assert out == "t,phi\n1.0,1.0\n"

    def test_out_flag(self, capsys, tmp_path):
        target = tmp_path / "p.csv"
        code, out, _ = run(capsys, "profile", "dot(x,x)", "--dim", "2", "--radii", "2", "--out", str(target))
        assert code == 0 and out == ""
        assert target.read_text() == "t,phi\n2.0,4.0\n"

    def test_bad_radii(self, capsys):
        assert run(capsys, "profile", "x1", "--dim", "2", "--radii", "a,b")[0] == 2
        assert run(capsys, "profile", "x1", "--dim", "2", "--radii", "-1")[0] == 2
        assert run(capsys, "profile", "x1", "--dim", "2", "--radii", "")[0] == 2


class TestSampleRotation:
    def test_dimension_one_files(self, capsys, tmp_path):
        prefix = str(tmp_path / "r")
        code, _, _ = run(capsys, "sample-rotation", "--dim", "1", "--count", "3", "--out", prefix)
        assert code == 0
        for i in range(3):
            assert Path(f"{prefix}{i:03d}.txt").read_text() == "1\n1.0\n"

    def test_seeded_reruns_are_bitwise_identical(self, capsys, tmp_path):
        a, b = str(tmp_path / "a"), str(tmp_path / "b")
        run(capsys, "sample-rotation", "--dim", "4", "--count", "2", "--seed", "7", "--out", a)
        run(capsys, "sample-rotation", "--dim", "4", "--count", "2", "--seed", "7", "--out", b)
        for i in range(2):
            assert Path(f"{a}{i:03d}.txt").read_bytes() == Path(f"{b}{i:03d}.txt").read_bytes()

    def test_samples_validate(self, capsys, tmp_path):
        prefix = str(tmp_path / "s")
        code, _, _ = run(capsys, "sample-rotation", "--dim", "3", "--count", "100", "--seed", "1", "--out", prefix)
        assert code == 0
        for i in range(100):
            q = parse_matrix_file(Path(f"{prefix}{i:03d}.txt").read_text())
            validate_rotation(q, tol=1e-10)

    def test_bad_count(self, capsys, tmp_path):
        code, _, _ = run(capsys, "sample-rotation", "--dim", "2", "--count", "0", "--out", str(tmp_path / "x"))
        assert code == 2


class TestContract:
    def test_unknown_command_exits_2(self, capsys):
        assert run(capsys, "no-such-command")[0] == 2

    def test_no_arguments_exits_2(self, capsys):
        assert run(capsys)[0] == 2

    def test_version_exits_0(self, capsys):
        assert run(capsys, "--version")[0] == 0

    def test_console_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "rotinv", "--version"],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0
        assert proc.stdout.startswith("rotinv ")

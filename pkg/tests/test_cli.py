import json
import math
from pathlib import Path

import numpy as np
import pytest

from amproj.cli import (CSV_HEADER, EXIT_MODEL, EXIT_NUMERICAL, EXIT_OK, EXIT_PARSE,
                        EXIT_SINGULAR, load_model, main, model_to_json)
from tests.support import two_shell_m1_model

FIXTURE = str(Path(__file__).parent / "fixtures" / "two_shell_M1.model")


def write(tmp_path, name, payload):
    p = tmp_path / name
    p.write_text(payload if isinstance(payload, str) else json.dumps(payload))
    return str(p)


class TestModelIO:
    def test_fixture_loads(self):
        model = load_model(FIXTURE)
        assert model.name == "two_shell_M1"
        assert model.state.occupied == (2, 5)
        assert model.state.n_basis == 6

    def test_round_trip_is_identity(self, tmp_path):
        model = load_model(FIXTURE)
        text = model_to_json(model)
        p = write(tmp_path, "again.model", text)
        again = load_model(p)
        assert model_to_json(again) == text
        assert again.state == model.state
        assert np.array_equal(again.t.matrix, model.t.matrix)
        assert again.v.items() == model.v.items()

    def test_fixture_matches_programmatic_model(self):
        model = load_model(FIXTURE)
        built = two_shell_m1_model()
        assert np.array_equal(model.t.matrix, built.t.matrix)
        for (key, val), (key2, val2) in zip(model.v.items(), built.v.items()):
            assert key == key2
            assert val == pytest.approx(val2, abs=1e-15)

    def test_duplicate_id_names_the_id(self, tmp_path, capsys):
        doc = json.loads(Path(FIXTURE).read_text())
        doc["basis"][1]["id"] = 1
        p = write(tmp_path, "dup.model", doc)
        assert main(["spectrum", p]) == EXIT_MODEL
        assert "duplicate orbital id 1" in capsys.readouterr().err

    def test_invalid_json_is_parse_error(self, tmp_path, capsys):
        p = write(tmp_path, "broken.model", "{not json")
        assert main(["spectrum", p]) == EXIT_PARSE
        err = capsys.readouterr().err
        assert "invalid JSON" in err and ":1:" in err

    def test_missing_field_is_parse_error(self, tmp_path, capsys):
        doc = json.loads(Path(FIXTURE).read_text())
        del doc["basis"][0]["two_j"]
        p = write(tmp_path, "nofield.model", doc)
        assert main(["spectrum", p]) == EXIT_PARSE
        assert "basis[0]" in capsys.readouterr().err

    def test_conflicting_two_body_rejected(self, tmp_path, capsys):
        doc = json.loads(Path(FIXTURE).read_text())
        e = dict(doc["two_body"][0])
        e["value"] = e["value"] + 1.0
        doc["two_body"].append(e)
        p = write(tmp_path, "conflict.model", doc)
        assert main(["spectrum", p]) == EXIT_MODEL
        assert "conflicting duplicate" in capsys.readouterr().err

    def test_occupied_outside_basis(self, tmp_path, capsys):
        doc = json.loads(Path(FIXTURE).read_text())
        doc["occupied"] = [2, 9]
        p = write(tmp_path, "badocc.model", doc)
        assert main(["spectrum", p]) == EXIT_MODEL
        assert "occupied id 9" in capsys.readouterr().err


class TestSpectrumCommand:
    def test_fixture_csv_values(self, capsys):
        assert main(["spectrum", FIXTURE, "--format", "csv"]) == EXIT_OK
        out = capsys.readouterr().out.strip().splitlines()
        assert out[0] == CSV_HEADER
        rows = {int(line.split(",")[0]): line.split(",") for line in out[1:]}
        assert set(rows) == {2, 4}
        # pinned against the coupled-pair oracle (eps_sum + g_J)
        assert float(rows[2][1]) == pytest.approx(1 / 6, abs=1e-9)
        assert float(rows[4][1]) == pytest.approx(3 / 10, abs=1e-9)
        assert float(rows[2][2]) == pytest.approx(-0.6, abs=1e-8)
        assert float(rows[2][3]) == pytest.approx(-0.6, abs=1e-8)
        assert float(rows[4][2]) == pytest.approx(1.15, abs=1e-8)
        assert float(rows[4][3]) == pytest.approx(1.15, abs=1e-8)
        assert float(rows[2][4]) == 0.0

    def test_csv_deterministic_across_runs(self, capsys, tmp_path):
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        assert main(["spectrum", FIXTURE, "--format", "csv", "--out", str(out1)]) == EXIT_OK
        assert main(["spectrum", FIXTURE, "--format", "csv", "--out", str(out2)]) == EXIT_OK
        assert out1.read_bytes() == out2.read_bytes()

    def test_route_selection_leaves_other_column_empty(self, capsys):
        assert main(["spectrum", FIXTURE, "--format", "csv", "--route", "brillouin"]) == EXIT_OK
        out = capsys.readouterr().out.strip().splitlines()
        for line in out[1:]:
            cells = line.split(",")
            assert cells[3] == ""  # kernel-route column absent, empty not NaN
            assert cells[2] != ""

    def test_explicit_j_list(self, capsys):
        assert main(["spectrum", FIXTURE, "--J", "2", "--format", "csv"]) == EXIT_OK
        out = capsys.readouterr().out.strip().splitlines()
        assert len(out) == 2 and out[1].startswith("2,")

    def test_numerical_failure_exit(self, tmp_path, capsys):
        # stretched M=2 model: request only the absent J=3 component
        doc = json.loads(Path(FIXTURE).read_text())
        doc["occupied"] = [1, 5]
        p = write(tmp_path, "m2.model", doc)
        assert main(["spectrum", p, "--J", "6"]) == EXIT_NUMERICAL

    def test_interaction_free_model_constant_energy(self, tmp_path, capsys):
        doc = json.loads(Path(FIXTURE).read_text())
        doc["two_body"] = []
        p = write(tmp_path, "free.model", doc)
        assert main(["spectrum", p, "--format", "csv"]) == EXIT_OK
        out = capsys.readouterr().out.strip().splitlines()
        for line in out[1:]:
            cells = line.split(",")
            assert float(cells[2]) == pytest.approx(0.7, abs=1e-9)
            assert float(cells[3]) == pytest.approx(0.7, abs=1e-9)

    def test_bad_points_rejected(self, capsys):
        assert main(["spectrum", FIXTURE, "--points", "4"]) == EXIT_PARSE


class TestCramerCommand:
    def test_diag_example(self, tmp_path, capsys):
        a = write(tmp_path, "A.json", [[2, 0, 0], [0, 3, 0], [0, 0, 4]])
        b = write(tmp_path, "B.json", [[1, 1, 1], [2, 0, 1]])
        assert main(["cramer", a, b, "--columns", "1,3"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "det(A) = 24" in out
        assert "replaced-column determinant = -3" in out
        assert "oracle: match" in out

    def test_identity_single_replacement(self, tmp_path, capsys):
        a = write(tmp_path, "A.json", [[1, 0], [0, 1]])
        b = write(tmp_path, "B.json", [[7, 9]])
        assert main(["cramer", a, b, "--columns", "2"]) == EXIT_OK
        assert "replaced-column determinant = 9" in capsys.readouterr().out

    def test_non_square_is_parse_error(self, tmp_path, capsys):
        a = write(tmp_path, "A.json", [[1, 0, 0], [0, 1, 0]])
        b = write(tmp_path, "B.json", [[1, 1, 1]])
        assert main(["cramer", a, b, "--columns", "1"]) == EXIT_PARSE

    def test_singular_matrix_exit(self, tmp_path, capsys):
        a = write(tmp_path, "A.json", [[1, 2], [2, 4]])
        b = write(tmp_path, "B.json", [[1, 1]])
        assert main(["cramer", a, b, "--columns", "1"]) == EXIT_SINGULAR

    def test_mismatched_columns_count(self, tmp_path, capsys):
        a = write(tmp_path, "A.json", [[1, 0], [0, 1]])
        b = write(tmp_path, "B.json", [[7, 9]])
        assert main(["cramer", a, b, "--columns", "1,2"]) == EXIT_PARSE


class TestCheckProjectorsCommand:
    def test_small_scan_passes(self, capsys):
        assert main(["check-projectors", "--jmax", "1"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "all projector checks passed" in out

    def test_jmax_zero_trivial_pass(self, capsys):
        assert main(["check-projectors", "--jmax", "0"]) == EXIT_OK

    def test_half_integer_jmax(self, capsys):
        assert main(["check-projectors", "--jmax", "3/2"]) == EXIT_OK
        out = capsys.readouterr().out
        assert " 3 " in out.splitlines()[-2] or "3" in out

    def test_reduced_angular_points_fails(self, capsys):
        assert main(["check-projectors", "--jmax", "1", "--angular-points", "3"]) == \
            EXIT_NUMERICAL

    def test_jmax_limit(self, capsys):
        assert main(["check-projectors", "--jmax", "11"]) == EXIT_PARSE

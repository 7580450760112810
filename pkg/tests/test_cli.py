import csv
import json
import os
import shutil
import subprocess

import numpy as np
import pytest

from crooked import config
from crooked.affine import apply_word
from crooked.cli import EXIT_MATH, EXIT_NOT_LOCATED, EXIT_OK, EXIT_PARSE, main
from crooked.config import load_shipped
from crooked.words import Word

SHIPPED = str(config.shipped_path())


@pytest.fixture
def broken(tmp_path):
    p = tmp_path / "broken.json"
    config.save(load_shipped().with_vertex((1, 1), [0.0, 2.5, 0.0]), p)
    return str(p)


@pytest.fixture
def malformed(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"m": 2, "generators": [}')
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestValidate:
    def test_ok(self, capsys):
        code, out, _ = run(capsys, "validate", SHIPPED)
        doc = json.loads(out)
        assert code == EXIT_OK and doc["ok"]
        assert doc["delta0"] == pytest.approx(0.541951646804144, abs=1e-9)

    def test_malformed(self, capsys, malformed):
        code, _, err = run(capsys, "validate", malformed)
        assert code == EXIT_PARSE and "line 1 column" in err

    def test_broken(self, capsys, broken):
        code, out, _ = run(capsys, "validate", broken)
        assert code == EXIT_MATH and not json.loads(out)["ok"]

    def test_out_file(self, capsys, tmp_path):
        p = tmp_path / "r.json"
        assert run(capsys, "validate", SHIPPED, "--out", str(p))[0] == EXIT_OK
        assert json.loads(p.read_text())["ok"]


class TestTile:
    def test_svg(self, capsys):
        code, out, err = run(capsys, "tile", SHIPPED, "--depth", "1")
        assert code == EXIT_OK and out.startswith("<?xml") and out.count("<g ") == 20 and not err

    def test_warns_on_vertex_level(self, capsys):
        code, _, err = run(capsys, "tile", SHIPPED, "--plane", "0", "--depth", "0")
        assert code == EXIT_OK and "warning" in err

    def test_deterministic(self, capsys, tmp_path):
        a, b = tmp_path / "a.svg", tmp_path / "b.svg"
        run(capsys, "tile", SHIPPED, "--out", str(a))
        run(capsys, "tile", SHIPPED, "--out", str(b))
        assert a.read_bytes() == b.read_bytes()

    def test_broken(self, capsys, broken):
        assert run(capsys, "tile", broken)[0] == EXIT_MATH

    def test_bad_depth(self, capsys):
        assert run(capsys, "tile", SHIPPED, "--depth", "-1")[0] == EXIT_PARSE


class TestLocate:
    def test_origin(self, capsys):
        code, out, _ = run(capsys, "locate", SHIPPED, "--point", "0", "0", "0")
        doc = json.loads(out)
        assert code == EXIT_OK and doc["located"] and doc["word"] == "[]"

    def test_not_located(self, capsys):
        q = apply_word(load_shipped(), Word.parse("[1+ 2+ 2+ 1-]"), np.array([[0.1, -0.2, 0.3]]))[0]
        code, out, err = run(capsys, "locate", SHIPPED, "--point", *(str(float(v)) for v in q), "--max-steps", "1")
        doc = json.loads(out)
        assert code == EXIT_NOT_LOCATED and not doc["located"]
        assert doc["diagnostics"]["terms"] and "not located" in err

    def test_batch(self, capsys):
        code, out, _ = run(capsys, "locate", SHIPPED, "--random", "200", "--seed", "3")
        doc = json.loads(out)
        assert code == EXIT_OK and doc["located"] == 200 and not doc["failures"]
        assert doc["max_roundtrip_error"] < 1e-8
        assert sum(doc["length_histogram"].values()) == 200

    def test_separation_csv(self, capsys, tmp_path):
        q = apply_word(load_shipped(), Word.parse("[1+ 2+ 1+ 2- 2-]"), np.array([[0.1, -0.2, 0.3]]))[0]
        p = tmp_path / "sep.csv"
        code, _, _ = run(capsys, "locate", SHIPPED, "--point", *(str(float(v)) for v in q), "--separation-csv", str(p))
        rows = list(csv.reader(p.open()))
        assert code == EXIT_OK and rows[0] == ["k", "rho_Lk_Lk1", "bound", "pass"]
        assert len(rows) > 1 and all(r[3] == "true" for r in rows[1:])
        assert all(float(r[1]) >= float(r[2]) for r in rows[1:])

    def test_usage_error_exit_code(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["locate", SHIPPED, "--point", "1", "x", "2"])
        assert exc.value.code == EXIT_PARSE

    def test_no_point(self, capsys):
        assert run(capsys, "locate", SHIPPED)[0] == EXIT_PARSE


class TestVerify:
    def test_ok(self, capsys):
        code, out, _ = run(capsys, "verify", SHIPPED, "--samples", "100", "--seed", "5")
        assert code == EXIT_OK and json.loads(out)["ok"]

    def test_broken_names_suite(self, capsys, broken):
        code, out, err = run(capsys, "verify", broken, "--samples", "50")
        assert code == EXIT_MATH and "pairing" in json.loads(out)["failing"] and "pairing" in err

    def test_tolerance_class(self, capsys):
        code, out, _ = run(capsys, "verify", SHIPPED, "--samples", "50", "--tol", "1e-15", "--suite", "pairing")
        assert code == EXIT_MATH and json.loads(out)["classification"] == ["tolerance"]

    def test_unknown_suite(self, capsys):
        assert run(capsys, "verify", SHIPPED, "--suite", "nope")[0] == EXIT_PARSE

    def test_malformed(self, capsys, malformed):
        assert run(capsys, "verify", malformed)[0] == EXIT_PARSE

    def test_byte_identical(self, capsys, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        run(capsys, "verify", SHIPPED, "--samples", "60", "--out", str(a))
        run(capsys, "verify", SHIPPED, "--samples", "60", "--out", str(b))
        assert a.read_bytes() == b.read_bytes()


@pytest.mark.skipif(shutil.which("crooked") is None, reason="console script not installed")
def test_console_script():
    r = subprocess.run(["crooked", "validate", SHIPPED], capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["ok"]


@pytest.mark.skipif(shutil.which("crooked") is None, reason="console script not installed")
def test_env_tolerance_sets_default():
    env = dict(os.environ, CROOKED_TOL="1e-15")
    r = subprocess.run(
        ["crooked", "verify", SHIPPED, "--samples", "20", "--suite", "pairing"], capture_output=True, text=True, env=env
    )
    doc = json.loads(r.stdout)
    assert doc["tol"] == 1e-15 and r.returncode == EXIT_MATH and doc["classification"] == ["tolerance"]

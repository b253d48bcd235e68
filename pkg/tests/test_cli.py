import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest
from scipy import stats

from conebessel.cli import main


def run(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def read_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], rows[1:]


def test_rank1_grid(capsys):
    code, out, err = run(capsys, "eval", "rank1", "--mu", "1.5", "--grid", "0:10:101")
    assert code == 0
    assert "\r\n" in out
    header, rows = read_csv(out)
    assert header[:4] == ["z", "value", "reference", "abs_error"]
    assert len(rows) == 101
    assert max(float(r[3]) for r in rows) < 1e-12
    assert {"method", "n_samples", "tol", "seed"} <= set(header)


def test_bessel_json(capsys):
    code, out, _ = run(capsys, "eval", "bessel", "--field", "c", "--q", "2", "--mu", "3",
                       "--grid", "0:2:3", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["meta"]["field"] == "c"
    assert len(payload["rows"]) == 9
    assert payload["rows"][0][2] == 1.0


def test_psi_symmetry_columns(capsys):
    code, out, _ = run(capsys, "eval", "psi", "--q", "2", "--mu", "2.5", "--xi", "1,0.5", "--grid", "0:2:3")
    assert code == 0
    header, rows = read_csv(out)
    i, j = header.index("value"), header.index("value_swapped")
    assert all(abs(float(r[i]) - float(r[j])) < 1e-12 for r in rows)


def test_dunkl_from_multiplicity(capsys):
    code, out, _ = run(capsys, "eval", "dunkl", "--q", "2", "--k1", "0.5", "--k2", "0.5",
                       "--z", "1,0.5", "--points", "0,0;1,0.2")
    assert code == 0
    _, rows = read_csv(out)
    assert float(rows[0][2]) == 1.0


def test_same_seed_is_byte_identical(tmp_path):
    outs = []
    for name in ("a.csv", "b.csv"):
        path = tmp_path / name
        main(["sample", "--conv", "cone", "--q", "2", "--mu", "2.5", "--r", "1,0.3", "--s", "0.8,0.2",
              "--samples", "500", "--seed", "9", "--out", str(path)])
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    main(["sample", "--conv", "cone", "--q", "2", "--mu", "2.5", "--r", "1,0.3", "--s", "0.8,0.2",
          "--samples", "500", "--seed", "10", "--out", str(tmp_path / "c.csv")])
    assert (tmp_path / "c.csv").read_bytes() != outs[0]


def test_sample_rows_respect_support(capsys):
    code, out, _ = run(capsys, "sample", "--conv", "cone", "--field", "h", "--q", "2", "--mu", "6.5",
                       "--r", "1,0.3", "--s", "0.8,0.2", "--samples", "300")
    assert code == 0
    header, rows = read_csv(out)
    n, b = header.index("norm"), header.index("bound")
    assert all(float(r[n]) <= float(r[b]) + 1e-12 for r in rows)
    assert rows[0][header.index("method")] == "ball"


def test_chamber_rank_one_kingman_law(capsys):
    # mu = 1: t^2 = x^2 + y^2 + 2 x y cos(theta) with theta uniform on [0, pi]
    x, y = 1.0, 0.5
    code, out, _ = run(capsys, "sample", "--conv", "chamber", "--q", "1", "--mu", "1.0",
                       "--xi", str(x), "--eta", str(y), "--samples", "20000", "--format", "json")
    assert code == 0
    t = np.array([r[0] for r in json.loads(out)["rows"]])
    assert t.min() >= x - y - 1e-12 and t.max() <= x + y + 1e-12

    def cdf(s):
        c = np.clip((s**2 - x * x - y * y) / (2 * x * y), -1, 1)
        return 1 - np.arccos(c) / np.pi

    edges = np.linspace(x - y, x + y, 21)
    observed, _ = np.histogram(t, edges)
    expected = len(t) * np.diff(cdf(edges))
    assert stats.chisquare(observed, expected).pvalue > 0.001


@pytest.mark.parametrize("args", [
    ["eval", "rank1", "--mu", "1.5", "--k1", "0.2", "--k2", "0.5"],
    ["eval", "rank1", "--q", "2"],
    ["eval", "bessel", "--grid", "0:1"],
    ["sample", "--conv", "cone", "--q", "2", "--mu", "1.2"],
    ["sample", "--conv", "cone", "--samples", "0"],
    ["eval", "bessel", "--field", "x"],
    ["eval", "bessel", "--field", "r", "--d", "2"],
    ["frobnicate"],
])
def test_validation_exit_code(capsys, args):
    assert main(args) == 1


def test_non_convergence_exit_code(capsys):
    assert main(["eval", "bessel", "--q", "2", "--mu", "2", "--points=-60,-60"]) == 3


def test_verify_quick_suite(capsys, tmp_path):
    path = tmp_path / "report.json"
    code, _, err = run(capsys, "verify", "--suite", "jack-normalization", "--format", "json", "--out", str(path))
    assert code == 0
    assert "PASS" in err
    payload = json.loads(path.read_text())
    assert all(r[2] for r in payload["rows"])


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "conebessel.cli", "eval", "rank1", "--grid", "0:1:2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("z,value")

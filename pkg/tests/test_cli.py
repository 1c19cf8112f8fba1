import json
import math

import numpy as np
import pytest
from scipy.special import erf

from nibb_max import cli, serialize


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def parse_csv(text):
    return serialize.loads(text, "csv")


def test_cdf_limit_n1_is_erf(capsys):
    code, out, _ = run(capsys, "cdf", "limit", "--N", "1", "--grid", "0:4:9")
    assert code == 0
    c = parse_csv(out)
    assert np.allclose(c.values, erf(c.grid / math.sqrt(2)), rtol=0, atol=1e-10)


def test_cdf_lue_closed_form(capsys):
    code, out, _ = run(capsys, "cdf", "lue", "--m", "1", "--a", "-0.5", "--grid", "0:5:11")
    c = parse_csv(out)
    assert code == 0 and np.allclose(c.values, erf(np.sqrt(c.grid)), rtol=0, atol=1e-10)


def test_cdf_methods_agree(capsys):
    _, a, _ = run(capsys, "cdf", "limit", "--N", "6", "--method", "hermite", "--grid", "0:6:25")
    _, b, _ = run(capsys, "cdf", "limit", "--N", "6", "--method", "laguerre", "--grid", "0:6:25")
    assert np.max(np.abs(parse_csv(a).values - parse_csv(b).values)) < 1e-8


def test_cdf_default_grid_spans(capsys):
    code, out, _ = run(capsys, "cdf", "restricted-max", "--N", "2", "--p", "0.3")
    c = parse_csv(out)
    assert code == 0 and c.values[0] < 1e-12 and c.values[-1] > 1 - 1e-6


@pytest.mark.parametrize(
    "argv",
    [
        ["cdf", "restricted-max", "--p", "1.5"],
        ["cdf", "limit", "--N", "0"],
        ["cdf", "lue", "--a", "-1"],
        ["simulate", "nibb", "--N", "0"],
        ["simulate", "antige", "--n", "1", "--count", "5"],
        ["compare", "corollary1-smallp", "--p", "0"],
        ["matrix", "laguerre", "--x", "-1"],
    ],
)
def test_usage_errors_exit_two(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and "error" in err


@pytest.mark.parametrize("argv", [["verify", "--r", "1/0"], ["cdf", "limit", "--grid", "3:1:5"], ["nope"]])
def test_parser_errors_exit_two(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        cli.main(argv)
    assert exc.value.code == 2


def test_verify_small(capsys, tmp_path):
    out = tmp_path / "v.json"
    code, _, _ = run(capsys, "verify", "--N-max", "4", "--r", "1/2", "--lemma-max", "3", "--lemma-d-max", "2",
                     "--aux-n-max", "3", "-o", str(out))
    rep = json.loads(out.read_text())
    assert code == 0 and rep["pass"]
    props = [r for r in rep["records"] if r["identity"] in ("2TS=F", "ST=I", "2SQT=A")]
    assert len(props) == 3 * 4


def test_verify_alias(capsys):
    code, out, _ = run(capsys, "verify-identities", "--N-max", "2", "--r", "0", "--lemma-max", "1",
                       "--lemma-d-max", "0", "--aux-n-max", "1")
    assert code == 0 and json.loads(out)["pass"]


def test_simulate_is_reproducible(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert run(capsys, "simulate", "antige", "--n", "3", "--count", "500", "--seed", "9", "-o", str(path))[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_simulate_wishart_mean(capsys):
    _, out, _ = run(capsys, "simulate", "wishart", "--N", "1", "--m", "2", "--count", "10000", "--seed", "3")
    assert parse_csv(out).values.mean() == pytest.approx(2.0, abs=0.1)


def test_simulate_small_nibb_and_dyson(capsys):
    code, out, _ = run(capsys, "simulate", "nibb", "--N", "2", "--p", "0.5", "--steps", "64", "--count", "100")
    b = parse_csv(out)
    assert code == 0 and b.n == 100 and np.all(b.values >= 0)
    code, out, _ = run(capsys, "simulate", "dyson", "--N", "2", "--times=-2:0:41", "--count", "50", "--format", "json")
    assert code == 0 and serialize.loads(out, "json").n == 50


def test_matrix_output(capsys):
    code, out, _ = run(capsys, "matrix", "f", "--N", "3", "--r", "0.5")
    m = parse_csv(out)
    assert code == 0 and m.entries[0, 1] == pytest.approx(2.0)
    code, out, _ = run(capsys, "matrix", "m", "--N", "2", "--r", "0.0", "--alpha", "0.0")
    assert code == 0 and parse_csv(out).entries[0, 0] == pytest.approx(1.0, abs=1e-12)


def test_compare_reports(capsys):
    # 2000 draws put the KS noise near 0.02, so pass a looser threshold
    code, out, _ = run(capsys, "compare", "theorem1", "--N", "1", "--count", "2000", "--seed", "4", "--threshold", "0.05")
    rep = json.loads(out)
    assert code == 0 and rep["passed"] and rep["threshold"] == 0.05
    code, out, _ = run(capsys, "compare", "prop2-selfcheck", "--N", "1", "--p", "0.5", "--steps", "256",
                       "--count", "500", "--threshold", "1e-9")
    assert code == 1 and not json.loads(out)["passed"]


def test_compare_nibm_loe_small(capsys):
    code, out, _ = run(capsys, "compare", "nibm-loe", "--N", "1", "--steps", "1024", "--count", "3000", "--seed", "2",
                       "--threshold", "0.05")
    rep = json.loads(out)
    assert rep["ks"] < 0.05 and code == 0

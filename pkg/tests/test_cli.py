import csv
import io
import json
import math

import pytest

from fracpot import sweeps
from fracpot.cli import KERNEL_COLUMNS, main
from fracpot.composition import VerificationReport


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _table(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_eval_kernel_yukawa(capsys):
    code, out, _ = run(capsys, "eval-kernel", "--n", "3", "--alpha", "1", "--lambda", "1",
                       "--r-min", "0.1", "--r-max", "10", "--points", "50")
    assert code == 0
    rows = _table(out)
    assert len(rows) == 50
    assert tuple(rows[0]) == KERNEL_COLUMNS
    for row in rows:
        r = float(row["r"])
        assert float(row["closed_form"]) == pytest.approx(math.exp(-r) / (4 * math.pi * r),
                                                          rel=1e-13)
        assert float(row["subordination_oracle"]) == pytest.approx(float(row["closed_form"]),
                                                                   rel=1e-9)


def test_eval_kernel_newtonian(capsys, tmp_path):
    path = tmp_path / "k.csv"
    code, out, _ = run(capsys, "eval-kernel", "--n", "3", "--alpha", "1", "--lambda", "0",
                       "--points", "5", "--spacing", "log", "--output", str(path))
    assert code == 0 and out == ""
    for row in _table(path.read_text()):
        r = float(row["r"])
        assert float(row["closed_form"]) == pytest.approx(1 / (4 * math.pi * r), rel=1e-14)
        assert row["small_r_asymptotic"] == "" and row["large_r_asymptotic"] == ""


def test_eval_kernel_riesz_invalid(capsys):
    code, _, err = run(capsys, "eval-kernel", "--alpha", "2", "--n", "3", "--lambda", "0")
    assert code == 2
    assert len(err.strip().splitlines()) == 1


def test_eval_kernel_bad_flags(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["eval-kernel", "--n", "3"])
    assert exc.value.code == 2


def test_verify_riesz_lattice_passes(capsys, tmp_path):
    path = tmp_path / "r.json"
    code, _, err = run(capsys, "verify", "riesz-composition", "--output", str(path))
    assert code == 0
    assert "60/60 passed" in err
    doc = json.loads(path.read_text())
    assert set(doc) == {"identity", "config", "records", "summary"}
    assert doc["summary"]["passed"] == doc["summary"]["total"] == 60


def test_verify_perturbed_constant_fails(capsys):
    code, _, err = run(capsys, "verify", "riesz-composition", "--perturb-constant", "1.01", "-q")
    assert code == 1
    assert err.startswith("0/60 passed")


def test_verify_l1_flags_printed_constant(capsys):
    code, out, _ = run(capsys, "verify", "l1-norm")
    doc = json.loads(out)
    assert code == 0
    assert all("printed constant" in r["notes"] for r in doc["records"])


def test_verify_config_file_and_csv(capsys, tmp_path):
    cfg = tmp_path / "sweep.cfg"
    cfg.write_text("# small lattice\nn = 1, 3\nalpha = 0.7\nbeta = 1.0\nlambda = 1\nd = 1\n"
                   "format = csv\n")
    code, out, _ = run(capsys, "verify", "bessel-composition", "--config", str(cfg))
    assert code == 0
    ident, recs = sweeps.parse_report(out, "csv")
    assert ident == "bessel-composition" and len(recs) == 2
    assert [r.params[0] for r in recs] == [1, 3]


@pytest.mark.parametrize("argv", [["verify", "l1-norm", "--set", "bogus=1"],
                                  ["verify", "l1-norm", "--config", "/nonexistent/file"],
                                  ["verify", "riesz-composition", "--set", "n=1",
                                   "--set", "alpha=0.4", "--set", "beta=0.4", "--set", "d=1"]])
def test_verify_config_errors(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_verify_unknown_identity(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "nope"])
    assert exc.value.code == 2


def test_verify_seed_reproducible(capsys, monkeypatch):
    monkeypatch.setenv("FRACPOT_THREADS", "2")
    _, a, _ = run(capsys, "verify", "semigroup", "--seed", "7")
    monkeypatch.setenv("FRACPOT_THREADS", "1")
    _, b, _ = run(capsys, "verify", "semigroup", "--seed", "7")
    assert a == b
    _, c, _ = run(capsys, "verify", "semigroup", "--seed", "8")
    assert a != c


@pytest.mark.parametrize("fmt", ["json", "csv"])
def test_report_round_trip(fmt):
    cfg = sweeps.build_config("norm-witness", {"j": [1, 4, "inf"], "p": "inf"}, format=fmt)
    doc = sweeps.run(cfg)
    ident, recs = sweeps.parse_report(sweeps.serialize(doc, fmt))
    assert ident == "norm-witness"
    assert recs == [VerificationReport.from_dict(r) for r in doc["records"]]
    assert recs[0].extra["j"][-1] == math.inf


def test_parse_config_text():
    vals = sweeps.parse_config_text("n = 1,2\nalpha=0.5 # comment\nlizorkin = false\nlam=2")
    assert vals == {"n": [1, 2], "alpha": 0.5, "lizorkin": False, "lambda": 2}
    with pytest.raises(sweeps.ConfigError):
        sweeps.parse_config_text("novalue")

import csv
import io
import json
import os
import time
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pfbinding import config as cfg
from pfbinding.cli import main
from pfbinding.core import ValidationError

import oracles

GOLDEN = Path(__file__).parent / "golden"
REGEN = os.environ.get("PFBINDING_REGEN_GOLDEN") == "1"
SMALL_GRID = ["--n-points", "2000", "--z-list", "1,2"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.mark.parametrize("name, argv", [
    ("threshold_preset.csv", ["threshold", "--preset", "paper-5.3", "--format", "csv"]),
    ("threshold_preset.json", ["threshold", "--preset", "paper-5.3", "--format", "json"]),
    ("self_energy.json", ["self-energy", "--alpha", "0.0072992", "--lambda", "1", "--format", "json"]),
    ("self_energy_sweep.csv", ["self-energy", "--sweep-lambda", "0.1:5:50", "--format", "csv"]),
    ("verify_quick_properties.txt", None),
])
def test_golden_outputs(capsys, name, argv):
    if argv is None:
        # timing column aside, the quick suite is pinned too
        code, out, _ = run(capsys, "verify", "--quick", "--format", "csv")
        out = "\n".join(line for line in out.splitlines() if "elapsed_seconds" not in line) + "\n"
    else:
        code, out, _ = run(capsys, *argv)
    assert code == 0
    path = GOLDEN / name
    if REGEN:
        path.write_text(out)
    assert out == path.read_text()


def test_self_energy_example(capsys):
    code, out, _ = run(capsys, "self-energy", "--alpha", "0.0072992", "--lambda", "1", "--format", "csv")
    rows = {r["quantity"]: r for r in rows_of(out)}
    assert code == 0
    assert float(rows["leading"]["value"]) == pytest.approx(oracles.LEADING_ALPHA_0072992, rel=1e-11)
    # printed as 0.056296
    assert float(rows["leading"]["value"]) == pytest.approx(0.056296, rel=1e-4)
    assert rows["consistent"]["value"] == "true"
    assert all(r["op"] for r in rows.values())


def test_self_energy_zero_coupling(capsys):
    code, out, _ = run(capsys, "self-energy", "--alpha", "0", "--lambda", "1", "--format", "json")
    rows = {r["quantity"]: r["value"] for r in json.loads(out)["rows"]}
    for key in ("leading", "error_bound", "trial_quotient", "trial_minus_leading", "sector_minimum"):
        assert rows[key] == 0


def test_self_energy_sweep_monotone(capsys):
    code, out, _ = run(capsys, "self-energy", "--sweep-lambda", "0.1:5:50", "--format", "csv")
    rows = rows_of(out)
    assert len(rows) == 50
    leading = np.array([float(r["leading"]) for r in rows])
    assert np.all(np.diff(leading) > 0)
    assert {r["op"] for r in rows} == {"self_energy_leading"}


def test_threshold_presets(capsys):
    code, out, _ = run(capsys, "threshold", "--preset", "paper-5.3", "--format", "json")
    main_rep, quotes = [json.loads(line) for line in out.splitlines()]
    by_name = {r["scenario"]: r for r in main_rep["rows"]}
    assert by_name["small-cutoff"]["alpha_max"] == pytest.approx(oracles.ONE_OVER_45PI, rel=0.02)
    assert by_name["unit-cutoff"]["schwarz_term"] == pytest.approx(1 / 200, rel=0.01)
    z2 = by_name["unit-cutoff-z2"]
    assert z2["branch"] == "rc" and z2["rc_term"] == pytest.approx(oracles.RC_TERM_UNIT_Z2, rel=1e-11)
    # the quoted values sit next to the computed ones
    quoted = {(q["scenario"], q["quantity"]): q for q in quotes["rows"]}
    assert quoted[("unit-cutoff", "rc_term")]["quoted"] == "e0/21"
    assert quoted[("unit-cutoff", "schwarz_term")]["quoted"] == "1/200"
    assert quoted[("unit-cutoff-z2", "rc_term")]["quoted"] == "1/(4*10^5)"


def test_threshold_single_preset_and_custom(capsys):
    code, out, _ = run(capsys, "threshold", "--preset", "small-cutoff", "--format", "csv")
    assert code == 0 and "small-cutoff" in out and "unit-cutoff" not in out
    code, out, _ = run(capsys, "threshold", "--lambda", "e0", "--a-split", "0.001", "--format", "csv")
    row = rows_of(out.split("\n\n")[0])[0]
    assert float(row["alpha_max"]) == pytest.approx(oracles.ONE_OVER_45PI, rel=0.02)


def test_radiative_report(capsys):
    code, out, _ = run(capsys, "radiative", "--lambda", "1", "--format", "json", *SMALL_GRID)
    assert code == 0
    first, table = [json.loads(line) for line in out.splitlines()]
    vals = {r["quantity"]: r["value"] for r in first["rows"]}
    assert 0.95 <= vals["F_over_log"] <= 1.0
    assert vals["route_difference"] <= 0.01
    assert vals["E_spectral"] <= vals["E_bound"]
    z1, z2 = table["rows"]
    # fixed cutoff: R_C ~ Z^2; cutoff tied to e0: ~ Z^4
    assert z2["ratio_fixed"] == pytest.approx(4, rel=0.01)
    assert z2["ratio_at_e0"] == pytest.approx(16, rel=0.01)


def test_radiative_at_binding_energy(capsys):
    code, out, _ = run(capsys, "radiative", "--lambda", "e0", "--format", "json", "--z-list", "1")
    vals = {r["quantity"]: r["value"] for r in json.loads(out.splitlines()[0])["rows"]}
    assert vals["F_over_log"] == pytest.approx(0.2352, abs=5e-4)


def test_mass_report(capsys):
    code, out, _ = run(capsys, "mass", "--lambda-over-m", "1,10", "--format", "csv", "--n-points", "2000")
    rows = rows_of(out)
    assert float(rows[0]["relative_difference"]) < 0.05
    assert len(rows) == 2
    code, out, _ = run(capsys, "mass", "--alpha", "0", "--lambda-over-m", "1", "--format", "csv",
                       "--n-points", "2000")
    row = rows_of(out)[0]
    assert float(row["spectral"]) == 1 and float(row["logarithmic"]) == 1


def test_spectrum_dump(capsys, tmp_path):
    target = tmp_path / "mu.csv"
    code, out, _ = run(capsys, "spectrum", "--format", "csv", "--n-points", "2000", "--output", str(target))
    assert code == 0 and out == ""
    rows = rows_of(target.read_text())
    assert list(rows[0]) == ["op", "gap", "weight"]
    assert sum(float(r["weight"]) for r in rows) == pytest.approx(1.0, abs=1e-9)


def test_verify_quick_is_fast(capsys):
    start = time.perf_counter()
    code, out, _ = run(capsys, "verify", "--quick", "--format", "csv")
    assert time.perf_counter() - start < 1.0
    assert code == 0
    assert all(r["status"] in ("PASS", "") for r in rows_of(out))


def test_verify_full(capsys):
    code, out, _ = run(capsys, "verify", "--format", "csv")
    rows = rows_of(out)
    assert code == 0, out
    assert any(r["property"] == "one_photon_sector_optimality" for r in rows)


def test_verify_corrupted_grid(capsys):
    code, out, _ = run(capsys, "verify", "--n-points", "16", "--r-max", "0.5", "--format", "csv")
    assert code == 3
    assert any(r["status"] == "FAIL" for r in rows_of(out))


def test_verify_coarse_box_reports_convergence(capsys):
    code, out, _ = run(capsys, "verify", "--n-points", "100", "--r-max", "1200", "--format", "csv")
    assert code == 3
    assert "ConvergenceError" in out


def test_exit_code_validation(capsys):
    code, _, err = run(capsys, "threshold", "--a-split", "1.5")
    assert code == 1 and "a_split" in err
    code, _, err = run(capsys, "self-energy", "--lambda", "abc")
    assert code == 1 and "lambda_cut" in err


def test_exit_code_convergence(capsys):
    code, _, err = run(capsys, "spectrum", "--n-points", "100", "--r-max", "1200")
    assert code == 2 and "convergence" in err


def test_unbound_custom_potential(capsys, tmp_path):
    path = tmp_path / "bump.txt"
    path.write_text("\n".join(f"{r} {1 / (1 + r * r)}" for r in np.linspace(0, 20, 50)))
    code, _, err = run(capsys, "radiative", "--potential-file", str(path), "--r-max", "20", "--n-points", "400")
    assert code == 1 and "bound state" in err


def test_custom_potential_file(capsys, tmp_path):
    path = tmp_path / "well.txt"
    r = np.linspace(0, 60, 600)
    path.write_text("# gaussian well\n" + "\n".join(f"{float(x)!r}, {float(-2 * np.exp(-(x / 2) ** 2))!r}" for x in r))
    code, out, _ = run(capsys, "radiative", "--potential-file", str(path), "--r-max", "60",
                       "--n-points", "3000", "--format", "csv")
    vals = {row["quantity"]: float(row["value"]) for row in rows_of(out)}
    assert code == 0
    assert vals["route_difference"] <= 0.01
    assert vals["E_spectral"] <= vals["E_bound"]


# -- configuration -------------------------------------------------------------

def test_show_config_and_file(capsys, tmp_path):
    code, out, _ = run(capsys, "threshold", "--show-config", "--alpha", "0.001")
    assert code == 0 and "alpha = 0.001" in out
    path = tmp_path / "run.cfg"
    path.write_text(out)
    code, again, _ = run(capsys, "threshold", "--config", str(path), "--show-config")
    assert again == out
    # a flag overrides the file
    code, over, _ = run(capsys, "threshold", "--config", str(path), "--show-config", "--beta", "0.5")
    assert "beta = 0.5" in over


def test_config_parse_diagnostics(capsys, tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("# header\nalpha = 0.01\nn_points = many\n")
    code, _, err = run(capsys, "threshold", "--config", str(path))
    assert code == 1 and "line 3" in err and "n_points" in err
    path.write_text("colour = blue\n")
    with pytest.raises(ValidationError, match="line 1"):
        cfg.load(path)
    path.write_text("alpha 0.1\n")
    with pytest.raises(ValidationError, match="expected 'key = value'"):
        cfg.load(path)


@settings(max_examples=100, deadline=None)
@given(alpha=st.floats(0, 1, allow_subnormal=True), r_max=st.one_of(st.none(), st.floats(1e-3, 1e6)),
       n=st.integers(16, 10**6), quick=st.booleans(),
       lam=st.one_of(st.just("e0"), st.floats(1e-6, 100).map(repr)),
       fmt=st.sampled_from(cfg.FORMATS), out=st.text("abc_./-", max_size=12))
def test_config_roundtrip(alpha, r_max, n, quick, lam, fmt, out):
    conf = cfg.RunConfig(alpha=alpha, r_max=r_max, n_points=n, quick=quick, lambda_cut=lam, format=fmt,
                         output=out.strip())
    assert cfg.loads(conf.dumps()) == conf

import json
import subprocess
import sys
from pathlib import Path

import jsonschema
import numpy as np
import pytest

from saptvqe.cli import ConfigError, bundled_job, dumps_report, load_config, main, run_job
from saptvqe.vqe_sim import read_checkpoint

DOCS = Path(__file__).resolve().parents[1] / "docs"
REPORT_SCHEMA = json.loads((DOCS / "report.schema.json").read_text())
ERROR_SCHEMA = json.loads((DOCS / "error.schema.json").read_text())
VOLATILE = ("timestamp", "timings")


def _job(tmp_path, monomer_b, extra="", name="job.toml", monomer_a='method = "rhf"'):
    xyz = bundled_job("water_dimer_r0.2397.xyz").read_text()
    (tmp_path / "dimer.xyz").write_text(xyz)
    text = f"""
[geometry]
xyz_file = "dimer.xyz"
basis = "6-31g"

[monomer_a]
{monomer_a}

[monomer_b]
{monomer_b}
{extra}
"""
    p = tmp_path / name
    p.write_text(text)
    return p


@pytest.fixture(scope="module")
def bundled_runs():
    return [run_job("water_dimer_r0.2397.toml", out=None) for _ in range(2)]


def _stable(data):
    return dumps_report({k: v for k, v in data.items() if k not in VOLATILE})


def test_check_validates_without_running(tmp_path):
    p = _job(tmp_path, 'method = "vqe"\nn_below = 2\nn_above = 2')
    code, data, target = run_job(p, check=True)
    assert code == 0 and target is None
    assert data["status"] == "ok" and len(data["geometry_hash"]) == 64
    assert "E_pol1" not in data


def test_check_via_main(tmp_path, capsys):
    p = _job(tmp_path, 'method = "casci"')
    assert main(["run", str(p), "--check"]) == 0
    assert json.loads(capsys.readouterr().out)["status"] == "ok"


@pytest.mark.parametrize("body, match", [
    ('method = "rhf"\n[monomer_c]\nmethod = "rhf"', "exactly two monomer tables"),
    ('method = "rhf"\ncolour = "blue"', "unknown keys"),
    ('method = "vqe"\nk = "two"', "wrong type"),
    ('method = "vqe"\nk = 1.5', "wrong type"),
    ('method = "vqe"\ntied_fabrics = 1', "wrong type"),
    ('method = "vqe"\ninit = "random"', "needs a seed"),
    ('method = "vqe"\ninit = "ones"', "init must be"),
    ('method = "vqe"\ngradient = "magic"', "unknown gradient"),
    ('method = "dft"', "unknown method"),
    ('method = "vqe"\nk = 0', "k must be"),
    ('method = "rhf"\n[options]\nscf_conv_tol = 0.5', "scf_conv_tol"),
    ('method = "rhf"\n[extras]\nx = 1', "unknown top-level"),
])
def test_config_errors(tmp_path, body, match):
    p = _job(tmp_path, body)
    with pytest.raises(ConfigError, match=match):
        load_config(p)
    code, rec, _ = run_job(p)
    assert code == 2 and rec["stage"] == "config"
    jsonschema.validate(rec, ERROR_SCHEMA)


def test_missing_monomer_table_exit_code(tmp_path, capsys):
    p = tmp_path / "bad.toml"
    p.write_text('[geometry]\nxyz = "H 0 0 0\\n--\\nH 0 0 3"\n[monomer_a]\nmethod = "rhf"\n')
    assert main(["run", str(p)]) == 2
    rec = json.loads(capsys.readouterr().err)
    assert rec["error"] == "ConfigError"


def test_geometry_needs_exactly_one_source(tmp_path):
    p = tmp_path / "j.toml"
    p.write_text('[geometry]\n[monomer_a]\n[monomer_b]\n')
    with pytest.raises(ConfigError, match="exactly one"):
        load_config(p)


def test_toml_syntax_error(tmp_path):
    p = tmp_path / "j.toml"
    p.write_text("[geometry\n")
    assert run_job(p)[0] == 2


def test_seed_override(tmp_path):
    p = _job(tmp_path, 'method = "vqe"\ninit = "random"\nseed = 3')
    assert load_config(p)[1].monomer_b.seed == 3
    assert load_config(p, seed=11)[1].monomer_b.seed == 11
    # a random start without a seed in the file is accepted when --seed is given
    q = _job(tmp_path, 'method = "vqe"\ninit = "random"', name="q.toml")
    assert load_config(q, seed=5)[1].monomer_b.seed == 5


def test_inline_xyz_and_units(tmp_path):
    p = tmp_path / "j.toml"
    p.write_text('[geometry]\nxyz = "H 0 0 0\\nH 0 0 1.4\\n--\\nH 0 0 8\\nH 0 0 9.4"\n'
                 'units = "bohr"\nbasis = "sto-3g"\n[monomer_a]\n[monomer_b]\n')
    system = load_config(p)[0]
    assert system.monomer_b.coords[1, 2] == pytest.approx(9.4)


def test_runtime_error_record(tmp_path):
    # a (14,14) window exceeds the simulator limit; detected only once the SCF is known
    p = _job(tmp_path, 'method = "casci"\nn_below = 4\nn_above = 8')
    code, rec, _ = run_job(p)
    assert code == 1
    jsonschema.validate(rec, ERROR_SCHEMA)
    assert rec["status"] == "error" and rec["message"]


def test_bundled_report_matches_schema(bundled_runs):
    code, data, target = bundled_runs[0]
    assert code == 0 and target.endswith("water_dimer_r0.2397.json")
    jsonschema.validate(json.loads(dumps_report(data)), REPORT_SCHEMA)
    assert data["source"]["B"] == "VQE(k=1)"


def test_bundled_job_values(bundled_runs):
    data = bundled_runs[0][1]
    assert data["E_pol1"] == pytest.approx(-0.009756, abs=5e-4)
    assert data["E_exch1"] == pytest.approx(0.005559, abs=5e-4)
    assert data["E_total1"] == pytest.approx(data["E_pol1"] + data["E_exch1"], abs=1e-14)
    assert data["naive_oracle"]["E_exch1"] == pytest.approx(data["E_exch1"], abs=1e-10)
    assert data["measurement_plan"]["E_pol1"] == pytest.approx(data["E_pol1"], abs=1e-10)


def test_bundled_job_is_reproducible(bundled_runs):
    a, b = (_stable(r[1]) for r in bundled_runs)
    assert a == b
    assert bundled_runs[0][1]["timestamp"]


def test_trace_files_and_fcidump(tmp_path):
    p = _job(tmp_path, 'method = "vqe"\nk = 1\nmax_iter = 5',
             '[output]\nreport = "out/r.json"\ntrace_dir = "tr"\nfcidump = true')
    assert main(["run", str(p)]) == 0
    report = json.loads((tmp_path / "out" / "r.json").read_text())
    jsonschema.validate(report, REPORT_SCHEMA)
    tr = tmp_path / "tr"
    assert sorted(report["files"]["B"]) == ["FCIDUMP_B", "vqe_B_params.txt", "vqe_B_trace.csv"]
    rows = (tr / "vqe_B_trace.csv").read_text().splitlines()
    assert rows[0] == "iteration,energy,grad_inf_norm" and len(rows) >= 2
    params = read_checkpoint(tr / "vqe_B_params.txt")
    assert params.shape == (report["monomers"]["B"]["vqe"]["n_params"],)
    head = (tr / "FCIDUMP_B").read_text().splitlines()[0]
    assert "NORB=2" in head and "NELEC=2" in head

    # restarting from the checkpoint reproduces the final energy at the first step
    q = _job(tmp_path, f'method = "vqe"\nmax_iter = 1\ninit_file = "{tr / "vqe_B_params.txt"}"',
             name="restart.toml")
    code, data, _ = run_job(q)
    assert code == 0
    trace = data["monomers"]["B"]["vqe"]
    assert trace["energy"] <= report["monomers"]["B"]["vqe"]["energy"] + 1e-10


def test_out_flag_overrides(tmp_path):
    p = _job(tmp_path, 'method = "rhf"', '[output]\nreport = "ignored.json"')
    out = tmp_path / "chosen.json"
    assert main(["run", str(p), "--out", str(out)]) == 0
    assert out.is_file() and not (tmp_path / "ignored.json").exists()
    data = json.loads(out.read_text())
    assert data["source"] == {"A": "RHF", "B": "RHF"}
    assert np.isfinite(data["E_pol1"])


def test_console_entry_point(tmp_path):
    p = _job(tmp_path, 'method = "rhf"')
    res = subprocess.run([sys.executable, "-m", "saptvqe.cli", "run", str(p), "--check"],
                         capture_output=True, text=True, timeout=120)
    assert res.returncode == 0, res.stderr
    assert json.loads(res.stdout)["status"] == "ok"

"""Command-line driver: one TOML job file in, one JSON report out.

    sapt-vqe run CONFIG [--out PATH] [--seed N] [--check]

Set SAPTVQE_NUM_THREADS to cap the BLAS thread pool.
"""
from __future__ import annotations

import os

_threads = os.environ.get("SAPTVQE_NUM_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ[_var] = _threads

import argparse  # noqa: E402
import json  # noqa: E402
import sys  # noqa: E402
import traceback  # noqa: E402
from importlib import resources  # noqa: E402
from pathlib import Path  # noqa: E402

import numpy as np  # noqa: E402
import tomli  # noqa: E402

from .active_space import write_fcidump  # noqa: E402
from .integrals import parse_dimer_xyz  # noqa: E402
from .sapt_core import MonomerSpec, SAPTConfig, run_sapt  # noqa: E402
from .vqe_sim import read_checkpoint  # noqa: E402

TOP_KEYS = {"geometry", "monomer_a", "monomer_b", "options", "output"}
GEOMETRY_KEYS = {"xyz", "xyz_file", "units", "basis", "basis_a", "basis_b"}
MONOMER_KEYS = {"method", "n_below", "n_above", "k", "gtol", "max_iter", "init", "seed",
                "gradient", "init_file", "tied_fabrics"}
OPTION_KEYS = {"run_supermolecular", "run_naive_oracle", "run_measurement_plan",
               "scf_conv_tol"}
OUTPUT_KEYS = {"report", "trace_dir", "fcidump"}


class ConfigError(ValueError):
    pass


class JobError(RuntimeError):
    def __init__(self, stage, exc):
        super().__init__(str(exc))
        self.stage, self.exc = stage, exc

    def record(self):
        return {"status": "error", "stage": self.stage,
                "module": type(self.exc).__module__, "error": type(self.exc).__name__,
                "message": str(self.exc)}


def bundled_job(name):
    """Path of a job file shipped with the package, or None."""
    p = resources.files("saptvqe.data.jobs").joinpath(name)
    return p if p.is_file() else None


def _resolve(value, base: Path):
    """A path relative to the job file, falling back to the bundled job data."""
    p = Path(value)
    if not p.is_absolute():
        p = base / p
    if p.is_file():
        return p
    q = resources.files("saptvqe.data.jobs").joinpath(value)
    if q.is_file():
        return q
    raise ConfigError(f"file not found: {value}")


def _read_text_near(value, base: Path):
    return _resolve(value, base).read_text()


def _check_keys(section, table, allowed):
    if not isinstance(table, dict):
        raise ConfigError(f"[{section}] must be a table")
    extra = set(table) - allowed
    if extra:
        raise ConfigError(f"[{section}] unknown keys: {sorted(extra)}")


def _typed(section, table, key, kinds, default):
    v = table.get(key, default)
    if v is None or isinstance(v, kinds) and not (isinstance(v, bool) and bool not in kinds):
        return v
    raise ConfigError(f"[{section}] {key} has the wrong type ({type(v).__name__})")


def _basis_arg(value, base):
    if value is None:
        return None
    if "/" in value or value.endswith((".g94", ".gbs", ".nw")):
        return _read_text_near(value, base)
    return value


def load_config(path, seed=None):
    """Parse and validate a job file. Returns (system, SAPTConfig, output dict)."""
    path = Path(path)
    if not path.is_file():
        b = bundled_job(str(path))
        if b is None:
            raise ConfigError(f"config file not found: {path}")
        text, base = b.read_text(), Path(".")
    else:
        text, base = path.read_text(), path.parent
    try:
        doc = tomli.loads(text)
    except tomli.TOMLDecodeError as e:
        raise ConfigError(f"TOML syntax error: {e}") from None
    monomers = [k for k in doc if k.startswith("monomer")]
    if len(monomers) != 2 or set(monomers) != {"monomer_a", "monomer_b"}:
        raise ConfigError(f"exactly two monomer tables [monomer_a], [monomer_b] required, "
                          f"found {monomers}")
    extra = set(doc) - TOP_KEYS
    if extra:
        raise ConfigError(f"unknown top-level tables: {sorted(extra)}")

    geo = doc.get("geometry")
    if geo is None:
        raise ConfigError("missing [geometry] table")
    _check_keys("geometry", geo, GEOMETRY_KEYS)
    if ("xyz" in geo) == ("xyz_file" in geo):
        raise ConfigError("[geometry] needs exactly one of xyz (inline) or xyz_file")
    xyz = geo["xyz"] if "xyz" in geo else _read_text_near(geo["xyz_file"], base)
    units = _typed("geometry", geo, "units", (str,), "angstrom")
    if units.lower() not in ("angstrom", "bohr"):
        raise ConfigError("[geometry] units must be 'angstrom' or 'bohr'")
    basis = _typed("geometry", geo, "basis", (str,), "6-31g")
    ba = _basis_arg(_typed("geometry", geo, "basis_a", (str,), basis), base)
    bb = _basis_arg(_typed("geometry", geo, "basis_b", (str,), basis), base)

    specs = []
    for name in ("monomer_a", "monomer_b"):
        t = doc[name]
        _check_keys(name, t, MONOMER_KEYS)
        kw = {"method": _typed(name, t, "method", (str,), "rhf").lower()}
        for key, kinds in (("n_below", (int,)), ("n_above", (int,)), ("k", (int,)),
                           ("max_iter", (int,)), ("gtol", (float, int)),
                           ("init", (str,)), ("seed", (int,)), ("gradient", (str,)),
                           ("tied_fabrics", (bool,))):
            if key in t:
                kw[key] = _typed(name, t, key, kinds, None)
        if "gtol" in kw:
            kw["gtol"] = float(kw["gtol"])
        if kw.get("init", "zeros") not in ("zeros", "random"):
            raise ConfigError(f"[{name}] init must be 'zeros' or 'random'")
        if "init_file" in t:
            kw["init_params"] = tuple(read_checkpoint(
                _resolve(_typed(name, t, "init_file", (str,), None), base)))
        if kw.get("gradient", "adjoint") not in ("adjoint", "parameter_shift",
                                                 "finite_difference"):
            raise ConfigError(f"[{name}] unknown gradient method {kw['gradient']!r}")
        if kw["method"] == "vqe" and kw.get("init") == "random" \
                and kw.get("seed") is None and seed is None:
            raise ConfigError(f"[{name}] random initialisation needs a seed")
        if seed is not None and kw["method"] == "vqe":
            kw["seed"] = seed
        try:
            specs.append(MonomerSpec(**kw))
        except ValueError as e:
            raise ConfigError(f"[{name}] {e}") from None

    opts = doc.get("options", {})
    _check_keys("options", opts, OPTION_KEYS)
    flags = {k: _typed("options", opts, k, (bool,), False) for k in OPTION_KEYS - {"scf_conv_tol"}}
    tol = float(_typed("options", opts, "scf_conv_tol", (float, int), 1e-8))
    if not 0 < tol < 1e-3:
        raise ConfigError("[options] scf_conv_tol must lie in (0, 1e-3)")
    cfg = SAPTConfig(specs[0], specs[1], scf_conv_tol=tol, **flags)

    out = doc.get("output", {})
    _check_keys("output", out, OUTPUT_KEYS)
    output = {"report": _typed("output", out, "report", (str,), None),
              "trace_dir": _typed("output", out, "trace_dir", (str,), None),
              "fcidump": _typed("output", out, "fcidump", (bool,), False)}
    for key in ("report", "trace_dir"):
        if output[key] and not Path(output[key]).is_absolute():
            output[key] = str(base / output[key])
    try:
        system = parse_dimer_xyz(xyz, ba, bb, units.lower())
    except ValueError as e:
        raise ConfigError(f"[geometry] {e}") from None
    return system, cfg, output


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialise {type(o).__name__}")


def dumps_report(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True, default=_json_default) + "\n"


def run_job(config_path, out=None, seed=None, check=False):
    """Execute one job. Returns (exit code, report or error record, report path)."""
    try:
        system, cfg, output = load_config(config_path, seed)
    except (ConfigError, ValueError, OSError) as e:
        return 2, JobError("config", e).record(), out
    target = out or output["report"]
    if check:
        return 0, {"status": "ok", "checked": str(config_path),
                   "geometry_hash": system.geometry_hash()}, None
    try:
        report = run_sapt(system, cfg)
    except Exception as e:  # every upstream error becomes a record
        rec = JobError(getattr(e, "sapt_stage", "sapt"), e).record()
        rec["traceback"] = traceback.format_exc(limit=3)
        return 1, rec, target
    data = dict(report.data)
    data["status"] = "ok"
    if output["trace_dir"]:
        d = Path(output["trace_dir"])
        d.mkdir(parents=True, exist_ok=True)
        files = {}
        for w, r in report.runs.items():
            if r.vqe is not None:
                r.vqe.write_trace(d / f"vqe_{w}_trace.csv")
                r.vqe.write_checkpoint(d / f"vqe_{w}_params.txt")
                files[w] = [f"vqe_{w}_trace.csv", f"vqe_{w}_params.txt"]
            if output["fcidump"] and r.ham is not None:
                write_fcidump(d / f"FCIDUMP_{w}", r.ham)
                files.setdefault(w, []).append(f"FCIDUMP_{w}")
        data["files"] = files
    return 0, data, target


def main(argv=None):
    ap = argparse.ArgumentParser(prog="sapt-vqe",
                                 description="First-order SAPT with RHF, CASCI or VQE monomers")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run one job file")
    r.add_argument("config", help="TOML job file (or the name of a bundled job)")
    r.add_argument("--out", help="report path (overrides [output] report)")
    r.add_argument("--seed", type=int, help="override the seed of every VQE monomer")
    r.add_argument("--check", action="store_true", help="parse and validate only")
    args = ap.parse_args(argv)

    code, data, target = run_job(args.config, args.out, args.seed, args.check)
    text = dumps_report(data)
    if target:
        Path(target).parent.mkdir(parents=True, exist_ok=True)
        Path(target).write_text(text)
    if code:
        sys.stderr.write(text)
    elif not target:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())

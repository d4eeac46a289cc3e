"""Command-line interface and experiment-suite runner.

The suite file is JSON: a top-level seed, an output directory, and a
list of named experiments (body, theorem route, parameters, sample
count, tolerances).  Each experiment's randomness is derived by hashing
the suite seed with the experiment name, so reordering experiments does
not change their results.  Reports carry no timings; those go to a
separate metadata file so reruns are byte-identical.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import sys
import time
from pathlib import Path

import click
import numpy as np

from . import specfun
from . import rhs as rhs_mod
from .bodies import OriginOnBoundaryError, body_from_dict
from .minkowski import phi
from .montecarlo import CapabilityError, ExperimentSpec, verify
from .symtensor import SymTensor

REPORT_SCHEMA = "crofton-report/1"


def experiment_seed(suite_seed: int, name: str) -> int:
    digest = hashlib.sha256(f"{suite_seed}:{name}".encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def _load_body(obj, base_dir: Path):
    if isinstance(obj, str):
        with open(base_dir / obj) as fh:
            obj = json.load(fh)
    return body_from_dict(obj)


def _spec_from_entry(entry: dict, suite_seed: int,
                     workers: int | None) -> ExperimentSpec:
    params = entry.get("params", {})
    tol = entry.get("tolerances", {})
    seed = entry.get("seed")
    if seed is None:
        seed = experiment_seed(suite_seed, entry["name"])
    return ExperimentSpec(
        name=entry["name"], theorem=entry["theorem"],
        j=params["j"], k=params.get("k"), r=params.get("r", 0),
        s=params.get("s", 0), psi=params.get("psi"),
        n_samples=entry.get("n_samples"), seed=seed,
        cubature_order=entry.get("cubature_order", 64),
        section_order=entry.get("section_order", 32),
        inner_samples=entry.get("inner_samples", 64),
        ci_mult=tol.get("ci_mult", 3.0), atol=tol.get("atol", 1e-4),
        rel_tol=tol.get("rel_tol"), rel_floor=tol.get("rel_floor", 1e-3),
        workers=workers)


def run_suite(path, output_dir=None, workers: int | None = None):
    """Run every experiment in a suite file; returns (exit_status, rows).

    Writes one report JSON per experiment, an aggregate CSV, and a
    metadata file with timings.  Capability and validity errors are
    recorded per experiment without aborting the suite.
    """
    path = Path(path)
    with open(path) as fh:
        suite = json.load(fh)
    suite_seed = suite.get("seed", 0)
    outdir = Path(output_dir or suite.get("output_dir", "suite-out"))
    outdir.mkdir(parents=True, exist_ok=True)
    entries = suite.get("experiments", [])
    names = [e["name"] for e in entries]
    if len(set(names)) != len(names):
        raise ValueError("experiment names must be unique")
    rows = []
    timings = {}
    all_ok = True
    for entry in entries:
        name = entry["name"]
        start = time.perf_counter()
        try:
            body = _load_body(entry["body"], path.parent)
            spec = _spec_from_entry(entry, suite_seed, workers)
            report = verify(body, spec)
            payload = report.to_payload()
            ok = report.passed
            row = {"experiment": name, "theorem": report.theorem,
                   "lhs": ";".join(repr(v) for v in report.lhs),
                   "rhs": ";".join(repr(v) for v in report.rhs),
                   "z_max": repr(report.z_max), "pass": str(ok).lower()}
        except (CapabilityError, OriginOnBoundaryError, ValueError) as exc:
            payload = {"schema": REPORT_SCHEMA, "experiment": name,
                       "error": f"{type(exc).__name__}: {exc}"}
            ok = False
            row = {"experiment": name, "theorem": entry.get("theorem", ""),
                   "lhs": "", "rhs": "", "z_max": "",
                   "pass": "error"}
        timings[name] = time.perf_counter() - start
        all_ok &= ok
        with open(outdir / f"{name}.json", "w") as fh:
            json.dump(payload, fh, sort_keys=True, indent=2)
            fh.write("\n")
        rows.append(row)
    with open(outdir / "summary.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=["experiment", "theorem",
                                                "lhs", "rhs", "z_max", "pass"])
        writer.writeheader()
        writer.writerows(rows)
    with open(outdir / "metadata.json", "w") as fh:
        json.dump({"timings_s": timings, "total_s": sum(timings.values())},
                  fh, sort_keys=True, indent=2)
    return (0 if all_ok else 1), rows


# -- constant tables ----------------------------------------------------------


def dump_constants(sigma_max: int = 10, d_max: int = 6, s_max: int = 4,
                   f_points=(0.0, 0.3, 0.7, 0.95)) -> list[dict]:
    """Rows for the regression table of every constant family: sphere
    areas, Grassmannian masses, affine constants, the chi coefficients
    (with their three-representation agreement), the Legendre moments
    (with their quadrature check), and the hypergeometric weight (with
    its defining-integral check)."""
    rows = []

    def add(table, params, value, check=""):
        rows.append({"table": table,
                     "params": ";".join(str(p) for p in params),
                     "value": repr(float(value)), "check": check})

    for k in range(1, sigma_max + 1):
        add("sigma", [k], specfun.sphere_area(k))
    for d in range(1, d_max + 1):
        for j in range(0, d + 1):
            add("c", [d, j], specfun.grassmann_total(d, j))
    for d in range(2, d_max + 1):
        for j in range(1, d):
            for k in range(0, j):
                add("C", [d, j, k], specfun.c_affine(d, j, k))
    for d in range(2, d_max + 1):
        for j in range(1, d):
            for k in range(0, j):
                for s in range(0, s_max + 1):
                    for p in range(0, s // 2 + 1):
                        c1, c2, c3 = specfun.chi_constant_forms(d, j, k, s, p)
                        spread = max(abs(c1 - c2), abs(c1 - c3))
                        add("chi", [d, j, k, s, p], c1, repr(float(spread)))
    for d in range(3, min(d_max, 5) + 1):
        for j in range(1, d):
            for s in range(0, s_max + 1):
                val = specfun.a_constant(s, j, d)
                ref = specfun.a_constant_quadrature(s, j, d)
                add("a", [s, j, d], val, repr(float(abs(val - ref))))
    for d in range(3, d_max + 1):
        for j in range(2, d):
            for m in f_points:
                val = specfun.f_integral(d, j, 2, 0, 1, m)
                ref = specfun.f_integral_quadrature(d, j, 2, 0, 1, m)
                add("F", [d, j, 2, 0, 1, m], val, repr(float(abs(val - ref))))
    return rows


def _write_constants_csv(rows, stream):
    writer = csv.DictWriter(stream, fieldnames=["table", "params", "value",
                                                "check"])
    writer.writeheader()
    writer.writerows(rows)


# -- CLI ----------------------------------------------------------------------


@click.group()
def main():
    """Crofton formulas for Minkowski tensors: closed forms and their
    Monte Carlo verification."""


@main.command("constants")
@click.option("--sigma-max", default=10, show_default=True)
@click.option("--d-max", default=6, show_default=True)
@click.option("--s-max", default=4, show_default=True)
@click.option("--out", type=click.Path(), default=None,
              help="CSV output path (default: stdout)")
def constants_cmd(sigma_max, d_max, s_max, out):
    """Dump the constant tables as CSV."""
    rows = dump_constants(sigma_max, d_max, s_max)
    if out:
        with open(out, "w", newline="") as fh:
            _write_constants_csv(rows, fh)
    else:
        buf = io.StringIO()
        _write_constants_csv(rows, buf)
        click.echo(buf.getvalue(), nl=False)


def _body_option(fn):
    return click.option("--body", "body_path", required=True,
                        type=click.Path(exists=True),
                        help="JSON body specification file")(fn)


@main.command("tensor")
@_body_option
@click.option("--k", required=True, type=int)
@click.option("--r", default=0, type=int)
@click.option("--s", default=0, type=int)
@click.option("--order", default=64, type=int)
def tensor_cmd(body_path, k, r, s, order):
    """Minkowski tensor of a body, with an order-doubling error estimate."""
    with open(body_path) as fh:
        body = body_from_dict(json.load(fh))
    fine = phi(body, k, r, s, order)
    coarse = phi(body, k, r, s, max(4, order // 2))
    err = float(np.max(np.abs(fine.coeffs - coarse.coeffs)))
    click.echo(json.dumps({"tensor": json.loads(fine.to_json()),
                           "error_estimate": err}, sort_keys=True))


THEOREM_CHOICES = ["rot-general", "rot-surface", "rot-lines", "rot-hyper",
                   "aff-general", "aff-psi", "aff-minkowski", "aff-harmonic"]


@main.command("rhs")
@_body_option
@click.option("--theorem", required=True, type=click.Choice(THEOREM_CHOICES))
@click.option("--j", required=True, type=int)
@click.option("--k", default=None, type=int)
@click.option("--r", default=0, type=int)
@click.option("--s", default=0, type=int)
@click.option("--psi", default="one", type=click.Choice(sorted(rhs_mod.PSI_REGISTRY)))
@click.option("--order", default=64, type=int)
@click.option("--seed", default=0, type=int)
def rhs_cmd(body_path, theorem, j, k, r, s, psi, order, seed):
    """Closed-form right-hand side of one formula."""
    with open(body_path) as fh:
        body = body_from_dict(json.load(fh))
    kk = k if k is not None else j - 1
    psi_fn = rhs_mod.PSI_REGISTRY[psi]
    tensor_routes = {
        "rot-surface": lambda o: rhs_mod.rot_rhs_surface(body, j, r, s, o),
        "rot-lines": lambda o: rhs_mod.rot_rhs_lines(body, r, s, o),
        "rot-hyper": lambda o: rhs_mod.rot_rhs_hyperplanes(
            body, kk if k is not None else 0, r, s, o),
        "aff-minkowski": lambda o: rhs_mod.aff_rhs_minkowski(body, j, kk,
                                                             r, s, o),
        "aff-harmonic": lambda o: rhs_mod.aff_rhs_harmonic(body, j, r, s, o),
    }
    if theorem in tensor_routes:
        out = tensor_routes[theorem](order)
        coarse = tensor_routes[theorem](max(4, order // 2))
        error_estimate = float(np.max(np.abs(out.coeffs - coarse.coeffs)))
    elif theorem == "aff-psi":
        out = rhs_mod.aff_rhs_psi_xn(body, psi_fn, j, kk, order=order // 2)
        coarse = rhs_mod.aff_rhs_psi_xn(body, psi_fn, j, kk, order=order // 4)
        error_estimate = abs(out - coarse)
    elif theorem == "rot-general":
        out, error_estimate = rhs_mod.rot_rhs_general(body, psi_fn, j, kk,
                                                      seed=seed)
    else:
        out, error_estimate = rhs_mod.aff_rhs_general(body, psi_fn, j, kk,
                                                      seed=seed)
    if isinstance(out, SymTensor):
        payload = {"tensor": json.loads(out.to_json()),
                   "error_estimate": error_estimate}
    else:
        payload = {"value": float(out), "error_estimate": error_estimate}
    click.echo(json.dumps(payload, sort_keys=True))


def _verify_command(name, theorems):
    @main.command(name)
    @_body_option
    @click.option("--theorem", required=True, type=click.Choice(theorems))
    @click.option("--j", required=True, type=int)
    @click.option("--k", default=None, type=int)
    @click.option("--r", default=0, type=int)
    @click.option("--s", default=0, type=int)
    @click.option("--psi", default=None,
                  type=click.Choice(sorted(rhs_mod.PSI_REGISTRY)))
    @click.option("--n-samples", default=20_000, type=int)
    @click.option("--seed", default=0, type=int)
    @click.option("--cubature-order", default=64, type=int)
    @click.option("--ci-mult", default=3.0, type=float)
    @click.option("--atol", default=1e-4, type=float)
    @click.option("--rel-tol", default=None, type=float)
    @click.option("--out", type=click.Path(), default=None,
                  help="report JSON path (default: stdout)")
    @click.option("--samples-csv", type=click.Path(), default=None,
                  help="also dump the weighted per-sample values")
    def cmd(body_path, theorem, j, k, r, s, psi, n_samples, seed,
            cubature_order, ci_mult, atol, rel_tol, out, samples_csv):
        with open(body_path) as fh:
            body = body_from_dict(json.load(fh))
        spec = ExperimentSpec(name=f"cli-{theorem}", theorem=theorem, j=j,
                              k=k, r=r, s=s, psi=psi, n_samples=n_samples,
                              seed=seed, cubature_order=cubature_order,
                              ci_mult=ci_mult, atol=atol, rel_tol=rel_tol)
        report = verify(body, spec)
        text = json.dumps(report.to_payload(), sort_keys=True, indent=2)
        if out:
            Path(out).write_text(text + "\n")
        else:
            click.echo(text)
        if samples_csv:
            from .montecarlo import _rhs_for, per_sample_values
            func = _rhs_for(body, spec)[0]
            mode = "rot" if theorem.startswith("rot") else "aff"
            values = per_sample_values(mode, body, j, func,
                                       spec.config(func.rank()))
            with open(samples_csv, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["sample"] + report.coeff_labels)
                for i, row in enumerate(values):
                    writer.writerow([i] + [repr(float(v)) for v in row])
        sys.exit(0 if report.passed else 1)

    cmd.__name__ = name.replace("-", "_")
    return cmd


_verify_command("verify-rotational",
                ["rot-general", "rot-surface", "rot-lines", "rot-hyper"])
_verify_command("verify-affine",
                ["aff-general", "aff-psi", "aff-minkowski", "aff-harmonic"])


@main.command("suite")
@click.argument("path", type=click.Path(exists=True))
@click.option("--output-dir", type=click.Path(), default=None)
@click.option("--workers", type=int, default=None,
              help="parallel workers (default: CROFTON_WORKERS or 1)")
def suite_cmd(path, output_dir, workers):
    """Run an experiment suite; nonzero exit iff any experiment fails."""
    status, rows = run_suite(path, output_dir, workers)
    for row in rows:
        click.echo(f"{row['experiment']}: pass={row['pass']}"
                   + (f" z_max={row['z_max']}" if row["z_max"] else ""))
    sys.exit(status)


if __name__ == "__main__":
    main()

"""Batch front-end: metric reports, scans, optimizations and poling synthesis.

Every command reads one JSON run spec (``--config``), writes its artifacts
into ``--out`` and exits with 0 on success, 2 on configuration errors and 3
on numerical failures.  Reruns with an identical spec produce byte-identical
delimited artifacts.
"""

from __future__ import annotations

import hashlib
import json
import os
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from .metrics import MetricsReport, compute_metrics
from .optics import OpticalConfig, config_from_dict, waist_from_xi
from .optimize import ScanTable, optimize_crystal, optimize_pump, scan
from .poling import DomainPlan, PolingTarget, cosine_target, synthesize, verify_plan
from .profiles import (CosineSeries, DomainSequence, phase_matching_curve,
                       curve_to_csv, profile_from_dict, profile_to_dict)
from .pump import PumpSpec, gaussian_pump, pump_from_dict
from .state import SubspaceBounds


class ConfigError(Exception):
    pass


def _load_spec(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read run spec {path}: {exc}") from exc


def _spec_hash(spec: dict) -> str:
    return hashlib.sha256(
        json.dumps(spec, sort_keys=True).encode()).hexdigest()[:16]


def _build_optics(spec: dict) -> OpticalConfig:
    try:
        return config_from_dict(spec["optics"])
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"invalid optics block: {exc}") from exc


def _build_profile(spec: dict):
    try:
        return profile_from_dict(spec["profile"])
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"invalid profile block: {exc}") from exc


def _build_pump(spec: dict, cfg: OpticalConfig) -> PumpSpec:
    try:
        block = spec.get("pump", {"xi_p": 1.42})
        if "modes" in block or ("waist_um" in block and "xi_p" not in block):
            return pump_from_dict(block)
        return gaussian_pump(waist_from_xi(cfg, float(block["xi_p"]), cfg.k_p))
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"invalid pump block: {exc}") from exc


def _write(out_dir: Path, name: str, text: str) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    path.write_text(text)
    return path


def _stamp(payload: dict, spec: dict) -> dict:
    payload["config_hash"] = _spec_hash(spec)
    payload["library_version"] = __version__
    return payload


def _run(fn):
    """Shared command wrapper implementing the exit-code contract."""
    try:
        fn()
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)
    except (ValueError, FloatingPointError, np.linalg.LinAlgError) as exc:
        click.echo(f"numerical error: {exc}", err=True)
        sys.exit(3)
    sys.exit(0)


def _common_options(fn):
    fn = click.option("--config", "config_path", required=True,
                      type=click.Path(), help="JSON run spec")(fn)
    fn = click.option("--out", "out_dir", default="out", show_default=True,
                      type=click.Path(), help="output directory")(fn)
    fn = click.option("--seed", default=0, show_default=True, type=int)(fn)
    fn = click.option("--threads", default=0, show_default=True, type=int,
                      help="cap worker threads (0 = library default)")(fn)
    fn = click.option("--tolerance", default=None, type=float,
                      help="relative tolerance override")(fn)
    return fn


def _apply_threads(threads: int) -> None:
    if threads > 0:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                    "MKL_NUM_THREADS"):
            os.environ[var] = str(threads)


@click.group()
def main():
    """Spatial biphoton engineering toolbox."""


@main.command("metrics")
@_common_options
def cmd_metrics(config_path, out_dir, seed, threads, tolerance):
    """Full metrics report for one or more (pump, crystal) configurations."""

    def run():
        _apply_threads(threads)
        spec = _load_spec(config_path)
        out = Path(out_dir)
        rows = spec.get("rows")
        if rows is None:
            rows = [{k: spec[k] for k in ("optics", "profile", "pump",
                                          "collection", "metrics")
                     if k in spec}]
        reports = []
        for row in rows:
            merged = {**spec, **row}
            cfg = _build_optics(merged)
            profile = _build_profile(merged)
            pump = _build_pump(merged, cfg)
            coll = merged.get("collection", {})
            opts = merged.get("metrics", {})
            rep = compute_metrics(
                cfg, pump, profile,
                xi_s=float(coll.get("xi_s", 1.43)),
                xi_i=coll.get("xi_i"),
                min_captured=float(opts.get("min_captured", 0.999)),
                seed=seed)
            reports.append((row.get("label", f"row{len(reports)}"), rep))
        payload = _stamp({"reports": {label: json.loads(r.to_json())
                                      for label, r in reports}}, spec)
        _write(out, "metrics.json", json.dumps(payload, sort_keys=True, indent=2))
        lines = [f"{'label':<12} {'purity':>8} {'K':>7} {'R2':>8} "
                 f"{'heralding':>10}"]
        for label, r in reports:
            lines.append(f"{label:<12} {r.purity:8.4f} {r.schmidt_number:7.3f} "
                         f"{r.r2_smf:8.4f} {r.heralding:10.4f}")
        _write(out, "metrics.txt", "\n".join(lines) + "\n")
        click.echo("\n".join(lines))

    _run(run)


@main.command("scan")
@_common_options
def cmd_scan(config_path, out_dir, seed, threads, tolerance):
    """Metric values over a parameter grid."""

    def run():
        _apply_threads(threads)
        spec = _load_spec(config_path)
        out = Path(out_dir)
        cfg = _build_optics(spec)
        profile = _build_profile(spec)
        block = spec.get("scan")
        if not isinstance(block, dict) or "axes" not in block:
            raise ConfigError("missing scan block with axes")
        table = scan(cfg, profile, block["axes"],
                     metric=block.get("metric", "purity"), seed=seed)
        path = _write(out, "scan.csv", table.to_csv())
        from .report import render_scan
        render_scan(table, out / "scan.png", title=table.metric)
        meta = _stamp({"argmax": table.argmax(), "metric": table.metric}, spec)
        _write(out, "scan.json", json.dumps(meta, sort_keys=True, indent=2))
        click.echo(f"wrote {path}; argmax {table.argmax()}")

    _run(run)


@main.command("optimize-crystal")
@_common_options
def cmd_optimize_crystal(config_path, out_dir, seed, threads, tolerance):
    """Alternating crystal-coefficient / focusing optimization."""

    def run():
        _apply_threads(threads)
        spec = _load_spec(config_path)
        out = Path(out_dir)
        cfg = _build_optics(spec)
        block = spec.get("optimize_crystal", {})
        res = optimize_crystal(
            cfg, int(block.get("N", 7)), float(block.get("xi0", 1.42)),
            outer_tol=float(block.get("outer_tol",
                                      tolerance if tolerance else 5e-3)),
            seed=seed)
        payload = _stamp({
            "coefficients": list(res.coefficients),
            "xi_star": res.xi_star,
            "purity": res.purity,
            "purity_stderr": res.purity_stderr,
            "purity_trace": res.purity_trace,
            "converged": res.converged,
            "outer_iterations": res.outer_iterations,
        }, spec)
        _write(out, "crystal_opt.json",
               json.dumps(payload, sort_keys=True, indent=2))
        prof = CosineSeries(coeffs=res.coefficients, sigma_um=cfg.L_um / 4)
        grid = np.linspace(-40 / cfg.L_um, 40 / cfg.L_um, 801)
        curve = phase_matching_curve(prof, grid, cfg.L_um, normalize=True)
        _write(out, "crystal_opt_curve.csv", curve_to_csv(curve))
        from .report import render_curve
        render_curve(curve, out / "crystal_opt_curve.png",
                     title=f"optimized response, xi*={res.xi_star:.3f}")
        click.echo(f"xi*={res.xi_star:.4f} purity={res.purity:.5f} "
                   f"converged={res.converged}")

    _run(run)


@main.command("optimize-pump")
@_common_options
def cmd_optimize_pump(config_path, out_dir, seed, threads, tolerance):
    """Pump LG-coefficient optimization on a fixed crystal."""

    def run():
        _apply_threads(threads)
        spec = _load_spec(config_path)
        out = Path(out_dir)
        cfg = _build_optics(spec)
        profile = _build_profile(spec)
        block = spec.get("optimize_pump", {})
        b = block.get("bounds", {"max_radial": 3, "max_oam": 3})
        res = optimize_pump(
            cfg, profile,
            xi_p=float(block.get("xi_p", 3.67)),
            bounds=SubspaceBounds(int(b["max_radial"]), int(b["max_oam"])),
            pmax=int(block.get("pmax", 2)), lmax=int(block.get("lmax", 3)),
            xi_s=float(block.get("xi_s", 1.43)),
            collection_scan=block.get("collection_scan"),
            seed=seed)
        payload = _stamp({
            "modes": [list(m) for m in res.modes],
            "coefficients": [[a.real, a.imag] for a in res.coefficients],
            "purity": res.purity,
            "r2_smf": res.r2_smf,
            "heralding": res.heralding,
            "captured_norm": res.captured_norm,
            "xi_collection": res.xi_collection,
        }, spec)
        _write(out, "pump_opt.json",
               json.dumps(payload, sort_keys=True, indent=2))
        click.echo(f"purity={res.purity:.5f} R2={res.r2_smf:.4f} "
                   f"heralding={res.heralding:.4f}")

    _run(run)


def _build_target(spec: dict) -> tuple[PolingTarget, int, float]:
    block = spec.get("pole")
    if not isinstance(block, dict):
        raise ConfigError("missing pole block")
    try:
        M = int(block["M"])
        l_c = float(block["l_c_um"])
        L = M * l_c
        coeffs = block.get("target_coeffs")
        if coeffs is None:
            coeffs = spec["profile"]["coeffs"]
        target = cosine_target(
            coeffs, L, l_c,
            band_half_width=block.get("band_half_width"),
            n_grid=int(block.get("n_grid", 601)))
        return target, M, l_c
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"invalid pole block: {exc}") from exc


@main.command("pole")
@_common_options
def cmd_pole(config_path, out_dir, seed, threads, tolerance):
    """Synthesize a +/-1 domain plan for a target response."""

    def run():
        _apply_threads(threads)
        spec = _load_spec(config_path)
        out = Path(out_dir)
        target, M, l_c = _build_target(spec)
        n_steps = int(spec.get("pole", {}).get("n_steps", 0)) or None
        kwargs = {"n_steps": n_steps} if n_steps else {}
        plan = synthesize(target, M, l_c, seeds=(seed, seed + 1, seed + 2),
                          **kwargs)
        _write(out, "plan.csv", plan.to_csv())
        _write(out, "plan.json", plan.to_json())
        report = verify_plan(plan, target)
        from .profiles import PhaseMatchCurve
        from .report import render_curve
        rec = PhaseMatchCurve(report["detuning"], report["reconstruction"])
        ref = PhaseMatchCurve(target.detuning, target.amplitude)
        render_curve(rec, out / "plan_curve.png",
                     title=f"fidelity {plan.fidelity:.4f}", reference=ref)
        click.echo(f"fidelity={plan.fidelity:.5f} domains={plan.M}")

    _run(run)


@main.command("verify-plan")
@_common_options
def cmd_verify_plan(config_path, out_dir, seed, threads, tolerance):
    """Re-verify a stored domain plan against its target."""

    def run():
        _apply_threads(threads)
        spec = _load_spec(config_path)
        out = Path(out_dir)
        target, M, l_c = _build_target(spec)
        block = spec.get("verify_plan", {})
        plan_path = block.get("plan_path")
        if not plan_path:
            raise ConfigError("verify_plan.plan_path is required")
        try:
            plan = DomainPlan.from_json(Path(plan_path).read_text())
        except (OSError, KeyError, ValueError) as exc:
            raise ConfigError(f"cannot load plan: {exc}") from exc
        report = verify_plan(plan, target)
        payload = _stamp({
            "fidelity": report["fidelity"],
            "complex_fidelity": report["complex_fidelity"],
            "max_deviation": report["max_deviation"],
        }, spec)
        _write(out, "verify.json", json.dumps(payload, sort_keys=True, indent=2))
        click.echo(f"fidelity={report['fidelity']:.5f}")

    _run(run)


if __name__ == "__main__":
    main()

"""CSV/JSON serialisation of run outputs and the merged text report."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

SCAN_CSV = "scan.csv"
SCAN_JSON = "scan_summary.json"
DEFECT_CSV = "defect.csv"
DEFECT_JSON = "defect_summary.json"
IDENTITIES_JSON = "identities.json"
REPORT_TXT = "report.txt"


def fmt(x: float) -> str:
    """17 significant digits, scientific, locale independent."""
    return f"{float(x):.16e}"


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else None
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def dumps(payload) -> str:
    return json.dumps(_clean(payload), sort_keys=True, indent=2) + "\n"


def write_json(path: Path, payload) -> None:
    Path(path).write_text(dumps(payload), encoding="utf-8")


def write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])


def _angles(d):
    theta = math.acos(max(-1.0, min(1.0, float(d[2]))))
    phi = math.atan2(float(d[1]), float(d[0])) % (2 * math.pi)
    return theta, phi


def write_scan(out: Path, result, meta: dict) -> None:
    rows = []
    for k, m, mn, d in zip(result.k_grid, result.m_values, result.min_values, result.argmin_directions):
        th, ph = _angles(d)
        rows.append([float(k), float(m), th, ph, float(mn)])
    write_csv(out / SCAN_CSV, ["k", "m", "argmin_theta", "argmin_phi", "m_min"], rows)
    write_json(out / SCAN_JSON, {
        "kind": "scan",
        "zero_candidates": [
            {"k": float(k), "m": float(r), "m_relative": float(r) / result.normalization, "grid_resolved": True}
            for k, r in zip(result.zero_candidates.roots, result.zero_candidates.residuals)
        ],
        "normalization": result.normalization,
        "floor_relative": result.floor,
        "threshold_relative": result.threshold,
        "statistic": "max over directions of |chi(k alpha)|",
        "grid": {"degree": result.grid_degree, "n_directions": result.n_directions},
        "k_range": {"k_min": float(result.k_grid[0]), "k_max": float(result.k_grid[-1]),
                    "n": len(result.k_grid)},
        "config": meta,
    })


def write_defect(out: Path, sweep, meta: dict) -> None:
    rows = [[r.k, r.defect, r.value_misfit, r.normal_misfit] for r in sweep.results]
    write_csv(out / DEFECT_CSV, ["k", "defect", "value_misfit", "normal_misfit"], rows)
    write_json(out / DEFECT_JSON, {
        "kind": "defect",
        "minima": [
            {"k": r.k, "defect": r.defect, "value_misfit": r.value_misfit, "normal_misfit": r.normal_misfit,
             "boundary_constant": r.boundary_constant}
            for r in sweep.minima
        ],
        "min_defect": float(min(r.defect for r in [*sweep.results, *sweep.minima])),
        "basis": {"L": sweep.results[0].L, "n_coefficients": (sweep.results[0].L + 1) ** 2,
                  "n_samples": sweep.results[0].n_samples, "family": "j_l(k r) Y_lm about shape center"},
        "k_range": {"k_min": float(sweep.k_grid[0]), "k_max": float(sweep.k_grid[-1]), "n": len(sweep.k_grid)},
        "config": meta,
    })


def write_identities(out: Path, reports, meta: dict) -> None:
    write_json(out / IDENTITIES_JSON, {
        "kind": "identities",
        "checks": [r.to_dict() for r in reports],
        "all_passed": all(r.status != "fail" for r in reports),
        "config": meta,
    })


def render_table(reports) -> str:
    width = max(len(r.name) for r in reports)
    lines = [f"{'check'.ljust(width)}  status   discrepancy  tolerance"]
    for r in reports:
        disc = "-" if r.status == "skipped" else f"{r.rel_discrepancy:.2e}"
        tol = "-" if r.status == "skipped" else f"{r.tolerance:.0e}"
        lines.append(f"{r.name.ljust(width)}  {r.status:<7}  {disc:>11}  {tol:>9}")
    return "\n".join(lines)


# --------------------------------------------------------------------------
# merged report


def _load(path: Path):
    if not path.exists():
        return None
    return json.loads(path.read_text(encoding="utf-8"))


def build_report(out: Path) -> str | None:
    """Text summary with one section per formulation; None if nothing is present."""
    scan = _load(out / SCAN_JSON)
    defect = _load(out / DEFECT_JSON)
    ident = _load(out / IDENTITIES_JSON)
    if scan is None and defect is None and ident is None:
        return None
    checks = {c["name"]: c for c in ident["checks"]} if ident else {}

    def status(name):
        c = checks.get(name)
        return "missing" if c is None else c["status"]

    lines = ["Pompeiu laboratory report", "=" * 25, ""]

    lines.append("Formulation 1 (vanishing moving averages)")
    if ident is None:
        lines.append("  [missing] identities.json not found")
    else:
        lines.append(f"  plane-wave moving average at zero-sphere k: {status('moving_average_witness')}")
        lines.append(f"  Fourier identity u~(k^2 - |xi|^2) = chi~:    {status('fourier_identity_witness')}")
    lines.append("")

    lines.append("Formulation 2 (zero sphere of the indicator transform)")
    scan_ks = []
    if scan is None:
        lines.append("  [missing] scan_summary.json not found")
    else:
        scan_ks = [c["k"] for c in scan["zero_candidates"]]
        if scan_ks:
            lines.append("  grid-resolved candidates: " + ", ".join(f"{k:.6f}" for k in scan_ks))
        else:
            lines.append(f"  no candidates; floor min m/|D| = {scan['floor_relative']:.3e}")
        lines.append(f"  zero-sphere witness chi(k* alpha) = 0: {status('zero_sphere_witness')}")
    lines.append("")

    lines.append("Formulation 3 (over-determined problem with source)")
    if ident is None:
        lines.append("  [missing] identities.json not found")
    else:
        for name in ("overdetermined_pde_residual", "overdetermined_boundary_traces"):
            lines.append(f"  {name}: {status(name)}")
    lines.append("")

    lines.append("Formulation 4 (over-determined homogeneous problem)")
    defect_ks = []
    if defect is None:
        lines.append("  [missing] defect_summary.json not found")
    else:
        defect_ks = [m["k"] for m in defect["minima"] if m["defect"] < 1e-6]
        lines.append(f"  basis L = {defect['basis']['L']}, min defect = {defect['min_defect']:.3e}")
        for m in defect["minima"]:
            lines.append(f"  local minimum k = {m['k']:.6f}, defect = {m['defect']:.3e}")
    if ident is not None:
        lines.append(f"  companion constant -k^-2: {status('companion_boundary_constant')}")
    lines.append("")

    lines.append("Consistency")
    verified = ident is not None and ident["all_passed"] and status("zero_sphere_witness") == "pass"
    common = [k for k in scan_ks if any(abs(k - d) < 1e-4 for d in defect_ks)]
    if common and verified:
        lines.append("  Formulations 2/3/4 witnesses consistent at k ≈ " + ", ".join(f"{k:.4f}" for k in common))
    elif scan is None or defect is None or ident is None:
        lines.append("  incomplete inputs: consistency not assessed")
    else:
        lines.append("  no common zero-sphere / defect wave number with a passing identity suite")
    if ident is not None:
        lines.append("")
        lines.append("Identity suite")
        n_fail = sum(c["status"] == "fail" for c in ident["checks"])
        n_skip = sum(c["status"] == "skipped" for c in ident["checks"])
        lines.append(f"  {len(ident['checks'])} checks, {n_fail} failed, {n_skip} skipped")
    return "\n".join(lines) + "\n"

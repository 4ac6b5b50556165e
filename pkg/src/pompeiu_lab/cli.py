"""Command-line front end: ``pompeiu-lab {scan,defect,verify,report}``.

Exit codes: 0 success, 1 identity-suite failure, 2 configuration or input error.
"""

from __future__ import annotations

import argparse
import configparser
import logging
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import reporting
from .geometry import Ball, Ellipsoid, MeshError, MeshFormatError, StarShape, load_mesh
from .helmholtz import defect_sweep
from .indicator_fourier import DEFAULT_GRID_DEGREE, pompeiu_scan
from .numerics import sphere_grid
from .suite import TIERS, run_suite

log = logging.getLogger("pompeiu_lab")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

COMMAND_K_DEFAULTS = {
    "scan": (0.5, 10.0, 0.01),
    "defect": (3.0, 8.0, 0.05),
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    shape: str = "ball"
    radius: float = 1.0
    semi_axes: tuple = (1.0, 1.0, 1.3)
    star_coeffs: list = field(default_factory=list)
    mesh: str | None = None
    center: tuple = (0.0, 0.0, 0.0)
    k_min: float | None = None
    k_max: float | None = None
    k_step: float | None = None
    grid_degree: int = DEFAULT_GRID_DEGREE
    basis_L: int = 8
    resolution: int | None = None
    tier: str = "parametric"
    seed: int = 0
    out: str = "out"

    def validate(self, command: str) -> None:
        lo, hi, st = COMMAND_K_DEFAULTS.get(command, (None, None, None))
        self.k_min = lo if self.k_min is None else self.k_min
        self.k_max = hi if self.k_max is None else self.k_max
        self.k_step = st if self.k_step is None else self.k_step
        if command in COMMAND_K_DEFAULTS:
            if not 0 < self.k_min < self.k_max:
                raise ConfigError(f"need 0 < k_min < k_max, got k_min={self.k_min}, k_max={self.k_max}")
            if not self.k_step > 0:
                raise ConfigError("k_step must be positive")
        if self.tier not in TIERS:
            raise ConfigError(f"unknown tier {self.tier!r}")
        if self.grid_degree < 0:
            raise ConfigError("grid degree must be non-negative")
        if self.basis_L < 2:
            raise ConfigError("basis L must be >= 2")

    def build_shape(self):
        try:
            if self.shape == "ball":
                return Ball(self.radius, self.center)
            if self.shape == "ellipsoid":
                return Ellipsoid(self.semi_axes, self.center)
            if self.shape == "star":
                return StarShape(self.radius, {(l, m): e for l, m, e in self.star_coeffs}, self.center)
            if self.shape == "mesh":
                if not self.mesh:
                    raise ConfigError("--shape mesh needs --mesh PATH")
                return load_mesh(self.mesh)
        except (MeshError, MeshFormatError, OSError, ValueError) as exc:
            raise ConfigError(f"invalid shape: {exc}") from exc
        raise ConfigError(f"unknown shape kind {self.shape!r}")

    def metadata(self) -> dict:
        d = asdict(self)
        d.pop("out")
        return d


def _floats(text: str, n: int | None = None) -> tuple:
    try:
        vals = tuple(float(t) for t in str(text).split(","))
    except ValueError:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}") from None
    if n is not None and len(vals) != n:
        raise ConfigError(f"expected {n} numbers, got {text!r}")
    return vals


def _star(items) -> list:
    out = []
    for item in items:
        parts = str(item).split(",")
        if len(parts) != 3:
            raise ConfigError(f"star coefficient must be 'l,m,eps', got {item!r}")
        try:
            out.append((int(parts[0]), int(parts[1]), float(parts[2])))
        except ValueError:
            raise ConfigError(f"bad star coefficient {item!r}") from None
    return out


CONVERTERS = {
    "shape": str,
    "radius": float,
    "semi_axes": lambda v: _floats(v, 3),
    "star_coeffs": lambda v: _star(v.split() if isinstance(v, str) else v),
    "mesh": str,
    "center": lambda v: _floats(v, 3),
    "k_min": float,
    "k_max": float,
    "k_step": float,
    "grid_degree": int,
    "basis_L": int,
    "resolution": int,
    "tier": str,
    "seed": int,
    "out": str,
}


def load_config(path: str | None, overrides: dict) -> RunConfig:
    """INI file ([run] section, keys as the long flag names) overlaid by flags."""
    values: dict = {}
    if path:
        cp = configparser.ConfigParser()
        try:
            with open(path, encoding="utf-8") as fh:
                cp.read_file(fh)
        except (OSError, configparser.Error) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        section = cp["run"] if cp.has_section("run") else cp.defaults()
        for key, raw in section.items():
            key = key.replace("-", "_")
            if key == "basis_l":
                key = "basis_L"
            if key not in CONVERTERS:
                raise ConfigError(f"unknown config key {key!r}")
            values[key] = raw
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        typed = {k: CONVERTERS[k](v) for k, v in values.items()}
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    return RunConfig(**typed)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--shape", choices=["ball", "ellipsoid", "star", "mesh"])
    common.add_argument("--radius", type=str, help="ball radius, or r0 for star shapes")
    common.add_argument("--semi-axes", dest="semi_axes", metavar="A,B,C")
    common.add_argument("--star-coeffs", dest="star_coeffs", nargs="+", metavar="L,M,EPS")
    common.add_argument("--mesh", metavar="PATH")
    common.add_argument("--center", metavar="X,Y,Z")
    common.add_argument("--k-min", dest="k_min")
    common.add_argument("--k-max", dest="k_max")
    common.add_argument("--k-step", dest="k_step")
    common.add_argument("--grid-degree", dest="grid_degree")
    common.add_argument("--basis-L", dest="basis_L")
    common.add_argument("--resolution", help="surface/volume sampling degree")
    common.add_argument("--tier", choices=sorted(TIERS))
    common.add_argument("--seed")
    common.add_argument("--out", metavar="DIR")
    common.add_argument("--config", metavar="PATH")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="pompeiu-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("scan", parents=[common], help="zero-sphere scan of the indicator transform")
    sub.add_parser("defect", parents=[common], help="over-determined defect sweep")
    sub.add_parser("verify", parents=[common], help="run the identity suite")
    rep = sub.add_parser("report", help="merge outputs of earlier runs")
    rep.add_argument("paths", nargs="+", help="output directories")
    return parser


OVERRIDE_KEYS = list(CONVERTERS)


def cmd_scan(cfg: RunConfig) -> int:
    shape = cfg.build_shape()
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    result = pompeiu_scan(shape, cfg.k_min, cfg.k_max, cfg.k_step, grid=sphere_grid(cfg.grid_degree),
                          resolution=cfg.resolution)
    reporting.write_scan(out, result, cfg.metadata())
    ks = ", ".join(f"{k:.9f}" for k in result.zero_candidates.roots) or "none"
    print(f"zero-sphere candidates: {ks}  (floor m/|D| = {result.floor:.3e})")
    return EXIT_OK


def cmd_defect(cfg: RunConfig) -> int:
    shape = cfg.build_shape()
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    sweep = defect_sweep(shape, cfg.k_min, cfg.k_max, cfg.k_step, cfg.basis_L, resolution=cfg.resolution)
    reporting.write_defect(out, sweep, cfg.metadata())
    for m in sweep.minima:
        print(f"local minimum k = {m.k:.9f}  defect = {m.defect:.3e}")
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    shape = cfg.build_shape()
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    reports = run_suite(shape, cfg.tier, cfg.seed, cfg.resolution)
    reporting.write_identities(out, reports, cfg.metadata())
    print(reporting.render_table(reports))
    return EXIT_OK if all(r.status != "fail" for r in reports) else EXIT_FAIL


def cmd_report(paths) -> int:
    code = EXIT_OK
    for p in paths:
        d = Path(p)
        text = reporting.build_report(d) if d.is_dir() else None
        if text is None:
            print(f"error: no scan/defect/verify outputs in {p}", file=sys.stderr)
            code = EXIT_CONFIG
            continue
        (d / reporting.REPORT_TXT).write_text(text, encoding="utf-8")
        print(text, end="")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "report":
        return cmd_report(args.paths)
    overrides = {k: getattr(args, k, None) for k in OVERRIDE_KEYS}
    try:
        cfg = load_config(args.config, overrides)
        cfg.validate(args.command)
        return {"scan": cmd_scan, "defect": cmd_defect, "verify": cmd_verify}[args.command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

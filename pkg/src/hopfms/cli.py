"""Command-line front end.

Subcommands cover the catalog, knot validation, realization, the
verification census, separatrix tracing, invariant-knot extraction,
figure emission, and data export.  Outputs are deterministic for a given
config and seed: JSON is emitted with sorted keys and no timestamps, and
every file is written atomically (temp + rename).

Exit codes: 0 success, 64 configuration error, 65 construction failure,
66 verification failure.
"""

from __future__ import annotations

import argparse
import configparser
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from hopfms import analysis, knots, realization, svgplot
from hopfms.dynamics import PhiField
from hopfms.geometry import DomainError
from hopfms.knots import DegreeError, HopfKnotCurve
from hopfms.realization import RealizationError
from hopfms.tube import FrameError, RadiusError

EXIT_CONFIG = 64
EXIT_CONSTRUCT = 65
EXIT_VERIFY = 66

_PROFILES = {
    "default": {"clearance_tol": 0.01, "weld_tol": 1e-6, "heteroclinic_tol": 1e-4},
    "strict": {"clearance_tol": 0.02, "weld_tol": 1e-8, "heteroclinic_tol": 1e-5},
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    knot: str = "L0"
    out: Path = Path("out")
    seed: int = 0
    raw_field: bool = False
    cutoff_inner: float = 1.2
    cutoff_outer: float = 1.8
    resolution: int | None = None
    integrator_step: float = 1e-3
    tolerance_profile: str = "default"

    def __post_init__(self):
        self.out = Path(self.out)
        if self.tolerance_profile not in _PROFILES:
            raise ConfigError(f"unknown tolerance profile {self.tolerance_profile!r}")
        for name in ("cutoff_inner", "cutoff_outer", "integrator_step"):
            if getattr(self, name) <= 0.0:
                raise ConfigError(f"{name} must be positive")
        if not (self.cutoff_inner < self.cutoff_outer < 2.0):
            raise ConfigError("need cutoff_inner < cutoff_outer < 2")
        if self.resolution is not None and self.resolution < 8:
            raise ConfigError("resolution must be at least 8")

    @property
    def tolerances(self) -> dict:
        return _PROFILES[self.tolerance_profile]

    def phi_field(self) -> PhiField:
        return PhiField(self.cutoff_inner, self.cutoff_outer, raw=self.raw_field)


def _load_config_file(path: str) -> dict:
    cp = configparser.ConfigParser()
    if not cp.read(path):
        raise ConfigError(f"cannot read config file {path!r}")
    vals: dict = {}
    get = {
        ("run", "knot"): str, ("run", "out"): str, ("run", "seed"): int,
        ("field", "cutoff_inner"): float, ("field", "cutoff_outer"): float,
        ("field", "raw"): None,
        ("resolution", "knot_samples"): int, ("resolution", "integrator_step"): float,
        ("tolerance", "profile"): str,
    }
    rename = {"knot_samples": "resolution", "raw": "raw_field", "profile": "tolerance_profile"}
    for (sec, key), cast in get.items():
        if cp.has_option(sec, key):
            try:
                v = cp.getboolean(sec, key) if cast is None else cast(cp.get(sec, key))
            except ValueError as exc:
                raise ConfigError(f"bad value for [{sec}] {key}: {exc}") from exc
            vals[rename.get(key, key)] = v
    return vals


def build_config(args: argparse.Namespace) -> RunConfig:
    vals: dict = {}
    if getattr(args, "config", None):
        vals.update(_load_config_file(args.config))
    for attr, key in [
        ("knot", "knot"), ("out", "out"), ("seed", "seed"),
        ("raw_field", "raw_field"), ("resolution", "resolution"),
        ("tolerance_profile", "tolerance_profile"),
    ]:
        v = getattr(args, attr, None)
        if v not in (None, False):
            vals[key] = v
    return RunConfig(**vals)


# ---------------------------------------------------------------------------
# I/O helpers
# ---------------------------------------------------------------------------

def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _write_json(path: Path, obj) -> None:
    _atomic_write(path, json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def _slug(name: str) -> str:
    return name.replace("^", "_pow_").replace("/", "_")


def _get_knot(cfg: RunConfig) -> HopfKnotCurve:
    sel = cfg.knot
    if sel.endswith(".json") or os.path.sep in sel:
        if not os.path.isfile(sel):
            raise ConfigError(f"knot file not found: {sel}")
        return knots.load_knot(sel)
    try:
        if cfg.resolution is not None and sel in knots._BUILDERS:
            return knots._BUILDERS[sel](cfg.resolution)
        return knots.load_catalog_knot(sel)
    except KeyError as exc:
        raise ConfigError(str(exc)) from exc


def _polyline_dict(name: str, points: np.ndarray, metadata: dict | None = None) -> dict:
    return {
        "name": name,
        "space": "R3",
        "samples": np.asarray(points, dtype=float).tolist(),
        "orientation": 1,
        "metadata": metadata or {},
    }


def _realize(cfg: RunConfig, curve: HopfKnotCurve) -> realization.RealizedMap:
    return realization.realize(
        curve,
        phi_field=cfg.phi_field(),
        step=cfg.integrator_step,
        clearance_tol=cfg.tolerances["clearance_tol"],
    )


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_catalog(args) -> int:
    for name in knots.catalog_names():
        curve = knots.load_catalog_knot(name)
        print(f"{name:12s} resolution={curve.resolution:5d} degree={knots.s1_degree(curve):+d}")
    return 0


def cmd_validate(args) -> int:
    cfg = build_config(args)
    curve = _get_knot(cfg)
    report = {"knot": curve.name, "resolution": curve.resolution}
    ok = True
    try:
        report["degree"] = knots.s1_degree(curve)
        if abs(report["degree"]) != 1:
            ok = False
            report["degree_error"] = f"degree {report['degree']} is not a Hopf knot"
    except DegreeError as exc:
        ok = False
        report["degree_error"] = str(exc)
    emb = knots.validate_embedding(curve, cfg.tolerances["clearance_tol"])
    report["embedded"] = emb.ok
    report["min_clearance"] = emb.min_clearance
    if not emb.ok:
        ok = False
        report["offending_pair"] = list(emb.offending_pair)
    report["ok"] = ok
    path = cfg.out / f"validate_{_slug(curve.name)}.json"
    _write_json(path, report)
    _log(f"validate {curve.name}: {'ok' if ok else 'FAILED'} -> {path}")
    if not ok:
        for key in ("degree_error",):
            if key in report:
                _log(f"  {report[key]}")
        if not emb.ok:
            _log(f"  embeddedness clearance {emb.min_clearance:.3e} at {emb.offending_pair}")
    return 0 if ok else EXIT_VERIFY


def cmd_realize(args) -> int:
    cfg = build_config(args)
    curve = _get_knot(cfg)
    m = _realize(cfg, curve)
    slug = _slug(curve.name)
    report = m.report()
    report["seed"] = cfg.seed
    report["tolerance_profile"] = cfg.tolerance_profile
    _write_json(cfg.out / f"realize_{slug}.json", report)
    m.chart.save(cfg.out / f"chart_{slug}.json")
    _log(
        f"realize {curve.name}: r0={m.chart.r0:.6g} clearance={m.chart.clearance:.6g} "
        f"-> {cfg.out / f'realize_{slug}.json'}"
    )
    return 0


def cmd_census(args) -> int:
    cfg = build_config(args)
    curve = _get_knot(cfg)
    m = _realize(cfg, curve)
    summary = analysis.census(m, reference=curve)
    summary["seed"] = cfg.seed
    summary["raw_field"] = cfg.raw_field
    path = cfg.out / f"census_{_slug(curve.name)}.json"
    _write_json(path, summary)
    _log(f"census {curve.name} -> {path}")
    _log(f"  fixed points: {len(summary['fixed_points'])}, indices {summary['morse_indices']}")
    for check, passed in summary["checks"].items():
        _log(f"  {check}: {'pass' if passed else 'FAIL'}")
    return 0 if summary["ok"] else EXIT_VERIFY


def cmd_separatrix(args) -> int:
    cfg = build_config(args)
    curve = _get_knot(cfg)
    m = _realize(cfg, curve)
    branches = [+1, -1] if args.branch == "both" else [+1 if args.branch == "+" else -1]
    for branch in branches:
        tr = analysis.trace_separatrix(m, branch)
        tag = "plus" if branch > 0 else "minus"
        path = cfg.out / f"separatrix_{_slug(curve.name)}_{tag}.json"
        _write_json(
            path,
            _polyline_dict(
                f"{curve.name}-separatrix-{tag}",
                tr.points,
                {"saddle": tr.saddle, "branch": branch, "markers": tr.markers},
            ),
        )
        _log(f"separatrix {tag}: {tr.points.shape[0]} points, {len(tr.markers)} iterates -> {path}")
    return 0


def cmd_invariant(args) -> int:
    cfg = build_config(args)
    curve = _get_knot(cfg)
    m = _realize(cfg, curve)
    slug = _slug(curve.name)
    summary = {"knot": curve.name, "tube_radius": m.chart.r0}
    ok = True
    results = {}
    for branch, tag in ((+1, "plus"), (-1, "minus")):
        res = analysis.extract_invariant_knot(
            m, branch, reference=curve, weld_tol=cfg.tolerances["weld_tol"]
        )
        results[tag] = res
        knots.save_knot(res.curve, cfg.out / f"invariant_{slug}_{tag}.json")
        summary[tag] = {
            "degree": res.degree,
            "hausdorff_to_reference": res.hausdorff_to_reference,
        }
        ok = ok and res.degree == 1
    summary["mutual_hausdorff"] = knots.hausdorff_distance(
        results["plus"].curve, results["minus"].curve
    )
    summary["ok"] = ok and summary["mutual_hausdorff"] < 2.0 * m.chart.r0
    _write_json(cfg.out / f"invariant_{slug}.json", summary)
    _log(
        f"invariant knots: degrees ({summary['plus']['degree']}, {summary['minus']['degree']}), "
        f"mutual Hausdorff {summary['mutual_hausdorff']:.4g} -> {cfg.out / f'invariant_{slug}.json'}"
    )
    return 0 if summary["ok"] else EXIT_VERIFY


def cmd_plot(args) -> int:
    cfg = build_config(args)
    dev_curves: list[HopfKnotCurve] = []
    polylines: list[np.ndarray] = []
    labels: list[str] = []
    for inp in args.inputs:
        with open(inp) as fh:
            d = json.load(fh)
        if d.get("space") == "R3":
            polylines.append(np.asarray(d["samples"], dtype=float))
            labels.append(d.get("name", Path(inp).stem))
        else:
            dev_curves.append(HopfKnotCurve.from_dict(d))
    if dev_curves:
        path = cfg.out / "development.svg"
        _atomic_write(path, svgplot.development_svg(dev_curves))
        _log(f"plot: {len(dev_curves)} orbit-space curves -> {path}")
    if polylines:
        path = cfg.out / "orthographic.svg"
        _atomic_write(path, svgplot.orthographic_svg(polylines, labels))
        _log(f"plot: {len(polylines)} polylines -> {path}")
    return 0


def cmd_export(args) -> int:
    cfg = build_config(args)
    curve = _get_knot(cfg)
    slug = _slug(curve.name)
    knots.save_knot(curve, cfg.out / f"knot_{slug}.json")
    lift = knots.lift_to_r3(curve)
    _write_json(cfg.out / f"lift_{slug}.json", _polyline_dict(f"{curve.name}-lift", lift.points))
    obj_lines = [f"v {p[0]:.9g} {p[1]:.9g} {p[2]:.9g}" for p in lift.points]
    obj_lines += [f"l {i} {i + 1}" for i in range(1, len(lift.points))]
    _atomic_write(cfg.out / f"lift_{slug}.obj", "\n".join(obj_lines) + "\n")
    _log(f"export {curve.name} -> {cfg.out / f'knot_{slug}.json'} (+ lift JSON/OBJ)")
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        _log(f"error: {message}")
        sys.exit(EXIT_CONFIG)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="INI config file")
    p.add_argument("--knot", help="catalog name or knot JSON path")
    p.add_argument("--out", help="output directory")
    p.add_argument("--seed", type=int, help="random seed recorded in outputs")
    p.add_argument("--raw-field", dest="raw_field", action="store_true", default=False,
                   help="disable the gluing cutoff (negative-control mode)")
    p.add_argument("--resolution", type=int, help="sample count for built-in knots")
    p.add_argument("--tolerance-profile", dest="tolerance_profile",
                   choices=sorted(_PROFILES), help="tolerance preset")


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hopfms", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("catalog", help="list shipped knots").set_defaults(func=cmd_catalog)
    for name, func, extra in [
        ("validate", cmd_validate, None),
        ("realize", cmd_realize, None),
        ("census", cmd_census, None),
        ("separatrix", cmd_separatrix, "branch"),
        ("invariant", cmd_invariant, None),
        ("export", cmd_export, None),
    ]:
        p = sub.add_parser(name, help=f"{name} subcommand")
        _add_common(p)
        if extra == "branch":
            p.add_argument("--branch", choices=["+", "-", "both"], default="both")
        p.set_defaults(func=func)
    p = sub.add_parser("plot", help="render SVG figures from exported data files")
    _add_common(p)
    p.add_argument("inputs", nargs="+", help="JSON data files")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        _log(f"config error: {exc}")
        return EXIT_CONFIG
    except (RealizationError, FrameError, RadiusError) as exc:
        _log(f"construction failure: {exc}")
        return EXIT_CONSTRUCT
    except (DegreeError, DomainError, analysis.ExtractionError, analysis.NotInBasinError) as exc:
        _log(f"verification failure: {exc}")
        return EXIT_VERIFY
    except OSError as exc:
        _log(f"config error: {exc}")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

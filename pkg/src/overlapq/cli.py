"""Command line front end: analyze | dimension | quantize | verify.

Reports are JSON (schema 1) or CSV for the tabular commands.  Identical
configuration must produce byte-identical output, so everything funnels
through one sorted-key emitter and no report carries a timestamp.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import CapExceeded, OracleMismatch, SpecValidationError, StructureError
from .exactfield import format_field
from .ifs import IfsSpec
from .measure import DiscreteMeasure, derived_constants, discretize, window_table
from .netauto import build_automaton, net_intervals_brute
from .presets import preset
from .pressure import (
    osc_dimension_oracle,
    path_sum,
    pressure_bounds,
    solve_s_r,
)
from .quantizer import (
    brute_force_quantizer,
    coefficient_band,
    error_curve_discrete,
    lambda_set,
    optimal_quantizer_1d,
    ss1_band_check,
)
from .transition import (
    analyze_essential,
    brute_offset_masses,
    mass_vector,
    positivity_check,
)

SCHEMA = 1


@dataclass
class RunConfig:
    spec: IfsSpec
    preset_name: str = ""
    r_values: tuple[Fraction, ...] = (Fraction(2),)
    k_max: int = 16
    depth_window: int = 16
    depth_measure: int = 20
    depth_discretize: int = 12
    depth_pressure: int = 12
    tolerance: Fraction = Fraction(1, 100)
    fmt: str = "json"
    out: str = ""
    verify_depth: int = 4
    lambda_k: tuple[int, ...] = (1, 2)

    def provenance(self) -> dict:
        return {
            "preset": self.preset_name,
            "ifs": self.spec.describe(),
            "depths": {
                "window": self.depth_window,
                "measure": self.depth_measure,
                "discretize": self.depth_discretize,
                "pressure": self.depth_pressure,
            },
            "tolerance": _frac_str(self.tolerance),
        }


def _frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise SpecValidationError(f"not an exact number: {text!r}") from exc


def load_config(args: argparse.Namespace) -> RunConfig:
    data: dict = {}
    if args.config:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise SpecValidationError(f"cannot read config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise SpecValidationError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise SpecValidationError("config root must be a JSON object")

    preset_name = args.preset or data.get("preset", "")
    if preset_name:
        spec = preset(str(preset_name))
    elif "ifs" in data:
        spec = IfsSpec.from_description(data["ifs"])
    else:
        raise SpecValidationError("need --preset or a config with preset/ifs")

    cfg = RunConfig(spec=spec, preset_name=str(preset_name))
    if "r" in data:
        cfg.r_values = tuple(_parse_fraction(str(v)) for v in data["r"])
    if args.r:
        cfg.r_values = tuple(_parse_fraction(v) for v in args.r)
    for r in cfg.r_values:
        if r <= 0:
            raise SpecValidationError(f"moment order must be positive, got {r}")

    depths = data.get("depths", {})
    cfg.depth_window = int(depths.get("window", cfg.depth_window))
    cfg.depth_measure = int(depths.get("measure", cfg.depth_measure))
    cfg.depth_discretize = int(depths.get("discretize", cfg.depth_discretize))
    cfg.depth_pressure = int(depths.get("pressure", cfg.depth_pressure))
    if args.depth_window is not None:
        cfg.depth_window = args.depth_window
    if args.depth_measure is not None:
        cfg.depth_measure = args.depth_measure
    if args.depth_discretize is not None:
        cfg.depth_discretize = args.depth_discretize
    if args.depth_pressure is not None:
        cfg.depth_pressure = args.depth_pressure
    for label, value in (
        ("window", cfg.depth_window),
        ("measure", cfg.depth_measure),
        ("discretize", cfg.depth_discretize),
        ("pressure", cfg.depth_pressure),
    ):
        if value < 1:
            raise SpecValidationError(f"depth {label} must be >= 1, got {value}")

    if "kmax" in data:
        cfg.k_max = int(data["kmax"])
    if args.kmax is not None:
        cfg.k_max = args.kmax
    if cfg.k_max < 1:
        raise SpecValidationError(f"kmax must be >= 1, got {cfg.k_max}")

    if "tolerance" in data:
        cfg.tolerance = _parse_fraction(str(data["tolerance"]))
    if args.tol is not None:
        cfg.tolerance = _parse_fraction(args.tol)
    if cfg.tolerance <= 0:
        raise SpecValidationError("tolerance must be positive")

    cfg.fmt = args.format or str(data.get("format", "json"))
    if cfg.fmt not in ("json", "csv"):
        raise SpecValidationError(f"unknown format {cfg.fmt!r}")
    cfg.out = args.out or ""
    return cfg


# -- commands ----------------------------------------------------------


def run_analyze(cfg: RunConfig) -> dict:
    spec = cfg.spec
    ftc = spec.finite_type_report()
    auto = build_automaton(spec)
    ess = analyze_essential(auto)
    failures = positivity_check(auto, ess)
    report = {
        "schema": SCHEMA,
        "command": "analyze",
        **cfg.provenance(),
        "finite_type": {
            "saturated": ftc.saturated,
            "depth": ftc.depth,
            "gamma_card": ftc.cardinality,
        },
        "automaton": auto.describe(),
        "essential": ess.describe(),
        "positivity": {
            "passed": not failures,
            "failures": [[a + 1, b + 1, j + 1] for a, b, j in failures],
        },
    }
    derived = {}
    if failures:
        # a zero row forces the one-step mass ratio to zero; skip the table
        c2 = format_field(min(auto.types[s].ell for s in ess.states))
        for r in cfg.r_values:
            derived[_frac_str(r)] = {
                "r": _frac_str(r),
                "c2": c2,
                "c3_lower": "0/1",
                "c3_lower_float": 0.0,
                "eta_lower": "0/1",
                "eta_lower_float": 0.0,
                "positive": False,
            }
    else:
        table = window_table(auto, depth=cfg.depth_window)
        for r in cfg.r_values:
            derived[_frac_str(r)] = derived_constants(auto, ess, table, r).describe()
    report["derived_constants"] = derived
    return report


def run_dimension(cfg: RunConfig) -> dict:
    spec = cfg.spec
    auto = build_automaton(spec)
    ess = analyze_essential(auto)
    rows = []
    for r in cfg.r_values:
        est = solve_s_r(auto, ess, r, tol=cfg.tolerance, n=cfg.depth_pressure)
        probe = pressure_bounds(auto, ess, Fraction(1, 2), r, cfg.depth_pressure)
        row = est.describe()
        row["k_slack"] = probe.connection_slack
        row["lower_method"] = probe.lower_method
        if spec.open_set_separated():
            oracle = osc_dimension_oracle(spec, r)
            row["oracle"] = oracle
            row["oracle_inside"] = est.s_lo <= oracle <= est.s_hi
        rows.append(row)
    return {
        "schema": SCHEMA,
        "command": "dimension",
        **cfg.provenance(),
        "estimates": rows,
    }


def run_quantize(cfg: RunConfig) -> dict:
    spec = cfg.spec
    auto = build_automaton(spec)
    ess = analyze_essential(auto)
    failures = positivity_check(auto, ess)
    dm = discretize(spec, cfg.depth_discretize)
    blocks = []
    for r in cfg.r_values:
        curve = error_curve_discrete(dm, r, cfg.k_max)
        est = solve_s_r(auto, ess, r, tol=cfg.tolerance, n=cfg.depth_pressure)
        s_center = est.s_center
        entries = []
        for q in curve:
            scaled = (
                float(q.k) ** (float(r) / s_center) * q.err_r
                if s_center > 0
                else float("nan")
            )
            entries.append({**q.describe(), "scaled": scaled})
        block = {
            "r": _frac_str(r),
            "atoms": dm.size,
            "s_estimate": est.describe(),
            "curve": entries,
        }
        if s_center > 0 and cfg.k_max >= 4:
            band = coefficient_band(curve, s_center, 4)
            control = coefficient_band(curve, s_center / 2, 4)
            block["band"] = band.describe()
            block["control_band"] = control.describe()
        if failures:
            block["threshold_sets"] = "disabled: positivity failed"
        else:
            lam_reports = {}
            for k in cfg.lambda_k:
                lam = lambda_set(auto, ess, k, r, cfg.depth_window)
                lam.validate()
                lam_reports[str(k)] = lam.describe()
            block["threshold_sets"] = lam_reports
            block["ss1_band"] = ss1_band_check(
                auto,
                ess,
                r,
                cfg.lambda_k,
                discretize_depth=cfg.depth_discretize,
                window_depth=cfg.depth_window,
            )
        blocks.append(block)
    return {
        "schema": SCHEMA,
        "command": "quantize",
        **cfg.provenance(),
        "results": blocks,
    }


def _verify_net_intervals(cfg: RunConfig) -> None:
    spec = cfg.spec
    auto = build_automaton(spec)
    for depth in range(cfg.verify_depth + 1):
        if spec.n_maps**depth > 4096:
            break
        brute = brute_offset_masses(spec, depth)
        paths = auto.paths_at_depth(depth)
        if len(paths) != len(brute):
            raise OracleMismatch(
                f"automaton yields {len(paths)} net intervals at depth {depth}, "
                f"direct enumeration {len(brute)}"
            )
        realized = sorted(
            ((auto.realize(p), p) for p in paths), key=lambda item: item[0][0]
        )
        for ((alo, ahi), path), (blo, bhi, offs, masses) in zip(realized, brute):
            if alo != blo or ahi != bhi:
                raise OracleMismatch(f"net interval mismatch at depth {depth}")
            cv = auto.types[path[-1]]
            if tuple(cv.offsets) != offs or mass_vector(auto, path) != masses:
                raise OracleMismatch(f"offset masses mismatch at depth {depth}")


def _verify_quantizer(cfg: RunConfig) -> None:
    dm = discretize(cfg.spec, min(cfg.depth_discretize, 4))
    if dm.size > 12:
        positions = dm.positions[:12]
        total = sum(dm.masses[:12])
        dm = DiscreteMeasure(
            positions=positions,
            masses=tuple(m / total for m in dm.masses[:12]),
            depth=dm.depth,
            radius=dm.radius,
        )
    for r in (1, 2):
        for k in (1, 2, 3):
            if k > dm.size:
                continue
            a = optimal_quantizer_1d(dm, k, r)
            b = brute_force_quantizer(dm, k, r)
            scale = max(abs(b.err_r), 1e-30)
            if abs(a.err_r - b.err_r) > 1e-9 * scale:
                raise OracleMismatch(
                    f"quantizer DP {a.err_r} vs enumeration {b.err_r} at k={k} r={r}"
                )


def _verify_measure_nesting(cfg: RunConfig) -> None:
    auto = build_automaton(cfg.spec)
    shallow = window_table(auto, depth=6)
    deep = window_table(auto, depth=10)
    for key, enc in deep.items():
        if not enc.within(shallow[key]):
            raise OracleMismatch(f"refined enclosure escapes the coarse one at {key}")


def _verify_pressure(cfg: RunConfig) -> None:
    auto = build_automaton(cfg.spec)
    ess = analyze_essential(auto)
    t = Fraction(1, 2)
    for r in cfg.r_values:
        s2 = path_sum(auto, ess, t, r, 2)
        s4 = path_sum(auto, ess, t, r, 4)
        if not s4.lo <= s2.hi * s2.hi:
            raise OracleMismatch("path sums violate submultiplicativity")


def run_verify(cfg: RunConfig) -> dict:
    checks = []
    ftc = cfg.spec.finite_type_report()
    if not ftc.saturated:
        raise StructureError("rescaled gap family did not saturate")
    checks.append({"name": "finite-type-saturation", "status": "ok"})
    _verify_net_intervals(cfg)
    checks.append({"name": "net-intervals-vs-enumeration", "status": "ok"})
    _verify_quantizer(cfg)
    checks.append({"name": "quantizer-vs-enumeration", "status": "ok"})
    _verify_measure_nesting(cfg)
    checks.append({"name": "measure-enclosure-nesting", "status": "ok"})
    _verify_pressure(cfg)
    checks.append({"name": "pressure-submultiplicativity", "status": "ok"})
    return {
        "schema": SCHEMA,
        "command": "verify",
        **cfg.provenance(),
        "checks": checks,
    }


# -- emission ----------------------------------------------------------


def _csv_text(report: dict) -> str:
    command = report.get("command")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if command == "dimension":
        writer.writerow(["r", "t_lo", "t_hi", "s_lo", "s_hi", "n", "k_slack", "preset"])
        for row in report["estimates"]:
            writer.writerow(
                [
                    row["r"],
                    repr(row["t_interval"][0]),
                    repr(row["t_interval"][1]),
                    repr(row["s_interval"][0]),
                    repr(row["s_interval"][1]),
                    row["n"],
                    repr(row["k_slack"]),
                    report["preset"],
                ]
            )
        return buf.getvalue()
    if command == "quantize":
        writer.writerow(["k", "err_r", "lo", "hi", "scaled"])
        for block in report["results"]:
            for q in block["curve"]:
                writer.writerow(
                    [
                        q["k"],
                        repr(q["err_r"]),
                        repr(q["mu_err_lo"]),
                        repr(q["mu_err_hi"]),
                        repr(q["scaled"]),
                    ]
                )
        return buf.getvalue()
    raise SpecValidationError(f"csv output is not defined for {command!r}")


def emit(report: dict, cfg: RunConfig) -> None:
    if cfg.fmt == "csv":
        text = _csv_text(report)
    else:
        text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- entry -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="overlapq",
        description="net-interval automaton, dimension, and quantizer toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("analyze", "automaton, essential class, positivity, constants"),
        ("dimension", "pressure zero bracket for each moment order"),
        ("quantize", "error curve, coefficient bands, threshold sets"),
        ("verify", "invariant and oracle cross-check suite"),
    ):
        p = sub.add_parser(name, help=help_text)
        # no choices= here: parametric names like lambda-cantor:2 must pass
        p.add_argument("--preset", metavar="NAME")
        p.add_argument("--config", metavar="FILE")
        p.add_argument("--r", action="append", metavar="FRACTION")
        p.add_argument("--kmax", type=int)
        p.add_argument("--depth-window", type=int, dest="depth_window")
        p.add_argument("--depth-measure", type=int, dest="depth_measure")
        p.add_argument("--depth-discretize", type=int, dest="depth_discretize")
        p.add_argument("--depth-pressure", type=int, dest="depth_pressure")
        p.add_argument("--tol", metavar="FRACTION")
        p.add_argument("--format", choices=("json", "csv"))
        p.add_argument("--out", metavar="PATH")
    return parser


_DISPATCH = {
    "analyze": run_analyze,
    "dimension": run_dimension,
    "quantize": run_quantize,
    "verify": run_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args)
        report = _DISPATCH[args.command](cfg)
        emit(report, cfg)
    except (SpecValidationError, CapExceeded, OracleMismatch, StructureError) as exc:
        print(f"overlapq: {exc}", file=sys.stderr)
        return exc.exit_code
    except Exception as exc:  # internal fault: anything not classified above
        print(f"overlapq: internal error: {exc}", file=sys.stderr)
        return 5
    return 0


if __name__ == "__main__":
    sys.exit(main())

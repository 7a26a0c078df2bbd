"""Command-line surface: build families, verify metrics, run scans.

Exit codes: 0 pass, 2 input rejection, 3 verification failure,
4 calibration failure. Artifacts (CSV profile, JSON report, SVG plots)
are byte-reproducible for a fixed config and seed; no timestamps are
written.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys

import numpy as np

from . import __version__
from ._backend import BACKEND
from .curvature import ac_report, eigen_difference_law, endpoint_spectra, grid_spectra
from .errors import GraymetError, ParameterRangeError, PositivityError
from .families import (FamilySpec, compatibility_residual, cp2_family, eta,
                       genus_family, trivial_ruled_nonexistence)
from .ode import boundary_report, synthesize_profile
from .oracle import (AnalyticProfile, CHART_FOR_K, calibrate, chart_metric,
                     random_chart_point, ricci_fd, sample_killing_defects)
from .svg import line_chart

EXIT_OK = 0
EXIT_BAD_INPUT = 2
EXIT_VERIFY_FAIL = 3
EXIT_CALIBRATION_FAIL = 4

CSV_COLUMNS = "t,H,F,G,dF,dG,lambda0,lambda1,lambda2,tau"


def _fmt(v: float) -> str:
    return f"{float(v):.17g}"


def _jsonify(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return _jsonify(dataclasses.asdict(obj))
    if isinstance(obj, dict):
        return {str(k): _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if obj.size > 64:
            return {"length": int(obj.size), "min": float(obj.min()),
                    "max": float(obj.max())}
        return [_jsonify(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def write_json(path, payload) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_jsonify(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_config(path) -> dict:
    """Plain `key = value` file; '#' starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"bad config line: {line!r}")
            key, val = (part.strip() for part in line.split("=", 1))
            out[key.replace("-", "_")] = val
    return out


def _apply_config(parser, argv, args):
    if not args.config:
        return args
    cfg = load_config(args.config)
    actions = {}
    for sub in parser._subparsers._group_actions[0].choices.values():
        for act in sub._actions:
            actions.setdefault(act.dest, act)
    bad = set(cfg) - set(actions)
    if bad:
        raise ValueError(f"unknown config keys: {sorted(bad)}")
    coerced = {}
    for key, raw in cfg.items():
        act = actions[key]
        if isinstance(act, argparse._StoreTrueAction):
            coerced[key] = raw.lower() in ("1", "true", "yes", "on")
        elif act.type is not None:
            coerced[key] = act.type(raw)
        else:
            coerced[key] = raw
    parser.set_defaults(**coerced)
    return parser.parse_args(argv)


def _spec_payload(spec: FamilySpec) -> dict:
    d = dataclasses.asdict(spec)
    d["P"] = list(spec.P.coefficients)
    return d


def cmd_family(args) -> int:
    try:
        if args.cp2:
            spec = cp2_family(args.x, args.eps)
        else:
            spec = genus_family(args.genus, args.k, args.x)
    except (ParameterRangeError, PositivityError) as exc:
        print(f"rejected: {exc}", file=sys.stderr)
        if args.cp2:
            print(f"admissible CP2 range: x in ({eta():.6f}, 1) for eps=1, "
                  "(1, inf) for eps=-1", file=sys.stderr)
        return EXIT_BAD_INPUT

    grid = synthesize_profile(spec, n=args.n)
    brep = boundary_report(grid, tolerance=args.tol)
    acrep = ac_report(grid, tol=args.tol)
    ediff = eigen_difference_law(grid)

    os.makedirs(args.out, exist_ok=True)
    formats = set(args.formats.split(","))
    lam0, lam1, lam2, tau = _full_grid_spectra(grid)
    if "csv" in formats:
        _write_profile_csv(os.path.join(args.out, "profile.csv"), grid,
                           lam0, lam1, lam2, tau)
    if "svg" in formats:
        for name, ys in (("f", grid.F), ("g", grid.G), ("lambda0", lam0),
                         ("lambda1", lam1), ("lambda2", lam2), ("tau", tau)):
            line_chart(os.path.join(args.out, f"{name}.svg"), grid.t, ys,
                       f"{name}(t)")
    report = {
        "command": "family",
        "config": _config_echo(args),
        "library_version": __version__,
        "backend": BACKEND,
        "spec": _spec_payload(spec),
        "half_length": float(grid.b),
        "boundary": brep,
        "ac": acrep,
        "eigen_difference_spread": ediff,
        "fitted_vs_closed_form": {
            "C_closed": spec.C, "D_closed": spec.D, "E_closed": spec.E,
            "C_fitted": acrep.fitted_family["C"],
            "D_fitted": acrep.fitted_family["D"],
            "E_fitted": acrep.fitted_family["E"],
            "C_from_mu_fit": acrep.mu_fit["fitted_C_family"],
            "D_from_mu_fit": acrep.mu_fit["fitted_D_family"],
        },
        "passed": bool(brep.passed and acrep.passed),
    }
    if "json" in formats:
        write_json(os.path.join(args.out, "report.json"), report)
    status = "pass" if report["passed"] else "FAIL"
    print(f"family {spec.case_tag} x={spec.x}: boundary "
          f"{'pass' if brep.passed else 'FAIL'}, ac "
          f"{'pass' if acrep.passed else 'FAIL'} -> {status}")
    return EXIT_OK if report["passed"] else EXIT_VERIFY_FAIL


def _full_grid_spectra(grid):
    """Spectra at every node: closed form inside, extrapolation at the two
    endpoint nodes where the formulas degenerate to 0/0."""
    l0m, l1m, l2m, taum, sl = grid_spectra(grid, margin=1)
    n = len(grid.t)
    ends = endpoint_spectra(grid)
    full = []
    for series, attr in ((l0m, "lambda0"), (l1m, "lambda1"),
                         (l2m, "lambda2"), (taum, "tau")):
        arr = np.empty(n)
        arr[1:-1] = series
        arr[0] = getattr(ends["a"], attr)
        arr[-1] = getattr(ends["b"], attr)
        full.append(arr)
    return full


def _write_profile_csv(path, grid, lam0, lam1, lam2, tau) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(CSV_COLUMNS + "\n")
        for i in range(len(grid.t)):
            row = (grid.t[i], grid.H[i], grid.F[i], grid.G[i], grid.dF[i],
                   grid.dG[i], lam0[i], lam1[i], lam2[i], tau[i])
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def cmd_scan(args) -> int:
    os.makedirs(args.out, exist_ok=True)
    if args.sweep:
        xs = np.linspace(args.sweep_min, args.sweep_max, args.sweep_points)
        rows = []
        for x in xs:
            for y in (-x, *np.linspace(args.sweep_min, args.sweep_max,
                                       args.sweep_points)):
                rows.append((x, y, compatibility_residual(
                    float(x), float(y), args.s, args.eps)))
        path = os.path.join(args.out, "sweep.csv")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("x,y,residual\n")
            for x, y, r in rows:
                fh.write(f"{_fmt(x)},{_fmt(y)},{_fmt(r)}\n")
        print(f"wrote {path} ({len(rows)} rows)")
        return EXIT_OK

    reports = {case: trivial_ruled_nonexistence(case)
               for case in ("genus_gt1_product", "torus_product")}
    payload = {
        "command": "scan",
        "config": _config_echo(args),
        "library_version": __version__,
        "cases": {},
    }
    ok = True
    for case, rep in reports.items():
        detail = {k: v for k, v in rep.detail.items()
                  if not isinstance(v, np.ndarray)}
        payload["cases"][case] = {
            "grid": rep.grid,
            "worst_residual": rep.worst_residual,
            "found_solution": rep.found_solution,
            "detail": detail,
        }
        ok = ok and not rep.found_solution
        print(f"{case}: found_solution={rep.found_solution} "
              f"worst_residual={rep.worst_residual:.6g}")
    write_json(os.path.join(args.out, "scan.json"), payload)
    return EXIT_OK if ok else EXIT_VERIFY_FAIL


def _agreement_case(rng):
    """One random smooth-profile comparison; returns the relative error."""
    from .curvature import ricci_closed_form

    s = float(rng.choice([0.0, 1.0, 2.0]))
    K = float(rng.choice([-4.0, 0.0, 4.0]))
    chart = CHART_FOR_K[K]

    def trig(coeffs):
        a1, b1, a2, b2 = coeffs
        scale = 0.55 / (abs(a1) + abs(b1) + abs(a2) + abs(b2) + 1e-12)
        f = lambda t: 1.25 + scale * (a1 * math.cos(t) + b1 * math.sin(t)
                                      + a2 * math.cos(2 * t) + b2 * math.sin(2 * t))
        df = lambda t: scale * (-a1 * math.sin(t) + b1 * math.cos(t)
                                - 2 * a2 * math.sin(2 * t) + 2 * b2 * math.cos(2 * t))
        ddf = lambda t: scale * (-a1 * math.cos(t) - b1 * math.sin(t)
                                 - 4 * a2 * math.cos(2 * t) - 4 * b2 * math.sin(2 * t))
        return f, df, ddf

    F, dF, ddF = trig(rng.standard_normal(4))
    G, dG, ddG = trig(rng.standard_normal(4))
    prof = AnalyticProfile(F, G)
    p = random_chart_point(rng, chart, (-0.5, 0.5))
    _, eigs = ricci_fd(s, prof, p, step=1e-4)
    t0 = p.t
    spec = ricci_closed_form(F(t0), dF(t0), ddF(t0), G(t0),
                             dG(t0), ddG(t0), s, K)
    closed = np.sort([spec.lambda0, spec.lambda1, spec.lambda2, spec.lambda2])
    scale = max(1.0, float(np.abs(closed).max()))
    return float(np.abs(eigs - closed).max()) / scale


def cmd_verify(args) -> int:
    os.makedirs(args.out, exist_ok=True)
    rng = np.random.default_rng(args.seed)
    cal = calibrate()
    payload = {
        "command": "verify",
        "config": _config_echo(args),
        "library_version": __version__,
        "backend": BACKEND,
        "calibration": cal,
    }
    if not cal.passed:
        write_json(os.path.join(args.out, "verify.json"), payload)
        print("calibration FAILED", file=sys.stderr)
        return EXIT_CALIBRATION_FAIL

    errs = [_agreement_case(rng) for _ in range(args.cases)]
    agree_max = max(errs)
    payload["oracle_agreement"] = {
        "cases": args.cases, "max_relative_error": agree_max,
        "tolerance": 1e-5, "passed": agree_max < 1e-5,
    }

    spec = genus_family(2, 1, 0.5)
    grid = synthesize_profile(spec, n=args.n)
    defects = sample_killing_defects(spec, grid, rng, n_samples=20,
                                     perturb=args.perturb)
    kd_max = max(defects)
    payload["killing_defect"] = {
        "family": "genus 2, k 1, x 0.5", "samples": 20,
        "perturbation": args.perturb, "max_defect": kd_max,
        "tolerance": 1e-4, "passed": kd_max < 1e-4,
    }
    ok = payload["oracle_agreement"]["passed"] and payload["killing_defect"]["passed"]
    payload["passed"] = ok
    write_json(os.path.join(args.out, "verify.json"), payload)
    print(f"calibration pass (max err {cal.max_error:.2e}); "
          f"agreement max rel err {agree_max:.2e}; "
          f"killing defect max {kd_max:.2e} -> {'pass' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_VERIFY_FAIL


def _config_echo(args) -> dict:
    skip = {"func"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graymet",
        description="construct and verify cohomogeneity-one Gray metrics")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--n", type=int, default=2048, help="profile samples")
        p.add_argument("--tol", type=float, default=1e-6)
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--formats", default="csv,json",
                       help="comma subset of csv,json,svg")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--config", default=None,
                       help="key = value file; flags override")

    fam = sub.add_parser("family", help="build and verify one family member")
    fam.add_argument("--genus", type=int, default=2)
    fam.add_argument("--k", type=int, default=1)
    fam.add_argument("--x", type=float, required=True)
    fam.add_argument("--eps", type=int, default=1)
    fam.add_argument("--cp2", action="store_true",
                     help="build the CP2 family instead of a genus family")
    common(fam)
    fam.set_defaults(func=cmd_family)

    scan = sub.add_parser("scan", help="nonexistence scans and sweeps")
    scan.add_argument("--sweep", action="store_true",
                      help="tabulate the compatibility residual on a grid")
    scan.add_argument("--sweep-min", type=float, default=-0.9)
    scan.add_argument("--sweep-max", type=float, default=0.9)
    scan.add_argument("--sweep-points", type=int, default=19)
    scan.add_argument("--s", type=float, default=1.0)
    scan.add_argument("--eps", type=int, default=1)
    common(scan)
    scan.set_defaults(func=cmd_scan)

    ver = sub.add_parser("verify", help="oracle calibration and agreement")
    ver.add_argument("--cases", type=int, default=100,
                     help="random profiles in the agreement suite")
    ver.add_argument("--perturb", type=float, default=0.0,
                     help="profile perturbation amplitude (negative control)")
    common(ver)
    ver.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args = _apply_config(parser, argv, args)
        return args.func(args)
    except (GraymetError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())

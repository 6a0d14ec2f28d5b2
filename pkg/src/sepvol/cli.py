"""Command line front end.

Subcommands: scenarios (list the catalog), show (one entry), estimate
(seeded Monte Carlo for one quantity), sweep (S over a ratio grid),
verify (suite of estimate-vs-catalog comparisons with a CI exit code),
bounds (relaxed-test bound values), bench (backend benchmark).

Every report echoes the run configuration (samples, seed, shards), so a
run can be reproduced from its own output.  JSON reports carry the
schema tag "sepvol/1"; CSV uses a plain header row with C-locale
decimal points.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
import time

import numpy as np

from . import bounds as bounds_mod
from . import closedforms as cf
from ._kernels import available_backends, backend_name, set_backend
from .estimator import (
    DEFAULT_SAMPLES,
    estimate_c,
    estimate_S,
    estimate_volumes,
    sweep_S,
)
from .scenarios import ScenarioSpec, SPLITS, canonical_json, scenario_alias

__all__ = ["main", "UnknownSuiteError", "SUITES", "SCHEMA"]

SCHEMA = "sepvol/1"
VERIFY_DEFAULT_SAMPLES = 1_000_000

SUITES = (
    "qq-real",
    "qq-complex",
    "qq-quaternion",
    "qq-mixed",
    "qubit-qutrit",
    "qutrit-qutrit",
    "three-qubit",
    "bounds",
    "normalization",
)


class UnknownSuiteError(KeyError):
    """Suite name not in SUITES."""


def _resolve_scenario(text):
    """Accept a catalog alias, inline scenario JSON, or a JSON file path."""
    text = text.strip()
    if text.startswith("{"):
        return ScenarioSpec.from_json(text)
    if os.path.exists(text):
        with open(text) as f:
            return ScenarioSpec.from_json(f.read())
    entry = cf.catalog_lookup(text)
    return entry.spec


def _lookup_entry(spec):
    try:
        return cf.catalog_lookup(spec)
    except cf.NotCatalogedError:
        return None


def _emit(text, out_path):
    if out_path:
        with open(out_path, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _parse_grid(text):
    """Parse "a:b:steps" or "a:b:steps,log" into a 1-D ratio grid."""
    text = text.strip()
    log = False
    if "," in text:
        text, flag = text.split(",", 1)
        if flag.strip() != "log":
            raise ValueError("grid flag must be 'log', got %r" % flag)
        log = True
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError("grid must look like a:b:steps[,log], got %r" % text)
    a, b, steps = float(parts[0]), float(parts[1]), int(parts[2])
    if steps < 1:
        raise ValueError("grid needs at least one step")
    if not (a > 0.0 and b > 0.0):
        raise ValueError("grid endpoints must be positive ratios")
    if steps == 1:
        return np.array([a])
    if log:
        return np.geomspace(a, b, steps)
    return np.linspace(a, b, steps)


def _nu_from_arg(text, arity):
    vals = [float(p) for p in str(text).split(",")]
    if len(vals) == 1 and arity > 1:
        vals = vals * arity
    if len(vals) != arity:
        raise ValueError(
            "scenario needs %d ratio coordinates, got %d" % (arity, len(vals))
        )
    return vals if arity > 1 else vals[0]


# ---------------------------------------------------------------------------
# estimate / sweep


def _cmd_scenarios(args):
    rows = []
    for entry in cf.load_catalog():
        if args.split and entry.spec.split != args.split:
            continue
        rows.append(
            {
                "alias": entry.alias,
                "split": entry.spec.split,
                "pairs": [[i, j, f] for i, j, f in entry.spec.pairs],
                "complete": entry.P is not None and entry.V_sep is not None,
                "approximate": entry.approximate,
            }
        )
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["alias", "split", "pairs", "complete", "approximate"])
        for r in rows:
            w.writerow(
                [
                    r["alias"],
                    r["split"],
                    ";".join("%d-%d-%s" % tuple(p) for p in r["pairs"]),
                    r["complete"],
                    r["approximate"],
                ]
            )
        _emit(buf.getvalue(), args.out)
    else:
        _emit(canonical_json({"schema": SCHEMA, "scenarios": rows}), args.out)
    return 0


def _cmd_show(args):
    spec = _resolve_scenario(args.scenario)
    entry = _lookup_entry(spec)
    if entry is None:
        payload = {"schema": SCHEMA, "scenario": spec.to_dict(), "catalog": None}
    else:
        payload = {"schema": SCHEMA, "catalog": entry.to_dict()}
    _emit(canonical_json(payload), args.out)
    return 0


_QUANTITIES = ("P", "V_tot", "V_sep", "c", "S")


def _cmd_estimate(args):
    spec = _resolve_scenario(args.scenario)
    entry = _lookup_entry(spec)
    quantity = args.quantity
    nu = None
    if quantity == "S":
        if args.nu is None:
            raise ValueError("--nu is required when estimating S")
        nu = _nu_from_arg(args.nu, spec.n_ratios)
        est = estimate_S(
            spec, nu, samples=args.samples, seed=args.seed, shards=args.shards
        )
    elif quantity == "c":
        est = estimate_c(
            spec, samples=args.samples, seed=args.seed, shards=args.shards
        )
    else:
        vols = estimate_volumes(
            spec, samples=args.samples, seed=args.seed, shards=args.shards
        )
        est = getattr(vols, quantity)
    catalog_value = None
    if entry is not None:
        if quantity == "S" and entry.S is not None:
            try:
                catalog_value = cf.eval_S(entry, nu)
            except cf.ExpressionError:
                catalog_value = None
        elif quantity != "S":
            catalog_value = entry.scalar(quantity)
    payload = {
        "schema": SCHEMA,
        "scenario": spec.to_dict(),
        "alias": scenario_alias(spec),
        "quantity": quantity,
        "value": est.value,
        "stderr": est.stderr,
        "samples": est.samples,
        "seed": est.seed,
        "shards": est.shards,
    }
    if nu is not None:
        payload["nu"] = nu if isinstance(nu, list) else [nu]
    if catalog_value is not None:
        payload["catalog_value"] = catalog_value
        payload["z_score"] = est.z_score(catalog_value)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf)
        header = ["alias", "quantity", "value", "stderr", "samples", "seed", "shards"]
        row = [
            payload["alias"],
            quantity,
            est.value,
            est.stderr,
            est.samples,
            est.seed,
            est.shards,
        ]
        if catalog_value is not None:
            header += ["catalog_value", "z_score"]
            row += [catalog_value, payload["z_score"]]
        w.writerow(header)
        w.writerow(row)
        _emit(buf.getvalue(), args.out)
    else:
        _emit(canonical_json(payload), args.out)
    return 0


def _grid_points(grid_1d, arity):
    if arity == 1:
        return grid_1d[:, None]
    axes = np.meshgrid(*([grid_1d] * arity), indexing="ij")
    return np.stack([a.ravel() for a in axes], axis=1)


def _cmd_sweep(args):
    spec = _resolve_scenario(args.scenario)
    grid_1d = _parse_grid(args.grid)
    pts = _grid_points(grid_1d, spec.n_ratios)
    table = sweep_S(
        spec,
        pts,
        samples=args.samples,
        seed=args.seed,
        shards=args.shards,
        closed=not args.no_closed,
    )
    have_closed = any(cv is not None for cv in table.closed)
    if args.format == "json":
        rows = []
        for point, est, closed_val in table.rows():
            row = {
                "nu": [float(v) for v in point],
                "S_hat": est.value,
                "stderr": est.stderr,
                "seed": est.seed,
            }
            if closed_val is not None:
                row["S_closed"] = closed_val
            rows.append(row)
        payload = {
            "schema": SCHEMA,
            "alias": table.alias,
            "quantity": "S",
            "samples": args.samples,
            "seed": args.seed,
            "shards": args.shards,
            "rows": rows,
        }
        _emit(canonical_json(payload), args.out)
        return 0
    buf = io.StringIO()
    w = csv.writer(buf)
    header = ["nu%d" % (k + 1) for k in range(spec.n_ratios)]
    header += ["S_hat", "stderr"]
    if have_closed:
        header.append("S_closed")
    w.writerow(header)
    for point, est, closed_val in table.rows():
        row = [repr(float(v)) for v in point] + [repr(est.value), repr(est.stderr)]
        if have_closed:
            row.append("" if closed_val is None else repr(closed_val))
        w.writerow(row)
    _emit(buf.getvalue(), args.out)
    return 0


# ---------------------------------------------------------------------------
# verify


def _suite_entries(suite):
    """Complete, exact catalog entries gated by a suite."""
    picked = []
    for entry in cf.load_catalog():
        if entry.P is None or entry.V_sep is None or entry.approximate:
            continue
        fields = {f for _, _, f in entry.spec.pairs}
        split = entry.spec.split
        if suite == "qq-real":
            ok = split == "qubit-qubit" and fields == {"real"}
        elif suite == "qq-complex":
            ok = split == "qubit-qubit" and fields == {"complex"}
        elif suite == "qq-quaternion":
            ok = split == "qubit-qubit" and fields == {"quaternion"}
        elif suite == "qq-mixed":
            ok = split == "qubit-qubit" and len(fields) > 1
        elif suite == "qubit-qutrit":
            ok = split == "qubit-qutrit"
        elif suite == "qutrit-qutrit":
            ok = split == "qutrit-qutrit"
        else:  # three-qubit
            ok = split in ("3qubit-bipartite", "3qubit-tripartite")
        if ok:
            picked.append(entry)
    return picked


def _prob_pass(estimate, exact):
    return abs(estimate.value - exact) <= max(3.0 * estimate.stderr, 0.01)


def _vol_pass(estimate, exact):
    return abs(estimate.value - exact) <= 3.0 * estimate.stderr


def _verify_scenarios(suite, args):
    rows = []
    entries = _suite_entries(suite)
    for entry in entries:
        vols = estimate_volumes(
            entry.spec, samples=args.samples, seed=args.seed, shards=args.shards
        )
        for quantity, est, gate in (
            ("V_tot", vols.V_tot, _vol_pass),
            ("P", vols.P, _prob_pass),
        ):
            exact = entry.scalar(quantity)
            row = {
                "scenario": entry.alias,
                "quantity": quantity,
                "estimate": est.value,
                "stderr": est.stderr,
                "exact": exact,
                "z": est.z_score(exact),
                "pass": gate(est, exact),
            }
            if entry.reported and quantity in entry.reported:
                row["reported"] = entry.reported_scalar(quantity)
            rows.append(row)
    return rows


def _verify_bounds(args):
    rows = []
    quad_checks = (
        ("upper-single-minor", 0.5 + 512.0 / (135.0 * math.pi**2)),
        ("lower-pieced", 1024.0 / (135.0 * math.pi**2)),
        ("upper-with-3x3", 128.0 / 165.0),
    )
    for kind, exact in quad_checks:
        val = bounds_mod.bound_probability(kind)
        ok = abs(val - exact) <= 1e-8 * max(1.0, abs(exact))
        rows.append(
            {
                "scenario": "full-real",
                "quantity": "bound:" + kind,
                "estimate": val,
                "stderr": 0.0,
                "exact": exact,
                "z": 0.0 if ok else math.inf,
                "pass": ok,
            }
        )
    numerator = bounds_mod.bound_volume("upper-with-3x3")
    exact_num = 2.0 * math.pi**4 / 155925.0
    ok = abs(numerator - exact_num) <= 1e-8 * exact_num
    rows.append(
        {
            "scenario": "full-real",
            "quantity": "bound-volume:upper-with-3x3",
            "estimate": numerator,
            "stderr": 0.0,
            "exact": exact_num,
            "z": 0.0 if ok else math.inf,
            "pass": ok,
        }
    )
    mc_samples = max(args.samples // 4, 50_000)
    for k, nu in enumerate((0.25, 0.6, 1.0, 1.8, 4.0)):
        est = bounds_mod.estimate_relaxed_S(
            "minor14", nu, samples=mc_samples, seed=args.seed + k, shards=args.shards
        )
        exact = bounds_mod.approx_S("minor14", nu)
        rows.append(
            {
                "scenario": "full-real",
                "quantity": "relaxed-S:minor14:nu=%g" % nu,
                "estimate": est.value,
                "stderr": est.stderr,
                "exact": exact,
                "z": est.z_score(exact),
                "pass": abs(est.value - exact) <= 3.0 * est.stderr,
            }
        )
    est = bounds_mod.estimate_relaxed_probability(
        "minor14+3x3", samples=mc_samples, seed=args.seed, shards=args.shards
    )
    exact = 128.0 / 165.0
    rows.append(
        {
            "scenario": "full-real",
            "quantity": "relaxed-P:minor14+3x3",
            "estimate": est.value,
            "stderr": est.stderr,
            "exact": exact,
            "z": est.z_score(exact),
            "pass": abs(est.value - exact) <= max(3.0 * est.stderr, 0.01),
        }
    )
    return rows


def _verify_normalization(args):
    from scipy.integrate import quad

    rows = []
    full_real = _resolve_scenario("qq-real-12-13-14-23-24-34")
    full_complex = _resolve_scenario("qq-complex-12-13-14-23-24-34")
    vols_r = estimate_volumes(
        full_real, samples=args.samples, seed=args.seed, shards=args.shards
    )
    vols_c = estimate_volumes(
        full_complex, samples=args.samples, seed=args.seed, shards=args.shards
    )
    for label, est, scale, exact in (
        ("V_tot(full real) x16", vols_r.V_tot, 16.0, math.pi**4 / 60480.0),
        (
            "V_tot(full complex) x128",
            vols_c.V_tot,
            128.0,
            math.pi**6 / 851350500.0,
        ),
    ):
        ok = abs(est.value * scale - exact) <= 3.0 * est.stderr * scale
        rows.append(
            {
                "scenario": label.split("(")[1].split(")")[0],
                "quantity": label,
                "estimate": est.value * scale,
                "stderr": est.stderr * scale,
                "exact": exact,
                "z": (est.value * scale - exact) / (est.stderr * scale),
                "pass": ok,
            }
        )
    pieces = [(0.0, 0.5), (0.5, 1.0), (1.0, 2.0), (2.0, 10.0), (10.0, math.inf)]
    got_r = sum(
        quad(cf.jacobian_real, a, b, limit=200, epsabs=1e-13)[0] for a, b in pieces
    )
    exact_r = math.pi**2 / 1146880.0
    rows.append(
        {
            "scenario": "full real",
            "quantity": "integral(J_real)",
            "estimate": got_r,
            "stderr": 0.0,
            "exact": exact_r,
            "z": 0.0,
            "pass": abs(got_r - exact_r) <= 1e-6 * exact_r,
        }
    )
    from .measure import dirichlet_total

    dc = dirichlet_total(full_complex)

    def j_complex(v):
        return dc * cf.ratio_density((4.0, 4.0), (4.0, 4.0), v)

    got_c = sum(
        quad(j_complex, a, b, limit=200, epsabs=1e-16)[0]
        for a, b in [(1e-9, 0.5), (0.5, 1.0), (1.0, 2.0), (2.0, 10.0), (10.0, math.inf)]
    )
    exact_c = 1.0 / 1009008000.0
    rows.append(
        {
            "scenario": "full complex",
            "quantity": "integral(J_complex)",
            "estimate": got_c,
            "stderr": 0.0,
            "exact": exact_c,
            "z": 0.0,
            "pass": abs(got_c - exact_c) <= 1e-6 * exact_c,
        }
    )
    return rows


def _cmd_verify(args):
    suite = args.suite
    if suite not in SUITES:
        raise UnknownSuiteError(
            "unknown suite %r; choose from %s" % (suite, ", ".join(SUITES))
        )
    if suite == "bounds":
        rows = _verify_bounds(args)
    elif suite == "normalization":
        rows = _verify_normalization(args)
    else:
        rows = _verify_scenarios(suite, args)
    passed = all(r["pass"] for r in rows)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(
            ["scenario", "quantity", "estimate", "stderr", "exact", "z", "pass"]
        )
        for r in rows:
            w.writerow(
                [
                    r["scenario"],
                    r["quantity"],
                    repr(r["estimate"]),
                    repr(r["stderr"]),
                    repr(r["exact"]),
                    "%.3f" % r["z"],
                    r["pass"],
                ]
            )
        _emit(buf.getvalue(), args.out)
    else:
        payload = {
            "schema": SCHEMA,
            "command": "verify",
            "suite": suite,
            "samples": args.samples,
            "seed": args.seed,
            "shards": args.shards,
            "rows": rows,
            "passed": passed,
        }
        _emit(canonical_json(payload), args.out)
    return 0 if passed else 1


# ---------------------------------------------------------------------------
# bounds / bench


def _cmd_bounds(args):
    payload = {
        "schema": SCHEMA,
        "command": "bounds",
        "upper-single-minor": bounds_mod.bound_probability("upper-single-minor"),
        "lower-pieced": bounds_mod.bound_probability("lower-pieced"),
        "upper-with-3x3": bounds_mod.bound_probability("upper-with-3x3"),
        "upper-with-3x3-volume": bounds_mod.bound_volume("upper-with-3x3"),
    }
    if args.mc:
        est = bounds_mod.estimate_relaxed_probability(
            "minor14+3x3", samples=args.samples, seed=args.seed, shards=args.shards
        )
        payload["mc"] = {
            "relaxation": "minor14+3x3",
            "value": est.value,
            "stderr": est.stderr,
            "samples": est.samples,
            "seed": est.seed,
            "shards": est.shards,
        }
    _emit(canonical_json(payload), args.out)
    return 0


def _cmd_bench(args):
    spec = _resolve_scenario(args.scenario)
    results = []
    names = available_backends()
    if "numba" in names:
        # exclude JIT compilation from the timed run
        set_backend("numba")
        estimate_c(spec, samples=2000, seed=args.seed)
    for name in names:
        set_backend(name)
        t0 = time.perf_counter()
        vols = estimate_volumes(spec, samples=args.samples, seed=args.seed)
        dt = time.perf_counter() - t0
        results.append(
            {
                "backend": name,
                "seconds": dt,
                "samples_per_second": args.samples / dt,
                "V_tot": vols.V_tot.value,
                "P": vols.P.value,
                "accepted": vols.V_tot.accepted,
            }
        )
    set_backend(None)
    agree = all(
        r["accepted"] == results[0]["accepted"]
        and r["V_tot"] == results[0]["V_tot"]
        and r["P"] == results[0]["P"]
        for r in results
    )
    payload = {
        "schema": SCHEMA,
        "command": "bench",
        "alias": scenario_alias(spec),
        "samples": args.samples,
        "seed": args.seed,
        "active_default": backend_name(),
        "backends": results,
        "identical_results": agree,
    }
    _emit(canonical_json(payload), args.out)
    return 0 if agree else 1


# ---------------------------------------------------------------------------


def _add_common(p, samples_default=DEFAULT_SAMPLES):
    p.add_argument("--samples", type=int, default=samples_default)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--shards", type=int, default=1)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", default=None, help="write the report to a file")


def build_parser():
    ap = argparse.ArgumentParser(
        prog="sepvol",
        description="Separability volumes and probabilities of sparse "
        "density matrices: seeded Monte Carlo vs the exact catalog.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scenarios", help="list cataloged scenarios")
    p.add_argument("--split", choices=sorted(SPLITS), default=None)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_scenarios)

    p = sub.add_parser("show", help="print one catalog entry")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_show)

    p = sub.add_parser("estimate", help="Monte Carlo estimate of one quantity")
    p.add_argument("--scenario", required=True)
    p.add_argument("--quantity", choices=_QUANTITIES, default="P")
    p.add_argument("--nu", default=None, help="ratio point for S (comma separated)")
    _add_common(p)
    p.set_defaults(fn=_cmd_estimate)

    p = sub.add_parser("sweep", help="S(nu) over a grid")
    p.add_argument("--scenario", required=True)
    p.add_argument("--grid", required=True, help='"a:b:steps" or "a:b:steps,log"')
    p.add_argument("--no-closed", action="store_true")
    _add_common(p)
    p.set_defaults(fn=_cmd_sweep, format="csv")

    p = sub.add_parser("verify", help="suite comparison with CI exit code")
    p.add_argument("--suite", required=True)
    _add_common(p, samples_default=VERIFY_DEFAULT_SAMPLES)
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("bounds", help="relaxed-test probability bounds")
    p.add_argument("--mc", action="store_true", help="add a Monte Carlo cross-check")
    _add_common(p, samples_default=400_000)
    p.set_defaults(fn=_cmd_bounds)

    p = sub.add_parser("bench", help="compare kernel backends on one scenario")
    p.add_argument("--scenario", default="qq-real-12-13-14-23-24-34")
    _add_common(p, samples_default=1_000_000)
    p.set_defaults(fn=_cmd_bench)

    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except (
        ValueError,
        KeyError,
        cf.NotCatalogedError,
        UnknownSuiteError,
        json.JSONDecodeError,
    ) as exc:
        print("sepvol: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

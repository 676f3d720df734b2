"""Command line entry point.

Structured results go to stdout as a single JSON object (or CSV with
``--csv`` for tabular commands); diagnostics go to stderr.

Exit codes: 0 ok, 2 bad input, 3 solver failure, 4 unsupported method or
dimension, 5 property violation.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from fractions import Fraction

import numpy as np

from . import bounds, controls, properties, volume
from .bounds import Kind
from .core import as_vector
from .errors import AlohaError, DimensionTooLarge, NonConvergence
from .membership import BOUNDARY_TOL, boundary_point, classify

EXIT_OK, EXIT_PARSE, EXIT_SOLVER, EXIT_METHOD, EXIT_VIOLATION = 0, 2, 3, 4, 5
TABLE_ORDER = ("so_star", "po", "po_and_so", "eo", "lambda", "ei", "si_star", "pi_star", "srs")


class UnsupportedMethod(AlohaError):
    pass


# -- formatting -------------------------------------------------------------

def num(v):
    """Float rounded to 12 significant digits; non-finite values become strings."""
    if v is None:
        return None
    v = float(v)
    if not math.isfinite(v):
        return "inf" if v > 0 else ("-inf" if v < 0 else "nan")
    return float(f"{v:.12g}")


def vec(v):
    return [num(t) for t in np.asarray(v, dtype=float).ravel()]


def frac(q: Fraction) -> dict:
    return {"fraction": f"{q.numerator}/{q.denominator}", "decimal": num(q)}


def emit(record: dict, out=None) -> None:
    out = out or sys.stdout
    out.write(json.dumps(record, indent=2, allow_nan=False) + "\n")


def emit_csv(header, rows, out=None) -> None:
    out = out or sys.stdout
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    out.write(buf.getvalue())


def cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return "inf" if math.isinf(v) else f"{v:.12g}"
    return str(v)


def diag(args, msg: str) -> None:
    if getattr(args, "verbose", False):
        print(msg, file=sys.stderr)


# -- parsing ----------------------------------------------------------------

def parse_rates(text: str) -> np.ndarray:
    try:
        vals = [float(Fraction(tok.strip())) for tok in text.split(",") if tok.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad rate list {text!r}: {exc}") from None
    if len(vals) < 2:
        raise argparse.ArgumentTypeError("need at least two rates")
    if any(v < 0 or not math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError("rates must be finite and non-negative")
    return as_vector(vals)


def parse_centers(text: str) -> list[float]:
    try:
        return [float(Fraction(t.strip())) for t in text.split(",") if t.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def parse_count(text: str) -> int:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if v != int(v) or v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return int(v)


def default_seed() -> int:
    raw = os.environ.get("ALOHA_SEED")
    if raw is None or raw == "":
        return 0
    try:
        return int(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"ALOHA_SEED is not an integer: {raw!r}") from None


# -- commands ---------------------------------------------------------------

def _report_dict(rep) -> dict:
    return {
        "class": rep.cls.value,
        "roots": vec(rep.roots),
        "controls": [vec(c) for c in rep.controls],
        "control_sums": [num(float(np.sum(c))) for c in rep.controls],
        "reduced_dims": list(rep.reduced_dims),
        "special_unit_vector": rep.special_unit_vector,
    }


def cmd_membership(args) -> int:
    rep = classify(args.rates, args.tol)
    emit({"command": "membership", "inputs": {"rates": vec(args.rates)},
          "results": _report_dict(rep), "tolerances": {"boundary": args.tol}})
    return EXIT_OK


def _volume_record(family: str, n: int, method: str, samples: int, seed: int,
                   alpha: float, c, workers: int, force: bool) -> dict:
    norm = math.factorial(n)
    if method == "exact":
        if family not in volume.EXACT:
            raise UnsupportedMethod(f"no exact volume for family {family!r}")
        fn = volume.EXACT[family]
        ev = fn(n, force=force) if family == "lambda" else fn(n)
        res = {"method": "exact", "volume": frac(ev.value), "normalized": frac(ev.value * norm)}
        if ev.terms is not None:
            res["terms"] = ev.terms
        return res
    est = volume.mc_volume(volume.family_predicate(family, c), n, samples, seed, alpha, workers)
    return {
        "method": "mc",
        "volume": num(est.v_hat),
        "normalized": num(est.v_hat * norm),
        "hits": est.hits,
        "samples": est.samples,
        "delta_rel": num(est.delta_rel),
        "half_width": num(est.half_width),
        "alpha": num(alpha),
        "degenerate": est.degenerate,
    }


def cmd_volume(args) -> int:
    seed = args.seed if args.seed is not None else default_seed()
    t0 = time.perf_counter()
    res = _volume_record(args.set, args.n, args.method, args.samples, seed,
                         args.alpha, args.c, args.workers, args.force)
    diag(args, f"volume: {time.perf_counter() - t0:.3f}s")
    inputs = {"set": args.set, "n": args.n, "method": args.method}
    if args.method == "mc":
        inputs.update(samples=args.samples, c=num(args.c), alpha=num(args.alpha))
    emit({"command": "volume", "inputs": inputs, "results": res,
          "seed": seed if args.method == "mc" else None})
    return EXIT_OK


def table_cells(n_min: int, n_max: int, samples: int, seed: int, alpha: float,
                workers: int, c_ellipsoid: float):
    """Volume estimate per (family, n): (value, delta_rel or None, method)."""
    out = {}
    for fam in TABLE_ORDER:
        for n in range(n_min, n_max + 1):
            exact = fam in volume.EXACT and not (fam == "lambda" and n > volume.N_MAX_EXACT)
            if exact:
                out[fam, n] = (volume.EXACT[fam](n).float_value, None, "exact")
            else:
                c = c_ellipsoid if fam in ("ei", "eo") else None
                est = volume.mc_volume(volume.family_predicate(fam, c), n, samples, seed, alpha, workers)
                out[fam, n] = (est.v_hat, est.delta_rel, "mc")
    return out


def cmd_table(args) -> int:
    seed = args.seed if args.seed is not None else default_seed()
    if not 2 <= args.n_min <= args.n_max <= 7:
        raise argparse.ArgumentTypeError("need 2 <= n_min <= n_max <= 7")
    t0 = time.perf_counter()
    cells = table_cells(args.n_min, args.n_max, args.samples, seed, args.alpha,
                        args.workers, args.c_ellipsoid)
    diag(args, f"table: {time.perf_counter() - t0:.3f}s")
    ns = list(range(args.n_min, args.n_max + 1))
    if args.csv:
        header = ["table", "family"] + [f"{k}{n}" for n in ns for k in ("v", "d")]
        rows = []
        for tab in ("raw", "normalized"):
            for fam in TABLE_ORDER:
                row = [tab, fam]
                for n in ns:
                    v, d, _ = cells[fam, n]
                    row += [cell(v * (math.factorial(n) if tab == "normalized" else 1)), cell(d)]
                rows.append(row)
        emit_csv(header, rows)
        return EXIT_OK
    res = {}
    for tab in ("raw", "normalized"):
        res[tab] = [{
            "family": fam,
            "cells": [{"n": n, "value": num(cells[fam, n][0] * (math.factorial(n) if tab == "normalized" else 1)),
                       "delta_rel": num(cells[fam, n][1]), "method": cells[fam, n][2]} for n in ns],
        } for fam in TABLE_ORDER]
    emit({"command": "table",
          "inputs": {"n_min": args.n_min, "n_max": args.n_max, "samples": args.samples,
                     "alpha": num(args.alpha), "c_ellipsoid": num(args.c_ellipsoid)},
          "results": res, "seed": seed})
    return EXIT_OK


def cmd_bounds(args) -> int:
    x = args.rates
    n = x.size
    rep = classify(x)
    si = bounds.sphere_params(n, args.c_si, Kind.INNER)
    so = bounds.sphere_params(n, args.c_so, Kind.OUTER)
    po = bounds.in_po(x)
    fam = {
        "srs": bounds.in_srs(x),
        "pi_star": bounds.in_pi_star(x),
        "si": bounds.in_sphere_bound(x, si),
        "ei": bounds.in_ei(x, args.c_e),
        "po": po,
        "so": bounds.in_sphere_bound(x, so),
        "eo": bounds.in_eo(x, args.c_e),
    }
    fam["po_and_so"] = fam["po"] and fam["so"]
    flags = [f"inner bound {k} contains a point outside the region"
             for k in ("srs", "pi_star", "si", "ei") if fam[k] and not rep.is_member]
    flags += [f"region point outside outer bound {k}"
              for k in ("po", "so", "eo", "po_and_so") if rep.is_member and not fam[k]]
    emit({"command": "bounds", "inputs": {"rates": vec(x), "c_si": num(si.c), "c_so": num(so.c),
                                          "c_e": num(args.c_e)},
          "results": {"class": rep.cls.value, "families": fam, "flags": flags}})
    return EXIT_VIOLATION if flags else EXIT_OK


def facet_grid(n: int, density: int):
    """Points k/(density-1) of the probability facet, k a composition."""
    m = density - 1

    def comps(total, parts):
        if parts == 1:
            yield (total,)
            return
        for k in range(total + 1):
            for rest in comps(total - k, parts - 1):
                yield (k,) + rest

    for c in comps(m, n):
        yield np.array(c, dtype=float) / m


def cmd_boundary_cloud(args) -> int:
    if args.density < 2:
        raise argparse.ArgumentTypeError("density must be at least 2")
    pts = [boundary_point(p, tol=1e-9) for p in facet_grid(args.n, args.density)]
    if args.csv:
        emit_csv([f"x{i + 1}" for i in range(args.n)], [[cell(float(v)) for v in x] for x in pts])
    else:
        emit({"command": "boundary-cloud", "inputs": {"n": args.n, "density": args.density},
              "results": {"points": [vec(x) for x in pts]}})
    return EXIT_OK


def _probe_record(kind, inputs, report_fields, violations, seed):
    emit({"command": "probe", "inputs": dict(kind=kind, **inputs),
          "results": dict(violations=violations, **report_fields), "seed": seed})
    return EXIT_VIOLATION if violations else EXIT_OK


def cmd_probe(args) -> int:
    seed = args.seed if args.seed is not None else default_seed()
    kind = args.kind
    if kind in ("convexity", "sublevel"):
        if args.rates is None:
            raise argparse.ArgumentTypeError(f"probe {kind} needs --rates")
        ctx = controls.ExcessRateContext(args.rates)
        if kind == "convexity":
            rep = controls.convexity_probe(ctx, args.trials, seed)
            inputs = {"rates": vec(args.rates), "trials": args.trials}
        else:
            level = args.level if args.level is not None else 0.0
            rep = controls.sublevel_probe(ctx, args.index, level, args.trials, seed)
            inputs = {"rates": vec(args.rates), "index": args.index, "level": num(level),
                      "trials": args.trials}
        fields = {"checks": rep.checks, "attempts": rep.attempts,
                  "extremes": {k: num(v) for k, v in rep.extremes.items()}}
        return _probe_record(kind, inputs, fields, rep.violations, seed)
    if kind == "pseudoconvexity":
        n = args.rates.size if args.rates is not None else args.n
        ctx = controls.ExcessRateContext(args.rates if args.rates is not None else np.zeros(n))
        rep = controls.pseudoconvexity_probe(ctx, args.index, args.trials, seed)
        fields = {"checks": rep.checks, "extremes": {k: num(v) for k, v in rep.extremes.items()}}
        return _probe_record(kind, {"n": n, "index": args.index, "trials": args.trials},
                             fields, rep.violations, seed)
    rng = volume.chunk_generator(seed, 0)
    n, k = args.n, args.samples
    if kind == "sandwich":
        X = np.vstack([properties.sample_cube(rng, k, n), properties.sample_simplex(rng, k, n)])
        rep = properties.sandwich_suite(X, args.c_e)
        inputs = {"n": n, "samples": k, "c_e": num(args.c_e)}
    else:
        centers = args.c if args.c else [bounds.c_in_star(n), 1.5, 2.0, 4.0]
        X = properties.sample_simplex(rng, k, n)
        rep = properties.monotonicity_suite(X, args.family, centers)
        inputs = {"n": n, "samples": k, "family": args.family, "c": [num(c) for c in centers]}
    fields = {"points": int(X.shape[0]), "per_check": rep.violations, "members": rep.members}
    return _probe_record(kind, inputs, fields, rep.total_violations, seed)


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="aloha-region",
                                 description="Stability region of slotted Aloha: membership, bounds, volumes.")
    ap.add_argument("-v", "--verbose", action="store_true", help="timing diagnostics on stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("membership", help="classify a rate vector")
    p.add_argument("--rates", type=parse_rates, required=True)
    p.add_argument("--tol", type=float, default=BOUNDARY_TOL)
    p.set_defaults(func=cmd_membership)

    p = sub.add_parser("volume", help="exact or Monte-Carlo volume of one family")
    p.add_argument("--set", choices=volume.FAMILIES, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--method", choices=("exact", "mc"), default="exact")
    p.add_argument("--samples", type=parse_count, default=10 ** 6)
    p.add_argument("--seed", type=int)
    p.add_argument("--c", type=float, help="centre for sphere/ellipsoid families")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--force", action="store_true", help="allow exact lambda above n=6")
    p.set_defaults(func=cmd_volume)

    p = sub.add_parser("table", help="raw and normalized volume tables")
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=6)
    p.add_argument("--samples", type=parse_count, default=10 ** 6)
    p.add_argument("--seed", type=int)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--c-ellipsoid", type=float, default=2.0)
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("bounds", help="membership of a point in every bound family")
    p.add_argument("--rates", type=parse_rates, required=True)
    p.add_argument("--c-si", type=float, help="inner sphere centre (default optimal)")
    p.add_argument("--c-so", type=float, help="outer sphere centre (default 1)")
    p.add_argument("--c-e", type=float, default=2.0, help="ellipsoid centre")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("boundary-cloud", help="boundary points over a facet grid")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--density", type=int, default=101)
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_boundary_cloud)

    p = sub.add_parser("probe", help="run a property suite")
    p.add_argument("kind", choices=("convexity", "pseudoconvexity", "sublevel", "sandwich", "monotonicity"))
    p.add_argument("--rates", type=parse_rates)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--index", type=int, default=0)
    p.add_argument("--level", type=float)
    p.add_argument("--trials", type=parse_count, default=1000)
    p.add_argument("--samples", type=parse_count, default=10 ** 5)
    p.add_argument("--seed", type=int)
    p.add_argument("--family", choices=("ei", "eo", "si"), default="ei")
    p.add_argument("--c", type=parse_centers)
    p.add_argument("--c-e", type=float, default=2.0)
    p.set_defaults(func=cmd_probe)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except argparse.ArgumentTypeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NonConvergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (UnsupportedMethod, DimensionTooLarge) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_METHOD
    except (AlohaError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())

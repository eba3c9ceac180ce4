"""Command-line driver: ``bridgegauss <subcommand> ...`` writes one JSON report to stdout."""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from dataclasses import replace
from importlib import resources

import numpy as np

from . import bridge_quad as bq
from . import feynman_kac as fk
from . import newtonian as nt
from . import potentials as pot
from . import schrodinger as sch
from .kernel import BridgeSpec, DomainError, heat_kernel

SCHEMA = 1


# ---------------------------------------------------------------------------
# configuration


def load_defaults() -> dict:
    path = os.environ.get("BRIDGEGAUSS_DEFAULTS")
    if path:
        with open(path) as fh:
            return json.load(fh)
    return json.loads(resources.files("bridgegauss").joinpath("defaults.json").read_text())


class Context:
    def __init__(self, args, defaults: dict):
        self.args = args
        self.defaults = defaults
        q = dict(defaults["quad"])
        if getattr(args, "tol", None) is not None:
            q["rel_tol"] = args.tol
        q["threads"] = max(1, getattr(args, "threads", 1) or 1)
        self.quad = bq.QuadConfig(**q)
        m = dict(defaults["mc"])
        for key in ("seed", "paths", "steps"):
            if getattr(args, key, None) is not None:
                m[key] = getattr(args, key)
        m["threads"] = self.quad.threads
        self.mc = fk.McConfig(**m)
        self.series = replace(sch.DEFAULT_SERIES, **defaults.get("series", {}))
        self.flags: list[str] = []

    def echo(self) -> dict:
        return {"quad": _asdict(self.quad), "mc": _asdict(self.mc), "series": _asdict(self.series),
                "grid": self.defaults.get("grid"), "time_grid_points": self.defaults.get("time_grid_points")}


def _asdict(obj) -> dict:
    return {k: getattr(obj, k) for k in obj.__dataclass_fields__}


def parse_point(text: str | None, dim: int) -> np.ndarray:
    if text is None:
        return np.zeros(dim)
    vals = [float(v) for v in text.split(",") if v.strip()]
    if len(vals) == 1 and dim > 1:
        vals = vals + [0.0] * (dim - 1)
    if len(vals) != dim:
        raise DomainError(f"point {text!r} has {len(vals)} coordinates, potential lives in R^{dim}")
    return np.array(vals)


def load_potential(text: str) -> pot.Potential:
    if text is None:
        raise DomainError("--potential is required")
    if os.path.exists(text):
        with open(text) as fh:
            obj = json.load(fh)
    else:
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DomainError(f"--potential is neither a file nor valid JSON: {exc}") from exc
    return pot.potential_from_json(obj)


def parse_grid(text: str | None, V: pot.Potential, ctx: Context) -> bq.PairGrid:
    """``default`` | ``origin`` | ``radii:0,0.5,1`` | ``pairs:[[x, y], ...]``."""
    g = ctx.defaults.get("grid", {})
    if text is None or text == "default":
        return bq.default_grid(V, g.get("radii", bq.DEFAULT_RADII), g.get("antipodal", True))
    if text == "origin":
        return bq.origin_grid(V.dim)
    if text.startswith("radii:"):
        radii = [float(r) for r in text[6:].split(",")]
        return bq.default_grid(V, radii, g.get("antipodal", True))
    if text.startswith("pairs:"):
        return bq.PairGrid.from_pairs(json.loads(text[6:]), "explicit pairs")
    raise DomainError(f"unknown grid spec {text!r}")


# ---------------------------------------------------------------------------
# output


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def dumps(obj, indent: int = 0) -> str:
    """JSON with floats at 17 significant digits; non-finite floats become strings."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {dumps(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if math.isnan(obj):
            return '"nan"'
        if math.isinf(obj):
            return '"inf"' if obj > 0 else '"-inf"'
        return format(obj, ".17g")
    return json.dumps(obj)


def _sres(r: bq.SResult) -> dict:
    return {"value": r.value, "error": r.error, "divergent": r.divergent,
            "partial_lower_bounds": {f"{k:.0e}": v for k, v in sorted(r.partial.items(), reverse=True)},
            "endpoint_exponents": list(r.endpoint_exponents), "flags": r.flags}


def _sup(est: bq.SupEstimate) -> dict:
    return {"value": est.value, "arg": {"x": list(est.arg[0]), "y": list(est.arg[1])}, "grid_spec": est.grid_spec,
            "is_lower_bound": True, "divergent": est.divergent}


# ---------------------------------------------------------------------------
# subcommands


def cmd_eval_s(ctx: Context) -> dict:
    a = ctx.args
    V = load_potential(a.potential)
    spec = BridgeSpec(a.t, parse_point(a.x, V.dim), parse_point(a.y, V.dim))
    r = bq.s_value(V, spec, ctx.quad, partial=a.partial)
    return {"S": _sres(r), "divergent": r.divergent}


def _time_grid(T: float, ctx: Context) -> list[float]:
    return bq.default_time_grid(T, ctx.defaults.get("time_grid_points", 6))


def cmd_sup_s(ctx: Context) -> dict:
    a = ctx.args
    V = load_potential(a.potential)
    grid = parse_grid(a.grid, V, ctx)
    times = _time_grid(a.t, ctx)
    # one sweep serves both f and its running maximum F
    F = bq.F_sup(V, a.t, grid, ctx.quad, times=times)
    f = bq.f_sup(V, a.t, grid, ctx.quad)
    table = [{"t": t, "f_hat": v} for t, v in F.table]
    return {"f_hat": _sup(f), "F_hat": _sup(F), "table": table, "flags": sorted(set(f.flags) | set(F.flags))}


def cmd_newtonian(ctx: Context) -> dict:
    a = ctx.args
    V = load_potential(a.potential)
    x = parse_point(a.x, V.dim)
    r = nt.newtonian(V, x, ctx.quad, method=a.method)
    out = {"value": r.value, "at": list(r.at), "method": r.method, "error": r.error, "flags": r.flags}
    if a.sup:
        s = nt.potential_bound_sup(V, cfg=ctx.quad)
        out["sup"] = {"value": s.value, "arg": list(s.arg), "certified_at_origin": s.certified_at_origin,
                      "grid_spec": s.grid_spec}
    return out


def _series(V, spec, ctx):
    est = sch.g_series(V, spec, ctx.quad, series_cfg=ctx.series)
    return {"G": est.value, "ratio": est.ratio, "n_max": est.n_max, "eta": est.eta, "h": est.h,
            "truncation_bound": est.truncation_bound, "tail_bound": est.tail_bound,
            "discretization_error": est.discretization_error, "terms": est.terms, "flags": est.flags}


def _mc(V, spec, ctx):
    est = fk.g_ratio_mc(V, spec, ctx.mc)
    g = heat_kernel(spec.t, spec.x, spec.y)
    return {"G": g * est.mean, "ratio": est.mean, "std_error": est.std_error, "paths_used": est.paths_used,
            "steps": est.steps, "seed": est.seed, "clipped_fraction": est.clipped_fraction, "flags": est.flags}


def cmd_g(ctx: Context) -> dict:
    a = ctx.args
    V = load_potential(a.potential)
    spec = BridgeSpec(a.t, parse_point(a.x, V.dim), parse_point(a.y, V.dim))
    out = {"g": heat_kernel(spec.t, spec.x, spec.y)}
    methods = ["series", "mc"] if a.cross_check else [a.method]
    for m in methods:
        try:
            out[m] = _series(V, spec, ctx) if m == "series" else _mc(V, spec, ctx)
        except NotImplementedError as exc:
            out[m] = {"unavailable": str(exc)}
            ctx.flags.append(f"{m}_unavailable")
    if a.cross_check and "ratio" in out.get("series", {}) and "ratio" in out.get("mc", {}):
        se = out["mc"]["std_error"]
        diff = abs(out["series"]["ratio"] - out["mc"]["ratio"])
        sigmas = diff / se if se > 0 else (0.0 if diff <= out["series"]["truncation_bound"] / out["g"] else math.inf)
        out["agreement_sigmas"] = sigmas
        out["agree_within_3_sigma"] = bool(sigmas <= 3.0)
        if sigmas > 3.0:
            ctx.flags.append("error:cross_check_disagreement")
    return out


def cmd_envelope(ctx: Context) -> dict:
    a = ctx.args
    V = load_potential(a.potential)
    spec = BridgeSpec(a.t, parse_point(a.x, V.dim), parse_point(a.y, V.dim))
    ratio = None
    if not sch.series_supported(V, spec):
        est = fk.g_ratio_mc(V, spec, ctx.mc)
        ratio = (est.mean, 3.0 * est.std_error, "mc")
    rep = sch.envelope_check(V, spec, a.h, ctx.quad, ratio=ratio, series_cfg=ctx.series)
    if rep.passed is False:
        ctx.flags.append("error:envelope_violated")
    return {"ratio": rep.ratio, "lower": rep.lower, "upper": rep.upper, "h": rep.h, "eta": rep.eta,
            "pass": rep.passed, "method": rep.method, "ratio_error": rep.ratio_error, "flags": rep.flags}


def _bounds_report(V: pot.Potential, T: float, grid, ctx: Context) -> dict:
    out = {"zhang_a": [], "extended_a": [], "chains": []}
    d = V.dim
    for p in (d / 2 + 0.5, float(d), 2.0 * d, math.inf):
        if p <= d / 2:
            continue
        try:
            out["zhang_a"].append({"p": p, "bound_at_T": bq.zhang_bound_a(V, p, T)})
        except DomainError as exc:
            out["zhang_a"].append({"p": p, "hypothesis": f"fails: {exc}"})
    chains = bq.admissible_chains(V)
    for ch in chains:
        entry = dict(ch)
        if ch["factor_order"] == "as_given":
            try:
                entry["extended_bound_at_T"] = bq.extended_bound_a(V, ch["r"], ch["p2"], T)
            except DomainError as exc:
                entry["extended_bound_at_T"] = f"fails: {exc}"
        out["chains"].append(entry)
    return out


def cmd_diagnose(ctx: Context) -> dict:
    a = ctx.args
    V = load_potential(a.potential)
    grid = parse_grid(a.grid, V, ctx)
    T = a.t
    times = _time_grid(T, ctx)
    F = bq.F_sup(V, T, grid, ctx.quad, times=times)
    out = {"f_hat_table": [{"t": t, "f_hat": v} for t, v in F.table], "F_hat": _sup(F)}
    signs = V.is_single_signed()
    if not V.terms or (signs and V.sign() < 0):
        try:
            le = sch.lower_exp_constants(V, T, grid, ctx.quad, times=times)
            out["lower_exp"] = {"C": le.C, "c": le.c, "F_T": le.F_T, "f_T": le.f_T}
        except DomainError as exc:
            out["lower_exp"] = {"refused": str(exc)}
    out["bounds"] = _bounds_report(V, T, grid, ctx)
    out["hypothesis_chain_certified"] = any(c["chain_holds"] for c in out["bounds"]["chains"])
    measured = F.value
    checks = []
    for entry in out["bounds"]["zhang_a"] + out["bounds"]["chains"]:
        b = entry.get("bound_at_T", entry.get("extended_bound_at_T"))
        if isinstance(b, float):
            checks.append(measured <= b * (1 + 1e-9))
    out["bounds_respected"] = all(checks) if checks else None
    if checks and not all(checks):
        ctx.flags.append("error:bound_violated")
    return out


# ---------------------------------------------------------------------------
# verify-example


def _check(results: list, name: str, ok: bool, **values):
    results.append({"check": name, "pass": bool(ok), **values})


def _verify_ld2(ctx: Context) -> list:
    res = []
    V = pot.ld2(2.0, 3)
    prof = V.terms[0].factors[0].profile
    _check(res, "norm_finite_below_p", math.isfinite(prof.lp_norm(1.5, 1)), q=1.5, norm=prof.lp_norm(1.5, 1))
    _check(res, "norm_infinite_at_p", math.isinf(prof.lp_norm(2.0, 1)), q=2.0)
    chains = [c for c in bq.admissible_chains(V) if c["factor_order"] == "as_given" and c["chain_holds"]]
    _check(res, "hypothesis_chain", bool(chains), chain=chains[0] if chains else None)
    if chains:
        ch = chains[0]
        grid = bq.default_grid(V)
        for t in (0.1, 1.0, 10.0):
            f = bq.f_sup(V, t, grid, ctx.quad)
            b = bq.extended_bound_a(V, ch["r"], ch["p2"], t)
            _check(res, f"sharp_local_bound_t={t:g}", f.value <= b, f_hat=f.value, bound=b)
    return res


def _verify_drugi(ctx: Context) -> list:
    res = []
    n = ctx.defaults.get("drugi_n_terms", 6)
    V = pot.drugi(n, 3)
    p = 1.5
    need = math.ceil(p / (p - 1))
    lows = [pot.drugi_lp_lower_bound(V, p, dl) for dl in (1e-4, 1e-8, 1e-12, 1e-16)]
    _check(res, f"Lp_lower_bounds_grow_p={p:g}", n >= need and all(b > a for a, b in zip(lows, lows[1:])),
           lower_bounds=lows, terms_needed=need)
    grid = bq.drugi_grid(3)
    F = bq.F_sup(V, max(bq.DRUGI_TIMES), grid, ctx.quad, times=bq.DRUGI_TIMES)
    cap = sum(1.0 / (k * k) for k in range(2, n + 1))
    _check(res, "S_sup_bounded_on_estimation_grid", F.value <= cap * (1 + 1e-6), F_hat=F.value, bound=cap,
           a_n=V.meta["a_n"], a_n_are=V.meta["a_n_are"])
    return res


def _verify_czwarty(ctx: Context) -> list:
    res = []
    V = pot.czwarty(3)
    s = nt.potential_bound_sup(V, cfg=ctx.quad)
    _check(res, "newtonian_sup_finite", math.isfinite(s.value), value=s.value, certified_at_origin=s.certified_at_origin)
    _check(res, "not_in_L1", math.isinf(V.lp_norm_bound(1.0)))
    F = bq.F_sup(V, 8.0, bq.default_grid(V), ctx.quad, times=[0.5, 2.0, 8.0])
    _check(res, "S_sup_finite_on_grid", math.isfinite(F.value), F_hat=F.value, grid=F.grid_spec)
    return res


def _verify_nfs2(ctx: Context) -> list:
    res = []
    f = pot.nfs2_factor(0.0)
    nv = nt.newtonian(f, np.zeros(3), ctx.quad)
    _check(res, "newtonian_V1_at_0", abs(nv.value - 0.5) < 1e-12, value=nv.value)
    F = bq.F_sup(f, 4.0, bq.default_grid(f), ctx.quad, times=[0.25, 1.0, 4.0])
    _check(res, "factor_S_bounded_on_grid", math.isfinite(F.value), F_hat=F.value)
    V = pot.nfs2(0.0)
    r = bq.s_value(V, BridgeSpec(1.0, np.zeros(6), np.zeros(6)), ctx.quad)
    _check(res, "product_S_divergent", r.divergent, partial_lower_bounds={f"{k:.0e}": v for k, v in r.partial.items()})
    lt = nt.local_time_bound(V, 1.0, cfg=ctx.quad)
    _check(res, "product_local_time_divergent", lt.divergent, decade_increments=lt.decade_increments)
    return res


def _ce_M(ctx: Context):
    V = pot.ce(3, ctx.defaults.get("drugi_n_terms", 6))
    grid = bq.drugi_grid(3)
    times = [0.5, 2.0, 8.0]
    F = bq.F_sup(V, 8.0, grid, ctx.quad, times=times)
    return V, grid, times, F


def _verify_ce(ctx: Context) -> list:
    res = []
    V, grid, times, F = _ce_M(ctx)
    _check(res, "S_sup_finite_on_grid", math.isfinite(F.value), M=F.value, grid=F.grid_spec)
    _check(res, "not_in_L1", math.isinf(V.lp_norm_bound(1.0)))
    lows = [pot.drugi_lp_lower_bound(pot.drugi(ctx.defaults.get("drugi_n_terms", 6), 3), 1.5, dl)
            for dl in (1e-4, 1e-8, 1e-12)]
    _check(res, "not_in_L1.5_locally", lows[0] < lows[1] < lows[2], lower_bounds=lows)
    return res


def _verify_ce_nonneg(ctx: Context) -> list:
    res = []
    V, grid, times, F = _ce_M(ctx)
    M = F.value
    W = pot.scale_shift(V, 1.0 / (M + 1.0))
    FW = bq.F_sup(W, 8.0, grid, ctx.quad, times=times)
    eta = M / (M + 1.0)
    _check(res, "eta_below_one", eta < 1, eta=eta, M=M)
    _check(res, "scaled_sup_matches_eta", abs(FW.value - eta) <= 1e-6 * eta, measured=FW.value)
    return res


EXAMPLES = {"ld2": _verify_ld2, "drugi": _verify_drugi, "czwarty": _verify_czwarty, "nfs2": _verify_nfs2,
            "ce": _verify_ce, "ce_nonneg": _verify_ce_nonneg}


def cmd_verify_example(ctx: Context) -> dict:
    checks = EXAMPLES[ctx.args.name](ctx)
    for c in checks:
        if not c["pass"]:
            ctx.flags.append(f"error:check_failed:{c['check']}")
    return {"example": ctx.args.name, "checks": checks, "all_pass": all(c["pass"] for c in checks)}


COMMANDS = {"eval-s": cmd_eval_s, "sup-s": cmd_sup_s, "newtonian": cmd_newtonian, "g": cmd_g,
            "envelope": cmd_envelope, "diagnose": cmd_diagnose, "verify-example": cmd_verify_example}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--potential", help="potential JSON file or inline JSON")
    common.add_argument("--t", type=float, default=1.0)
    common.add_argument("--x", help="comma-separated coordinates (default origin)")
    common.add_argument("--y", help="comma-separated coordinates (default origin)")
    common.add_argument("--tol", type=float, help="relative quadrature tolerance")
    common.add_argument("--seed", type=int)
    common.add_argument("--paths", type=int)
    common.add_argument("--steps", type=int)
    common.add_argument("--grid", help="default | origin | radii:r1,r2,... | pairs:<json>")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="JSON report (default)")
    fmt.add_argument("--csv", action="store_true", help="CSV table of f_hat(t) where available")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--timing", action="store_true", help="include wall_time in the report")

    p = argparse.ArgumentParser(prog="bridgegauss", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("eval-s", parents=[common], help="S(V, t, x, y)")
    s.add_argument("--partial", action="store_true", help="always report partial lower bounds")
    sub.add_parser("sup-s", parents=[common], help="grid estimates of f(t) and F(t)")
    s = sub.add_parser("newtonian", parents=[common], help="Newtonian potential of |V|")
    s.add_argument("--method", choices=["closed_form", "full_quadrature"], default=None)
    s.add_argument("--sup", action="store_true", help="also estimate the supremum over x")
    s = sub.add_parser("g", parents=[common], help="G(t, x, y) by series or Monte Carlo")
    s.add_argument("--method", choices=["series", "mc"], default="series")
    s.add_argument("--cross-check", action="store_true")
    s = sub.add_parser("envelope", parents=[common], help="two-sided Gaussian envelope check")
    s.add_argument("--h", type=float)
    sub.add_parser("diagnose", parents=[common], help="suprema, constants and bound hypotheses")
    s = sub.add_parser("verify-example", parents=[common], help="check list of a named example")
    s.add_argument("name", choices=sorted(EXAMPLES))
    return p


def _csv(report: dict) -> str:
    rows = report.get("results", {}).get("table") or report.get("results", {}).get("f_hat_table") or []
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "f_hat"])
    for r in rows:
        w.writerow([format(r["t"], ".17g"), format(r["f_hat"], ".17g")])
    return buf.getvalue()


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    report = {"schema": SCHEMA, "command": args.command, "argv": list(argv if argv is not None else sys.argv[1:])}
    code = 0
    try:
        ctx = Context(args, load_defaults())
        report["config"] = ctx.echo()
        report["results"] = COMMANDS[args.command](ctx)
        flags = list(ctx.flags)
    except (DomainError, ValueError, KeyError, OSError) as exc:
        flags = [f"error:{type(exc).__name__}: {exc}"]
        print(f"bridgegauss: {exc}", file=sys.stderr)
    report["flags"] = flags
    if any(f.startswith("error") for f in flags):
        code = 1 if "results" in report else 2
    elapsed = time.perf_counter() - start
    if args.timing:
        report["wall_time"] = elapsed
    else:
        print(f"wall_time {elapsed:.3f} s", file=sys.stderr)
    if args.csv:
        stdout.write(_csv(report))
    else:
        stdout.write(dumps(_clean(report)) + "\n")
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

"""Command dispatch for reproducible verification runs.

Exit codes: 0 all checks passed, 1 a mathematical check failed (the JSON
artifact carries the detail), 2 configuration or usage error.  Flags can
also be supplied through HOLOEXT_CONFIG / HOLOEXT_OUT / HOLOEXT_SEED /
HOLOEXT_THREADS; explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import analytic_bounds, reporting
from .config import ConfigError, RunConfig, parse_config
from .extension import adaptive_extend, certification_ladder
from .models import ModelPair, OracleDepthError
from .multiindex import graded_indices
from .phi_families import check_separation, check_superlinear, shift_bound
from .restriction import cauchy_jet, chain_constants, contour, restriction_bound
from .seminorms import backward_continuity_check, forward_continuity_check, roundtrip
from .sequences import (DualFitError, check_K_submultiplicative,
                        check_supermultiplicative, derive_dual, validate_alpha1,
                        validate_alpha2, validate_growth)
from .weight_function import eval_w, eval_w_grid, from_dual, lemma_gap_grid

SCHEMA_VERSION = 1

COMMAND_NAMES = ("verify-sequences", "weight-table", "lemma-scan", "phi-check",
                 "extend-eval", "cauchy-recover", "roundtrip", "report")

_MATH_ERRORS = (DualFitError, OracleDepthError, analytic_bounds.EnvelopeError)


@dataclass
class Context:
    outdir: Path
    seed: int
    threads: int
    figures: bool = True

    def tables(self) -> Path:
        return self.outdir / "tables"

    def figdir(self) -> Path:
        return self.outdir / "figures"


def _core(cfg: RunConfig):
    seq = cfg.build_sequence()
    dual = derive_dual(seq)
    weight = from_dual(dual)
    phi = cfg.build_phi()
    return seq, dual, weight, phi


def _require_dim1(cfg: RunConfig, command: str) -> None:
    if cfg["dim"] != 1:
        raise ConfigError(f"command {command} runs one-dimensional sweeps", key="dim")


def _alpha_str(alpha) -> str:
    return "|".join(str(a) for a in alpha)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_verify_sequences(cfg: RunConfig, ctx: Context) -> tuple[int, dict]:
    seq = cfg.build_sequence()
    checks: dict = {}
    rep_a1 = validate_alpha1(seq)
    checks["alpha1"] = rep_a1.to_json()
    rep_gr = validate_growth(seq, threshold=cfg["growth.threshold"])
    checks["growth"] = rep_gr.to_json()
    certs = validate_alpha2(seq, cfg["eps_list"])
    checks["alpha2"] = [c.to_json() for c in certs]
    alpha2_ok = all(c.root_trend_ok for c in certs)
    p_max = min(cfg["supermult.p_max"], seq.k_max // 2)
    rep_sm = check_supermultiplicative(seq, p_max)
    checks["supermultiplicative"] = rep_sm.to_json()

    dual_ok = True
    rows = []
    try:
        dual = derive_dual(seq)
        rep_ksm = check_K_submultiplicative(dual, min(p_max, dual.m_max // 2))
        checks["K_submultiplicative"] = rep_ksm.to_json()
        checks["constants"] = {"t1": dual.t1, "t2": dual.t2,
                               "ln_t1": dual.ln_t1, "ln_t2": dual.ln_t2}
        for k in range(seq.k_max + 1):
            h = seq.log_fact[k] - seq.log_terms[k]
            rows.append([k, seq.log_fact[k], seq.log_terms[k], dual.log_terms[k],
                         abs(h - dual.log_terms[k]), dual.ln_t1 + k * dual.ln_t2])
    except DualFitError as exc:
        dual_ok = False
        rep_ksm = None
        checks["dual_fit_error"] = str(exc)
    reporting.write_csv(ctx.tables() / "sequence_table.csv",
                        ["k", "ln_fact", "ln_M", "ln_K", "sandwich_gap", "sandwich_budget"],
                        rows)

    ok = (rep_a1.passed and rep_gr.passed and alpha2_ok and rep_sm.passed
          and dual_ok and (rep_ksm is None or rep_ksm.passed))
    payload = {"schema": SCHEMA_VERSION, "config_sha256": cfg.digest,
               "pass": ok, "checks": checks}
    reporting.write_json(ctx.outdir / "verify_sequences.json", payload)
    return (0 if ok else 1), payload


def cmd_weight_table(cfg: RunConfig, ctx: Context) -> tuple[int, dict]:
    _, _, weight, _ = _core(cfg)
    r = cfg.r_grid()
    w_vals, m_stars, _ = eval_w_grid(weight, r)
    gaps, gap_trunc = lemma_gap_grid(weight, r)
    rows = [[float(r[i]), int(m_stars[i]), float(w_vals[i]), float(gaps[i]),
             bool(gap_trunc[i])] for i in range(len(r))]
    reporting.write_csv(ctx.tables() / "weight_table.csv",
                        ["r", "m_star", "w", "lemma_gap", "truncated"], rows)
    payload = {"schema": SCHEMA_VERSION, "config_sha256": cfg.digest, "pass": True,
               "rows": len(rows), "m_max": weight.m_max}
    reporting.write_json(ctx.outdir / "weight_table.json", payload)
    return 0, payload


def cmd_lemma_scan(cfg: RunConfig, ctx: Context) -> tuple[int, dict]:
    _, _, weight, _ = _core(cfg)
    r = cfg.r_grid()
    gaps, trunc = lemma_gap_grid(weight, r)
    rows = [[float(r[i]), float(gaps[i]), bool(trunc[i])] for i in range(len(r))]
    reporting.write_csv(ctx.tables() / "lemma_scan.csv", ["r", "gap", "truncated"], rows)
    unflagged = gaps[~trunc]
    n_unflagged = int(unflagged.size)
    min_gap = float(np.min(unflagged)) if n_unflagged else math.inf
    ok = n_unflagged > 0 and min_gap >= -cfg["lemma.tol"]
    payload = {
        "schema": SCHEMA_VERSION, "config_sha256": cfg.digest, "pass": ok,
        "min_unflagged_gap": min_gap, "n_unflagged": n_unflagged,
        "n_total": int(len(r)), "tol": cfg["lemma.tol"],
    }
    reporting.write_json(ctx.outdir / "lemma_scan.json", payload)
    return (0 if ok else 1), payload


def _shift_points(cfg: RunConfig) -> list[np.ndarray]:
    dim = cfg["dim"]
    pts = []
    for x in cfg.x_grid():
        v = np.zeros(dim)
        v[0] = x
        pts.append(v)
    return pts


_SHIFT_R_CAP = 4096.0


def _measure_shift(cfg: RunConfig, ctx: Context, phi, weight, m: int, delta: float):
    """Shift constant at (m, delta), stretching the radius sweep as needed.

    The turnover radius grows quickly as delta shrinks; a sweep that still
    rises at its end is re-run on a longer grid before divergence is
    believed.  Density stays proportional to the log span.
    """
    lo = cfg["grid.radius.min"]
    hi = cfg["grid.radius.max"]
    base_pts = cfg["grid.radius.points"]
    while True:
        n = max(base_pts, int(math.ceil(16.0 * math.log(hi / lo))))
        sb = shift_bound(phi, weight, m, delta, np.geomspace(lo, hi, n),
                         _shift_points(cfg), seed=ctx.seed)
        if not sb.diverged or hi >= _SHIFT_R_CAP:
            return sb
        hi *= 4.0


def cmd_phi_check(cfg: RunConfig, ctx: Context) -> tuple[int, dict]:
    seq, dual, weight, phi = _core(cfg)
    radii = np.geomspace(1.0, 100.0, 40)
    conditions = {}
    ok = True
    for m in cfg["m_list"]:
        sup = check_superlinear(phi, m, radii)
        sep = check_separation(phi, m, radii, threshold=cfg["separation.threshold"])
        conditions[f"m={m}"] = {"superlinear": sup.to_json(), "separation": sep.to_json()}
        ok = ok and sup.passed and sep.passed

    shifts = []
    rows = []
    for m in cfg["m_list"]:
        for delta in cfg["delta_list"]:
            sb = _measure_shift(cfg, ctx, phi, weight, m, delta)
            shifts.append(sb)
            ok = ok and not sb.diverged
            for r_val, excess in zip(sb.radii, sb.per_radius_max):
                rows.append([m, delta, r_val, excess])
    reporting.write_csv(ctx.tables() / "shift_bounds.csv",
                        ["m", "delta", "R", "excess"], rows)
    payload = {
        "schema": SCHEMA_VERSION, "config_sha256": cfg.digest, "pass": ok,
        "conditions": conditions,
        "shift_bounds": [sb.to_json() for sb in shifts],
    }
    reporting.write_json(ctx.outdir / "phi_check.json", payload)
    return (0 if ok else 1), payload


def cmd_extend_eval(cfg: RunConfig, ctx: Context) -> tuple[int, dict]:
    _require_dim1(cfg, "extend-eval")
    seq, dual, weight, phi = _core(cfg)
    m0, eps0 = cfg["m_list"][0], cfg["eps_list"][0]
    rows = []
    failures = []
    for pair in cfg.build_models():
        ladder = certification_ladder(pair, seq, phi, m0, eps0)
        for re in cfg["extend.z_re"]:
            for im in cfg["extend.z_im"]:
                z = np.array([complex(re, im)])
                try:
                    res = adaptive_extend(pair, z, cfg["tail_tol"], weights=seq,
                                          phi=phi, m=m0, eps=eps0, ladder=ladder)
                except OracleDepthError as exc:
                    failures.append({"model": pair.name, "re": re, "im": im,
                                     "error": str(exc)})
                    continue
                wv = eval_w(weight, 2.0 * eps0 * pair.dim * dual.t2 * abs(im))
                log_ratio = (math.log(abs(res.value)) if res.value != 0 else -math.inf) \
                    - phi.value(m0, np.array([re])) - wv.value
                ratio = math.exp(log_ratio) if log_ratio > -math.inf else 0.0
                rows.append([pair.name, float(re), float(im), res.value.real,
                             res.value.imag, res.n_used, float(res.tail_bound),
                             ratio, wv.truncated])
    reporting.write_csv(ctx.tables() / "extend_eval.csv",
                        ["model", "re", "im", "value_re", "value_im", "n_used",
                         "tail_bound", "ratio", "w_truncated"], rows)
    ok = not failures
    payload = {"schema": SCHEMA_VERSION, "config_sha256": cfg.digest, "pass": ok,
               "rows": len(rows), "failures": failures}
    reporting.write_json(ctx.outdir / "extend_eval.json", payload)
    return (0 if ok else 1), payload


def cmd_cauchy_recover(cfg: RunConfig, ctx: Context) -> tuple[int, dict]:
    _require_dim1(cfg, "cauchy-recover")
    seq, dual, weight, phi = _core(cfg)
    m0, eps0 = cfg["m_list"][0], cfg["eps_list"][0]
    alphas = list(graded_indices(1, cfg["roundtrip.alpha_max"]))
    sb = _measure_shift(cfg, ctx, phi, weight, m0, eps0)
    const = chain_constants(m0, eps0, phi.a_m(m0), dual.t1, dual.t2, 1, sb.b)

    rows = []
    worst_err = 0.0
    bound_violations = 0
    for pair in cfg.build_models():
        q_env = analytic_bounds.q_upper(pair, seq, phi, m0 + 1, eps0)
        for x0 in cfg["roundtrip.points"]:
            cont = contour([x0], cfg["contour.radius"], cfg["contour.nodes"])
            jets = cauchy_jet(pair.entire, cont, alphas)
            pv = phi.value(m0, np.array([x0]))
            for alpha in alphas:
                est = jets[alpha]
                oracle = pair.smooth.derivative(alpha, np.array([x0]))
                err = abs(est - oracle)
                worst_err = max(worst_err, err)
                cert = restriction_bound(math.nan, m0, eps0, const, dual, seq,
                                         alpha, pv, log_q_bound=q_env.log_value)
                log_est = math.log(abs(est)) if est != 0 else -math.inf
                if log_est > cert.log_value + 1e-9:
                    bound_violations += 1
                # bound serialized in the log domain: cells must stay finite
                rows.append([pair.name, float(x0), _alpha_str(alpha), est.real,
                             est.imag, oracle, err, cert.log_value])
    reporting.write_csv(ctx.tables() / "cauchy_recover.csv",
                        ["model", "x", "alpha", "estimate_re", "estimate_im",
                         "oracle", "abs_err", "certified_bound_log"], rows)
    ok = worst_err <= cfg["roundtrip.tol"] and bound_violations == 0 and not sb.diverged
    payload = {"schema": SCHEMA_VERSION, "config_sha256": cfg.digest, "pass": ok,
               "worst_abs_err": worst_err, "tol": cfg["roundtrip.tol"],
               "bound_violations": bound_violations, "shift_b": sb.b,
               "shift_diverged": sb.diverged}
    reporting.write_json(ctx.outdir / "cauchy_recover.json", payload)
    return (0 if ok else 1), payload


def cmd_roundtrip(cfg: RunConfig, ctx: Context) -> tuple[int, dict]:
    _require_dim1(cfg, "roundtrip")
    seq, dual, weight, phi = _core(cfg)
    m0, eps0 = cfg["m_list"][0], cfg["eps_list"][0]
    rows = []
    results = {}
    ok = True
    for pair in cfg.build_models():
        rep = roundtrip(pair, cfg["roundtrip.points"], cfg["roundtrip.alpha_max"],
                        cfg["roundtrip.tol"], seq=seq, phi=phi, m=m0, eps=eps0,
                        tail_tol=cfg["tail_tol"], radius=cfg["contour.radius"],
                        nodes=cfg["contour.nodes"], reverse_tol=cfg["reverse.tol"])
        results[pair.name] = rep.to_json()
        ok = ok and rep.passed
        for row in rep.rows:
            rows.append([pair.name, row["x"][0], _alpha_str(row["alpha"]),
                         row["estimate_re"], row["estimate_im"], row["oracle"],
                         row["abs_err"]])
    reporting.write_csv(ctx.tables() / "roundtrip.csv",
                        ["model", "x", "alpha", "estimate_re", "estimate_im",
                         "oracle", "abs_err"], rows)
    payload = {"schema": SCHEMA_VERSION, "config_sha256": cfg.digest, "pass": ok,
               "models": results}
    reporting.write_json(ctx.outdir / "roundtrip.json", payload)
    return (0 if ok else 1), payload


def cmd_report(cfg: RunConfig, ctx: Context) -> tuple[int, dict]:
    _require_dim1(cfg, "report")
    seq, dual, weight, phi = _core(cfg)
    checks: dict = {}
    codes = []

    for name, fn in (("verify_sequences", cmd_verify_sequences),
                     ("weight_table", cmd_weight_table),
                     ("lemma_scan", cmd_lemma_scan),
                     ("phi_check", cmd_phi_check),
                     ("extend_eval", cmd_extend_eval),
                     ("cauchy_recover", cmd_cauchy_recover),
                     ("roundtrip", cmd_roundtrip)):
        code, payload = fn(cfg, ctx)
        codes.append(code)
        checks[name] = {"pass": payload.get("pass", code == 0)}

    x_grid, y_grid = cfg.x_grid(), cfg.y_grid()
    continuity_rows = []
    cont_checks = []
    shift_cache: dict[tuple[int, float], object] = {}
    for pair in cfg.build_models():
        for m in cfg["m_list"]:
            for eps in cfg["eps_list"]:
                fwd = forward_continuity_check(pair, seq, dual, weight, phi, m, eps,
                                               x_grid, y_grid)
                key = (m, eps)
                if key not in shift_cache:
                    shift_cache[key] = _measure_shift(cfg, ctx, phi, weight, m, eps)
                bwd = backward_continuity_check(pair, seq, dual, weight, phi, m, eps,
                                                [np.array([x]) for x in x_grid],
                                                cfg["alpha_max"], shift_cache[key],
                                                radius=cfg["contour.radius"],
                                                nodes=max(64, cfg["contour.nodes"] // 2))
                for rep, direction in ((fwd, "forward"), (bwd, "backward")):
                    cont_checks.append(rep.to_json() | {"model": pair.name})
                    continuity_rows.append({
                        "model": pair.name, "direction": direction, "m": m,
                        "eps": eps, "slack_log": rep.slack_log, "pass": rep.passed,
                        "log_lhs": rep.log_lhs, "log_rhs": rep.log_rhs,
                    })
                codes.append(0 if fwd.passed and bwd.passed else 1)
    reporting.write_csv(
        ctx.tables() / "continuity.csv",
        ["model", "direction", "m", "eps", "log_lhs", "log_rhs", "slack_log", "pass"],
        [[r["model"], r["direction"], r["m"], r["eps"], r["log_lhs"], r["log_rhs"],
          r["slack_log"], r["pass"]] for r in continuity_rows])
    checks["continuity"] = {"pass": all(r["pass"] for r in continuity_rows),
                            "results": cont_checks}

    ok = all(c == 0 for c in codes)
    payload = {
        "schema": SCHEMA_VERSION,
        "config_sha256": cfg.digest,
        "seed": ctx.seed,
        "threads": ctx.threads,
        "pass": ok,
        "checks": checks,
        "artifacts": sorted(p.name for p in ctx.tables().glob("*.csv")),
    }
    reporting.write_json(ctx.outdir / "report.json", payload)

    if ctx.figures:
        _render_figures(cfg, ctx, continuity_rows)
    return (0 if ok else 1), payload


def _render_figures(cfg: RunConfig, ctx: Context, continuity_rows: list[dict]) -> None:
    import csv as _csv

    def read(name: str) -> list[dict]:
        with open(ctx.tables() / name, newline="", encoding="utf-8") as fh:
            return list(_csv.DictReader(fh))

    wt = [{"r": float(r["r"]), "w": float(r["w"]), "m_star": int(r["m_star"])}
          for r in read("weight_table.csv")]
    reporting.fig_weight_table(wt, ctx.figdir() / "weight_function.png")
    ls = [{"r": float(r["r"]), "gap": float(r["gap"]), "truncated": r["truncated"] == "1"}
          for r in read("lemma_scan.csv")]
    reporting.fig_lemma_gap(ls, ctx.figdir() / "lemma_gap.png")
    reporting.fig_continuity(continuity_rows, ctx.figdir() / "continuity_slack.png")
    rt = [{"model": r["model"], "alpha": [int(a) for a in r["alpha"].split("|")],
           "abs_err": float(r["abs_err"])} for r in read("roundtrip.csv")]
    reporting.fig_roundtrip(rt, ctx.figdir() / "roundtrip_errors.png")
    sb_rows = read("shift_bounds.csv")
    curves: dict[tuple[str, str], dict] = {}
    for r in sb_rows:
        key = (r["m"], r["delta"])
        cur = curves.setdefault(key, {"m": int(r["m"]), "delta": float(r["delta"]),
                                      "radii": [], "per_radius_max": []})
        cur["radii"].append(float(r["R"]))
        cur["per_radius_max"].append(float(r["excess"]))
    reporting.fig_shift_bound(list(curves.values()), ctx.figdir() / "shift_bound.png")


COMMANDS = {
    "verify-sequences": cmd_verify_sequences,
    "weight-table": cmd_weight_table,
    "lemma-scan": cmd_lemma_scan,
    "phi-check": cmd_phi_check,
    "extend-eval": cmd_extend_eval,
    "cauchy-recover": cmd_cauchy_recover,
    "roundtrip": cmd_roundtrip,
    "report": cmd_report,
}


def _int_env(name: str) -> int | None:
    raw = os.environ.get(name)
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError:
        return None


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="holoext",
        description="numerical verification of entire extension of smooth classes")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMAND_NAMES:
        p = sub.add_parser(name)
        p.add_argument("--config", default=os.environ.get("HOLOEXT_CONFIG"),
                       help="path to the run configuration")
        p.add_argument("--out", default=os.environ.get("HOLOEXT_OUT", "out"),
                       help="output directory")
        p.add_argument("--seed", type=int, default=None,
                       help="seed for sampled directions (default: config)")
        p.add_argument("--threads", type=int, default=None,
                       help="recorded worker count (sweeps are deterministic)")
        if name == "report":
            p.add_argument("--no-figures", action="store_true",
                           help="skip figure rendering")
    args = parser.parse_args(argv)

    if args.config is None:
        print("error: --config is required (or set HOLOEXT_CONFIG)", file=sys.stderr)
        return 2
    try:
        text = Path(args.config).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    try:
        cfg = parse_config(text)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    seed = args.seed if args.seed is not None else (_int_env("HOLOEXT_SEED") or cfg["seed"])
    threads = args.threads if args.threads is not None else (_int_env("HOLOEXT_THREADS") or 1)
    ctx = Context(outdir=Path(args.out), seed=seed, threads=threads,
                  figures=not getattr(args, "no_figures", False))
    ctx.outdir.mkdir(parents=True, exist_ok=True)

    try:
        code, payload = COMMANDS[args.command](cfg, ctx)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except _MATH_ERRORS as exc:
        detail = {"schema": SCHEMA_VERSION, "config_sha256": cfg.digest,
                  "pass": False, "error": str(exc)}
        reporting.write_json(ctx.outdir / "failure.json", detail)
        print(json.dumps({"command": args.command, "pass": False, "error": str(exc)}))
        return 1

    print(json.dumps({"command": args.command, "pass": code == 0,
                      "out": str(ctx.outdir)}))
    return code


if __name__ == "__main__":
    raise SystemExit(main())

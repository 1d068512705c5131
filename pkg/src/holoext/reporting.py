"""Deterministic CSV/JSON emission and the report figures.

Floats are serialized with 17 significant digits, JSON keys are sorted,
and nothing time- or host-dependent enters the output, so identical
config + seed reproduces every table byte for byte.  Non-finite numbers
never reach a CSV cell: the writer refuses them outright.  Figures are
rendered headlessly from the already-written table rows; they are a
convenience view of the CSVs, never an input to any check.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Iterable, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def fmt_float(x: float) -> str:
    return "%.17g" % x


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """Write a table; every numeric cell must be finite."""
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for v in row:
            if isinstance(v, bool):
                cells.append("1" if v else "0")
            elif isinstance(v, int):
                cells.append(str(v))
            elif isinstance(v, float):
                if not math.isfinite(v):
                    raise ValueError(f"non-finite cell {v!r} in {path.name}")
                cells.append(fmt_float(v))
            else:
                cells.append(str(v))
        lines.append(",".join(cells))
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _sanitize(obj: Any) -> Any:
    if isinstance(obj, float):
        if math.isnan(obj):
            return "nan"
        if obj == math.inf:
            return "inf"
        if obj == -math.inf:
            return "-inf"
        return obj
    if isinstance(obj, dict):
        return {str(k): _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    return obj


def write_json(path: Path, obj: Any) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_sanitize(obj), indent=2, sort_keys=True,
                               allow_nan=False) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# figures (rendered alongside the tables by the report command)
# ---------------------------------------------------------------------------

def _finish(fig, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def fig_weight_table(rows: list[dict], path: Path) -> None:
    r = [row["r"] for row in rows]
    w = [row["w"] for row in rows]
    m = [row["m_star"] for row in rows]
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6.5, 5.5), sharex=True)
    ax1.plot(r, w, lw=1.2)
    ax1.set_xscale("log")
    ax1.set_yscale("symlog")
    ax1.set_ylabel("w(r)")
    ax1.set_title("weight function and its trace index")
    ax2.step(r, m, where="post", lw=1.0, color="tab:orange")
    ax2.set_xscale("log")
    ax2.set_yscale("symlog")
    ax2.set_xlabel("r")
    ax2.set_ylabel("trace index")
    _finish(fig, path)


def fig_lemma_gap(rows: list[dict], path: Path) -> None:
    unflagged = [row for row in rows if not row["truncated"]]
    flagged = [row for row in rows if row["truncated"]]
    fig, ax = plt.subplots(figsize=(6.5, 4.0))
    if unflagged:
        ax.plot([r["r"] for r in unflagged], [r["gap"] for r in unflagged],
                ".", ms=3, label="unflagged")
    if flagged:
        ax.plot([r["r"] for r in flagged], [r["gap"] for r in flagged],
                "x", ms=3, color="tab:red", label="truncated (lower bound)")
    ax.axhline(0.0, color="k", lw=0.8)
    ax.set_xscale("log")
    ax.set_yscale("symlog", linthresh=1e-6)
    ax.set_xlabel("r")
    ax.set_ylabel("doubling-inequality gap")
    ax.set_title("gap of the weight-function doubling inequality")
    ax.legend(loc="best", fontsize=8)
    _finish(fig, path)


def fig_continuity(rows: list[dict], path: Path) -> None:
    fig, ax = plt.subplots(figsize=(6.5, 4.0))
    labels = [f"{r['model']}\n{r['direction']} m={r['m']} e={r['eps']:g}" for r in rows]
    slack = [r["slack_log"] for r in rows]
    colors = ["tab:green" if r["pass"] else "tab:red" for r in rows]
    ax.bar(range(len(rows)), slack, color=colors)
    ax.set_xticks(range(len(rows)))
    ax.set_xticklabels(labels, fontsize=6, rotation=45, ha="right")
    ax.set_ylabel("log slack (bound - estimate)")
    ax.set_title("continuity inequalities: slack in nats")
    _finish(fig, path)


def fig_roundtrip(rows: list[dict], path: Path) -> None:
    fig, ax = plt.subplots(figsize=(6.5, 4.0))
    markers = {"gaussian": "o", "cosine": "s", "polygauss": "^"}
    by_model: dict[str, list[tuple[int, float]]] = {}
    for row in rows:
        by_model.setdefault(row["model"], []).append(
            (sum(row["alpha"]) if isinstance(row["alpha"], (list, tuple)) else row["alpha"],
             row["abs_err"]))
    for name, pairs in sorted(by_model.items()):
        xs = [p[0] for p in pairs]
        ys = [max(p[1], 1e-18) for p in pairs]
        ax.semilogy(xs, ys, markers.get(name, "."), ms=4, ls="none", label=name)
    ax.set_xlabel("|alpha|")
    ax.set_ylabel("absolute recovery error")
    ax.set_title("derivative recovery error after extension")
    ax.legend(loc="best", fontsize=8)
    _finish(fig, path)


def fig_shift_bound(curves: list[dict], path: Path) -> None:
    fig, ax = plt.subplots(figsize=(6.5, 4.0))
    for c in curves:
        ax.plot(c["radii"], c["per_radius_max"], lw=1.0,
                label=f"m={c['m']} delta={c['delta']:g}")
    ax.axhline(0.0, color="k", lw=0.8)
    ax.set_xscale("log")
    ax.set_xlabel("R")
    ax.set_ylabel("sampled shift excess")
    ax.set_title("translation-inequality excess vs ball radius")
    ax.legend(loc="best", fontsize=8)
    _finish(fig, path)

"""Flat key-value run configuration.

Grammar, one entry per line:

    # comment (also allowed after a value)
    key = value

Keys are dotted lowercase words from the schema below; unknown keys are
rejected.  Values are typed per key: int, float, bool (true/false),
string, or a comma-separated list.  Every run is driven by one such file,
whose SHA-256 digest is stamped into every report for provenance.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .models import MODEL_NAMES, ModelPair, make_model
from .phi_families import PhiFamily, power_family
from .sequences import (DEFAULT_K_MAX, SequenceSpec, WeightSequence, from_spec)


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None, col: int | None = None,
                 key: str | None = None):
        loc = ""
        if line is not None:
            loc = f"line {line}" + (f", column {col}" if col is not None else "") + ": "
        if key is not None:
            loc += f"{key}: "
        super().__init__(loc + message)
        self.line = line
        self.col = col
        self.key = key


# key -> (type tag, default); None default means "absent unless set"
_SCHEMA: dict[str, tuple[str, Any]] = {
    "sequence.kind": ("str", "gevrey"),
    "sequence.s": ("float", 2.0 / 3.0),
    "sequence.c": ("float", 2.0),
    "sequence.log_terms": ("float_list", None),
    "sequence.k_max": ("int", DEFAULT_K_MAX),
    "phi.family": ("str", "power"),
    "phi.p": ("float", 2.0),
    "phi.a": ("float", 1.0),
    "phi.a_table": ("float_list", None),
    "phi.dim": ("int", None),
    "dim": ("int", 1),
    "models": ("str_list", ["gaussian", "cosine", "polygauss"]),
    "model.gaussian.c": ("float", 1.0),
    "model.polygauss.c": ("float", 1.0),
    "model.polygauss.coeffs": ("float_list", [1.0, 0.0, 1.0]),
    "m_list": ("int_list", [1, 2]),
    "eps_list": ("float_list", [0.5, 1.0]),
    "delta_list": ("float_list", [1.0]),
    "grid.r.min": ("float", 1e-6),
    "grid.r.max": ("float", 1e3),
    "grid.r.points": ("int", 500),
    "grid.x.min": ("float", -6.0),
    "grid.x.max": ("float", 6.0),
    "grid.x.points": ("int", 121),
    "grid.y.min": ("float", -6.0),
    "grid.y.max": ("float", 6.0),
    "grid.y.points": ("int", 121),
    "grid.radius.min": ("float", 0.25),
    "grid.radius.max": ("float", 8.0),
    "grid.radius.points": ("int", 64),
    "alpha_max": ("int", 10),
    "contour.radius": ("float", 1.0),
    "contour.nodes": ("int", 128),
    "tail_tol": ("float", 1e-10),
    "extend.z_re": ("float_list", [-2.0, -1.0, 0.0, 1.0, 2.0]),
    "extend.z_im": ("float_list", [-1.0, -0.5, 0.0, 0.5, 1.0]),
    "roundtrip.points": ("float_list", [-2.0, 0.0, 1.5]),
    "roundtrip.alpha_max": ("int", 6),
    "roundtrip.tol": ("float", 1e-8),
    "reverse.tol": ("float", 1e-6),
    "growth.threshold": ("float", 1.0),
    "separation.threshold": ("float", 1.0),
    "lemma.tol": ("float", 1e-12),
    "supermult.p_max": ("int", 20),
    "seed": ("int", 2026),
}


def _parse_scalar(token: str, tag: str, line: int, col: int, key: str):
    token = token.strip()
    try:
        if tag == "int":
            return int(token)
        if tag == "float":
            return float(token)
        if tag == "bool":
            if token.lower() in ("true", "false"):
                return token.lower() == "true"
            raise ValueError
        return token
    except ValueError:
        raise ConfigError(f"expected {tag}, got {token!r}", line, col, key) from None


def _parse_value(raw: str, tag: str, line: int, col: int, key: str):
    if tag.endswith("_list"):
        inner = tag[:-5]
        items = [t for t in raw.split(",")]
        if len(items) == 1 and not items[0].strip():
            raise ConfigError("empty list", line, col, key)
        return [_parse_scalar(t, inner, line, col, key) for t in items]
    return _parse_scalar(raw, tag, line, col, key)


@dataclass(frozen=True)
class RunConfig:
    values: dict[str, Any]
    text: str
    digest: str

    def __getitem__(self, key: str):
        return self.values[key]

    # -- builders -----------------------------------------------------

    def sequence_spec(self) -> SequenceSpec:
        v = self.values
        kind = v["sequence.kind"]
        try:
            if kind == "gevrey":
                return SequenceSpec(kind=kind, s=v["sequence.s"], k_max=v["sequence.k_max"])
            if kind == "geometric-gevrey":
                return SequenceSpec(kind=kind, s=v["sequence.s"], c=v["sequence.c"],
                                    k_max=v["sequence.k_max"])
            if kind == "explicit":
                terms = v["sequence.log_terms"]
                if terms is None:
                    raise ConfigError("explicit sequence needs sequence.log_terms",
                                      key="sequence.log_terms")
                return SequenceSpec(kind=kind, log_terms=tuple(terms),
                                    k_max=len(terms) - 1)
        except ValueError as exc:
            raise ConfigError(str(exc), key="sequence") from exc
        raise ConfigError(f"unknown kind {kind!r}", key="sequence.kind")

    def build_sequence(self) -> WeightSequence:
        return from_spec(self.sequence_spec())

    def build_phi(self) -> PhiFamily:
        v = self.values
        if v["phi.family"] != "power":
            raise ConfigError(f"unknown family {v['phi.family']!r}", key="phi.family")
        a = v["phi.a_table"] if v["phi.a_table"] is not None else v["phi.a"]
        try:
            return power_family(p=v["phi.p"], dim=self.phi_dim(), a=a)
        except ValueError as exc:
            raise ConfigError(str(exc), key="phi") from exc

    def phi_dim(self) -> int:
        v = self.values
        return v["phi.dim"] if v["phi.dim"] is not None else v["dim"]

    def build_models(self) -> list[ModelPair]:
        v = self.values
        out = []
        for name in v["models"]:
            try:
                if name == "gaussian":
                    out.append(make_model(name, dim=v["dim"], c=v["model.gaussian.c"]))
                elif name == "polygauss":
                    out.append(make_model(name, dim=v["dim"], c=v["model.polygauss.c"],
                                          coeffs=v["model.polygauss.coeffs"]))
                else:
                    out.append(make_model(name, dim=v["dim"]))
            except ValueError as exc:
                raise ConfigError(str(exc), key=f"model.{name}") from exc
        return out

    # -- grids ---------------------------------------------------------

    def r_grid(self) -> np.ndarray:
        v = self.values
        return np.geomspace(v["grid.r.min"], v["grid.r.max"], v["grid.r.points"])

    def x_grid(self) -> np.ndarray:
        v = self.values
        return np.linspace(v["grid.x.min"], v["grid.x.max"], v["grid.x.points"])

    def y_grid(self) -> np.ndarray:
        v = self.values
        return np.linspace(v["grid.y.min"], v["grid.y.max"], v["grid.y.points"])

    def radius_grid(self) -> np.ndarray:
        v = self.values
        return np.geomspace(v["grid.radius.min"], v["grid.radius.max"],
                            v["grid.radius.points"])


def _validate(values: dict[str, Any]) -> None:
    pos = ["tail_tol", "roundtrip.tol", "reverse.tol", "lemma.tol",
           "grid.r.min", "grid.radius.min", "contour.radius", "phi.p"]
    for key in pos:
        if values[key] is not None and values[key] <= 0:
            raise ConfigError("must be positive", key=key)
    for key in ("grid.r.points", "grid.x.points", "grid.y.points", "grid.radius.points"):
        if values[key] < 2:
            raise ConfigError("grid needs at least 2 points", key=key)
    for lo, hi in (("grid.r.min", "grid.r.max"), ("grid.x.min", "grid.x.max"),
                   ("grid.y.min", "grid.y.max"), ("grid.radius.min", "grid.radius.max")):
        if not values[lo] < values[hi]:
            raise ConfigError(f"must exceed {lo}", key=hi)
    if values["dim"] < 1:
        raise ConfigError("must be >= 1", key="dim")
    if values["phi.dim"] is not None and values["phi.dim"] != values["dim"]:
        raise ConfigError(
            f"family dimension {values['phi.dim']} does not match model dimension "
            f"{values['dim']}", key="phi.dim")
    if not values["models"]:
        raise ConfigError("need at least one model", key="models")
    for name in values["models"]:
        if name not in MODEL_NAMES:
            raise ConfigError(f"unknown model {name!r}", key="models")
    for key in ("m_list", "eps_list", "delta_list"):
        if not values[key] or any(v <= 0 for v in values[key]):
            raise ConfigError("entries must be positive and nonempty", key=key)
    if values["contour.nodes"] < 4:
        raise ConfigError("need at least 4 nodes", key="contour.nodes")
    if values["alpha_max"] < 0 or values["roundtrip.alpha_max"] < 0:
        raise ConfigError("derivative order must be nonnegative", key="alpha_max")
    if values["roundtrip.alpha_max"] > values["contour.nodes"] // 2 - 1:
        raise ConfigError("must stay below contour.nodes/2 - 1", key="roundtrip.alpha_max")
    if values["sequence.kind"] not in ("gevrey", "geometric-gevrey", "explicit"):
        raise ConfigError("unknown sequence kind", key="sequence.kind")
    for v in values["extend.z_im"] + values["extend.z_re"]:
        if not math.isfinite(v):
            raise ConfigError("entries must be finite", key="extend.z_re")


def parse_config(text: str) -> RunConfig:
    """Parse and validate a configuration document."""
    values: dict[str, Any] = {k: (list(d) if isinstance(d, list) else d)
                              for k, (_, d) in _SCHEMA.items()}
    seen: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        if "=" not in body:
            col = len(body) - len(body.lstrip()) + 1
            raise ConfigError("expected 'key = value'", lineno, col)
        key_part, _, val_part = body.partition("=")
        key = key_part.strip()
        col = body.index("=") + 2
        if key not in _SCHEMA:
            raise ConfigError(f"unknown key {key!r}", lineno,
                              len(key_part) - len(key_part.lstrip()) + 1)
        if key in seen:
            raise ConfigError(f"duplicate key {key!r}", lineno, 1)
        seen.add(key)
        tag, _ = _SCHEMA[key]
        values[key] = _parse_value(val_part, tag, lineno, col, key)
    _validate(values)
    cfg = RunConfig(values=values, text=text,
                    digest=hashlib.sha256(text.encode("utf-8")).hexdigest())
    # cross-field construction errors surface now, not at run time
    cfg.build_sequence()
    cfg.build_phi()
    cfg.build_models()
    return cfg


def default_config_text() -> str:
    lines = ["# holoext run configuration (defaults)"]
    for key, (tag, default) in _SCHEMA.items():
        if default is None:
            continue
        if tag.endswith("_list"):
            rendered = ", ".join(repr(v) if isinstance(v, float) else str(v)
                                 for v in default)
        elif isinstance(default, float):
            rendered = repr(default)
        else:
            rendered = str(default)
        lines.append(f"{key} = {rendered}")
    return "\n".join(lines) + "\n"

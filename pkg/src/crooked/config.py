"""JSON configuration files for affine Schottky groups.

Two forms are accepted.  Explicit::

    {"m": 2,
     "generators": [{"linear": [[...], [...], [...]], "translation": [...]}, ...],
     "half_spaces": [{"i": 1, "sign": "+", "direction": [...], "vertex": [...]}, ...],
     "intervals": [{"i": 1, "sign": "+", "phi1": ..., "phi2": ...}, ...]}   # optional

Builder: ``intervals`` plus ``half_spaces`` entries carrying only a
``vertex``; generators and directions are then constructed from the arcs.
Numbers are written with 17 significant digits so files round-trip bit for bit.
"""

from __future__ import annotations

import json
import math
from importlib import resources
from pathlib import Path

import numpy as np

from .affine import AffineSchottkyConfig, from_intervals
from .isometry import AffineIsometry, LinearIsometry
from .lorentz import Interval, SpacePoint
from .planes import CrookedHalfSpace
from .words import sign_from

SHIPPED = "two_generator.json"


class ConfigError(ValueError):
    """Malformed or schema-invalid configuration; the message says where."""


def _num(x, where: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {x!r}")
    x = float(x)
    if not math.isfinite(x):
        raise ConfigError(f"{where}: non-finite number")
    return x


def _vec3(x, where: str) -> np.ndarray:
    if not isinstance(x, list) or len(x) != 3:
        raise ConfigError(f"{where}: expected a list of 3 numbers")
    return np.array([_num(c, f"{where}[{k}]") for k, c in enumerate(x)])


def _mat3(x, where: str) -> np.ndarray:
    if not isinstance(x, list) or len(x) != 3:
        raise ConfigError(f"{where}: expected a 3x3 row-major array")
    return np.array([_vec3(r, f"{where}[{k}]") for k, r in enumerate(x)])


def _key(entry, where: str, m: int) -> tuple[int, int]:
    if not isinstance(entry, dict):
        raise ConfigError(f"{where}: expected an object")
    i = entry.get("i")
    if isinstance(i, bool) or not isinstance(i, int) or not 1 <= i <= m:
        raise ConfigError(f"{where}.i: expected an integer in 1..{m}, got {i!r}")
    try:
        j = sign_from(entry.get("sign"))
    except ValueError as exc:
        raise ConfigError(f"{where}.sign: {exc}") from None
    return i, j


def _keyed(items, name: str, m: int) -> dict:
    if not isinstance(items, list):
        raise ConfigError(f"{name}: expected a list")
    out = {}
    for n, e in enumerate(items):
        k = _key(e, f"{name}[{n}]", m)
        if k in out:
            raise ConfigError(f"{name}[{n}]: duplicate entry for {k}")
        out[k] = e
    missing = [(i, j) for i in range(1, m + 1) for j in (1, -1) if (i, j) not in out]
    if missing:
        raise ConfigError(f"{name}: missing entries for {missing}")
    return out


def from_dict(doc) -> AffineSchottkyConfig:
    if not isinstance(doc, dict):
        raise ConfigError("top level: expected an object")
    m = doc.get("m")
    if isinstance(m, bool) or not isinstance(m, int) or m < 1:
        raise ConfigError(f"m: expected a positive integer, got {m!r}")
    if "half_spaces" not in doc:
        raise ConfigError("half_spaces: missing")
    hs_entries = _keyed(doc["half_spaces"], "half_spaces", m)
    intervals = None
    if "intervals" in doc:
        iv = _keyed(doc["intervals"], "intervals", m)
        intervals = {}
        for k, e in iv.items():
            where = f"intervals[{k}]"
            a, b = _num(e.get("phi1"), f"{where}.phi1"), _num(e.get("phi2"), f"{where}.phi2")
            try:
                intervals[k] = Interval(a, b)
            except ValueError as exc:
                raise ConfigError(f"{where}: {exc}") from None

    vertices = {k: _vec3(e.get("vertex"), f"half_spaces[{k}].vertex") for k, e in hs_entries.items()}

    if "generators" not in doc:
        if intervals is None:
            raise ConfigError("generators: missing (builder mode needs intervals)")
        try:
            return from_intervals(intervals, vertices)
        except ValueError as exc:
            raise ConfigError(f"builder: {exc}") from None

    gens_doc = doc["generators"]
    if not isinstance(gens_doc, list) or len(gens_doc) != m:
        raise ConfigError(f"generators: expected a list of {m} entries")
    gens = []
    for n, g in enumerate(gens_doc):
        if not isinstance(g, dict):
            raise ConfigError(f"generators[{n}]: expected an object")
        lin = _mat3(g.get("linear"), f"generators[{n}].linear")
        t = _vec3(g.get("translation"), f"generators[{n}].translation")
        try:
            gens.append(AffineIsometry(LinearIsometry(lin), t))
        except ValueError as exc:
            raise ConfigError(f"generators[{n}].linear: {exc}") from None
    half_spaces = {}
    for k, e in hs_entries.items():
        u = _vec3(e.get("direction"), f"half_spaces[{k}].direction")
        try:
            half_spaces[k] = CrookedHalfSpace(u, SpacePoint.of(vertices[k]))
        except ValueError as exc:
            raise ConfigError(f"half_spaces[{k}].direction: {exc}") from None
    return AffineSchottkyConfig(tuple(gens), half_spaces, intervals)


def loads(text: str) -> AffineSchottkyConfig:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON at line {exc.lineno} column {exc.colno} (char {exc.pos}): {exc.msg}") from None
    return from_dict(doc)


def load(path) -> AffineSchottkyConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return loads(text)


def load_shipped() -> AffineSchottkyConfig:
    return loads(resources.files("crooked").joinpath("data").joinpath(SHIPPED).read_text())


def shipped_path() -> Path:
    return Path(str(resources.files("crooked").joinpath("data").joinpath(SHIPPED)))


def _sign(j: int) -> str:
    return "+" if j > 0 else "-"


def to_dict(cfg: AffineSchottkyConfig) -> dict:
    doc = {
        "m": cfg.m,
        "generators": [
            {"linear": h.linear.matrix.tolist(), "translation": h.translation.tolist()} for h in cfg.generators
        ],
        "half_spaces": [
            {"i": i, "sign": _sign(j), "direction": cfg.half_spaces[(i, j)].u.tolist(), "vertex": cfg.half_spaces[(i, j)].vertex.tolist()}
            for i, j in cfg.keys()
        ],
    }
    if cfg.intervals:
        doc["intervals"] = [
            {"i": i, "sign": _sign(j), "phi1": cfg.intervals[(i, j)].phi1, "phi2": cfg.intervals[(i, j)].phi2} for i, j in cfg.keys()
        ]
    return doc


def _fmt(x) -> str:
    if isinstance(x, bool) or isinstance(x, str):
        return json.dumps(x)
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        s = format(x, ".17g")
        return s if any(c in s for c in ".en") else s + ".0"
    if isinstance(x, list):
        return "[" + ", ".join(_fmt(v) for v in x) + "]"
    raise TypeError(type(x).__name__)


def dumps(cfg: AffineSchottkyConfig) -> str:
    """Stable text form: one generator / half-space / interval per line."""
    doc = to_dict(cfg)
    lines = ["{", f'  "m": {doc["m"]},']
    sections = [k for k in ("generators", "half_spaces", "intervals") if k in doc]
    for n, name in enumerate(sections):
        lines.append(f'  "{name}": [')
        items = doc[name]
        for k, item in enumerate(items):
            body = ", ".join(f'"{f}": {_fmt(v)}' for f, v in item.items())
            lines.append("    {" + body + "}" + ("," if k < len(items) - 1 else ""))
        lines.append("  ]" + ("," if n < len(sections) - 1 else ""))
    lines.append("}")
    return "\n".join(lines) + "\n"


def save(cfg: AffineSchottkyConfig, path) -> None:
    Path(path).write_text(dumps(cfg))

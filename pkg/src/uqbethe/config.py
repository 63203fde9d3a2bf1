"""Run configuration: JSON parsing and validation.

Scalars are strings ``"p/q"`` or ``"k"`` in lowest terms.  Errors carry a
JSON-pointer to the offending value.

Schema (all keys optional except ``N`` and ``n``)::

    {
      "N": 3,                      rank, >= 2
      "n": [1, 1],                 N-1 nonnegative counts
      "q": "3/2",                  fixed deformation parameter; sampled if absent
      "module": {"kind": "evaluation", "z": "5/7", "factors": 1}
             or {"kind": "tensor", "z": ["1/2", "3/4"]},
      "t": [["1/3"], ["2/5"]],     explicit Bethe variables (compute only)
      "seed": 42,
      "routes": ["trace", "tv_x"],
      "suites": ["ybe", "routes"],
      "samples": {"ybe": 100},     per-suite sample counts
      "max_cells": 200000,
      "retries": 50,
      "mode_window": 5,
      "threads": 1
    }

``module.kind = "evaluation"`` is the evaluation module at ``z`` of the
``factors``-fold Chevalley tensor power of the vector representation;
``"tensor"`` is the tensor product of vector evaluation modules, one per
point.  Missing evaluation points are sampled.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .bethe import DEFAULT_MAX_CELLS, ROUTES
from .sampling import DEFAULT_RETRIES

SUITES = ("ybe", "rll", "serre", "gauss", "currents", "qsym", "routes")
DEFAULT_SAMPLES = {"ybe": 100, "rll": 20, "serre": 3, "gauss": 10, "currents": 20,
                   "qsym": 20, "routes": 5}
DEFAULT_MODE_WINDOW = 5

_SCALAR = re.compile(r"^-?(0|[1-9][0-9]*)(/[1-9][0-9]*)?$")
_KEYS = {"N", "n", "q", "module", "t", "seed", "routes", "suites", "samples", "max_cells",
         "retries", "mode_window", "threads"}


class ConfigError(ValueError):
    def __init__(self, pointer: str, message: str):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer
        self.message = message


@dataclass
class ModuleSpec:
    kind: str = "evaluation"
    z: Any = None  # Fraction, list of Fractions, or None (sampled)
    factors: int = 1

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.kind == "evaluation":
            out["factors"] = self.factors
            if self.z is not None:
                out["z"] = str(self.z)
        else:
            out["z"] = [str(x) for x in self.z]
        return out


@dataclass
class RunConfig:
    N: int
    n: tuple
    q: Fraction | None = None
    module: ModuleSpec = field(default_factory=ModuleSpec)
    t: tuple | None = None
    seed: int = 0
    routes: tuple | None = None
    suites: tuple = SUITES
    samples: dict = field(default_factory=lambda: dict(DEFAULT_SAMPLES))
    max_cells: int = DEFAULT_MAX_CELLS
    retries: int = DEFAULT_RETRIES
    mode_window: int = DEFAULT_MODE_WINDOW
    threads: int = 1

    @property
    def module_dim(self) -> int:
        k = self.module.factors if self.module.kind == "evaluation" else len(self.module.z)
        return self.N**k

    def effective_routes(self) -> tuple:
        if self.routes is not None:
            return self.routes
        if self.module.kind == "tensor":
            return ("trace", "w", "w_hat")
        return ROUTES

    def to_json(self) -> dict:
        """Normalized echo for reports; the thread count is left out on purpose."""
        out: dict = {"N": self.N, "n": list(self.n)}
        if self.q is not None:
            out["q"] = str(self.q)
        out["module"] = self.module.to_json()
        if self.t is not None:
            out["t"] = [[str(x) for x in g] for g in self.t]
        out.update(seed=self.seed, routes=list(self.effective_routes()), suites=list(self.suites),
                   samples=dict(sorted(self.samples.items())), max_cells=self.max_cells,
                   retries=self.retries, mode_window=self.mode_window)
        return out


def parse_scalar(value, pointer: str) -> Fraction:
    if not isinstance(value, str):
        raise ConfigError(pointer, "scalars are strings like \"3/7\"")
    s = value.strip()
    if not _SCALAR.match(s):
        raise ConfigError(pointer, f"unparseable fraction {value!r}")
    x = Fraction(s)
    if "/" in s and str(x) != s:
        raise ConfigError(pointer, f"fraction {value!r} is not in lowest terms")
    return x


def _int(value, pointer: str, lo: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(pointer, "expected an integer")
    if lo is not None and value < lo:
        raise ConfigError(pointer, f"must be at least {lo}")
    return value


def _list(value, pointer: str) -> list:
    if not isinstance(value, list):
        raise ConfigError(pointer, "expected an array")
    return value


def _nonzero(x: Fraction, pointer: str) -> Fraction:
    if x == 0:
        raise ConfigError(pointer, "evaluation points must be nonzero")
    return x


def _module(doc, N: int) -> ModuleSpec:
    if not isinstance(doc, dict):
        raise ConfigError("/module", "expected an object")
    unknown = set(doc) - {"kind", "z", "factors"}
    if unknown:
        raise ConfigError(f"/module/{sorted(unknown)[0]}", "unknown key")
    kind = doc.get("kind", "evaluation")
    if kind == "evaluation":
        factors = _int(doc.get("factors", 1), "/module/factors", 1)
        z = doc.get("z")
        if z is not None:
            z = _nonzero(parse_scalar(z, "/module/z"), "/module/z")
        return ModuleSpec("evaluation", z, factors)
    if kind == "tensor":
        if "z" not in doc:
            raise ConfigError("/module/z", "a tensor module lists one point per factor")
        zs = _list(doc["z"], "/module/z")
        if len(zs) < 1:
            raise ConfigError("/module/z", "at least one factor")
        pts = [_nonzero(parse_scalar(x, f"/module/z/{i}"), f"/module/z/{i}") for i, x in enumerate(zs)]
        if "factors" in doc and doc["factors"] != len(pts):
            raise ConfigError("/module/factors", "does not match the number of points")
        return ModuleSpec("tensor", tuple(pts), len(pts))
    raise ConfigError("/module/kind", f"unknown module kind {kind!r}")


def parse_config(text: str | bytes) -> RunConfig:
    try:
        doc = json.loads(text)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ConfigError("", f"not valid JSON: {exc}") from exc
    return config_from_dict(doc)


def config_from_dict(doc) -> RunConfig:
    if not isinstance(doc, dict):
        raise ConfigError("", "expected a JSON object")
    unknown = set(doc) - _KEYS
    if unknown:
        raise ConfigError(f"/{sorted(unknown)[0]}", "unknown key")
    if "N" not in doc:
        raise ConfigError("/N", "required")
    N = _int(doc["N"], "/N", 2)
    if "n" not in doc:
        raise ConfigError("/n", "required")
    n = _list(doc["n"], "/n")
    if len(n) != N - 1:
        raise ConfigError("/n", f"length must be N-1 = {N - 1}, got {len(n)}")
    n = tuple(_int(x, f"/n/{i}", 0) for i, x in enumerate(n))
    cfg = RunConfig(N=N, n=n)
    if "q" in doc:
        q = parse_scalar(doc["q"], "/q")
        if q in (0, 1, -1):
            raise ConfigError("/q", "q must be nonzero, not ±1")
        cfg.q = q
    if "module" in doc:
        cfg.module = _module(doc["module"], N)
    if "t" in doc:
        groups = _list(doc["t"], "/t")
        if len(groups) != N - 1:
            raise ConfigError("/t", f"expected N-1 = {N - 1} groups")
        t = []
        for a, g in enumerate(_list(x, f"/t/{i}") for i, x in enumerate(groups)):
            if len(g) != n[a]:
                raise ConfigError(f"/t/{a}", f"expected n_{a + 1} = {n[a]} values")
            t.append(tuple(_nonzero(parse_scalar(x, f"/t/{a}/{l}"), f"/t/{a}/{l}")
                           for l, x in enumerate(g)))
        cfg.t = tuple(t)
    if "seed" in doc:
        cfg.seed = _int(doc["seed"], "/seed", 0)
    if "routes" in doc:
        routes = _list(doc["routes"], "/routes")
        for i, r in enumerate(routes):
            if r not in ROUTES:
                raise ConfigError(f"/routes/{i}", f"unknown route {r!r}")
            if cfg.module.kind == "tensor" and r in ("tv_x", "tv_y"):
                raise ConfigError(f"/routes/{i}", f"route {r} needs a single evaluation module")
        if len(set(routes)) != len(routes):
            raise ConfigError("/routes", "duplicate route")
        cfg.routes = tuple(routes)
    if "suites" in doc:
        cfg.suites = tuple(_suite(s, f"/suites/{i}") for i, s in enumerate(_list(doc["suites"], "/suites")))
    if "samples" in doc:
        if not isinstance(doc["samples"], dict):
            raise ConfigError("/samples", "expected an object")
        for k, v in doc["samples"].items():
            _suite(k, f"/samples/{k}")
            cfg.samples[k] = _int(v, f"/samples/{k}", 1)
    if "max_cells" in doc:
        cfg.max_cells = _int(doc["max_cells"], "/max_cells", 1)
    if "retries" in doc:
        cfg.retries = _int(doc["retries"], "/retries", 1)
    if "mode_window" in doc:
        cfg.mode_window = _int(doc["mode_window"], "/mode_window", 2)
    if "threads" in doc:
        cfg.threads = _int(doc["threads"], "/threads", 1)
    return cfg


def _suite(name, pointer: str) -> str:
    if name not in SUITES:
        raise ConfigError(pointer, f"unknown suite {name!r}")
    return name

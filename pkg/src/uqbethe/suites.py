"""Verification suites and report assembly.

A run is split into independent jobs ``(suite, index)``.  Each job derives
its own seed from the run seed, draws its sample points, and returns a list
of records.  Records are merged in job order, so the report does not depend
on how many worker processes ran the jobs.
"""

from __future__ import annotations

import hashlib
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import __version__
from .bethe import BetheTask, cross_validate
from .config import RunConfig
from .exact import equal, first_mismatch, identity, scalar_str
from .gauss import (
    FLAVORS,
    appendix_a_violations,
    current_modes,
    current_relation_violations,
    gauss_by_ldu,
    gauss_extract,
    pointwise_relation_violations,
    pointwise_serre_violations,
    reconstruct_l,
    serre_current_violations,
    support_violations,
)
from .gln_rep import (
    LOperatorPoly,
    ModuleRep,
    eval_l,
    module_violations,
    rll_holds,
    root_independence_violations,
    tensor_l,
    tensor_module,
    tensor_power,
    vector_rep,
    zero_mode_violations,
)
from .qsym import (
    Composition,
    is_q_symmetric,
    make_assignment,
    q_symmetrize,
    q_symmetrize_split,
    q_symmetrize_tv,
    qint_factorial,
    varpi,
)
from .rmatrix import r_matrix, swap, ybe_sides
from .sampling import Sampler, SamplingExhausted, with_resampling

log = logging.getLogger(__name__)

PASS, FAIL, UNLUCKY = "pass", "fail", "unlucky_sampling"


def derive_seed(seed: int, *labels) -> int:
    text = ":".join([str(seed)] + [str(x) for x in labels])
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big")


def fingerprint(inputs: dict) -> str:
    text = repr(sorted(inputs.items()))
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def record(suite: str, name: str, inputs: dict, ok: bool, detail=None) -> dict:
    return {"suite": suite, "name": name, "inputs": inputs, "fingerprint": fingerprint(inputs),
            "verdict": PASS if ok else FAIL, "detail": detail}


def _s(x) -> str:
    return scalar_str(Fraction(x))


def _mismatch_detail(a, b):
    diff = first_mismatch(a, b)
    if diff is None:
        return None
    idx, x, y = diff
    return {"index": list(idx) if isinstance(idx, tuple) else idx, "lhs": str(x), "rhs": str(y)}


# Modules from the config


@dataclass
class BuiltModule:
    module: ModuleRep
    lplus: LOperatorPoly
    lminus: LOperatorPoly
    z: Fraction | None  # None for tensor modules
    points: tuple


def build_module(cfg: RunConfig, q: Fraction, sampler: Sampler | None = None) -> BuiltModule:
    spec = cfg.module
    if spec.kind == "evaluation":
        z = spec.z if spec.z is not None else sampler.scalar()
        m = tensor_power(vector_rep(cfg.N, q), spec.factors)
        return BuiltModule(m, eval_l(m, z, "plus"), eval_l(m, z, "minus"), z, (z,))
    v = vector_rep(cfg.N, q)
    m, lp, lm = v, eval_l(v, spec.z[0], "plus"), eval_l(v, spec.z[0], "minus")
    for z in spec.z[1:]:
        m = tensor_module(m, v)
        lp = tensor_l(lp, eval_l(v, z, "plus"))
        lm = tensor_l(lm, eval_l(v, z, "minus"))
    return BuiltModule(m, lp, lm, None, tuple(spec.z))


def _q(cfg: RunConfig, sampler: Sampler) -> Fraction:
    return cfg.q if cfg.q is not None else sampler.q()


def _run_q(cfg: RunConfig, suite: str) -> Fraction:
    """One q per run for the suites that reuse expensive expansions."""
    return cfg.q if cfg.q is not None else Sampler(derive_seed(cfg.seed, suite, "q")).q()


def _module_inputs(b: BuiltModule, q) -> dict:
    return {"q": _s(q), "points": [_s(z) for z in b.points], "dim": b.module.dim}


# Suites.  Each runner takes (cfg, index, sampler) and returns records.


def _ybe(cfg: RunConfig, index: int, sampler: Sampler) -> list[dict]:
    N = cfg.N

    def draw(s: Sampler):
        q = _q(cfg, s)
        u, v, w = s.distinct(3)
        return q, u, v, w, ybe_sides(N, q, u, v, w)

    q, u, v, w, (lhs, rhs) = with_resampling(draw, sampler, cfg.retries)
    inputs = {"N": N, "q": _s(q), "u": _s(u), "v": _s(v), "w": _s(w)}
    out = [record("ybe", "yang_baxter", inputs, equal(lhs, rhs), _mismatch_detail(lhs, rhs))]
    if index == 0:
        p = r_matrix(N, q, u, u)
        out.append(record("ybe", "r_at_equal_points_is_swap", {"N": N, "q": _s(q), "u": _s(u)},
                          equal(p, swap(N)), _mismatch_detail(p, swap(N))))
        one = r_matrix(N, 1, u, v)
        out.append(record("ybe", "r_at_q_one_is_identity", {"N": N, "u": _s(u), "v": _s(v)},
                          equal(one, identity(N * N)), _mismatch_detail(one, identity(N * N))))
    return out


def _rll(cfg: RunConfig, index: int, sampler: Sampler) -> list[dict]:
    def draw(s: Sampler):
        q = _q(cfg, s)
        b = build_module(cfg, q, s)
        u, v = s.distinct(2)
        res = {pair: rll_holds(l1, l2, q, u, v)
               for pair, (l1, l2) in {"++": (b.lplus, b.lplus), "--": (b.lminus, b.lminus),
                                      "+-": (b.lplus, b.lminus)}.items()}
        return q, b, u, v, res

    q, b, u, v, res = with_resampling(draw, sampler, cfg.retries)
    inputs = dict(_module_inputs(b, q), u=_s(u), v=_s(v))
    bad = [pair for pair, ok in res.items() if not ok]
    out = [record("rll", "rll_all_sign_pairs", inputs, not bad,
                  {"failed_sign_pairs": bad} if bad else None)]
    if index == 0:
        zm = zero_mode_violations(b.lplus, b.lminus)
        out.append(record("rll", "zero_modes", _module_inputs(b, q), not zm, zm or None))
    return out


def _serre(cfg: RunConfig, index: int, sampler: Sampler) -> list[dict]:
    q = _q(cfg, sampler)
    b = build_module(cfg, q, sampler)
    inputs = _module_inputs(b, q)
    mv = module_violations(b.module)
    rv = root_independence_violations(b.module)
    return [record("serre", "module_relations_and_serre", inputs, not mv, mv or None),
            record("serre", "composed_root_independence", inputs, not rv, rv or None)]


def _gauss(cfg: RunConfig, index: int, sampler: Sampler) -> list[dict]:
    N = cfg.N
    q = _q(cfg, sampler)
    b = build_module(cfg, q, sampler)
    out = []
    for flavor in FLAVORS:
        def draw(s: Sampler):
            t = s.scalar()
            g = gauss_extract(b.lplus, b.lminus, t, flavor)
            other = {sign: gauss_by_ldu(_rows(l(t)), N, flavor)
                     for sign, l in (("plus", b.lplus), ("minus", b.lminus))}
            return t, g, other

        t, g, other = with_resampling(draw, sampler, cfg.retries)
        inputs = dict(_module_inputs(b, q), t=_s(t), flavor=flavor)
        rp, rm = reconstruct_l(g, N)
        detail = None
        for sign, grid, l in (("plus", rp, b.lplus), ("minus", rm, b.lminus)):
            orig = l(t)
            for i in range(N):
                for j in range(N):
                    d = _mismatch_detail(grid[i][j], orig[i, j])
                    if d and detail is None:
                        detail = dict(d, sign=sign, entry=[i + 1, j + 1])
        out.append(record("gauss", "round_trip", inputs, detail is None, detail))
        bad = []
        for sign, coords in (("plus", g.plus), ("minus", g.minus)):
            ref = other[sign]
            for kind in ("F", "E", "k"):
                mine, theirs = getattr(coords, kind), getattr(ref, kind)
                for key in mine:
                    if not equal(mine[key], theirs[key]):
                        bad.append(f"{kind}{sign}{key}")
        out.append(record("gauss", "quasideterminant_vs_elimination", inputs, not bad, bad or None))
    return out


def _rows(grid: np.ndarray):
    N = grid.shape[0]
    return [[grid[i, j] for j in range(N)] for i in range(N)]


_MODE_CACHE: dict = {}


def _cached_modes(cfg: RunConfig, q: Fraction, flavor: str):
    key = (repr(cfg.to_json()), q)
    if _MODE_CACHE.get("key") != key:
        _MODE_CACHE.clear()
        _MODE_CACHE["key"] = key
        _MODE_CACHE["module"] = build_module(cfg, q, Sampler(derive_seed(cfg.seed, "currents", "module")))
    b = _MODE_CACHE["module"]
    if flavor not in _MODE_CACHE:
        _MODE_CACHE[flavor] = current_modes(b.lplus, b.lminus, q, flavor, cfg.mode_window)
    return b, _MODE_CACHE[flavor]


def _currents(cfg: RunConfig, index: int, sampler: Sampler) -> list[dict]:
    q = _run_q(cfg, "currents")
    K = cfg.mode_window
    out = []
    for flavor in FLAVORS:
        b, cm = _cached_modes(cfg, q, flavor)
        base = _module_inputs(b, q)
        m, n = sampler.randint(-K + 1, K - 1), sampler.randint(-K + 1, K - 1)
        bad = current_relation_violations(cm, [(m, n)])
        out.append(record("currents", "mode_relations", dict(base, flavor=flavor, modes=[m, n]),
                          not bad, bad or None))
        a, c, d = (sampler.randint(-K, K) for _ in range(3))
        bad = serre_current_violations(cm, [(a, c, d)])
        out.append(record("currents", "mode_serre", dict(base, flavor=flavor, modes=[a, c, d]),
                          not bad, bad or None))
        if index == 0:
            bad = support_violations(cm)
            out.append(record("currents", "half_current_support", dict(base, flavor=flavor),
                              not bad, bad or None))

        def draw(s: Sampler):
            z1, z2, w = s.distinct(3)
            return z1, z2, w, (pointwise_relation_violations(b.lplus, b.lminus, q, z1, w, flavor)
                               + pointwise_serre_violations(b.lplus, b.lminus, q, z1, z2, w, flavor))

        z1, z2, w, bad = with_resampling(draw, sampler, cfg.retries)
        out.append(record("currents", "pointwise_relations",
                          dict(base, flavor=flavor, z=_s(z1), z2=_s(z2), w=_s(w)), not bad, bad or None))

    def draw_a(s: Sampler):
        z, w = s.distinct(2)
        return z, w, appendix_a_violations(b.lplus, b.lminus, q, z, w)

    z, w, bad = with_resampling(draw_a, sampler, cfg.retries)
    out.append(record("currents", "composed_current_relations",
                      dict(_module_inputs(b, q), z=_s(z), w=_s(w)), not bad, bad or None))
    return out


def _random_function(s: Sampler, sizes: tuple) -> Callable:
    """A random rational function of an assignment with the given group sizes."""
    c = s.scalars(4)
    flat_len = sum(sizes)
    powers = [s.randint(0, 2) for _ in range(flat_len)]

    def G(t):
        x = [v for g in t for v in g]
        mono = Fraction(1)
        for v, p in zip(x, powers):
            mono *= v**p
        return c[0] + c[1] * mono + c[2] * x[0] / (x[-1] + c[3]) + x[-1] ** 2 * x[0]

    return G


def _random_symmetric(s: Sampler, sizes: tuple) -> Callable:
    c = s.scalars(3)

    def G(t):
        out = c[0]
        for g in t:
            out += c[1] * sum(g) ** 2 + c[2] * math.prod(g)
        return out

    return G


def _qsym(cfg: RunConfig, index: int, sampler: Sampler) -> list[dict]:
    k1 = 1 + index % 4
    k2 = (index // 4) % 3
    sizes = (k1, k2) if k2 else (k1,)

    def draw(s: Sampler):
        q = _q(cfg, s)
        values = s.distinct(sum(sizes))
        t = make_assignment(Composition(len(sizes) + 1, sizes), values)
        G = _random_function(s, sizes)
        Gs = _random_symmetric(s, sizes)
        order = math.prod(math.factorial(k) for k in sizes)
        qorder = math.prod(qint_factorial(k, q) for k in sizes)
        once = q_symmetrize(G, t, q)
        res = {
            "sym_star": q_symmetrize(lambda x: q_symmetrize(G, x, q), t, q) == order * once,
            "relat": q_symmetrize_tv(G, t, q) == varpi(t, q) * once,
            "po_sim": q_symmetrize(lambda x: Gs(x) / varpi(x, q), t, q) / order
            == q_symmetrize(Gs, t, q) / qorder,
            "q_symmetric_output": is_q_symmetric(lambda x: q_symmetrize(G, x, q), t, q),
            # Gs / varpi is q-symmetric for symmetric Gs
            "exa3": q_symmetrize(lambda x: Gs(x) / varpi(x, q), t, q) == order * Gs(t) / varpi(t, q),
        }
        if len(sizes) == 1:
            res["sym_div"] = all(q_symmetrize_split(G, t[0], sp, q) == once for sp in range(k1 + 1))
        return q, t, res

    q, t, res = with_resampling(draw, sampler, cfg.retries)
    inputs = {"q": _s(q), "t": [[_s(x) for x in g] for g in t]}
    return [record("qsym", name, inputs, ok) for name, ok in res.items()]


def _routes(cfg: RunConfig, index: int, sampler: Sampler) -> list[dict]:
    comp = Composition(cfg.N, cfg.n)

    def draw(s: Sampler):
        q = _q(cfg, s)
        b = build_module(cfg, q, s)
        if cfg.t is not None:
            t = cfg.t
        else:
            t = make_assignment(comp, s.distinct(comp.total))
        task = BetheTask(comp, b.module, b.lplus, t, cfg.module.kind, b.z,
                         cfg.effective_routes(), cfg.max_cells)
        return q, b, t, task, cross_validate(task)

    q, b, t, task, cv = with_resampling(draw, sampler, cfg.retries)
    inputs = dict(_module_inputs(b, q), n=list(cfg.n), t=[[_s(x) for x in g] for g in t],
                  task=task.fingerprint())
    weights_bad = [r for r, ok in cv.weights_ok.items() if not ok]
    detail = {"vectors": {r: [str(x) for x in v] for r, v in cv.vectors.items()}}
    if cv.mismatch is not None:
        ra, rb, idx, x, y = cv.mismatch
        detail["first_mismatch"] = {"routes": [ra, rb], "index": list(idx), "lhs": str(x), "rhs": str(y)}
    if weights_bad:
        detail["weight_failures"] = weights_bad
    return [record("routes", "route_agreement", inputs, cv.agree and not weights_bad, detail)]


RUNNERS: dict[str, Callable[[RunConfig, int, Sampler], list[dict]]] = {
    "ybe": _ybe,
    "rll": _rll,
    "serre": _serre,
    "gauss": _gauss,
    "currents": _currents,
    "qsym": _qsym,
    "routes": _routes,
}


def run_job(cfg: RunConfig, suite: str, index: int, timings: bool = False) -> list[dict]:
    seed = derive_seed(cfg.seed, suite, index)
    start = time.perf_counter()
    try:
        out = RUNNERS[suite](cfg, index, Sampler(seed))
    except SamplingExhausted as exc:
        out = [{"suite": suite, "name": "sampling", "inputs": {"job": index},
                "fingerprint": fingerprint({"job": index, "suite": suite}),
                "verdict": UNLUCKY, "detail": str(exc)}]
    if timings:
        elapsed = round(time.perf_counter() - start, 6)
        for r in out:
            r["wall_time"] = elapsed
    log.debug("job %s/%d done", suite, index)
    return out


def _job_star(args):
    return run_job(*args)


def jobs(cfg: RunConfig) -> list[tuple[str, int]]:
    return [(suite, i) for suite in cfg.suites for i in range(cfg.samples[suite])]


def overall(records: list[dict]) -> str:
    verdicts = {r["verdict"] for r in records}
    if FAIL in verdicts:
        return FAIL
    if UNLUCKY in verdicts:
        return UNLUCKY
    return PASS


def run_suite(cfg: RunConfig, threads: int = 1, timings: bool = False) -> dict:
    """Run every selected suite and assemble the report."""
    work = [(cfg, suite, i, timings) for suite, i in jobs(cfg)]
    log.info("running %d jobs on %d worker(s)", len(work), threads)
    if threads > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_job_star, work))
    else:
        parts = [_job_star(w) for w in work]
    records = [r for part in parts for r in part]
    return {"tool": "uqbethe", "version": __version__, "command": "verify",
            "config": cfg.to_json(), "records": records, "verdict": overall(records)}


def exit_code(verdict: str) -> int:
    return {PASS: 0, FAIL: 1, UNLUCKY: 3}[verdict]


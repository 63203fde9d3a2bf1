"""Command line entry point.

    uqbethe compute   -c cfg.json [--seed S] [--max-cells C]
    uqbethe verify    -c cfg.json [--suite NAME ...] [--seed S] [--threads T] [--timings]
    uqbethe enumerate -c cfg.json
    uqbethe version

Standard output carries exactly one JSON document; logs go to standard error.
Exit codes: 0 pass, 1 identity failure, 2 configuration error, 3 sampling
exhaustion.  The thread count may also come from UQBETHE_THREADS.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import __version__
from .bethe import ROUTE_FUNCTIONS, BetheTask, cross_validate
from .config import SUITES, ConfigError, RunConfig, parse_config
from .qsym import Composition, enumerate_admissible_m, enumerate_admissible_s, make_assignment
from .sampling import Sampler, SamplingExhausted, with_resampling
from .suites import build_module, derive_seed, exit_code, run_suite

log = logging.getLogger("uqbethe")

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_UNLUCKY = 0, 1, 2, 3


def _emit(doc: dict, out) -> None:
    out.write(json.dumps(doc, indent=2, sort_keys=False, ensure_ascii=False))
    out.write("\n")


def _header(command: str) -> dict:
    return {"tool": "uqbethe", "version": __version__, "command": command}


def _load(args) -> RunConfig:
    if not args.config:
        raise ConfigError("", "a config file is required (-c)")
    try:
        with open(args.config, "rb") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError("", f"cannot read {args.config}: {exc.strerror}") from exc
    cfg = parse_config(text)
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    if getattr(args, "max_cells", None) is not None:
        cfg.max_cells = args.max_cells
    if getattr(args, "suite", None):
        cfg.suites = tuple(args.suite)
    return cfg


def _check_cap(cfg: RunConfig) -> None:
    cells = cfg.N ** sum(cfg.n) * cfg.module_dim
    if cells > cfg.max_cells:
        raise ConfigError("/max_cells", f"auxiliary space times module has dimension {cells}, "
                                        f"above the cap {cfg.max_cells}")


def _threads(args, cfg: RunConfig) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("UQBETHE_THREADS")
    if env:
        try:
            value = int(env)
        except ValueError as exc:
            raise ConfigError("", f"UQBETHE_THREADS={env!r} is not an integer") from exc
        if value < 1:
            raise ConfigError("", "UQBETHE_THREADS must be at least 1")
        return value
    return cfg.threads


def cmd_compute(args, out) -> int:
    cfg = _load(args)
    _check_cap(cfg)
    comp = Composition(cfg.N, cfg.n)
    routes = cfg.effective_routes()

    def draw(s: Sampler):
        q = cfg.q if cfg.q is not None else s.q()
        b = build_module(cfg, q, s)
        t = cfg.t if cfg.t is not None else make_assignment(comp, s.distinct(comp.total))
        task = BetheTask(comp, b.module, b.lplus, t, cfg.module.kind, b.z, routes, cfg.max_cells)
        cv = cross_validate(task) if len(routes) > 1 else None
        vectors = cv.vectors if cv else {routes[0]: ROUTE_FUNCTIONS[routes[0]](task)}
        return q, b, t, task, cv, vectors

    q, b, t, task, cv, vectors = with_resampling(draw, Sampler(derive_seed(cfg.seed, "compute")),
                                                 cfg.retries)
    doc = _header("compute")
    doc["config"] = cfg.to_json()
    doc["task"] = {"fingerprint": task.fingerprint(), "q": str(q),
                   "points": [str(z) for z in b.points],
                   "t": [[str(x) for x in g] for g in t], "dim": b.module.dim}
    doc["vectors"] = {r: [str(x) for x in v] for r, v in vectors.items()}
    agree = cv is None or cv.agree
    if cv is not None and cv.mismatch is not None:
        ra, rb, idx, x, y = cv.mismatch
        doc["first_mismatch"] = {"routes": [ra, rb], "index": list(idx), "lhs": str(x), "rhs": str(y)}
    if cv is not None:
        doc["weights_ok"] = cv.weights_ok
        agree = agree and all(cv.weights_ok.values())
    doc["verdict"] = "pass" if agree else "fail"
    _emit(doc, out)
    return EXIT_PASS if agree else EXIT_FAIL


def cmd_verify(args, out) -> int:
    cfg = _load(args)
    threads = _threads(args, cfg)
    if "routes" in cfg.suites:
        _check_cap(cfg)
    report = run_suite(cfg, threads=threads, timings=args.timings)
    _emit(report, out)
    return exit_code(report["verdict"])


def cmd_enumerate(args, out) -> int:
    cfg = _load(args)
    comp = Composition(cfg.N, cfg.n)
    doc = _header("enumerate")
    doc["N"], doc["n"] = cfg.N, list(cfg.n)
    s = enumerate_admissible_s(comp)
    m = enumerate_admissible_m(comp)
    doc["s_matrices"] = [[list(r) for r in x.rows] for x in s]
    doc["m_matrices"] = [[list(r) for r in x.rows] for x in m]
    doc["counts"] = {"s": len(s), "m": len(m)}
    _emit(doc, out)
    return EXIT_PASS


def cmd_version(args, out) -> int:
    _emit(_header("version"), out)
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="uqbethe", description=__doc__.split("\n")[0] if __doc__ else None)
    p.add_argument("-v", "--verbose", action="count", default=0, help="more logging on stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, *, seed=True, threads=False, suite=False, cells=True):
        sp.add_argument("-c", "--config", help="JSON config file")
        if seed:
            sp.add_argument("--seed", type=int, help="override the config seed")
        if cells:
            sp.add_argument("--max-cells", type=int, dest="max_cells",
                            help="cap on auxiliary dimension times module dimension")
        if threads:
            sp.add_argument("--threads", type=int, help="worker processes")
            sp.add_argument("--timings", action="store_true",
                            help="add wall times to records (reports stop being byte-identical)")
        if suite:
            sp.add_argument("--suite", action="append", choices=SUITES,
                            help="suite to run; repeat for several")

    common(sub.add_parser("compute", help="one Bethe vector by every configured route"))
    common(sub.add_parser("verify", help="run verification suites"), threads=True, suite=True)
    common(sub.add_parser("enumerate", help="list admissible matrices"), seed=False, cells=False)
    sub.add_parser("version", help="print the tool version")
    return p


COMMANDS = {"compute": cmd_compute, "verify": cmd_verify, "enumerate": cmd_enumerate,
            "version": cmd_version}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    logging.basicConfig(stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s",
                        level=logging.WARNING - 10 * min(args.verbose, 2))
    if getattr(args, "threads", None) is not None and args.threads < 1:
        doc = dict(_header(args.command), error={"pointer": "", "message": "--threads must be at least 1"})
        _emit(doc, out)
        return EXIT_CONFIG
    try:
        return COMMANDS[args.command](args, out)
    except ConfigError as exc:
        log.error("configuration error: %s", exc)
        _emit(dict(_header(args.command), error={"pointer": exc.pointer, "message": exc.message}), out)
        return EXIT_CONFIG
    except SamplingExhausted as exc:
        log.error("unlucky sampling: %s", exc)
        _emit(dict(_header(args.command), verdict="unlucky_sampling", error={"message": str(exc)}), out)
        return EXIT_UNLUCKY


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface: validation, classification, and gauge checks.

One binary with subcommands.  Reports are emitted on stdout as
deterministically ordered JSON (or a flat table); timing and cache notices
go to stderr so repeated runs produce byte-identical reports regardless of
parallelism.  Exit codes: 0 success, 1 verification mismatch, 2 usage or
parse error, 3 budget exhausted.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import re
import sys
import time
from dataclasses import dataclass

from .fingroup import (CrossedModule, derived_crossed_modules, load_xmod,
                       preset_library, validate_crossed_module, xmod_to_json)
from .gauge import DEFAULT_TOLS, builtin_cases, run_case
from .gerbe import (abelian_oracle, classify_gerbes, cocycle_to_json,
                    cocycle_to_simplicial_map, enumerate_cocycles, lift_gerbe)
from .simplicial import (CoverComplex, ball_cover, circle, circle_cover,
                         constant_simplicial_group, delta1, homotopy_classes,
                         load_sset, sphere_cover)
from .twist import classify_bundles
from .util import DEFAULT_BUDGET, Budget, BudgetError, StructureError
from .xnerve import match_wbar_duskin

__all__ = ["RunConfig", "RunReport", "main"]

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3

# matching the exhaustive-mode guard of the classifier: beyond this order
# the model dictionary and map-homotopy routes are not attempted
HOMOTOPY_ORDER_CAP = 16


@dataclass
class RunConfig:
    """Resolved knobs of one invocation; `jobs` and output options never
    enter the report payload, so runs differing only in them match bytewise."""

    command: str
    inputs: dict
    truncation: int = 3
    budget: int = DEFAULT_BUDGET
    jobs: int = 1
    cache_dir: str | None = None
    fmt: str = "table"
    force: bool = False
    fd_step: float | None = None
    tolerance: float | None = None
    out: str | None = None

    def semantic_key(self) -> dict:
        """Everything that can influence results (not timing or layout)."""
        return {
            "command": self.command,
            "inputs": self.inputs,
            "truncation": self.truncation,
            "budget": self.budget,
            "force": self.force,
            "fd_step": self.fd_step,
            "tolerance": self.tolerance,
        }


@dataclass
class RunReport:
    command: str
    config: dict
    results: dict
    oracles: dict
    exhaustive: bool
    elapsed: float = 0.0

    def payload(self) -> dict:
        return {
            "command": self.command,
            "config": self.config,
            "results": self.results,
            "oracles": self.oracles,
            "exhaustive": self.exhaustive,
        }

    def to_json(self) -> str:
        return json.dumps(self.payload(), sort_keys=True, indent=2,
                          ensure_ascii=False) + "\n"

    def to_table(self) -> str:
        lines = [f"command: {self.command}"]
        for section in ("config", "results", "oracles"):
            for k, v in sorted(getattr(self, section).items()):
                lines.append(f"  {section}.{k} = {_short(v)}")
        lines.append(f"  exhaustive = {self.exhaustive}")
        return "\n".join(lines) + "\n"


def _short(v) -> str:
    s = json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else str(v)
    return s if len(s) <= 100 else s[:97] + "..."


# ---------------------------------------------------------------------------
# input parsing


def parse_xmod(spec: str) -> CrossedModule:
    if os.path.isfile(spec):
        return load_xmod(spec)
    parts = spec.split(":")
    if parts[0] in ("xmod_id", "xmod_aut", "xmod_fiber", "xmod_base"):
        return preset_library(parts[0], ":".join(parts[1:]))
    return preset_library(parts[0], *parts[1:])


def parse_group(spec: str):
    return preset_library(*spec.split(":"))


def parse_cover(spec: str) -> CoverComplex:
    if os.path.isfile(spec):
        with open(spec) as fh:
            return CoverComplex.from_json(json.load(fh))
    parts = spec.split(":")
    makers = {"circle": circle_cover, "ball": ball_cover,
              "sphere": sphere_cover}
    if parts[0] not in makers:
        raise StructureError(f"unknown cover '{spec}'; use circle:n, ball:k, "
                             "sphere:k, or a JSON file")
    return makers[parts[0]](int(parts[1]))


def parse_sset(spec: str, n: int):
    if os.path.isfile(spec):
        return load_sset(spec)
    if spec == "circle":
        return circle(n)
    if spec == "delta1":
        return delta1(n)
    raise StructureError(f"unknown simplicial set '{spec}'; use circle, "
                         "delta1, or a JSON file")


def _check_truncation(n: int) -> None:
    if not 2 <= n <= 4:
        raise StructureError(f"truncation {n} unsupported; supported range "
                             "is 2..4")


def _slug(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", name)


def _cocycle_json(c) -> dict:
    d = cocycle_to_json(c)
    d.pop("cover", None)
    d.pop("xmod", None)
    return d


# ---------------------------------------------------------------------------
# subcommands


def cmd_xmod_check(cfg: RunConfig) -> tuple[RunReport, int]:
    xm = parse_xmod(cfg.inputs["xmod"])
    rep = validate_crossed_module(xm)
    results = {
        "name": xm.name,
        "orders": {"H": xm.H.order, "D": xm.D.order},
        "valid": rep.ok,
        "checks": [[name, ok] for name, ok in rep.checks],
        "violations": rep.violations,
    }
    report = RunReport(cfg.command, _config_echo(cfg), results, {}, True)
    return report, EXIT_OK if rep.ok else EXIT_MISMATCH


def _alpha_trivial(xm: CrossedModule) -> bool:
    return all(int(v) == xm.D.identity for v in xm.alpha.mapping)


def _action_trivial(xm: CrossedModule) -> bool:
    import numpy as np
    return all(np.array_equal(xm.action.table[d], np.arange(xm.H.order))
               for d in range(xm.D.order))


def _homotopy_crosscheck(cover, xm, cl, budget_limit: int) -> dict:
    """Independent class count: extend each cocycle to a simplicial map
    into the classifying-space model and count homotopy classes."""
    order = xm.H.order * xm.D.order
    if order > HOMOTOPY_ORDER_CAP:
        return {"checked": False, "reason": f"|H||D| = {order} beyond "
                                            f"dictionary cap"}
    try:
        match = match_wbar_duskin(xm, N=3,
                                  budget=Budget(budget_limit, what="dictionary"))
        nerve = None
        maps = []
        for c in cl.cocycles:
            cm = cocycle_to_simplicial_map(
                c, match, nerve=nerve,
                budget=Budget(budget_limit, what="cocycle extension"))
            nerve = cm.nerve
            maps.append(cm.wbar_map)
        classes, _ = homotopy_classes(
            maps, budget=Budget(budget_limit, what="homotopy"))
    except BudgetError as e:
        return {"checked": False, "reason": f"budget: {e}"}
    return {"checked": True, "classes": len(classes),
            "agree": len(classes) == len(cl.classes)}


def cmd_gerbe_classify(cfg: RunConfig) -> tuple[RunReport, int]:
    cover = parse_cover(cfg.inputs["cover"])
    xm = parse_xmod(cfg.inputs["xmod"])
    budget = Budget(cfg.budget, what="gerbe classification")
    cl = classify_gerbes(cover, xm, budget=budget, jobs=cfg.jobs,
                         force=cfg.force)
    results = {
        "cover": cover.to_json(),
        "xmod": xm.name,
        "cocycles": len(cl.cocycles),
        "classes": len(cl.classes),
        "orbit_sizes": [c.orbit_size for c in cl.classes],
        "representatives": [_cocycle_json(c.representative)
                            for c in cl.classes],
    }
    oracles = {}
    code = EXIT_OK
    applicable = (_alpha_trivial(xm) and _action_trivial(xm)
                  and xm.H.is_abelian() and xm.D.is_abelian())
    if applicable:
        h2 = abelian_oracle(cover, xm.H, 2)
        h1 = abelian_oracle(cover, xm.D, 1)
        expected = h2.order * h1.order
        oracles["abelian"] = {
            "applicable": True,
            "h2_fiber": h2.invariants, "h1_base": h1.invariants,
            "expected_classes": expected,
            "agree": expected == len(cl.classes),
        }
        if not oracles["abelian"]["agree"]:
            code = EXIT_MISMATCH
    else:
        oracles["abelian"] = {"applicable": False}
    oracles["map_homotopy"] = _homotopy_crosscheck(cover, xm, cl, cfg.budget)
    if oracles["map_homotopy"].get("agree") is False:
        code = EXIT_MISMATCH
    exhaustive = cl.exhaustive and not cl.guard_exceeded
    report = RunReport(cfg.command, _config_echo(cfg), results, oracles,
                       exhaustive)
    if cfg.out:
        os.makedirs(cfg.out, exist_ok=True)
        path = os.path.join(cfg.out, f"classes-{_slug(xm.name)}.json")
        with open(path, "w") as fh:
            json.dump(results["representatives"], fh, sort_keys=True,
                      indent=2)
    return report, code


def cmd_duskin_compare(cfg: RunConfig) -> tuple[RunReport, int]:
    _check_truncation(cfg.truncation)
    xm = parse_xmod(cfg.inputs["xmod"])
    match = match_wbar_duskin(xm, N=cfg.truncation,
                              budget=Budget(cfg.budget, what="model match"))
    results = {
        "xmod": xm.name,
        "truncation": cfg.truncation,
        "found": match.found,
        "wbar_sizes": list(match.wbar.sizes),
        "duskin_sizes": list(match.duskin.sizes),
    }
    if not match.found:
        results["certificate"] = match.certificate
    if cfg.out and match.found:
        os.makedirs(cfg.out, exist_ok=True)
        path = os.path.join(cfg.out, f"dictionary-{_slug(xm.name)}.json")
        with open(path, "w") as fh:
            json.dump(match.dictionary(), fh, sort_keys=True, indent=2)
        results["dictionary_file"] = os.path.basename(path)
    report = RunReport(cfg.command, _config_echo(cfg), results, {},
                       True)
    return report, EXIT_OK if match.found else EXIT_MISMATCH


def cmd_classify_bundles(cfg: RunConfig) -> tuple[RunReport, int]:
    _check_truncation(cfg.truncation)
    x = parse_sset(cfg.inputs["sset"], cfg.truncation)
    g = constant_simplicial_group(parse_group(cfg.inputs["group"]),
                                  cfg.truncation)
    bc = classify_bundles(x, g, budget=Budget(cfg.budget, what="bundles"),
                          jobs=cfg.jobs)
    results = {
        "sset": cfg.inputs["sset"],
        "group": cfg.inputs["group"],
        "truncation": cfg.truncation,
        "twistings": len(bc.twistings),
        "twisting_classes": len(bc.twisting_classes),
        "map_classes": len(bc.map_classes),
        "twisting_class_sizes": sorted(len(c) for c in bc.twisting_classes),
        "map_class_sizes": sorted(len(c) for c in bc.map_classes),
        "bijection": bc.bijection_ok,
    }
    oracles = {"route_match": {"agree": bc.bijection_ok,
                               "checks": len(bc.report.checks)}}
    report = RunReport(cfg.command, _config_echo(cfg), results, oracles, True)
    return report, EXIT_OK if bc.bijection_ok else EXIT_MISMATCH


def cmd_gauge_verify(cfg: RunConfig) -> tuple[RunReport, int]:
    name = cfg.inputs["case"]
    names = ([name] if name != "all"
             else sorted(builtin_cases()) + ["so3-conjugation-T"])
    results = {}
    passed = True
    for nm in names:
        rep = run_case(nm, step=cfg.fd_step, tolerance=cfg.tolerance)
        results[nm] = rep
        passed = passed and rep["passed"]
    report = RunReport(cfg.command, _config_echo(cfg),
                       {"cases": results, "passed": passed}, {}, True)
    return report, EXIT_OK if passed else EXIT_MISMATCH


def cmd_lift(cfg: RunConfig) -> tuple[RunReport, int]:
    cover = parse_cover(cfg.inputs["cover"])
    target = parse_xmod(cfg.inputs["xmod"])
    base = derived_crossed_modules(target)["image-in-base"]
    if cfg.inputs.get("base_xmod"):
        given = parse_xmod(cfg.inputs["base_xmod"])
        import numpy as np
        same = (np.array_equal(given.H.table, base.H.table)
                and np.array_equal(given.D.table, base.D.table)
                and np.array_equal(given.alpha.mapping, base.alpha.mapping))
        if not same:
            raise StructureError("--base-xmod does not match the image "
                                 "module of the target")
    budget = Budget(cfg.budget, what="lift")
    cocycles = enumerate_cocycles(cover, base, budget=budget, jobs=cfg.jobs)
    lifted = 0
    obstruction_zero = 0
    emitted = None
    agree_all = True
    oracle = None
    for c in cocycles:
        r = lift_gerbe(c, target, budget=budget)
        lifted += r.lifted is not None
        if emitted is None:
            emitted = r.obstruction_zero is not None
            oracle = r.oracle
        if r.obstruction_zero is not None:
            obstruction_zero += r.obstruction_zero
        if r.agreement is False:
            agree_all = False
    results = {
        "cover": cover.to_json(),
        "target_xmod": target.name,
        "base_xmod": base.name,
        "cocycles": len(cocycles),
        "lifted": lifted,
        "all_lift": lifted == len(cocycles),
    }
    oracles = {}
    if emitted:
        oracles["obstruction"] = {
            "emitted": True,
            "zero_count": obstruction_zero,
            "h3_kernel_invariants": oracle.invariants if oracle else None,
            "agree": agree_all,
        }
    else:
        oracles["obstruction"] = {"emitted": False}
    report = RunReport(cfg.command, _config_echo(cfg), results, oracles, True)
    return report, EXIT_OK if agree_all else EXIT_MISMATCH


DISPATCH = {
    "xmod-check": cmd_xmod_check,
    "gerbe-classify": cmd_gerbe_classify,
    "duskin-compare": cmd_duskin_compare,
    "classify-bundles": cmd_classify_bundles,
    "gauge-verify": cmd_gauge_verify,
    "lift": cmd_lift,
}

CACHED_COMMANDS = {"gerbe-classify"}


# ---------------------------------------------------------------------------
# cache


def _cache_path(cfg: RunConfig) -> str | None:
    if not cfg.cache_dir or cfg.command not in CACHED_COMMANDS:
        return None
    key = hashlib.sha256(
        json.dumps(cfg.semantic_key(), sort_keys=True).encode()).hexdigest()
    return os.path.join(cfg.cache_dir, f"{cfg.command}-{key[:24]}.json")


def _cache_load(path: str | None):
    if path and os.path.isfile(path):
        with open(path) as fh:
            return json.load(fh)
    return None


def _cache_store(path: str | None, payload_json: str, code: int) -> None:
    if not path:
        return
    os.makedirs(os.path.dirname(path), exist_ok=True)
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        json.dump({"payload_json": payload_json, "exit": code}, fh)
    os.replace(tmp, path)


# ---------------------------------------------------------------------------
# argument parsing and entry point


def _config_echo(cfg: RunConfig) -> dict:
    echo = {"inputs": cfg.inputs, "truncation": cfg.truncation,
            "budget": cfg.budget, "force": cfg.force}
    if cfg.fd_step is not None:
        echo["fd_step"] = cfg.fd_step
    if cfg.tolerance is not None:
        echo["tolerance"] = cfg.tolerance
    return echo


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="xmodgerbe",
        description="Crossed-module bundle and gerbe classification with "
                    "numerical gauge-law checks.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--truncation", type=int, default=3,
                        help="simplicial truncation level (2..4)")
        sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                        help="search node budget")
        sp.add_argument("--jobs", type=int, default=1,
                        help="parallel workers (results are identical "
                             "for any value)")
        sp.add_argument("--cache-dir", default=None,
                        help="directory for the result cache")
        sp.add_argument("--format", choices=("table", "json"),
                        default="table", dest="fmt")
        sp.add_argument("--force", action="store_true",
                        help="run past exhaustive-mode guards")
        sp.add_argument("--fd-step", type=float, default=None,
                        help="grid step for finite differences")
        sp.add_argument("--tolerance", type=float, default=None,
                        help="residual tolerance")
        sp.add_argument("--out", default=None,
                        help="directory for artifact files")

    sp = sub.add_parser("xmod-check", help="validate a crossed module")
    sp.add_argument("xmod", help="preset spec (e.g. xmod_mod:4:2) or "
                                 "JSON file")
    common(sp)

    sp = sub.add_parser("gerbe-classify",
                        help="classify gerbe cocycles on a cover")
    sp.add_argument("--cover", required=True,
                    help="circle:n | ball:k | sphere:k | JSON file")
    sp.add_argument("--xmod", required=True)
    common(sp)

    sp = sub.add_parser("duskin-compare",
                        help="match the classifying space of the nerve "
                             "against the 2-nerve model")
    sp.add_argument("--xmod", required=True)
    common(sp)

    sp = sub.add_parser("classify-bundles",
                        help="count principal bundles two ways")
    sp.add_argument("--sset", required=True, help="circle | delta1 | file")
    sp.add_argument("--group", required=True, help="e.g. symmetric:3")
    common(sp)

    sp = sub.add_parser("gauge-verify",
                        help="run residual checks on a bundled gauge case")
    sp.add_argument("--case", required=True,
                    help="case name or 'all'")
    common(sp)

    sp = sub.add_parser("lift", help="lift cocycles along a surjective "
                                     "fiber quotient and cross-check the "
                                     "obstruction")
    sp.add_argument("--cover", required=True)
    sp.add_argument("--xmod", required=True, help="target crossed module")
    sp.add_argument("--base-xmod", default=None,
                    help="optional: module the cocycles live over "
                         "(defaults to the image module)")
    common(sp)
    return p


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    inputs = {}
    for key in ("xmod", "cover", "sset", "group", "case", "base_xmod"):
        if hasattr(args, key) and getattr(args, key) is not None:
            inputs[key] = getattr(args, key)
    if args.budget <= 0:
        raise StructureError("budget must be positive")
    if args.jobs < 1:
        raise StructureError("jobs must be >= 1")
    return RunConfig(command=args.command, inputs=inputs,
                     truncation=args.truncation, budget=args.budget,
                     jobs=args.jobs, cache_dir=args.cache_dir, fmt=args.fmt,
                     force=args.force, fd_step=args.fd_step,
                     tolerance=args.tolerance, out=args.out)


def _emit(payload_json: str, fmt: str) -> None:
    if fmt == "json":
        sys.stdout.write(payload_json)
    else:
        data = json.loads(payload_json)
        report = RunReport(data["command"], data["config"], data["results"],
                           data["oracles"], data["exhaustive"])
        sys.stdout.write(report.to_table())


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    t0 = time.time()
    try:
        cfg = _config_from_args(args)
        cache = _cache_path(cfg)
        hit = _cache_load(cache)
        if hit is not None:
            print(f"[{cfg.command}] cache hit", file=sys.stderr)
            _emit(hit["payload_json"], cfg.fmt)
            return int(hit["exit"])
        report, code = DISPATCH[cfg.command](cfg)
        report.elapsed = time.time() - t0
        payload_json = report.to_json()
        _cache_store(cache, payload_json, code)
        _emit(payload_json, cfg.fmt)
        print(f"[{cfg.command}] elapsed {report.elapsed:.2f}s",
              file=sys.stderr)
        return code
    except BudgetError as e:
        print(f"budget exhausted: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except json.JSONDecodeError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (StructureError, OSError, ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: ``intcong <command> [flags] [instance.json]``.

Exit codes: 0 success, 2 well-formed input whose property fails (the
report then carries witnesses), 1 malformed input or internal error.
Reports are JSON on stdout with sorted keys; integers beyond 64 bits are
written as decimal strings.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from typing import Any

import jsonschema

from . import cochain, harness, lattice, simplicial, solver
from .abgroup import FPGroup, Subgroup
from .cochain import FULL, INCREASING, FamilyCochain, FamilyComplex, RefinementMap, SubgroupFamily
from .intlin import Infeasible

EXIT_OK, EXIT_ERROR, EXIT_FAILS = 0, 1, 2

ENV_MAX_CLOSURE = "INTCONG_MAX_CLOSURE"
ENV_MAX_DEGREE = "INTCONG_MAX_DEGREE"
ENV_BRUTE_BUDGET = "INTCONG_BRUTE_BUDGET"

_INT = {"oneOf": [{"type": "integer"}, {"type": "string", "pattern": r"^-?[0-9]+$"}]}
_COLUMN = {"type": "array", "items": _INT}
_COLUMNS = {"type": "array", "items": _COLUMN}
_FAMILY_PROPS = {
    "rank": {"type": "integer", "minimum": 1},
    "relations": _COLUMNS,
    "members": {"type": "array", "items": _COLUMNS, "minItems": 1},
    "labels": {"type": "array"},
}

SCHEMAS = {
    "gcd_congruence": {
        "type": "object",
        "properties": {
            "type": {"const": "gcd_congruence"},
            "indices": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
            "n": {"type": "integer", "minimum": 0},
            "a": {"type": "object", "propertyNames": {"pattern": r"^\s*[0-9]+(\s*,\s*[0-9]+)*\s*$|^$"},
                  "additionalProperties": _INT},
            "tuples": {"enum": ["all", "increasing"]},
        },
        "required": ["type", "indices", "n", "a"],
        "additionalProperties": False,
    },
    "subgroup_family": {
        "type": "object",
        "properties": {"type": {"const": "subgroup_family"}, **_FAMILY_PROPS},
        "required": ["type", "rank", "members"],
        "additionalProperties": False,
    },
    "refinement": {
        "type": "object",
        "properties": {
            "type": {"const": "refinement"},
            "rank": {"type": "integer", "minimum": 1},
            "relations": _COLUMNS,
            "source": {"type": "array", "items": _COLUMNS, "minItems": 1},
            "target": {"type": "array", "items": _COLUMNS, "minItems": 1},
            "tau": {"type": "array", "items": {"type": "integer", "minimum": 0}},
            "sigma": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        },
        "required": ["type", "rank", "source", "target", "tau", "sigma"],
        "additionalProperties": False,
    },
    "simplicial": {
        "type": "object",
        "properties": {
            "type": {"const": "simplicial"},
            "vertices": {"type": "array", "minItems": 1},
            "simplices": {"type": "array", "items": {"type": "array"}},
            "coefficients": {
                "oneOf": [
                    {"type": "object",
                     "properties": {"kind": {"const": "constant"}, "rank": {"type": "integer", "minimum": 0},
                                    "relations": _COLUMNS},
                     "required": ["kind", "rank"], "additionalProperties": False},
                    {"type": "object",
                     "properties": {"kind": {"const": "congruence"}, **_FAMILY_PROPS},
                     "required": ["kind", "rank", "members"], "additionalProperties": False},
                ]
            },
        },
        "required": ["type", "vertices", "simplices", "coefficients"],
        "additionalProperties": False,
    },
}

COMMAND_TYPES = {
    "check": ("gcd_congruence",),
    "solve": ("gcd_congruence",),
    "cohomology": ("subgroup_family", "gcd_congruence"),
    "lattice": ("subgroup_family",),
    "simplicial-verify": ("simplicial",),
    "refine": ("refinement",),
}


class InputError(ValueError):
    """Malformed input; the message names the location."""


def _location(path) -> str:
    return "$" + "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in path)


def load_instance(text: str, source: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None
    if not isinstance(doc, dict) or "type" not in doc:
        raise InputError(f"{source}: $: expected an object with a \"type\" field")
    schema = SCHEMAS.get(doc["type"])
    if schema is None:
        raise InputError(f"{source}: $.type: unknown instance type {doc['type']!r}; "
                         f"expected one of {sorted(SCHEMAS)}")
    err = jsonschema.exceptions.best_match(jsonschema.Draft202012Validator(schema).iter_errors(doc))
    if err is not None:
        raise InputError(f"{source}: {_location(err.absolute_path)}: {err.message}")
    return doc


def _int(v) -> int:
    return int(v)


def _cols(cols) -> list[list[int]]:
    return [[_int(x) for x in c] for c in cols]


def _json_safe(obj: Any) -> Any:
    if isinstance(obj, bool) or obj is None or isinstance(obj, (str, float)):
        return obj
    if isinstance(obj, int):
        return obj if -2 ** 63 <= obj < 2 ** 63 else str(obj)
    if isinstance(obj, dict):
        return {str(k): _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    return str(obj)


def tuple_key(t) -> str:
    return ",".join(str(i) for i in t)


def parse_key(k: str) -> tuple[int, ...]:
    return tuple(int(p) for p in k.split(",")) if k.strip() else ()


def _invariants(inv) -> dict:
    return {"free_rank": inv.free_rank, "torsion": list(inv.torsion), "text": str(inv)}


# instance builders

def build_congruence(doc: dict) -> solver.CongruenceInstance:
    data = {}
    for k, v in doc["a"].items():
        t = parse_key(k)
        if len(t) != doc["n"] + 1:
            raise InputError(f"$.a[{k!r}]: expected {doc['n'] + 1} indices, got {len(t)}")
        if any(i not in doc["indices"] for i in t):
            raise InputError(f"$.a[{k!r}]: index outside $.indices")
        data[t] = _int(v)
    if doc.get("tuples") == "increasing":
        try:
            return solver.CongruenceInstance.from_increasing(doc["indices"], doc["n"], data)
        except ValueError as exc:
            raise InputError(f"$.a: {exc}") from None
    return solver.CongruenceInstance(doc["indices"], doc["n"], data)


def _ambient(rank: int, relations) -> FPGroup:
    rels = _cols(relations or [])
    for k, c in enumerate(rels):
        if len(c) != rank:
            raise InputError(f"$.relations[{k}]: expected {rank} entries")
    return FPGroup(rank, rels)


def _members(G: FPGroup, members, where: str) -> list[Subgroup]:
    out = []
    for k, gens in enumerate(members):
        cols = _cols(gens)
        for c, col in enumerate(cols):
            if len(col) != G.rank:
                raise InputError(f"{where}[{k}][{c}]: expected {G.rank} entries")
        out.append(Subgroup(G, cols))
    return out


def build_family(doc: dict, where: str = "$.members") -> SubgroupFamily:
    G = _ambient(doc["rank"], doc.get("relations"))
    subs = _members(G, doc["members"], where)
    labels = doc.get("labels")
    if labels is not None:
        if len(labels) != len(subs):
            raise InputError("$.labels: one label per member is required")
        labels = [tuple(x) if isinstance(x, list) else x for x in labels]
        if len(set(labels)) != len(labels):
            raise InputError("$.labels: labels must be distinct")
    return SubgroupFamily(G, subs, labels)


def congruence_family(inst: solver.CongruenceInstance) -> SubgroupFamily:
    Z = FPGroup.free(1)
    return SubgroupFamily(Z, {i: Subgroup(Z, [[i]]) for i in inst.indices})


def build_system(doc: dict) -> tuple[simplicial.SimplicialComplex, simplicial.CoefficientSystem]:
    verts = [tuple(v) if isinstance(v, list) else v for v in doc["vertices"]]
    if len(set(verts)) != len(verts):
        raise InputError("$.vertices: vertices must be distinct")
    for k, s in enumerate(doc["simplices"]):
        for c, v in enumerate(s):
            if (tuple(v) if isinstance(v, list) else v) not in verts:
                raise InputError(f"$.simplices[{k}][{c}]: unknown vertex {v!r}")
    K = simplicial.SimplicialComplex(verts, [[tuple(v) if isinstance(v, list) else v for v in s]
                                             for s in doc["simplices"]])
    coeff = doc["coefficients"]
    if coeff["kind"] == "constant":
        V = simplicial.ConstantSystem(_ambient(coeff["rank"], coeff.get("relations")))
    else:
        fam = build_family({**coeff, "labels": coeff.get("labels", doc["vertices"])}, "$.coefficients.members")
        V = simplicial.CongruenceSystem(fam)
    return K, V


# commands

def _witness_list(tuples) -> list[str]:
    return [f"({tuple_key(t)})" for t in tuples]


def cmd_check(doc, args) -> tuple[int, dict]:
    inst = build_congruence(doc)
    ok, bad = solver.check_cocycle(inst)
    if ok:
        return EXIT_OK, {"status": "cocycle", "witnesses": []}
    return EXIT_FAILS, {"status": "cocycle_violation", "witnesses": _witness_list(bad)}


def cmd_solve(doc, args) -> tuple[int, dict]:
    inst = build_congruence(doc)
    try:
        sol = solver.solve(inst)
    except solver.CocycleViolation as exc:
        return EXIT_FAILS, {"status": "cocycle_violation", "witnesses": _witness_list(exc.witnesses)}
    report = {
        "status": "solved",
        "modulus": sol.modulus,
        "x": {tuple_key(t): v for t, v in sorted(sol.x.items())},
        "verified": solver.verify(inst, sol)[0],
    }
    if args.oracle:
        try:
            solver.brute_force_solve(inst, budget=args.brute_budget)
            report["oracle"] = "solvable"
        except solver.Unsolvable:
            report["oracle"] = "unsolvable"
        except solver.SearchSpaceTooLarge as exc:
            report["oracle"] = f"skipped: {exc}"
    return EXIT_OK, report


def _complex(fam: SubgroupFamily, args, degree: int) -> FamilyComplex:
    if degree + 1 > args.max_degree:
        raise InputError(f"--degree {degree} needs cochains of degree {degree + 1}, "
                         f"above the maximum degree {args.max_degree}")
    return FamilyComplex(fam, args.mode, max_degree=degree + 1)


def cmd_cohomology(doc, args) -> tuple[int, dict]:
    if args.degree is None:
        raise InputError("cohomology requires --degree")
    if args.degree < 0:
        raise InputError("--degree must be nonnegative")
    fam = congruence_family(build_congruence(doc)) if doc["type"] == "gcd_congruence" else build_family(doc)
    C = _complex(fam, args, args.degree)
    H = cochain.cohomology_classes(C, args.degree)
    return EXIT_OK, {
        "status": "computed",
        "degree": args.degree,
        "mode": args.mode,
        "invariants": _invariants(H.invariants),
        "free_generators": [list(g) for g in H.free_generators],
        "torsion_generators": [list(g) for g in H.torsion_generators],
    }


def cmd_lattice(doc, args) -> tuple[int, dict]:
    fam = build_family(doc)
    try:
        L = lattice.close(fam, cap=args.max_closure)
    except lattice.CapExceeded as exc:
        partial = exc.partial
        report = {"status": "cap_exceeded", "elements_found": len(partial), "cap": args.max_closure}
        try:
            rep = lattice.is_distributive(partial)
        except lattice.Inconclusive:
            report["witnesses"] = []
            report["message"] = "closure did not stabilize and no distributivity failure was found"
            return EXIT_ERROR, report
        report["status"] = "not_distributive"
        report["witnesses"] = _lattice_witness(partial, rep)
        return EXIT_FAILS, report
    rep = lattice.is_distributive(L)
    report = {"status": "distributive" if rep.distributive else "not_distributive",
              "size": len(L), "witnesses": _lattice_witness(L, rep)}
    if rep.distributive:
        C = _complex(fam, args, 2)
        report["cohomology"] = {str(n): _invariants(cochain.cohomology(C, n)) for n in (1, 2)}
        return EXIT_OK, report
    return EXIT_FAILS, report


def _lattice_witness(L, rep) -> list[dict]:
    out = []
    for law, w in (("meet_over_join", rep.witness), ("join_over_meet", rep.dual_witness)):
        if w is not None:
            out.append({"law": law, "elements": [[list(c) for c in L.elements[k].canonical().generators]
                                                 for k in w]})
    return out


def cmd_counterexample(doc, args) -> tuple[int, dict]:
    if args.rank is None or args.lines is None:
        raise InputError("counterexample requires --rank and --lines")
    if args.rank < 1 or args.lines < 1:
        raise InputError("--rank and --lines must be positive")
    inst = lattice.generic_lines(args.rank, args.lines, seed=args.explicit_seed)
    rep = lattice.counterexample_h1(inst)
    report = {
        "lines": [list(v) for v in inst.lines],
        "h1_free_rank": rep.h1.free_rank,
        "h1_torsion": list(rep.h1.torsion),
        "h1": str(rep.h1),
        "is_cocycle": rep.is_cocycle,
        "unsolvable": rep.unsolvable,
        "full_mode_is_cocycle": rep.full_mode_is_cocycle,
        "full_mode_unsolvable": rep.full_mode_unsolvable,
    }
    if rep.cochain is None:
        report.update(status="h1_vanishes", witnesses=[{"h1": str(rep.h1)}])
        return EXIT_FAILS, report
    report["cochain"] = {tuple_key(t): list(v) for t, v in sorted(rep.cochain.values.items()) if any(v)}
    certified = rep.is_cocycle and rep.unsolvable and rep.full_mode_is_cocycle and rep.full_mode_unsolvable
    report["status"] = "certified" if certified else "not_certified"
    if not certified:
        report["witnesses"] = [{"cochain": report["cochain"]}]
        return EXIT_FAILS, report
    return EXIT_OK, report


def cmd_simplicial_verify(doc, args) -> tuple[int, dict]:
    K, V = build_system(doc)
    top = min(args.max_degree - 1, max(len(s) for s in K.simplices) + 1)
    failures = []
    for k in range(0, top + 1):
        for s in simplicial.enumerate_simplices(K, k):
            lhs = simplicial.boundary(simplicial.homotopy(s, K.key))
            if k >= 1:
                for t, c in simplicial.boundary({s: 1}).items():
                    lhs.add(simplicial.homotopy(t, K.key), c)
            if lhs != simplicial.phi(s, K.key):
                failures.append({"identity": "dh + hd = phi", "simplex": list(s)})
    rng = random.Random(args.seed)
    C = simplicial.SystemComplex(K, V, max_degree=top)
    for q in range(1, top):
        c = simplicial.SysCochain(q, {s: tuple(rng.randint(-9, 9) for _ in range(V.value(s).rank))
                                      for s in C.simplices(q)})
        p = simplicial.alternating_project(C, c)
        bad = simplicial.alternation_violations(C, p)
        if bad:
            failures.append({"identity": "projection alternates", "simplex": list(bad[0])})
        if not C.equal(simplicial.alternating_project(C, p), p):
            failures.append({"identity": "projection idempotent", "degree": q})
    invariants = {}
    for n in range(0, top):
        full = simplicial.SystemComplex(K, V, max_degree=n + 1).cohomology(n)
        alt = simplicial.SystemComplex(K, V, alternating=True, max_degree=n + 1).cohomology(n)
        invariants[str(n)] = {"full": _invariants(full), "alternating": _invariants(alt)}
        if full != alt:
            failures.append({"identity": "quasi-isomorphism", "degree": n})
    report = {"status": "verified" if not failures else "identity_failure",
              "checked_degrees": top, "cohomology": invariants, "witnesses": failures}
    return (EXIT_OK if not failures else EXIT_FAILS), report


def cmd_refine(doc, args) -> tuple[int, dict]:
    G = _ambient(doc["rank"], doc.get("relations"))
    src = SubgroupFamily(G, _members(G, doc["source"], "$.source"))
    tgt = SubgroupFamily(G, _members(G, doc["target"], "$.target"))
    for name in ("tau", "sigma"):
        if len(doc[name]) != len(tgt):
            raise InputError(f"$.{name}: expected one source index per target member ({len(tgt)})")
        for k, i in enumerate(doc[name]):
            if i >= len(src):
                raise InputError(f"$.{name}[{k}]: source index {i} out of range")
    S = FamilyComplex(src, args.mode, max_degree=min(args.max_degree, 3))
    T = FamilyComplex(tgt, args.mode, max_degree=min(args.max_degree, 3))
    maps = {}
    witnesses = []
    for name in ("tau", "sigma"):
        try:
            maps[name] = RefinementMap(S, T, dict(enumerate(doc[name])))
        except cochain.ContainmentViolation:
            for j, i in enumerate(doc[name]):
                if not src[i] <= tgt[j]:
                    witnesses.append({"map": name, "target": j, "source": i, "failure": "not contained"})
    if witnesses:
        return EXIT_FAILS, {"status": "not_a_refinement", "witnesses": witnesses}
    rng = random.Random(args.seed)
    checked = []
    for n in range(0, S.max_degree):
        f = FamilyCochain(n, {t: tuple(rng.randint(-20, 20) for _ in range(G.rank)) for t in S.tuples(n)})
        bad = cochain.homotopy_defects(maps["tau"], maps["sigma"], f)
        checked.append(n)
        witnesses += [{"degree": n, "tuple": tuple_key(t)} for t in bad]
    report = {"status": "homotopic" if not witnesses else "homotopy_failure",
              "checked_degrees": checked, "witnesses": witnesses}
    return (EXIT_OK if not witnesses else EXIT_FAILS), report


def cmd_selftest(doc, args) -> tuple[int, dict]:
    previous = cochain.SIGN_FLIP_FOR_SELFTEST
    cochain.SIGN_FLIP_FOR_SELFTEST = args.corrupt_sign
    simplicial.clear_caches()
    try:
        results = harness.run_all(seed=args.seed, scale=args.scale)
    finally:
        cochain.SIGN_FLIP_FOR_SELFTEST = previous
        simplicial.clear_caches()
    for r in results:
        print(r.line(), file=sys.stderr)
    failed = [r for r in results if not r.passed]
    report = {
        "status": "passed" if not failed else "failed",
        "seed": args.seed,
        "scale": args.scale,
        "criteria": [{"number": r.number, "name": r.name, "passed": r.passed, "detail": r.detail}
                     for r in results],
        "witnesses": [{"criterion": r.number, "detail": r.detail} for r in failed],
    }
    if args.timing:
        report["criterion_seconds"] = {str(r.number): round(r.seconds, 3) for r in results}
    return (EXIT_OK if not failed else EXIT_FAILS), report


COMMANDS = {
    "check": cmd_check,
    "solve": cmd_solve,
    "cohomology": cmd_cohomology,
    "lattice": cmd_lattice,
    "counterexample": cmd_counterexample,
    "simplicial-verify": cmd_simplicial_verify,
    "refine": cmd_refine,
    "selftest": cmd_selftest,
}


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"environment variable {name}={raw!r} is not an integer") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="intcong", description="Exact gcd-congruence solver and subgroup-family cohomology.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("instance", nargs="?", help="instance JSON file, or - for stdin")
    p.add_argument("--degree", type=int)
    p.add_argument("--rank", type=int)
    p.add_argument("--lines", type=int)
    p.add_argument("--seed", type=int, help="RNG seed (default 0); counterexample draws random lines only when given")
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--mode", choices=(FULL, INCREASING), default=INCREASING)
    p.add_argument("--max-closure", type=int, help=f"lattice closure cap (env {ENV_MAX_CLOSURE})")
    p.add_argument("--max-degree", type=int, help=f"highest cochain degree (env {ENV_MAX_DEGREE})")
    p.add_argument("--brute-budget", type=int, help=f"exhaustive search budget (env {ENV_BRUTE_BUDGET})")
    p.add_argument("--oracle", action="store_true", help="solve: cross-check feasibility by exhaustive search")
    p.add_argument("--timing", action="store_true", help="add wall-clock seconds to the report")
    p.add_argument("--corrupt-sign", action="store_true", help="selftest: flip one coboundary sign")
    return p


def _emit(report: dict) -> None:
    sys.stdout.write(json.dumps(_json_safe(report), sort_keys=True, indent=2) + "\n")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.explicit_seed = args.seed
    args.seed = 0 if args.seed is None else args.seed
    t0 = time.perf_counter()
    report: dict = {"command": args.command}
    try:
        args.max_closure = args.max_closure if args.max_closure is not None else \
            _env_int(ENV_MAX_CLOSURE, lattice.DEFAULT_CAP)
        args.max_degree = args.max_degree if args.max_degree is not None else \
            _env_int(ENV_MAX_DEGREE, cochain.DEFAULT_MAX_DEGREE)
        args.brute_budget = args.brute_budget if args.brute_budget is not None else \
            _env_int(ENV_BRUTE_BUDGET, solver.DEFAULT_BRUTE_FORCE_BUDGET)
        doc = None
        wanted = COMMAND_TYPES.get(args.command)
        if wanted:
            if args.instance is None:
                raise InputError(f"{args.command} needs an instance file")
            if args.instance == "-":
                text, source = sys.stdin.read(), "<stdin>"
            else:
                try:
                    with open(args.instance, encoding="utf-8") as fh:
                        text = fh.read()
                except OSError as exc:
                    raise InputError(f"{args.instance}: {exc.strerror}") from None
                source = args.instance
            doc = load_instance(text, source)
            if doc["type"] not in wanted:
                raise InputError(f"{source}: $.type: {args.command} expects {' or '.join(wanted)}, "
                                 f"got {doc['type']!r}")
        elif args.instance is not None:
            raise InputError(f"{args.command} takes no instance file")
        code, body = COMMANDS[args.command](doc, args)
        report.update(body)
    except InputError as exc:
        code = EXIT_ERROR
        report.update(status="input_error", message=str(exc))
    except (ValueError, Infeasible, cochain.DegreeOverflow) as exc:
        code = EXIT_ERROR
        report.update(status="input_error", message=f"{type(exc).__name__}: {exc}")
    except Exception as exc:  # reported, never a traceback
        code = EXIT_ERROR
        report.update(status="internal_error", message=f"{type(exc).__name__}: {exc}")
    if args.timing:
        report["seconds"] = round(time.perf_counter() - t0, 3)
    _emit(report)
    return code


if __name__ == "__main__":
    sys.exit(main())

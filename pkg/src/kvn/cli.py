"""Command-line batch front end.

Usage::

    kvn extend-op --input problem.json [--output report.json] [--format json|text]
    kvn check-op | diag | extend-fn | gns | scenario --input FILE
    kvn corpus [--input DIR]

Exit codes: 0 success, 2 mathematical refusal (the report carries the
witness), 1 malformed input, I/O or schema errors.  ``KVN_SEED`` sets the
default seed.
"""

import argparse
import json
import os
import sys
import time
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np
from referencing import Registry, Resource

from . import algebra as alg
from . import diagonal as dg
from . import extension as ext
from . import gns as gn
from ._linalg import RTOL, TOL
from .errors import KvnError, NotPositive, NotSymmetric, Refusal
from .extension import PartialPositiveOperator
from .serialize import decode_complex, dumps, encode_complex, to_jsonable

COMMANDS = ("extend-op", "check-op", "diag", "extend-fn", "gns", "scenario", "corpus")
KIND_OF = {"extend-op": "operator", "check-op": "operator", "diag": "diagonal",
           "extend-fn": "functional", "gns": "functional", "scenario": "scenario"}
DEFAULT_COMMAND = {"operator": "extend-op", "diagonal": "diag", "functional": "extend-fn",
                   "scenario": "scenario"}
EXIT_OK, EXIT_ERROR, EXIT_REFUSED = 0, 1, 2


class InputError(Exception):
    """Malformed problem file (exit code 1)."""


# ---------------------------------------------------------------- schemas

def _load_schemas():
    base = resources.files("kvn") / "schemas"
    docs = {}
    for name in ("defs", "problem", "operator", "diagonal", "functional", "scenario"):
        docs[name] = json.loads((base / f"{name}.json").read_text())
    registry = Registry().with_resources(
        (doc["$id"], Resource.from_contents(doc)) for doc in docs.values())
    return docs, registry


_SCHEMAS = None


def validate_problem(problem):
    """Validate the envelope and its payload; raise :class:`InputError` with the schema path."""
    global _SCHEMAS
    if _SCHEMAS is None:
        _SCHEMAS = _load_schemas()
    docs, registry = _SCHEMAS
    for schema, inst, where in ((docs["problem"], problem, "problem"),):
        _validate(schema, inst, registry, where)
    _validate(docs[problem["kind"]], problem["payload"], registry, "payload")
    return problem


def _validate(schema, inst, registry, where):
    v = jsonschema.Draft202012Validator(schema, registry=registry)
    errors = sorted(v.iter_errors(inst), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        path = "/".join(str(p) for p in e.absolute_path)
        raise InputError(f"{where}{'/' + path if path else ''}: {e.message}")


# ---------------------------------------------------------------- handlers

def _options(problem, args):
    opts = dict(problem.get("options", {}))
    seed = args.seed if args.seed is not None else opts.get("seed", int(os.environ.get("KVN_SEED", "0")))
    tol = args.tol if args.tol is not None else opts.get("tol", TOL)
    return {"seed": int(seed), "tol": float(tol), "rtol": float(opts.get("rtol", RTOL)),
            "grid_density": int(opts.get("grid_density", 16))}


def _operator(payload):
    return PartialPositiveOperator.from_json(payload)


def run_extend_op(payload, o):
    op = _operator(payload)
    res = ext.krein_von_neumann(op, o["tol"], o["rtol"])
    out = res.to_json()
    out["residual"] = float(np.max(np.abs(res.A_N @ op.D - op.B))) if op.k else 0.0
    chain = ext.range_chain_check(op, res)
    out["range_chain"] = {"ok": chain.ok, "ranks": chain.ranks}
    return out


def run_check_op(payload, o):
    op = _operator(payload)
    G = ext.gram(op, o["tol"])
    chk = ext.check_well_defined(op, o["tol"], o["rtol"])
    out = {"symmetric": True, "positive": True, "well_defined": bool(chk), "defect": chk.detail,
           "rank_G": int(np.linalg.matrix_rank(G)) if op.k else 0}
    if not chk:
        raise ext.NotExtendable("a domain vector with <Ax|x> = 0 has A x != 0", chk.witness)
    b = ext.compactness_check(op, o["tol"], o["rtol"])
    out["bounded"] = bool(b.bounded)
    return out


def run_diag(payload, o):
    d = dg.DiagonalOperator.from_json(payload)
    sizes = payload.get("truncations", [4, 8, 16, 32])
    eps = payload.get("eps", 0.25)
    _, M = dg.is_extendable(d)
    rows = []
    for n in sizes:
        op = dg.truncate(d, n)
        res = ext.krein_von_neumann(op, o["tol"], o["rtol"])
        rows.append({"n": n, "schwarz_bound": ext.schwarz_bound(op, res),
                     "Mprime": res.Mprime_min, "Mprime_exact": dg.truncated_mprime(d, n)})
    stab, counts = dg.net_stabilizes(d, eps)
    return {"extendable": True, "M_min": M, "compact": dg.is_compact_extension(d),
            "closed_range": dg.has_closed_range_extension(d), "truncations": rows,
            "net": {"eps": eps, "counts": counts, "stabilizes": stab}}


def _functional(payload):
    a = alg.from_json(payload["algebra"])
    gens = [decode_complex(g, 1) for g in payload["ideal_generators"]]
    values = decode_complex(payload["values"], 1) if "values" in payload else None
    phi = decode_complex(payload["functional"], 1) if "functional" in payload else None
    return a, gn.IdealFunctional.from_generators(a, gens, values=values, functional=phi)


def run_extend_fn(payload, o):
    a, F = _functional(payload)
    rep = gn.representability_check(F, o["rtol"], seed=o["seed"])
    fN, data, cert = gn.minimal_extension(F, seed=o["seed"], rtol=o["rtol"])
    out = {"ideal_dim": F.k, "C_min": rep.C_min, "H_dim": data.H_dim, "fN": encode_complex(fN),
           "certificate": {"extends": cert.extends, "representable": cert.representable,
                           "sup_formula": cert.sup_formula, "state_formula": cert.state_formula,
                           "samples": cert.samples, "ok": cert.ok}}
    try:
        out["schwarz_bound"] = gn.schwarz_functional_bound(F, rep, o["tol"], o["rtol"])
    except KvnError as exc:       # e.g. norms without a coordinate model
        out["schwarz_bound"] = None
        out["schwarz_note"] = str(exc)
    if "left_unit" in payload:
        e = decode_complex(payload["left_unit"], 1)
        out["unital_fN"] = encode_complex(gn.unital_minimal_extension(F, e, o["rtol"]))
    return out


def run_gns(payload, o):
    a, F = _functional(payload)
    data = gn.gns(F, o["rtol"])
    out = data.to_json()
    out["checks"] = {"homomorphism": True, "star": True, "reconstruction": True, "cyclic": True}
    return out


def run_scenario(payload, o):
    name = payload["scenario"]
    if name == "discrete_measure":
        rep = gn.discrete_measure_scenario(payload["mu"], payload["K"], payload["eK"], seed=o["seed"])
        out = rep.to_json()
        F = gn.discrete_measure_functional(payload["mu"], payload["K"])
        net = gn.indicator_net(len(payload["mu"]), payload["K"], payload.get("net_steps", 6))
        au = gn.approximate_unit_limit(F, net)
        out["approximate_unit"] = {"deviations": au.deviations, "monotone": au.monotone, "final": au.final}
        return out
    a = alg.from_json(payload["algebra"])
    phi = decode_complex(payload["functional"], 1)
    if name == "unitization":
        rep = gn.unitization_extension(a, phi, seed=o["seed"])
        return {"algebra": rep.algebra.name, "fN": encode_complex(rep.fN),
                "unit_value": rep.unit_value, "sup_formula_error": rep.sup_formula_error}
    if name == "completeness":
        L, empty = gn.completeness_bound(a, phi)
        return {"L_min": L, "empty_supremum": empty}
    gens = [decode_complex(g, 1) for g in payload["ideal_generators"]]
    F = gn.IdealFunctional.from_generators(a, gens, functional=phi)
    chain = gn.cstar_ideal_norm_check(F)
    return {"f_norm": chain.f_norm, "zeta_norm_sq": chain.zeta_norm_sq, "A_N_norm": chain.AN_norm,
            "fN_norm": chain.fN_norm, "consistent": chain.consistent()}


HANDLERS = {"extend-op": run_extend_op, "check-op": run_check_op, "diag": run_diag,
            "extend-fn": run_extend_fn, "gns": run_gns, "scenario": run_scenario}


def solve(command, problem, args):
    """``(exit_code, report)`` for an already parsed problem."""
    try:
        validate_problem(problem)
        if KIND_OF[command] != problem["kind"]:
            raise InputError(f"command {command} expects kind {KIND_OF[command]!r}, got {problem['kind']!r}")
        o = _options(problem, args)
        report = {"status": "ok", "command": command}
        report.update(HANDLERS[command](problem["payload"], o))
        return EXIT_OK, report
    except (Refusal, NotSymmetric, NotPositive) as exc:
        return EXIT_REFUSED, {"status": "refused", "command": command, "error": type(exc).__name__,
                              "message": str(exc), "witness": exc.witness}
    except (InputError, KvnError, ValueError, KeyError, TypeError) as exc:
        return EXIT_ERROR, {"status": "error", "command": command, "error": type(exc).__name__,
                            "message": str(exc)}


# ---------------------------------------------------------------- output

def _text(report, prefix=""):
    lines = []
    for key in sorted(report):
        val = report[key]
        label = f"{prefix}{key}"
        if isinstance(val, dict) and not {"lower", "upper"} <= set(val):
            lines += _text(val, label + ".")
        elif isinstance(val, dict):
            lines.append(f"{label}: [{val['lower']:.12g}, {val['upper']:.12g}]")
        elif isinstance(val, float):
            lines.append(f"{label}: {val:.12g}")
        else:
            lines.append(f"{label}: {json.dumps(val)}")
    return lines


def render(report, fmt):
    report = to_jsonable(report)
    if fmt == "text":
        return "\n".join(_text(report)) + "\n"
    return dumps(report)


def _emit(text, output):
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)


# ---------------------------------------------------------------- corpus

def matches(expected, actual, tol):
    """Whether ``actual`` reproduces ``expected``; intervals must contain expected numbers."""
    if isinstance(expected, dict):
        return isinstance(actual, dict) and all(k in actual and matches(v, actual[k], tol)
                                                for k, v in expected.items())
    if isinstance(expected, bool) or isinstance(expected, str) or expected is None:
        return expected == actual
    if isinstance(expected, (int, float)):
        s = tol * max(1.0, abs(expected))
        if isinstance(actual, dict) and {"lower", "upper"} <= set(actual):
            return actual["lower"] - s <= expected <= actual["upper"] + s
        if isinstance(actual, list) and len(actual) == 2 and all(isinstance(u, (int, float)) for u in actual):
            return abs(complex(*actual) - expected) <= s
        return isinstance(actual, (int, float)) and abs(actual - expected) <= s
    if isinstance(expected, list) and any(isinstance(e, dict) for e in expected):
        return isinstance(actual, list) and len(actual) >= len(expected) and all(
            matches(e, a, tol) for e, a in zip(expected, actual))
    if isinstance(expected, list):
        try:
            act = np.asarray(actual, dtype=float)
            exp = np.asarray(expected, dtype=float)
        except (ValueError, TypeError):
            return False
        if act.shape == exp.shape:
            return bool(np.all(np.abs(act - exp) <= tol * np.maximum(1.0, np.abs(exp))))
        if act.shape[:-1] == exp.shape and act.shape[-1:] == (2,):
            z = act[..., 0] + 1j * act[..., 1]
            return bool(np.all(np.abs(z - exp) <= tol * np.maximum(1.0, np.abs(exp))))
        return False
    return False


def corpus_files(directory=None):
    if directory:
        return sorted(Path(directory).glob("*.json"))
    base = resources.files("kvn") / "corpus"
    return sorted((p for p in base.iterdir() if p.name.endswith(".json")), key=lambda p: p.name)


def run_corpus(args):
    rows, ok_all = [], True
    files = corpus_files(args.input)
    if not files:
        print("error: empty corpus", file=sys.stderr)
        return EXIT_ERROR
    t_all = time.perf_counter()
    results = []
    for path in files:
        t0 = time.perf_counter()
        try:
            problem = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            rows.append((path.name, "-", "FAIL", 0.0, f"unreadable: {exc}"))
            ok_all = False
            continue
        command = problem.get("command", DEFAULT_COMMAND.get(problem.get("kind"), "extend-op"))
        code, report = solve(command, problem, args)
        expect = problem.get("expect", {})
        want = expect.get("exit", EXIT_OK)
        good = code == want and matches(expect.get("values", {}), to_jsonable(report), expect.get("tol", 1e-6))
        dt = time.perf_counter() - t0
        note = "" if good else f"exit {code} (want {want}); {report.get('message', 'values differ')}"
        rows.append((path.name, command, "PASS" if good else "FAIL", dt, note))
        results.append({"fixture": path.name, "command": command, "exit": code, "pass": good})
        ok_all &= good
    total = time.perf_counter() - t_all
    if args.format == "json":
        _emit(dumps({"fixtures": results, "passed": sum(r["pass"] for r in results),
                     "total": len(results), "ok": ok_all}), args.output)
    else:
        width = max(len(r[0]) for r in rows)
        lines = [f"{'fixture':<{width}}  {'command':<9}  result  seconds"]
        for name, cmd, res, dt, note in rows:
            lines.append(f"{name:<{width}}  {cmd:<9}  {res:<6}  {dt:7.3f}" + (f"  {note}" if note else ""))
        lines.append(f"{sum(r[2] == 'PASS' for r in rows)}/{len(rows)} passed in {total:.2f} s")
        _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK if ok_all else EXIT_ERROR


# ---------------------------------------------------------------- entry point

def build_parser():
    p = argparse.ArgumentParser(prog="kvn", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--input", "-i", help="problem file ('-' for stdin); for corpus, a directory")
        s.add_argument("--output", "-o", help="report path (default stdout)")
        s.add_argument("--format", choices=("json", "text"), default=None)
        s.add_argument("--tol", type=float, default=None)
        s.add_argument("--seed", type=int, default=None)
    return p


def _read_problem(path):
    try:
        text = sys.stdin.read() if path in (None, "-") else Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from exc


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "corpus":
        args.format = args.format or "text"
        return run_corpus(args)
    try:
        problem = _read_problem(args.input)
        if not isinstance(problem, dict):
            raise InputError("problem file must be a JSON object")
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    fmt = args.format or problem.get("options", {}).get("format", "json")
    code, report = solve(args.command, problem, args)
    if code == EXIT_ERROR:
        print(f"error: {report['message']}", file=sys.stderr)
    try:
        _emit(render(report, fmt), args.output)
    except OSError as exc:
        print(f"error: cannot write {args.output}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return code


if __name__ == "__main__":
    sys.exit(main())

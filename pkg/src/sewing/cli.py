"""Command-line front end.

Exit status: 0 when every check passes, 1 when a check fails, 2 on
unreadable input, 3 on an internal invariant violation.  Reports go to
stdout (text, or JSON with ``--json``); ``--out`` also writes the JSON
report to a file.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import acceptance
from .cardy import CardyAlgebra, Retract, build_solution, check_cardy, extract_cardy, identity_retract
from .corpus import build_corpus, o4_decompositions
from .errors import CheckFailed, InternalInvariantViolation, ParseError, SewingError
from .evaluator import Decomposition, SewingSolution, check_decomposition_independence, evaluate
from .generators import GENERATORS, canonical_name
from .library import LibraryEntry, library_solutions, library_to_json, load_library
from .relations import check_all
from .rewrite import DerivationCertificate, prove_equal, replay_terms
from .scalar import ClosedOnly, Full, Zero, classify_scalar
from .tensor import LabelSpaces, relative_residual

EXIT_PASS, EXIT_FAIL, EXIT_PARSE, EXIT_INTERNAL = 0, 1, 2, 3


# -- input ------------------------------------------------------------------
def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True)


def load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from None


def parse_complex(v) -> complex:
    """A number, ``[re, im]`` or ``{"re": .., "im": ..}``."""
    try:
        if isinstance(v, (int, float)) and not isinstance(v, bool):
            return complex(v)
        if isinstance(v, list) and len(v) == 2:
            return complex(float(v[0]), float(v[1]))
        if isinstance(v, dict):
            return complex(float(v["re"]), float(v.get("im", 0.0)))
    except (KeyError, TypeError, ValueError):
        pass
    raise ParseError(f"not a complex number: {v!r}")


def parse_scalars(doc: dict) -> dict[str, complex]:
    """Scalar assignment from ``{"scalars": {...}}`` or a solution with
    one-dimensional label spaces."""
    if "scalars" in doc:
        raw = doc["scalars"]
        if not isinstance(raw, dict):
            raise ParseError("'scalars' must be an object")
        c = {}
        for k, v in raw.items():
            try:
                c[canonical_name(k)] = parse_complex(v)
            except KeyError:
                raise ParseError(f"unknown generator {k!r}") from None
        missing = [g for g in GENERATORS if g not in c]
        if missing:
            raise ParseError(f"scalar assignment lacks {missing}")
        return c
    return load_solution_doc(doc).scalars()


def load_solution_doc(doc: dict) -> SewingSolution:
    if "scalars" in doc:
        return SewingSolution.from_scalars(parse_scalars(doc))
    if "cardy" in doc:
        return LibraryEntry.from_json({"name": "", **doc}).solution()
    return SewingSolution.from_json(doc)


def load_solution(arg: str) -> SewingSolution:
    """A solution file, or ``library:NAME`` for a bundled entry."""
    if arg.startswith("library:"):
        name = arg.split(":", 1)[1]
        for e in load_library():
            if e.name == name:
                return e.solution()
        raise ParseError(f"no library entry {name!r}; have {[e.name for e in load_library()]}")
    return load_solution_doc(load_json(arg))


def load_cardy_bundle(doc: dict) -> tuple[CardyAlgebra, Retract | None, Retract | None, LabelSpaces | None]:
    if "cardy" not in doc:
        return CardyAlgebra.from_json(doc), None, None, None
    C = CardyAlgebra.from_json(doc["cardy"])
    try:
        Rop = Retract.from_json(doc["retractOp"]) if "retractOp" in doc else None
        Rcl = Retract.from_json(doc["retractCl"]) if "retractCl" in doc else None
        L = LabelSpaces.from_json(doc["labelSpaces"]) if "labelSpaces" in doc else None
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed Cardy bundle: {exc}") from None
    return C, Rop, Rcl, L


def load_decomposition(path: str) -> Decomposition:
    return Decomposition.from_json(load_json(path))


# -- subcommands ----------------------------------------------------------------
# Each returns (passed, report document, text lines).
def cmd_check_solution(args):
    rep = check_all(load_solution(args.solution), args.tol)
    lines = [f"R{n:<3} {r:.3e} {'ok' if r <= args.tol else 'FAIL'}" for n, r in rep.residuals.items()]
    lines.append("all relations hold" if rep.passed else f"failing: {rep.failing}")
    return rep.passed, {"pass": rep.passed, "tol": args.tol, "relations": rep.to_json()}, lines


def cmd_classify_scalar(args):
    c = parse_scalars(load_json(args.solution))
    fam = classify_scalar(c, args.scalar_tol)
    params = {Zero: "", ClosedOnly: "alpha, beta", Full: "alpha, beta, gamma"}[type(fam)]
    doc = {"pass": True, **fam.to_json()}
    line = type(fam).__name__ + (f" ({params} = {', '.join(f'{complex(p):.6g}' for p in _params(fam))})"
                                 if params else "")
    return True, doc, [line]


def _params(fam):
    if isinstance(fam, Full):
        return fam.alpha, fam.beta, fam.gamma
    if isinstance(fam, ClosedOnly):
        return fam.alpha, fam.beta
    return ()


def cmd_extract_cardy(args):
    sol = load_solution(args.solution)
    C, Rop, Rcl = extract_cardy(sol, args.tol)
    rep = check_cardy(C, args.tol)
    doc = {"pass": rep.passed, "cardy": C.to_json(), "retractOp": Rop.to_json(),
           "retractCl": Rcl.to_json(), "labelSpaces": sol.L.to_json(), "report": rep.to_json()}
    lines = [f"open algebra dimension {C.A_op.dim}, closed algebra dimension {C.A_cl.dim}"]
    lines += [f"{k:<20} {r:.3e}" for k, r in rep.residuals.items()]
    return rep.passed, doc, lines


def cmd_build_solution(args):
    C, Rop, Rcl, L = load_cardy_bundle(load_json(args.cardy))
    Rop = Rop or identity_retract(C.A_op.dim)
    Rcl = Rcl or identity_retract(C.A_cl.dim)
    L = L or LabelSpaces(Rop.ambient, Rcl.ambient, 1)
    sol = build_solution(C, Rop, Rcl, L, args.tol)
    rep = check_all(sol, args.tol)
    doc = {"pass": rep.passed, "solution": sol.to_json(), "relations": rep.to_json()}
    return rep.passed, doc, [f"built solution on {L}", f"worst relation residual {max(rep.residuals.values()):.3e}"]


def cmd_check_cardy(args):
    C, *_ = load_cardy_bundle(load_json(args.cardy))
    rep = check_cardy(C, args.tol)
    lines = [f"{k:<20} {r:.3e} {'ok' if r <= args.tol else 'FAIL'}" for k, r in rep.residuals.items()]
    return rep.passed, rep.to_json(), lines


def cmd_eval(args):
    sol = load_solution(args.solution)
    decs = [load_decomposition(p) for p in args.decompositions]
    values = [evaluate(sol, d) for d in decs]
    doc = {"value": values[0].to_json()}
    lines = [f"value of shape {values[0].shape}, norm {float(abs(values[0].data).sum()):.6g} (l1)"]
    ok = True
    if len(decs) > 1:
        res = [check_decomposition_independence(sol, decs[0], d, args.tol).residual for d in decs[1:]]
        ok = all(r <= args.tol for r in res)
        doc["independence"] = [{"decomposition": p, "residual": r} for p, r in zip(args.decompositions[1:], res)]
        lines += [f"{p}: residual {r:.3e}" for p, r in zip(args.decompositions[1:], res)]
    doc["pass"] = ok
    return ok, doc, lines


def cmd_prove(args):
    d1, d2 = load_decomposition(args.left), load_decomposition(args.right)
    cert = prove_equal(d1, d2, budget=args.budget, max_extra_factors=args.max_extra)
    if not cert:
        return False, {"pass": False, "reason": cert.reason, "expansions": cert.expansions}, \
            [f"no certificate: {cert.reason} after {cert.expansions} expansions"]
    if replay_terms(d1, cert)[-1] != d2:
        raise InternalInvariantViolation("certificate does not replay to the right-hand side")
    doc = {"pass": True, "certificate": cert.to_json()}
    return True, doc, [f"certificate of length {cert.length}: {' '.join(cert.relations)}"]


def cmd_verify(args):
    d1, d2 = load_decomposition(args.left), load_decomposition(args.right)
    doc = load_json(args.certificate)
    cert = DerivationCertificate.from_json(doc.get("certificate", doc))
    terms = replay_terms(d1, cert)
    reaches = terms[-1] == d2
    worst = 0.0
    for _, sol in library_solutions():
        ref = evaluate(sol, d1)
        worst = max(worst, max(relative_residual(evaluate(sol, t), ref) for t in terms))
    ok = reaches and worst <= args.tol
    return ok, {"pass": ok, "reaches": reaches, "maxDeviation": worst}, \
        [f"replay {'reaches' if reaches else 'does not reach'} the right-hand side",
         f"largest deviation along the chain over the library: {worst:.3e}"]


def cmd_examples(args):
    out = Path(args.out)
    written = []

    def put(rel, doc):
        p = out / rel
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(dumps(doc) + "\n")
        written.append(str(p))

    lib = load_library()
    put("library.json", library_to_json(lib))
    for e in lib:
        put(f"solutions/{e.name}.json", e.solution().to_json())
        put(f"cardy/{e.name}.json", e.to_json())
    put("scalar-111.json", {"scalars": {g: _cj(v) for g, v in Full(1, 1, 1).assignment().items()}})
    put("zero.json", {"scalars": {g: 0 for g in GENERATORS}})
    put("closed-only.json", {"scalars": {g: _cj(v) for g, v in ClosedOnly(2, 3).assignment().items()}})
    put("not-a-solution.json", {"scalars": {g: (2 if g == "mo" else 1) for g in GENERATORS}})
    left, right = o4_decompositions()
    put("corpus/o4-left.json", left.to_json())
    put("corpus/o4-right.json", right.to_json())
    for sheet in build_corpus():
        for k, d in enumerate(sheet.decompositions):
            put(f"corpus/{sheet.name}-{k}.json", d.to_json())
    return True, {"pass": True, "written": written}, [f"wrote {len(written)} files under {out}"]


def _cj(v: complex):
    v = complex(v)
    return v.real if v.imag == 0 else [v.real, v.imag]


def cmd_selftest(args):
    results = acceptance.run_all(seed=args.seed, tol=args.tol)
    ok = all(r.passed for r in results)
    return ok, {"pass": ok, "criteria": [r.to_json() for r in results]}, [r.line() for r in results]


# -- wiring -----------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-9, help="residual tolerance (default 1e-9)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    common.add_argument("--out", help="write the JSON report here (a directory for 'examples')")
    common.add_argument("--json", action="store_true", help="print the JSON report instead of text")

    p = argparse.ArgumentParser(prog="sewing", description="Check and build sewing-constraint solutions.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(fn=fn)
        return sp

    add("check-solution", cmd_check_solution, "residual of every relation").add_argument("solution")
    sp = add("classify-scalar", cmd_classify_scalar, "family of a one-dimensional solution")
    sp.add_argument("solution")
    sp.add_argument("--scalar-tol", type=float, default=1e-12)
    add("extract-cardy", cmd_extract_cardy, "Cardy algebra of a solution").add_argument("solution")
    add("build-solution", cmd_build_solution, "solution from a Cardy algebra").add_argument("cardy")
    add("check-cardy", cmd_check_cardy, "Cardy algebra axioms").add_argument("cardy")
    sp = add("eval", cmd_eval, "evaluate decompositions; several are compared")
    sp.add_argument("solution")
    sp.add_argument("decompositions", nargs="+")
    sp = add("prove", cmd_prove, "search for a rewrite certificate between two decompositions")
    sp.add_argument("left")
    sp.add_argument("right")
    sp.add_argument("--budget", type=int, default=100_000)
    sp.add_argument("--max-extra", type=int, default=4)
    sp = add("verify", cmd_verify, "replay a certificate and check evaluations along it")
    sp.add_argument("left")
    sp.add_argument("right")
    sp.add_argument("certificate")
    add("examples", cmd_examples, "write the bundled examples")
    add("selftest", cmd_selftest, "run the acceptance suite")
    return p


def run(argv: list[str] | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    if args.tol <= 0:
        print("error: --tol must be positive", file=sys.stderr)
        return EXIT_PARSE
    if args.command == "examples" and not args.out:
        args.out = "sewing-examples"
    try:
        ok, doc, lines = args.fn(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except CheckFailed as exc:
        print(f"check failed ({type(exc).__name__}): {exc}", file=sys.stderr)
        if args.json:
            print(dumps({"pass": False, "error": type(exc).__name__, "message": str(exc)}), file=stdout)
        return EXIT_FAIL
    except InternalInvariantViolation as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except SewingError as exc:
        # malformed but parseable input (shapes, ports, targets)
        print(f"error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_PARSE
    if args.out and args.command != "examples":
        Path(args.out).write_text(dumps(doc) + "\n")
    print(dumps(doc) if args.json else "\n".join(lines), file=stdout)
    return EXIT_PASS if ok else EXIT_FAIL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

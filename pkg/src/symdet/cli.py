"""Command-line front end. Every command prints one JSON report on stdout.

Exit codes: 0 PASS, 1 FAIL (mathematical mismatch), 2 ERROR (bad input or a
degenerate instance).
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, io
from . import numeric as nm
from .errors import SymDetError
from .numeric import Regime
from .pencil import (
    CONDITIONS,
    SymTuple,
    eval_pencil,
    gen_char_poly,
    in_U,
    random_tuple,
    same_hypersurface,
)
from .recovery import expected_sdhyp_dim, extract_last_matrix, mu_plane, verify_dimension
from .reduction import are_equivalent, canonicalize, hn_act, reduce, reduced_orbit

EXIT = {"PASS": 0, "FAIL": 1, "ERROR": 2}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _reduced_obj(R) -> dict:
    iu = np.triu_indices(R.n)
    return {
        "lambdas": [io.format_complex(z) for z in R.lambdas],
        "tail": [[io.format_complex(z) for z in B[iu]] for B in R.tail],
    }


def _max_abs(a) -> float:
    return float(np.abs(np.asarray(a)).max(initial=0.0))


# --------------------------------------------------------------------------
# commands: each returns (outcome, payload, residuals, inputs)


def cmd_charpoly(args):
    text = _read(args.input)
    A = io.parse_tuple(text)
    P = gen_char_poly(A)
    residuals = {}
    if args.recheck:
        rng = np.random.default_rng([args.seed, 0])
        worst = 0.0
        for _ in range(10):
            x = [int(v) for v in rng.integers(-5, 6, size=A.r + 1)]
            diff = complex(P(x)) - complex(eval_pencil(A, x))
            worst = max(worst, abs(diff))
        residuals["eval_vs_coefficients"] = worst
    ok = residuals.get("eval_vs_coefficients", 0.0) <= 1e-8 * max(1.0, A.scale()) ** A.n
    return ("PASS" if ok else "FAIL"), {"poly": io.poly_to_obj(P)}, residuals, [text]


def cmd_same_hyp(args):
    ta, tb = _read(args.a), _read(args.b)
    c = same_hypersurface(gen_char_poly(io.parse_tuple(ta)), gen_char_poly(io.parse_tuple(tb)))
    payload = {"same": c is not None, "c": None if c is None else io.encode_scalar(c),
               "relation": "P_B = c * P_A"}
    return ("PASS" if c is not None else "FAIL"), payload, {}, [ta, tb]


def cmd_in_u(args):
    text = _read(args.input)
    A = io.parse_tuple(text)
    member = in_U(A)
    return ("PASS" if member else "FAIL"), {"in_U": member}, {}, [text]


def cmd_reduce(args):
    text = _read(args.input)
    A = io.parse_tuple(text)
    R, w = reduce(A)
    residuals = {"witness": w.residual}
    if args.recheck:
        residuals["witness_recheck"] = w.verify(A, R.to_tuple())
    payload = {"reduced": _reduced_obj(R), "witness": io.encode_matrix(w.g),
               "source": w.source, "target": w.target}
    return "PASS", payload, residuals, [text]


def cmd_canon(args):
    text = _read(args.input)
    A = io.parse_tuple(text)
    R, w = reduce(A)
    C, h = canonicalize(R)
    residuals = {"witness": w.residual}
    if args.recheck:
        C2, _ = canonicalize(C)
        residuals["idempotence"] = _max_abs(C2.flat() - C.flat())
        residuals["action"] = _max_abs(hn_act(h, R).flat() - C.flat())
    payload = {"canonical": _reduced_obj(C), "h": {"signs": list(h.signs), "perm": list(h.perm)},
               "witness": io.encode_matrix(w.g @ h.matrix())}
    return "PASS", payload, residuals, [text]


def cmd_equiv(args):
    ta, tb = _read(args.a), _read(args.b)
    A, B = io.parse_tuple(ta), io.parse_tuple(tb)
    w = are_equivalent(A, B)
    if w is None:
        return "FAIL", {"equivalent": False, "witness": None}, {}, [ta, tb]
    residuals = {"witness": w.residual}
    if args.recheck:
        residuals["witness_recheck"] = w.verify(A, B)
    payload = {"equivalent": True, "witness": io.encode_matrix(w.g), "relation": "g^T A_i g = B_i"}
    return "PASS", payload, residuals, [ta, tb]


def cmd_orbit(args):
    text = _read(args.input)
    orbit = reduced_orbit(io.parse_tuple(text))
    payload = {"size": len(orbit), "expected_generic": orbit.expected,
               "non_generic_collapse": orbit.non_generic_collapse}
    if args.elements:
        payload["elements"] = [_reduced_obj(R) for R in orbit]
    return ("FAIL" if orbit.non_generic_collapse else "PASS"), payload, {}, [text]


def cmd_recover_last(args):
    if args.full:
        text = _read(args.full)
        full = io.parse_tuple(text)
        if full.r < 1:
            raise UsageError("--full needs at least two matrices")
        prefix = SymTuple(full.matrices[:-1].copy())
        P = gen_char_poly(full)
        inputs = [text]
        hidden = full.matrices[-1]
    else:
        if not (args.prefix and args.poly):
            raise UsageError("give --full, or both --prefix and --poly")
        tp, tq = _read(args.prefix), _read(args.poly)
        prefix, P = io.parse_tuple(tp), io.parse_poly(tq)
        inputs = [tp, tq]
        hidden = None
    X = extract_last_matrix(prefix, P, seed=args.seed)
    payload = {"matrix": io.encode_matrix(X)}
    residuals = {}
    outcome = "PASS"
    if hidden is not None:
        payload["matches_input"] = bool(np.all(X == hidden))
        outcome = "PASS" if payload["matches_input"] else "FAIL"
    if args.recheck:
        again = gen_char_poly(SymTuple(np.concatenate([prefix.matrices, X[None]])))
        residuals["charpoly_recheck_exact"] = again == P
        if not residuals["charpoly_recheck_exact"]:
            outcome = "FAIL"
    return outcome, payload, residuals, inputs


def cmd_verify_dim(args):
    rep = verify_dimension(args.r, args.n, args.trials, args.seed)
    payload = rep.as_dict()
    payload["formula"] = "(r-1) n(n+1)/2 + n"
    return ("PASS" if rep.passed else "FAIL"), payload, {}, [f"{args.r},{args.n},{args.trials}"]


def cmd_mu(args):
    v = mu_plane(args.n)
    payload = {"n": args.n, "mu": str(v), "exponent": (args.n - 1) * (args.n - 2) // 2}
    if args.n >= 2:
        payload["sdhyp_dim_r2"] = expected_sdhyp_dim(2, args.n)
    return "PASS", payload, {}, [str(args.n)]


def cmd_gen(args):
    A = random_tuple(args.n, args.r, args.seed, Regime(args.regime), args.condition)
    text = io.serialize_tuple(A)
    if args.out:
        Path(args.out).write_text(text)
    return "PASS", {"tuple": io.tuple_to_obj(A), "written_to": args.out}, {}, [
        f"{args.n},{args.r},{args.regime},{args.condition}"]


def cmd_selftest(args):
    from .acceptance import run_all

    results = run_all(args.seed, echo=lambda line: print(line, file=sys.stderr))
    payload = {"criteria": [r.as_dict() for r in results]}
    return ("PASS" if all(r.passed for r in results) else "FAIL"), payload, {}, []


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="symdet", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"symdet {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=fn)
        sp.add_argument("--seed", type=int, default=0, help="64-bit seed (default 0)")
        sp.add_argument("--recheck", action="store_true",
                        help="re-verify emitted results in-process")
        return sp

    add("charpoly", cmd_charpoly, "generalized characteristic polynomial").add_argument(
        "--in", dest="input", required=True)
    for name, fn, h in (("same-hyp", cmd_same_hyp, "compare two hypersurfaces"),
                        ("equiv", cmd_equiv, "decide congruence equivalence")):
        sp = add(name, fn, h)
        sp.add_argument("--a", required=True)
        sp.add_argument("--b", required=True)
    for name, fn, h in (("in-u", cmd_in_u, "membership in the open set U"),
                        ("reduce", cmd_reduce, "reduce to (I, diag, ...)"),
                        ("canon", cmd_canon, "canonical reduced form")):
        add(name, fn, h).add_argument("--in", dest="input", required=True)
    sp = add("orbit", cmd_orbit, "enumerate the reduced tuples of an equivalence class")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--elements", action="store_true", help="include every orbit element")
    sp = add("recover-last", cmd_recover_last, "recover the last matrix from the hypersurface")
    sp.add_argument("--full", help="tuple whose last matrix is hidden and recovered")
    sp.add_argument("--prefix", help="spanning prefix tuple")
    sp.add_argument("--poly", help="polynomial document (a charpoly report also works)")
    sp = add("verify-dim", cmd_verify_dim, "certify the dimension formula by Jacobian rank")
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--trials", type=int, default=3)
    add("mu", cmd_mu, "presentation count of a general plane curve").add_argument(
        "--n", type=int, required=True)
    sp = add("gen", cmd_gen, "write a seeded random tuple")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--regime", choices=[r.value for r in Regime], default="rational")
    sp.add_argument("--condition", choices=CONDITIONS, default="any")
    sp.add_argument("--out")
    add("selftest", cmd_selftest, "run the acceptance criteria")
    return p


def _report(command, seed, inputs, outcome, payload, residuals, seconds) -> dict:
    return {
        "command": command,
        "version": __version__,
        "seed": seed,
        "inputs_digest": io.digest(*inputs),
        "outcome": outcome,
        "payload": payload,
        "residuals": residuals,
        "timing": {"seconds": round(seconds, 6)},
        "tolerance": {"eps_eq": nm.DEFAULT_TOL.eps_eq, "eps_rank": nm.DEFAULT_TOL.eps_rank},
    }


def run_command(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    t0 = time.perf_counter()
    command, seed = None, None
    try:
        args = build_parser().parse_args(argv)
        command, seed = args.command, args.seed
        outcome, payload, residuals, inputs = args.func(args)
    except UsageError as exc:
        outcome, payload, residuals, inputs = "ERROR", {"error": "usage", "message": str(exc)}, {}, []
    except SymDetError as exc:
        outcome, payload, residuals, inputs = "ERROR", {"error": type(exc).__name__, "message": str(exc)}, {}, []
    except ValueError as exc:
        outcome, payload, residuals, inputs = "ERROR", {"error": "ValueError", "message": str(exc)}, {}, []
    report = _report(command, seed, inputs, outcome, payload, residuals, time.perf_counter() - t0)
    stdout.write(json.dumps(report, indent=2, default=str) + "\n")
    return EXIT[outcome]


def main() -> None:  # pragma: no cover
    sys.exit(run_command())


if __name__ == "__main__":  # pragma: no cover
    main()

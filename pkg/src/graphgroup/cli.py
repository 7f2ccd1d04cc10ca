"""Command-line front end: word algebra, cohomology, embeddings and routing.

Exit codes: 0 found / feasible / true, 1 infeasible / false, 2 budget or
iteration cap reached, 64 usage, 65 malformed input, 66 unreadable file.
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from . import cohomology, routing, surface
from .homology_enum import format_representatives
from .word import Alphabet, AlphabetError

EX_OK, EX_NO, EX_BUDGET = 0, 1, 2
EX_USAGE, EX_DATAERR, EX_NOINPUT = 64, 65, 66


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


class _Report:
    """Collects human lines and a JSON payload; prints one of them at the end."""

    def __init__(self, args, out):
        self.args, self.out = args, out
        self.lines: list[str] = []
        self.data: dict = {"command": f"{args.group} {args.cmd}"}

    def say(self, line: str = ""):
        self.lines.append(line)

    def flush(self):
        if self.args.json:
            self.out.write(json.dumps(self.data, sort_keys=True) + "\n")
        else:
            for ln in self.lines:
                self.out.write(ln + "\n")


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise FileNotFoundError(f"cannot read {path}: {exc.strerror}") from None


# -- word -----------------------------------------------------------------------------

def _alphabet(args, texts) -> Alphabet:
    pairs = []
    for item in args.commute or []:
        try:
            i, j = (int(t) for t in item.replace(",", " ").split())
        except ValueError:
            raise UsageError(f"--commute expects two generator indices, got {item!r}") from None
        pairs.append((i, j))
    top = 1
    for t in texts:
        for tok in t.replace(",", " ").split():
            tok = tok.rstrip("'")
            if tok.startswith("g") and tok[1:].isdigit():
                top = max(top, int(tok[1:]))
    top = max([top, args.k or 0] + [max(p) for p in pairs])
    return Alphabet(top, pairs)


def cmd_word(args, rep: _Report) -> int:
    arity = {"reduce": 1, "eq": 2, "meet": 2, "join": 2, "median": 3}[args.cmd]
    if len(args.words) != arity:
        raise UsageError(f"word {args.cmd} takes {arity} word(s)")
    A = _alphabet(args, args.words)
    xs = [A.reduce(A.parse(t)) for t in args.words]
    code = EX_OK
    if args.cmd == "reduce":
        res = xs[0]
    elif args.cmd == "eq":
        res = A.equals(*xs)
        code = EX_OK if res else EX_NO
    elif args.cmd == "meet":
        res = A.meet(*xs)
    elif args.cmd == "join":
        res = A.join(*xs)
        code = EX_OK if res is not None else EX_NO
    else:
        res = A.median(*xs)
    if isinstance(res, bool):
        text = "true" if res else "false"
        rep.data["result"] = res
    elif res is None:
        text = "none"
        rep.data["result"] = None
    else:
        text = A.render(res)
        rep.data["result"] = text
    rep.say(text)
    return code


# -- cohomology -------------------------------------------------------------------------

def cmd_cohomology(args, rep: _Report) -> int:
    inst = cohomology.parse_instance(_read(args.file))
    A = inst.alphabet
    if args.cmd == "check":
        if not args.solution:
            raise UsageError("cohomology check needs a solution file")
        f = cohomology.parse_solution(inst, _read(args.solution))
        ok = cohomology.is_feasible(inst, f)
        rep.data["verdict"] = "valid" if ok else "invalid"
        rep.say(rep.data["verdict"])
        return EX_OK if ok else EX_NO
    kw = {"max_iterations": args.budget} if args.budget is not None else {}
    out = cohomology.solve(inst, diagnostics=args.diagnostics, **kw)
    rep.data["verdict"] = out.verdict
    rep.say(out.verdict)
    if isinstance(out, cohomology.Feasible):
        body = cohomology.format_solution(inst, out)
        rep.data["f"] = [A.render(w) for w in out.f]
        rep.data["psi"] = [A.render(w) for w in out.psi]
        for ln in body.splitlines():
            rep.say(ln)
        return EX_OK
    rep.data["reason"] = out.reason
    rep.say(f"reason: {out.reason}")
    if args.diagnostics:
        extra = out.certificate if isinstance(out, cohomology.Infeasible) else out.diagnostics
        rep.data["diagnostics"] = _plain(extra)
        rep.say(f"diagnostics: {json.dumps(_plain(extra), sort_keys=True)}")
    return EX_NO if isinstance(out, cohomology.Infeasible) else EX_BUDGET


def _plain(obj):
    """Something json can write: tuples to lists, sets to sorted lists, objects to repr."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted((_plain(v) for v in obj), key=repr)
    if isinstance(obj, (int, float, str, bool)) or obj is None:
        return obj
    return repr(obj)


# -- surface ----------------------------------------------------------------------------

def cmd_surface(args, rep: _Report) -> int:
    D = surface.load_embedding(_read(args.file))
    info = {"vertices": D.n, "arcs": len(D.arcs), "faces": len(D.faces), "genus": D.genus}
    rep.data.update(info)
    if args.cmd == "validate":
        rep.say("ok " + " ".join(f"{k}={v}" for k, v in info.items()))
        return EX_OK
    Ds = surface.dual(D)
    rep.data["dual"] = [[D.names[i], t, h] for i, (t, h) in enumerate(Ds.arcs)]
    rep.say(f"dual {Ds.n}")
    for i, (t, h) in enumerate(Ds.arcs):
        rep.say(f"{D.names[i]}* {t} {h}")
    return EX_OK


# -- route ------------------------------------------------------------------------------

def cmd_route(args, rep: _Report) -> int:
    inst = routing.parse_routing(_read(args.file))
    if args.cmd == "verify":
        if not args.solution:
            raise UsageError("route verify needs a solution file")
        sol = routing.parse_solution(inst, _read(args.solution))
        ok = routing.verify_solution(inst, sol)
        rep.data["verdict"] = "valid" if ok else "invalid"
        rep.say(rep.data["verdict"])
        return EX_OK if ok else EX_NO

    dumped: list = []

    def dump(D, reps):
        dumped.extend(format_representatives(D, reps).splitlines())

    kw = {"dump": dump if args.dump_homology_types else None}
    if args.budget is not None:
        kw["budget"] = args.budget
    out = routing.solve_routing(inst, **kw)
    rep.data["verdict"] = out.verdict
    if dumped:
        rep.data["homology_types"] = dumped
        for ln in dumped:
            rep.say(f"# {ln}")
    rep.say(out.verdict)
    if args.diagnostics:
        rep.data["diagnostics"] = _plain(out.diagnostics)
        rep.say(f"diagnostics: {json.dumps(_plain(out.diagnostics), sort_keys=True)}")
    if isinstance(out, routing.Found):
        text = routing.format_solution(inst, out.solution)
        rep.data["solution"] = text.splitlines()
        for ln in text.splitlines():
            rep.say(ln)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        return EX_OK
    rep.data["reason"] = out.reason
    rep.say(f"reason: {out.reason}")
    return EX_NO if isinstance(out, routing.NoSolution) else EX_BUDGET


# -- entry point ----------------------------------------------------------------------------

def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    """The shared flags; copies on subcommands must not reset values given earlier."""
    def d(value):
        return argparse.SUPPRESS if suppress else value

    parser.add_argument("--seed", type=int, default=d(0), help="seed for any randomness (solvers are deterministic)")
    parser.add_argument("--budget", type=int, default=d(None),
                        help="enumeration budget for route, iteration cap for cohomology")
    parser.add_argument("--dump-homology-types", action="store_true", default=d(False),
                        help="list the homology representatives tried by route solve")
    parser.add_argument("--diagnostics", action="store_true", default=d(False), help="print solver diagnostics")
    parser.add_argument("--json", action="store_true", default=d(False), help="print one JSON object instead of text")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    _global_flags(common, suppress=True)

    p = _Parser(prog="graphgroup", description=__doc__.splitlines()[0])
    _global_flags(p, suppress=False)
    groups = p.add_subparsers(dest="group", required=True, parser_class=_Parser)

    w = groups.add_parser("word", help="word algebra", parents=[common])
    w.add_argument("cmd", choices=["reduce", "eq", "meet", "join", "median"])
    w.add_argument("words", nargs="+", help='words such as "g1 g2\' g3"')
    w.add_argument("--k", type=int, default=None, help="number of generators")
    w.add_argument("--commute", action="append", metavar="I,J", help="a commuting generator pair")

    c = groups.add_parser("cohomology", help="cohomology feasibility", parents=[common])
    c.add_argument("cmd", choices=["solve", "check"])
    c.add_argument("file")
    c.add_argument("solution", nargs="?")

    s = groups.add_parser("surface", help="embedded graphs", parents=[common])
    s.add_argument("cmd", choices=["validate", "dual"])
    s.add_argument("file")

    r = groups.add_parser("route", help="disjoint paths and trees", parents=[common])
    r.add_argument("cmd", choices=["solve", "verify"])
    r.add_argument("file")
    r.add_argument("solution", nargs="?")
    r.add_argument("--out", help="write the solution file here")
    return p


HANDLERS = {"word": cmd_word, "cohomology": cmd_cohomology, "surface": cmd_surface, "route": cmd_route}

DATA_ERRORS = (
    AlphabetError, cohomology.InstanceFormatError, surface.EmbeddingError,
    routing.RoutingFormatError, routing.RoutingError,
)


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        random.seed(args.seed)
        rep = _Report(args, out)
        code = HANDLERS[args.group](args, rep)
    except UsageError as exc:
        err.write(f"usage error: {exc}\n")
        return EX_USAGE
    except FileNotFoundError as exc:
        err.write(f"error: {exc}\n")
        return EX_NOINPUT
    except DATA_ERRORS as exc:
        err.write(f"data error: {exc}\n")
        return EX_DATAERR
    rep.flush()
    return code


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()

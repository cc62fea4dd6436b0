"""Command-line interface: ``hodef <command> ...``.

Exit codes: 0 success, 1 usage or input error, 2 forbidden semantic
disagreement, 3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .bezem import Deepening
from .core import Classification, atom_depth, expr_to_json, load_program
from .diff import compare, fuzz_equivalence
from .domains import DEFAULT_DOMAIN_CAP, Domains, show_value, value_to_json
from .errors import HodefError, IssueError, ResourceError
from .generate import GenConfig
from .parser import SourceFile, parse_type
from .core import Const
from .typesys import IOTA
from .universe import DEFAULT_CLAUSE_CAP, DEFAULT_UNIVERSE_CAP, ActiveUniverse, ground_instantiation
from .wadge import Wadge

EXIT_OK, EXIT_INPUT, EXIT_DISAGREE, EXIT_RESOURCE = 0, 1, 2, 3
SCHEMA_PATH = Path(__file__).with_name("schema.json")


@dataclass
class RunConfig:
    command: str
    paths: list = field(default_factory=list)
    depth: int = 2
    kmax: int = 4
    universe_cap: int = DEFAULT_UNIVERSE_CAP
    domain_cap: int = DEFAULT_DOMAIN_CAP
    clause_cap: int = DEFAULT_CLAUSE_CAP
    extended: bool = False
    trace: bool = False
    format: str = "text"

    def validate(self):
        if self.depth < 0:
            raise _Usage("--depth must be non-negative")
        if self.kmax < self.depth:
            raise _Usage("--kmax must be at least --depth")
        if min(self.universe_cap, self.domain_cap, self.clause_cap) <= 0:
            raise _Usage("caps must be positive")


class _Usage(Exception):
    pass


_CAP_KEYS = {"universe": "universe_cap", "domain": "domain_cap", "clauses": "clause_cap"}


def caps_from_env(value: str) -> dict:
    """Parse ``HODEF_CAPS``, e.g. ``universe=1000,domain=50000,clauses=10000``."""
    out = {}
    for item in filter(None, (s.strip() for s in value.split(","))):
        key, sep, num = item.partition("=")
        if not sep or key.strip() not in _CAP_KEYS:
            raise _Usage(f"bad HODEF_CAPS entry {item!r} (keys: {', '.join(_CAP_KEYS)})")
        try:
            out[_CAP_KEYS[key.strip()]] = int(float(num))
        except ValueError:
            raise _Usage(f"bad HODEF_CAPS value {num!r}") from None
    return out


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["text", "json"], default="text")
    common.add_argument("--universe-cap", type=int)
    common.add_argument("--domain-cap", type=int)
    common.add_argument("--clause-cap", type=int)

    ap = argparse.ArgumentParser(prog="hodef", description="Two semantics for higher-order definitional programs.")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check", parents=[common], help="parse, type and classify")
    s.add_argument("file")

    s = sub.add_parser("eval", parents=[common], help="minimum Herbrand model over finite domains")
    s.add_argument("file")
    s.add_argument("--extended", action="store_true", help="existential body predicate variables")
    s.add_argument("--trace", action="store_true", help="print every Kleene iterate")
    s.add_argument("--window", type=int, metavar="K",
                   help="with function symbols, use individual terms of depth <= K")

    s = sub.add_parser("ground", parents=[common], help="ground instantiation at a depth bound")
    s.add_argument("file")
    s.add_argument("--depth", type=int, default=2)

    s = sub.add_parser("bezem", parents=[common], help="least model of the ground instantiation")
    s.add_argument("file")
    s.add_argument("--depth", type=int, default=2)
    s.add_argument("--deepen", type=int, metavar="KMAX", help="iterative deepening up to KMAX")

    s = sub.add_parser("compare", parents=[common], help="both semantics on every atom of depth <= K")
    s.add_argument("file")
    s.add_argument("--depth", type=int, default=2)
    s.add_argument("--kmax", type=int)

    s = sub.add_parser("fuzz", parents=[common], help="differential testing on generated programs")
    s.add_argument("--seeds", type=int, default=100)
    s.add_argument("--first-seed", type=int, default=1)
    s.add_argument("--depth", type=int, default=2)
    s.add_argument("--kmax", type=int)
    s.add_argument("--class", dest="target", choices=["definitional", "extended"], default="definitional")
    s.add_argument("--no-properties", action="store_true", help="only compare the two engines")

    s = sub.add_parser("domains", parents=[common], help="enumerate the domain of a type")
    s.add_argument("types", nargs="+", metavar="TYPE", help="e.g. '(i -> o) -> o'")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--constants", type=int, default=2, help="number of individuals")
    g.add_argument("--individuals", help="comma-separated individual names")
    s.add_argument("--list", action="store_true", help="print the values")
    s.add_argument("--hasse", action="store_true", help="include the covering relation (json)")
    return ap


def _load(path: str, cfg: RunConfig):
    src = SourceFile(sys.stdin.read(), "<stdin>") if path == "-" else SourceFile.from_path(path)
    return load_program(src)


class _Out:
    def __init__(self, fmt: str):
        self.fmt = fmt
        self.lines = []

    def line(self, s: str = ""):
        self.lines.append(s)


def cmd_check(args, cfg, out):
    p = _load(args.file, cfg)
    cls = p.classification
    diags = [{"clause": i, "line": p.clauses[i].line, "text": p.show_clause(p.clauses[i]),
              "reasons": [str(r) for r in reasons]} for i, reasons in p.diagnostics]
    out.line(f"classification: {cls.value}")
    for d in diags:
        out.line(f"line {d['line']}: {d['text']}  {', '.join(d['reasons'])}")
    for name in p.predicates():
        out.line(f"{name} : {p.signature.predicates[name]}")
    payload = {"classification": cls.value, "diagnostics": diags, "signature": p.signature.to_json()}
    return (EXIT_INPUT if cls == Classification.REJECTED else EXIT_OK), payload


def cmd_eval(args, cfg, out):
    p = _load(args.file, cfg)
    individuals = None
    if args.window is not None:
        individuals = ActiveUniverse(p, args.window, cfg.universe_cap).terms(IOTA)
    w = Wadge(p, extended=args.extended, individuals=individuals, domain_cap=cfg.domain_cap)
    m, steps, iterates = w.lfp(trace=True)
    shapes = p.signature.shapes
    if args.trace:
        for j, it in enumerate(iterates):
            out.line(f"-- iterate {j}")
            for s in it.show(shapes):
                out.line(s)
        out.line("-- fixed point")
    for s in m.show(shapes):
        out.line(s)
    out.line(f"% iterations: {steps}")
    payload = {"iterations": steps, "extended": args.extended, "model": _interp_json(m, p)}
    if args.trace:
        payload["trace"] = [_interp_json(it, p) for it in iterates]
    return EXIT_OK, payload


def _interp_json(m, p):
    return {name: {"type": str(p.signature.predicates[name]), "value": value_to_json(m[name]),
                   "text": show_value(m[name], p.signature.shapes)} for name in sorted(m.values)}


def cmd_ground(args, cfg, out):
    p = _load(args.file, cfg)
    u = ActiveUniverse(p, args.depth, cfg.universe_cap)
    gp = ground_instantiation(p, args.depth, universe=u, cap=cfg.clause_cap)
    rows = []
    for c in gp:
        text = p.show_clause((c.head, c.body))
        out.line(text)
        rows.append({"text": text, "head": expr_to_json(c.head), "body": [expr_to_json(b) for b in c.body]})
    return EXIT_OK, {"depth": args.depth, "clauses": rows}


def cmd_bezem(args, cfg, out):
    p = _load(args.file, cfg)
    deep = Deepening(p, universe_cap=cfg.universe_cap, clause_cap=cfg.clause_cap)
    k = args.depth
    if args.deepen is None:
        gm = deep.model(k)
        rows = [{"atom": p.show(a), "depth": atom_depth(a), "value": True, "settled_at": k}
                for a in gm.sorted_atoms()]
    else:
        if args.deepen < k:
            raise _Usage("--deepen must be at least --depth")
        atoms = deep.universe(k).atoms()
        ans = deep.answers(atoms, k, args.deepen)
        rows = [{"atom": p.show(a), "depth": atom_depth(a), "value": ans[a].value,
                 "settled_at": ans[a].settled_at} for a in atoms]
    for r in rows:
        if r["value"]:
            out.line(f"[{r['depth']}] {r['atom']}")
    unsettled = [r["atom"] for r in rows if r["settled_at"] is None]
    if unsettled:
        out.line(f"% unsettled false atoms: {', '.join(unsettled)}")
    return EXIT_OK, {"depth": k, "kmax": args.deepen, "atoms": rows}


def cmd_compare(args, cfg, out):
    p = _load(args.file, cfg)
    kmax = args.kmax if args.kmax is not None else max(cfg.kmax, args.depth)
    if kmax < args.depth:
        raise _Usage("--kmax must be at least --depth")
    w = Wadge(p, extended=p.classification == Classification.EXTENDED, domain_cap=cfg.domain_cap)
    deep = Deepening(p, universe_cap=cfg.universe_cap, clause_cap=cfg.clause_cap)
    rep = compare(p, args.depth, kmax, program_id=args.file, wadge=w, deep=deep)
    for r in rep.rows:
        mark = "!=" if r.disagrees else "  "
        settled = "" if r.settled else "  (unsettled)"
        out.line(f"{mark} {p.show(r.atom)}: wadge={str(r.wadge).lower()} bezem={str(r.bezem).lower()}{settled}")
    s = rep.summary()
    out.line(f"% {s['atoms']} atoms, {s['disagreements']} disagreements, {s['unsettled']} unsettled")
    if rep.disagreements and not rep.forbidden:
        out.line(f"% disagreements are permitted for {p.classification.value} programs")
    return (EXIT_DISAGREE if rep.forbidden else EXIT_OK), rep.to_json()


def cmd_fuzz(args, cfg, out):
    gen = GenConfig(target=Classification(args.target))
    rep = fuzz_equivalence(args.seeds, gen, args.depth, args.kmax, first_seed=args.first_seed,
                           properties=not args.no_properties)
    for r in rep.results:
        status = "ok" if r.ok else "FAIL"
        extra = f" ({len(r.disagreements)} permitted disagreements)" if r.disagreements and not r.forbidden else ""
        out.line(f"seed {r.seed}: {status}, {r.atoms} atoms{extra}" + (f", {r.error}" if r.error else ""))
        for name, fails in sorted(r.failures.items()):
            for f in fails:
                out.line(f"  {name}: {f}")
        if r.forbidden:
            out.line(f"  disagreements: {', '.join(r.disagreements)}")
    s = rep.summary()
    out.line(f"% {s['seeds']} seeds, {s['forbidden_disagreements']} forbidden disagreements, "
             f"{s['permitted_disagreements']} permitted, failing seeds: {s['failing_seeds']}")
    bad = any(r.forbidden or any(r.failures.values()) for r in rep.results)
    return (EXIT_DISAGREE if bad else EXIT_OK), rep.to_json()


def cmd_domains(args, cfg, out):
    if args.individuals:
        names = [n.strip() for n in args.individuals.split(",") if n.strip()]
    else:
        if args.constants < 0:
            raise _Usage("--constants must be non-negative")
        names = [f"c{j}" for j in range(args.constants)]
    doms = Domains([Const(n, IOTA) for n in names], cfg.domain_cap)
    rows = []
    for text in args.types:
        rho = parse_type(text)
        d = doms.domain(rho)
        row = {"type": str(rho), "size": len(d.values)}
        out.line(f"|[{rho}]| = {len(d.values)}")
        if args.list:
            row["values"] = [show_value(v) for v in d.values]
            for v in row["values"]:
                out.line(f"  {v}")
        if args.hasse:
            row["hasse"] = doms.hasse(rho)
        rows.append(row)
    return EXIT_OK, {"individuals": names, "domains": rows}


_COMMANDS = {"check": cmd_check, "eval": cmd_eval, "ground": cmd_ground, "bezem": cmd_bezem,
             "compare": cmd_compare, "fuzz": cmd_fuzz, "domains": cmd_domains}


def _config(args) -> RunConfig:
    cfg = RunConfig(args.command, format=args.format)
    for key, value in caps_from_env(os.environ.get("HODEF_CAPS", "")).items():
        setattr(cfg, key, value)
    for key in _CAP_KEYS.values():
        if getattr(args, key, None) is not None:
            setattr(cfg, key, getattr(args, key))
    if getattr(args, "depth", None) is not None:
        cfg.depth = args.depth
        cfg.kmax = max(cfg.kmax, cfg.depth)
    if getattr(args, "kmax", None) is not None:
        cfg.kmax = args.kmax
    cfg.validate()
    return cfg


def _error_json(kind: str, exc) -> dict:
    err = {"kind": kind, "message": str(exc)}
    if isinstance(exc, IssueError):
        err["issues"] = [i.to_json() for i in exc.issues]
    return err


def main(argv=None) -> int:
    ap = _parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_INPUT
    out = _Out(args.format)
    code, payload, error = EXIT_OK, None, None
    try:
        cfg = _config(args)
        code, payload = _COMMANDS[args.command](args, cfg, out)
    except _Usage as e:
        code, error = EXIT_INPUT, _error_json("UsageError", e)
    except OSError as e:
        code, error = EXIT_INPUT, _error_json("InputError", e)
    except ResourceError as e:
        code, error = EXIT_RESOURCE, _error_json(type(e).__name__, e)
    except HodefError as e:
        code, error = EXIT_INPUT, _error_json(type(e).__name__, e)
        error["prefixed"] = isinstance(e, IssueError)
    prefixed = error.pop("prefixed", False) if error is not None else False
    if args.format == "json":
        doc = {"command": args.command, "exit_code": code}
        if error is not None:
            doc["error"] = error
        else:
            doc["result"] = payload
        sys.stdout.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    else:
        if out.lines:
            sys.stdout.write("\n".join(out.lines) + "\n")
    if error is not None:
        first = error["message"].splitlines()[0] if error["message"] else ""
        if not prefixed:
            first = f"{error['kind']}: {first}"
        sys.stderr.write(f"hodef {args.command}: {first}\n")
    return code


if __name__ == "__main__":
    sys.exit(main())

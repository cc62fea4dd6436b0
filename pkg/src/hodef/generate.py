"""Seeded random programs for differential testing.

Programs are emitted as source text with ``#type`` declarations for every
symbol, then parsed and typed like any user program, so the generator also
exercises the front end.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from math import prod

from .core import Classification, Program, load_program
from .errors import GenerationExhausted, HodefError
from .typesys import IOTA, OMICRON, Arrow, Type, flatten

IO = Arrow(IOTA, OMICRON)
IIO = Arrow(IOTA, IO)

_CONSTANTS = ("a", "b", "c")


@dataclass(frozen=True)
class GenConfig:
    seed: int = 1
    max_constants: int = 3
    max_predicates: int = 4
    max_order: int = 2
    max_body: int = 3
    max_clauses: int = 6
    allow_functions: bool = False
    target: Classification = Classification.DEFINITIONAL
    max_tuples: int = 256  # per predicate, bounds the Wadge tables
    retries: int = 200

    def __post_init__(self):
        if not 1 <= self.max_constants <= 3:
            raise ValueError("max_constants must be in 1..3")
        if not 1 <= self.max_predicates <= 4:
            raise ValueError("max_predicates must be in 1..4")
        if self.max_order not in (1, 2):
            raise ValueError("max_order must be 1 or 2")
        if not 0 <= self.max_body <= 3:
            raise ValueError("max_body must be in 0..3")
        if self.target not in (Classification.DEFINITIONAL, Classification.EXTENDED):
            raise ValueError("target must be definitional or extended")


def _type_menu(cfg: GenConfig, n_consts: int) -> list:
    menu = [IO, IO, IIO]
    if cfg.max_order >= 2:
        menu += [Arrow(IO, OMICRON), Arrow(IO, IO), Arrow(IO, IO), Arrow(IO, Arrow(IO, OMICRON))]
        if n_consts <= 2:
            menu.append(Arrow(IIO, OMICRON))
    return menu


def _domain_size(t: Type, n: int) -> int:
    """Rough size of the enumerated domain of an argument type (n individuals)."""
    if t == IOTA:
        return n
    if t == IO:
        return 2 ** n
    if t == IIO:
        return 2 ** (n * n)
    return 10 ** 6


class _Builder:
    def __init__(self, cfg: GenConfig, rng: random.Random):
        self.cfg = cfg
        self.rng = rng
        self.consts = list(_CONSTANTS[:rng.randint(min(2, cfg.max_constants), cfg.max_constants)])
        menu = _type_menu(cfg, len(self.consts))
        n_preds = rng.randint(1, cfg.max_predicates)
        names = ["p", "q", "r", "s"][:n_preds]
        self.preds = {names[0]: IO}
        for name in names[1:]:
            self.preds[name] = rng.choice(menu)
        self.funcs = {"f": 1} if cfg.allow_functions and rng.random() < 0.5 else {}
        self.var_count = 0

    def fresh(self, t: Type) -> str:
        self.var_count += 1
        return ("X" if t == IOTA else "Q") + str(self.var_count)

    def ind_term(self, scope, allow_extra: bool) -> str:
        r = self.rng.random()
        ind_vars = [v for v, t in scope.items() if t == IOTA]
        if ind_vars and r < 0.5:
            return self.rng.choice(ind_vars)
        if allow_extra and r < 0.62:
            v = self.fresh(IOTA)
            scope[v] = IOTA
            return v
        if self.funcs and r < 0.7:
            return f"f({self.rng.choice(self.consts)})"
        return self.rng.choice(self.consts)

    def pred_term(self, t: Type, scope, allow_extra_pred: bool) -> str | None:
        """A term of predicate type ``t``: a variable, a constant or a partial application."""
        options = []
        options += [v for v, vt in scope.items() if vt == t]
        options += [p for p, pt in self.preds.items() if pt == t]
        partial = [p for p, pt in self.preds.items()
                   if isinstance(pt, Arrow) and pt.result == t and pt.arg != IOTA and pt.arg != t]
        if allow_extra_pred and self.rng.random() < 0.5:
            v = self.fresh(t)
            scope[v] = t
            return v
        if partial and self.rng.random() < 0.25:
            p = self.rng.choice(partial)
            inner = self.pred_term(self.preds[p].arg, scope, False)
            if inner is not None:
                return f"{p}({inner})"
        return self.rng.choice(options) if options else None

    def args_for(self, arg_types, scope, allow_extra, allow_extra_pred):
        out = []
        for t in arg_types:
            if t == IOTA:
                out.append(self.ind_term(scope, allow_extra))
            else:
                a = self.pred_term(t, scope, allow_extra_pred)
                if a is None:
                    return None
                out.append(a)
        return out

    def atom(self, scope, allow_extra_pred: bool) -> str | None:
        rng = self.rng
        if rng.random() < 0.1:
            return f"{self.ind_term(scope, True)} = {self.ind_term(scope, False)}"
        heads = [(v, t) for v, t in scope.items() if t != IOTA]
        heads += list(self.preds.items())
        if allow_extra_pred:
            v = self.fresh(IO)
            scope[v] = IO
            heads = [(v, IO)]
        head, t = rng.choice(heads)
        arg_types, _ = flatten(t)
        args = self.args_for(arg_types, scope, True, False)
        if args is None:
            return None
        if not args:
            return head
        # curried form for predicates returning predicates, e.g. id(R)(X)
        if isinstance(t, Arrow) and isinstance(t.result, Arrow) and t.arg != IOTA and rng.random() < 0.5:
            return f"{head}({args[0]})({', '.join(args[1:])})" if len(args) > 1 else f"{head}({args[0]})"
        return f"{head}({', '.join(args)})"

    def clause(self, pred: str, want_extra_pred: bool) -> str | None:
        rng = self.rng
        arg_types, _ = flatten(self.preds[pred])
        scope = {}
        head_args = []
        for t in arg_types:
            if t == IOTA and rng.random() < 0.3:
                head_args.append(rng.choice(self.consts))
            else:
                v = self.fresh(t)
                scope[v] = t
                head_args.append(v)
        n_body = rng.randint(0, self.cfg.max_body)
        if want_extra_pred:
            n_body = max(n_body, 1)
        body = []
        for j in range(n_body):
            a = self.atom(scope, want_extra_pred and j == 0)
            if a is not None:
                body.append(a)
        head = _format_head(pred, self.preds[pred], head_args, rng)
        return head + (" :- " + ", ".join(body) if body else "") + "."

    def program(self) -> str:
        rng = self.rng
        lines = [f"#type {c} : i." for c in self.consts]
        lines += [f"#type {p} : {t}." for p, t in self.preds.items()]
        lines += [f"#type {f} : i -> i." for f in self.funcs]
        clauses = {}
        first_order = [p for p, t in self.preds.items() if all(a == IOTA for a in flatten(t)[0])]
        for p in first_order:
            for _ in range(rng.randint(1, 2)):
                args = [rng.choice(self.consts) for _ in flatten(self.preds[p])[0]]
                clauses[f"{p}({', '.join(args)})."] = None
        n = rng.randint(1, self.cfg.max_clauses)
        extended = self.cfg.target == Classification.EXTENDED
        for j in range(n):
            pred = rng.choice(list(self.preds))
            c = self.clause(pred, extended and j == 0)
            if c is not None:
                clauses[c] = None
        return "\n".join(lines + list(clauses)) + "\n"


def _format_head(pred, t, args, rng) -> str:
    if not args:
        return pred
    arg_types, _ = flatten(t)
    if isinstance(t.result, Arrow) and arg_types[0] != IOTA and len(args) > 1 and rng.random() < 0.5:
        return f"{pred}({args[0]})({', '.join(args[1:])})"
    return f"{pred}({', '.join(args)})"


def _within_caps(p: Program, cfg: GenConfig) -> bool:
    n = len(p.signature.individuals)
    for t in p.signature.predicates.values():
        sizes = [_domain_size(a, n) for a in flatten(t)[0]]
        if prod(sizes) > cfg.max_tuples:
            return False
    for c in p.clauses:
        for v in c.extra_pred_vars:
            if _domain_size(v.type, n) > cfg.max_tuples:
                return False
    return True


def gen_source(cfg: GenConfig) -> str:
    return _generate(cfg)[0]


def gen_program(cfg: GenConfig) -> Program:
    """A random program of the targeted class, deterministic in ``cfg.seed``."""
    return _generate(cfg)[1]


def _generate(cfg: GenConfig):
    rng = random.Random(cfg.seed)
    for _ in range(cfg.retries):
        text = _Builder(cfg, rng).program()
        try:
            p = load_program(text)
        except HodefError:
            continue
        if p.classification == cfg.target and _within_caps(p, cfg):
            return text, p
    raise GenerationExhausted(f"no {cfg.target.value} program within {cfg.retries} attempts (seed {cfg.seed})")

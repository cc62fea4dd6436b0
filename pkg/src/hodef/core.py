"""Typed AST, monomorphic type inference and program classification."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Union

from .errors import Issue, TypeCheckError
from .parser import RCall, REq, RName, RProgram, RVar, parse
from .typesys import (
    IOTA, OMICRON, Arrow, FuncSig, Iota, O, Type, cached_hash, curry, flatten,
    is_argument_type, type_to_json,
)

UNIVERSE_FILLER = "$u0"


# ---------------------------------------------------------------------------
# Typed expressions

@cached_hash
@dataclass(frozen=True)
class Var:
    name: str
    type: Type


@cached_hash
@dataclass(frozen=True)
class Const:
    """An individual constant (type i) or a predicate constant."""

    name: str
    type: Type


@cached_hash
@dataclass(frozen=True)
class FunApp:
    symbol: str
    args: tuple

    @property
    def type(self) -> Type:
        return IOTA


@cached_hash
@dataclass(frozen=True)
class App:
    fun: "Expr"
    arg: "Expr"

    @property
    def type(self) -> Type:
        return self.fun.type.result


@cached_hash
@dataclass(frozen=True)
class Eq:
    left: "Expr"
    right: "Expr"

    @property
    def type(self) -> Type:
        return OMICRON


Expr = Union[Var, Const, FunApp, App, Eq]


def spine(e):
    """``h a1 ... an`` -> ``(h, [a1, ..., an])``."""
    args = []
    while isinstance(e, App):
        args.append(e.arg)
        e = e.fun
    args.reverse()
    return e, args


def apply_all(h, args):
    for a in args:
        h = App(h, a)
    return h


@lru_cache(maxsize=1 << 16)
def depth(e) -> int:
    """Constants and variables have depth 0; each application adds one."""
    if isinstance(e, (Var, Const)):
        return 0
    if isinstance(e, FunApp):
        return 1 + max(depth(a) for a in e.args)
    if isinstance(e, App):
        return 1 + max(depth(e.fun), depth(e.arg))
    return max(depth(e.left), depth(e.right))


def atom_depth(e) -> int:
    """Depth of an atom measured on its immediate constituents.

    The outermost application that turns a predicate into a proposition is
    not counted: ``p(id(q))`` has atom depth 1 and ``id(id(q))(a)`` has 2.
    Curried arguments do count, so ``r(p, q)`` has atom depth 1.
    """
    if isinstance(e, App):
        return max(depth(e.fun), depth(e.arg))
    return depth(e)


@lru_cache(maxsize=1 << 16)
def term_key(e):
    """Total order: constructor, then name, then subterms."""
    if isinstance(e, Const):
        return (0, e.name)
    if isinstance(e, FunApp):
        return (1, e.symbol, tuple(term_key(a) for a in e.args))
    if isinstance(e, App):
        return (2, term_key(e.fun), term_key(e.arg))
    if isinstance(e, Var):
        return (3, e.name)
    return (4, term_key(e.left), term_key(e.right))


def variables(e) -> tuple:
    """Variables of ``e`` in order of first occurrence."""
    seen = {}

    def walk(x):
        if isinstance(x, Var):
            seen.setdefault(x, None)
        elif isinstance(x, FunApp):
            for a in x.args:
                walk(a)
        elif isinstance(x, App):
            walk(x.fun)
            walk(x.arg)
        elif isinstance(x, Eq):
            walk(x.left)
            walk(x.right)

    walk(e)
    return tuple(seen)


def is_ground(e) -> bool:
    return not variables(e)


def substitute(e, theta):
    """Apply a substitution mapping variable names to terms."""
    if isinstance(e, Var):
        return theta.get(e.name, e)
    if isinstance(e, Const):
        return e
    if isinstance(e, FunApp):
        return FunApp(e.symbol, tuple(substitute(a, theta) for a in e.args))
    if isinstance(e, App):
        return App(substitute(e.fun, theta), substitute(e.arg, theta))
    return Eq(substitute(e.left, theta), substitute(e.right, theta))


def show(e, shapes=None) -> str:
    """Surface syntax for a typed expression.

    ``shapes`` maps a predicate name to the sizes of its argument lists as
    written in its defining clause, so that ``id(q)(a)`` and ``r(p, q)``
    print the way they were declared.
    """
    if isinstance(e, (Var, Const)):
        return e.name
    if isinstance(e, FunApp):
        return f"{e.symbol}({', '.join(show(a, shapes) for a in e.args)})"
    if isinstance(e, Eq):
        return f"{show(e.left, shapes)} = {show(e.right, shapes)}"
    h, args = spine(e)
    sizes = list((shapes or {}).get(h.name, ())) if isinstance(h, Const) else []
    out, i = [show(h, shapes)], 0
    while i < len(args):
        n = sizes.pop(0) if sizes else len(args) - i
        out.append("(" + ", ".join(show(a, shapes) for a in args[i:i + n]) + ")")
        i += n
    return "".join(out)


def expr_to_json(e):
    if isinstance(e, Var):
        return {"kind": "var", "name": e.name, "type": type_to_json(e.type)}
    if isinstance(e, Const):
        return {"kind": "const", "name": e.name, "type": type_to_json(e.type)}
    if isinstance(e, FunApp):
        return {"kind": "funapp", "symbol": e.symbol, "args": [expr_to_json(a) for a in e.args]}
    if isinstance(e, App):
        return {"kind": "app", "fun": expr_to_json(e.fun), "arg": expr_to_json(e.arg),
                "type": type_to_json(e.type)}
    return {"kind": "eq", "left": expr_to_json(e.left), "right": expr_to_json(e.right)}


# ---------------------------------------------------------------------------
# Clauses, programs, classification

class Classification(str, enum.Enum):
    DEFINITIONAL = "definitional"
    EXTENDED = "extended"
    HOAPATA = "hoapata"
    REJECTED = "rejected"


@dataclass(frozen=True)
class Reason:
    code: str
    subject: str

    def __str__(self) -> str:
        return f"{self.code}({self.subject})"


REPEATED_FORMAL = "RepeatedFormal"
NON_VARIABLE_PRED_ARG = "NonVariablePredicateArgument"
EXTRA_BODY_PRED_VAR = "ExtraBodyPredVar"
PREDICATE_VARIABLE_HEAD = "PredicateVariableHead"

_HOAPATA_OK = {EXTRA_BODY_PRED_VAR, PREDICATE_VARIABLE_HEAD}


@dataclass(frozen=True)
class Clause:
    """A typed clause together with its normalised, formal-parameter view.

    ``head``/``body`` are the clause as written.  ``formals`` and
    ``norm_body`` rewrite individual head arguments that are not fresh
    variables into equalities, e.g. ``p(a)`` becomes ``p(H$1) :- H$1 = a``.
    """

    head: Expr
    body: tuple
    formals: tuple = ()
    norm_body: tuple = ()
    extra_ind_vars: tuple = ()
    extra_pred_vars: tuple = ()
    reasons: tuple = ()
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)

    @property
    def head_pred(self):
        return spine(self.head)[0]

    @property
    def head_is_var(self) -> bool:
        return isinstance(self.head_pred, Var)

    @property
    def head_args(self) -> list:
        return spine(self.head)[1]

    def all_vars(self) -> tuple:
        seen = {}
        for e in (self.head, *self.body):
            for v in variables(e):
                seen.setdefault(v, None)
        return tuple(seen)

    @property
    def is_definitional(self) -> bool:
        return not self.reasons


def make_clause(head, body, line=0, column=0) -> Clause:
    h, args = spine(head)
    reasons = []
    if isinstance(h, Var):
        reasons.append(Reason(PREDICATE_VARIABLE_HEAD, h.name))
    formals, eqs, seen = [], [], set()
    for i, a in enumerate(args, 1):
        if isinstance(a.type, Iota):
            if isinstance(a, Var) and a.name not in seen:
                seen.add(a.name)
                formals.append(a)
            else:
                fresh = Var(f"H${i}", IOTA)
                formals.append(fresh)
                eqs.append(Eq(fresh, a))
        elif isinstance(a, Var):
            if a.name in seen:
                reasons.append(Reason(REPEATED_FORMAL, a.name))
                formals.append(Var(f"H${i}", a.type))
            else:
                seen.add(a.name)
                formals.append(a)
        else:
            reasons.append(Reason(NON_VARIABLE_PRED_ARG, show(a)))
            formals.append(Var(f"H${i}", a.type))
    norm_body = tuple(eqs) + tuple(body)
    bound = {v.name for v in formals}
    if isinstance(h, Var):
        bound.add(h.name)
    extra_ind, extra_pred = {}, {}
    for e in norm_body:
        for v in variables(e):
            if v.name in bound:
                continue
            (extra_ind if isinstance(v.type, Iota) else extra_pred).setdefault(v, None)
    for v in extra_pred:
        reasons.append(Reason(EXTRA_BODY_PRED_VAR, v.name))
    return Clause(head, tuple(body), tuple(formals), norm_body, tuple(extra_ind),
                  tuple(extra_pred), tuple(reasons), line, column)


def classify_clauses(clauses) -> Classification:
    codes = {r.code for c in clauses for r in c.reasons}
    if not codes:
        return Classification.DEFINITIONAL
    if codes == {EXTRA_BODY_PRED_VAR}:
        return Classification.EXTENDED
    if codes <= _HOAPATA_OK:
        return Classification.HOAPATA
    return Classification.REJECTED


@dataclass(frozen=True)
class Signature:
    individuals: tuple
    functions: dict
    predicates: dict
    shapes: dict = field(default_factory=dict, compare=False)

    def constant(self, name: str) -> Const:
        return Const(name, self.predicates.get(name, IOTA))

    def to_json(self):
        return {
            "individuals": list(self.individuals),
            "functions": {f: self.functions[f] for f in sorted(self.functions)},
            "predicates": {p: str(self.predicates[p]) for p in sorted(self.predicates)},
        }


@dataclass(frozen=True)
class Program:
    clauses: tuple
    signature: Signature

    @property
    def classification(self) -> Classification:
        return classify_clauses(self.clauses)

    @property
    def diagnostics(self) -> list:
        """``(clause index, reasons)`` for every non-definitional clause."""
        return [(i, c.reasons) for i, c in enumerate(self.clauses) if c.reasons]

    @property
    def reasons(self) -> list:
        return [r for c in self.clauses for r in c.reasons]

    @property
    def has_functions(self) -> bool:
        return bool(self.signature.functions)

    def predicates(self):
        return sorted(self.signature.predicates)

    def clauses_for(self, pred: str) -> list:
        return [c for c in self.clauses
                if isinstance(c.head_pred, Const) and c.head_pred.name == pred]

    def show(self, e) -> str:
        return show(e, self.signature.shapes)

    def show_clause(self, c) -> str:
        head, body = (c.head, c.body) if isinstance(c, Clause) else c
        if not body:
            return self.show(head) + "."
        return f"{self.show(head)} :- {', '.join(self.show(b) for b in body)}."

    def to_json(self):
        return {
            "classification": self.classification.value,
            "signature": self.signature.to_json(),
            "clauses": [{
                "text": self.show_clause(c),
                "head": expr_to_json(c.head),
                "body": [expr_to_json(b) for b in c.body],
                "formals": [expr_to_json(v) for v in c.formals],
                "extra_ind_vars": [v.name for v in c.extra_ind_vars],
                "extra_pred_vars": [v.name for v in c.extra_pred_vars],
                "reasons": [str(r) for r in c.reasons],
            } for c in self.clauses],
        }

    def to_json_text(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    def source(self) -> str:
        """Re-parsable text including type declarations for every symbol."""
        sig = self.signature
        lines = []
        for p in sorted(sig.predicates):
            lines.append(f"#type {p} : {sig.predicates[p]}.")
        for f in sorted(sig.functions):
            lines.append(f"#type {f} : {FuncSig(sig.functions[f])}.")
        for c in sig.individuals:
            if c != UNIVERSE_FILLER:
                lines.append(f"#type {c} : i.")
        lines += [self.show_clause(c) for c in self.clauses]
        return "\n".join(lines) + "\n"


def classify(p: Program):
    """Classification plus per-clause diagnostics."""
    return p.classification, p.diagnostics


# ---------------------------------------------------------------------------
# Type inference

@dataclass(frozen=True)
class _TV:
    id: int


class _Conflict(Exception):
    pass


class _Inference:
    def __init__(self):
        self.subst = {}
        self.count = 0
        self.names = {}
        self.errors = []

    def fresh(self) -> _TV:
        self.count += 1
        return _TV(self.count)

    def walk(self, t):
        while isinstance(t, _TV) and t in self.subst:
            t = self.subst[t]
        return t

    def occurs(self, v, t) -> bool:
        t = self.walk(t)
        if t == v:
            return True
        return isinstance(t, Arrow) and (self.occurs(v, t.arg) or self.occurs(v, t.result))

    def unify(self, a, b):
        a, b = self.walk(a), self.walk(b)
        if a == b:
            return
        if isinstance(a, _TV):
            if self.occurs(a, b):
                raise _Conflict
            self.subst[a] = b
        elif isinstance(b, _TV):
            self.unify(b, a)
        elif isinstance(a, Arrow) and isinstance(b, Arrow):
            self.unify(a.arg, b.arg)
            self.unify(a.result, b.result)
        else:
            raise _Conflict

    def zonk(self, t, default=None):
        t = self.walk(t)
        if isinstance(t, Arrow):
            return Arrow(self.zonk(t.arg, default), self.zonk(t.result, default))
        if isinstance(t, _TV) and default is not None:
            return default
        return t

    def unify_at(self, a, b, node, what):
        try:
            self.unify(a, b)
        except _Conflict:
            self.errors.append(Issue(
                "TypeConflict",
                f"{what}: cannot unify {self.show(a)} with {self.show(b)}",
                getattr(node, "line", 0), getattr(node, "column", 0)))

    def show(self, t):
        t = self.zonk(t)
        names = {}

        def go(x):
            if isinstance(x, _TV):
                return names.setdefault(x, f"t{len(names)}")
            if isinstance(x, Arrow):
                a = go(x.arg)
                return f"({a}) -> {go(x.result)}" if isinstance(x.arg, Arrow) else f"{a} -> {go(x.result)}"
            return str(x)

        return go(t)

    def term(self, node, env):
        if isinstance(node, RVar):
            return env.setdefault(node.name, self.fresh())
        if isinstance(node, RName):
            return self.names.setdefault(node.name, self.fresh())
        if isinstance(node, RCall):
            tf = self.term(node.fun, env)
            targs = [self.term(a, env) for a in node.args]
            r = self.fresh()
            self.unify_at(tf, curry(targs, r), node, "application")
            return r
        if isinstance(node, REq):
            self.unify_at(self.term(node.left, env), IOTA, node.left, "left side of '='")
            self.unify_at(self.term(node.right, env), IOTA, node.right, "right side of '='")
            return OMICRON
        raise TypeError(node)


def _rename_anonymous(clause):
    """Give every ``_`` occurrence its own variable name."""
    used = set()

    def names(node):
        if isinstance(node, RVar):
            used.add(node.name)
        elif isinstance(node, RCall):
            names(node.fun)
            for a in node.args:
                names(a)
        elif isinstance(node, REq):
            names(node.left)
            names(node.right)

    for n in (clause.head, *clause.body):
        names(n)
    count = [0]

    def go(node):
        if isinstance(node, RVar) and node.name == "_":
            count[0] += 1
            while f"_{count[0]}" in used:
                count[0] += 1
            return RVar(f"_{count[0]}", node.line, node.column)
        if isinstance(node, RCall):
            return RCall(go(node.fun), tuple(go(a) for a in node.args), node.line, node.column)
        if isinstance(node, REq):
            return REq(go(node.left), go(node.right), node.line, node.column)
        return node

    return type(clause)(go(clause.head), tuple(go(b) for b in clause.body), clause.line, clause.column)


def _group_sizes(node):
    sizes = []
    while isinstance(node, RCall):
        sizes.append(len(node.args))
        node = node.fun
    return node, tuple(reversed(sizes))


def _collect_shapes(raw: RProgram):
    shapes = {}

    def visit(node):
        if isinstance(node, RCall):
            root, sizes = _group_sizes(node)
            if isinstance(root, RName):
                shapes.setdefault(root.name, sizes)
            n = node
            while isinstance(n, RCall):
                for a in n.args:
                    visit(a)
                n = n.fun
        elif isinstance(node, REq):
            visit(node.left)
            visit(node.right)

    for c in raw.clauses:
        visit(c.head)
    for c in raw.clauses:
        for b in c.body:
            visit(b)
    return shapes


def infer_types(raw: RProgram, annotations=None) -> Program:
    """Type a parsed program.  Raises TypeCheckError listing every problem.

    ``annotations`` maps names to types and is merged with the ``#type``
    declarations of ``raw``.  Unconstrained slots default to ``i``.
    """
    inf = _Inference()
    decls = [(d.name, d.type, d) for d in raw.decls]
    decls += [(n, t, None) for n, t in (annotations or {}).items()]
    for name, t, node in decls:
        tv = inf.names.setdefault(name, inf.fresh())
        inf.unify_at(tv, t, node, f"declaration of {name}")

    raw_clauses = [_rename_anonymous(c) for c in raw.clauses]
    clause_envs = []
    for c in raw_clauses:
        env = {}
        if isinstance(c.head, REq):
            inf.errors.append(Issue("TypeConflict", "a clause head cannot be an equality", c.line, c.column))
            clause_envs.append(env)
            continue
        inf.unify_at(inf.term(c.head, env), OMICRON, c.head, "clause head")
        for b in c.body:
            inf.unify_at(inf.term(b, env), OMICRON, b, "body atom")
        clause_envs.append(env)
    if inf.errors:
        raise TypeCheckError(inf.errors)

    individuals, functions, predicates = [], {}, {}
    name_types = {}
    for name, tv in inf.names.items():
        t = inf.zonk(tv, IOTA)
        args, res = flatten(t)
        name_types[name] = t
        if isinstance(res, O):
            if not all(is_argument_type(a) for a in args):
                inf.errors.append(Issue("TypeConflict", f"predicate {name} : {t} has a non-argument parameter type"))
            predicates[name] = t
        elif not args:
            individuals.append(name)
        elif all(isinstance(a, Iota) for a in args):
            functions[name] = len(args)
        else:
            inf.errors.append(Issue("TypeConflict", f"{name} : {t} is neither a predicate nor a function symbol"))

    clauses = []
    for c, env in zip(raw_clauses, clause_envs):
        var_types = {}
        for vname, tv in env.items():
            pre = inf.zonk(tv)
            args, res = flatten(pre)
            if args and isinstance(res, _TV):
                inf.errors.append(Issue(
                    "UnresolvedHigherOrderType",
                    f"variable {vname} : {inf.show(tv)} needs a type annotation on the symbol it is passed to",
                    c.line, c.column))
                continue
            t = inf.zonk(tv, IOTA)
            if not is_argument_type(t):
                inf.errors.append(Issue("TypeConflict", f"variable {vname} has non-argument type {t}", c.line, c.column))
                continue
            var_types[vname] = t
        try:
            head = _build(c.head, var_types, name_types, functions, inf)
            body = tuple(_build(b, var_types, name_types, functions, inf) for b in c.body)
        except _Conflict:
            continue
        clauses.append(make_clause(head, body, c.line, c.column))
    if inf.errors:
        raise TypeCheckError(inf.errors)

    individuals.sort()
    if not individuals:
        individuals = [UNIVERSE_FILLER]
    shapes = _collect_shapes(raw)
    sig = Signature(tuple(individuals), functions, predicates,
                    {p: s for p, s in shapes.items() if p in predicates})
    return Program(tuple(clauses), sig)


def _build(node, var_types, name_types, functions, inf):
    if isinstance(node, RVar):
        if node.name not in var_types:
            raise _Conflict
        return Var(node.name, var_types[node.name])
    if isinstance(node, RName):
        if node.name in functions:
            inf.errors.append(Issue("ArityMismatch", f"function symbol {node.name} used without arguments",
                                    node.line, node.column))
            raise _Conflict
        return Const(node.name, name_types[node.name])
    if isinstance(node, RCall):
        if isinstance(node.fun, RName) and node.fun.name in functions:
            n = functions[node.fun.name]
            if len(node.args) != n:
                inf.errors.append(Issue("ArityMismatch",
                                        f"{node.fun.name}/{n} applied to {len(node.args)} argument(s)",
                                        node.line, node.column))
                raise _Conflict
            return FunApp(node.fun.name, tuple(_build(a, var_types, name_types, functions, inf)
                                               for a in node.args))
        root, _ = _group_sizes(node)
        if isinstance(root, RName) and root.name in functions:
            inf.errors.append(Issue("ArityMismatch", f"function symbol {root.name} applied in curried form",
                                    node.line, node.column))
            raise _Conflict
        e = _build(node.fun, var_types, name_types, functions, inf)
        for a in node.args:
            e = App(e, _build(a, var_types, name_types, functions, inf))
        return e
    if isinstance(node, REq):
        return Eq(_build(node.left, var_types, name_types, functions, inf),
                  _build(node.right, var_types, name_types, functions, inf))
    raise TypeError(node)


def load_program(src, annotations=None) -> Program:
    """Parse and type a program given as text or a SourceFile."""
    return infer_types(parse(src), annotations)

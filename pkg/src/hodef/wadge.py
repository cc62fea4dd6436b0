"""Minimum Herbrand model over finite monotone domains.

Interpretations map every predicate constant to a value of its type.  The
immediate consequence operator treats variables that occur only in a
clause body existentially; in extended mode this includes predicate
variables, which then range over the whole enumerated domain of their type.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .bezem import GroundModel
from .core import App, Classification, Const, Eq, FunApp, Program, Var
from .domains import (
    DEFAULT_DOMAIN_CAP, FALSE, TRUE, Domains, Individual, Rel, Truth, apply,
    holds, leq, show_value, truth, value_to_json,
)
from .errors import InfiniteDomain, IterationCapExceeded, Issue, NotDefinitional, TypeMismatch, UnboundVariable
from .typesys import IOTA, O, flatten
from .universe import ActiveUniverse

DEFAULT_ITERATION_CAP = 100_000


@dataclass(frozen=True)
class Interp:
    values: dict
    domains: Domains = field(default=None, compare=False, repr=False)

    def __getitem__(self, pred: str):
        return self.values[pred]

    def leq(self, other: "Interp") -> bool:
        return all(leq(v, other.values[p]) for p, v in self.values.items())

    def show(self, shapes=None) -> list:
        return [f"{p} = {show_value(self.values[p], shapes)}" for p in sorted(self.values)]

    def to_json(self):
        return {p: value_to_json(self.values[p]) for p in sorted(self.values)}


def eval_expr(e, i: Interp, s=None):
    """The value of a typed expression under an interpretation and a state."""
    if isinstance(e, Var):
        try:
            return s[e.name]
        except (KeyError, TypeError):
            raise UnboundVariable(f"variable {e.name} is not bound by the state") from None
    if isinstance(e, Const):
        if e.type == IOTA:
            return Individual(e)
        try:
            return i[e.name]
        except KeyError:
            raise TypeMismatch(f"{e.name} is not interpreted") from None
    if isinstance(e, FunApp):
        args = [eval_expr(a, i, s) for a in e.args]
        if not all(isinstance(a, Individual) for a in args):
            raise TypeMismatch(f"function {e.symbol} applied to a non-individual")
        return Individual(FunApp(e.symbol, tuple(a.term for a in args)))
    if isinstance(e, App):
        return apply(eval_expr(e.fun, i, s), eval_expr(e.arg, i, s))
    if isinstance(e, Eq):
        return truth(eval_expr(e.left, i, s) == eval_expr(e.right, i, s))
    raise TypeMismatch(f"not an expression: {e!r}")


def _is_true(e, i, s) -> bool:
    v = eval_expr(e, i, s)
    if not isinstance(v, Truth):
        raise TypeMismatch("body atom does not evaluate to a truth value")
    return v.value


class _CompiledClause:
    def __init__(self, clause, pools):
        self.clause = clause
        self.formals = [v.name for v in clause.formals]
        self.extras = [v.name for v in (*clause.extra_ind_vars, *clause.extra_pred_vars)]
        bound = set(self.formals)
        self.fixed = [b for b in clause.norm_body if _names(b) <= bound]
        self.open = [b for b in clause.norm_body if not _names(b) <= bound]
        self.pools = [pools(v.type) for v in (*clause.extra_ind_vars, *clause.extra_pred_vars)]

    def fires(self, i, args) -> bool:
        s = dict(zip(self.formals, args))
        if not all(_is_true(b, i, s) for b in self.fixed):
            return False
        if not self.extras:
            return True
        for witness in itertools.product(*self.pools):
            s.update(zip(self.extras, witness))
            if all(_is_true(b, i, s) for b in self.open):
                return True
        return False


def _names(e) -> set:
    from .core import variables
    return {v.name for v in variables(e)}


class Wadge:
    """The Wadge engine for one program.

    Function-free programs have a finite individual domain (the program's
    constants).  With function symbols the individual domain is infinite,
    so ``individuals`` must be given explicitly (a finite window) or
    ``InfiniteDomain`` is raised.
    """

    def __init__(self, p: Program, *, extended: bool = False, individuals=None,
                 domain_cap: int = DEFAULT_DOMAIN_CAP, iteration_cap: int = DEFAULT_ITERATION_CAP):
        allowed = {Classification.DEFINITIONAL}
        if extended:
            allowed.add(Classification.EXTENDED)
        if p.classification not in allowed:
            hint = "" if p.classification != Classification.EXTENDED else " (use extended mode)"
            raise NotDefinitional([Issue(
                "NotDefinitional",
                f"program is {p.classification.value}: {', '.join(map(str, p.reasons))}{hint}")])
        if individuals is None:
            if p.has_functions:
                raise InfiniteDomain("function symbols make the individual domain infinite; "
                                     "pass a finite window of individuals")
            individuals = [Const(c, IOTA) for c in p.signature.individuals]
        self.program = p
        self.extended = extended
        self.iteration_cap = iteration_cap
        self.domains = Domains(individuals, domain_cap)
        self.preds = sorted(p.signature.predicates.items())
        self._compiled = {name: [_CompiledClause(c, self.domains.enumerate) for c in p.clauses_for(name)]
                          for name, _ in self.preds}

    @classmethod
    def windowed(cls, p: Program, k: int, **kw) -> "Wadge":
        """Engine whose individuals are the ground individual terms of depth <= k."""
        return cls(p, individuals=ActiveUniverse(p, k).terms(IOTA), **kw)

    def interp(self, values) -> Interp:
        return Interp(dict(values), self.domains)

    def bottom(self) -> Interp:
        return self.interp({p: self.domains.bottom(t) for p, t in self.preds})

    def top(self) -> Interp:
        return self.interp({p: self.domains.top(t) for p, t in self.preds})

    def tp_step(self, i: Interp) -> Interp:
        out = {}
        for name, t in self.preds:
            clauses = self._compiled[name]
            arg_types, _ = flatten(t)
            if not arg_types:
                out[name] = truth(any(c.fires(i, ()) for c in clauses))
                continue
            mins = []
            if clauses:
                # tuples come in a linear extension of the order, so a tuple
                # above a known minimal one is true without evaluation
                for tup in self.domains.product(arg_types).tuples:
                    if any(_tuple_leq(m, tup) for m in mins):
                        continue
                    if any(c.fires(i, tup) for c in clauses):
                        mins.append(tup)
            out[name] = Rel(arg_types, frozenset(mins))
        return self.interp(out)

    def lfp(self, trace: bool = False):
        """Kleene iteration from bottom.  Returns ``(model, steps)`` or, with
        ``trace``, ``(model, steps, iterates)``; ``steps`` counts the
        applications that changed the interpretation."""
        cur = self.bottom()
        iterates = [cur]
        steps = 0
        while True:
            nxt = self.tp_step(cur)
            if nxt == cur:
                break
            steps += 1
            if steps > self.iteration_cap:
                raise IterationCapExceeded(f"no fixed point after {self.iteration_cap} steps")
            cur = nxt
            iterates.append(cur)
        return (cur, steps, iterates) if trace else (cur, steps)

    def is_model(self, i: Interp) -> bool:
        """Every state that makes a body true makes the head true."""
        for name, t in self.preds:
            arg_types, _ = flatten(t)
            head = i[name]
            tuples = self.domains.product(arg_types).tuples if arg_types else [()]
            for c in self._compiled[name]:
                for tup in tuples:
                    head_true = head.value if isinstance(head, Truth) else holds(head, tup)
                    if head_true:
                        continue
                    s = dict(zip(c.formals, tup))
                    for witness in itertools.product(*c.pools):
                        s.update(zip(c.extras, witness))
                        if all(_is_true(b, i, s) for b in c.clause.norm_body):
                            return False
        return True

    def interpretations(self):
        """Every interpretation (for exhaustive checks on tiny programs)."""
        names = [p for p, _ in self.preds]
        pools = [self.domains.enumerate(t) for _, t in self.preds]
        for vals in itertools.product(*pools):
            yield self.interp(zip(names, vals))


def _tuple_leq(t1, t2) -> bool:
    return all(leq(a, b) for a, b in zip(t1, t2))


def tp_step(p: Program, i: Interp, **kw) -> Interp:
    return Wadge(p, **kw).tp_step(i)


def lfp_wadge(p: Program, **kw):
    """``(model, iterations)`` of the minimum Herbrand model."""
    trace = kw.pop("trace", False)
    return Wadge(p, **kw).lfp(trace=trace)


def is_model(p: Program, i: Interp, **kw) -> bool:
    return Wadge(p, **kw).is_model(i)


def eval_ground_atom(m: Interp, a) -> bool:
    v = eval_expr(a, m, {})
    if not isinstance(v, Truth):
        raise TypeMismatch("not an atom")
    return v.value


def ground_restrict(m: Interp, u: ActiveUniverse, atoms=None) -> GroundModel:
    """The true ground atoms among ``atoms`` (default: all atoms of depth <= k)."""
    atoms = u.atoms() if atoms is None else atoms
    return GroundModel(frozenset(a for a in atoms if not isinstance(a, Eq) and eval_ground_atom(m, a)), u.k)

"""Differential testing of the two semantics.

``compare`` evaluates every ground atom up to a depth bound under both
engines.  For definitional programs any disagreement on a settled atom is
a bug.  For programs with body-only predicate variables the engines are
expected to differ; ``divergence_suite`` pins the smallest such case.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

from .bezem import (
    Deepening, GroundModel, atoms_of, check_extensionality, check_prec_monotonicity, is_ground_model,
)
from .core import App, Classification, Program, atom_depth, load_program, show, substitute, variables
from .domains import Individual, Rel, Truth, apply, holds, leq, truth, tuple_leq as _tuple_leq
from .errors import DomainOverflow, HodefError, NotDefinitional, TypeMismatch
from .generate import GenConfig, gen_program
from .typesys import Iota, O, flatten
from .universe import ActiveUniverse, ground_instantiation
from .wadge import Interp, Wadge, eval_expr, eval_ground_atom


@dataclass(frozen=True)
class AtomRow:
    atom: object
    wadge: bool
    bezem: bool
    settled: bool

    @property
    def disagrees(self) -> bool:
        return self.wadge != self.bezem and (self.settled or self.bezem)


@dataclass
class CompareReport:
    program: str
    k: int
    kmax: int
    classification: Classification
    rows: list = field(default_factory=list)
    shapes: dict = field(default_factory=dict, repr=False)
    error: str | None = None

    @property
    def disagreements(self) -> list:
        return [r for r in self.rows if r.disagrees]

    @property
    def forbidden(self) -> bool:
        """Disagreements count against the equivalence only for definitional programs."""
        return self.classification == Classification.DEFINITIONAL and bool(self.disagreements)

    def summary(self) -> dict:
        return {
            "atoms": len(self.rows),
            "wadge_true": sum(r.wadge for r in self.rows),
            "bezem_true": sum(r.bezem for r in self.rows),
            "unsettled": sum(not r.settled for r in self.rows),
            "disagreements": len(self.disagreements),
        }

    def _show(self, e):
        return show(e, self.shapes)

    def to_json(self):
        return {
            "program": self.program,
            "classification": self.classification.value,
            "k": self.k,
            "kmax": self.kmax,
            "rows": [{"atom": self._show(r.atom), "depth": atom_depth(r.atom), "wadge": r.wadge,
                      "bezem": r.bezem, "settled": r.settled} for r in self.rows],
            "disagreements": [self._show(r.atom) for r in self.disagreements],
            "forbidden": self.forbidden,
            "summary": self.summary(),
            "error": self.error,
        }


def compare(p: Program, k: int, kmax: int, *, program_id: str = "<program>", wadge: Wadge = None,
            deep: Deepening = None) -> CompareReport:
    """Both semantics on every ground atom of depth <= k."""
    if kmax < k:
        raise ValueError("kmax must be at least k")
    if wadge is None:
        wadge = Wadge(p, extended=p.classification == Classification.EXTENDED)
    m, _ = wadge.lfp()
    deep = deep or Deepening(p)
    atoms = deep.universe(k).atoms()
    answers = deep.answers(atoms, k, kmax)
    rep = CompareReport(program_id, k, kmax, p.classification, shapes=p.signature.shapes)
    for a in atoms:
        ans = answers[a]
        rep.rows.append(AtomRow(a, eval_ground_atom(m, a), ans.value, ans.settled))
    return rep


# ---------------------------------------------------------------------------
# Divergence under body-only predicate variables

DIVERGENT = "p(a) :- Q(a).\n"
CONTROL = "p(a) :- Q(a).\nq(a).\n"


@dataclass
class SuiteCase:
    name: str
    passed: bool
    detail: str

    def to_json(self):
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass
class SuiteReport:
    cases: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    def to_json(self):
        return {"passed": self.passed, "cases": [c.to_json() for c in self.cases]}


def divergence_suite() -> SuiteReport:
    cases = []
    p = load_program(DIVERGENT)
    rep = compare(p, 0, 2)
    vals = {p.show(r.atom): (r.bezem, r.wadge) for r in rep.rows}
    diverging = sorted(p.show(r.atom) for r in rep.rows if r.wadge != r.bezem)
    cases.append(SuiteCase(
        "bezem false, extended wadge true",
        vals.get("p(a)") == (False, True),
        f"p(a): bezem={vals.get('p(a)', (None,))[0]}, extended wadge={vals.get('p(a)', (None, None))[1]}"))
    cases.append(SuiteCase("divergence is exactly p(a) at depth 0", diverging == ["p(a)"],
                           f"diverging atoms: {diverging}"))
    try:
        Wadge(p)
        cases.append(SuiteCase("plain wadge rejects", False, "accepted"))
    except NotDefinitional as e:
        cases.append(SuiteCase("plain wadge rejects", "ExtraBodyPredVar" in str(e), str(e)))
    c = load_program(CONTROL)
    crep = compare(c, 0, 2)
    cvals = {c.show(r.atom): (r.bezem, r.wadge) for r in crep.rows}
    cases.append(SuiteCase("control agrees", cvals.get("p(a)") == (True, True) and not crep.disagreements,
                           f"p(a): {cvals.get('p(a)')}, disagreements={len(crep.disagreements)}"))
    return SuiteReport(cases)


# ---------------------------------------------------------------------------
# Semantic extension

class SemanticExtension:
    """``d`` is a semantic extension of ``E`` relative to a ground model.

    The arrow case quantifies over the enumerated domain and the depth-k
    universe only, so a positive answer is bounded.
    """

    def __init__(self, gm: GroundModel, u: ActiveUniverse, wadge: Wadge):
        self.gm = gm
        self.u = u
        self.domains = wadge.domains
        self._memo = {}

    def check(self, d, e) -> bool:
        key = (d, e)
        if key not in self._memo:
            self._memo[key] = self._check(d, e)
        return self._memo[key]

    def _check(self, d, e) -> bool:
        t = e.type
        if isinstance(t, Iota):
            return isinstance(d, Individual) and d.term == e
        if isinstance(t, O):
            if not isinstance(d, Truth):
                raise TypeMismatch("expected a truth value")
            return d.value == self.gm.value(e)
        if not isinstance(d, Rel):
            raise TypeMismatch("expected a relation")
        for d2 in self.domains.enumerate(t.arg):
            for e2 in self.u.terms(t.arg):
                if self.check(d2, e2) and not self.check(apply(d, d2), App(e, e2)):
                    return False
        return True


def check_semantic_extension(d, e, gm: GroundModel, u: ActiveUniverse, wadge: Wadge) -> bool:
    return SemanticExtension(gm, u, wadge).check(d, e)


# ---------------------------------------------------------------------------
# Per-program property checks used by the fuzzer

def check_substitution_lemma(p: Program, m, u: ActiveUniverse, rng: random.Random, samples: int = 20) -> list:
    """Evaluating under s equals evaluating the substituted expression, where
    s maps each variable to the meaning of its ground term."""
    failures = []
    exprs = [e for c in p.clauses for e in (c.head, *c.body) if variables(e)]
    for _ in range(samples if exprs else 0):
        e = rng.choice(exprs)
        theta, s = {}, {}
        for v in variables(e):
            terms = u.terms(v.type)
            if not terms:
                break
            t = rng.choice(terms)
            theta[v.name] = t
            s[v.name] = eval_expr(t, m, {})
        else:
            if eval_expr(e, m, s) != eval_expr(substitute(e, theta), m, {}):
                failures.append(f"{p.show(e)} under {{{', '.join(f'{k}/{p.show(t)}' for k, t in theta.items())}}}")
    return failures


def check_extension_of_model(p: Program, m, gm: GroundModel, u: ActiveUniverse, wadge: Wadge) -> list:
    """Every ground predicate term's meaning extends the term itself."""
    ext = SemanticExtension(gm, u, wadge)
    failures = []
    for t in sorted({v for v in p.signature.predicates.values()}, key=str):
        for e in u.terms(t):
            if not ext.check(eval_expr(e, m, {}), e):
                failures.append(p.show(e))
    return failures


def random_value(w: Wadge, t, rng: random.Random, below=None):
    """A random value of type ``t``, below ``below`` when given."""
    if isinstance(t, Iota):
        return below if below is not None else rng.choice(w.domains.enumerate(t))
    if isinstance(t, O):
        return truth(rng.random() < 0.5 and (below is None or below.value))
    args, _ = flatten(t)
    tuples = w.domains.product(args).tuples
    if below is not None:
        tuples = [x for x in tuples if holds(below, x)]
    density = rng.choice((0.02, 0.1, 0.4))
    # tuples are in a linear extension of the order, so checking each
    # pick against the minimal ones kept so far is enough
    kept = []
    for x in tuples:
        if rng.random() < density and not any(_tuple_leq(m, x) for m in kept):
            kept.append(x)
    return Rel(args, frozenset(kept))


def random_interp(w: Wadge, rng: random.Random, below: Interp = None) -> Interp:
    return w.interp({p: random_value(w, t, rng, None if below is None else below[p]) for p, t in w.preds})


def _subexpressions(e):
    yield e
    if isinstance(e, App):
        yield from _subexpressions(e.fun)
        yield from _subexpressions(e.arg)


def check_tp_monotonicity(w: Wadge, rng: random.Random, samples: int = 20) -> list:
    """i below j implies T_P(i) below T_P(j), on random pairs and on the Kleene chain."""
    failures = []
    for _ in range(samples):
        j = random_interp(w, rng)
        i = random_interp(w, rng, below=j)
        if not w.tp_step(i).leq(w.tp_step(j)):
            failures.append(f"{i.show()} below {j.show()}")
    _, _, chain = w.lfp(trace=True)
    failures += [f"iterate {n} not below iterate {n + 1}" for n in range(len(chain) - 1)
                 if not chain[n].leq(chain[n + 1])]
    return failures


def check_eval_monotonicity(w: Wadge, rng: random.Random, samples: int = 20) -> list:
    """Expression meanings grow with the interpretation and with the state."""
    p = w.program
    exprs = [x for c in p.clauses for e in (c.head, *c.norm_body) for x in _subexpressions(e)
             if not isinstance(x.type, Iota)]
    failures = []
    for _ in range(samples if exprs else 0):
        e = rng.choice(exprs)
        j = random_interp(w, rng)
        i = random_interp(w, rng, below=j)
        s_hi = {v.name: random_value(w, v.type, rng) for v in variables(e)}
        s_lo = {v.name: random_value(w, v.type, rng, below=s_hi[v.name]) for v in variables(e)}
        if not leq(eval_expr(e, i, s_lo), eval_expr(e, j, s_lo)):
            failures.append(f"interpretation: {p.show(e)}")
        if not leq(eval_expr(e, i, s_lo), eval_expr(e, i, s_hi)):
            failures.append(f"state: {p.show(e)}")
    return failures


def check_minimality(w: Wadge, limit: int = 5000):
    """The least fixed point is a model lying below every model.

    Returns ``None`` when there are more than ``limit`` interpretations,
    otherwise ``(models_seen, failures)``.
    """
    small = _interpretation_count(w, limit)
    if small is None:
        return None
    m, _ = w.lfp()
    failures = [] if w.is_model(m) else ["least fixed point is not a model"]
    models = 0
    for i in w.interpretations():
        if w.is_model(i):
            models += 1
            if not m.leq(i):
                failures.append(f"not below model {i.show()}")
    return models, failures


def _interpretation_count(w: Wadge, limit: int):
    total = 1
    try:
        for _, t in w.preds:
            total *= len(w.domains.domain(t).values) if len(flatten(t)[0]) <= 2 else limit + 1
            if total > limit:
                return None
    except DomainOverflow:
        return None
    return total


def check_ground_restriction(w: Wadge, k: int, models=()) -> list:
    """The ground restriction of a model is a model of the ground instantiation."""
    p = w.program
    gp = ground_instantiation(p, k)
    atoms = sorted(atoms_of(gp), key=lambda a: show(a))
    failures = []
    for name, m in (("lfp", w.lfp()[0]), ("top", w.top()), *models):
        gm = GroundModel(frozenset(a for a in atoms if eval_ground_atom(m, a)), k)
        if not is_ground_model(gp, gm):
            failures.append(f"restriction of {name} is not a model")
    return failures


@dataclass
class SeedResult:
    seed: int
    classification: Classification
    source: str = ""
    atoms: int = 0
    disagreements: list = field(default_factory=list)
    forbidden: bool = False
    failures: dict = field(default_factory=dict)
    error: str | None = None
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.forbidden and not any(self.failures.values()) and self.error is None

    def to_json(self):
        return {"seed": self.seed, "classification": self.classification.value, "ok": self.ok,
                "atoms": self.atoms, "disagreements": self.disagreements, "forbidden": self.forbidden,
                "failures": {k: v for k, v in sorted(self.failures.items()) if v},
                "error": self.error, "source": self.source}


@dataclass
class FuzzReport:
    k: int
    kmax: int
    results: list = field(default_factory=list)

    @property
    def failing_seeds(self) -> list:
        return [r.seed for r in self.results if not r.ok]

    @property
    def ok(self) -> bool:
        return not self.failing_seeds

    def summary(self) -> dict:
        return {
            "seeds": len(self.results),
            "atoms": sum(r.atoms for r in self.results),
            "permitted_disagreements": sum(len(r.disagreements) for r in self.results if not r.forbidden),
            "forbidden_disagreements": sum(len(r.disagreements) for r in self.results if r.forbidden),
            "errors": sum(r.error is not None for r in self.results),
            "failing_seeds": self.failing_seeds,
        }

    def to_json(self):
        return {"k": self.k, "kmax": self.kmax, "summary": self.summary(),
                "results": [r.to_json() for r in self.results]}


def check_seed(cfg: GenConfig, k: int, kmax: int, *, properties: bool = True) -> SeedResult:
    t0 = time.perf_counter()
    res = SeedResult(cfg.seed, cfg.target)
    try:
        p = gen_program(cfg)
        res.source = p.source()
        extended = p.classification == Classification.EXTENDED
        wadge = Wadge(p, extended=extended)
        deep = Deepening(p)
        rep = compare(p, k, kmax, program_id=f"seed {cfg.seed}", wadge=wadge, deep=deep)
        res.atoms = len(rep.rows)
        res.disagreements = [p.show(r.atom) for r in rep.disagreements]
        res.forbidden = rep.forbidden
        if properties:
            rng = random.Random(cfg.seed)
            m, _ = wadge.lfp()
            u = deep.universe(k)
            res.failures["tp_monotonicity"] = check_tp_monotonicity(wadge, rng)
            res.failures["eval_monotonicity"] = check_eval_monotonicity(wadge, rng)
            res.failures["substitution"] = check_substitution_lemma(p, m, u, rng)
            if not extended:
                gm = deep.model(kmax)
                res.failures["ground_restriction"] = check_ground_restriction(wadge, k)
                res.failures["prec_monotonicity"] = check_prec_monotonicity(p, k, deep=deep).violations
                res.failures["extensionality"] = check_extensionality(p, k, deep=deep).violations
                res.failures["semantic_extension"] = check_extension_of_model(p, m, gm, u, wadge)
    except HodefError as e:
        res.error = f"{type(e).__name__}: {e}"
    res.seconds = time.perf_counter() - t0
    return res


def fuzz_equivalence(n_seeds: int, cfg: GenConfig = None, k: int = 2, kmax: int = None,
                     *, first_seed: int = 1, properties: bool = True) -> FuzzReport:
    """Run ``n_seeds`` generated programs through both engines and the property checks."""
    from dataclasses import replace
    cfg = cfg or GenConfig()
    kmax = k + 1 if kmax is None else kmax
    rep = FuzzReport(k, kmax)
    for seed in range(first_seed, first_seed + n_seeds):
        rep.results.append(check_seed(replace(cfg, seed=seed), k, kmax, properties=properties))
    return rep

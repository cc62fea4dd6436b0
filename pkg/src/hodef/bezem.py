"""Propositional least fixed point over the ground instantiation.

The ground instantiation of a higher-order program is infinite in general,
so it is computed at a term-depth bound ``k``.  Truth is monotone in ``k``;
``Deepening`` recomputes the model at increasing bounds and labels every
false answer as settled or not.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from .core import App, Classification, Eq, Program, atom_depth, depth, spine, term_key
from .errors import Issue, NotDefinitional
from .typesys import Arrow, Iota, O, Type
from .universe import DEFAULT_CLAUSE_CAP, DEFAULT_UNIVERSE_CAP, ActiveUniverse, ground_instantiation


@dataclass(frozen=True)
class GroundModel:
    """A set of true ground atoms; equality atoms have their fixed meaning."""

    true_atoms: frozenset
    k: int = 0

    def value(self, atom) -> bool:
        if isinstance(atom, Eq):
            return atom.left == atom.right
        return atom in self.true_atoms

    def __contains__(self, atom) -> bool:
        return self.value(atom)

    def __len__(self) -> int:
        return len(self.true_atoms)

    def upto(self, d: int) -> frozenset:
        return frozenset(a for a in self.true_atoms if atom_depth(a) <= d)

    def sorted_atoms(self) -> list:
        return sorted(self.true_atoms, key=term_key)


def _prepare(gp):
    """Drop clauses with a false equality and strip true equalities."""
    out = []
    for c in gp:
        body = []
        for b in c.body:
            if isinstance(b, Eq):
                if b.left != b.right:
                    break
            else:
                body.append(b)
        else:
            out.append((c.head, tuple(dict.fromkeys(body))))
    return out


def lfp_ground(gp, k: int = 0) -> GroundModel:
    """Least model of a ground program by counter-based forward chaining."""
    clauses = _prepare(gp)
    waiting = {}
    missing = []
    true = set()
    queue = deque()
    for i, (head, body) in enumerate(clauses):
        missing.append(len(body))
        for b in body:
            waiting.setdefault(b, []).append(i)
        if not body:
            queue.append(head)
    while queue:
        a = queue.popleft()
        if a in true:
            continue
        true.add(a)
        for i in waiting.get(a, ()):
            missing[i] -= 1
            if missing[i] == 0:
                queue.append(clauses[i][0])
    return GroundModel(frozenset(true), k)


def lfp_ground_naive(gp) -> frozenset:
    """Least model by simultaneous iteration of the immediate consequence operator."""
    model = frozenset()
    while True:
        nxt = frozenset(c.head for c in gp
                        if all((b.left == b.right) if isinstance(b, Eq) else b in model for b in c.body))
        if nxt == model:
            return model
        model = nxt


def is_ground_model(gp, gm: GroundModel) -> bool:
    return all(gm.value(c.head) or not all(gm.value(b) for b in c.body) for c in gp)


def atoms_of(gp) -> set:
    out = set()
    for c in gp:
        out.add(c.head)
        out.update(b for b in c.body if not isinstance(b, Eq))
    return out


def check_program(p: Program):
    if p.classification == Classification.REJECTED:
        raise NotDefinitional([Issue("NotHoapata", ", ".join(str(r) for r in p.reasons))])


@dataclass(frozen=True)
class Answer:
    value: bool
    settled_at: int | None  # None means unsettled

    @property
    def settled(self) -> bool:
        return self.settled_at is not None


class Deepening:
    """Ground models of one program at increasing depth bounds (computed lazily)."""

    def __init__(self, p: Program, *, universe_cap: int = DEFAULT_UNIVERSE_CAP,
                 clause_cap: int = DEFAULT_CLAUSE_CAP):
        check_program(p)
        self.program = p
        self.universe_cap = universe_cap
        self.clause_cap = clause_cap
        self._models = {}
        self._universes = {}

    def universe(self, k: int) -> ActiveUniverse:
        if k not in self._universes:
            self._universes[k] = ActiveUniverse(self.program, k, self.universe_cap)
        return self._universes[k]

    def grounding(self, k: int) -> list:
        return ground_instantiation(self.program, k, universe=self.universe(k), cap=self.clause_cap)

    def model(self, k: int) -> GroundModel:
        if k not in self._models:
            self._models[k] = lfp_ground(self.grounding(k), k)
        return self._models[k]

    def saturated(self, k: int) -> bool:
        """No term of depth k+1 exists, so the depth-k grounding is all of Gr(P)."""
        u0, u1 = self.universe(k), self.universe(k + 1)
        return all(len(u0.terms(t)) == len(u1.terms(t)) for t in _term_types(self.program))

    def answers(self, atoms, k0: int, kmax: int) -> dict:
        """Deepening answers for many atoms at once (all of depth <= k0)."""
        atoms = list(atoms)
        result = {}
        pending = set(atoms)
        stable_at = None
        prev = None
        for k in range(k0, kmax + 1):
            m = self.model(k)
            for a in list(pending):
                if m.value(a):
                    result[a] = Answer(True, k)
                    pending.discard(a)
            if not pending:
                break
            view = m.upto(k0)
            if prev is not None and view == prev:
                stable_at = k
                break
            if self.saturated(k):
                stable_at = k
                break
            prev = view
        for a in pending:
            result[a] = Answer(False, stable_at)
        return result

    def query(self, atom, k0: int, kmax: int) -> Answer:
        return self.answers([atom], k0, kmax)[atom]


def lfp_deepening(p: Program, atom, k0: int, kmax: int, **caps) -> Answer:
    if atom_depth(atom) > k0:
        raise ValueError(f"atom depth {atom_depth(atom)} exceeds k0={k0}")
    if k0 > kmax:
        raise ValueError("k0 must not exceed kmax")
    return Deepening(p, **caps).query(atom, k0, kmax)


# ---------------------------------------------------------------------------
# The syntactic preorder induced by the ground model

@dataclass(frozen=True)
class PrecRelation:
    """Pairs (E, E') with E below E' at type ``rho``, quantifying arguments over
    the depth-``k`` universe only (a bounded approximation)."""

    type: Type
    pairs: frozenset
    k: int
    bounded: bool = True

    def __contains__(self, pair) -> bool:
        return pair in self.pairs


class Prec:
    def __init__(self, gm: GroundModel, u: ActiveUniverse):
        self.gm = gm
        self.u = u
        self._memo = {}

    def leq(self, e1, e2, rho: Type) -> bool:
        key = (e1, e2, rho)
        if key in self._memo:
            return self._memo[key]
        if isinstance(rho, Iota):
            r = e1 == e2
        elif isinstance(rho, O):
            r = self.gm.value(e1) <= self.gm.value(e2)
        else:
            r = all(self.leq(App(e1, d), App(e2, d), rho.result) for d in self.u.terms(rho.arg))
        self._memo[key] = r
        return r

    def equiv(self, e1, e2, rho: Type) -> bool:
        return self.leq(e1, e2, rho) and self.leq(e2, e1, rho)

    def relation(self, rho: Type) -> PrecRelation:
        ts = self.u.terms(rho)
        pairs = frozenset((a, b) for a in ts for b in ts if self.leq(a, b, rho))
        return PrecRelation(rho, pairs, self.u.k)


def prec_order(rho: Type, gm: GroundModel, u: ActiveUniverse) -> PrecRelation:
    return Prec(gm, u).relation(rho)


@dataclass
class CheckReport:
    checked: int = 0
    skipped: int = 0
    violations: list = field(default_factory=list)
    k: int = 0
    model_depth: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self):
        return {"checked": self.checked, "skipped": self.skipped, "k": self.k,
                "model_depth": self.model_depth, "violations": list(self.violations)}


def _model_for_checks(p: Program, k: int, extra: int, deep: Deepening = None):
    deep = deep or Deepening(p)
    return deep.model(k + extra), deep.universe(k)


def _term_types(p: Program):
    """Every type a clause variable can have."""
    types = {Iota()}
    todo = list(p.signature.predicates.values())
    while todo:
        t = todo.pop()
        if isinstance(t, Arrow) and t not in types:
            types.add(t)
            todo += [t.arg, t.result]
    return types


def _arg_types(p: Program):
    """Argument types of partial applications that can appear in U."""
    types = set()
    for t in p.signature.predicates.values():
        while isinstance(t, Arrow):
            types.add(t)
            t = t.result
    return sorted(types, key=str)


def check_prec_monotonicity(p: Program, k: int, *, extra: int = 2, deep: Deepening = None) -> CheckReport:
    """E D below E D' whenever D below D', over the depth-``k`` universe."""
    gm, u = _model_for_checks(p, k, extra, deep)
    prec = Prec(gm, u)
    rep = CheckReport(k=k, model_depth=k + extra)
    for rho_pi in _arg_types(p):
        rho, pi = rho_pi.arg, rho_pi.result
        ds = u.terms(rho)
        for e in u.terms(rho_pi):
            for d1 in ds:
                for d2 in ds:
                    if not prec.leq(d1, d2, rho):
                        continue
                    a1, a2 = App(e, d1), App(e, d2)
                    if max(depth(a1), depth(a2)) > k:
                        rep.skipped += 1
                        continue
                    rep.checked += 1
                    if not prec.leq(a1, a2, pi):
                        rep.violations.append(
                            f"{p.show(d1)} <= {p.show(d2)} but not {p.show(a1)} <= {p.show(a2)}")
    return rep


def equivalence_classes(prec: Prec, terms, rho: Type) -> list:
    classes = []
    for t in terms:
        for cls in classes:
            if prec.equiv(cls[0], t, rho):
                cls.append(t)
                break
        else:
            classes.append([t])
    return classes


def check_extensionality(p: Program, k: int, *, extra: int = 2, deep: Deepening = None) -> CheckReport:
    """Replacing an argument by an equivalent term preserves truth."""
    gm, u = _model_for_checks(p, k, extra, deep)
    prec = Prec(gm, u)
    rep = CheckReport(k=k, model_depth=k + extra)
    cls_of = {}
    for rho in _arg_types(p):
        for cls in equivalence_classes(prec, u.terms(rho), rho):
            for t in cls:
                cls_of[t] = cls
    for atom in u.atoms():
        if not gm.value(atom):
            continue
        h, args = spine(atom)
        for i, a in enumerate(args):
            for alt in cls_of.get(a, ()):
                if alt == a:
                    continue
                other = h
                for j, b in enumerate(args):
                    other = App(other, alt if j == i else b)
                if atom_depth(other) > k:
                    rep.skipped += 1
                    continue
                rep.checked += 1
                if not gm.value(other):
                    rep.violations.append(f"{p.show(atom)} true but {p.show(other)} false")
    return rep

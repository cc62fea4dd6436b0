"""Simple types: individuals, booleans and curried arrows.

Argument types are ``i`` or predicate types; predicate types are ``o`` or
``rho -> pi``.  Function symbols are never given an arrow type in the typed
AST, only an arity, but the annotation syntax ``i -> i -> i`` is still parsed
into arrows so that it can be recognised as a function signature.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Union


def cached_hash(cls):
    """Memoise the hash of a frozen dataclass (terms and values are hashed a lot)."""
    names = tuple(f.name for f in fields(cls) if f.compare)

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((cls.__name__, *(getattr(self, n) for n in names)))
            object.__setattr__(self, "_hash", h)
        return h

    cls.__hash__ = __hash__
    return cls


@dataclass(frozen=True)
class Iota:
    def __str__(self) -> str:
        return "i"


@dataclass(frozen=True)
class O:
    def __str__(self) -> str:
        return "o"


@cached_hash
@dataclass(frozen=True)
class Arrow:
    arg: "Type"
    result: "Type"

    def __str__(self) -> str:
        a = f"({self.arg})" if isinstance(self.arg, Arrow) else str(self.arg)
        return f"{a} -> {self.result}"


Type = Union[Iota, O, Arrow]

IOTA = Iota()
OMICRON = O()


@dataclass(frozen=True)
class FuncSig:
    """Signature of a function symbol of type i^n -> i."""

    arity: int

    def __str__(self) -> str:
        return " -> ".join(["i"] * (self.arity + 1))


def flatten(t: Type) -> tuple[tuple[Type, ...], Type]:
    """Split ``r1 -> ... -> rn -> r`` into ``((r1, ..., rn), r)``."""
    args = []
    while isinstance(t, Arrow):
        args.append(t.arg)
        t = t.result
    return tuple(args), t


def curry(args, result: Type) -> Type:
    for a in reversed(tuple(args)):
        result = Arrow(a, result)
    return result


def is_predicate_type(t: Type) -> bool:
    if isinstance(t, O):
        return True
    if isinstance(t, Arrow):
        return is_argument_type(t.arg) and is_predicate_type(t.result)
    return False


def is_argument_type(t: Type) -> bool:
    return isinstance(t, Iota) or is_predicate_type(t)


def function_arity(t: Type):
    """Arity ``n`` if ``t`` is ``i^n -> i`` with n >= 1, else None."""
    args, res = flatten(t)
    if args and isinstance(res, Iota) and all(isinstance(a, Iota) for a in args):
        return len(args)
    return None


def order(t: Type) -> int:
    """0 for i, 1 for first-order predicate types, and so on."""
    if isinstance(t, Iota):
        return 0
    args, _ = flatten(t)
    return 1 + max((order(a) for a in args), default=0)


def type_key(t: Type):
    if isinstance(t, Iota):
        return (0,)
    if isinstance(t, O):
        return (1,)
    return (2, type_key(t.arg), type_key(t.result))


def type_to_json(t: Type):
    if isinstance(t, Iota):
        return "i"
    if isinstance(t, O):
        return "o"
    return {"arrow": [type_to_json(t.arg), type_to_json(t.result)]}

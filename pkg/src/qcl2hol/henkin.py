"""Finite Henkin-style evaluation of HOL terms.

A selection model induces a Henkin model whose type-i domain is the set
of worlds, whose type-u domain is the individual domain, and whose
type-i>o domain is the propositional domain (sets identified with their
characteristic functions, here :class:`WorldSet`).  The valuation is
compositional: variables come from the assignment, application is
function application, lambdas build closures, and the quantifier
constant enumerates the domain of its type.

Quantification is supported exactly at the types the translation
produces (i, u, i>o, and o for free variables); anything else raises
rather than guessing.  Function domains other than i>o are never
materialized; their elements only ever arise as closures produced by
evaluation, which is all the translation's image requires.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Mapping

from . import embedding, syntax
from .embedding import COMBINATOR_NAMES, PROP, SELECTION_TYPE, predicate_constant
from .hol import (
    App,
    Arrow,
    Const,
    HolTerm,
    HolType,
    I,
    Lam,
    O,
    PI_NAME,
    U,
    Var,
    free_term_vars,
)
from .semantics import QclAssignment, SelectionModel, eval_qcl, mask_of


class HolEvalError(ValueError):
    """Unassigned variable, uninterpretable constant or unusable term."""


class UnsupportedQuantifierError(HolEvalError):
    """Quantification at a type whose domain is not materialized."""


class WorldSet:
    """A set of worlds as its characteristic function (type i>o)."""

    __slots__ = ("mask",)

    def __init__(self, mask: int):
        self.mask = mask

    def __call__(self, world: int) -> bool:
        return bool(self.mask >> world & 1)

    def __eq__(self, other) -> bool:
        return isinstance(other, WorldSet) and self.mask == other.mask

    def __hash__(self) -> int:
        return hash(("WorldSet", self.mask))

    def __repr__(self) -> str:
        return f"WorldSet({self.mask:#b})"


@dataclass(frozen=True)
class FiniteHenkinModel:
    """The finite fragment of the induced Henkin model."""

    worlds: tuple[int, ...]
    individuals: tuple[int, ...]
    propositions: tuple[int, ...]
    selection: tuple[tuple[int, ...], ...]
    pred_tables: tuple[tuple[str, int, tuple[frozenset[tuple[int, ...]], ...]], ...] = ()
    extras: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if not self.worlds or not self.individuals:
            raise ValueError("world and individual domains must be non-empty")
        if not self.propositions:
            raise ValueError("the propositional domain must be non-empty")
        cells = tuple(WorldSet(mask) for mask in range(1 << len(self.worlds)))
        object.__setattr__(self, "_cells", cells)

    def tabulate(self, fn) -> int:
        """Bitmask of the worlds a type-i>o value maps to true."""
        if isinstance(fn, WorldSet):
            return fn.mask
        mask = 0
        for w in self.worlds:
            if fn(w):
                mask |= 1 << w
        return mask

    def selection_value(self, world: int, fn) -> WorldSet:
        return self._cells[self.selection[world][self.tabulate(fn)]]


def build_henkin(model: SelectionModel, extras: Mapping | None = None) -> FiniteHenkinModel:
    """The Henkin model induced by a selection model.

    The constant ``f`` holds of (s, q, t) exactly when t is selected for
    (s, worlds of q); a predicate constant holds of its arguments and a
    world exactly when the tuple is in the world's interpretation.
    """
    if model.num_worlds == 0:
        raise ValueError("a Henkin model needs at least one world")
    return FiniteHenkinModel(
        worlds=tuple(model.worlds),
        individuals=tuple(model.individuals),
        propositions=model.prop_domain,
        selection=model.selection,
        pred_tables=model.interp,
        extras=dict(extras or {}),
    )


# ---------------------------------------------------------------------------
# Domains and defaults


def domain(henkin: FiniteHenkinModel, t: HolType) -> list:
    """The materialized domain of a type, where one exists."""
    if t == I:
        return list(henkin.worlds)
    if t == U:
        return list(henkin.individuals)
    if t == O:
        return [False, True]
    if t == PROP:
        return [WorldSet(mask) for mask in henkin.propositions]
    raise UnsupportedQuantifierError(f"no materialized domain at type {t}")


def default_element(henkin: FiniteHenkinModel, t: HolType):
    """Deterministic default: the first element in domain order, or a
    constant function built from defaults at function types."""
    if t == O:
        return False
    if t == I:
        return henkin.worlds[0]
    if t == U:
        return henkin.individuals[0]
    if t == PROP:
        return WorldSet(henkin.propositions[0])
    if isinstance(t, Arrow):
        value = default_element(henkin, t.cod)
        return lambda _arg: value
    raise HolEvalError(f"no default element at type {t}")


class LiftedAssignment(dict):
    """HOL assignment keyed by (name, type); unmapped variables get the
    documented default element of their type."""

    def __init__(self, henkin: FiniteHenkinModel, mapping: Mapping | None = None):
        super().__init__(mapping or {})
        self.henkin = henkin

    def __missing__(self, key):
        _, var_type = key
        return default_element(self.henkin, var_type)


def lift_assignment(
    g: QclAssignment, henkin: FiniteHenkinModel
) -> LiftedAssignment:
    """Individual variables keep their value, propositional variables
    become characteristic functions, everything else defaults."""
    mapping: dict[tuple[str, HolType], Any] = {}
    for name, value in g.ind.items():
        mapping[(name, U)] = value
    for name, mask in g.prop.items():
        mapping[(name, PROP)] = WorldSet(mask)
    return LiftedAssignment(henkin, mapping)


# ---------------------------------------------------------------------------
# The valuation


def eval_hol(henkin: FiniteHenkinModel, assignment: Mapping, term: HolTerm):
    """Compositional valuation of a well-typed term.

    The assignment maps (name, type) pairs to domain elements.  The
    result is a bool for type o, a world or individual for i and u, and
    a callable (or :class:`WorldSet`) at function types.
    """
    return compile_term(henkin, term)(assignment)


def _lookup(env, key):
    while type(env) is tuple:
        k, value, env = env
        if k == key:
            return value
    try:
        return env[key]
    except KeyError:
        raise HolEvalError(f"unassigned variable {key[0]}:{key[1]}") from None


def compile_term(henkin: FiniteHenkinModel, term: HolTerm):
    """Stage the valuation: translate the term once into nested closures.

    The result maps an assignment to the term's value, clause by
    clause: variables read the assignment, constants their fixed
    interpretation, application applies, and a lambda builds the
    function extending the assignment at its binder.  Sweeps call this
    once per term and model, then evaluate many assignments cheaply.
    """
    match term:
        case Var(name, var_type):
            key = (name, var_type)
            return lambda env: _lookup(env, key)
        case Const():
            value = _constant_value(henkin, term)
            return lambda env: value
        case App(fn, arg):
            fn_c = compile_term(henkin, fn)
            arg_c = compile_term(henkin, arg)
            return lambda env: fn_c(env)(arg_c(env))
        case Lam(var, var_type, body):
            key = (var, var_type)
            body_c = compile_term(henkin, body)
            return lambda env: lambda value: body_c((key, value, env))
        case _:
            raise TypeError(f"not a term: {term!r}")


def _constant_value(henkin: FiniteHenkinModel, const: Const):
    name = const.name
    if name == "~":
        return lambda a: not a
    if name == "|":
        return lambda a: lambda b: a or b
    if name == "&":
        return lambda a: lambda b: a and b
    if name == "=>":
        return lambda a: lambda b: (not a) or b
    if name == "<=>":
        return lambda a: lambda b: a == b
    if name == "$true":
        return True
    if name == "$false":
        return False
    if name == PI_NAME:
        match const.type:
            case Arrow(Arrow(alpha, _), _):
                values = domain(henkin, alpha)
            case _:
                raise HolEvalError(f"quantifier constant at malformed type {const.type}")
        def every(fn, _values=values):
            for v in _values:
                if not fn(v):
                    return False
            return True
        return every
    if name == "f":
        if const.type != SELECTION_TYPE:
            raise HolEvalError(f"constant f used at unexpected type {const.type}")
        return lambda s: lambda q: henkin.selection_value(s, q)
    for pred, arity, rows in henkin.pred_tables:
        if pred == name:
            if const.type != predicate_constant(pred, arity).type:
                raise HolEvalError(f"predicate {pred!r} used at unexpected type {const.type}")
            return _predicate_value(henkin, arity, rows)
    if name in COMBINATOR_NAMES:
        raise HolEvalError(
            f"combinator constant {name!r} reached evaluation; unfold it first"
        )
    key = (name, const.type)
    if key in henkin.extras:
        return henkin.extras[key]
    return default_element(henkin, const.type)


def _predicate_value(henkin: FiniteHenkinModel, arity: int, rows):
    def make(collected: tuple[int, ...]):
        if len(collected) == arity:
            return WorldSet(mask_of(w for w in henkin.worlds if collected in rows[w]))
        return lambda d: make(collected + (d,))

    return make(())


def hol_valid(henkin: FiniteHenkinModel, term: HolTerm) -> bool:
    """True when the term evaluates to true under every assignment of
    its free variables over their finite domains."""
    variables = sorted(free_term_vars(term), key=lambda v: (v.name, str(v.type)))
    compiled = compile_term(henkin, term)
    domains = [domain(henkin, v.type) for v in variables]
    keys = [(v.name, v.type) for v in variables]
    base = LiftedAssignment(henkin)
    for values in itertools.product(*domains):
        base.update(zip(keys, values))
        if compiled(base) is not True:
            return False
    return True


# ---------------------------------------------------------------------------
# Correspondence between the two semantics

WORLD_VAR = Var("S", I)


def correspondence_check(
    model: SelectionModel,
    g: QclAssignment,
    world: int,
    formula: syntax.QclFormula,
    *,
    env: embedding.EmbeddingEnv | None = None,
    henkin: FiniteHenkinModel | None = None,
    kernel: HolTerm | None = None,
    compiled=None,
) -> bool:
    """Do the direct semantics and the translated HOL evaluation agree
    at this model, assignment and world?

    The optional keyword arguments let sweeps reuse the Henkin model,
    the translated term and its staged form across calls.
    """
    direct = eval_qcl(model, g, world, formula)
    if henkin is None:
        henkin = build_henkin(model)
    if compiled is None:
        if kernel is None:
            if env is None:
                env = embedding.EmbeddingEnv.for_formula(formula)
            kernel = embedding.embed_kernel(formula, env)
        compiled = compile_term(henkin, App(kernel, WORLD_VAR))
    assignment = lift_assignment(g, henkin)
    assignment[(WORLD_VAR.name, I)] = world
    return direct == (compiled(assignment) is True)

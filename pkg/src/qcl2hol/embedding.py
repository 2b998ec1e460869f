"""Translation of conditional-logic formulas into HOL terms of type i>o.

A formula becomes a predicate on worlds.  Propositional variables map
to HOL variables of type i>o, individual variables to HOL variables of
type u, and predicate symbols to HOL constants of curried type
u>...>u>i>o.  The connectives map to applications of named combinator
constants (cnot, cor, ccond, ...); :func:`unfold_combinators` replaces
those constants by their definitions, and :func:`embed_kernel` goes all
the way to a combinator-free beta-eta normal form suitable for
evaluation.

The conditional combinator quantifies over the worlds selected by the
distinguished constant ``f`` applied to the current world and the
antecedent's world set.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from . import syntax
from .hol import (
    App,
    Arrow,
    Const,
    HolTerm,
    I,
    Lam,
    O,
    U,
    Var,
    app,
    beta_eta_normalize,
    conj,
    disj,
    fn_type,
    forall,
    impl,
    neg,
    FALSE,
    TRUE,
)


class EmbeddingError(ValueError):
    """Raised for undeclared predicates or arity mismatches."""


PROP = Arrow(I, O)  # the type of embedded formulas

SELECTION_TYPE = fn_type(I, PROP, I, O)
SELECTION = Const("f", SELECTION_TYPE)

BINARY = fn_type(PROP, PROP, PROP)

CNOT = Const("cnot", fn_type(PROP, PROP))
COR = Const("cor", BINARY)
CTRUE = Const("ctrue", PROP)
CFALSE = Const("cfalse", PROP)
CCOND = Const("ccond", BINARY)
CAND = Const("cand", BINARY)
CCONDEQUIV = Const("ccondequiv", BINARY)
CIMPL = Const("cimpl", BINARY)
CEQUIV = Const("cequiv", BINARY)
CFORALL_IND = Const("cforall_ind", fn_type(Arrow(U, PROP), PROP))
CFORALL_PROP = Const("cforall_prop", fn_type(Arrow(PROP, PROP), PROP))
CEXISTS_IND = Const("cexists_ind", fn_type(Arrow(U, PROP), PROP))
CEXISTS_PROP = Const("cexists_prop", fn_type(Arrow(PROP, PROP), PROP))
VALID = Const("valid", Arrow(PROP, O))


def _combinator_bodies() -> tuple[tuple[Const, HolTerm], ...]:
    phi = Var("Phi", PROP)
    psi = Var("Psi", PROP)
    x = Var("X", I)
    w = Var("W", I)

    def lam2(body: HolTerm) -> HolTerm:
        return Lam("Phi", PROP, Lam("Psi", PROP, body))

    cnot = Lam("Phi", PROP, Lam("X", I, neg(App(phi, x))))
    cor = lam2(Lam("X", I, disj(App(phi, x), App(psi, x))))
    ctrue = Lam("X", I, TRUE)
    cfalse = Lam("X", I, FALSE)
    ccond = lam2(
        Lam(
            "X",
            I,
            forall("W", I, impl(app(SELECTION, x, phi, w), App(psi, w))),
        )
    )
    cand = lam2(Lam("X", I, conj(App(phi, x), App(psi, x))))
    ccondequiv = lam2(app(CAND, app(CCOND, phi, psi), app(CCOND, psi, phi)))
    cimpl = lam2(Lam("X", I, impl(App(phi, x), App(psi, x))))
    cequiv = lam2(app(CAND, app(CIMPL, phi, psi), app(CIMPL, psi, phi)))

    phi_ind = Var("Phi", Arrow(U, PROP))
    cforall_ind = Lam(
        "Phi",
        Arrow(U, PROP),
        Lam("W", I, forall("X", U, app(phi_ind, Var("X", U), w))),
    )
    phi_prop = Var("Phi", Arrow(PROP, PROP))
    cforall_prop = Lam(
        "Phi",
        Arrow(PROP, PROP),
        Lam("W", I, forall("P", PROP, app(phi_prop, Var("P", PROP), w))),
    )
    cexists_ind = Lam(
        "Phi",
        Arrow(U, PROP),
        App(
            CNOT,
            App(
                CFORALL_IND,
                Lam("X", U, App(CNOT, App(phi_ind, Var("X", U)))),
            ),
        ),
    )
    cexists_prop = Lam(
        "Phi",
        Arrow(PROP, PROP),
        App(
            CNOT,
            App(
                CFORALL_PROP,
                Lam("P", PROP, App(CNOT, App(phi_prop, Var("P", PROP)))),
            ),
        ),
    )
    valid = Lam("Phi", PROP, forall("S", I, App(phi, Var("S", I))))

    return (
        (CNOT, cnot),
        (COR, cor),
        (CTRUE, ctrue),
        (CFALSE, cfalse),
        (CCOND, ccond),
        (CAND, cand),
        (CCONDEQUIV, ccondequiv),
        (CIMPL, cimpl),
        (CEQUIV, cequiv),
        (CFORALL_IND, cforall_ind),
        (CFORALL_PROP, cforall_prop),
        (CEXISTS_IND, cexists_ind),
        (CEXISTS_PROP, cexists_prop),
        (VALID, valid),
    )


COMBINATOR_DEFINITIONS: tuple[tuple[Const, HolTerm], ...] = _combinator_bodies()
COMBINATOR_NAMES = frozenset(c.name for c, _ in COMBINATOR_DEFINITIONS)
_DEFINITION_BY_CONST = dict(COMBINATOR_DEFINITIONS)


def predicate_constant(name: str, arity: int) -> Const:
    return Const(name, fn_type(*([U] * arity), PROP))


@dataclass(frozen=True)
class EmbeddingEnv:
    """Predicate constants plus the fixed pieces of the translation."""

    predicates: tuple[tuple[str, int], ...] = ()
    selection: Const = SELECTION
    definitions: tuple[tuple[Const, HolTerm], ...] = COMBINATOR_DEFINITIONS

    @classmethod
    def from_signature(cls, sig: syntax.Signature) -> "EmbeddingEnv":
        return cls(predicates=tuple(sorted(sig.predicates)))

    @classmethod
    def for_formula(cls, formula: syntax.QclFormula) -> "EmbeddingEnv":
        return cls(predicates=tuple(sorted(syntax.predicates_of(formula).items())))

    @property
    def arities(self) -> dict[str, int]:
        return dict(self.predicates)

    def predicate(self, name: str, nargs: int) -> Const:
        arity = self.arities.get(name)
        if arity is None:
            raise EmbeddingError(f"undeclared predicate {name!r}")
        if arity != nargs:
            raise EmbeddingError(
                f"predicate {name!r} has arity {arity}, applied to {nargs} argument(s)"
            )
        return predicate_constant(name, arity)


def combinator_definitions(env: EmbeddingEnv | None = None) -> list[tuple[str, HolTerm]]:
    """The lifted connectives and the validity wrapper, as closed terms."""
    defs = env.definitions if env is not None else COMBINATOR_DEFINITIONS
    return [(const.name, body) for const, body in defs]


def embed(formula: syntax.QclFormula, env: EmbeddingEnv) -> HolTerm:
    """Structural translation to a HOL term of type i>o.

    Connectives become applications of the combinator constants; sugar
    connectives map to their own combinators (cand, cimpl, cequiv,
    cexists_ind, cexists_prop) so that emitted problems keep the surface
    structure.
    """
    match formula:
        case syntax.PropVar(name):
            return Var(name, PROP)
        case syntax.Atom(pred, args):
            return app(env.predicate(pred, len(args)), *(Var(a, U) for a in args))
        case syntax.Top():
            return CTRUE
        case syntax.Bottom():
            return CFALSE
        case syntax.Neg(body):
            return App(CNOT, embed(body, env))
        case syntax.Or(left, right):
            return app(COR, embed(left, env), embed(right, env))
        case syntax.CondImp(antecedent, consequent):
            return app(CCOND, embed(antecedent, env), embed(consequent, env))
        case syntax.ForallInd(var, body):
            return App(CFORALL_IND, Lam(var, U, embed(body, env)))
        case syntax.ForallProp(var, body):
            return App(CFORALL_PROP, Lam(var, PROP, embed(body, env)))
        case syntax.And(left, right):
            return app(CAND, embed(left, env), embed(right, env))
        case syntax.Implies(left, right):
            return app(CIMPL, embed(left, env), embed(right, env))
        case syntax.Iff(left, right):
            return app(CEQUIV, embed(left, env), embed(right, env))
        case syntax.ExistsInd(var, body):
            return App(CEXISTS_IND, Lam(var, U, embed(body, env)))
        case syntax.ExistsProp(var, body):
            return App(CEXISTS_PROP, Lam(var, PROP, embed(body, env)))
        case _:
            raise TypeError(f"not a formula node: {formula!r}")


def embed_valid(formula: syntax.QclFormula, env: EmbeddingEnv) -> HolTerm:
    """The closed validity claim: the validity wrapper applied to the embedding."""
    return App(VALID, embed(formula, env))


def unfold_combinators(term: HolTerm) -> HolTerm:
    """Replace every combinator constant by its definition.

    Definitions may mention earlier combinators, so rewriting repeats
    until none remain; the definition table is not recursive.
    """
    changed = True
    while changed:
        term, changed = _unfold_pass(term)
    return term


def _unfold_pass(term: HolTerm) -> tuple[HolTerm, bool]:
    match term:
        case Const():
            definition = _DEFINITION_BY_CONST.get(term)
            return (definition, True) if definition is not None else (term, False)
        case Var():
            return term, False
        case Lam(var, var_type, body):
            new_body, changed = _unfold_pass(body)
            return (Lam(var, var_type, new_body) if changed else term), changed
        case App(fn, arg):
            new_fn, fn_changed = _unfold_pass(fn)
            new_arg, arg_changed = _unfold_pass(arg)
            changed = fn_changed or arg_changed
            return (App(new_fn, new_arg) if changed else term), changed
        case _:
            raise TypeError(f"not a term: {term!r}")


@lru_cache(maxsize=8192)
def _kernel_form(term: HolTerm) -> HolTerm:
    return beta_eta_normalize(unfold_combinators(term))


def to_kernel(term: HolTerm) -> HolTerm:
    """Unfold combinators, then beta-eta normalize.

    The &, => and <=> abbreviation constants are kept; evaluation and
    printing understand them directly.
    """
    return _kernel_form(term)


def embed_kernel(formula: syntax.QclFormula, env: EmbeddingEnv) -> HolTerm:
    """Fully unfolded, normalized embedding (for evaluation)."""
    return to_kernel(embed(formula, env))


def embed_valid_kernel(formula: syntax.QclFormula, env: EmbeddingEnv) -> HolTerm:
    return to_kernel(embed_valid(formula, env))

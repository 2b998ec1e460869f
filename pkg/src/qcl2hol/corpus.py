"""Formula corpora for sweeps: exhaustive shapes at small depth, seeded
random samples at larger depth, and the standard rule-instance battery."""

from __future__ import annotations

import random
from typing import Sequence

from .semantics import RuleInstance
from .syntax import (
    And,
    Atom,
    CondImp,
    ForallInd,
    ForallProp,
    Neg,
    Or,
    PropVar,
    QclFormula,
)

DEFAULT_ATOMS: tuple[QclFormula, ...] = (PropVar("p"), Atom("b", ("X",)))


def all_formulas(
    max_depth: int,
    atoms: Sequence[QclFormula] = DEFAULT_ATOMS,
    ind_var: str = "X",
    prop_var: str = "p",
) -> list[QclFormula]:
    """Every distinct primitive formula of connective depth <= max_depth
    built from the given atoms, quantifying over the two fixed variables.

    Deterministic order: depth layer by layer, construction order within
    a layer, duplicates dropped.
    """
    order: list[QclFormula] = []
    seen: set[QclFormula] = set()

    def add(formula: QclFormula) -> None:
        if formula not in seen:
            seen.add(formula)
            order.append(formula)

    for atom in atoms:
        add(atom)
    for _ in range(max_depth):
        previous = list(order)
        for t in previous:
            add(Neg(t))
        for a in previous:
            for b in previous:
                add(Or(a, b))
        for a in previous:
            for b in previous:
                add(CondImp(a, b))
        for t in previous:
            add(ForallInd(ind_var, t))
        for t in previous:
            add(ForallProp(prop_var, t))
    return order


def random_formula(
    rng: random.Random,
    depth: int,
    atoms: Sequence[QclFormula] = DEFAULT_ATOMS,
    ind_var: str = "X",
    prop_var: str = "p",
) -> QclFormula:
    """A random primitive formula of exactly the requested depth."""
    if depth <= 0:
        return rng.choice(list(atoms))
    kind = rng.choice(("neg", "or", "cond", "forall_ind", "forall_prop"))
    deep = random_formula(rng, depth - 1, atoms, ind_var, prop_var)
    if kind == "neg":
        return Neg(deep)
    if kind == "forall_ind":
        return ForallInd(ind_var, deep)
    if kind == "forall_prop":
        return ForallProp(prop_var, deep)
    other = random_formula(rng, rng.randrange(depth), atoms, ind_var, prop_var)
    left, right = (deep, other) if rng.random() < 0.5 else (other, deep)
    return Or(left, right) if kind == "or" else CondImp(left, right)


def _p() -> PropVar:
    return PropVar("p")


def _q() -> PropVar:
    return PropVar("q")


def _r() -> PropVar:
    return PropVar("r")


def rule_battery() -> list[RuleInstance]:
    """Fixed instances for the three rule schemata, mixing valid and
    invalid premises."""
    p, q, r = _p(), _q(), _r()
    s = PropVar("s")
    bx = Atom("b", ("X",))
    pairs = [
        (Or(p, q), Or(q, p)),
        (p, Neg(Neg(p))),
        (And(p, q), And(q, p)),
        (Or(p, Neg(p)), Or(q, Neg(q))),
        (p, And(p, p)),
        (CondImp(p, q), CondImp(p, q)),
        (p, q),
        (ForallInd("X", bx), Neg(Neg(ForallInd("X", bx)))),
    ]
    instances = [RuleInstance("RCEA", (a, b, r)) for a, b in pairs]
    instances += [RuleInstance("RCEC", (a, b, r)) for a, b in pairs]
    instances += [
        RuleInstance("RCK", (p, q, q)),
        RuleInstance("RCK", (r, p, Neg(Neg(p)))),
        RuleInstance("RCK", (r, p, q, And(p, q))),
        RuleInstance("RCK", (p, q, r, And(r, q))),
        RuleInstance("RCK", (p, q, r, q)),
        RuleInstance("RCK", (p, q, r, s, And(q, And(r, s)))),
        RuleInstance("RCK", (p, p, p, p, And(p, And(p, p)))),
    ]
    return instances

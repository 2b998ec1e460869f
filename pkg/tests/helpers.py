"""Shared test utilities: independent oracles for the kernel operations
and random generators for terms, models and assignments.

The oracles here deliberately avoid the package's nameless machinery:
alpha comparison carries a renaming environment over the named trees,
and the reference normalizer substitutes with explicit freshening.
"""

from __future__ import annotations

import random

from qcl2hol.embedding import PROP, SELECTION, predicate_constant
from qcl2hol.hol import (
    AND,
    App,
    Arrow,
    Const,
    EQUIV,
    FALSE,
    HolTerm,
    HolType,
    I,
    IMPL,
    Lam,
    NOT,
    O,
    OR,
    TRUE,
    U,
    Var,
    forall,
    free_term_vars,
)
from qcl2hol.semantics import Bounds, SelectionModel, full_mask, enumerate_models


# ---------------------------------------------------------------------------
# Alpha-equality oracle (environment of paired binder names)


def alpha_oracle(a: HolTerm, b: HolTerm, env: tuple = ()) -> bool:
    match (a, b):
        case (Var(na, ta), Var(nb, tb)):
            for xa, xb, t in env:
                hit_a = na == xa and ta == t
                hit_b = nb == xb and tb == t
                if hit_a or hit_b:
                    return hit_a and hit_b
            return na == nb and ta == tb
        case (Const(na, ta), Const(nb, tb)):
            return na == nb and ta == tb
        case (App(fa, aa), App(fb, ab)):
            return alpha_oracle(fa, fb, env) and alpha_oracle(aa, ab, env)
        case (Lam(va, ta, ba), Lam(vb, tb, bb)):
            if ta != tb:
                return False
            return alpha_oracle(ba, bb, ((va, vb, ta),) + env)
        case _:
            return False


# ---------------------------------------------------------------------------
# Reference normalizer (named substitution with explicit freshening)


def _fresh(base: str, avoid: set[str]) -> str:
    name = base
    n = 0
    while name in avoid:
        n += 1
        name = f"{base}_{n}"
    return name


def naive_substitute(term: HolTerm, name: str, var_type: HolType, repl: HolTerm) -> HolTerm:
    match term:
        case Var(n, t):
            return repl if (n, t) == (name, var_type) else term
        case Const():
            return term
        case App(fn, arg):
            return App(
                naive_substitute(fn, name, var_type, repl),
                naive_substitute(arg, name, var_type, repl),
            )
        case Lam(v, vt, body):
            if (v, vt) == (name, var_type):
                return term
            repl_free = {x.name for x in free_term_vars(repl)}
            if v in repl_free:
                avoid = repl_free | {x.name for x in free_term_vars(body)} | {name}
                fresh = _fresh(v, avoid)
                body = naive_substitute(body, v, vt, Var(fresh, vt))
                v = fresh
            return Lam(v, vt, naive_substitute(body, name, var_type, repl))
    raise TypeError(term)


def naive_normalize(term: HolTerm, fuel: int = 10_000) -> HolTerm:
    """Normal-order beta normalization followed by eta contraction."""
    if fuel <= 0:
        raise RuntimeError("fuel exhausted")
    match term:
        case Var() | Const():
            return term
        case Lam(v, vt, body):
            body = naive_normalize(body, fuel - 1)
            match body:
                case App(fn, Var(n, t)) if (n, t) == (v, vt) and not any(
                    x == Var(v, vt) for x in free_term_vars(fn)
                ):
                    return fn
            return Lam(v, vt, body)
        case App(fn, arg):
            fn = naive_normalize(fn, fuel - 1)
            match fn:
                case Lam(v, vt, body):
                    return naive_normalize(
                        naive_substitute(body, v, vt, arg), fuel - 1
                    )
            return App(fn, naive_normalize(arg, fuel - 1))
    raise TypeError(term)


def _redex_positions(term: HolTerm, path=()) -> list[tuple]:
    """Paths of all beta redexes, for the random-order reducer."""
    out = []
    match term:
        case App(Lam(_, _, _), _):
            out.append(path)
    match term:
        case App(fn, arg):
            out += _redex_positions(fn, path + ("fn",))
            out += _redex_positions(arg, path + ("arg",))
        case Lam(_, _, body):
            out += _redex_positions(body, path + ("body",))
    return out


def _step_at(term: HolTerm, path: tuple) -> HolTerm:
    if not path:
        match term:
            case App(Lam(v, vt, body), arg):
                return naive_substitute(body, v, vt, arg)
        raise ValueError("no redex at path")
    head, *rest = path
    match term:
        case App(fn, arg) if head == "fn":
            return App(_step_at(fn, tuple(rest)), arg)
        case App(fn, arg) if head == "arg":
            return App(fn, _step_at(arg, tuple(rest)))
        case Lam(v, vt, body) if head == "body":
            return Lam(v, vt, _step_at(body, tuple(rest)))
    raise ValueError("path does not match term")


def random_order_normalize(term: HolTerm, rng: random.Random, fuel: int = 20_000) -> HolTerm:
    """Beta-normalize by firing randomly chosen redexes, then contract
    eta via the reference normalizer (which leaves beta normal forms
    alone)."""
    while fuel > 0:
        redexes = _redex_positions(term)
        if not redexes:
            return naive_normalize(term)
        term = _step_at(term, rng.choice(redexes))
        fuel -= 1
    raise RuntimeError("fuel exhausted")


# ---------------------------------------------------------------------------
# Random well-typed terms

BASE_CONTEXT: tuple[tuple[str, HolType], ...] = (
    ("w0", I),
    ("d0", U),
    ("p0", PROP),
    ("z0", O),
)

_TYPE_POOL = (O, I, U, PROP)


def gen_type(rng: random.Random) -> HolType:
    if rng.random() < 0.8:
        return rng.choice(_TYPE_POOL)
    return Arrow(rng.choice(_TYPE_POOL), rng.choice(_TYPE_POOL))


def gen_term(
    rng: random.Random,
    target: HolType,
    depth: int,
    ctx: tuple[tuple[str, HolType], ...] = BASE_CONTEXT,
    counter: list[int] | None = None,
) -> HolTerm:
    """A random well-typed term of the target type over the context."""
    if counter is None:
        counter = [0]
    candidates = [name for name, t in ctx if t == target]
    if depth <= 0:
        if target == O:
            return rng.choice([TRUE, FALSE] + [Var(n, O) for n in candidates])
        if candidates:
            return Var(rng.choice(candidates), target)
        if isinstance(target, Arrow):
            counter[0] += 1
            binder = f"v{counter[0]}"
            body = gen_term(rng, target.cod, 0, ctx + ((binder, target.dom),), counter)
            return Lam(binder, target.dom, body)
        # No variable of this base type in scope; fall back through an
        # application of a fresh lambda-made function from type o.
        return App(
            Lam("_x", O, gen_term(rng, target, 0, ctx + (("_x", O),), counter)),
            TRUE,
        )

    roll = rng.random()
    if candidates and roll < 0.15:
        return Var(rng.choice(candidates), target)
    if isinstance(target, Arrow) and roll < 0.55:
        counter[0] += 1
        binder = f"v{counter[0]}"
        body = gen_term(rng, target.cod, depth - 1, ctx + ((binder, target.dom),), counter)
        return Lam(binder, target.dom, body)
    if target == O:
        kind = rng.choice(("not", "or", "and", "impl", "equiv", "forall", "app", "leaf"))
        if kind == "not":
            return App(NOT, gen_term(rng, O, depth - 1, ctx, counter))
        if kind in ("or", "and", "impl", "equiv"):
            op = {"or": OR, "and": AND, "impl": IMPL, "equiv": EQUIV}[kind]
            return App(
                App(op, gen_term(rng, O, depth - 1, ctx, counter)),
                gen_term(rng, O, depth - 1, ctx, counter),
            )
        if kind == "forall":
            alpha = rng.choice((I, U, PROP))
            counter[0] += 1
            binder = f"v{counter[0]}"
            body = gen_term(rng, O, depth - 1, ctx + ((binder, alpha),), counter)
            return forall(binder, alpha, body)
        if kind == "leaf":
            return gen_term(rng, O, 0, ctx, counter)
    if rng.random() < 0.25 and target == PROP:
        # Reach the selection constant and predicate constants sometimes.
        if rng.random() < 0.5:
            return App(
                App(SELECTION, gen_term(rng, I, depth - 1, ctx, counter)),
                gen_term(rng, PROP, depth - 1, ctx, counter),
            )
        return App(predicate_constant("b", 1), gen_term(rng, U, depth - 1, ctx, counter))
    beta = rng.choice(_TYPE_POOL)
    fn = gen_term(rng, Arrow(beta, target), depth - 1, ctx, counter)
    arg = gen_term(rng, beta, depth - 1, ctx, counter)
    return App(fn, arg)


# ---------------------------------------------------------------------------
# Random models and assignments


def gen_model(
    rng: random.Random,
    max_worlds: int = 2,
    max_individuals: int = 2,
    predicates: dict[str, int] | None = None,
) -> SelectionModel:
    num_worlds = rng.randint(1, max_worlds)
    num_individuals = rng.randint(1, max_individuals)
    full = full_mask(num_worlds)
    selection = tuple(
        tuple(rng.randint(0, full) for _ in range(full + 1)) for _ in range(num_worlds)
    )
    interp = []
    for name, arity in sorted((predicates or {}).items()):
        pool = []
        import itertools

        tuples = list(itertools.product(range(num_individuals), repeat=arity))
        for _ in range(num_worlds):
            pool.append(frozenset(t for t in tuples if rng.random() < 0.5))
        interp.append((name, arity, tuple(pool)))
    return SelectionModel(
        num_worlds=num_worlds,
        num_individuals=num_individuals,
        prop_domain=tuple(range(full + 1)),
        selection=selection,
        interp=tuple(interp),
    )


def sample_models(bounds: Bounds, predicates: dict[str, int], stride: int, limit: int):
    """Deterministic slice of the enumeration: every stride-th model."""
    out = []
    for index, model in enumerate(enumerate_models(bounds, predicates)):
        if index % stride == 0:
            out.append(model)
            if len(out) >= limit:
                break
    return out

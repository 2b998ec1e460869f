"""Simply typed lambda calculus kernel.

Terms are built over the base types ``o`` (booleans), ``i`` (worlds)
and ``u`` (individuals).  The primitive logical constants are negation,
disjunction and the quantifier constant (one per quantified type);
conjunction, material implication and equivalence are carried as
opaque abbreviation constants so that printers can keep their surface
form, with :func:`expand_abbreviations` unfolding them when a purely
primitive term is needed.

The public term representation is named.  Substitution, normalization
and alpha equality run on an internal nameless (index based) form, so
capture avoidance and alpha equivalence are structural; names are
re-attached afterwards, freshened with the smallest unused numeric
suffix.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class HolTypeError(TypeError):
    """Raised for ill-typed terms or mismatched substitutions."""


# ---------------------------------------------------------------------------
# Types


@dataclass(frozen=True)
class HolType:
    pass


# Types are hashed on every environment lookup during evaluation, so
# both type nodes precompute their hash.


@dataclass(frozen=True)
class BaseType(HolType):
    name: str

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash((BaseType, self.name)))

    def __hash__(self) -> int:
        return self._hash

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Arrow(HolType):
    dom: HolType
    cod: HolType

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash((Arrow, self.dom, self.cod)))

    def __hash__(self) -> int:
        return self._hash

    def __str__(self) -> str:
        dom = f"({self.dom})" if isinstance(self.dom, Arrow) else str(self.dom)
        return f"{dom}>{self.cod}"


O = BaseType("o")
I = BaseType("i")
U = BaseType("u")


def fn_type(*types: HolType) -> HolType:
    """Right-associated function type: fn_type(a, b, c) is a>(b>c)."""
    if not types:
        raise ValueError("fn_type needs at least one type")
    result = types[-1]
    for t in reversed(types[:-1]):
        result = Arrow(t, result)
    return result


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class HolTerm:
    def __str__(self) -> str:
        return term_str(self)


@dataclass(frozen=True)
class Const(HolTerm):
    name: str
    type: HolType


@dataclass(frozen=True)
class Var(HolTerm):
    name: str
    type: HolType


@dataclass(frozen=True)
class Lam(HolTerm):
    var: str
    var_type: HolType
    body: HolTerm


@dataclass(frozen=True)
class App(HolTerm):
    fn: HolTerm
    arg: HolTerm


NOT = Const("~", fn_type(O, O))
OR = Const("|", fn_type(O, O, O))
AND = Const("&", fn_type(O, O, O))
IMPL = Const("=>", fn_type(O, O, O))
EQUIV = Const("<=>", fn_type(O, O, O))
TRUE = Const("$true", O)
FALSE = Const("$false", O)

PI_NAME = "!!"


def pi(alpha: HolType) -> Const:
    """Quantifier constant at the given type."""
    return Const(PI_NAME, Arrow(Arrow(alpha, O), O))


def app(fn: HolTerm, *args: HolTerm) -> HolTerm:
    for arg in args:
        fn = App(fn, arg)
    return fn


def neg(t: HolTerm) -> HolTerm:
    return App(NOT, t)


def disj(a: HolTerm, b: HolTerm) -> HolTerm:
    return app(OR, a, b)


def conj(a: HolTerm, b: HolTerm) -> HolTerm:
    return app(AND, a, b)


def impl(a: HolTerm, b: HolTerm) -> HolTerm:
    return app(IMPL, a, b)


def equiv(a: HolTerm, b: HolTerm) -> HolTerm:
    return app(EQUIV, a, b)


def forall(var: str, var_type: HolType, body: HolTerm) -> HolTerm:
    """Universal quantification, stored as the quantifier constant
    applied to a lambda."""
    return App(pi(var_type), Lam(var, var_type, body))


def as_forall(term: HolTerm) -> tuple[str, HolType, HolTerm] | None:
    """Destructure a quantified term produced by :func:`forall`."""
    match term:
        case App(Const(name, _), Lam(var, var_type, body)) if name == PI_NAME:
            return var, var_type, body
    return None


def is_pi(term: HolTerm) -> HolType | None:
    """If the term is a quantifier constant, the quantified type."""
    match term:
        case Const(name, Arrow(Arrow(alpha, _), _)) if name == PI_NAME:
            return alpha
    return None


# Abbreviation constants and their unfoldings over the primitive set.
_A = Var("A", O)
_B = Var("B", O)
ABBREVIATIONS: dict[Const, HolTerm] = {
    AND: Lam("A", O, Lam("B", O, neg(disj(neg(_A), neg(_B))))),
    IMPL: Lam("A", O, Lam("B", O, disj(neg(_A), _B))),
    EQUIV: Lam(
        "A",
        O,
        Lam(
            "B",
            O,
            neg(disj(neg(disj(neg(_A), _B)), neg(disj(neg(_B), _A)))),
        ),
    ),
}


def expand_abbreviations(term: HolTerm) -> HolTerm:
    """Replace the &, => and <=> constants by their definitions."""
    match term:
        case Const():
            return ABBREVIATIONS.get(term, term)
        case Var():
            return term
        case Lam(var, var_type, body):
            return Lam(var, var_type, expand_abbreviations(body))
        case App(fn, arg):
            return App(expand_abbreviations(fn), expand_abbreviations(arg))
        case _:
            raise TypeError(f"not a term: {term!r}")


# ---------------------------------------------------------------------------
# Typechecking


def type_of(term: HolTerm, _bound: dict[str, HolType] | None = None) -> HolType:
    """The unique type of a well-typed term; raises HolTypeError otherwise.

    A variable whose name is bound by an enclosing binder must carry the
    binder's type; mixing the same name at two types is rejected.
    """
    bound = _bound or {}
    match term:
        case Const(_, t):
            return t
        case Var(name, t):
            if name in bound and bound[name] != t:
                raise HolTypeError(
                    f"variable {name} occurs at type {t} under a binder of type {bound[name]}"
                )
            return t
        case Lam(var, var_type, body):
            inner = dict(bound)
            inner[var] = var_type
            return Arrow(var_type, type_of(body, inner))
        case App(fn, arg):
            fn_t = type_of(fn, bound)
            arg_t = type_of(arg, bound)
            if not isinstance(fn_t, Arrow):
                raise HolTypeError(f"applying a non-function of type {fn_t}")
            if fn_t.dom != arg_t:
                raise HolTypeError(
                    f"domain mismatch: function expects {fn_t.dom}, argument has {arg_t}"
                )
            return fn_t.cod
        case _:
            raise TypeError(f"not a term: {term!r}")


def free_term_vars(term: HolTerm) -> frozenset[Var]:
    """Free variables, as Var nodes (name and type)."""
    match term:
        case Const():
            return frozenset()
        case Var():
            return frozenset({term})
        case Lam(var, var_type, body):
            return free_term_vars(body) - {Var(var, var_type)}
        case App(fn, arg):
            return free_term_vars(fn) | free_term_vars(arg)
        case _:
            raise TypeError(f"not a term: {term!r}")


# ---------------------------------------------------------------------------
# Nameless core


@dataclass(frozen=True)
class _NTerm:
    pass


@dataclass(frozen=True)
class _NBound(_NTerm):
    index: int


@dataclass(frozen=True)
class _NFree(_NTerm):
    name: str
    type: HolType


@dataclass(frozen=True)
class _NConst(_NTerm):
    name: str
    type: HolType


@dataclass(frozen=True)
class _NLam(_NTerm):
    hint: str = field(compare=False)
    var_type: HolType = field(compare=True)
    body: _NTerm = field(compare=True)


@dataclass(frozen=True)
class _NApp(_NTerm):
    fn: _NTerm
    arg: _NTerm


def _to_nameless(term: HolTerm, env: tuple[tuple[str, HolType], ...] = ()) -> _NTerm:
    match term:
        case Const(name, t):
            return _NConst(name, t)
        case Var(name, t):
            for index, (bound_name, bound_type) in enumerate(env):
                if bound_name == name:
                    if bound_type != t:
                        raise HolTypeError(
                            f"variable {name} occurs at type {t} under a binder of type {bound_type}"
                        )
                    return _NBound(index)
            return _NFree(name, t)
        case Lam(var, var_type, body):
            return _NLam(var, var_type, _to_nameless(body, ((var, var_type),) + env))
        case App(fn, arg):
            return _NApp(_to_nameless(fn, env), _to_nameless(arg, env))
        case _:
            raise TypeError(f"not a term: {term!r}")


def _free_names(nterm: _NTerm) -> frozenset[str]:
    match nterm:
        case _NFree(name, _):
            return frozenset({name})
        case _NLam(_, _, body):
            return _free_names(body)
        case _NApp(fn, arg):
            return _free_names(fn) | _free_names(arg)
        case _:
            return frozenset()


def fresh_name(hint: str, taken: frozenset[str] | set[str]) -> str:
    """The hint itself, or hint plus the smallest unused numeric suffix."""
    if hint not in taken:
        return hint
    n = 1
    while f"{hint}{n}" in taken:
        n += 1
    return f"{hint}{n}"


def _to_named(nterm: _NTerm, env: tuple[str, ...] = ()) -> HolTerm:
    match nterm:
        case _NConst(name, t):
            return Const(name, t)
        case _NFree(name, t):
            return Var(name, t)
        case _NBound(index):
            raise ValueError(f"dangling bound index {index}")
        case _NLam(hint, var_type, body):
            name = fresh_name(hint, _free_names(body) | set(env))
            named_body = _to_named(_substitute_index(body, 0, _NFree(name, var_type)), (name,) + env)
            return Lam(name, var_type, named_body)
        case _NApp(fn, arg):
            return App(_to_named(fn, env), _to_named(arg, env))
        case _:
            raise TypeError(f"not a nameless term: {nterm!r}")


def _shift(nterm: _NTerm, by: int, cutoff: int = 0) -> _NTerm:
    match nterm:
        case _NBound(k):
            return _NBound(k + by) if k >= cutoff else nterm
        case _NLam(hint, var_type, body):
            return _NLam(hint, var_type, _shift(body, by, cutoff + 1))
        case _NApp(fn, arg):
            return _NApp(_shift(fn, by, cutoff), _shift(arg, by, cutoff))
        case _:
            return nterm


def _substitute_index(nterm: _NTerm, index: int, replacement: _NTerm) -> _NTerm:
    """Replace the bound index, dropping the binder level it referred to."""
    match nterm:
        case _NBound(k):
            if k == index:
                return _shift(replacement, index)
            return _NBound(k - 1) if k > index else nterm
        case _NLam(hint, var_type, body):
            return _NLam(hint, var_type, _substitute_index(body, index + 1, replacement))
        case _NApp(fn, arg):
            return _NApp(
                _substitute_index(fn, index, replacement),
                _substitute_index(arg, index, replacement),
            )
        case _:
            return nterm


def _substitute_free(nterm: _NTerm, name: str, var_type: HolType, replacement: _NTerm) -> _NTerm:
    match nterm:
        case _NFree(n, t) if n == name and t == var_type:
            return replacement
        case _NLam(hint, vt, body):
            return _NLam(hint, vt, _substitute_free(body, name, var_type, replacement))
        case _NApp(fn, arg):
            return _NApp(
                _substitute_free(fn, name, var_type, replacement),
                _substitute_free(arg, name, var_type, replacement),
            )
        case _:
            return nterm


def _beta_once(nterm: _NTerm) -> _NTerm | None:
    """One leftmost-outermost beta step, or None at beta normal form."""
    match nterm:
        case _NApp(_NLam(_, _, body), arg):
            return _substitute_index(body, 0, arg)
        case _NApp(fn, arg):
            stepped = _beta_once(fn)
            if stepped is not None:
                return _NApp(stepped, arg)
            stepped = _beta_once(arg)
            if stepped is not None:
                return _NApp(fn, stepped)
            return None
        case _NLam(hint, var_type, body):
            stepped = _beta_once(body)
            if stepped is not None:
                return _NLam(hint, var_type, stepped)
            return None
        case _:
            return None


def _uses_index(nterm: _NTerm, index: int) -> bool:
    match nterm:
        case _NBound(k):
            return k == index
        case _NLam(_, _, body):
            return _uses_index(body, index + 1)
        case _NApp(fn, arg):
            return _uses_index(fn, index) or _uses_index(arg, index)
        case _:
            return False


def _eta_once(nterm: _NTerm) -> _NTerm | None:
    """One leftmost-outermost eta contraction, or None if none applies."""
    match nterm:
        case _NLam(hint, var_type, _NApp(fn, _NBound(0))) if not _uses_index(fn, 0):
            return _shift(fn, -1)
        case _NLam(hint, var_type, body):
            stepped = _eta_once(body)
            if stepped is not None:
                return _NLam(hint, var_type, stepped)
            return None
        case _NApp(fn, arg):
            stepped = _eta_once(fn)
            if stepped is not None:
                return _NApp(stepped, arg)
            stepped = _eta_once(arg)
            if stepped is not None:
                return _NApp(fn, stepped)
            return None
        case _:
            return None


def _normalize_nameless(nterm: _NTerm) -> _NTerm:
    while (stepped := _beta_once(nterm)) is not None:
        nterm = stepped
    # Eta after beta cannot create new beta redexes.
    while (stepped := _eta_once(nterm)) is not None:
        nterm = stepped
    return nterm


# ---------------------------------------------------------------------------
# Public operations


def substitute(term: HolTerm, var: Var, replacement: HolTerm) -> HolTerm:
    """Capture-avoiding substitution of the replacement for the free variable."""
    if type_of(replacement) != var.type:
        raise HolTypeError(
            f"substituting a term of type {type_of(replacement)} for {var.name}:{var.type}"
        )
    result = _substitute_free(_to_nameless(term), var.name, var.type, _to_nameless(replacement))
    return _to_named(result)


def beta_eta_normalize(term: HolTerm) -> HolTerm:
    """The beta-eta normal form (unique up to alpha; deterministic names)."""
    type_of(term)
    return _to_named(_normalize_nameless(_to_nameless(term)))


def beta_eta_step(term: HolTerm) -> HolTerm | None:
    """A single beta step if one exists, else a single eta step, else None."""
    nterm = _to_nameless(term)
    stepped = _beta_once(nterm)
    if stepped is None:
        stepped = _eta_once(nterm)
    return None if stepped is None else _to_named(stepped)


def alpha_equal(a: HolTerm, b: HolTerm) -> bool:
    """Equality up to renaming of bound variables."""
    return _to_nameless(a) == _to_nameless(b)


def beta_eta_equal(a: HolTerm, b: HolTerm) -> bool:
    """Equality of beta-eta normal forms up to alpha."""
    type_of(a)
    type_of(b)
    return _normalize_nameless(_to_nameless(a)) == _normalize_nameless(_to_nameless(b))


# ---------------------------------------------------------------------------
# Debug printing


def term_str(term: HolTerm) -> str:
    """Compact ASCII rendering for messages and debugging."""
    match term:
        case Const(name, _):
            return name
        case Var(name, _):
            return name
        case Lam(var, var_type, body):
            return f"^{var}:{var_type}. {term_str(body)}"
        case App(_, _):
            quantified = as_forall(term)
            if quantified is not None:
                var, var_type, body = quantified
                return f"!{var}:{var_type}. {term_str(body)}"
            head, args = term, []
            while isinstance(head, App):
                args.append(head.arg)
                head = head.fn
            args.reverse()
            parts = [term_str(head)] + [
                f"({term_str(a)})" if isinstance(a, (App, Lam)) else term_str(a) for a in args
            ]
            return "(" + " ".join(parts) + ")"
        case _:
            raise TypeError(f"not a term: {term!r}")

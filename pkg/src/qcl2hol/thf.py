"""TPTP THF0 emission: the axiom file, problem files, term rendering.

Golden comparisons are made on token streams, so layout is free to
differ in whitespace; rendering is nonetheless byte-deterministic.
Bound variables are given THF-legal names (first letter upper case,
deduplicated with numeric suffixes against everything in scope); free
variables and constants render verbatim.

The individual type renders as ``mu``.  The axiom document leaves it
undeclared, matching the canonical text of the encoding; the
well-formedness checker treats ``mu`` as a known base type for the same
reason.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import syntax
from .embedding import (
    COMBINATOR_DEFINITIONS,
    EmbeddingEnv,
    PROP,
    SELECTION,
    embed_valid,
    predicate_constant,
)
from .hol import (
    App,
    Arrow,
    BaseType,
    Const,
    HolTerm,
    HolType,
    I,
    Lam,
    O,
    PI_NAME,
    U,
    Var,
    as_forall,
    free_term_vars,
    fresh_name,
    substitute,
)

AXIOMS_FILENAME = "CK_axioms.ax"

_QUANTIFIER_COMBINATORS = frozenset(
    {"cforall_ind", "cforall_prop", "cexists_ind", "cexists_prop"}
)
_LOGICAL_NAMES = frozenset({"~", "|", "&", "=>", "<=>", "$true", "$false", PI_NAME})

# Definition blocks for the quantifier combinators carry the bare symbol
# name; every other definition block appends _def.
_BARE_DEF_BLOCKS = _QUANTIFIER_COMBINATORS


class ThfError(ValueError):
    """Malformed or out-of-fragment input to the emitter or checker."""


class ThfFragmentError(ThfError):
    """Term outside the fragment renderable in combinator mode."""


# ---------------------------------------------------------------------------
# Types and terms as THF text


def type_text(t: HolType) -> str:
    match t:
        case BaseType("o"):
            return "$o"
        case BaseType("i"):
            return "$i"
        case BaseType("u"):
            return "mu"
        case Arrow(dom, cod):
            left = type_text(dom)
            if isinstance(dom, Arrow):
                left = f"( {left} )"
            return f"{left} > {type_text(cod)}"
        case _:
            raise ThfError(f"unrenderable type {t!r}")


_BINARY_OPS = {"|": "|", "&": "&", "=>": "=>", "<=>": "<=>"}


def render(term: HolTerm, mode: str = "combinator") -> str:
    """THF text of a term.

    Combinator mode accepts only the translation's image (combinator
    constants, predicate constants, variables, applications, and
    lambdas directly under a quantifier combinator).  Kernel mode
    accepts any well-typed term.
    """
    if mode == "combinator":
        _validate_combinator_fragment(term, lam_ok=False)
    elif mode != "kernel":
        raise ValueError(f"unknown render mode {mode!r}")
    text, _ = _render(term, {}, frozenset())
    return text


def _validate_combinator_fragment(term: HolTerm, lam_ok: bool) -> None:
    match term:
        case Var():
            return
        case Const(name, _):
            if name in _LOGICAL_NAMES:
                raise ThfFragmentError(
                    f"raw logical constant {name!r} has no combinator form"
                )
            return
        case Lam(_, _, body):
            if not lam_ok:
                raise ThfFragmentError(
                    "lambda outside a quantifier combinator argument"
                )
            _validate_combinator_fragment(body, lam_ok=False)
            return
        case App(fn, arg):
            _validate_combinator_fragment(fn, lam_ok=False)
            arg_lam_ok = isinstance(fn, Const) and fn.name in _QUANTIFIER_COMBINATORS
            _validate_combinator_fragment(arg, lam_ok=arg_lam_ok)
            return
        case _:
            raise ThfFragmentError(f"not a term: {term!r}")


def _display_name(var: str) -> str:
    return var if var[0].isupper() else var[0].upper() + var[1:]


def _bind(
    var: str,
    var_type: HolType,
    body: HolTerm,
    bound: dict,
    scope: set[str],
) -> str:
    taken = set(scope)
    for free in free_term_vars(body):
        if (free.name, free.type) != (var, var_type):
            taken.add(bound.get((free.name, free.type), free.name))
    display = fresh_name(_display_name(var), taken)
    bound[(var, var_type)] = display
    scope.add(display)
    return display


def _render(term: HolTerm, bound: dict, scope: frozenset[str]) -> tuple[str, str]:
    match term:
        case Var(name, var_type):
            return bound.get((name, var_type), name), "atom"
        case Const(name, _):
            if name in ("$true", "$false"):
                return name, "atom"
            if name in _BINARY_OPS or name in ("~", PI_NAME):
                # A logical constant standing alone, outside application.
                thf = "!!" if name == PI_NAME else name
                return f"( {thf} )", "atom"
            return name, "atom"
        case Lam():
            return _render_binder(term, "^", bound, scope)
        case App(App(Const(op, _), left), right) if op in _BINARY_OPS:
            left_text = _operand(left, bound, scope)
            right_text = _operand(right, bound, scope)
            return f"( {left_text} {_BINARY_OPS[op]} {right_text} )", "binary"
        case App(Const("~", _), arg):
            text, kind = _render(arg, bound, scope)
            if kind != "atom" and kind not in ("app", "binary"):
                text = f"( {text} )"
            return f"~ {text}", "neg"
        case App(_, _):
            if as_forall(term) is not None:
                return _render_binder(term, "!", bound, scope)
            return _render_application(term, bound, scope)
        case _:
            raise ThfError(f"not a term: {term!r}")


def _render_binder(term: HolTerm, marker: str, bound, scope) -> tuple[str, str]:
    inner_bound = dict(bound)
    inner_scope = set(scope)
    entries = []
    node = term
    while True:
        if marker == "^" and isinstance(node, Lam):
            var, var_type, body = node.var, node.var_type, node.body
        elif marker == "!" and (quantified := as_forall(node)) is not None:
            var, var_type, body = quantified
        else:
            break
        display = _bind(var, var_type, body, inner_bound, inner_scope)
        entries.append(f"{display}: {type_text(var_type)}")
        node = body
    body_text, _ = _render(node, inner_bound, frozenset(inner_scope))
    return f"{marker} [{','.join(entries)}] : {body_text}", "binder"


def _render_application(term: HolTerm, bound, scope) -> tuple[str, str]:
    head = term
    args: list[HolTerm] = []
    while isinstance(head, App):
        args.append(head.arg)
        head = head.fn
    args.reverse()
    head_text, head_kind = _render(head, bound, scope)
    if head_kind != "atom":
        head_text = f"( {head_text} )"
    parts = [head_text]
    for position, arg in enumerate(args):
        text, kind = _render(arg, bound, scope)
        if kind in ("app", "binary", "atom"):
            parts.append(text)
        elif kind == "binder" and position == len(args) - 1:
            parts.append(text)
        else:
            parts.append(f"( {text} )")
    return "( " + " @ ".join(parts) + " )", "app"


def _operand(term: HolTerm, bound, scope) -> str:
    text, kind = _render(term, bound, scope)
    if kind == "binder":
        return f"( {text} )"
    return text


# ---------------------------------------------------------------------------
# Documents


@dataclass(frozen=True)
class ThfDeclaration:
    name: str
    kind: str  # type | definition | axiom | conjecture
    body: str

    def block_text(self) -> str:
        if self.kind == "type":
            return f"thf({self.name},type,(\n    {self.body} ))."
        return f"thf({self.name},{self.kind},\n    {self.body})."


@dataclass(frozen=True)
class ThfDocument:
    includes: tuple[str, ...]
    declarations: tuple[ThfDeclaration, ...]

    def __post_init__(self):
        names = [d.name for d in self.declarations]
        if len(set(names)) != len(names):
            raise ThfError("duplicate declaration names in document")

    @property
    def rendered(self) -> str:
        parts = [f"include('{inc}')." for inc in self.includes]
        parts.extend(d.block_text() for d in self.declarations)
        return "\n\n".join(parts) + "\n"


def _definition_block(symbol: Const, definition: HolTerm) -> ThfDeclaration:
    block = symbol.name if symbol.name in _BARE_DEF_BLOCKS else f"{symbol.name}_def"
    rhs = render(definition, mode="kernel")
    body = f"( {symbol.name}\n    = ( {rhs} ) )"
    return ThfDeclaration(block, "definition", body)


def _type_block(block_name: str, symbol: str, t: HolType) -> ThfDeclaration:
    return ThfDeclaration(block_name, "type", f"{symbol}: {type_text(t)}")


def emit_axioms() -> ThfDocument:
    """The axiom document: the selection constant's type, then each
    combinator's type and definition in canonical order."""
    declarations = [_type_block("f_type", SELECTION.name, SELECTION.type)]
    for const, definition in COMBINATOR_DEFINITIONS:
        declarations.append(_type_block(f"{const.name}_type", const.name, const.type))
        declarations.append(_definition_block(const, definition))
    return ThfDocument(includes=(), declarations=tuple(declarations))


def emit_problem(
    formula: syntax.QclFormula,
    name: str,
    sig: syntax.Signature | None = None,
) -> ThfDocument:
    """A problem document: include line, one type declaration per symbol,
    and the validity conjecture in combinator form.

    Free propositional and individual variables are declared as
    constants (individual variables lowercased), since conjectures
    cannot have free variables; provers then treat them as arbitrary,
    which matches validity under all assignments.
    """
    if not re.fullmatch(r"[a-z][A-Za-z0-9_]*", name):
        raise ThfError(f"problem name {name!r} must be a lowercase identifier")
    sig = sig or syntax.Signature()
    predicates = dict(sig.predicates)
    for pred, arity in syntax.predicates_of(formula).items():
        declared = predicates.setdefault(pred, arity)
        if declared != arity:
            raise ThfError(
                f"predicate {pred!r} declared with arity {declared}, used with {arity}"
            )
    ind_free, prop_free = syntax.free_vars(formula)
    prop_names = sorted(prop_free | sig.free_prop_vars)
    ind_names = sorted(ind_free | sig.free_ind_vars)
    for bad in sorted(set(prop_names) & syntax.RESERVED_SYMBOLS):
        raise ThfError(f"free variable {bad!r} collides with an encoding symbol")

    env = EmbeddingEnv(predicates=tuple(sorted(predicates.items())))
    term = embed_valid(formula, env)

    taken = set(predicates) | set(prop_names) | syntax.RESERVED_SYMBOLS
    declarations = []
    for prop_name in prop_names:
        term = substitute(term, Var(prop_name, PROP), Const(prop_name, PROP))
        declarations.append(_type_block(prop_name, prop_name, PROP))
    for ind_name in ind_names:
        lowered = fresh_name(ind_name.lower(), taken)
        taken.add(lowered)
        term = substitute(term, Var(ind_name, U), Const(lowered, U))
        declarations.append(_type_block(lowered, lowered, U))
    for pred, arity in sorted(predicates.items()):
        const = predicate_constant(pred, arity)
        declarations.append(_type_block(pred, pred, const.type))

    conjecture = ThfDeclaration(name, "conjecture", render(term, mode="combinator"))
    declarations.append(conjecture)
    return ThfDocument(includes=(AXIOMS_FILENAME,), declarations=tuple(declarations))


# ---------------------------------------------------------------------------
# Tokenizing (for golden comparisons) and well-formedness checking

_THF_TOKEN_RE = re.compile(
    r"""
    (?P<skip>\s+|%[^\n]*)
  | (?P<quoted>'[^']*')
  | (?P<dollar>\$[A-Za-z0-9_]+)
  | (?P<word>[A-Za-z][A-Za-z0-9_]*)
  | (?P<op><=>|=>|<=|!!|\?\?|[()\[\]:,.@^!?~|&=><])
    """,
    re.VERBOSE,
)


def thf_tokens(text: str) -> list[str]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _THF_TOKEN_RE.match(text, pos)
        if m is None:
            raise ThfError(f"unexpected character {text[pos]!r} at offset {pos}")
        if m.lastgroup != "skip":
            tokens.append(m.group())
        pos = m.end()
    return tokens


def tokens_equal(a: str, b: str) -> bool:
    return thf_tokens(a) == thf_tokens(b)


_AMBIENT_TYPES = frozenset({"$i", "$o", "$tType", "mu"})
_AMBIENT_TERMS = frozenset({"$true", "$false"})


class _Checker:
    """Structural well-formedness: parses the block structure and the
    term grammar of the fragment this package emits, enforcing
    declared-before-use and balanced connective usage."""

    def __init__(self, tokens: list[str], declared: set[str]):
        self.tokens = tokens
        self.pos = 0
        self.declared = declared
        self.block_names: set[str] = set()

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise ThfError("unexpected end of document")
        self.pos += 1
        return tok

    def expect(self, token: str) -> None:
        tok = self.take()
        if tok != token:
            raise ThfError(f"expected {token!r}, found {tok!r}")

    def run(self) -> None:
        while self.peek() is not None:
            if self.peek() == "include":
                self.take()
                self.expect("(")
                quoted = self.take()
                if not (quoted.startswith("'") and quoted.endswith("'")):
                    raise ThfError("include path must be quoted")
                self.expect(")")
                self.expect(".")
                continue
            self.block()

    def block(self) -> None:
        self.expect("thf")
        self.expect("(")
        name = self.take()
        if name in self.block_names:
            raise ThfError(f"duplicate block name {name!r}")
        self.block_names.add(name)
        self.expect(",")
        kind = self.take()
        self.expect(",")
        if kind == "type":
            symbol = self.type_declaration()
            self.declared.add(symbol)
        elif kind in ("definition", "axiom", "conjecture"):
            self.expr(frozenset())
        else:
            raise ThfError(f"unknown block kind {kind!r}")
        self.expect(")")
        self.expect(".")

    def type_declaration(self) -> str:
        wrapped = self.peek() == "("
        if wrapped:
            self.take()
        symbol = self.take()
        if not symbol[0].islower():
            raise ThfError(f"declared symbol {symbol!r} must be lowercase")
        self.expect(":")
        self.type_expr()
        if wrapped:
            self.expect(")")
        return symbol

    def type_expr(self) -> None:
        self.type_primary()
        while self.peek() == ">":
            self.take()
            self.type_primary()

    def type_primary(self) -> None:
        tok = self.take()
        if tok == "(":
            self.type_expr()
            self.expect(")")
        elif tok.startswith("$"):
            if tok not in _AMBIENT_TYPES:
                raise ThfError(f"unknown defined type {tok!r}")
        elif not (tok[0].isalpha() and tok in _AMBIENT_TYPES | self.declared):
            raise ThfError(f"unknown type symbol {tok!r}")

    def expr(self, bound: frozenset[str]) -> None:
        self.operand(bound)
        op = self.peek()
        if op in ("|", "&", "=>", "<=>", "=", "@"):
            while self.peek() == op:
                self.take()
                self.operand(bound)
            trailing = self.peek()
            if trailing in ("|", "&", "=>", "<=>", "=", "@"):
                raise ThfError(
                    f"mixed operators {op!r} and {trailing!r} need parentheses"
                )

    def operand(self, bound: frozenset[str]) -> None:
        tok = self.take()
        if tok == "(":
            self.expr(bound)
            self.expect(")")
        elif tok in ("^", "!", "?"):
            self.expect("[")
            names = []
            while True:
                var = self.take()
                if not var[0].isupper():
                    raise ThfError(f"bound variable {var!r} must be uppercase")
                names.append(var)
                self.expect(":")
                self.type_expr()
                if self.peek() == ",":
                    self.take()
                    continue
                break
            self.expect("]")
            self.expect(":")
            self.operand(bound | frozenset(names))
        elif tok == "~":
            self.operand(bound)
        elif tok in ("!!", "??"):
            pass
        elif tok.startswith("$"):
            if tok not in _AMBIENT_TERMS:
                raise ThfError(f"unknown defined constant {tok!r}")
        elif tok[0].isupper():
            if tok not in bound:
                raise ThfError(f"unbound variable {tok!r}")
        elif tok[0].islower():
            if tok not in self.declared:
                raise ThfError(f"symbol {tok!r} used before declaration")
        else:
            raise ThfError(f"unexpected token {tok!r} in term")


def check_document(
    doc: ThfDocument,
    include_documents: dict[str, ThfDocument] | None = None,
) -> None:
    """Raise ThfError if the rendered document is not well-formed.

    Includes are resolved through ``include_documents``; by default the
    axiom file resolves to :func:`emit_axioms`.
    """
    declared: set[str] = set()
    if doc.includes:
        if include_documents is None:
            include_documents = {AXIOMS_FILENAME: emit_axioms()}
        for inc in doc.includes:
            if inc not in include_documents:
                raise ThfError(f"cannot resolve include {inc!r}")
            included = include_documents[inc]
            checker = _Checker(thf_tokens(included.rendered), set())
            checker.run()
            declared |= checker.declared
    checker = _Checker(thf_tokens(doc.rendered), declared)
    checker.run()

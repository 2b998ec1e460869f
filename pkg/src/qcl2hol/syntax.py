"""Abstract syntax, parser and printer for quantified conditional logic.

The primitive connectives are negation, disjunction, the conditional
arrow ``=>`` and the two universal quantifiers (over individuals and
over propositions).  Conjunction, material implication, equivalence,
the existential quantifiers and the constants ``true``/``false`` are
surface sugar; :func:`desugar` rewrites all of them except the two
constants into the primitive set.

Surface grammar (decreasing binding strength):

    ~ φ            negation
    φ & ψ          conjunction (sugar, right associative)
    φ | ψ          disjunction (right associative)
    φ => ψ         conditional (non-associative: nesting needs parentheses)
    φ -> ψ         material implication (sugar, right associative)
    φ <-> ψ        equivalence (sugar, right associative)

Quantifiers ``forall X.``/``exists X.`` bind individual variables
(uppercase identifiers), ``forallp p.``/``existsp p.`` bind
propositional variables (lowercase).  A quantifier body extends as far
to the right as possible.  Predicate symbols and propositional
variables are lowercase identifiers; predicates are applied as
``k(X, Y)`` and must be declared in a :class:`Signature`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache


class QclSyntaxError(ValueError):
    """Raised on malformed input; carries a character offset."""

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class UnboundVariableError(ValueError):
    """Raised in strict mode when a formula has unregistered free variables."""


RESERVED_WORDS = frozenset(
    {"forall", "exists", "forallp", "existsp", "true", "false"}
)

# Identifiers reserved for the THF encoding; a signature may not declare them.
RESERVED_SYMBOLS = frozenset(
    {
        "f", "mu", "valid", "cnot", "cor", "ctrue", "cfalse", "ccond",
        "cand", "ccondequiv", "cimpl", "cequiv", "cforall_ind",
        "cforall_prop", "cexists_ind", "cexists_prop",
    }
)


# ---------------------------------------------------------------------------
# Formulas


@dataclass(frozen=True)
class QclFormula:
    """Base class for formula nodes."""


@dataclass(frozen=True)
class PropVar(QclFormula):
    name: str


@dataclass(frozen=True)
class Atom(QclFormula):
    pred: str
    args: tuple[str, ...]


@dataclass(frozen=True)
class Top(QclFormula):
    """The constant ``true``."""


@dataclass(frozen=True)
class Bottom(QclFormula):
    """The constant ``false``."""


@dataclass(frozen=True)
class Neg(QclFormula):
    body: QclFormula


@dataclass(frozen=True)
class Or(QclFormula):
    left: QclFormula
    right: QclFormula


@dataclass(frozen=True)
class CondImp(QclFormula):
    """The conditional ``antecedent => consequent``."""

    antecedent: QclFormula
    consequent: QclFormula


@dataclass(frozen=True)
class ForallInd(QclFormula):
    var: str
    body: QclFormula


@dataclass(frozen=True)
class ForallProp(QclFormula):
    var: str
    body: QclFormula


# Sugar nodes, eliminated by desugar().


@dataclass(frozen=True)
class And(QclFormula):
    left: QclFormula
    right: QclFormula


@dataclass(frozen=True)
class Implies(QclFormula):
    left: QclFormula
    right: QclFormula


@dataclass(frozen=True)
class Iff(QclFormula):
    left: QclFormula
    right: QclFormula


@dataclass(frozen=True)
class ExistsInd(QclFormula):
    var: str
    body: QclFormula


@dataclass(frozen=True)
class ExistsProp(QclFormula):
    var: str
    body: QclFormula


SUGAR_NODES = (And, Implies, Iff, ExistsInd, ExistsProp)


def is_primitive(formula: QclFormula) -> bool:
    """True if no sugar constructor occurs anywhere in the formula."""
    match formula:
        case PropVar() | Atom() | Top() | Bottom():
            return True
        case Neg(body):
            return is_primitive(body)
        case Or(left, right) | CondImp(left, right):
            return is_primitive(left) and is_primitive(right)
        case ForallInd(_, body) | ForallProp(_, body):
            return is_primitive(body)
        case _:
            return False


# ---------------------------------------------------------------------------
# Signature


@dataclass(frozen=True)
class Signature:
    """Predicate arities plus the registered free variables.

    The three name sets must be pairwise disjoint, arities non-negative,
    and none of the names may collide with a reserved surface keyword or
    a symbol of the THF encoding.
    """

    predicates: tuple[tuple[str, int], ...] = ()
    free_ind_vars: frozenset[str] = frozenset()
    free_prop_vars: frozenset[str] = frozenset()

    def __post_init__(self):
        names = [name for name, _ in self.predicates]
        if len(set(names)) != len(names):
            raise ValueError("duplicate predicate declaration")
        for name, arity in self.predicates:
            if arity < 0:
                raise ValueError(f"negative arity for predicate {name!r}")
            _check_symbol_name(name, kind="predicate", upper=False)
        for name in self.free_ind_vars:
            _check_symbol_name(name, kind="individual variable", upper=True)
        for name in self.free_prop_vars:
            _check_symbol_name(name, kind="propositional variable", upper=False)
        pred_set = set(names)
        if pred_set & self.free_prop_vars:
            raise ValueError("predicate and propositional variable names overlap")
        if pred_set & self.free_ind_vars or self.free_prop_vars & self.free_ind_vars:
            raise ValueError("individual variable names overlap with other symbols")

    @property
    def arities(self) -> dict[str, int]:
        return dict(self.predicates)

    @classmethod
    def make(
        cls,
        predicates: dict[str, int] | None = None,
        free_ind_vars=(),
        free_prop_vars=(),
    ) -> "Signature":
        return cls(
            predicates=tuple(sorted((predicates or {}).items())),
            free_ind_vars=frozenset(free_ind_vars),
            free_prop_vars=frozenset(free_prop_vars),
        )

    @classmethod
    def from_text(cls, text: str) -> "Signature":
        """Parse a signature file: one ``pred <name> <arity>`` per line."""
        predicates: dict[str, int] = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3 or parts[0] != "pred":
                raise ValueError(f"signature line {lineno}: expected 'pred <name> <arity>'")
            name, arity_text = parts[1], parts[2]
            if not arity_text.isdigit():
                raise ValueError(f"signature line {lineno}: arity must be a non-negative integer")
            if name in predicates:
                raise ValueError(f"signature line {lineno}: duplicate predicate {name!r}")
            predicates[name] = int(arity_text)
        return cls.make(predicates)


def _check_symbol_name(name: str, kind: str, upper: bool) -> None:
    pattern = r"[A-Z][A-Za-z0-9_]*" if upper else r"[a-z][A-Za-z0-9_]*"
    if not re.fullmatch(pattern, name):
        case = "uppercase" if upper else "lowercase"
        raise ValueError(f"{kind} {name!r} must be a {case} identifier")
    if name in RESERVED_WORDS:
        raise ValueError(f"{kind} {name!r} is a reserved word")
    if name in RESERVED_SYMBOLS:
        raise ValueError(f"{kind} {name!r} collides with a symbol of the THF encoding")


# ---------------------------------------------------------------------------
# Tokenizer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<op><->|->|=>|[~&|().,])
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # 'op', 'ident', 'keyword', 'end'
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise QclSyntaxError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup == "ident":
            word = m.group()
            kind = "keyword" if word in RESERVED_WORDS else "ident"
            tokens.append(_Token(kind, word, pos))
        elif m.lastgroup == "op":
            tokens.append(_Token("op", m.group(), pos))
        pos = m.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


# ---------------------------------------------------------------------------
# Parser (recursive descent, one level per precedence tier)


class _Parser:
    def __init__(self, tokens: list[_Token], sig: Signature):
        self.tokens = tokens
        self.index = 0
        self.arities = sig.arities

    def peek(self) -> _Token:
        return self.tokens[self.index]

    def advance(self) -> _Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def expect(self, text: str) -> _Token:
        token = self.peek()
        if token.text != text:
            raise QclSyntaxError(f"expected {text!r}, found {token.text or 'end of input'!r}", token.pos)
        return self.advance()

    def parse_formula(self) -> QclFormula:
        return self.parse_iff()

    def parse_iff(self) -> QclFormula:
        left = self.parse_implies()
        if self.peek().text == "<->":
            self.advance()
            return Iff(left, self.parse_iff())
        return left

    def parse_implies(self) -> QclFormula:
        left = self.parse_cond()
        if self.peek().text == "->":
            self.advance()
            return Implies(left, self.parse_implies())
        return left

    def parse_cond(self) -> QclFormula:
        left = self.parse_or()
        if self.peek().text == "=>":
            self.advance()
            right = self.parse_or()
            if self.peek().text == "=>":
                raise QclSyntaxError(
                    "'=>' is non-associative; parenthesize nested conditionals",
                    self.peek().pos,
                )
            return CondImp(left, right)
        return left

    def parse_or(self) -> QclFormula:
        left = self.parse_and()
        if self.peek().text == "|":
            self.advance()
            return Or(left, self.parse_or())
        return left

    def parse_and(self) -> QclFormula:
        left = self.parse_neg()
        if self.peek().text == "&":
            self.advance()
            return And(left, self.parse_and())
        return left

    def parse_neg(self) -> QclFormula:
        if self.peek().text == "~":
            self.advance()
            return Neg(self.parse_neg())
        return self.parse_atom()

    def parse_atom(self) -> QclFormula:
        token = self.peek()
        if token.text == "(":
            self.advance()
            inner = self.parse_formula()
            self.expect(")")
            return inner
        if token.kind == "keyword":
            return self.parse_keyword()
        if token.kind == "ident":
            return self.parse_identifier()
        raise QclSyntaxError(
            f"expected a formula, found {token.text or 'end of input'!r}", token.pos
        )

    def parse_keyword(self) -> QclFormula:
        token = self.advance()
        if token.text == "true":
            return Top()
        if token.text == "false":
            return Bottom()
        quantifiers = {
            "forall": (ForallInd, True),
            "exists": (ExistsInd, True),
            "forallp": (ForallProp, False),
            "existsp": (ExistsProp, False),
        }
        node, wants_upper = quantifiers[token.text]
        var = self.peek()
        if var.kind != "ident":
            raise QclSyntaxError(f"expected a variable after {token.text!r}", var.pos)
        if wants_upper and not var.text[0].isupper():
            raise QclSyntaxError(
                f"{token.text!r} binds an individual variable (uppercase), found {var.text!r}",
                var.pos,
            )
        if not wants_upper and not var.text[0].islower():
            raise QclSyntaxError(
                f"{token.text!r} binds a propositional variable (lowercase), found {var.text!r}",
                var.pos,
            )
        if not wants_upper and var.text in self.arities:
            raise QclSyntaxError(
                f"cannot bind {var.text!r}: it is declared as a predicate", var.pos
            )
        self.advance()
        self.expect(".")
        return node(var.text, self.parse_formula())

    def parse_identifier(self) -> QclFormula:
        token = self.advance()
        name = token.text
        if name[0].isupper():
            raise QclSyntaxError(
                f"individual variable {name!r} cannot stand alone as a formula", token.pos
            )
        if self.peek().text == "(":
            if name not in self.arities:
                raise QclSyntaxError(f"undeclared predicate {name!r}", token.pos)
            self.advance()
            args = self.parse_args(name)
            expected = self.arities[name]
            if len(args) != expected:
                raise QclSyntaxError(
                    f"predicate {name!r} expects {expected} argument(s), got {len(args)}",
                    token.pos,
                )
            return Atom(name, args)
        if name in self.arities:
            if self.arities[name] != 0:
                raise QclSyntaxError(
                    f"predicate {name!r} expects {self.arities[name]} argument(s), got 0",
                    token.pos,
                )
            return Atom(name, ())
        return PropVar(name)

    def parse_args(self, pred: str) -> tuple[str, ...]:
        args: list[str] = []
        if self.peek().text == ")":
            self.advance()
            return ()
        while True:
            token = self.peek()
            if token.kind != "ident" or not token.text[0].isupper():
                raise QclSyntaxError(
                    f"argument of {pred!r} must be an individual variable (uppercase)",
                    token.pos,
                )
            args.append(self.advance().text)
            if self.peek().text == ",":
                self.advance()
                continue
            self.expect(")")
            return tuple(args)


def parse_qcl(
    text: str,
    sig: Signature | None = None,
    *,
    keep_sugar: bool = False,
    strict: bool = False,
) -> QclFormula:
    """Parse surface text into an AST.

    The result is fully desugared unless ``keep_sugar`` is set.  With
    ``strict`` the formula's free variables must all be registered in
    the signature.
    """
    sig = sig or Signature()
    parser = _Parser(_tokenize(text), sig)
    formula = parser.parse_formula()
    trailing = parser.peek()
    if trailing.kind != "end":
        raise QclSyntaxError(f"unexpected trailing input {trailing.text!r}", trailing.pos)
    if strict:
        ind, prop = free_vars(formula)
        bad_ind = ind - sig.free_ind_vars
        bad_prop = prop - sig.free_prop_vars
        if bad_ind or bad_prop:
            names = ", ".join(sorted(bad_ind | bad_prop))
            raise UnboundVariableError(f"unregistered free variable(s): {names}")
    return formula if keep_sugar else desugar(formula)


# ---------------------------------------------------------------------------
# Desugaring


def desugar(formula: QclFormula) -> QclFormula:
    """Rewrite sugar into the primitive connective set.

    Conjunction, implication and equivalence become combinations of
    negation and disjunction; existentials become negated universals.
    Idempotent, and preserves the free variables exactly.
    """
    match formula:
        case PropVar() | Atom() | Top() | Bottom():
            return formula
        case Neg(body):
            return Neg(desugar(body))
        case Or(left, right):
            return Or(desugar(left), desugar(right))
        case CondImp(antecedent, consequent):
            return CondImp(desugar(antecedent), desugar(consequent))
        case ForallInd(var, body):
            return ForallInd(var, desugar(body))
        case ForallProp(var, body):
            return ForallProp(var, desugar(body))
        case And(left, right):
            return Neg(Or(Neg(desugar(left)), Neg(desugar(right))))
        case Implies(left, right):
            return Or(Neg(desugar(left)), desugar(right))
        case Iff(left, right):
            return desugar(And(Implies(left, right), Implies(right, left)))
        case ExistsInd(var, body):
            return Neg(ForallInd(var, Neg(desugar(body))))
        case ExistsProp(var, body):
            return Neg(ForallProp(var, Neg(desugar(body))))
        case _:
            raise TypeError(f"not a formula node: {formula!r}")


# ---------------------------------------------------------------------------
# Free variables


@lru_cache(maxsize=65536)
def free_vars(formula: QclFormula) -> tuple[frozenset[str], frozenset[str]]:
    """Free (individual, propositional) variables of a formula."""
    match formula:
        case PropVar(name):
            return frozenset(), frozenset({name})
        case Atom(_, args):
            return frozenset(args), frozenset()
        case Top() | Bottom():
            return frozenset(), frozenset()
        case Neg(body):
            return free_vars(body)
        case Or(l, r) | CondImp(l, r) | And(l, r) | Implies(l, r) | Iff(l, r):
            li, lp = free_vars(l)
            ri, rp = free_vars(r)
            return li | ri, lp | rp
        case ForallInd(var, body) | ExistsInd(var, body):
            ind, prop = free_vars(body)
            return ind - {var}, prop
        case ForallProp(var, body) | ExistsProp(var, body):
            ind, prop = free_vars(body)
            return ind, prop - {var}
        case _:
            raise TypeError(f"not a formula node: {formula!r}")


def predicates_of(formula: QclFormula) -> dict[str, int]:
    """Predicate symbols occurring in the formula, with their arities."""
    found: dict[str, int] = {}

    def walk(node: QclFormula) -> None:
        match node:
            case Atom(pred, args):
                seen = found.setdefault(pred, len(args))
                if seen != len(args):
                    raise ValueError(f"predicate {pred!r} used with arities {seen} and {len(args)}")
            case Neg(body) | ForallInd(_, body) | ForallProp(_, body) | ExistsInd(_, body) | ExistsProp(_, body):
                walk(body)
            case Or(l, r) | CondImp(l, r) | And(l, r) | Implies(l, r) | Iff(l, r):
                walk(l)
                walk(r)
            case _:
                pass

    walk(formula)
    return found


# ---------------------------------------------------------------------------
# Pretty printer

# Binding strength; quantifiers are weakest since their body runs to the end.
_PREC = {
    Iff: 1,
    Implies: 2,
    CondImp: 3,
    Or: 4,
    And: 5,
    Neg: 6,
}
_ATOM_PREC = 7
_QUANT_PREC = 0

_QUANT_WORD = {
    ForallInd: "forall",
    ExistsInd: "exists",
    ForallProp: "forallp",
    ExistsProp: "existsp",
}


def _prec(formula: QclFormula) -> int:
    return _PREC.get(type(formula), _QUANT_PREC if type(formula) in _QUANT_WORD else _ATOM_PREC)


def pretty_qcl(formula: QclFormula) -> str:
    """Render with minimal parentheses; re-parsing yields an equal AST."""
    return _pretty(formula, 0, tail=True)


def _pretty(formula: QclFormula, min_prec: int, tail: bool) -> str:
    match formula:
        case PropVar(name):
            return name
        case Atom(pred, args):
            return pred if not args else f"{pred}({', '.join(args)})"
        case Top():
            return "true"
        case Bottom():
            return "false"
        case Neg(body):
            # Tightest operator level, so never needs parentheses itself.
            return "~" + _pretty(body, _PREC[Neg], tail)
        case And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r):
            op = {And: "&", Or: "|", Implies: "->", Iff: "<->"}[type(formula)]
            prec = _PREC[type(formula)]
            wrap = prec < min_prec
            left = _pretty(l, prec + 1, tail=False)
            # Right associative: the right child may sit at the same level.
            right = _pretty(r, prec, tail=tail or wrap)
            text = f"{left} {op} {right}"
            return f"({text})" if wrap else text
        case CondImp(a, c):
            prec = _PREC[CondImp]
            wrap = prec < min_prec
            left = _pretty(a, prec + 1, tail=False)
            right = _pretty(c, prec + 1, tail=tail or wrap)
            text = f"{left} => {right}"
            return f"({text})" if wrap else text
        case ForallInd(var, body) | ForallProp(var, body) | ExistsInd(var, body) | ExistsProp(var, body):
            text = f"{_QUANT_WORD[type(formula)]} {var}. {_pretty(body, 0, tail=True)}"
            # The body runs to the end of the input, so a quantifier is
            # bare only when nothing follows it in the enclosing group.
            return text if tail else f"({text})"
        case _:
            raise TypeError(f"not a formula node: {formula!r}")

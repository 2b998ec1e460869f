"""Finite selection-function models and brute-force validity checking.

Worlds are the integers 0..n-1 and sets of worlds are integer bitmasks,
so the selection function is a table ``selection[world][mask] -> mask``
defined on every subset of the world set.  The propositional domain Q
is a list of masks; assignments send propositional variables into Q and
individual variables into 0..|D|-1.

Two evaluation routes are provided on purpose: :func:`eval_qcl` follows
the satisfaction clauses world by world, while :func:`proof_set`
computes the world set of a formula directly by structural recursion on
bitmasks.  They are cross-checked in the test suite; validity checking
uses the proof-set route, the correspondence checker uses the
world-by-world route.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator

from . import syntax
from .syntax import (
    Atom,
    Bottom,
    CondImp,
    ForallInd,
    ForallProp,
    Neg,
    Or,
    PropVar,
    QclFormula,
    Top,
)


class QclEvalError(ValueError):
    """Unbound variable, unknown world or malformed assignment."""


class ResourceLimitError(RuntimeError):
    """Enumeration would exceed the configured resource limit."""


def full_mask(num_worlds: int) -> int:
    return (1 << num_worlds) - 1


def bits(mask: int) -> Iterator[int]:
    world = 0
    while mask:
        if mask & 1:
            yield world
        mask >>= 1
        world += 1


def mask_of(worlds: Iterable[int]) -> int:
    result = 0
    for w in worlds:
        result |= 1 << w
    return result


# ---------------------------------------------------------------------------
# Models and assignments


@dataclass(frozen=True)
class SelectionModel:
    """Finite structure: worlds, selection table, individuals, propositional
    domain and predicate interpretation."""

    num_worlds: int
    num_individuals: int
    prop_domain: tuple[int, ...]
    selection: tuple[tuple[int, ...], ...]
    interp: tuple[tuple[str, int, tuple[frozenset[tuple[int, ...]], ...]], ...] = ()

    def __post_init__(self):
        if self.num_worlds < 0:
            raise ValueError("negative world count")
        if self.num_individuals < 1:
            raise ValueError("the individual domain must be non-empty")
        full = full_mask(self.num_worlds)
        if not self.prop_domain:
            raise ValueError("the propositional domain must be non-empty")
        if any(q < 0 or q > full for q in self.prop_domain):
            raise ValueError("propositional domain contains a non-subset mask")
        if len(self.selection) != self.num_worlds:
            raise ValueError("selection table must have one row per world")
        for row in self.selection:
            if len(row) != full + 1:
                raise ValueError("selection row must cover every subset of the worlds")
            if any(m < 0 or m > full for m in row):
                raise ValueError("selection value is not a subset of the worlds")
        for name, arity, rows in self.interp:
            if arity < 0:
                raise ValueError(f"negative arity for {name!r}")
            if len(rows) != self.num_worlds:
                raise ValueError(f"interpretation of {name!r} must have one row per world")
            for row in rows:
                for tup in row:
                    if len(tup) != arity or any(
                        d < 0 or d >= self.num_individuals for d in tup
                    ):
                        raise ValueError(f"bad tuple {tup} in interpretation of {name!r}")
        object.__setattr__(
            self, "_pred_rows", {name: rows for name, _, rows in self.interp}
        )
        object.__setattr__(self, "_full", full)

    @property
    def worlds(self) -> range:
        return range(self.num_worlds)

    @property
    def individuals(self) -> range:
        return range(self.num_individuals)

    @property
    def full(self) -> int:
        return self._full

    def select(self, world: int, mask: int) -> int:
        return self.selection[world][mask]

    def pred_table(self, name: str) -> tuple[frozenset[tuple[int, ...]], ...]:
        try:
            return self._pred_rows[name]
        except KeyError:
            raise QclEvalError(f"predicate {name!r} is not interpreted in this model") from None

    def predicate_arities(self) -> dict[str, int]:
        return {name: arity for name, arity, _ in self.interp}


@dataclass
class QclAssignment:
    """Maps individual variables into D and propositional variables into Q."""

    ind: dict[str, int] = field(default_factory=dict)
    prop: dict[str, int] = field(default_factory=dict)

    def with_ind(self, var: str, value: int) -> "QclAssignment":
        updated = dict(self.ind)
        updated[var] = value
        return QclAssignment(updated, self.prop)

    def with_prop(self, var: str, value: int) -> "QclAssignment":
        updated = dict(self.prop)
        updated[var] = value
        return QclAssignment(self.ind, updated)

    def check_against(self, model: SelectionModel) -> None:
        for var, value in self.ind.items():
            if not 0 <= value < model.num_individuals:
                raise QclEvalError(f"assignment sends {var!r} outside the individual domain")
        domain = set(model.prop_domain)
        for var, value in self.prop.items():
            if value not in domain:
                raise QclEvalError(
                    f"assignment sends {var!r} to a set outside the propositional domain"
                )


def assignments_for(
    model: SelectionModel,
    ind_vars: Iterable[str],
    prop_vars: Iterable[str],
) -> Iterator[QclAssignment]:
    """Every assignment of the given variables, in deterministic order."""
    ind_names = sorted(ind_vars)
    prop_names = sorted(prop_vars)
    for ind_values in itertools.product(model.individuals, repeat=len(ind_names)):
        ind = dict(zip(ind_names, ind_values))
        for prop_values in itertools.product(model.prop_domain, repeat=len(prop_names)):
            yield QclAssignment(ind, dict(zip(prop_names, prop_values)))


def assignments_for_formula(model: SelectionModel, formula: QclFormula) -> Iterator[QclAssignment]:
    ind, prop = syntax.free_vars(formula)
    return assignments_for(model, ind, prop)


# ---------------------------------------------------------------------------
# Satisfaction, world by world


def eval_qcl(model: SelectionModel, g: QclAssignment, world: int, formula: QclFormula) -> bool:
    """The satisfaction relation at a single world.

    The conditional holds at s when the consequent holds at every world
    selected for (s, antecedent's world set).
    """
    if not 0 <= world < model.num_worlds:
        raise QclEvalError(f"world {world} is not in the model")
    return _eval(model, dict(g.ind), dict(g.prop), world, formula)


def _eval(model, ind, prop, world, formula) -> bool:
    match formula:
        case PropVar(name):
            if name not in prop:
                raise QclEvalError(f"unbound propositional variable {name!r}")
            return bool(prop[name] >> world & 1)
        case Atom(pred, args):
            try:
                values = tuple(ind[a] for a in args)
            except KeyError as exc:
                raise QclEvalError(f"unbound individual variable {exc.args[0]!r}") from None
            return values in model.pred_table(pred)[world]
        case Top():
            return True
        case Bottom():
            return False
        case Neg(body):
            return not _eval(model, ind, prop, world, body)
        case Or(left, right):
            return _eval(model, ind, prop, world, left) or _eval(model, ind, prop, world, right)
        case CondImp(antecedent, consequent):
            antecedent_worlds = 0
            for u in model.worlds:
                if _eval(model, ind, prop, u, antecedent):
                    antecedent_worlds |= 1 << u
            selected = model.select(world, antecedent_worlds)
            for t in bits(selected):
                if not _eval(model, ind, prop, t, consequent):
                    return False
            return True
        case ForallInd(var, body):
            saved = ind.get(var)
            had = var in ind
            try:
                for d in model.individuals:
                    ind[var] = d
                    if not _eval(model, ind, prop, world, body):
                        return False
                return True
            finally:
                if had:
                    ind[var] = saved
                else:
                    ind.pop(var, None)
        case ForallProp(var, body):
            saved = prop.get(var)
            had = var in prop
            try:
                for q in model.prop_domain:
                    prop[var] = q
                    if not _eval(model, ind, prop, world, body):
                        return False
                return True
            finally:
                if had:
                    prop[var] = saved
                else:
                    prop.pop(var, None)
        case _:
            raise ValueError(f"formula is not in primitive form: {formula!r}")


# ---------------------------------------------------------------------------
# Proof sets, computed structurally on bitmasks


def proof_set(model: SelectionModel, g: QclAssignment, formula: QclFormula) -> int:
    """Bitmask of the worlds satisfying the formula under the assignment."""
    return _proof_set_fn(formula)(model, dict(g.ind), dict(g.prop))


@lru_cache(maxsize=65536)
def _proof_set_fn(formula: QclFormula):
    """Stage the structural recursion once per formula; the resulting
    closure takes (model, ind, prop) and returns the world bitmask."""
    match formula:
        case PropVar(name):
            def prop_var(model, ind, prop):
                try:
                    return prop[name]
                except KeyError:
                    raise QclEvalError(
                        f"unbound propositional variable {name!r}"
                    ) from None
            return prop_var
        case Atom(pred, args):
            def atom(model, ind, prop):
                try:
                    values = tuple(ind[a] for a in args)
                except KeyError as exc:
                    raise QclEvalError(
                        f"unbound individual variable {exc.args[0]!r}"
                    ) from None
                rows = model.pred_table(pred)
                result = 0
                for w in range(model.num_worlds):
                    if values in rows[w]:
                        result |= 1 << w
                return result
            return atom
        case Top():
            return lambda model, ind, prop: model.full
        case Bottom():
            return lambda model, ind, prop: 0
        case Neg(body):
            body_fn = _proof_set_fn(body)
            return lambda model, ind, prop: model.full & ~body_fn(model, ind, prop)
        case Or(left, right):
            left_fn, right_fn = _proof_set_fn(left), _proof_set_fn(right)
            return lambda model, ind, prop: left_fn(model, ind, prop) | right_fn(
                model, ind, prop
            )
        case CondImp(antecedent, consequent):
            ante_fn, cons_fn = _proof_set_fn(antecedent), _proof_set_fn(consequent)

            def conditional(model, ind, prop):
                ante = ante_fn(model, ind, prop)
                outside = ~cons_fn(model, ind, prop)
                selection = model.selection
                result = 0
                for s in range(model.num_worlds):
                    if selection[s][ante] & outside == 0:
                        result |= 1 << s
                return result

            return conditional
        case ForallInd(var, body):
            body_fn = _proof_set_fn(body)

            def forall_ind(model, ind, prop):
                saved = ind.get(var)
                had = var in ind
                try:
                    result = model.full
                    for d in range(model.num_individuals):
                        ind[var] = d
                        result &= body_fn(model, ind, prop)
                        if not result:
                            break
                    return result
                finally:
                    if had:
                        ind[var] = saved
                    else:
                        ind.pop(var, None)

            return forall_ind
        case ForallProp(var, body):
            body_fn = _proof_set_fn(body)

            def forall_prop(model, ind, prop):
                saved = prop.get(var)
                had = var in prop
                try:
                    result = model.full
                    for q in model.prop_domain:
                        prop[var] = q
                        result &= body_fn(model, ind, prop)
                        if not result:
                            break
                    return result
                finally:
                    if had:
                        prop[var] = saved
                    else:
                        prop.pop(var, None)

            return forall_prop
        case _:
            raise ValueError(f"formula is not in primitive form: {formula!r}")


# ---------------------------------------------------------------------------
# Validity


def model_valid(model: SelectionModel, formula: QclFormula) -> bool:
    """True when the formula holds at every world under every assignment
    of its free variables."""
    compiled = _proof_set_fn(formula)
    full = model.full
    for g in assignments_for_formula(model, formula):
        if compiled(model, g.ind, g.prop) != full:
            return False
    return True


def find_countermodel_point(
    model: SelectionModel, formula: QclFormula
) -> tuple[QclAssignment, int] | None:
    """First (assignment, world) where the formula fails, if any."""
    for g in assignments_for_formula(model, formula):
        mask = proof_set(model, g, formula)
        if mask != model.full:
            world = next(w for w in model.worlds if not mask >> w & 1)
            return g, world
    return None


@dataclass(frozen=True)
class Bounds:
    """Enumeration bounds for brute-force validity checking."""

    max_worlds: int
    max_individuals: int = 1
    q_mode: str = "powerset"
    q_sets: tuple[int, ...] | None = None
    allow_empty_worlds: bool = False

    def __post_init__(self):
        if self.max_worlds < (0 if self.allow_empty_worlds else 1):
            raise ValueError("max_worlds must be at least 1 (or 0 with allow_empty_worlds)")
        if self.max_individuals < 1:
            raise ValueError("max_individuals must be at least 1")
        if self.q_mode not in ("powerset", "file"):
            raise ValueError(f"unknown q_mode {self.q_mode!r}")
        if self.q_mode == "file" and self.q_sets is None:
            raise ValueError("q_mode 'file' needs explicit q_sets")


@dataclass(frozen=True)
class Countermodel:
    model: SelectionModel
    assignment: QclAssignment
    world: int


@dataclass(frozen=True)
class ValidWithinBounds:
    models_checked: int


ValidityResult = Countermodel | ValidWithinBounds


def _subsets(items: tuple) -> list[frozenset]:
    out = []
    for r in range(len(items) + 1):
        out.extend(frozenset(c) for c in itertools.combinations(items, r))
    return out


def enumerate_models(
    bounds: Bounds,
    predicates: dict[str, int] | None = None,
) -> Iterator[SelectionModel]:
    """All models within the bounds, in a fixed duplicate-free order.

    Worlds ascend first, then individuals; for each size the selection
    tables enumerate lexicographically, then the predicate tables.  With
    the default powerset propositional domain every structure satisfies
    the closed-proof-set model condition outright; an explicit domain is
    emitted as-is and can be vetted with :func:`check_model_property`.
    """
    predicates = dict(sorted((predicates or {}).items()))
    low = 0 if bounds.allow_empty_worlds else 1
    for num_worlds in range(low, bounds.max_worlds + 1):
        masks = tuple(range(full_mask(num_worlds) + 1))
        if bounds.q_mode == "powerset":
            prop_domain = masks
        else:
            prop_domain = tuple(sorted(set(bounds.q_sets)))
            if any(q > full_mask(num_worlds) for q in prop_domain):
                raise ValueError(
                    f"propositional domain mask exceeds the world set for |S|={num_worlds}"
                )
        for num_individuals in range(1, bounds.max_individuals + 1):
            tuple_pools = {
                arity: tuple(itertools.product(range(num_individuals), repeat=arity))
                for arity in set(predicates.values())
            }
            cell_choices = [
                _subsets(tuple_pools[arity])
                for _, arity in sorted(predicates.items())
                for _ in range(num_worlds)
            ]
            for flat_selection in itertools.product(masks, repeat=num_worlds * len(masks)):
                selection = tuple(
                    flat_selection[s * len(masks) : (s + 1) * len(masks)]
                    for s in range(num_worlds)
                )
                for cells in itertools.product(*cell_choices):
                    interp = []
                    offset = 0
                    for name, arity in sorted(predicates.items()):
                        rows = tuple(cells[offset : offset + num_worlds])
                        interp.append((name, arity, rows))
                        offset += num_worlds
                    yield SelectionModel(
                        num_worlds=num_worlds,
                        num_individuals=num_individuals,
                        prop_domain=prop_domain,
                        selection=selection,
                        interp=tuple(interp),
                    )


def count_models(bounds: Bounds, predicates: dict[str, int] | None = None) -> int:
    """Exact number of models the enumeration will produce."""
    predicates = predicates or {}
    low = 0 if bounds.allow_empty_worlds else 1
    total = 0
    for num_worlds in range(low, bounds.max_worlds + 1):
        num_masks = full_mask(num_worlds) + 1
        selections = num_masks ** (num_worlds * num_masks)
        for num_individuals in range(1, bounds.max_individuals + 1):
            interps = 1
            for arity in predicates.values():
                interps *= (2 ** (num_individuals**arity)) ** num_worlds
            total += selections * interps
    return total


DEFAULT_MODEL_LIMIT = 20_000_000


def valid_up_to(
    formula: QclFormula,
    bounds: Bounds,
    predicates: dict[str, int] | None = None,
    *,
    model_limit: int | None = DEFAULT_MODEL_LIMIT,
) -> ValidityResult:
    """Search every model within bounds; first countermodel wins.

    The formula must be primitive (desugar first).  Only the predicates
    appearing in the formula need to be interpreted, so by default the
    enumeration uses exactly those.
    """
    if not syntax.is_primitive(formula):
        raise ValueError("valid_up_to needs a primitive formula; desugar first")
    if predicates is None:
        predicates = syntax.predicates_of(formula)
    if model_limit is not None:
        total = count_models(bounds, predicates)
        if total > model_limit:
            raise ResourceLimitError(
                f"enumeration would visit {total} models (limit {model_limit})"
            )
    checked = 0
    for model in enumerate_models(bounds, predicates):
        point = find_countermodel_point(model, formula)
        if point is not None:
            g, world = point
            return Countermodel(model, g, world)
        checked += 1
    return ValidWithinBounds(checked)


# ---------------------------------------------------------------------------
# Model condition and rule schemata


def check_model_property(
    model: SelectionModel,
    corpus: Iterable[QclFormula],
    assignments: Iterable[QclAssignment] | None = None,
) -> bool:
    """True when every corpus formula's proof set lies in the
    propositional domain, under every assignment considered."""
    domain = set(model.prop_domain)
    for formula in corpus:
        pool = (
            list(assignments)
            if assignments is not None
            else list(assignments_for_formula(model, formula))
        )
        for g in pool:
            if proof_set(model, g, formula) not in domain:
                return False
    return True


@dataclass(frozen=True)
class RuleInstance:
    """An instance of one of the rule schemata.

    RCEA and RCEC take (first, second, side); RCK takes the conditional
    antecedent, then one to three premise conjuncts, then the target.
    """

    rule: str
    formulas: tuple[QclFormula, ...]

    def __post_init__(self):
        if self.rule in ("RCEA", "RCEC"):
            if len(self.formulas) != 3:
                raise ValueError(f"{self.rule} takes exactly three formulas")
        elif self.rule == "RCK":
            if not 3 <= len(self.formulas) <= 5:
                raise ValueError("RCK takes an antecedent, 1..3 conjuncts and a target")
        else:
            raise ValueError(f"unknown rule {self.rule!r}")

    def premise(self) -> QclFormula:
        if self.rule in ("RCEA", "RCEC"):
            first, second, _ = self.formulas
            return syntax.desugar(syntax.Iff(first, second))
        conjuncts = self.formulas[1:-1]
        target = self.formulas[-1]
        return syntax.desugar(syntax.Iff(_and_chain(conjuncts), target))

    def conclusion(self) -> QclFormula:
        if self.rule == "RCEA":
            first, second, side = self.formulas
            return syntax.desugar(syntax.Iff(CondImp(first, side), CondImp(second, side)))
        if self.rule == "RCEC":
            first, second, side = self.formulas
            return syntax.desugar(syntax.Iff(CondImp(side, first), CondImp(side, second)))
        antecedent = self.formulas[0]
        conjuncts = self.formulas[1:-1]
        target = self.formulas[-1]
        lifted = _and_chain(tuple(CondImp(antecedent, c) for c in conjuncts))
        return syntax.desugar(syntax.Implies(lifted, CondImp(antecedent, target)))


def _and_chain(formulas: tuple[QclFormula, ...]) -> QclFormula:
    result = formulas[-1]
    for f in reversed(formulas[:-1]):
        result = syntax.And(f, result)
    return result


@dataclass(frozen=True)
class RuleCheck:
    rule: str
    index: int
    premise_valid: bool
    conclusion_valid: bool

    @property
    def holds(self) -> bool:
        return not self.premise_valid or self.conclusion_valid


def check_rule_schemata(
    model: SelectionModel, instances: Iterable[RuleInstance]
) -> list[RuleCheck]:
    """For each instance: if the premise is valid in the model, the
    conclusion must be too."""
    report = []
    for index, instance in enumerate(instances):
        premise_valid = model_valid(model, instance.premise())
        conclusion_valid = (
            model_valid(model, instance.conclusion()) if premise_valid else False
        )
        report.append(RuleCheck(instance.rule, index, premise_valid, conclusion_valid))
    return report


# ---------------------------------------------------------------------------
# Serialization


def serialize_model(model: SelectionModel) -> str:
    """Plain-text form with a fixed field order, for reports and goldens."""
    lines = [
        f"worlds {model.num_worlds}",
        f"individuals {model.num_individuals}",
        "Q " + " ".join(str(q) for q in model.prop_domain),
    ]
    for name, arity, _ in model.interp:
        lines.append(f"pred {name} {arity}")
    for s in model.worlds:
        for mask in range(model.full + 1):
            lines.append(f"f({s}, {mask}) = {model.selection[s][mask]}")
    for name, _, rows in model.interp:
        for s in model.worlds:
            cells = " ".join(
                "(" + ",".join(str(d) for d in tup) + ")" for tup in sorted(rows[s])
            )
            lines.append(f"{name}@{s} = {cells}".rstrip())
    return "\n".join(lines) + "\n"


def parse_model(text: str) -> SelectionModel:
    """Inverse of :func:`serialize_model`."""
    num_worlds = num_individuals = None
    prop_domain: tuple[int, ...] = ()
    selection_cells: dict[tuple[int, int], int] = {}
    interp_cells: dict[str, dict[int, set[tuple[int, ...]]]] = {}
    arities: dict[str, int] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("worlds "):
            num_worlds = int(line.split()[1])
        elif line.startswith("individuals "):
            num_individuals = int(line.split()[1])
        elif line.startswith("Q"):
            prop_domain = tuple(int(tok) for tok in line.split()[1:])
        elif line.startswith("pred "):
            _, name, arity_text = line.split()
            arities[name] = int(arity_text)
            interp_cells.setdefault(name, {})
        elif line.startswith("f("):
            head, value = line.split("=")
            inner = head.strip()[2:-1]
            s_text, mask_text = inner.split(",")
            selection_cells[(int(s_text), int(mask_text))] = int(value)
        else:
            head, _, rest = line.partition("=")
            name, _, world_text = head.strip().partition("@")
            world = int(world_text)
            tuples = set()
            arity = None
            for chunk in rest.split():
                values = tuple(int(v) for v in chunk.strip("()").split(",") if v != "")
                tuples.add(values)
                arity = len(values)
            cells = interp_cells.setdefault(name, {})
            cells[world] = tuples
            if arity is not None:
                arities[name] = arity
    if num_worlds is None or num_individuals is None:
        raise ValueError("model text is missing the worlds or individuals line")
    selection = tuple(
        tuple(selection_cells[(s, m)] for m in range(full_mask(num_worlds) + 1))
        for s in range(num_worlds)
    )
    interp = []
    for name in sorted(interp_cells):
        rows = tuple(
            frozenset(interp_cells[name].get(s, set())) for s in range(num_worlds)
        )
        arity = arities.get(name, 0)
        interp.append((name, arity, rows))
    return SelectionModel(
        num_worlds=num_worlds,
        num_individuals=num_individuals,
        prop_domain=prop_domain,
        selection=selection,
        interp=tuple(interp),
    )

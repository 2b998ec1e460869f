import itertools
import random

import pytest

import helpers
from qcl2hol import corpus, syntax
from qcl2hol.semantics import (
    Bounds,
    Countermodel,
    QclAssignment,
    QclEvalError,
    ResourceLimitError,
    RuleInstance,
    SelectionModel,
    ValidWithinBounds,
    assignments_for_formula,
    check_model_property,
    check_rule_schemata,
    count_models,
    enumerate_models,
    eval_qcl,
    find_countermodel_point,
    full_mask,
    model_valid,
    parse_model,
    proof_set,
    serialize_model,
    valid_up_to,
)
from qcl2hol.syntax import (
    Atom,
    CondImp,
    ForallInd,
    ForallProp,
    Neg,
    Or,
    PropVar,
    parse_qcl,
)

SIG = syntax.Signature.make({"b": 1})


def make_model(num_worlds, selection_fn, num_individuals=1, q=None, interp=()):
    full = full_mask(num_worlds)
    selection = tuple(
        tuple(selection_fn(s, m) for m in range(full + 1)) for s in range(num_worlds)
    )
    return SelectionModel(
        num_worlds=num_worlds,
        num_individuals=num_individuals,
        prop_domain=q if q is not None else tuple(range(full + 1)),
        selection=selection,
        interp=interp,
    )


ONE_WORLD = make_model(1, lambda s, m: 0)
IDENTITY2 = make_model(2, lambda s, m: m)


# ---------------------------------------------------------------------------
# Satisfaction


def test_propositional_variable_is_membership():
    g = QclAssignment(prop={"p": 1})
    assert eval_qcl(ONE_WORLD, g, 0, PropVar("p"))
    g = QclAssignment(prop={"p": 0})
    assert not eval_qcl(ONE_WORLD, g, 0, PropVar("p"))


def test_conditional_with_empty_selection_is_vacuously_true():
    g = QclAssignment(prop={"p": 1, "q": 0})
    assert eval_qcl(ONE_WORLD, g, 0, CondImp(PropVar("p"), PropVar("q")))


def test_reflexive_conditional_under_identity_selection():
    formula = CondImp(PropVar("p"), PropVar("p"))
    for mask in IDENTITY2.prop_domain:
        g = QclAssignment(prop={"p": mask})
        for world in IDENTITY2.worlds:
            assert eval_qcl(IDENTITY2, g, world, formula)


def test_atom_clause_reads_interpretation_at_current_world():
    model = make_model(
        2,
        lambda s, m: 0,
        num_individuals=2,
        interp=(("b", 1, (frozenset({(0,)}), frozenset({(1,)}))),),
    )
    g = QclAssignment(ind={"X": 0})
    assert eval_qcl(model, g, 0, Atom("b", ("X",)))
    assert not eval_qcl(model, g, 1, Atom("b", ("X",)))


def test_quantifier_clauses():
    model = make_model(
        1,
        lambda s, m: 0,
        num_individuals=2,
        interp=(("b", 1, (frozenset({(0,)}),)),),
    )
    assert not eval_qcl(model, QclAssignment(), 0, ForallInd("X", Atom("b", ("X",))))
    assert eval_qcl(
        model, QclAssignment(), 0, ForallProp("p", Or(PropVar("p"), Neg(PropVar("p"))))
    )


def test_eval_errors():
    with pytest.raises(QclEvalError, match="world"):
        eval_qcl(ONE_WORLD, QclAssignment(), 3, PropVar("p"))
    with pytest.raises(QclEvalError, match="unbound"):
        eval_qcl(ONE_WORLD, QclAssignment(), 0, PropVar("p"))
    with pytest.raises(QclEvalError, match="unbound"):
        eval_qcl(ONE_WORLD, QclAssignment(), 0, Atom("b", ("X",)))


# ---------------------------------------------------------------------------
# Proof sets


def test_proof_set_of_variable_is_its_value():
    g = QclAssignment(prop={"p": 1})
    assert proof_set(ONE_WORLD, g, PropVar("p")) == 1


def test_proof_set_of_tautology_is_everything():
    g = QclAssignment(prop={"p": 2})
    taut = Or(PropVar("p"), Neg(PropVar("p")))
    assert proof_set(IDENTITY2, g, taut) == IDENTITY2.full


def test_proof_set_matches_pointwise_evaluation():
    rng = random.Random(99)
    for _ in range(150):
        model = helpers.gen_model(rng, predicates={"b": 1})
        formula = corpus.random_formula(rng, rng.randint(0, 3))
        for g in assignments_for_formula(model, formula):
            expected = 0
            for world in model.worlds:
                if eval_qcl(model, g, world, formula):
                    expected |= 1 << world
            assert proof_set(model, g, formula) == expected


def test_proof_set_algebra():
    rng = random.Random(101)
    for _ in range(100):
        model = helpers.gen_model(rng, predicates={"b": 1})
        a = corpus.random_formula(rng, rng.randint(0, 2))
        b = corpus.random_formula(rng, rng.randint(0, 2))
        for g in itertools.islice(assignments_for_formula(model, Or(a, b)), 4):
            sa, sb = proof_set(model, g, a), proof_set(model, g, b)
            assert proof_set(model, g, Neg(a)) == model.full & ~sa
            assert proof_set(model, g, Or(a, b)) == sa | sb


# ---------------------------------------------------------------------------
# Validity


def test_closed_tautology_valid_in_every_small_model():
    formula = ForallProp("p", Or(PropVar("p"), Neg(PropVar("p"))))
    for model in enumerate_models(Bounds(2, 1)):
        assert model_valid(model, formula)


def test_free_variable_admits_counterassignment():
    assert not model_valid(IDENTITY2, PropVar("p"))
    point = find_countermodel_point(IDENTITY2, PropVar("p"))
    assert point is not None
    g, world = point
    assert not eval_qcl(IDENTITY2, g, world, PropVar("p"))


def test_conditional_is_not_reflexive_without_frame_conditions():
    # p => p fails wherever the selection for (s, empty set) contains a
    # world outside p; reflexivity needs f(s, A) within A, which the
    # minimal conditional logic does not impose.
    result = valid_up_to(parse_qcl("p => p"), Bounds(2, 1))
    assert isinstance(result, Countermodel)
    assert result.model.select(result.world, 0) != 0
    formula = parse_qcl("p => p")
    assert not eval_qcl(result.model, result.assignment, result.world, formula)


def test_reflexive_conditional_valid_over_inclusive_selections():
    # Restricting to selections with f(s, A) within A recovers it.
    formula = parse_qcl("p => p")
    checked = 0
    for model in enumerate_models(Bounds(2, 1)):
        if all(
            model.select(s, m) & ~m == 0
            for s in model.worlds
            for m in range(model.full + 1)
        ):
            checked += 1
            assert model_valid(model, formula)
    assert checked > 100


def test_free_variable_has_countermodel():
    result = valid_up_to(parse_qcl("p"), Bounds(2, 1))
    assert isinstance(result, Countermodel)
    assert not eval_qcl(result.model, result.assignment, result.world, parse_qcl("p"))


def test_conditional_does_not_collapse_to_material_implication():
    formula = parse_qcl("(p => q) -> (p -> q)")
    result = valid_up_to(formula, Bounds(2, 1))
    assert isinstance(result, Countermodel)
    assert not eval_qcl(result.model, result.assignment, result.world, formula)


def test_valid_up_to_requires_primitive_formula():
    with pytest.raises(ValueError, match="primitive"):
        valid_up_to(syntax.Implies(PropVar("p"), PropVar("p")), Bounds(1, 1))


def test_valid_up_to_resource_limit():
    with pytest.raises(ResourceLimitError):
        valid_up_to(parse_qcl("p => p"), Bounds(4, 1))


# ---------------------------------------------------------------------------
# Enumeration


def test_enumeration_counts():
    assert count_models(Bounds(1, 1)) == 4
    assert sum(1 for _ in enumerate_models(Bounds(1, 1))) == 4
    # One extra world: 4^8 selection tables on top of the one-world layer.
    assert count_models(Bounds(2, 1)) == 4 + 4**8
    assert count_models(Bounds(2, 2), {"b": 1}) == (
        4 * 2 + 4 * 4 + 4**8 * 2 * 2 + 4**8 * 4 * 4
    )


def test_enumeration_rejects_zero_worlds_by_default():
    with pytest.raises(ValueError):
        Bounds(0, 1)
    bounds = Bounds(0, 1, allow_empty_worlds=True)
    models = list(enumerate_models(bounds))
    assert models[0].num_worlds == 0
    assert model_valid(models[0], PropVar("p"))


def test_enumeration_is_deterministic_and_duplicate_free():
    first = list(enumerate_models(Bounds(1, 2), {"b": 1}))
    second = list(enumerate_models(Bounds(1, 2), {"b": 1}))
    assert first == second
    assert len(set(first)) == len(first) == count_models(Bounds(1, 2), {"b": 1})


def test_enumerated_models_pass_structural_invariants():
    for model in itertools.islice(enumerate_models(Bounds(2, 2), {"b": 1}), 0, None, 9973):
        assert model.num_individuals >= 1
        assert model.prop_domain
        for row in model.selection:
            assert len(row) == model.full + 1
            assert all(0 <= m <= model.full for m in row)


def test_enumeration_with_explicit_prop_domain():
    bounds = Bounds(1, 1, q_mode="file", q_sets=(0, 1))
    models = list(enumerate_models(bounds))
    assert all(m.prop_domain == (0, 1) for m in models)
    with pytest.raises(ValueError, match="exceeds"):
        list(enumerate_models(Bounds(1, 1, q_mode="file", q_sets=(5,))))


# ---------------------------------------------------------------------------
# The closed-proof-set condition


def test_powerset_domain_always_satisfies_model_property():
    rng = random.Random(103)
    formulas = [corpus.random_formula(rng, rng.randint(0, 2)) for _ in range(10)]
    model = helpers.gen_model(rng, predicates={"b": 1})
    assert check_model_property(model, formulas)


def test_degenerate_domain_fails_model_property():
    model = make_model(1, lambda s, m: 0, q=(0,))
    taut = ForallProp("q", Or(PropVar("q"), Neg(PropVar("q"))))
    assert not check_model_property(model, [taut])


def test_two_point_domain_closed_for_literals():
    model = make_model(2, lambda s, m: m, q=(0, 3))
    literals = [PropVar("p"), Neg(PropVar("p"))]
    assert check_model_property(model, literals)


# ---------------------------------------------------------------------------
# Rule schemata


def test_rule_instances_validate_shape():
    with pytest.raises(ValueError):
        RuleInstance("RCEA", (PropVar("p"), PropVar("q")))
    with pytest.raises(ValueError):
        RuleInstance("XYZ", (PropVar("p"), PropVar("q"), PropVar("r")))


def test_rule_schemata_hold_on_small_models():
    battery = corpus.rule_battery()
    for model in enumerate_models(Bounds(1, 2), {"b": 1}):
        for check in check_rule_schemata(model, battery):
            assert check.holds, (model, check)


def test_identical_premise_is_trivially_preserved():
    instance = RuleInstance("RCEC", (PropVar("p"), PropVar("p"), PropVar("q")))
    for check in check_rule_schemata(IDENTITY2, [instance]):
        assert check.premise_valid and check.conclusion_valid


def test_rck_with_matching_conjunct():
    instance = RuleInstance("RCK", (PropVar("p"), PropVar("q"), PropVar("q")))
    for check in check_rule_schemata(IDENTITY2, [instance]):
        assert check.holds and check.premise_valid


# ---------------------------------------------------------------------------
# Serialization


GOLDEN_MODEL = SelectionModel(
    num_worlds=2,
    num_individuals=2,
    prop_domain=(0, 1, 2, 3),
    selection=((0, 1, 2, 3), (3, 2, 1, 0)),
    interp=(("b", 1, (frozenset({(0,)}), frozenset({(0,), (1,)}))),),
)

GOLDEN_TEXT = """worlds 2
individuals 2
Q 0 1 2 3
pred b 1
f(0, 0) = 0
f(0, 1) = 1
f(0, 2) = 2
f(0, 3) = 3
f(1, 0) = 3
f(1, 1) = 2
f(1, 2) = 1
f(1, 3) = 0
b@0 = (0)
b@1 = (0) (1)
"""


def test_serialize_model_golden():
    assert serialize_model(GOLDEN_MODEL) == GOLDEN_TEXT


def test_serialize_round_trip():
    assert parse_model(serialize_model(GOLDEN_MODEL)) == GOLDEN_MODEL
    rng = random.Random(107)
    for _ in range(50):
        model = helpers.gen_model(rng, predicates={"b": 1})
        assert parse_model(serialize_model(model)) == model


# ---------------------------------------------------------------------------
# Semantic properties


def test_locality_ignores_irrelevant_assignment_entries():
    rng = random.Random(109)
    for _ in range(100):
        model = helpers.gen_model(rng, predicates={"b": 1})
        formula = corpus.random_formula(rng, rng.randint(0, 3))
        for g in itertools.islice(assignments_for_formula(model, formula), 4):
            padded = QclAssignment(
                ind={**g.ind, "Zfresh": 0},
                prop={**g.prop, "zfresh": model.prop_domain[-1]},
            )
            for world in model.worlds:
                assert eval_qcl(model, g, world, formula) == eval_qcl(
                    model, padded, world, formula
                )


def test_update_with_fresh_variable_is_invisible():
    rng = random.Random(113)
    for _ in range(100):
        model = helpers.gen_model(rng, predicates={"b": 1})
        formula = corpus.random_formula(rng, rng.randint(0, 2))
        for g in itertools.islice(assignments_for_formula(model, formula), 4):
            updated = g.with_ind("Zfresh", model.num_individuals - 1)
            for world in model.worlds:
                assert eval_qcl(model, g, world, formula) == eval_qcl(
                    model, updated, world, formula
                )


def test_normality_equal_proof_sets_interchange_antecedents():
    rng = random.Random(127)
    psi = PropVar("q")
    checked = 0
    for _ in range(300):
        model = helpers.gen_model(rng, predicates={"b": 1})
        a = corpus.random_formula(rng, rng.randint(0, 2))
        candidates = [Or(a, a), Neg(Neg(a)), corpus.random_formula(rng, rng.randint(0, 2))]
        b = rng.choice(candidates)
        for g in assignments_for_formula(model, Or(Or(a, b), psi)):
            if proof_set(model, g, a) != proof_set(model, g, b):
                continue
            checked += 1
            for world in model.worlds:
                assert eval_qcl(model, g, world, CondImp(a, psi)) == eval_qcl(
                    model, g, world, CondImp(b, psi)
                )
    assert checked > 100


def test_existential_duality():
    rng = random.Random(131)
    for _ in range(100):
        model = helpers.gen_model(rng, predicates={"b": 1})
        body = corpus.random_formula(rng, rng.randint(0, 2))
        exists = syntax.desugar(syntax.ExistsInd("X", body))
        for g in itertools.islice(assignments_for_formula(model, exists), 4):
            for world in model.worlds:
                expected = any(
                    eval_qcl(model, g.with_ind("X", d), world, body)
                    for d in model.individuals
                )
                assert eval_qcl(model, g, world, exists) == expected


def test_propositional_existential_duality():
    rng = random.Random(137)
    for _ in range(100):
        model = helpers.gen_model(rng, predicates={"b": 1})
        body = corpus.random_formula(rng, rng.randint(0, 2))
        exists = syntax.desugar(syntax.ExistsProp("p", body))
        for g in itertools.islice(assignments_for_formula(model, exists), 4):
            for world in model.worlds:
                expected = any(
                    eval_qcl(model, g.with_prop("p", q), world, body)
                    for q in model.prop_domain
                )
                assert eval_qcl(model, g, world, exists) == expected

"""Quantified conditional logic as a fragment of higher-order logic.

Parse conditional-logic formulas, translate them into world-indexed HOL
predicates, emit TPTP THF0 problem files, and cross-check the
translation against the direct selection-function semantics by
exhaustive evaluation over finite models.
"""

from .embedding import (
    EmbeddingEnv,
    EmbeddingError,
    combinator_definitions,
    embed,
    embed_kernel,
    embed_valid,
    embed_valid_kernel,
    to_kernel,
    unfold_combinators,
)
from .henkin import (
    FiniteHenkinModel,
    HolEvalError,
    LiftedAssignment,
    UnsupportedQuantifierError,
    WorldSet,
    build_henkin,
    correspondence_check,
    eval_hol,
    hol_valid,
    lift_assignment,
)
from .hol import (
    App,
    Arrow,
    Const,
    HolTerm,
    HolType,
    HolTypeError,
    Lam,
    Var,
    alpha_equal,
    beta_eta_equal,
    beta_eta_normalize,
    beta_eta_step,
    expand_abbreviations,
    fn_type,
    forall,
    free_term_vars,
    substitute,
    type_of,
)
from .semantics import (
    Bounds,
    Countermodel,
    QclAssignment,
    QclEvalError,
    ResourceLimitError,
    RuleInstance,
    SelectionModel,
    ValidWithinBounds,
    check_model_property,
    check_rule_schemata,
    count_models,
    enumerate_models,
    eval_qcl,
    model_valid,
    parse_model,
    proof_set,
    serialize_model,
    valid_up_to,
)
from .syntax import (
    QclFormula,
    QclSyntaxError,
    Signature,
    UnboundVariableError,
    desugar,
    free_vars,
    parse_qcl,
    pretty_qcl,
)
from .thf import (
    ThfDocument,
    ThfError,
    check_document,
    emit_axioms,
    emit_problem,
    render,
    thf_tokens,
    tokens_equal,
)

__version__ = "0.1.0"

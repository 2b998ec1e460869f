"""Command line front end.

Commands: translate, emit, validate, correspond, rules.  Every run is
deterministic given its inputs and seed, and reports echo the full
configuration so they can be replayed exactly.

Exit codes: 0 success/agreement, 1 countermodel found, 2 disagreement
or rule violation found, 3 usage error, 4 resource limit.
"""

from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path

from . import corpus, semantics, syntax, thf
from .embedding import EmbeddingEnv, embed, embed_kernel
from .henkin import build_henkin, correspondence_check
from .hol import type_of
from .semantics import (
    Bounds,
    Countermodel,
    QclAssignment,
    ResourceLimitError,
    ValidWithinBounds,
    assignments_for_formula,
    count_models,
    enumerate_models,
    serialize_model,
)

EXIT_OK = 0
EXIT_COUNTERMODEL = 1
EXIT_DISAGREEMENT = 2
EXIT_USAGE = 3
EXIT_RESOURCE = 4

# Streaming through more candidate models than this is refused outright.
MAX_SWEEP_CANDIDATES = 5_000_000


class UsageError(ValueError):
    pass


def _read_formula_arg(text: str) -> str:
    if text.startswith("@"):
        return Path(text[1:]).read_text(encoding="utf-8")
    return text


def _load_signature(path: str | None) -> syntax.Signature:
    if path is None:
        return syntax.Signature()
    return syntax.Signature.from_text(Path(path).read_text(encoding="utf-8"))


def _merge_predicates(sig: syntax.Signature, formula: syntax.QclFormula) -> dict[str, int]:
    predicates = dict(sig.predicates)
    for name, arity in syntax.predicates_of(formula).items():
        declared = predicates.setdefault(name, arity)
        if declared != arity:
            raise UsageError(
                f"predicate {name!r} declared with arity {declared}, used with {arity}"
            )
    return predicates


def _bounds_from_args(args) -> Bounds:
    q_sets = None
    if args.q_mode == "file":
        if not getattr(args, "q_file", None):
            raise UsageError("--q-mode file needs --q-file")
        text = Path(args.q_file).read_text(encoding="utf-8")
        q_sets = tuple(int(tok) for tok in text.split())
    return Bounds(
        max_worlds=args.worlds,
        max_individuals=args.individuals,
        q_mode=args.q_mode,
        q_sets=q_sets,
    )


class Report:
    """Accumulates (key, value) pairs; prints as text or structured."""

    def __init__(self, fmt: str):
        self.fmt = fmt
        self.pairs: list[tuple[str, object]] = []

    def add(self, key: str, value) -> None:
        self.pairs.append((key, value))

    def extend_config(self, args, keys) -> None:
        for key in keys:
            self.add(key.replace("-", "_"), getattr(args, key.replace("-", "_")))

    def emit(self) -> None:
        if self.fmt == "structured":
            for key, value in self.pairs:
                print(f"{key}: {value}")
        else:
            for key, value in self.pairs:
                print(f"{key} = {value}")


def _print_block(report: Report, label: str, text: str) -> None:
    if report.fmt == "structured":
        for line in text.rstrip("\n").splitlines():
            print(f"{label}.{line}")
    else:
        print(text.rstrip("\n"))


# ---------------------------------------------------------------------------
# Commands


def cmd_translate(args) -> int:
    sig = _load_signature(args.sig)
    formula = syntax.parse_qcl(_read_formula_arg(args.formula), sig, keep_sugar=True)
    env = EmbeddingEnv(predicates=tuple(sorted(_merge_predicates(sig, formula).items())))
    combinator_term = embed(formula, env)
    kernel_term = embed_kernel(syntax.desugar(formula), env)
    print(f"input: {syntax.pretty_qcl(formula)}")
    print(f"type: {thf.type_text(type_of(combinator_term))}")
    print(f"combinator: {thf.render(combinator_term, mode='combinator')}")
    print(f"kernel: {thf.render(kernel_term, mode='kernel')}")
    return EXIT_OK


def cmd_emit(args) -> int:
    sig = _load_signature(args.sig)
    formula = syntax.parse_qcl(_read_formula_arg(args.formula), sig, keep_sugar=True)
    axioms = thf.emit_axioms()
    problem = thf.emit_problem(formula, args.name, sig)
    thf.check_document(axioms)
    thf.check_document(problem, {thf.AXIOMS_FILENAME: axioms})
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    axioms_path = out / thf.AXIOMS_FILENAME
    problem_path = out / f"{args.name}.p"
    axioms_path.write_text(axioms.rendered, encoding="utf-8")
    problem_path.write_text(problem.rendered, encoding="utf-8")
    print(axioms_path)
    print(problem_path)
    return EXIT_OK


def cmd_validate(args) -> int:
    report = Report(args.format)
    sig = _load_signature(args.sig)
    formula = syntax.parse_qcl(_read_formula_arg(args.formula), sig)
    predicates = _merge_predicates(sig, formula)
    bounds = _bounds_from_args(args)
    report.add("command", "validate")
    report.add("formula", syntax.pretty_qcl(formula))
    report.add("max_worlds", bounds.max_worlds)
    report.add("max_individuals", bounds.max_individuals)
    report.add("q_mode", bounds.q_mode)
    result = semantics.valid_up_to(formula, bounds, predicates)
    if isinstance(result, ValidWithinBounds):
        report.add("verdict", "valid-within-bounds")
        report.add("models_checked", result.models_checked)
        report.emit()
        return EXIT_OK
    assert isinstance(result, Countermodel)
    report.add("verdict", "countermodel")
    report.add("world", result.world)
    for name in sorted(result.assignment.ind):
        report.add(f"assign.{name}", result.assignment.ind[name])
    for name in sorted(result.assignment.prop):
        report.add(f"assign.{name}", result.assignment.prop[name])
    report.emit()
    _print_block(Report(args.format), "model", serialize_model(result.model))
    return EXIT_COUNTERMODEL


def _stride_models(bounds: Bounds, predicates: dict[str, int], max_models: int):
    """Deterministic stratified selection: every k-th model so that at
    most max_models are kept."""
    total = count_models(bounds, predicates)
    if total > MAX_SWEEP_CANDIDATES:
        raise ResourceLimitError(
            f"sweep would stream {total} candidate models (limit {MAX_SWEEP_CANDIDATES});"
            " reduce the bounds"
        )
    if max_models <= 0:
        stride = 1
    else:
        stride = max(1, -(-total // max_models))
    selected = []
    for index, model in enumerate(enumerate_models(bounds, predicates)):
        if index % stride == 0:
            selected.append(model)
    return selected


def cmd_correspond(args) -> int:
    report = Report(args.format)
    sig = _load_signature(args.sig)
    atoms = list(corpus.DEFAULT_ATOMS) if args.sig is None else _corpus_atoms(sig)
    predicates = {"b": 1} if args.sig is None else dict(sig.predicates)
    bounds = _bounds_from_args(args)
    rng = random.Random(args.seed)

    formulas = corpus.all_formulas(min(args.depth, 2), atoms)
    for _ in range(args.samples if args.depth >= 3 else 0):
        formulas.append(corpus.random_formula(rng, 3, atoms))

    models = _stride_models(bounds, predicates, args.max_models)
    env = EmbeddingEnv(predicates=tuple(sorted(predicates.items())))
    kernels = [embed_kernel(formula, env) for formula in formulas]
    pairs = 0
    disagreements: list[str] = []
    for model in models:
        henkin = build_henkin(model)
        for formula, kernel in zip(formulas, kernels):
            for g in assignments_for_formula(model, formula):
                for world in model.worlds:
                    pairs += 1
                    ok = correspondence_check(
                        model, g, world, formula, henkin=henkin, kernel=kernel
                    )
                    if not ok and len(disagreements) < 5:
                        disagreements.append(
                            f"{syntax.pretty_qcl(formula)} @ world {world}"
                        )
    report.add("command", "correspond")
    report.add("seed", args.seed)
    report.add("max_worlds", bounds.max_worlds)
    report.add("max_individuals", bounds.max_individuals)
    report.add("q_mode", bounds.q_mode)
    report.add("depth", args.depth)
    report.add("samples", args.samples if args.depth >= 3 else 0)
    report.add("max_models", args.max_models)
    report.add("models", len(models))
    report.add("formulas", len(formulas))
    report.add("pairs", pairs)
    report.add("disagreements", len(disagreements))
    for item in disagreements:
        report.add("disagreement", item)
    report.emit()
    return EXIT_OK if not disagreements else EXIT_DISAGREEMENT


def _corpus_atoms(sig: syntax.Signature) -> list[syntax.QclFormula]:
    atoms: list[syntax.QclFormula] = [syntax.PropVar("p")]
    var_pool = ("X", "Y", "Z")
    for name, arity in sorted(sig.predicates):
        atoms.append(syntax.Atom(name, tuple(var_pool[i % 3] for i in range(arity))))
    return atoms


def cmd_rules(args) -> int:
    report = Report(args.format)
    battery = corpus.rule_battery()
    predicates: dict[str, int] = {}
    for instance in battery:
        for formula in instance.formulas:
            for name, arity in syntax.predicates_of(formula).items():
                predicates.setdefault(name, arity)
    bounds = _bounds_from_args(args)
    models = _stride_models(bounds, predicates, args.max_models)
    checked = 0
    violations: list[str] = []
    for model in models:
        for check in semantics.check_rule_schemata(model, battery):
            checked += 1
            if not check.holds and len(violations) < 5:
                violations.append(f"{check.rule}[{check.index}]")
    report.add("command", "rules")
    report.add("max_worlds", bounds.max_worlds)
    report.add("max_individuals", bounds.max_individuals)
    report.add("max_models", args.max_models)
    report.add("models", len(models))
    report.add("instances", len(battery))
    report.add("checks", checked)
    report.add("violations", len(violations))
    for item in violations:
        report.add("violation", item)
    report.emit()
    return EXIT_OK if not violations else EXIT_DISAGREEMENT


# ---------------------------------------------------------------------------
# Argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcl2hol",
        description="Conditional-logic to HOL translation, THF emission and "
        "finite-model checking",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, bounds=True):
        p.add_argument("--sig", help="signature file: lines 'pred <name> <arity>'")
        p.add_argument("--format", choices=("text", "structured"), default="text")
        if bounds:
            p.add_argument("--worlds", type=int, default=2)
            p.add_argument("--individuals", type=int, default=1)
            p.add_argument("--q-mode", choices=("powerset", "file"), default="powerset")
            p.add_argument("--q-file", help="file of propositional-domain bitmasks")

    p_translate = sub.add_parser("translate", help="show the HOL image of a formula")
    p_translate.add_argument("formula")
    p_translate.add_argument("--sig")
    p_translate.set_defaults(func=cmd_translate)

    p_emit = sub.add_parser("emit", help="write the axiom file and a problem file")
    p_emit.add_argument("formula")
    p_emit.add_argument("--name", default="prob")
    p_emit.add_argument("--out", required=True)
    p_emit.add_argument("--sig")
    p_emit.set_defaults(func=cmd_emit)

    p_validate = sub.add_parser("validate", help="brute-force validity within bounds")
    p_validate.add_argument("formula")
    common(p_validate)
    p_validate.set_defaults(func=cmd_validate)

    p_corr = sub.add_parser(
        "correspond", help="cross-check the two semantics over a model/formula sweep"
    )
    common(p_corr)
    p_corr.add_argument("--depth", type=int, default=2)
    p_corr.add_argument("--seed", type=int, default=0)
    p_corr.add_argument("--samples", type=int, default=1000)
    p_corr.add_argument(
        "--max-models",
        type=int,
        default=200,
        help="stratified cap on swept models (0 = no cap)",
    )
    p_corr.set_defaults(func=cmd_correspond)

    p_rules = sub.add_parser("rules", help="check the rule schemata over models")
    common(p_rules)
    p_rules.add_argument("--max-models", type=int, default=200)
    p_rules.set_defaults(func=cmd_rules)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (UsageError, syntax.QclSyntaxError, syntax.UnboundVariableError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

"""Rule generators: default match rules, parent-child propagation, and
compilation of per-category positive/negative n-gram specs.

A spec clause is a conjunction of grams; a category succeeds for a document
when at least one positive clause is fully present and no negative clause
is. Scores are opaque pass-through integers; generated rules emit 100.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..corpus import TokenizerConfig, tokenize
from ..ontology import Ontology, ROOT_ID
from .syntax import (
    Anonymous,
    Atom,
    Constant,
    Literal,
    NGRAM_NAME_BY_ARITY,
    Number,
    Rule,
    RuleError,
    Variable,
    validate_rule,
)

DEFAULT_SCORE = 100


class CompileError(RuleError):
    pass


@dataclass(frozen=True)
class CategoryRuleSpec:
    category: str
    positives: tuple[tuple[str, ...], ...] = ()
    negatives: tuple[tuple[str, ...], ...] = ()

    def to_dict(self) -> dict:
        return {
            "category": self.category,
            "positives": [list(clause) for clause in self.positives],
            "negatives": [list(clause) for clause in self.negatives],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CategoryRuleSpec":
        return cls(
            category=data["category"],
            positives=tuple(tuple(clause) for clause in data.get("positives", ())),
            negatives=tuple(tuple(clause) for clause in data.get("negatives", ())),
        )


def _representable_label(label: str) -> bool:
    return bool(label) and '"' not in label and " ".join(label.split()) == label


def _ngram_atom(gram: str, config: TokenizerConfig) -> Atom:
    tokens = [tok for tok, _, _ in tokenize(gram, config)]
    if not tokens:
        raise CompileError(f"gram {gram!r} normalizes to nothing")
    if len(tokens) > 5:
        raise CompileError(f"gram {gram!r} has {len(tokens)} tokens, more than 5")
    return Atom(
        predicate=NGRAM_NAME_BY_ARITY[len(tokens)],
        args=(Variable("IdDoc"), Constant(" ".join(tokens)), Anonymous(), Anonymous(), Anonymous()),
    )


def _success_rule(category: str) -> Rule:
    head = Atom(
        "success",
        (Constant(category), Variable("IdDoc"), Number(DEFAULT_SCORE), Number(DEFAULT_SCORE), Number(DEFAULT_SCORE)),
    )
    return Rule(
        head=head,
        body=(
            Literal(Atom("positive", (Constant(category), Variable("IdDoc")))),
            Literal(Atom("negative", (Constant(category), Variable("IdDoc"))), negated=True),
        ),
    )


def compile_spec(spec: CategoryRuleSpec, config: TokenizerConfig = TokenizerConfig()) -> list[Rule]:
    """One rule per clause plus the success rule for the category."""
    if not _representable_label(spec.category):
        raise CompileError(f"category label {spec.category!r} cannot appear in rule text")
    rules = []
    for kind, clauses in (("positive", spec.positives), ("negative", spec.negatives)):
        for clause in clauses:
            if not clause:
                raise CompileError(f"empty {kind} clause for category {spec.category!r}")
            head = Atom(kind, (Constant(spec.category), Variable("IdDoc")))
            body = tuple(Literal(_ngram_atom(gram, config)) for gram in clause)
            rules.append(Rule(head=head, body=body))
    rules.append(_success_rule(spec.category))
    for rule in rules:
        validate_rule(rule)
    return rules


def default_rules_for_label(label: str, config: TokenizerConfig = TokenizerConfig()) -> list[Rule]:
    """The match + success pair one category would get from the generator;
    empty when the label cannot carry a rule (blank, >5 tokens, unquotable)."""
    if not _representable_label(label):
        return []
    tokens = [tok for tok, _, _ in tokenize(label, config)]
    if not tokens or len(tokens) > 5:
        return []
    head = Atom("positive", (Constant(label), Variable("IdDoc")))
    return [
        Rule(head=head, body=(Literal(_ngram_atom(label, config)),)),
        _success_rule(label),
    ]


def generate_match_rules(
    ontology: Ontology,
    config: TokenizerConfig = TokenizerConfig(),
) -> tuple[list[Rule], list[str]]:
    """Per category: assign a document containing the category's own n-gram.

    Labels that are empty, not representable in rule text, or longer than
    five tokens are skipped with a warning.
    """
    rules: list[Rule] = []
    warnings: list[str] = []
    seen: set[str] = set()
    for node in ontology.root.walk():
        if node.id == ROOT_ID or node.label in seen:
            continue
        seen.add(node.label)
        if not _representable_label(node.label):
            warnings.append(f"category {node.id!r}: label {node.label!r} not representable in rule text; skipped")
            continue
        tokens = [tok for tok, _, _ in tokenize(node.label, config)]
        if not tokens:
            warnings.append(f"category {node.id!r}: label {node.label!r} has no tokens; skipped")
            continue
        if len(tokens) > 5:
            warnings.append(
                f"category {node.id!r}: label {node.label!r} has {len(tokens)} tokens, more than 5; skipped"
            )
            continue
        head = Atom("positive", (Constant(node.label), Variable("IdDoc")))
        rules.append(Rule(head=head, body=(Literal(_ngram_atom(node.label, config)),)))
        rules.append(_success_rule(node.label))
    return rules, warnings


def generate_parent_child_rules(ontology: Ontology) -> list[Rule]:
    """Propagate every child assignment to its parent, scores unchanged."""
    rules: list[Rule] = []
    seen: set[tuple[str, str]] = set()
    score_vars = (Variable("S1"), Variable("S2"), Variable("S3"))
    for node in ontology.root.walk():
        if node.id == ROOT_ID:
            continue
        for child in node.children:
            pair = (node.label, child.label)
            if pair in seen:
                continue
            seen.add(pair)
            if not (_representable_label(node.label) and _representable_label(child.label)):
                continue
            head = Atom("success", (Constant(node.label), Variable("IdDoc")) + score_vars)
            body = Atom("success", (Constant(child.label), Variable("IdDoc")) + score_vars)
            rules.append(Rule(head=head, body=(Literal(body),)))
    return rules

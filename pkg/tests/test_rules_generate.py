from pathlib import Path

import pytest

from schemabuilder.clustering import ClusterParams, Typology, TypologyNode
from schemabuilder.ontology import apply, init_from_typology, rename_op, specialize_op
from schemabuilder.rules import (
    CategoryRuleSpec,
    CompileError,
    compile_spec,
    generate_match_rules,
    generate_parent_child_rules,
    parse_program,
    print_program,
)

FIXTURE = Path(__file__).parent / "fixtures" / "concorso_interno_rules.txt"

CONCORSO_SPEC = CategoryRuleSpec(
    category="concorso interno",
    positives=(("concorso interno",), ("selezione interna orizzontale",), ("selezione interna verticale",)),
    negatives=(("render vacante", "seguito concorso"), ("liquidazione compenso",)),
)


def labeled_ontology(labels: list[str]):
    leaves = [TypologyNode(code=f"#{i}", members=[f"d{i}"]) for i in range(len(labels))]
    root = TypologyNode(code="", members=[f"d{i}" for i in range(len(labels))], children=leaves)
    ontology = init_from_typology(Typology(root=root, params=ClusterParams(k=max(len(labels), 1))))
    for i, label in enumerate(labels):
        ontology = apply(ontology, rename_op(f"#{i}", label))
    return ontology


class TestMatchRules:
    def test_single_token_label(self):
        ontology = labeled_ontology(["straordinari"])
        rules, warnings = generate_match_rules(ontology)
        printed = print_program(rules)
        assert 'positive("straordinari", IdDoc) :- onegram(IdDoc, "straordinari", _, _, _).' in printed
        assert (
            'success("straordinari", IdDoc, 100, 100, 100) :- '
            'positive("straordinari", IdDoc), not negative("straordinari", IdDoc).'
        ) in printed
        assert warnings == []

    def test_two_token_label_matches_reference_shape(self):
        ontology = labeled_ontology(["concorso interno"])
        rules, _ = generate_match_rules(ontology)
        reference = parse_program(FIXTURE.read_text(encoding="utf-8"))
        generated_positive = next(r for r in rules if r.head.predicate == "positive")
        reference_positive = next(
            r
            for r in reference
            if r.head.predicate == "positive" and "twogram" in print_program([r])
        )
        assert generated_positive == reference_positive

    def test_six_token_label_skipped_with_warning(self):
        ontology = labeled_ontology(["una etichetta davvero troppo lunga qui"])
        rules, warnings = generate_match_rules(ontology)
        assert rules == []
        assert len(warnings) == 1
        assert "6 tokens" in warnings[0]

    def test_blank_label_skipped_with_warning(self):
        ontology = labeled_ontology(["gara"])
        ontology = apply(ontology, rename_op("#0", ""))
        rules, warnings = generate_match_rules(ontology)
        assert rules == []
        assert len(warnings) == 1

    def test_duplicate_labels_generate_once(self):
        ontology = labeled_ontology(["gara", "gara"])
        rules, _ = generate_match_rules(ontology)
        assert len(rules) == 2  # one positive + one success


class TestParentChildRules:
    def test_edge_generates_propagation_rule(self):
        ontology = labeled_ontology(["retribuzione"])
        ontology = apply(ontology, specialize_op("#0", "altre voci di retribuzione"))
        rules = generate_parent_child_rules(ontology)
        assert print_program(rules) == (
            'success("retribuzione", IdDoc, S1, S2, S3) :- '
            'success("altre voci di retribuzione", IdDoc, S1, S2, S3).\n'
        )

    def test_leaf_only_ontology_generates_nothing(self):
        ontology = labeled_ontology(["a", "b", "c"])
        assert generate_parent_child_rules(ontology) == []

    def test_chain_generates_one_rule_per_edge(self):
        ontology = labeled_ontology(["a"])
        ontology = apply(ontology, specialize_op("#0", "b"))
        b_id = ontology.last_created_id
        ontology = apply(ontology, specialize_op(b_id, "c"))
        rules = generate_parent_child_rules(ontology)
        assert len(rules) == 2


class TestCompileSpec:
    def test_reference_spec_compiles_to_reference_program(self):
        compiled = compile_spec(CONCORSO_SPEC)
        reference = parse_program(FIXTURE.read_text(encoding="utf-8"))
        assert set(compiled) == set(reference)
        assert len(compiled) == len(reference)

    def test_no_negatives_still_guards_success(self):
        spec = CategoryRuleSpec(category="sciopero", positives=(("aderito sciopero",),))
        printed = print_program(compile_spec(spec))
        assert 'not negative("sciopero", IdDoc)' in printed

    def test_single_unigram_spec(self):
        spec = CategoryRuleSpec(category="lpu ed lsu", positives=(("lsu",),))
        printed = print_program(compile_spec(spec))
        assert 'positive("lpu ed lsu", IdDoc) :- onegram(IdDoc, "lsu", _, _, _).' in printed

    def test_conjunctive_clause_compiles_to_one_rule(self):
        spec = CategoryRuleSpec(
            category="concorso interno",
            negatives=(("render vacante", "seguito concorso"),),
        )
        compiled = compile_spec(spec)
        negative = next(r for r in compiled if r.head.predicate == "negative")
        assert len(negative.body) == 2

    def test_oversized_gram_rejected_by_name(self):
        spec = CategoryRuleSpec(
            category="x", positives=(("una frase di ben sei parole qui",),)
        )
        with pytest.raises(CompileError, match="una frase di ben sei parole qui"):
            compile_spec(spec)

    def test_empty_clause_rejected(self):
        spec = CategoryRuleSpec(category="x", positives=((),))
        with pytest.raises(CompileError, match="empty"):
            compile_spec(spec)

    def test_accented_gram_normalized(self):
        spec = CategoryRuleSpec(category="x", positives=(("all'unanimità",),))
        printed = print_program(compile_spec(spec))
        assert '"all unanimita"' in printed

    def test_spec_serialization_round_trip(self):
        data = CONCORSO_SPEC.to_dict()
        assert CategoryRuleSpec.from_dict(data) == CONCORSO_SPEC

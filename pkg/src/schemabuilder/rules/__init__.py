"""Classification rule language: syntax, generators, and evaluation."""

from .engine import (
    Assignment,
    ClassificationResult,
    EvaluationError,
    EvaluationResult,
    Fact,
    StratificationError,
    Stratification,
    classify_corpus,
    evaluate,
    stratify,
)
from .generate import (
    CategoryRuleSpec,
    CompileError,
    compile_spec,
    default_rules_for_label,
    generate_match_rules,
    generate_parent_child_rules,
)
from .syntax import (
    Anonymous,
    Atom,
    Constant,
    KNOWN_ARITIES,
    Literal,
    NGRAM_NAME_BY_ARITY,
    NGRAM_PREDICATES,
    Number,
    RULE_HEAD_PREDICATES,
    Rule,
    RuleError,
    RuleSemanticError,
    RuleSyntaxError,
    Term,
    Variable,
    parse_program,
    print_atom,
    print_program,
    print_rule,
    validate_rule,
)

__all__ = [
    "Anonymous",
    "Assignment",
    "Atom",
    "CategoryRuleSpec",
    "ClassificationResult",
    "CompileError",
    "Constant",
    "EvaluationError",
    "EvaluationResult",
    "Fact",
    "KNOWN_ARITIES",
    "Literal",
    "NGRAM_NAME_BY_ARITY",
    "NGRAM_PREDICATES",
    "Number",
    "RULE_HEAD_PREDICATES",
    "Rule",
    "RuleError",
    "RuleSemanticError",
    "RuleSyntaxError",
    "Stratification",
    "StratificationError",
    "Term",
    "Variable",
    "classify_corpus",
    "compile_spec",
    "default_rules_for_label",
    "evaluate",
    "generate_match_rules",
    "generate_parent_child_rules",
    "parse_program",
    "print_atom",
    "print_program",
    "print_rule",
    "stratify",
    "validate_rule",
]

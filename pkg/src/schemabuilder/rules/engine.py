"""Stratified bottom-up evaluation of rule programs over the n-gram index.

Predicates are stratified so that negation-as-failure always consults a
completed lower stratum; within a stratum, facts are derived by semi-naive
iteration (only joins touching the latest delta are recomputed). N-gram
atoms are satisfied directly from the index rather than materializing the
extensional relations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from ..corpus import NGramIndex
from ..ontology import Ontology, ROOT_ID
from .syntax import (
    Anonymous,
    Atom,
    Constant,
    Literal,
    NGRAM_PREDICATES,
    Number,
    Rule,
    RULE_HEAD_PREDICATES,
    RuleError,
    Variable,
    print_rule,
)

Fact = tuple[str, tuple]


class StratificationError(RuleError):
    pass


class EvaluationError(RuleError):
    pass


@dataclass
class Stratification:
    strata: dict[str, int]

    def stratum(self, predicate: str) -> int:
        return self.strata.get(predicate, 0)


def _dependency_edges(rules: list[Rule]) -> list[tuple[str, str, bool]]:
    edges = []
    for rule in rules:
        for literal in rule.body:
            edges.append((literal.atom.predicate, rule.head.predicate, literal.negated))
    return edges


def _strongly_connected(preds: set[str], edges: list[tuple[str, str, bool]]) -> list[set[str]]:
    # iterative Tarjan over the predicate dependency graph
    graph: dict[str, list[str]] = {pred: [] for pred in preds}
    for src, dst, _ in edges:
        graph[src].append(dst)
    index_of: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    components: list[set[str]] = []
    counter = 0

    for start in sorted(preds):
        if start in index_of:
            continue
        work = [(start, iter(graph[start]))]
        index_of[start] = low[start] = counter
        counter += 1
        stack.append(start)
        on_stack.add(start)
        while work:
            node, neighbours = work[-1]
            advanced = False
            for nxt in neighbours:
                if nxt not in index_of:
                    index_of[nxt] = low[nxt] = counter
                    counter += 1
                    stack.append(nxt)
                    on_stack.add(nxt)
                    work.append((nxt, iter(graph[nxt])))
                    advanced = True
                    break
                if nxt in on_stack:
                    low[node] = min(low[node], index_of[nxt])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index_of[node]:
                component = set()
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    component.add(member)
                    if member == node:
                        break
                components.append(component)
    return components


def stratify(rules: list[Rule]) -> Stratification:
    """Assign strata: facts at 0, derived predicates from 1 upward.

    Rejected when a negation sits on a dependency cycle.
    """
    edges = _dependency_edges(rules)
    preds = {rule.head.predicate for rule in rules}
    preds |= {lit.atom.predicate for rule in rules for lit in rule.body}

    for component in _strongly_connected(preds, edges):
        for src, dst, negated in edges:
            if negated and src in component and dst in component:
                cycle = " -> ".join(sorted(component))
                raise StratificationError(f"negation on a dependency cycle: {cycle}")

    idb = {rule.head.predicate for rule in rules} | set(RULE_HEAD_PREDICATES)
    strata = {pred: (1 if pred in idb else 0) for pred in preds}
    for _ in range(len(preds) + 1):
        changed = False
        for rule in rules:
            head = rule.head.predicate
            level = 1
            for literal in rule.body:
                dep = strata[literal.atom.predicate] + (1 if literal.negated else 0)
                level = max(level, dep)
            if level > strata[head]:
                strata[head] = level
                changed = True
        if not changed:
            break
    else:  # pragma: no cover - negative cycles are rejected above
        raise StratificationError("stratification did not converge")
    return Stratification(strata=strata)


def _match_args(pattern: tuple, values: tuple, env: dict) -> dict | None:
    env = dict(env)
    for term, value in zip(pattern, values):
        if isinstance(term, Anonymous):
            continue
        if isinstance(term, Constant):
            if not isinstance(value, str) or value != term.value:
                return None
        elif isinstance(term, Number):
            if not isinstance(value, int) or value != term.value:
                return None
        else:  # Variable
            bound = env.get(term.name, _UNBOUND)
            if bound is _UNBOUND:
                env[term.name] = value
            elif bound != value:
                return None
    return env


_UNBOUND = object()


def _normalize_ngram_atom(index: NGramIndex, atom: Atom) -> Atom:
    """Gram-text constants are matched after tokenizer normalization."""
    text_term = atom.args[1]
    if isinstance(text_term, Constant):
        normalized = index.normalize(text_term.value)
        if normalized != text_term.value:
            return Atom(atom.predicate, atom.args[:1] + (Constant(normalized),) + atom.args[2:])
    return atom


def _ngram_tuples(index: NGramIndex, atom: Atom, env: dict) -> Iterator[tuple]:
    """Ground tuples of an ngram relation, narrowed by bound doc/text args."""
    n = NGRAM_PREDICATES[atom.predicate]
    doc_term, text_term = atom.args[0], atom.args[1]

    doc_value = None
    if isinstance(doc_term, Constant):
        doc_value = doc_term.value
    elif isinstance(doc_term, Variable) and doc_term.name in env:
        doc_value = env[doc_term.name]

    text_value = None
    if isinstance(text_term, Constant):
        text_value = text_term.value
    elif isinstance(text_term, Variable) and text_term.name in env:
        text_value = env[text_term.name]

    if text_value is not None:
        if not isinstance(text_value, str):
            return
        occurrences = index.lookup(n, text_value) if n <= index.max_n else []
        for occ in occurrences:
            if doc_value is not None and occ.doc_id != doc_value:
                continue
            yield (occ.doc_id, occ.text, occ.token_pos, occ.char_start, occ.char_end)
    elif doc_value is not None:
        if not isinstance(doc_value, str):
            return
        for occ in index.occurrences_in_doc(doc_value):
            if occ.n == n:
                yield (occ.doc_id, occ.text, occ.token_pos, occ.char_start, occ.char_end)
    else:
        for (gram_n, text), occurrences in sorted(index.grams.items()):
            if gram_n != n:
                continue
            for occ in occurrences:
                yield (occ.doc_id, occ.text, occ.token_pos, occ.char_start, occ.char_end)


def _literal_envs(
    literal: Literal,
    env: dict,
    index: NGramIndex,
    facts: dict[str, set[tuple]],
    override: tuple[int, set[tuple]] | None,
    position: int,
) -> Iterator[dict]:
    atom = literal.atom
    if atom.predicate in NGRAM_PREDICATES:
        atom = _normalize_ngram_atom(index, atom)
    if literal.negated:
        if atom.predicate in NGRAM_PREDICATES:
            matched = any(
                _match_args(atom.args, values, env) is not None
                for values in _ngram_tuples(index, atom, env)
            )
        else:
            matched = any(
                _match_args(atom.args, values, env) is not None
                for values in facts.get(atom.predicate, ())
            )
        if not matched:
            yield env
        return
    if atom.predicate in NGRAM_PREDICATES:
        candidates: Iterator[tuple] | set[tuple] = _ngram_tuples(index, atom, env)
    elif override is not None and override[0] == position:
        candidates = override[1]
    else:
        candidates = facts.get(atom.predicate, set())
    for values in candidates:
        bound = _match_args(atom.args, values, env)
        if bound is not None:
            yield bound


def _eval_rule(
    rule: Rule,
    index: NGramIndex,
    facts: dict[str, set[tuple]],
    override: tuple[int, set[tuple]] | None = None,
) -> Iterator[tuple]:
    # negated literals run last so safety guarantees their variables are bound
    ordered = [lit for lit in rule.body if not lit.negated] + [lit for lit in rule.body if lit.negated]

    def ground_head(env: dict) -> tuple:
        values = []
        for term in rule.head.args:
            if isinstance(term, Constant):
                values.append(term.value)
            elif isinstance(term, Number):
                values.append(term.value)
            elif isinstance(term, Variable):
                values.append(env[term.name])
            else:
                raise EvaluationError(f"anonymous term in rule head: {print_rule(rule)}")
        return tuple(values)

    def descend(position: int, env: dict) -> Iterator[tuple]:
        if position == len(ordered):
            yield ground_head(env)
            return
        for bound in _literal_envs(ordered[position], env, index, facts, override, position):
            yield from descend(position + 1, bound)

    yield from descend(0, {})


@dataclass
class EvaluationResult:
    facts: set[Fact]
    provenance: dict[Fact, int] = field(default_factory=dict)

    def of(self, predicate: str) -> set[tuple]:
        return {args for pred, args in self.facts if pred == predicate}


def evaluate(rules: list[Rule], index: NGramIndex) -> EvaluationResult:
    """Derive all positive/negative/success facts for the program."""
    for rule in rules:
        if rule.head.predicate not in RULE_HEAD_PREDICATES:
            raise EvaluationError(
                f"rule heads must be one of {', '.join(RULE_HEAD_PREDICATES)}: {print_rule(rule)}"
            )
    stratification = stratify(rules)
    facts: dict[str, set[tuple]] = {}
    provenance: dict[Fact, int] = {}

    levels = sorted({stratification.stratum(rule.head.predicate) for rule in rules})
    for level in levels:
        indexed_rules = [
            (i, rule) for i, rule in enumerate(rules)
            if stratification.stratum(rule.head.predicate) == level
        ]
        level_preds = {rule.head.predicate for _, rule in indexed_rules}

        def note(rule_index: int, head_pred: str, args: tuple, delta: dict[str, set[tuple]]) -> None:
            relation = facts.setdefault(head_pred, set())
            if args not in relation:
                relation.add(args)
                delta.setdefault(head_pred, set()).add(args)
                provenance[(head_pred, args)] = rule_index

        delta: dict[str, set[tuple]] = {}
        for i, rule in indexed_rules:
            derived = list(_eval_rule(rule, index, facts))
            for args in derived:
                note(i, rule.head.predicate, args, delta)

        while delta:
            previous_delta = delta
            delta = {}
            for i, rule in indexed_rules:
                positives = [lit for lit in rule.body if not lit.negated]
                for position, literal in enumerate(positives):
                    pred = literal.atom.predicate
                    if pred not in level_preds or pred not in previous_delta:
                        continue
                    override = (position, previous_delta[pred])
                    derived = list(_eval_rule(rule, index, facts, override))
                    for args in derived:
                        note(i, rule.head.predicate, args, delta)

    all_facts = {(pred, args) for pred, relation in facts.items() for args in relation}
    return EvaluationResult(facts=all_facts, provenance=provenance)


@dataclass(frozen=True)
class Assignment:
    doc_id: str
    category: str
    scores: tuple[int, int, int]
    derivation: str

    def to_dict(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "category": self.category,
            "scores": list(self.scores),
            "derivation": self.derivation,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Assignment":
        return cls(
            doc_id=data["doc_id"],
            category=data["category"],
            scores=tuple(data["scores"]),
            derivation=data.get("derivation", ""),
        )


@dataclass
class ClassificationResult:
    assignments: list[Assignment]
    counts: dict[str, int]
    warnings: list[str]


def classify_corpus(rules: list[Rule], index: NGramIndex, ontology: Ontology) -> ClassificationResult:
    """All success-derived assignments, with per-category counts.

    Categories derived by rules but absent from the ontology are counted
    too, each with a warning.
    """
    result = evaluate(rules, index)
    counts = {label: 0 for label in ontology.labels()}
    warnings = []
    referenced = {
        NGRAM_PREDICATES[literal.atom.predicate]
        for rule in rules
        for literal in rule.body
        if literal.atom.predicate in NGRAM_PREDICATES
    }
    for arity in sorted(n for n in referenced if n > index.max_n):
        warnings.append(
            f"rules reference {arity}-gram atoms but the index holds up to "
            f"{index.max_n}-grams; those atoms never match"
        )
    assignments = []
    success_facts = sorted(
        (args for pred, args in result.facts if pred == "success"),
        # scores are opaque pass-through values; keep the ordering total even
        # if a manual rule derives non-integer ones
        key=lambda args: (str(args[0]), str(args[1]), [(type(x).__name__, str(x)) for x in args[2:]]),
    )
    for args in success_facts:
        category, doc_id = str(args[0]), str(args[1])
        rule_index = result.provenance[("success", args)]
        assignments.append(
            Assignment(
                doc_id=doc_id,
                category=category,
                scores=tuple(args[2:]),
                derivation=print_rule(rules[rule_index]),
            )
        )
        if category not in counts:
            warnings.append(f"derived category {category!r} is not an ontology label")
            counts[category] = 0
        counts[category] += 1
    return ClassificationResult(assignments=assignments, counts=counts, warnings=warnings)

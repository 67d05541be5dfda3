"""Shared fixtures and independent oracles used across the test suite."""

from __future__ import annotations

import random
from collections import Counter
from math import comb

import numpy as np
import pytest

from schemabuilder.clustering import ClusterParams, Typology, TypologyNode
from schemabuilder.corpus import (
    Corpus,
    Document,
    NGramIndex,
    TokenizerConfig,
    build_index,
    normalize_gram,
    tokenize,
)
from schemabuilder.rules.generate import CategoryRuleSpec
from schemabuilder.rules.syntax import (
    Anonymous,
    Atom,
    Constant,
    KNOWN_ARITIES,
    Literal,
    NGRAM_PREDICATES,
    Number,
    Rule,
    Variable,
)
from schemabuilder.vectorize import FeatureMatrix


# --- corpus helpers ----------------------------------------------------------


def make_corpus(texts: dict[str, str], config: TokenizerConfig = TokenizerConfig()) -> Corpus:
    docs = [
        Document(id=doc_id, source=doc_id, text=text, tokens=tokenize(text, config))
        for doc_id, text in texts.items()
    ]
    docs.sort(key=lambda doc: doc.id)
    return Corpus(documents=docs, tokenizer=config)


def make_index(texts: dict[str, str], max_n: int = 3) -> NGramIndex:
    return build_index(make_corpus(texts), max_n=max_n)


# --- rule-semantics oracle: direct containment check -------------------------


def gram_set(text: str, max_n: int = 5, config: TokenizerConfig = TokenizerConfig()) -> set[str]:
    """All n-grams (n <= max_n) of a text, by naive sliding windows."""
    tokens = [tok for tok, _, _ in tokenize(text, config)]
    grams = set()
    for n in range(1, max_n + 1):
        for i in range(len(tokens) - n + 1):
            grams.add(" ".join(tokens[i : i + n]))
    return grams


def oracle_success(spec: CategoryRuleSpec, grams: set[str]) -> bool:
    """A document succeeds iff some positive clause is fully present and no
    negative clause is fully present."""
    positive_hit = any(
        all(normalize_gram(gram) in grams for gram in clause) for clause in spec.positives
    )
    negative_clear = all(
        any(normalize_gram(gram) not in grams for gram in clause) for clause in spec.negatives
    )
    return positive_hit and negative_clear


# --- clustering oracles -------------------------------------------------------


def adjusted_rand_index(labels_a: list, labels_b: list) -> float:
    assert len(labels_a) == len(labels_b)
    contingency = Counter(zip(labels_a, labels_b))
    sum_cells = sum(comb(c, 2) for c in contingency.values())
    sum_a = sum(comb(c, 2) for c in Counter(labels_a).values())
    sum_b = sum(comb(c, 2) for c in Counter(labels_b).values())
    total = comb(len(labels_a), 2)
    expected = sum_a * sum_b / total
    maximum = (sum_a + sum_b) / 2
    if maximum == expected:
        return 1.0
    return (sum_cells - expected) / (maximum - expected)


def matrix_from_array(
    array: np.ndarray,
    doc_ids: list[str] | None = None,
    features: list[str] | None = None,
) -> FeatureMatrix:
    array = np.asarray(array, dtype=float)
    doc_ids = doc_ids or [f"d{i:03d}" for i in range(array.shape[0])]
    features = features or [f"t{j:03d}" for j in range(array.shape[1])]
    norms = np.linalg.norm(array, axis=1)
    return FeatureMatrix(
        doc_ids=doc_ids,
        features=features,
        weights=array,
        row_norms=norms,
        degenerate=[doc_id for doc_id, norm in zip(doc_ids, norms) if norm == 0.0],
        dropped_features=[],
    )


def planted_points(
    rng: np.random.Generator,
    sizes: tuple[int, ...],
    dims_per_group: int = 3,
    noise: float = 0.05,
) -> tuple[np.ndarray, list[int]]:
    """Points in well-separated directional groups (one dim block per group)."""
    dim = dims_per_group * len(sizes)
    rows, labels = [], []
    for group, size in enumerate(sizes):
        for _ in range(size):
            vec = rng.uniform(0.0, noise, size=dim)
            start = group * dims_per_group
            vec[start : start + dims_per_group] += rng.uniform(0.5, 1.0, size=dims_per_group)
            rows.append(vec)
            labels.append(group)
    return np.array(rows), labels


def brute_force_best_objective(points: np.ndarray, k: int) -> float:
    """Global minimum of the spherical k-means objective, by enumerating every
    partition of the points into at most k blocks (canonical labelings)."""
    unit = points / np.linalg.norm(points, axis=1)[:, None]
    n = len(unit)
    best = float("inf")

    def objective(assign: list[int], blocks: int) -> float:
        total = 0.0
        for b in range(blocks):
            members = [i for i, a in enumerate(assign) if a == b]
            total += len(members) - float(np.linalg.norm(unit[members].sum(axis=0)))
        return total

    assign: list[int] = []

    def descend(i: int, blocks: int) -> None:
        nonlocal best
        if i == n:
            best = min(best, objective(assign, blocks))
            return
        for b in range(min(blocks + 1, k)):
            assign.append(b)
            descend(i + 1, max(blocks, b + 1))
            assign.pop()

    descend(0, 0)
    return best


# --- hand-built two-level typology over the full 10x10 code space -------------


def grid_typology(top: int = 10, children: int = 10, docs_per_leaf: int = 2) -> Typology:
    """Hand-built two-level typology with codes #0..#9 / #i#0..#i#9."""
    root_members: list[str] = []
    top_nodes = []
    for i in range(top):
        leaf_nodes = []
        members_i: list[str] = []
        for j in range(children):
            docs = [f"doc_{i}_{j}_{m}" for m in range(docs_per_leaf)]
            leaf_nodes.append(TypologyNode(code=f"#{i}#{j}", members=docs))
            members_i.extend(docs)
        top_nodes.append(TypologyNode(code=f"#{i}", members=sorted(members_i), children=leaf_nodes))
        root_members.extend(members_i)
    root = TypologyNode(code="", members=sorted(root_members), children=top_nodes)
    return Typology(root=root, params=ClusterParams(k=top, depth=2))


@pytest.fixture
def full_grid_typology() -> Typology:
    return grid_typology()


# Reference edit sequence over the 10x10 grid: reduce out-of-domain
# clusters, aggregate coherent siblings, flatten the formal first level,
# merge same-topic classes, generalize into macro categories, specialize.

REDUCED_CODES = [
    "#0#3", "#0#6", "#0#7", "#0#8", "#0#9",
    "#1#2", "#1#3", "#1#5", "#1#7", "#1#9",
    "#2#0", "#2#3", "#2#4", "#2#6", "#2#9",
    "#3",
    "#4#0", "#4#2", "#4#7",
    "#5#0", "#5#1",
    "#6",
    "#7#0", "#7#2", "#7#3",
    "#8#1", "#8#2", "#8#3", "#8#4", "#8#5", "#8#6", "#8#7", "#8#8", "#8#9",
    "#9#0", "#9#2", "#9#3", "#9#4", "#9#5", "#9#7", "#9#8", "#9#9",
]

SIBLING_AGGREGATIONS = [
    ("#A", ["#0#0", "#0#4"]),
    ("#B", ["#1#0", "#1#1", "#1#4", "#1#8"]),
    ("#C", ["#2#7", "#2#8"]),
    ("#D", ["#4#3", "#4#4", "#4#9"]),
    ("#E", ["#4#5", "#4#6", "#4#8"]),
    ("#F", ["#5#2", "#5#6"]),
    ("#G", ["#5#4", "#5#5", "#5#7", "#5#8", "#5#9"]),
    ("#H", ["#7#4", "#7#5", "#7#7"]),
    ("#I", ["#7#6", "#7#8"]),
]

TOPIC_MERGES = [
    ("concorso", ["#A", "#2#5", "#8#0"]),
    ("categorie personale", ["#0#1", "#4#1"]),
    ("lpu ed lsu", ["#0#2", "#C", "#D"]),
    ("rimborso spese", ["#B", "#I", "#9#6"]),
    ("retribuzione", ["#1#6", "#2#2"]),
    ("consulenti", ["#2#1", "#7#9"]),
    ("straordinari", ["#E", "#9#1"]),
]

TOPIC_RENAMES = [
    ("#0#5", "compensi commissioni gare e concorsi"),
    ("#F", "sciopero"),
    ("#5#3", "trattenimento in servizio"),
    ("#G", "prepensionamento ed esodo volontario"),
    ("#7#1", "compensi agli amministratori"),
    ("#H", "compensi a consulenti liberi professionisti e lavoratori autonomi"),
]

GENERALIZATIONS = [
    ("misure contro la disoccupazione",
     ["lpu ed lsu", "prepensionamento ed esodo volontario", "trattenimento in servizio"]),
    ("trattamento economico",
     ["compensi commissioni gare e concorsi",
      "compensi a consulenti liberi professionisti e lavoratori autonomi",
      "compensi agli amministratori"]),
    ("altre voci di retribuzione", ["rimborso spese", "straordinari"]),
    ("controversie del lavoro", ["sciopero"]),
    ("ordinamento del personale", ["concorso", "categorie personale"]),
    ("tipi di lavoro", ["consulenti"]),
    ("giurisdizione e normativa del lavoro",
     ["controversie del lavoro", "ordinamento del personale", "tipi di lavoro"]),
]

SPECIALIZATIONS = [
    ("altre voci di retribuzione", "assegni familiari"),
    ("altre voci di retribuzione", "buoni pasto"),
    ("altre voci di retribuzione", "premi di produzione"),
    ("altre voci di retribuzione", "progetto obiettivo"),
    ("altre voci di retribuzione", "competenze"),
    ("altre voci di retribuzione", "trattenute"),
    ("altre voci di retribuzione", "trattamento di fine rapporto"),
    ("misure contro la disoccupazione", "mobilita dei lavoratori"),
    ("tipi di lavoro", "consulenti liberi professionisti e lavoratori autonomi"),
    ("tipi di lavoro", "lavoratori dipendenti"),
    ("tipi di lavoro", "lavoratori stagionali e temporanei"),
    ("tipi di lavoro", "lavoro atipico"),
    ("pubblico impiego", "tutela dei lavoratori"),
    ("tutela dei lavoratori", "assicurazioni sul lavoro"),
    ("tutela dei lavoratori", "assistenza sanitaria"),
    ("tutela dei lavoratori", "infortuni sul lavoro e cause di servizio"),
    ("pubblico impiego", "pensionamento"),
]


def grid_project(tmp_path, top: int = 2, children: int = 5, docs_per_leaf: int = 2):
    """A project whose typology is the hand-built grid, backed by a real
    JSONL corpus whose ids match the grid members."""
    import json as _json

    from schemabuilder.ontology import init_from_typology
    from schemabuilder.project import Project, hash_source

    lines = []
    for i in range(top):
        for j in range(children):
            for m in range(docs_per_leaf):
                lines.append(
                    _json.dumps(
                        {
                            "id": f"doc_{i}_{j}_{m}",
                            "text": f"documento {i} {j} {m} su tema{i}x{j} del comune",
                        }
                    )
                )
    source = tmp_path / "grid.jsonl"
    source.write_text("\n".join(lines), encoding="utf-8")
    typology = grid_typology(top=top, children=children, docs_per_leaf=docs_per_leaf)
    project = Project(
        name="grid",
        corpus_source=str(source),
        corpus_hash=hash_source(source, TokenizerConfig()),
        typology=typology,
        cluster_params=typology.params,
    )
    project.ontology = init_from_typology(typology)
    project.revision = 1
    return project


def build_reference_ontology(typology: Typology):
    """Apply the whole edit sequence stepwise; returns (ontology, ops)."""
    from schemabuilder.ontology import (
        aggregate_op,
        apply,
        generalize_op,
        init_from_typology,
        reduce_op,
        rename_op,
        specialize_op,
    )

    ontology = init_from_typology(typology)
    ops = []

    def do(op):
        nonlocal ontology
        ontology = apply(ontology, op)
        ops.append(op)

    for code in REDUCED_CODES:
        do(reduce_op(code))
    for label, targets in SIBLING_AGGREGATIONS:
        do(aggregate_op(targets, label))
    survivors = [child.id for child in ontology.root.children]
    do(aggregate_op(survivors, "pubblico impiego"))
    for label, target_labels in TOPIC_MERGES:
        do(aggregate_op([ontology.find_by_label(l).id for l in target_labels], label))
    for target_label, new_label in TOPIC_RENAMES:
        do(rename_op(ontology.find_by_label(target_label).id, new_label))
    for label, target_labels in GENERALIZATIONS:
        do(generalize_op([ontology.find_by_label(l).id for l in target_labels], label))
    avr = ontology.find_by_label("altre voci di retribuzione").id
    old_retribuzione = ontology.find_by_label("retribuzione").id
    do(generalize_op([avr, old_retribuzione], "retribuzione"))
    for parent_label, new_label in SPECIALIZATIONS:
        do(specialize_op(ontology.find_by_label(parent_label).id, new_label))
    return ontology, ops


# --- random rule programs for grammar round-trips -----------------------------

_WORDS = ["alfa", "bravo", "carta", "delibera", "esito", "fondo", "gara", "impiego"]
_VARIABLES = ["IdDoc", "X", "Y", "Pos", "Start", "End", "S1", "S2", "S3"]


def _random_constant(rng: random.Random) -> Constant:
    words = rng.sample(_WORDS, rng.randint(1, 3))
    return Constant(" ".join(words))


def _random_binding_term(rng: random.Random, bound: set[str]):
    roll = rng.random()
    if roll < 0.45:
        name = rng.choice(_VARIABLES)
        bound.add(name)
        return Variable(name)
    if roll < 0.65:
        return _random_constant(rng)
    if roll < 0.85:
        return Number(rng.randint(0, 100))
    return Anonymous()


def _random_bound_term(rng: random.Random, bound: set[str]):
    roll = rng.random()
    if bound and roll < 0.5:
        return Variable(rng.choice(sorted(bound)))
    if roll < 0.75:
        return _random_constant(rng)
    return Number(rng.randint(0, 100))


def _random_atom(rng: random.Random, predicate: str, bound: set[str], binding: bool) -> Atom:
    arity = KNOWN_ARITIES[predicate]
    maker = _random_binding_term if binding else _random_bound_term
    return Atom(predicate, tuple(maker(rng, bound) for _ in range(arity)))


def random_rule(rng: random.Random) -> Rule:
    if rng.random() < 0.1:
        # ground fact
        predicate = rng.choice(["positive", "negative", "success"])
        arity = KNOWN_ARITIES[predicate]
        args = tuple(
            _random_constant(rng) if rng.random() < 0.7 else Number(rng.randint(0, 100))
            for _ in range(arity)
        )
        return Rule(head=Atom(predicate, args))
    bound: set[str] = set()
    body: list[Literal] = []
    body_preds = sorted(NGRAM_PREDICATES) + ["positive", "negative", "success"]
    for _ in range(rng.randint(1, 3)):
        body.append(Literal(_random_atom(rng, rng.choice(body_preds), bound, binding=True)))
    negatable = sorted(NGRAM_PREDICATES) + ["positive", "negative"]
    for _ in range(rng.randint(0, 2)):
        body.append(Literal(_random_atom(rng, rng.choice(negatable), bound, binding=False), negated=True))
    head_pred = rng.choice(["positive", "negative", "success"])
    head = _random_atom(rng, head_pred, bound, binding=False)
    return Rule(head=head, body=tuple(body))


def random_program(rng: random.Random, max_rules: int = 6) -> list[Rule]:
    return [random_rule(rng) for _ in range(rng.randint(0, max_rules))]

"""Project persistence and the end-to-end pipeline.

A project file is a single JSON document holding the corpus reference (path
plus content hash), tokenizer and feature settings, cluster parameters, the
typology, the edit log, rule specs, manual and generated rule text, and the
latest assignments. The ontology itself is not stored: it is replayed from
the typology and the edit log on load, which keeps the two in lockstep by
construction.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .clustering import ClusterParams, Typology, build_typology, typology_hash
from .corpus import Corpus, NGramIndex, TokenizerConfig, build_index, ingest_corpus
from .ontology import EditOp, Ontology, init_from_typology, replay
from .rules import (
    Assignment,
    CategoryRuleSpec,
    ClassificationResult,
    Rule,
    classify_corpus,
    compile_spec,
    parse_program,
    print_program,
    stratify,
)
from .rules.syntax import RULE_HEAD_PREDICATES, RuleError, RuleSemanticError
from .vectorize import FeatureConfig, FeatureMatrix, build_feature_matrix

FORMAT_VERSION = 1


class ProjectError(Exception):
    pass


class ProjectVersionError(ProjectError):
    pass


class PipelineError(ProjectError):
    pass


def _corpus_hash(corpus: Corpus) -> str:
    return corpus.content_hash()


def hash_source(source: str | Path, tokenizer: TokenizerConfig) -> str:
    return _corpus_hash(ingest_corpus(source, tokenizer))


@dataclass
class Project:
    name: str
    corpus_source: str
    corpus_hash: str
    tokenizer: TokenizerConfig = field(default_factory=TokenizerConfig)
    feature_config: FeatureConfig = field(default_factory=FeatureConfig)
    max_n: int = 3
    cluster_params: ClusterParams | None = None
    typology: Typology | None = None
    edit_log: list[EditOp] = field(default_factory=list)
    rule_specs: dict[str, CategoryRuleSpec] = field(default_factory=dict)
    generated_rules: str = ""
    manual_rules: str = ""
    assignments: list[Assignment] = field(default_factory=list)
    assignments_stale: bool = False
    revision: int = 0
    format_version: int = FORMAT_VERSION

    # runtime caches, never serialized
    ontology: Ontology | None = None
    load_warnings: list[str] = field(default_factory=list)
    _corpus: Corpus | None = None
    _index: NGramIndex | None = None
    _matrix: FeatureMatrix | None = None

    # --- serialization -------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "format_version": self.format_version,
            "name": self.name,
            "corpus_source": self.corpus_source,
            "corpus_hash": self.corpus_hash,
            "tokenizer": self.tokenizer.to_dict(),
            "feature_config": self.feature_config.to_dict(),
            "max_n": self.max_n,
            "cluster_params": self.cluster_params.to_dict() if self.cluster_params else None,
            "typology": self.typology.to_dict() if self.typology else None,
            "edit_log": [op.to_dict() for op in self.edit_log],
            "rule_specs": {
                category: spec.to_dict() for category, spec in sorted(self.rule_specs.items())
            },
            "generated_rules": self.generated_rules,
            "manual_rules": self.manual_rules,
            "assignments": [a.to_dict() for a in self.assignments],
            "assignments_stale": self.assignments_stale,
            "revision": self.revision,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False, indent=1)

    def project_hash(self) -> str:
        return hashlib.sha256(self.to_json().encode("utf-8")).hexdigest()

    @classmethod
    def from_dict(cls, data: dict) -> "Project":
        version = data.get("format_version")
        if version != FORMAT_VERSION:
            raise ProjectVersionError(
                f"project format_version {version!r} is not supported "
                f"(this build reads version {FORMAT_VERSION}); migration needed"
            )
        project = cls(
            name=data["name"],
            corpus_source=data["corpus_source"],
            corpus_hash=data["corpus_hash"],
            tokenizer=TokenizerConfig.from_dict(data.get("tokenizer", {})),
            feature_config=FeatureConfig.from_dict(data.get("feature_config", {})),
            max_n=data.get("max_n", 3),
            cluster_params=(
                ClusterParams.from_dict(data["cluster_params"]) if data.get("cluster_params") else None
            ),
            typology=Typology.from_dict(data["typology"]) if data.get("typology") else None,
            edit_log=[EditOp.from_dict(op) for op in data.get("edit_log", ())],
            rule_specs={
                category: CategoryRuleSpec.from_dict(spec)
                for category, spec in data.get("rule_specs", {}).items()
            },
            generated_rules=data.get("generated_rules", ""),
            manual_rules=data.get("manual_rules", ""),
            assignments=[Assignment.from_dict(a) for a in data.get("assignments", ())],
            assignments_stale=data.get("assignments_stale", False),
            revision=data.get("revision", 0),
        )
        if project.typology is not None:
            project.ontology = replay(project.typology, project.edit_log)
        return project

    # --- corpus access --------------------------------------------------------

    def corpus(self) -> Corpus:
        if self._corpus is None:
            self._corpus = ingest_corpus(self.corpus_source, self.tokenizer)
        return self._corpus

    def index(self) -> NGramIndex:
        if self._index is None:
            self._index = build_index(self.corpus(), max_n=self.max_n)
        return self._index

    def matrix(self) -> FeatureMatrix:
        if self._matrix is None:
            self._matrix = build_feature_matrix(self.corpus(), self.index(), self.feature_config)
        return self._matrix

    def require_typology(self) -> Typology:
        if self.typology is None:
            raise ProjectError("no typology yet: run the clustering step first")
        return self.typology

    def require_ontology(self) -> Ontology:
        if self.ontology is None:
            raise ProjectError("no typology yet: run the clustering step first")
        return self.ontology

    # --- mutations ------------------------------------------------------------

    def bump(self) -> int:
        self.revision += 1
        return self.revision

    def set_typology(self, typology: Typology) -> None:
        """Install a (re)built typology; the edit log restarts empty."""
        self.typology = typology
        self.edit_log = []
        self.ontology = init_from_typology(typology)
        self.assignments_stale = bool(self.assignments)
        self.bump()

    def apply_edit(self, op: EditOp) -> Ontology:
        from .ontology import apply as apply_op

        ontology = self.require_ontology()
        self.ontology = apply_op(ontology, op)
        self.edit_log = list(self.ontology.edit_log)
        self.assignments_stale = bool(self.assignments)
        self.bump()
        return self.ontology

    def undo_edit(self) -> Ontology:
        if not self.edit_log:
            raise ProjectError("nothing to undo: the edit log is empty")
        self.edit_log = self.edit_log[:-1]
        self.ontology = replay(self.require_typology(), self.edit_log)
        self.assignments_stale = bool(self.assignments)
        self.bump()
        return self.ontology

    def set_rule_spec(self, spec: CategoryRuleSpec) -> list[Rule]:
        compiled = compile_spec(spec, self.tokenizer)  # validates before storing
        self.rule_specs[spec.category] = spec
        self.assignments_stale = bool(self.assignments)
        self.bump()
        return compiled

    def set_manual_rules(self, text: str) -> None:
        validate_manual_rules(text)
        self.manual_rules = text
        self.assignments_stale = bool(self.assignments)
        self.bump()

    def set_generated_rules(self, text: str) -> None:
        self.generated_rules = text
        self.assignments_stale = bool(self.assignments)
        self.bump()

    # --- rule assembly and classification --------------------------------------

    def assemble_program(self) -> list[Rule]:
        rules: list[Rule] = []
        if self.generated_rules:
            rules.extend(parse_program(self.generated_rules))
        for category in sorted(self.rule_specs):
            rules.extend(compile_spec(self.rule_specs[category], self.tokenizer))
        if self.manual_rules:
            rules.extend(parse_program(self.manual_rules))
        return rules

    def classify(self) -> ClassificationResult:
        ontology = self.require_ontology()
        result = classify_corpus(self.assemble_program(), self.index(), ontology)
        # rerunning an unchanged project is a no-op, not a new revision
        changed = result.assignments != self.assignments or self.assignments_stale
        self.assignments = result.assignments
        self.assignments_stale = False
        if changed:
            self.bump()
        return result

    def counts(self) -> dict[str, int]:
        ontology = self.require_ontology()
        counts = {label: 0 for label in ontology.labels()}
        for assignment in self.assignments:
            counts[assignment.category] = counts.get(assignment.category, 0) + 1
        return counts


def snippet_for(project: Project, category: str, doc_id: str, context: int = 40) -> str:
    """Source extract around the first occurrence of a gram that drives the
    category's positive rules; the document head when none applies (e.g. for
    assignments that only arrived through parent propagation)."""
    from .rules.syntax import Constant, NGRAM_PREDICATES

    doc = project.corpus().doc(doc_id)
    index = project.index()
    for rule in project.assemble_program():
        if rule.head.predicate != "positive" or not rule.head.args:
            continue
        head_cat = rule.head.args[0]
        if not isinstance(head_cat, Constant) or head_cat.value != category:
            continue
        for literal in rule.body:
            if literal.negated or literal.atom.predicate not in NGRAM_PREDICATES:
                continue
            text_term = literal.atom.args[1]
            if not isinstance(text_term, Constant):
                continue
            n = NGRAM_PREDICATES[literal.atom.predicate]
            if n > index.max_n:
                continue
            occurrences = [occ for occ in index.lookup(n, text_term.value) if occ.doc_id == doc_id]
            if occurrences:
                first = occurrences[0]
                start = max(0, first.char_start - context)
                end = min(len(doc.text), first.char_end + context)
                return doc.text[start:end]
    return doc.text[: 2 * context]


def validate_manual_rules(text: str) -> list[Rule]:
    """Parse + head restriction + stratification; raises RuleError on failure."""
    rules = parse_program(text)
    for rule in rules:
        if rule.head.predicate not in RULE_HEAD_PREDICATES:
            raise RuleSemanticError(
                f"manual rules may only define {', '.join(RULE_HEAD_PREDICATES)}; "
                f"found head {rule.head.predicate!r}"
            )
    stratify(rules)
    return rules


def save_project(project: Project, path: str | Path) -> None:
    Path(path).write_text(project.to_json() + "\n", encoding="utf-8")


def load_project(path: str | Path) -> Project:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ProjectError(f"cannot read project file {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProjectError(
            f"corrupted project file {path}: line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    project = Project.from_dict(data)
    source = Path(project.corpus_source)
    if source.exists():
        try:
            current = hash_source(source, project.tokenizer)
        except Exception as exc:  # ingest errors degrade to a warning on load
            project.load_warnings.append(f"corpus source unreadable: {exc}")
        else:
            if current != project.corpus_hash:
                project.load_warnings.append(
                    f"corpus content hash changed since the project was saved "
                    f"({project.corpus_hash[:12]}... -> {current[:12]}...)"
                )
    else:
        project.load_warnings.append(f"corpus source missing: {source}")
    return project


def ingest_project(corpus_source: str | Path, name: str | None = None,
                   tokenizer: TokenizerConfig = TokenizerConfig(), max_n: int = 3) -> Project:
    corpus = ingest_corpus(corpus_source, tokenizer)
    project = Project(
        name=name or Path(corpus_source).stem or "project",
        corpus_source=str(corpus_source),
        corpus_hash=_corpus_hash(corpus),
        tokenizer=tokenizer,
        max_n=max_n,
    )
    project._corpus = corpus
    project.bump()
    return project


def cluster_project(project: Project, params: ClusterParams,
                    feature_config: FeatureConfig | None = None) -> Typology:
    if feature_config is not None:
        project.feature_config = feature_config
        project._matrix = None
    project.cluster_params = params
    typology = build_typology(project.matrix(), params)
    project.set_typology(typology)
    return typology


def recluster_project(project: Project, code: str, params: ClusterParams,
                      reset_edits: bool = False) -> Typology:
    """Rebuild one typology subtree, replaying the edit log when it still fits."""
    from .clustering import recluster_subtree
    from .ontology import EditError

    typology = project.require_typology()
    rebuilt = recluster_subtree(typology, project.matrix(), code, params)
    if reset_edits:
        project.set_typology(rebuilt)
        return rebuilt
    try:
        ontology = replay(rebuilt, project.edit_log)
    except EditError as exc:
        raise ProjectError(
            f"edit log no longer applies after reclustering {code or 'the root'!r}: {exc}; "
            f"rerun with reset_edits to drop the log"
        ) from exc
    project.typology = rebuilt
    project.ontology = ontology
    project.assignments_stale = bool(project.assignments)
    project.bump()
    return rebuilt


def run_pipeline(corpus_source: str | Path, params: ClusterParams,
                 feature_config: FeatureConfig | None = None,
                 tokenizer: TokenizerConfig = TokenizerConfig(),
                 name: str | None = None, max_n: int = 3) -> Project:
    """ingest -> index -> matrix -> typology -> initial ontology."""
    stage = "ingest"
    try:
        project = ingest_project(corpus_source, name=name, tokenizer=tokenizer, max_n=max_n)
        stage = "index"
        project.index()
        stage = "matrix"
        if feature_config is not None:
            project.feature_config = feature_config
        project.matrix()
        stage = "cluster"
        cluster_project(project, params)
    except ProjectError:
        raise
    except Exception as exc:
        raise PipelineError(f"{stage}: {exc}") from exc
    return project

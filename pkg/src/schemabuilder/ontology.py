"""Category-tree editing: from a typology to a classification schema.

The tree is only ever changed through the edit operations (reduce,
aggregate, generalize, specialize, rename, mark-residual), recorded in an
append-only log bound to the source typology by a content hash. Replaying
the log on the same typology reproduces the tree exactly, which is what
undo and project loading rely on.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field

from .clustering import Typology, TypologyNode, typology_hash

EDIT_KINDS = ("reduce", "aggregate", "generalize", "specialize", "rename", "mark_residual")
NODE_KINDS = ("cluster", "synthesis", "generalization", "specialization", "residual")

ROOT_ID = "root"


class EditError(Exception):
    """An edit operation that cannot be applied to the current tree."""


class UnknownNodeError(EditError):
    pass


class StaleLogError(Exception):
    """Edit log does not belong to this typology."""


@dataclass(frozen=True)
class EditOp:
    kind: str
    target: str | None = None
    targets: tuple[str, ...] = ()
    parent: str | None = None
    new_label: str | None = None
    author: str = ""
    timestamp: str = ""

    def __post_init__(self) -> None:
        if self.kind not in EDIT_KINDS:
            raise ValueError(f"unknown edit kind: {self.kind!r}")

    def to_dict(self) -> dict:
        data: dict = {"kind": self.kind}
        if self.target is not None:
            data["target"] = self.target
        if self.targets:
            data["targets"] = list(self.targets)
        if self.parent is not None:
            data["parent"] = self.parent
        if self.new_label is not None:
            data["new_label"] = self.new_label
        data["author"] = self.author
        data["timestamp"] = self.timestamp
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "EditOp":
        return cls(
            kind=data["kind"],
            target=data.get("target"),
            targets=tuple(data.get("targets", ())),
            parent=data.get("parent"),
            new_label=data.get("new_label"),
            author=data.get("author", ""),
            timestamp=data.get("timestamp", ""),
        )


def reduce_op(target: str, **meta) -> EditOp:
    return EditOp(kind="reduce", target=target, **meta)


def aggregate_op(targets: list[str], new_label: str, **meta) -> EditOp:
    return EditOp(kind="aggregate", targets=tuple(targets), new_label=new_label, **meta)


def generalize_op(targets: list[str], new_label: str, **meta) -> EditOp:
    return EditOp(kind="generalize", targets=tuple(targets), new_label=new_label, **meta)


def specialize_op(parent: str, new_label: str, **meta) -> EditOp:
    return EditOp(kind="specialize", parent=parent, new_label=new_label, **meta)


def rename_op(target: str, new_label: str, **meta) -> EditOp:
    return EditOp(kind="rename", target=target, new_label=new_label, **meta)


def mark_residual_op(target: str, **meta) -> EditOp:
    return EditOp(kind="mark_residual", target=target, **meta)


@dataclass
class SchemaNode:
    id: str
    label: str
    kind: str
    origin_code: str | None = None
    extension: set[str] = field(default_factory=set)
    fundamentum: str | None = None
    order_index: int | None = None
    term_hint: tuple[str, ...] = ()
    children: list["SchemaNode"] = field(default_factory=list)

    def walk(self):
        yield self
        for child in self.children:
            yield from child.walk()

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "label": self.label,
            "kind": self.kind,
            "origin_code": self.origin_code,
            "extension": sorted(self.extension),
            "fundamentum": self.fundamentum,
            "order_index": self.order_index,
            "term_hint": list(self.term_hint),
            "children": [child.to_dict() for child in self.children],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SchemaNode":
        return cls(
            id=data["id"],
            label=data["label"],
            kind=data["kind"],
            origin_code=data.get("origin_code"),
            extension=set(data.get("extension", ())),
            fundamentum=data.get("fundamentum"),
            order_index=data.get("order_index"),
            term_hint=tuple(data.get("term_hint", ())),
            children=[cls.from_dict(child) for child in data.get("children", ())],
        )


@dataclass
class Ontology:
    root: SchemaNode
    edit_log: list[EditOp] = field(default_factory=list)
    source_typology_hash: str = ""
    unassigned: set[str] = field(default_factory=set)
    next_id: int = 1
    last_created_id: str | None = None

    def nodes(self) -> list[SchemaNode]:
        return list(self.root.walk())

    def find(self, node_id: str) -> SchemaNode:
        for node in self.root.walk():
            if node.id == node_id:
                return node
        raise UnknownNodeError(f"unknown node id: {node_id!r}")

    def find_parent(self, node_id: str) -> SchemaNode | None:
        for node in self.root.walk():
            for child in node.children:
                if child.id == node_id:
                    return node
        return None

    def find_by_label(self, label: str) -> SchemaNode:
        for node in self.root.walk():
            if node.label == label:
                return node
        raise UnknownNodeError(f"no node labeled {label!r}")

    def labels(self) -> set[str]:
        return {node.label for node in self.root.walk() if node.id != ROOT_ID}

    def leaf_extensions(self) -> list[set[str]]:
        return [set(node.extension) for node in self.root.walk() if not node.children]

    def to_dict(self) -> dict:
        return {
            "root": self.root.to_dict(),
            "edit_log": [op.to_dict() for op in self.edit_log],
            "source_typology_hash": self.source_typology_hash,
            "unassigned": sorted(self.unassigned),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False, indent=1)


def init_from_typology(typology: Typology) -> Ontology:
    """One schema node per typology node; the edit log starts empty."""

    def convert(node: TypologyNode) -> SchemaNode:
        return SchemaNode(
            id=node.code if node.code else ROOT_ID,
            label=node.code if node.code else "corpus",
            kind="cluster",
            origin_code=node.code,
            extension=set(node.members),
            term_hint=tuple(term for term, _ in node.top_terms[:3]),
            children=[convert(child) for child in node.children],
        )

    ontology = Ontology(
        root=convert(typology.root),
        source_typology_hash=typology_hash(typology),
    )
    _check_tree(ontology)
    return ontology


def _check_tree(ontology: Ontology) -> None:
    # structural guarantees asserted after every revision: unique ids, each
    # node reachable once, parent extensions cover their children
    seen: set[str] = set()
    for node in ontology.root.walk():
        if node.id in seen:
            raise AssertionError(f"duplicate node id {node.id!r}")
        seen.add(node.id)
        if node.kind not in NODE_KINDS:
            raise AssertionError(f"invalid node kind {node.kind!r}")
        if node.kind == "cluster" and node.origin_code is None:
            raise AssertionError(f"cluster node {node.id!r} lacks an origin code")
        child_union: set[str] = set()
        for child in node.children:
            child_union |= child.extension
        if not child_union <= node.extension:
            raise AssertionError(f"extension of {node.id!r} does not cover its children")


def _sibling_context(ontology: Ontology, targets: tuple[str, ...], op_name: str) -> tuple[SchemaNode, list[SchemaNode]]:
    if len(set(targets)) != len(targets):
        raise EditError(f"{op_name} targets contain duplicates: {', '.join(targets)}")
    nodes = [ontology.find(node_id) for node_id in targets]
    parents = []
    for node_id in targets:
        parent = ontology.find_parent(node_id)
        if parent is None:
            raise EditError(f"{op_name} cannot target the root")
        parents.append(parent)
    if len({parent.id for parent in parents}) != 1:
        raise EditError(f"{op_name} targets must be siblings: {', '.join(targets)}")
    return parents[0], nodes


def _fresh_id(ontology: Ontology) -> str:
    node_id = f"n{ontology.next_id}"
    ontology.next_id += 1
    return node_id


def apply(ontology: Ontology, op: EditOp) -> Ontology:
    """Apply one edit and return the new revision; the input is untouched."""
    revised = copy.deepcopy(ontology)
    revised.last_created_id = None

    if op.kind == "reduce":
        if op.target is None:
            raise EditError("reduce needs a target")
        node = revised.find(op.target)
        parent = revised.find_parent(op.target)
        if parent is None:
            raise EditError("cannot reduce the root")
        parent.children = [child for child in parent.children if child.id != node.id]
        for removed in node.walk():
            revised.unassigned |= removed.extension

    elif op.kind == "aggregate":
        if len(op.targets) < 2:
            raise EditError("aggregate needs at least two targets")
        if op.new_label is None:
            raise EditError("aggregate needs a label for the synthesis node")
        parent, nodes = _sibling_context(revised, op.targets, "aggregate")
        merged = SchemaNode(
            id=_fresh_id(revised),
            label=op.new_label,
            kind="synthesis",
            extension=set().union(*(node.extension for node in nodes)),
            children=[child for node in nodes for child in node.children],
        )
        target_ids = set(op.targets)
        position = min(i for i, child in enumerate(parent.children) if child.id in target_ids)
        parent.children = [child for child in parent.children if child.id not in target_ids]
        parent.children.insert(position, merged)
        revised.last_created_id = merged.id

    elif op.kind == "generalize":
        if not op.targets:
            raise EditError("generalize needs at least one target")
        if op.new_label is None:
            raise EditError("generalize needs a label for the new parent")
        parent, nodes = _sibling_context(revised, op.targets, "generalize")
        general = SchemaNode(
            id=_fresh_id(revised),
            label=op.new_label,
            kind="generalization",
            extension=set().union(*(node.extension for node in nodes)),
            children=list(nodes),
        )
        target_ids = set(op.targets)
        position = min(i for i, child in enumerate(parent.children) if child.id in target_ids)
        parent.children = [child for child in parent.children if child.id not in target_ids]
        parent.children.insert(position, general)
        revised.last_created_id = general.id

    elif op.kind == "specialize":
        if op.parent is None:
            raise EditError("specialize needs a parent")
        if op.new_label is None:
            raise EditError("specialize needs a label for the new child")
        parent = revised.find(op.parent)
        child = SchemaNode(id=_fresh_id(revised), label=op.new_label, kind="specialization")
        parent.children.append(child)
        revised.last_created_id = child.id

    elif op.kind == "rename":
        if op.target is None or op.new_label is None:
            raise EditError("rename needs a target and a label")
        revised.find(op.target).label = op.new_label

    elif op.kind == "mark_residual":
        if op.target is None:
            raise EditError("mark_residual needs a target")
        revised.find(op.target).kind = "residual"

    else:  # pragma: no cover - EditOp rejects unknown kinds on construction
        raise EditError(f"unknown edit kind {op.kind!r}")

    revised.edit_log.append(op)
    _check_tree(revised)
    return revised


def replay(typology: Typology, edit_log: list[EditOp], source_hash: str | None = None) -> Ontology:
    """Rebuild an ontology by folding the log over a fresh typology import."""
    actual = typology_hash(typology)
    if source_hash is not None and source_hash != actual:
        raise StaleLogError(
            f"edit log was recorded against typology {source_hash[:12]}..., "
            f"but this typology hashes to {actual[:12]}..."
        )
    ontology = init_from_typology(typology)
    for position, op in enumerate(edit_log):
        try:
            ontology = apply(ontology, op)
        except EditError as exc:
            raise EditError(f"replay failed at op {position} ({op.kind}): {exc}") from exc
    return ontology


@dataclass
class ValidationReport:
    exclusivity_violations: list[tuple[str, str, str]]
    gaps: list[str]
    unassigned: list[str]
    balance: list[dict]
    warnings: list[str]

    def to_dict(self) -> dict:
        return {
            "exclusivity_violations": [list(v) for v in self.exclusivity_violations],
            "gaps": self.gaps,
            "unassigned": self.unassigned,
            "balance": self.balance,
            "warnings": self.warnings,
        }


def validate(ontology: Ontology, corpus_ids: set[str], synthesis_ratio: float = 3.0) -> ValidationReport:
    """Report (never fix) exclusivity overlaps, coverage gaps, and imbalance.

    A document counts as covered when some leaf extension holds it or a
    reduce operation explicitly discarded it.
    """
    violations: list[tuple[str, str, str]] = []
    balance: list[dict] = []
    warnings: list[str] = []
    for node in ontology.root.walk():
        if not node.children:
            continue
        for i, first in enumerate(node.children):
            for second in node.children[i + 1 :]:
                for doc_id in sorted(first.extension & second.extension):
                    violations.append((doc_id, first.id, second.id))
        sizes = sorted(len(child.extension) for child in node.children)
        median = sizes[len(sizes) // 2]
        balance.append({
            "parent": node.id,
            "sizes": {child.id: len(child.extension) for child in node.children},
            "median": median,
        })
        for child in node.children:
            if child.kind != "synthesis":
                continue
            other_sizes = sorted(len(s.extension) for s in node.children if s is not child)
            if not other_sizes:
                continue
            other_median = other_sizes[len(other_sizes) // 2]
            if other_median > 0 and len(child.extension) > synthesis_ratio * other_median:
                warnings.append(
                    f"synthesis node {child.id!r} ({child.label}) holds {len(child.extension)} docs, "
                    f"more than {synthesis_ratio}x the sibling median {other_median}"
                )

    covered: set[str] = set()
    for node in ontology.root.walk():
        if not node.children:
            covered |= node.extension
    gaps = sorted(corpus_ids - covered - ontology.unassigned)
    return ValidationReport(
        exclusivity_violations=violations,
        gaps=gaps,
        unassigned=sorted(ontology.unassigned),
        balance=balance,
        warnings=warnings,
    )


EXPORT_FORMATS = ("tree-json", "dot", "csv")


def export_schema(ontology: Ontology, format: str) -> str:
    """Serialize the schema; tree-json round-trips, dot/csv are views."""
    key = format.lower()
    if key == "tree-json":
        return ontology.to_json()
    if key == "dot":
        lines = ["digraph ontology {", "  node [shape=box];"]
        for node in ontology.root.walk():
            label = node.label.replace('"', "'")
            lines.append(f'  "{node.id}" [label="{label}\\n({node.kind}, {len(node.extension)} docs)"];')
            for child in node.children:
                lines.append(f'  "{node.id}" -> "{child.id}";')
        lines.append("}")
        return "\n".join(lines) + "\n"
    if key == "csv":
        lines = ["id,parent_id,label,kind"]

        def emit(node: SchemaNode, parent_id: str) -> None:
            label = node.label.replace('"', '""')
            lines.append(f'{node.id},{parent_id},"{label}",{node.kind}')
            for child in node.children:
                emit(child, node.id)

        emit(ontology.root, "")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown export format {format!r}; expected one of {', '.join(EXPORT_FORMATS)}")


def import_schema(text: str) -> Ontology:
    """Inverse of the tree-json export."""
    data = json.loads(text)
    ontology = Ontology(
        root=SchemaNode.from_dict(data["root"]),
        edit_log=[EditOp.from_dict(op) for op in data.get("edit_log", ())],
        source_typology_hash=data.get("source_typology_hash", ""),
        unassigned=set(data.get("unassigned", ())),
    )
    highest = 0
    for node in ontology.root.walk():
        if node.id.startswith("n") and node.id[1:].isdigit():
            highest = max(highest, int(node.id[1:]))
    ontology.next_id = highest + 1
    _check_tree(ontology)
    return ontology

"""Pydantic request/response models for the HTTP API."""

from __future__ import annotations

from pydantic import BaseModel, Field


class EditOpModel(BaseModel):
    kind: str = Field(description="reduce | aggregate | generalize | specialize | rename | mark_residual")
    target: str | None = None
    targets: list[str] | None = None
    parent: str | None = None
    new_label: str | None = None
    author: str = ""
    timestamp: str = ""


class EditRequest(BaseModel):
    op: EditOpModel
    revision: int | None = Field(default=None, description="expected current revision; 409 on mismatch")


class UndoRequest(BaseModel):
    revision: int | None = None


class RevisionResponse(BaseModel):
    revision: int
    created_id: str | None = None


class OntologyResponse(BaseModel):
    revision: int
    root: dict
    unassigned: list[str]
    edit_log_length: int
    assignments_stale: bool


class TypologyResponse(BaseModel):
    revision: int
    typology: dict


class RuleSpecBody(BaseModel):
    positives: list[list[str]] = Field(default_factory=list)
    negatives: list[list[str]] = Field(default_factory=list)
    revision: int | None = None


class RuleSpecResponse(BaseModel):
    category: str
    positives: list[list[str]]
    negatives: list[list[str]]
    compiled: str
    default_program: str
    revision: int


class ManualRulesBody(BaseModel):
    text: str
    revision: int | None = None


class ManualRulesResponse(BaseModel):
    text: str
    revision: int


class ClassifyRequest(BaseModel):
    revision: int | None = None


class ClassifyResponse(BaseModel):
    revision: int
    counts: dict[str, int]
    total: int
    warnings: list[str]


class ClusterParamsModel(BaseModel):
    k: int = 10
    depth: int = 2
    restarts: int = 10
    max_iter: int = 100
    seed: int = 0
    min_size: int | None = None
    max_size: int | None = None
    min_split: int | None = None


class ReclusterRequest(BaseModel):
    code: str
    params: ClusterParamsModel | None = None
    reset_edits: bool = False
    revision: int | None = None


class DocumentSnippet(BaseModel):
    doc_id: str
    snippet: str


class CategoryDocumentsResponse(BaseModel):
    id: str
    label: str
    doc_ids: list[str]
    documents: list[DocumentSnippet]
    assignments_stale: bool


class DocumentResponse(BaseModel):
    id: str
    source: str
    text: str


class ValidationResponse(BaseModel):
    revision: int
    report: dict

"""Local HTTP service exposing the project to the designer UI.

One project per process. Mutations are serialized through a lock, persist
to the project file when one is configured, and return a monotonically
increasing revision number. Read endpoints serve the current state; a
request carrying a stale expected revision is refused with 409.
"""

from __future__ import annotations

import threading
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from ..clustering import ClusterParams
from ..ontology import EditError, EditOp, UnknownNodeError, export_schema, validate
from ..project import (
    Project,
    ProjectError,
    recluster_project,
    save_project,
    snippet_for,
)
from ..rules import (
    CategoryRuleSpec,
    CompileError,
    RuleError,
    compile_spec,
    default_rules_for_label,
    print_program,
)
from . import schemas


class ConflictError(Exception):
    pass


class NotFoundError(Exception):
    pass


class ServiceState:
    def __init__(self, project: Project, path: str | Path | None = None):
        self.project = project
        self.path = Path(path) if path else None
        self.lock = threading.RLock()

    def check_revision(self, expected: int | None) -> None:
        if expected is not None and expected != self.project.revision:
            raise ConflictError(
                f"stale revision {expected}; current revision is {self.project.revision}"
            )

    def persist(self) -> None:
        if self.path is not None:
            save_project(self.project, self.path)


def create_app(project: Project, path: str | Path | None = None,
               static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="schemabuilder", version="0.1.0")
    state = ServiceState(project, path)
    app.state.service = state

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError):
        errors = [
            {"field": ".".join(str(part) for part in err.get("loc", ())), "message": err.get("msg", "")}
            for err in exc.errors()
        ]
        return JSONResponse(status_code=400, content={"detail": "malformed body", "errors": errors})

    @app.exception_handler(ConflictError)
    async def conflict(request: Request, exc: ConflictError):
        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.exception_handler(NotFoundError)
    async def not_found(request: Request, exc: NotFoundError):
        return JSONResponse(status_code=404, content={"detail": str(exc)})

    @app.exception_handler(UnknownNodeError)
    async def unknown_node(request: Request, exc: UnknownNodeError):
        return JSONResponse(status_code=404, content={"detail": str(exc)})

    @app.exception_handler(EditError)
    async def bad_edit(request: Request, exc: EditError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(RuleError)
    async def bad_rules(request: Request, exc: RuleError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(ProjectError)
    async def project_error(request: Request, exc: ProjectError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    # --- read endpoints -------------------------------------------------------

    @app.get("/api/typology", response_model=schemas.TypologyResponse)
    def get_typology():
        with state.lock:
            if state.project.typology is None:
                raise NotFoundError("no typology yet: run the clustering step first")
            return schemas.TypologyResponse(
                revision=state.project.revision,
                typology=state.project.typology.to_dict(),
            )

    @app.get("/api/ontology", response_model=schemas.OntologyResponse)
    def get_ontology():
        with state.lock:
            ontology = state.project.require_ontology()
            return schemas.OntologyResponse(
                revision=state.project.revision,
                root=ontology.root.to_dict(),
                unassigned=sorted(ontology.unassigned),
                edit_log_length=len(ontology.edit_log),
                assignments_stale=state.project.assignments_stale,
            )

    @app.get("/api/validation", response_model=schemas.ValidationResponse)
    def get_validation():
        with state.lock:
            ontology = state.project.require_ontology()
            corpus_ids = {doc.id for doc in state.project.corpus()}
            report = validate(ontology, corpus_ids)
            return schemas.ValidationResponse(
                revision=state.project.revision, report=report.to_dict()
            )

    # --- edits ------------------------------------------------------------------

    @app.post("/api/edits", response_model=schemas.RevisionResponse)
    def post_edit(body: schemas.EditRequest):
        with state.lock:
            state.check_revision(body.revision)
            data = body.op.model_dump(exclude_none=True)
            targets = data.pop("targets", None)
            if targets is not None:
                data["targets"] = tuple(targets)
            try:
                op = EditOp(**data)
            except (TypeError, ValueError) as exc:
                raise EditError(str(exc)) from exc
            ontology = state.project.apply_edit(op)
            state.persist()
            return schemas.RevisionResponse(
                revision=state.project.revision, created_id=ontology.last_created_id
            )

    @app.post("/api/edits/undo", response_model=schemas.RevisionResponse)
    def post_undo(body: schemas.UndoRequest | None = None):
        with state.lock:
            state.check_revision(body.revision if body else None)
            state.project.undo_edit()
            state.persist()
            return schemas.RevisionResponse(revision=state.project.revision)

    # --- rules -------------------------------------------------------------------

    @app.get("/api/rules/manual", response_model=schemas.ManualRulesResponse)
    def get_manual_rules():
        with state.lock:
            return schemas.ManualRulesResponse(
                text=state.project.manual_rules, revision=state.project.revision
            )

    @app.put("/api/rules/manual", response_model=schemas.ManualRulesResponse)
    def put_manual_rules(body: schemas.ManualRulesBody):
        with state.lock:
            state.check_revision(body.revision)
            state.project.set_manual_rules(body.text)
            state.persist()
            return schemas.ManualRulesResponse(
                text=state.project.manual_rules, revision=state.project.revision
            )

    @app.get("/api/rules/{category}", response_model=schemas.RuleSpecResponse)
    def get_rule_spec(category: str):
        with state.lock:
            project = state.project
            spec = project.rule_specs.get(category)
            if spec is None:
                labels = project.ontology.labels() if project.ontology else set()
                if category not in labels:
                    raise NotFoundError(f"unknown category {category!r}")
                spec = CategoryRuleSpec(category=category)
            try:
                compiled = print_program(compile_spec(spec, project.tokenizer))
            except CompileError:
                compiled = ""
            return schemas.RuleSpecResponse(
                category=category,
                positives=[list(clause) for clause in spec.positives],
                negatives=[list(clause) for clause in spec.negatives],
                compiled=compiled,
                default_program=print_program(default_rules_for_label(category, project.tokenizer)),
                revision=project.revision,
            )

    @app.put("/api/rules/{category}", response_model=schemas.RuleSpecResponse)
    def put_rule_spec(category: str, body: schemas.RuleSpecBody):
        with state.lock:
            state.check_revision(body.revision)
            spec = CategoryRuleSpec(
                category=category,
                positives=tuple(tuple(clause) for clause in body.positives),
                negatives=tuple(tuple(clause) for clause in body.negatives),
            )
            compiled = state.project.set_rule_spec(spec)
            state.persist()
            return schemas.RuleSpecResponse(
                category=category,
                positives=body.positives,
                negatives=body.negatives,
                compiled=print_program(compiled),
                default_program=print_program(default_rules_for_label(category, state.project.tokenizer)),
                revision=state.project.revision,
            )

    # --- classification -------------------------------------------------------------

    @app.post("/api/classify", response_model=schemas.ClassifyResponse)
    def post_classify(body: schemas.ClassifyRequest | None = None):
        with state.lock:
            state.check_revision(body.revision if body else None)
            # snapshot, evaluate outside the lock, then publish
            project = state.project
            snapshot_revision = project.revision
            program = project.assemble_program()
            index = project.index()
            ontology = project.require_ontology()
        from ..rules import classify_corpus

        result = classify_corpus(program, index, ontology)
        with state.lock:
            project = state.project
            previous = (project.assignments, project.assignments_stale)
            project.assignments = result.assignments
            project.assignments_stale = project.revision != snapshot_revision
            if (project.assignments, project.assignments_stale) != previous:
                project.bump()
                state.persist()
            return schemas.ClassifyResponse(
                revision=project.revision,
                counts=result.counts,
                total=len(result.assignments),
                warnings=result.warnings,
            )

    # --- documents ---------------------------------------------------------------

    @app.get("/api/categories/{node_id}/documents", response_model=schemas.CategoryDocumentsResponse)
    def get_category_documents(node_id: str):
        with state.lock:
            project = state.project
            ontology = project.require_ontology()
            node = ontology.find(node_id)  # UnknownNodeError -> 404
            doc_ids = sorted(
                {a.doc_id for a in project.assignments if a.category == node.label}
            )
            documents = [
                schemas.DocumentSnippet(doc_id=doc_id, snippet=snippet_for(project, node.label, doc_id))
                for doc_id in doc_ids
            ]
            return schemas.CategoryDocumentsResponse(
                id=node.id,
                label=node.label,
                doc_ids=doc_ids,
                documents=documents,
                assignments_stale=project.assignments_stale,
            )

    @app.get("/api/documents/{doc_id}", response_model=schemas.DocumentResponse)
    def get_document(doc_id: str):
        with state.lock:
            corpus = state.project.corpus()
            if doc_id not in corpus.by_id:
                raise NotFoundError(f"unknown document {doc_id!r}")
            doc = corpus.doc(doc_id)
            return schemas.DocumentResponse(id=doc.id, source=doc.source, text=doc.text)

    # --- reclustering ---------------------------------------------------------------

    @app.post("/api/recluster", response_model=schemas.RevisionResponse)
    def post_recluster(body: schemas.ReclusterRequest):
        with state.lock:
            state.check_revision(body.revision)
            project = state.project
            params = (
                ClusterParams(**body.params.model_dump())
                if body.params is not None
                else (project.cluster_params or ClusterParams())
            )
            try:
                recluster_project(project, body.code, params, reset_edits=body.reset_edits)
            except ValueError as exc:
                raise NotFoundError(str(exc)) from exc
            except ProjectError as exc:
                raise ConflictError(str(exc)) from exc
            state.persist()
            return schemas.RevisionResponse(revision=project.revision)

    # --- exports ---------------------------------------------------------------------

    @app.get("/api/export/{format}")
    def get_export(format: str):
        with state.lock:
            project = state.project
            key = format.lower()
            if key in ("tree-json", "dot", "csv"):
                ontology = project.require_ontology()
                try:
                    text = export_schema(ontology, key)
                except ValueError as exc:
                    raise NotFoundError(str(exc)) from exc
                media = "application/json" if key == "tree-json" else (
                    "text/vnd.graphviz" if key == "dot" else "text/csv"
                )
                return PlainTextResponse(text, media_type=media)
            if key == "typology-dot":
                return PlainTextResponse(
                    project.require_typology().to_dot(), media_type="text/vnd.graphviz"
                )
            if key == "matrix-csv":
                return PlainTextResponse(project.matrix().to_csv_triplets(), media_type="text/csv")
            raise NotFoundError(f"unknown export format {format!r}")

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app

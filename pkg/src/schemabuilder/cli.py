"""Command-line pipeline: thin wrappers over the core package.

Every state transition the HTTP API offers is also reachable here through
files: edits apply from a line-delimited log, rule specs from JSON files,
manual rules from plain text. Exit codes: 0 success, 1 domain error,
2 usage error.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from .clustering import ClusterParams
from .ontology import EditError, EditOp, StaleLogError, export_schema, validate
from .project import (
    PipelineError,
    Project,
    ProjectError,
    ProjectVersionError,
    cluster_project,
    ingest_project,
    load_project,
    recluster_project,
    save_project,
    validate_manual_rules,
)
from .corpus import IngestError, TokenizerConfig
from .rules import (
    CategoryRuleSpec,
    CompileError,
    RuleError,
    compile_spec,
    generate_match_rules,
    generate_parent_child_rules,
    print_program,
)
from .vectorize import FeatureConfig, FeatureSelectionError

_DOMAIN_ERRORS = (
    ProjectError,
    ProjectVersionError,
    PipelineError,
    IngestError,
    EditError,
    StaleLogError,
    RuleError,
    CompileError,
    FeatureSelectionError,
    ValueError,
)


def domain_errors_exit_1(command):
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except _DOMAIN_ERRORS as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)

    return wrapper


def _load(project_path: str) -> Project:
    project = load_project(project_path)
    for warning in project.load_warnings:
        click.echo(f"warning: {warning}", err=True)
    return project


project_option = click.option(
    "--project", "project_path", required=True, type=click.Path(), help="project file (JSON)"
)


@click.group()
def main():
    """Build classification schemas from a document corpus."""


@main.command()
@click.argument("source", type=click.Path(exists=True))
@project_option
@click.option("--name", default=None, help="project name (default: source stem)")
@click.option("--max-n", default=3, show_default=True, help="largest n-gram arity to index")
@click.option("--fold-accents/--no-fold-accents", default=True, show_default=True)
@domain_errors_exit_1
def ingest(source, project_path, name, max_n, fold_accents):
    """Load a corpus (directory of .txt files or a JSONL record file)."""
    tokenizer = TokenizerConfig(fold_accents=fold_accents)
    project = ingest_project(source, name=name, tokenizer=tokenizer, max_n=max_n)
    save_project(project, project_path)
    click.echo(f"ingested {len(project.corpus())} documents from {source}")


def cluster_params_options(command):
    for decorator in reversed(
        [
            click.option("--k", default=10, show_default=True, help="clusters per level"),
            click.option("--depth", default=2, show_default=True, help="recursion levels"),
            click.option("--seed", default=0, show_default=True, help="RNG seed"),
            click.option("--restarts", default=10, show_default=True),
            click.option("--max-iter", default=100, show_default=True),
            click.option("--min-split", default=None, type=int, help="do not recurse into smaller clusters (default 2k)"),
            click.option("--min-size", default=None, type=int),
            click.option("--max-size", default=None, type=int),
        ]
    ):
        command = decorator(command)
    return command


def _params(k, depth, seed, restarts, max_iter, min_split, min_size, max_size) -> ClusterParams:
    return ClusterParams(
        k=k, depth=depth, seed=seed, restarts=restarts, max_iter=max_iter,
        min_split=min_split, min_size=min_size, max_size=max_size,
    )


@main.command()
@project_option
@cluster_params_options
@click.option("--min-df", default=1, show_default=True)
@click.option("--max-df-ratio", default=1.0, show_default=True)
@click.option("--max-features", default=None, type=int)
@click.option("--stopwords-file", default=None, type=click.Path(exists=True))
@domain_errors_exit_1
def cluster(project_path, k, depth, seed, restarts, max_iter, min_split, min_size, max_size,
            min_df, max_df_ratio, max_features, stopwords_file):
    """Build the feature matrix and the typology; initialize the schema."""
    project = _load(project_path)
    stopwords = frozenset()
    if stopwords_file:
        stopwords = frozenset(
            line.strip() for line in Path(stopwords_file).read_text(encoding="utf-8").splitlines() if line.strip()
        )
    feature_config = FeatureConfig(
        min_df=min_df, max_df_ratio=max_df_ratio, max_features=max_features, stopwords=stopwords
    )
    params = _params(k, depth, seed, restarts, max_iter, min_split, min_size, max_size)
    typology = cluster_project(project, params, feature_config)
    save_project(project, project_path)
    leaves = len(typology.leaves())
    click.echo(f"typology built: {len(typology.root.children)} top clusters, {leaves} leaves")
    for code, message in typology.warnings:
        click.echo(f"warning: {code or 'root'}: {message}", err=True)


@main.command()
@click.argument("code")
@project_option
@cluster_params_options
@click.option("--reset-edits", is_flag=True, help="drop the edit log if it no longer applies")
@domain_errors_exit_1
def recluster(code, project_path, k, depth, seed, restarts, max_iter, min_split, min_size,
              max_size, reset_edits):
    """Rebuild one typology subtree (empty CODE string = the root)."""
    project = _load(project_path)
    params = _params(k, depth, seed, restarts, max_iter, min_split, min_size, max_size)
    recluster_project(project, code, params, reset_edits=reset_edits)
    save_project(project, project_path)
    click.echo(f"reclustered {code or 'root'}")


@main.group()
def edit():
    """Apply or undo schema edit operations."""


@edit.command("apply")
@click.argument("log_file", type=click.Path(exists=True))
@project_option
@domain_errors_exit_1
def edit_apply(log_file, project_path):
    """Apply a line-delimited JSON edit log to the schema."""
    project = _load(project_path)
    lines = [line for line in Path(log_file).read_text(encoding="utf-8").splitlines() if line.strip()]
    for position, line in enumerate(lines):
        try:
            op = EditOp.from_dict(json.loads(line))
        except (json.JSONDecodeError, KeyError, ValueError) as exc:
            raise EditError(f"{log_file}:{position + 1}: bad edit record: {exc}") from exc
        try:
            project.apply_edit(op)
        except EditError as exc:
            raise EditError(f"{log_file}:{position + 1}: {exc}") from exc
    save_project(project, project_path)
    click.echo(f"applied {len(lines)} edits; revision {project.revision}")


@edit.command("undo")
@project_option
@domain_errors_exit_1
def edit_undo(project_path):
    """Pop the last edit and replay the log."""
    project = _load(project_path)
    project.undo_edit()
    save_project(project, project_path)
    click.echo(f"undid last edit; revision {project.revision}")


@main.group()
def rules():
    """Generate, compile, check, and store classification rules."""


@rules.command("gen-defaults")
@project_option
@domain_errors_exit_1
def rules_gen_defaults(project_path):
    """Generate match rules and parent-child propagation rules."""
    project = _load(project_path)
    ontology = project.require_ontology()
    match_rules, warnings = generate_match_rules(ontology, project.tokenizer)
    propagation = generate_parent_child_rules(ontology)
    project.set_generated_rules(print_program(match_rules + propagation))
    save_project(project, project_path)
    click.echo(f"generated {len(match_rules)} match rules and {len(propagation)} parent-child rules")
    for warning in warnings:
        click.echo(f"warning: {warning}", err=True)


@rules.command("compile")
@project_option
@click.option("--category", default=None, help="compile a single category's spec")
@domain_errors_exit_1
def rules_compile(project_path, category):
    """Print the compiled rule program for stored specs."""
    project = _load(project_path)
    if category is not None:
        spec = project.rule_specs.get(category, CategoryRuleSpec(category=category))
        compiled = compile_spec(spec, project.tokenizer)
    else:
        compiled = []
        for name in sorted(project.rule_specs):
            compiled.extend(compile_spec(project.rule_specs[name], project.tokenizer))
    click.echo(print_program(compiled), nl=False)


@rules.command("check")
@click.argument("rule_file", type=click.Path(exists=True))
@domain_errors_exit_1
def rules_check(rule_file):
    """Parse, validate, and stratify a rule file."""
    parsed = validate_manual_rules(Path(rule_file).read_text(encoding="utf-8"))
    click.echo(f"OK: {len(parsed)} rules")


@rules.command("set")
@click.argument("category")
@click.option("--spec-file", required=True, type=click.Path(exists=True),
              help='JSON file: {"positives": [[...]], "negatives": [[...]]}')
@project_option
@domain_errors_exit_1
def rules_set(category, spec_file, project_path):
    """Store a category's positive/negative n-gram spec."""
    project = _load(project_path)
    data = json.loads(Path(spec_file).read_text(encoding="utf-8"))
    spec = CategoryRuleSpec(
        category=category,
        positives=tuple(tuple(clause) for clause in data.get("positives", ())),
        negatives=tuple(tuple(clause) for clause in data.get("negatives", ())),
    )
    compiled = project.set_rule_spec(spec)
    save_project(project, project_path)
    click.echo(f"stored spec for {category!r} ({len(compiled)} compiled rules)")


@rules.command("set-manual")
@click.argument("rule_file", type=click.Path(exists=True))
@project_option
@domain_errors_exit_1
def rules_set_manual(rule_file, project_path):
    """Store manual rule text (validated before acceptance)."""
    project = _load(project_path)
    project.set_manual_rules(Path(rule_file).read_text(encoding="utf-8"))
    save_project(project, project_path)
    click.echo("manual rules stored")


@main.command()
@project_option
@domain_errors_exit_1
def classify(project_path):
    """Evaluate the rule program and store the assignments."""
    project = _load(project_path)
    project.require_typology()
    result = project.classify()
    save_project(project, project_path)
    click.echo(f"{len(result.assignments)} assignments")
    for label in sorted(result.counts):
        click.echo(f"{result.counts[label]}\t{label}")
    for warning in result.warnings:
        click.echo(f"warning: {warning}", err=True)


@main.command("validate")
@project_option
@domain_errors_exit_1
def validate_command(project_path):
    """Report exclusivity violations, coverage gaps, and balance."""
    project = _load(project_path)
    ontology = project.require_ontology()
    corpus_ids = {doc.id for doc in project.corpus()}
    report = validate(ontology, corpus_ids)
    click.echo(json.dumps(report.to_dict(), indent=2, ensure_ascii=False, sort_keys=True))


@main.command()
@click.argument("format", type=click.Choice(["tree-json", "dot", "csv", "typology-dot", "matrix-csv"]))
@project_option
@click.option("-o", "--output", default=None, type=click.Path(), help="write to a file instead of stdout")
@domain_errors_exit_1
def export(format, project_path, output):
    """Export the schema (tree-json / dot / csv) or debug views."""
    project = _load(project_path)
    if format in ("tree-json", "dot", "csv"):
        text = export_schema(project.require_ontology(), format)
    elif format == "typology-dot":
        text = project.require_typology().to_dot()
    else:
        text = project.matrix().to_csv_triplets()
    if output:
        Path(output).write_text(text, encoding="utf-8")
        click.echo(f"wrote {output}", err=True)
    else:
        click.echo(text, nl=False)


@main.command()
@project_option
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@click.option("--static-dir", default=None, type=click.Path(),
              help="directory of UI assets to serve at / (default: ./frontend/dist if present)")
@domain_errors_exit_1
def serve(project_path, host, port, static_dir):
    """Serve the project over HTTP for the designer UI."""
    import uvicorn

    from .service import create_app

    project = _load(project_path)
    if static_dir is None:
        candidate = Path.cwd() / "frontend" / "dist"
        static_dir = candidate if candidate.is_dir() else None
    app = create_app(project, path=project_path, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")


if __name__ == "__main__":
    main()

import json
from pathlib import Path

import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

from conftest import grid_project
from schemabuilder.cli import main
from schemabuilder.project import load_project, save_project
from schemabuilder.service import create_app
from test_project import write_topic_corpus

FIXTURE = Path(__file__).parent / "fixtures" / "concorso_interno_rules.txt"


@pytest.fixture
def runner():
    return CliRunner()


def run(runner, args, **kwargs):
    result = runner.invoke(main, args, catch_exceptions=False, **kwargs)
    return result


class TestIngestCluster:
    def test_ingest_then_cluster(self, runner, tmp_path):
        corpus = write_topic_corpus(tmp_path, n_topics=3, docs_per_topic=6)
        project_path = tmp_path / "p.json"
        result = run(runner, ["ingest", str(corpus), "--project", str(project_path)])
        assert result.exit_code == 0, result.output
        assert "18 documents" in result.output
        result = run(
            runner,
            ["cluster", "--project", str(project_path), "--k", "3", "--depth", "1", "--seed", "3", "--restarts", "3"],
        )
        assert result.exit_code == 0, result.output
        project = load_project(project_path)
        assert len(project.typology.root.children) == 3

    def test_rerun_same_seed_identical_hash(self, runner, tmp_path):
        corpus = write_topic_corpus(tmp_path, n_topics=3, docs_per_topic=6)
        args = lambda p: [
            "cluster", "--project", str(p), "--k", "3", "--depth", "1", "--seed", "3", "--restarts", "3",
        ]
        first_path, second_path = tmp_path / "a.json", tmp_path / "b.json"
        for path in (first_path, second_path):
            run(runner, ["ingest", str(corpus), "--project", str(path)])
            run(runner, args(path))
        assert load_project(first_path).project_hash() == load_project(second_path).project_hash()

    def test_ingest_empty_directory_fails(self, runner, tmp_path):
        empty = tmp_path / "vuota"
        empty.mkdir()
        result = run(runner, ["ingest", str(empty), "--project", str(tmp_path / "p.json")])
        assert result.exit_code == 1
        assert "error" in result.stderr

    def test_classify_before_cluster(self, runner, tmp_path):
        corpus = write_topic_corpus(tmp_path, n_topics=2, docs_per_topic=3)
        project_path = tmp_path / "p.json"
        run(runner, ["ingest", str(corpus), "--project", str(project_path)])
        result = run(runner, ["classify", "--project", str(project_path)])
        assert result.exit_code == 1
        assert "no typology" in result.stderr

    def test_unknown_subcommand_exit_2(self, runner):
        result = runner.invoke(main, ["frullatore"])
        assert result.exit_code == 2


class TestRulesCommands:
    def test_rules_check_reference_file(self, runner):
        result = run(runner, ["rules", "check", str(FIXTURE)])
        assert result.exit_code == 0
        assert "OK: 6 rules" in result.output

    def test_rules_check_malformed(self, runner, tmp_path):
        bad = tmp_path / "bad.rules"
        bad.write_text('positive("c", D) :- onegram(D, "x", _, _, _', encoding="utf-8")
        result = run(runner, ["rules", "check", str(bad)])
        assert result.exit_code == 1
        assert "line 1" in result.stderr

    def test_rules_set_and_compile(self, runner, tmp_path):
        project = grid_project(tmp_path)
        project_path = tmp_path / "p.json"
        save_project(project, project_path)
        spec_file = tmp_path / "spec.json"
        spec_file.write_text(
            json.dumps(
                {
                    "positives": [["concorso interno"], ["selezione interna verticale"]],
                    "negatives": [["liquidazione compenso"]],
                }
            ),
            encoding="utf-8",
        )
        result = run(
            runner,
            ["rules", "set", "concorso interno", "--spec-file", str(spec_file), "--project", str(project_path)],
        )
        assert result.exit_code == 0, result.output
        compiled = run(
            runner, ["rules", "compile", "--project", str(project_path), "--category", "concorso interno"]
        )
        assert 'positive("concorso interno", IdDoc)' in compiled.output
        assert 'not negative("concorso interno", IdDoc)' in compiled.output

    def test_gen_defaults_then_classify(self, runner, tmp_path):
        project = grid_project(tmp_path)
        project_path = tmp_path / "p.json"
        save_project(project, project_path)
        log = tmp_path / "edits.jsonl"
        log.write_text(
            json.dumps({"kind": "rename", "target": "#0#0", "new_label": "tema0x0"}) + "\n",
            encoding="utf-8",
        )
        assert run(runner, ["edit", "apply", str(log), "--project", str(project_path)]).exit_code == 0
        assert run(runner, ["rules", "gen-defaults", "--project", str(project_path)]).exit_code == 0
        result = run(runner, ["classify", "--project", str(project_path)])
        assert result.exit_code == 0, result.output
        assert "tema0x0" in result.output
        project = load_project(project_path)
        assert any(a.category == "tema0x0" for a in project.assignments)

    def test_set_manual(self, runner, tmp_path):
        project = grid_project(tmp_path)
        project_path = tmp_path / "p.json"
        save_project(project, project_path)
        rules_file = tmp_path / "manual.rules"
        rules_file.write_text(FIXTURE.read_text(encoding="utf-8"), encoding="utf-8")
        result = run(runner, ["rules", "set-manual", str(rules_file), "--project", str(project_path)])
        assert result.exit_code == 0
        assert load_project(project_path).manual_rules == FIXTURE.read_text(encoding="utf-8")


class TestEditCommands:
    def test_apply_and_undo(self, runner, tmp_path):
        project = grid_project(tmp_path)
        project_path = tmp_path / "p.json"
        save_project(project, project_path)
        baseline = load_project(project_path).ontology.to_json()
        log = tmp_path / "edits.jsonl"
        records = [
            {"kind": "aggregate", "targets": ["#0#0", "#0#4"], "new_label": "#A"},
            {"kind": "rename", "target": "#0#1", "new_label": "categorie personale"},
        ]
        log.write_text("\n".join(json.dumps(r) for r in records), encoding="utf-8")
        result = run(runner, ["edit", "apply", str(log), "--project", str(project_path)])
        assert result.exit_code == 0
        assert "applied 2 edits" in result.output
        run(runner, ["edit", "undo", "--project", str(project_path)])
        run(runner, ["edit", "undo", "--project", str(project_path)])
        assert load_project(project_path).ontology.to_json() == baseline

    def test_apply_bad_record_reports_line(self, runner, tmp_path):
        project = grid_project(tmp_path)
        project_path = tmp_path / "p.json"
        save_project(project, project_path)
        log = tmp_path / "edits.jsonl"
        log.write_text('{"kind": "reduce", "target": "#7#7"}\n', encoding="utf-8")
        result = run(runner, ["edit", "apply", str(log), "--project", str(project_path)])
        assert result.exit_code == 1
        assert "edits.jsonl:1" in result.stderr


class TestExportCommands:
    def test_export_stdout_and_file(self, runner, tmp_path):
        project = grid_project(tmp_path)
        project_path = tmp_path / "p.json"
        save_project(project, project_path)
        result = run(runner, ["export", "csv", "--project", str(project_path)])
        assert result.output.startswith("id,parent_id,label,kind")
        out_file = tmp_path / "schema.dot"
        run(runner, ["export", "dot", "--project", str(project_path), "-o", str(out_file)])
        assert "digraph" in out_file.read_text(encoding="utf-8")

    def test_export_tree_json_round_trips(self, runner, tmp_path):
        project = grid_project(tmp_path)
        project_path = tmp_path / "p.json"
        save_project(project, project_path)
        result = run(runner, ["export", "tree-json", "--project", str(project_path)])
        from schemabuilder.ontology import import_schema

        assert import_schema(result.output).to_json() == load_project(project_path).ontology.to_json()


class TestApiCliParity:
    def test_same_transitions_converge(self, runner, tmp_path):
        """The same edit + rule + classify sequence through the API and
        through CLI + files lands on identical project serializations."""
        api_dir = tmp_path / "api"
        cli_dir = tmp_path / "cli"
        api_dir.mkdir()
        cli_dir.mkdir()

        ops = [
            {"kind": "aggregate", "targets": ["#0#0", "#0#4"], "new_label": "#A",
             "author": "ke", "timestamp": "2026-08-08T00:00:00Z"},
            {"kind": "rename", "target": "#1#0", "new_label": "concorso interno",
             "author": "ke", "timestamp": "2026-08-08T00:00:01Z"},
        ]
        spec_body = {
            "positives": [["concorso interno"], ["tema1x0"]],
            "negatives": [["liquidazione compenso"]],
        }
        manual_text = 'positive("concorso interno", D) :- onegram(D, "comune", _, _, _).\n'

        # --- via HTTP API
        api_project = grid_project(api_dir)
        api_path = api_dir / "p.json"
        save_project(api_project, api_path)
        client = TestClient(create_app(api_project, path=api_path))
        for op in ops:
            assert client.post("/api/edits", json={"op": op}).status_code == 200
        assert client.put("/api/rules/concorso interno", json=spec_body).status_code == 200
        assert client.put("/api/rules/manual", json={"text": manual_text}).status_code == 200
        assert client.post("/api/classify", json={}).status_code == 200

        # --- via CLI + files
        cli_project = grid_project(cli_dir)
        cli_path = cli_dir / "p.json"
        save_project(cli_project, cli_path)
        log = cli_dir / "edits.jsonl"
        log.write_text("\n".join(json.dumps(op) for op in ops), encoding="utf-8")
        assert run(runner, ["edit", "apply", str(log), "--project", str(cli_path)]).exit_code == 0
        spec_file = cli_dir / "spec.json"
        spec_file.write_text(json.dumps(spec_body), encoding="utf-8")
        assert run(
            runner,
            ["rules", "set", "concorso interno", "--spec-file", str(spec_file), "--project", str(cli_path)],
        ).exit_code == 0
        manual_file = cli_dir / "manual.rules"
        manual_file.write_text(manual_text, encoding="utf-8")
        assert run(runner, ["rules", "set-manual", str(manual_file), "--project", str(cli_path)]).exit_code == 0
        assert run(runner, ["classify", "--project", str(cli_path)]).exit_code == 0

        api_dict = load_project(api_path).to_dict()
        cli_dict = load_project(cli_path).to_dict()
        # the corpus lives in per-variant directories; everything else must match
        api_dict.pop("corpus_source")
        cli_dict.pop("corpus_source")
        assert api_dict == cli_dict

    def test_put_compiled_matches_cli_compile(self, runner, tmp_path):
        project = grid_project(tmp_path)
        project_path = tmp_path / "p.json"
        save_project(project, project_path)
        client = TestClient(create_app(project, path=project_path))
        client.post(
            "/api/edits", json={"op": {"kind": "rename", "target": "#0#0", "new_label": "concorso interno"}}
        )
        body = {"positives": [["concorso interno"]], "negatives": [["render vacante", "seguito concorso"]]}
        compiled_api = client.put("/api/rules/concorso interno", json=body).json()["compiled"]
        result = run(
            runner, ["rules", "compile", "--project", str(project_path), "--category", "concorso interno"]
        )
        assert result.output == compiled_api

import json

import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

import cultiverse
from cultiverse import ingest
from cultiverse.cli import main
from cultiverse.gateway import MockProvider, ProviderConfig
from cultiverse.service import create_app


@pytest.fixture
def runner():
    return CliRunner()


def test_validate_fixture_accepts(runner):
    result = runner.invoke(main, ["validate", str(cultiverse.fixture_root())])
    assert result.exit_code == 0
    assert "accepted" in result.output


def test_validate_rejects_bad_rhetoric(runner, dataset_root):
    norms = (dataset_root / "norms.tsv").read_text(encoding="utf-8")
    (dataset_root / "norms.tsv").write_text(
        norms.replace("Homophony", "Allegory", 1), encoding="utf-8"
    )
    result = runner.invoke(main, ["validate", str(dataset_root)])
    assert result.exit_code == 1
    assert "InvalidRhetoric" in result.output


def test_validate_missing_file_exits_2(runner, dataset_root):
    (dataset_root / "elements.tsv").unlink()
    result = runner.invoke(main, ["validate", str(dataset_root)])
    assert result.exit_code == 2


def test_ingest_json_report(runner):
    result = runner.invoke(main, ["ingest", str(cultiverse.fixture_root()), "--json"])
    assert result.exit_code == 0
    report = json.loads(result.output)
    assert report["accepted"] is True
    assert report["violations"] == []


def test_stats_json_matches_http_endpoint(runner, tmp_path):
    result = runner.invoke(main, ["stats", str(cultiverse.fixture_root()), "--json"])
    assert result.exit_code == 0
    cli_body = json.loads(result.output)
    assert cli_body["frequency"]["monkey"] == 8

    script = tmp_path / "script.json"
    script.write_text("{}", encoding="utf-8")
    app = create_app(
        str(cultiverse.fixture_root()), str(tmp_path / "events.jsonl"),
        ProviderConfig(kind="mock", script_path=str(script)),
    )
    http_edges = TestClient(app).get("/analytics/co-occurrence").json()["edges"]
    assert cli_body["edges"] == http_edges


def test_import_detections_no_write_leaves_root_untouched(runner, dataset_root):
    before = (dataset_root / "paintings.json").read_bytes()
    result = runner.invoke(main, [
        "import-detections", str(dataset_root), str(dataset_root / "detections.json"),
        "--map", str(dataset_root / "label_map.json"),
        "--min-confidence", "0.5", "--json", "--no-write",
    ])
    assert result.exit_code == 0
    summary = json.loads(result.output)
    assert summary["added"] == 2
    assert (dataset_root / "paintings.json").read_bytes() == before


def test_import_detections_write_persists(runner, dataset_root):
    result = runner.invoke(main, [
        "import-detections", str(dataset_root), str(dataset_root / "detections.json"),
        "--map", str(dataset_root / "label_map.json"), "--min-confidence", "0.5",
    ])
    assert result.exit_code == 0
    reloaded = ingest.load_dataset(dataset_root)
    monkeys_in_p005 = [
        a for a in reloaded.paintings["p005"].annotations if a.element == "monkey"
    ]
    assert len(monkeys_in_p005) >= 2  # fixture annotation plus the import


def test_mock_script_covers_both_walkthroughs(runner, tmp_path):
    out = tmp_path / "script.json"
    result = runner.invoke(main, [
        "mock-script", str(cultiverse.fixture_root()), "--out", str(out),
    ])
    assert result.exit_code == 0
    provider = MockProvider(str(out))
    assert len(provider.replies) == 8  # 5 case-1 prompts + 3 case-2 prompts
    assert provider.fallback == []

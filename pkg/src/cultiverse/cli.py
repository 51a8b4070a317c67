"""Admin command line: dataset validation, detection import, statistics,
mock-script generation, and the HTTP server."""

from __future__ import annotations

import json
import os
import sys

import click

from . import analytics, ingest
from .gateway import ProviderConfig
from .model import category_census
from .service import edges_to_list


def _report_text(report: ingest.ValidationReport) -> str:
    lines = [f"counts: {json.dumps(report.counts)}"]
    for v in report.violations:
        lines.append(f"violation: {v.entity_id}: {v.rule}: {v.message}")
    for w in report.warnings:
        lines.append(f"warning: {w}")
    lines.append("accepted" if report.accepted else "REJECTED")
    return "\n".join(lines)


def _emit_report(report: ingest.ValidationReport, as_json: bool) -> None:
    if as_json:
        click.echo(json.dumps(report.to_dict(), ensure_ascii=False, indent=2))
    else:
        click.echo(_report_text(report))
    if not report.accepted:
        sys.exit(1)


@click.group()
def main():
    """Cultural-norm dataset and service administration."""


@main.command("ingest")
@click.argument("root", type=click.Path(exists=True))
@click.option("--json", "as_json", is_flag=True, help="machine-readable report")
def ingest_cmd(root, as_json):
    """Load a dataset root and print the validation report."""
    _run_validation(root, as_json)


@main.command()
@click.argument("root", type=click.Path(exists=True))
@click.option("--json", "as_json", is_flag=True)
def validate(root, as_json):
    """Validate a dataset root; exit 0 only on zero violations."""
    _run_validation(root, as_json)


def _run_validation(root, as_json):
    try:
        _dataset, report = ingest.validate_root(root)
    except (ingest.FileMissing, ingest.ParseError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    _emit_report(report, as_json)


@main.command("import-detections")
@click.argument("root", type=click.Path(exists=True))
@click.argument("detections_file", type=click.Path(exists=True))
@click.option("--map", "map_file", required=True, type=click.Path(exists=True),
              help="JSON file mapping detector labels to element ids")
@click.option("--min-confidence", default=ingest.DEFAULT_MIN_CONFIDENCE, type=float)
@click.option("--json", "as_json", is_flag=True)
@click.option("--write/--no-write", default=True,
              help="save the updated paintings file back to the root")
def import_detections(root, detections_file, map_file, min_confidence, as_json, write):
    """Import detector output into the catalog as Detected annotations."""
    dataset = ingest.load_dataset(root)
    records = ingest.load_detections(detections_file)
    with open(map_file, encoding="utf-8") as fh:
        label_map = json.load(fh)
    summary = dataset.import_detections(records, label_map, min_confidence)
    if write:
        dataset.save(root)
    if as_json:
        click.echo(json.dumps(summary.to_dict(), ensure_ascii=False, indent=2))
    else:
        for key, value in summary.to_dict().items():
            click.echo(f"{key}: {value}")


@main.command()
@click.argument("root", type=click.Path(exists=True))
@click.option("--json", "as_json", is_flag=True)
def stats(root, as_json):
    """Element frequency and co-occurrence tables."""
    dataset = ingest.load_dataset(root)
    frequency = analytics.element_frequency(dataset)
    edges = edges_to_list(dataset)
    census = {c.value: n for c, n in category_census(dataset.elements).items()}
    if as_json:
        click.echo(json.dumps(
            {"frequency": dict(sorted(frequency.items())), "edges": edges, "census": census},
            ensure_ascii=False, indent=2,
        ))
        return
    click.echo("element frequency:")
    for element_id, count in sorted(frequency.items()):
        click.echo(f"  {element_id}: {count}")
    click.echo("co-occurrence edges:")
    for edge in edges:
        click.echo(f"  {edge['a']} -- {edge['b']}: {edge['count']}")
    click.echo(f"category census: {json.dumps(census)}")


@main.command("mock-script")
@click.argument("root", type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path(),
              help="where to write the mock provider script")
def mock_script(root, out):
    """Write the canned walkthrough script for the mock provider."""
    from .replays import write_mock_script

    dataset = ingest.load_dataset(root)
    write_mock_script(dataset, out)
    click.echo(f"wrote {out}")


@main.command()
@click.option("--root", required=True, type=click.Path(exists=True))
@click.option("--port", default=8000, type=int)
@click.option("--host", default="127.0.0.1")
@click.option("--llm", "llm_config", type=click.Path(exists=True),
              help="JSON provider config; defaults to CULTIVERSE_LLM_* env vars")
@click.option("--store", type=click.Path(),
              help="event log path; defaults to CULTIVERSE_STORE_PATH or ./events.jsonl")
@click.option("--image-store", type=click.Path(), default=None)
def serve(root, port, host, llm_config, store, image_store):
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    if llm_config:
        with open(llm_config, encoding="utf-8") as fh:
            config = ProviderConfig(**json.load(fh))
    else:
        config = ProviderConfig.from_env()
    store_path = store or os.environ.get("CULTIVERSE_STORE_PATH", "events.jsonl")
    app = create_app(root, store_path, config, image_store=image_store)
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()

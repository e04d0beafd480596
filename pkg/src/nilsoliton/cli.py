"""Command-line client for the nilsoliton service.

The CLI never computes anything itself: it reads input files, posts them to
the HTTP API (a remote server via --server, or an in-process instance of
the app by default) and formats the responses.

Exit codes: 0 success, 1 parse/transport errors, 2 validation failure.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import reports
from .documents import DocumentError, parse_document, parse_edge_list, parse_manifest


class ServiceClient:
    """Minimal POST client; in-process ASGI by default, HTTP with --server."""

    def __init__(self, server: str | None = None):
        if server:
            import httpx

            self._client = httpx.Client(base_url=server, timeout=None)
        else:
            import warnings

            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                from starlette.testclient import TestClient

                from .service import app

                self._client = TestClient(app)

    def post(self, path: str, payload: dict) -> dict:
        response = self._client.post(path, json=payload)
        if response.status_code >= 400:
            try:
                detail = response.json().get("detail", response.text)
            except Exception:
                detail = response.text
            raise click.ClickException(f"service error ({response.status_code}): {detail}")
        return response.json()


def _load_text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        click.echo(f"error: cannot read {path}: {exc}", err=True)
        sys.exit(1)


def _load_document(path: str):
    text = _load_text(path)
    try:
        if path.endswith((".txt", ".edges")):
            return parse_edge_list(text, name=Path(path).stem)
        return parse_document(text)
    except DocumentError as exc:
        click.echo(f"error: {path}: {exc}", err=True)
        sys.exit(1)


def _emit(ctx: click.Context, report: dict, renderer) -> None:
    if ctx.obj["format"] == "structured":
        click.echo(json.dumps(report, indent=2))
    else:
        click.echo(renderer(report), nl=False)


@click.group()
@click.option("--server", default=None, help="Base URL of a running service; in-process by default.")
@click.option("--tol", default=1e-8, show_default=True, help="Numerical tolerance for analyses.")
@click.option("--seed", default=0, show_default=True, help="Seed recorded in reports.")
@click.option(
    "--format",
    "output_format",
    type=click.Choice(["text", "structured"]),
    default="text",
    show_default=True,
)
@click.pass_context
def main(ctx, server, tol, seed, output_format):
    """Einstein nilradical toolkit."""
    ctx.ensure_object(dict)
    ctx.obj.update(
        client=ServiceClient(server), tol=tol, seed=seed, format=output_format
    )


@main.command()
@click.argument("path")
@click.option("--analyses", default="validate,ricci,einstein,stratum", show_default=True)
@click.pass_context
def analyze(ctx, path, analyses):
    """Validate a bracket document and run curvature/soliton/stratum analyses."""
    doc = _load_document(path)
    if not hasattr(doc, "to_bracket"):
        click.echo(f"error: {path} is not a bracket document", err=True)
        sys.exit(1)
    payload = {
        "document": doc.emit(),
        "analyses": [a for a in analyses.split(",") if a],
        "tol": ctx.obj["tol"],
        "seed": ctx.obj["seed"],
    }
    response = ctx.obj["client"].post("/analyze", payload)
    _emit(ctx, response["report"], reports.render_analyze_text)
    if not response["valid"]:
        sys.exit(2)


@main.command()
@click.argument("path")
@click.option("--grad-tol", default=1e-9, show_default=True)
@click.option("--max-time", default=1e6, show_default=True)
@click.option("--initial-step", default=1e-2, show_default=True)
@click.option("--rtol", default=1e-10, show_default=True)
@click.option("--max-steps", default=200_000, show_default=True)
@click.option("--sample-every", default=1, show_default=True)
@click.option("--csv", "csv_out", default=None, help="Write the trajectory CSV here.")
@click.pass_context
def flow(ctx, path, grad_tol, max_time, initial_step, rtol, max_steps, sample_every, csv_out):
    """Integrate the moment-map gradient flow from a bracket document."""
    doc = _load_document(path)
    if not hasattr(doc, "to_bracket"):
        click.echo(f"error: {path} is not a bracket document", err=True)
        sys.exit(1)
    payload = {
        "document": doc.emit(),
        "options": {
            "grad_tol": grad_tol,
            "max_time": max_time,
            "initial_step": initial_step,
            "rtol": rtol,
            "max_steps": max_steps,
            "sample_every": sample_every,
        },
    }
    response = ctx.obj["client"].post("/flow", payload)
    report = response["report"]
    if csv_out:
        Path(csv_out).write_text(report["csv"])
    shown = {k: v for k, v in report.items() if k != "csv"}
    _emit(ctx, shown, reports.render_flow_text)


def _graph_payload(ctx, path, grst):
    if (path is None) == (grst is None):
        click.echo("error: provide exactly one of PATH or --grst R S T", err=True)
        sys.exit(1)
    payload: dict = {"tol": ctx.obj["tol"]}
    if grst is not None:
        payload["grst"] = {"r": grst[0], "s": grst[1], "t": grst[2]}
    else:
        doc = _load_document(path)
        if not hasattr(doc, "to_graph"):
            click.echo(f"error: {path} is not a graph document", err=True)
            sys.exit(1)
        payload["document"] = doc.emit()
    return payload


def _graph_command(subcommand):
    @click.argument("path", required=False)
    @click.option("--grst", nargs=3, type=int, default=None, help="Parameters r s t of the one-dominating-edge family.")
    @click.option("--out", default=None, help="Write the emitted document here.")
    @click.pass_context
    def command(ctx, path, grst, out):
        payload = _graph_payload(ctx, path, grst)
        response = ctx.obj["client"].post(f"/graph/{subcommand}", payload)
        report = response["report"]
        _emit(ctx, report, reports.render_graph_text)
        if out:
            emitted = report.get("soliton_document") or report.get("document")
            if emitted is None:
                click.echo("error: nothing to write (no document in report)", err=True)
                sys.exit(2)
            Path(out).write_text(json.dumps(emitted, indent=2) + "\n")

    command.__name__ = subcommand
    return command


@main.group()
def graph():
    """Graph positivity, weightings, solitons and forbidden witnesses."""


for _sub in ("positivity", "weighting", "soliton", "witness", "grst", "matrix"):
    graph.command(name=_sub)(_graph_command(_sub))


@main.command()
@click.argument("manifest_path")
@click.pass_context
def batch(ctx, manifest_path):
    """Run a manifest of documents; aggregation follows manifest order."""
    text = _load_text(manifest_path)
    try:
        items = parse_manifest(text)
    except DocumentError as exc:
        click.echo(f"error: {manifest_path}: {exc}", err=True)
        sys.exit(1)
    base = Path(manifest_path).parent
    payload_items = []
    for item in items:
        doc_path = str(base / item.path) if not Path(item.path).is_absolute() else item.path
        doc = _load_document(doc_path)
        entry = {
            "command": item.command,
            "document": doc.emit(),
            "options": item.options,
        }
        if item.analyses:
            entry["analyses"] = list(item.analyses)
        if item.command == "graph":
            entry["subcommand"] = item.options.get("subcommand", "positivity")
        payload_items.append(entry)
    payload = {"items": payload_items, "tol": ctx.obj["tol"], "seed": ctx.obj["seed"]}
    response = ctx.obj["client"].post("/batch", payload)
    renderers = {
        "analyze": reports.render_analyze_text,
        "flow": reports.render_flow_text,
        "graph": reports.render_graph_text,
    }
    for item, result in zip(items, response["items"]):
        click.echo(f"== {item.path} ==")
        if result["error"]:
            click.echo(f"  error: {result['error']}")
        elif ctx.obj["format"] == "structured":
            shown = {k: v for k, v in result["report"].items() if k != "csv"}
            click.echo(json.dumps(shown, indent=2))
        else:
            shown = {k: v for k, v in result["report"].items() if k != "csv"}
            click.echo(renderers[item.command](shown), nl=False)
    if not response["ok"]:
        sys.exit(1)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8023, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run("nilsoliton.service:app", host=host, port=port)


if __name__ == "__main__":
    main()

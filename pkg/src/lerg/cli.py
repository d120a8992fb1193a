"""Command-line surface.

Subcommands:

  explain      attribution matrices (CSV + JSON + SVG heatmap) per example
  eval         removal/retention metric sweep over a corpus (CSV/JSON/SVG)
  oracle-check run the exactness property suite and report pass/fail
  train-ngram  fit the bundled n-gram model on a JSONL corpus
  serve        expose the model and the explain/eval pipeline over HTTP

All numeric work happens in the shared runner; by default it runs in
process, or with --service URL the explain/eval commands become thin
clients of a running service and write the returned artifacts verbatim.

Exit codes: 0 success, 1 validation error, 2 resource/cap error,
3 model transport error. Operational failures print one JSON object to
stderr. LERG_LOG sets the log level.
"""

from __future__ import annotations

import json
import logging
import os
import re
import sys

import click
import httpx
import pydantic

from .config import ModelSpec, RunConfig
from .errors import LergError, RemoteUnavailable, ValidationError
from .corpus import load_corpus
from .models.ngram import train_ngram
from .oracle import default_instances, run_oracle_suite
from .report import content_hash_file
from .runner import eval_artifacts, explain_artifacts, open_model
from .types import Example, Method

log = logging.getLogger("lerg.cli")


def _model_options(fn):
    for option in reversed(
        [
            click.option("--model", "model_kind", type=click.Choice(["additive", "ngram", "remote"]), required=True),
            click.option("--model-path", default=None, help="spec JSON for additive/ngram models"),
            click.option("--endpoint", default=None, help="HTTP endpoint of a remote model"),
            click.option("--server-cmd", default=None, help="command line of a stdio remote model"),
        ]
    ):
        fn = option(fn)
    return fn


def _run_options(fn):
    for option in reversed(
        [
            click.option("--method", "methods", multiple=True, default=("lerg-s",), help="repeatable"),
            click.option("--samples", default=1000, show_default=True),
            click.option("--max-mask-ratio", default=0.5, show_default=True),
            click.option("--ratios", default="0.1,0.2,0.3,0.4,0.5", show_default=True),
            click.option("--seed", default=0, show_default=True),
            click.option("--out", "out_dir", default="out", show_default=True),
            click.option("--strict/--lenient", default=True, show_default=True),
            click.option("--segmenter", default="whitespace", show_default=True),
            click.option("--reduction", type=click.Choice(["sum", "max"]), default="sum", show_default=True),
            click.option("--trials", default=10, show_default=True, help="random-baseline trials"),
            click.option("--kernel/--no-kernel", default=False, show_default=True, help="distance-kernel regression weights"),
            click.option("--kernel-sigma", default=None, type=float),
            click.option("--service", default=None, help="delegate to a running service at this URL"),
        ]
    ):
        fn = option(fn)
    return fn


def _build_config(model_kind, model_path, endpoint, server_cmd, methods, ratios, **kwargs) -> RunConfig:
    try:
        grid = [float(part) for part in str(ratios).split(",") if part.strip()]
    except ValueError as exc:
        raise ValidationError(f"could not parse --ratios {ratios!r}: {exc}") from exc
    try:
        spec = ModelSpec(kind=model_kind, path=model_path, endpoint=endpoint, server_cmd=server_cmd)
        return RunConfig(model=spec, methods=list(methods), ratios=grid, **kwargs)
    except pydantic.ValidationError as exc:
        first = exc.errors()[0]
        raise ValidationError(str(first.get("msg", exc))) from exc


def _safe_name(name: str) -> str:
    return re.sub(r"[^\w.-]", "_", name)


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    click.echo(f"wrote {path}")


def _select_examples(examples: list[Example], ids: tuple[str, ...]) -> list[Example]:
    if not ids:
        return examples
    by_id = {e.id: e for e in examples}
    missing = [i for i in ids if i not in by_id]
    if missing:
        raise ValidationError(f"unknown example ids: {missing}")
    return [by_id[i] for i in ids]


@click.group()
def cli():
    """Explain and evaluate conditional text generation, model-agnostically."""


@cli.command()
@_model_options
@_run_options
@click.option("--corpus", "corpus_path", required=True)
@click.option("--example", "example_ids", multiple=True, help="explain only these ids")
def explain(corpus_path, example_ids, service, **kwargs):
    """Write attribution matrices for corpus examples."""
    config = _build_config(**kwargs)
    examples, _ = load_corpus(corpus_path, strict=config.strict, segmenter=config.segmenter)
    selected = _select_examples(examples, example_ids)
    input_hash = content_hash_file(corpus_path)
    os.makedirs(config.out_dir, exist_ok=True)
    methods = [Method(name) for name in config.methods]
    if service:
        _explain_via_service(service, config, selected)
        return
    with open_model(config.model) as handle:
        for example in selected:
            for method in methods:
                artifacts = explain_artifacts(handle, example, method, config, input_hash)
                stem = os.path.join(config.out_dir, f"{_safe_name(example.id)}__{method.value}")
                _write(stem + ".csv", artifacts.csv)
                _write(stem + ".json", artifacts.json)
                _write(stem + ".svg", artifacts.svg)


@cli.command("eval")
@_model_options
@_run_options
@click.option("--corpus", "corpus_path", required=True)
def eval_cmd(corpus_path, service, **kwargs):
    """Sweep removal/retention metrics over a corpus."""
    config = _build_config(**kwargs)
    examples, _ = load_corpus(corpus_path, strict=config.strict, segmenter=config.segmenter)
    input_hash = content_hash_file(corpus_path)
    os.makedirs(config.out_dir, exist_ok=True)
    if service:
        _eval_via_service(service, config, examples)
        return
    with open_model(config.model) as handle:
        if not handle.manifest.normalized:
            raise ValidationError("eval needs a normalized model (perplexities are meaningless otherwise)")
        artifacts = eval_artifacts(handle, examples, config, input_hash)
    _write(os.path.join(config.out_dir, "report.csv"), artifacts.csv)
    _write(os.path.join(config.out_dir, "report.json"), artifacts.json)
    for metric_name, svg in sorted(artifacts.svgs.items()):
        _write(os.path.join(config.out_dir, f"{metric_name}.svg"), svg)


@cli.command("oracle-check")
@click.option("--seed", default=0, show_default=True)
@click.option("--out", "out_dir", default="out", show_default=True)
def oracle_check(seed, out_dir):
    """Check the exactness properties and Monte Carlo convergence."""
    report = run_oracle_suite(default_instances(seed), seed=seed)
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "oracle_report.json")
    _write(path, json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
    for check in report.checks:
        status = "PASS" if check.passed else "FAIL"
        click.echo(f"{status} {check.name}: deviation={check.deviation:.3e} tolerance={check.tolerance:.1e} ({check.detail})")
    click.echo("all checks passed" if report.passed else "some checks FAILED")


@cli.command("train-ngram")
@click.option("--corpus", "corpus_path", required=True)
@click.option("--out-model", "model_path", required=True)
@click.option("--smoothing-k", default=0.5, show_default=True)
@click.option("--interpolation", "lam", default=0.5, show_default=True)
@click.option("--strict/--lenient", default=True, show_default=True)
@click.option("--segmenter", default="whitespace", show_default=True)
def train_ngram_cmd(corpus_path, model_path, smoothing_k, lam, strict, segmenter):
    """Fit the bundled n-gram scorer on a JSONL corpus."""
    examples, _ = load_corpus(corpus_path, strict=strict, segmenter=segmenter)
    model = train_ngram(examples, k=smoothing_k, lam=lam)
    _write(model_path, model.to_json())
    click.echo(f"trained on {len(examples)} examples, vocabulary size {model.vocab_size}")


@cli.command()
@_model_options
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(model_kind, model_path, endpoint, server_cmd, host, port):
    """Serve the model and pipeline over HTTP."""
    import uvicorn

    from .service import create_app

    try:
        spec = ModelSpec(kind=model_kind, path=model_path, endpoint=endpoint, server_cmd=server_cmd)
    except pydantic.ValidationError as exc:
        raise ValidationError(str(exc.errors()[0].get("msg", exc))) from exc
    with open_model(spec) as handle:
        app = create_app(handle, spec)
        uvicorn.run(app, host=host, port=port, log_level="info")


def _service_post(base: str, path: str, payload: dict) -> dict:
    try:
        resp = httpx.post(base.rstrip("/") + path, json=payload, timeout=600.0)
    except httpx.HTTPError as exc:
        raise RemoteUnavailable(f"service unreachable: {exc}") from exc
    if resp.status_code != 200:
        try:
            body = resp.json()
        except ValueError:
            raise RemoteUnavailable(f"service returned status {resp.status_code}")
        err = LergError(body.get("message", "service error"))
        err.exit_code = int(body.get("exit_code", 1))
        raise err
    return resp.json()


def _explain_via_service(base: str, config: RunConfig, examples: list[Example]) -> None:
    for example in examples:
        for method in config.methods:
            payload = {
                "example": {
                    "id": example.id,
                    "context": example.context.source,
                    "response": example.response.source,
                },
                "method": method,
                "samples": config.samples,
                "max_mask_ratio": config.max_mask_ratio,
                "seed": config.seed,
                "segmenter": config.segmenter,
            }
            reply = _service_post(base, "/explain", payload)
            stem = os.path.join(config.out_dir, f"{_safe_name(example.id)}__{method}")
            _write(stem + ".csv", reply["csv"])
            _write(stem + ".json", json.dumps(reply["json_report"], sort_keys=True, indent=2) + "\n")
            _write(stem + ".svg", reply["svg"])


def _eval_via_service(base: str, config: RunConfig, examples: list[Example]) -> None:
    payload = {
        "corpus": [
            {"id": e.id, "context": e.context.source, "response": e.response.source}
            for e in examples
        ],
        "methods": list(config.methods),
        "ratios": list(config.ratios),
        "samples": config.samples,
        "max_mask_ratio": config.max_mask_ratio,
        "seed": config.seed,
        "trials": config.trials,
        "segmenter": config.segmenter,
    }
    reply = _service_post(base, "/eval", payload)
    _write(os.path.join(config.out_dir, "report.csv"), reply["csv"])
    _write(os.path.join(config.out_dir, "report.json"), json.dumps(reply["json_report"], sort_keys=True, indent=2) + "\n")
    for metric_name, svg in sorted(reply["svgs"].items()):
        _write(os.path.join(config.out_dir, f"{metric_name}.svg"), svg)


def _emit_error(exc: LergError) -> None:
    body = {"error": type(exc).__name__, "message": str(exc), "exit_code": exc.exit_code}
    print(json.dumps(body), file=sys.stderr)


def main(argv=None) -> None:
    level = os.environ.get("LERG_LOG", "WARNING").upper()
    if level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
        level = "WARNING"
    logging.basicConfig(level=level)
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        sys.exit(exc.exit_code)
    except click.Abort:
        sys.exit(1)
    except click.UsageError as exc:
        _emit_error(ValidationError(exc.format_message()))
        sys.exit(1)
    except LergError as exc:
        _emit_error(exc)
        sys.exit(exc.exit_code)


if __name__ == "__main__":
    main()

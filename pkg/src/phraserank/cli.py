"""Command-line interface.

Exit codes: 0 success, 1 unexpected error, 2 configuration or usage
error, 3 parse error in annotated sentence input, 4 dataset or
prediction file error, 5 embedding backend failure.
"""

from __future__ import annotations

import functools
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click

from phraserank import __version__
from phraserank.chunker import extract_candidates
from phraserank.config import PipelineConfig, load_config
from phraserank.corpus import Document, load_dataset
from phraserank.embeddings import (
    EmbeddingBackend,
    HashEmbeddingBackend,
    HttpEmbeddingBackend,
    hash_embed,
)
from phraserank.errors import (
    BackendError,
    ConfigError,
    ConlluParseError,
    ContractViolationError,
    DatasetError,
)
from phraserank.evaluation import evaluate, format_report_table, write_report
from phraserank.fileio import atomic_writer, read_candidate_file, write_candidate_file
from phraserank.ranker import RankedKeyphrases, read_predictions, score_document, write_predictions

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CONFIG = 2
EXIT_PARSE = 3
EXIT_DATA = 4
EXIT_BACKEND = 5


def _translate_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ConfigError as exc:
            _fail(EXIT_CONFIG, exc)
        except ConlluParseError as exc:
            _fail(EXIT_PARSE, exc)
        except DatasetError as exc:
            _fail(EXIT_DATA, exc)
        except BackendError as exc:
            _fail(EXIT_BACKEND, exc)

    return wrapper


def _fail(code: int, exc: Exception) -> None:
    click.echo(f"error: {exc}", err=True)
    sys.exit(code)


def _build_backend(config: PipelineConfig) -> EmbeddingBackend:
    if config.backend == "hash":
        return HashEmbeddingBackend(dim=config.hash_dim, seed=config.hash_seed)
    return HttpEmbeddingBackend(
        url=config.http_url,
        batch_size=config.http_batch_size,
        retries=config.http_retries,
    )


def _rank_documents(
    documents: list[Document],
    backend: EmbeddingBackend,
    stem: bool,
    workers: int,
    candidates_by_doc=None,
) -> list[RankedKeyphrases]:
    def score_one(doc: Document) -> RankedKeyphrases:
        provided = None if candidates_by_doc is None else candidates_by_doc[doc.id]
        return score_document(doc, backend, stem=stem, candidates=provided)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(score_one, documents))
    return [score_one(doc) for doc in documents]


def _check_candidate_coverage(documents: list[Document], by_doc: dict) -> None:
    dataset_ids = {doc.id for doc in documents}
    missing = [doc.id for doc in documents if doc.id not in by_doc]
    if missing:
        raise DatasetError(
            f"candidate file lacks documents from the dataset: {', '.join(missing[:5])}"
        )
    extra = sorted(set(by_doc) - dataset_ids)
    if extra:
        raise DatasetError(
            f"candidate file has documents not in the dataset: {', '.join(extra[:5])}"
        )


def _resolve_candidate_stem(file_stem: bool, flag_stem: bool | None) -> bool:
    if flag_stem is not None and flag_stem != file_stem:
        raise ConfigError(
            f"candidate file was extracted with stem={'on' if file_stem else 'off'}; "
            "re-extract or drop the conflicting flag"
        )
    return file_stem


@click.group()
@click.version_option(version=__version__, prog_name="phraserank")
def cli() -> None:
    """Keyphrase extraction over dependency-annotated text."""


@cli.command()
@click.argument("dataset", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False), help="Candidate file to write.")
@click.option("--stem/--no-stem", "stem", default=None, help="Stem normalized forms.")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@_translate_errors
def extract(dataset: str, output: str, stem: bool | None, config_path: str | None) -> None:
    """Extract noun-phrase candidates from DATASET into a candidate file."""
    config = load_config(config_path, {"stem": stem})
    documents = load_dataset(dataset)
    by_doc = {
        doc.id: [
            span
            for sentence in doc.sentences
            for span in extract_candidates(sentence, stem=config.stem)
        ]
        for doc in documents
    }
    write_candidate_file(output, by_doc, [doc.id for doc in documents], config.stem)
    total = sum(len(spans) for spans in by_doc.values())
    click.echo(f"extracted {total} candidates from {len(documents)} documents -> {output}")


@cli.command()
@click.argument("dataset", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False), help="Predictions file to write.")
@click.option("--candidates", "candidates_path", type=click.Path(exists=True, dir_okay=False), default=None, help="Reuse a previously extracted candidate file.")
@click.option("--backend", type=click.Choice(["hash", "http"]), default=None)
@click.option("--hash-dim", type=int, default=None)
@click.option("--hash-seed", type=int, default=None)
@click.option("--url", "http_url", default=None, help="Embedding service URL (http backend).")
@click.option("--top", type=int, default=None, help="Keep only the best N phrases per document.")
@click.option("--stem/--no-stem", "stem", default=None)
@click.option("--workers", type=int, default=None)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@_translate_errors
def rank(
    dataset: str,
    output: str,
    candidates_path: str | None,
    backend: str | None,
    hash_dim: int | None,
    hash_seed: int | None,
    http_url: str | None,
    top: int | None,
    stem: bool | None,
    workers: int | None,
    config_path: str | None,
) -> None:
    """Score and rank candidates for every document in DATASET."""
    config = load_config(
        config_path,
        {
            "backend": backend,
            "hash_dim": hash_dim,
            "hash_seed": hash_seed,
            "http_url": http_url,
            "stem": stem,
            "workers": workers,
        },
    )
    if top is not None and top < 1:
        raise ConfigError(f"--top must be >= 1, got {top}")
    documents = load_dataset(dataset)
    candidates_by_doc = None
    effective_stem = config.stem
    if candidates_path is not None:
        candidates_by_doc, file_stem = read_candidate_file(candidates_path)
        _check_candidate_coverage(documents, candidates_by_doc)
        effective_stem = _resolve_candidate_stem(file_stem, stem)
    engine = _build_backend(config)
    try:
        ranked = _rank_documents(
            documents, engine, effective_stem, config.workers, candidates_by_doc
        )
    finally:
        if isinstance(engine, HttpEmbeddingBackend):
            engine.close()
    with atomic_writer(output) as stream:
        write_predictions(ranked, stream, top_n=top)
    click.echo(f"ranked {len(documents)} documents -> {output}")


@cli.command(name="evaluate")
@click.argument("predictions", type=click.Path(exists=True, dir_okay=False))
@click.argument("dataset", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", "report_path", type=click.Path(dir_okay=False), default=None, help="Write the full JSON report here.")
@click.option("--cutoffs", default=None, help="Comma-separated ranks to score at (default 5,10,15).")
@click.option("--stem/--no-stem", "stem", default=None)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@_translate_errors
def evaluate_cmd(
    predictions: str,
    dataset: str,
    report_path: str | None,
    cutoffs: str | None,
    stem: bool | None,
    config_path: str | None,
) -> None:
    """Score PREDICTIONS against the gold keyphrases in DATASET."""
    parsed_cutoffs = _parse_cutoff_flag(cutoffs)
    config = load_config(config_path, {"cutoffs": parsed_cutoffs, "stem": stem})
    documents = load_dataset(dataset)
    gold_by_doc = {doc.id: sorted(doc.gold) if doc.gold else [] for doc in documents}
    with open(predictions, encoding="utf-8") as stream:
        ranked = read_predictions(stream)
    report = evaluate(ranked, gold_by_doc, cutoffs=config.cutoffs, stem=config.stem)
    click.echo(format_report_table(report))
    if report_path is not None:
        with atomic_writer(report_path) as stream:
            write_report(report, stream)
        click.echo(f"report -> {report_path}")


@cli.command()
@click.argument("dataset", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", "report_path", type=click.Path(dir_okay=False), default=None, help="Write the full JSON report here.")
@click.option("--predictions", "predictions_path", type=click.Path(dir_okay=False), default=None, help="Also write the ranked predictions here.")
@click.option("--candidates", "candidates_path", type=click.Path(dir_okay=False), default=None, help="Also write the extracted candidates here.")
@click.option("--backend", type=click.Choice(["hash", "http"]), default=None)
@click.option("--hash-dim", type=int, default=None)
@click.option("--hash-seed", type=int, default=None)
@click.option("--url", "http_url", default=None, help="Embedding service URL (http backend).")
@click.option("--cutoffs", default=None, help="Comma-separated ranks to score at (default 5,10,15).")
@click.option("--stem/--no-stem", "stem", default=None, help="Stemming defaults to on for benchmarks.")
@click.option("--workers", type=int, default=None)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@_translate_errors
def benchmark(
    dataset: str,
    report_path: str | None,
    predictions_path: str | None,
    candidates_path: str | None,
    backend: str | None,
    hash_dim: int | None,
    hash_seed: int | None,
    http_url: str | None,
    cutoffs: str | None,
    stem: bool | None,
    workers: int | None,
    config_path: str | None,
) -> None:
    """Run extract, rank, and evaluate over DATASET in one pass."""
    parsed_cutoffs = _parse_cutoff_flag(cutoffs)
    config = load_config(
        config_path,
        {
            "backend": backend,
            "hash_dim": hash_dim,
            "hash_seed": hash_seed,
            "http_url": http_url,
            "cutoffs": parsed_cutoffs,
            "stem": stem,
            "workers": workers,
        },
        defaults=PipelineConfig(stem=True),
    )
    documents = load_dataset(dataset)
    by_doc = {
        doc.id: [
            span
            for sentence in doc.sentences
            for span in extract_candidates(sentence, stem=config.stem)
        ]
        for doc in documents
    }
    if candidates_path is not None:
        write_candidate_file(candidates_path, by_doc, [doc.id for doc in documents], config.stem)
    engine = _build_backend(config)
    try:
        ranked = _rank_documents(documents, engine, config.stem, config.workers, by_doc)
    finally:
        if isinstance(engine, HttpEmbeddingBackend):
            engine.close()
    if predictions_path is not None:
        with atomic_writer(predictions_path) as stream:
            write_predictions(ranked, stream)
    gold_by_doc = {doc.id: sorted(doc.gold) if doc.gold else [] for doc in documents}
    report = evaluate(ranked, gold_by_doc, cutoffs=config.cutoffs, stem=config.stem)
    click.echo(format_report_table(report))
    if report_path is not None:
        with atomic_writer(report_path) as stream:
            write_report(report, stream)
        click.echo(f"report -> {report_path}")


@cli.command(name="embed-check")
@click.option("--url", "http_url", default=None, help="Embedding service URL.")
@click.option("--batch-size", type=int, default=None)
@click.option("--retries", type=int, default=None)
@click.option("--text", "texts", multiple=True, help="Probe text (repeatable).")
@click.option(
    "--verify-hash",
    nargs=2,
    type=int,
    default=None,
    metavar="DIM SEED",
    help="Require the service to reproduce the deterministic hash embedding exactly.",
)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@_translate_errors
def embed_check(
    http_url: str | None,
    batch_size: int | None,
    retries: int | None,
    texts: tuple[str, ...],
    verify_hash: tuple[int, int] | None,
    config_path: str | None,
) -> None:
    """Probe a live embedding service and verify its response contract."""
    config = load_config(
        config_path,
        {"http_url": http_url, "http_batch_size": batch_size, "http_retries": retries},
    )
    probes = list(texts) or [
        "deep learning",
        "graph neural networks",
        "Hello, world!",
        "",
    ]
    service = HttpEmbeddingBackend(
        url=config.http_url,
        batch_size=config.http_batch_size,
        retries=config.http_retries,
    )
    try:
        health = service.health()
        click.echo(
            f"service at {config.http_url}: model={health.get('model')!r} "
            f"dim={health.get('dim')!r} status={health.get('status')!r}"
        )
        vectors = service.embed(probes)
        click.echo(f"embedded {len(probes)} probe texts at dim {service.dim}")
        if verify_hash is not None:
            dim, seed = verify_hash
            if service.dim != dim:
                raise ContractViolationError(
                    f"service dim {service.dim} != requested hash dim {dim}"
                )
            for text, got in zip(probes, vectors):
                expected = hash_embed(text, dim, seed)
                if got != expected:
                    raise ContractViolationError(
                        f"service vector for {text!r} does not match hash embedding "
                        f"(dim={dim}, seed={seed})"
                    )
            click.echo(f"hash verification passed (dim={dim}, seed={seed})")
    finally:
        service.close()
    click.echo("ok")


def _parse_cutoff_flag(raw: str | None) -> tuple[int, ...] | None:
    if raw is None:
        return None
    parts = [p.strip() for p in raw.split(",") if p.strip()]
    if not parts:
        raise ConfigError("--cutoffs: expected a comma-separated list of integers")
    try:
        return tuple(int(p) for p in parts)
    except ValueError:
        raise ConfigError(f"--cutoffs: expected integers, got {raw!r}") from None


def main() -> None:
    cli()


if __name__ == "__main__":
    main()

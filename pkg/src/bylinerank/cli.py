"""Command-line entry point: ``bylinerank validate | synth | pipeline``.

Exit codes: 0 success, 1 internal error, 2 validation failure, 3 config failure.
"""

from __future__ import annotations

import json
import logging
import sys
from datetime import datetime, timezone
from pathlib import Path

import click

from . import __version__
from .corpus import CorpusError, DatasetKind, EligibilityConfig, load_corpus
from .credit import DEFAULT_SCHEME, WeightScheme
from .pipeline import build_manifest, run_pipeline, write_bundle
from .scoring import BaselineTable, MissingBaseline
from .synth import InvalidConfig, SynthConfig, generate, summary

EXIT_OK, EXIT_INTERNAL, EXIT_VALIDATION, EXIT_CONFIG = 0, 1, 2, 3


class Failure(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _fail(code: int, message: str):
    raise Failure(code, message)


def _say(ctx: click.Context, message: str) -> None:
    if not ctx.obj["quiet"]:
        click.echo(message)


def _write_manifest_copy(ctx: click.Context, manifest: dict) -> None:
    path = ctx.obj["manifest"]
    if path is None:
        return
    stamped = dict(manifest)
    if stamped.get("timestamp") is None:
        stamped["timestamp"] = datetime.now(timezone.utc).isoformat()
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(json.dumps(stamped, indent=2, sort_keys=True) + "\n", encoding="utf-8")


@click.group()
@click.version_option(__version__, prog_name="bylinerank")
@click.option("--out", "out", type=click.Path(file_okay=False), default=None, help="Output directory.")
@click.option("--quiet", is_flag=True, help="Suppress progress and summary output.")
@click.option("--manifest", type=click.Path(dir_okay=False), default=None,
              help="Also write the run manifest, wall-clock stamped, to this path.")
@click.pass_context
def cli(ctx: click.Context, out, quiet, manifest):
    """Co-authorship-aware productivity rankings and their distortions."""
    ctx.ensure_object(dict)
    ctx.obj.update(out=out, quiet=quiet, manifest=manifest)
    logging.basicConfig(level=logging.ERROR if quiet else logging.WARNING, format="%(levelname)s: %(message)s")


@cli.command()
@click.argument("researchers", type=click.Path())
@click.argument("publications", type=click.Path())
@click.pass_context
def validate(ctx, researchers, publications):
    """Check a corpus for schema and cross-reference errors."""
    for p in (researchers, publications):
        if not Path(p).is_file():
            _fail(EXIT_VALIDATION, f"{p}: no such file")
    try:
        corpus = load_corpus(researchers, publications)
    except CorpusError as exc:
        _fail(EXIT_VALIDATION, str(exc))
    if not corpus.publications:
        _fail(EXIT_VALIDATION, f"{publications}: no publications")
    if not corpus.researchers:
        _fail(EXIT_VALIDATION, f"{researchers}: no researchers")
    click.echo(f"OK: {len(corpus.researchers)} researchers, {len(corpus.publications)} publications")


@cli.command()
@click.argument("config", required=False, type=click.Path())
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@click.option("--out", "out", type=click.Path(file_okay=False), default=None)
@click.pass_context
def synth(ctx, config, seed, out):
    """Generate a synthetic corpus (defaults when CONFIG is omitted)."""
    out = out or ctx.obj["out"] or "synth"
    try:
        if config is None:
            cfg = SynthConfig()
        else:
            if not Path(config).is_file():
                _fail(EXIT_CONFIG, f"{config}: no such file")
            cfg = SynthConfig.load(config)
        if seed is not None:
            cfg.seed = seed
            cfg.validate()
    except InvalidConfig as exc:
        _fail(EXIT_CONFIG, f"invalid synth config: {exc}")
    result = generate(cfg)
    paths = result.write(out)
    stats = summary(result.corpus)
    _say(ctx, f"wrote {', '.join(str(p) for p in paths.values())}")
    _say(ctx, (
        f"{stats['researchers']} researchers, {stats['publications']} publications; "
        f"co-authored share {stats['coauthored_share']:.4f}; "
        f">2 authors share {stats['more_than_two_share']:.4f}; "
        f"mean authors per publication {stats['mean_authors']:.3f}"
    ))
    _write_manifest_copy(ctx, {"tool": "bylinerank", "version": __version__, "command": "synth",
                               "config": cfg.to_json(), "timestamp": None})


@cli.command()
@click.argument("researchers", type=click.Path())
@click.argument("publications", type=click.Path())
@click.option("--dataset", type=click.Choice(["output", "impact"]), default="impact", show_default=True)
@click.option("--weights", type=click.Path(dir_okay=False), default=None, help="Weight-scheme JSON.")
@click.option("--baselines", default="auto", show_default=True, help="'auto' or a baseline CSV.")
@click.option("--bins", type=float, default=5.0, show_default=True, help="Shift histogram bin width.")
@click.option("--min-years", type=int, default=3, show_default=True)
@click.option("--min-per-rank", type=int, default=10, show_default=True)
@click.option("--min-publishing-share", type=float, default=0.5, show_default=True)
@click.option("--out", "out", type=click.Path(file_okay=False), default=None)
@click.pass_context
def pipeline(ctx, researchers, publications, dataset, weights, baselines, bins, min_years,
             min_per_rank, min_publishing_share, out):
    """Score, rank and compare; write the report bundle."""
    out = out or ctx.obj["out"] or "report"
    try:
        eligibility = EligibilityConfig(DatasetKind(dataset), min_years, min_per_rank, min_publishing_share)
        if bins <= 0:
            raise ValueError("--bins must be positive")
        scheme = DEFAULT_SCHEME if weights is None else WeightScheme.load(weights)
        table = None if baselines == "auto" else BaselineTable.read_csv(baselines)
    except (OSError, ValueError) as exc:
        _fail(EXIT_CONFIG, f"configuration error: {exc}")

    for p in (researchers, publications):
        if not Path(p).is_file():
            _fail(EXIT_VALIDATION, f"{p}: no such file")
    try:
        corpus = load_corpus(researchers, publications)
        if not corpus.publications:
            _fail(EXIT_VALIDATION, f"{publications}: no publications")
        result = run_pipeline(corpus, eligibility, scheme, table, bins)
    except (CorpusError, MissingBaseline) as exc:
        _fail(EXIT_VALIDATION, str(exc))
    except ValueError as exc:
        _fail(EXIT_VALIDATION, str(exc))

    manifest = build_manifest(researchers, publications, eligibility, scheme, weights,
                              None if baselines == "auto" else baselines, bins)
    written = write_bundle(result, manifest, out)
    _write_manifest_copy(ctx, manifest)
    _say(ctx, f"{len(result.scorecards)} researchers scored, {len(result.rankings)} ranking lists, "
              f"{len(written)} files written to {out}")
    for pair, rep in result.totals.items():
        rho = "NA" if rep.spearman is None else f"{rep.spearman:.3f}"
        _say(ctx, f"  {pair[0].upper()}-{pair[1].upper()}: spearman {rho}, mean shift {rep.shift.mean:.2f}")


def main(argv=None) -> int:
    try:
        cli.main(args=argv, prog_name="bylinerank", standalone_mode=False)
    except Failure as exc:
        click.echo(f"error: {exc}", err=True)
        return exc.code
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return EXIT_VALIDATION if exc.exit_code == 2 else exc.exit_code
    except click.Abort:
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001
        click.echo(f"internal error: {exc!r}", err=True)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

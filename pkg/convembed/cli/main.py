"""convembed command line.

    convembed generate --seed 7 --out runs/synth
    convembed train --corpus runs/synth/corpus.jsonl --k 20 --n 4 --m-sections 200 --out runs/k20
    convembed evaluate --corpus runs/synth/corpus.jsonl --out runs/k20
    convembed sweep --k 10,15,20,25,30 --out runs/sweep
    convembed visualize --out runs/k20
"""

import functools
import json
import os
from typing import Any, Dict, List, Optional, Tuple

import click
from dotenv import load_dotenv
from pydantic import ValidationError

from convembed.cli import experiment
from convembed.cli.config import ExperimentConfig, load_experiment_config
from convembed.cli.svg import histogram_svg, pca_scatter_svg
from convembed.corpus.synthetic import SynthSpec
from convembed.eval.report import EvalReport
from convembed.trainer.checkpoint import load_checkpoint
from convembed.utils.errors import ConfigError, ConvEmbedError
from convembed.utils.files import atomic_write_text
from convembed.utils.logging_factory import LoggingFactory


def parse_int_list(value: Optional[str]) -> Optional[List[int]]:
    if value is None:
        return None
    try:
        return [int(v) for v in value.split(",") if v.strip()]
    except ValueError as e:
        raise click.BadParameter(f"expected comma-separated integers, got {value!r}") from e


def parse_sections(value: Optional[str]) -> Any:
    if value is None:
        return None
    if value == "auto":
        return "auto"
    try:
        return int(value)
    except ValueError as e:
        raise click.BadParameter(f"expected an integer or 'auto', got {value!r}") from e


def parse_score_split(value: Optional[str]) -> Optional[Tuple[float, float]]:
    if value is None:
        return None
    try:
        low, high = (float(v) for v in value.split(","))
    except ValueError as e:
        raise click.BadParameter(f"expected LOW,HIGH scores, got {value!r}") from e
    if low > high:
        raise click.BadParameter(f"LOW must not exceed HIGH, got {value!r}")
    return low, high


def report_errors(command):
    """Turn library errors into exit code 1 and a one-line (or JSON) message."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        try:
            return command(*args, **kwargs)
        except (ConvEmbedError, ValidationError) as e:
            error = e if isinstance(e, ConvEmbedError) else ConfigError(str(e))
            if ctx.obj.get("error_json"):
                click.echo(json.dumps({"error": type(error).__name__, "message": str(error)}), err=True)
            else:
                click.echo(f"Error: {error}", err=True)
            ctx.exit(1)

    return wrapper


def experiment_options(command):
    options = [
        click.option("--config", "config_path", type=click.Path(dir_okay=False), help="JSON experiment config."),
        click.option("--out", help="Output directory."),
        click.option("--seed", type=int, help="Root seed for every random choice."),
        click.option("--corpus", type=click.Path(dir_okay=False), help="JSON Lines corpus; omitted generates one."),
        click.option("--k", "k", help="Conversations per training group (a comma list for sweep)."),
        click.option("--offset", help="Conversations skipped at each extreme (a comma list for sweep)."),
        click.option("--n", "n", help="Turns per section (a comma list for sweep)."),
        click.option("--m-sections", "--m", "m_sections", help="Sections per conversation, or 'auto'."),
        click.option("--margin", type=float, help="Contrastive margin m."),
        click.option("--epochs", type=int),
        click.option("--batch", type=int, help="Pairs per optimizer step."),
        click.option("--lr", type=float, help="Adam learning rate."),
        click.option("--mask-padding/--no-mask-padding", default=None, help="Mask padded turns and sections."),
        click.option("--regressor-lambda", type=float, help="Kernel ridge penalty."),
        click.option("--regressor-gamma", type=float, help="RBF kernel width."),
        click.option("--workers", type=int, help="Threads for embedding and regression folds."),
    ]
    for option in reversed(options):
        command = option(command)
    return command


def build_config(options: Dict[str, Any], single: bool = True) -> ExperimentConfig:
    """Merge flags over the config file. List-valued flags are left to the sweep command."""

    def first(value):
        values = parse_int_list(value)
        if not values or not single:
            return None
        if len(values) > 1:
            raise click.BadParameter(f"a single value is expected outside sweep, got {value!r}")
        return values[0]

    sections = parse_sections(options.get("m_sections"))
    overrides = {
        "corpus": options.get("corpus"),
        "out": options.get("out"),
        "seed": options.get("seed"),
        "selection": {"k": first(options.get("k")), "offset": first(options.get("offset"))},
        "encoder": {
            "turns_per_section": first(options.get("n")),
            "mask_padding": options.get("mask_padding"),
            "sections": sections if isinstance(sections, int) else None,
        },
        "train": {
            "margin": options.get("margin"),
            "epochs": options.get("epochs"),
            "batch_size": options.get("batch"),
            "learning_rate": options.get("lr"),
        },
        "eval": {
            "workers": options.get("workers"),
            "regressor": {"lam": options.get("regressor_lambda"), "gamma": options.get("regressor_gamma")},
        },
    }
    cfg = load_experiment_config(options.get("config_path"), overrides)
    if sections == "auto":
        cfg = cfg.copy(update={"encoder": cfg.encoder.copy(update={"sections": None})})
    return cfg


@click.group()
@click.option("--log-level", help="Overrides LOGGING_LEVEL.")
@click.option("--error-json", is_flag=True, help="Report failures as JSON on stderr.")
@click.pass_context
def cli(ctx, log_level, error_json):
    load_dotenv()
    if log_level:
        LoggingFactory.set_level(log_level.upper())
    ctx.ensure_object(dict)
    ctx.obj["error_json"] = error_json


@cli.command()
@click.option("--config", "config_path", type=click.Path(dir_okay=False), help="JSON experiment config.")
@click.option("--out", help="Output directory.")
@click.option("--seed", type=int, help="Root seed.")
@click.option("--half-scale", is_flag=True, help="78 conversations with halved turn counts.")
@report_errors
def generate(config_path, out, seed, half_scale):
    """Write a synthetic corpus and its manifest."""
    overrides: Dict[str, Any] = {"out": out, "seed": seed}
    if half_scale:
        overrides["synth"] = SynthSpec.half_scale().dict(exclude={"seed"})
    cfg = load_experiment_config(config_path, overrides)
    path = experiment.generate_corpus(cfg)
    click.echo(path)


@cli.command()
@experiment_options
@report_errors
def train(**options):
    """Train the Siamese encoder on the two extreme groups."""
    cfg = build_config(options)
    corpus = experiment.prepare_corpus(cfg)
    cfg.save_resolved()
    experiment.run_training(cfg, corpus)
    click.echo(os.path.join(cfg.out, experiment.CHECKPOINT_NAME))


@cli.command()
@experiment_options
@click.option("--checkpoint", "checkpoint_path", type=click.Path(dir_okay=False), help="Defaults to OUT/checkpoint.json.")
@report_errors
def embed(checkpoint_path, **options):
    """Write one embedding row per conversation."""
    cfg = build_config(options)
    corpus = experiment.prepare_corpus(cfg)
    checkpoint = load_checkpoint(checkpoint_path or os.path.join(cfg.out, experiment.CHECKPOINT_NAME))
    cfg.save_resolved()
    path = experiment.run_embedding(checkpoint, corpus, cfg.out, workers=cfg.eval.workers)
    click.echo(path)


@cli.command()
@experiment_options
@click.option("--checkpoint", "checkpoint_path", type=click.Path(dir_okay=False), help="Defaults to OUT/checkpoint.json.")
@report_errors
def evaluate(checkpoint_path, **options):
    """Correlations, leave-one-dyad-out regression and PCA for a trained encoder."""
    cfg = build_config(options)
    corpus = experiment.prepare_corpus(cfg)
    checkpoint = load_checkpoint(checkpoint_path or os.path.join(cfg.out, experiment.CHECKPOINT_NAME))
    cfg.save_resolved()
    report = experiment.run_evaluation(cfg, corpus, checkpoint)
    r2 = "undefined" if report.r2 is None else f"{report.r2:.3f}"
    click.echo(
        f"K={report.label}: rho_low={report.rho_low:.3f} (p={report.p_low:.3g}) "
        f"rho_high={report.rho_high:.3f} (p={report.p_high:.3g}) R2={r2}"
    )


@cli.command()
@experiment_options
@report_errors
def sweep(**options):
    """Train and evaluate once per K (and offset), or once per N when --n lists values."""
    cfg = build_config(options, single=False)
    corpus = experiment.prepare_corpus(cfg)
    cfg.save_resolved()
    ns = parse_int_list(options.get("n"))
    if ns:
        rows = experiment.sweep_section_size(cfg, corpus, ns)
    else:
        ks = parse_int_list(options.get("k")) or [cfg.selection.k]
        offsets = parse_int_list(options.get("offset")) or [cfg.selection.offset]
        rows = experiment.sweep_selection(cfg, corpus, ks, offsets)
    for row in rows:
        r2 = "undefined" if row.report.r2 is None else f"{row.report.r2:.3f}"
        click.echo(f"{row.setting}\t{row.report.rho_low:.3f}\t{row.report.rho_high:.3f}\t{r2}")


@cli.command()
@click.option("--out", default="runs/default", help="Run directory holding report.json.")
@click.option("--report", "report_path", type=click.Path(dir_okay=False), help="Defaults to OUT/report.json.")
@click.option("--bin-width", type=float, default=1.0, help="Histogram bin width in score points.")
@click.option("--test-split", help="LOW,HIGH: color test conversations scored at most LOW or at least HIGH.")
@report_errors
def visualize(out, report_path, bin_width, test_split):
    """PCA scatter and absolute-difference histogram as SVG."""
    split = parse_score_split(test_split)
    report_path = report_path or os.path.join(out, experiment.REPORT_NAME)
    if not os.path.exists(report_path):
        raise ConfigError(f"report {report_path} does not exist")
    report = EvalReport.parse_file(report_path)
    for name, svg in (
        ("pca.svg", pca_scatter_svg(report.pca, test_split=split)),
        ("abs_diff_histogram.svg", histogram_svg([r.abs_diff for r in report.predictions], bin_width)),
    ):
        path = os.path.join(out, name)
        atomic_write_text(path, svg)
        click.echo(path)


if __name__ == "__main__":
    cli(obj={})

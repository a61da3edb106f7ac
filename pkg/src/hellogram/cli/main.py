"""
hellogram command-line interface.

Subcommands cover corpus conversion, JA3 labeling, model training, inference,
on-the-fly updates, cipher-stunting perturbation, cross-validated experiments,
synthetic corpus generation, model inspection and corpus accounting.
"""

import csv
import io
import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import click
from pydantic import ValidationError

from hellogram import __version__
from hellogram.cli.outcome import CommandOutcome, operational
from hellogram.core.config import HellogramConfig
from hellogram.core.errors import ListTooShort, NoModels
from hellogram.core.logging import configure_logging
from hellogram.evalharness import (
    EvalReport,
    ExperimentConfig,
    ExperimentRunner,
    Method,
    corpus_report,
    write_class_csv,
    write_corpus_report_csv,
    write_keyword_csv,
    write_summary_csv,
    write_trials_csv,
)
from hellogram.features import ByteMode, featurize
from hellogram.infer import Prediction, PredictionFailure, predict_batch
from hellogram.ingest import (
    CorpusEntry,
    CorpusFile,
    ProfileSpec,
    default_profiles,
    generate_synthetic,
    read_hexline,
    read_pcap,
    read_splits,
    repository_from_corpus,
    split_corpus,
    split_paths,
    tiered_weights,
    write_hexline,
    write_splits,
)
from hellogram.ja3 import UNKNOWN_LABEL, LabelRepository, load_repositories, merge_repositories, write_repository
from hellogram.pum import ModelSet, UpdateStatus, build_models, load, save, update_with_status
from hellogram.stunt import GreaseMode, PerturbationKind, PerturbationSpec, make_rng, perturb, reserialize
from hellogram.wire import parse_client_hello

logger = logging.getLogger(__name__)

PCAP_MAGICS = {
    bytes.fromhex("a1b2c3d4"),
    bytes.fromhex("d4c3b2a1"),
    bytes.fromhex("a1b23c4d"),
    bytes.fromhex("4d3cb2a1"),
}
PCAP_SUFFIXES = {".pcap", ".cap"}
DEFAULT_FRACTIONS = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0"

DELTA = click.FloatRange(0.0, 1.0, min_open=True, max_open=True)
BYTE_MODES = click.Choice([m.value for m in ByteMode])
GREASE_MODES = click.Choice([m.value for m in GreaseMode])
EXISTING_FILE = click.Path(exists=True, dir_okay=False, path_type=Path)
EXISTING_DIR = click.Path(exists=True, file_okay=False, path_type=Path)
OUTPUT_FILE = click.Path(dir_okay=False, path_type=Path)


# ==========================================
# Helpers
# ==========================================


def _csv_text(rows: Sequence[Sequence[object]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerows(rows)
    return buffer.getvalue()


def _deliver(outcome: CommandOutcome, text: str, out: Optional[Path]) -> None:
    """Send payload text to a file, or to standard output when no file is given."""
    if out is None:
        outcome.payload = text
    else:
        out.write_text(text, encoding="utf-8")


def _looks_like_pcap(path: Path) -> bool:
    with path.open("rb") as handle:
        magic = handle.read(4)
    return magic in PCAP_MAGICS or path.suffix.lower() in PCAP_SUFFIXES


def _read_corpus(path: Path, fmt: str = "auto") -> CorpusFile:
    if fmt == "pcap" or (fmt == "auto" and _looks_like_pcap(path)):
        return read_pcap(path)
    return read_hexline(path)


def _repository(paths: Sequence[Path], fallback: Sequence[CorpusFile] = ()) -> LabelRepository:
    """Repository from files, or derived from corpus labels when no file is given."""
    if paths:
        return load_repositories(paths)
    return merge_repositories(repository_from_corpus(corpus) for corpus in fallback)


def _parse_fractions(text: str) -> List[float]:
    try:
        fractions = [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise click.BadParameter(f"not a comma-separated list of numbers: {text!r}") from e
    if not fractions or any(not 0.0 < f <= 1.0 for f in fractions):
        raise click.BadParameter("fractions must lie in (0, 1]")
    return fractions


def _skip_summary(corpus: CorpusFile) -> str:
    reasons = ", ".join(f"{reason}={count}" for reason, count in sorted(corpus.skip_reasons().items()))
    summary = f"skipped {len(corpus.skipped)}"
    if reasons:
        summary += f" ({reasons})"
    if corpus.malformed_packets:
        summary += f"; {corpus.malformed_packets} undecodable frames"
    return summary


# ==========================================
# Command group
# ==========================================


@click.group()
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"], case_sensitive=False),
    default=None,
    help="Diagnostics level (default from HELLOGRAM_LOG_LEVEL, else INFO).",
)
@click.version_option(__version__, prog_name="hellogram")
@click.pass_context
def cli(ctx: click.Context, log_level: Optional[str]) -> None:
    """TLS ClientHello fingerprinting with positional-unigram byte models."""
    try:
        config = HellogramConfig.from_env()
    except (ValidationError, ValueError) as e:
        raise click.UsageError(f"invalid HELLOGRAM_* environment: {e}") from e
    if log_level:
        config = config.model_copy(update={"log_level": log_level.upper()})
    configure_logging(config.log_level)
    ctx.obj = config


# ==========================================
# Corpus commands
# ==========================================


@cli.command()
@click.option("--in", "input_path", type=EXISTING_FILE, required=True, help="pcap or hex-line file.")
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["auto", "pcap", "hexline"]),
    default="auto",
    show_default=True,
    help="Input format; auto sniffs the pcap magic.",
)
@click.option("--out", type=OUTPUT_FILE, required=True, help="Hex-line output file.")
@operational
def convert(input_path: Path, fmt: str, out: Path) -> None:
    """Convert a pcap or hex-line corpus to the canonical hex-line format."""
    corpus = _read_corpus(input_path, fmt)
    write_hexline(corpus, out)
    outcome = CommandOutcome()
    outcome.note(f"converted {len(corpus)} ClientHellos from {input_path}; {_skip_summary(corpus)}")
    outcome.emit()


@cli.command()
@click.option("--in", "input_path", type=EXISTING_FILE, required=True, help="Hex-line corpus.")
@click.option("--repo", "repos", type=EXISTING_FILE, multiple=True, help="JA3 repository file (repeatable).")
@click.option("--out", type=OUTPUT_FILE, required=True, help="Labeled hex-line output file.")
@operational
def label(input_path: Path, repos: Tuple[Path, ...], out: Path) -> None:
    """Attach JA3 repository labels to every hello; absent hashes become Unknown."""
    corpus = read_hexline(input_path)
    repo = load_repositories(repos) if repos else LabelRepository()

    entries = []
    unknown = 0
    for entry in corpus.entries:
        app_label = repo.label_for(parse_client_hello(entry.raw))
        unknown += app_label == UNKNOWN_LABEL
        entries.append(CorpusEntry(raw=entry.raw, label=app_label))
    write_hexline(entries, out)

    total = len(entries)
    share = 100.0 * unknown / total if total else 0.0
    outcome = CommandOutcome()
    outcome.note(f"labeled {total} hellos: {total - unknown} known, {unknown} Unknown ({share:.1f}% Unknown)")
    outcome.emit()


@cli.command()
@click.option("--in", "input_path", type=EXISTING_FILE, required=True, help="Hex-line corpus.")
@click.option("--kind", type=click.Choice([k.value for k in PerturbationKind]), required=True)
@click.option("--fraction", type=click.FloatRange(0.0, 1.0, min_open=True), default=None)
@click.option("--grease-mode", type=GREASE_MODES, default=GreaseMode.INCLUDE.value, show_default=True)
@click.option("--seed", type=click.IntRange(min=0), default=None, help="RNG seed (default HELLOGRAM_SEED).")
@click.option("--out", type=OUTPUT_FILE, required=True, help="Perturbed hex-line output file.")
@click.pass_obj
@operational
def stunt(
    config: HellogramConfig,
    input_path: Path,
    kind: str,
    fraction: Optional[float],
    grease_mode: str,
    seed: Optional[int],
    out: Path,
) -> None:
    """Apply an ordered swap or a random fraction permutation to every cipher list."""
    seed = config.seed if seed is None else seed
    try:
        spec = PerturbationSpec(kind=kind, fraction=fraction, grease_mode=grease_mode, rng_seed=seed)
    except ValidationError as e:
        raise click.BadParameter(str(e.errors()[0]["msg"])) from e

    corpus = read_hexline(input_path)
    rng = make_rng(spec.rng_seed)
    entries = []
    passed = 0
    for entry in corpus.entries:
        parsed = parse_client_hello(entry.raw)
        try:
            raw = reserialize(perturb(parsed, spec, rng), source_id=entry.raw.source_id)
        except ListTooShort:
            passed += 1
            raw = entry.raw
        entries.append(CorpusEntry(raw=raw, label=entry.label))
    write_hexline(entries, out)

    outcome = CommandOutcome()
    outcome.note(f"perturbed {len(entries) - passed} hellos; {passed} passed through unmodified")
    outcome.emit()


@cli.command()
@click.option("--classes", type=click.IntRange(min=1), default=8, show_default=True)
@click.option("--total", type=click.IntRange(min=1), default=1000, show_default=True)
@click.option("--profile", type=EXISTING_FILE, default=None, help="YAML profile spec (overrides --classes/--total).")
@click.option(
    "--imbalance",
    type=click.Choice(["uniform", "tiered"]),
    default="tiered",
    show_default=True,
    help="tiered: top fifth of classes 75%, next three tenths 20%, rest 5%.",
)
@click.option("--grease/--no-grease", default=False, show_default=True)
@click.option(
    "--variants",
    type=click.IntRange(min=1),
    default=1,
    show_default=True,
    help="Classes per family; family members differ only in cipher order and ALPN order.",
)
@click.option("--splits", "k", type=click.IntRange(min=1), default=8, show_default=True)
@click.option("--seed", type=click.IntRange(min=0), default=None)
@click.option("--out-dir", type=click.Path(file_okay=False, path_type=Path), required=True)
@click.pass_obj
@operational
def generate(
    config: HellogramConfig,
    classes: int,
    total: int,
    profile: Optional[Path],
    imbalance: str,
    grease: bool,
    variants: int,
    k: int,
    seed: Optional[int],
    out_dir: Path,
) -> None:
    """Write a synthetic corpus, its k splits and the matching JA3 repository."""
    seed = config.seed if seed is None else seed
    if profile is not None:
        spec = ProfileSpec.from_yaml(profile)
    else:
        weights = tiered_weights(classes) if imbalance == "tiered" else None
        spec = default_profiles(
            classes, total, seed=seed, grease=grease, weights=weights, variants=variants
        )

    corpus = generate_synthetic(spec, seed=seed)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_hexline(corpus, out_dir / "corpus.hexline")
    write_splits(split_corpus(corpus, k), out_dir / "splits")
    repo = repository_from_corpus(corpus)
    write_repository(repo, out_dir / "repository.tsv")

    outcome = CommandOutcome()
    outcome.note(f"generated {len(corpus)} hellos over {len(spec.profiles)} classes into {out_dir}")
    outcome.emit()


@cli.command()
@click.option("--splits", "splits_dir", type=EXISTING_DIR, required=True, help="Directory of *.hexline splits.")
@click.option("--repo", "repos", type=EXISTING_FILE, multiple=True, help="JA3 repository (default: split labels).")
@click.option("--out", type=OUTPUT_FILE, default=None, help="CSV file (default stdout).")
@operational
def report(splits_dir: Path, repos: Tuple[Path, ...], out: Optional[Path]) -> None:
    """Per-split corpus accounting: total, without Unknown, unique."""
    paths = split_paths(splits_dir)
    splits = [read_hexline(p) for p in paths]
    repo = _repository(repos, splits)
    rows = corpus_report([s.raws() for s in splits], repo, names=[p.stem for p in paths])

    buffer = io.StringIO()
    write_corpus_report_csv(rows, buffer)
    outcome = CommandOutcome()
    _deliver(outcome, buffer.getvalue(), out)
    outcome.emit()


# ==========================================
# Model commands
# ==========================================


@cli.command()
@click.option("--in", "input_path", type=EXISTING_FILE, required=True, help="Labeled hex-line corpus.")
@click.option("--delta", type=DELTA, default=None, help="Smoothing constant in (0, 1) [default: 1e-8].")
@click.option("--byte-mode", type=BYTE_MODES, default=ByteMode.ALL.value, show_default=True)
@click.option("--out", type=OUTPUT_FILE, required=True, help="Model file to write.")
@click.pass_obj
@operational
def train(config: HellogramConfig, input_path: Path, delta: Optional[float], byte_mode: str, out: Path) -> None:
    """Build one positional-unigram model per label."""
    delta = config.delta if delta is None else delta
    mode = ByteMode(byte_mode)
    corpus = read_hexline(input_path)

    features = []
    unlabeled = 0
    for entry in corpus.entries:
        if entry.label is None or entry.label == UNKNOWN_LABEL:
            unlabeled += 1
            continue
        parsed = parse_client_hello(entry.raw)
        features.append(featurize(parsed, mode, label=entry.label, source_id=entry.raw.source_id))

    models = build_models(features, delta=delta, byte_mode=mode)
    save(models, out)

    rows: List[List[object]] = [["label", "m", "n_sequences"]]
    for name in models.labels():
        counts = models[name].counts
        rows.append([name, counts.m, counts.n_sequences])
    outcome = CommandOutcome(payload=_csv_text(rows))
    outcome.note(f"trained {len(models)} models; skipped {unlabeled} Unknown or unlabeled lines")
    outcome.emit()


@cli.command()
@click.option("--model", "model_path", type=EXISTING_FILE, required=True)
@click.option("--in", "input_path", type=EXISTING_FILE, required=True, help="Hex-line corpus.")
@click.option("--scores", is_flag=True, help="Add one score column per model label.")
@click.option("--repo", "repos", type=EXISTING_FILE, multiple=True, help="Try JA3 first (hybrid mode).")
@click.option("--min-score", type=float, default=None, help="Report Unknown below this score.")
@click.option("--out", type=OUTPUT_FILE, default=None, help="CSV file (default stdout).")
@click.pass_obj
@operational
def predict(
    config: HellogramConfig,
    model_path: Path,
    input_path: Path,
    scores: bool,
    repos: Tuple[Path, ...],
    min_score: Optional[float],
    out: Optional[Path],
) -> None:
    """Classify every hello by maximum mean log-likelihood."""
    min_score = config.min_score if min_score is None else min_score
    models = load(model_path)
    corpus = read_hexline(input_path)
    repo = load_repositories(repos) if repos else None
    if len(models) == 0:
        raise NoModels(f"{model_path} holds no models", details={"path": str(model_path)})

    header = ["source_id", "label", "score"]
    if repo is not None:
        header.append("method")
    if scores:
        header.extend(f"score:{name}" for name in models.labels())

    parsed = [parse_client_hello(entry.raw) for entry in corpus.entries]
    features = [models.featurize(entry.raw) for entry in corpus.entries]
    results = predict_batch(models, features, with_scores=scores) if features else []

    rows: List[List[object]] = [header]
    failures = 0
    for hello, result in zip(parsed, results):
        if isinstance(result, PredictionFailure):
            failures += 1
            rows.append([result.source_id] + [""] * (len(header) - 1))
            continue
        ja3_label = repo.label_for(hello) if repo is not None else None
        rows.append(_prediction_row(result, ja3_label, repo is not None, min_score, scores, models.labels()))

    outcome = CommandOutcome()
    _deliver(outcome, _csv_text(rows), out)
    outcome.note(f"classified {len(results) - failures} hellos; {failures} failed")
    outcome.emit()


def _prediction_row(
    result: Prediction,
    hello_label: Optional[str],
    hybrid: bool,
    min_score: Optional[float],
    scores: bool,
    labels: List[str],
) -> List[object]:
    predicted = result.label
    if min_score is not None and result.score < min_score:
        predicted = UNKNOWN_LABEL
    row: List[object] = [result.source_id]
    if hybrid and hello_label is not None and hello_label != UNKNOWN_LABEL:
        row += [hello_label, "{:.6f}".format(result.score), "ja3"]
    else:
        row += [predicted, "{:.6f}".format(result.score)]
        if hybrid:
            row.append("ml")
    if scores and result.per_label_scores is not None:
        row.extend("{:.6f}".format(result.per_label_scores[name]) for name in labels)
    return row


@cli.command()
@click.option("--model", "model_path", type=OUTPUT_FILE, required=True)
@click.option("--in", "input_path", type=EXISTING_FILE, required=True, help="Hex-line corpus.")
@click.option("--repo", "repos", type=EXISTING_FILE, multiple=True, required=True)
@click.option("--init", is_flag=True, help="Start from an empty model set if the file does not exist.")
@click.option("--delta", type=DELTA, default=None, help="Smoothing constant for --init.")
@click.option("--byte-mode", type=BYTE_MODES, default=ByteMode.ALL.value, help="Byte mode for --init.")
@click.pass_obj
@operational
def update(
    config: HellogramConfig,
    model_path: Path,
    input_path: Path,
    repos: Tuple[Path, ...],
    init: bool,
    delta: Optional[float],
    byte_mode: str,
) -> None:
    """Absorb new hellos into an existing model file in place."""
    if init and not model_path.exists():
        models = ModelSet(delta=config.delta if delta is None else delta, byte_mode=ByteMode(byte_mode))
    else:
        models = load(model_path)
    repo = load_repositories(repos)
    corpus = read_hexline(input_path)

    added: Dict[str, int] = {}
    skipped: Dict[str, int] = {}
    unknown = 0
    for entry in corpus.entries:
        status = update_with_status(models, entry.raw, repo)
        if status == UpdateStatus.UNKNOWN:
            unknown += 1
            continue
        app_label = repo.label_for(parse_client_hello(entry.raw))
        bucket = skipped if status == UpdateStatus.DUPLICATE else added
        bucket[app_label] = bucket.get(app_label, 0) + 1
    save(models, model_path)

    rows: List[List[object]] = [["label", "added", "skipped"]]
    for name in sorted(set(added) | set(skipped)):
        rows.append([name, added.get(name, 0), skipped.get(name, 0)])
    outcome = CommandOutcome(payload=_csv_text(rows))
    outcome.note(f"updated {model_path}; {unknown} Unknown hellos skipped")
    outcome.emit()


@cli.command()
@click.option("--model", "model_path", type=EXISTING_FILE, required=True)
@click.option("--label", "model_label", default=None, help="Export this label's probability matrix.")
@click.option("--out", type=OUTPUT_FILE, default=None, help="CSV file (default stdout).")
@operational
def inspect(model_path: Path, model_label: Optional[str], out: Optional[Path]) -> None:
    """Summarize a model file, or export one label's position x byte probabilities."""
    models = load(model_path)
    rows: List[List[object]]
    if model_label is None:
        rows = [["label", "m", "n_sequences"]]
        rows.extend([name, models[name].counts.m, models[name].counts.n_sequences] for name in models.labels())
    else:
        entry = models.get(model_label)
        if entry is None:
            raise click.BadParameter(f"no model for label {model_label!r}", param_hint="--label")
        rows = [["position", *range(256)]]
        for position, row in enumerate(entry.model.probs):
            rows.append([position, *("{:.6e}".format(p) for p in row)])

    outcome = CommandOutcome()
    _deliver(outcome, _csv_text(rows), out)
    outcome.emit()


# ==========================================
# Experiments
# ==========================================


@cli.command()
@click.option("--splits", "splits_dir", type=EXISTING_DIR, required=True, help="Directory of *.hexline splits.")
@click.option("--repo", "repos", type=EXISTING_FILE, multiple=True, help="JA3 repository (default: split labels).")
@click.option(
    "--method",
    "methods",
    type=click.Choice([m.value for m in Method]),
    multiple=True,
    default=(Method.ML.value,),
    show_default=True,
)
@click.option("--byte-mode", type=BYTE_MODES, default=ByteMode.ALL.value, show_default=True)
@click.option("--kind", type=click.Choice(["none", "ordered", "fraction"]), default="none", show_default=True)
@click.option("--fractions", default=DEFAULT_FRACTIONS, show_default=True, help="Comma-separated, for --kind fraction.")
@click.option("--grease-mode", type=GREASE_MODES, default=GreaseMode.INCLUDE.value, show_default=True)
@click.option("--trials", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--seed", type=click.IntRange(min=0), default=None, help="RNG seed (default HELLOGRAM_SEED).")
@click.option("--jobs", type=click.IntRange(min=1), default=None, help="Worker threads.")
@click.option("--delta", type=DELTA, default=None)
@click.option("--confidence", type=click.FloatRange(0.0, 1.0, min_open=True, max_open=True), default=None)
@click.option("--keyword", "keywords", multiple=True, help="Case-insensitive class substring (repeatable).")
@click.option("--out", type=OUTPUT_FILE, required=True, help="Per-trial CSV; summaries go next to it.")
@click.pass_obj
@operational
def experiment(
    config: HellogramConfig,
    splits_dir: Path,
    repos: Tuple[Path, ...],
    methods: Tuple[str, ...],
    byte_mode: str,
    kind: str,
    fractions: str,
    grease_mode: str,
    trials: int,
    seed: Optional[int],
    jobs: Optional[int],
    delta: Optional[float],
    confidence: Optional[float],
    keywords: Tuple[str, ...],
    out: Path,
) -> None:
    """Cross-validate classifiers over k splits under cipher-stunting perturbations.

    Writes OUT (one row per fold and trial), OUT.summary.csv (mean and
    confidence interval per configuration), OUT.classes.csv and, with
    --keyword, OUT.keywords.csv.
    """
    seed = config.seed if seed is None else seed
    splits = read_splits(splits_dir)
    repo = _repository(repos, splits)
    base = ExperimentConfig(
        byte_mode=ByteMode(byte_mode),
        trials=trials,
        confidence=config.confidence if confidence is None else confidence,
        delta=config.delta if delta is None else delta,
        jobs=config.jobs if jobs is None else jobs,
        keywords=list(keywords),
    )

    perturbations: List[Optional[PerturbationSpec]]
    if kind == "none":
        perturbations = [None]
    elif kind == "ordered":
        perturbations = [PerturbationSpec(kind=PerturbationKind.ORDERED, grease_mode=grease_mode, rng_seed=seed)]
    else:
        perturbations = [
            PerturbationSpec(kind=PerturbationKind.FRACTION, fraction=f, rng_seed=seed)
            for f in _parse_fractions(fractions)
        ]

    runner = ExperimentRunner.from_splits([s.raws() for s in splits], repo)
    reports: List[EvalReport] = []
    for method in methods:
        for spec in perturbations:
            config_i = base.model_copy(update={"method": Method(method), "perturbation": spec})
            reports.append(runner.run(config_i))

    stem = out.with_suffix("")
    with out.open("w", encoding="utf-8", newline="") as handle:
        write_trials_csv(reports, handle)
    with Path(f"{stem}.summary.csv").open("w", encoding="utf-8", newline="") as handle:
        write_summary_csv(reports, handle)
    with Path(f"{stem}.classes.csv").open("w", encoding="utf-8", newline="") as handle:
        write_class_csv(reports, handle)
    if keywords:
        with Path(f"{stem}.keywords.csv").open("w", encoding="utf-8", newline="") as handle:
            write_keyword_csv(reports, handle)

    outcome = CommandOutcome()
    for r in reports:
        outcome.note(
            f"{r.config.method.value} {r.config.byte_mode.value} {r.config.kind} "
            f"{'' if r.config.fraction is None else r.config.fraction}: "
            f"unbiased f1 {r.unbiased_f1_mean:.4f} +/- {r.ci_halfwidth:.4f}"
        )
    outcome.emit()


def main() -> None:
    cli(prog_name="hellogram")


if __name__ == "__main__":
    main()

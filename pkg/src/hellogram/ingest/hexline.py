"""
Hex-line corpus format.

One ClientHello per line: ``<hex digits>`` or ``<hex digits><TAB><label>``.
Whitespace inside the hex digits is ignored; blank lines and lines starting
with ``#`` are skipped.
"""

import logging
from pathlib import Path
from typing import Iterable, List, Sequence, Union

from hellogram.core.errors import InvalidHexDigit, NotText, OddDigitCount, ParseError
from hellogram.ingest.corpus import CorpusEntry, CorpusFile, CorpusFormat, SkipRecord
from hellogram.wire.clienthello import RawClientHello, parse_client_hello
from hellogram.wire.scrub import hex_to_decimal

logger = logging.getLogger(__name__)

HEXLINE_SUFFIX = ".hexline"

PathLike = Union[str, Path]


def read_hexline(path: PathLike) -> CorpusFile:
    """Read a hex-line corpus.

    Lines whose bytes do not parse as a ClientHello are recorded as skips.

    Raises:
        InvalidHexDigit: A line holds a non-hex character; the message names the line.
        OddDigitCount: A line holds an odd number of hex digits.
        NotText: The file is not UTF-8.
    """
    path = Path(path)
    corpus = CorpusFile(format=CorpusFormat.HEXLINE)
    try:
        lines = path.read_text(encoding="utf-8").split("\n")
    except UnicodeDecodeError as e:
        raise NotText(f"{path}: not UTF-8 text (byte {e.start})", details={"path": str(path)}) from e

    for lineno, raw_line in enumerate(lines, start=1):
        line = raw_line.rstrip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue

        digits, _, label = line.partition("\t")
        source_id = f"{path.name}:{lineno}"
        try:
            data = bytes(hex_to_decimal(digits))
        except (InvalidHexDigit, OddDigitCount) as e:
            raise type(e)(f"{path}:{lineno}: {e.message}", details={**e.details, "line": lineno}) from e

        if not data:
            corpus.skipped.append(SkipRecord(source_id=source_id, reason="empty"))
            continue
        raw = RawClientHello(data=data, source_id=source_id)
        try:
            parse_client_hello(raw)
        except ParseError as e:
            logger.debug(f"[Ingest] {source_id}: {e.message}")
            corpus.skipped.append(SkipRecord(source_id=source_id, reason=e.code))
            continue
        corpus.entries.append(CorpusEntry(raw=raw, label=label.strip() or None))

    if corpus.skipped:
        logger.warning(f"[Ingest] {path}: {len(corpus.skipped)} lines skipped")
    logger.info(f"[Ingest] Read {len(corpus)} ClientHellos from {path}")
    return corpus


def format_hexline(entries: Iterable[CorpusEntry]) -> str:
    lines = ["# hellogram hexline corpus: <hex> TAB <label>"]
    for entry in entries:
        line = entry.raw.hex()
        if entry.label is not None:
            line += f"\t{entry.label}"
        lines.append(line)
    return "\n".join(lines) + "\n"


def write_hexline(corpus: Union[CorpusFile, Sequence[CorpusEntry]], path: PathLike) -> None:
    """Write entries as lowercase hex, one per line, labels after a TAB."""
    entries = corpus.entries if isinstance(corpus, CorpusFile) else list(corpus)
    Path(path).write_text(format_hexline(entries), encoding="utf-8")
    logger.info(f"[Ingest] Wrote {len(entries)} ClientHellos to {path}")


def split_paths(directory: PathLike) -> List[Path]:
    """Hex-line files of a split directory, in name order."""
    return sorted(p for p in Path(directory).iterdir() if p.is_file() and p.suffix == HEXLINE_SUFFIX)


def read_splits(directory: PathLike) -> List[CorpusFile]:
    return [read_hexline(p) for p in split_paths(directory)]


def write_splits(splits: Sequence[CorpusFile], directory: PathLike) -> List[Path]:
    """Write each split as ``split_NN.hexline`` under ``directory``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for index, split in enumerate(splits):
        path = directory / f"split_{index:02d}{HEXLINE_SUFFIX}"
        write_hexline(split, path)
        paths.append(path)
    return paths

"""
JA3 hash to label repository used for quasi-labeling.

Repository files are UTF-8 text, one ``<32-hex-hash><TAB><label>`` entry per
line; lines starting with ``#`` and blank lines are ignored.
"""

import logging
import re
from pathlib import Path
from types import MappingProxyType
from typing import Dict, Iterable, Iterator, List, Mapping, Tuple, Union

from hellogram.core.errors import MalformedRepositoryLine, NotText
from hellogram.ja3.fingerprint import UNKNOWN_LABEL, ja3_hash, ja3_string
from hellogram.wire.clienthello import ParsedClientHello

logger = logging.getLogger(__name__)

_HASH_PATTERN = re.compile(r"^[0-9a-fA-F]{32}$")

PathLike = Union[str, Path]


class LabelRepository:
    """Mapping from JA3 hash to application label.

    Lookups are case-insensitive on the hash; absent hashes resolve to
    "Unknown". Collisions keep the first label seen and are recorded in
    ``warnings``.
    """

    def __init__(self, entries: Iterable[Tuple[str, str]] = (), source: str = ""):
        self._entries: Dict[str, str] = {}
        self._warnings: List[str] = []
        for digest, app_label in entries:
            self._add(digest, app_label, source)

    def _add(self, digest: str, app_label: str, source: str = "") -> bool:
        key = digest.lower()
        existing = self._entries.get(key)
        if existing is None:
            self._entries[key] = app_label
            return True
        if existing != app_label:
            where = f" ({source})" if source else ""
            message = f"hash {key} already labeled {existing!r}; ignoring {app_label!r}{where}"
            self._warnings.append(message)
            logger.warning(f"[LabelRepository] {message}")
        return False

    def lookup(self, digest: str) -> str:
        """Return the label for a hash, or "Unknown"."""
        return self._entries.get(digest.lower(), UNKNOWN_LABEL)

    def label_for(self, parsed: ParsedClientHello) -> str:
        return self.lookup(ja3_hash(ja3_string(parsed)))

    @property
    def entries(self) -> Mapping[str, str]:
        """Read-only view of the hash to label map."""
        return MappingProxyType(self._entries)

    @property
    def warnings(self) -> List[str]:
        return list(self._warnings)

    def labels(self) -> List[str]:
        """Distinct labels, sorted."""
        return sorted(set(self._entries.values()))

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, digest: object) -> bool:
        return isinstance(digest, str) and digest.lower() in self._entries

    def __iter__(self) -> Iterator[Tuple[str, str]]:
        return iter(self._entries.items())


def _parse_line(path: PathLike, lineno: int, line: str) -> Tuple[str, str]:
    digest, sep, app_label = line.partition("\t")
    digest = digest.strip()
    app_label = app_label.strip()
    if not sep or not app_label:
        raise MalformedRepositoryLine(
            f"{path}:{lineno}: expected '<hash>\\t<label>'",
            details={"path": str(path), "line": lineno},
        )
    if not _HASH_PATTERN.match(digest):
        raise MalformedRepositoryLine(
            f"{path}:{lineno}: {digest!r} is not a 32-digit hexadecimal hash",
            details={"path": str(path), "line": lineno},
        )
    return digest, app_label


def load_repository(path: PathLike) -> LabelRepository:
    """Load one repository file.

    Raises:
        MalformedRepositoryLine: A line has a bad hash or no label.
        NotText: The file is not UTF-8.
    """
    path = Path(path)
    entries = []
    try:
        lines = path.read_text(encoding="utf-8").split("\n")
    except UnicodeDecodeError as e:
        raise NotText(f"{path}: not UTF-8 text (byte {e.start})", details={"path": str(path)}) from e

    for lineno, line in enumerate(lines, start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        entries.append(_parse_line(path, lineno, line))

    repo = LabelRepository(entries, source=str(path))
    logger.info(f"[LabelRepository] Loaded {len(repo)} hashes from {path}")
    return repo


def merge_repositories(repos: Iterable[LabelRepository]) -> LabelRepository:
    """Merge repositories in order; the first repository to define a hash wins."""
    merged = LabelRepository()
    for index, repo in enumerate(repos):
        merged._warnings.extend(repo.warnings)
        for digest, app_label in repo:
            merged._add(digest, app_label, source=f"repository #{index + 1}")
    return merged


def load_repositories(paths: Iterable[PathLike]) -> LabelRepository:
    """Load and merge several repository files in argument order."""
    return merge_repositories(load_repository(p) for p in paths)


def repository_from_labeled(pairs: Iterable[Tuple[ParsedClientHello, str]]) -> LabelRepository:
    """Build a repository from ClientHellos with known labels."""
    return LabelRepository(
        ((ja3_hash(ja3_string(parsed)), app_label) for parsed, app_label in pairs),
        source="labeled corpus",
    )


def write_repository(repo: LabelRepository, path: PathLike) -> None:
    """Write a repository file with entries sorted by hash."""
    lines = ["# hellogram JA3 repository: <md5> TAB <label>"]
    lines.extend(f"{digest}\t{app_label}" for digest, app_label in sorted(repo))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

"""
Deterministic synthetic ClientHello corpora.

Each class profile is a template (version, cipher list, extension order,
groups, point formats) standing in for one client application. Samples of a
class share the template and differ in the per-connection fields a real client
randomizes: random, session ID, SNI host, key-share keys, GREASE values and
padding length. Per-class sample counts follow explicit counts or weights
allocated by largest remainder.
"""

import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Set, Tuple, Union

import numpy as np
import yaml
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from hellogram.core.errors import InvalidProfile
from hellogram.ingest.corpus import CorpusEntry, CorpusFile, CorpusFormat
from hellogram.ja3.fingerprint import GREASE_VALUES
from hellogram.stunt.perturb import make_rng
from hellogram.wire.builder import (
    ClientHelloBuilder,
    alpn_body,
    ec_point_formats_body,
    key_share_body,
    supported_versions_body,
    u16_list_body,
)
from hellogram.wire.clienthello import (
    EXT_ALPN,
    EXT_EC_POINT_FORMATS,
    EXT_EXTENDED_MASTER_SECRET,
    EXT_KEY_SHARE,
    EXT_PADDING,
    EXT_PSK_KEY_EXCHANGE_MODES,
    EXT_RENEGOTIATION_INFO,
    EXT_SERVER_NAME,
    EXT_SESSION_TICKET,
    EXT_SIGNATURE_ALGORITHMS,
    EXT_SUPPORTED_GROUPS,
    EXT_SUPPORTED_VERSIONS,
)

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

_GREASE = sorted(GREASE_VALUES)

# Code points the default profiles draw from.
CIPHER_POOL = [
    0x1301, 0x1302, 0x1303, 0xC02B, 0xC02F, 0xC02C, 0xC030, 0xCCA9, 0xCCA8, 0xC013,
    0xC014, 0x009C, 0x009D, 0x002F, 0x0035, 0x000A, 0xC009, 0xC00A, 0xC023, 0xC024,
    0xC027, 0xC028, 0x009E, 0x009F, 0x0033, 0x0039, 0x0067, 0x006B, 0xC012, 0x0016,
    0x00FF, 0xC0AC, 0xC0AD, 0xC09C, 0xC09D, 0x003C, 0x003D, 0xC008, 0x0005, 0x0004,
]
EXTENSION_POOL = [
    EXT_SERVER_NAME,
    EXT_EXTENDED_MASTER_SECRET,
    EXT_RENEGOTIATION_INFO,
    EXT_SUPPORTED_GROUPS,
    EXT_EC_POINT_FORMATS,
    EXT_SESSION_TICKET,
    EXT_ALPN,
    EXT_SIGNATURE_ALGORITHMS,
    EXT_KEY_SHARE,
    EXT_PSK_KEY_EXCHANGE_MODES,
    EXT_SUPPORTED_VERSIONS,
]
GROUP_POOL = [29, 23, 24, 25, 30, 256, 257]
SIGNATURE_POOL = [0x0403, 0x0804, 0x0401, 0x0503, 0x0805, 0x0501, 0x0806, 0x0601, 0x0203, 0x0201]
FAMILIES = ["chrome", "firefox", "safari", "edge", "curl", "adware", "malware", "okhttp"]


class ClassProfile(BaseModel):
    """Template for one synthetic client application."""

    label: str = Field(..., min_length=1)
    legacy_version: int = Field(default=0x0303, ge=0, le=0xFFFF)
    ciphers: List[int] = Field(..., min_length=1)
    extensions: List[int] = Field(default_factory=lambda: list(EXTENSION_POOL))
    supported_groups: List[int] = Field(default_factory=lambda: [29, 23, 24])
    ec_point_formats: List[int] = Field(default_factory=lambda: [0])
    signature_algorithms: List[int] = Field(default_factory=lambda: [0x0403, 0x0804, 0x0401])
    alpn: List[str] = Field(default_factory=lambda: ["h2", "http/1.1"])
    supported_versions: List[int] = Field(default_factory=lambda: [0x0304, 0x0303])
    grease: bool = Field(default=False, description="Prefix GREASE values like Chromium clients")
    padding: bool = Field(default=True, description="Append a padding extension of random length")
    count: Optional[int] = Field(None, ge=0)
    weight: Optional[float] = Field(None, ge=0.0)

    @field_validator("ciphers", "supported_groups", "signature_algorithms", "supported_versions")
    @classmethod
    def validate_u16(cls, v: List[int]) -> List[int]:
        if any(not 0 <= c <= 0xFFFF for c in v):
            raise ValueError("code points are 16-bit")
        return v

    @field_validator("label")
    @classmethod
    def validate_label(cls, v: str) -> str:
        if "\t" in v or "\n" in v or v.strip() != v:
            raise ValueError(f"label {v!r} must not contain tabs, newlines or edge whitespace")
        return v


class ProfileSpec(BaseModel):
    """Set of class profiles and how many samples each receives.

    Either every profile carries a ``count``, or ``total`` is set and samples are
    allocated in proportion to profile weights (equal when omitted).
    """

    profiles: List[ClassProfile] = Field(..., min_length=1)
    total: Optional[int] = Field(None, ge=0)

    @model_validator(mode="after")
    def validate_allocation(self) -> "ProfileSpec":
        labels = [p.label for p in self.profiles]
        if len(set(labels)) != len(labels):
            raise ValueError("profile labels must be distinct")
        has_counts = [p.count is not None for p in self.profiles]
        if self.total is None and not all(has_counts):
            raise ValueError("set total or give every profile a count")
        if self.total is not None and any(has_counts):
            raise ValueError("total and per-profile counts are mutually exclusive")
        if self.total is not None and sum(self.weights()) <= 0:
            raise ValueError("profile weights must not all be zero")
        return self

    def weights(self) -> List[float]:
        return [1.0 if p.weight is None else p.weight for p in self.profiles]

    def counts(self) -> Dict[str, int]:
        """Samples per label."""
        if self.total is None:
            return {p.label: int(p.count or 0) for p in self.profiles}
        allocated = allocate(self.total, self.weights())
        return {p.label: n for p, n in zip(self.profiles, allocated)}

    @classmethod
    def from_yaml(cls, path: PathLike) -> "ProfileSpec":
        """Load a profile spec from YAML.

        Raises:
            InvalidProfile: The file is not valid YAML or violates the schema.
        """
        try:
            data = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
            return cls.model_validate(data)
        except (yaml.YAMLError, ValidationError, UnicodeDecodeError) as e:
            raise InvalidProfile(f"{path}: {e}", details={"path": str(path)}) from e


def allocate(total: int, weights: Sequence[float]) -> List[int]:
    """Split ``total`` in proportion to ``weights`` by largest remainder.

    Ties in the remainder go to the earlier weight.
    """
    weight_sum = float(sum(weights))
    quotas = [total * w / weight_sum for w in weights]
    counts = [int(np.floor(q)) for q in quotas]
    leftover = total - sum(counts)
    order = sorted(range(len(weights)), key=lambda i: (-(quotas[i] - counts[i]), i))
    for i in order[:leftover]:
        counts[i] += 1
    return counts


def tiered_weights(n_classes: int, tiers: Sequence[float] = (0.75, 0.20, 0.05)) -> List[float]:
    """Class-imbalanced weights: the top fifth of classes share the first tier,
    the next three tenths the second, the rest the last."""
    if n_classes < len(tiers):
        return list(tiers[:n_classes])
    top = max(1, round(n_classes * 0.2))
    middle = max(1, round(n_classes * 0.3))
    bottom = n_classes - top - middle
    if bottom < 1:
        middle, bottom = middle - 1, 1
    sizes = [top, middle, bottom]
    weights: List[float] = []
    for share, size in zip(tiers, sizes):
        weights.extend([share / size] * size)
    return weights


def default_profiles(
    n_classes: int,
    total: int,
    seed: int = 0,
    grease: bool = False,
    weights: Optional[Sequence[float]] = None,
    variants: int = 1,
) -> ProfileSpec:
    """Build ``n_classes`` distinct templates with controlled overlap.

    Every family draws its cipher list, extension order and groups from shared
    pools, so families overlap in values but not in whole templates. With
    ``variants`` above one, consecutive classes form families of that size.
    Members share the extension order, groups, signature algorithms and cipher
    suite set; each member after the first swaps two adjacent cipher pairs, and
    odd members list ALPN protocols in reverse, a field JA3 ignores.

    Raises:
        InvalidProfile: ``n_classes`` or ``variants`` is below one.
    """
    if n_classes < 1:
        raise InvalidProfile("at least one class is required")
    if variants < 1:
        raise InvalidProfile(f"variants must be at least 1, got {variants}")
    rng = make_rng(seed, 0xC1A55)
    seen: Set[Tuple[int, ...]] = set()
    profiles: List[ClassProfile] = []
    while len(profiles) < n_classes:
        while True:
            size = int(rng.integers(6, 20))
            ciphers = [CIPHER_POOL[i] for i in rng.choice(len(CIPHER_POOL), size=size, replace=False)]
            if tuple(ciphers) not in seen:
                seen.add(tuple(ciphers))
                break
        n_ext = int(rng.integers(6, len(EXTENSION_POOL) + 1))
        extensions = [EXTENSION_POOL[i] for i in rng.choice(len(EXTENSION_POOL), size=n_ext, replace=False)]
        groups = [GROUP_POOL[i] for i in rng.choice(len(GROUP_POOL), size=int(rng.integers(2, 5)), replace=False)]
        sigalgs = [
            SIGNATURE_POOL[i]
            for i in rng.choice(len(SIGNATURE_POOL), size=int(rng.integers(3, 9)), replace=False)
        ]
        family = FAMILIES[(len(profiles) // variants) % len(FAMILIES)]
        for member, member_ciphers in enumerate(_family_orders(ciphers, variants, rng, seen)):
            if len(profiles) == n_classes:
                break
            index = len(profiles)
            profiles.append(
                ClassProfile(
                    label=f"{family}-{index:02d}",
                    ciphers=member_ciphers,
                    extensions=extensions,
                    supported_groups=groups,
                    signature_algorithms=sigalgs,
                    alpn=["http/1.1", "h2"] if member % 2 else ["h2", "http/1.1"],
                    grease=grease,
                    weight=None if weights is None else weights[index],
                )
            )
    return ProfileSpec(profiles=profiles, total=total)


def _family_orders(
    base: List[int], variants: int, rng: np.random.Generator, seen: Set[Tuple[int, ...]]
) -> List[List[int]]:
    """The base cipher order followed by variants - 1 unseen reorderings of it."""
    orders = [base]
    while len(orders) < variants:
        ciphers = list(base)
        for start in sorted(int(s) for s in rng.choice(len(base) - 1, size=2, replace=False)):
            ciphers[start], ciphers[start + 1] = ciphers[start + 1], ciphers[start]
        if tuple(ciphers) not in seen:
            seen.add(tuple(ciphers))
            orders.append(ciphers)
    return orders


def _grease_value(rng: np.random.Generator) -> int:
    return _GREASE[int(rng.integers(len(_GREASE)))]


def _random_bytes(rng: np.random.Generator, n: int) -> bytes:
    return rng.integers(0, 256, size=n, dtype=np.uint8).tobytes()


def _host(rng: np.random.Generator, label: str) -> str:
    return f"{label.lower()}-{_random_bytes(rng, 4).hex()}.example.com"


def build_sample(profile: ClassProfile, rng: np.random.Generator) -> ClientHelloBuilder:
    """Instantiate one ClientHello from a class template."""
    groups = list(profile.supported_groups)
    ciphers = list(profile.ciphers)
    builder = ClientHelloBuilder(legacy_version=profile.legacy_version)
    builder.random(_random_bytes(rng, 32)).session_id(_random_bytes(rng, 32))

    if profile.grease:
        ciphers.insert(0, _grease_value(rng))
        groups.insert(0, _grease_value(rng))
        builder.extension(_grease_value(rng))
    builder.ciphers(ciphers)

    for ext_type in profile.extensions:
        if ext_type == EXT_SERVER_NAME:
            builder.server_name(_host(rng, profile.label))
        elif ext_type == EXT_SUPPORTED_GROUPS:
            builder.extension(ext_type, u16_list_body(groups))
        elif ext_type == EXT_EC_POINT_FORMATS:
            builder.extension(ext_type, ec_point_formats_body(profile.ec_point_formats))
        elif ext_type == EXT_SIGNATURE_ALGORITHMS:
            builder.extension(ext_type, u16_list_body(profile.signature_algorithms))
        elif ext_type == EXT_ALPN:
            builder.extension(ext_type, alpn_body(profile.alpn))
        elif ext_type == EXT_SUPPORTED_VERSIONS:
            builder.extension(ext_type, supported_versions_body(profile.supported_versions))
        elif ext_type == EXT_KEY_SHARE:
            share = (profile.supported_groups[0], _random_bytes(rng, 32))
            builder.extension(ext_type, key_share_body([share]))
        elif ext_type == EXT_PSK_KEY_EXCHANGE_MODES:
            builder.extension(ext_type, b"\x01\x01")
        elif ext_type == EXT_RENEGOTIATION_INFO:
            builder.extension(ext_type, b"\x00")
        else:
            builder.extension(ext_type)

    if profile.padding:
        builder.extension(EXT_PADDING, bytes(int(rng.integers(0, 256))))
    return builder


def generate_synthetic(spec: ProfileSpec, seed: int = 0) -> CorpusFile:
    """Generate a labeled corpus; identical (spec, seed) give identical bytes.

    Samples are shuffled so that round-robin splits mix classes.
    """
    rng = make_rng(seed)
    counts = spec.counts()
    entries: List[CorpusEntry] = []
    for profile in spec.profiles:
        for _ in range(counts[profile.label]):
            raw = build_sample(profile, rng).to_raw()
            entries.append(CorpusEntry(raw=raw, label=profile.label))

    order = rng.permutation(len(entries))
    shuffled = []
    for position, index in enumerate(order):
        entry = entries[int(index)]
        raw = entry.raw.model_copy(update={"source_id": f"synthetic:{position + 1}"})
        shuffled.append(CorpusEntry(raw=raw, label=entry.label))

    logger.info(f"[Synthetic] Generated {len(shuffled)} ClientHellos over {len(counts)} classes")
    return CorpusFile(entries=shuffled, format=CorpusFormat.SYNTHETIC)


def split_corpus(corpus: CorpusFile, k: int) -> List[CorpusFile]:
    """Deal entries round-robin into k splits, preserving relative order."""
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    splits = [CorpusFile(format=corpus.format) for _ in range(k)]
    for index, entry in enumerate(corpus.entries):
        splits[index % k].entries.append(entry)
    return splits

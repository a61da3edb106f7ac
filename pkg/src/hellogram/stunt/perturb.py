"""
Cipher-stunting perturbations of the cipher suite list.

Two perturbations are supported: swapping one cipher suite with its successor
(ordered swap) and rearranging a randomly chosen fraction of the list (random
fraction permutation). Both only reorder values; every other field of the
ClientHello is left untouched. Random draws come from numpy's PCG64 generator
so trials replay identically across platforms.
"""

import logging
import math
from enum import Enum
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, Field, model_validator

from hellogram.core.errors import ListTooShort
from hellogram.ja3.fingerprint import is_grease
from hellogram.wire.clienthello import ParsedClientHello, RawClientHello, serialize

logger = logging.getLogger(__name__)


class PerturbationKind(str, Enum):
    ORDERED = "ordered"
    FRACTION = "fraction"


class GreaseMode(str, Enum):
    """Whether ordered swaps may involve GREASE cipher values."""

    INCLUDE = "include"
    EXCLUDE = "exclude"


class PerturbationSpec(BaseModel):
    """One perturbation configuration."""

    kind: PerturbationKind
    fraction: Optional[float] = Field(None, gt=0.0, le=1.0)
    grease_mode: GreaseMode = GreaseMode.INCLUDE
    rng_seed: int = Field(default=0, ge=0, lt=2**64)
    allow_identity: bool = Field(
        default=False,
        description="Accept a fraction permutation that leaves the list unchanged",
    )

    @model_validator(mode="after")
    def validate_fraction(self) -> "PerturbationSpec":
        if self.kind == PerturbationKind.FRACTION and self.fraction is None:
            raise ValueError("a fraction permutation needs a fraction")
        if self.kind == PerturbationKind.ORDERED and self.fraction is not None:
            raise ValueError("fraction only applies to fraction permutations")
        return self


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """PCG64 generator seeded from ``(seed, *stream)``.

    Distinct stream tuples (for example fold and trial indices) yield
    independent generators.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, *stream])))


def _require_pair(parsed: ParsedClientHello) -> int:
    n = len(parsed.cipher_suites)
    if n < 2:
        raise ListTooShort(f"cipher suite list of length {n} cannot be permuted", details={"length": n})
    return n


def _with_ciphers(parsed: ParsedClientHello, ciphers: List[int]) -> ParsedClientHello:
    return parsed.model_copy(update={"cipher_suites": tuple(ciphers)})


def swap_positions(parsed: ParsedClientHello, grease_mode: GreaseMode = GreaseMode.INCLUDE) -> List[int]:
    """Indices i eligible for an ordered swap of entries i and i+1."""
    ciphers = parsed.cipher_suites
    positions = range(len(ciphers) - 1)
    if grease_mode == GreaseMode.EXCLUDE:
        return [i for i in positions if not is_grease(ciphers[i]) and not is_grease(ciphers[i + 1])]
    return list(positions)


def ordered_swap(
    parsed: ParsedClientHello,
    rng: np.random.Generator,
    grease_mode: GreaseMode = GreaseMode.INCLUDE,
) -> ParsedClientHello:
    """Swap one uniformly chosen cipher suite with its successor.

    The last position has no successor and is never chosen. With
    ``GreaseMode.EXCLUDE`` only pairs free of GREASE values are eligible.

    Raises:
        ListTooShort: Fewer than two cipher suites, or no eligible pair.
    """
    _require_pair(parsed)
    positions = swap_positions(parsed, grease_mode)
    if not positions:
        raise ListTooShort("no cipher suite pair without GREASE to swap")
    i = positions[int(rng.integers(len(positions)))]
    ciphers = list(parsed.cipher_suites)
    ciphers[i], ciphers[i + 1] = ciphers[i + 1], ciphers[i]
    return _with_ciphers(parsed, ciphers)


def selection_size(fraction: float, n: int) -> int:
    """Number of positions a fraction permutation rearranges.

    ``fraction * n`` rounded half up, at least 2 and at most n.
    """
    return min(n, max(2, math.floor(fraction * n + 0.5)))


def random_fraction_permute(
    parsed: ParsedClientHello,
    fraction: float,
    rng: np.random.Generator,
    allow_identity: bool = False,
) -> ParsedClientHello:
    """Rearrange the values at a random fraction of cipher suite positions.

    ``selection_size(fraction, n)`` positions are chosen without replacement and
    their values rearranged uniformly at random. Individual fixed points are
    allowed. Unless ``allow_identity`` is set, an arrangement that reproduces the
    original order is redrawn; when every chosen value is equal no other order
    exists and the hello is returned unchanged.
    Redrawing is the default because an unchanged cipher list is no perturbation
    at all: it keeps the JA3 hash, so a trial would count exact-match hits that
    no stunted client produces, most often at small selections.

    Raises:
        ListTooShort: Fewer than two cipher suites.
        ValueError: fraction outside (0, 1].
    """
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction must lie in (0, 1], got {fraction}")
    n = _require_pair(parsed)
    k = selection_size(fraction, n)
    chosen = sorted(int(i) for i in rng.choice(n, size=k, replace=False))
    ciphers = list(parsed.cipher_suites)
    original = [ciphers[i] for i in chosen]

    if len(set(original)) < 2:
        return parsed

    while True:
        arranged = [original[j] for j in rng.permutation(k)]
        if allow_identity or arranged != original:
            break

    for i, value in zip(chosen, arranged):
        ciphers[i] = value
    return _with_ciphers(parsed, ciphers)


def perturb(parsed: ParsedClientHello, spec: PerturbationSpec, rng: np.random.Generator) -> ParsedClientHello:
    """Apply the perturbation described by ``spec``."""
    if spec.kind == PerturbationKind.ORDERED:
        return ordered_swap(parsed, rng, spec.grease_mode)
    assert spec.fraction is not None
    return random_fraction_permute(parsed, spec.fraction, rng, allow_identity=spec.allow_identity)


def reserialize(parsed: ParsedClientHello, source_id: str = "") -> RawClientHello:
    """Encode a (possibly perturbed) ClientHello back into wire bytes."""
    return RawClientHello(data=serialize(parsed), source_id=source_id)

"""
Cipher-stunting perturbations.
"""

from hellogram.stunt.perturb import (
    GreaseMode,
    PerturbationKind,
    PerturbationSpec,
    make_rng,
    ordered_swap,
    perturb,
    random_fraction_permute,
    reserialize,
    selection_size,
    swap_positions,
)

__all__ = [
    "GreaseMode",
    "PerturbationKind",
    "PerturbationSpec",
    "make_rng",
    "ordered_swap",
    "perturb",
    "random_fraction_permute",
    "reserialize",
    "selection_size",
    "swap_positions",
]

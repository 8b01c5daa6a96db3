"""Reductions from featured transition systems into featured games."""

from .distance import direct_distance_oracle, distance_game, max_mismatch
from .fts import FTS, FTSTransition, fts_from_dict, fts_to_dict, load_fts, parse_fts, split_tolerances
from .mucalc import (
    Formula,
    alternation_depth,
    max_to_min_priority,
    mucalc_to_parity_game,
    parse_formula,
    render,
)

__all__ = [
    "FTS",
    "FTSTransition",
    "Formula",
    "alternation_depth",
    "direct_distance_oracle",
    "distance_game",
    "fts_from_dict",
    "fts_to_dict",
    "load_fts",
    "max_mismatch",
    "max_to_min_priority",
    "mucalc_to_parity_game",
    "parse_formula",
    "parse_fts",
    "render",
    "split_tolerances",
]

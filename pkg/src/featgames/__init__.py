"""Featured two-player graph games solved for every product of a product line at once."""

from .domains import TOP, ParityDomain
from .featured import (
    FeaturedResult,
    extract_featured_strategy,
    fattr_star,
    fdattr_star,
    feattr_star,
    fpattr_star,
    fwattr_star,
    project_strategy,
    solve_featured,
)
from .game import FeaturedGame, GameStructure, State, Transition, load_game, parse_game, validate_non_blocking
from .logic import FeatureFunction, ProductSet, ValidationError, combine, parse_guard, reduce, restrict
from .plain import INF, InternalError, Valuation, extract_strategy, solve, value_under_strategy, zielonka

__version__ = "0.1.0"

__all__ = [
    "INF",
    "TOP",
    "FeatureFunction",
    "FeaturedGame",
    "FeaturedResult",
    "GameStructure",
    "InternalError",
    "ParityDomain",
    "ProductSet",
    "State",
    "Transition",
    "ValidationError",
    "Valuation",
    "combine",
    "extract_featured_strategy",
    "extract_strategy",
    "fixture_path",
    "fattr_star",
    "fdattr_star",
    "feattr_star",
    "fpattr_star",
    "fwattr_star",
    "load_game",
    "parse_game",
    "parse_guard",
    "project_strategy",
    "reduce",
    "restrict",
    "solve",
    "solve_featured",
    "validate_non_blocking",
    "value_under_strategy",
    "zielonka",
]


def fixture_path(name: str):
    """Path of a bundled example document."""
    from pathlib import Path

    return Path(__file__).resolve().parent / "fixtures" / name

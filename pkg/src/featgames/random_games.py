"""Seeded generators of random featured games and weighted FTS pairs."""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from fractions import Fraction

from .game import FeaturedGame, State, Transition
from .logic import TRUE, FeatureExpr, ProductSet, Var, conj, disj, disj_all, neg
from .translations.fts import FTS, FTSTransition

FEATURES = ("fa", "fb", "fc", "fd")

WEIGHT_RANGES = {
    "reachability": (0, 0),
    "min-reachability": (0, 8),
    "discounted": (-8, 8),
    "energy": (-8, 8),
    "parity": (0, 0),
}


@dataclass(frozen=True)
class GameConfig:
    kind: str
    max_features: int = 4
    min_states: int = 2
    max_states: int = 12
    max_out: int = 3
    max_priority: int = 4
    guard_prob: float = 0.6
    accept_prob: float = 0.2


@dataclass(frozen=True)
class FTSConfig:
    max_features: int = 3
    max_states: int = 5
    max_actions: int = 2
    max_out: int = 3
    guard_prob: float = 0.5
    quarter_max: int = 16  # weights are multiples of 1/4 in [0, quarter_max / 4]


def random_guard(rng: random.Random, features: tuple[str, ...], prob: float) -> FeatureExpr:
    if not features or rng.random() >= prob:
        return TRUE

    def literal():
        v = Var(rng.choice(features))
        return neg(v) if rng.random() < 0.5 else v

    g = literal()
    if rng.random() < 0.5:
        g = conj(g, literal()) if rng.random() < 0.5 else disj(g, literal())
    return g


def _covering_guard(px: ProductSet, guards: list[FeatureExpr]) -> FeatureExpr | None:
    covered = 0
    for g in guards:
        covered |= px.mask(g)
    if covered == px.full:
        return None
    return neg(disj_all(guards))


def random_game(rng: random.Random, cfg: GameConfig) -> FeaturedGame:
    """A non-blocking featured game over the full product set of a random feature list."""
    features = FEATURES[: rng.randint(1, cfg.max_features)]
    px = ProductSet(features)
    n = rng.randint(cfg.min_states, cfg.max_states)
    ids = [f"v{i}" for i in range(n)]
    accepting = set()
    if cfg.kind in ("reachability", "min-reachability"):
        accepting = {sid for sid in ids if rng.random() < cfg.accept_prob} or {rng.choice(ids)}
    states = [
        State(sid, rng.choice((1, 2)), sid in accepting,
              rng.randint(0, cfg.max_priority) if cfg.kind == "parity" else None)
        for sid in ids
    ]
    lo, hi = WEIGHT_RANGES[cfg.kind]
    edges = []
    for sid in ids:
        guards = []
        for _ in range(rng.randint(1, cfg.max_out)):
            g = random_guard(rng, features, cfg.guard_prob)
            guards.append(g)
            edges.append((sid, rng.choice(ids), g, rng.randint(lo, hi)))
        rest = _covering_guard(px, guards)
        if rest is not None:
            edges.append((sid, rng.choice(ids), rest, rng.randint(lo, hi)))
    ts = [Transition(k, a, b, g, w) for k, (a, b, g, w) in enumerate(edges)]
    return FeaturedGame(cfg.kind, px, ids[0], states, ts, {"generator": "random_game"})


def random_games(seed: int, count: int, cfg: GameConfig):
    rng = random.Random(seed)
    for _ in range(count):
        yield random_game(rng, cfg)


def random_fts(rng: random.Random, cfg: FTSConfig, features: tuple[str, ...] | None = None,
               actions: tuple[str, ...] | None = None) -> FTS:
    if features is None:
        features = FEATURES[: rng.randint(0, cfg.max_features)]
    if actions is None:
        actions = ("a", "b")[: rng.randint(1, cfg.max_actions)]
    px = ProductSet(features)
    ids = [f"q{i}" for i in range(rng.randint(1, cfg.max_states))]
    ts = []
    for sid in ids:
        for _ in range(rng.randint(0, cfg.max_out)):
            w = Fraction(rng.randint(0, cfg.quarter_max), 4)
            ts.append(FTSTransition(len(ts), sid, rng.choice(actions), rng.choice(ids),
                                    random_guard(rng, features, cfg.guard_prob), w))
    return FTS(px, ids[0], ids, actions, ts)


def perturbed(rng: random.Random, fts: FTS, cfg: FTSConfig) -> FTS:
    """Same shape with re-drawn weights on roughly half the transitions."""
    ts = []
    for t in fts.transitions:
        if rng.random() < 0.5:
            t = replace(t, weight=Fraction(rng.randint(0, cfg.quarter_max), 4))
        ts.append(t)
    return fts.with_transitions(ts)


def random_fts_pair(rng: random.Random, cfg: FTSConfig) -> tuple[FTS, FTS]:
    """Either a weight perturbation of one system or two independent systems over the same features."""
    f1 = random_fts(rng, cfg)
    if rng.random() < 0.5:
        return f1, perturbed(rng, f1, cfg)
    return f1, random_fts(rng, cfg, f1.px.features, f1.actions)

"""Discounted distance of the coffee machine with tolerances, across discount factors.

For each λ the featured distance game is solved once and compared with the
closed forms 0.2λ/(1−λ²) for {euro} and 0.4λ²/(1−λ³) for {dollar}, and with
the direct per-product equation system.
"""

from __future__ import annotations

import argparse
import math
from dataclasses import dataclass

from featgames import fdattr_star, fixture_path
from featgames.translations import direct_distance_oracle, distance_game, load_fts, split_tolerances


@dataclass
class DistanceConfig:
    lambdas: tuple[float, ...] = (0.5, 0.8, 0.9, 0.95, 0.99)
    eps: float = 1e-9


def closed_form(product: frozenset, lam: float) -> float | None:
    if product == {"euro"}:
        return 0.2 * lam / (1 - lam ** 2)
    if product == {"dollar"}:
        return 0.4 * lam ** 2 / (1 - lam ** 3)
    return None


def run(cfg: DistanceConfig) -> list[tuple]:
    low, high = split_tolerances(load_fts(fixture_path("coffee_tolerance_fts.json")))
    rows = []
    for lam in cfg.lambdas:
        game = distance_game(low, high, lam)
        res = fdattr_star(game, math.sqrt(lam), cfg.eps)
        for p in game.px:
            got = res.lookup(game.initial, p)
            oracle = direct_distance_oracle(low, high, p, lam, cfg.eps)
            rows.append((lam, game.px.label(p), got, oracle, closed_form(p, lam), res.iterations))
    return rows


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lambda", dest="lambdas", type=float, nargs="+", default=list(DistanceConfig.lambdas))
    ap.add_argument("--epsilon", type=float, default=DistanceConfig.eps)
    a = ap.parse_args()
    rows = run(DistanceConfig(tuple(a.lambdas), a.epsilon))
    print(f"{'lambda':>7} {'product':>16} {'game':>10} {'oracle':>10} {'closed':>10} {'iters':>6}")
    for lam, label, got, oracle, closed, iters in rows:
        c = f"{closed:10.4f}" if closed is not None else f"{'-':>10}"
        print(f"{lam:7.2f} {label:>16} {got:10.4f} {oracle:10.4f} {c} {iters:6d}")


if __name__ == "__main__":
    main()

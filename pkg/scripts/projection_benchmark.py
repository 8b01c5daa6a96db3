"""Family-based vs product-by-product solving on random featured games.

Prints, per game kind, total runtime of both approaches, the largest number of
cells any state needed, and whether the results agreed.
"""

from __future__ import annotations

import argparse
import json
import time
from dataclasses import asdict, dataclass, field

from featgames import solve, solve_featured
from featgames.random_games import GameConfig, random_games

KINDS = ("reachability", "min-reachability", "discounted", "energy", "parity")


@dataclass
class BenchConfig:
    count: int = 100
    seed: int = 1
    max_features: int = 4
    max_states: int = 12
    lam: float = 0.9
    eps: float = 1e-8
    kinds: tuple[str, ...] = field(default=KINDS)


def bench(cfg: BenchConfig) -> list[dict]:
    rows = []
    for n, kind in enumerate(cfg.kinds):
        lam, eps = (cfg.lam, cfg.eps) if kind == "discounted" else (None, None)
        gcfg = GameConfig(kind, max_features=cfg.max_features, max_states=cfg.max_states)
        t_feat = t_plain = 0.0
        max_cells = mismatches = products = 0
        for game in random_games(cfg.seed + n, cfg.count, gcfg):
            start = time.perf_counter()
            res = solve_featured(game, lam, eps)
            t_feat += time.perf_counter() - start
            max_cells = max(max_cells, max(len(f) for f in res.solution.values()))
            for p in game.px:
                start = time.perf_counter()
                val = solve(game.project(p), lam, eps)
                t_plain += time.perf_counter() - start
                products += 1
                got = res.lookup(game.initial, p)
                ok = abs(got - val.value) <= 2 * eps / (1 - lam) if kind == "discounted" else got == val.value
                mismatches += not ok
        rows.append({"kind": kind, "games": cfg.count, "products": products,
                     "featured_s": round(t_feat, 3), "per_product_s": round(t_plain, 3),
                     "max_cells": max_cells, "mismatches": mismatches})
    return rows


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=BenchConfig.count)
    ap.add_argument("--seed", type=int, default=BenchConfig.seed)
    ap.add_argument("--max-features", type=int, default=BenchConfig.max_features)
    ap.add_argument("--max-states", type=int, default=BenchConfig.max_states)
    ap.add_argument("--json", action="store_true", help="print JSON instead of a table")
    a = ap.parse_args()
    cfg = BenchConfig(count=a.count, seed=a.seed, max_features=a.max_features, max_states=a.max_states)
    rows = bench(cfg)
    if a.json:
        print(json.dumps({"config": asdict(cfg), "rows": rows}, indent=2))
        return
    cols = list(rows[0])
    print("  ".join(f"{c:>16}" for c in cols))
    for r in rows:
        print("  ".join(f"{r[c]!s:>16}" for c in cols))


if __name__ == "__main__":
    main()

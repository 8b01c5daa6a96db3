"""Exit criteria of the package, one test per criterion.

Each test records a PASS/FAIL line; the lines are repeated in the pytest
terminal summary.  Run standalone with ``python3 tests/test_acceptance.py``.
"""

import math
import random
import sys
import time

import pytest

from featgames import (
    TOP,
    extract_featured_strategy,
    fdattr_star,
    feattr_star,
    fpattr_star,
    project_strategy,
    solve,
    solve_featured,
    value_under_strategy,
    zielonka,
)
from featgames.logic import Cell, FeatureFunction, ProductSet, char_formula, combine, reduce, restrict, validate_partition
from featgames.plain import INF
from featgames.random_games import FTSConfig, GameConfig, random_fts_pair, random_games, random_guard
from featgames.translations import direct_distance_oracle, distance_game, mucalc_to_parity_game
from helpers import (
    COFFEE_FORMULA,
    DOLLAR,
    EURO,
    LAM,
    SQRT_LAM,
    coffee_distance,
    coffee_fts,
    coffee_parity,
    coffee_reach,
    coffee_split,
    report,
    robot,
)

KINDS = ("reachability", "min-reachability", "discounted", "energy", "parity")
RANDOM_LAM, RANDOM_EPS = 0.9, 1e-8
RANDOM_TOL = 2 * RANDOM_EPS / (1 - RANDOM_LAM)


def timed(fn):
    start = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - start


def params(kind):
    return (RANDOM_LAM, RANDOM_EPS) if kind == "discounted" else (None, None)


def agree(kind, a, b):
    if kind == "discounted":
        return abs(a - b) <= RANDOM_TOL
    return a == b


# ---------------------------------------------------------------------------
# shared random runs


@pytest.fixture(scope="module")
def projection_runs():
    """500 random games per kind, each solved featured and per product."""
    runs = {}
    start = time.perf_counter()
    for n, kind in enumerate(KINDS):
        items = []
        for game in random_games(1000 + n, 500, GameConfig(kind)):
            lam, eps = params(kind)
            res = solve_featured(game, lam, eps)
            plain = {p: solve(game.project(p), lam, eps) for p in game.px}
            items.append((game, res, plain))
        runs[kind] = items
    return runs, time.perf_counter() - start


FIXTURES = {
    "robot-energy": (robot, None),
    "coffee-discounted": (coffee_distance, SQRT_LAM),
    "coffee-parity": (coffee_parity, None),
    "coffee-reach": (coffee_reach, None),
}


# ---------------------------------------------------------------------------


def test_criterion_1_discounted_coffee():
    game = coffee_distance()
    res, secs = timed(lambda: fdattr_star(game, SQRT_LAM, 1e-9))
    got = {p: res.lookup(game.initial, p) for p in game.px}
    want = {frozenset({"euro"}): EURO, frozenset({"dollar"}): DOLLAR, frozenset({"euro", "dollar"}): 13.2}
    ok = all(abs(got[p] - v) <= 0.01 for p, v in want.items()) and secs < 1.0
    shown = ", ".join(f"{game.px.label(p)}={got[p]:.4f}" for p in game.px)
    report(1, ok, f"{shown}; solve {secs:.3f}s")


def test_criterion_2_energy_robot():
    game = robot()
    res, secs = timed(lambda: feattr_star(game))
    got = {tuple(sorted(p)): res.initial.lookup(p) for p in game.px}
    exact = got == {(): 0, ("fbrock",): TOP, ("fextra",): 0, ("fbrock", "fextra"): 0}
    winners = res.winners(credit=0)
    formula_ok = all(winners.lookup(p) == ("fbrock" not in p or "fextra" in p) for p in game.px)
    report(2, exact and formula_ok and secs < 1.0,
           f"credits {got}; winners match !fbrock || fextra: {formula_ok}; solve {secs:.3f}s")


def test_criterion_3_parity_coffee():
    from test_translations import test_coffee_parity_golden_structure

    (game, res), secs = timed(lambda: (lambda g: (g, fpattr_star(g)))(mucalc_to_parity_game(coffee_fts(), COFFEE_FORMULA)))
    try:
        test_coffee_parity_golden_structure()
        structure = True
    except AssertionError:
        structure = False
    w = res.winners()
    winners_ok = all(w.lookup(p) == ("euro" in p) for p in game.px)
    inner = len(game.states) - 1
    report(3, structure and winners_ok and secs < 1.0,
           f"{inner} states + sink, owners, priorities and guards match the golden game: {structure}; "
           f"winners = products with euro: {winners_ok}; translate+solve {secs:.3f}s")


def test_criterion_4_projection(projection_runs):
    runs, secs = projection_runs
    mismatches = 0
    total = 0
    for kind, items in runs.items():
        for game, res, plain in items:
            for p, val in plain.items():
                for sid in game.states:
                    total += 1
                    if not agree(kind, res.lookup(sid, p), val.values[sid]):
                        mismatches += 1
    counts = {k: len(v) for k, v in runs.items()}
    report(4, mismatches == 0 and secs < 300 and all(c == 500 for c in counts.values()),
           f"{sum(counts.values())} games, {total} (state, product) checks, {mismatches} mismatches; {secs:.1f}s")


def test_criterion_5_parity_cross_validation(projection_runs):
    runs, _ = projection_runs
    mismatches = checks = 0
    for game, res, plain in runs["parity"]:
        for p, val in plain.items():
            w1, _ = zielonka(game.project(p))
            for sid in game.states:
                checks += 1
                featured_win = res.lookup(sid, p) is not TOP
                plain_win = val.values[sid] is not TOP
                if not (featured_win == plain_win == (sid in w1)):
                    mismatches += 1
    report(5, mismatches == 0, f"{len(runs['parity'])} games, {checks} state checks, {mismatches} mismatches")


def _worse(kind, sol, game, t, lam, tol):
    """Is ``t`` strictly worse than the value at its source (with a clear margin)?

    Moves out of accepting states never are: the value there is fixed.
    """
    v, vt = sol.values[t.source], sol.values[t.target]
    if game.states[t.source].accepting:
        return False
    if kind == "reachability":
        return v is True and vt is False
    if kind == "min-reachability":
        return v != INF and (vt == INF or t.weight + vt > v)
    if kind == "discounted":
        return float(t.weight) + lam * vt < v - 100 * tol
    if kind == "energy":
        from featgames.domains import ominus
        return v is not TOP and ominus(vt, t.weight, sol.extra["bound"]) != v
    if kind == "parity":
        return v is not TOP and vt is TOP
    raise AssertionError(kind)


def _strategy_games():
    for n, kind in enumerate(KINDS):
        for game in random_games(2000 + n, 100, GameConfig(kind)):
            yield kind, game, RANDOM_LAM if kind == "discounted" else None
    for name, (make, lam) in FIXTURES.items():
        game = make()
        yield game.kind, game, lam


def test_criterion_6_strategy_optimality():
    rng = random.Random(6)
    bad = games = trials = detected = 0
    for kind, game, lam in _strategy_games():
        games += 1
        eps = (1e-9 if lam == SQRT_LAM else RANDOM_EPS) if kind == "discounted" else None
        tol = 2 * eps / (1 - lam) if eps else 0
        res = solve_featured(game, lam, eps)
        sigma = extract_featured_strategy(res)
        candidates = []
        for p in game.px:
            proj = game.project(p)
            want = solve(proj, lam, eps)
            strat = project_strategy(sigma, p)
            got = value_under_strategy(proj, strat, lam, eps).values
            for sid in proj.states:
                same = abs(got[sid] - want.values[sid]) <= tol if kind == "discounted" else got[sid] == want.values[sid]
                bad += not same
            for sid, t in strat.items():
                for u in proj.out[sid]:
                    if u.index != t.index and _worse(kind, want, proj, u, lam, tol):
                        candidates.append((p, sid, u, want))
        if not candidates:
            continue
        p, sid, u, want = rng.choice(candidates)
        proj = game.project(p)
        strat = project_strategy(sigma, p)
        strat[sid] = u
        got = value_under_strategy(proj, strat, lam, eps).values
        trials += 1
        if kind == "discounted":
            detected += any(abs(got[s] - want.values[s]) > tol for s in proj.states)
        else:
            detected += any(got[s] != want.values[s] for s in proj.states)
    rate = detected / trials if trials else 0.0
    report(6, bad == 0 and rate >= 0.95,
           f"{games} games, {bad} non-optimal projected values; perturbations detected {detected}/{trials} ({rate:.1%})")


def test_criterion_7_distance_oracle():
    rng = random.Random(7)
    lam, eps = 0.81, 1e-8
    tol = 3 * eps / (1 - math.sqrt(lam))
    worst = 0.0
    checks = 0
    for _ in range(100):
        f1, f2 = random_fts_pair(rng, FTSConfig())
        game = distance_game(f1, f2, lam)
        res = fdattr_star(game, math.sqrt(lam), eps)
        for p in f1.px:
            oracle = direct_distance_oracle(f1, f2, p, lam, eps)
            worst = max(worst, abs(res.lookup(game.initial, p) - oracle))
            checks += 1
    lo, hi = coffee_split()
    fig = fdattr_star(distance_game(lo, hi, LAM), SQRT_LAM, 1e-9)
    euro = fig.lookup("(s0, s0)", {"euro"})
    both = fig.lookup("(s0, s0)", {"euro", "dollar"})
    fixture_ok = abs(euro - 9.95) < 0.01 and abs(both - 13.2) < 0.01
    report(7, worst <= tol and fixture_ok,
           f"100 pairs, {checks} product checks, max deviation {worst:.2e} (tolerance {tol:.1e}); "
           f"coffee euro={euro:.4f}, euro+dollar={both:.4f}")


def _random_function(rng, px):
    values = [rng.randint(0, 3) for _ in px]
    cells = [Cell(char_formula(p, px.features), 1 << k, values[k]) for k, p in enumerate(px)]
    return FeatureFunction(px, cells), values


def test_criterion_8_partition_hygiene(projection_runs):
    rng = random.Random(8)
    law_failures = 0
    ops = (min, max, lambda a, b: a + b, lambda a, b: a - b)
    for _ in range(1000):
        n = rng.randint(0, 4)
        features = [f"f{i}" for i in range(n)]
        all_products = list(ProductSet(features))
        chosen = [sorted(p) for p in all_products if rng.random() < 0.7] or [sorted(all_products[0])]
        px = ProductSet(features, chosen)
        raw1, vals1 = _random_function(rng, px)
        raw2, vals2 = _random_function(rng, px)
        f1, f2 = reduce(raw1), reduce(raw2)
        op = rng.choice(ops)
        guard = random_guard(rng, tuple(features), 0.8)
        neutral = -1
        c = combine(f1, f2, op)
        r = restrict(f1, guard, neutral)
        for out in (f1, f2, c, r):
            try:
                out.check()
            except Exception:
                law_failures += 1
        for k, p in enumerate(px):
            law_failures += f1.lookup(p) != vals1[k]
            law_failures += c.lookup(p) != op(vals1[k], vals2[k])
            law_failures += r.lookup(p) != (vals1[k] if guard.evaluate(p) else neutral)
    # every emitted solution and strategy from the random runs and fixtures
    runs, _ = projection_runs
    emitted = bad = 0
    for items in runs.values():
        for game, res, _ in items:
            for f in res.solution.values():
                emitted += 1
                bad += not (validate_partition([c.guard for c in f], f.px) and f.is_canonical())
    for name, (make, lam) in FIXTURES.items():
        res = solve_featured(make(), lam, 1e-9 if lam else None, trace=True, check=True)
        sigma = extract_featured_strategy(res)
        for J in res.history:
            for f in J.values():
                emitted += 1
                bad += not (validate_partition([c.guard for c in f], f.px) and f.is_canonical())
        for f in sigma.values():
            emitted += 1
            bad += not validate_partition([c.guard for c in f], f.px)
    report(8, law_failures == 0 and bad == 0,
           f"1000 law instances, {law_failures} failures; {emitted} emitted functions checked, {bad} invalid")


def test_criterion_9_late_splitting():
    worst = 0
    iterations = 0
    for name, (make, lam) in FIXTURES.items():
        game = make().with_guards()
        res = solve_featured(game, lam, 1e-9 if lam else None, trace=True)
        iterations += len(res.history)
        worst = max(worst, max(len(f) for J in res.history for f in J.values()))
    report(9, worst == 1, f"{len(FIXTURES)} all-true fixtures, {iterations} iterates, max cells per state {worst}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))

import json
import random

import pytest

from featgames import (
    INF,
    TOP,
    extract_featured_strategy,
    fattr_star,
    fdattr_star,
    feattr_star,
    fpattr_star,
    fwattr_star,
    project_strategy,
    solve,
    solve_featured,
    value_under_strategy,
)
from featgames.featured import (
    fprog,
    per_product_report,
    solution_from_json,
    solution_to_json,
    strategy_from_json,
    strategy_to_json,
)
from featgames.logic import equivalent, parse_guard
from featgames.random_games import GameConfig, random_game
from helpers import DOLLAR, EURO, LAM, SQRT_LAM, build, coffee_distance, coffee_parity, coffee_reach, robot


def cells(f):
    """Cells as (guard, value) with guards compared semantically by the caller."""
    return [(c.guard, c.value) for c in f]


def same_function(f, expected):
    px = f.px
    for p in px:
        want = [v for text, v in expected if parse_guard(text, px.features).evaluate(p)]
        assert len(want) == 1 and f.lookup(p) == want[0], (sorted(p), f.lookup(p), want)
    assert len(f) == len({v for _, v in expected})


class TestReachability:
    def test_coffee(self):
        res = fattr_star(coffee_reach())
        same_function(res.initial, [("dollar", True), ("!dollar", False)])

    def test_initial_accepting(self):
        g = build("reachability", [("i", 1, True)], [("i", "i", "true", 0)], ("a",))
        assert cells(fattr_star(g).initial)[0][1] is True and len(fattr_star(g).initial) == 1

    def test_no_accepting_states(self):
        g = build("reachability", [("i", 1), ("j", 2)], [("i", "j", "a", 0), ("i", "i", "!a", 0), ("j", "i", "true", 0)], ("a",))
        res = fattr_star(g)
        assert all(len(f) == 1 and f.cells[0].value is False for f in res.solution.values())


class TestMinReachability:
    def test_dollar_shortcut(self):
        g = build("min-reachability", [("i", 1), ("a", 1), ("f", 1, True)],
                  [("i", "a", "true", 2), ("a", "f", "true", 3), ("i", "f", "dollar", 1), ("f", "f", "true", 0)],
                  ("euro", "dollar"), [["euro"], ["dollar"], ["euro", "dollar"]])
        same_function(fwattr_star(g).initial, [("dollar", 1), ("!dollar", 5)])

    def test_unreachable_under_product(self):
        g = build("min-reachability", [("i", 1), ("f", 1, True)],
                  [("i", "f", "a", 4), ("i", "i", "!a", 0), ("f", "f", "true", 0)], ("a",))
        same_function(fwattr_star(g).initial, [("a", 4), ("!a", INF)])


class TestDiscounted:
    def test_coffee_values(self):
        res = fdattr_star(coffee_distance(), SQRT_LAM, 1e-9)
        assert res.lookup("(s0, s0)", {"euro"}) == pytest.approx(EURO, abs=1e-6)
        assert res.lookup("(s0, s0)", {"dollar"}) == pytest.approx(DOLLAR, abs=1e-6)
        assert res.lookup("(s0, s0)", {"euro", "dollar"}) == pytest.approx(13.2, abs=0.01)
        assert res.params["error_bound"] < 1e-6

    def test_needs_parameters(self):
        with pytest.raises(ValueError):
            solve_featured(coffee_distance())


class TestEnergy:
    def test_robot(self):
        res = feattr_star(robot())
        report = {tuple(sorted(p)): v for p, v in per_product_report(res.initial)}
        assert report == {(): 0, ("fbrock",): TOP, ("fextra",): 0, ("fbrock", "fextra"): 0}
        assert res.params["bound"] == 5
        w = res.winners(credit=0)
        for p in res.px:
            assert w.lookup(p) == parse_guard("!fbrock || fextra").evaluate(p)

    def test_nonnegative(self):
        g = build("energy", [("a", 1), ("b", 2)], [("a", "b", "x", 1), ("a", "b", "!x", 0), ("b", "a", "true", 3)], ("x",))
        res = feattr_star(g)
        assert all(len(f) == 1 and f.cells[0].value == 0 for f in res.solution.values())


class TestParity:
    def test_coffee_winners(self):
        res = fpattr_star(coffee_parity())
        w = res.winners()
        assert len(w) == 2
        for c in w:
            assert equivalent(c.guard, parse_guard("euro" if c.value else "!euro"), res.px)

    @pytest.mark.parametrize("prio, expect", [(0, True), (1, False)])
    def test_uniform_priorities(self, prio, expect):
        g = build("parity", [("a", 1, prio), ("b", 2, prio)],
                  [("a", "b", "x", 0), ("a", "a", "!x", 0), ("b", "a", "true", 0)], ("x",))
        w = fpattr_star(g).winners()
        assert len(w) == 1 and w.cells[0].value is expect

    def test_fprog(self):
        g = build("parity", [("a", 1, 1), ("b", 1, 0), ("c", 1, 1)],
                  [("a", "a", "true", 0), ("b", "a", "true", 0), ("c", "a", "true", 0)], ("x",))
        res = fpattr_star(g)
        assert res.solution["a"].cells[0].value is TOP
        assert fprog(res, "c", "a").cells[0].value is TOP
        zero = fpattr_star(build("parity", [("a", 1, 0), ("b", 1, 2)],
                                 [("a", "b", "true", 0), ("b", "a", "true", 0)], ("x",)))
        assert fprog(zero, "a", "b").values() == zero.solution["b"].values()


class TestStrategies:
    def test_constant_strategy(self):
        g = robot().with_guards()
        sigma = extract_featured_strategy(feattr_star(g))
        for sid, f in sigma.items():
            assert len(f) == 1

    def test_robot_big_charge(self):
        sigma = extract_featured_strategy(feattr_star(robot()))
        assert project_strategy(sigma, {"fextra", "fbrock"})["s0"].weight == 5

    @pytest.mark.parametrize("kind", ["reachability", "min-reachability", "discounted", "energy", "parity"])
    def test_projected_strategies_are_optimal(self, kind):
        rng = random.Random(11)
        lam, eps = 0.9, 1e-8
        for _ in range(15):
            game = random_game(rng, GameConfig(kind, max_states=8))
            res = solve_featured(game, lam, eps)
            sigma = extract_featured_strategy(res)
            for p in game.px:
                proj = game.project(p)
                want = solve(proj, lam, eps).values
                got = value_under_strategy(proj, project_strategy(sigma, p), lam, eps).values
                for sid in proj.states:
                    if kind == "discounted":
                        assert got[sid] == pytest.approx(want[sid], abs=2 * eps / (1 - lam))
                    elif kind == "parity":
                        assert (got[sid] is TOP) == (want[sid] is TOP)
                    else:
                        assert got[sid] == want[sid]


class TestSerialization:
    @pytest.mark.parametrize("make, lam", [(robot, None), (coffee_parity, None), (coffee_distance, SQRT_LAM)])
    def test_solution_round_trip(self, make, lam):
        game = make()
        res = solve_featured(game, lam, 1e-9 if lam else None)
        doc = json.loads(json.dumps(solution_to_json(res)))
        again = solution_from_json(doc, game)
        for sid, f in res.solution.items():
            assert again[sid].values() == f.values()
            assert len(again[sid]) == len(f)

    def test_strategy_round_trip(self):
        game = robot()
        sigma = extract_featured_strategy(feattr_star(game))
        again = strategy_from_json(json.loads(json.dumps(strategy_to_json(sigma))), game)
        for sid in sigma:
            assert [t.index for t in again[sid].values()] == [t.index for t in sigma[sid].values()]


class TestLateSplitting:
    @pytest.mark.parametrize("make, lam", [(robot, None), (coffee_parity, None), (coffee_reach, None),
                                           (coffee_distance, SQRT_LAM)])
    def test_true_guards_never_split(self, make, lam):
        game = make().with_guards()
        res = solve_featured(game, lam, 1e-6 if lam else None, trace=True, check=True)
        assert len(res.history) == res.iterations + 1
        for J in res.history:
            assert all(len(f) == 1 for f in J.values())

    def test_split_only_where_guards_differ(self):
        res = fattr_star(coffee_reach(), trace=True)
        assert max(len(f) for J in res.history for f in J.values()) == 2


def test_monotone_iterates():
    res = feattr_star(robot(), trace=True)
    for before, after in zip(res.history, res.history[1:]):
        for sid in before:
            assert all(a <= b for a, b in zip(before[sid].values(), after[sid].values()))

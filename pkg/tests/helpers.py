"""Shared builders for tests."""

from featgames import fixture_path, load_game
from featgames.game import FeaturedGame, State, Transition
from featgames.logic import ProductSet, parse_guard
from featgames.translations import load_fts, mucalc_to_parity_game, split_tolerances

COFFEE_FORMULA = "nu X. mu Y. ((<ins>Y || <xxl>Y) || <std>X)"
LAM = 0.99
SQRT_LAM = LAM ** 0.5

EURO = 0.2 * LAM / (1 - LAM ** 2)
DOLLAR = 0.4 * LAM ** 2 / (1 - LAM ** 3)


def build(kind, states, edges, features=(), products=None, initial=None):
    """states: list of (id, owner[, accepting/priority]); edges: (src, dst, guard, weight)."""
    px = ProductSet(list(features), products)
    st = []
    for spec in states:
        sid, owner, *rest = spec
        extra = rest[0] if rest else None
        if kind == "parity":
            st.append(State(sid, owner, priority=extra))
        else:
            st.append(State(sid, owner, accepting=bool(extra)))
    ts = [Transition(k, a, b, parse_guard(g, px.features), w) for k, (a, b, g, w) in enumerate(edges)]
    return FeaturedGame(kind, px, initial or st[0].id, st, ts)


def robot():
    return load_game(fixture_path("robot_energy.json"))


def coffee_fts():
    return load_fts(fixture_path("coffee_fts.json"))


def coffee_parity():
    return mucalc_to_parity_game(coffee_fts(), COFFEE_FORMULA)


def coffee_distance():
    return load_game(fixture_path("coffee_distance.json"))


def coffee_split():
    return split_tolerances(load_fts(fixture_path("coffee_tolerance_fts.json")))


def coffee_reach():
    """Coffee machine as an all-player-1 reachability game towards s2."""
    return build(
        "reachability",
        [("s0", 1), ("s1", 1), ("s2", 1, True)],
        [("s0", "s1", "true", 0), ("s1", "s2", "dollar", 0), ("s1", "s0", "euro", 0), ("s2", "s0", "true", 0)],
        features=("euro", "dollar"),
        products=[["euro"], ["dollar"], ["euro", "dollar"]],
    )


ACCEPTANCE_LINES: list[str] = []


def report(n: int, ok: bool, detail: str) -> None:
    """Record and print one acceptance verdict, then fail the test if it did not hold."""
    line = f"ACCEPTANCE {n}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line

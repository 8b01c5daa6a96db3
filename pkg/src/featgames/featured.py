"""Family-based attractor fixed points over guard-partitioned values.

Every state carries a :class:`FeatureFunction`; one attractor round restricts
each successor's function to the transition guard (disabled products get the
neutral element of the owner's aggregate), transforms it by the transition's
effect, and folds the results with the owner's aggregate.  Partitions are
split only where values actually differ, so games whose guards never matter
keep a single cell per state throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping

from .domains import TOP, ParityDomain, energy_bound, ominus
from .game import FeaturedGame, Transition, require_non_blocking
from .logic import (
    FeatureFunction,
    ProductSet,
    ValidationError,
    combine,
    guarded_fold,
    parse_guard,
    render_guard,
    restrict,
)
from .plain import INF, InternalError, _check_discount

Solution = dict  # state id -> FeatureFunction


def _or(a, b):
    return a or b


def _and(a, b):
    return a and b


@dataclass
class _Lattice:
    """How one game kind instantiates the generic featured attractor."""

    init: Callable[[Any], Any]                       # state -> initial value
    player1: tuple[Callable[[Any, Any], Any], Any]  # aggregate, its neutral element
    player2: tuple[Callable[[Any, Any], Any], Any]
    effect: Callable[[Transition, Any], Callable[[Any], Any]]  # transition, source -> value map
    outer: Callable[[Any, Any], Any] | None          # J := outer(J, step(J)); None means J := step(J)


@dataclass
class FeaturedResult:
    kind: str
    game: FeaturedGame
    solution: Solution
    iterations: int
    params: dict[str, Any] = field(default_factory=dict)
    ranks: Solution | None = None
    history: list[Solution] | None = None

    @property
    def px(self) -> ProductSet:
        return self.game.px

    @property
    def initial(self) -> FeatureFunction:
        return self.solution[self.game.initial]

    def lookup(self, state: str, product: Iterable[str]) -> Any:
        return self.solution[state].lookup(product)

    def winners(self, credit: int = 0, state: str | None = None) -> FeatureFunction:
        f = self.solution[self.game.initial if state is None else state]
        if self.kind == "reachability":
            return f
        if self.kind == "min-reachability":
            return f.map(lambda v: v != INF)
        if self.kind == "energy":
            return f.map(lambda v: v is not TOP and v <= credit)
        if self.kind == "parity":
            return f.map(lambda v: v is not TOP)
        raise ValueError("discounted games have values, not winners")


def _lattice(game: FeaturedGame, lam: float | None = None) -> tuple[_Lattice, dict]:
    kind = game.kind
    if kind == "reachability":
        return _Lattice(
            init=lambda s: s.accepting,
            player1=(_or, False),
            player2=(_and, True),
            effect=lambda t, s: None,
            outer=_or,
        ), {}
    if kind == "min-reachability":
        return _Lattice(
            init=lambda s: 0 if s.accepting else INF,
            player1=(min, INF),
            player2=(max, 0),
            effect=lambda t, s: (lambda v, w=t.weight: w + v),
            outer=min,
        ), {}
    if kind == "discounted":
        return _Lattice(
            init=lambda s: 0.0,
            player1=(max, -math.inf),
            player2=(min, math.inf),
            effect=lambda t, s: (lambda v, w=float(t.weight): w + lam * v),
            outer=None,
        ), {"lambda": lam}
    if kind == "energy":
        bound = energy_bound([t.weight for t in game.out[sid]] for sid in game.states)
        return _Lattice(
            init=lambda s: 0,
            player1=(min, TOP),
            player2=(max, 0),
            effect=lambda t, s: (lambda v, w=t.weight: ominus(v, w, bound)),
            outer=max,
        ), {"bound": bound}
    if kind == "parity":
        dom = ParityDomain(s.priority for s in game.states.values())
        return _Lattice(
            init=lambda s: dom.zero,
            player1=(min, TOP),
            player2=(max, dom.zero),
            effect=lambda t, s: (lambda v, k=s.priority: dom.prog(v, k)),
            outer=max,
        ), {"domain": dom}
    raise ValidationError(f"unknown game kind {kind!r}")


def _plan(game: FeaturedGame, lat: _Lattice) -> dict:
    """Per state: owner aggregate, its neutral element and (target, guard, mask, effect) per edge."""
    plan = {}
    for sid, s in game.states.items():
        op, neutral = lat.player1 if s.owner == 1 else lat.player2
        edges = [(t.target, t.guard, game.guard_mask(t), lat.effect(t, s)) for t in game.out[sid]]
        plan[sid] = (op, neutral, edges)
    return plan


def _step_planned(entry, J: Solution, px: ProductSet) -> FeatureFunction:
    op, neutral, edges = entry
    return guarded_fold(px, [(J[target], guard, gm, eff) for target, guard, gm, eff in edges], op, neutral)


def _step_state(game: FeaturedGame, lat: _Lattice, J: Solution, sid: str) -> FeatureFunction:
    s = game.states[sid]
    op, neutral = lat.player1 if s.owner == 1 else lat.player2
    edges = [(t.target, t.guard, game.guard_mask(t), lat.effect(t, s)) for t in game.out[sid]]
    return _step_planned((op, neutral, edges), J, game.px)


def featured_step(game: FeaturedGame, lat: _Lattice, J: Solution, plan: dict | None = None) -> Solution:
    """One round of the featured attractor for every state."""
    plan = plan or _plan(game, lat)
    return {sid: _step_planned(plan[sid], J, game.px) for sid in game.states}


def _check_solution(J: Solution) -> None:
    for f in J.values():
        f.check()


def _fixpoint(game: FeaturedGame, lam: float | None = None, eps: float | None = None,
              trace: bool = False, check: bool = False, max_iterations: int | None = None) -> FeaturedResult:
    require_non_blocking(game)
    lat, params = _lattice(game, lam)
    px = game.px
    J = {sid: FeatureFunction.const(px, lat.init(s)) for sid, s in game.states.items()}
    track_ranks = game.kind in ("reachability", "min-reachability")
    R = {sid: FeatureFunction.const(px, 0) for sid in game.states} if track_ranks else None
    history = [J] if trace else None
    if check:
        _check_solution(J)
    plan = _plan(game, lat)
    k = 0
    while True:
        step = featured_step(game, lat, J, plan)
        new = step if lat.outer is None else {sid: combine(J[sid], step[sid], lat.outer) for sid in J}
        k += 1
        if check:
            _check_solution(new)
        if lat.outer is None:
            delta = 0.0
            for sid in J:
                f, g = J[sid], new[sid]
                if f.partition_key() == g.partition_key():
                    pairs = zip([c[2] for c in f.cells], [c[2] for c in g.cells])
                else:
                    pairs = zip(f.values(), g.values())
                for x, y in pairs:
                    d = abs(x - y)
                    if d > delta:
                        delta = d
            J = new
            if trace:
                history.append(J)
            if delta < eps:
                break
        else:
            if all(new[sid].same_values(J[sid]) for sid in J):
                k -= 1
                break
            if track_ranks:
                for sid in J:
                    changed = combine(J[sid], new[sid], lambda a, b: a != b)
                    R[sid] = combine(R[sid], changed, lambda r, c, k=k: k if c else r)
            J = new
            if trace:
                history.append(J)
        if max_iterations is not None and k >= max_iterations:
            raise InternalError(f"no fixed point after {k} iterations")
    if lat.outer is None:
        params.update(epsilon=eps, error_bound=eps * lam / (1 - lam))
    return FeaturedResult(game.kind, game, J, k, params, R, history)


def fattr_star(game: FeaturedGame, **kw) -> FeaturedResult:
    _expect(game, "reachability")
    return _fixpoint(game, **kw)


def fwattr_star(game: FeaturedGame, **kw) -> FeaturedResult:
    _expect(game, "min-reachability")
    for t in game.transitions:
        if t.weight < 0:
            raise ValidationError(f"transition #{t.index} has negative weight {t.weight}")
    return _fixpoint(game, **kw)


def fdattr_star(game: FeaturedGame, lam: float, eps: float, **kw) -> FeaturedResult:
    _check_discount(lam, eps)
    _expect(game, "discounted")
    return _fixpoint(game, lam, eps, **kw)


def feattr_star(game: FeaturedGame, **kw) -> FeaturedResult:
    _expect(game, "energy")
    return _fixpoint(game, **kw)


def fpattr_star(game: FeaturedGame, **kw) -> FeaturedResult:
    _expect(game, "parity")
    return _fixpoint(game, **kw)


def _expect(game: FeaturedGame, kind: str) -> None:
    if game.kind != kind:
        raise ValidationError(f"expected a {kind} game, got {game.kind}")


def solve_featured(game: FeaturedGame, lam: float | None = None, eps: float | None = None, **kw) -> FeaturedResult:
    if game.kind == "discounted":
        if lam is None or eps is None:
            raise ValueError("discounted games need a discount factor and a precision")
        return fdattr_star(game, lam, eps, **kw)
    solvers = {
        "reachability": fattr_star,
        "min-reachability": fwattr_star,
        "energy": feattr_star,
        "parity": fpattr_star,
    }
    return solvers[game.kind](game, **kw)


def fprog(result: FeaturedResult, source: str, target: str) -> FeatureFunction:
    """Cell-wise progress-measure lift of the target's measures at the source's priority."""
    dom: ParityDomain = result.params["domain"]
    k = result.game.states[source].priority
    return result.solution[target].map(lambda v: dom.prog(v, k))


# ---------------------------------------------------------------------------
# Strategies

_DISABLED = object()


def _pair(a, b):
    return (a, b)


def _exempt(kind: str, accepting: bool, value: Any) -> bool:
    if kind in ("reachability", "min-reachability"):
        return accepting or value is False or value == INF
    if kind in ("energy", "parity"):
        return value is TOP
    return False


def extract_featured_strategy(result: FeaturedResult) -> dict[str, FeatureFunction]:
    """Per player-1 state, a guard-indexed choice of locally optimal transitions.

    On each product the first transition (document order) satisfying the
    kind's local-optimality equation is chosen; for (minimum) reachability
    the successor must also have a strictly smaller attractor rank.
    """
    game, kind, J = result.game, result.kind, result.solution
    lat, _ = _lattice(game, result.params.get("lambda"))
    ranks = result.ranks
    px = game.px
    strategy = {}
    for sid, s in game.states.items():
        if s.owner != 1:
            continue
        target = _step_state(game, lat, J, sid) if kind == "discounted" else J[sid]
        here = combine(target, ranks[sid], _pair) if ranks else target.map(lambda v: (v, None))
        choice = FeatureFunction.const(px, None)
        for t in game.out[sid]:
            effect = lat.effect(t, s)
            succ = combine(J[t.target], ranks[t.target], _pair) if ranks else J[t.target].map(lambda v: (v, None))
            if effect is not None:
                succ = succ.map(lambda vr, f=effect: (f(vr[0]), vr[1]))
            succ = restrict(succ, t.guard, _DISABLED, guard_mask=game.guard_mask(t))

            def ok(h, o, accepting=s.accepting):
                if o is _DISABLED:
                    return False
                (v, r), (w, rr) = h, o
                if _exempt(kind, accepting, v):
                    return True
                return w == v and (r is None or rr < r)

            cond = combine(here, succ, ok)
            choice = combine(choice, cond, lambda c, good, t=t: c if c is not None else (t if good else None))
        if any(c.value is None for c in choice):
            bad = [px.label(p) for c in choice if c.value is None for p in px.products_of(c.mask)]
            raise InternalError(f"no transition at {sid!r} achieves the solved value for products {bad}")
        strategy[sid] = choice
    return strategy


def project_strategy(strategy: Mapping[str, FeatureFunction], product: Iterable[str]) -> dict[str, Transition]:
    return {sid: f.lookup(product) for sid, f in strategy.items()}


def per_product_report(f: FeatureFunction) -> list[tuple[frozenset, Any]]:
    return [(p, f.at(k)) for k, p in enumerate(f.px)]


# ---------------------------------------------------------------------------
# Serialization


def value_to_json(v: Any) -> Any:
    if v is TOP:
        return "top"
    if isinstance(v, bool):
        return v
    if isinstance(v, float) and math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if isinstance(v, tuple):
        return list(v)
    return v


def value_from_json(raw: Any) -> Any:
    if raw == "top":
        return TOP
    if raw == "inf":
        return INF
    if raw == "-inf":
        return -INF
    if isinstance(raw, list):
        return tuple(raw)
    return raw


def function_to_json(f: FeatureFunction, encode: Callable[[Any], Any] = value_to_json) -> list[dict]:
    return [{"guard": render_guard(c.mask, f.px), "value": encode(c.value)} for c in f.cells]


def function_from_json(px: ProductSet, cells: list, decode: Callable[[Any], Any] = value_from_json) -> FeatureFunction:
    if not isinstance(cells, list):
        raise ValidationError("feature function must be a list of cells")
    entries = []
    for k, cell in enumerate(cells):
        if not isinstance(cell, dict) or set(cell) != {"guard", "value"}:
            raise ValidationError(f"cell {k}: needs exactly 'guard' and 'value'")
        entries.append((parse_guard(cell["guard"], px.features), decode(cell["value"])))
    return FeatureFunction.from_entries(px, entries)


def solution_to_json(result: FeaturedResult) -> dict:
    return {
        "kind": result.kind,
        "states": {sid: function_to_json(f) for sid, f in result.solution.items()},
    }


def solution_from_json(doc: Mapping[str, Any], game: FeaturedGame) -> Solution:
    if not isinstance(doc, dict) or "states" not in doc:
        raise ValidationError("solution document needs a 'states' object")
    if doc.get("kind", game.kind) != game.kind:
        raise ValidationError(f"solution is for a {doc.get('kind')} game, not {game.kind}")
    missing = set(game.states) - set(doc["states"])
    if missing:
        raise ValidationError(f"solution lacks states {sorted(missing)}")
    return {sid: function_from_json(game.px, doc["states"][sid]) for sid in game.states}


def strategy_to_json(strategy: Mapping[str, FeatureFunction]) -> dict:
    return {sid: function_to_json(f, lambda t: t.describe()) for sid, f in strategy.items()}


def strategy_from_json(doc: Mapping[str, Any], game: FeaturedGame) -> dict[str, FeatureFunction]:
    by_index = {t.index: t for t in game.transitions}

    def decode(raw):
        if not isinstance(raw, dict) or raw.get("index") not in by_index:
            raise ValidationError(f"strategy references unknown transition {raw!r}")
        return by_index[raw["index"]]

    return {sid: function_from_json(game.px, cells, decode) for sid, cells in doc.items()}


__all__ = [
    "FeaturedResult",
    "fattr_star",
    "fwattr_star",
    "fdattr_star",
    "feattr_star",
    "fpattr_star",
    "fprog",
    "solve_featured",
    "featured_step",
    "extract_featured_strategy",
    "project_strategy",
    "per_product_report",
    "solution_to_json",
    "solution_from_json",
    "strategy_to_json",
    "strategy_from_json",
    "value_to_json",
    "value_from_json",
]

"""Single-product game solvers.

These work on one :class:`GameStructure` (usually a projection) and serve as
the baseline every featured solver is checked against.  All fixed points are
Jacobi sweeps: each round reads only the previous round's valuation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping

from .domains import TOP, ParityDomain, energy_bound, ominus
from .game import GameStructure, Transition, require_non_blocking
from .logic import ValidationError

INF = math.inf


class InternalError(RuntimeError):
    """A solver result violated an invariant it should satisfy by construction."""


@dataclass
class Valuation:
    """Per-state values of a solved game."""

    kind: str
    values: dict[str, Any]
    initial: str
    iterations: int
    ranks: dict[str, int] | None = None
    extra: dict[str, Any] = field(default_factory=dict)

    @property
    def value(self) -> Any:
        return self.values[self.initial]

    def winner(self, state: str | None = None, credit: int = 0) -> bool:
        """Does player 1 win from ``state`` (initial by default)?"""
        v = self.values[self.initial if state is None else state]
        if self.kind == "reachability":
            return v
        if self.kind == "min-reachability":
            return v != INF
        if self.kind == "energy":
            return v is not TOP and v <= credit
        if self.kind == "parity":
            return v is not TOP
        raise ValueError("discounted games have values, not winners")


def _check(game: GameStructure, kind: str) -> None:
    if game.kind != kind:
        raise ValidationError(f"expected a {kind} game, got {game.kind}")
    require_non_blocking(game)


def _track_ranks(ranks: dict[str, int], old: dict, new: dict, k: int) -> None:
    for sid, v in new.items():
        if v != old[sid]:
            ranks[sid] = k


def attr_star(game: GameStructure) -> Valuation:
    """Reachability: least fixed point of U -> U or attr(U) from the accepting set."""
    _check(game, "reachability")
    cur = {sid: s.accepting for sid, s in game.states.items()}
    ranks = {sid: 0 for sid in cur}
    k = 0
    while True:
        new = {}
        for sid, s in game.states.items():
            succ = [cur[t.target] for t in game.out[sid]]
            step = any(succ) if s.owner == 1 else all(succ)
            new[sid] = cur[sid] or step
        if new == cur:
            return Valuation("reachability", cur, game.initial, k, ranks)
        k += 1
        _track_ranks(ranks, cur, new, k)
        cur = new


def wattr_star(game: GameStructure) -> Valuation:
    """Minimum reachability: least fixed point of U -> min(U, wattr(U)) from 0 on F, inf elsewhere."""
    _check(game, "min-reachability")
    for t in game.transitions:
        if t.weight < 0:
            raise ValidationError(f"transition #{t.index} has negative weight {t.weight}")
    cur = {sid: 0 if s.accepting else INF for sid, s in game.states.items()}
    ranks = {sid: 0 for sid in cur}
    k = 0
    while True:
        new = {}
        for sid, s in game.states.items():
            succ = [t.weight + cur[t.target] for t in game.out[sid]]
            step = min(succ) if s.owner == 1 else max(succ)
            new[sid] = min(cur[sid], step)
        if new == cur:
            return Valuation("min-reachability", cur, game.initial, k, ranks)
        k += 1
        _track_ranks(ranks, cur, new, k)
        cur = new


def _check_discount(lam: float, eps: float) -> None:
    if not (0 < lam < 1):
        raise ValueError(f"discount factor must lie in (0, 1), got {lam}")
    if not eps > 0:
        raise ValueError(f"precision must be positive, got {eps}")


def dattr_star(game: GameStructure, lam: float, eps: float) -> Valuation:
    """Discounted value by value iteration from zero until the sup-norm step is below ``eps``."""
    _check_discount(lam, eps)
    _check(game, "discounted")
    cur = {sid: 0.0 for sid in game.states}
    k = 0
    while True:
        new = {}
        for sid, s in game.states.items():
            succ = [float(t.weight) + lam * cur[t.target] for t in game.out[sid]]
            new[sid] = max(succ) if s.owner == 1 else min(succ)
        k += 1
        delta = max(abs(new[sid] - cur[sid]) for sid in new)
        cur = new
        if delta < eps:
            return Valuation("discounted", cur, game.initial, k,
                             extra={"lambda": lam, "epsilon": eps, "error_bound": eps * lam / (1 - lam)})


def eattr_star(game: GameStructure, bound: int | None = None) -> Valuation:
    """Energy: least fixed point of U -> max(U, eattr(U)) over {0..M, TOP}; value is the minimal credit."""
    _check(game, "energy")
    if bound is None:
        bound = energy_bound([t.weight for t in game.out[sid]] for sid in game.states)
    cur: dict[str, Any] = {sid: 0 for sid in game.states}
    k = 0
    while True:
        new = {}
        for sid, s in game.states.items():
            succ = [ominus(cur[t.target], t.weight, bound) for t in game.out[sid]]
            step = min(succ) if s.owner == 1 else max(succ)
            new[sid] = max(cur[sid], step)
        if new == cur:
            return Valuation("energy", cur, game.initial, k, extra={"bound": bound})
        k += 1
        cur = new


def pattr_star(game: GameStructure) -> Valuation:
    """Min-parity: least simultaneous fixed point of the progress-measure lifting."""
    _check(game, "parity")
    dom = ParityDomain(s.priority for s in game.states.values())
    cur: dict[str, Any] = {sid: dom.zero for sid in game.states}
    k = 0
    while True:
        new = {}
        for sid, s in game.states.items():
            succ = [dom.prog(cur[t.target], s.priority) for t in game.out[sid]]
            step = min(succ) if s.owner == 1 else max(succ)
            new[sid] = max(cur[sid], step)
        if new == cur:
            return Valuation("parity", cur, game.initial, k, extra={"domain": dom})
        k += 1
        cur = new


# ---------------------------------------------------------------------------
# Independent parity oracle (recursive decomposition)


def _attractor(states: set[str], preds: dict[str, list[str]], owner: Mapping[str, int],
               succ_count: dict[str, int], target: set[str], player: int) -> set[str]:
    """States from which ``player`` forces a visit to ``target`` inside the subgame ``states``."""
    attr = set(target)
    remaining = dict(succ_count)
    queue = list(target)
    while queue:
        v = queue.pop()
        for u in preds[v]:
            if u not in states or u in attr:
                continue
            if owner[u] == player:
                attr.add(u)
                queue.append(u)
            else:
                remaining[u] -= 1
                if remaining[u] == 0:
                    attr.add(u)
                    queue.append(u)
    return attr


def zielonka(game: GameStructure) -> tuple[set[str], set[str]]:
    """Winning regions (player 1, player 2) of a min-parity game."""
    if game.kind != "parity":
        raise ValidationError(f"expected a parity game, got {game.kind}")
    require_non_blocking(game)
    owner = {sid: s.owner for sid, s in game.states.items()}
    prio = {sid: s.priority for sid, s in game.states.items()}
    succs = {sid: {t.target for t in game.out[sid]} for sid in game.states}
    preds: dict[str, list[str]] = {sid: [] for sid in game.states}
    for sid, ts in succs.items():
        for v in ts:
            preds[v].append(sid)

    def solve(states: set[str]) -> tuple[set[str], set[str]]:
        if not states:
            return set(), set()
        p = min(prio[v] for v in states)
        player = 1 if p % 2 == 0 else 2
        count = {v: sum(1 for w in succs[v] if w in states) for v in states}
        a = _attractor(states, preds, owner, count, {v for v in states if prio[v] == p}, player)
        w1, w2 = solve(states - a)
        opp_win = w2 if player == 1 else w1
        if not opp_win:
            return (set(states), set()) if player == 1 else (set(), set(states))
        b = _attractor(states, preds, owner, count, opp_win, 3 - player)
        w1, w2 = solve(states - b)
        if player == 1:
            return w1, w2 | b
        return w1 | b, w2

    return solve(set(game.states))


# ---------------------------------------------------------------------------
# Strategies


def solve(game: GameStructure, lam: float | None = None, eps: float | None = None) -> Valuation:
    kind = game.kind
    if kind == "reachability":
        return attr_star(game)
    if kind == "min-reachability":
        return wattr_star(game)
    if kind == "discounted":
        if lam is None or eps is None:
            raise ValueError("discounted games need a discount factor and a precision")
        return dattr_star(game, lam, eps)
    if kind == "energy":
        return eattr_star(game)
    if kind == "parity":
        return pattr_star(game)
    raise ValidationError(f"unknown game kind {kind!r}")


def locally_optimal(game: GameStructure, sol: Valuation, t: Transition) -> bool:
    """Does ``t`` satisfy the local-optimality equation of its (player-1) source state?"""
    v = sol.values
    s = game.states[t.source]
    kind = sol.kind
    if kind == "reachability":
        return v[s.id] == v[t.target]
    if kind == "min-reachability":
        return v[s.id] == t.weight + v[t.target]
    if kind == "discounted":
        lam = sol.extra["lambda"]
        best = max(float(u.weight) + lam * v[u.target] for u in game.out[s.id])
        return float(t.weight) + lam * v[t.target] == best
    if kind == "energy":
        return v[s.id] == ominus(v[t.target], t.weight, sol.extra["bound"])
    if kind == "parity":
        return v[s.id] == sol.extra["domain"].prog(v[t.target], s.priority)
    raise ValidationError(f"unknown game kind {kind!r}")


def _admissible(game: GameStructure, sol: Valuation, t: Transition) -> bool:
    v = sol.values
    sid = t.source
    kind = sol.kind
    if kind in ("reachability", "min-reachability"):
        # accepting or losing states: any move keeps the value
        if game.states[sid].accepting or v[sid] in (False, INF):
            return True
        return locally_optimal(game, sol, t) and sol.ranks[t.target] < sol.ranks[sid]
    if kind in ("energy", "parity") and v[sid] is TOP:
        return True
    return locally_optimal(game, sol, t)


def extract_strategy(game: GameStructure, sol: Valuation) -> dict[str, Transition]:
    """A memoryless optimal player-1 strategy: first admissible transition in document order.

    For (minimum) reachability the choice must also decrease the attractor
    rank, otherwise value-preserving cycles could postpone the goal forever.
    """
    strategy = {}
    for sid, s in game.states.items():
        if s.owner != 1:
            continue
        for t in game.out[sid]:
            if _admissible(game, sol, t):
                strategy[sid] = t
                break
        else:
            raise InternalError(f"no transition at {sid!r} achieves the solved value")
    return strategy


def value_under_strategy(game: GameStructure, strategy: Mapping[str, Transition],
                         lam: float | None = None, eps: float | None = None) -> Valuation:
    """Solve the game with player 1 fixed to ``strategy`` and player 2 still optimizing."""
    return solve(game.restricted(strategy), lam, eps)

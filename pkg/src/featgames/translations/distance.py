"""Discounted bisimulation distance between weighted FTS as a featured discounted game.

Player 1 (the challenger) picks a transition on either side; player 2 answers
with a same-labelled transition on the other side and pays the scaled weight
difference.  Solving at discount √λ gives the λ-discounted distance.

When the responder has no same-labelled answer in some product, the response
state loops on itself with the largest possible per-step mismatch, so the
challenger collects the maximal geometric sum there.
"""

from __future__ import annotations

import math
from collections import deque
from decimal import Decimal
from fractions import Fraction
from typing import Iterable

from ..game import FeaturedGame, State, Transition
from ..logic import TRUE, ValidationError, disj_all, neg
from .fts import FTS


def _check_lambda(lam: float) -> None:
    if not (0 < lam < 1):
        raise ValueError(f"discount factor must lie in (0, 1), got {lam}")


def _compatible(f1: FTS, f2: FTS) -> None:
    if f1.px != f2.px:
        raise ValidationError("both systems must share features and products")
    if not (f1.weighted and f2.weighted):
        raise ValidationError("distance games need weighted systems")


def max_mismatch(f1: FTS, f2: FTS) -> Fraction:
    """Upper bound on any single-step weight difference between the two systems."""
    m1 = max((abs(t.weight) for t in f1.transitions), default=Fraction(0))
    m2 = max((abs(t.weight) for t in f2.transitions), default=Fraction(0))
    return m1 + m2


def fmt_weight(x: Fraction) -> str:
    """Exact decimal when the fraction terminates, ``n/d`` otherwise."""
    d = x.denominator
    for p in (2, 5):
        while d % p == 0:
            d //= p
    if d == 1:
        s = format(Decimal(x.numerator) / Decimal(x.denominator), "f")
        return s.rstrip("0").rstrip(".") if "." in s else s
    return f"{x.numerator}/{x.denominator}"


def distance_game(f1: FTS, f2: FTS, lam: float, penalty: Fraction | None = None) -> FeaturedGame:
    """Featured discounted game to be solved at discount ``sqrt(lam)``."""
    _check_lambda(lam)
    _compatible(f1, f2)
    px = f1.px
    scale = lam ** -0.5
    if penalty is None:
        penalty = max_mismatch(f1, f2)

    def pair(s1, s2):
        return f"({s1}, {s2})"

    def pending(s1, s2, a, x, side):
        return f"({s1}, {s2}, {a}, {fmt_weight(x)}, {side})"

    start = ("P", f1.initial, f2.initial)
    seen = {start}
    order = [start]
    queue = deque([start])
    edges: list[tuple[tuple, tuple, object, float]] = []
    penalized = []

    def visit(node):
        if node not in seen:
            seen.add(node)
            order.append(node)
            queue.append(node)

    while queue:
        node = queue.popleft()
        if node[0] == "P":
            _, s1, s2 = node
            out = []
            for t in f1.out[s1]:
                out.append((("R", t.target, s2, t.action, t.weight, 1), t.guard))
            for t in f2.out[s2]:
                out.append((("R", s1, t.target, t.action, t.weight, 2), t.guard))
            for nxt, guard in out:
                edges.append((node, nxt, guard, 0))
                visit(nxt)
            if _uncovered(px, [g for _, g in out]):
                # both systems are stuck here: nothing left to challenge
                edges.append((node, node, _rest([g for _, g in out]), 0))
        else:
            _, s1, s2, a, x, side = node
            if side == 1:
                answers = [(("P", s1, t.target), t.guard, t.weight) for t in f2.out[s2] if t.action == a]
            else:
                answers = [(("P", t.target, s2), t.guard, t.weight) for t in f1.out[s1] if t.action == a]
            for nxt, guard, y in answers:
                edges.append((node, nxt, guard, scale * float(abs(x - y))))
                visit(nxt)
            if _uncovered(px, [g for _, g, _ in answers]):
                edges.append((node, node, _rest([g for _, g, _ in answers]), scale * float(penalty)))
                penalized.append(node)

    def sid(node):
        return pair(*node[1:]) if node[0] == "P" else pending(*node[1:])

    states = [State(sid(n), 1 if n[0] == "P" else 2) for n in order]
    ts = [Transition(k, sid(a), sid(b), g, w) for k, (a, b, g, w) in enumerate(edges)]
    metadata = {
        "source": "discounted-distance",
        "lambda": lam,
        "discount": math.sqrt(lam),
        "penalty": float(penalty),
        "penalized_states": [sid(n) for n in penalized],
    }
    return FeaturedGame("discounted", px, sid(start), states, ts, metadata)


def _uncovered(px, guards: Iterable) -> bool:
    covered = 0
    for g in guards:
        covered |= px.mask(g)
    return covered != px.full


def _rest(guards: list):
    return neg(disj_all(guards)) if guards else TRUE


def direct_distance_oracle(f1: FTS, f2: FTS, product: Iterable[str], lam: float, eps: float,
                           penalty: Fraction | None = None) -> float:
    """Iterate the distance equation system on the two projections until the change is below ``eps``.

    An unanswerable challenge is worth ``penalty / (1 - sqrt(lam))``, the
    same geometric sum the game assigns to it.
    """
    _check_lambda(lam)
    if not eps > 0:
        raise ValueError(f"precision must be positive, got {eps}")
    _compatible(f1, f2)
    if penalty is None:
        penalty = max_mismatch(f1, f2)
    stuck = float(penalty) / (1 - math.sqrt(lam))
    p = f1.px.product(product)
    out1 = {s: [] for s in f1.states}
    out2 = {s: [] for s in f2.states}
    for t in f1.project(p):
        out1[t.source].append((t.action, float(t.weight), t.target))
    for t in f2.project(p):
        out2[t.source].append((t.action, float(t.weight), t.target))

    d = {(a, b): 0.0 for a in f1.states for b in f2.states}
    while True:
        new = {}
        for (s1, s2) in d:
            best = 0.0
            for a, x, t1 in out1[s1]:
                answers = [abs(x - y) + lam * d[t1, t2] for b, y, t2 in out2[s2] if b == a]
                best = max(best, min(answers) if answers else stuck)
            for b, y, t2 in out2[s2]:
                answers = [abs(x - y) + lam * d[t1, t2] for a, x, t1 in out1[s1] if a == b]
                best = max(best, min(answers) if answers else stuck)
            new[s1, s2] = best
        delta = max(abs(new[k] - d[k]) for k in d)
        d = new
        if delta < eps:
            return d[f1.initial, f2.initial]

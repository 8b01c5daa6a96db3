"""Modal mu-calculus formulas and their translation into featured parity games.

The translation produces max-parity priorities (ν unfoldings even, μ
unfoldings odd) and then flips them into the solver's min-parity
convention.  Player-1 dead ends (``ff`` and diamonds with no enabled
successor) move to a shared losing sink; player-2 dead ends (``tt`` and
boxes) loop on themselves, which player 1 wins.
"""

from __future__ import annotations

import re
import warnings
from collections import deque
from dataclasses import dataclass
from functools import lru_cache

from ..game import FeaturedGame, State, Transition
from ..logic import TRUE, ValidationError, disj_all, neg
from .fts import FTS


class Formula:
    __slots__ = ()

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class TT(Formula):
    pass


@dataclass(frozen=True)
class FF(Formula):
    pass


@dataclass(frozen=True)
class Var(Formula):
    name: str


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Diamond(Formula):
    action: str
    body: Formula


@dataclass(frozen=True)
class Box(Formula):
    action: str
    body: Formula


@dataclass(frozen=True)
class Mu(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Nu(Formula):
    var: str
    body: Formula


Fixpoint = (Mu, Nu)


# ---------------------------------------------------------------------------
# Rendering

def _prec(f: Formula) -> int:
    if isinstance(f, (Mu, Nu)):
        return 0
    if isinstance(f, Or):
        return 1
    if isinstance(f, And):
        return 2
    return 3


def render(f: Formula, need: int = 0) -> str:
    if isinstance(f, TT):
        s = "tt"
    elif isinstance(f, FF):
        s = "ff"
    elif isinstance(f, Var):
        s = f.name
    elif isinstance(f, Or):
        s = f"{render(f.left, 1)} || {render(f.right, 2)}"
    elif isinstance(f, And):
        s = f"{render(f.left, 2)} && {render(f.right, 3)}"
    elif isinstance(f, Diamond):
        s = f"<{f.action}>{render(f.body, 3)}"
    elif isinstance(f, Box):
        s = f"[{f.action}]{render(f.body, 3)}"
    else:
        s = f"{'mu' if isinstance(f, Mu) else 'nu'} {f.var}. {render(f.body, 0)}"
    return f"({s})" if _prec(f) < need else s


# ---------------------------------------------------------------------------
# Parsing

_TOKEN = re.compile(r"\s*(?:(\|\||&&|[<>\[\]().])|([A-Za-z_][A-Za-z0-9_']*))")


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens, pos = [], 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            col = pos + len(text[pos:]) - len(text[pos:].lstrip()) + 1
            raise ValidationError(f"formula syntax error at column {col}: unexpected {text[col - 1]!r}")
        tok = m.group(1) or m.group(2)
        tokens.append((tok, m.start(m.lastindex) + 1))
        pos = m.end()
    tokens.append(("", len(text) + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0
        self.scope: list[tuple[str, str]] = []
        self.used: set[str] = set()

    def peek(self) -> str:
        return self.tokens[self.i][0]

    def take(self, expect: str | None = None) -> tuple[str, int]:
        tok = self.tokens[self.i]
        if expect is not None and tok[0] != expect:
            self.fail(f"expected {expect!r}")
        self.i += 1
        return tok

    def fail(self, msg: str):
        tok, col = self.tokens[self.i]
        found = repr(tok) if tok else "end of input"
        raise ValidationError(f"formula syntax error at column {col}: {msg}, found {found}")

    def ident(self, what: str) -> str:
        tok, _ = self.tokens[self.i]
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", tok or "-") or tok in ("mu", "nu", "tt", "ff"):
            self.fail(f"expected {what}")
        self.i += 1
        return tok

    def parse(self) -> Formula:
        f = self.expr()
        if self.peek():
            self.fail("unexpected trailing input")
        return f

    def expr(self) -> Formula:
        left = self.conj()
        while self.peek() == "||":
            self.take()
            left = Or(left, self.conj())
        return left

    def conj(self) -> Formula:
        left = self.unary()
        while self.peek() == "&&":
            self.take()
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        tok = self.peek()
        if tok == "<":
            self.take()
            a = self.ident("an action name")
            self.take(">")
            return Diamond(a, self.unary())
        if tok == "[":
            self.take()
            a = self.ident("an action name")
            self.take("]")
            return Box(a, self.unary())
        if tok in ("mu", "nu"):
            self.take()
            name = self.ident("a variable name")
            self.take(".")
            fresh = name
            k = 1
            while fresh in self.used:
                fresh = f"{name}{k}"
                k += 1
            self.used.add(fresh)
            self.scope.append((name, fresh))
            body = self.expr()
            self.scope.pop()
            return (Mu if tok == "mu" else Nu)(fresh, body)
        return self.atom()

    def atom(self) -> Formula:
        tok, col = self.tokens[self.i]
        if tok == "(":
            self.take()
            f = self.expr()
            self.take(")")
            return f
        if tok == "tt":
            self.take()
            return TT()
        if tok == "ff":
            self.take()
            return FF()
        name = self.ident("a formula")
        for bound, fresh in reversed(self.scope):
            if bound == name:
                return Var(fresh)
        raise ValidationError(f"unbound variable {name!r} at column {col}")


def parse_formula(text: str) -> Formula:
    """Parse, check closedness and give every binder a distinct variable name."""
    if not isinstance(text, str):
        raise ValidationError("formula must be a string")
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# Structure

def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, (Or, And)):
        return (f.left, f.right)
    if isinstance(f, (Diamond, Box, Mu, Nu)):
        return (f.body,)
    return ()


@lru_cache(maxsize=None)
def free_vars(f: Formula) -> frozenset:
    if isinstance(f, Var):
        return frozenset([f.name])
    if isinstance(f, (Mu, Nu)):
        return free_vars(f.body) - {f.var}
    out = frozenset()
    for c in children(f):
        out |= free_vars(c)
    return out


def subformulas(f: Formula):
    yield f
    for c in children(f):
        yield from subformulas(c)


def actions(f: Formula) -> set[str]:
    return {g.action for g in subformulas(f) if isinstance(g, (Diamond, Box))}


def substitute(f: Formula, name: str, by: Formula) -> Formula:
    """``f[name := by]``; binders are distinct so no capture can occur."""
    if isinstance(f, Var):
        return by if f.name == name else f
    if isinstance(f, (Mu, Nu)):
        if f.var == name:
            return f
        return type(f)(f.var, substitute(f.body, name, by))
    if isinstance(f, (Or, And)):
        return type(f)(substitute(f.left, name, by), substitute(f.right, name, by))
    if isinstance(f, (Diamond, Box)):
        return type(f)(f.action, substitute(f.body, name, by))
    return f


@lru_cache(maxsize=None)
def fixpoint_depth(f: Formula) -> int:
    """Alternation depth of a fixpoint formula ``σX.ψ``.

    1 plus the number of μ/ν alternations along chains of nested fixpoints
    in ψ that mention X freely.
    """
    if not isinstance(f, (Mu, Nu)):
        raise ValueError("alternation depth is defined for fixpoint formulas")
    best = 1
    for g in subformulas(f.body):
        if isinstance(g, (Mu, Nu)) and f.var in free_vars(g.body):
            best = max(best, fixpoint_depth(g) + (type(g) is not type(f)))
    return best


def alternation_depth(var: str, f: Formula) -> int:
    for g in subformulas(f):
        if isinstance(g, (Mu, Nu)) and g.var == var:
            return fixpoint_depth(g)
    raise ValidationError(f"variable {var!r} is not bound in {render(f)}")


# ---------------------------------------------------------------------------
# Translation

SINK = "sink"


def max_to_min_priority(p: int, max_priority: int) -> int:
    """Flip a max-parity priority into min-parity, keeping its parity."""
    return max_priority - p + (max_priority % 2)


def mucalc_to_parity_game(fts: FTS, phi: Formula | str) -> FeaturedGame:
    if isinstance(phi, str):
        phi = parse_formula(phi)
    if free_vars(phi):
        raise ValidationError(f"formula has free variables {sorted(free_vars(phi))}")
    missing = sorted(actions(phi) - set(fts.actions))
    notes = []
    for a in missing:
        msg = f"action {a!r} does not occur in the system; its modalities have no successors"
        warnings.warn(msg, stacklevel=2)
        notes.append(msg)

    px = fts.px
    start = (fts.initial, phi)
    seen = {start: 0}
    order = [start]
    queue = deque([start])
    info = {}  # node -> (owner, max-priority, [(target node, guard)])
    while queue:
        node = queue.popleft()
        s, f = node
        succ: list = []
        prio = 0
        if isinstance(f, FF):
            owner = 1
        elif isinstance(f, TT):
            owner = 2
        elif isinstance(f, (Or, And)):
            owner = 1 if isinstance(f, Or) else 2
            succ = [((s, f.left), TRUE), ((s, f.right), TRUE)]
        elif isinstance(f, (Diamond, Box)):
            owner = 1 if isinstance(f, Diamond) else 2
            succ = [((t.target, f.body), t.guard) for t in fts.out[s] if t.action == f.action]
        elif isinstance(f, (Mu, Nu)):
            owner = 2
            ad = fixpoint_depth(f)
            prio = 2 * (ad // 2) + (1 if isinstance(f, Mu) else 0)
            succ = [((s, substitute(f.body, f.var, f)), TRUE)]
        else:
            raise ValidationError(f"open subformula {render(f)} reached")
        info[node] = (owner, prio, succ)
        for nxt, _ in succ:
            if nxt not in seen:
                seen[nxt] = len(order)
                order.append(nxt)
                queue.append(nxt)

    def sid(node) -> str:
        return f"({node[0]}, {render(node[1])})"

    # max-parity priorities first, including the sink (odd: player 1 loses)
    raw_prio = {sid(n): info[n][1] for n in order}
    transitions = []
    needs_sink = False
    for node in order:
        owner, _, succ = info[node]
        src = sid(node)
        for nxt, guard in succ:
            transitions.append((src, sid(nxt), guard))
        covered = 0
        for _, guard in succ:
            covered |= px.mask(guard)
        if covered != px.full:
            rest = neg(disj_all(g for _, g in succ)) if succ else TRUE
            if owner == 1:
                transitions.append((src, SINK, rest))
                needs_sink = True
            else:
                transitions.append((src, src, rest))
    if needs_sink:
        raw_prio[SINK] = 1
        transitions.append((SINK, SINK, TRUE))
    top = max(raw_prio.values())
    states = [State(sid(n), info[n][0], priority=max_to_min_priority(raw_prio[sid(n)], top)) for n in order]
    if needs_sink:
        states.append(State(SINK, 1, priority=max_to_min_priority(1, top)))
    metadata = {
        "source": "mu-calculus",
        "formula": render(phi),
        "max_priority": top,
        "priority_convention": "min-parity, converted from max-parity by p -> max - p + (max mod 2)",
    }
    if notes:
        metadata["warnings"] = notes
    ts = [Transition(k, a, b, g) for k, (a, b, g) in enumerate(transitions)]
    return FeaturedGame("parity", px, sid(start), states, ts, metadata)

"""Featured game structures, projection to products, and the JSON document format."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Mapping, Union

from .logic import FeatureExpr, ProductSet, TRUE, ValidationError, parse_guard

KINDS = ("reachability", "min-reachability", "discounted", "energy", "parity")
WEIGHTED = ("min-reachability", "discounted", "energy")
ACCEPTING = ("reachability", "min-reachability")

# CLI spellings of the game kinds
KIND_ALIASES = {
    "reach": "reachability",
    "minreach": "min-reachability",
    "discounted": "discounted",
    "energy": "energy",
    "parity": "parity",
}

Weight = Union[int, Fraction, float]


@dataclass(frozen=True)
class State:
    id: str
    owner: int
    accepting: bool = False
    priority: int | None = None


@dataclass(frozen=True)
class Transition:
    """A guarded edge.  ``index`` is its position in document order."""

    index: int
    source: str
    target: str
    guard: FeatureExpr = field(default=TRUE, compare=False)
    weight: Weight = 0

    def describe(self) -> dict:
        out = {"index": self.index, "from": self.source, "to": self.target, "guard": str(self.guard)}
        if self.weight != 0:
            out["weight"] = weight_to_json(self.weight)
        return out

    def __str__(self):
        w = f" |{self.weight}|" if self.weight != 0 else ""
        return f"#{self.index} {self.source} -> {self.target} [{self.guard}]{w}"


class GameStructure:
    """A single-product game: states, initial state, and enabled transitions."""

    def __init__(self, kind: str, initial: str, states: Iterable[State], transitions: Iterable[Transition]):
        self.kind = kind
        self.initial = initial
        self.states: dict[str, State] = {s.id: s for s in states}
        self.transitions: tuple[Transition, ...] = tuple(transitions)
        self.out: dict[str, list[Transition]] = {sid: [] for sid in self.states}
        for t in self.transitions:
            self.out[t.source].append(t)

    @property
    def accepting(self) -> set[str]:
        return {s.id for s in self.states.values() if s.accepting}

    def blocking_states(self) -> list[str]:
        return [sid for sid, ts in self.out.items() if not ts]

    def restricted(self, strategy: Mapping[str, Transition]) -> GameStructure:
        """Player 1 bound to ``strategy``; player-2 moves untouched."""
        kept = []
        for t in self.transitions:
            if self.states[t.source].owner == 1:
                chosen = strategy.get(t.source)
                if chosen is None:
                    raise ValidationError(f"strategy has no choice for player-1 state {t.source!r}")
                if chosen.index != t.index:
                    continue
            kept.append(t)
        for sid, chosen in strategy.items():
            if self.states[sid].owner == 1 and all(t.index != chosen.index for t in self.out[sid]):
                raise ValidationError(f"strategy picks transition #{chosen.index} absent from state {sid!r}")
        return GameStructure(self.kind, self.initial, self.states.values(), kept)


class FeaturedGame(GameStructure):
    """Two-player game graph whose transitions carry feature guards."""

    def __init__(self, kind: str, px: ProductSet, initial: str, states: Iterable[State],
                 transitions: Iterable[Transition], metadata: Mapping[str, Any] | None = None):
        super().__init__(kind, initial, states, transitions)
        self.px = px
        self.metadata = dict(metadata or {})
        self._guard_masks = {t.index: px.mask(t.guard) for t in self.transitions}
        self.validate()

    @property
    def features(self) -> tuple[str, ...]:
        return self.px.features

    def guard_mask(self, t: Transition) -> int:
        return self._guard_masks[t.index]

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise ValidationError(f"unknown game kind {self.kind!r}")
        if self.initial not in self.states:
            raise ValidationError(f"initial state {self.initial!r} is not declared")
        for s in self.states.values():
            if s.owner not in (1, 2):
                raise ValidationError(f"state {s.id!r}: owner must be 1 or 2")
            if self.kind == "parity" and (s.priority is None or s.priority < 0):
                raise ValidationError(f"state {s.id!r}: parity games need a natural priority")
        for t in self.transitions:
            for end in (t.source, t.target):
                if end not in self.states:
                    raise ValidationError(f"transition #{t.index} references undeclared state {end!r}")
            if self.kind == "min-reachability" and t.weight < 0:
                raise ValidationError(f"transition #{t.index}: min-reachability weights must be non-negative")
            if self.kind in ("min-reachability", "energy") and not _is_integral(t.weight):
                raise ValidationError(f"transition #{t.index}: {self.kind} weights must be integers")

    def project(self, product: Iterable[str]) -> GameStructure:
        p = self.px.product(product)
        bit = 1 << self.px.index[p]
        kept = [t for t in self.transitions if self._guard_masks[t.index] & bit]
        return GameStructure(self.kind, self.initial, self.states.values(), kept)

    def with_guards(self, guard: FeatureExpr = TRUE) -> FeaturedGame:
        """Copy with every transition guard replaced by ``guard``."""
        ts = [Transition(t.index, t.source, t.target, guard, t.weight) for t in self.transitions]
        return FeaturedGame(self.kind, self.px, self.initial, self.states.values(), ts, self.metadata)


def _is_integral(w: Weight) -> bool:
    if isinstance(w, int):
        return True
    if isinstance(w, Fraction):
        return w.denominator == 1
    return float(w).is_integer()


def project_game(game: FeaturedGame, product: Iterable[str]) -> GameStructure:
    return game.project(product)


def validate_non_blocking(game: FeaturedGame) -> list[tuple[str, frozenset]]:
    """All (state, product) pairs with no enabled outgoing transition."""
    violations = []
    for sid, ts in game.out.items():
        covered = 0
        for t in ts:
            covered |= game.guard_mask(t)
        missing = game.px.full & ~covered
        for p in game.px.products_of(missing):
            violations.append((sid, p))
    return violations


def require_non_blocking(game: GameStructure) -> None:
    if isinstance(game, FeaturedGame):
        bad = validate_non_blocking(game)
        if bad:
            sid, p = bad[0]
            raise ValidationError(f"state {sid!r} has no enabled transition for product {sorted(p)}")
    else:
        bad = game.blocking_states()
        if bad:
            raise ValidationError(f"state {bad[0]!r} has no outgoing transition")


# ---------------------------------------------------------------------------
# Documents

_GAME_KEYS = {"features", "products", "kind", "initial", "states", "transitions", "metadata"}
_STATE_KEYS = {"id", "owner", "accepting", "priority"}
_TRANS_KEYS = {"from", "to", "guard", "weight"}


def weight_from_json(raw: Any, where: str) -> Weight:
    if isinstance(raw, bool):
        raise ValidationError(f"{where}: weight must be a number")
    if isinstance(raw, int):
        return raw
    if isinstance(raw, float):
        if raw.is_integer():
            return int(raw)
        return raw
    if isinstance(raw, dict) and set(raw) == {"num", "den"}:
        num, den = raw["num"], raw["den"]
        if not (isinstance(num, int) and isinstance(den, int)) or den == 0:
            raise ValidationError(f"{where}: rational weight needs integer num and non-zero den")
        w = Fraction(num, den)
        return w.numerator if w.denominator == 1 else w
    raise ValidationError(f"{where}: unsupported weight {raw!r}")


def weight_to_json(w: Weight) -> Any:
    if isinstance(w, Fraction):
        if w.denominator == 1:
            return w.numerator
        return {"num": w.numerator, "den": w.denominator}
    return w


def products_from_json(features: list, raw: Any, where: str = "document") -> ProductSet:
    if not isinstance(features, list) or not all(isinstance(f, str) for f in features):
        raise ValidationError(f"{where}: 'features' must be a list of names")
    if raw == "all" or raw is None:
        return ProductSet(features)
    if not isinstance(raw, list) or not all(isinstance(p, list) for p in raw):
        raise ValidationError(f"{where}: 'products' must be \"all\" or a list of feature lists")
    return ProductSet(features, raw)


def products_to_json(px: ProductSet) -> Any:
    if px.is_full:
        return "all"
    return [[f for f in px.features if f in p] for p in px]


def _reject_unknown(obj: dict, allowed: set, where: str) -> None:
    extra = set(obj) - allowed
    if extra:
        raise ValidationError(f"{where}: unknown field(s) {sorted(extra)}")


def game_from_dict(doc: Mapping[str, Any]) -> FeaturedGame:
    if not isinstance(doc, dict):
        raise ValidationError("game document must be a JSON object")
    _reject_unknown(doc, _GAME_KEYS, "game document")
    for key in ("features", "kind", "initial", "states", "transitions"):
        if key not in doc:
            raise ValidationError(f"game document: missing field {key!r}")
    kind = doc["kind"]
    if kind not in KINDS:
        raise ValidationError(f"game document: unknown kind {kind!r}")
    px = products_from_json(doc["features"], doc.get("products", "all"))
    states = []
    seen = set()
    for k, raw in enumerate(doc["states"]):
        where = f"states[{k}]"
        if not isinstance(raw, dict):
            raise ValidationError(f"{where}: must be an object")
        _reject_unknown(raw, _STATE_KEYS, where)
        if "id" not in raw or "owner" not in raw:
            raise ValidationError(f"{where}: needs 'id' and 'owner'")
        sid = raw["id"]
        if not isinstance(sid, str):
            raise ValidationError(f"{where}: id must be a string")
        if sid in seen:
            raise ValidationError(f"{where}: duplicate state id {sid!r}")
        seen.add(sid)
        if raw["owner"] not in (1, 2):
            raise ValidationError(f"{where}: owner must be 1 or 2")
        prio = raw.get("priority")
        if kind == "parity":
            if not isinstance(prio, int) or isinstance(prio, bool) or prio < 0:
                raise ValidationError(f"{where}: parity games need a natural 'priority'")
        accepting = raw.get("accepting", False)
        if not isinstance(accepting, bool):
            raise ValidationError(f"{where}: accepting must be a boolean")
        states.append(State(sid, raw["owner"], accepting, prio))
    transitions = []
    for k, raw in enumerate(doc["transitions"]):
        where = f"transitions[{k}]"
        if not isinstance(raw, dict):
            raise ValidationError(f"{where}: must be an object")
        _reject_unknown(raw, _TRANS_KEYS, where)
        for key in ("from", "to"):
            if key not in raw:
                raise ValidationError(f"{where}: missing {key!r}")
            if raw[key] not in seen:
                raise ValidationError(f"{where}: undeclared state {raw[key]!r}")
        try:
            guard = parse_guard(raw.get("guard", "true"), px.features)
        except ValidationError as exc:
            raise ValidationError(f"{where}: {exc}") from None
        if kind in WEIGHTED and "weight" not in raw:
            raise ValidationError(f"{where}: {kind} games need a 'weight'")
        weight = weight_from_json(raw.get("weight", 0), where)
        transitions.append(Transition(k, raw["from"], raw["to"], guard, weight))
    if doc["initial"] not in seen:
        raise ValidationError(f"game document: initial state {doc['initial']!r} is not declared")
    metadata = doc.get("metadata", {})
    if not isinstance(metadata, dict):
        raise ValidationError("game document: 'metadata' must be an object")
    return FeaturedGame(kind, px, doc["initial"], states, transitions, metadata)


def game_to_dict(game: FeaturedGame) -> dict:
    states = []
    for s in game.states.values():
        out: dict[str, Any] = {"id": s.id, "owner": s.owner}
        if game.kind in ACCEPTING:
            out["accepting"] = s.accepting
        if game.kind == "parity":
            out["priority"] = s.priority
        states.append(out)
    transitions = []
    for t in game.transitions:
        out = {"from": t.source, "to": t.target, "guard": str(t.guard)}
        if game.kind in WEIGHTED:
            out["weight"] = weight_to_json(t.weight)
        transitions.append(out)
    doc = {
        "features": list(game.features),
        "products": products_to_json(game.px),
        "kind": game.kind,
        "initial": game.initial,
        "states": states,
        "transitions": transitions,
    }
    if game.metadata:
        doc["metadata"] = game.metadata
    return doc


def parse_game(text: str) -> FeaturedGame:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON: {exc}") from None
    return game_from_dict(doc)


def emit_game(game: FeaturedGame) -> str:
    return json.dumps(game_to_dict(game), indent=2, ensure_ascii=False) + "\n"


def load_game(path) -> FeaturedGame:
    with open(path, encoding="utf-8") as fh:
        return parse_game(fh.read())


def structurally_equal(a: FeaturedGame, b: FeaturedGame) -> bool:
    if (a.kind, a.px, a.initial, a.metadata) != (b.kind, b.px, b.initial, b.metadata):
        return False
    if list(a.states.values()) != list(b.states.values()):
        return False
    if len(a.transitions) != len(b.transitions):
        return False
    for s, t in zip(a.transitions, b.transitions):
        if (s.source, s.target, s.weight, str(s.guard)) != (t.source, t.target, t.weight, str(t.guard)):
            return False
        if not math.isclose(float(s.weight), float(t.weight)):
            return False
    return True

"""Featured transition systems and their JSON document format."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Iterable, Mapping

from ..game import products_from_json, products_to_json
from ..logic import FeatureExpr, ProductSet, TRUE, ValidationError, parse_guard


@dataclass(frozen=True)
class FTSTransition:
    index: int
    source: str
    action: str
    target: str
    guard: FeatureExpr = field(default=TRUE, compare=False)
    weight: Fraction | None = None
    tolerance: Fraction | None = None


class FTS:
    """Labelled transition system with feature guards and optional rational weights."""

    def __init__(self, px: ProductSet, initial: str, states: Iterable[str], actions: Iterable[str],
                 transitions: Iterable[FTSTransition]):
        self.px = px
        self.initial = initial
        self.states = tuple(states)
        self.actions = tuple(actions)
        self.transitions = tuple(transitions)
        self.out: dict[str, list[FTSTransition]] = {s: [] for s in self.states}
        if len(set(self.states)) != len(self.states):
            raise ValidationError("duplicate FTS state ids")
        if initial not in self.out:
            raise ValidationError(f"initial state {initial!r} is not declared")
        weighted = {t.weight is not None for t in self.transitions}
        if len(weighted) > 1:
            raise ValidationError("either every transition carries a weight or none does")
        for t in self.transitions:
            for end in (t.source, t.target):
                if end not in self.out:
                    raise ValidationError(f"transition #{t.index} references undeclared state {end!r}")
            if t.action not in self.actions:
                raise ValidationError(f"transition #{t.index} uses undeclared action {t.action!r}")
            if t.tolerance is not None and t.tolerance < 0:
                raise ValidationError(f"transition #{t.index} has a negative tolerance")
            px.check(t.guard)
            self.out[t.source].append(t)
        self._masks = {t.index: px.mask(t.guard) for t in self.transitions}

    @property
    def weighted(self) -> bool:
        return all(t.weight is not None for t in self.transitions)

    @property
    def has_tolerances(self) -> bool:
        return any(t.tolerance for t in self.transitions)

    def guard_mask(self, t: FTSTransition) -> int:
        return self._masks[t.index]

    def project(self, product: Iterable[str]) -> list[FTSTransition]:
        """Transitions enabled in ``product``."""
        bit = 1 << self.px.index[self.px.product(product)]
        return [t for t in self.transitions if self._masks[t.index] & bit]

    def with_transitions(self, transitions: Iterable[FTSTransition]) -> FTS:
        return FTS(self.px, self.initial, self.states, self.actions, transitions)


def split_tolerances(fts: FTS) -> tuple[FTS, FTS]:
    """Minimal and maximal weight versions: nominal * (1 - tol) and nominal * (1 + tol)."""
    low, high = [], []
    for t in fts.transitions:
        if t.weight is None:
            raise ValidationError("split_tolerances needs a weighted FTS")
        tol = t.tolerance or Fraction(0)
        low.append(replace(t, weight=t.weight * (1 - tol), tolerance=None))
        high.append(replace(t, weight=t.weight * (1 + tol), tolerance=None))
    return fts.with_transitions(low), fts.with_transitions(high)


_FTS_KEYS = {"features", "products", "actions", "initial", "states", "transitions", "metadata"}
_FTS_TRANS_KEYS = {"from", "to", "action", "guard", "weight"}


def _exact(x: Any, where: str) -> Fraction:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ValidationError(f"{where}: expected a number, got {x!r}")
    # decimal literals such as 0.1 mean exactly 1/10
    return Fraction(str(x)) if isinstance(x, float) else Fraction(x)


def _weight(raw: Any, where: str) -> tuple[Fraction, Fraction | None]:
    if isinstance(raw, dict):
        keys = set(raw)
        if keys == {"num", "den"}:
            num, den = raw["num"], raw["den"]
            if not (isinstance(num, int) and isinstance(den, int)) or den == 0:
                raise ValidationError(f"{where}: rational weight needs integer num and non-zero den")
            return Fraction(num, den), None
        if keys == {"nominal", "tolerance"}:
            return _exact(raw["nominal"], where), _exact(raw["tolerance"], where)
        raise ValidationError(f"{where}: weight object needs num/den or nominal/tolerance")
    return _exact(raw, where), None


def fts_from_dict(doc: Mapping[str, Any]) -> FTS:
    if not isinstance(doc, dict):
        raise ValidationError("FTS document must be a JSON object")
    extra = set(doc) - _FTS_KEYS
    if extra:
        raise ValidationError(f"FTS document: unknown field(s) {sorted(extra)}")
    for key in ("features", "actions", "initial", "states", "transitions"):
        if key not in doc:
            raise ValidationError(f"FTS document: missing field {key!r}")
    px = products_from_json(doc["features"], doc.get("products", "all"), "FTS document")
    states = []
    for k, raw in enumerate(doc["states"]):
        if isinstance(raw, dict):
            if set(raw) != {"id"}:
                raise ValidationError(f"states[{k}]: FTS states only carry an 'id'")
            raw = raw["id"]
        if not isinstance(raw, str):
            raise ValidationError(f"states[{k}]: id must be a string")
        states.append(raw)
    transitions = []
    for k, raw in enumerate(doc["transitions"]):
        where = f"transitions[{k}]"
        if not isinstance(raw, dict):
            raise ValidationError(f"{where}: must be an object")
        extra = set(raw) - _FTS_TRANS_KEYS
        if extra:
            raise ValidationError(f"{where}: unknown field(s) {sorted(extra)}")
        for key in ("from", "to", "action"):
            if key not in raw:
                raise ValidationError(f"{where}: missing {key!r}")
        for key in ("from", "to"):
            if raw[key] not in states:
                raise ValidationError(f"{where}: undeclared state {raw[key]!r}")
        try:
            guard = parse_guard(raw.get("guard", "true"), px.features)
        except ValidationError as exc:
            raise ValidationError(f"{where}: {exc}") from None
        weight = tol = None
        if "weight" in raw:
            weight, tol = _weight(raw["weight"], where)
        transitions.append(FTSTransition(k, raw["from"], raw["action"], raw["to"], guard, weight, tol))
    return FTS(px, doc["initial"], states, doc["actions"], transitions)


def fts_to_dict(fts: FTS) -> dict:
    transitions = []
    for t in fts.transitions:
        out: dict[str, Any] = {"from": t.source, "action": t.action, "to": t.target, "guard": str(t.guard)}
        if t.weight is not None:
            if t.tolerance is not None:
                out["weight"] = {"nominal": float(t.weight), "tolerance": float(t.tolerance)}
            elif t.weight.denominator == 1:
                out["weight"] = t.weight.numerator
            else:
                out["weight"] = {"num": t.weight.numerator, "den": t.weight.denominator}
        transitions.append(out)
    return {
        "features": list(fts.px.features),
        "products": products_to_json(fts.px),
        "actions": list(fts.actions),
        "initial": fts.initial,
        "states": list(fts.states),
        "transitions": transitions,
    }


def parse_fts(text: str) -> FTS:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON: {exc}") from None
    return fts_from_dict(doc)


def load_fts(path) -> FTS:
    with open(path, encoding="utf-8") as fh:
        return parse_fts(fh.read())

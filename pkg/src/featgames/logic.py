"""Feature expressions, product sets and guard-partitioned functions.

Every semantic question (satisfiability, equivalence, partition checks) is
answered relative to an explicit :class:`ProductSet` by enumerating its
products.  A :class:`FeatureFunction` is a map from products to values kept
as a list of ``(guard, value)`` cells whose guards partition the products.
Each cell caches the denotation of its guard as a bitmask over product
indices so the combinators stay cheap.
"""

from __future__ import annotations

import itertools
import re
from typing import Any, Callable, Iterable, Iterator, NamedTuple, Sequence


class ValidationError(ValueError):
    """Malformed input: unknown feature, bad partition, schema violation."""


# ---------------------------------------------------------------------------
# Expressions


class FeatureExpr:
    """Base class of the guard expression tree.

    Nodes compare by identity; use :func:`same_syntax` or ``str`` for
    structural comparison.  Trees are shared freely between cells.
    """

    __slots__ = ()
    precedence = 4

    def evaluate(self, product: frozenset) -> bool:
        raise NotImplementedError

    def variables(self) -> set[str]:
        out: set[str] = set()
        stack = [self]
        seen: set[int] = set()
        while stack:
            node = stack.pop()
            if id(node) in seen:
                continue
            seen.add(id(node))
            if isinstance(node, Var):
                out.add(node.name)
            stack.extend(node.children())
        return out

    def children(self) -> tuple[FeatureExpr, ...]:
        return ()

    def __and__(self, other: FeatureExpr) -> FeatureExpr:
        return conj(self, other)

    def __or__(self, other: FeatureExpr) -> FeatureExpr:
        return disj(self, other)

    def __invert__(self) -> FeatureExpr:
        return neg(self)

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self}>"


class Const(FeatureExpr):
    __slots__ = ("value",)

    def __init__(self, value: bool):
        self.value = bool(value)

    def evaluate(self, product):
        return self.value

    def __str__(self):
        return "true" if self.value else "false"


class Var(FeatureExpr):
    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name

    def evaluate(self, product):
        return self.name in product

    def __str__(self):
        return self.name


class Not(FeatureExpr):
    __slots__ = ("arg",)
    precedence = 3

    def __init__(self, arg: FeatureExpr):
        self.arg = arg

    def evaluate(self, product):
        return not self.arg.evaluate(product)

    def children(self):
        return (self.arg,)

    def __str__(self):
        inner = str(self.arg)
        if self.arg.precedence < self.precedence:
            inner = f"({inner})"
        return "!" + inner


class _Binary(FeatureExpr):
    __slots__ = ("left", "right")
    symbol = ""

    def __init__(self, left: FeatureExpr, right: FeatureExpr):
        self.left = left
        self.right = right

    def children(self):
        return (self.left, self.right)

    def __str__(self):
        parts = []
        for side in (self.left, self.right):
            text = str(side)
            if side.precedence < self.precedence:
                text = f"({text})"
            parts.append(text)
        return f" {self.symbol} ".join(parts)


class And(_Binary):
    __slots__ = ()
    precedence = 2
    symbol = "&&"

    def evaluate(self, product):
        return self.left.evaluate(product) and self.right.evaluate(product)


class Or(_Binary):
    __slots__ = ()
    precedence = 1
    symbol = "||"

    def evaluate(self, product):
        return self.left.evaluate(product) or self.right.evaluate(product)


TRUE = Const(True)
FALSE = Const(False)


def conj(a: FeatureExpr, b: FeatureExpr) -> FeatureExpr:
    if isinstance(a, Const):
        return b if a.value else FALSE
    if isinstance(b, Const):
        return a if b.value else FALSE
    return And(a, b)


def disj(a: FeatureExpr, b: FeatureExpr) -> FeatureExpr:
    if isinstance(a, Const):
        return TRUE if a.value else b
    if isinstance(b, Const):
        return TRUE if b.value else a
    return Or(a, b)


def neg(a: FeatureExpr) -> FeatureExpr:
    if isinstance(a, Const):
        return FALSE if a.value else TRUE
    if isinstance(a, Not):
        return a.arg
    return Not(a)


def conj_all(items: Iterable[FeatureExpr]) -> FeatureExpr:
    out: FeatureExpr = TRUE
    for item in items:
        out = conj(out, item)
    return out


def disj_all(items: Iterable[FeatureExpr]) -> FeatureExpr:
    out: FeatureExpr = FALSE
    for item in items:
        out = disj(out, item)
    return out


def same_syntax(a: FeatureExpr, b: FeatureExpr) -> bool:
    if type(a) is not type(b):
        return False
    if isinstance(a, Const):
        return a.value == b.value
    if isinstance(a, Var):
        return a.name == b.name
    return all(same_syntax(x, y) for x, y in zip(a.children(), b.children()))


# ---------------------------------------------------------------------------
# Guard grammar
#
#   expr  := or
#   or    := and ("||" and)*
#   and   := unary ("&&" unary)*
#   unary := "!" unary | atom
#   atom  := "true" | "false" | identifier | "(" expr ")"

_TOKEN = re.compile(r"\s*(?:(\|\|)|(&&)|(!)|(\()|(\))|([A-Za-z_][A-Za-z0-9_]*))")


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            col = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ValidationError(f"unexpected character {text[col]!r} at column {col} in guard {text!r}")
        start = m.start(m.lastindex)
        tokens.append((m.group(m.lastindex), start))
        pos = m.end()
    tokens.append(("", len(text)))
    return tokens


class _GuardParser:
    def __init__(self, text: str, features: Iterable[str] | None):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.features = None if features is None else set(features)

    def peek(self) -> str:
        return self.tokens[self.i][0]

    def take(self) -> tuple[str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, msg: str):
        col = self.tokens[self.i][1]
        raise ValidationError(f"{msg} at column {col} in guard {self.text!r}")

    def parse(self) -> FeatureExpr:
        expr = self.parse_or()
        if self.peek() != "":
            self.fail(f"unexpected token {self.peek()!r}")
        return expr

    def parse_or(self):
        expr = self.parse_and()
        while self.peek() == "||":
            self.take()
            expr = Or(expr, self.parse_and())
        return expr

    def parse_and(self):
        expr = self.parse_unary()
        while self.peek() == "&&":
            self.take()
            expr = And(expr, self.parse_unary())
        return expr

    def parse_unary(self):
        if self.peek() == "!":
            self.take()
            return Not(self.parse_unary())
        return self.parse_atom()

    def parse_atom(self):
        tok, col = self.tokens[self.i]
        if tok == "(":
            self.take()
            expr = self.parse_or()
            if self.peek() != ")":
                self.fail("expected ')'")
            self.take()
            return expr
        if tok == "true":
            self.take()
            return TRUE
        if tok == "false":
            self.take()
            return FALSE
        if tok and (tok[0].isalpha() or tok[0] == "_"):
            self.take()
            if self.features is not None and tok not in self.features:
                raise ValidationError(f"unknown feature {tok!r} at column {col} in guard {self.text!r}")
            return Var(tok)
        self.fail("expected a feature, constant or '('" if tok else "unexpected end of guard")


def parse_guard(text: str, features: Iterable[str] | None = None) -> FeatureExpr:
    """Parse a guard; when ``features`` is given, unknown names are rejected."""
    return _GuardParser(text, features).parse()


# ---------------------------------------------------------------------------
# Products


class ProductSet:
    """A finite, non-empty set of products over an ordered feature list.

    Products are kept in lexicographic order of their membership vectors
    (feature order), which fixes every deterministic ordering downstream.
    """

    def __init__(self, features: Sequence[str], products: Iterable[Iterable[str]] | None = None):
        features = tuple(features)
        if len(set(features)) != len(features):
            raise ValidationError(f"duplicate feature names in {list(features)}")
        for name in features:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name) or name in ("true", "false"):
                raise ValidationError(f"invalid feature name {name!r}")
        self.features = features
        if products is None:
            prods = {frozenset(itertools.compress(features, bits))
                     for bits in itertools.product((0, 1), repeat=len(features))}
        else:
            prods = set()
            for p in products:
                p = frozenset(p)
                unknown = p - set(features)
                if unknown:
                    raise ValidationError(f"product {sorted(p)} uses unknown features {sorted(unknown)}")
                prods.add(p)
        if not prods:
            raise ValidationError("product set is empty")
        self.products: tuple[frozenset, ...] = tuple(sorted(prods, key=self._key))
        self.index = {p: k for k, p in enumerate(self.products)}
        self.full = (1 << len(self.products)) - 1
        self._cache: dict[int, tuple[FeatureExpr, int]] = {}
        self._guards: dict[int, FeatureExpr] = {}
        self._rendered: dict[int, str] = {}
        self._owners: dict[tuple[int, ...], tuple[int, ...]] = {}
        self._plans: dict[tuple, tuple] = {}

    def _key(self, product: frozenset) -> tuple[int, ...]:
        return tuple(int(f in product) for f in self.features)

    @property
    def is_full(self) -> bool:
        return len(self.products) == 2 ** len(self.features)

    def __len__(self) -> int:
        return len(self.products)

    def __iter__(self) -> Iterator[frozenset]:
        return iter(self.products)

    def __contains__(self, product) -> bool:
        return frozenset(product) in self.index

    def __eq__(self, other) -> bool:
        return isinstance(other, ProductSet) and (self.features, self.products) == (other.features, other.products)

    def __hash__(self) -> int:
        return hash((self.features, self.products))

    def __repr__(self) -> str:
        return f"ProductSet({list(self.features)}, {[sorted(p) for p in self.products]})"

    def check(self, expr: FeatureExpr) -> FeatureExpr:
        unknown = expr.variables() - set(self.features)
        if unknown:
            raise ValidationError(f"guard {expr} uses unknown features {sorted(unknown)}")
        return expr

    def mask(self, expr: FeatureExpr) -> int:
        """Denotation of ``expr`` as a bitmask over product indices (by enumeration)."""
        hit = self._cache.get(id(expr))
        if hit is not None and hit[0] is expr:
            return hit[1]
        self.check(expr)
        m = 0
        for k, p in enumerate(self.products):
            if expr.evaluate(p):
                m |= 1 << k
        self._cache[id(expr)] = (expr, m)
        return m

    def guard_for(self, mask: int, build: Callable[[], FeatureExpr]) -> FeatureExpr:
        """Reuse the first guard built for ``mask`` so guards never grow across iterations."""
        g = self._guards.get(mask)
        if g is None:
            g = self._guards[mask] = build()
        return g

    def remember_plan(self, key: tuple, plan: tuple) -> tuple:
        if len(self._plans) > 100_000:
            self._plans.clear()
        self._plans[key] = plan
        return plan

    def products_of(self, mask: int) -> list[frozenset]:
        return [p for k, p in enumerate(self.products) if mask >> k & 1]

    def product(self, product: Iterable[str]) -> frozenset:
        p = frozenset(product)
        if p not in self.index:
            raise ValidationError(f"product {sorted(p)} is not in the product set")
        return p

    def label(self, product: frozenset) -> str:
        return "{" + ",".join(f for f in self.features if f in product) + "}"


def evaluate(expr: FeatureExpr, product: Iterable[str], features: Iterable[str] | None = None) -> bool:
    product = frozenset(product)
    if features is not None:
        unknown = expr.variables() - set(features)
        if unknown:
            raise ValidationError(f"guard {expr} uses unknown features {sorted(unknown)}")
    return expr.evaluate(product)


def sat(expr: FeatureExpr, px: ProductSet) -> bool:
    px.check(expr)
    return any(expr.evaluate(p) for p in px)


def equivalent(e1: FeatureExpr, e2: FeatureExpr, px: ProductSet) -> bool:
    px.check(e1)
    px.check(e2)
    return all(e1.evaluate(p) == e2.evaluate(p) for p in px)


def char_formula(product: Iterable[str], features: Sequence[str]) -> FeatureExpr:
    product = frozenset(product)
    unknown = product - set(features)
    if unknown:
        raise ValidationError(f"product uses unknown features {sorted(unknown)}")
    lits = [Var(f) if f in product else Not(Var(f)) for f in features]
    return conj_all(lits)


def validate_partition(guards: Iterable[FeatureExpr], px: ProductSet) -> bool:
    """Coverage, non-emptiness and pairwise disjointness over ``px``."""
    guards = list(guards)
    for g in guards:
        px.check(g)
    for p in px:
        if sum(1 for g in guards if g.evaluate(p)) != 1:
            return False
    return all(any(g.evaluate(p) for p in px) for g in guards)


# ---------------------------------------------------------------------------
# Guard-partitioned functions


class Cell(NamedTuple):
    guard: FeatureExpr
    mask: int
    value: Any


class FeatureFunction:
    """A total function ``products -> X`` stored as canonical guarded cells.

    Cells are ordered by their first product; distinct cells carry distinct
    values (value equality is ``==``; no tolerance).
    """

    __slots__ = ("px", "cells", "_owner", "_key")

    def __init__(self, px: ProductSet, cells: Sequence[Cell]):
        self.px = px
        self.cells = tuple(cells)
        self._owner: tuple[int, ...] | None = None
        self._key: tuple[int, ...] | None = None

    def partition_key(self) -> tuple[int, ...]:
        """Cell masks in order; equal keys mean equal partitions."""
        if self._key is None:
            self._key = tuple([c[1] for c in self.cells])
        return self._key

    @classmethod
    def const(cls, px: ProductSet, value: Any) -> FeatureFunction:
        return cls(px, (Cell(TRUE, px.full, value),))

    @classmethod
    def from_entries(cls, px: ProductSet, entries: Iterable[tuple[FeatureExpr, Any]]) -> FeatureFunction:
        """Build from ``(guard, value)`` pairs forming a partition; canonicalizes."""
        cells = [Cell(g, px.mask(g), v) for g, v in entries]
        if not _is_partition(cells, px.full):
            raise ValidationError("guards do not form a partition of the product set: "
                                  + ", ".join(str(c.guard) for c in cells))
        return reduce_cells(px, cells)

    @classmethod
    def from_products(cls, px: ProductSet, value_of: Callable[[frozenset], Any]) -> FeatureFunction:
        cells = [Cell(char_formula(p, px.features), 1 << k, value_of(p)) for k, p in enumerate(px)]
        return reduce_cells(px, cells)

    def owners(self) -> tuple[int, ...]:
        """Cell index for every product index."""
        if self._owner is None:
            key = self.partition_key()
            owner = self.px._owners.get(key)
            if owner is None:
                out = [0] * len(self.px)
                for ci, m in enumerate(key):
                    while m:
                        low = m & -m
                        out[low.bit_length() - 1] = ci
                        m ^= low
                owner = self.px._owners[key] = tuple(out)
            self._owner = owner
        return self._owner

    def at(self, k: int) -> Any:
        return self.cells[self.owners()[k]].value

    def lookup(self, product: Iterable[str]) -> Any:
        return self.at(self.px.index[self.px.product(product)])

    def values(self) -> tuple:
        """Values listed per product index."""
        cells = self.cells
        return tuple([cells[c][2] for c in self.owners()])

    def __len__(self) -> int:
        return len(self.cells)

    def __iter__(self) -> Iterator[Cell]:
        return iter(self.cells)

    def same_values(self, other: FeatureFunction) -> bool:
        return self.values() == other.values()

    def is_canonical(self) -> bool:
        vals = [c.value for c in self.cells]
        return all(vals[i] != vals[j] for i in range(len(vals)) for j in range(i + 1, len(vals)))

    def check(self) -> None:
        """Raise unless the cells partition the products (checked by enumeration) and are canonical."""
        if not validate_partition([c.guard for c in self.cells], self.px):
            raise ValidationError("cells do not partition the product set")
        for c in self.cells:
            if self.px.mask(c.guard) != c.mask:
                raise ValidationError(f"cached denotation of {c.guard} is stale")
        if not self.is_canonical():
            raise ValidationError("feature function is not canonical")

    def map(self, fn: Callable[[Any], Any]) -> FeatureFunction:
        return reduce_cells(self.px, [Cell(c.guard, c.mask, fn(c.value)) for c in self.cells])

    def __repr__(self) -> str:
        return "{" + ", ".join(f"({render_guard(c.mask, self.px)}, {c.value!r})" for c in self.cells) + "}"


def _is_partition(cells: Sequence[Cell], full: int) -> bool:
    seen = 0
    for c in cells:
        if c.mask == 0 or c.mask & seen:
            return False
        seen |= c.mask
    return seen == full


def _lowbit(c: Cell) -> int:
    return c.mask & -c.mask


def reduce_cells(px: ProductSet, cells: Iterable[Cell]) -> FeatureFunction:
    """Merge equal-valued cells by disjunction of their guards; order by first product."""
    if not isinstance(cells, (list, tuple)):
        cells = list(cells)
    n = len(cells)
    if n == 1:
        return FeatureFunction(px, cells)
    try:
        if len({c[2] for c in cells}) == n:
            merged = cells
        else:
            groups: dict[Any, Cell] = {}
            for c in cells:
                v = c[2]
                m = groups.get(v)
                if m is None:
                    groups[v] = c
                else:
                    mask = m[1] | c[1]
                    groups[v] = Cell(px.guard_for(mask, lambda a=m[0], b=c[0]: disj(a, b)), mask, m[2])
            merged = list(groups.values())
    except TypeError:  # unhashable values
        merged = _merge_slow(px, cells)
    prev = 0
    for c in merged:
        low = c[1] & -c[1]
        if low < prev:
            merged = sorted(merged, key=_lowbit)
            break
        prev = low
    return FeatureFunction(px, merged)


def _merge_slow(px: ProductSet, cells: Sequence[Cell]) -> list[Cell]:
    merged: list[Cell] = []
    for c in cells:
        for k, m in enumerate(merged):
            if m.value == c.value:
                mask = m.mask | c.mask
                merged[k] = Cell(px.guard_for(mask, lambda a=m.guard, b=c.guard: disj(a, b)), mask, m.value)
                break
        else:
            merged.append(c)
    return merged


def reduce(f: FeatureFunction | Iterable[tuple[FeatureExpr, Any]], px: ProductSet | None = None) -> FeatureFunction:
    """Canonical form of ``f``; accepts a FeatureFunction or raw (guard, value) pairs."""
    if isinstance(f, FeatureFunction):
        return reduce_cells(f.px, f.cells)
    if px is None:
        raise TypeError("reduce() of raw entries needs a product set")
    return FeatureFunction.from_entries(px, f)


def combine(f1: FeatureFunction, f2: FeatureFunction, op: Callable[[Any, Any], Any]) -> FeatureFunction:
    """Pointwise ``op`` over the satisfiable pairwise intersections of the cells."""
    if f1.px is not f2.px and f1.px != f2.px:
        raise ValidationError("cannot combine feature functions over different product sets")
    c1, c2 = f1.cells, f2.cells
    if len(c1) == 1 and len(c2) == 1:
        g, m, v = c1[0]
        return FeatureFunction(f1.px, (Cell(g, m, op(v, c2[0][2])),))
    if len(f1.cells) == 1:
        (g1, m1, v1), = f1.cells
        return reduce_cells(f1.px, [Cell(c.guard, c.mask, op(v1, c.value)) for c in f2.cells])
    if len(f2.cells) == 1:
        (g2, m2, v2), = f2.cells
        return reduce_cells(f1.px, [Cell(c.guard, c.mask, op(c.value, v2)) for c in f1.cells])
    px = f1.px
    key = ("c", f1.partition_key(), f2.partition_key())
    plan = px._plans.get(key)
    if plan is None:
        o1, o2 = f1.owners(), f2.owners()
        pairs: dict[tuple[int, int], int] = {}
        for k in range(len(o1)):
            pk = (o1[k], o2[k])
            pairs[pk] = pairs.get(pk, 0) | (1 << k)
        plan = []
        for (i, j), m in pairs.items():
            # which guard to reuse: 0 -> left cell, 1 -> right cell, 2 -> intersection
            src = 0 if m == c1[i][1] else 1 if m == c2[j][1] else 2
            plan.append((i, j, m, src))
        plan = px.remember_plan(key, tuple(plan))
    cells = []
    for i, j, m, src in plan:
        a, b = c1[i], c2[j]
        if src == 0:
            guard = a[0]
        elif src == 1:
            guard = b[0]
        else:
            guard = px.guard_for(m, lambda a=a, b=b: conj(a[0], b[0]))
        cells.append(Cell(guard, m, op(a[2], b[2])))
    return reduce_cells(px, cells)


def restrict(f: FeatureFunction, guard: FeatureExpr, neutral: Any,
             transform: Callable[[Any], Any] | None = None, guard_mask: int | None = None) -> FeatureFunction:
    """Keep ``f`` (optionally transformed) where ``guard`` holds and ``neutral`` elsewhere."""
    px = f.px
    gm = px.mask(guard) if guard_mask is None else guard_mask
    if gm == px.full:
        if transform is None:
            return f
        if len(f.cells) == 1:
            g, m, v = f.cells[0]
            return FeatureFunction(px, (Cell(g, m, transform(v)),))
        return reduce_cells(px, [Cell(g, m, transform(v)) for g, m, v in f.cells])
    key = ("r", f.partition_key(), gm)
    plan = px._plans.get(key)
    if plan is None:
        plan = []
        for i, c in enumerate(f.cells):
            m = c[1] & gm
            if m:
                # 0 -> cell guard, 1 -> restricting guard, 2 -> intersection
                plan.append((i, m, 0 if m == c[1] else 1 if m == gm else 2))
        plan = px.remember_plan(key, tuple(plan))
    cells = []
    for i, m, src in plan:
        c = f.cells[i]
        if src == 0:
            g = c[0]
        elif src == 1:
            g = guard
        else:
            g = px.guard_for(m, lambda c=c: conj(guard, c[0]))
        cells.append(Cell(g, m, c[2] if transform is None else transform(c[2])))
    rest = px.full & ~gm
    if rest:
        cells.append(Cell(px.guard_for(rest, lambda: neg(guard)), rest, neutral))
    return reduce_cells(px, cells)


_UNSET = object()


def guarded_fold(px: ProductSet, entries: Sequence[tuple], op: Callable[[Any, Any], Any],
                 neutral: Any) -> FeatureFunction:
    """``op``-fold of ``restrict(f, guard, neutral, transform)`` over ``(f, guard, mask, transform)`` entries.

    Same result as chaining :func:`restrict` and :func:`combine` when ``op``
    is associative and commutative with ``neutral`` as unit, but only the
    final function is reduced.
    """
    if not entries:
        return FeatureFunction.const(px, neutral)
    key = ("f",) + tuple((e[0].partition_key(), e[2]) for e in entries)
    plan = px._plans.get(key)
    if plan is None:
        owners = [(e[0].owners(), e[2]) for e in entries]
        groups: dict[tuple, int] = {}
        for k in range(len(px)):
            bit = 1 << k
            sig = tuple([o[k] if gm & bit else -1 for o, gm in owners])
            groups[sig] = groups.get(sig, 0) | bit
        plan = px.remember_plan(key, tuple(
            (m, sig, tuple((i, ci) for i, ci in enumerate(sig) if ci >= 0)) for sig, m in groups.items()))
    cells = []
    for m, sig, parts in plan:
        acc = _UNSET
        for i, ci in parts:
            f, _, _, transform = entries[i]
            v = f.cells[ci][2]
            if transform is not None:
                v = transform(v)
            acc = v if acc is _UNSET else op(acc, v)
        if acc is _UNSET:
            acc = neutral
        g = px.guard_for(m, lambda sig=sig: _fold_guard(entries, sig))
        cells.append(Cell(g, m, acc))
    return reduce_cells(px, cells)


def _fold_guard(entries: Sequence[tuple], sig: tuple) -> FeatureExpr:
    parts = []
    for (f, guard, _, _), ci in zip(entries, sig):
        if ci >= 0:
            parts.append(conj(f.cells[ci][0], guard))
        else:
            parts.append(neg(guard))
    return conj_all(parts)


# ---------------------------------------------------------------------------
# Rendering


def simplify(mask: int, px: ProductSet) -> FeatureExpr:
    """A compact guard denoting exactly ``mask`` within ``px``.

    Products outside ``px`` are don't-cares, so e.g. the set of products
    containing ``euro`` renders as ``euro`` rather than its full DNF.
    """
    if mask == px.full:
        return TRUE
    if mask == 0:
        return FALSE
    from sympy import Symbol
    from sympy.logic import SOPform

    symbols = [Symbol(f"v{k}") for k in range(len(px.features))]
    names = {s: f for s, f in zip(symbols, px.features)}
    minterms = [[int(f in p) for f in px.features] for p in px.products_of(mask)]
    dontcares = []
    if not px.is_full:
        present = {tuple(int(f in p) for f in px.features) for p in px}
        dontcares = [list(bits) for bits in itertools.product((0, 1), repeat=len(px.features))
                     if bits not in present]
    return _from_sympy(SOPform(symbols, minterms, dontcares), names)


def _from_sympy(e, names) -> FeatureExpr:
    from sympy.logic.boolalg import And as SAnd, Not as SNot, Or as SOr, BooleanTrue, BooleanFalse

    if isinstance(e, BooleanTrue):
        return TRUE
    if isinstance(e, BooleanFalse):
        return FALSE
    if isinstance(e, SNot):
        return Not(_from_sympy(e.args[0], names))
    if isinstance(e, (SAnd, SOr)):
        build = And if isinstance(e, SAnd) else Or
        args = sorted(e.args, key=str)
        parts = [_from_sympy(a, names) for a in args]
        out = parts[0]
        for part in parts[1:]:
            out = build(out, part)
        return out
    return Var(names[e])


def render_guard(mask: int, px: ProductSet) -> str:
    text = px._rendered.get(mask)
    if text is None:
        text = px._rendered[mask] = str(simplify(mask, px))
    return text

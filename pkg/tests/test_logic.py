import pytest
from hypothesis import given
from hypothesis import strategies as st

from featgames.logic import (
    FALSE,
    TRUE,
    Cell,
    FeatureFunction,
    ProductSet,
    ValidationError,
    char_formula,
    combine,
    equivalent,
    evaluate,
    parse_guard,
    reduce,
    restrict,
    sat,
    validate_partition,
)

COFFEE = ProductSet(["euro", "dollar"], [["euro"], ["dollar"], ["euro", "dollar"]])
AB = ProductSet(["a", "b"])


def g(text, px=COFFEE):
    return parse_guard(text, px.features)


def table(f):
    return {tuple(sorted(p)): f.lookup(p) for p in f.px}


class TestGuards:
    def test_evaluate(self):
        assert evaluate(parse_guard("euro && !dollar"), {"euro"})
        assert evaluate(TRUE, set())
        assert not evaluate(parse_guard("!fbrock || fextra"), {"fbrock"})

    def test_unknown_feature(self):
        with pytest.raises(ValidationError):
            evaluate(parse_guard("x"), set(), ["euro"])
        with pytest.raises(ValidationError, match="col"):
            parse_guard("euro && ", ["euro"])

    def test_sat(self):
        assert sat(g("euro && dollar"), COFFEE)
        assert not sat(g("euro && !euro"), COFFEE)
        assert not sat(g("!euro && !dollar"), COFFEE)

    def test_equivalent(self):
        assert equivalent(g("a || !a", AB), TRUE, AB)
        assert equivalent(g("euro"), g("euro && (euro || dollar)"), COFFEE)
        assert not equivalent(g("euro"), g("dollar"), COFFEE)

    def test_char_formula(self):
        assert str(char_formula({"euro"}, ["euro", "dollar"])) in ("euro && !dollar", "(euro && !dollar)")
        assert evaluate(char_formula(set(), ["f"]), set())
        phi = char_formula({"fextra", "fbrock"}, ["fextra", "fbrock"])
        px = ProductSet(["fextra", "fbrock"])
        assert [p for p in px if phi.evaluate(p)] == [frozenset({"fextra", "fbrock"})]

    def test_validate_partition(self):
        assert validate_partition([TRUE], COFFEE)
        assert validate_partition([g("euro"), g("!euro")], COFFEE)
        assert not validate_partition([g("euro"), g("dollar")], COFFEE)
        assert not validate_partition([TRUE, FALSE], COFFEE)  # empty cell

    def test_products_all_and_empty(self):
        assert len(ProductSet(["a", "b"])) == 4
        assert list(ProductSet([])) == [frozenset()]


class TestFunctions:
    def test_reduce_merges_equal_values(self):
        f = reduce([(g("a", AB), 1), (g("!a", AB), 1)], AB)
        assert len(f) == 1 and f.lookup(["a"]) == 1
        f = reduce([(g("a", AB), 1), (g("!a", AB), 2)], AB)
        assert len(f) == 2

    def test_reduce_coffee(self):
        f = reduce([(g("euro && dollar"), 0), (g("euro && !dollar"), 0), (g("!euro"), 1)], COFFEE)
        assert len(f) == 2
        assert table(f) == {("euro",): 0, ("dollar",): 1, ("dollar", "euro"): 0}

    def test_reduce_rejects_non_partition(self):
        with pytest.raises(ValidationError):
            reduce([(g("euro"), 0), (g("dollar"), 1)], COFFEE)

    def test_combine_examples(self):
        t = FeatureFunction.const(AB, True)
        f = reduce([(g("a", AB), True), (g("!a", AB), False)], AB)
        assert table(combine(t, f, lambda x, y: x and y)) == table(f)
        inf = FeatureFunction.const(AB, float("inf"))
        h = reduce([(g("a", AB), 3), (g("!a", AB), float("inf"))], AB)
        assert table(combine(inf, h, min)) == table(h)
        f1 = reduce([(g("a", AB), 1), (g("!a", AB), 2)], AB)
        f2 = reduce([(g("b", AB), 10), (g("!b", AB), 20)], AB)
        out = combine(f1, f2, max)
        assert len(out) == 2
        assert table(out) == {(): 20, ("a",): 20, ("b",): 10, ("a", "b"): 10}

    def test_restrict_examples(self):
        f = FeatureFunction.const(COFFEE, "v")
        assert len(restrict(f, TRUE, "n")) == 1
        r = restrict(f, g("dollar"), "n")
        assert table(r) == {("euro",): "n", ("dollar",): "v", ("dollar", "euro"): "v"}
        f = reduce([(g("a", AB), 1), (g("!a", AB), 2)], AB)
        r = restrict(f, g("a", AB), 9)
        assert table(r) == {(): 9, ("b",): 9, ("a",): 1, ("a", "b"): 1}

    def test_check_detects_broken_cells(self):
        bad = FeatureFunction(COFFEE, [Cell(g("euro"), COFFEE.mask(g("euro")), 0),
                                       Cell(g("dollar"), COFFEE.mask(g("dollar")), 1)])
        with pytest.raises(ValidationError):
            bad.check()
        dup = FeatureFunction(COFFEE, [Cell(g("euro"), COFFEE.mask(g("euro")), 0),
                                       Cell(g("!euro"), COFFEE.mask(g("!euro")), 0)])
        with pytest.raises(ValidationError, match="canonical"):
            dup.check()


# ---------------------------------------------------------------------------
# algebraic laws on random functions over {a, b, c}

PX3 = ProductSet(["a", "b", "c"])
LITS = ["a", "!a", "b", "!b", "c", "!c", "true", "a && b", "a || c", "!(b && c)"]


@st.composite
def functions(draw, values=st.integers(0, 3)):
    vals = [draw(values) for _ in PX3]
    return FeatureFunction.from_products(PX3, lambda p, v=vals: v[PX3.index[p]])


@given(functions(), functions(), st.sampled_from([min, max, lambda x, y: x - y]))
def test_combine_lookup_law(f1, f2, op):
    h = combine(f1, f2, op)
    h.check()
    for p in PX3:
        assert h.lookup(p) == op(f1.lookup(p), f2.lookup(p))


@given(functions(), st.sampled_from(LITS), st.integers(-5, -1))
def test_restrict_lookup_law(f, text, neutral):
    guard = parse_guard(text)
    h = restrict(f, guard, neutral)
    h.check()
    for p in PX3:
        assert h.lookup(p) == (f.lookup(p) if guard.evaluate(p) else neutral)


@given(st.lists(st.integers(0, 2), min_size=8, max_size=8))
def test_reduce_is_canonical_and_preserves_lookups(vals):
    cells = [Cell(char_formula(p, PX3.features), 1 << k, vals[k]) for k, p in enumerate(PX3)]
    f = reduce(FeatureFunction(PX3, cells))
    f.check()
    assert len(f) == len(set(vals))
    assert [f.lookup(p) for p in PX3] == vals
    assert reduce(f).values() == f.values()

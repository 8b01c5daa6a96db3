"""Command-line front end: solve, verify, translate, products.

Exit codes: 0 ok, 1 invalid input, 2 bad parameters, 3 internal inconsistency,
4 verification mismatch.  Only the report goes to standard output.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Sequence

from .domains import TOP
from .featured import (
    FeaturedResult,
    extract_featured_strategy,
    solution_from_json,
    solution_to_json,
    solve_featured,
    strategy_to_json,
    value_to_json,
)
from .game import KIND_ALIASES, FeaturedGame, game_from_dict, game_to_dict
from .logic import ProductSet, ValidationError, char_formula
from .plain import INF, InternalError, solve, zielonka

EXIT_OK, EXIT_INVALID, EXIT_PARAM, EXIT_INTERNAL, EXIT_MISMATCH = 0, 1, 2, 3, 4

SOLVER_NAMES = {
    "reachability": "fattr*",
    "min-reachability": "fwattr*",
    "discounted": "fdattr*",
    "energy": "feattr*",
    "parity": "fpattr*",
}


class ParameterError(Exception):
    pass


class Mismatch(Exception):
    def __init__(self, report: dict, message: str):
        super().__init__(message)
        self.report = report


# ---------------------------------------------------------------------------
# Helpers


def _read_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON: {exc}") from None


def _write_json(path: str, doc: Any) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, ensure_ascii=False)
        fh.write("\n")


def _load_game(path: str) -> tuple[dict, FeaturedGame]:
    doc = _read_json(path)
    try:
        return doc, game_from_dict(doc)
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from None


def _check_kind(game: FeaturedGame, requested: str | None) -> None:
    if requested is None:
        return
    kind = KIND_ALIASES.get(requested, requested)
    if kind != game.kind:
        raise ParameterError(f"--type {requested} does not match the document kind {game.kind}")


def _discount_params(game: FeaturedGame, lam: float | None, eps: float | None) -> tuple[float | None, float | None]:
    if game.kind != "discounted":
        if lam is not None or eps is not None:
            raise ParameterError("--lambda/--epsilon only apply to discounted games")
        return None, None
    if lam is None:
        lam = game.metadata.get("discount")
        if lam is None:
            raise ParameterError("discounted games need --lambda (or a 'discount' metadata entry)")
    if eps is None:
        eps = 1e-9
    if not (0 < lam < 1):
        raise ParameterError(f"--lambda must lie in (0, 1), got {lam}")
    if not eps > 0:
        raise ParameterError(f"--epsilon must be positive, got {eps}")
    return float(lam), float(eps)


def _product_filter(px: ProductSet, text: str | None) -> list[int]:
    if text is None:
        return list(range(len(px)))
    names = [f.strip() for f in text.split(",") if f.strip()]
    unknown = set(names) - set(px.features)
    if unknown:
        raise ParameterError(f"--product names unknown features {sorted(unknown)}")
    p = frozenset(names)
    if p not in px.index:
        raise ParameterError(f"--product {text!r} is not a product of this game")
    return [px.index[p]]


def _params(result_params: dict) -> dict:
    out = {}
    for key, val in result_params.items():
        if key == "domain":
            out["measure_bounds"] = list(val.bounds)
        else:
            out[key] = val
    return out


def _winner(kind: str, value: Any, credit: int) -> bool | None:
    if kind == "reachability":
        return bool(value)
    if kind == "min-reachability":
        return value != INF
    if kind == "energy":
        return value is not TOP and value <= credit
    if kind == "parity":
        return value is not TOP
    return None


def _product_json(px: ProductSet, p: frozenset) -> list[str]:
    return [f for f in px.features if f in p]


def _display(v: Any) -> str:
    if v is TOP:
        return "top"
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.4f}"
    if isinstance(v, tuple):
        return "(" + ",".join(map(str, v)) + ")"
    return str(v)


def _table(headers: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(headers)]
    line = "  ".join(h.ljust(w) for h, w in zip(headers, widths))
    out = [line.rstrip(), "  ".join("-" * w for w in widths)]
    for r in rows:
        out.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
    return "\n".join(out) + "\n"


def _emit(doc: dict, fmt: str, table: str | None = None) -> None:
    if fmt == "table" and table is not None:
        sys.stdout.write(table)
    else:
        sys.stdout.write(json.dumps(doc, indent=2, ensure_ascii=False) + "\n")


# ---------------------------------------------------------------------------
# solve


def _game_info(path: str, game: FeaturedGame) -> dict:
    return {
        "file": path,
        "kind": game.kind,
        "initial": game.initial,
        "states": len(game.states),
        "transitions": len(game.transitions),
        "features": list(game.features),
        "products": len(game.px),
        "metadata": game.metadata,
    }


def run_solve(args) -> int:
    _, game = _load_game(args.game)
    _check_kind(game, args.type)
    lam, eps = _discount_params(game, args.lam, args.epsilon)
    rows = _product_filter(game.px, args.product)
    start = time.perf_counter()
    result = solve_featured(game, lam, eps)
    strategy = extract_featured_strategy(result) if args.strategy else None
    duration = time.perf_counter() - start
    table = []
    for k in rows:
        p = game.px.products[k]
        v = result.initial.at(k)
        row = {"product": _product_json(game.px, p), "label": game.px.label(p), "value": value_to_json(v)}
        w = _winner(game.kind, v, args.credit)
        if w is not None:
            row["winner"] = w
        table.append(row)
    report = {
        "game": _game_info(args.game, game),
        "solver": SOLVER_NAMES[game.kind],
        "parameters": _params(result.params),
        "iterations": result.iterations,
        "table": table,
        "solution": solution_to_json(result),
    }
    if game.kind == "energy":
        report["parameters"]["credit"] = args.credit
    if strategy is not None:
        _write_json(args.strategy, {"kind": game.kind, "strategy": strategy_to_json(strategy)})
        report["strategy_file"] = args.strategy
    report["duration_seconds"] = duration
    headers = ["product", "value"] + (["winner"] if game.kind != "discounted" else [])
    text_rows = []
    for k, row in zip(rows, table):
        cells = [row["label"], _display(result.initial.at(k))]
        if "winner" in row:
            cells.append(str(row["winner"]).lower())
        text_rows.append(cells)
    _emit(report, args.format, _table(headers, text_rows))
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify


def _plain_check(doc: dict, k: int, lam: float | None, eps: float | None) -> dict:
    """Solve the projection onto product ``k``; runs in worker processes too."""
    game = game_from_dict(doc)
    proj = game.project(game.px.products[k])
    val = solve(proj, lam, eps)
    out = {"values": val.values}
    if game.kind == "parity":
        w1, _ = zielonka(proj)
        out["zielonka"] = w1
    return out


def _agree(kind: str, featured: Any, plain: Any, tol: float) -> bool:
    if kind == "discounted":
        return abs(featured - plain) <= tol
    return featured == plain


def run_verify(args) -> int:
    doc, game = _load_game(args.game)
    _check_kind(game, args.type)
    lam, eps = _discount_params(game, args.lam, args.epsilon)
    rows = _product_filter(game.px, args.product)
    start = time.perf_counter()
    if args.solution:
        raw = _read_json(args.solution)
        if isinstance(raw, dict) and "solution" in raw:
            raw = raw["solution"]
        solution = solution_from_json(raw, game)
        source = args.solution
    else:
        solution = solve_featured(game, lam, eps).solution
        source = "computed"
    for f in solution.values():
        f.check()
    tol = 2 * eps / (1 - lam) if game.kind == "discounted" else 0.0
    if args.jobs and args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            checks = list(pool.map(_plain_check, [doc] * len(rows), rows,
                                   [lam] * len(rows), [eps] * len(rows)))
    else:
        checks = [_plain_check(doc, k, lam, eps) for k in rows]
    per_product = []
    counterexample = None
    for k, chk in zip(rows, checks):
        p = game.px.products[k]
        bad = []
        for sid in game.states:
            fv, pv = solution[sid].at(k), chk["values"][sid]
            if not _agree(game.kind, fv, pv, tol):
                bad.append({"state": sid, "featured": value_to_json(fv), "plain": value_to_json(pv)})
            if game.kind == "parity":
                zw = sid in chk["zielonka"]
                if (pv is not TOP) != zw:
                    bad.append({"state": sid, "plain": value_to_json(pv), "zielonka_winner": zw})
        entry = {"product": _product_json(game.px, p), "label": game.px.label(p), "ok": not bad}
        if bad:
            entry["mismatches"] = len(bad)
            if counterexample is None:
                counterexample = {"product": _product_json(game.px, p), **bad[0]}
        per_product.append(entry)
    report = {
        "game": _game_info(args.game, game),
        "solver": SOLVER_NAMES[game.kind],
        "solution_source": source,
        "tolerance": tol,
        "products": per_product,
        "verdict": "pass" if counterexample is None else "fail",
    }
    if counterexample is not None:
        report["counterexample"] = counterexample
    report["duration_seconds"] = time.perf_counter() - start
    table = _table(["product", "ok"], [[e["label"], "yes" if e["ok"] else "NO"] for e in per_product])
    table += f"verdict: {report['verdict']}\n"
    _emit(report, args.format, table)
    if counterexample is not None:
        c = counterexample
        print(f"verify: mismatch for product {c['product']} at state {c['state']!r}: "
              f"featured={c.get('featured')} plain={c.get('plain')}", file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


# ---------------------------------------------------------------------------
# translate


def run_translate(args) -> int:
    from .translations import distance_game, fts_from_dict, mucalc_to_parity_game, split_tolerances

    def load_fts(path):
        try:
            return fts_from_dict(_read_json(path))
        except ValidationError as exc:
            raise ValidationError(f"{path}: {exc}") from None

    if args.mode == "mucalc":
        if len(args.inputs) != 2:
            raise ParameterError("translate mucalc needs an FTS file and a formula")
        fts = load_fts(args.inputs[0])
        if args.lam is not None:
            raise ParameterError("--lambda only applies to distance mode")
        import warnings
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            game = mucalc_to_parity_game(fts, args.inputs[1])
    else:
        if args.lam is None:
            raise ParameterError("translate distance needs --lambda")
        if not (0 < args.lam < 1):
            raise ParameterError(f"--lambda must lie in (0, 1), got {args.lam}")
        if len(args.inputs) == 1:
            f1, f2 = split_tolerances(load_fts(args.inputs[0]))
        elif len(args.inputs) == 2:
            f1, f2 = load_fts(args.inputs[0]), load_fts(args.inputs[1])
        else:
            raise ParameterError("translate distance needs one tolerance FTS or two weighted FTS")
        game = distance_game(f1, f2, args.lam)
    out = game_to_dict(game)
    game_from_dict(json.loads(json.dumps(out)))  # must re-parse
    for w in game.metadata.get("warnings", []):
        print(f"translate: warning: {w}", file=sys.stderr)
    if args.output:
        _write_json(args.output, out)
    else:
        _emit(out, "json")
    return EXIT_OK


# ---------------------------------------------------------------------------
# products


def run_products(args) -> int:
    from .game import products_from_json

    doc = _read_json(args.game)
    if not isinstance(doc, dict) or "features" not in doc:
        raise ValidationError(f"{args.game}: document needs a 'features' list")
    px = products_from_json(doc["features"], doc.get("products", "all"))
    rows = [{"product": _product_json(px, p), "label": px.label(p),
             "formula": str(char_formula(p, px.features))} for p in px]
    report = {"features": list(px.features), "count": len(rows), "products": rows}
    table = _table(["product", "formula"], [[r["label"], r["formula"]] for r in rows])
    _emit(report, args.format, table)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="featgames", description="Solve featured two-player games.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, game=True):
        if game:
            p.add_argument("--game", required=True, help="game document (JSON)")
        p.add_argument("--format", choices=("json", "table"), default="json")

    def solver_flags(p):
        p.add_argument("--type", choices=sorted(KIND_ALIASES), help="expected game kind")
        p.add_argument("--lambda", dest="lam", type=float, help="discount factor (discounted games)")
        p.add_argument("--epsilon", type=float, help="precision (discounted games, default 1e-9)")
        p.add_argument("--product", help='restrict to one product, e.g. "f1,f2"')

    p = sub.add_parser("solve", help="solve a featured game for all products")
    common(p)
    solver_flags(p)
    p.add_argument("--strategy", help="write the featured strategy to this file")
    p.add_argument("--credit", type=int, default=0, help="initial credit for energy winners")
    p.set_defaults(run=run_solve)

    p = sub.add_parser("verify", help="compare the featured solution with per-product solvers")
    common(p)
    solver_flags(p)
    p.add_argument("--solution", help="verify this solution (or solve report) instead of solving")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers for the per-product loop")
    p.set_defaults(run=run_verify)

    p = sub.add_parser("translate", help="build a featured game from transition systems")
    p.add_argument("mode", choices=("mucalc", "distance"))
    p.add_argument("inputs", nargs="+", help="mucalc: FTS FORMULA; distance: TOLERANCE_FTS or FTS1 FTS2")
    p.add_argument("--lambda", dest="lam", type=float, help="distance discount factor")
    p.add_argument("-o", "--output", help="write the game document here instead of standard output")
    p.set_defaults(run=run_translate)

    p = sub.add_parser("products", help="list the products of a document")
    common(p)
    p.set_defaults(run=run_products)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.run(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ParameterError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAM
    except InternalError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())

"""Regenerate the derived fixture documents (translated games) from the FTS fixtures."""

from __future__ import annotations

import json
from pathlib import Path

from featgames.game import game_to_dict
from featgames.translations import distance_game, load_fts, mucalc_to_parity_game, split_tolerances

FIXTURES = Path(__file__).resolve().parents[1] / "src" / "featgames" / "fixtures"
COFFEE_FORMULA = "nu X. mu Y. ((<ins>Y || <xxl>Y) || <std>X)"


def write(name: str, doc: dict) -> None:
    path = FIXTURES / name
    path.write_text(json.dumps(doc, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    print(f"wrote {path}")


def main() -> None:
    coffee = load_fts(FIXTURES / "coffee_fts.json")
    write("coffee_parity.json", game_to_dict(mucalc_to_parity_game(coffee, COFFEE_FORMULA)))
    low, high = split_tolerances(load_fts(FIXTURES / "coffee_tolerance_fts.json"))
    write("coffee_distance.json", game_to_dict(distance_game(low, high, 0.99)))


if __name__ == "__main__":
    main()

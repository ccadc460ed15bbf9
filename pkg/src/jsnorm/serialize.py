"""JSON file formats and canonical report rendering.

All rationals travel as exact "p/q" strings. Canonical JSON output is sorted
by key with fixed separators so equal inputs yield byte-identical files.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Mapping, Optional

from .core import FinVector, FiniteTree, GroundSet, SetFamily, WeightedSet
from .errors import InputFormatError


def format_fraction(value: Fraction) -> str:
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def parse_fraction(text: Any) -> Fraction:
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        raise InputFormatError(f"expected a rational 'p/q' string, got {text!r}")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputFormatError(f"bad rational {text!r}: {exc}") from exc


def canonical_json(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False) + "\n"


def ground_to_dict(ground: GroundSet) -> dict:
    return {"elements": list(ground.elements)}


def ground_from_dict(payload: Mapping) -> GroundSet:
    try:
        return GroundSet(payload["elements"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputFormatError(f"bad ground set payload: {exc}") from exc


def family_to_dict(family: SetFamily) -> dict:
    return {
        "ground": list(family.ground.elements),
        "members": [list(m) for m in family.members],
        "provenance": family.provenance,
    }


def family_from_dict(payload: Mapping) -> SetFamily:
    try:
        ground = GroundSet(payload["ground"])
        return SetFamily(ground, payload["members"], provenance=payload.get("provenance", "explicit"))
    except InputFormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise InputFormatError(f"bad family payload: {exc}") from exc


def vector_to_dict(vector: FinVector) -> dict:
    return {"entries": {a: format_fraction(v) for a, v in vector.entries.items()}}


def vector_from_dict(payload: Mapping, ground: GroundSet) -> FinVector:
    try:
        entries = payload["entries"]
        if not isinstance(entries, Mapping):
            raise InputFormatError("'entries' must be an object")
        return FinVector(ground, {a: parse_fraction(v) for a, v in entries.items()})
    except InputFormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise InputFormatError(f"bad vector payload: {exc}") from exc


def tree_to_dict(tree: FiniteTree) -> dict:
    return {
        "forest": tree.forest,
        "parent": {node: tree.parent[node] for node in sorted(tree.nodes)},
    }


def tree_from_dict(payload: Mapping) -> FiniteTree:
    try:
        return FiniteTree(dict(payload["parent"]), forest=bool(payload.get("forest", False)))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputFormatError(f"bad tree payload: {exc}") from exc


def weighted_to_dict(wset: WeightedSet) -> dict:
    return {"weights": {a: format_fraction(v) for a, v in wset.weights.items()}}


def weighted_from_dict(payload: Mapping, ground: GroundSet) -> WeightedSet:
    try:
        return WeightedSet(ground, {a: parse_fraction(v) for a, v in payload["weights"].items()})
    except InputFormatError:
        raise
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise InputFormatError(f"bad weighted set payload: {exc}") from exc


def weighted_family_to_dict(sets: list[WeightedSet], ground: GroundSet) -> dict:
    return {
        "ground": list(ground.elements),
        "weighted": [weighted_to_dict(w)["weights"] for w in sets],
    }


def weighted_family_from_dict(payload: Mapping) -> tuple[list[WeightedSet], GroundSet]:
    try:
        ground = GroundSet(payload["ground"])
        sets = [
            WeightedSet(ground, {a: parse_fraction(v) for a, v in w.items()})
            for w in payload["weighted"]
        ]
        return sets, ground
    except InputFormatError:
        raise
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise InputFormatError(f"bad weighted family payload: {exc}") from exc


def partition_from_dict(payload: Mapping) -> list[list[str]]:
    try:
        blocks = payload["blocks"]
        if not isinstance(blocks, list) or not all(isinstance(b, list) for b in blocks):
            raise InputFormatError("'blocks' must be a list of atom lists")
        return [[str(a) for a in b] for b in blocks]
    except InputFormatError:
        raise
    except (KeyError, TypeError) as exc:
        raise InputFormatError(f"bad partition payload: {exc}") from exc


def supports_from_dict(payload: Mapping) -> tuple[dict[str, list[str]], Optional[list[str]]]:
    """Supports file: either a bare {delta: [gammas]} map or a
    {"gamma": [...], "supports": {...}} wrapper naming the full ground set."""
    try:
        if "supports" in payload:
            gamma = [str(a) for a in payload["gamma"]] if "gamma" in payload else None
            raw = payload["supports"]
        else:
            gamma, raw = None, payload
        if not isinstance(raw, Mapping):
            raise InputFormatError("supports must be an object mapping delta ids to atom lists")
        return {str(d): [str(a) for a in atoms] for d, atoms in raw.items()}, gamma
    except InputFormatError:
        raise
    except (KeyError, TypeError) as exc:
        raise InputFormatError(f"bad supports payload: {exc}") from exc


def load_json(path: str) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputFormatError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputFormatError(f"{path} is not valid JSON: {exc}") from exc

"""JSON file formats for instances and packings.

Instance: {"k": int, "items": ["p/q" | "decimal", ...]}
Packing:  {"bins": [[{"item": id, "part": "p/q"}, ...], ...], "labels": [...]}

Sizes travel as strings so exactness survives serialization; every rational
is rendered in lowest terms.
"""

from __future__ import annotations

import json
from typing import Any

from .core import (
    DEFAULT_LABEL,
    Instance,
    Packing,
    parse_rational,
    render_rational,
)


class ParseError(ValueError):
    """Raised when an instance or packing document is malformed."""


def instance_to_json(inst: Instance) -> dict[str, Any]:
    return {"k": inst.k, "items": [render_rational(s) for s in inst.sizes]}


def instance_from_json(doc: Any) -> Instance:
    if not isinstance(doc, dict) or "k" not in doc or "items" not in doc:
        raise ParseError("instance document needs 'k' and 'items'")
    k = doc["k"]
    if not isinstance(k, int) or isinstance(k, bool):
        raise ParseError(f"'k' must be an integer, got {k!r}")
    items = doc["items"]
    if not isinstance(items, list):
        raise ParseError("'items' must be a list of rational strings")
    try:
        sizes = tuple(parse_rational(s) for s in items)
        return Instance(k=k, sizes=sizes)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def packing_to_json(packing: Packing) -> dict[str, Any]:
    return {
        "bins": [
            [{"item": item, "part": render_rational(part)} for item, part in entries]
            for entries in packing.bins
        ],
        "labels": list(packing.labels),
    }


def packing_from_json(doc: Any) -> Packing:
    if not isinstance(doc, dict) or "bins" not in doc:
        raise ParseError("packing document needs 'bins'")
    raw_bins = doc["bins"]
    if not isinstance(raw_bins, list):
        raise ParseError("'bins' must be a list of bins")
    bins = []
    for b, raw in enumerate(raw_bins):
        if not isinstance(raw, list):
            raise ParseError(f"bin {b} must be a list of entries")
        entries = []
        for entry in raw:
            if (
                not isinstance(entry, dict)
                or "item" not in entry
                or "part" not in entry
            ):
                raise ParseError(f"bin {b} has an entry without 'item'/'part'")
            item = entry["item"]
            if not isinstance(item, int) or isinstance(item, bool):
                raise ParseError(f"bin {b} has a non-integer item id {item!r}")
            try:
                part = parse_rational(entry["part"])
            except ValueError as exc:
                raise ParseError(f"bin {b}: {exc}") from exc
            entries.append((item, part))
        bins.append(entries)
    labels = doc.get("labels")
    if labels is None:
        labels = [DEFAULT_LABEL] * len(bins)
    if not isinstance(labels, list) or not all(isinstance(x, str) for x in labels):
        raise ParseError("'labels' must be a list of strings")
    if len(labels) != len(bins):
        raise ParseError(f"{len(bins)} bins but {len(labels)} labels")
    return Packing.build(bins, labels)


def dumps_instance(inst: Instance) -> str:
    return json.dumps(instance_to_json(inst), indent=2) + "\n"


def dumps_packing(packing: Packing) -> str:
    return json.dumps(packing_to_json(packing), indent=2) + "\n"


def loads_instance(text: str) -> Instance:
    return instance_from_json(_loads(text))


def loads_packing(text: str) -> Packing:
    return packing_from_json(_loads(text))


def _loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc


def load_instance(path: str) -> Instance:
    with open(path, "r", encoding="utf-8") as fh:
        return loads_instance(fh.read())


def load_packing(path: str) -> Packing:
    with open(path, "r", encoding="utf-8") as fh:
        return loads_packing(fh.read())


def save_instance(path: str, inst: Instance) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_instance(inst))


def save_packing(path: str, packing: Packing) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_packing(packing))

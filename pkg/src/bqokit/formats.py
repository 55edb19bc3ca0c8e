"""Text formats for relations, rankings, blocks, arrays, and families.

All documents are JSON (UTF-8).  Emission is canonical and deterministic:
fixed key order, scalars inline, one element/pair per line, trailing
newline.  Loading is lenient about layout but strict about content; a
non-increasing block element is reported with its line number when the
file follows the canonical layout (one element per line).

Document shapes::

    relation / ranking:  {"carrier": [label, ...], "pairs": [[label, label], ...]}
    block:               {"window": [nat, ...], "rank": nat, "elements": [[nat, ...], ...]}
    array:               {"block": <block>, "values": [[[nat, ...], label], ...],
                          "target": <relation> | {"path": str},
                          "ranking": <ranking> | {"path": str}}   # ranking optional
    family:              {"omega_bound": nat, "members": [<relation>, ...]}

Pair order inside files is irrelevant; arrays may omit "target" when the
consumer supplies one (the gadget subcommands do).
"""

from __future__ import annotations

import json
import os
from typing import Any

from .blocks import WindowedBlock, lenlex
from .arrays import BlockArray
from .errors import StructureError
from .relations import FiniteRelation, PartialRanking

# ---------------------------------------------------------------------------
# Canonical rendering
# ---------------------------------------------------------------------------


def render(obj: Any, indent: int = 0) -> str:
    """Canonical JSON text: dicts multiline in insertion order, lists of
    containers one item per line, scalar lists inline."""
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        lines = ["{"]
        items = list(obj.items())
        for i, (key, value) in enumerate(items):
            comma = "," if i < len(items) - 1 else ""
            lines.append(f'{pad}  {json.dumps(key)}: {render(value, indent + 1)}{comma}')
        lines.append(pad + "}")
        return "\n".join(lines)
    if isinstance(obj, (list, tuple)):
        obj = list(obj)
        if not obj:
            return "[]"
        if any(isinstance(item, dict) for item in obj):
            lines = ["["]
            for i, item in enumerate(obj):
                comma = "," if i < len(obj) - 1 else ""
                lines.append(f"{pad}  {render(item, indent + 1)}{comma}")
            lines.append(pad + "]")
            return "\n".join(lines)
        if any(isinstance(item, (list, tuple)) for item in obj):
            lines = ["["]
            for i, item in enumerate(obj):
                comma = "," if i < len(obj) - 1 else ""
                lines.append(f"{pad}  {json.dumps(item)}{comma}")
            lines.append(pad + "]")
            return "\n".join(lines)
        return json.dumps(obj)
    return json.dumps(obj)


def render_document(obj: Any) -> str:
    return render(obj) + "\n"


# ---------------------------------------------------------------------------
# Documents from objects
# ---------------------------------------------------------------------------


def relation_doc(r: FiniteRelation) -> dict:
    return {
        "carrier": list(r.labels),
        "pairs": [[r.labels[p], r.labels[q]] for p, q in r.sorted_pairs()],
    }


def ranking_doc(labels: tuple[str, ...], rk: PartialRanking) -> dict:
    return {
        "carrier": list(labels),
        "pairs": [[labels[p], labels[q]] for p, q in rk.sorted_pairs()],
    }


def block_doc(b: WindowedBlock) -> dict:
    return {
        "window": list(b.window),
        "rank": b.rank,
        "elements": [list(e) for e in b.sorted_elements()],
    }


def array_doc(f: BlockArray, inline_target: bool = True) -> dict:
    doc: dict = {
        "block": block_doc(f.block),
        "values": [[list(e), f.target.labels[v]] for e, v in f.assignments],
    }
    if inline_target:
        doc["target"] = relation_doc(f.target)
        if f.ranking is not None:
            doc["ranking"] = ranking_doc(f.target.labels, f.ranking)
    return doc


def family_doc(members: tuple[FiniteRelation, ...], omega_bound: int) -> dict:
    return {
        "omega_bound": omega_bound,
        "members": [relation_doc(m) for m in members],
    }


# ---------------------------------------------------------------------------
# Parsing helpers
# ---------------------------------------------------------------------------


def _parse_json(text: str, source: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise StructureError(f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def _want(doc: Any, key: str, kind: type, source: str) -> Any:
    if not isinstance(doc, dict):
        raise StructureError(f"{source}: expected a JSON object")
    if key not in doc:
        raise StructureError(f"{source}: missing field {key!r}")
    value = doc[key]
    if not isinstance(value, kind):
        raise StructureError(f"{source}: field {key!r} must be a {kind.__name__}")
    return value


def _container_line(text: str, key: str, index: int) -> int | None:
    """Line (1-based) of the index-th entry under ``key`` in canonical layout."""
    lines = text.splitlines()
    start = None
    for i, line in enumerate(lines):
        if f'"{key}"' in line:
            start = i
            break
    if start is None:
        return None
    count = -1
    for i in range(start + 1, len(lines)):
        if lines[i].strip().startswith("["):
            count += 1
            if count == index:
                return i + 1
    return None


# ---------------------------------------------------------------------------
# Loaders
# ---------------------------------------------------------------------------


def parse_relation(text: str, source: str = "<relation>") -> FiniteRelation:
    doc = _parse_json(text, source)
    return relation_from_doc(doc, source)


def relation_from_doc(doc: Any, source: str = "<relation>") -> FiniteRelation:
    carrier = _want(doc, "carrier", list, source)
    pairs_doc = _want(doc, "pairs", list, source)
    labels = []
    for i, label in enumerate(carrier):
        if not isinstance(label, str):
            raise StructureError(f"{source}: carrier[{i}] must be a string")
        labels.append(label)
    if len(set(labels)) != len(labels):
        raise StructureError(f"{source}: carrier labels must be unique")
    index = {label: i for i, label in enumerate(labels)}
    pairs = set()
    for i, entry in enumerate(pairs_doc):
        if not (isinstance(entry, list) and len(entry) == 2):
            raise StructureError(f"{source}: pairs[{i}] must be a two-element list")
        for label in entry:
            if label not in index:
                raise StructureError(f"{source}: pairs[{i}] names unknown element {label!r}")
        pairs.add((index[entry[0]], index[entry[1]]))
    return FiniteRelation(tuple(labels), frozenset(pairs))


def parse_ranking(text: str, source: str = "<ranking>") -> tuple[tuple[str, ...], PartialRanking]:
    rel = parse_relation(text, source)
    return rel.labels, PartialRanking(rel.carrier_size, rel.pairs)


def parse_block(text: str, source: str = "<block>") -> WindowedBlock:
    doc = _parse_json(text, source)
    return block_from_doc(doc, source, text)


def block_from_doc(doc: Any, source: str = "<block>", text: str | None = None) -> WindowedBlock:
    window = _want(doc, "window", list, source)
    rank = _want(doc, "rank", int, source)
    elements_doc = _want(doc, "elements", list, source)
    for i, w in enumerate(window):
        if not isinstance(w, int) or w < 0:
            raise StructureError(f"{source}: window[{i}] must be a natural number")
    elements = []
    for i, entry in enumerate(elements_doc):
        if not isinstance(entry, list) or not all(isinstance(x, int) for x in entry):
            raise StructureError(f"{source}: elements[{i}] must be a list of naturals")
        increasing = all(entry[j] < entry[j + 1] for j in range(len(entry) - 1))
        if not entry or not increasing or entry[0] < 0:
            line = _container_line(text, "elements", i) if text else None
            at = f"line {line}: " if line else ""
            raise StructureError(
                f"{source}: {at}elements[{i}] = {entry} is not a nonempty strictly "
                "increasing sequence of naturals"
            )
        elements.append(tuple(entry))
    try:
        return WindowedBlock(tuple(window), rank, frozenset(elements))
    except StructureError as exc:
        raise StructureError(f"{source}: {exc}") from exc


def parse_array(
    text: str,
    source: str = "<array>",
    base_dir: str = ".",
    default_target: FiniteRelation | None = None,
    default_ranking: PartialRanking | None = None,
) -> BlockArray:
    doc = _parse_json(text, source)
    block = block_from_doc(_want(doc, "block", dict, source), f"{source}.block", text)

    target = default_target
    if "target" in doc:
        target = _resolve_relation(doc["target"], source, base_dir)
    if target is None:
        raise StructureError(f"{source}: no target relation given or implied")

    ranking = default_ranking
    if "ranking" in doc:
        entry = doc["ranking"]
        if isinstance(entry, dict) and "path" in entry:
            path = os.path.join(base_dir, entry["path"])
            _, ranking = parse_ranking(_read(path), path)
        else:
            _, ranking = parse_ranking(json.dumps(entry), f"{source}.ranking")

    index = {label: i for i, label in enumerate(target.labels)}
    values_doc = _want(doc, "values", list, source)
    values = {}
    for i, entry in enumerate(values_doc):
        if not (isinstance(entry, list) and len(entry) == 2 and isinstance(entry[0], list)):
            raise StructureError(f"{source}: values[{i}] must be [element, label]")
        element = tuple(entry[0])
        label = entry[1]
        if label not in index:
            raise StructureError(f"{source}: values[{i}] names unknown carrier label {label!r}")
        values[element] = index[label]
    try:
        return BlockArray.of(block, values, target, ranking)
    except StructureError as exc:
        raise StructureError(f"{source}: {exc}") from exc


def parse_family(text: str, source: str = "<family>") -> tuple[tuple[FiniteRelation, ...], int]:
    doc = _parse_json(text, source)
    bound = _want(doc, "omega_bound", int, source)
    if bound < 0:
        raise StructureError(f"{source}: omega_bound must be a natural number")
    members_doc = _want(doc, "members", list, source)
    members = tuple(
        relation_from_doc(entry, f"{source}.members[{i}]") for i, entry in enumerate(members_doc)
    )
    return members, bound


def _resolve_relation(entry: Any, source: str, base_dir: str) -> FiniteRelation:
    if isinstance(entry, dict) and "path" in entry:
        path = os.path.join(base_dir, entry["path"])
        return parse_relation(_read(path), path)
    return relation_from_doc(entry, f"{source}.target")


def _read(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise StructureError(f"{path}: {exc.strerror or exc}") from exc


def load_relation(path: str) -> FiniteRelation:
    return parse_relation(_read(path), path)


def load_ranking(path: str) -> tuple[tuple[str, ...], PartialRanking]:
    return parse_ranking(_read(path), path)


def load_block(path: str) -> WindowedBlock:
    return parse_block(_read(path), path)


def load_array(
    path: str,
    default_target: FiniteRelation | None = None,
    default_ranking: PartialRanking | None = None,
) -> BlockArray:
    return parse_array(
        _read(path),
        path,
        base_dir=os.path.dirname(path) or ".",
        default_target=default_target,
        default_ranking=default_ranking,
    )


def load_family(path: str) -> tuple[tuple[FiniteRelation, ...], int]:
    return parse_family(_read(path), path)

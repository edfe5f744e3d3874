"""JSON file formats for categories, modules, posets and generator specs."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .category import FiniteCategory
from .cmodule import CModule
from .exactla import FieldSpec
from .freegen import FreeEISpec, generate_category
from .poset import FinitePoset, poset_to_category

__all__ = [
    "MalformedFile",
    "DigestMismatch",
    "load_json",
    "dump_json",
    "category_from_json",
    "category_to_json",
    "category_digest",
    "module_from_json",
    "module_to_json",
    "detect_kind",
    "load_category",
]


class MalformedFile(ValueError):
    pass


class DigestMismatch(ValueError):
    pass


def load_json(path: str | Path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise MalformedFile(f"{path}: {exc}") from None


def dump_json(data: Any, path: str | Path | None = None) -> str:
    text = json.dumps(data, indent=1, sort_keys=False) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def category_from_json(data: Mapping) -> FiniteCategory:
    try:
        objects = [str(o) for o in data["objects"]]
        morphisms = [(str(m["id"]), str(m["src"]), str(m["tgt"])) for m in data["morphisms"]]
        identities = {str(k): str(v) for k, v in data["identities"].items()}
        compose = [tuple(str(x) for x in entry) for entry in data["compose"]]
    except (KeyError, TypeError, AttributeError) as exc:
        raise MalformedFile(f"malformed category: {exc!r}") from None
    if any(len(c) != 3 for c in compose):
        raise MalformedFile("compose entries must be [g, f, g∘f]")
    return FiniteCategory(objects, morphisms, identities, compose)


def category_to_json(cat: FiniteCategory) -> dict:
    T = cat.table
    ids = cat.morphisms
    compose = []
    for f in range(cat.n_morphisms):
        for g in np.flatnonzero(cat.src == cat.tgt[f]):
            gf = T[g, f]
            if gf != cat.undefined:
                compose.append([ids[g], ids[f], ids[gf]])
    return {
        "objects": list(cat.objects),
        "morphisms": [{"id": m, "src": cat.objects[s], "tgt": cat.objects[t]} for m, s, t in zip(ids, cat.src, cat.tgt)],
        "identities": {o: ids[e] for o, e in zip(cat.objects, cat.ident)},
        "compose": compose,
    }


def category_digest(cat: FiniteCategory) -> str:
    """sha256 of the canonical JSON (sorted keys, sorted compose list, no whitespace)."""
    data = category_to_json(cat)
    data["compose"] = sorted(data["compose"])
    text = json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def module_to_json(x: CModule) -> dict:
    cat = x.category
    return {
        "category_digest": category_digest(cat),
        "field": {"p": x.p},
        "dims": {o: int(d) for o, d in zip(cat.objects, x.dims)},
        "action": {m: x.matrix(i).tolist() for i, m in enumerate(cat.morphisms)},
    }


def module_from_json(data: Mapping, cat: FiniteCategory) -> CModule:
    try:
        digest = data["category_digest"]
        p = FieldSpec(int(data["field"]["p"])).p
        dims = {str(k): int(v) for k, v in data["dims"].items()}
        raw = data["action"]
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedFile(f"malformed module: {exc!r}") from None
    if digest != category_digest(cat):
        raise DigestMismatch("module was written for a different category")
    if set(dims) != set(cat.objects) or set(raw) != set(cat.morphisms):
        raise MalformedFile("module must list every object and every morphism")
    action = {}
    for i, m in enumerate(cat.morphisms):
        shape = (dims[cat.objects[cat.tgt[i]]], dims[cat.objects[cat.src[i]]])
        try:
            a = np.array(raw[m], dtype=np.int64)
        except (TypeError, ValueError):
            raise MalformedFile(f"matrix for {m} is not rectangular") from None
        if a.size == 0:
            a = np.zeros(shape, dtype=np.int64) if 0 in shape else a
        if a.shape != shape:
            raise MalformedFile(f"matrix for {m} has shape {a.shape}, expected {shape}")
        if np.any((a < 0) | (a >= p)):
            raise MalformedFile(f"matrix for {m} has entries outside [0, {p})")
        action[m] = a
    return CModule(cat, p, dims, action=action)


def detect_kind(data: Any) -> str:
    if not isinstance(data, Mapping):
        raise MalformedFile("top level must be a JSON object")
    if "compose" in data:
        return "category"
    if "elements" in data:
        return "poset"
    if "groups" in data:
        return "spec"
    raise MalformedFile("not a category, poset or spec file")


def load_category(path: str | Path) -> tuple[str, FiniteCategory, FinitePoset | None]:
    """Read any of the three category-describing formats."""
    data = load_json(path)
    kind = detect_kind(data)
    if kind == "category":
        return kind, category_from_json(data), None
    if kind == "poset":
        p = FinitePoset.from_json(data)
        return kind, poset_to_category(p), p
    return kind, generate_category(FreeEISpec.from_json(data)), None


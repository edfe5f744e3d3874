"""Free EI categories from group-labelled acyclic quivers.

Objects are positions ``1..n`` with a finite group ``G_i`` each.  An arrow
``j -> i`` (``j > i``) carries a ``(G_i, G_j)``-biset ``B_ij`` of
generating morphisms.  Hom sets are the fibre products

    Hom(x_k, x_i) = ⊔_l  B_il ×_{G_l} Hom(x_k, x_l),     Hom(x_k, x_k) = G_k,

built from ``k`` downward, each orbit stored once with every member
pointing at it.  Composition is concatenation followed by a dictionary
lookup of the orbit, so unique factorization holds by construction.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np

from .category import FiniteCategory, GroupTable
from .grouprep import BisetData, coset_action, cyclic_group, direct_product, subgroups, symmetric_group

__all__ = [
    "CapExceeded",
    "InvalidSpec",
    "FreeEISpec",
    "Arrow",
    "Bounds",
    "group_from_spec",
    "biset_from_spec",
    "generate_category",
    "random_spec",
    "default_cap",
    "point_biset_c2",
    "free_biset_c2",
    "chain2",
]

DEFAULT_CAP = 2000


class CapExceeded(ValueError):
    pass


class InvalidSpec(ValueError):
    pass


def default_cap() -> int:
    raw = os.environ.get("EIGPROJ_CAP")
    return int(raw) if raw else DEFAULT_CAP


# -- specs ------------------------------------------------------------------

GroupSpec = Any  # "1" | "C2" | "C3" | "S3" | {"cyclic": n} | {"symmetric": 3} | {"table": [[...]]}
BisetSpec = Any  # {"free": r} | {"point": true} | {"coset": [[a, b], ...]} | {"left": ..., "right": ..., "size": n}


@dataclass(frozen=True)
class Arrow:
    src: int  # position j
    tgt: int  # position i < j
    biset: BisetSpec


@dataclass(frozen=True)
class FreeEISpec:
    groups: tuple
    arrows: tuple[Arrow, ...] = ()
    names: tuple[str, ...] | None = None

    @property
    def n(self) -> int:
        return len(self.groups)

    def to_json(self) -> dict:
        out: dict = {
            "groups": list(self.groups),
            "arrows": [{"src": a.src, "tgt": a.tgt, "biset": a.biset} for a in self.arrows],
        }
        if self.names is not None:
            out["objects"] = list(self.names)
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "FreeEISpec":
        try:
            arrows = tuple(Arrow(int(a["src"]), int(a["tgt"]), a["biset"]) for a in data.get("arrows", []))
            names = tuple(data["objects"]) if "objects" in data else None
            return cls(tuple(data["groups"]), arrows, names)
        except (KeyError, TypeError) as exc:
            raise InvalidSpec(f"malformed spec: {exc}") from None


_NAMED_GROUPS = {"1": ("cyclic", 1), "trivial": ("cyclic", 1), "C2": ("cyclic", 2), "C3": ("cyclic", 3), "S3": ("symmetric", 3)}


def group_from_spec(spec: GroupSpec) -> GroupTable:
    if isinstance(spec, str):
        if spec not in _NAMED_GROUPS:
            raise InvalidSpec(f"unknown group {spec!r}")
        kind, n = _NAMED_GROUPS[spec]
        return cyclic_group(n) if kind == "cyclic" else symmetric_group(n)
    if isinstance(spec, Mapping):
        if "cyclic" in spec:
            return cyclic_group(int(spec["cyclic"]))
        if "symmetric" in spec:
            return symmetric_group(int(spec["symmetric"]))
        if "table" in spec:
            try:
                return GroupTable.from_table(spec["table"])
            except (ValueError, IndexError) as exc:
                raise InvalidSpec(f"group table: {exc}") from None
    raise InvalidSpec(f"unknown group spec {spec!r}")


def biset_from_spec(spec: BisetSpec, gi: GroupTable, gj: GroupTable) -> BisetData:
    """Biset with left ``gi`` and right ``gj`` actions."""
    if not isinstance(spec, Mapping):
        raise InvalidSpec(f"unknown biset spec {spec!r}")
    if "free" in spec:
        r = int(spec["free"])
        if r < 1:
            raise InvalidSpec("free rank must be positive")
        a, s, c = np.meshgrid(np.arange(gi.order), np.arange(r), np.arange(gj.order), indexing="ij")
        a, s, c = a.ravel(), s.ravel(), c.ravel()
        idx = lambda a_, s_, c_: (a_ * r + s_) * gj.order + c_  # noqa: E731
        left = idx(gi.mult[:, a], s[None, :], c[None, :])
        right = idx(a[:, None], s[:, None], gj.mult[c][:, :])
        basis = tuple(zip(a.tolist(), s.tolist(), c.tolist()))
        b = BisetData(basis, gi, gj, left.astype(np.int64), right.astype(np.int64))
    elif "point" in spec:
        b = BisetData(((),), gi, gj, np.zeros((gi.order, 1), dtype=np.int64), np.zeros((1, gj.order), dtype=np.int64))
    elif "coset" in spec:
        # (G_i x G_j)/H with (h, g)·x = h x g^-1
        prod = direct_product(gi, gj)
        try:
            gens = [int(a) * gj.order + int(c) for a, c in spec["coset"]]
        except (TypeError, ValueError):
            raise InvalidSpec("coset generators must be [left, right] pairs") from None
        if any(not 0 <= x < prod.order for x in gens):
            raise InvalidSpec("coset generator out of range")
        h = _generated(prod, gens)
        act = coset_action(prod, h)
        left = act[np.arange(gi.order) * gj.order + gj.unit]
        right = act[gi.unit * gj.order + gj.inverse].T
        b = BisetData(tuple(range(act.shape[1])), gi, gj, left, np.ascontiguousarray(right))
    elif "left" in spec and "right" in spec:
        left = np.asarray(spec["left"], dtype=np.int64)
        right = np.asarray(spec["right"], dtype=np.int64)
        size = int(spec.get("size", left.shape[1] if left.ndim == 2 else 0))
        b = BisetData(tuple(range(size)), gi, gj, left, right)
    else:
        raise InvalidSpec(f"unknown biset spec {spec!r}")
    bad = b.violations()
    if bad:
        raise InvalidSpec(f"invalid biset: {bad[0]}")
    return b


def _generated(g: GroupTable, gens: Sequence[int]) -> frozenset[int]:
    els = {g.unit}
    frontier = [g.unit]
    while frontier:
        nxt = []
        for a in frontier:
            for s in gens:
                b = int(g.mult[a, s])
                if b not in els:
                    els.add(b)
                    nxt.append(b)
        frontier = nxt
    return frozenset(els)


# -- construction -------------------------------------------------------------


@dataclass
class _Hom:
    """``Hom(x_k, x_i)`` as orbit representatives with both group actions."""

    elements: list[tuple[int, int, int]]  # (l, b, m) canonical members
    lookup: dict[tuple[int, int, int], int]
    left: np.ndarray  # [h, e]
    right: np.ndarray  # [e, g]


def generate_category(spec: FreeEISpec, cap: int | None = None) -> FiniteCategory:
    """The free EI category presented by ``spec``; objects in admissible order."""
    cap = default_cap() if cap is None else int(cap)
    n = spec.n
    if n == 0:
        raise InvalidSpec("need at least one object")
    names = list(spec.names) if spec.names is not None else [f"x{i}" for i in range(1, n + 1)]
    if len(names) != n or len(set(names)) != n:
        raise InvalidSpec("object names must be distinct, one per group")
    G = [None] + [group_from_spec(g) for g in spec.groups]
    arrows: dict[tuple[int, int], BisetData] = {}
    for a in spec.arrows:
        if not 1 <= a.tgt < a.src <= n:
            raise InvalidSpec(f"arrow {a.src}->{a.tgt} must go from a higher to a lower position")
        if (a.src, a.tgt) in arrows:
            raise InvalidSpec(f"duplicate arrow {a.src}->{a.tgt}")
        arrows[(a.src, a.tgt)] = biset_from_spec(a.biset, G[a.tgt], G[a.src])

    total = sum(g.order for g in G[1:])
    if total > cap:
        raise CapExceeded(f"{total} morphisms exceed the cap of {cap}")
    homs: dict[tuple[int, int], _Hom] = {}
    for k in range(1, n + 1):
        Gk = G[k]
        ar = np.arange(Gk.order)
        homs[(k, k)] = _Hom([(k, -1, int(g)) for g in ar], {}, Gk.mult.copy(), Gk.mult.copy())
        for i in range(k - 1, 0, -1):
            hom = _build_hom(G, arrows, homs, k, i)
            total += len(hom.elements)
            if total > cap:
                raise CapExceeded(f"more than {cap} morphisms")
            homs[(k, i)] = hom

    # morphism ids, in order of (source position, target position, element)
    mid: dict[tuple[int, int, int], str] = {}
    morphisms = []
    for k in range(1, n + 1):
        for i in range(k, 0, -1):
            for e in range(len(homs[(k, i)].elements)):
                name = f"{names[k - 1]}>{names[i - 1]}#{e}" if i != k else f"{names[k - 1]}#{e}"
                mid[(k, i, e)] = name
                morphisms.append((name, names[k - 1], names[i - 1]))
    identities = {names[k - 1]: mid[(k, k, G[k].unit)] for k in range(1, n + 1)}

    compose = []
    for k in range(1, n + 1):
        for j in range(k, 0, -1):
            for i in range(j, 0, -1):
                for f in range(len(homs[(k, j)].elements)):
                    for a in range(len(homs[(j, i)].elements)):
                        gf = _compose(homs, i, j, k, a, f)
                        compose.append((mid[(j, i, a)], mid[(k, j, f)], mid[(k, i, gf)]))
    return FiniteCategory(names, morphisms, identities, compose)


def _build_hom(G, arrows, homs, k: int, i: int) -> _Hom:
    elements: list[tuple[int, int, int]] = []
    lookup: dict[tuple[int, int, int], int] = {}
    for l in range(i + 1, k + 1):
        B = arrows.get((l, i))
        if B is None:
            continue
        inner = homs[(k, l)]
        Gl = G[l]
        for b in range(B.size):
            for m in range(len(inner.elements)):
                if (l, b, m) in lookup:
                    continue
                idx = len(elements)
                elements.append((l, b, m))
                # (b·g, g^-1·m) ~ (b, m)
                for g in range(Gl.order):
                    lookup[(l, int(B.right_action[b, g]), int(inner.left[Gl.inverse[g], m]))] = idx
    Gi, Gk = G[i], G[k]
    size = len(elements)
    left = np.empty((Gi.order, size), dtype=np.int64)
    right = np.empty((size, Gk.order), dtype=np.int64)
    for e, (l, b, m) in enumerate(elements):
        B = arrows[(l, i)]
        inner = homs[(k, l)]
        for h in range(Gi.order):
            left[h, e] = lookup[(l, int(B.left_action[h, b]), m)]
        for g in range(Gk.order):
            right[e, g] = lookup[(l, b, int(inner.right[m, g]))]
    return _Hom(elements, lookup, left, right)


def _compose(homs, i: int, j: int, k: int, a: int, f: int) -> int:
    """Index of ``a∘f`` for ``a ∈ Hom(x_j, x_i)``, ``f ∈ Hom(x_k, x_j)``."""
    if i == j:
        return int(homs[(k, j)].left[a, f])
    if j == k:
        return int(homs[(j, i)].right[a, f])
    hom = homs[(j, i)]
    l, b, m = hom.elements[a]
    mf = _compose(homs, l, j, k, m, f)
    return homs[(k, i)].lookup[(l, b, mf)]


# -- named examples -----------------------------------------------------------


def point_biset_c2() -> FreeEISpec:
    """``G_1 = 1``, ``G_2 = C_2`` and a single morphism ``x_2 -> x_1``."""
    return FreeEISpec(("1", "C2"), (Arrow(2, 1, {"point": True}),))


def free_biset_c2() -> FreeEISpec:
    """``G_1 = 1``, ``G_2 = C_2`` and ``Hom(x_2, x_1) ≅ C_2`` (right regular)."""
    return FreeEISpec(("1", "C2"), (Arrow(2, 1, {"free": 1}),))


def chain2() -> FreeEISpec:
    return FreeEISpec(("1", "1"), (Arrow(2, 1, {"free": 1}),))


# -- random specs -------------------------------------------------------------


@dataclass(frozen=True)
class Bounds:
    max_objects: int = 4
    groups: tuple[str, ...] = ("1", "C2", "C3", "S3")
    max_biset: int = 12
    arrow_probability: float = 0.6
    free_probability: float = 0.4
    max_morphisms: int = field(default_factory=default_cap)


def random_spec(seed: int, bounds: Bounds = Bounds()) -> FreeEISpec:
    """A spec drawn deterministically from ``seed``; its category fits ``bounds.max_morphisms``.

    Arrows whose addition would push the morphism count over the bound
    are dropped, so the result is always generatable.
    """
    rng = random.Random(seed)
    n = rng.randint(min(2, bounds.max_objects), bounds.max_objects)
    names = [rng.choice(bounds.groups) for _ in range(n)]
    groups = [group_from_spec(g) for g in names]
    arrows: list[Arrow] = []
    for j in range(2, n + 1):
        for i in range(1, j):
            if rng.random() >= bounds.arrow_probability:
                continue
            bspec = _random_biset(rng, groups[i - 1], groups[j - 1], bounds)
            if bspec is None:
                continue
            trial = FreeEISpec(tuple(names), tuple(arrows + [Arrow(j, i, bspec)]))
            try:
                generate_category(trial, cap=bounds.max_morphisms)
            except CapExceeded:
                continue
            arrows.append(Arrow(j, i, bspec))
    return FreeEISpec(tuple(names), tuple(arrows))


def _random_biset(rng: random.Random, gi: GroupTable, gj: GroupTable, bounds: Bounds):
    unit = gi.order * gj.order
    if rng.random() < bounds.free_probability and unit <= bounds.max_biset:
        return {"free": rng.randint(1, bounds.max_biset // unit)}
    prod = direct_product(gi, gj)
    options = [h for h in subgroups(prod) if prod.order // len(h) <= bounds.max_biset]
    if not options:
        return None
    h = sorted(rng.choice(options))
    # a generating set: greedily add elements until the closure is h
    gens: list[int] = []
    closure = _generated(prod, gens)
    for x in h:
        if x not in closure:
            gens.append(x)
            closure = _generated(prod, gens)
    return {"coset": [[x // gj.order, x % gj.order] for x in gens]}

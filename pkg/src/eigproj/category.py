"""Finite categories given by a fully materialized composition table.

Morphism and object ids are opaque strings; internally everything is
re-indexed densely in input order.  Positions handed out by
:func:`admissible_order` are 1-based and follow the triangular convention
``Hom(x_i, x_j) = {}`` for ``i < j``: morphisms run from larger positions to
smaller ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "MalformedCategory",
    "OrderError",
    "Violation",
    "FiniteCategory",
    "GroupTable",
    "validate",
    "is_ei",
    "is_skeletal",
    "admissible_order",
    "aut_group",
    "is_mono",
    "non_mono_witness",
    "all_mono",
    "isomorphisms",
    "unfactorizables",
    "peeling_violation",
    "is_free",
    "ladder_violation",
    "decompositions",
]


class MalformedCategory(ValueError):
    """The input does not even describe a table (unknown ids, duplicates...)."""


class OrderError(ValueError):
    """The nonempty-hom relation has a cycle through distinct objects."""


@dataclass(frozen=True)
class Violation:
    kind: str
    where: tuple[str, ...]

    _LABELS = {
        "identity": "identity has wrong endpoints",
        "missing": "missing composite",
        "extra": "composite given for non-composable pair",
        "conflict": "conflicting composites",
        "endpoint": "endpoint mismatch",
        "left-unit": "left identity law fails",
        "right-unit": "right identity law fails",
        "assoc": "associativity fails",
        "shape": "matrix shape mismatch",
        "functor-identity": "identity does not act as identity",
        "functor": "functoriality fails",
    }

    def __str__(self) -> str:
        return f"{self._LABELS.get(self.kind, self.kind)} at ({','.join(self.where)})"


class FiniteCategory:
    """Objects, morphisms and a total composition table.

    ``compose`` lists triples ``(g, f, g∘f)``.  The table is stored as a
    dense ``(N+1) x (N+1)`` integer array with index ``N`` meaning
    "undefined", so lookups vectorize.
    """

    def __init__(
        self,
        objects: Sequence[str],
        morphisms: Sequence[tuple[str, str, str]],
        identities: Mapping[str, str],
        compose: Iterable[tuple[str, str, str]],
    ):
        self.objects: tuple[str, ...] = tuple(objects)
        if len(set(self.objects)) != len(self.objects):
            raise MalformedCategory("duplicate object id")
        self.obj_index = {o: i for i, o in enumerate(self.objects)}
        self.morphisms: tuple[str, ...] = tuple(m[0] for m in morphisms)
        if len(set(self.morphisms)) != len(self.morphisms):
            raise MalformedCategory("duplicate morphism id")
        self.mor_index = {m: i for i, m in enumerate(self.morphisms)}
        try:
            self.src = np.array([self.obj_index[m[1]] for m in morphisms], dtype=np.int64)
            self.tgt = np.array([self.obj_index[m[2]] for m in morphisms], dtype=np.int64)
        except KeyError as exc:
            raise MalformedCategory(f"morphism refers to unknown object {exc}") from None
        if set(identities) != set(self.objects):
            raise MalformedCategory("identities must list every object exactly once")
        try:
            self.ident = np.array(
                [self.mor_index[identities[o]] for o in self.objects], dtype=np.int64
            )
        except KeyError as exc:
            raise MalformedCategory(f"unknown identity morphism {exc}") from None

        n = len(self.morphisms)
        self.undefined = n
        self.table = np.full((n + 1, n + 1), n, dtype=np.int64)
        self._table_issues: list[Violation] = []
        for g, f, gf in compose:
            try:
                gi, fi, gfi = self.mor_index[g], self.mor_index[f], self.mor_index[gf]
            except KeyError as exc:
                raise MalformedCategory(f"compose entry uses unknown morphism {exc}") from None
            if self.tgt[fi] != self.src[gi]:
                self._table_issues.append(Violation("extra", (g, f)))
                continue
            if self.table[gi, fi] != n and self.table[gi, fi] != gfi:
                self._table_issues.append(Violation("conflict", (g, f)))
                continue
            self.table[gi, fi] = gfi
        self._cache: dict = {}

    # -- basic accessors -------------------------------------------------

    @property
    def n_objects(self) -> int:
        return len(self.objects)

    @property
    def n_morphisms(self) -> int:
        return len(self.morphisms)

    def comp(self, g: int, f: int) -> int:
        """Index of ``g∘f`` (``self.undefined`` when not composable)."""
        return int(self.table[g, f])

    def hom(self, a: int, b: int) -> np.ndarray:
        """Morphism indices ``a -> b`` in input order (object indices)."""
        return self._homs[a][b]

    @cached_property
    def _homs(self) -> list[list[np.ndarray]]:
        k = self.n_objects
        buckets: list[list[list[int]]] = [[[] for _ in range(k)] for _ in range(k)]
        for m in range(self.n_morphisms):
            buckets[self.src[m]][self.tgt[m]].append(m)
        return [[np.array(b, dtype=np.int64) for b in row] for row in buckets]

    @cached_property
    def hom_rank(self) -> np.ndarray:
        """Position of each morphism inside its own hom set (length ``N+1``, -1 for undefined)."""
        rank = np.full(self.n_morphisms + 1, -1, dtype=np.int64)
        for row in self._homs:
            for h in row:
                rank[h] = np.arange(h.size)
        return rank

    def hom_ids(self, a: str, b: str) -> list[str]:
        return [self.morphisms[m] for m in self.hom(self.obj_index[a], self.obj_index[b])]

    @cached_property
    def order(self) -> tuple[str, ...]:
        """Admissible order (cached); see :func:`admissible_order`."""
        return admissible_order(self)

    def position(self, obj: str) -> int:
        return self.order.index(obj) + 1

    def at(self, pos: int) -> int:
        """Object index of the object at 1-based admissible position ``pos``."""
        if not 1 <= pos <= self.n_objects:
            raise IndexError(f"position {pos} out of range 1..{self.n_objects}")
        return self.obj_index[self.order[pos - 1]]

    def hom_pos(self, q: int, t: int) -> np.ndarray:
        """``Hom(x_q, x_t)`` for admissible positions."""
        return self.hom(self.at(q), self.at(t))

    def aut(self, pos: int) -> "GroupTable":
        key = ("aut", pos)
        if key not in self._cache:
            self._cache[key] = aut_group(self, self.order[pos - 1])
        return self._cache[key]

    def __repr__(self) -> str:
        return f"FiniteCategory({self.n_objects} objects, {self.n_morphisms} morphisms)"


# -- validation --------------------------------------------------------


def _ids(cat: FiniteCategory, *ms: int) -> tuple[str, ...]:
    return tuple(cat.morphisms[m] for m in ms)


def validate(cat: FiniteCategory) -> list[Violation]:
    """All violations of the category axioms; empty means valid."""
    out: list[Violation] = list(cat._table_issues)
    T, src, tgt, U = cat.table, cat.src, cat.tgt, cat.undefined
    for x, e in enumerate(cat.ident):
        if src[e] != x or tgt[e] != x:
            out.append(Violation("identity", (cat.objects[x], cat.morphisms[e])))
    n = cat.n_morphisms
    for f in range(n):
        gs = np.flatnonzero(src == tgt[f])
        comps = T[gs, f]
        for g in gs[comps == U]:
            out.append(Violation("missing", _ids(cat, g, f)))
        ok = comps != U
        g_ok, gf_ok = gs[ok], comps[ok]
        bad = (src[gf_ok] != src[f]) | (tgt[gf_ok] != tgt[g_ok])
        for g in g_ok[bad]:
            out.append(Violation("endpoint", _ids(cat, g, f)))
    for f in range(n):
        if T[cat.ident[tgt[f]], f] != f:
            out.append(Violation("left-unit", _ids(cat, f)))
        if T[f, cat.ident[src[f]]] != f:
            out.append(Violation("right-unit", _ids(cat, f)))
    out.extend(_associativity(cat))
    return out


def _associativity(cat: FiniteCategory) -> list[Violation]:
    T, src, tgt = cat.table, cat.src, cat.tgt
    out = []
    by_src = [np.flatnonzero(src == y) for y in range(cat.n_objects)]
    for f in range(cat.n_morphisms):
        gs = by_src[tgt[f]]
        for y in range(cat.n_objects):
            G = gs[tgt[gs] == y]
            H = by_src[y]
            if G.size == 0 or H.size == 0:
                continue
            left = T[np.ix_(H, T[G, f])]
            right = T[T[np.ix_(H, G)], f]
            for a, b in zip(*np.nonzero(left != right)):
                out.append(Violation("assoc", _ids(cat, H[a], G[b], f)))
    return out


# -- isomorphisms, EI, skeletal, order -----------------------------------


def isomorphisms(cat: FiniteCategory) -> np.ndarray:
    """Boolean mask of morphisms with a two-sided inverse."""
    if "iso" in cat._cache:
        return cat._cache["iso"]
    T = cat.table
    iso = np.zeros(cat.n_morphisms, dtype=bool)
    for m in range(cat.n_morphisms):
        x, y = cat.src[m], cat.tgt[m]
        back = cat.hom(y, x)
        if back.size == 0:
            continue
        iso[m] = bool(np.any((T[back, m] == cat.ident[x]) & (T[m, back] == cat.ident[y])))
    cat._cache["iso"] = iso
    return iso


def is_ei(cat: FiniteCategory) -> bool:
    iso = isomorphisms(cat)
    return all(iso[cat.hom(x, x)].all() for x in range(cat.n_objects))


def is_skeletal(cat: FiniteCategory) -> bool:
    iso = isomorphisms(cat)
    return not np.any(iso & (cat.src != cat.tgt))


def admissible_order(cat: FiniteCategory) -> tuple[str, ...]:
    """Objects ordered so that ``Hom(x_i, x_j)`` is empty whenever ``i < j``.

    Stable: repeatedly takes the first remaining object (in input order)
    with no morphism to another remaining object.
    """
    remaining = list(range(cat.n_objects))
    out = []
    while remaining:
        for x in remaining:
            if all(cat.hom(x, y).size == 0 for y in remaining if y != x):
                out.append(x)
                remaining.remove(x)
                break
        else:
            raise OrderError("nonempty-hom relation has a cycle through distinct objects")
    return tuple(cat.objects[x] for x in out)


# -- automorphism groups ------------------------------------------------


@dataclass(frozen=True)
class GroupTable:
    """A finite group on local indices ``0..order-1``.

    ``elements[a]`` is the morphism index realizing local element ``a``
    (or just ``a`` for abstract groups); ``mult[a, b]`` is ``a*b``.
    """

    elements: tuple[int, ...]
    mult: np.ndarray
    unit: int
    inverse: np.ndarray

    @property
    def order(self) -> int:
        return len(self.elements)

    @classmethod
    def from_table(cls, mult) -> "GroupTable":
        mult = np.asarray(mult, dtype=np.int64)
        k = mult.shape[0]
        units = [e for e in range(k) if np.array_equal(mult[e], np.arange(k))]
        if len(units) != 1:
            raise ValueError("multiplication table has no unique left unit")
        e = units[0]
        inverse = np.array([int(np.flatnonzero(mult[a] == e)[0]) for a in range(k)])
        g = cls(tuple(range(k)), mult, e, inverse)
        problems = g.axiom_violations()
        if problems:
            raise ValueError(f"not a group: {problems[0]}")
        return g

    def axiom_violations(self) -> list[str]:
        k, m = self.order, self.mult
        out = []
        if m.shape != (k, k) or m.min(initial=0) < 0 or m.max(initial=0) >= k:
            return ["table is not closed"]
        if not (np.array_equal(m[self.unit], np.arange(k)) and np.array_equal(m[:, self.unit], np.arange(k))):
            out.append("unit law")
        if not np.array_equal(m[np.arange(k), self.inverse], np.full(k, self.unit)):
            out.append("inverse law")
        left = m[m[:, :, None], np.arange(k)[None, None, :]]  # (a*b)*c
        right = m[np.arange(k)[:, None, None], m[None, :, :]]  # a*(b*c)
        if not np.array_equal(left, right):
            out.append("associativity")
        return out


def aut_group(cat: FiniteCategory, obj: str) -> GroupTable:
    """``Aut(obj)`` as a group table; requires the EI condition at ``obj``."""
    x = cat.obj_index[obj]
    els = cat.hom(x, x)
    pos = {int(m): a for a, m in enumerate(els)}
    try:
        mult = np.array([[pos[int(cat.table[a, b])] for b in els] for a in els], dtype=np.int64)
    except KeyError:
        raise ValueError(f"End({obj}) is not closed under composition") from None
    unit = pos[int(cat.ident[x])]
    inverse = []
    for a in range(len(els)):
        inv = np.flatnonzero(mult[a] == unit)
        if inv.size == 0 or mult[inv[0], a] != unit:
            raise ValueError(f"End({obj}) is not a group (EI fails)")
        inverse.append(int(inv[0]))
    return GroupTable(tuple(int(m) for m in els), mult, unit, np.array(inverse, dtype=np.int64))


# -- monomorphisms --------------------------------------------------------


def non_mono_witness(cat: FiniteCategory, f: int) -> tuple[int, int] | None:
    """A pair ``g != g'`` with ``f∘g = f∘g'``, or ``None`` when ``f`` is mono."""
    x = cat.src[f]
    for y in range(cat.n_objects):
        gs = cat.hom(y, x)
        if gs.size < 2:
            continue
        images = cat.table[f, gs]
        seen: dict[int, int] = {}
        for g, im in zip(gs, images):
            if int(im) in seen:
                return seen[int(im)], int(g)
            seen[int(im)] = int(g)
    return None


def is_mono(cat: FiniteCategory, f: int | str) -> bool:
    if isinstance(f, str):
        f = cat.mor_index[f]
    return non_mono_witness(cat, f) is None


def all_mono(cat: FiniteCategory) -> tuple[bool, str | None]:
    """Whether every morphism is mono, with the first non-mono id otherwise."""
    for f in range(cat.n_morphisms):
        if non_mono_witness(cat, f) is not None:
            return False, cat.morphisms[f]
    return True, None


# -- unfactorizables and freeness ------------------------------------------


def unfactorizables(cat: FiniteCategory) -> dict[tuple[str, str], list[str]]:
    """Unfactorizable morphisms grouped by ``(source, target)`` object ids."""
    mask = _unfactorizable_mask(cat)
    out: dict[tuple[str, str], list[str]] = {}
    for m in np.flatnonzero(mask):
        key = (cat.objects[cat.src[m]], cat.objects[cat.tgt[m]])
        out.setdefault(key, []).append(cat.morphisms[m])
    return out


def _unfactorizable_mask(cat: FiniteCategory) -> np.ndarray:
    if "unf" in cat._cache:
        return cat._cache["unf"]
    iso = isomorphisms(cat)
    factorizable = np.zeros(cat.n_morphisms + 1, dtype=bool)
    for z in range(cat.n_objects):
        into = np.flatnonzero((cat.tgt == z) & ~iso)
        out_of = np.flatnonzero((cat.src == z) & ~iso)
        if into.size and out_of.size:
            factorizable[cat.table[np.ix_(out_of, into)].ravel()] = True
    mask = ~iso & ~factorizable[:-1]
    cat._cache["unf"] = mask
    return mask


def unfactorizable_hom(cat: FiniteCategory, a: int, b: int) -> np.ndarray:
    hom = cat.hom(a, b)
    return hom[_unfactorizable_mask(cat)[hom]] if hom.size else hom


def peeling_violation(cat: FiniteCategory):
    """First pair where the peeling map fails to be bijective, else ``None``.

    For positions ``t < q`` the map sends the class of ``(u, b)`` in
    ``Hom0(x_j, x_t) x_{Aut(x_j)} Hom(x_q, x_j)`` (``t < j <= q``) to ``u∘b``.
    The witness is ``(t, q, morphism id, number of preimage classes)``.
    """
    n = cat.n_objects
    T = cat.table
    for t in range(1, n + 1):
        xt = cat.at(t)
        for q in range(t + 1, n + 1):
            target = cat.hom_pos(q, t)
            if target.size == 0:
                continue
            hits = {int(m): 0 for m in target}
            for j in range(t + 1, q + 1):
                xj = cat.at(j)
                U = unfactorizable_hom(cat, xj, xt)
                B = cat.hom_pos(q, j)
                if U.size == 0 or B.size == 0:
                    continue
                G = cat.aut(j)
                g_mor = np.array(G.elements, dtype=np.int64)
                g_inv = g_mor[G.inverse]
                seen: set[tuple[int, int]] = set()
                for u in U:
                    for b in B:
                        if (int(u), int(b)) in seen:
                            continue
                        # orbit {(u∘g^-1, g∘b)}
                        orbit = set(zip(T[u, g_inv].tolist(), T[g_mor, b].tolist()))
                        seen |= orbit
                        hits[int(T[u, b])] += 1
            for m, c in hits.items():
                if c != 1:
                    return (t, q, cat.morphisms[m], c)
    return None


def is_free(cat: FiniteCategory) -> bool:
    return peeling_violation(cat) is None


def decompositions(cat: FiniteCategory) -> dict[int, list[tuple[int, ...]]]:
    """Every decomposition into unfactorizables, keyed by the composite.

    A decomposition ``(a1, ..., am)`` has ``a1`` applied first.
    """
    unf = np.flatnonzero(_unfactorizable_mask(cat))
    out: dict[int, list[tuple[int, ...]]] = {}
    stack = [((int(a),), int(a)) for a in unf]
    while stack:
        path, total = stack.pop()
        out.setdefault(total, []).append(path)
        for a in unf:
            if cat.src[a] == cat.tgt[total]:
                stack.append((path + (int(a),), int(cat.table[a, total])))
    for paths in out.values():
        paths.sort()
    return out


def _ladder_exists(cat: FiniteCategory, top: tuple[int, ...], bottom: tuple[int, ...]) -> bool:
    T = cat.table
    m = len(top)
    if m != len(bottom):
        return False
    if any(cat.tgt[a] != cat.tgt[b] for a, b in zip(top, bottom)):
        return False

    def search(i: int, h_prev: int) -> bool:
        # square i: bottom[i] ∘ h_prev == h_i ∘ top[i]
        lhs = T[bottom[i], h_prev]
        if i == m - 1:
            return lhs == top[i]
        x = cat.tgt[top[i]]
        for h in cat.hom(x, x):
            if T[h, top[i]] == lhs and search(i + 1, int(h)):
                return True
        return False

    return search(0, int(cat.ident[cat.src[top[0]]]))


def ladder_violation(cat: FiniteCategory):
    """Brute-force UFP check straight from the ladder definition.

    Exponential; meant as an oracle for small categories.  Returns
    ``(composite id, decomposition, decomposition)`` or ``None``.
    """
    for total, paths in sorted(decompositions(cat).items()):
        first = paths[0]
        for other in paths[1:]:
            if not _ladder_exists(cat, first, other):
                return (cat.morphisms[total], _ids(cat, *first), _ids(cat, *other))
    return None

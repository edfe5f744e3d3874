"""Finite posets as categories, the combinatorial tensor-closedness criterion, enumeration.

A poset becomes a category with one morphism ``a -> b`` for each ``a <= b``.
Its objects are listed in reverse linear-extension order (maximal elements
first), which is an admissible order, so ``Hom(x_i, x_j)`` is empty for
``i < j``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

import numpy as np

from .category import FiniteCategory
from .gorenstein import POSET, GptVerdict

__all__ = [
    "NotAPartialOrder",
    "FinitePoset",
    "poset_to_category",
    "common_upper_locus",
    "poset_gpt",
    "is_poset_free",
    "decompose_tensor_columns",
    "enumerate_posets",
    "enumerate_posets_naive",
    "chain",
    "antichain",
    "diamond",
    "bowtie",
    "bowtie_with_top",
    "MAX_ENUMERATION",
]

MAX_ENUMERATION = 6


class NotAPartialOrder(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FinitePoset:
    """``leq[a, b]`` says ``elements[a] <= elements[b]``."""

    elements: tuple[str, ...]
    leq: np.ndarray

    def __post_init__(self):
        leq = np.asarray(self.leq, dtype=bool)
        n = len(self.elements)
        if leq.shape != (n, n):
            raise NotAPartialOrder("relation matrix has the wrong shape")
        if len(set(self.elements)) != n:
            raise NotAPartialOrder("duplicate element")
        if not leq.diagonal().all():
            raise NotAPartialOrder("relation is not reflexive")
        if np.any(leq & leq.T & ~np.eye(n, dtype=bool)):
            raise NotAPartialOrder("relation is not antisymmetric")
        if np.any((leq.astype(np.int64) @ leq.astype(np.int64) > 0) & ~leq):
            raise NotAPartialOrder("relation is not transitive")
        leq = leq.copy()
        leq.flags.writeable = False
        object.__setattr__(self, "leq", leq)

    @classmethod
    def from_relations(cls, elements: Sequence[str], relations: Sequence[Sequence[str]]) -> "FinitePoset":
        """Reflexive-transitive closure of ``relations`` (pairs ``a <= b``)."""
        elements = tuple(elements)
        idx = {e: i for i, e in enumerate(elements)}
        n = len(elements)
        leq = np.eye(n, dtype=bool)
        for pair in relations:
            try:
                a, b = pair
                leq[idx[a], idx[b]] = True
            except (KeyError, ValueError):
                raise NotAPartialOrder(f"bad relation {pair!r}") from None
        for k in range(n):
            leq |= leq[:, k : k + 1] & leq[k : k + 1, :]
        return cls(elements, leq)

    @classmethod
    def from_json(cls, data: Mapping) -> "FinitePoset":
        try:
            return cls.from_relations(data["elements"], data.get("relations", []))
        except (KeyError, TypeError) as exc:
            raise NotAPartialOrder(f"malformed poset: {exc}") from None

    def to_json(self) -> dict:
        rel = [[self.elements[a], self.elements[b]] for a, b in zip(*np.nonzero(self.leq)) if a != b]
        return {"elements": list(self.elements), "relations": rel}

    @property
    def n(self) -> int:
        return len(self.elements)

    def index(self, e: str) -> int:
        return self.elements.index(e)

    def less(self) -> np.ndarray:
        return self.leq & ~np.eye(self.n, dtype=bool)

    def covers(self) -> np.ndarray:
        """``cov[a, b]``: ``a < b`` with nothing strictly between."""
        lt = self.less().astype(np.int64)
        return (lt > 0) & ~((lt @ lt) > 0)

    def linear_extension(self) -> list[int]:
        """Minimal elements first, ties broken by element order."""
        lt = self.less()
        remaining = list(range(self.n))
        out: list[int] = []
        while remaining:
            for x in remaining:
                if not any(lt[y, x] for y in remaining):
                    out.append(x)
                    remaining.remove(x)
                    break
        return out

    def admissible(self) -> list[int]:
        return self.linear_extension()[::-1]

    def __eq__(self, other) -> bool:
        return isinstance(other, FinitePoset) and self.elements == other.elements and np.array_equal(self.leq, other.leq)

    def __hash__(self) -> int:
        return hash((self.elements, self.leq.tobytes()))

    def __repr__(self) -> str:
        rel = ", ".join(f"{self.elements[a]}<{self.elements[b]}" for a, b in zip(*np.nonzero(self.covers())))
        return f"FinitePoset({list(self.elements)}; {rel})"


def poset_to_category(p: FinitePoset) -> FiniteCategory:
    order = p.admissible()
    el = p.elements
    objects = [el[i] for i in order]
    pairs = [(a, b) for a in order for b in order if p.leq[a, b]]
    name = {(a, b): f"{el[a]}<={el[b]}" for a, b in pairs}
    morphisms = [(name[a, b], el[a], el[b]) for a, b in pairs]
    identities = {el[a]: name[a, a] for a in order}
    compose = [
        (name[b, c], name[a, b], name[a, c])
        for a, b in pairs
        for c in order
        if p.leq[b, c]
    ]
    return FiniteCategory(objects, morphisms, identities, compose)


def common_upper_locus(p: FinitePoset, a: str, b: str) -> tuple[list[str], list[str]]:
    """``L = {x : a < x, b < x}`` and its minimal elements, both in element order."""
    i, j = p.index(a), p.index(b)
    if p.leq[i, j] or p.leq[j, i]:
        raise ValueError(f"{a} and {b} are comparable")
    lt = p.less()
    locus = np.flatnonzero(lt[i] & lt[j])
    minimal = [x for x in locus if not any(lt[y, x] for y in locus)]
    return [p.elements[x] for x in locus], [p.elements[x] for x in minimal]


def poset_gpt(p: FinitePoset) -> GptVerdict:
    """No two distinct minimal common upper bounds of an incomparable pair may share an upper bound.

    The witness is ``(a, b, s1, s2, x)`` with ``s1, s2`` minimal in
    ``L_{a,b}`` and ``s1 <= x``, ``s2 <= x``.
    """
    el = p.elements
    leq = p.leq
    for i, j in itertools.combinations(range(p.n), 2):
        if leq[i, j] or leq[j, i]:
            continue
        _, minimal = common_upper_locus(p, el[i], el[j])
        for s1, s2 in itertools.combinations([p.index(s) for s in minimal], 2):
            upper = np.flatnonzero(leq[s1] & leq[s2])
            if upper.size:
                return GptVerdict(POSET, False, (el[i], el[j], el[s1], el[s2], el[upper[0]]), None)
    return GptVerdict(POSET, True, None, None)


def is_poset_free(p: FinitePoset) -> bool:
    """For all ``a < b`` exactly one ``d`` with ``a <= d`` covered by ``b``."""
    cov = p.covers()
    lt = p.less()
    for a, b in zip(*np.nonzero(lt)):
        if np.count_nonzero(p.leq[a] & cov[:, b]) != 1:
            return False
    return True


def decompose_tensor_columns(p: FinitePoset, t: int, j: int) -> list[int] | None:
    """Columns ``C_s`` summing to ``C_t ⊗̂ C_j`` by dimension vector, or ``None``.

    ``t`` and ``j`` are 1-based positions in the object order of
    :func:`poset_to_category`; so is the returned (sorted, with
    multiplicity) list.  ``None`` means the unitriangular integer solve has
    a negative coefficient, so the product is not a sum of columns.
    """
    order = p.admissible()
    n = p.n
    a, b = order[t - 1], order[j - 1]
    target = (p.leq[a] & p.leq[b]).astype(np.int64)
    coef = np.zeros(n, dtype=np.int64)
    # solve from minimal elements upward: position n first
    for pos in range(n, 0, -1):
        s = order[pos - 1]
        below = np.array([order[q - 1] for q in range(pos + 1, n + 1)], dtype=np.int64)
        acc = int(np.sum(coef[below] * p.leq[below, s])) if below.size else 0
        coef[s] = target[s] - acc
    if np.any(coef < 0):
        return None
    pos_of = {x: k + 1 for k, x in enumerate(order)}
    return sorted(pos_of[s] for s in range(n) for _ in range(coef[s]))


# -- enumeration --------------------------------------------------------------


def _names(n: int) -> tuple[str, ...]:
    return tuple("abcdefghijklmnopqrstuvwxyz"[:n])


def _masks_to_poset(below: Sequence[int], names: tuple[str, ...]) -> FinitePoset:
    n = len(names)
    leq = np.zeros((n, n), dtype=bool)
    for b in range(n):
        for a in range(n):
            leq[a, b] = bool(below[b] >> a & 1)
    return FinitePoset(names, leq)


def enumerate_posets(n: int) -> Iterator[FinitePoset]:
    """Every partial order on ``n`` labelled elements, exactly once.

    Element ``k`` is added to each poset on ``0..k-1`` with a down-set ``D``
    of elements below it and an up-set ``U`` above it, subject to
    ``D ∩ U = ∅`` and ``d <= u`` for all ``d ∈ D``, ``u ∈ U``.
    """
    if not 0 <= n <= MAX_ENUMERATION:
        raise ValueError(f"enumeration is limited to n <= {MAX_ENUMERATION}")
    names = _names(n)
    # a poset is a tuple of masks: below[b] has bit a set iff a <= b
    level: list[tuple[int, ...]] = [()]
    for k in range(n):
        nxt = []
        for below in level:
            above = [sum(1 << b for b in range(k) if below[b] >> a & 1) for a in range(k)]
            downs = [m for m in range(1 << k) if all(below[x] & ~m == 0 for x in range(k) if m >> x & 1)]
            ups = [m for m in range(1 << k) if all(above[x] & ~m == 0 for x in range(k) if m >> x & 1)]
            for u in ups:
                # elements below every member of u
                common = (1 << k) - 1
                for x in range(k):
                    if u >> x & 1:
                        common &= below[x]
                for d in downs:
                    if d & u or d & ~common:
                        continue
                    new = tuple(below[x] | (d if u >> x & 1 else 0) | ((1 << k) if u >> x & 1 else 0) for x in range(k))
                    nxt.append(new + (d | (1 << k),))
        level = nxt
    for below in level:
        yield _masks_to_poset(below, names)


def enumerate_posets_naive(n: int) -> Iterator[FinitePoset]:
    """All reflexive, antisymmetric, transitive relations by brute force (small ``n`` only)."""
    if n > 4:
        raise ValueError("brute force is limited to n <= 4")
    names = _names(n)
    off = [(a, b) for a in range(n) for b in range(n) if a != b]
    for bits in range(1 << len(off)):
        leq = np.eye(n, dtype=bool)
        for k, (a, b) in enumerate(off):
            if bits >> k & 1:
                leq[a, b] = True
        if np.any(leq & leq.T & ~np.eye(n, dtype=bool)):
            continue
        if np.any((leq.astype(np.int64) @ leq.astype(np.int64) > 0) & ~leq):
            continue
        yield FinitePoset(names, leq)


# -- named posets -------------------------------------------------------------


def chain(n: int) -> FinitePoset:
    names = _names(n)
    return FinitePoset.from_relations(names, list(zip(names, names[1:])))


def antichain(n: int) -> FinitePoset:
    return FinitePoset.from_relations(_names(n), [])


def diamond() -> FinitePoset:
    return FinitePoset.from_relations("acde", [("a", "c"), ("a", "d"), ("c", "e"), ("d", "e")])


def bowtie() -> FinitePoset:
    return FinitePoset.from_relations("abcd", [("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")])


def bowtie_with_top() -> FinitePoset:
    return FinitePoset.from_relations(
        "abcde", [("a", "c"), ("a", "d"), ("b", "c"), ("b", "d"), ("c", "e"), ("d", "e")]
    )

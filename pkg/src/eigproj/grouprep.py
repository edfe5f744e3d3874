"""Group algebras, hom-set bisets and projectivity over kG.

Projectivity of a kG-module V is decided by Higman's criterion: V is
projective iff ``id_V = sum_g g f g^-1`` for some k-linear ``f``.  That is
one linear solve in ``dim(V)^2`` unknowns and works in every
characteristic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import exactla as la
from .category import FiniteCategory, GroupTable

__all__ = [
    "cyclic_group",
    "symmetric_group",
    "direct_product",
    "subgroups",
    "coset_action",
    "BisetData",
    "biset",
    "GroupAlgebraModule",
    "permutation_module",
    "direct_sum",
    "higman_certificate",
    "is_projective_kG",
    "is_projective_permutation",
    "is_category_projective",
    "is_gorenstein",
]


# -- small groups -----------------------------------------------------------


def cyclic_group(n: int) -> GroupTable:
    a = np.arange(n)
    return GroupTable.from_table((a[:, None] + a[None, :]) % n)


def symmetric_group(n: int) -> GroupTable:
    """``S_n`` on permutations in lexicographic order; composition ``(a*b)(i) = a(b(i))``."""
    perms = list(itertools.permutations(range(n)))
    idx = {p: i for i, p in enumerate(perms)}
    mult = [[idx[tuple(a[b[i]] for i in range(n))] for b in perms] for a in perms]
    return GroupTable.from_table(mult)


def direct_product(g: GroupTable, h: GroupTable) -> GroupTable:
    """Element ``(a, b)`` sits at index ``a * |h| + b``."""
    m, n = g.order, h.order
    a = np.arange(m * n)
    ga, hb = a // n, a % n
    mult = g.mult[ga[:, None], ga[None, :]] * n + h.mult[hb[:, None], hb[None, :]]
    return GroupTable.from_table(mult)


def _closure(g: GroupTable, gens) -> frozenset[int]:
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


def subgroups(g: GroupTable) -> list[frozenset[int]]:
    """Subgroups generated by at most two elements, sorted by (size, elements)."""
    found = {_closure(g, (a, b)) for a in range(g.order) for b in range(a, g.order)}
    return sorted(found, key=lambda s: (len(s), sorted(s)))


def coset_action(g: GroupTable, h: frozenset[int]) -> np.ndarray:
    """Left action of ``g`` on the left cosets ``aH``: ``act[x, c]`` is the coset ``x·c``."""
    cosets: list[frozenset[int]] = []
    where: dict[int, int] = {}
    for a in range(g.order):
        if a in where:
            continue
        c = frozenset(int(g.mult[a, s]) for s in h)
        for b in c:
            where[b] = len(cosets)
        cosets.append(c)
    reps = [min(c) for c in cosets]
    return np.array([[where[int(g.mult[x, r])] for r in reps] for x in range(g.order)], dtype=np.int64)


# -- bisets -----------------------------------------------------------------


@dataclass(frozen=True)
class BisetData:
    """A finite set with a left ``left_group`` and a right ``right_group`` action.

    ``left_action[h, b]`` is ``h·b`` and ``right_action[b, g]`` is ``b·g``
    (indices into ``basis``).
    """

    basis: tuple
    left_group: GroupTable
    right_group: GroupTable
    left_action: np.ndarray
    right_action: np.ndarray

    @property
    def size(self) -> int:
        return len(self.basis)

    def violations(self) -> list[str]:
        out = []
        L, R = self.left_group, self.right_group
        la_, ra = self.left_action, self.right_action
        if la_.shape != (L.order, self.size) or ra.shape != (self.size, R.order):
            return ["action tables have the wrong shape"]
        if not np.array_equal(la_[L.unit], np.arange(self.size)):
            out.append("left unit")
        if not np.array_equal(ra[:, R.unit], np.arange(self.size)):
            out.append("right unit")
        # (hk)·b = h·(k·b)
        if not np.array_equal(la_[L.mult], la_[np.arange(L.order)[:, None, None], la_[None, :, :]]):
            out.append("left action is not associative")
        # b·(gk) = (b·g)·k
        if not np.array_equal(ra[:, R.mult], ra[ra[:, :, None], np.arange(R.order)[None, None, :]]):
            out.append("right action is not associative")
        # (h·b)·g = h·(b·g)
        lhs = ra[la_, :]  # [h, b, g]
        rhs = la_[np.arange(L.order)[:, None, None], ra[None, :, :]]
        if not np.array_equal(lhs, rhs):
            out.append("actions do not commute")
        return out


def biset(cat: FiniteCategory, i: int, j: int) -> BisetData:
    """``Hom(x_j, x_i)`` with ``Aut(x_i)`` acting by post- and ``Aut(x_j)`` by pre-composition."""
    hom = cat.hom_pos(j, i)
    pos = {int(m): a for a, m in enumerate(hom)}
    Gi, Gj = cat.aut(i), cat.aut(j)
    T = cat.table
    left = np.array([[pos[int(T[h, b])] for b in hom] for h in Gi.elements], dtype=np.int64)
    right = np.array([[pos[int(T[b, g])] for g in Gj.elements] for b in hom], dtype=np.int64)
    left = left.reshape(Gi.order, len(hom))
    right = right.reshape(len(hom), Gj.order)
    return BisetData(tuple(cat.morphisms[m] for m in hom), Gi, Gj, left, right)


# -- modules over group algebras ------------------------------------------


@dataclass(frozen=True)
class GroupAlgebraModule:
    """A left kG-module: ``action[g]`` is the ``dim x dim`` matrix of ``g``."""

    group: GroupTable
    p: int
    action: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.action.shape[1])

    def violations(self) -> list[str]:
        G, p = self.group, self.p
        out = []
        if not np.array_equal(self.action[G.unit] % p, la.identity(self.dim)):
            out.append("unit does not act as identity")
        for a in range(G.order):
            for b in range(G.order):
                prod = la.matmul(self.action[a], self.action[b], p)
                if not np.array_equal(prod, self.action[G.mult[a, b]] % p):
                    out.append(f"act({a})act({b}) != act({a}*{b})")
        return out


def _perm_matrices(perms: np.ndarray, size: int) -> np.ndarray:
    """``perms[g, b]`` is the image of ``b``; returns 0/1 matrices sending ``e_b`` to ``e_perm``."""
    k = perms.shape[0]
    mats = np.zeros((k, size, size), dtype=np.int64)
    for g in range(k):
        mats[g, perms[g], np.arange(size)] = 1
    return mats


def permutation_module(b: BisetData, side: str, p: int) -> GroupAlgebraModule:
    """Linearize one side of a biset.

    The right action becomes a left action of the same group via
    ``g ↦ (b ↦ b·g^-1)``.
    """
    if side == "left":
        return GroupAlgebraModule(b.left_group, p, _perm_matrices(b.left_action, b.size))
    if side == "right":
        G = b.right_group
        perms = b.right_action[:, G.inverse].T if b.size else np.zeros((G.order, 0), dtype=np.int64)
        return GroupAlgebraModule(G, p, _perm_matrices(perms, b.size))
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def direct_sum(*mods: GroupAlgebraModule) -> GroupAlgebraModule:
    G, p = mods[0].group, mods[0].p
    d = sum(m.dim for m in mods)
    act = np.zeros((G.order, d, d), dtype=np.int64)
    off = 0
    for m in mods:
        act[:, off : off + m.dim, off : off + m.dim] = m.action
        off += m.dim
    return GroupAlgebraModule(G, p, act)


def higman_certificate(m: GroupAlgebraModule) -> np.ndarray | None:
    """Some ``f`` with ``sum_g g f g^-1 = id``, or ``None`` if there is none."""
    G, p, d = m.group, m.p, m.dim
    if d == 0:
        return np.zeros((0, 0), dtype=np.int64)
    # row-major vec(A f B) = (A ⊗ B^T) vec(f)
    trace = np.zeros((d * d, d * d), dtype=np.int64)
    for g in range(G.order):
        trace = (trace + np.kron(m.action[g], m.action[G.inverse[g]].T)) % p
    x = la.solve(trace, la.identity(d).reshape(-1), p)
    return None if x is None else x.reshape(d, d)


def is_projective_kG(m: GroupAlgebraModule) -> bool:
    return higman_certificate(m) is not None


@lru_cache(maxsize=4096)
def _transitive_projective(order: int, mult: bytes, inverse: bytes, unit: int, perms: bytes, size: int, p: int) -> bool:
    G = GroupTable(
        tuple(range(order)),
        np.frombuffer(mult, dtype=np.int64).reshape(order, order),
        unit,
        np.frombuffer(inverse, dtype=np.int64),
    )
    act = np.frombuffer(perms, dtype=np.int64).reshape(order, size)
    return is_projective_kG(GroupAlgebraModule(G, p, _perm_matrices(act, size)))


def is_projective_permutation(G: GroupTable, perms: np.ndarray, p: int) -> bool:
    """Projectivity of the permutation module of a left G-set, one orbit at a time.

    ``perms[g, b]`` is ``g·b``.  A direct sum is projective iff every summand
    is, so each transitive piece gets its own (small) Higman solve.
    """
    size = perms.shape[1]
    seen = np.zeros(size, dtype=bool)
    for b in range(size):
        if seen[b]:
            continue
        orbit = sorted(set(perms[:, b].tolist()))
        seen[orbit] = True
        relabel = {x: i for i, x in enumerate(orbit)}
        sub = np.array([[relabel[int(perms[g, x])] for x in orbit] for g in range(G.order)], dtype=np.int64)
        ok = _transitive_projective(
            G.order, np.ascontiguousarray(G.mult, dtype=np.int64).tobytes(),
            np.ascontiguousarray(G.inverse, dtype=np.int64).tobytes(), G.unit,
            sub.tobytes(), len(orbit), p,
        )
        if not ok:
            return False
    return True


def is_category_projective(cat: FiniteCategory, p: int) -> tuple[bool, tuple[int, int, str] | None]:
    """Whether every ``kHom(x_j, x_i)`` is projective on both sides.

    Returns ``(verdict, witness)`` with witness ``(i, j, side)`` in
    admissible positions for the first failing bimodule.
    """
    key = ("projective", p)
    if key in cat._cache:
        return cat._cache[key]
    n = cat.n_objects
    result: tuple[bool, tuple[int, int, str] | None] = (True, None)
    for i, j in itertools.combinations(range(1, n + 1), 2):
        if cat.hom_pos(j, i).size == 0:
            continue
        b = biset(cat, i, j)
        if not is_projective_permutation(b.left_group, b.left_action, p):
            result = (False, (i, j, "left"))
            break
        right_as_left = b.right_action[:, b.right_group.inverse].T
        if not is_projective_permutation(b.right_group, right_as_left, p):
            result = (False, (i, j, "right"))
            break
    cat._cache[key] = result
    return result


def is_gorenstein(cat: FiniteCategory, p: int) -> bool:
    """The category algebra over F_p is Gorenstein exactly when the category is projective."""
    return is_category_projective(cat, p)[0]

"""Modules over a category algebra, stored as functors into F_p-vector spaces.

A :class:`CModule` gives a dimension per object and a matrix per morphism
(multiplying column vectors, ``action(g∘f) = action(g)·action(f)``).  When
every action matrix sends basis vectors to basis vectors the module may be
stored as integer basis maps instead; column modules and their pointwise
tensor products are of this kind, and quotients built from them reduce to
connected components rather than dense row reduction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import exactla as la
from .category import FiniteCategory, Violation
from .grouprep import BisetData, GroupAlgebraModule, biset, is_projective_kG, is_projective_permutation, permutation_module

__all__ = [
    "CModule",
    "TailRow",
    "validate_module",
    "column_module",
    "trivial_module",
    "zero_module",
    "tensor_hat",
    "direct_sum",
    "swap_isomorphism",
    "restrict_to_aut",
    "tensor_over_group_algebra",
    "tensor_over_tail",
    "tail_row",
    "free_cover",
    "is_projective",
    "is_projective_by_tops",
]


class CModule:
    """A functor from ``category`` to finite-dimensional F_p-spaces.

    Pass exactly one of ``action`` (morphism id -> matrix) or ``maps``
    (morphism id -> integer array, the image index of each basis vector).
    """

    def __init__(
        self,
        category: FiniteCategory,
        p: int,
        dims: Mapping[str, int] | Sequence[int],
        action: Mapping[str, np.ndarray] | Sequence[np.ndarray] | None = None,
        maps: Mapping[str, np.ndarray] | Sequence[np.ndarray] | None = None,
    ):
        if (action is None) == (maps is None):
            raise ValueError("give exactly one of action= or maps=")
        self.category = category
        self.p = int(p)
        cat = category
        if isinstance(dims, Mapping):
            self.dims = np.array([int(dims[o]) for o in cat.objects], dtype=np.int64)
        else:
            self.dims = np.array(dims, dtype=np.int64)
        if self.dims.shape != (cat.n_objects,) or np.any(self.dims < 0):
            raise ValueError("dims must give a nonnegative count for every object")

        def per_morphism(data):
            if isinstance(data, Mapping):
                return [data[m] for m in cat.morphisms]
            data = list(data)
            if len(data) != cat.n_morphisms:
                raise ValueError("need one entry per morphism")
            return data

        self._dense: list[np.ndarray] | None = None
        self._maps: list[np.ndarray] | None = None
        if action is not None:
            mats = []
            for m, a in zip(range(cat.n_morphisms), per_morphism(action)):
                shape = (self.dims[cat.tgt[m]], self.dims[cat.src[m]])
                a = np.asarray(a, dtype=np.int64)
                if a.size == 0 and 0 in shape:
                    a = np.zeros(shape, dtype=np.int64)
                mats.append(np.mod(a, self.p))
            self._dense = mats
        else:
            self._maps = [np.asarray(a, dtype=np.int64).reshape(-1) for a in per_morphism(maps)]
        self._set_maps_cache: list[np.ndarray] | None | bool = False

    # -- access ----------------------------------------------------------

    def dim(self, obj: str) -> int:
        return int(self.dims[self.category.obj_index[obj]])

    def dim_at(self, pos: int) -> int:
        return int(self.dims[self.category.at(pos)])

    def matrix(self, m: int | str) -> np.ndarray:
        cat = self.category
        if isinstance(m, str):
            m = cat.mor_index[m]
        if self._dense is not None:
            return self._dense[m]
        rows, cols = self.dims[cat.tgt[m]], self.dims[cat.src[m]]
        mat = np.zeros((rows, cols), dtype=np.int64)
        mat[self._maps[m], np.arange(cols)] = 1
        return mat

    @property
    def action(self) -> dict[str, np.ndarray]:
        return {mid: self.matrix(i) for i, mid in enumerate(self.category.morphisms)}

    @property
    def maps(self) -> list[np.ndarray] | None:
        """Basis maps when every action matrix is a 0/1 function matrix, else ``None``."""
        if self._maps is not None:
            return self._maps
        if self._set_maps_cache is False:
            self._set_maps_cache = _detect_maps(self._dense)
        return self._set_maps_cache

    @property
    def is_set_module(self) -> bool:
        return self.maps is not None

    def image_vector(self, m: int, v: np.ndarray) -> np.ndarray:
        if self._maps is not None:
            out = np.zeros(self.dims[self.category.tgt[m]], dtype=np.int64)
            np.add.at(out, self._maps[m], v)
            return out % self.p
        return la.matmul(self.matrix(m), v, self.p)

    def __repr__(self) -> str:
        return f"CModule(p={self.p}, dims={dict(zip(self.category.objects, self.dims.tolist()))})"


def _detect_maps(mats: list[np.ndarray]) -> list[np.ndarray] | None:
    out = []
    for a in mats:
        if a.shape[1] == 0:
            out.append(np.zeros(0, dtype=np.int64))
            continue
        if a.shape[0] == 0:
            return None
        if not (np.all((a == 0) | (a == 1)) and np.all(a.sum(axis=0) == 1)):
            return None
        out.append(np.argmax(a, axis=0).astype(np.int64))
    return out


def validate_module(x: CModule) -> list[Violation]:
    """Shape and functoriality violations; empty means ``x`` is a module."""
    cat, p = x.category, x.p
    ids = cat.morphisms
    out: list[Violation] = []
    for m in range(cat.n_morphisms):
        rows, cols = x.dims[cat.tgt[m]], x.dims[cat.src[m]]
        if x._maps is not None:
            a = x._maps[m]
            if a.shape != (cols,) or (a.size and (a.min() < 0 or a.max() >= rows)):
                out.append(Violation("shape", (ids[m],)))
        elif x._dense[m].shape != (rows, cols):
            out.append(Violation("shape", (ids[m],)))
    if out:
        return out
    for obj, e in enumerate(cat.ident):
        if not np.array_equal(x.matrix(int(e)), la.identity(x.dims[obj])):
            out.append(Violation("functor-identity", (ids[e],)))
    maps = x.maps
    T = cat.table
    for f in range(cat.n_morphisms):
        gs = np.flatnonzero(cat.src == cat.tgt[f])
        for g in gs:
            gf = T[g, f]
            if gf == cat.undefined:
                continue
            if maps is not None:
                ok = np.array_equal(maps[gf], maps[g][maps[f]])
            else:
                ok = np.array_equal(x.matrix(int(gf)), la.matmul(x.matrix(int(g)), x.matrix(f), p))
            if not ok:
                out.append(Violation("functor", (ids[g], ids[f])))
    return out


# -- constructions ------------------------------------------------------------


def column_module(cat: FiniteCategory, p: int, q: int) -> CModule:
    """``C_q = kHom(x_q, -)``; basis at ``x`` is ``Hom(x_q, x)`` in input order."""
    xq = cat.at(q)
    dims = [cat.hom(xq, x).size for x in range(cat.n_objects)]
    T, rank = cat.table, cat.hom_rank
    maps = []
    for f in range(cat.n_morphisms):
        basis = cat.hom(xq, cat.src[f])
        maps.append(rank[T[f, basis]] if basis.size else np.zeros(0, dtype=np.int64))
    return CModule(cat, p, dims, maps=maps)


def trivial_module(cat: FiniteCategory, p: int) -> CModule:
    """The constant functor ``k``, unit of the pointwise tensor product."""
    return CModule(cat, p, [1] * cat.n_objects, maps=[np.zeros(1, dtype=np.int64)] * cat.n_morphisms)


def zero_module(cat: FiniteCategory, p: int) -> CModule:
    return CModule(cat, p, [0] * cat.n_objects, maps=[np.zeros(0, dtype=np.int64)] * cat.n_morphisms)


def _check_compatible(*mods: CModule) -> None:
    cat, p = mods[0].category, mods[0].p
    for m in mods[1:]:
        if m.category is not cat or m.p != p:
            raise ValueError("modules live over different categories or fields")


def tensor_hat(x: CModule, y: CModule) -> CModule:
    """Pointwise tensor product with the diagonal action (Kronecker, ``x`` outermost)."""
    _check_compatible(x, y)
    cat = x.category
    dims = x.dims * y.dims
    mx, my = x.maps, y.maps
    if mx is not None and my is not None:
        maps = []
        for m in range(cat.n_morphisms):
            dy_tgt = y.dims[cat.tgt[m]]
            maps.append((mx[m][:, None] * dy_tgt + my[m][None, :]).reshape(-1))
        return CModule(cat, x.p, dims, maps=maps)
    action = [la.kronecker(x.matrix(m), y.matrix(m), x.p) for m in range(cat.n_morphisms)]
    return CModule(cat, x.p, dims, action=action)


def direct_sum(*mods: CModule) -> CModule:
    _check_compatible(*mods)
    cat, p = mods[0].category, mods[0].p
    dims = sum(m.dims for m in mods)
    if all(m.maps is not None for m in mods):
        maps = []
        for f in range(cat.n_morphisms):
            parts, off = [], 0
            for m in mods:
                parts.append(m.maps[f] + off)
                off += m.dims[cat.tgt[f]]
            maps.append(np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64))
        return CModule(cat, p, dims, maps=maps)
    action = []
    for f in range(cat.n_morphisms):
        mat = np.zeros((dims[cat.tgt[f]], dims[cat.src[f]]), dtype=np.int64)
        r = c = 0
        for m in mods:
            a = m.matrix(f)
            mat[r : r + a.shape[0], c : c + a.shape[1]] = a
            r, c = r + a.shape[0], c + a.shape[1]
        action.append(mat)
    return CModule(cat, p, dims, action=action)


def swap_isomorphism(x: CModule, y: CModule) -> dict[str, np.ndarray]:
    """Perfect-shuffle permutation ``X(o)⊗Y(o) -> Y(o)⊗X(o)`` at every object."""
    out = {}
    for o, (dx, dy) in zip(x.category.objects, zip(x.dims, y.dims)):
        perm = np.zeros((dx * dy, dx * dy), dtype=np.int64)
        a, b = np.meshgrid(np.arange(dx), np.arange(dy), indexing="ij")
        perm[(b * dx + a).ravel(), (a * dy + b).ravel()] = 1
        out[o] = perm
    return out


def restrict_to_aut(x: CModule, pos: int) -> GroupAlgebraModule:
    """``X(x_pos)`` as a module over ``kAut(x_pos)``."""
    G = x.category.aut(pos)
    d = x.dim_at(pos)
    act = np.array([x.matrix(g) for g in G.elements], dtype=np.int64).reshape(G.order, d, d)
    return GroupAlgebraModule(G, x.p, act)


# -- tensor products over subalgebras ---------------------------------------


def tensor_over_group_algebra(right: BisetData | GroupAlgebraModule, left: GroupAlgebraModule) -> la.QuotientSpace:
    """``right ⊗_kG left`` as a quotient of the plain tensor product.

    ``right`` is a biset (its right action is used) or a right module given
    in the transported form ``g ↦ (m ↦ m·g^-1)``.  Relations are
    ``(m·g)⊗v - m⊗(g·v)`` for every basis pair and every group element.
    """
    p = left.p
    if isinstance(right, BisetData):
        right = permutation_module(right, "right", p)
    if right.group.order != left.group.order or not np.array_equal(right.group.mult, left.group.mult):
        raise ValueError("modules are over different groups")
    G = left.group
    dm, dv = right.dim, left.dim
    blocks = []
    for g in range(G.order):
        # column (m, v) of kron(R(g^-1), I) - kron(I, L(g)) is the relation for m ⊗ v
        rel = la.kronecker(right.action[G.inverse[g]], la.identity(dv), p) - la.kronecker(la.identity(dm), left.action[g], p)
        blocks.append(rel.T % p)
    rels = np.concatenate(blocks) if blocks else np.zeros((0, dm * dv), dtype=np.int64)
    return la.quotient_by(dm * dv, rels, p)


@dataclass
class TailRow:
    """A balanced tensor product mapping into ``X(x_target)``.

    ``pairs`` lists the ambient basis in order: ``(position j, morphism id,
    basis index of X_j)``.  ``induced_map`` is the map from quotient
    coordinates into ``X(x_target)``; it is checked to kill every relation.
    """

    target: int
    pairs: list[tuple[int, str, int]] = field(repr=False)
    quotient: la.QuotientSpace
    induced_map: np.ndarray = field(repr=False)
    rank: int
    method: str

    @property
    def t(self) -> int:
        return self.target

    @property
    def quotient_dim(self) -> int:
        return self.quotient.quotient_dim

    @property
    def injective(self) -> bool:
        return self.rank == self.quotient_dim


def tail_row(
    x: CModule,
    target: int,
    blocks: dict[int, np.ndarray],
    relation_pairs: Sequence[tuple[int, int]],
    method: str = "auto",
) -> TailRow:
    """Quotient of ``⊕_j kA_j ⊗ X_j`` (``A_j ⊆ Hom(x_j, x_target)``) and its map to ``X_target``.

    For every ``(l, j)`` in ``relation_pairs``, every ``a ∈ A_l`` and
    ``b ∈ Hom(x_j, x_l)`` the relation ``(a∘b)⊗e - a⊗X(b)e`` is imposed;
    ``a∘b`` must lie in ``A_j``.  The class of ``a⊗e`` maps to ``X(a)e``.
    """
    cat, p = x.category, x.p
    if method == "auto":
        method = "set" if x.maps is not None else "dense"
    if method not in ("set", "dense"):
        raise ValueError(f"unknown method {method!r}")
    maps = x.maps if method == "set" else None
    if method == "set" and maps is None:
        raise ValueError("set method needs a module given by basis maps")
    T = cat.table
    js = sorted(blocks)
    d = {j: x.dim_at(j) for j in js}
    dt = x.dim_at(target)
    offset, where, pairs = {}, {}, []
    total = 0
    for j in js:
        offset[j] = total
        lookup = np.full(cat.n_morphisms + 1, -1, dtype=np.int64)
        lookup[blocks[j]] = np.arange(blocks[j].size)
        where[j] = lookup
        for a in blocks[j]:
            pairs.extend((j, cat.morphisms[a], e) for e in range(d[j]))
        total += blocks[j].size * d[j]

    lefts, rights, dense_rows = [], [], []
    for l, j in relation_pairs:
        A = blocks[l]
        if A.size == 0 or d[j] == 0:
            continue
        for b in cat.hom_pos(j, l):
            ab = where[j][T[A, b]]
            if np.any(ab < 0):
                raise ValueError("relation leaves the chosen summands")
            lhs = offset[j] + ab[:, None] * d[j] + np.arange(d[j])[None, :]
            if method == "set":
                rhs = offset[l] + np.arange(A.size)[:, None] * d[l] + maps[b][None, :]
                lefts.append(lhs.ravel())
                rights.append(rhs.ravel())
            else:
                xb_t = x.matrix(int(b)).T
                for k in range(A.size):
                    rows = np.zeros((d[j], total), dtype=np.int64)
                    rows[np.arange(d[j]), lhs[k]] = 1
                    lo = offset[l] + k * d[l]
                    rows[:, lo : lo + d[l]] = (rows[:, lo : lo + d[l]] - xb_t) % p
                    dense_rows.append(rows)

    if method == "set":
        left = np.concatenate(lefts) if lefts else np.zeros(0, dtype=np.int64)
        right = np.concatenate(rights) if rights else np.zeros(0, dtype=np.int64)
        quotient = la.identify(total, left, right, p)
        image = np.empty(total, dtype=np.int64)
        for j in js:
            for k, a in enumerate(blocks[j]):
                lo = offset[j] + k * d[j]
                image[lo : lo + d[j]] = maps[a]
        reps = quotient.representatives
        if not np.array_equal(image, image[reps][quotient.labels]):
            raise ArithmeticError("induced map is not well defined on the quotient")
        induced = np.zeros((dt, reps.size), dtype=np.int64)
        induced[image[reps], np.arange(reps.size)] = 1
        rank = int(np.unique(image[reps]).size)
    else:
        rels = np.concatenate(dense_rows) if dense_rows else np.zeros((0, total), dtype=np.int64)
        quotient = la.quotient_by(total, rels, p)
        ambient = np.zeros((dt, total), dtype=np.int64)
        for j in js:
            for k, a in enumerate(blocks[j]):
                lo = offset[j] + k * d[j]
                ambient[:, lo : lo + d[j]] = x.matrix(int(a))
        if quotient.relation_basis.shape[0] and np.any(la.matmul(ambient, quotient.relation_basis.T, p)):
            raise ArithmeticError("induced map is not well defined on the quotient")
        induced = la.matmul(ambient, quotient.section, p)
        rank = la.rank(induced, p) if induced.size else 0
    return TailRow(target, pairs, quotient, induced, rank, method)


def tensor_over_tail(x: CModule, t: int, method: str = "auto") -> TailRow:
    """``M_t** ⊗ (X_{t+1}, ..., X_n)`` over the tail algebra and its map into ``X_t``.

    The ambient space is ``⊕_{j>t} kHom(x_j, x_t) ⊗ X_j``; relations run over
    every ``t < l <= j <= n`` (automorphisms included at ``l = j``).
    """
    n = x.category.n_objects
    if not 1 <= t <= n - 1:
        raise IndexError(f"cut index {t} out of range 1..{n - 1}")
    cat = x.category
    blocks = {j: cat.hom_pos(j, t) for j in range(t + 1, n + 1)}
    pairs = [(l, j) for l in range(t + 1, n + 1) for j in range(l, n + 1)]
    return tail_row(x, t, blocks, pairs, method)


# -- projectivity -------------------------------------------------------------

# dense retraction systems with more entries than this are not built
RETRACTION_BUDGET = 20_000_000


def _span_rows(rows: list[np.ndarray], dim: int, p: int) -> np.ndarray:
    if not rows:
        return np.zeros((0, dim), dtype=np.int64)
    return la.rref(np.array(rows, dtype=np.int64).reshape(-1, dim), p)[0]


def _cover_generators(x: CModule, reduced: bool) -> list[tuple[int, np.ndarray]]:
    """``(position, vector)`` pairs whose column modules cover ``x``.

    The full cover uses every basis vector.  The reduced one picks, from
    position ``n`` down, standard basis vectors outside the span of images
    from higher positions plus the ``Aut``-span of earlier picks.
    """
    cat, p = x.category, x.p
    n = cat.n_objects
    maps = x.maps
    gens: list[tuple[int, np.ndarray]] = []
    for i in range(n, 0, -1):
        d = x.dim_at(i)
        if d == 0:
            continue
        basis = la.identity(d)
        if not reduced:
            gens.extend((i, basis[k]) for k in range(d))
            continue
        above = [int(a) for j in range(i + 1, n + 1) for a in cat.hom_pos(j, i)]
        auts = cat.aut(i).elements
        if maps is not None:
            # spans of basis vectors are coordinate subspaces
            covered = np.zeros(d, dtype=bool)
            for a in above:
                covered[maps[a]] = True
            for k in np.flatnonzero(~covered):
                if covered[k]:
                    continue
                covered[[int(maps[g][k]) for g in auts]] = True
                gens.append((i, basis[k]))
            continue
        span = _Echelon(d, p)
        for a in above:
            for col in x.matrix(a).T:
                span.add(col)
        for k in range(d):
            if span.rank == d:
                break
            if not span.add(basis[k]):
                continue
            for g in auts:
                span.add(x.image_vector(g, basis[k]))
            gens.append((i, basis[k]))
    gens.sort(key=lambda g: g[0])
    return gens


class _Echelon:
    """Incrementally grown row-echelon basis of a subspace of ``F_p^d``."""

    def __init__(self, d: int, p: int):
        self.p = p
        self.rows = np.zeros((0, d), dtype=np.int64)
        self.pivots: list[int] = []

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def add(self, v: np.ndarray) -> bool:
        """Add ``v``; return whether the span grew."""
        p = self.p
        v = np.mod(v, p)
        for row, c in zip(self.rows, self.pivots):
            if v[c]:
                v = (v - v[c] * row) % p
        nz = np.flatnonzero(v)
        if nz.size == 0:
            return False
        c = int(nz[0])
        v = (v * pow(int(v[c]), p - 2, p)) % p
        self.rows = np.vstack([self.rows, v])
        self.pivots.append(c)
        return True


def _cover(x: CModule, gens: list[tuple[int, np.ndarray]]) -> tuple[CModule, list[np.ndarray]]:
    cat, p = x.category, x.p
    cols = {}
    summands = []
    for i, _ in gens:
        if i not in cols:
            cols[i] = column_module(cat, p, i)
        summands.append(cols[i])
    cover = direct_sum(*summands) if summands else zero_module(cat, p)
    epi = []
    for y in range(cat.n_objects):
        blocks = []
        for i, v in gens:
            hom = cat.hom(cat.at(i), y)
            blocks.extend(x.image_vector(int(b), v) for b in hom)
        mat = np.array(blocks, dtype=np.int64).T if blocks else np.zeros((x.dims[y], 0), dtype=np.int64)
        epi.append(mat.reshape(x.dims[y], cover.dims[y]))
    return cover, epi


def free_cover(x: CModule, reduced: bool = False) -> tuple[CModule, dict[str, np.ndarray]]:
    """A sum of column modules with a natural surjection onto ``x``.

    ``reduced=False`` gives ``⊕_i C_i^{dim X(x_i)}``; ``reduced=True`` uses
    the smaller generator set from the retraction test.
    """
    cover, epi = _cover(x, _cover_generators(x, reduced))
    return cover, dict(zip(x.category.objects, epi))


def _retraction_size(x: CModule, gens: list[tuple[int, np.ndarray]]) -> int:
    """Entries of the dense retraction system for this cover."""
    cat = x.category
    cover_dims = np.zeros(cat.n_objects, dtype=np.int64)
    for i, _ in gens:
        xi = cat.at(i)
        cover_dims += [cat.hom(xi, y).size for y in range(cat.n_objects)]
    kdim = cover_dims - x.dims
    unknowns = sum(int(kdim[cat.at(i)]) for i, _ in gens)
    return unknowns * int(np.sum(kdim * kdim))


def is_projective(x: CModule, reduced: bool = True, budget: int | None = RETRACTION_BUDGET) -> bool:
    """Whether ``x`` is projective, via a natural retraction of its free cover.

    With ``P -> X`` the cover and ``K`` its pointwise kernel, ``x`` is
    projective iff some natural ``r: P -> K`` restricts to the identity on
    ``K``.  ``P`` is a sum of column modules, so by Yoneda ``r`` is fixed by
    one vector of ``K(x_i)`` per summand ``C_i``; the condition
    ``r∘incl = id`` is then a single linear system.

    That system has about ``dim(K)^3`` entries.  When it would exceed
    ``budget`` entries the decision goes to :func:`is_projective_by_tops`
    instead; ``budget=None`` always solves the system.
    """
    cat, p = x.category, x.p
    gens = _cover_generators(x, reduced)
    if budget is not None and _retraction_size(x, gens) > budget:
        return is_projective_by_tops(x)
    cover, epi = _cover(x, gens)
    pmaps = cover.maps
    kbasis, kfree = [], []
    for y in range(cat.n_objects):
        if epi[y].shape[1] == 0:
            kbasis.append(np.zeros((0, 0), dtype=np.int64))
            kfree.append([])
            continue
        if la.rank(epi[y], p) != x.dims[y]:
            raise ArithmeticError("cover is not surjective")
        rows, free = la.kernel_basis(epi[y], p)
        kbasis.append(rows.T)
        kfree.append(free)
    kdim = [b.shape[1] for b in kbasis]
    if sum(kdim) == 0:
        return True

    k_cache: dict[int, np.ndarray] = {}

    # K(b) for b: x_i -> y, i a summand position; checked to land in K(y)
    def k_action(b: int) -> np.ndarray:
        if b in k_cache:
            return k_cache[b]
        s, t = cat.src[b], cat.tgt[b]
        moved = np.zeros((cover.dims[t], kdim[s]), dtype=np.int64)
        if kdim[s]:
            np.add.at(moved, pmaps[b], kbasis[s])
        moved %= p
        coords = moved[kfree[t], :]
        back = la.matmul(kbasis[t], coords, p) if kdim[t] else np.zeros_like(moved)
        if not np.array_equal(back, moved):
            raise ArithmeticError("kernel is not a submodule")
        k_cache[b] = coords
        return coords

    unknown_at, n_unknowns = [], 0
    for i, _ in gens:
        unknown_at.append(n_unknowns)
        n_unknowns += kdim[cat.at(i)]
    row_blocks, rhs_blocks = [], []
    for y in range(cat.n_objects):
        ky = kdim[y]
        if ky == 0:
            continue
        block = np.zeros((ky * ky, n_unknowns), dtype=np.int64)
        row = 0
        for s, (i, _) in enumerate(gens):
            xi = cat.at(i)
            hom = cat.hom(xi, y)
            ki = kdim[xi]
            if hom.size and ki:
                weights = kbasis[y][row : row + hom.size, :]  # (|hom|, ky)
                stack = np.array([k_action(int(b)) for b in hom])  # (|hom|, ky, ki)
                coef = np.einsum("hb,hcd->bcd", weights, stack) % p
                block[:, unknown_at[s] : unknown_at[s] + ki] = coef.reshape(ky * ky, ki)
            row += hom.size
        row_blocks.append(block)
        rhs_blocks.append(la.identity(ky).reshape(-1))
    system = np.concatenate(row_blocks)
    rhs = np.concatenate(rhs_blocks)
    return la.solve(system, rhs, p) is not None


def is_projective_by_tops(x: CModule) -> bool:
    """Projectivity from tops: ``X ≅ ⊕_i C_i ⊗_{R_i} T_i`` with every ``T_i`` projective.

    ``T_i`` is ``X(x_i)`` modulo images from higher positions.  Independent
    of the retraction test; used to cross-check it.
    """
    if x.maps is not None:
        return _tops_of_set_module(x)
    cat, p = x.category, x.p
    n = cat.n_objects
    expected = np.zeros(cat.n_objects, dtype=np.int64)
    for i in range(1, n + 1):
        d = x.dim_at(i)
        if d == 0:
            continue
        images = []
        for j in range(i + 1, n + 1):
            for a in cat.hom_pos(j, i):
                images.extend(x.matrix(int(a)).T)
        q = la.quotient_by(d, _span_rows(images, d, p), p)
        if q.quotient_dim == 0:
            continue
        G = cat.aut(i)
        act = np.array([la.matmul(la.matmul(q.projection, x.matrix(g), p), q.section, p) for g in G.elements])
        top = GroupAlgebraModule(G, p, act.reshape(G.order, q.quotient_dim, q.quotient_dim))
        if not is_projective_kG(top):
            return False
        for y in range(cat.n_objects):
            hom = cat.hom(cat.at(i), y)
            if hom.size == 0:
                continue
            b = biset(cat, cat.position(cat.objects[y]), i)
            expected[y] += tensor_over_group_algebra(b, top).quotient_dim
    return bool(np.array_equal(expected, x.dims))


def _tops_of_set_module(x: CModule) -> bool:
    """:func:`is_projective_by_tops` when ``x`` permutes its bases.

    Images of basis vectors are basis vectors, so each top is the
    permutation module on the basis vectors hit from no higher position,
    and ``dim kHom(x_i, y) ⊗_{kG_i} kT`` is the number of ``G_i``-orbits on
    ``Hom(x_i, y) x T``.
    """
    cat, p = x.category, x.p
    maps = x.maps
    T, rank = cat.table, cat.hom_rank
    n = cat.n_objects
    expected = np.zeros(cat.n_objects, dtype=np.int64)
    for i in range(1, n + 1):
        d = x.dim_at(i)
        if d == 0:
            continue
        hit = np.zeros(d, dtype=bool)
        for j in range(i + 1, n + 1):
            for a in cat.hom_pos(j, i):
                hit[maps[a]] = True
        top = np.flatnonzero(~hit)
        if top.size == 0:
            continue
        G = cat.aut(i)
        g_mor = np.array(G.elements, dtype=np.int64)
        where = np.full(d, -1, dtype=np.int64)
        where[top] = np.arange(top.size)
        act = where[np.array([maps[g][top] for g in g_mor])]  # [g, t]
        if not is_projective_permutation(G, act, p):
            return False
        g_inv = g_mor[G.inverse]
        xi = cat.at(i)
        for y in range(cat.n_objects):
            hom = cat.hom(xi, y)
            if hom.size == 0:
                continue
            # (b, t) ~ (b∘g^-1, g·t)
            b_moved = rank[T[np.ix_(hom, g_inv)]]  # [b, g]
            left = np.arange(hom.size)[:, None, None] * top.size + np.arange(top.size)[None, None, :]
            right = b_moved[:, :, None] * top.size + act[None, :, :]
            left = np.broadcast_to(left, right.shape)
            expected[y] += la.identify(hom.size * top.size, left, right, p).quotient_dim
    return bool(np.array_equal(expected, x.dims))

"""Shared test corpora and brute-force oracles.

Nothing here is used by the package itself; these are independent
constructions to test it against.
"""

from __future__ import annotations

import itertools
import random
from functools import lru_cache

import numpy as np

from eigproj import exactla as la
from eigproj.category import FiniteCategory, GroupTable
from eigproj.cmodule import CModule
from eigproj.freegen import Bounds, generate_category, random_spec
from eigproj.grouprep import cyclic_group, direct_product, symmetric_group

SMALL_BOUNDS = Bounds(max_morphisms=60)


# -- concrete EI categories ---------------------------------------------------


def concrete_category(sizes, aut_gens, arrows, cap: int = 40) -> FiniteCategory | None:
    """Finite sets ``S_i`` with functions between them, closed under composition.

    ``aut_gens[i]`` are permutations of ``S_i``; ``arrows`` are
    ``(j, i, function)`` with ``j > i`` (0-based), so every endomorphism is
    a bijection and the category is EI and skeletal.  ``None`` if the
    closure exceeds ``cap`` morphisms.
    """
    n = len(sizes)
    mors = {(i, i, tuple(range(sizes[i]))) for i in range(n)}
    mors |= {(i, i, tuple(g)) for i in range(n) for g in aut_gens[i]}
    mors |= {(j, i, tuple(f)) for j, i, f in arrows}
    while True:
        new = set()
        for (j, l, f), (l2, i, g) in itertools.product(mors, mors):
            if l == l2:
                h = (j, i, tuple(g[x] for x in f))
                if h not in mors:
                    new.add(h)
        if not new:
            break
        mors |= new
        if len(mors) > cap:
            return None
    ordered = sorted(mors, key=lambda m: (-m[0], -m[1], m[2]))
    name = {m: f"{m[0]}>{m[1]}:{''.join(map(str, m[2]))}" for m in ordered}
    objects = [f"S{i}" for i in range(n)]
    morphisms = [(name[m], f"S{m[0]}", f"S{m[1]}") for m in ordered]
    identities = {f"S{i}": name[(i, i, tuple(range(sizes[i])))] for i in range(n)}
    compose = []
    for f in ordered:
        for g in ordered:
            if f[1] == g[0]:
                compose.append((name[g], name[f], name[(f[0], g[1], tuple(g[2][x] for x in f[2]))]))
    return FiniteCategory(objects, morphisms, identities, compose)


def random_concrete(seed: int, min_objects: int = 1, max_objects: int = 3, cap: int = 24) -> FiniteCategory | None:
    rng = random.Random(seed)
    n = rng.randint(min_objects, max_objects)
    sizes = [rng.randint(1, 3) for _ in range(n)]
    aut = []
    for s in sizes:
        gens = []
        for _ in range(rng.randint(0, 2)):
            perm = list(range(s))
            rng.shuffle(perm)
            gens.append(perm)
        aut.append(gens)
    arrows = []
    for j in range(n):
        for i in range(j):
            for _ in range(rng.choice([0, 1, 1, 2])):
                arrows.append((j, i, [rng.randrange(sizes[i]) for _ in range(sizes[j])]))
    return concrete_category(sizes, aut, arrows, cap)


@lru_cache(maxsize=None)
def concrete_corpus(count: int = 120, cap: int = 24, min_objects: int = 1) -> tuple[FiniteCategory, ...]:
    out = []
    seed = 0
    while len(out) < count:
        cat = random_concrete(seed, min_objects=min_objects, cap=cap)
        seed += 1
        if cat is not None:
            out.append(cat)
    return tuple(out)


@lru_cache(maxsize=None)
def freegen_corpus(count: int = 60) -> tuple[FiniteCategory, ...]:
    return tuple(generate_category(random_spec(s, SMALL_BOUNDS), cap=SMALL_BOUNDS.max_morphisms) for s in range(count))


# -- small groups and G-sets ----------------------------------------------------


def small_groups() -> list[tuple[str, GroupTable]]:
    """Every group of order at most 6, up to isomorphism."""
    return [
        ("C1", cyclic_group(1)),
        ("C2", cyclic_group(2)),
        ("C3", cyclic_group(3)),
        ("C4", cyclic_group(4)),
        ("C2xC2", direct_product(cyclic_group(2), cyclic_group(2))),
        ("C5", cyclic_group(5)),
        ("C6", cyclic_group(6)),
        ("S3", symmetric_group(3)),
    ]


def random_gset(rng: random.Random, g: GroupTable, max_size: int) -> np.ndarray:
    """A left G-set as ``act[g, x]``: a union of coset spaces of random cyclic subgroups, relabelled."""
    blocks = []
    size = 0
    while True:
        h = rng.randrange(g.order)
        sub = {g.unit}
        x = h
        while x not in sub:
            sub.add(x)
            x = int(g.mult[x, h])
        cosets = []
        seen = set()
        for a in range(g.order):
            if a in seen:
                continue
            c = frozenset(int(g.mult[a, s]) for s in sub)
            seen |= c
            cosets.append(c)
        if size + len(cosets) > max_size:
            break
        where = {b: k for k, c in enumerate(cosets) for b in c}
        reps = [min(c) for c in cosets]
        blocks.append(np.array([[size + where[int(g.mult[a, r])] for r in reps] for a in range(g.order)]))
        size += len(cosets)
        if rng.random() < 0.4:
            break
    if not blocks:
        return np.zeros((g.order, 1), dtype=np.int64)  # a point
    act = np.concatenate(blocks, axis=1)
    perm = list(range(size))
    rng.shuffle(perm)
    relabel = np.empty(size, dtype=np.int64)
    relabel[np.arange(size)] = perm
    out = np.empty_like(act)
    out[:, relabel] = relabel[act]
    return out


def orbit_count(pairs_next) -> int:
    """Connected components by plain union-find; ``pairs_next`` yields edges."""
    parent: dict = {}

    def find(a):
        parent.setdefault(a, a)
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    nodes = set()
    for a, b in pairs_next:
        nodes.add(a)
        nodes.add(b)
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    return len({find(a) for a in nodes})


# -- linear algebra helpers -----------------------------------------------------


def random_invertible(rng: np.random.Generator, d: int, p: int) -> tuple[np.ndarray, np.ndarray]:
    """A random invertible ``d x d`` matrix and its inverse."""
    while True:
        a = rng.integers(0, p, size=(d, d))
        if la.rank(a, p) == d:
            break
    r, _ = la.rref(np.concatenate([a, la.identity(d)], axis=1), p)
    return a % p, r[:, d:]


def change_basis(x: CModule, seed: int) -> CModule:
    """An isomorphic copy of ``x`` with random dense bases at every object."""
    rng = np.random.default_rng(seed)
    cat, p = x.category, x.p
    mats = [random_invertible(rng, int(d), p) if d else (la.identity(0), la.identity(0)) for d in x.dims]
    action = []
    for m in range(cat.n_morphisms):
        s, t = cat.src[m], cat.tgt[m]
        action.append(la.matmul(la.matmul(mats[t][0], x.matrix(m), p), mats[s][1], p))
    return CModule(cat, p, x.dims, action=action)


def brute_nullity(m: np.ndarray, p: int) -> int:
    """Count null vectors by exhaustive enumeration; nullity = log_p(count)."""
    cols = m.shape[1]
    vecs = np.array(list(itertools.product(range(p), repeat=cols)), dtype=np.int64)
    count = int(np.count_nonzero(~np.any((m @ vecs.T) % p, axis=0)))
    nullity = 0
    while p**nullity < count:
        nullity += 1
    assert p**nullity == count
    return nullity

"""Exact dense linear algebra over prime fields.

Matrices are plain ``numpy`` int64 arrays whose entries are residues in
``[0, p)``.  Every routine reduces its inputs first, so callers may pass
any integer array.  Row reduction always takes the first nonzero entry of
the current column as pivot, which makes all results deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

__all__ = [
    "FieldSpec",
    "QuotientSpace",
    "IdentificationQuotient",
    "identify",
    "as_matrix",
    "rref",
    "rank",
    "kernel",
    "kernel_basis",
    "solve",
    "quotient_by",
    "kronecker",
    "matmul",
    "identity",
    "inverse_mod",
]


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class FieldSpec:
    """The prime field F_p."""

    p: int

    def __post_init__(self):
        if not isinstance(self.p, (int, np.integer)) or not 2 <= self.p < 2**16:
            raise ValueError(f"characteristic must be an integer in [2, 2^16), got {self.p!r}")
        if not _is_prime(int(self.p)):
            raise ValueError(f"{self.p} is not prime")
        object.__setattr__(self, "p", int(self.p))

    def inv(self, a: int) -> int:
        return inverse_mod(a, self.p)


def _p(field_or_p) -> int:
    return field_or_p.p if isinstance(field_or_p, FieldSpec) else int(field_or_p)


def inverse_mod(a: int, p: int) -> int:
    a = int(a) % p
    if a == 0:
        raise ZeroDivisionError("0 has no inverse")
    return pow(a, p - 2, p)


def as_matrix(m, p, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    """Coerce ``m`` to a reduced 2-d int64 array (empty inputs need a shape)."""
    p = _p(p)
    a = np.asarray(m, dtype=np.int64)
    if a.size == 0 and rows is not None and cols is not None:
        return np.zeros((rows, cols), dtype=np.int64)
    if a.ndim == 1:
        a = a.reshape(1, -1) if a.size else a.reshape(0, cols or 0)
    return np.mod(a, p)


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def matmul(a: np.ndarray, b: np.ndarray, p) -> np.ndarray:
    p = _p(p)
    # entries < 2^16, so a row of length < 2^31 cannot overflow int64
    return np.mod(np.asarray(a, dtype=np.int64) @ np.asarray(b, dtype=np.int64), p)


def rref(m, p) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns.

    Zero rows are dropped, so the returned matrix has exactly ``rank`` rows.
    """
    p = _p(p)
    a = np.array(m, dtype=np.int64, copy=True)
    if a.ndim != 2:
        raise ValueError("rref expects a 2-d array")
    a %= p
    nrows, ncols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        inv = pow(int(a[r, c]), p - 2, p)
        if inv != 1:
            a[r, c:] = (a[r, c:] * inv) % p
        others = np.flatnonzero(a[:, c])
        others = others[others != r]
        if others.size:
            a[np.ix_(others, np.arange(c, ncols))] = (
                a[others, c:] - np.outer(a[others, c], a[r, c:])
            ) % p
        pivots.append(c)
        r += 1
    return a[:r], pivots


def rank(m, p) -> int:
    a = np.asarray(m)
    if a.size == 0:
        return 0
    return len(rref(a, p)[1])


def kernel(m, p) -> np.ndarray:
    """Rows form a basis of ``{x : m @ x = 0}``.

    Each basis row has a 1 at exactly one free column and 0 at the others,
    so coordinates of a kernel vector are read off at the free columns.
    """
    return kernel_basis(m, p)[0]


def kernel_basis(m, p) -> tuple[np.ndarray, list[int]]:
    """Kernel basis rows together with the free columns that index them."""
    p = _p(p)
    a = np.asarray(m, dtype=np.int64)
    ncols = a.shape[1]
    if a.shape[0] == 0:
        return identity(ncols), list(range(ncols))
    r, pivots = rref(a, p)
    free = free_columns(pivots, ncols)
    basis = np.zeros((len(free), ncols), dtype=np.int64)
    basis[np.arange(len(free)), free] = 1
    if pivots:
        basis[:, pivots] = (-r[:, free].T) % p
    return basis, free


def free_columns(pivots: list[int], ncols: int) -> list[int]:
    ps = set(pivots)
    return [c for c in range(ncols) if c not in ps]


def solve(a, b, p) -> np.ndarray | None:
    """Some ``x`` with ``a @ x = b``, or ``None`` when ``b`` is not in the column space.

    Free variables are set to zero.
    """
    p = _p(p)
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64).reshape(-1)
    if a.shape[0] != b.shape[0]:
        raise ValueError(f"shape mismatch: {a.shape} vs rhs of length {b.shape[0]}")
    ncols = a.shape[1]
    aug = np.concatenate([a % p, (b % p).reshape(-1, 1)], axis=1)
    r, pivots = rref(aug, p)
    if pivots and pivots[-1] == ncols:
        return None
    x = np.zeros(ncols, dtype=np.int64)
    for row, pc in enumerate(pivots):
        x[pc] = r[row, ncols]
    return x


class QuotientSpace:
    """``k^ambient_dim`` modulo the row span of ``relation_basis``.

    ``projection`` maps ambient coordinates to quotient coordinates and
    ``section`` maps quotient coordinates back to chosen representatives.
    """

    def __init__(self, ambient_dim: int, relation_basis: np.ndarray, projection: np.ndarray, section: np.ndarray):
        self.ambient_dim = ambient_dim
        self.relation_basis = relation_basis
        self.projection = projection
        self.section = section

    @property
    def quotient_dim(self) -> int:
        return int(self.projection.shape[0])

    def __repr__(self) -> str:
        return f"{type(self).__name__}(ambient_dim={self.ambient_dim}, quotient_dim={self.quotient_dim})"


class IdentificationQuotient(QuotientSpace):
    """Quotient by relations ``e_a - e_b`` only.

    Its dimension is the number of classes of the generated equivalence
    relation; ``labels[a]`` is the class of basis vector ``a``, classes are
    numbered by their smallest member and that member is the representative.
    Dense matrices are built only on demand.
    """

    def __init__(self, ambient_dim: int, labels: np.ndarray, p: int):
        self.ambient_dim = ambient_dim
        self.labels = labels
        self.p = p
        self.representatives = _first_occurrences(labels)

    @property
    def quotient_dim(self) -> int:
        return int(self.representatives.size)

    @cached_property
    def projection(self) -> np.ndarray:
        proj = np.zeros((self.quotient_dim, self.ambient_dim), dtype=np.int64)
        proj[self.labels, np.arange(self.ambient_dim)] = 1
        return proj

    @cached_property
    def section(self) -> np.ndarray:
        sec = np.zeros((self.ambient_dim, self.quotient_dim), dtype=np.int64)
        sec[self.representatives, np.arange(self.quotient_dim)] = 1
        return sec

    @cached_property
    def relation_basis(self) -> np.ndarray:
        others = np.flatnonzero(self.representatives[self.labels] != np.arange(self.ambient_dim))
        rel = np.zeros((others.size, self.ambient_dim), dtype=np.int64)
        rel[np.arange(others.size), others] = 1
        rel[np.arange(others.size), self.representatives[self.labels[others]]] = self.p - 1
        return rel


def _first_occurrences(labels: np.ndarray) -> np.ndarray:
    if labels.size == 0:
        return np.zeros(0, dtype=np.int64)
    _, first = np.unique(labels, return_index=True)
    return np.sort(first)


def quotient_by(ambient_dim: int, relations, p) -> QuotientSpace:
    p = _p(p)
    rel = np.asarray(relations, dtype=np.int64)
    if rel.size == 0:
        rel = np.zeros((0, ambient_dim), dtype=np.int64)
    if rel.shape[1] != ambient_dim:
        raise ValueError(f"relations have {rel.shape[1]} columns, ambient_dim is {ambient_dim}")
    if rel.shape[0]:
        r, pivots = rref(rel, p)
    else:
        r, pivots = rel, []
    free = free_columns(pivots, ambient_dim)
    proj = np.zeros((len(free), ambient_dim), dtype=np.int64)
    proj[np.arange(len(free)), free] = 1
    if pivots:
        # e_pivot == -sum_f r[row, f] e_f modulo the relations
        proj[:, pivots] = (-r[:, free].T) % p
    section = np.zeros((ambient_dim, len(free)), dtype=np.int64)
    section[free, np.arange(len(free))] = 1
    return QuotientSpace(ambient_dim, r, proj, section)


def identify(ambient_dim: int, left, right, p) -> IdentificationQuotient:
    """Quotient of ``k^ambient_dim`` by ``e_left[k] - e_right[k]`` for all ``k``.

    Classes are connected components of the identification graph.
    """
    left = np.asarray(left, dtype=np.int64).ravel()
    right = np.asarray(right, dtype=np.int64).ravel()
    graph = coo_matrix((np.ones(left.size, dtype=np.int8), (left, right)), shape=(ambient_dim, ambient_dim))
    _, comp = connected_components(graph, directed=False)
    # renumber components by smallest member
    first = _first_occurrences(comp)
    renum = np.empty(len(first), dtype=np.int64)
    renum[comp[first]] = np.arange(len(first))
    return IdentificationQuotient(ambient_dim, renum[comp], _p(p))


def kronecker(a, b, p) -> np.ndarray:
    """Kronecker product, first factor outermost in the row-major index order."""
    p = _p(p)
    return np.mod(np.kron(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)), p)

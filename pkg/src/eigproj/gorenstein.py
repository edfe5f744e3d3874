"""Gorenstein-projectivity of modules and the tensor-closedness verdicts.

Over a Gorenstein category algebra, a module ``X`` is Gorenstein-projective
exactly when every map ``kHom(x_>t, x_t) ⊗ X_>t -> X_t`` (balanced over
the tail of the category, see :func:`cmodule.tensor_over_tail`) is
injective.  Tensor-closedness then only needs to be checked on products of
two column modules.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .category import FiniteCategory, all_mono, is_free, peeling_violation, unfactorizable_hom
from .cmodule import CModule, TailRow, column_module, is_projective, tail_row, tensor_hat, tensor_over_tail, validate_module
from .grouprep import is_category_projective

__all__ = [
    "NotGorenstein",
    "InvalidModule",
    "NotFree",
    "NotGproj",
    "GprojVerdict",
    "GptVerdict",
    "require_gorenstein",
    "gproj_test",
    "gpn_check",
    "free_phi_star",
    "gpt_closed",
    "gpt_closed_via_mono",
]

COLUMN = "column-criterion"
MONO = "mono-criterion"
POSET = "poset-criterion"


class NotGorenstein(ValueError):
    """The category is not projective over the field, so the injectivity test does not apply."""

    def __init__(self, p: int, witness):
        super().__init__(f"category is not projective over F_{p} (first failure {witness})")
        self.p = p
        self.witness = witness


class InvalidModule(ValueError):
    pass


class NotFree(ValueError):
    pass


class NotGproj(ValueError):
    pass


@dataclass
class GprojVerdict:
    rows: list[tuple[int, int, int, bool]]  # (t, quotient_dim, rank, injective)
    p: int
    label: str | None = None

    @property
    def overall(self) -> bool:
        return all(r[3] for r in self.rows)

    @property
    def first_failure(self) -> int | None:
        return next((r[0] for r in self.rows if not r[3]), None)

    def to_json(self) -> dict:
        return {
            "module": self.label,
            "field": self.p,
            "gproj": self.overall,
            "rows": [{"t": t, "quotient_dim": q, "rank": r, "injective": ok} for t, q, r, ok in self.rows],
        }


@dataclass
class GptVerdict:
    """``verdict`` is ``None`` when the method abstains."""

    method: str
    verdict: bool | None
    witness: Any
    p: int | None
    failures: list = field(default_factory=list)
    checks: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    def __post_init__(self):
        if (self.verdict is False) != (self.witness is not None):
            raise ValueError("a witness is carried exactly by false verdicts")

    @property
    def consistent(self) -> bool:
        """Every recorded ``(p, q, gproj, projective)`` check agrees."""
        return all(c[2] == c[3] for c in self.checks)

    def to_json(self) -> dict:
        out = {
            "method": self.method,
            "field": self.p,
            "verdict": "abstain" if self.verdict is None else self.verdict,
            "witness": _jsonable(self.witness),
        }
        if self.failures:
            out["failures"] = _jsonable(self.failures)
        if self.checks:
            out["projective_agrees"] = self.consistent
        out.update(self.notes)
        return out


def _jsonable(x):
    if isinstance(x, tuple):
        return [_jsonable(v) for v in x]
    if isinstance(x, list):
        return [_jsonable(v) for v in x]
    return x


def require_gorenstein(cat: FiniteCategory, p: int) -> None:
    ok, witness = is_category_projective(cat, p)
    if not ok:
        raise NotGorenstein(p, witness)


def _rows(x: CModule, method: str) -> list[TailRow]:
    return [tensor_over_tail(x, t, method) for t in range(1, x.category.n_objects)]


def gproj_test(x: CModule, method: str = "auto", check: bool = True, label: str | None = None) -> GprojVerdict:
    """Injectivity of every tail map ``t = 1..n-1``."""
    require_gorenstein(x.category, x.p)
    if check:
        bad = validate_module(x)
        if bad:
            raise InvalidModule(f"not a module: {bad[0]}")
    rows = [(r.t, r.quotient_dim, r.rank, r.injective) for r in _rows(x, method)]
    return GprojVerdict(rows, x.p, label)


def gpn_check(x: CModule, s: int, require_gproj: bool = True) -> list[tuple[int, int, bool]]:
    """``(i, s, injective)`` for the maps ``kHom(x_s, x_i) ⊗_{kAut(x_s)} X_s -> X_i``, ``i < s``.

    ``x`` must vanish above position ``s``.
    """
    cat = x.category
    n = cat.n_objects
    if any(x.dim_at(j) for j in range(s + 1, n + 1)):
        raise ValueError(f"module does not vanish above position {s}")
    if require_gproj and not gproj_test(x).overall:
        raise NotGproj("module is not Gorenstein-projective")
    out = []
    for i in range(1, s):
        row = tail_row(x, i, {s: cat.hom_pos(s, i)}, [(s, s)])
        out.append((i, s, row.injective))
    return out


def free_phi_star(x: CModule, t: int, method: str = "auto") -> TailRow:
    """The tail map rebuilt from unfactorizable morphisms only.

    On a free category ``⊕_{j>t} kHom⁰(x_j, x_t) ⊗_{kAut(x_j)} X_j`` has
    the same quotient dimension and rank as the full tail tensor.
    """
    cat = x.category
    bad = peeling_violation(cat)
    if bad is not None:
        raise NotFree(f"category is not free: {bad}")
    n = cat.n_objects
    if not 1 <= t <= n - 1:
        raise IndexError(f"cut index {t} out of range 1..{n - 1}")
    xt = cat.at(t)
    blocks = {j: unfactorizable_hom(cat, cat.at(j), xt) for j in range(t + 1, n + 1)}
    return tail_row(x, t, blocks, [(j, j) for j in blocks], method)


def gpt_closed(
    cat: FiniteCategory,
    p: int,
    audit: bool = False,
    check_projective: bool = True,
    method: str = "auto",
) -> GptVerdict:
    """Test ``C_p ⊗̂ C_q`` for every ``p <= q``; the first failing ``(p, q, t)`` is the witness.

    With ``audit`` every pair is tested and all failures are listed.  With
    ``check_projective`` each product is also run through the retraction
    test; the two must agree and the results are kept in ``checks``.
    """
    require_gorenstein(cat, p)
    n = cat.n_objects
    cols = [None] + [column_module(cat, p, q) for q in range(1, n + 1)]
    failures = []
    checks = []
    for a in range(1, n + 1):
        for b in range(a, n + 1):
            x = tensor_hat(cols[a], cols[b])
            verdict = gproj_test(x, method=method, check=False)
            if check_projective:
                checks.append((a, b, verdict.overall, is_projective(x)))
            if not verdict.overall:
                failures.append((a, b, verdict.first_failure))
                if not audit:
                    return GptVerdict(COLUMN, False, failures[0], p, [], checks)
    witness = failures[0] if failures else None
    return GptVerdict(COLUMN, not failures, witness, p, failures, checks)


def gpt_closed_via_mono(cat: FiniteCategory, p: int) -> GptVerdict:
    """Monomorphism criterion: decisive on free categories, necessity only otherwise."""
    require_gorenstein(cat, p)
    free = is_free(cat)
    mono, bad = all_mono(cat)
    if not mono:
        return GptVerdict(MONO, False, bad, p, notes={"free": free})
    return GptVerdict(MONO, True if free else None, None, p, notes={"free": free})

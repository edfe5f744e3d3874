from __future__ import annotations

import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eigproj import exactla as la
from eigproj import grouprep as gr
from eigproj.freegen import free_biset_c2, generate_category, point_biset_c2

from corpus import concrete_corpus, freegen_corpus, random_gset, random_invertible, small_groups

GROUPS = small_groups()


def perm_module(g, act: np.ndarray, p: int) -> gr.GroupAlgebraModule:
    """Permutation module built directly from ``act[g, x]``."""
    size = act.shape[1]
    mats = np.zeros((g.order, size, size), dtype=np.int64)
    for a in range(g.order):
        for x in range(size):
            mats[a, act[a, x], x] = 1
    return gr.GroupAlgebraModule(g, p, mats)


def regular(g, p):
    return perm_module(g, np.asarray(g.mult), p)


def trivial(g, p):
    return perm_module(g, np.zeros((g.order, 1), dtype=np.int64), p)


def conjugate(m: gr.GroupAlgebraModule, seed: int) -> gr.GroupAlgebraModule:
    a, a_inv = random_invertible(np.random.default_rng(seed), m.dim, m.p)
    act = np.array([la.matmul(la.matmul(a, m.action[g], m.p), a_inv, m.p) for g in range(m.group.order)])
    return gr.GroupAlgebraModule(m.group, m.p, act)


def test_group_constructors():
    for name, g in GROUPS:
        assert g.axiom_violations() == [], name
    assert [g.order for _, g in GROUPS] == [1, 2, 3, 4, 4, 5, 6, 6]
    s3 = gr.symmetric_group(3)
    assert not np.array_equal(s3.mult, s3.mult.T)
    assert np.array_equal(gr.cyclic_group(6).mult, gr.cyclic_group(6).mult.T)


def test_subgroup_counts():
    counts = {name: len(gr.subgroups(g)) for name, g in GROUPS}
    assert counts == {"C1": 1, "C2": 2, "C3": 2, "C4": 3, "C2xC2": 5, "C5": 2, "C6": 4, "S3": 6}


def test_coset_action_is_transitive_of_right_size():
    for _, g in GROUPS:
        for h in gr.subgroups(g):
            act = gr.coset_action(g, h)
            assert act.shape == (g.order, g.order // len(h))
            assert set(act[:, 0].tolist()) == set(range(act.shape[1]))
            assert perm_module(g, act, 2).violations() == []


def test_regular_and_trivial_modules():
    for name, g in GROUPS:
        for p in (2, 3, 5):
            assert gr.is_projective_kG(regular(g, p)), (name, p)
            assert gr.is_projective_kG(trivial(g, p)) == (g.order % p != 0), (name, p)


def test_higman_calibration_on_coset_spaces():
    # k[G/H] is projective exactly when p does not divide |H|
    for name, g in GROUPS:
        for h in gr.subgroups(g):
            act = gr.coset_action(g, h)
            for p in (2, 3, 5):
                expected = len(h) % p != 0
                assert gr.is_projective_kG(perm_module(g, act, p)) == expected, (name, sorted(h), p)
                assert gr.is_projective_permutation(g, act, p) == expected


def test_higman_certificate_is_a_certificate():
    g = gr.symmetric_group(3)
    m = regular(g, 3)
    f = gr.higman_certificate(m)
    total = sum(la.matmul(la.matmul(m.action[a], f, 3), m.action[g.inverse[a]], 3) for a in range(g.order)) % 3
    assert np.array_equal(total, la.identity(6))
    assert gr.higman_certificate(trivial(g, 3)) is None
    assert gr.higman_certificate(gr.GroupAlgebraModule(g, 3, np.zeros((6, 0, 0), dtype=np.int64))).shape == (0, 0)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31), st.sampled_from(range(len(GROUPS))))
def test_maschke_and_conjugation_invariance(seed, gi):
    rng = random.Random(seed)
    _, g = GROUPS[gi]
    act = random_gset(rng, g, 5)
    for p in (2, 3, 5, 7):
        m = perm_module(g, act, p)
        verdict = gr.is_projective_kG(m)
        if g.order % p:
            assert verdict
        assert gr.is_projective_kG(conjugate(m, seed)) == verdict
        assert gr.is_projective_permutation(g, act, p) == verdict


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31))
def test_direct_sum_is_projective_iff_summands_are(seed):
    rng = random.Random(seed)
    _, g = rng.choice(GROUPS)
    p = rng.choice([2, 3])
    parts = [perm_module(g, random_gset(rng, g, 3), p) for _ in range(rng.randint(1, 3))]
    total = gr.direct_sum(*parts)
    assert total.violations() == []
    assert gr.is_projective_kG(total) == all(gr.is_projective_kG(m) for m in parts)


def test_hom_bisets_are_bisets():
    for cat in concrete_corpus() + freegen_corpus(30):
        n = cat.n_objects
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                b = gr.biset(cat, i, j)
                assert b.violations() == []
                for side in ("left", "right"):
                    assert gr.permutation_module(b, side, 3).violations() == []


def test_biset_violations_detect_broken_actions():
    cat = generate_category(free_biset_c2())
    b = gr.biset(cat, 1, 2)
    assert b.violations() == []
    broken = gr.BisetData(b.basis, b.left_group, b.right_group, b.left_action, b.right_action[:, ::-1].copy())
    assert broken.violations()
    with pytest.raises(ValueError):
        gr.permutation_module(b, "middle", 2)


def test_category_projectivity_examples():
    pb = generate_category(point_biset_c2())
    assert gr.is_category_projective(pb, 2) == (False, (1, 2, "right"))
    assert gr.is_category_projective(pb, 3) == (True, None)
    assert not gr.is_gorenstein(pb, 2)
    fb = generate_category(free_biset_c2())
    for p in (2, 3, 5):
        assert gr.is_category_projective(fb, p) == (True, None)


def test_category_projectivity_matches_full_higman():
    for cat in concrete_corpus()[:60]:
        for p in (2, 3):
            expected = True
            n = cat.n_objects
            for i in range(1, n + 1):
                for j in range(i + 1, n + 1):
                    b = gr.biset(cat, i, j)
                    for side in ("left", "right"):
                        expected &= gr.is_projective_kG(gr.permutation_module(b, side, p))
            assert gr.is_gorenstein(cat, p) == expected

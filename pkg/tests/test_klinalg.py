import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ffdyn import ElemSet, InputError, build_field
from ffdyn.gf_tower import enumerate_subfield
from ffdyn.klinalg import (
    AffineSubspace,
    affine_hull,
    all_linear_subspaces,
    coords,
    dilate_count,
    echelon,
    enumerate_affine,
    intersection_ok,
    linear_part,
    power_le,
    random_affine,
    rank,
    set_dimension,
    subfield_condition_check,
)
from ffdyn.setcalc import dilate

F = build_field(2, 2, 3)  # K = F_4, F = F_64
G = build_field(3, 1, 4)


def test_coordinate_examples():
    y = F.generator()
    assert coords(F, 3) == [3, 0, 0]
    assert coords(F, y) == [0, 1, 0]


@given(st.integers(0, 3), st.integers(0, 3), st.integers(0, 63), st.integers(0, 63))
def test_coords_are_k_linear(lam, mu, a, b):
    lhs = coords(F, F.add(F.mul(lam, a), F.mul(mu, b)))
    rhs = [F.add(F.mul(lam, x), F.mul(mu, z)) for x, z in zip(coords(F, a), coords(F, b))]
    assert lhs == rhs


def test_dimension_examples():
    y = F.generator()
    assert set_dimension(F, ElemSet.from_indices(64, [17])) == 0
    K = enumerate_subfield(F, 2)
    hull = affine_hull(F, K)
    assert hull.dim == 1 and linear_part(F, hull) == K
    assert set_dimension(F, ElemSet.from_indices(64, [0, 1, y])) == 2


def test_enumeration_examples():
    assert enumerate_affine(F, AffineSubspace(9, ())) == ElemSet.from_indices(64, [9])
    tower = (1, F.generator(), F.mul(F.generator(), F.generator()))
    assert enumerate_affine(F, AffineSubspace(0, tower)) == ElemSet.full(64)
    line = enumerate_affine(F, AffineSubspace(5, (22,)))
    assert line == ElemSet.from_indices(64, [F.add(5, F.mul(c, 22)) for c in range(4)])
    with pytest.raises(AssertionError):
        enumerate_affine(F, AffineSubspace(0, (1, 2)))


def test_random_affine():
    for s in range(4):
        A = random_affine(F, s, 11)
        assert A == random_affine(F, s, 11)
        assert enumerate_affine(F, A).card == 4**s
    assert linear_part(F, random_affine(F, 3, 5)) == ElemSet.full(64)
    assert random_affine(F, 2, 1) != random_affine(F, 2, 2)
    with pytest.raises(InputError):
        random_affine(F, 4, 0)


@given(st.integers(0, 2**32), st.integers(0, 3))
def test_hull_is_idempotent(seed, s):
    A = random_affine(G, s, seed)
    pts = enumerate_affine(G, A)
    hull = affine_hull(G, pts)
    assert hull.dim == s
    assert enumerate_affine(G, hull) == pts
    assert affine_hull(G, enumerate_affine(G, hull)) == hull


@given(st.lists(st.integers(0, 63), max_size=5))
def test_echelon_is_reduced_and_spans(vectors):
    basis = echelon(F, vectors)
    assert echelon(F, basis) == basis
    assert rank(F, vectors + basis) == len(basis)
    span = linear_part(F, AffineSubspace(0, tuple(basis)))
    assert all(v in span for v in vectors)


def test_serialization_roundtrip():
    A = random_affine(F, 2, 3)
    obj = json.loads(json.dumps(A.to_json(F)))
    assert AffineSubspace.from_json(F, obj) == A
    with pytest.raises(InputError):
        AffineSubspace.from_json(F, {"base": "000000", "basis": ["000001", "000001"]})


def test_subspace_counts():
    # Gaussian binomials for q = 2, n = 6
    ctx = build_field(2, 1, 6)
    assert [sum(1 for _ in all_linear_subspaces(ctx, s)) for s in range(4)] == [1, 63, 651, 1395]
    seen = {frozenset(linear_part(ctx, AffineSubspace(0, b)).indices().tolist())
            for b in all_linear_subspaces(ctx, 2)}
    assert len(seen) == 651


def test_power_le_exact():
    assert power_le(8, 64, Fraction(1, 2))
    assert not power_le(9, 64, Fraction(1, 2))
    assert power_le(1, 5, Fraction(0))
    assert not power_le(2, 5, Fraction(0))
    # falls back to high-precision logs for huge denominators
    assert power_le(3, 10, Fraction(477122, 1000000))
    assert not power_le(3, 10, Fraction(477121, 1000000))
    assert intersection_ok(8, 64, 2, Fraction(1))


def test_condition_examples():
    ctx = build_field(2, 1, 6)
    G8 = enumerate_subfield(ctx, 3)
    L = dilate(ctx, 5, G8)
    rep = subfield_condition_check(ctx, L, Fraction(1, 69))
    assert not rep.satisfied and rep.worst_count == 8 and rep.worst_d == 3
    rep = subfield_condition_check(ctx, ElemSet.from_indices(64, [0]), Fraction(1, 69))
    assert rep.worst_count == 1 and rep.satisfied


@given(st.integers(0, 2**32))
def test_condition_report_is_recomputable(seed):
    A = random_affine(F, 2, seed)
    L = linear_part(F, A)
    rep = subfield_condition_check(F, L, Fraction(137, 4761))
    assert dilate_count(F, L, rep.worst_d, rep.worst_a) == rep.worst_count
    for v in rep.per_degree:
        assert dilate_count(F, L, v.d, v.argmax_a) == v.max_count


@given(st.lists(st.integers(0, 80), min_size=1, max_size=30, unique=True), st.integers(0, 80))
def test_condition_is_monotone(idx, extra):
    small = ElemSet.from_indices(81, idx)
    big = small | ElemSet.from_indices(81, [extra])
    a = subfield_condition_check(G, small, Fraction(0), "set", size=10)
    b = subfield_condition_check(G, big, Fraction(0), "set", size=10)
    assert b.worst_count >= a.worst_count


def test_condition_matches_brute_force():
    rng = np.random.default_rng(0)
    L = ElemSet.from_indices(81, rng.choice(81, 20, replace=False))
    rep = subfield_condition_check(G, L, Fraction(1, 2), "set", size=20)
    for v in rep.per_degree:
        counts = [dilate_count(G, L, v.d, a) for a in range(1, 81)]
        assert v.max_count == max(counts)
        assert v.argmax_a == 1 + counts.index(max(counts))


def test_sampled_mode_for_big_fields():
    ctx = build_field(2, 1, 18)
    A = random_affine(ctx, 3, 0)
    rep = subfield_condition_check(ctx, linear_part(ctx, A), Fraction(1, 69), samples=64)
    assert rep.sampled and rep.worst_count >= 1
    with pytest.raises(InputError):
        subfield_condition_check(ctx, linear_part(ctx, A), Fraction(1, 69), mode="set")

import random

import pytest

from dgloc.complexes import (
    ChainComplex,
    ChainMap,
    ComplexCategory,
    ComplexError,
    HomSpace,
    InvalidTriangleError,
    cone,
    contractible,
    desuspend,
    find_witnesses,
    homology_of,
    point,
    random_closed_map,
    random_complex,
    shift,
    suspension,
)
from dgloc.fields import GF, QQ
from dgloc.linalg import Echelon, as_matrix, is_zero, matmul


def _pair(seed, field):
    rng = random.Random(seed)
    A = random_complex(rng, field, max_rank=3)
    B = random_complex(rng, field, max_rank=3)
    return rng, A, B


def test_bad_differential_rejected():
    F = QQ
    with pytest.raises(ComplexError):
        ChainComplex(F, {0: 1, 1: 1, 2: 1}, {1: as_matrix(F, [[1]]), 2: as_matrix(F, [[1]])})


def test_point_and_contractible(field):
    assert homology_of(point(field)).nonzero() == {0: 1}
    assert homology_of(contractible(field)).nonzero() == {}


@pytest.mark.parametrize("seed", range(6))
def test_random_complexes_square_to_zero(finite_field, seed):
    rng = random.Random(seed)
    X = random_complex(rng, finite_field)
    for n in X.degrees():
        assert is_zero(matmul(finite_field, X.differential(n - 1), X.differential(n)))


@pytest.mark.parametrize("seed", range(5))
def test_hom_differential_is_a_derivation(finite_field, seed):
    rng, A, B = _pair(seed, finite_field)
    C = random_complex(rng, finite_field, max_rank=3)
    for r in (0, 1):
        f = sum((g.scale(finite_field.random(rng)) for g in HomSpace(B, C).basis(r)), B.zero_map(C, r))
        g = sum((h.scale(finite_field.random(rng)) for h in HomSpace(A, B).basis(1)), A.zero_map(B, 1))
        sign = -1 if f.degree % 2 else 1
        assert f.compose(g).hom_d() == f.hom_d().compose(g) + f.compose(g.hom_d()).scale(sign)
        assert f.hom_d().hom_d().is_zero()


@pytest.mark.parametrize("seed", range(5))
def test_cone_witnesses(field, seed):
    rng, A, B = _pair(seed, field)
    T = cone(random_closed_map(rng, A, B))
    assert T.violations() == []
    # d(u~) = -x s~ for the canonical witnesses
    assert T.u_tilde.hom_d() == -T.x.compose(T.s_tilde)


def test_cone_of_identity_is_acyclic(field):
    X = random_complex(random.Random(5), field)
    T = cone(X.identity())
    assert homology_of(T.C).nonzero() == {}


def test_cone_of_zero_map_splits():
    F = GF(2)
    T = cone(point(F).zero_map(point(F), 0))
    assert homology_of(T.C).nonzero() == {0: 1, 1: 1}


def _induced_rank(f, X, Y, n):
    """Rank of H_n(X) -> H_{n + |f|}(Y) via Hom(k, -)."""
    k = point(X.field)
    hx, hy = HomSpace(k, X), HomSpace(k, Y)
    e = Echelon(X.field)
    for rep in hx.representatives(n):
        coords = hy.coordinates(f.compose(rep))
        e.insert({i: c for i, c in enumerate(coords) if c})
    return e.rank


@pytest.mark.parametrize("seed", range(6))
def test_long_exact_sequence(finite_field, seed):
    rng, A, B = _pair(seed, finite_field)
    T = cone(random_closed_map(rng, A, B))
    hA, hB, hC = homology_of(A), homology_of(B), homology_of(T.C)
    for n in range(-1, 6):
        rx = _induced_rank(T.x, A, B, n)
        rv = _induced_rank(T.v, B, T.C, n)
        rs = _induced_rank(T.s_tilde, T.C, A, n)
        rx_next = _induced_rank(T.x, A, B, n - 1)
        assert rx + rv == hB.dim(n)  # exact at B
        assert rv + rs == hC.dim(n)  # exact at C
        assert rs + rx_next == hA.dim(n - 1)  # exact at A


@pytest.mark.parametrize("seed", range(4))
def test_suspension_identification_commutes_with_d(finite_field, seed):
    rng, X, Y = _pair(seed, finite_field)
    SY = shift(Y)
    assert suspension(Y, SY).is_closed()
    for r in (0, 1, 2):
        for f in HomSpace(X, SY).basis(r):
            assert desuspend(f.hom_d(), Y) == -desuspend(f, Y).hom_d()


@pytest.mark.parametrize("seed", range(4))
def test_rotation_keeps_a_triangle(finite_field, seed):
    rng, A, B = _pair(seed, finite_field)
    T = cone(random_closed_map(rng, A, B))
    R = T.rotate()
    assert R.violations() == []


def test_find_witnesses_rejects_non_triangle():
    F = GF(2)
    k = point(F)
    one = k.identity()
    # k -1-> k -1-> k is not exact: v x = 1 is not null-homotopic
    with pytest.raises(InvalidTriangleError):
        find_witnesses(k, k, k, one, one, ChainMap(k, shift(k), 0, {}))


def test_complex_category_protocol(finite_field):
    rng, A, B = _pair(1, finite_field)
    D = ComplexCategory({"A": A, "B": B})
    assert D.identity("A") == A.identity()
    for f in D.hom_basis("A", "B", 0):
        assert D.d(f).degree == -1

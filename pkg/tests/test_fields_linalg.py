import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from dgloc.fields import GF, QQ, Field, FpElement
from dgloc.linalg import Echelon, affine_points, kernel, rank, solve


def test_fp_arithmetic_wraps():
    F = GF(5)
    a, b = F(3), F(4)
    assert a + b == F(2)
    assert a * b == F(2)
    assert a / b == F(2)  # 4 * 2 = 8 = 3
    assert -a == F(2)
    assert a ** 4 == F.one


def test_field_names_and_parse():
    assert Field.from_name("F2") == GF(2)
    assert Field.from_name("GF(7)") == GF(7)
    assert Field.from_name("Q") == QQ
    with pytest.raises(ValueError):
        Field.from_name("R")
    with pytest.raises(ValueError):
        GF(4)
    assert QQ.parse("-3/7") == Fraction(-3, 7)
    assert GF(5).parse("2 mod 5") == GF(5)(2)
    with pytest.raises(ValueError):
        GF(5).parse("2 mod 7")


@pytest.mark.parametrize("F", [QQ, GF(2), GF(3), GF(7)], ids=lambda f: f.name)
def test_format_parse_round_trip(F):
    rng = random.Random(1)
    for _ in range(20):
        x = F.random(rng)
        assert F.parse(F.format(x)) == x


def test_signed_representatives():
    assert GF(3).signed(GF(3)(2)) == -1
    assert GF(2).signed(GF(2)(1)) == 1


matrices = st.integers(min_value=1, max_value=5).flatmap(
    lambda n: st.lists(st.lists(st.integers(-3, 3), min_size=n, max_size=n), min_size=1, max_size=5))


def _columns(rows, F):
    ncols = len(rows[0])
    return [{i: F(r[j]) for i, r in enumerate(rows) if F(r[j])} for j in range(ncols)]


@settings(max_examples=60, deadline=None)
@given(matrices, st.sampled_from([QQ, GF(2), GF(3)]))
def test_rank_nullity_and_kernel(rows, F):
    cols = _columns(rows, F)
    ker = kernel(cols, F)
    assert rank(cols, F) + len(ker) == len(cols)
    for vec in ker:
        total = {}
        for j, c in vec.items():
            for i, a in cols[j].items():
                total[i] = total.get(i, F.zero) + c * a
        assert all(not v for v in total.values())


@settings(max_examples=60, deadline=None)
@given(matrices, st.sampled_from([QQ, GF(3)]), st.integers(0, 10 ** 6))
def test_solve_finds_solution_for_images(rows, F, seed):
    cols = _columns(rows, F)
    rng = random.Random(seed)
    x = {j: F.random(rng) for j in range(len(cols))}
    rhs = {}
    for j, c in x.items():
        for i, a in cols[j].items():
            rhs[i] = rhs.get(i, F.zero) + c * a
    rhs = {i: v for i, v in rhs.items() if v}
    part, ker = solve(cols, rhs, F)
    assert part is not None
    back = {}
    for j, c in part.items():
        for i, a in cols[j].items():
            back[i] = back.get(i, F.zero) + c * a
    assert {i: v for i, v in back.items() if v} == rhs
    assert len(ker) == len(kernel(cols, F))


def test_solve_inconsistent():
    F = GF(2)
    part, _ = solve([{0: F.one}], {1: F.one}, F)
    assert part is None


def test_echelon_canonical_is_coset_invariant():
    F = GF(3)
    e = Echelon(F)
    e.insert({0: F(1), 1: F(1)})
    a = {0: F(2), 2: F(1)}
    b = {0: F(1), 1: F(2), 2: F(1)}  # a minus (row)
    assert e.canonical(a) == e.canonical(b)
    assert e.contains({0: F(2), 1: F(2)})
    assert not e.contains({2: F(1)})


def test_affine_points_enumerates_all():
    F = GF(3)
    pts = list(affine_points({0: F(1)}, [{1: F(1)}, {2: F(1)}], F))
    assert len(pts) == 9
    assert len({tuple(sorted(p.items())) for p in pts}) == 9


def test_fp_element_pickles():
    import pickle
    x = FpElement(2, 5)
    assert pickle.loads(pickle.dumps(x)) == x

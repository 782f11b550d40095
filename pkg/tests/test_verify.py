import random

import pytest

from dgloc.complexes import ChainMap, HomSpace, Triangle, shift
from dgloc.constructions import cylinder, kv, kvw, qv
from dgloc.fields import GF, QQ
from dgloc.finite import kv_model, kv_right_inverse, kv_two_sided_inverse
from dgloc.linalg import zeros
from dgloc.verify import (
    BudgetExceeded,
    InfiniteEnumerationError,
    TruncatedPresentation,
    are_homotopic,
    enumerate_functors,
    homotopy_classes,
    kappa_set,
    lambda_set,
    rho_set,
)
from dgloc.verify.suites import (
    SUITES,
    SuiteConfig,
    canonical_functor,
    check_drinfeld_factorization,
    check_killing_vs_localization,
    check_representability,
    check_rotation,
    check_two_sided_universal,
    comparison_map_j,
    random_triangle,
    run_suite,
    triangle_category,
    triangle_trials,
)

F2, F3 = GF(2), GF(3)


def test_witness_sets_in_right_inverse_model(field):
    D = kv_right_inverse(0, field)
    v = D.find("v")
    r = rho_set(D, v)
    assert r.status == "nonempty" and r.torsor_dim == 0
    assert str(r.basepoint) == "w"
    assert lambda_set(D, v).empty
    assert kappa_set(D, v).empty


def test_two_sided_model_has_both_inverses(field):
    D = kv_two_sided_inverse(0, field)
    v = D.find("v")
    assert not rho_set(D, v).empty and not lambda_set(D, v).empty


def test_kappa_in_truncated_kvw_is_a_point():
    D = TruncatedPresentation(kvw(0, F2))
    k = kappa_set(D, D.P.gen("v"), "O1", "O2")
    assert k.cardinality == 1
    assert not D.truncated  # no oriented cycles: hom-spaces are finite


def test_enumerate_functors_qv_into_right_inverse_model():
    D = kv_right_inverse(0, F2)
    F = canonical_functor(D, F2)
    fs = enumerate_functors(qv(0, F2), D, F.object_map, F.images)
    assert len(fs) == 1 and fs[0].is_dg()
    assert str(fs[0].images["w"]) == "w"


def test_enumeration_budget_and_rationals():
    D = TruncatedPresentation(qv(0, F3))
    F = canonical_functor(D, F3)
    with pytest.raises(BudgetExceeded):
        enumerate_functors(qv(0, F3), D, F.object_map, F.images, budget=2)
    DQ = TruncatedPresentation(qv(0, QQ))
    FQ = canonical_functor(DQ, QQ)
    with pytest.raises(InfiniteEnumerationError):
        enumerate_functors(qv(0, QQ), DQ, FQ.object_map, FQ.images)


def test_qv_into_itself_is_one_homotopy_class():
    D = TruncatedPresentation(qv(0, F2))
    F = canonical_functor(D, F2)
    fs = enumerate_functors(qv(0, F2), D, F.object_map, F.images)
    assert len(fs) > 1
    cyl = cylinder(kv(0, F2), qv(0, F2))
    assert homotopy_classes(fs, cyl) == homotopy_classes(fs, cyl, key=lambda G: 0)
    assert len(homotopy_classes(fs, cyl)) == 1
    h = are_homotopic(fs[0], fs[1], cyl)
    assert h.homotopic and h.witness is not None


def test_representability_detects_wrong_witness_kind():
    D = kv_right_inverse(0, F2)
    F = canonical_functor(D, F2)
    C = kv(0, F2)
    good = check_representability("rho", C, C.gen("v"), D, F)
    assert good.matched and good.left["homotopy_classes"] == 1
    # R_v maps into D but v is not a boundary there: the kill suite must see no functors
    bad = check_representability("kappa", C, C.gen("v"), D, F)
    assert bad.matched and bad.details["functors"] == 0
    # and a class count of 1 against an empty kappa set would be a mismatch
    assert good.left["homotopy_classes"] != bad.right["cardinality"]


@pytest.mark.parametrize("model, invertible", [(kv_two_sided_inverse, True), (kv_model, False),
                                               (kv_right_inverse, False)])
def test_universal_property_fixed_targets(model, invertible):
    D = model(0, F2)
    C = kv(0, F2)
    rep = check_two_sided_universal(C, C.gen("v"), D, canonical_functor(D, F2))
    assert rep.matched
    assert rep.right["invertible"] is invertible
    assert rep.left["homotopy_classes"] == (1 if invertible else 0)


@pytest.mark.parametrize("kind", ["generic", "identity", "zero", "contractible", "split_epi"])
def test_theorem_checks_on_each_kind(finite_field, kind):
    for i in range(3):
        T = random_triangle(random.Random(i), finite_field, 3, kind)
        assert T.violations() == []
        assert check_killing_vs_localization(T).matched
        assert check_rotation(T).matched
        assert check_drinfeld_factorization(T).matched


def test_contractible_middle_term_makes_everything_invertible():
    T = random_triangle(random.Random(0), F2, 3, "contractible")
    rep = check_drinfeld_factorization(T)
    assert rep.right["z_invertible"] and rep.right["verdict_xy"] == "singleton"


def test_j_depends_only_on_the_class_of_z():
    rng = random.Random(4)
    for _ in range(10):
        T = random_triangle(rng, F3, 3, "split_epi")
        R = rho_set(triangle_category(T), T.x, "A", "B")
        if R.empty:
            continue
        w1, z = comparison_map_j(T, R.basepoint)
        assert w1.hom_d() == T.v  # j lands in the kill witnesses
        for zc in HomSpace(T.B, T.B).cycle_basis(1):
            w2, _ = comparison_map_j(T, R.basepoint, z + zc)
            assert HomSpace(T.B, T.C).is_boundary(w1 - w2)


def _double(f, X2, Y2):
    blocks = {}
    for n, m in f.blocks.items():
        r, c = m.shape
        out = zeros(f.field, 2 * r, 2 * c)
        out[:r, :c] = m
        out[r:, c:] = m
        blocks[n] = out
    return ChainMap(X2, Y2, f.degree, blocks)


def _double_triangle(T):
    A2, B2, C2 = T.A.direct_sum(T.A), T.B.direct_sum(T.B), T.C.direct_sum(T.C)
    SA2, SB2 = shift(A2), shift(B2)
    return Triangle(A2, B2, C2, _double(T.x, A2, B2), _double(T.v, B2, C2), _double(T.s, C2, SA2),
                    _double(T.t, A2, C2), _double(T.u, C2, SB2), _double(T.h, C2, C2), SA2, SB2)


def test_j_is_natural_for_doubling():
    rng = random.Random(8)
    seen = 0
    for _ in range(12):
        T = random_triangle(rng, F2, 2, "split_epi")
        R = rho_set(triangle_category(T), T.x, "A", "B")
        if R.empty:
            continue
        T2 = _double_triangle(T)
        assert T2.violations() == []
        y = R.basepoint
        w, _ = comparison_map_j(T, y)
        w2, _ = comparison_map_j(T2, _double(y, T2.B, T2.A))
        assert HomSpace(T2.B, T2.C).is_boundary(w2 - _double(w, T2.B, T2.C))
        seen += 1
    assert seen


def test_trials_are_deterministic():
    a = triangle_trials(7, F3, 5, 3)
    b = triangle_trials(7, F3, 5, 3)
    assert [k for k, _ in a] == [k for k, _ in b]
    assert all(t1.x == t2.x and t1.A == t2.A for (_, t1), (_, t2) in zip(a, b))


@pytest.mark.parametrize("suite", sorted(SUITES))
def test_suites_pass_small(suite):
    records = run_suite(suite, SuiteConfig(F2, seed=3, trials=5, rank_bound=3))
    assert records and all(r.passed for r in records)

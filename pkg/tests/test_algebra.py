import random

import pytest

from dgloc.algebra import (
    CompositionError,
    DgFunctor,
    DgPresentation,
    Derivation,
    Generator,
    InvalidPresentationError,
    Morphism,
    UnknownGeneratorError,
    check_d_squared,
    find_isomorphism,
    inclusion,
    opposite,
    random_morphism,
)
from dgloc.constructions import iv, kv, lv, qv
from dgloc.fields import QQ


def test_composition_applies_right_factor_first(field):
    P = qv(0, field)
    vw = P.path("v", "w")
    assert (vw.source, vw.target) == ("O2", "O2")
    wv = P.path("w", "v")
    assert (wv.source, wv.target) == ("O1", "O1")
    with pytest.raises(CompositionError):
        P.gen("v").compose(P.gen("v"))


def test_qv_differential(field):
    P = qv(0, field)
    assert P.differential["u"] == P.path("v", "w") - P.identity("O2")
    expected = "v.w + 1_O2" if field.p == 2 else "v.w - 1_O2"
    assert str(P.differential["u"]) == expected


def test_leibniz_sign_on_odd_letter():
    # d(u.u) = d(u) u - u d(u) for |u| = 1
    P = qv(0, QQ)
    uu = P.path("u", "u")
    du = P.differential["u"]
    u = P.gen("u")
    assert P.d(uu) == du * u - u * du


def test_d_squared_on_presets(field):
    for n in (0, 1, -1):
        for build in (kv, qv, lv, iv):
            assert check_d_squared(build(n, field)).ok


def test_d_squared_violation_reports_residue():
    gens = [Generator("e", "X", "X", -1), Generator("a", "X", "X", 0), Generator("c", "X", "X", 1)]
    P = DgPresentation(
        ["X"], gens,
        {"a": Morphism("X", "X", -1, {("e",): QQ.one}, QQ), "c": Morphism("X", "X", 0, {("a",): QQ.one}, QQ)},
        None, QQ)
    rep = check_d_squared(P)
    assert not rep.ok
    assert [(n, str(r)) for n, r in rep.violations] == [("c", "e")]


def test_presentation_validation():
    with pytest.raises(InvalidPresentationError):
        DgPresentation(["A"], [Generator("x", "A", "B", 0)])
    with pytest.raises(UnknownGeneratorError):
        DgPresentation(["A"], [], {"x": Morphism.zero("A", "A", 0, QQ)})
    with pytest.raises(InvalidPresentationError):
        # d(y) must have degree |y| - 1
        DgPresentation(["A"], [Generator("x", "A", "A", 1), Generator("y", "A", "A", 1)],
                       {"y": Morphism("A", "A", 1, {("x",): QQ.one}, QQ)})


def test_functor_into_presentation_is_dg(field):
    # KV -> QV sending v to v is the inclusion; QV -> QV fixing everything is dg
    assert inclusion(kv(0, field), qv(0, field)).is_dg()
    P = qv(0, field)
    F = DgFunctor(P, P, {"O1": "O1", "O2": "O2"}, {n: P.gen(n) for n in P.generators})
    assert F.is_dg()
    bad = DgFunctor(P, P, {"O1": "O1", "O2": "O2"}, {"v": P.gen("v"), "w": P.gen("w"), "u": P.zero("O2", "O2", 1)})
    assert bad.dg_violations() == ["u"]


def test_derivation_twisted_leibniz():
    P = qv(0, QQ)
    ident = DgFunctor(P, P, {"O1": "O1", "O2": "O2"}, {n: P.gen(n) for n in P.generators})
    f = Derivation(ident, ident, 0, {"w": P.path("w", "v", "w")})
    rng = random.Random(3)
    for _ in range(20):
        x = random_morphism(P, rng, 3, 2)
        y = random_morphism(P, rng, 3, 2)
        if x.source != y.target:
            continue
        lhs = f(x * y)
        rhs = f(x) * y + x * f(y)
        assert lhs == rhs


def test_opposite_exchanges_left_and_right(field):
    Qop = opposite(qv(0, field), {"O1": "O2", "O2": "O1"})
    assert check_d_squared(Qop).ok
    assert find_isomorphism(Qop, lv(0, field)) is not None
    assert find_isomorphism(qv(0, field), lv(0, field)) is None


def test_find_isomorphism_basic():
    P = qv(0, QQ)
    assert find_isomorphism(P, P) is not None
    assert find_isomorphism(P, kv(0, QQ)) is None

"""Bijection checks between homotopy classes of functors and witness sets.

Each check returns a :class:`BijectionReport`.  The suite runners at the end
draw seeded instances and collect :class:`CheckRecord` entries for reports.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field as dc_field
from typing import Callable

from ..algebra import DgFunctor, DgPresentation, Morphism
from ..complexes import (
    ChainComplex,
    ChainMap,
    ComplexCategory,
    HomSpace,
    Triangle,
    cone,
    random_closed_map,
    random_complex,
)
from ..constructions import (
    cylinder,
    kill,
    kv,
    kvw,
    left_localize,
    qv,
    right_localize,
    two_sided_localize,
)
from ..fields import Field
from ..finite import (
    FiniteDgCategory,
    kv_model,
    kv_right_inverse,
    kv_two_sided_inverse,
    random_bimodule_target,
    random_complexes_target,
)
from ..linalg import Echelon, zeros
from .functors import DEFAULT_BUDGET, BudgetExceeded, enumerate_functors, homotopy_classes
from .witness import TruncatedPresentation, WitnessSet, kappa_set, lambda_set, rho_set, witness_set


class InvalidRhoElementError(Exception):
    pass


@dataclass
class BijectionReport:
    suite: str
    name: str
    left: dict
    right: dict
    matched: bool
    details: dict = dc_field(default_factory=dict)
    instance: dict | None = None

    def __bool__(self):
        return self.matched


CONSTRUCTIONS = {"kappa": kill, "rho": right_localize, "lambda": left_localize}


def _ws_summary(ws: WitnessSet) -> dict:
    return ws.summary()


def check_representability(kind: str, C: DgPresentation, v: Morphism, D, F: DgFunctor,
                           budget: int = DEFAULT_BUDGET, name: str = "") -> BijectionReport:
    """Homotopy classes of functors ``construction(C, v) -> D`` under ``F`` versus the witness set.

    Each functor ``G`` is sent to the class of ``G(w)``, ``w`` the adjoined
    generator of degree ``|v| + 1`` (kill) or ``-|v|`` (localizations).
    """
    E = CONSTRUCTIONS[kind](C, v)
    w = E.relative_generators()[0]
    functors = enumerate_functors(E, D, F.object_map, F.images, budget)
    cyl = cylinder(C, E)
    a, b = F.object_map[v.source], F.object_map[v.target]
    ws = witness_set(kind, D, F(v), a, b)
    keyf = lambda G: ws.key(G.images[w])
    classes = homotopy_classes(functors, cyl, key=keyf)
    class_keys = []
    well_defined = True
    for cls in classes:
        keys = {keyf(functors[i]) for i in cls}
        well_defined &= len(keys) == 1
        class_keys.append(keyf(functors[cls[0]]))
    valid = all(ws.contains(G.images[w]) for G in functors)
    injective = len(set(class_keys)) == len(class_keys)
    expected = ws.keys()
    surjective = set(class_keys) == expected
    matched = well_defined and valid and injective and surjective
    details = {"functors": len(functors), "classes": len(classes), "well_defined": well_defined,
               "images_valid": valid, "injective": injective, "surjective": surjective}
    return BijectionReport("representability", name or kind, {"homotopy_classes": len(classes)},
                           _ws_summary(ws), matched, details)


def check_two_sided_universal(C: DgPresentation, v: Morphism, D, G: DgFunctor,
                              budget: int = DEFAULT_BUDGET, name: str = "") -> BijectionReport:
    """``[L_v C, D]`` under ``G`` is a point when ``[G(v)]`` is invertible and empty otherwise."""
    E = two_sided_localize(C, v)
    rel = E.relative_generators()
    w, w2 = rel[0], rel[2]
    a, b = G.object_map[v.source], G.object_map[v.target]
    Gv = G(v)
    rho = rho_set(D, Gv, a, b)
    lam = lambda_set(D, Gv, a, b)
    invertible = not rho.empty and not lam.empty
    functors = enumerate_functors(E, D, G.object_map, G.images, budget)
    cyl = cylinder(C, E)
    classes = homotopy_classes(functors, cyl, key=lambda F: (rho.key(F.images[w]), lam.key(F.images[w2])))
    count = len(classes)
    matched = count == (1 if invertible else 0)
    if invertible:
        matched &= rho.torsor_dim == 0 and lam.torsor_dim == 0
    return BijectionReport("universal", name, {"homotopy_classes": count},
                           {"invertible": invertible, "rho": rho.summary(), "lambda": lam.summary()},
                           matched, {"functors": len(functors)})


# triangles


def triangle_category(T: Triangle) -> ComplexCategory:
    return ComplexCategory({"A": T.A, "B": T.B, "C": T.C, "SA": T.SA})


def comparison_map_j(T: Triangle, y: ChainMap, z: ChainMap | None = None) -> tuple[ChainMap, ChainMap]:
    """``w_z = v z + t y`` where ``d(z) = 1 - x y``; returns ``(w_z, z)``."""
    if z is None:
        target = T.B.identity() - T.x.compose(y)
        z = HomSpace(T.B, T.B).solve_d(target)
        if z is None:
            raise InvalidRhoElementError("1 - x y is not a boundary")
    return T.v.compose(z) + T.t.compose(y), z


def _homology_map_rank(src: HomSpace, dst: HomSpace, r_src: int, func) -> tuple[int, list]:
    """Rank of the map induced on homology in degree ``r_src``, plus its matrix columns."""
    cols = []
    for rep in src.representatives(r_src):
        img = func(rep)
        coords = dst.coordinates(img)
        if coords is None:
            raise ValueError("image of a cycle is not a cycle")
        cols.append({i: c for i, c in enumerate(coords) if c})
    e = Echelon(src.field)
    for c in cols:
        e.insert(c)
    return e.rank, cols


def check_killing_vs_localization(T: Triangle, limit: int = 3 ** 7, rng: random.Random | None = None,
                                  name: str = "") -> BijectionReport:
    """Compare ``rho_x`` and ``kappa_v`` for a triangle ``A -x-> B -v-> C``.

    (a) both empty or both nonempty; (b) when ``[v] = 0`` the sequence
    ``0 -> H_1(B,C) -> H_0(B,A) -> H_0(B,B) -> 0`` is exact; (c) ``j`` is a
    bijection; (d) ``j(y + s~ alpha) = j(y) + alpha`` on a basis of H_1(B,C).
    """
    rng = rng or random.Random(0)
    D = triangle_category(T)
    x, v = T.x, T.v
    R = rho_set(D, x, "A", "B")
    K = kappa_set(D, v, "B", "C")
    hBC = HomSpace(T.B, T.C)
    hBA = HomSpace(T.B, T.A)
    hBB = HomSpace(T.B, T.B)
    st = T.s_tilde
    details: dict = {}
    a_ok = R.empty == K.empty
    details["a"] = a_ok

    b_ok = True
    if hBC.is_boundary(v):
        r_phi, phi = _homology_map_rank(hBC, hBA, 1, lambda al: st.compose(al))
        r_psi, psi = _homology_map_rank(hBA, hBB, 0, lambda y: x.compose(y))
        h1, h0a, h0b = hBC.h_dim(1), hBA.h_dim(0), hBB.h_dim(0)
        comp_zero = all(hBB.is_boundary(x.compose(st.compose(al))) for al in hBC.representatives(1))
        b_ok = r_phi == h1 and r_psi == h0b and r_phi + r_psi == h0a and comp_zero
        details["b"] = {"dim_H1_BC": h1, "dim_H0_BA": h0a, "dim_H0_BB": h0b, "rank_phi": r_phi,
                        "rank_psi": r_psi, "composite_zero": comp_zero, "ok": b_ok}
    else:
        details["b"] = "not applicable: [v] != 0"

    c_ok = d_ok = True
    if not R.empty and not K.empty:
        c_ok = R.torsor_dim == K.torsor_dim
        card = K.cardinality
        if card <= limit:
            ys = R.elements()
        else:
            ys = [_random_point(R, rng) for _ in range(50)]
        images = []
        for y in ys:
            wz, z = comparison_map_j(T, y)
            c_ok &= K.contains(wz)
            images.append(K.key(wz))
        distinct = len(set(images)) == len(images)
        c_ok &= distinct
        if card <= limit:
            c_ok &= set(images) == K.keys()
        # choice independence: a second z differing by a cycle
        for zc in hBB.cycle_basis(1)[:2]:
            y0 = R.basepoint
            w1, z1 = comparison_map_j(T, y0)
            w2, _ = comparison_map_j(T, y0, z1 + zc)
            c_ok &= hBC.is_boundary(w1 - w2)
        # explicit inverse w -> s~ w
        ws = K.elements() if card <= limit else [_random_point(K, rng) for _ in range(50)]
        inverse_ok = True
        for wv in ws:
            y = st.compose(wv)
            if not R.contains(y):
                inverse_ok = False
                break
            wz, _ = comparison_map_j(T, y)
            inverse_ok &= K.key(wz) == K.key(wv)
        c_ok &= inverse_ok
        details["c"] = {"torsor_dim": K.torsor_dim, "cardinality": card, "enumerated": len(ys),
                        "distinct": distinct, "inverse": inverse_ok, "ok": c_ok}
        y0 = R.basepoint
        w0, _ = comparison_map_j(T, y0)
        for al in hBC.representatives(1):
            wa, _ = comparison_map_j(T, y0 + st.compose(al))
            d_ok &= K.key(wa) == K.key(w0 + al)
        details["d"] = d_ok
    else:
        details["c"] = "both empty" if a_ok else "emptiness mismatch"
        details["d"] = "not applicable"
    matched = a_ok and b_ok and c_ok and d_ok
    return BijectionReport("thm61", name, {"rho_x": R.summary()}, {"kappa_v": K.summary()}, matched, details)


def _random_point(ws: WitnessSet, rng: random.Random):
    x = ws.basepoint
    for dvec in ws.directions:
        c = ws.field.random(rng)
        if c:
            x = x + dvec.scale(c)
    return x


def check_rotation(T: Triangle, name: str = "") -> BijectionReport:
    """``rho`` of ``v: B -> C`` against ``lambda`` of ``x: A -> B``: emptiness and torsor dimension."""
    D = triangle_category(T)
    r = rho_set(D, T.v, "B", "C")
    l = lambda_set(D, T.x, "A", "B")
    matched = r.empty == l.empty and r.torsor_dim == l.torsor_dim
    return BijectionReport("rotation", name, {"rho_v": r.summary()}, {"lambda_x": l.summary()}, matched)


def check_drinfeld_factorization(T: Triangle, name: str = "") -> BijectionReport:
    """Killing ``x`` then ``y`` (or the reverse) against invertibility of the connecting map ``z``."""
    D = triangle_category(T)
    z = T.s
    invertible = not rho_set(D, z, "C", "SA").empty and not lambda_set(D, z, "C", "SA").empty
    kx = kappa_set(D, T.x, "A", "B")
    ky = kappa_set(D, T.v, "B", "C")

    def verdict(first: WitnessSet, second: WitnessSet) -> str:
        if first.empty or second.empty:
            return "empty"
        if first.torsor_dim == 0 and second.torsor_dim == 0:
            return "singleton"
        return "other"

    vxy, vyx = verdict(kx, ky), verdict(ky, kx)
    expected = "singleton" if invertible else "empty"
    matched = vxy == vyx == expected
    return BijectionReport("drinfeld", name, {"kappa_x": kx.summary(), "kappa_y": ky.summary()},
                           {"z_invertible": invertible, "verdict_xy": vxy, "verdict_yx": vyx}, matched)


# random triangles

TRIANGLE_KINDS = ("generic", "identity", "zero", "contractible", "split_epi")


def _small_complex(rng: random.Random, field: Field, rank_bound: int, degrees=(0, 3)) -> ChainComplex:
    # per-degree ranks up to rank_bound; never the zero complex
    X = random_complex(rng, field, max_rank=rank_bound, degrees=degrees)
    while not X.total_rank():
        X = random_complex(rng, field, max_rank=rank_bound, degrees=degrees)
    return X


def random_triangle(rng: random.Random, field: Field, rank_bound: int = 4, kind: str = "generic") -> Triangle:
    """A seeded cone triangle; ``kind`` steers toward the interesting corner cases."""
    if kind == "identity":
        A = _small_complex(rng, field, rank_bound)
        return cone(A.identity())
    if kind == "zero":
        A = _small_complex(rng, field, rank_bound)
        B = _small_complex(rng, field, rank_bound)
        return cone(A.zero_map(B, 0))
    if kind == "contractible":
        E = _small_complex(rng, field, max(1, rank_bound // 2), degrees=(0, 2))
        B = cone(E.identity()).C
        A = _small_complex(rng, field, rank_bound)
        return cone(random_closed_map(rng, A, B))
    if kind == "split_epi":
        B = _small_complex(rng, field, max(1, rank_bound // 2))
        E = _small_complex(rng, field, max(1, rank_bound // 2))
        A = B.direct_sum(E)
        e = random_closed_map(rng, E, B)
        blocks = {}
        for n in set(A.degrees()) | set(B.degrees()):
            m = zeros(field, B.rank(n), A.rank(n))
            for i in range(B.rank(n)):
                m[i, i] = field.one
            eb = e.block(n)
            m[:, B.rank(n):] = eb
            blocks[n] = m
        return cone(ChainMap(A, B, 0, blocks))
    A = _small_complex(rng, field, rank_bound)
    B = _small_complex(rng, field, rank_bound)
    return cone(random_closed_map(rng, A, B))


def triangle_trials(seed: int, field: Field, trials: int, rank_bound: int = 4):
    """Deterministic list of ``(kind, triangle)`` cycling through :data:`TRIANGLE_KINDS`."""
    out = []
    for i in range(trials):
        rng = random.Random(f"{seed}:{field.name}:{i}")
        kind = TRIANGLE_KINDS[i % len(TRIANGLE_KINDS)]
        out.append((kind, random_triangle(rng, field, rank_bound, kind)))
    return out


# standard targets for the representability and universality suites


def canonical_functor(D, field: Field, n: int = 0, v_image=None, object_map=None) -> DgFunctor:
    C = kv(n, field)
    omap = object_map or {"O1": "O1", "O2": "O2"}
    if v_image is None:
        v_image = D.find("v") if isinstance(D, FiniteDgCategory) else D.P.gen("v")
    return DgFunctor(C, D, omap, {"v": v_image})


def representability_targets(field: Field, seed: int, n: int = 0, random_targets: int = 2) -> list[tuple[str, object, DgFunctor]]:
    out = []
    for label, P in (("KVW", kvw(n, field)), ("QV", qv(n, field))):
        D = TruncatedPresentation(P, bound=6, wide_bound=10)
        out.append((label, D, canonical_functor(D, field, n)))
    for D in (kv_right_inverse(n, field), kv_two_sided_inverse(n, field)):
        out.append((D.name, D, canonical_functor(D, field, n)))
    for i in range(random_targets):
        rng = random.Random(f"{seed}:target:{i}")
        gen = random_bimodule_target if i % 2 == 0 else random_complexes_target
        rt = gen(rng, field, n, seed=i)
        out.append((rt.category.name, rt.category, canonical_functor(rt.category, field, n, rt.v_image, rt.object_map)))
    return out


def universal_targets(field: Field, seed: int, n: int = 0, random_targets: int = 5) -> list[tuple[str, object, DgFunctor]]:
    out = []
    for D in (kv_two_sided_inverse(n, field), kv_model(n, field), kv_right_inverse(n, field)):
        out.append((D.name, D, canonical_functor(D, field, n)))
    for i in range(random_targets):
        rng = random.Random(f"{seed}:universal:{i}")
        gen = random_complexes_target if i % 5 != 4 else random_bimodule_target
        rt = gen(rng, field, n, seed=i)
        out.append((rt.category.name, rt.category, canonical_functor(rt.category, field, n, rt.v_image, rt.object_map)))
    return out


# suite runners


@dataclass
class SuiteConfig:
    field: Field
    seed: int = 42
    trials: int = 20
    rank_bound: int = 4
    budget: int = DEFAULT_BUDGET
    n: int = 0


@dataclass
class CheckRecord:
    suite: str
    name: str
    passed: bool
    seconds: float
    details: dict = dc_field(default_factory=dict)
    instance: dict | None = None
    skipped: bool = False

    @property
    def status(self) -> str:
        if self.skipped:
            return "skipped"
        return "pass" if self.passed else "fail"

    def as_dict(self) -> dict:
        # timings are left out so reports are reproducible
        out = {"suite": self.suite, "name": self.name, "status": self.status, "details": self.details}
        if not self.passed and self.instance is not None:
            out["instance"] = self.instance
        return out


def _record(suite: str, name: str, fn: Callable[[], BijectionReport], instance: Callable[[], dict]) -> CheckRecord:
    t0 = time.perf_counter()
    try:
        rep = fn()
    except BudgetExceeded as exc:
        return CheckRecord(suite, name, False, time.perf_counter() - t0,
                           {"budget_exceeded": {"bound": exc.bound, "budget": exc.budget}}, None, skipped=True)
    details = {"left": rep.left, "right": rep.right, **rep.details}
    inst = None if rep.matched else instance()
    return CheckRecord(suite, name, bool(rep.matched), time.perf_counter() - t0, details, inst)


def _functor_instance(C: DgPresentation, label: str, cfg: SuiteConfig) -> dict:
    from ..dsl import print_presentation

    return {"source": print_presentation(C), "target": label, "field": cfg.field.name, "seed": cfg.seed}


def triangle_instance(T: Triangle) -> dict:
    from ..serialize import complexes_to_json

    return complexes_to_json({"A": T.A, "B": T.B}, {"x": (T.x, "A", "B")})


def _rep_suite(kind: str):
    def run(cfg: SuiteConfig) -> list[CheckRecord]:
        C = kv(cfg.n, cfg.field)
        v = C.path("v")
        return [_record(f"{kind}-rep", label,
                        lambda D=D, F=F, label=label: check_representability(kind, C, v, D, F, cfg.budget, label),
                        lambda label=label: _functor_instance(C, label, cfg))
                for label, D, F in representability_targets(cfg.field, cfg.seed, cfg.n)]
    return run


def _universal_suite(cfg: SuiteConfig) -> list[CheckRecord]:
    C = kv(cfg.n, cfg.field)
    v = C.path("v")
    return [_record("universal", label,
                    lambda D=D, G=G, label=label: check_two_sided_universal(C, v, D, G, cfg.budget, label),
                    lambda label=label: _functor_instance(C, label, cfg))
            for label, D, G in universal_targets(cfg.field, cfg.seed, cfg.n)]


def _triangle_suite(suite: str, check):
    def run(cfg: SuiteConfig) -> list[CheckRecord]:
        out = []
        for i, (kind, T) in enumerate(triangle_trials(cfg.seed, cfg.field, cfg.trials, cfg.rank_bound)):
            name = f"{kind}-{i}"
            out.append(_record(suite, name, lambda T=T, name=name: check(T, name=name),
                               lambda T=T: triangle_instance(T)))
        return out
    return run


SUITES: dict[str, Callable[[SuiteConfig], list[CheckRecord]]] = {
    "kill-rep": _rep_suite("kappa"),
    "rloc-rep": _rep_suite("rho"),
    "lloc-rep": _rep_suite("lambda"),
    "universal": _universal_suite,
    "thm61": _triangle_suite("thm61", check_killing_vs_localization),
    "rotation": _triangle_suite("rotation", check_rotation),
    "drinfeld": _triangle_suite("drinfeld", check_drinfeld_factorization),
}


def run_suite(name: str, cfg: SuiteConfig) -> list[CheckRecord]:
    if name == "all":
        return [r for key in SUITES for r in SUITES[key](cfg)]
    return SUITES[name](cfg)

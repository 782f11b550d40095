"""Builders for the standard presentations and the operations on them.

Every operation here is a pushout along a free extension of the two-object
category ``KV = k<v>``: killing adjoins ``w`` with ``d(w) = v``; right
localization adjoins ``w, u`` with ``d(u) = v w - 1``; left localization
adjoins ``w', u'`` with ``d(u') = w' v - 1``; two-sided localization adjoins
all four.  The relative cylinder of ``D`` over ``C`` doubles the relative
generators and adds a bar generator ``s_x`` for each of them.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field as dc_field
from typing import Mapping

from .algebra import (
    AlgebraError,
    DgFunctor,
    DgPresentation,
    Derivation,
    Generator,
    Morphism,
    inclusion,
)
from .fields import Field, QQ


class PushoutError(AlgebraError):
    pass


class NotACycleError(AlgebraError):
    pass


class CylinderUnavailableError(AlgebraError):
    pass


class PresetId(str, enum.Enum):
    KV = "KV"
    KVW = "KVW"
    QV = "QV"
    LV = "LV"
    IV = "IV"
    KV_RIGHT_INV = "KV_RIGHT_INV"
    KV_TWO_INV = "KV_TWO_INV"

    @classmethod
    def parse(cls, text: str) -> "PresetId":
        key = text.strip().upper().replace("-", "_")
        aliases = {"K<V>": "KV", "KVINV": "KV_TWO_INV", "KV_RINV": "KV_RIGHT_INV"}
        key = aliases.get(key, key)
        return cls(key)


def fresh_name(base: str, taken) -> str:
    if base not in taken:
        return base
    i = 1
    while f"{base}#{i}" in taken:
        i += 1
    return f"{base}#{i}"


# presets


def kv(n: int = 0, field: Field = QQ) -> DgPresentation:
    return DgPresentation(["O1", "O2"], [Generator("v", "O1", "O2", n)], {}, None, field)


def _over_kv(n: int, field: Field, extra: list[Generator], diff_fn) -> DgPresentation:
    base = kv(n, field)
    gens = list(base.generators.values()) + extra
    scaffold = DgPresentation(base.objects, gens, {}, None, field)
    return DgPresentation(base.objects, gens, diff_fn(scaffold), base, field)


def kvw(n: int = 0, field: Field = QQ) -> DgPresentation:
    return _over_kv(n, field, [Generator("w", "O1", "O2", n + 1)], lambda P: {"w": P.gen("v")})


def qv(n: int = 0, field: Field = QQ) -> DgPresentation:
    extra = [Generator("w", "O2", "O1", -n), Generator("u", "O2", "O2", 1)]
    return _over_kv(n, field, extra, lambda P: {"u": P.path("v", "w") - P.identity("O2")})


def lv(n: int = 0, field: Field = QQ) -> DgPresentation:
    extra = [Generator("w'", "O2", "O1", -n), Generator("u'", "O1", "O1", 1)]
    return _over_kv(n, field, extra, lambda P: {"u'": P.path("w'", "v") - P.identity("O1")})


def iv(n: int = 0, field: Field = QQ) -> DgPresentation:
    extra = [
        Generator("w", "O2", "O1", -n),
        Generator("u", "O2", "O2", 1),
        Generator("w'", "O2", "O1", -n),
        Generator("u'", "O1", "O1", 1),
    ]
    return _over_kv(
        n,
        field,
        extra,
        lambda P: {
            "u": P.path("v", "w") - P.identity("O2"),
            "u'": P.path("w'", "v") - P.identity("O1"),
        },
    )


def preset(pid: PresetId | str, n: int = 0, field: Field = QQ):
    """Standard presentation (or finite model) by identifier."""
    from . import finite

    pid = PresetId.parse(pid) if isinstance(pid, str) else pid
    builders = {
        PresetId.KV: kv,
        PresetId.KVW: kvw,
        PresetId.QV: qv,
        PresetId.LV: lv,
        PresetId.IV: iv,
        PresetId.KV_RIGHT_INV: finite.kv_right_inverse,
        PresetId.KV_TWO_INV: finite.kv_two_sided_inverse,
    }
    return builders[pid](n, field)


# pushouts


def _check_free_over(D: DgPresentation, C: DgPresentation, what: str) -> None:
    if D.objects != C.objects:
        raise PushoutError(f"{what}: objects differ from the base")
    for name, g in C.generators.items():
        h = D.generators.get(name)
        if h is None or (h.source, h.target, h.degree) != (g.source, g.target, g.degree):
            raise PushoutError(f"{what}: base generator {name!r} is not embedded")
        if D.differential[name] != C.differential[name]:
            raise PushoutError(f"{what}: base generator {name!r} has a different differential")


def pushout(P1: DgPresentation, P2: DgPresentation, base: DgPresentation,
            leg: DgFunctor | None = None) -> DgPresentation:
    """Glue ``P2`` (free over ``base``) onto ``P1`` along ``leg: base -> P1``.

    Without ``leg`` the base must sit inside ``P1`` by name.  The relative
    generators of ``P2`` are added to ``P1`` under fresh names and their
    differentials are transported along the leg.  The result is free over
    ``P1``.
    """
    _check_free_over(P2, base, "second leg")
    if leg is None:
        try:
            _check_free_over(P1, base, "first leg")
        except PushoutError as exc:
            raise PushoutError(f"base does not embed into the first presentation: {exc}") from None
        leg = inclusion(base, P1)
    else:
        if leg.source is not base and not leg.source.structurally_equal(base):
            raise PushoutError("leg does not start at the base")
        bad = leg.dg_violations()
        if bad:
            raise PushoutError(f"leg does not commute with differentials on {bad}")
    if P1.field != P2.field:
        raise PushoutError("presentations live over different fields")

    field = P1.field
    base_names = set(base.generators)
    relative = [n for n in P2.generators if n not in base_names]
    taken = set(P1.generators)
    rename: dict[str, str] = {}
    for n in relative:
        rename[n] = fresh_name(n, taken)
        taken.add(rename[n])
    omap = leg.object_map

    new_gens = []
    for n in relative:
        g = P2.generators[n]
        new_gens.append(Generator(rename[n], omap[g.source], omap[g.target], g.degree, g.weight))

    def transport(m: Morphism) -> Morphism:
        total = Morphism.zero(omap[m.source], omap[m.target], m.degree, field)
        for word, c in m.terms.items():
            if not word:
                img = Morphism(omap[m.source], omap[m.source], 0, {(): field.one}, field)
            else:
                img = None
                for x in word:
                    if x in base_names:
                        piece = leg.images[x]
                    else:
                        gx = P2.generators[x]
                        piece = Morphism(omap[gx.source], omap[gx.target], gx.degree, {(rename[x],): field.one}, field)
                    img = piece if img is None else img.compose(piece)
            total = total + img.scale(c)
        return total

    diff = dict(P1.differential)
    for n in relative:
        diff[rename[n]] = transport(P2.differential[n])
    gens = list(P1.generators.values()) + new_gens
    return DgPresentation(P1.objects, gens, diff, P1, field)


def _leg_for(C: DgPresentation, v: Morphism) -> DgFunctor:
    if not C.d(v).is_zero():
        raise NotACycleError(f"{v} is not closed: d = {C.d(v)}")
    C.check_morphism(v)
    base = kv(v.degree, C.field)
    return DgFunctor(base, C, {"O1": v.source, "O2": v.target}, {"v": v})


def kill(C: DgPresentation, v: Morphism) -> DgPresentation:
    """``C/v``: adjoin ``w`` of degree ``|v| + 1`` with ``d(w) = v``."""
    leg = _leg_for(C, v)
    return pushout(C, kvw(v.degree, C.field), leg.source, leg)


def right_localize(C: DgPresentation, v: Morphism) -> DgPresentation:
    """``R_v(C)``: adjoin ``w`` and ``u`` with ``d(u) = v w - 1``."""
    leg = _leg_for(C, v)
    return pushout(C, qv(v.degree, C.field), leg.source, leg)


def left_localize(C: DgPresentation, v: Morphism) -> DgPresentation:
    """``L_v(C)``: adjoin ``w'`` and ``u'`` with ``d(u') = w' v - 1``."""
    leg = _leg_for(C, v)
    return pushout(C, lv(v.degree, C.field), leg.source, leg)


def two_sided_localize(C: DgPresentation, v: Morphism) -> DgPresentation:
    """Derived localization: pushout along ``KV -> IV``."""
    leg = _leg_for(C, v)
    return pushout(C, iv(v.degree, C.field), leg.source, leg)


# weights


@dataclass
class WeightReport:
    ok: bool
    weights: dict[str, int] = dc_field(default_factory=dict)
    cycle: list[str] = dc_field(default_factory=list)
    message: str = ""

    def __bool__(self):
        return self.ok


def _dependency_cycle(P: DgPresentation, nodes: set[str]) -> list[str]:
    graph = {n: sorted({x for w in P.differential[n].terms for x in w}) for n in P.generators}
    # Tarjan's SCC, then a simple cycle inside the first non-trivial component touching ``nodes``
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    stack: list[str] = []
    on: set[str] = set()
    comps: list[list[str]] = []
    counter = [0]

    def strong(v: str):
        index[v] = low[v] = counter[0]
        counter[0] += 1
        stack.append(v)
        on.add(v)
        for w in graph[v]:
            if w not in index:
                strong(w)
                low[v] = min(low[v], low[w])
            elif w in on:
                low[v] = min(low[v], index[w])
        if low[v] == index[v]:
            comp = []
            while True:
                w = stack.pop()
                on.discard(w)
                comp.append(w)
                if w == v:
                    break
            comps.append(comp)

    for v in P.generators:
        if v not in index:
            strong(v)
    for comp in comps:
        cs = set(comp)
        if len(comp) == 1 and comp[0] not in graph[comp[0]]:
            continue
        if not (cs & nodes):
            continue
        start = min(cs & nodes)
        path = [start]
        seen = {start}
        cur = start
        while True:
            nxt = [w for w in graph[cur] if w in cs]
            if start in nxt and len(path) > 0 and (cur != start or start in graph[start]):
                if cur != start or len(path) == 1:
                    return path
            step = next((w for w in nxt if w not in seen), None)
            if step is None:
                return path
            path.append(step)
            seen.add(step)
            cur = step
    return sorted(nodes)


def solve_weights(P: DgPresentation, strict: set[str], fixed: Mapping[str, int] | None = None) -> WeightReport:
    """Minimal weights ``>= 1`` with ``weight(path) <= weight(g) - [g strict]`` for every path in ``d(g)``.

    Generators in ``fixed`` keep their weight.  Relaxation runs round by round
    over the dependency graph; if it has not settled after ``#generators + 1``
    rounds some dependency cycle gains weight, and that cycle is reported.
    """
    fixed = dict(fixed or {})
    w = {n: fixed.get(n, 1) for n in P.generators}
    names = list(P.generators)
    changed: set[str] = set()
    for _ in range(len(names) + 2):
        changed = set()
        for n in names:
            need = 1 if n not in fixed else 0
            for word in P.differential[n].terms:
                need = max(need, sum(w[x] for x in word) + (1 if n in strict else 0))
            if need > w[n]:
                if n in fixed:
                    cyc = _dependency_cycle(P, {n})
                    return WeightReport(False, w, cyc, f"fixed weight of {n!r} is too small (needs {need})")
                w[n] = need
                changed.add(n)
        if not changed:
            return WeightReport(True, w)
    cyc = _dependency_cycle(P, changed)
    return WeightReport(False, w, cyc, "no strictly decreasing weight assignment exists")


def check_relative_cofibrancy(C: DgPresentation, D: DgPresentation) -> WeightReport:
    """Find (or validate) a weight filtration exhibiting ``D`` as cofibrant over ``C``.

    Weights already set on generators of ``D`` are respected; the rest are
    assigned automatically.  Base generators get weights too (so truncations
    are finite) but only need a weakly decreasing differential.
    """
    try:
        _check_free_over(D, C, "cofibrancy")
    except PushoutError as exc:
        return WeightReport(False, message=str(exc))
    strict = set(D.generators) - set(C.generators)
    fixed = {n: g.weight for n, g in D.generators.items() if g.weight is not None}
    return solve_weights(D, strict, fixed)


def filtration_weights(P: DgPresentation) -> WeightReport:
    """Weights for which ``d`` never raises weight; used for truncations.

    Explicit weights are checked (weak decrease suffices); missing ones are
    filled in with relative generators strictly decreasing.
    """
    fixed = {n: g.weight for n, g in P.generators.items() if g.weight is not None}
    if len(fixed) == len(P.generators):
        for n, dg in P.differential.items():
            for word in dg.terms:
                if sum(fixed[x] for x in word) > fixed[n]:
                    return WeightReport(False, fixed, _dependency_cycle(P, {n}), f"d({n}) raises weight")
        return WeightReport(True, fixed)
    strict = set(P.relative_generators())
    return solve_weights(P, strict, fixed)


# the relative cylinder


@dataclass
class Cylinder:
    """The ``C``-relative cylinder of ``D`` with its structure maps."""

    presentation: DgPresentation
    base: DgPresentation
    D: DgPresentation
    first: dict[str, str]
    second: dict[str, str]
    bar: dict[str, str]
    weights: dict[str, int]
    i1: DgFunctor
    i2: DgFunctor
    fold: DgFunctor
    f: Derivation


def cylinder(C: DgPresentation, D: DgPresentation) -> Cylinder:
    """Relative cylinder ``C_C(D)``: ``d(s_x) = x1 - x2 - f(dx)``."""
    try:
        _check_free_over(D, C, "cylinder")
    except PushoutError as exc:
        raise CylinderUnavailableError(str(exc)) from None
    report = check_relative_cofibrancy(C, D)
    if not report.ok:
        raise CylinderUnavailableError(f"D is not cofibrant over C: {report.message} (cycle {report.cycle})")
    weights = report.weights
    field = D.field
    base_names = list(C.generators)
    relative = [n for n in D.generators if n not in C.generators]
    taken = set(D.generators)
    first = {n: n for n in relative}
    second, bar = {}, {}
    for n in relative:
        second[n] = fresh_name(n + "'", taken)
        taken.add(second[n])
    for n in relative:
        bar[n] = fresh_name("s_" + n, taken)
        taken.add(bar[n])

    gens: list[Generator] = []
    for n in base_names:
        gens.append(D.generators[n].with_weight(weights[n]))
    for copy in (first, second):
        for n in relative:
            g = D.generators[n]
            gens.append(Generator(copy[n], g.source, g.target, g.degree, weights[n]))
    for n in relative:
        g = D.generators[n]
        gens.append(Generator(bar[n], g.source, g.target, g.degree + 1, weights[n]))

    def copy_functor(target: DgPresentation, copy: dict[str, str]) -> DgFunctor:
        imgs = {n: target.gen(n) for n in base_names}
        imgs.update({n: target.gen(copy[n]) for n in relative})
        return DgFunctor(D, target, {o: o for o in D.objects}, imgs)

    scaffold = DgPresentation(D.objects, gens, {}, None, field)
    j1, j2 = copy_functor(scaffold, first), copy_functor(scaffold, second)
    diff: dict[str, Morphism] = {n: D.differential[n] for n in base_names}
    for n in relative:
        diff[first[n]] = j1(D.differential[n])
        diff[second[n]] = j2(D.differential[n])
    f0 = Derivation(j1, j2, 1, {n: scaffold.gen(bar[n]) for n in relative})
    for n in relative:
        diff[bar[n]] = scaffold.gen(first[n]) - scaffold.gen(second[n]) - f0(D.differential[n])

    cyl = DgPresentation(D.objects, gens, diff, C, field)
    i1, i2 = copy_functor(cyl, first), copy_functor(cyl, second)
    fold_imgs = {n: D.gen(n) for n in base_names}
    for n in relative:
        fold_imgs[first[n]] = D.gen(n)
        fold_imgs[second[n]] = D.gen(n)
        g = D.generators[n]
        fold_imgs[bar[n]] = D.zero(g.source, g.target, g.degree + 1)
    fold = DgFunctor(cyl, D, {o: o for o in D.objects}, fold_imgs)
    f = Derivation(i1, i2, 1, {n: cyl.gen(bar[n]) for n in relative})
    all_weights = {g.name: g.weight for g in gens}
    return Cylinder(cyl, C, D, first, second, bar, all_weights, i1, i2, fold, f)


@dataclass
class BracketCheck:
    sample: Morphism
    lhs: Morphism
    rhs: Morphism

    @property
    def ok(self) -> bool:
        return (self.lhs - self.rhs).is_zero()


def bracket_identity_check(cyl: Cylinder, samples) -> list[BracketCheck]:
    """Check ``d(f(x)) + f(d(x)) = x1 - x2`` on each sample morphism of ``D``."""
    out = []
    P, D = cyl.presentation, cyl.D
    for x in samples:
        lhs = P.d(cyl.f(x)) + cyl.f(D.d(x))
        rhs = cyl.i1(x) - cyl.i2(x)
        out.append(BracketCheck(x, lhs, rhs))
    return out

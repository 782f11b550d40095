"""Enumerating dg functors out of a presentation and deciding homotopy.

A functor extending a fixed one on the base is built generator by
generator in weight order: once the images of everything in ``d(g)`` are
known, the admissible images of ``g`` form the affine space
``{X : d(X) = F(d g)}``, and we branch over its points.  Quadratic
constraints such as ``d(u) = v w - 1`` are thereby linear at the moment
they are met.

Homotopies go through the relative cylinder.  Because each term of
``f(d s)`` contains exactly one bar generator, the conditions on the
unknown images ``H(s_bar)`` form one joint linear system.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from ..algebra import AlgebraError, DgFunctor, DgPresentation, Morphism
from ..constructions import Cylinder, filtration_weights
from ..linalg import affine_points, axpy, solve
from .witness import combine, target_basis


class BudgetExceeded(AlgebraError):
    def __init__(self, bound: int, budget: int):
        super().__init__(f"search space of {bound} tuples exceeds the budget {budget}")
        self.bound = bound
        self.budget = budget


class InfiniteEnumerationError(AlgebraError):
    pass


DEFAULT_BUDGET = 10 ** 7


def _evaluate(P: DgPresentation, D, object_map, images: Mapping[str, object], m: Morphism):
    src, tgt = object_map[m.source], object_map[m.target]
    total = D.zero(src, tgt, m.degree)
    for word, c in m.terms.items():
        if not word:
            img = D.identity(src)
        else:
            img = images[word[0]]
            for x in word[1:]:
                img = D.compose(img, images[x])
        total = total + img.scale(c)
    return total


def generator_order(P: DgPresentation, names: Sequence[str]) -> list[str]:
    """Relative generators sorted so each comes after everything in its differential."""
    rep = filtration_weights(P)
    if not rep.ok:
        raise AlgebraError(f"no weight filtration: {rep.message}")
    pos = {n: i for i, n in enumerate(P.generators)}
    return sorted(names, key=lambda n: (rep.weights[n], pos[n]))


def search_bound(P: DgPresentation, D, object_map, names: Sequence[str]) -> int:
    """Upper bound on the number of tuples: product of ``q^dim Z`` over generators."""
    from ..linalg import kernel

    field = D.field
    total = 1
    for n in names:
        g = P.generators[n]
        basis = target_basis(D, object_map[g.source], object_map[g.target], g.degree)
        dim = len(kernel([D.d(x).vector() for x in basis], field))
        if dim:
            if not field.is_finite:
                return -1
            total *= field.p ** dim
    return total


def enumerate_functors(P: DgPresentation, D, object_map: Mapping[str, str], base_images: Mapping[str, object],
                       budget: int = DEFAULT_BUDGET) -> list[DgFunctor]:
    """Every dg functor ``P -> D`` that agrees with ``base_images`` on the base.

    Generators of ``P`` missing from ``base_images`` are the unknowns.
    """
    rel = [n for n in P.generators if n not in base_images]
    order = generator_order(P, rel)
    bound = search_bound(P, D, object_map, order)
    if bound < 0:
        raise InfiniteEnumerationError("positive-dimensional solution spaces over Q cannot be enumerated")
    if bound > budget:
        raise BudgetExceeded(bound, budget)
    field = D.field
    plans = []
    for n in order:
        g = P.generators[n]
        a, b = object_map[g.source], object_map[g.target]
        basis = target_basis(D, a, b, g.degree)
        cols = [D.d(x).vector() for x in basis]
        plans.append((n, a, b, g.degree, basis, cols))

    out: list[DgFunctor] = []
    images = dict(base_images)

    def step(i: int):
        if i == len(plans):
            out.append(DgFunctor(P, D, object_map, dict(images)))
            return
        n, a, b, deg, basis, cols = plans[i]
        rhs = _evaluate(P, D, object_map, images, P.differential[n])
        part, ker = solve(cols, rhs.vector(), field)
        if part is None:
            return
        for pt in affine_points(part, ker, field):
            images[n] = combine(D, a, b, deg, basis, pt)
            step(i + 1)
        images.pop(n, None)

    step(0)
    return out


@dataclass
class HomotopyResult:
    homotopic: bool
    witness: dict | None
    exhaustive: bool

    def __bool__(self):
        return self.homotopic


def are_homotopic(F1: DgFunctor, F2: DgFunctor, cyl: Cylinder) -> HomotopyResult:
    """Look for ``H`` on the cylinder restricting to ``F1`` and ``F2``.

    The unknowns are ``H(s_bar)``; the equations
    ``d H(s_bar) + H(f(d s)) = F1(s) - F2(s)`` are linear in them jointly.
    For truncated targets the unknowns range over the wide basis, so a
    negative answer is only certain when the target is not truncated.
    """
    D = F1.target
    C, P = cyl.base, cyl.D
    omap = F1.object_map
    field = D.field
    for n in C.generators:
        if not (F1.images[n] - F2.images[n]).is_zero():
            raise AlgebraError(f"functors differ on the base generator {n!r}")
    rel = [n for n in P.generators if n not in C.generators]
    images = {n: F1.images[n] for n in C.generators}
    for n in rel:
        images[cyl.first[n]] = F1.images[n]
        images[cyl.second[n]] = F2.images[n]
    fds = {n: cyl.f(P.differential[n]) for n in rel}
    unknowns = []
    zero_bars = {}
    for n in rel:
        g = P.generators[n]
        a, b = omap[g.source], omap[g.target]
        zero_bars[cyl.bar[n]] = D.zero(a, b, g.degree + 1)
        for e in target_basis(D, a, b, g.degree + 1, wide=True):
            unknowns.append((n, e))
    Q = cyl.presentation
    cols = []
    for n, e in unknowns:
        col: dict = {}
        for k, v in D.d(e).vector().items():
            col[(n, k)] = v
        imgs = dict(images)
        imgs.update(zero_bars)
        imgs[cyl.bar[n]] = e
        for m in rel:
            if fds[m].is_zero():
                continue
            val = _evaluate(Q, D, omap, imgs, fds[m])
            for k, v in val.vector().items():
                axpy(col, field.one, {(m, k): v})
        cols.append(col)
    rhs: dict = {}
    for m in rel:
        diff = F1.images[m] - F2.images[m]
        for k, v in diff.vector().items():
            rhs[(m, k)] = v
    part, _ = solve(cols, rhs, field)
    exhaustive = not getattr(D, "truncated", False)
    if part is None:
        return HomotopyResult(False, None, exhaustive)
    H = {}
    for n in rel:
        g = P.generators[n]
        H[cyl.bar[n]] = D.zero(omap[g.source], omap[g.target], g.degree + 1)
    for i, c in part.items():
        n, e = unknowns[i]
        H[cyl.bar[n]] = H[cyl.bar[n]] + e.scale(c)
    return HomotopyResult(True, H, exhaustive)


def homotopy_classes(functors: Sequence[DgFunctor], cyl: Cylinder, key=None) -> list[list[int]]:
    """Partition functor indices into homotopy classes.

    With ``key`` (a guess for the class, e.g. the class of an image), each
    functor is tested against the first member of its key group and the
    group leaders are tested pairwise; groups are split or merged as the
    homotopy tests dictate.  Without it every pair is tested.
    """
    n = len(functors)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i, j):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)

    if key is None:
        for i in range(n):
            for j in range(i + 1, n):
                if find(i) != find(j) and are_homotopic(functors[i], functors[j], cyl):
                    union(i, j)
    else:
        groups: dict = {}
        for i, F in enumerate(functors):
            groups.setdefault(key(F), []).append(i)
        leaders = []
        for members in groups.values():
            lead = members[0]
            leaders.append(lead)
            for j in members[1:]:
                if are_homotopic(functors[lead], functors[j], cyl):
                    union(lead, j)
                else:
                    leaders.append(j)
        for x in range(len(leaders)):
            for y in range(x + 1, len(leaders)):
                i, j = leaders[x], leaders[y]
                if find(i) != find(j) and are_homotopic(functors[i], functors[j], cyl):
                    union(i, j)
    classes: dict = {}
    for i in range(n):
        classes.setdefault(find(i), []).append(i)
    return list(classes.values())

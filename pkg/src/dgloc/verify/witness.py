"""Witness sets: morphisms killing, right-inverting or left-inverting ``F(v)``.

All three sets are affine subspaces of a hom-space taken modulo boundaries,
so each is described by a basepoint, a list of directions and an echelon
basis of the boundaries.  Elements are compared through canonical coset
representatives (:meth:`WitnessSet.key`).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from typing import Sequence

from ..algebra import DgPresentation, Morphism
from ..fields import Field
from ..homology import enumerate_paths, _weights_for
from ..linalg import Echelon, axpy, kernel, solve


def target_basis(D, a: str, b: str, degree: int, wide: bool = False) -> list:
    return D.hom_basis(a, b, degree, wide=wide)


def combine(D, a: str, b: str, degree: int, basis: Sequence, coeffs: dict):
    out = D.zero(a, b, degree)
    for i, c in sorted(coeffs.items()):
        out = out + basis[i].scale(c)
    return out


def boundary_echelon(D, a: str, b: str, degree: int) -> Echelon:
    """Echelon basis of ``B_degree Hom(a, b)`` (from the wide basis of truncated targets)."""
    e = Echelon(D.field)
    for x in target_basis(D, a, b, degree + 1, wide=True):
        e.insert(D.d(x).vector())
    return e


@dataclass
class WitnessSet:
    """An affine space of classes (or the empty set).

    ``torsor_dim`` is the dimension of the group acting freely and
    transitively on the classes; over F_q the set has ``q ** torsor_dim``
    elements.
    """

    kind: str
    field: Field
    basepoint: object | None
    directions: list = dc_field(default_factory=list)
    boundaries: Echelon | None = None
    hom: tuple = ()
    truncated: bool = False

    @property
    def empty(self) -> bool:
        return self.basepoint is None

    @property
    def status(self) -> str:
        return "empty" if self.empty else "nonempty"

    @property
    def torsor_dim(self) -> int:
        return 0 if self.empty else len(self.directions)

    @property
    def cardinality(self) -> int | None:
        if self.empty:
            return 0
        if not self.field.is_finite:
            return 1 if not self.directions else None
        return self.field.p ** len(self.directions)

    def key(self, element) -> tuple:
        vec = element if isinstance(element, dict) else element.vector()
        return self.boundaries.canonical(vec)

    def contains(self, element) -> bool:
        """Whether ``element`` lies in ``basepoint + span(directions) + boundaries``."""
        if self.empty:
            return False
        vec = dict(element if isinstance(element, dict) else element.vector())
        axpy(vec, -self.field.one, self.basepoint.vector())
        e = Echelon(self.field)
        for b in self.boundaries.basis():
            e.insert(b)
        for dvec in self.directions:
            e.insert(dvec.vector())
        return e.contains(vec)

    def elements(self, limit: int | None = None) -> list:
        """All elements ``basepoint + sum c_i direction_i`` (over a finite field)."""
        if self.empty:
            return []
        if not self.field.is_finite:
            if self.directions:
                raise ValueError("infinitely many classes over Q")
            return [self.basepoint]
        card = self.cardinality
        if limit is not None and card > limit:
            raise ValueError(f"{card} elements exceed the limit {limit}")
        out = []
        scalars = list(self.field.elements())
        for cs in itertools.product(scalars, repeat=len(self.directions)):
            x = self.basepoint
            for c, dvec in zip(cs, self.directions):
                if c:
                    x = x + dvec.scale(c)
            out.append(x)
        return out

    def keys(self, limit: int | None = None) -> set:
        return {self.key(x) for x in self.elements(limit)}

    def summary(self) -> dict:
        return {"kind": self.kind, "status": self.status, "torsor_dim": self.torsor_dim,
                "cardinality": self.cardinality, "truncated": self.truncated,
                "basepoint": None if self.empty else describe(self.basepoint)}


def describe(element):
    """JSON-friendly exact description of a target element."""
    blocks = getattr(element, "blocks", None)
    if blocks is None:
        return str(element)
    fmt = element.field.format
    return {"degree": element.degree,
            "blocks": {str(n): [[fmt(m[i, j]) for j in range(m.shape[1])] for i in range(m.shape[0])]
                       for n, m in sorted(blocks.items())}}


def _from_solution(kind, D, a, b, degree, basis, part, dirs, truncated) -> WitnessSet:
    field = D.field
    bnd = boundary_echelon(D, a, b, degree)
    if part is None:
        return WitnessSet(kind, field, None, [], bnd, (a, b, degree), truncated)
    base = combine(D, a, b, degree, basis, part)
    probe = Echelon(field)
    for vec in bnd.basis():
        probe.insert(vec)
    kept = []
    for dvec in dirs:
        elem = combine(D, a, b, degree, basis, dvec)
        res, _ = probe.reduce(elem.vector())
        if res:
            probe.insert(res)
            kept.append(elem)
    return WitnessSet(kind, field, base, kept, bnd, (a, b, degree), truncated)


def kappa_set(D, Fv, a: str | None = None, b: str | None = None) -> WitnessSet:
    """``{w : d(w) = F(v)}`` modulo boundaries, in Hom_{n+1}(F O1, F O2)."""
    a = a if a is not None else _obj(Fv, "source")
    b = b if b is not None else _obj(Fv, "target")
    deg = Fv.degree + 1
    basis = target_basis(D, a, b, deg)
    cols = [D.d(x).vector() for x in basis]
    part, ker = solve(cols, Fv.vector(), D.field)
    return _from_solution("kappa", D, a, b, deg, basis, part, ker, getattr(D, "truncated", False))


def _inverse_set(kind: str, D, Fv, a: str, b: str) -> WitnessSet:
    # rho: y in Z(b, a) with [Fv y] = [1_b];  lambda: y with [y Fv] = [1_a]
    field = D.field
    deg = -Fv.degree
    basis = target_basis(D, b, a, deg)
    cyc = kernel([D.d(x).vector() for x in basis], field)
    cycles = [combine(D, b, a, deg, basis, z) for z in cyc]
    end = b if kind == "rho" else a
    bnd_basis = target_basis(D, end, end, 1, wide=True)
    cols = []
    for z in cycles:
        prod = D.compose(Fv, z) if kind == "rho" else D.compose(z, Fv)
        cols.append(prod.vector())
    for e in bnd_basis:
        cols.append((-D.d(e)).vector())
    part, ker = solve(cols, D.identity(end).vector(), field)
    k = len(cycles)

    def project(vec):
        out = {}
        for i, c in vec.items():
            if i < k:
                axpy(out, c, cyc[i])
        return out

    p = None if part is None else project(part)
    dirs = [project(v) for v in ker]
    return _from_solution(kind, D, b, a, deg, basis, p, [d for d in dirs if d], getattr(D, "truncated", False))


def rho_set(D, Fv, a: str | None = None, b: str | None = None) -> WitnessSet:
    """Homotopy right inverses of ``F(v)``: ``[F(v) y] = [1]`` in H_0 End(F O2)."""
    a = a if a is not None else _obj(Fv, "source")
    b = b if b is not None else _obj(Fv, "target")
    return _inverse_set("rho", D, Fv, a, b)


def lambda_set(D, Fv, a: str | None = None, b: str | None = None) -> WitnessSet:
    """Homotopy left inverses of ``F(v)``: ``[y F(v)] = [1]`` in H_0 End(F O1)."""
    a = a if a is not None else _obj(Fv, "source")
    b = b if b is not None else _obj(Fv, "target")
    return _inverse_set("lambda", D, Fv, a, b)


def witness_set(kind: str, D, Fv, a: str | None = None, b: str | None = None) -> WitnessSet:
    return {"kappa": kappa_set, "rho": rho_set, "lambda": lambda_set}[kind](D, Fv, a, b)


def _obj(x, attr: str) -> str:
    val = getattr(x, attr)
    if isinstance(val, str):
        return val
    raise TypeError("pass object names explicitly for this target")


class TruncatedPresentation:
    """A free presentation used as a functor target, with weight-bounded hom bases.

    Arithmetic is exact in the full free category; only the bases offered to
    the linear solvers are cut off, at ``bound`` for images and at
    ``wide_bound`` for boundaries and homotopies.  Anything found is therefore
    a genuine solution, while "not found" means "not found below the bound"
    unless the quiver has no oriented cycles (then every hom-space is finite
    and already exhausted).
    """

    def __init__(self, P: DgPresentation, bound: int = 6, wide_bound: int = 10, weights=None):
        self.P = P
        self.field = P.field
        self.objects = P.objects
        self.bound = bound
        self.wide_bound = wide_bound
        self.weights = _weights_for(P, weights)
        self.truncated = _has_oriented_cycle(P)
        self._paths: dict = {}

    def identity(self, obj):
        return self.P.identity(obj)

    def zero(self, a, b, degree):
        return self.P.zero(a, b, degree)

    def compose(self, x, y):
        return x.compose(y)

    def d(self, x):
        return self.P.d(x)

    def hom_basis(self, a: str, b: str, degree: int, wide: bool = False) -> list[Morphism]:
        W = self.wide_bound if wide else self.bound
        key = (a, b, degree, W)
        if key not in self._paths:
            paths = enumerate_paths(self.P, a, b, W, self.weights, (degree, degree))
            self._paths[key] = [Morphism(a, b, degree, {word: self.field.one}, self.field) for _, word, _ in paths]
        return self._paths[key]


def _has_oriented_cycle(P: DgPresentation) -> bool:
    graph = {o: {g.target for g in P.arrows_from[o]} for o in P.objects}
    state: dict = {}

    def visit(o) -> bool:
        state[o] = 1
        for t in graph[o]:
            if state.get(t) == 1 or (t not in state and visit(t)):
                return True
        state[o] = 2
        return False

    return any(o not in state and visit(o) for o in P.objects)

"""Bounded chain complexes of finite-rank free modules over a field.

Sign conventions (chosen together so the cone triangle has explicit
witnesses with ``h = 0``):

* ``(Sigma X)_n = X_{n-1}`` with ``d_{Sigma X} = -d_X``; the suspension
  ``sigma_X: X -> Sigma X`` is the identity matrices, a closed map of degree 1;
* hom differential ``d(f) = d_Y f - (-1)^|f| f d_X``, composition without signs;
* ``Cone(x)_n = A_{n-1} + B_n`` with ``d = [[-d_A, 0], [x, d_B]]``.

Maps into a suspension are turned back into maps into the unsuspended
complex by composing with ``sigma^-1`` (same matrices, degree one lower).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .algebra import AlgebraError
from .fields import Field
from .homology import FiniteComplex, HomologyReport, homology
from .linalg import as_matrix, columns_of, eye, is_zero, kernel, matmul, solve, zeros


class InvalidTriangleError(AlgebraError):
    pass


class ComplexError(AlgebraError):
    pass


class ChainComplex:
    """``ranks[n]`` is the rank in degree ``n``; ``diffs[n]`` is ``d_n: X_n -> X_{n-1}``."""

    def __init__(self, field: Field, ranks: Mapping[int, int], diffs: Mapping[int, np.ndarray] | None = None,
                 check: bool = True):
        self.field = field
        self.ranks = {n: r for n, r in ranks.items() if r > 0}
        self.diffs: dict[int, np.ndarray] = {}
        for n, m in (diffs or {}).items():
            shape = (self.rank(n - 1), self.rank(n))
            if m.shape != shape:
                raise ComplexError(f"d_{n} has shape {m.shape}, expected {shape}")
            if m.size and not is_zero(m):
                self.diffs[n] = m
        if check:
            for n in self.diffs:
                if n - 1 in self.diffs and not is_zero(matmul(field, self.diffs[n - 1], self.diffs[n])):
                    raise ComplexError(f"d_{n - 1} d_{n} != 0")

    def rank(self, n: int) -> int:
        return self.ranks.get(n, 0)

    def degrees(self) -> list[int]:
        return sorted(self.ranks)

    def differential(self, n: int) -> np.ndarray:
        m = self.diffs.get(n)
        return m if m is not None else zeros(self.field, self.rank(n - 1), self.rank(n))

    def identity(self) -> "ChainMap":
        return ChainMap(self, self, 0, {n: eye(self.field, r) for n, r in self.ranks.items()})

    def zero_map(self, other: "ChainComplex", degree: int) -> "ChainMap":
        return ChainMap(self, other, degree, {})

    def shift(self) -> "ChainComplex":
        return shift(self)

    def total_rank(self) -> int:
        return sum(self.ranks.values())

    def __eq__(self, other):
        if not isinstance(other, ChainComplex):
            return NotImplemented
        if self.field != other.field or self.ranks != other.ranks:
            return False
        return all(np.array_equal(self.differential(n), other.differential(n)) for n in self.ranks)

    def __hash__(self):
        return hash((self.field, tuple(sorted(self.ranks.items()))))

    def __repr__(self):
        return f"ChainComplex(ranks={dict(sorted(self.ranks.items()))})"

    def direct_sum(self, other: "ChainComplex") -> "ChainComplex":
        ranks = {n: self.rank(n) + other.rank(n) for n in set(self.ranks) | set(other.ranks)}
        diffs = {n: _block_diag(self.field, self.differential(n), other.differential(n)) for n in ranks}
        return ChainComplex(self.field, ranks, diffs)


def _block_diag(field, a, b):
    out = zeros(field, a.shape[0] + b.shape[0], a.shape[1] + b.shape[1])
    out[: a.shape[0], : a.shape[1]] = a
    out[a.shape[0]:, a.shape[1]:] = b
    return out


class ChainMap:
    """Degree-``r`` map of graded modules ``X -> Y``; ``blocks[n]: X_n -> Y_{n+r}``.

    Closedness is a predicate (:meth:`is_closed`), not an invariant, so these
    are general elements of the hom-complex.
    """

    def __init__(self, source: ChainComplex, target: ChainComplex, degree: int, blocks: Mapping[int, np.ndarray]):
        self.source = source
        self.target = target
        self.degree = degree
        self.field = source.field
        self.blocks: dict[int, np.ndarray] = {}
        for n, m in blocks.items():
            shape = (target.rank(n + degree), source.rank(n))
            if m.shape != shape:
                raise ComplexError(f"block {n} has shape {m.shape}, expected {shape}")
            if m.size and not is_zero(m):
                self.blocks[n] = m

    def block(self, n: int) -> np.ndarray:
        m = self.blocks.get(n)
        return m if m is not None else zeros(self.field, self.target.rank(n + self.degree), self.source.rank(n))

    def is_zero(self) -> bool:
        return not self.blocks

    def __bool__(self):
        return bool(self.blocks)

    def _check(self, other: "ChainMap"):
        if self.source is not other.source and self.source != other.source:
            raise ComplexError("maps have different sources")
        if self.target is not other.target and self.target != other.target:
            raise ComplexError("maps have different targets")
        if self.degree != other.degree and self.blocks and other.blocks:
            raise ComplexError(f"cannot add maps of degrees {self.degree} and {other.degree}")

    def __add__(self, other: "ChainMap") -> "ChainMap":
        self._check(other)
        if not other.blocks:
            return self
        if not self.blocks:
            return other
        out = {}
        for n in set(self.blocks) | set(other.blocks):
            out[n] = self.block(n) + other.block(n)
        return ChainMap(self.source, self.target, self.degree, out)

    def __neg__(self):
        return ChainMap(self.source, self.target, self.degree, {n: -m for n, m in self.blocks.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "ChainMap":
        c = self.field(c)
        return ChainMap(self.source, self.target, self.degree, {n: m * c for n, m in self.blocks.items()} if c else {})

    def __mul__(self, other):
        if isinstance(other, ChainMap):
            return self.compose(other)
        return self.scale(other)

    def __rmul__(self, c):
        return self.scale(c)

    def compose(self, other: "ChainMap") -> "ChainMap":
        """``self o other``."""
        if other.target is not self.source and other.target != self.source:
            raise ComplexError("maps are not composable")
        out = {}
        for n, m in other.blocks.items():
            x = self.blocks.get(n + other.degree)
            if x is not None:
                out[n] = matmul(self.field, x, m)
        return ChainMap(other.source, self.target, self.degree + other.degree, out)

    def hom_d(self) -> "ChainMap":
        """``d_Y f - (-1)^|f| f d_X`` as a map of degree ``|f| - 1``."""
        r = self.degree
        sign = -1 if r % 2 else 1
        out = {}
        X, Y = self.source, self.target
        for n in set(self.blocks) | {n + 1 for n in self.blocks}:
            term = zeros(self.field, Y.rank(n + r - 1), X.rank(n))
            f = self.blocks.get(n)
            if f is not None:
                term = term + matmul(self.field, Y.differential(n + r), f)
            g = self.blocks.get(n - 1)
            if g is not None:
                term = term - matmul(self.field, g, X.differential(n)) * sign
            out[n] = term
        return ChainMap(X, Y, r - 1, out)

    d = hom_d

    def is_closed(self) -> bool:
        return self.hom_d().is_zero()

    def coordinates(self) -> dict:
        """Sparse vector on the matrix-unit basis, keys ``(n, i, j)``."""
        out = {}
        for n, m in self.blocks.items():
            for i in range(m.shape[0]):
                for j in range(m.shape[1]):
                    if m[i, j]:
                        out[(n, i, j)] = m[i, j]
        return out

    vector = coordinates

    @classmethod
    def from_coordinates(cls, source: ChainComplex, target: ChainComplex, degree: int, coords: Mapping) -> "ChainMap":
        blocks: dict[int, np.ndarray] = {}
        for (n, i, j), c in coords.items():
            if n not in blocks:
                blocks[n] = zeros(source.field, target.rank(n + degree), source.rank(n))
            blocks[n][i, j] = blocks[n][i, j] + c
        return cls(source, target, degree, blocks)

    def __eq__(self, other):
        if not isinstance(other, ChainMap):
            return NotImplemented
        return (self - other).is_zero() if self.degree == other.degree or not (self.blocks and other.blocks) else False

    def __hash__(self):
        return hash(tuple(sorted((k, int(v) if hasattr(v, "p") else v) for k, v in self.coordinates().items())))

    def __repr__(self):
        return f"ChainMap(deg {self.degree}, blocks={ {n: m.tolist() for n, m in sorted(self.blocks.items())} })"


def hom_space_basis(X: ChainComplex, Y: ChainComplex, degree: int | None = None) -> list[tuple[str, ChainMap]]:
    """Matrix units of Hom(X, Y), labelled ``e[r](n,i,j)``, optionally in one degree only."""
    out = []
    field = X.field
    degs = sorted({m - n for n in X.degrees() for m in Y.degrees()})
    for r in degs:
        if degree is not None and r != degree:
            continue
        for n in X.degrees():
            rows = Y.rank(n + r)
            for i in range(rows):
                for j in range(X.rank(n)):
                    m = zeros(field, rows, X.rank(n))
                    m[i, j] = field.one
                    out.append((f"e[{r}]({n},{i},{j})", ChainMap(X, Y, r, {n: m})))
    return out


def hom_complex(X: ChainComplex, Y: ChainComplex) -> FiniteComplex:
    """Hom(X, Y) as a :class:`FiniteComplex` on matrix units, keys ``(n, i, j)``."""
    field = X.field
    degs = sorted({m - n for n in X.degrees() for m in Y.degrees()})
    bases: dict[int, list] = {}
    d: dict[int, dict] = {}
    for r in degs:
        elems = hom_space_basis(X, Y, r)
        bases[r] = [f.coordinates().popitem()[0] for _, f in elems]
        d[r] = {key: f.hom_d().coordinates() for key, (_, f) in zip(bases[r], elems)}
    if degs:
        window = (degs[0], degs[-1])
        bases.setdefault(degs[0] - 1, [])
        bases.setdefault(degs[-1] + 1, [])
    else:
        window = (0, 0)
    return FiniteComplex(field, bases, d, window)


class HomSpace:
    """Linear algebra on one graded hom-space Hom(X, Y)."""

    def __init__(self, X: ChainComplex, Y: ChainComplex):
        self.X, self.Y = X, Y
        self.field = X.field
        self.complex = hom_complex(X, Y)
        self._h: dict = {}

    def basis(self, r: int) -> list[ChainMap]:
        return [f for _, f in hom_space_basis(self.X, self.Y, r)]

    def degree_homology(self, r: int):
        from .homology import degree_homology

        if r not in self._h:
            self._h[r] = degree_homology(self.complex, r)
        return self._h[r]

    def h_dim(self, r: int) -> int:
        return self.degree_homology(r).dim

    def representatives(self, r: int) -> list[ChainMap]:
        return [ChainMap.from_coordinates(self.X, self.Y, r, v) for v in self.degree_homology(r).representatives]

    def coordinates(self, f: ChainMap) -> list | None:
        return self.degree_homology(f.degree).coordinates(f.coordinates())

    def is_boundary(self, f: ChainMap) -> bool:
        return self.degree_homology(f.degree).is_boundary(f.coordinates())

    def solve_d(self, target: ChainMap) -> ChainMap | None:
        """Some ``z`` with ``d(z) = target``, or ``None``."""
        r = target.degree + 1
        basis = self.basis(r)
        cols = [b.hom_d().coordinates() for b in basis]
        part, _ = solve(cols, target.coordinates(), self.field)
        if part is None:
            return None
        out = self.X.zero_map(self.Y, r)
        for i, c in part.items():
            out = out + basis[i].scale(c)
        return out

    def cycle_basis(self, r: int) -> list[ChainMap]:
        return [ChainMap.from_coordinates(self.X, self.Y, r, v) for v in self.degree_homology(r).cycles]


def homology_of(X: ChainComplex) -> HomologyReport:
    """Homology of a chain complex over its support."""
    degs = X.degrees()
    lo, hi = (degs[0], degs[-1]) if degs else (0, 0)
    bases = {n: list(range(X.rank(n))) for n in range(lo - 1, hi + 2)}
    d = {n: {j: col for j, col in enumerate(columns_of(X.differential(n)))} for n in range(lo, hi + 1)}
    return homology(FiniteComplex(X.field, bases, d, (lo, hi)))


# shifts and cones


def shift(X: ChainComplex, times: int = 1) -> ChainComplex:
    """``Sigma^times X``; each step raises degrees by one and negates the differential."""
    out = X
    for _ in range(times):
        out = ChainComplex(X.field, {n + 1: r for n, r in out.ranks.items()},
                           {n + 1: -m for n, m in out.diffs.items()}, check=False)
    return out


def suspension(X: ChainComplex, SX: ChainComplex | None = None) -> ChainMap:
    """``sigma_X: X -> Sigma X``, identity matrices, degree 1, closed."""
    SX = SX if SX is not None else shift(X)
    return ChainMap(X, SX, 1, {n: eye(X.field, r) for n, r in X.ranks.items()})


def desuspend(f: ChainMap, target: ChainComplex) -> ChainMap:
    """``sigma^-1 o f`` for ``f`` into ``Sigma(target)``: same matrices, degree one lower."""
    return ChainMap(f.source, target, f.degree - 1, dict(f.blocks))


def shift_map(f: ChainMap, SX: ChainComplex | None = None, SY: ChainComplex | None = None) -> ChainMap:
    """``Sigma f``: blocks ``(-1)^|f| f_{n-1}`` in degree ``n``."""
    SX = SX if SX is not None else shift(f.source)
    SY = SY if SY is not None else shift(f.target)
    sign = -1 if f.degree % 2 else 1
    return ChainMap(SX, SY, f.degree, {n + 1: m * sign for n, m in f.blocks.items()})


@dataclass
class Triangle:
    """``A -x-> B -v-> C -s-> Sigma A`` with witnesses ``t``, ``u``, ``h``.

    ``t`` is a degree-1 map ``A -> C``, ``u`` a degree-1 map ``C -> Sigma B``
    and ``h`` a degree-1 map ``C -> C`` with ``d(t) = v x``,
    ``d(u) = (Sigma x) s`` and ``v (sigma^-1 u) + t (sigma^-1 s) - 1 = d(h)``.
    """

    A: ChainComplex
    B: ChainComplex
    C: ChainComplex
    x: ChainMap
    v: ChainMap
    s: ChainMap
    t: ChainMap | None = None
    u: ChainMap | None = None
    h: ChainMap | None = None
    SA: ChainComplex | None = None
    SB: ChainComplex | None = None

    def __post_init__(self):
        if self.SA is None:
            self.SA = self.s.target
        if self.SB is None:
            self.SB = shift(self.B)

    @property
    def s_tilde(self) -> ChainMap:
        """``sigma_A^-1 s``: degree -1 map ``C -> A``."""
        return desuspend(self.s, self.A)

    @property
    def u_tilde(self) -> ChainMap:
        """``sigma_B^-1 u``: degree 0 map ``C -> B``."""
        return desuspend(self.u, self.B)

    def sigma_x(self) -> ChainMap:
        return shift_map(self.x, self.SA, self.SB)

    def violations(self) -> list[str]:
        bad = []
        for name, f in (("x", self.x), ("v", self.v), ("s", self.s)):
            if f.degree != 0 or not f.is_closed():
                bad.append(f"{name} is not a closed degree-0 map")
        if self.t is None or self.u is None or self.h is None:
            bad.append("missing witnesses")
            return bad
        if self.t.hom_d() != self.v.compose(self.x):
            bad.append("d(t) != v x")
        if self.u.hom_d() != self.sigma_x().compose(self.s):
            bad.append("d(u) != (Sigma x) s")
        lhs = self.v.compose(self.u_tilde) + self.t.compose(self.s_tilde) - self.C.identity()
        if lhs != self.h.hom_d():
            bad.append("v u + t s - 1 != d(h)")
        return bad

    def rotate(self) -> "Triangle":
        """``B -v-> C -s-> Sigma A -(-Sigma x)-> Sigma B``; witnesses are re-solved."""
        nx = -self.sigma_x()
        t, u, h = find_witnesses(self.B, self.C, self.SA, self.v, self.s, nx)
        return Triangle(self.B, self.C, self.SA, self.v, self.s, nx, t, u, h, SA=nx.target)


def cone(x: ChainMap) -> Triangle:
    """The cone triangle of a closed degree-0 map, with canonical witnesses (``h = 0``)."""
    if x.degree != 0 or not x.is_closed():
        raise InvalidTriangleError("cone needs a closed map of degree 0")
    A, B = x.source, x.target
    field = A.field
    degs = set(B.degrees()) | {n + 1 for n in A.degrees()}
    ranks = {n: A.rank(n - 1) + B.rank(n) for n in degs}
    diffs = {}
    for n in degs:
        a0, b0 = A.rank(n - 1), B.rank(n)
        a1, b1 = A.rank(n - 2), B.rank(n - 1)
        m = zeros(field, a1 + b1, a0 + b0)
        m[:a1, :a0] = -A.differential(n - 1)
        m[a1:, :a0] = x.block(n - 1)
        m[a1:, a0:] = B.differential(n)
        diffs[n] = m
    C = ChainComplex(field, ranks, diffs)
    SA, SB = shift(A), shift(B)
    v_blocks, s_blocks, t_blocks, u_blocks = {}, {}, {}, {}
    for n in degs:
        a0, b0 = A.rank(n - 1), B.rank(n)
        if b0:
            m = zeros(field, a0 + b0, b0)
            m[a0:, :] = eye(field, b0)
            v_blocks[n] = m
            m = zeros(field, b0, a0 + b0)
            m[:, a0:] = eye(field, b0)
            u_blocks[n] = m
        if a0:
            m = zeros(field, a0, a0 + b0)
            m[:, :a0] = eye(field, a0)
            s_blocks[n] = m
    for n in A.degrees():
        a0, b0 = A.rank(n), B.rank(n + 1)
        m = zeros(field, a0 + b0, a0)
        m[:a0, :] = eye(field, a0)
        t_blocks[n] = m
    v = ChainMap(B, C, 0, {n: m for n, m in v_blocks.items() if B.rank(n)})
    s = ChainMap(C, SA, 0, s_blocks)
    t = ChainMap(A, C, 1, t_blocks)
    u = ChainMap(C, SB, 1, u_blocks)
    h = ChainMap(C, C, 1, {})
    return Triangle(A, B, C, x, v, s, t, u, h, SA, SB)


def find_witnesses(A: ChainComplex, B: ChainComplex, C: ChainComplex, x: ChainMap, v: ChainMap, s: ChainMap):
    """Solve for ``t``, ``u``, ``h`` making ``(x, v, s)`` a triangle with witnesses.

    The first two equations fix ``t`` and ``u`` up to cycles; the third is
    then solved jointly in those cycle parts and ``h``.  Raises
    :class:`InvalidTriangleError` when any system is inconsistent.
    """
    field = A.field
    for name, f in (("x", x), ("v", v), ("s", s)):
        if f.degree != 0 or not f.is_closed():
            raise InvalidTriangleError(f"{name} is not a closed degree-0 map")
    SA = s.target
    SB = shift(B)
    sx = shift_map(x, SA, SB)
    hAC, hCSB, hCC = HomSpace(A, C), HomSpace(C, SB), HomSpace(C, C)
    t0 = hAC.solve_d(v.compose(x))
    if t0 is None:
        raise InvalidTriangleError("v x is not a boundary")
    u0 = hCSB.solve_d(sx.compose(s))
    if u0 is None:
        raise InvalidTriangleError("(Sigma x) s is not a boundary")
    s_t = desuspend(s, A)
    # unknowns: cycles a_i in Z_1(A, C), cycles b_j in Z_1(C, Sigma B), arbitrary h_k in Hom_1(C, C)
    za = hAC.cycle_basis(1)
    zb = hCSB.cycle_basis(1)
    hb = hCC.basis(1)
    cols = []
    for a in za:
        cols.append(a.compose(s_t).coordinates())
    for b in zb:
        cols.append(v.compose(desuspend(b, B)).coordinates())
    for hk in hb:
        cols.append((-hk.hom_d()).coordinates())
    rhs_map = C.identity() - v.compose(desuspend(u0, B)) - t0.compose(s_t)
    part, _ = solve(cols, rhs_map.coordinates(), field)
    if part is None:
        raise InvalidTriangleError("v u + t s - 1 is not a boundary for any choice of witnesses")
    t, u, h = t0, u0, C.zero_map(C, 1)
    for i, c in part.items():
        if i < len(za):
            t = t + za[i].scale(c)
        elif i < len(za) + len(zb):
            u = u + zb[i - len(za)].scale(c)
        else:
            h = h + hb[i - len(za) - len(zb)].scale(c)
    return t, u, h


# random instances


def random_complex(rng: random.Random, field: Field, max_rank: int = 4, degrees: tuple[int, int] = (0, 3),
                   total_rank: int | None = None) -> ChainComplex:
    """Random complex supported in ``degrees``; each column of ``d_n`` is drawn from ``ker d_{n-1}``."""
    lo, hi = degrees
    ranks = {n: rng.randint(0, max_rank) for n in range(lo, hi + 1)}
    if total_rank is not None:
        ranks = {n: 0 for n in range(lo, hi + 1)}
        for _ in range(total_rank):
            n = rng.randint(lo, hi)
            if ranks[n] < max_rank:
                ranks[n] += 1
    diffs = {}
    for n in range(lo + 1, hi + 1):
        rows, ncols = ranks[n - 1], ranks[n]
        if not rows or not ncols:
            continue
        prev = diffs.get(n - 1)
        if prev is None:
            ker = [{i: field.one} for i in range(rows)]
        else:
            ker = kernel(columns_of(prev), field)
        m = zeros(field, rows, ncols)
        for j in range(ncols):
            for vec in ker:
                c = field.random(rng)
                if c:
                    for i, a in vec.items():
                        m[i, j] = m[i, j] + c * a
        diffs[n] = m
    return ChainComplex(field, ranks, diffs)


def random_closed_map(rng: random.Random, X: ChainComplex, Y: ChainComplex, degree: int = 0) -> ChainMap:
    """Uniform random element of the cycle space ``Z_degree Hom(X, Y)``."""
    hs = HomSpace(X, Y)
    out = X.zero_map(Y, degree)
    for z in hs.cycle_basis(degree):
        c = X.field.random(rng)
        if c:
            out = out + z.scale(c)
    return out


def complex_from_matrices(field: Field, ranks: Mapping[int, int], diffs: Mapping[int, list]) -> ChainComplex:
    return ChainComplex(field, ranks, {n: as_matrix(field, m, (ranks.get(n - 1, 0), ranks.get(n, 0)))
                                       for n, m in diffs.items()})


def point(field: Field, degree: int = 0) -> ChainComplex:
    """``k`` concentrated in one degree."""
    return ChainComplex(field, {degree: 1})


def contractible(field: Field, degree: int = 0) -> ChainComplex:
    """``k --id--> k`` in degrees ``degree + 1``, ``degree``."""
    return ChainComplex(field, {degree: 1, degree + 1: 1}, {degree + 1: eye(field, 1)})


class ComplexCategory:
    """Named complexes viewed as a dg category (the target protocol)."""

    def __init__(self, complexes: Mapping[str, ChainComplex]):
        self.complexes = dict(complexes)
        self.objects = tuple(self.complexes)
        self.field = next(iter(self.complexes.values())).field

    def identity(self, obj: str) -> ChainMap:
        return self.complexes[obj].identity()

    def zero(self, a: str, b: str, degree: int) -> ChainMap:
        return self.complexes[a].zero_map(self.complexes[b], degree)

    def compose(self, f: ChainMap, g: ChainMap) -> ChainMap:
        return f.compose(g)

    def d(self, f: ChainMap) -> ChainMap:
        return f.hom_d()

    def hom_basis(self, a: str, b: str, degree: int, wide: bool = False) -> list[ChainMap]:
        return [f for _, f in hom_space_basis(self.complexes[a], self.complexes[b], degree)]

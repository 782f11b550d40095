"""Finite-dimensional dg categories stored as structure constants.

A :class:`FiniteDgCategory` keeps, for every ordered pair of objects, a list
of homogeneous basis elements; composition and the differential are tables of
sparse vectors over these bases.  Elements are :class:`FinElement` values,
which support the same arithmetic as free-category morphisms so functors out
of a presentation can land here unchanged.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping, Sequence

from .algebra import AlgebraError, CompositionError
from .fields import Field, QQ
from .linalg import axpy


class InvalidFiniteCategoryError(AlgebraError):
    pass


class FinElement:
    """Homogeneous element of a hom-space of a finite dg category."""

    __slots__ = ("cat", "source", "target", "degree", "coeffs")

    def __init__(self, cat: "FiniteDgCategory", source: str, target: str, degree: int, coeffs: Mapping[int, object]):
        self.cat = cat
        self.source = source
        self.target = target
        self.degree = degree
        self.coeffs = {i: c for i, c in coeffs.items() if c}

    @property
    def field(self) -> Field:
        return self.cat.field

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def vector(self) -> dict:
        return self.coeffs

    def _new(self, coeffs, degree=None):
        return FinElement(self.cat, self.source, self.target, self.degree if degree is None else degree, coeffs)

    def __add__(self, other: "FinElement") -> "FinElement":
        if not isinstance(other, FinElement):
            return NotImplemented
        if (self.source, self.target) != (other.source, other.target):
            raise CompositionError("cannot add elements of different hom-spaces")
        if not other.coeffs:
            return self
        if not self.coeffs:
            return other
        if self.degree != other.degree:
            raise CompositionError(f"cannot add elements of degrees {self.degree} and {other.degree}")
        out = dict(self.coeffs)
        axpy(out, self.field.one, other.coeffs)
        return self._new(out)

    def __neg__(self):
        return self._new({i: -c for i, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "FinElement":
        c = self.field(c)
        return self._new({i: c * a for i, a in self.coeffs.items()} if c else {})

    def __mul__(self, other):
        if isinstance(other, FinElement):
            return self.cat.compose(self, other)
        return self.scale(other)

    def __rmul__(self, c):
        return self.scale(c)

    def __eq__(self, other):
        if not isinstance(other, FinElement):
            return NotImplemented
        return (self.source, self.target) == (other.source, other.target) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.source, self.target, frozenset(self.coeffs.items())))

    def __str__(self):
        if not self.coeffs:
            return "0"
        labels = self.cat.labels[(self.source, self.target)]
        parts = []
        for i in sorted(self.coeffs):
            c = self.field.signed(self.coeffs[i])
            parts.append(labels[i] if c == 1 else f"{c}*{labels[i]}")
        return " + ".join(parts)

    __repr__ = __str__


class FiniteDgCategory:
    """Small dg category with finite-dimensional hom-spaces.

    ``bases[(a, b)]`` lists ``(label, degree)`` for Hom(a, b);
    ``mult[(a, b, c)][i][j]`` is ``e_i o e_j`` for ``e_i`` in Hom(b, c) and
    ``e_j`` in Hom(a, b), as a sparse vector over Hom(a, c) (missing = 0);
    ``diff[(a, b)][i]`` is ``d(e_i)``; ``units[a]`` is the identity of ``a``.
    """

    def __init__(self, objects: Sequence[str], bases: Mapping, mult: Mapping, diff: Mapping,
                 units: Mapping, field: Field = QQ, name: str = ""):
        self.objects = tuple(objects)
        self.field = field
        self.name = name
        self.bases = {(a, b): list(bases.get((a, b), [])) for a in self.objects for b in self.objects}
        self.labels = {k: [lab for lab, _ in v] for k, v in self.bases.items()}
        self.mult = {k: v for k, v in mult.items()}
        self.diff = {k: list(diff.get(k, [{}] * len(self.bases[k]))) for k in self.bases}
        self.units = {a: dict(units[a]) for a in self.objects}

    # the target protocol

    def element(self, a: str, b: str, coeffs: Mapping[int, object], degree: int | None = None) -> FinElement:
        coeffs = {i: self.field(c) for i, c in coeffs.items() if c}
        if degree is None:
            degs = {self.bases[(a, b)][i][1] for i in coeffs}
            if len(degs) > 1:
                raise CompositionError("inhomogeneous element")
            degree = degs.pop() if degs else 0
        return FinElement(self, a, b, degree, coeffs)

    def basis_element(self, a: str, b: str, label: str) -> FinElement:
        i = self.labels[(a, b)].index(label)
        return FinElement(self, a, b, self.bases[(a, b)][i][1], {i: self.field.one})

    def find(self, label: str) -> FinElement:
        for (a, b), labs in self.labels.items():
            if label in labs:
                return self.basis_element(a, b, label)
        raise KeyError(label)

    def identity(self, obj: str) -> FinElement:
        return FinElement(self, obj, obj, 0, self.units[obj])

    def zero(self, a: str, b: str, degree: int) -> FinElement:
        return FinElement(self, a, b, degree, {})

    def hom_basis(self, a: str, b: str, degree: int, wide: bool = False) -> list[FinElement]:
        return [FinElement(self, a, b, deg, {i: self.field.one})
                for i, (_, deg) in enumerate(self.bases[(a, b)]) if deg == degree]

    def hom_degrees(self, a: str, b: str) -> list[int]:
        return sorted({deg for _, deg in self.bases[(a, b)]})

    def compose(self, x: FinElement, y: FinElement) -> FinElement:
        if x.source != y.target:
            raise CompositionError(f"cannot compose {x.source}->{x.target} after {y.source}->{y.target}")
        a, b, c = y.source, y.target, x.target
        table = self.mult.get((a, b, c), {})
        out: dict = {}
        for i, ci in x.coeffs.items():
            row = table.get(i)
            if not row:
                continue
            for j, cj in y.coeffs.items():
                vec = row.get(j)
                if vec:
                    axpy(out, ci * cj, vec)
        return FinElement(self, a, c, x.degree + y.degree, out)

    def d(self, x: FinElement) -> FinElement:
        out: dict = {}
        table = self.diff[(x.source, x.target)]
        for i, c in x.coeffs.items():
            axpy(out, c, table[i])
        return FinElement(self, x.source, x.target, x.degree - 1, out)

    def hom_complex(self, a: str, b: str, window: tuple[int, int] | None = None):
        from .homology import FiniteComplex

        degs = self.hom_degrees(a, b) or [0]
        lo, hi = window or (degs[0], degs[-1])
        bases = {k: [] for k in range(min(lo, degs[0]) - 1, max(hi, degs[-1]) + 2)}
        for i, (_, deg) in enumerate(self.bases[(a, b)]):
            bases[deg].append(i)
        d = {k: {i: dict(self.diff[(a, b)][i]) for i in labs} for k, labs in bases.items()}
        return FiniteComplex(self.field, bases, d, (lo, hi))

    def hom_homology(self, a: str, b: str, window: tuple[int, int] | None = None):
        from .homology import homology

        return homology(self.hom_complex(a, b, window))

    @property
    def total_dimension(self) -> int:
        return sum(len(v) for v in self.bases.values())

    # checks

    def _all_basis(self, a, b):
        return [FinElement(self, a, b, deg, {i: self.field.one}) for i, (_, deg) in enumerate(self.bases[(a, b)])]

    def validate(self) -> list[str]:
        """Return a list of violated axioms (empty when the data is a dg category)."""
        problems = []
        objs = self.objects
        for (a, b), basis in self.bases.items():
            for i, e in enumerate(self._all_basis(a, b)):
                de = self.d(e)
                for k in de.coeffs:
                    if basis[k][1] != e.degree - 1:
                        problems.append(f"d({basis[i][0]}) has a term of the wrong degree")
                if not self.d(de).is_zero():
                    problems.append(f"d^2({basis[i][0]}) != 0")
                if self.compose(self.identity(b), e) != e or self.compose(e, self.identity(a)) != e:
                    problems.append(f"identity does not act trivially on {basis[i][0]}")
        for a in objs:
            if not self.d(self.identity(a)).is_zero():
                problems.append(f"identity of {a} is not closed")
        for a in objs:
            for b in objs:
                for c in objs:
                    for x in self._all_basis(b, c):
                        for y in self._all_basis(a, b):
                            xy = self.compose(x, y)
                            for k in xy.coeffs:
                                if self.bases[(a, c)][k][1] != x.degree + y.degree:
                                    problems.append("composition does not add degrees")
                            sign = -1 if x.degree % 2 else 1
                            lhs = self.d(xy)
                            rhs = self.compose(self.d(x), y) + self.compose(x, self.d(y)).scale(sign)
                            if lhs != rhs:
                                problems.append(f"Leibniz fails on {x} o {y}")
                            for e in objs:
                                for z in self._all_basis(e, a):
                                    if self.compose(xy, z) != self.compose(x, self.compose(y, z)):
                                        problems.append(f"associativity fails on {x}, {y}, {z}")
        return problems

    @classmethod
    def from_table(cls, objects: Sequence[str], bases: Mapping[tuple, Sequence[tuple]],
                   products: Mapping[tuple, Mapping[str, object]], units: Mapping[str, str],
                   diffs: Mapping[str, Mapping[str, object]] | None = None, field: Field = QQ,
                   name: str = "") -> "FiniteDgCategory":
        """Build from labelled bases; ``products[(x, y)]`` is ``x o y`` as ``{label: coeff}``.

        Products with a unit are filled in automatically, unlisted products are zero.
        """
        where = {}
        for (a, b), basis in bases.items():
            for i, (lab, _) in enumerate(basis):
                if lab in where:
                    raise InvalidFiniteCategoryError(f"duplicate basis label {lab!r}")
                where[lab] = (a, b, i)
        mult: dict = {}

        def put(x, y, vec):
            xa, xb, i = where[x]
            ya, yb, j = where[y]
            if xa != yb:
                raise InvalidFiniteCategoryError(f"{x} o {y} is not composable")
            target_space = (ya, xb)
            v = {}
            for lab, c in vec.items():
                la, lb, k = where[lab]
                if (la, lb) != target_space:
                    raise InvalidFiniteCategoryError(f"{x} o {y} lands in the wrong hom-space")
                v[k] = field(c)
            mult.setdefault((ya, yb, xb), {}).setdefault(i, {})[j] = v

        unit_labels = set(units.values())
        for lab, (a, b, i) in where.items():
            put(units[b], lab, {lab: 1})
            if lab not in unit_labels:
                put(lab, units[a], {lab: 1})
        for (x, y), vec in products.items():
            put(x, y, vec)
        diff = {}
        for (a, b), basis in bases.items():
            rows = []
            for lab, _ in basis:
                vec = (diffs or {}).get(lab, {})
                rows.append({where[l][2]: field(c) for l, c in vec.items() if field(c)})
            diff[(a, b)] = rows
        unit_vecs = {o: {where[units[o]][2]: field.one} for o in objects}
        return cls(objects, bases, mult, diff, unit_vecs, field, name)

    @classmethod
    def from_complexes(cls, complexes: Mapping[str, object], field: Field | None = None, name: str = "") -> "FiniteDgCategory":
        """Full dg subcategory of chain complexes on the given objects.

        Hom(X, Y) has the matrix units of every degree as basis, with
        ``d(f) = d_Y f - (-1)^|f| f d_X`` and plain composition.
        """
        from .complexes import hom_space_basis, ChainMap

        objects = list(complexes)
        field = field or next(iter(complexes.values())).field
        bases, maps, index = {}, {}, {}
        for a in objects:
            for b in objects:
                elems = hom_space_basis(complexes[a], complexes[b])
                maps[(a, b)] = elems
                bases[(a, b)] = [(lab, f.degree) for lab, f in elems]
                index[(a, b)] = {(f.degree,) + next(iter(f.coordinates())): i for i, (_, f) in enumerate(elems)}

        def vec_of(a, b, f: ChainMap):
            return {(f.degree,) + k: c for k, c in f.coordinates().items()}

        mult = {}
        for a in objects:
            for b in objects:
                for c in objects:
                    table = {}
                    for i, (_, x) in enumerate(maps[(b, c)]):
                        row = {}
                        for j, (_, y) in enumerate(maps[(a, b)]):
                            v = vec_of(a, c, x.compose(y))
                            if v:
                                row[j] = {index[(a, c)][k]: val for k, val in v.items()}
                        if row:
                            table[i] = row
                    mult[(a, b, c)] = table
        diff = {}
        for (a, b), elems in maps.items():
            diff[(a, b)] = [{index[(a, b)][k]: val for k, val in vec_of(a, b, f.hom_d()).items()} for _, f in elems]
        units = {}
        for a in objects:
            ident = complexes[a].identity()
            units[a] = {index[(a, a)][k]: val for k, val in vec_of(a, a, ident).items()}
        return cls(objects, bases, mult, diff, units, field, name)


def kv_right_inverse(n: int = 0, field: Field = QQ) -> FiniteDgCategory:
    """Model of k<v> with a strict right inverse ``w`` of ``v``: ``v w = 1``, ``w v`` idempotent."""
    bases = {
        ("O1", "O1"): [("1_O1", 0), ("w.v", 0)],
        ("O1", "O2"): [("v", n)],
        ("O2", "O1"): [("w", -n)],
        ("O2", "O2"): [("1_O2", 0)],
    }
    products = {
        ("v", "w"): {"1_O2": 1},
        ("w", "v"): {"w.v": 1},
        ("w.v", "w.v"): {"w.v": 1},
        ("v", "w.v"): {"v": 1},
        ("w.v", "w"): {"w": 1},
    }
    return FiniteDgCategory.from_table(["O1", "O2"], bases, products, {"O1": "1_O1", "O2": "1_O2"},
                                       field=field, name="KV_RIGHT_INV")


def kv_two_sided_inverse(n: int = 0, field: Field = QQ) -> FiniteDgCategory:
    """Model of k<v, v^-1>."""
    bases = {
        ("O1", "O1"): [("1_O1", 0)],
        ("O1", "O2"): [("v", n)],
        ("O2", "O1"): [("v^-1", -n)],
        ("O2", "O2"): [("1_O2", 0)],
    }
    products = {("v", "v^-1"): {"1_O2": 1}, ("v^-1", "v"): {"1_O1": 1}}
    return FiniteDgCategory.from_table(["O1", "O2"], bases, products, {"O1": "1_O1", "O2": "1_O2"},
                                       field=field, name="KV_TWO_INV")


def kv_model(n: int = 0, field: Field = QQ) -> FiniteDgCategory:
    """k<v> itself: it is already finite."""
    bases = {
        ("O1", "O1"): [("1_O1", 0)],
        ("O1", "O2"): [("v", n)],
        ("O2", "O2"): [("1_O2", 0)],
    }
    return FiniteDgCategory.from_table(["O1", "O2"], bases, {}, {"O1": "1_O1", "O2": "1_O2"}, field=field, name="KV")


@dataclass
class RandomTarget:
    """A random finite target together with the image of ``v``."""

    category: FiniteDgCategory
    object_map: dict
    v_image: FinElement
    kind: str
    seed: int


def random_bimodule_target(rng: random.Random, field: Field, n: int = 0, max_dim: int = 4, seed: int = 0) -> RandomTarget:
    """``End = k`` on both objects and a random complex as Hom(O1, O2); nothing backwards."""
    from .complexes import random_complex

    dim = rng.randint(1, max_dim)
    X = random_complex(rng, field, max_rank=dim, degrees=(n - 1, n + 2), total_rank=dim)
    bases = {("O1", "O1"): [("1_O1", 0)], ("O2", "O2"): [("1_O2", 0)]}
    labels = []
    for deg in X.degrees():
        for i in range(X.rank(deg)):
            labels.append((f"m{deg}_{i}", deg))
    bases[("O1", "O2")] = labels
    diffs = {}
    for deg in X.degrees():
        D = X.differential(deg)
        for j in range(X.rank(deg)):
            diffs[f"m{deg}_{j}"] = {f"m{deg - 1}_{i}": D[i, j] for i in range(D.shape[0]) if D[i, j]}
    cat = FiniteDgCategory.from_table(["O1", "O2"], bases, {}, {"O1": "1_O1", "O2": "1_O2"}, diffs, field,
                                      name=f"bimodule[{seed}]")
    v = _random_cycle(cat, "O1", "O2", n, rng)
    return RandomTarget(cat, {"O1": "O1", "O2": "O2"}, v, "bimodule", seed)


def random_complexes_target(rng: random.Random, field: Field, n: int = 0, max_total: int = 6, seed: int = 0) -> RandomTarget:
    """Full subcategory on one or two small complexes; ``v`` a random closed map."""
    from .complexes import random_complex

    for _ in range(200):
        same = rng.random() < 0.4
        X1 = random_complex(rng, field, max_rank=2, degrees=(0, 1), total_rank=rng.randint(1, 2))
        X2 = X1 if same else random_complex(rng, field, max_rank=2, degrees=(0, 1), total_rank=rng.randint(1, 2))
        cplx = {"X1": X1} if same else {"X1": X1, "X2": X2}
        cat = FiniteDgCategory.from_complexes(cplx, field, name=f"complexes[{seed}]")
        if cat.total_dimension <= max_total:
            omap = {"O1": "X1", "O2": "X1" if same else "X2"}
            v = _random_cycle(cat, omap["O1"], omap["O2"], n, rng)
            return RandomTarget(cat, omap, v, "complexes", seed)
    raise RuntimeError("could not draw a small enough complexes target")


def _random_cycle(cat: FiniteDgCategory, a: str, b: str, degree: int, rng: random.Random) -> FinElement:
    from .linalg import kernel

    basis = cat.hom_basis(a, b, degree)
    ker = kernel([cat.d(e).vector() for e in basis], cat.field)
    out = cat.zero(a, b, degree)
    for vec in ker:
        c = cat.field.random(rng)
        for i, x in vec.items():
            out = out + basis[i].scale(c * x)
    return out

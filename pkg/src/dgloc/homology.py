"""Exact homology of finite complexes and weight-truncated hom-complexes.

Hom-spaces of a free presentation are infinite-dimensional as soon as there
are loops, but a weight filtration with all weights positive cuts each
``(degree window, weight bound)`` slice down to finitely many paths.  The
truncation ``F_W`` is a subcomplex because the differential never raises
weight.

Raw homology of ``F_W`` carries artifacts at the top weight: a cycle of weight
close to ``W`` may only become a boundary of something heavier than ``W``.
:func:`stabilized_homology` therefore reports the *persistent* dimensions,
the rank of ``H(F_W) -> H(F_{W+L})`` for a lookahead ``L``, and flags a
degree as stable once three consecutive bounds agree.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Hashable, Mapping, Sequence

from .algebra import AlgebraError, DgPresentation
from .fields import Field
from .linalg import Echelon, axpy, kernel


class MalformedComplexError(AlgebraError):
    pass


class TruncationInfeasibleError(AlgebraError):
    pass


class FiniteComplex:
    """Finite-dimensional complex with labelled bases.

    ``bases[k]`` lists the basis labels in degree ``k``; ``d[k][label]`` is
    the sparse vector (``label -> coeff``) of the differential of that basis
    element in degree ``k - 1``.  ``window`` is the range of degrees whose
    homology is meaningful; degrees just outside it may be present so that
    kernels and images at the edges are computed honestly.
    """

    def __init__(self, field: Field, bases: Mapping[int, Sequence[Hashable]],
                 d: Mapping[int, Mapping[Hashable, dict]], window: tuple[int, int] | None = None):
        self.field = field
        self.bases = {k: list(v) for k, v in bases.items()}
        self.d = {k: dict(d.get(k, {})) for k in self.bases}
        if window is None:
            ks = sorted(self.bases) or [0]
            window = (ks[0], ks[-1])
        self.window = window

    def basis(self, k: int) -> list:
        return self.bases.get(k, [])

    def dim(self, k: int) -> int:
        return len(self.basis(k))

    def apply_d(self, k: int, vec: Mapping) -> dict:
        out: dict = {}
        table = self.d.get(k, {})
        for lab, c in vec.items():
            img = table.get(lab)
            if img:
                axpy(out, c, img)
        return out

    def d_columns(self, k: int) -> list[dict]:
        table = self.d.get(k, {})
        return [table.get(lab, {}) for lab in self.basis(k)]

    def check_d_squared(self) -> list[tuple[int, Hashable]]:
        bad = []
        for k in self.bases:
            for lab in self.basis(k):
                if self.apply_d(k - 1, self.d[k].get(lab, {})):
                    bad.append((k, lab))
        return bad

    def euler_characteristic(self) -> int:
        lo, hi = self.window
        return sum((-1) ** k * self.dim(k) for k in range(lo, hi + 1))


@dataclass
class DegreeHomology:
    """Homology in one degree, with enough data to find coordinates of classes."""

    degree: int
    cycles: list[dict]
    boundaries: Echelon
    representatives: list[dict]
    _classes: Echelon | None = None

    @property
    def dim(self) -> int:
        return len(self.representatives)

    def _class_echelon(self) -> Echelon:
        if self._classes is None:
            e = Echelon(self.boundaries.field, track=True)
            for i, b in enumerate(self.boundaries.basis()):
                e.insert(b, ("b", i))
            for j, r in enumerate(self.representatives):
                e.insert(r, ("h", j))
            self._classes = e
        return self._classes

    def coordinates(self, cycle: Mapping) -> list | None:
        """Coordinates of the class of ``cycle`` in the representative basis (``None`` if not a cycle here)."""
        combo = self._class_echelon().express(dict(cycle))
        if combo is None:
            return None
        field = self.boundaries.field
        return [combo.get(("h", j), field.zero) for j in range(self.dim)]

    def is_boundary(self, vec: Mapping) -> bool:
        return self.boundaries.contains(dict(vec))


@dataclass
class HomologyReport:
    field: Field
    window: tuple[int, int]
    dims: dict[int, int]
    representatives: dict[int, list[dict]] = dc_field(default_factory=dict)
    stable: dict[int, bool] = dc_field(default_factory=dict)
    samples: dict = dc_field(default_factory=dict)
    details: dict[int, DegreeHomology] = dc_field(default_factory=dict, repr=False)

    def dim(self, k: int) -> int:
        return self.dims.get(k, 0)

    @property
    def all_stable(self) -> bool:
        return all(self.stable.get(k, False) for k in self.dims)

    def nonzero(self) -> dict[int, int]:
        return {k: v for k, v in self.dims.items() if v}


def degree_homology(X: FiniteComplex, k: int) -> DegreeHomology:
    field = X.field
    labels = X.basis(k)
    ker = kernel(X.d_columns(k), field)
    cycles = []
    for vec in ker:
        cycles.append({labels[i]: c for i, c in vec.items()})
    bnd = Echelon(field)
    for col in X.d_columns(k + 1):
        bnd.insert(col)
    reps = []
    probe = Echelon(field)
    for b in bnd.basis():
        probe.insert(b)
    for z in cycles:
        res, _ = probe.reduce(z)
        if res:
            probe.insert(res)
            reps.append(res)
    return DegreeHomology(k, cycles, bnd, reps)


def homology(X: FiniteComplex, check: bool = True) -> HomologyReport:
    """Exact homology in every degree of ``X.window``."""
    if check:
        bad = X.check_d_squared()
        if bad:
            raise MalformedComplexError(f"d^2 != 0 on {bad[:5]}")
    lo, hi = X.window
    rep = HomologyReport(X.field, (lo, hi), {})
    for k in range(lo, hi + 1):
        h = degree_homology(X, k)
        rep.dims[k] = h.dim
        rep.representatives[k] = h.representatives
        rep.details[k] = h
    return rep


# truncated hom-complexes of presentations


def _weights_for(P: DgPresentation, weights: Mapping[str, int] | None) -> dict[str, int]:
    from .constructions import filtration_weights

    if weights is not None:
        w = dict(weights)
        missing = [n for n in P.generators if n not in w]
        if missing:
            raise TruncationInfeasibleError(f"no weight for {missing}")
    else:
        report = filtration_weights(P)
        if not report.ok:
            raise TruncationInfeasibleError(f"weight validation failed: {report.message} (cycle {report.cycle})")
        w = report.weights
    if any(v < 1 for v in w.values()):
        bad = sorted(n for n, v in w.items() if v < 1)
        raise TruncationInfeasibleError(f"generators of weight < 1 make truncations infinite: {bad}")
    return w


def enumerate_paths(P: DgPresentation, a: str, b: str, max_weight: int, weights: Mapping[str, int],
                    degrees: tuple[int, int] | None = None) -> list[tuple]:
    """Every path ``a -> b`` of weight at most ``max_weight`` (optionally within a degree range).

    Sorted by ``(weight, length, word)`` so the output is deterministic.
    """
    out = []
    arrows = P.arrows_from

    def grow(obj, word, wt, deg):
        if obj == b and (degrees is None or degrees[0] <= deg <= degrees[1]):
            out.append((wt, word, deg))
        for g in arrows[obj]:
            nw = wt + weights[g.name]
            if nw <= max_weight:
                grow(g.target, (g.name,) + word, nw, deg + g.degree)

    grow(a, (), 0, 0)
    out.sort(key=lambda t: (t[0], len(t[1]), t[1]))
    return out


@dataclass
class TruncatedHom:
    """Paths ``a -> b`` up to a weight bound, indexed by degree and weight."""

    P: DgPresentation
    a: str
    b: str
    weights: dict[str, int]
    max_weight: int
    degrees: tuple[int, int]
    paths: list[tuple]  # (weight, word, degree)

    def complex(self, W: int, window: tuple[int, int]) -> FiniteComplex:
        """The subcomplex ``F_W`` restricted to degrees ``window +- 1``."""
        lo, hi = window
        bases: dict[int, list] = {k: [] for k in range(lo - 1, hi + 2)}
        members = set()
        for wt, word, deg in self.paths:
            if wt <= W and lo - 1 <= deg <= hi + 1:
                bases[deg].append(word)
                members.add(word)
        d: dict[int, dict] = {}
        for k, words in bases.items():
            table = {}
            for word in words:
                img = self.P._d_word(word)
                if k - 1 >= lo - 1:
                    for w2 in img:
                        if w2 not in members:
                            raise TruncationInfeasibleError(f"d({'.'.join(word)}) leaves the weight-{W} truncation")
                    table[word] = img
            d[k] = table
        return FiniteComplex(self.P.field, bases, d, window)


def hom_paths(P: DgPresentation, a: str, b: str, window: tuple[int, int], max_weight: int,
              weights: Mapping[str, int] | None = None) -> TruncatedHom:
    w = _weights_for(P, weights)
    lo, hi = window
    paths = enumerate_paths(P, a, b, max_weight, w, (lo - 1, hi + 1))
    return TruncatedHom(P, a, b, w, max_weight, (lo - 1, hi + 1), paths)


def truncated_hom_complex(P: DgPresentation, a: str, b: str, window: tuple[int, int], max_weight: int,
                          weights: Mapping[str, int] | None = None) -> FiniteComplex:
    """``F_W Hom(a, b)`` on degrees ``[p - 1, q + 1]``; homology is meaningful on ``[p, q]``."""
    return hom_paths(P, a, b, window, max_weight, weights).complex(max_weight, window)


def truncated_homology(P: DgPresentation, a: str, b: str, window: tuple[int, int], max_weight: int,
                       weights: Mapping[str, int] | None = None) -> HomologyReport:
    return homology(truncated_hom_complex(P, a, b, window, max_weight, weights), check=False)


def persistent_dims(small: FiniteComplex, large: FiniteComplex) -> dict[int, int]:
    """Rank of ``H(small) -> H(large)`` per degree of ``small.window`` (small must be a subcomplex)."""
    field = small.field
    lo, hi = small.window
    out = {}
    for k in range(lo, hi + 1):
        labels = small.basis(k)
        cycles = [{labels[i]: c for i, c in vec.items()} for vec in kernel(small.d_columns(k), field)]
        e = Echelon(field)
        for col in large.d_columns(k + 1):
            e.insert(col)
        rb = e.rank
        for z in cycles:
            e.insert(z)
        out[k] = e.rank - rb
    return out


def stabilized_homology(P: DgPresentation, a: str, b: str, window: tuple[int, int] = (-2, 3),
                        schedule: Sequence[int] = (4, 6, 8, 10), weights: Mapping[str, int] | None = None,
                        runs: int = 3, lookahead: int | None = None) -> HomologyReport:
    """Persistent homology of the weight truncations along ``schedule``.

    For each bound ``W`` the reported value is the rank of
    ``H(F_W) -> H(F_{W + lookahead})``; the default lookahead is twice the
    largest generator weight.  A degree is flagged stable when the values at
    the last ``runs`` bounds agree.  Raw dimensions of ``H(F_W)`` are kept in
    ``samples["raw"]``.
    """
    schedule = sorted(schedule)
    if len(schedule) < runs:
        raise ValueError(f"the schedule needs at least {runs} bounds")
    w = _weights_for(P, weights)
    if lookahead is None:
        lookahead = 2 * max(w.values(), default=1)
    top_bound = schedule[-1] + lookahead
    th = hom_paths(P, a, b, window, top_bound, w)
    bounds = sorted(set(schedule) | {W + lookahead for W in schedule})
    cxs = {W: th.complex(W, window) for W in bounds}
    raw = {W: homology(cxs[W], check=False).dims for W in schedule}
    pers = {W: persistent_dims(cxs[W], cxs[W + lookahead]) for W in schedule}
    last = schedule[-runs:]
    lo, hi = window
    dims, stable = {}, {}
    for k in range(lo, hi + 1):
        vals = [pers[W][k] for W in last]
        dims[k] = vals[-1]
        stable[k] = len(set(vals)) == 1
    W = schedule[-1]
    top = homology(cxs[W], check=False)
    reps = {}
    for k in range(lo, hi + 1):
        # representatives of the classes surviving into the lookahead bound
        e = Echelon(P.field)
        for col in cxs[W + lookahead].d_columns(k + 1):
            e.insert(col)
        chosen = []
        for z in top.details[k].cycles:
            res, _ = e.reduce(z)
            if res:
                e.insert(res)
                chosen.append(z)
        reps[k] = chosen
    samples = {"raw": raw, "persistent": pers, "lookahead": lookahead}
    return HomologyReport(P.field, window, dims, reps, stable, samples)


# weight-homogeneous differentials


def is_weight_homogeneous(P: DgPresentation, weights: Mapping[str, int]) -> bool:
    for n, dg in P.differential.items():
        for word in dg.terms:
            if sum(weights[x] for x in word) != weights[n]:
                return False
    return True


def weight_graded_homology(P: DgPresentation, a: str, b: str, window: tuple[int, int], max_weight: int,
                           weights: Mapping[str, int]) -> dict[int, HomologyReport]:
    """Homology of each exact-weight piece, for differentials that preserve weight.

    The hom-complex then splits as a direct sum over weights, so every piece
    with weight ``<= max_weight`` is computed exactly.
    """
    w = dict(weights)
    if not is_weight_homogeneous(P, w):
        raise TruncationInfeasibleError("the differential is not weight-homogeneous")
    if any(v < 0 for v in w.values()):
        raise TruncationInfeasibleError("negative weights")
    lo, hi = window
    if any(v == 0 for v in w.values()):
        raise TruncationInfeasibleError("zero weights make weight pieces infinite")
    paths = enumerate_paths(P, a, b, max_weight, w, (lo - 1, hi + 1))
    out = {}
    for weight in sorted({wt for wt, _, _ in paths}):
        bases: dict[int, list] = {k: [] for k in range(lo - 1, hi + 2)}
        for wt, word, deg in paths:
            if wt == weight:
                bases[deg].append(word)
        d = {k: {word: P._d_word(word) for word in words} for k, words in bases.items()}
        out[weight] = homology(FiniteComplex(P.field, bases, d, window), check=False)
    return out

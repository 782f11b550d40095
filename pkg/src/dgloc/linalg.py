"""Exact sparse linear algebra over a :class:`~dgloc.fields.Field`.

Vectors are plain dicts ``key -> scalar`` with no zero entries; keys may be
anything hashable (path words, basis indices, matrix positions).  The one
workhorse is :class:`Echelon`, an incrementally built echelon basis that can
track how each basis row was obtained from the inserted vectors.  Kernels,
solutions of linear systems, ranks and canonical coset representatives all
come out of it.
"""

from __future__ import annotations

import heapq
from typing import Hashable, Iterable, Sequence

import numpy as np

from .fields import Field

Vector = dict


def axpy(y: dict, a, x: dict) -> None:
    """In place ``y += a * x``, dropping entries that cancel."""
    for k, v in x.items():
        nv = y.get(k)
        nv = a * v if nv is None else nv + a * v
        if nv:
            y[k] = nv
        else:
            y.pop(k, None)


def scaled(a, x: dict) -> dict:
    if not a:
        return {}
    return {k: a * v for k, v in x.items()}


def add_vectors(*terms: tuple) -> dict:
    """Linear combination of ``(coefficient, vector)`` pairs."""
    out: dict = {}
    for a, x in terms:
        if a:
            axpy(out, a, x)
    return out


class Echelon:
    """Echelon basis of a subspace, grown one vector at a time.

    Every stored row has its pivot at the key that was seen *latest* among
    its entries (keys are ordered by first appearance), so eliminating a
    pivot only ever introduces older keys.  Reducing a vector by the rows in
    descending pivot order therefore terminates, and the residual is a
    canonical representative of the coset ``vector + span``.

    With ``track=True`` each row remembers the combination of inserted tags
    that produced it; :meth:`insert` then returns linear dependencies and
    :meth:`express` writes a vector in terms of the inserted ones.
    """

    def __init__(self, field: Field, track: bool = False):
        self.field = field
        self.track = track
        self.rows: dict[Hashable, dict] = {}
        self.combos: dict[Hashable, dict] = {}
        self._order: dict[Hashable, int] = {}

    def _idx(self, key) -> int:
        i = self._order.get(key)
        if i is None:
            i = len(self._order)
            self._order[key] = i
        return i

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, vec: dict) -> tuple[dict, dict]:
        """Return ``(residual, combo)`` with ``vec = residual + sum combo[t] * inserted[t]``."""
        res = dict(vec)
        combo: dict = {}
        rows = self.rows
        if not rows:
            return res, combo
        heap = []
        for k in res:
            if k in rows:
                heap.append((-self._order[k], k))
        heapq.heapify(heap)
        while heap:
            _, k = heapq.heappop(heap)
            c = res.get(k)
            if not c:
                continue
            row = rows[k]
            for kk, vv in row.items():
                nv = res.get(kk)
                nv = -c * vv if nv is None else nv - c * vv
                if nv:
                    if kk not in res and kk in rows and kk != k:
                        heapq.heappush(heap, (-self._order[kk], kk))
                    res[kk] = nv
                else:
                    res.pop(kk, None)
            if self.track:
                axpy(combo, c, self.combos[k])
        return res, combo

    def insert(self, vec: dict, tag=None) -> dict | None:
        """Add ``vec``; return ``None`` if it was independent, else the dependency.

        The dependency is a combination of tags (including ``tag`` itself)
        whose inserted vectors sum to zero.  Without tracking, a dependent
        vector returns an empty dict.
        """
        for k in vec:
            self._idx(k)
        res, combo = self.reduce(vec)
        if self.track:
            dep = {tag: self.field.one}
            axpy(dep, -self.field.one, combo)
        else:
            dep = {}
        if not res:
            return dep
        pivot = max(res, key=self._order.__getitem__)
        inv = 1 / res[pivot]
        self.rows[pivot] = {k: v * inv for k, v in res.items()}
        if self.track:
            self.combos[pivot] = {k: v * inv for k, v in dep.items()}
        return None

    def contains(self, vec: dict) -> bool:
        return not self.reduce(vec)[0]

    def express(self, vec: dict) -> dict | None:
        """Coefficients on inserted tags summing to ``vec``, or ``None``."""
        res, combo = self.reduce(vec)
        return None if res else combo

    def canonical(self, vec: dict) -> tuple:
        """Hashable canonical form of the coset ``vec + span``."""
        res, _ = self.reduce(vec)
        return freeze(res)

    def basis(self) -> list[dict]:
        return list(self.rows.values())


def freeze(vec: dict) -> tuple:
    """Order-independent hashable form of a sparse vector."""
    return tuple(sorted(((k, int(v) if hasattr(v, "p") else v) for k, v in vec.items()), key=lambda kv: repr(kv[0])))


def rank(columns: Iterable[dict], field: Field) -> int:
    e = Echelon(field)
    for c in columns:
        e.insert(c)
    return e.rank


def kernel(columns: Sequence[dict], field: Field) -> list[dict]:
    """Basis of ``{x : sum x[i] * columns[i] = 0}`` as dicts ``index -> coeff``."""
    e = Echelon(field, track=True)
    out = []
    for i, c in enumerate(columns):
        dep = e.insert(c, i)
        if dep is not None:
            out.append(dep)
    return out


def solve(columns: Sequence[dict], rhs: dict, field: Field) -> tuple[dict | None, list[dict]]:
    """Solve ``sum x[i] * columns[i] = rhs``.

    Returns ``(particular, kernel_basis)``; ``particular`` is ``None`` when the
    system is inconsistent.  Solutions form ``particular + span(kernel_basis)``.
    """
    e = Echelon(field, track=True)
    ker = []
    for i, c in enumerate(columns):
        dep = e.insert(c, i)
        if dep is not None:
            ker.append(dep)
    return e.express(rhs), ker


def affine_points(particular: dict, directions: Sequence[dict], field: Field):
    """Enumerate every point of a finite affine space over F_q."""
    if not field.is_finite:
        if directions:
            raise ValueError("an affine space of positive dimension over Q is infinite")
        yield dict(particular)
        return
    elems = list(field.elements())
    n = len(directions)
    idx = [0] * n
    while True:
        pt = dict(particular)
        for j, d in zip(idx, directions):
            if j:
                axpy(pt, elems[j], d)
        yield pt
        pos = 0
        while pos < n:
            idx[pos] += 1
            if idx[pos] < len(elems):
                break
            idx[pos] = 0
            pos += 1
        if pos == n:
            return


# dense helpers (numpy object arrays of field elements)


def zeros(field: Field, m: int, n: int) -> np.ndarray:
    a = np.empty((m, n), dtype=object)
    a.fill(field.zero)
    return a


def eye(field: Field, n: int) -> np.ndarray:
    a = zeros(field, n, n)
    for i in range(n):
        a[i, i] = field.one
    return a


def matmul(field: Field, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"shape mismatch {a.shape} x {b.shape}")
    if a.shape[1] == 0:
        return zeros(field, a.shape[0], b.shape[1])
    return np.dot(a, b)


def is_zero(a: np.ndarray) -> bool:
    return all(not x for x in a.flat)


def columns_of(a: np.ndarray) -> list[dict]:
    m, n = a.shape
    return [{i: a[i, j] for i in range(m) if a[i, j]} for j in range(n)]


def dense_rank(field: Field, a: np.ndarray) -> int:
    return rank(columns_of(a), field)


def as_matrix(field: Field, rows, shape: tuple[int, int] | None = None) -> np.ndarray:
    """Coerce nested lists (ints, Fractions, strings) into a field matrix."""
    if shape is not None and shape[0] * shape[1] == 0:
        return zeros(field, *shape)
    rows = list(rows)
    m = len(rows)
    n = len(rows[0]) if m else (shape[1] if shape else 0)
    out = zeros(field, m, n)
    for i, r in enumerate(rows):
        for j, x in enumerate(r):
            out[i, j] = field.parse(x) if isinstance(x, str) else field(x)
    return out

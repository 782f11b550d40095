"""Free dg categories given by generators and differentials.

Conventions used throughout the package:

* composition ``f * g`` (or ``f.compose(g)``) means *apply g first*; a path
  is stored as the word ``(x1, ..., xk)`` and denotes ``x1 x2 ... xk``, so
  ``xk`` is applied first;
* grading is homological and the differential has degree -1 with
  ``d(xy) = d(x) y + (-1)^{|x|} x d(y)``;
* an (F, G)-derivation ``f`` of degree ``|f|`` satisfies
  ``f(xy) = f(x) G(y) + (-1)^{|f||x|} F(x) f(y)``.

Because the category is free, paths form a basis of every hom-space, so a
morphism is a sparse map ``word -> coefficient`` and equality is equality of
these maps.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .fields import Field, QQ, Scalar

Word = tuple


class AlgebraError(Exception):
    """Base class for errors raised by the algebra layer."""


class CompositionError(AlgebraError):
    pass


class UnknownGeneratorError(AlgebraError, KeyError):
    def __str__(self):
        return f"unknown generator {self.args[0]!r}"


class InvalidPresentationError(AlgebraError):
    pass


class InvalidDerivationError(AlgebraError):
    pass


@dataclass(frozen=True)
class Generator:
    name: str
    source: str
    target: str
    degree: int
    weight: int | None = None

    def with_weight(self, weight: int | None) -> "Generator":
        return Generator(self.name, self.source, self.target, self.degree, weight)


class Morphism:
    """Homogeneous linear combination of parallel paths.

    Instances are immutable values.  ``terms`` never holds zero coefficients.
    """

    __slots__ = ("source", "target", "degree", "terms", "field")

    def __init__(self, source: str, target: str, degree: int, terms: Mapping[Word, Scalar] | None, field: Field):
        self.source = source
        self.target = target
        self.degree = degree
        self.field = field
        self.terms = {w: c for w, c in (terms or {}).items() if c}

    # construction helpers

    @classmethod
    def zero(cls, source: str, target: str, degree: int, field: Field) -> "Morphism":
        return cls(source, target, degree, {}, field)

    def _like(self, terms: dict) -> "Morphism":
        m = Morphism.__new__(Morphism)
        m.source, m.target, m.degree, m.field = self.source, self.target, self.degree, self.field
        m.terms = terms
        return m

    # vector-space structure

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def _check_parallel(self, other: "Morphism"):
        if (self.source, self.target) != (other.source, other.target):
            raise CompositionError(
                f"cannot add morphisms {self.source}->{self.target} and {other.source}->{other.target}"
            )
        if self.degree != other.degree and self.terms and other.terms:
            raise CompositionError(f"cannot add morphisms of degrees {self.degree} and {other.degree}")

    def __add__(self, other: "Morphism") -> "Morphism":
        if not isinstance(other, Morphism):
            return NotImplemented
        self._check_parallel(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for w, c in other.terms.items():
            nc = out.get(w)
            nc = c if nc is None else nc + c
            if nc:
                out[w] = nc
            else:
                out.pop(w, None)
        return self._like(out)

    def __neg__(self) -> "Morphism":
        return self._like({w: -c for w, c in self.terms.items()})

    def __sub__(self, other: "Morphism") -> "Morphism":
        if not isinstance(other, Morphism):
            return NotImplemented
        return self + (-other)

    def scale(self, c) -> "Morphism":
        c = self.field(c)
        if not c:
            return self._like({})
        return self._like({w: c * a for w, a in self.terms.items()})

    def __rmul__(self, c):
        if isinstance(c, Morphism):
            return NotImplemented
        return self.scale(c)

    def __mul__(self, other):
        if isinstance(other, Morphism):
            return self.compose(other)
        return self.scale(other)

    def compose(self, other: "Morphism") -> "Morphism":
        """``self o other``: apply ``other`` first."""
        if self.source != other.target:
            raise CompositionError(
                f"cannot compose {self.source}->{self.target} after {other.source}->{other.target}"
            )
        out: dict = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                nc = out.get(w)
                nc = c1 * c2 if nc is None else nc + c1 * c2
                if nc:
                    out[w] = nc
                else:
                    out.pop(w, None)
        m = Morphism.__new__(Morphism)
        m.source, m.target, m.field = other.source, self.target, self.field
        m.degree = self.degree + other.degree
        m.terms = out
        return m

    # comparison and display

    def __eq__(self, other):
        if not isinstance(other, Morphism):
            return NotImplemented
        if (self.source, self.target) != (other.source, other.target):
            return False
        if self.terms != other.terms:
            return False
        return not self.terms or self.degree == other.degree

    def __hash__(self):
        return hash((self.source, self.target, frozenset(self.terms.items())))

    def vector(self) -> dict:
        return self.terms

    def sorted_terms(self) -> list[tuple[Word, Scalar]]:
        return sorted(self.terms.items(), key=lambda wc: (not wc[0], len(wc[0]), wc[0]))

    def __str__(self):
        return format_morphism(self)

    def __repr__(self):
        return f"Morphism({self.source}->{self.target}, deg {self.degree}: {format_morphism(self)})"


def format_word(word: Word, source: str) -> str:
    return ".".join(word) if word else f"1_{source}"


def format_morphism(m: Morphism) -> str:
    if not m.terms:
        return "0"
    parts = []
    for word, c in m.sorted_terms():
        c = m.field.signed(c)
        sign = "-" if c < 0 else "+"
        a = abs(c)
        body = format_word(word, m.source)
        parts.append((sign, body if a == 1 else f"{a}*{body}"))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


class DgPresentation:
    """Free dg category on named objects and graded generators.

    ``base`` optionally names the sub-presentation ``C`` over which this one is
    free; its objects are the same and its generators are a subset, with the
    same differentials.
    """

    def __init__(
        self,
        objects: Sequence[str],
        generators: Sequence[Generator],
        differential: Mapping[str, Morphism] | None = None,
        base: "DgPresentation | None" = None,
        field: Field = QQ,
    ):
        self.objects = tuple(objects)
        if len(set(self.objects)) != len(self.objects):
            raise InvalidPresentationError("object names must be unique")
        self.field = field
        self.generators: dict[str, Generator] = {}
        for g in generators:
            if g.name in self.generators:
                raise InvalidPresentationError(f"duplicate generator {g.name!r}")
            if g.source not in self.objects or g.target not in self.objects:
                raise InvalidPresentationError(f"generator {g.name!r} has an endpoint outside the object set")
            self.generators[g.name] = g
        diff = dict(differential or {})
        for name in diff:
            if name not in self.generators:
                raise UnknownGeneratorError(name)
        self.differential: dict[str, Morphism] = {}
        for g in self.generators.values():
            dg = diff.get(g.name)
            if dg is None:
                dg = Morphism.zero(g.source, g.target, g.degree - 1, field)
            if (dg.source, dg.target) != (g.source, g.target):
                raise InvalidPresentationError(f"d({g.name}) has the wrong endpoints")
            if dg.terms and dg.degree != g.degree - 1:
                raise InvalidPresentationError(
                    f"d({g.name}) has degree {dg.degree}, expected {g.degree - 1}"
                )
            if dg.field != field:
                raise InvalidPresentationError(f"d({g.name}) is over {dg.field.name}, expected {field.name}")
            for word in dg.terms:
                self._check_word(word, g.source, g.target)
            self.differential[g.name] = dg
        self.base = base
        if base is not None:
            if base.objects != self.objects:
                raise InvalidPresentationError("a base must have the same objects")
            for name, g in base.generators.items():
                mine = self.generators.get(name)
                if mine is None or (mine.source, mine.target, mine.degree) != (g.source, g.target, g.degree):
                    raise InvalidPresentationError(f"base generator {name!r} missing or altered")
                if self.differential[name] != base.differential[name]:
                    raise InvalidPresentationError(f"base generator {name!r} has a different differential")
        self._d_cache: dict[Word, dict] = {}

    # basic data

    def __repr__(self):
        return f"DgPresentation(objects={list(self.objects)}, generators={list(self.generators)})"

    def gen(self, name: str) -> Morphism:
        g = self.generators.get(name)
        if g is None:
            raise UnknownGeneratorError(name)
        return Morphism(g.source, g.target, g.degree, {(name,): self.field.one}, self.field)

    def identity(self, obj: str) -> Morphism:
        if obj not in self.objects:
            raise InvalidPresentationError(f"unknown object {obj!r}")
        return Morphism(obj, obj, 0, {(): self.field.one}, self.field)

    def zero(self, source: str, target: str, degree: int) -> Morphism:
        return Morphism.zero(source, target, degree, self.field)

    def path(self, *names: str) -> Morphism:
        """The composite ``names[0] o names[1] o ...`` as a morphism."""
        if not names:
            raise ValueError("use identity() for empty paths")
        m = self.gen(names[0])
        for n in names[1:]:
            m = m * self.gen(n)
        return m

    def word_degree(self, word: Word) -> int:
        return sum(self.generators[x].degree for x in word)

    def word_endpoints(self, word: Word) -> tuple[str, str]:
        return self.generators[word[-1]].source, self.generators[word[0]].target

    def _check_word(self, word: Word, source: str, target: str) -> None:
        if not word:
            if source != target:
                raise InvalidPresentationError("identity term between distinct objects")
            return
        for x in word:
            if x not in self.generators:
                raise UnknownGeneratorError(x)
        for left, right in zip(word, word[1:]):
            if self.generators[right].target != self.generators[left].source:
                raise CompositionError(f"path {'.'.join(word)} is not composable")
        if self.word_endpoints(word) != (source, target):
            raise CompositionError(f"path {'.'.join(word)} does not run {source}->{target}")

    def check_morphism(self, m: Morphism) -> None:
        for word in m.terms:
            self._check_word(word, m.source, m.target)
            if self.word_degree(word) != m.degree:
                raise InvalidPresentationError(f"path {'.'.join(word)} has the wrong degree")

    @property
    def base_generators(self) -> tuple[str, ...]:
        return tuple(self.base.generators) if self.base is not None else ()

    def relative_generators(self) -> list[str]:
        base = set(self.base_generators)
        return [n for n in self.generators if n not in base]

    def is_weighted(self) -> bool:
        return all(g.weight is not None for g in self.generators.values())

    def with_weights(self, weights: Mapping[str, int]) -> "DgPresentation":
        gens = [g.with_weight(weights.get(g.name, g.weight)) for g in self.generators.values()]
        return DgPresentation(self.objects, gens, self.differential, self.base, self.field)

    def restrict(self, names: Iterable[str]) -> "DgPresentation":
        """Sub-presentation on a set of generators closed under the differential."""
        keep = list(names)
        ks = set(keep)
        for n in keep:
            for word in self.differential[n].terms:
                if not set(word) <= ks:
                    raise InvalidPresentationError(f"d({n}) leaves the requested generator set")
        return DgPresentation(
            self.objects,
            [self.generators[n] for n in keep],
            {n: self.differential[n] for n in keep},
            None,
            self.field,
        )

    # the differential

    def d(self, m: Morphism) -> Morphism:
        return extend_differential(self, m)

    def _d_word(self, word: Word) -> dict:
        cached = self._d_cache.get(word)
        if cached is not None:
            return cached
        out: dict = {}
        sign_deg = 0
        for i, x in enumerate(word):
            dx = self.differential[x].terms
            if dx:
                sgn = -1 if sign_deg % 2 else 1
                pre, post = word[:i], word[i + 1:]
                for w, c in dx.items():
                    nw = pre + w + post
                    nc = out.get(nw)
                    val = c if sgn == 1 else -c
                    nc = val if nc is None else nc + val
                    if nc:
                        out[nw] = nc
                    else:
                        out.pop(nw, None)
            sign_deg += self.generators[x].degree
        self._d_cache[word] = out
        return out

    def compose(self, f: Morphism, g: Morphism) -> Morphism:
        return f.compose(g)

    @cached_property
    def arrows_from(self) -> dict[str, list[Generator]]:
        out: dict[str, list[Generator]] = {o: [] for o in self.objects}
        for g in self.generators.values():
            out[g.source].append(g)
        return out

    def structurally_equal(self, other: "DgPresentation") -> bool:
        """Same objects, generators and differentials, ignoring declaration order."""
        if set(self.objects) != set(other.objects) or self.field != other.field:
            return False
        if set(self.generators) != set(other.generators):
            return False
        for n, g in self.generators.items():
            h = other.generators[n]
            if (g.source, g.target, g.degree) != (h.source, h.target, h.degree):
                return False
            if self.differential[n] != other.differential[n]:
                return False
        return True


def extend_differential(P: DgPresentation, m: Morphism) -> Morphism:
    """Apply the Leibniz extension of ``P``'s differential to ``m``."""
    out: dict = {}
    for word, c in m.terms.items():
        for x in word:
            if x not in P.generators:
                raise UnknownGeneratorError(x)
        for w, a in P._d_word(word).items():
            nc = out.get(w)
            nc = c * a if nc is None else nc + c * a
            if nc:
                out[w] = nc
            else:
                out.pop(w, None)
    return Morphism(m.source, m.target, m.degree - 1, out, m.field)


@dataclass
class DSquaredReport:
    ok: bool
    violations: list[tuple[str, Morphism]] = dc_field(default_factory=list)

    def __bool__(self):
        return self.ok


def check_d_squared(P: DgPresentation) -> DSquaredReport:
    """Check ``d(d(g)) = 0`` for every generator; violations carry the residue."""
    bad = []
    for name, dg in P.differential.items():
        r = P.d(dg)
        if r.terms:
            bad.append((name, r))
    return DSquaredReport(not bad, bad)


class DgFunctor:
    """A functor out of a presentation, given by object and generator images.

    The target can be another :class:`DgPresentation`, a finite dg category
    or a complexes category; all it needs is ``identity``, ``compose`` and
    ``d`` plus elements supporting ``+``, ``-`` and scalar ``*``.
    """

    def __init__(self, source: DgPresentation, target, object_map: Mapping[str, str], images: Mapping[str, object]):
        self.source = source
        self.target = target
        self.object_map = dict(object_map)
        for o in source.objects:
            if o not in self.object_map:
                raise InvalidPresentationError(f"object {o!r} has no image")
        missing = [n for n in source.generators if n not in images]
        if missing:
            raise InvalidPresentationError(f"generators without image: {missing}")
        self.images = {n: images[n] for n in source.generators}
        self._word_cache: dict[Word, object] = {}

    def apply_word(self, word: Word, source_obj: str):
        if not word:
            return self.target.identity(self.object_map[source_obj])
        cached = self._word_cache.get(word)
        if cached is not None:
            return cached
        img = self.images[word[0]]
        for x in word[1:]:
            img = self.target.compose(img, self.images[x])
        self._word_cache[word] = img
        return img

    def __call__(self, m: Morphism):
        src, tgt = self.object_map[m.source], self.object_map[m.target]
        total = None
        for word, c in m.terms.items():
            term = self.apply_word(word, m.source) * c
            total = term if total is None else total + term
        if total is None:
            return self.target.zero(src, tgt, m.degree)
        return total

    def dg_violations(self) -> list[str]:
        """Generators ``g`` with ``d(F(g)) != F(d(g))``."""
        bad = []
        for n in self.source.generators:
            lhs = self.target.d(self.images[n])
            rhs = self(self.source.differential[n])
            if not (lhs - rhs).is_zero():
                bad.append(n)
        return bad

    def is_dg(self) -> bool:
        return not self.dg_violations()


def inclusion(source: DgPresentation, target: DgPresentation) -> DgFunctor:
    """Identity-on-names functor from a sub-presentation."""
    return DgFunctor(source, target, {o: o for o in source.objects}, {n: target.gen(n) for n in source.generators})


class Derivation:
    """An (F, G)-derivation out of a presentation, fixed by generator values.

    Generators without an assigned value (typically those of the base) are
    sent to zero.
    """

    def __init__(self, F: DgFunctor, G: DgFunctor, degree: int, values: Mapping[str, object]):
        if F.source is not G.source:
            raise InvalidDerivationError("F and G must share a source")
        self.F, self.G, self.degree = F, G, degree
        self.source = F.source
        self.target = F.target
        self.values = {}
        for n, val in values.items():
            g = self.source.generators.get(n)
            if g is None:
                raise UnknownGeneratorError(n)
            src, tgt = F.object_map[g.source], F.object_map[g.target]
            if (val.source, val.target) != (src, tgt) or (not _is_zero(val) and val.degree != g.degree + degree):
                raise InvalidDerivationError(f"value on {n!r} has the wrong endpoints or degree")
            self.values[n] = val

    def __call__(self, m: Morphism):
        P = self.source
        src, tgt = self.F.object_map[m.source], self.F.object_map[m.target]
        total = self.target.zero(src, tgt, m.degree + self.degree)
        for word, c in m.terms.items():
            k = len(word)
            if k == 0:
                continue
            # suffix images under G: G(x_{i+1} ... x_k)
            suffix = [None] * (k + 1)
            for i in range(k - 1, -1, -1):
                gi = self.G.images[word[i]]
                suffix[i] = gi if suffix[i + 1] is None else self.target.compose(gi, suffix[i + 1])
            prefix = None
            prefix_deg = 0
            for i, x in enumerate(word):
                val = self.values.get(x)
                if val is not None and not _is_zero(val):
                    term = val
                    if suffix[i + 1] is not None:
                        term = self.target.compose(term, suffix[i + 1])
                    if prefix is not None:
                        term = self.target.compose(prefix, term)
                    sgn = -1 if (self.degree * prefix_deg) % 2 else 1
                    total = total + term * (c if sgn == 1 else -c)
                fx = self.F.images[x]
                prefix = fx if prefix is None else self.target.compose(prefix, fx)
                prefix_deg += P.generators[x].degree
        return total


def extend_derivation(f: Derivation, m: Morphism):
    return f(m)


def _is_zero(x) -> bool:
    return x.is_zero()


def random_word(P: DgPresentation, rng: random.Random, max_length: int, source: str | None = None,
                generators: Sequence[str] | None = None) -> tuple[str, Word]:
    """A uniformly grown composable word of length ``1..max_length``; returns ``(source, word)``."""
    allowed = set(generators) if generators is not None else set(P.generators)
    objs = [o for o in P.objects if any(g.name in allowed for g in P.arrows_from[o])]
    if not objs:
        raise ValueError("no generators to build words from")
    start = source if source is not None else rng.choice(objs)
    length = rng.randint(1, max_length)
    word: list[str] = []
    cur = start
    for _ in range(length):
        opts = [g for g in P.arrows_from[cur] if g.name in allowed]
        if not opts:
            break
        g = rng.choice(opts)
        word.insert(0, g.name)
        cur = g.target
    if not word:
        return random_word(P, rng, max_length, None, generators)
    return start, tuple(word)


def random_morphism(P: DgPresentation, rng: random.Random, max_length: int = 4, max_terms: int = 3,
                    generators: Sequence[str] | None = None) -> Morphism:
    """Random homogeneous combination of words of length at most ``max_length``."""
    src, word = random_word(P, rng, max_length, generators=generators)
    tgt = P.generators[word[0]].target
    deg = P.word_degree(word)
    terms = {word: P.field.random(rng, nonzero=True)}
    for _ in range(40 * max_terms):
        if len(terms) >= max_terms:
            break
        _, w = random_word(P, rng, max_length, source=src, generators=generators)
        if P.generators[w[0]].target == tgt and P.word_degree(w) == deg:
            c = P.field.random(rng, nonzero=True)
            terms[w] = terms.get(w, P.field.zero) + c
    return Morphism(src, tgt, deg, terms, P.field)


def opposite(P: DgPresentation, object_map: Mapping[str, str] | None = None) -> DgPresentation:
    """Opposite presentation: arrows reversed, words reversed with Koszul signs.

    ``(x1 ... xk)^op`` equals ``eps * xk^op ... x1^op`` where ``eps`` is the sign
    of reversing graded letters.  ``object_map`` optionally renames objects.
    """
    omap = dict(object_map or {o: o for o in P.objects})
    gens = [Generator(g.name, omap[g.target], omap[g.source], g.degree, g.weight) for g in P.generators.values()]
    objs = [omap[o] for o in P.objects]

    def op_word_sign(word: Word) -> int:
        degs = [P.generators[x].degree for x in word]
        s = 0
        for i in range(len(degs)):
            for j in range(i + 1, len(degs)):
                s += degs[i] * degs[j]
        return -1 if s % 2 else 1

    diff = {}
    for n, dg in P.differential.items():
        terms = {}
        for w, c in dg.terms.items():
            terms[tuple(reversed(w))] = c if op_word_sign(w) == 1 else -c
        diff[n] = Morphism(omap[dg.target], omap[dg.source], dg.degree, terms, P.field)
    return DgPresentation(sorted(objs, key=objs.index), gens, diff, None, P.field)


def find_isomorphism(P: DgPresentation, Q: DgPresentation, object_map: Mapping[str, str] | None = None,
                     scalars: Sequence = (1,)) -> dict[str, tuple[str, object]] | None:
    """Search for a generator bijection ``P -> Q`` intertwining differentials.

    Each generator may be sent to a scalar multiple (drawn from ``scalars``)
    of a generator with the same endpoints and degree.  Returns
    ``{name: (image_name, scalar)}`` or ``None``.  Meant for desk-scale
    presentations; the search is a plain backtracking over candidates.
    """
    if len(P.generators) != len(Q.generators) or len(P.objects) != len(Q.objects):
        return None
    omap = dict(object_map or {o: o for o in P.objects})
    pg = list(P.generators.values())
    field = P.field
    choice: dict[str, tuple[str, object]] = {}
    used: set[str] = set()

    def candidates(g: Generator):
        for h in Q.generators.values():
            if h.name in used:
                continue
            if (omap[g.source], omap[g.target], g.degree) == (h.source, h.target, h.degree):
                for s in scalars:
                    yield h.name, field(s)

    def consistent() -> bool:
        for n, (m, s) in choice.items():
            dg = P.differential[n]
            if any(x not in choice for w in dg.terms for x in w):
                continue
            mapped = {}
            for w, c in dg.terms.items():
                coef = c
                nw = []
                for x in w:
                    y, sx = choice[x]
                    nw.append(y)
                    coef = coef * sx
                mapped[tuple(nw)] = mapped.get(tuple(nw), field.zero) + coef
            lhs = Morphism(omap[dg.source], omap[dg.target], dg.degree, mapped, field)
            rhs = Q.differential[m].scale(s)
            if lhs != rhs:
                return False
        return True

    def search(i: int) -> bool:
        if i == len(pg):
            return True
        g = pg[i]
        for m, s in candidates(g):
            choice[g.name] = (m, s)
            used.add(m)
            if consistent() and search(i + 1):
                return True
            del choice[g.name]
            used.discard(m)
        return False

    return dict(choice) if search(0) else None

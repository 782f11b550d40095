"""Text format for presentations (``.dgp`` files).

    field F2
    obj O1 O2
    gen v : O1 -> O2 deg 0
    gen w : O2 -> O1 deg 0 wt 1
    gen u : O2 -> O2 deg 1
    base v
    d u = v.w - 1_O2

``v.w`` is the composite that applies ``w`` first.  ``field`` and ``base``
are optional; ``base`` lists the generators of the sub-presentation the
file is free over.  Comments start with ``#`` at the beginning of a token.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import (
    AlgebraError,
    DgPresentation,
    Generator,
    Morphism,
    check_d_squared,
    format_morphism,
)
from .fields import Field, QQ


class ParseError(ValueError):
    """Syntax or typing error at a 1-based ``line`` and ``column``."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class DSquaredError(ParseError):
    def __init__(self, residues: list[tuple[str, Morphism]]):
        text = "; ".join(f"d(d({n})) = {format_morphism(r)}" for n, r in residues)
        super().__init__(f"d^2 != 0: {text}", 0, 0)
        self.residues = residues


@dataclass(frozen=True)
class Token:
    kind: str  # name, ident (1_X), int, op, eol, eof
    text: str
    line: int
    col: int


_OPS = {":", "+", "-", "*", "/", ".", "=", "->"}


def _is_name_start(ch: str) -> bool:
    return ch.isascii() and ch.isalpha()


def _is_name_char(ch: str) -> bool:
    return ch.isascii() and (ch.isalnum() or ch in "_'#")


def tokenize(text: str) -> list[Token]:
    out: list[Token] = []
    for ln, line in enumerate(text.splitlines(), start=1):
        i, n = 0, len(line)
        while i < n:
            ch = line[i]
            col = i + 1
            if ch in " \t\r":
                i += 1
            elif ch == "#":
                break
            elif line.startswith("->", i):
                out.append(Token("op", "->", ln, col))
                i += 2
            elif ch in _OPS:
                out.append(Token("op", ch, ln, col))
                i += 1
            elif line.startswith("1_", i) and i + 2 < n and _is_name_start(line[i + 2]):
                j = i + 3
                while j < n and _is_name_char(line[j]):
                    j += 1
                out.append(Token("ident", line[i + 2:j], ln, col))
                i = j
            elif ch.isdigit():
                j = i
                while j < n and line[j].isdigit():
                    j += 1
                out.append(Token("int", line[i:j], ln, col))
                i = j
            elif _is_name_start(ch):
                j = i + 1
                while j < n and _is_name_char(line[j]):
                    j += 1
                out.append(Token("name", line[i:j], ln, col))
                i = j
            else:
                raise ParseError(f"unexpected character {ch!r}", ln, col)
        out.append(Token("eol", "", ln, n + 1))
    last = len(text.splitlines()) + 1
    out.append(Token("eof", "", last, 1))
    return out


@dataclass
class _Term:
    coeff: Fraction
    word: tuple[str, ...] | None  # None: identity
    obj: str | None
    tok: Token


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def advance(self) -> Token:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.tok
        return ParseError(msg, tok.line, tok.col)

    def expect(self, kind: str, text: str | None = None) -> Token:
        t = self.tok
        if t.kind != kind or (text is not None and t.text != text):
            want = repr(text) if text else kind
            got = repr(t.text) if t.text else t.kind
            raise self.error(f"expected {want}, got {got}")
        return self.advance()

    def keyword(self, word: str) -> Token:
        return self.expect("name", word)

    def integer(self) -> int:
        sign = 1
        if self.tok.kind == "op" and self.tok.text == "-":
            self.advance()
            sign = -1
        return sign * int(self.expect("int").text)

    def coeff(self) -> Fraction:
        num = int(self.expect("int").text)
        den = 1
        if self.tok.kind == "op" and self.tok.text == "/":
            self.advance()
            t = self.expect("int")
            den = int(t.text)
            if den == 0:
                raise self.error("zero denominator", t)
        return Fraction(num, den)

    def term(self, sign: int) -> _Term:
        start = self.tok
        c = Fraction(sign)
        if self.tok.kind == "int":
            c *= self.coeff()
            if self.tok.kind == "op" and self.tok.text == "*":
                self.advance()
            elif self.tok.kind != "ident":
                if c == 0:
                    return _Term(c, None, None, start)
                raise self.error("expected '*' after a coefficient")
        if self.tok.kind == "ident":
            return _Term(c, None, self.advance().text, start)
        word = [self.expect("name").text]
        while self.tok.kind == "op" and self.tok.text == ".":
            self.advance()
            word.append(self.expect("name").text)
        return _Term(c, tuple(word), None, start)

    def expr(self) -> list[_Term]:
        sign = 1
        if self.tok.kind == "op" and self.tok.text in "+-":
            sign = -1 if self.advance().text == "-" else 1
        terms = [self.term(sign)]
        while self.tok.kind == "op" and self.tok.text in ("+", "-"):
            sign = -1 if self.advance().text == "-" else 1
            terms.append(self.term(sign))
        return terms


def parse_presentation(text: str, field: Field | None = None, check: bool = True) -> DgPresentation:
    """Parse ``.dgp`` text.  ``field`` overrides a ``field`` statement; default Q."""
    p = _Parser(text)
    objects: list[str] = []
    obj_tok: dict[str, Token] = {}
    gens: list[Generator] = []
    gen_tok: dict[str, Token] = {}
    diffs: list[tuple[Token, list[_Term]]] = []
    base_names: list[tuple[str, Token]] = []
    declared_field: Field | None = None
    while p.tok.kind != "eof":
        t = p.tok
        if t.kind == "eol":
            p.advance()
            continue
        if t.kind != "name":
            raise p.error("expected a statement keyword")
        kw = p.advance().text
        if kw == "obj":
            if p.tok.kind != "name":
                raise p.error("expected object names")
            while p.tok.kind == "name":
                o = p.advance()
                if o.text in obj_tok:
                    raise p.error(f"object {o.text!r} declared twice", o)
                objects.append(o.text)
                obj_tok[o.text] = o
        elif kw == "gen":
            nt = p.expect("name")
            p.expect("op", ":")
            src = p.expect("name")
            p.expect("op", "->")
            tgt = p.expect("name")
            for o in (src, tgt):
                if o.text not in obj_tok:
                    raise p.error(f"unknown object {o.text!r}", o)
            p.keyword("deg")
            deg = p.integer()
            wt = None
            if p.tok.kind == "name" and p.tok.text == "wt":
                p.advance()
                wt = p.integer()
            if nt.text in gen_tok:
                raise p.error(f"generator {nt.text!r} declared twice", nt)
            gens.append(Generator(nt.text, src.text, tgt.text, deg, wt))
            gen_tok[nt.text] = nt
        elif kw == "d":
            nt = p.expect("name")
            p.expect("op", "=")
            diffs.append((nt, p.expr()))
        elif kw == "base":
            if p.tok.kind != "name":
                raise p.error("expected generator names")
            while p.tok.kind == "name":
                b = p.advance()
                base_names.append((b.text, b))
        elif kw == "field":
            ft = p.expect("name")
            try:
                declared_field = Field.from_name(ft.text)
            except ValueError as exc:
                raise p.error(str(exc), ft) from None
        else:
            raise p.error(f"unknown statement {kw!r}", t)
        if p.tok.kind not in ("eol", "eof"):
            raise p.error("unexpected trailing input")

    field = field or declared_field or QQ
    by_name = {g.name: g for g in gens}
    differential: dict[str, Morphism] = {}
    for nt, terms in diffs:
        g = by_name.get(nt.text)
        if g is None:
            raise ParseError(f"unknown generator {nt.text!r}", nt.line, nt.col)
        if nt.text in differential:
            raise ParseError(f"differential of {nt.text!r} given twice", nt.line, nt.col)
        differential[nt.text] = _build(terms, g, by_name, field)
    base = None
    if base_names:
        for name, tok in base_names:
            if name not in by_name:
                raise ParseError(f"unknown generator {name!r}", tok.line, tok.col)
        keep = [g for g in gens if g.name in {n for n, _ in base_names}]
        try:
            base = DgPresentation(objects, keep, {g.name: differential[g.name] for g in keep if g.name in differential},
                                  None, field)
        except AlgebraError as exc:
            tok = base_names[0][1]
            raise ParseError(f"base is not a sub-presentation: {exc}", tok.line, tok.col) from None
    try:
        P = DgPresentation(objects, gens, differential, base, field)
    except AlgebraError as exc:
        raise ParseError(str(exc), 0, 0) from None
    if check:
        rep = check_d_squared(P)
        if not rep.ok:
            raise DSquaredError(rep.violations)
    return P


def _build(terms: list[_Term], g: Generator, gens: dict[str, Generator], field: Field) -> Morphism:
    total: dict = {}
    want = g.degree - 1
    for t in terms:
        if field.p and t.coeff.denominator % field.p == 0:
            raise ParseError(f"coefficient {t.coeff} is undefined in {field.name}", t.tok.line, t.tok.col)
        c = field(t.coeff)
        if t.word is None and t.obj is None:
            continue  # literal zero
        if t.word is None:
            src = tgt = t.obj
            deg = 0
            word: tuple = ()
        else:
            for x in t.word:
                if x not in gens:
                    raise ParseError(f"unknown generator {x!r}", t.tok.line, t.tok.col)
            for left, right in zip(t.word, t.word[1:]):
                if gens[right].target != gens[left].source:
                    raise ParseError(f"{left}.{right} is not composable", t.tok.line, t.tok.col)
            tgt, src = gens[t.word[0]].target, gens[t.word[-1]].source
            deg = sum(gens[x].degree for x in t.word)
            word = t.word
        if (src, tgt) != (g.source, g.target):
            raise ParseError(f"term runs {src} -> {tgt}, d({g.name}) must run {g.source} -> {g.target}",
                             t.tok.line, t.tok.col)
        if deg != want:
            raise ParseError(f"term has degree {deg}, d({g.name}) needs degree {want}", t.tok.line, t.tok.col)
        total[word] = total.get(word, field.zero) + c
    return Morphism(g.source, g.target, want, total, field)


def parse_morphism(P: DgPresentation, text: str) -> Morphism:
    """Read an expression such as ``v.w - 1_O2`` in ``P``; endpoints come from the first term."""
    p = _Parser(text)
    terms = p.expr()
    if p.tok.kind not in ("eol", "eof"):
        raise p.error("unexpected trailing input")
    gens = P.generators
    first = next((t for t in terms if t.word is not None or t.obj is not None), None)
    if first is None:
        raise ParseError("cannot infer endpoints of 0", 1, 1)
    if first.word is None:
        if first.obj not in P.objects:
            raise ParseError(f"unknown object {first.obj!r}", first.tok.line, first.tok.col)
        src = tgt = first.obj
        deg = 0
    else:
        for x in first.word:
            if x not in gens:
                raise ParseError(f"unknown generator {x!r}", first.tok.line, first.tok.col)
        tgt, src = gens[first.word[0]].target, gens[first.word[-1]].source
        deg = sum(gens[x].degree for x in first.word)
    # a phantom generator one degree up lets _build do the checking
    return _build(terms, Generator("<expr>", src, tgt, deg + 1), gens, P.field)


def print_presentation(P: DgPresentation) -> str:
    """Canonical text; ``parse_presentation(print_presentation(P))`` equals ``P``."""
    lines = [f"field {P.field.name}", "obj " + " ".join(P.objects)]
    for g in P.generators.values():
        wt = f" wt {g.weight}" if g.weight is not None else ""
        lines.append(f"gen {g.name} : {g.source} -> {g.target} deg {g.degree}{wt}")
    if P.base is not None and P.base.generators:
        lines.append("base " + " ".join(P.base.generators))
    for name, dg in P.differential.items():
        if dg.terms:
            lines.append(f"d {name} = {format_morphism(dg)}")
    return "\n".join(lines) + "\n"


def load(path) -> DgPresentation:
    with open(path, encoding="utf-8") as fh:
        return parse_presentation(fh.read())

"""Presentations of shuffle operads by generators and relations, optionally
coloured by a finite groupoid, with their text format.

::

    colours: a b c
    arrow f: b -> c                  # groupoid arrows (a forest)
    generator N: c <- b c            # output <- inputs
    order: path-lex                  # plus longer-smaller, root-first, reverse-leaves
    letters: N                       # generator precedence, smallest first
    relation r: N(N[b;b,c](1,2),3) - N(1,N[c;c,c](2,3))

A decorated generator ``N[d;c1,c2]`` is the discrete generator obtained by
moving the output to colour d and the inputs to colours c1, c2; a plain ``N``
keeps its declared colours. Coefficients are integers or fractions.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .groupoid import FiniteGroupoid, GroupoidError, decorate, discrete_signature, e_star_2, star_relations
from .orders import TreeOrder, path_lex_order
from .rewriting import Polynomial, Rule, RewriteSystem, make_rule
from .textio import ParseError, _lines, _split_key, _tokens
from .trees import Generator, Leaf, Node, Tree, TreeError, shuffle_compose, shuffle_permutations, validate

ORDER_FLAGS = ("longer-smaller", "root-first", "reverse-leaves")


@dataclass
class Presentation:
    colours: tuple = ()
    arrows: tuple = ()  # (name, source, target)
    generators: tuple = ()  # base generators
    order_flags: tuple = ()
    letters: tuple = ()
    relations: tuple = ()  # (name, Polynomial)
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def groupoid(self) -> FiniteGroupoid:
        if "gpd" not in self._cache:
            self._cache["gpd"] = FiniteGroupoid(self.colours, self.arrows)
        return self._cache["gpd"]

    @property
    def has_groupoid(self) -> bool:
        return bool(self.arrows)

    def signature(self) -> list[Generator]:
        """The generators monomials are built from (discrete ones when a groupoid acts)."""
        if self.has_groupoid:
            return discrete_signature(self.generators, self.groupoid)
        return list(self.generators)

    def order(self) -> TreeOrder:
        if "order" not in self._cache:
            rank = {n: k for k, n in enumerate(self.letters)}

            def gen_key(g):
                return (rank.get(g.name, len(rank)), g.name, _params_key(g.params))

            self._cache["order"] = path_lex_order(
                gen_key,
                longer_smaller="longer-smaller" in self.order_flags,
                root_first="root-first" in self.order_flags,
                reverse_leaves="reverse-leaves" in self.order_flags,
                name="path-lex " + " ".join(self.order_flags),
            )
        return self._cache["order"]

    def star_rules(self) -> tuple[list[Rule], list[Rule]]:
        gpd, o = self.groupoid, self.order()
        e2 = e_star_2(self.signature(), gpd, o)
        rs = star_relations([p for _, p in self.relations], gpd, o)
        return e2, rs

    def rules(self) -> list[Rule]:
        if self.has_groupoid:
            e2, rs = self.star_rules()
            return e2 + rs
        return [make_rule(p, self.order(), name) for name, p in self.relations if p]

    def system(self) -> RewriteSystem:
        if "system" not in self._cache:
            self._cache["system"] = RewriteSystem(self.rules(), self.order(), name="presentation")
        return self._cache["system"]

    def monomials(self, max_weight: int) -> list[Tree]:
        """Every shuffle tree monomial of weight 1..max_weight over the signature."""
        gens = self.signature()
        corollas = [Node(g, [Leaf(k, c) for k, c in enumerate(g.inputs, 1)]) for g in gens]
        by_weight = {1: set(corollas)}
        for w in range(2, max_weight + 1):
            made = set()
            for t in by_weight[w - 1]:
                for c in corollas:
                    for i, l in enumerate(sorted(t.leaves(), key=lambda x: x.label), 1):
                        if l.colour != c.colour:
                            continue
                        for s in shuffle_permutations(t.arity, c.arity, i):
                            try:
                                made.add(shuffle_compose(t, i, s, c))
                            except TreeError:
                                continue
            by_weight[w] = made
        out = []
        for w in sorted(by_weight):
            out.extend(sorted(by_weight[w], key=self.order().key))
        return out


def _params_key(params) -> tuple:
    return tuple(str(p) for p in params)


# -- parsing --------------------------------------------------------------------


def parse_presentation(text: str) -> Presentation:
    colours, arrows, gens, flags, letters, rels = [], [], [], (), (), []
    pending = []
    for no, line in _lines(text):
        key, value = _split_key(line, no)
        words = key.split()
        if key == "colours":
            colours = _tokens(value)
        elif words[0] == "arrow" and len(words) == 2:
            m = re.fullmatch(r"(\S+)\s*->\s*(\S+)", value)
            if not m:
                raise ParseError("expected 'arrow f: a -> b'", no)
            arrows.append((words[1], m.group(1), m.group(2)))
        elif words[0] == "generator" and len(words) == 2:
            out, sep, ins = value.partition("<-")
            if not sep:
                raise ParseError("expected 'generator g: out <- in1 in2'", no)
            gens.append(Generator(words[1], (), None, tuple(_tokens(ins)), out.strip()))
        elif key == "order":
            toks = _tokens(value)
            if not toks or toks[0] != "path-lex" or any(t not in ORDER_FLAGS for t in toks[1:]):
                raise ParseError(f"unknown order {value!r}", no)
            flags = tuple(t for t in ORDER_FLAGS if t in toks[1:])
        elif key == "letters":
            letters = tuple(_tokens(value))
        elif words[0] == "relation":
            name = words[1] if len(words) > 1 else f"r{len(pending) + 1}"
            pending.append((name, value, no))
        else:
            raise ParseError(f"unknown key {key!r}", no)
    for g in gens:
        for c in (g.output,) + g.inputs:
            if c not in colours:
                raise ParseError(f"generator {g.name} uses undeclared colour {c!r}")
    pres = Presentation(tuple(colours), tuple(arrows), tuple(gens), flags, letters)
    try:
        pres.groupoid
    except GroupoidError as exc:
        raise ParseError(str(exc)) from None
    for name, value, no in pending:
        try:
            rels.append((name, parse_polynomial(value, pres)))
        except ParseError as exc:
            raise ParseError(str(exc), no) from None
    pres.relations = tuple(rels)
    return pres


_TERM = re.compile(r"\s*([+-])?\s*(?:(\d+)(?:/(\d+))?\s*\*)?\s*")


def parse_polynomial(text: str, pres: Presentation) -> Polynomial:
    text = text.strip()
    if text == "0":
        return Polynomial()
    pos, out, first = 0, Polynomial(), True
    while pos < len(text):
        m = _TERM.match(text, pos)
        sign = m.group(1)
        if sign is None and not first:
            raise ParseError(f"expected '+' or '-' at column {pos + 1}")
        coef = Fraction(int(m.group(2) or 1), int(m.group(3) or 1))
        if sign == "-":
            coef = -coef
        pos = m.end()
        t, pos = _parse_term(text, pos, pres)
        if out and _boundary(t) != _boundary(next(iter(out.terms))):
            raise ParseError(f"{t!r} has other input or output colours than the first term")
        out = out + Polynomial.monomial(t, coef)
        first = False
        while pos < len(text) and text[pos] == " ":
            pos += 1
    return out


def _boundary(t: Tree) -> tuple:
    return t.colour, tuple(sorted((l.label, l.colour) for l in t.leaves()))


def parse_monomial(text: str, pres: Presentation) -> Tree:
    t, pos = _parse_term(text.strip(), 0, pres)
    if text.strip()[pos:].strip():
        raise ParseError(f"trailing text in {text!r}")
    return t


_HEAD = re.compile(r"([A-Za-z_]\w*)(?:\[([^\]]*)\])?\s*\(")


def _parse_term(text: str, pos: int, pres: Presentation) -> tuple[Tree, int]:
    base = {g.name: g for g in pres.generators}
    gpd = pres.groupoid

    def expr(colour):
        nonlocal pos
        m = re.compile(r"\s*(\d+)").match(text, pos)
        if m:
            pos = m.end()
            return ("leaf", int(m.group(1)))
        m = _HEAD.match(text, pos)
        if not m:
            raise ParseError(f"expected a monomial at column {pos + 1} of {text!r}")
        pos = m.end()
        name, deco = m.group(1), m.group(2)
        if name not in base:
            raise ParseError(f"unknown generator {name!r}")
        gen = _discrete(base[name], deco, gpd, pres.has_groupoid)
        kids = []
        for k, c in enumerate(gen.inputs):
            if k:
                m = re.compile(r"\s*,").match(text, pos)
                if not m:
                    raise ParseError(f"expected ',' at column {pos + 1} of {text!r}")
                pos = m.end()
            kids.append(expr(c))
        m = re.compile(r"\s*\)").match(text, pos)
        if not m:
            raise ParseError(f"expected ')' at column {pos + 1} of {text!r}")
        pos = m.end()
        return ("node", gen, kids)

    raw = expr(None)

    def build(r, colour):
        if r[0] == "leaf":
            if colour is None:
                raise ParseError("a bare leaf is not a monomial")
            return Leaf(r[1], colour)
        _, gen, kids = r
        if colour is not None and gen.output != colour:
            raise ParseError(f"{gen.name} outputs {gen.output}, the slot needs {colour}")
        return Node(gen, [build(k, c) for k, c in zip(kids, gen.inputs)])

    t = build(raw, None)
    labels = sorted(l.label for l in t.leaves())
    if labels != list(range(1, len(labels) + 1)):
        raise ParseError(f"leaves must be labelled 1..{len(labels)}")
    bad = validate(t)
    if bad:
        raise ParseError(f"not a shuffle tree monomial: {bad[0]}")
    return t, pos


def _discrete(base: Generator, deco, gpd: FiniteGroupoid, grouped: bool) -> Generator:
    if not grouped:
        if deco:
            raise ParseError(f"{base.name} takes no decoration without a groupoid")
        return base
    if deco is None:
        out, ins = base.output, base.inputs
    else:
        o, _, i = deco.partition(";")
        out, ins = o.strip(), tuple(_tokens(i))
        if len(ins) != len(base.inputs):
            raise ParseError(f"{base.name} has {len(base.inputs)} inputs")
    out_m = gpd.hom(base.output, out)
    in_ms = [gpd.hom(x, c) for x, c in zip(ins, base.inputs)]
    if not out_m or not all(in_ms):
        raise ParseError(f"no groupoid arrow realises {base.name}[{deco}]")
    if len(out_m) > 1 or any(len(m) > 1 for m in in_ms):
        raise ParseError(f"{base.name}[{deco}] is ambiguous: the colours have automorphisms")
    return decorate(base, out_m[0], [m[0] for m in in_ms])


# -- printing --------------------------------------------------------------------


def format_generator(g: Generator, grouped: bool) -> str:
    if not grouped or not g.params:
        return g.name
    out, ins = g.params
    if out.source == out.target and all(m.source == m.target for m in ins):
        return g.name
    return f"{g.name}[{out.target};{','.join(m.source for m in ins)}]"


def format_monomial(t: Tree, grouped: bool = False) -> str:
    if isinstance(t, Leaf):
        return str(t.label)
    return format_generator(t.gen, grouped) + "(" + ",".join(format_monomial(c, grouped) for c in t.children) + ")"


def format_polynomial(f: Polynomial, order: TreeOrder | None = None, grouped: bool = False) -> str:
    if not f:
        return "0"
    terms = f.sorted_terms(order) if order is not None else list(f.terms)
    parts = []
    for k, t in enumerate(terms):
        c = f[t]
        sign = "-" if c < 0 else "+"
        c = abs(c)
        coef = "" if c == 1 else f"{c}*"
        body = coef + format_monomial(t, grouped)
        parts.append(("- " if sign == "-" else "") + body if k == 0 else f" {sign} {body}")
    return "".join(parts)


def format_rule(r: Rule, order: TreeOrder, grouped: bool = False) -> str:
    return f"{format_monomial(r.lead, grouped)} -> {format_polynomial(r.tail(), order, grouped)}"


def format_presentation(p: Presentation) -> str:
    lines = ["colours: " + " ".join(p.colours)]
    for name, a, b in p.arrows:
        lines.append(f"arrow {name}: {a} -> {b}")
    for g in p.generators:
        lines.append(f"generator {g.name}: {g.output} <- {' '.join(g.inputs)}")
    lines.append("order: " + " ".join(("path-lex",) + p.order_flags))
    if p.letters:
        lines.append("letters: " + " ".join(p.letters))
    for name, f in p.relations:
        lines.append(f"relation {name}: {format_polynomial(f, None, p.has_groupoid)}")
    return "\n".join(lines) + "\n"

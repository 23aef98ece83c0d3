"""Groupoid elimination: orbits under edge actions, minimal representatives,
and the quadratic rules that replace a groupoid action by discrete relations."""
from __future__ import annotations

from collections import deque
from itertools import product
from typing import Iterable, NamedTuple, Sequence

from .orders import TreeOrder
from .rewriting import Polynomial, Rule, make_rule
from .trees import Generator, Leaf, Node, Tree, TreeError, shuffle_compose, shuffle_permutations


class GroupoidError(ValueError):
    pass


class Morphism(NamedTuple):
    """An arrow source -> target, stored as an element of the root automorphism group."""

    target: object
    element: tuple
    source: object

    def __str__(self) -> str:
        g = "" if _is_identity_element(self.element) else f"[{''.join(map(str, self.element))}]"
        return f"{self.source}>{self.target}{g}"


def _is_identity_element(g: tuple) -> bool:
    return all(v == k for k, v in enumerate(g, 1))


def _mul(g: tuple, h: tuple) -> tuple:
    return tuple(g[v - 1] for v in h)


def _inv(g: tuple) -> tuple:
    out = [0] * len(g)
    for k, v in enumerate(g, 1):
        out[v - 1] = k
    return tuple(out)


class FiniteGroupoid:
    """A groupoid given by a forest of isomorphisms plus a finite automorphism
    group at the root of each component (permutations of a small set)."""

    def __init__(self, objects: Sequence, arrows: Iterable[tuple] = (), automorphisms: dict | None = None):
        self.objects = tuple(objects)
        if len(set(self.objects)) != len(self.objects):
            raise GroupoidError("repeated object")
        self.arrows = tuple(arrows)
        parent = {x: x for x in self.objects}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for name, src, tgt in self.arrows:
            if src not in parent or tgt not in parent:
                raise GroupoidError(f"arrow {name} names an unknown object")
            rs, rt = find(src), find(tgt)
            if rs == rt:
                raise GroupoidError(f"arrow {name} closes a cycle; give automorphisms explicitly instead")
            parent[max(rs, rt, key=self.objects.index)] = min(rs, rt, key=self.objects.index)
        self.root = {x: find(x) for x in self.objects}
        self.groups: dict = {}
        automorphisms = automorphisms or {}
        for r in set(self.root.values()):
            gens = [tuple(g) for g in automorphisms.get(r, ())]
            self.groups[r] = _closure(gens)
        for x in automorphisms:
            if x not in self.groups:
                raise GroupoidError(f"automorphisms must be given at a component root, not {x}")

    def component(self, x) -> tuple:
        return tuple(y for y in self.objects if self.root[y] == self.root[x])

    def identity(self, x) -> Morphism:
        g = self.groups[self.root[x]]
        return Morphism(x, g[0], x)

    def hom(self, x, y) -> list[Morphism]:
        if self.root[x] != self.root[y]:
            return []
        return [Morphism(y, g, x) for g in self.groups[self.root[x]]]

    def arrows_from(self, x) -> list[Morphism]:
        return [m for y in self.component(x) for m in self.hom(x, y)]

    def compose(self, g: Morphism, f: Morphism) -> Morphism:
        """g after f."""
        if f.target != g.source:
            raise GroupoidError(f"cannot compose {g} after {f}")
        return Morphism(g.target, _mul(g.element, f.element), f.source)

    def inverse(self, f: Morphism) -> Morphism:
        return Morphism(f.source, _inv(f.element), f.target)

    def is_discrete(self) -> bool:
        return all(len(self.arrows_from(x)) == 1 for x in self.objects)

    def check_laws(self) -> list[str]:
        errs = []
        for x in self.objects:
            ms = self.arrows_from(x)
            for f in ms:
                if self.compose(f, self.identity(x)) != f or self.compose(self.identity(f.target), f) != f:
                    errs.append(f"unit law fails at {f}")
                if self.compose(self.inverse(f), f) != self.identity(x):
                    errs.append(f"{f} has no inverse")
                for g in self.arrows_from(f.target):
                    for h in self.arrows_from(g.target):
                        if self.compose(h, self.compose(g, f)) != self.compose(self.compose(h, g), f):
                            errs.append(f"associativity fails at {h},{g},{f}")
        return errs


def _closure(gens: list[tuple]) -> list[tuple]:
    degree = max((len(g) for g in gens), default=1)
    ident = tuple(range(1, degree + 1))
    if any(len(g) != degree or sorted(g) != list(ident) for g in gens):
        raise GroupoidError("automorphism generators must be permutations of one degree")
    seen, frontier = {ident}, [ident]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = _mul(g, a)
                if b not in seen:
                    seen.add(b)
                    nxt.append(b)
        frontier = nxt
    return sorted(seen)


# -- the discrete signature ------------------------------------------------------


def decorate(base: Generator, out: Morphism, ins: Sequence[Morphism]) -> Generator:
    """The discrete generator base with its output pushed along out and inputs pulled along ins."""
    if out.source != base.output or tuple(m.target for m in ins) != tuple(base.inputs):
        raise GroupoidError(f"decoration does not fit {base.name}")
    return Generator(base.name, (out, tuple(ins)), None, tuple(m.source for m in ins), out.target)


def undecorated(gen: Generator, gpd: FiniteGroupoid) -> Generator:
    """A base generator seen as a discrete generator with identity decorations."""
    return decorate(gen, gpd.identity(gen.output), [gpd.identity(c) for c in gen.inputs])


def discrete_signature(base: Iterable[Generator], gpd: FiniteGroupoid) -> list[Generator]:
    """The free module on the base generators, forgetting the groupoid action."""
    out = []
    for g in base:
        outs = gpd.arrows_from(g.output)
        ins = [[gpd.inverse(m) for m in gpd.arrows_from(c)] for c in g.inputs]
        for o in outs:
            for choice in product(*ins):
                out.append(decorate(g, o, choice))
    return out


def _base_of(gen: Generator) -> tuple:
    out, ins = gen.params
    return gen.name, out.source, tuple(m.target for m in ins)


# -- orbits ---------------------------------------------------------------------


def _edge_moves(t: Tree, gpd: FiniteGroupoid):
    """Act at each internal edge by every arrow leaving its colour."""

    def walk(x: Tree):
        if isinstance(x, Leaf):
            return
        for k, ch in enumerate(x.children):
            if isinstance(ch, Node):
                for g in gpd.arrows_from(ch.colour):
                    if g == gpd.identity(ch.colour):
                        continue
                    c_out, c_ins = ch.gen.params
                    new_child = Node(
                        decorate(_strip(ch.gen), gpd.compose(g, c_out), c_ins), ch.children
                    )
                    p_out, p_ins = x.gen.params
                    p_ins = list(p_ins)
                    p_ins[k] = gpd.compose(p_ins[k], gpd.inverse(g))
                    kids = list(x.children)
                    kids[k] = new_child
                    yield Node(decorate(_strip(x.gen), p_out, p_ins), kids)
            for sub in walk(ch):
                kids = list(x.children)
                kids[k] = sub
                yield Node(x.gen, kids)

    yield from walk(t)


def _strip(gen: Generator) -> Generator:
    name, out, ins = _base_of(gen)
    return Generator(name, (), None, ins, out)


def orbit(t: Tree, gpd: FiniteGroupoid) -> set:
    """Breadth-first closure of t under the groupoid acting along internal edges."""
    seen = {t}
    queue = deque([t])
    while queue:
        x = queue.popleft()
        for y in _edge_moves(x, gpd):
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return seen


def minimal_rep(t: Tree, gpd: FiniteGroupoid, order: TreeOrder) -> Tree:
    return order.min(orbit(t, gpd))


# -- quadratic composites and the star rules -------------------------------------


def quadratic_composites(gens: Sequence[Generator]) -> list[Tree]:
    """Every weight-two shuffle tree monomial over gens."""
    out = []
    for a in gens:
        ta = Node(a, [Leaf(k, c) for k, c in enumerate(a.inputs, 1)])
        for i in range(1, a.arity + 1):
            for b in gens:
                if b.output != a.inputs[i - 1]:
                    continue
                tb = Node(b, [Leaf(k, c) for k, c in enumerate(b.inputs, 1)])
                for s in shuffle_permutations(a.arity, b.arity, i):
                    try:
                        out.append(shuffle_compose(ta, i, s, tb))
                    except TreeError:
                        continue
    return out


def e_star_2(gens: Sequence[Generator], gpd: FiniteGroupoid, order: TreeOrder) -> list[Rule]:
    """One rule t -> [t]_* for each quadratic composite that is not its orbit minimum."""
    rules = []
    for t in quadratic_composites(gens):
        m = minimal_rep(t, gpd, order)
        if m != t:
            rules.append(make_rule(Polynomial.monomial(t) - Polynomial.monomial(m), order, name="E*"))
    return rules


def _act_external(t: Tree, gpd: FiniteGroupoid, root: Morphism, leaves: dict) -> Tree:
    """Act by root on the output and by leaves[label] (arrows out of the leaf colour) on inputs."""

    def walk(x: Tree, top: bool):
        if isinstance(x, Leaf):
            return Leaf(x.label, leaves[x.label].target)
        out, ins = x.gen.params
        if top:
            out = gpd.compose(root, out)
        ins = list(ins)
        for k, ch in enumerate(x.children):
            if isinstance(ch, Leaf):
                ins[k] = gpd.compose(ins[k], gpd.inverse(leaves[ch.label]))
        return Node(decorate(_strip(x.gen), out, ins), [walk(c, False) for c in x.children])

    return walk(t, True)


def external_orbit(f: Polynomial, gpd: FiniteGroupoid) -> list[Polynomial]:
    """The module generated by f under the free action on its external flags."""
    terms = list(f.terms)
    if not terms:
        return []
    first = terms[0]
    colours = {l.label: l.colour for l in first.leaves()}
    labels = sorted(colours)
    out = []
    for root in gpd.arrows_from(first.colour):
        for choice in product(*(gpd.arrows_from(colours[k]) for k in labels)):
            acts = dict(zip(labels, choice))
            g = Polynomial()
            for t, c in f.terms.items():
                g = g + Polynomial.monomial(_act_external(t, gpd, root, acts), c)
            out.append(g)
    return out


def star_polynomial(f: Polynomial, gpd: FiniteGroupoid, order: TreeOrder) -> Polynomial:
    g = Polynomial()
    for t, c in f.terms.items():
        g = g + Polynomial.monomial(minimal_rep(t, gpd, order), c)
    return g


def star_relations(relations: Iterable[Polynomial], gpd: FiniteGroupoid, order: TreeOrder) -> list[Rule]:
    """Each relation, acted on at its external flags, with every term replaced by its minimum."""
    rules, seen = [], set()
    for f in relations:
        for g in external_orbit(f, gpd):
            h = star_polynomial(g, gpd, order)
            if not h:
                continue
            rule = make_rule(h, order, name="R*")
            key = (rule.lead, rule.poly.scale(1 / rule.lead_coefficient))
            if key not in seen:
                seen.add(key)
                rules.append(rule)
    return rules

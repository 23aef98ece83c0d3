"""Polynomials of tree monomials, rewrite rules, normal forms and Groebner checks."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from typing import Callable, Iterable, Iterator, Sequence

from .orders import TreeOrder
from .trees import Embedding, Leaf, Node, Tree, divides, match_at, positions, subtree_at, substitute, validate, windows


class RewriteError(RuntimeError):
    pass


class DescentError(RewriteError):
    """A reduction step failed to decrease the reduced term."""


class Polynomial:
    """A finite rational combination of tree monomials sharing one external type."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: dict | Iterable = ()):
        items = terms.items() if isinstance(terms, dict) else terms
        acc: dict = {}
        for t, c in items:
            c = Fraction(c)
            if c:
                acc[t] = acc.get(t, 0) + c
        self.terms = {t: c for t, c in acc.items() if c}
        self._hash = None

    @classmethod
    def monomial(cls, t: Tree, c=1) -> "Polynomial":
        return cls({t: c})

    def __add__(self, other: "Polynomial") -> "Polynomial":
        out = dict(self.terms)
        for t, c in other.terms.items():
            out[t] = out.get(t, 0) + c
        return Polynomial(out)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + other.scale(-1)

    def scale(self, c) -> "Polynomial":
        c = Fraction(c)
        return Polynomial({t: c * v for t, v in self.terms.items()})

    def __mul__(self, c) -> "Polynomial":
        return self.scale(c)

    __rmul__ = __mul__

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __getitem__(self, t: Tree) -> Fraction:
        return self.terms.get(t, Fraction(0))

    def __contains__(self, t) -> bool:
        return t in self.terms

    def __iter__(self):
        return iter(self.terms)

    def items(self):
        return self.terms.items()

    def __eq__(self, other) -> bool:
        return isinstance(other, Polynomial) and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def sorted_terms(self, order: TreeOrder, descending: bool = True) -> list:
        return sorted(self.terms, key=order.key, reverse=descending)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*{t!r}" for t, c in self.terms.items())


def leading_term(f: Polynomial, order: TreeOrder) -> tuple[Tree, Fraction]:
    if not f:
        raise RewriteError("the zero polynomial has no leading term")
    t = order.max(f.terms)
    return t, f.terms[t]


@dataclass(frozen=True)
class Rule:
    poly: Polynomial
    lead: Tree
    name: str = ""

    @property
    def lead_coefficient(self) -> Fraction:
        return self.poly[self.lead]

    def tail(self) -> Polynomial:
        """lead - poly/c: what the lead rewrites to."""
        c = self.lead_coefficient
        return Polynomial.monomial(self.lead) - self.poly.scale(1 / c)

    def __repr__(self) -> str:
        return f"Rule({self.name or '?'}: {self.lead!r} -> {self.tail()!r})"


def make_rule(poly: Polynomial, order: TreeOrder, name: str = "") -> Rule:
    lead, _ = leading_term(poly, order)
    return Rule(poly, lead, name)


def binomial_rule(lhs: Tree, rhs: Tree, order: TreeOrder, name: str = "") -> Rule:
    """The rule lhs -> rhs; raises if lhs is not the larger side."""
    if not order.lt(rhs, lhs):
        raise RewriteError(f"rule {name or ''} is not oriented by the order: {lhs!r} vs {rhs!r}")
    return Rule(Polynomial({lhs: 1, rhs: -1}), lhs, name)


# A family is a callable receiving a weight-two window monomial and returning
# the rule whose lead is exactly that monomial, or None.
Family = Callable[[Node], "Rule | None"]


class RewriteSystem:
    """Explicit rules plus lazily instantiated quadratic rule families."""

    def __init__(self, rules: Sequence[Rule], order: TreeOrder, families: Sequence[tuple[str, Family]] = (), name: str = ""):
        self.rules = list(rules)
        self.order = order
        self.families = list(families)
        self.name = name
        self._cache: list[dict] = [dict() for _ in self.families]
        for r in self.rules:
            lead, _ = leading_term(r.poly, order)
            if lead != r.lead:
                raise RewriteError(f"rule {r.name} has lead {r.lead!r} but the order picks {lead!r}")

    def family_rule(self, k: int, local: Node) -> Rule | None:
        cache = self._cache[k]
        if local in cache:
            return cache[local]
        r = self.families[k][1](local)
        if r is not None and r.lead != local:
            raise RewriteError(f"family {self.families[k][0]} returned a rule for another monomial")
        if r is not None:
            lead, _ = leading_term(r.poly, self.order)
            if lead != r.lead:
                raise RewriteError(f"family rule {r.name} is not oriented by the order")
        cache[local] = r
        return r

    def matches(self, t: Tree) -> list[tuple[Embedding, int, Rule]]:
        """Every (embedding, rule rank, rule) applicable to t, sorted by embedding then rank."""
        found = []
        for k, r in enumerate(self.rules):
            for e in divides(r.lead, t):
                found.append((e, k, r))
        if self.families and isinstance(t, Node):
            base = len(self.rules)
            for _, _, local, e in windows(t):
                for k in range(len(self.families)):
                    r = self.family_rule(k, local)
                    if r is not None:
                        found.append((e, base + k, r))
        found.sort(key=lambda m: (m[0], m[1]))
        return found

    def first_match(self, t: Tree, strategy: str = "first"):
        if strategy == "first" and not self.rules:
            # windows are produced in preorder; stop at the first hit
            if isinstance(t, Node):
                best = None
                for _, _, local, e in windows(t):
                    for k in range(len(self.families)):
                        r = self.family_rule(k, local)
                        if r is not None:
                            cand = (e, k, r)
                            if best is None or (cand[0], cand[1]) < (best[0], best[1]):
                                best = cand
                            break
                return best
            return None
        ms = self.matches(t)
        if not ms:
            return None
        return ms[0] if strategy == "first" else ms[-1]

    def is_reducible(self, t: Tree) -> bool:
        return self.first_match(t) is not None

    def leads(self) -> list[Tree]:
        return [r.lead for r in self.rules]


def apply_rule(t: Tree, rule: Rule, e: Embedding) -> Polynomial:
    """m_{t, lead}(rule): the rule's polynomial transported into t along e."""
    return Polynomial({substitute(t, rule.lead, e, s): c for s, c in rule.poly.items()})


@dataclass(frozen=True)
class Step:
    rule: str
    term: Tree
    anchor: tuple
    coefficient: Fraction


def reduce_at(f: Polynomial, t: Tree, rule: Rule, e: Embedding, order: TreeOrder) -> Polynomial:
    """f - (c_t / c_rule) * m_{t,lead}(rule), asserting strict descent."""
    ct = f[t]
    if not ct:
        raise RewriteError("term not present")
    m = apply_rule(t, rule, e)
    if m[t] != rule.lead_coefficient:
        raise RewriteError("embedding does not reproduce the term")
    kt = order.key(t)
    for s in m:
        if s != t and not order.key(s) < kt:
            raise DescentError(f"rule {rule.name} does not decrease {t!r}: produced {s!r}")
    return f - m.scale(ct / rule.lead_coefficient)


def reduce_once(f: Polynomial, rule: Rule, order: TreeOrder, embedding: Embedding | None = None) -> Polynomial:
    """Reduce the leading term of f by rule."""
    t, _ = leading_term(f, order)
    if embedding is None:
        es = divides(rule.lead, t)
        if not es:
            raise RewriteError("leading term is not divisible by the rule's lead")
        embedding = es[0]
    return reduce_at(f, t, rule, embedding, order)


def normal_form(
    f: Polynomial | Tree,
    rs: RewriteSystem,
    strategy: str = "first",
    trace: list | None = None,
    max_steps: int = 100000,
) -> Polynomial:
    """Reduce the largest reducible term until no term is divisible by a rule lead.

    ``strategy="first"`` uses the first rule at the first embedding;
    ``"last"`` uses the last candidate, as an independent strategy.
    """
    if isinstance(f, Tree):
        f = Polynomial.monomial(f)
    for _ in range(max_steps):
        hit = None
        for t in f.sorted_terms(rs.order):
            m = rs.first_match(t, strategy)
            if m is not None:
                hit = (t, m)
                break
        if hit is None:
            return f
        t, (e, _, rule) = hit
        c = f[t] / rule.lead_coefficient
        f = reduce_at(f, t, rule, e, rs.order)
        if trace is not None:
            trace.append(Step(rule.name, t, e.anchor, c))
    raise RewriteError("normal form did not terminate within the step budget")


def one_step_reducts(f: Polynomial, rs: RewriteSystem) -> Iterator[Polynomial]:
    for t in f:
        for e, _, rule in rs.matches(t):
            yield reduce_at(f, t, rule, e, rs.order)


@dataclass
class ConfluenceReport:
    confluent: bool
    sinks: dict = field(default_factory=dict)  # start -> list of distinct irreducible ends
    divergent: list = field(default_factory=list)
    states: int = 0


def reduction_sinks(f: Polynomial, rs: RewriteSystem, limit: int = 100000) -> tuple[set, int]:
    """Every irreducible polynomial reachable from f, and the number of states seen."""
    seen = {f}
    stack = [f]
    sinks = set()
    while stack:
        g = stack.pop()
        nexts = list(one_step_reducts(g, rs))
        if not nexts:
            sinks.add(g)
        for h in nexts:
            if h not in seen:
                seen.add(h)
                if len(seen) > limit:
                    raise RewriteError("reduction graph exceeds the state limit")
                stack.append(h)
    return sinks, len(seen)


def confluence_report(monomials: Iterable[Tree], rs: RewriteSystem) -> ConfluenceReport:
    rep = ConfluenceReport(True)
    for m in monomials:
        sinks, n = reduction_sinks(Polynomial.monomial(m), rs)
        rep.states += n
        rep.sinks[m] = sorted(sinks, key=repr)
        if len(sinks) != 1:
            rep.confluent = False
            rep.divergent.append(m)
    return rep


# -- small common multiples and S-polynomials ------------------------------------


def _placeholder(colour, counter: list) -> Leaf:
    counter[0] += 1
    return Leaf(-counter[0], colour)


def _overlay(x1: Tree, x2: Tree, counter: list) -> Tree | None:
    if isinstance(x1, Leaf) and isinstance(x2, Leaf):
        return _placeholder(x1.colour, counter) if x1.colour == x2.colour else None
    if isinstance(x1, Leaf):
        return _fresh(x2, counter) if x1.colour == x2.colour else None
    if isinstance(x2, Leaf):
        return _fresh(x1, counter) if x1.colour == x2.colour else None
    if x1.gen != x2.gen:
        return None
    kids = []
    for c1, c2 in zip(x1.children, x2.children):
        k = _overlay(c1, c2, counter)
        if k is None:
            return None
        kids.append(k)
    return _Pattern(x1.gen, kids)


class _Pattern:
    """A tree node that skips the shuffle bookkeeping until leaves are labelled."""

    __slots__ = ("gen", "children")

    def __init__(self, gen, children):
        self.gen = gen
        self.children = children


def _fresh(t: Tree, counter: list):
    if isinstance(t, Leaf):
        return _placeholder(t.colour, counter)
    return _Pattern(t.gen, [_fresh(c, counter) for c in t.children])


def _graft_pattern(t: Tree, path: tuple, sub, counter: list):
    if not path:
        return sub
    kids = []
    for k, c in enumerate(t.children):
        kids.append(_graft_pattern(c, path[1:], sub, counter) if k == path[0] else _fresh(c, counter))
    return _Pattern(t.gen, kids)


def _instantiate(p, labels: dict) -> Tree | None:
    if isinstance(p, Leaf):
        return Leaf(labels[p.label], p.colour)
    kids = [_instantiate(c, labels) for c in p.children]
    if any(k is None for k in kids):
        return None
    mins = [k.minleaf for k in kids]
    if any(a >= b for a, b in zip(mins, mins[1:])):
        return None
    return Node(p.gen, kids)


def _pattern_leaves(p) -> list:
    if isinstance(p, Leaf):
        return [p.label]
    out = []
    for c in p.children:
        out.extend(_pattern_leaves(c))
    return out


def small_common_multiples(g1: Rule, g2: Rule) -> list[tuple[Tree, Embedding, Embedding]]:
    """Minimal monomials divisible by both leads with overlapping occurrences."""
    b1, b2 = g1.lead, g2.lead
    found = set()
    for outer, inner, flip in ((b1, b2, False), (b2, b1, True)):
        if not isinstance(outer, Node) or not isinstance(inner, Node):
            continue
        for path, _ in positions(outer):
            counter = [0]
            merged = _overlay(subtree_at(outer, path), inner, counter)
            if merged is None:
                continue
            pattern = _graft_pattern(outer, path, merged, counter)
            ids = _pattern_leaves(pattern)
            for perm in permutations(range(1, len(ids) + 1)):
                gamma = _instantiate(pattern, dict(zip(ids, perm)))
                if gamma is None or validate(gamma):
                    continue
                eo, ei = match_at(outer, gamma, ()), match_at(inner, gamma, path)
                if eo is None or ei is None:
                    continue
                e1, e2 = (ei, eo) if flip else (eo, ei)
                if b1 == b2 and e1 == e2:
                    continue
                found.add((gamma, e1, e2))
    return sorted(found, key=lambda x: (repr(x[0]), x[1], x[2]))


def s_polynomial(gamma: Tree, g1: Rule, e1: Embedding, g2: Rule, e2: Embedding) -> Polynomial:
    m1, m2 = apply_rule(gamma, g1, e1), apply_rule(gamma, g2, e2)
    if m1[gamma] != g1.lead_coefficient or m2[gamma] != g2.lead_coefficient:
        raise RewriteError("embeddings do not locate the leads in gamma")
    return m1 - m2.scale(g1.lead_coefficient / g2.lead_coefficient)


@dataclass
class BuchbergerReport:
    is_groebner: bool
    checked: int = 0
    failing: list = field(default_factory=list)  # (gamma, rule names, reduced S-polynomial)


def buchberger_check(rs: RewriteSystem) -> BuchbergerReport:
    """Every S-polynomial of every pair of explicit rules reduces to zero."""
    rep = BuchbergerReport(True)
    rules = rs.rules
    for a in range(len(rules)):
        for b in range(a, len(rules)):
            for gamma, e1, e2 in small_common_multiples(rules[a], rules[b]):
                rep.checked += 1
                s = normal_form(s_polynomial(gamma, rules[a], e1, rules[b], e2), rs)
                if s:
                    rep.is_groebner = False
                    rep.failing.append((gamma, (rules[a].name, rules[b].name), s))
    return rep


def _occupied(lead: Tree, anchor: tuple) -> frozenset:
    return frozenset(anchor + p for p, _ in positions(lead))


def _extract(t: Tree, root: tuple, keep: frozenset) -> Tree:
    """The sub-monomial of t spanned by the internal positions keep, leaves relabelled by rank."""
    hanging = []

    def walk(x, path):
        if path in keep:
            return _Pattern(x.gen, [walk(c, path + (k,)) for k, c in enumerate(x.children)])
        hanging.append(x)
        return Leaf(-len(hanging), x.colour)

    pattern = walk(subtree_at(t, root), root)
    ranked = sorted(range(len(hanging)), key=lambda r: hanging[r].minleaf)
    labels = {-(r + 1): lab for lab, r in enumerate(ranked, 1)}
    out = _instantiate(pattern, labels)
    assert out is not None
    return out


def overlaps_in(t: Tree, rs: RewriteSystem) -> Iterator[tuple[Tree, Rule, Embedding, Rule, Embedding]]:
    """Small common multiples witnessed by overlapping lead occurrences inside t."""
    ms = rs.matches(t)
    occ = [(e, r, _occupied(r.lead, e.anchor)) for e, _, r in ms]
    for a in range(len(occ)):
        for b in range(a + 1, len(occ)):
            (ea, ra, oa), (eb, rb, ob) = occ[a], occ[b]
            if not oa & ob:
                continue
            union = oa | ob
            root = min(union, key=len)
            gamma = _extract(t, root, union)
            n = len(root)
            e1 = match_at(ra.lead, gamma, ea.anchor[n:])
            e2 = match_at(rb.lead, gamma, eb.anchor[n:])
            if e1 is None or e2 is None:
                raise RewriteError("lost an occurrence while extracting an overlap")
            yield gamma, ra, e1, rb, e2


def buchberger_check_on(universe: Iterable[Tree], rs: RewriteSystem) -> BuchbergerReport:
    """The Buchberger criterion restricted to overlaps occurring inside the given monomials."""
    rep = BuchbergerReport(True)
    done = set()
    for t in universe:
        for gamma, r1, e1, r2, e2 in overlaps_in(t, rs):
            key = (gamma, r1.lead, e1, r2.lead, e2)
            if key in done:
                continue
            done.add(key)
            rep.checked += 1
            s = normal_form(s_polynomial(gamma, r1, e1, r2, e2), rs)
            if s:
                rep.is_groebner = False
                rep.failing.append((gamma, (r1.name, r2.name), s))
    return rep

"""Shuffle tree monomials over a signature of unary and binary generators."""
from __future__ import annotations

from typing import Any, Callable, Iterator, NamedTuple, Sequence

from .profiles import PermPair, is_shuffle


class TreeError(ValueError):
    pass


class Generator(NamedTuple):
    """A typed generator symbol.

    ``params`` carries kind-specific data (contraction indices, join segments,
    groupoid morphisms); ``pp`` is the permutation-pair decoration if any.
    """

    name: str
    params: tuple
    pp: PermPair | None
    inputs: tuple
    output: Any

    @property
    def arity(self) -> int:
        return len(self.inputs)

    def __str__(self) -> str:
        bits = []
        if self.params:
            bits.append(";".join(_fmt_param(p) for p in self.params))
        if self.pp is not None:
            bits.append(str(self.pp))
        return f"{self.name}[{';'.join(bits)}]" if bits else self.name


def _fmt_param(p) -> str:
    if type(p) is tuple:
        return "(" + ",".join(map(str, p)) + ")"
    return str(p)


class Tree:
    __slots__ = ()

    def leaves(self) -> list["Leaf"]:
        raise NotImplementedError


class Leaf(Tree):
    __slots__ = ("label", "colour", "_hash")

    def __init__(self, label: int, colour: Any):
        self.label = label
        self.colour = colour
        self._hash = hash((label, colour))

    minleaf = property(lambda self: self.label)
    arity = property(lambda self: 1)
    weight = property(lambda self: 0)

    def __eq__(self, other) -> bool:
        return self is other or (
            isinstance(other, Leaf) and self.label == other.label and self.colour == other.colour
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"L{self.label}"

    def leaves(self) -> list["Leaf"]:
        return [self]


class Node(Tree):
    __slots__ = ("gen", "children", "minleaf", "arity", "weight", "_hash", "cache")

    def __init__(self, gen: Generator, children: Sequence[Tree]):
        self.gen = gen
        self.children = tuple(children)
        if len(self.children) != gen.arity:
            raise TreeError(f"{gen.name} expects {gen.arity} children, got {len(self.children)}")
        self.minleaf = min(c.minleaf for c in self.children)
        self.arity = sum(c.arity for c in self.children)
        self.weight = 1 + sum(c.weight for c in self.children)
        self._hash = hash((gen, self.children))
        self.cache: dict = {}

    @property
    def colour(self):
        return self.gen.output

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        return (
            isinstance(other, Node)
            and self._hash == other._hash
            and self.gen == other.gen
            and self.children == other.children
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"{self.gen}({', '.join(map(repr, self.children))})"

    def leaves(self) -> list[Leaf]:
        out: list[Leaf] = []
        for c in self.children:
            out.extend(c.leaves())
        return out


def node(gen: Generator, *children: Tree) -> Node:
    """Build a node, ordering children by minimal leaf when the generator is binary."""
    return Node(gen, children)


def leaf_labels(t: Tree) -> tuple[int, ...]:
    """Leaf labels in planar order (the input permutation)."""
    return tuple(l.label for l in t.leaves())


def leaf_colours(t: Tree) -> dict[int, Any]:
    return {l.label: l.colour for l in t.leaves()}


def validate(t: Tree) -> list[str]:
    problems: list[str] = []

    def walk(x: Tree, path: tuple) -> None:
        if isinstance(x, Leaf):
            return
        for k, c in enumerate(x.children):
            if c.colour != x.gen.inputs[k]:
                problems.append(f"colour mismatch at {path + (k,)}: {c.colour} vs {x.gen.inputs[k]}")
            walk(c, path + (k,))
        mins = [c.minleaf for c in x.children]
        if any(a >= b for a, b in zip(mins, mins[1:])):
            problems.append(f"shuffle condition fails at {path}")

    walk(t, ())
    labels = sorted(leaf_labels(t))
    if labels != list(range(1, len(labels) + 1)):
        problems.append(f"leaf labels {labels} are not 1..n")
    return problems


def relabel(t: Tree, mapping: Callable[[int], int] | dict) -> Tree:
    f = mapping.__getitem__ if isinstance(mapping, dict) else mapping
    if isinstance(t, Leaf):
        return Leaf(f(t.label), t.colour)
    return Node(t.gen, [relabel(c, f) for c in t.children])


def normalise_labels(t: Tree) -> Tree:
    """Relabel leaves by rank so they become 1..n."""
    rank = {l: k for k, l in enumerate(sorted(leaf_labels(t)), 1)}
    if all(k == v for k, v in rank.items()):
        return t
    return relabel(t, rank)


# -- positions ---------------------------------------------------------------

Path = tuple


def subtree_at(t: Tree, path: Path) -> Tree:
    for k in path:
        t = t.children[k]
    return t


def replace_at(t: Tree, path: Path, new: Tree) -> Tree:
    if not path:
        return new
    k = path[0]
    kids = list(t.children)
    kids[k] = replace_at(kids[k], path[1:], new)
    return Node(t.gen, kids)


def positions(t: Tree) -> Iterator[tuple[Path, Node]]:
    """Internal nodes in preorder with their paths."""
    stack = [((), t)]
    while stack:
        path, x = stack.pop()
        if isinstance(x, Node):
            yield path, x
            for k in range(len(x.children) - 1, -1, -1):
                stack.append((path + (k,), x.children[k]))


# -- shuffle composition -------------------------------------------------


def shuffle_compose(a: Tree, i: int, s: Sequence[int], b: Tree) -> Tree:
    """Graft b at the leaf labelled i of a and relabel through the shuffle permutation s."""
    n, m = a.arity, b.arity
    if len(s) != n + m - 1:
        raise TreeError(f"shuffle permutation must have degree {n + m - 1}")
    if sorted(s) != list(range(1, n + m)):
        raise TreeError("not a permutation")
    if any(s[j - 1] != j for j in range(1, i + 1)) or not is_shuffle(s[i:], m - 1):
        raise TreeError(f"{tuple(s)} is not a shuffle permutation for site {i}")
    target = None
    for l in a.leaves():
        if l.label == i:
            target = l
    if target is None:
        raise TreeError(f"no leaf {i}")
    if target.colour != b.colour:
        raise TreeError(f"colour mismatch grafting at leaf {i}: {target.colour} vs {b.colour}")

    def new_a(j: int) -> int:
        return j if j < i else s[m + j - 2]

    def new_b(k: int) -> int:
        return i if k == 1 else s[i + k - 2]

    b2 = relabel(b, new_b)

    def graft(x: Tree) -> Tree:
        if isinstance(x, Leaf):
            return b2 if x.label == i else Leaf(new_a(x.label), x.colour)
        return Node(x.gen, [graft(c) for c in x.children])

    out = graft(a)
    if validate(out):
        raise TreeError(f"composition violates the shuffle condition: {validate(out)}")
    return out


def shuffle_permutations(n: int, m: int, i: int) -> Iterator[tuple[int, ...]]:
    """All shuffle permutations for grafting an arity-m tree at leaf i of an arity-n tree."""
    from itertools import combinations

    rest = list(range(i + 1, n + m))
    for chosen in combinations(rest, m - 1):
        others = [x for x in rest if x not in chosen]
        yield tuple(range(1, i + 1)) + chosen + tuple(others)


# -- divisibility ----------------------------------------------------------


class Embedding(NamedTuple):
    anchor: Path  # position of the divisor's root in the ambient tree
    hanging: tuple  # hanging[k] = ambient path of the subtree under divisor leaf k+1


def _match(b: Tree, a: Tree, path: Path, slots: dict) -> bool:
    if isinstance(b, Leaf):
        if a.colour != b.colour:
            return False
        slots[b.label] = (path, a)
        return True
    if not isinstance(a, Node) or a.gen != b.gen:
        return False
    for k, (cb, ca) in enumerate(zip(b.children, a.children)):
        if not _match(cb, ca, path + (k,), slots):
            return False
    return True


def match_at(b: Tree, a: Tree, anchor: Path) -> Embedding | None:
    slots: dict = {}
    if not _match(b, subtree_at(a, anchor), anchor, slots):
        return None
    order = sorted(slots, key=lambda lab: slots[lab][1].minleaf)
    if order != sorted(slots):
        return None
    return Embedding(anchor, tuple(slots[k][0] for k in sorted(slots)))


def divides(b: Tree, a: Tree) -> list[Embedding]:
    if isinstance(b, Leaf):
        return []
    out = []
    for path, x in positions(a):
        if x.gen == b.gen:
            e = match_at(b, a, path)
            if e is not None:
                out.append(e)
    return sorted(out)


def substitute(a: Tree, b: Tree, e: Embedding, c: Tree) -> Tree:
    """Replace the embedded copy of b in a by c, grafting the hanging subtrees onto c's leaves."""
    if c.arity != b.arity or c.colour != b.colour:
        raise TreeError("replacement has a different external type")
    bc, cc = leaf_colours(b), leaf_colours(c)
    if bc != cc:
        raise TreeError("replacement has different leaf colours")
    hanging = [subtree_at(a, p) for p in e.hanging]

    def build(x: Tree) -> Tree:
        if isinstance(x, Leaf):
            return hanging[x.label - 1]
        return Node(x.gen, [build(ch) for ch in x.children])

    return replace_at(a, e.anchor, build(c))


def windows(t: Tree) -> Iterator[tuple[Path, int, Node, Embedding]]:
    """Weight-2 sub-monomials: a node together with one internal child.

    Yields (parent path, child index, local monomial with leaves 1..k, embedding).
    """
    for path, x in positions(t):
        for k, ch in enumerate(x.children):
            if not isinstance(ch, Node):
                continue
            hang: list[tuple[Path, Tree]] = []
            for k2, c2 in enumerate(x.children):
                if k2 == k:
                    for k3, c3 in enumerate(ch.children):
                        hang.append((path + (k, k3), c3))
                else:
                    hang.append((path + (k2,), c2))
            ranked = sorted(range(len(hang)), key=lambda r: hang[r][1].minleaf)
            label = {r: lab for lab, r in enumerate(ranked, 1)}
            pos = 0
            kids = []
            for k2, c2 in enumerate(x.children):
                if k2 == k:
                    inner = []
                    for c3 in ch.children:
                        inner.append(Leaf(label[pos], c3.colour))
                        pos += 1
                    kids.append(Node(ch.gen, inner))
                else:
                    kids.append(Leaf(label[pos], c2.colour))
                    pos += 1
            local = Node(x.gen, kids)
            emb = Embedding(path, tuple(hang[r][0] for r in ranked))
            yield path, k, local, emb


def serial(t: Tree) -> tuple:
    """A total structural key, used only to break exact ties."""
    if isinstance(t, Leaf):
        return (0, t.label)
    got = t.cache.get("serial")
    if got is None:
        got = t.cache["serial"] = (1, repr(t.gen), tuple(serial(c) for c in t.children))
    return got

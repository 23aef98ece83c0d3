"""Graph semantics shared by the wheeled-prop and prop generators.

A generator node is read as a connection pattern on the open flags of its
children: which output flags get joined to which input flags, and how the
remaining open flags are listed. Flags are the canonical triples of the
graphs module, so evaluated graphs compare structurally.

A *shape* is the connection pattern of a whole tree without any listing data:
``("leaf", label)``, ``("h", a, b)``, ``("x", a, edge)`` or
``("j", top, feeder, edges)`` where edges are (output flag, input flag) pairs.
"""
from __future__ import annotations

from itertools import product
from typing import Iterator

from .graphs import OUT, Skeleton, corolla_flags, from_skeleton
from .profiles import BiProfile, PermPair, Permutation, all_permutations, relist, solve_relisting
from .trees import Generator, Leaf, Node, Tree, TreeError, replace_at, subtree_at

Listing = tuple  # (outs, ins): tuples of flags


class SemanticError(TreeError):
    pass


def leaf_listing(leaf: Leaf) -> Listing:
    return corolla_flags(leaf.label, leaf.colour)


def _base(gen: Generator, kids: list) -> tuple[list, tuple, tuple]:
    """Connections made by gen and the open flags before its relisting."""
    name, p = gen.name, gen.params
    if name == "hcomp":
        (ao, ai), (bo, bi) = kids
        return [], ao + bo, ai + bi
    if name == "contract":
        ((ao, ai),) = kids
        i, j = p
        if not (1 <= i <= len(ao) and 1 <= j <= len(ai)):
            raise SemanticError(f"contraction ({i},{j}) out of range")
        return [(ao[i - 1], ai[j - 1])], ao[: i - 1] + ao[i:], ai[: j - 1] + ai[j:]
    if name in ("pjoin", "pjoin_op"):
        top, feeder = (kids[0], kids[1]) if name == "pjoin" else (kids[1], kids[0])
        (to, ti), (fo, fi) = top, feeder
        cseg, bseg = p
        if len(cseg) != len(bseg) or any(x >= y for x, y in zip(cseg, cseg[1:])):
            raise SemanticError("malformed segments")
        if not all(1 <= c <= len(ti) for c in cseg) or not all(1 <= b <= len(fo) for b in bseg):
            raise SemanticError("segment index out of range")
        if len(set(bseg)) != len(bseg):
            raise SemanticError("output segment repeats an index")
        conns = [(fo[b - 1], ti[c - 1]) for c, b in zip(cseg, bseg)]
        cs, bs = set(cseg), set(bseg)
        outs = to + tuple(f for k, f in enumerate(fo, 1) if k not in bs)
        ins = fi + tuple(f for k, f in enumerate(ti, 1) if k not in cs)
        return conns, outs, ins
    raise SemanticError(f"unknown generator {name}")


def colour_of(flag, tree_leaves: dict):
    label, d, k = flag
    bp = tree_leaves[label]
    return bp.out[k - 1] if d == OUT else bp.inp[k - 1]


def evaluate(t: Tree) -> tuple[Listing, frozenset]:
    """(open-flag listing, internal edges) of the graph a tree forms."""
    if isinstance(t, Leaf):
        return leaf_listing(t), frozenset()
    got = t.cache.get("sem")
    if got is not None:
        return got
    kids = [evaluate(c) for c in t.children]
    conns, outs, ins = _base(t.gen, [k[0] for k in kids])
    pp = t.gen.pp
    if len(pp.sigma) != len(outs) or len(pp.tau) != len(ins):
        raise SemanticError(f"permutation pair {pp} does not fit ({len(outs)}|{len(ins)})")
    edges = frozenset(conns).union(*(k[1] for k in kids))
    got = t.cache["sem"] = (relist(pp, outs, ins), edges)
    return got


def leaf_profiles(t: Tree) -> dict:
    return {l.label: l.colour for l in t.leaves()}


def check_typing(t: Tree) -> None:
    """Raise SemanticError unless every generator's colours agree with its children."""
    if isinstance(t, Leaf):
        return
    leaves = leaf_profiles(t)

    def bp_of(listing):
        return BiProfile(tuple(colour_of(f, leaves) for f in listing[0]), tuple(colour_of(f, leaves) for f in listing[1]))

    def walk(x):
        if isinstance(x, Leaf):
            return
        for c in x.children:
            walk(c)
        kids = [evaluate(c)[0] for c in x.children]
        conns, _, _ = _base(x.gen, kids)
        for o, n in conns:
            if colour_of(o, leaves) != colour_of(n, leaves):
                raise SemanticError(f"colour mismatch joining {o} to {n}")
        if tuple(bp_of(k) for k in kids) != tuple(x.gen.inputs):
            raise SemanticError(f"input typing of {x.gen} disagrees with its children")
        if bp_of(evaluate(x)[0]) != x.gen.output:
            raise SemanticError(f"output typing of {x.gen} disagrees with its result")

    walk(t)


def to_skeleton(t: Tree) -> Skeleton:
    (outs, ins), edges = evaluate(t)
    profiles = tuple(sorted(leaf_profiles(t).items()))
    return Skeleton(profiles, edges, outs, ins)


def to_graph(t: Tree):
    return from_skeleton(to_skeleton(t))


# -- encoding ---------------------------------------------------------------


def _bp(listing: Listing, leaves: dict) -> BiProfile:
    return BiProfile(tuple(colour_of(f, leaves) for f in listing[0]), tuple(colour_of(f, leaves) for f in listing[1]))


def encode(kind: str, conns, kids: list, leaves: dict, target: Listing | None) -> Generator:
    """The generator joining children (given by listings) along conns.

    With ``target`` None the result keeps the base listing (identity pair);
    otherwise the pair is solved so that the result is listed as ``target``.
    """
    if kind == "h":
        name, params = "hcomp", ()
    elif kind == "x":
        ((o, n),) = conns
        ao, ai = kids[0]
        name, params = "contract", (ao.index(o) + 1, ai.index(n) + 1)
    elif kind in ("pjoin", "pjoin_op"):
        top, feeder = (kids[0], kids[1]) if kind == "pjoin" else (kids[1], kids[0])
        pairs = sorted((top[1].index(n) + 1, feeder[0].index(o) + 1) for o, n in conns)
        name, params = kind, (tuple(c for c, _ in pairs), tuple(b for _, b in pairs))
    else:
        raise SemanticError(f"unknown kind {kind}")
    probe = Generator(name, params, None, (), None)
    _, outs, ins = _base(probe, kids)
    if target is None:
        pp = PermPair.identity(len(outs), len(ins))
        result = (outs, ins)
    else:
        pp = PermPair(solve_relisting(outs, target[0]), solve_relisting(ins, target[1]))
        result = target
    return Generator(name, params, pp, tuple(_bp(k, leaves) for k in kids), _bp(result, leaves))


def _minleaf(shape) -> int:
    tag = shape[0]
    if tag == "leaf":
        return shape[1]
    if tag == "x":
        return _minleaf(shape[1])
    return min(_minleaf(shape[1]), _minleaf(shape[2]))


def build(shape, leaves: dict, target: Listing | None = None) -> Tree:
    """The push-up canonical tree of a shape: identity pairs below the root."""
    tag = shape[0]
    if tag == "leaf":
        leaf = Leaf(shape[1], leaves[shape[1]])
        if target is not None and target != leaf_listing(leaf):
            raise SemanticError("a leaf cannot be relisted")
        return leaf
    if tag == "x":
        child = build(shape[1], leaves)
        gen = encode("x", [shape[2]], [evaluate(child)[0]], leaves, target)
        return Node(gen, [child])
    if tag == "h":
        a, b = shape[1], shape[2]
        if _minleaf(a) > _minleaf(b):
            a, b = b, a
        ca, cb = build(a, leaves), build(b, leaves)
        gen = encode("h", [], [evaluate(ca)[0], evaluate(cb)[0]], leaves, target)
        return Node(gen, [ca, cb])
    if tag == "j":
        top, feeder, conns = shape[1], shape[2], shape[3]
        ct, cf = build(top, leaves), build(feeder, leaves)
        if _minleaf(top) < _minleaf(feeder):
            kind, kids = "pjoin", [ct, cf]
        else:
            kind, kids = "pjoin_op", [cf, ct]
        gen = encode(kind, conns, [evaluate(c)[0] for c in kids], leaves, target)
        return Node(gen, kids)
    raise SemanticError(f"bad shape {shape!r}")


def shape_of(t: Tree):
    if isinstance(t, Leaf):
        return ("leaf", t.label)
    kids = [evaluate(c)[0] for c in t.children]
    conns, _, _ = _base(t.gen, kids)
    name = t.gen.name
    if name == "hcomp":
        return ("h", shape_of(t.children[0]), shape_of(t.children[1]))
    if name == "contract":
        return ("x", shape_of(t.children[0]), conns[0])
    a, b = shape_of(t.children[0]), shape_of(t.children[1])
    top, feeder = (a, b) if name == "pjoin" else (b, a)
    return ("j", top, feeder, tuple(sorted(conns)))


def push_up(t: Tree) -> Tree:
    """The orbit member with identity pairs everywhere except the root."""
    if isinstance(t, Leaf):
        return t
    return build(shape_of(t), leaf_profiles(t), evaluate(t)[0])


def is_pushed_up(t: Tree) -> bool:
    if isinstance(t, Leaf):
        return True
    return all(_all_identity(c) for c in t.children)


def _all_identity(t: Tree) -> bool:
    if isinstance(t, Leaf):
        return True
    return t.gen.pp.is_identity() and all(_all_identity(c) for c in t.children)


# -- groupoid action along internal edges ---------------------------------------


def edge_moves(t: Tree) -> Iterator[Tree]:
    """Trees obtained by acting with one permutation pair along one internal edge."""
    leaves = leaf_profiles(t)
    stack = [((), t)]
    while stack:
        path, x = stack.pop()
        if not isinstance(x, Node):
            continue
        for k, c in enumerate(x.children):
            stack.append((path + (k,), c))
            if not isinstance(c, Node):
                continue
            yield from _act_on_edge(t, path, x, k, c, leaves)


def _kind(gen: Generator) -> str:
    return {"hcomp": "h", "contract": "x"}.get(gen.name, gen.name)


def _act_on_edge(t, path, parent, k, child, leaves):
    ckids = [evaluate(c)[0] for c in child.children]
    cconns, _, _ = _base(child.gen, ckids)
    (co, ci), _ = evaluate(child)
    pkids = [evaluate(c)[0] for c in parent.children]
    pconns, _, _ = _base(parent.gen, pkids)
    ptarget = evaluate(parent)[0]
    for s in all_permutations(len(co)):
        for u in all_permutations(len(ci)):
            if s.is_identity() and u.is_identity():
                continue
            new_listing = relist(PermPair(s, u), co, ci)
            cgen = encode(_kind(child.gen), cconns, ckids, leaves, new_listing)
            new_child = Node(cgen, child.children)
            kids2 = list(pkids)
            kids2[k] = new_listing
            pgen = encode(_kind(parent.gen), pconns, kids2, leaves, ptarget)
            siblings = list(parent.children)
            siblings[k] = new_child
            yield replace_at(t, path, Node(pgen, siblings))


def orbit(t: Tree, limit: int | None = None) -> set:
    """Breadth-first closure under edge moves."""
    seen = {t}
    frontier = [t]
    while frontier:
        nxt = []
        for x in frontier:
            for y in edge_moves(x):
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
                    if limit is not None and len(seen) > limit:
                        raise SemanticError("orbit exceeds limit")
        frontier = nxt
    return seen


# -- shape utilities -----------------------------------------------------------


def shape_vertices(shape) -> frozenset:
    tag = shape[0]
    if tag == "leaf":
        return frozenset((shape[1],))
    if tag == "x":
        return shape_vertices(shape[1])
    return shape_vertices(shape[1]) | shape_vertices(shape[2])


def all_pairs(n_out: int, n_in: int) -> Iterator[PermPair]:
    for s, u in product(all_permutations(n_out), all_permutations(n_in)):
        yield PermPair(s, u)


def identity_pp(listing: Listing) -> PermPair:
    return PermPair(Permutation.identity(len(listing[0])), Permutation.identity(len(listing[1])))


def subtree_listing(t: Tree, path) -> Listing:
    return evaluate(subtree_at(t, path))[0]

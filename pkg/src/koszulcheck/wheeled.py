"""The operad of wheeled props: horizontal compositions and contractions."""
from __future__ import annotations

from functools import lru_cache
from itertools import permutations, product

from .graphs import GraphError, Skeleton, WheeledGraph, to_skeleton
from .orders import WHEELED_ORDER, TreeOrder
from .profiles import BiProfile, PermPair, relist
from .relation_tables import WHEELED_GUARDS, WHEELED_TABLE, make_table_family
from .rewriting import RewriteSystem, Rule, binomial_rule
from .semantics import (
    SemanticError,
    build,
    check_typing,
    encode,
    evaluate,
    is_pushed_up,
    push_up,
    to_graph,
)
from .semantics import to_skeleton as tree_skeleton
from .trees import Generator, Leaf, Node, Tree, TreeError


def hcomp_gen(left: BiProfile, right: BiProfile, pp: PermPair | None = None) -> Generator:
    outs, ins = left.out + right.out, left.inp + right.inp
    pp = pp or PermPair.identity(len(outs), len(ins))
    if len(pp.sigma) != len(outs) or len(pp.tau) != len(ins):
        raise TreeError(f"permutation pair {pp} does not fit ({len(outs)}|{len(ins)})")
    return Generator("hcomp", (), pp, (left, right), BiProfile(*relist(pp, outs, ins)))


def contract_gen(bp: BiProfile, i: int, j: int, pp: PermPair | None = None) -> Generator:
    if not (1 <= i <= len(bp.out) and 1 <= j <= len(bp.inp)):
        raise TreeError(f"contraction ({i},{j}) out of range for {bp}")
    if bp.out[i - 1] != bp.inp[j - 1]:
        raise TreeError(f"colour mismatch contracting output {i} with input {j}")
    outs = bp.out[: i - 1] + bp.out[i:]
    ins = bp.inp[: j - 1] + bp.inp[j:]
    pp = pp or PermPair.identity(len(outs), len(ins))
    if len(pp.sigma) != len(outs) or len(pp.tau) != len(ins):
        raise TreeError(f"permutation pair {pp} does not fit ({len(outs)}|{len(ins)})")
    return Generator("contract", (i, j), pp, (bp,), BiProfile(*relist(pp, outs, ins)))


def hcomp(a: Tree, b: Tree, pp: PermPair | None = None) -> Node:
    return Node(hcomp_gen(a.colour, b.colour, pp), [a, b])


def contract(a: Tree, i: int, j: int, pp: PermPair | None = None) -> Node:
    return Node(contract_gen(a.colour, i, j, pp), [a])


def eval_w(t: Tree) -> WheeledGraph:
    """The labelled wheeled graph a tree monomial forms."""
    for l in t.leaves():
        if not isinstance(l.colour, BiProfile):
            raise TreeError("leaves must carry biprofiles")
    check_typing(t)
    return to_graph(t)


def _skeleton(g) -> Skeleton:
    if isinstance(g, Skeleton):
        return g
    if g.exceptional:
        raise GraphError("graphs with exceptional cells have no formation")
    if g.labels is None:
        raise GraphError("the graph needs vertex labels")
    return to_skeleton(g)


def umf_wheeled(g) -> Tree:
    """The unique minimal formation: a left comb, then contractions by largest input."""
    sk = _skeleton(g)
    leaves = dict(sk.profiles)
    labels = sorted(leaves)
    shape = ("leaf", labels[0])
    outs, ins = [], []
    for lab in labels:
        bp = leaves[lab]
        outs += [(lab, -1, k) for k in range(1, len(bp.out) + 1)]
        ins += [(lab, 1, k) for k in range(1, len(bp.inp) + 1)]
    for lab in labels[1:]:
        shape = ("h", shape, ("leaf", lab))
    remaining = set(sk.edges)
    while remaining:
        edge = max(remaining, key=lambda e: ins.index(e[1]))
        shape = ("x", shape, edge)
        outs.remove(edge[0])
        ins.remove(edge[1])
        remaining.discard(edge)
    return build(shape, leaves, (sk.outs, sk.ins))


# -- formations -------------------------------------------------------------


@lru_cache(maxsize=None)
def shuffle_shapes(labels: tuple) -> tuple:
    """All binary shuffle trees of horizontal joins over the given labels."""
    if len(labels) == 1:
        return (("leaf", labels[0]),)
    first, rest = labels[0], labels[1:]
    out = []
    for mask in range(1 << len(rest)):
        left = (first,) + tuple(x for k, x in enumerate(rest) if mask >> k & 1)
        right = tuple(x for k, x in enumerate(rest) if not mask >> k & 1)
        if not right:
            continue
        for a in shuffle_shapes(left):
            for b in shuffle_shapes(right):
                out.append(("h", a, b))
    return tuple(out)


def _nodes(shape, acc: list) -> frozenset:
    if shape[0] == "leaf":
        vs = frozenset((shape[1],))
    else:
        vs = _nodes(shape[1], acc) | _nodes(shape[2], acc)
    acc.append((shape, vs))
    return vs


def _wrap(shape, chains: dict) -> tuple:
    """Put the contraction chain keyed by each node's vertex set above that node."""
    if shape[0] == "leaf":
        base, vs = shape, frozenset((shape[1],))
    else:
        a, va = _wrap(shape[1], chains)
        b, vb = _wrap(shape[2], chains)
        base, vs = ("h", a, b), va | vb
    for e in chains.get(vs, ()):
        base = ("x", base, e)
    return base, vs


def formation_shapes_w(sk: Skeleton):
    labels = tuple(sorted(l for l, _ in sk.profiles))
    edges = sorted(sk.edges)
    for hs in shuffle_shapes(labels):
        nodes: list = []
        _nodes(hs, nodes)
        options = []
        for o, n in edges:
            options.append([k for k, (_, vs) in enumerate(nodes) if o[0] in vs and n[0] in vs])
        for choice in product(*options):
            groups: dict = {}
            for e, k in zip(edges, choice):
                groups.setdefault(k, []).append(e)
            keys = sorted(groups)
            for orders in product(*(permutations(groups[k]) for k in keys)):
                chains = {nodes[k][1]: order for k, order in zip(keys, orders)}
                yield _wrap(hs, chains)[0]


def formations_w(g) -> list[Tree]:
    """Every push-up canonical tree monomial forming g."""
    sk = _skeleton(g)
    leaves = dict(sk.profiles)
    return [build(s, leaves, (sk.outs, sk.ins)) for s in formation_shapes_w(sk)]


def naive_formations_w(g) -> list[Tree]:
    """Generate-and-filter oracle: every tree of joins and contractions with identity
    pairs below the root whose contractions are edges of g, keeping those forming g."""
    sk = _skeleton(g)
    leaves = dict(sk.profiles)
    target = (sk.outs, sk.ins)
    memo: dict = {}

    def grow(ts):
        out = list(ts)
        frontier = list(ts)
        while frontier:
            nxt = []
            for t in frontier:
                (outs, ins), made = evaluate(t)
                for i, o in enumerate(outs, 1):
                    for j, n in enumerate(ins, 1):
                        if (o, n) in sk.edges and (o, n) not in made:
                            nxt.append(Node(contract_gen(t.colour, i, j), [t]))
            out += nxt
            frontier = nxt
        return out

    def trees(vs: tuple) -> list:
        if vs in memo:
            return memo[vs]
        if len(vs) == 1:
            base = [Leaf(vs[0], leaves[vs[0]])]
        else:
            base = []
            first, rest = vs[0], vs[1:]
            for mask in range(1 << len(rest)):
                left = (first,) + tuple(x for k, x in enumerate(rest) if mask >> k & 1)
                right = tuple(x for k, x in enumerate(rest) if not mask >> k & 1)
                if right:
                    for a in trees(left):
                        for b in trees(right):
                            base.append(Node(hcomp_gen(a.colour, b.colour), [a, b]))
        memo[vs] = grow(base)
        return memo[vs]

    found = []
    for t in trees(tuple(sorted(leaves))):
        listing, made = evaluate(t)
        if made != sk.edges:
            continue
        if isinstance(t, Leaf):
            if listing == target:
                found.append(t)
            continue
        if sorted(listing[0]) != sorted(target[0]) or sorted(listing[1]) != sorted(target[1]):
            continue
        kind = "h" if t.gen.name == "hcomp" else "x"
        kids = [evaluate(c)[0] for c in t.children]
        conns = []
        if kind == "x":
            i, j = t.gen.params
            conns = [(kids[0][0][i - 1], kids[0][1][j - 1])]
        found.append(Node(encode(kind, conns, kids, leaves, target), t.children))
    return found


# -- relations -----------------------------------------------------------------


def push_up_family(order: TreeOrder):
    """Windows carrying a non-identity pair below their root rewrite to their push-up."""

    def family(local: Node) -> Rule | None:
        if is_pushed_up(local):
            return None
        return binomial_rule(local, push_up(local), order, name="orbit")

    return family


def kernel_family(formations, order: TreeOrder):
    """Every canonical window that is not the minimal formation of its own graph
    rewrites to that minimum. Used to cross-check the printed tables."""

    def family(local: Node) -> Rule | None:
        if not is_pushed_up(local):
            return None
        forms = formations(tree_skeleton(local))
        if local not in forms:
            raise SemanticError(f"window {local!r} missing from its own formations")
        least = order.min(forms)
        if least == local:
            return None
        return binomial_rule(local, least, order, name="kernel")

    return family


def wheeled_system(order: TreeOrder = WHEELED_ORDER, table=WHEELED_TABLE, use_kernel: bool = False) -> RewriteSystem:
    """Orbit rules plus the table relations, instantiated lazily on windows."""
    fams = [("orbit", push_up_family(order))]
    if use_kernel:
        fams.append(("kernel", kernel_family(formations_w, order)))
    else:
        fams.append(("table", make_table_family(table, order, wheeled=True, guards=WHEELED_GUARDS)))
    return RewriteSystem([], order, fams, name="wheeled")


def leaf(label: int, out, inp) -> Leaf:
    return Leaf(label, BiProfile(tuple(out), tuple(inp)))

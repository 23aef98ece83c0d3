"""The operad of props: horizontal compositions and properadic joins."""
from __future__ import annotations

from itertools import combinations, permutations

from .graphs import GraphError, Skeleton, _has_cycle, to_skeleton
from .orders import PROP_ORDER, TreeOrder
from .profiles import BiProfile, PermPair, relist
from .relation_tables import PROP_TABLE, make_table_family
from .rewriting import RewriteSystem
from .semantics import _base, build, check_typing, encode, evaluate, to_graph
from .trees import Generator, Leaf, Node, Tree, TreeError
from .wheeled import hcomp_gen, kernel_family, push_up_family, shuffle_shapes


def _join_base(top: BiProfile, feeder: BiProfile, cseg, bseg):
    cseg, bseg = tuple(cseg), tuple(bseg)
    if not cseg or len(cseg) != len(bseg):
        raise TreeError("segments must be non-empty and of equal length")
    if any(x >= y for x, y in zip(cseg, cseg[1:])):
        raise TreeError("input segment is not in the reduced order")
    if len(set(bseg)) != len(bseg):
        raise TreeError("output segment repeats an index")
    if not all(1 <= c <= len(top.inp) for c in cseg) or not all(1 <= b <= len(feeder.out) for b in bseg):
        raise TreeError("segment index out of range")
    if any(top.inp[c - 1] != feeder.out[b - 1] for c, b in zip(cseg, bseg)):
        raise TreeError("segment colours differ")
    outs = top.out + tuple(x for k, x in enumerate(feeder.out, 1) if k not in bseg)
    ins = feeder.inp + tuple(x for k, x in enumerate(top.inp, 1) if k not in cseg)
    return cseg, bseg, outs, ins


def pjoin_gen(first: BiProfile, second: BiProfile, cseg, bseg, pp: PermPair | None = None, swapped: bool = False) -> Generator:
    """Join generator on (first, second); the second feeds the first unless swapped."""
    top, feeder = (second, first) if swapped else (first, second)
    cseg, bseg, outs, ins = _join_base(top, feeder, cseg, bseg)
    pp = pp or PermPair.identity(len(outs), len(ins))
    if len(pp.sigma) != len(outs) or len(pp.tau) != len(ins):
        raise TreeError(f"permutation pair {pp} does not fit ({len(outs)}|{len(ins)})")
    name = "pjoin_op" if swapped else "pjoin"
    return Generator(name, (cseg, bseg), pp, (first, second), BiProfile(*relist(pp, outs, ins)))


def pjoin(a: Tree, b: Tree, cseg, bseg, pp: PermPair | None = None) -> Node:
    """b feeds a along (cseg of a's inputs | bseg of b's outputs)."""
    return Node(pjoin_gen(a.colour, b.colour, cseg, bseg, pp), [a, b])


def pjoin_op(a: Tree, b: Tree, cseg, bseg, pp: PermPair | None = None) -> Node:
    """a feeds b: the swapped join, cseg indexing b's inputs and bseg a's outputs."""
    return Node(pjoin_gen(a.colour, b.colour, cseg, bseg, pp, swapped=True), [a, b])


def eval_p(t: Tree):
    for l in t.leaves():
        if not isinstance(l.colour, BiProfile):
            raise TreeError("leaves must carry biprofiles")
    _check_no_contractions(t)
    check_typing(t)
    return to_graph(t)


def _check_no_contractions(t: Tree) -> None:
    if isinstance(t, Node):
        if t.gen.name not in ("hcomp", "pjoin", "pjoin_op"):
            raise TreeError(f"{t.gen.name} is not a prop generator")
        for c in t.children:
            _check_no_contractions(c)


def _skeleton(g) -> Skeleton:
    if isinstance(g, Skeleton):
        sk = g
    else:
        if g.exceptional:
            raise GraphError("graphs with exceptional cells have no formation")
        if g.labels is None:
            raise GraphError("the graph needs vertex labels")
        sk = to_skeleton(g)
    succ = {l: set() for l, _ in sk.profiles}
    for o, n in sk.edges:
        succ[o[0]].add(n[0])
    if _has_cycle(succ):
        raise GraphError("props need wheel-free graphs")
    return sk


def _reach(succ: dict, start, allowed: set) -> set:
    """Vertices reachable from start through vertices of allowed (start excluded)."""
    seen, stack = set(), [start]
    while stack:
        v = stack.pop()
        for w in succ[v]:
            if w not in seen:
                seen.add(w)
                if w in allowed:
                    stack.append(w)
    return seen


def umf_prop(g) -> Tree:
    """The unique minimal formation of a wheel-free graph."""
    sk = _skeleton(g)
    leaves = dict(sk.profiles)
    labels = sorted(leaves)
    succ = {l: set() for l in labels}
    pred = {l: set() for l in labels}
    for o, n in sk.edges:
        succ[o[0]].add(n[0])
        pred[n[0]].add(o[0])
    placed = {labels[0]}
    shape = ("leaf", labels[0])
    remaining = set(labels[1:])
    while remaining:
        for v in sorted(remaining):
            others = remaining - {v}
            down = {w for w in others if _reach(succ, w, others) & placed}
            up = {w for w in others if _reach(pred, w, others) & placed}
            # a path between v and the placed vertices through another remaining vertex
            if (succ[v] & down) or (pred[v] & up):
                continue
            break
        else:
            raise GraphError("no admissible vertex; the graph has a wheel")
        feeds = [e for e in sk.edges if e[0][0] == v and e[1][0] in placed]
        fed = [e for e in sk.edges if e[1][0] == v and e[0][0] in placed]
        if feeds and fed:
            raise GraphError(f"vertex {v} both feeds and is fed by the formed part")
        if feeds:
            shape = ("j", shape, ("leaf", v), tuple(sorted(feeds)))
        elif fed:
            shape = ("j", ("leaf", v), shape, tuple(sorted(fed)))
        else:
            shape = ("h", shape, ("leaf", v))
        placed.add(v)
        remaining.discard(v)
    return build(shape, leaves, (sk.outs, sk.ins))


def formation_shapes_p(sk: Skeleton):
    labels = tuple(sorted(l for l, _ in sk.profiles))
    edges = sk.edges

    def assign(hs):
        if hs[0] == "leaf":
            return hs, frozenset((hs[1],))
        a, va = assign(hs[1])
        b, vb = assign(hs[2])
        if a is None or b is None:
            return None, va | vb
        down = tuple(sorted(e for e in edges if e[0][0] in vb and e[1][0] in va))
        up = tuple(sorted(e for e in edges if e[0][0] in va and e[1][0] in vb))
        if down and up:
            return None, va | vb
        if down:
            return ("j", a, b, down), va | vb
        if up:
            return ("j", b, a, up), va | vb
        return ("h", a, b), va | vb

    for hs in shuffle_shapes(labels):
        sh, _ = assign(hs)
        if sh is not None:
            yield sh


def formations_p(g) -> list[Tree]:
    sk = _skeleton(g)
    leaves = dict(sk.profiles)
    return [build(s, leaves, (sk.outs, sk.ins)) for s in formation_shapes_p(sk)]


def _segment_choices(top: BiProfile, feeder: BiProfile):
    for k in range(1, min(len(top.inp), len(feeder.out)) + 1):
        for cseg in combinations(range(1, len(top.inp) + 1), k):
            for bseg in permutations(range(1, len(feeder.out) + 1), k):
                if all(top.inp[c - 1] == feeder.out[b - 1] for c, b in zip(cseg, bseg)):
                    yield cseg, bseg


def naive_formations_p(g) -> list[Tree]:
    """Generate-and-filter oracle over joins with every segment choice."""
    sk = _skeleton(g)
    leaves = dict(sk.profiles)
    target = (sk.outs, sk.ins)
    memo: dict = {}

    def trees(vs: tuple) -> list:
        if vs in memo:
            return memo[vs]
        if len(vs) == 1:
            out = [Leaf(vs[0], leaves[vs[0]])]
        else:
            out = []
            first, rest = vs[0], vs[1:]
            for mask in range(1 << len(rest)):
                left = (first,) + tuple(x for k, x in enumerate(rest) if mask >> k & 1)
                right = tuple(x for k, x in enumerate(rest) if not mask >> k & 1)
                if not right:
                    continue
                for a in trees(left):
                    for b in trees(right):
                        cands = [Node(hcomp_gen(a.colour, b.colour), [a, b])]
                        for swapped in (False, True):
                            top, feeder = (b, a) if swapped else (a, b)
                            for cseg, bseg in _segment_choices(top.colour, feeder.colour):
                                gen = pjoin_gen(a.colour, b.colour, cseg, bseg, swapped=swapped)
                                cands.append(Node(gen, [a, b]))
                        for t in cands:
                            if evaluate(t)[1] <= sk.edges:
                                out.append(t)
        memo[vs] = out
        return out

    found = []
    for t in trees(tuple(sorted(leaves))):
        listing, made = evaluate(t)
        if made != sk.edges:
            continue
        if isinstance(t, Leaf):
            if listing == target:
                found.append(t)
            continue
        kids = [evaluate(c)[0] for c in t.children]
        conns, _, _ = _base(t.gen, kids)
        kind = "h" if t.gen.name == "hcomp" else t.gen.name
        found.append(Node(encode(kind, conns, kids, leaves, target), t.children))
    return found


def prop_system(order: TreeOrder = PROP_ORDER, table=PROP_TABLE, use_kernel: bool = False) -> RewriteSystem:
    fams = [("orbit", push_up_family(order))]
    if use_kernel:
        fams.append(("kernel", kernel_family(formations_p, order)))
    else:
        fams.append(("table", make_table_family(table, order, wheeled=False)))
    return RewriteSystem([], order, fams, name="prop")

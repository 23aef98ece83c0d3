"""Wheeled graphs: flags, cells, involutions, colouring, direction, listings.

Graphs built by the composition operations use canonical flag names
``(label, direction, position)`` where ``direction`` is +1 for an input
and -1 for an output of the vertex, so structural equality of two such
graphs is strict isomorphism respecting vertex labels.
"""
from __future__ import annotations

from itertools import permutations, product
from typing import Hashable, Iterable, Iterator, Mapping, NamedTuple, Sequence

from .profiles import BiProfile, PermPair, relist

IN, OUT = 1, -1
GRAPH = None  # listing key of the whole graph


class GraphError(ValueError):
    pass


def _sorted(xs: Iterable) -> list:
    xs = list(xs)
    try:
        return sorted(xs)
    except TypeError:
        return sorted(xs, key=repr)


class WheeledGraph:
    """A coloured, directed, listed generalised graph.

    ``cells`` maps vertex ids to their flag sets, ``listing`` maps each vertex id
    (and ``GRAPH``) to a pair ``(inputs, outputs)`` of flag tuples in listing order.
    """

    __slots__ = ("cells", "exceptional", "iota", "pi", "kappa", "delta", "listing", "labels", "_key")

    def __init__(
        self,
        cells: Mapping[Hashable, Iterable],
        exceptional: Iterable,
        iota: Mapping,
        pi: Mapping,
        kappa: Mapping,
        delta: Mapping,
        listing: Mapping,
        labels: Mapping | None = None,
    ):
        self.cells = {v: frozenset(fs) for v, fs in cells.items()}
        self.exceptional = frozenset(exceptional)
        flags = self.flags
        self.iota = {x: iota.get(x, x) for x in flags}
        self.pi = dict(pi)
        self.kappa = dict(kappa)
        self.delta = dict(delta)
        self.listing = {u: (tuple(i), tuple(o)) for u, (i, o) in listing.items()}
        self.labels = dict(labels) if labels is not None else None
        self._key = None

    @property
    def flags(self) -> frozenset:
        out = set(self.exceptional)
        for fs in self.cells.values():
            out |= fs
        return frozenset(out)

    @property
    def vertices(self) -> list:
        return list(self.cells)

    def key(self) -> tuple:
        if self._key is None:
            self._key = (
                tuple(_sorted((v, tuple(_sorted(fs))) for v, fs in self.cells.items())),
                tuple(_sorted(self.exceptional)),
                tuple(_sorted(self.iota.items())),
                tuple(_sorted(self.pi.items())),
                tuple(_sorted(self.kappa.items())),
                tuple(_sorted(self.delta.items())),
                tuple(_sorted(self.listing.items())),
                tuple(_sorted(self.labels.items())) if self.labels is not None else None,
            )
        return self._key

    def __eq__(self, other) -> bool:
        return isinstance(other, WheeledGraph) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        if self.is_canonical():
            sk = to_skeleton(self)
            return f"WheeledGraph({sk.profiles}, edges={sorted(sk.edges)}, out={sk.outs}, in={sk.ins})"
        return f"WheeledGraph(vertices={len(self.cells)}, flags={len(self.flags)})"

    def is_canonical(self) -> bool:
        if self.exceptional or self.labels is None:
            return False
        for v, fs in self.cells.items():
            lab = self.labels[v]
            if any(not (isinstance(f, tuple) and len(f) == 3 and f[0] == lab) for f in fs):
                return False
        return True

    # -- reading -------------------------------------------------------

    def legs(self) -> list:
        return [x for x in self.flags if self.iota[x] == x]

    def inputs(self, u=GRAPH) -> tuple:
        return self.listing[u][0]

    def outputs(self, u=GRAPH) -> tuple:
        return self.listing[u][1]

    def vertex_of(self, flag) -> Hashable | None:
        for v, fs in self.cells.items():
            if flag in fs:
                return v
        return None


def validate(g: WheeledGraph) -> list[str]:
    """Every violated invariant, as messages naming the offending flags."""
    problems: list[str] = []
    flags = g.flags
    seen: set = set()
    for v, fs in g.cells.items():
        dup = seen & fs
        if dup:
            problems.append(f"cells overlap at flags {_sorted(dup)}")
        seen |= fs
    if seen & g.exceptional:
        problems.append(f"exceptional cell overlaps a vertex at {_sorted(seen & g.exceptional)}")
    for x in flags:
        y = g.iota.get(x, x)
        if y not in flags or g.iota.get(y, y) != x:
            problems.append(f"iota is not an involution at {x!r}")
        elif (x in g.exceptional) != (y in g.exceptional):
            problems.append(f"iota does not preserve the exceptional cell at {x!r}")
    fixed_exc = {x for x in g.exceptional if g.iota.get(x, x) == x}
    if set(g.pi) != fixed_exc:
        problems.append("pi is not defined exactly on the iota-fixed exceptional flags")
    for x, y in g.pi.items():
        if x == y:
            problems.append(f"pi has a fixed point at {x!r}")
        elif g.pi.get(y) != x:
            problems.append(f"pi is not an involution at {x!r}")
    for x in flags:
        if x not in g.kappa:
            problems.append(f"flag {x!r} has no colour")
        if g.delta.get(x) not in (IN, OUT):
            problems.append(f"flag {x!r} has no direction")
    if problems:
        return problems
    for x in flags:
        y = g.iota[x]
        if y != x:
            if g.kappa[x] != g.kappa[y]:
                problems.append(f"colouring not constant on iota orbit {x!r}")
            if g.delta[x] != -g.delta[y]:
                problems.append(f"direction not anti-symmetric on {x!r}")
    for x, y in g.pi.items():
        if g.kappa[x] != g.kappa[y]:
            problems.append(f"colouring not constant on pi orbit {x!r}")
        if g.delta[x] != -g.delta[y]:
            problems.append(f"direction not anti-symmetric on {x!r}")
    if g.labels is not None:
        if set(g.labels) != set(g.cells):
            problems.append("vertex labels do not cover the vertices")
        elif sorted(g.labels.values()) != list(range(1, len(g.cells) + 1)):
            problems.append("vertex labels are not a bijection onto 1..n")
    legs = set(g.legs())
    for u in [GRAPH, *g.cells]:
        pool = legs if u is GRAPH else g.cells[u]
        if u not in g.listing:
            problems.append(f"missing listing for {'graph' if u is GRAPH else u!r}")
            continue
        ins, outs = g.listing[u]
        want_in = {x for x in pool if g.delta[x] == IN}
        want_out = {x for x in pool if g.delta[x] == OUT}
        if len(set(ins)) != len(ins) or set(ins) != want_in:
            problems.append(f"input listing of {'graph' if u is GRAPH else u!r} is not a bijection")
        if len(set(outs)) != len(outs) or set(outs) != want_out:
            problems.append(f"output listing of {'graph' if u is GRAPH else u!r} is not a bijection")
    return problems


def classify(g: WheeledGraph) -> dict[str, list]:
    internal, exc_edges, exc_loops, legs, exc_legs = [], [], [], [], []
    done: set = set()
    for x in _sorted(g.flags):
        if x in done:
            continue
        y = g.iota[x]
        if y != x:
            (exc_loops if x in g.exceptional else internal).append(frozenset((x, y)))
            done |= {x, y}
        elif x in g.exceptional:
            if x in g.pi:
                exc_edges.append(frozenset((x, g.pi[x])))
                done |= {x, g.pi[x]}
            else:
                exc_legs.append(x)
                done.add(x)
        else:
            legs.append(x)
            done.add(x)
    return {
        "internal_edges": internal,
        "exceptional_edges": exc_edges,
        "exceptional_loops": exc_loops,
        "ordinary_legs": legs,
        "exceptional_legs": exc_legs,
    }


def directed_edges(g: WheeledGraph) -> list[tuple]:
    """(source vertex, target vertex) for each internal edge."""
    out = []
    for x in g.flags:
        y = g.iota[x]
        if y != x and g.delta[x] == OUT and x not in g.exceptional:
            out.append((g.vertex_of(x), g.vertex_of(y)))
    return out


def has_wheel(g: WheeledGraph) -> bool:
    if any(g.iota[x] != x for x in g.exceptional):
        return True
    succ: dict = {v: set() for v in g.cells}
    for a, b in directed_edges(g):
        succ[a].add(b)
    return _has_cycle(succ)


def _has_cycle(succ: Mapping) -> bool:
    state: dict = {}
    for root in succ:
        if root in state:
            continue
        stack = [(root, iter(succ[root]))]
        state[root] = 1
        while stack:
            v, it = stack[-1]
            for w in it:
                s = state.get(w)
                if s == 1:
                    return True
                if s is None:
                    state[w] = 1
                    stack.append((w, iter(succ[w])))
                    break
            else:
                state[v] = 2
                stack.pop()
    return False


def biprofile(g: WheeledGraph, u=GRAPH) -> BiProfile:
    ins, outs = g.listing[u]
    return BiProfile(tuple(g.kappa[x] for x in outs), tuple(g.kappa[x] for x in ins))


# -- isomorphism -------------------------------------------------------


def _isomorphisms(g: WheeledGraph, h: WheeledGraph, strict: bool) -> Iterator[dict]:
    if len(g.cells) != len(h.cells) or len(g.flags) != len(h.flags):
        return
    if len(g.exceptional) != len(h.exceptional):
        return

    def sig(graph, v):
        fs = graph.cells[v]
        return tuple(sorted((graph.delta[x], repr(graph.kappa[x])) for x in fs))

    gv, hv = list(g.cells), list(h.cells)
    use_labels = strict and g.labels is not None and h.labels is not None
    g_legpos = {x: (0, k) for k, x in enumerate(g.listing[GRAPH][0])}
    g_legpos.update({x: (1, k) for k, x in enumerate(g.listing[GRAPH][1])})
    h_legpos = {x: (0, k) for k, x in enumerate(h.listing[GRAPH][0])}
    h_legpos.update({x: (1, k) for k, x in enumerate(h.listing[GRAPH][1])})

    def vpos(graph, v):
        ins, outs = graph.listing[v]
        pos = {x: (0, k) for k, x in enumerate(ins)}
        pos.update({x: (1, k) for k, x in enumerate(outs)})
        return pos

    for image in permutations(hv):
        vmap = dict(zip(gv, image))
        if any(sig(g, v) != sig(h, vmap[v]) for v in gv):
            continue
        if use_labels and any(g.labels[v] != h.labels[vmap[v]] for v in gv):
            continue
        order: list = []
        cands: dict = {}
        for v in gv:
            gp, hp = vpos(g, v), vpos(h, vmap[v])
            for x in g.cells[v]:
                order.append(x)
                cands[x] = [
                    y
                    for y in h.cells[vmap[v]]
                    if h.delta[y] == g.delta[x]
                    and h.kappa[y] == g.kappa[x]
                    and (not strict or hp[y] == gp[x])
                ]
        for x in g.exceptional:
            order.append(x)
            cands[x] = [y for y in h.exceptional if h.delta[y] == g.delta[x] and h.kappa[y] == g.kappa[x]]
        if strict:
            for x in order:
                if x in g_legpos:
                    cands[x] = [y for y in cands[x] if h_legpos.get(y) == g_legpos[x]]
        yield from _extend({}, set(), order, 0, cands, g, h)


def _extend(phi, used, order, k, cands, g, h):
    if k == len(order):
        yield dict(phi)
        return
    x = order[k]
    for y in cands[x]:
        if y in used:
            continue
        ok = True
        for inv_g, inv_h in ((g.iota, h.iota), (g.pi, h.pi)):
            xi, yi = inv_g.get(x), inv_h.get(y)
            if (xi is None) != (yi is None):
                ok = False
                break
            if xi is None:
                continue
            if (xi == x) != (yi == y):
                ok = False
                break
            if xi in phi and phi[xi] != yi:
                ok = False
                break
        if not ok:
            continue
        phi[x] = y
        used.add(y)
        yield from _extend(phi, used, order, k + 1, cands, g, h)
        used.discard(y)
        del phi[x]


def weak_iso(g: WheeledGraph, h: WheeledGraph) -> dict | None:
    return next(_isomorphisms(g, h, strict=False), None)


def strict_iso(g: WheeledGraph, h: WheeledGraph) -> bool:
    if g.is_canonical() and h.is_canonical():
        return g == h
    return next(_isomorphisms(g, h, strict=True), None) is not None


# -- canonical (skeleton) form ------------------------------------------


class Skeleton(NamedTuple):
    """Compact description of a canonically named graph without exceptional cells."""

    profiles: tuple  # ((label, BiProfile), ...) sorted by label
    edges: frozenset  # {(out_flag, in_flag)}
    outs: tuple  # graph outputs in listing order
    ins: tuple  # graph inputs in listing order


def out_flag(label: int, k: int) -> tuple:
    return (label, OUT, k)


def in_flag(label: int, k: int) -> tuple:
    return (label, IN, k)


def corolla_flags(label: int, bp: BiProfile) -> tuple[tuple, tuple]:
    return (
        tuple((label, OUT, k) for k in range(1, len(bp.out) + 1)),
        tuple((label, IN, k) for k in range(1, len(bp.inp) + 1)),
    )


def from_skeleton(sk: Skeleton) -> WheeledGraph:
    cells, kappa, delta, listing, labels = {}, {}, {}, {}, {}
    for label, bp in sk.profiles:
        outs, ins = corolla_flags(label, bp)
        cells[label] = set(outs) | set(ins)
        labels[label] = label
        listing[label] = (ins, outs)
        for x, c in zip(outs, bp.out):
            kappa[x], delta[x] = c, OUT
        for x, c in zip(ins, bp.inp):
            kappa[x], delta[x] = c, IN
    iota = {}
    for o, i in sk.edges:
        iota[o], iota[i] = i, o
    listing[GRAPH] = (tuple(sk.ins), tuple(sk.outs))
    return WheeledGraph(cells, (), iota, {}, kappa, delta, listing, labels)


def to_skeleton(g: WheeledGraph) -> Skeleton:
    if not g.is_canonical():
        g = canonical_naming(g)
    profiles = tuple(sorted((g.labels[v], biprofile(g, v)) for v in g.cells))
    edges = frozenset((x, g.iota[x]) for x in g.flags if g.iota[x] != x and g.delta[x] == OUT)
    return Skeleton(profiles, edges, g.listing[GRAPH][1], g.listing[GRAPH][0])


def canonical_naming(g: WheeledGraph) -> WheeledGraph:
    """Rename flags to (label, direction, position); unlabelled graphs get labels by cell order."""
    if g.exceptional:
        raise GraphError("graphs with exceptional flags have no canonical naming")
    labels = g.labels if g.labels is not None else {v: k for k, v in enumerate(g.cells, 1)}
    rename = {}
    for v in g.cells:
        ins, outs = g.listing[v]
        for k, x in enumerate(ins, 1):
            rename[x] = (labels[v], IN, k)
        for k, x in enumerate(outs, 1):
            rename[x] = (labels[v], OUT, k)
    return WheeledGraph(
        {labels[v]: {rename[x] for x in fs} for v, fs in g.cells.items()},
        (),
        {rename[x]: rename[y] for x, y in g.iota.items()},
        {},
        {rename[x]: c for x, c in g.kappa.items()},
        {rename[x]: d for x, d in g.delta.items()},
        {(labels[u] if u is not GRAPH else GRAPH): (tuple(rename[x] for x in i), tuple(rename[x] for x in o))
         for u, (i, o) in g.listing.items()},
        {labels[v]: labels[v] for v in g.cells},
    )


def corolla(bp: BiProfile, label: int = 1) -> WheeledGraph:
    outs, ins = corolla_flags(label, bp)
    return from_skeleton(Skeleton(((label, bp),), frozenset(), outs, ins))


# -- composition operations -----------------------------------------------


def _colours(sk: Skeleton) -> dict:
    col = {}
    for label, bp in sk.profiles:
        outs, ins = corolla_flags(label, bp)
        col.update(zip(outs, bp.out))
        col.update(zip(ins, bp.inp))
    return col


def _shift(sk: Skeleton, by: int) -> Skeleton:
    if by == 0:
        return sk

    def f(x):
        return (x[0] + by, x[1], x[2])

    return Skeleton(
        tuple((l + by, bp) for l, bp in sk.profiles),
        frozenset((f(o), f(i)) for o, i in sk.edges),
        tuple(map(f, sk.outs)),
        tuple(map(f, sk.ins)),
    )


def _check_pp(pp: PermPair, n_out: int, n_in: int) -> None:
    if len(pp.sigma) != n_out or len(pp.tau) != n_in:
        raise GraphError(
            f"permutation pair of degree ({len(pp.sigma)}|{len(pp.tau)}) does not match ({n_out}|{n_in})"
        )


def hjoin_sk(a: Skeleton, b: Skeleton, pp: PermPair) -> Skeleton:
    labels_a = {l for l, _ in a.profiles}
    if labels_a & {l for l, _ in b.profiles}:
        b = _shift(b, max(labels_a))
    outs, ins = a.outs + b.outs, a.ins + b.ins
    _check_pp(pp, len(outs), len(ins))
    outs, ins = relist(pp, outs, ins)
    return Skeleton(tuple(sorted(a.profiles + b.profiles)), a.edges | b.edges, outs, ins)


def contract_sk(a: Skeleton, i: int, j: int, pp: PermPair) -> Skeleton:
    if not (1 <= i <= len(a.outs) and 1 <= j <= len(a.ins)):
        raise GraphError(f"contraction indices ({i},{j}) out of range")
    o, n = a.outs[i - 1], a.ins[j - 1]
    col = _colours(a)
    if col[o] != col[n]:
        raise GraphError(f"colour mismatch contracting output {i} with input {j}")
    outs = a.outs[: i - 1] + a.outs[i:]
    ins = a.ins[: j - 1] + a.ins[j:]
    _check_pp(pp, len(outs), len(ins))
    outs, ins = relist(pp, outs, ins)
    return Skeleton(a.profiles, a.edges | {(o, n)}, outs, ins)


def pjoin_sk(a: Skeleton, b: Skeleton, cseg: Sequence[int], bseg: Sequence[int], pp: PermPair) -> Skeleton:
    """Join inputs cseg of a to outputs bseg of b (b feeds a)."""
    labels_a = {l for l, _ in a.profiles}
    if labels_a & {l for l, _ in b.profiles}:
        b = _shift(b, max(labels_a))
    if len(cseg) != len(bseg):
        raise GraphError("segments of different length")
    if any(x >= y for x, y in zip(cseg, cseg[1:])):
        raise GraphError("input segment is not in the reduced order")
    if len(set(bseg)) != len(bseg):
        raise GraphError("output segment repeats an index")
    if not all(1 <= c <= len(a.ins) for c in cseg) or not all(1 <= x <= len(b.outs) for x in bseg):
        raise GraphError("segment index out of range")
    ca, cb = _colours(a), _colours(b)
    new_edges = set()
    for c, x in zip(cseg, bseg):
        n, o = a.ins[c - 1], b.outs[x - 1]
        if ca[n] != cb[o]:
            raise GraphError("segment colours differ")
        new_edges.add((o, n))
    cs, bs = set(cseg), set(bseg)
    outs = a.outs + tuple(f for k, f in enumerate(b.outs, 1) if k not in bs)
    ins = b.ins + tuple(f for k, f in enumerate(a.ins, 1) if k not in cs)
    _check_pp(pp, len(outs), len(ins))
    outs, ins = relist(pp, outs, ins)
    return Skeleton(tuple(sorted(a.profiles + b.profiles)), a.edges | b.edges | new_edges, outs, ins)


def hjoin(g1: WheeledGraph, g2: WheeledGraph, pp: PermPair) -> WheeledGraph:
    return from_skeleton(hjoin_sk(to_skeleton(g1), to_skeleton(g2), pp))


def contract(g: WheeledGraph, i: int, j: int, pp: PermPair) -> WheeledGraph:
    return from_skeleton(contract_sk(to_skeleton(g), i, j, pp))


def pjoin(g1: WheeledGraph, g2: WheeledGraph, cseg: Sequence[int], bseg: Sequence[int], pp: PermPair) -> WheeledGraph:
    if has_wheel(g1) or has_wheel(g2):
        raise GraphError("properadic join needs wheel-free arguments")
    return from_skeleton(pjoin_sk(to_skeleton(g1), to_skeleton(g2), cseg, bseg, pp))


# -- enumeration -----------------------------------------------------------


def _profiles(max_len: int, colours: int) -> list[tuple]:
    out = []
    for n in range(max_len + 1):
        out.extend(product(range(colours), repeat=n))
    return out


def _matchings(outs: list, ins: list, colour: dict) -> Iterator[list]:
    if not outs:
        yield []
        return
    o, rest = outs[0], outs[1:]
    yield from _matchings(rest, ins, colour)
    for k, n in enumerate(ins):
        if colour[n] == colour[o]:
            for m in _matchings(rest, ins[:k] + ins[k + 1:], colour):
                yield [(o, n)] + m


def enumerate_skeletons(
    n_vertices: int,
    max_in: int,
    max_out: int,
    colours: int = 1,
    wheel_free: bool = False,
    listings: str = "all",
) -> Iterator[Skeleton]:
    """Canonical skeletons with exactly n_vertices vertices.

    ``listings="all"`` yields every graph-level listing; ``"canonical"`` yields only
    the listing of open flags in flag order.
    """
    outs_choices = _profiles(max_out, colours)
    ins_choices = _profiles(max_in, colours)
    vertex_profiles = [BiProfile(o, i) for o in outs_choices for i in ins_choices]
    for profs in product(vertex_profiles, repeat=n_vertices):
        profiles = tuple((k, bp) for k, bp in enumerate(profs, 1))
        all_outs, all_ins, colour = [], [], {}
        for label, bp in profiles:
            o, i = corolla_flags(label, bp)
            all_outs += o
            all_ins += i
            colour.update(zip(o, bp.out))
            colour.update(zip(i, bp.inp))
        for m in _matchings(all_outs, all_ins, colour):
            if wheel_free:
                succ = {l: set() for l, _ in profiles}
                for o, n in m:
                    succ[o[0]].add(n[0])
                if _has_cycle(succ):
                    continue
            used = {x for e in m for x in e}
            open_outs = [x for x in all_outs if x not in used]
            open_ins = [x for x in all_ins if x not in used]
            edges = frozenset(m)
            if listings == "canonical":
                yield Skeleton(profiles, edges, tuple(open_outs), tuple(open_ins))
                continue
            for po in permutations(open_outs):
                for pi in permutations(open_ins):
                    yield Skeleton(profiles, edges, po, pi)


def enumerate_graphs(n_vertices, max_in, max_out, colours=1, wheel_free=False, listings="all") -> Iterator[WheeledGraph]:
    for sk in enumerate_skeletons(n_vertices, max_in, max_out, colours, wheel_free, listings):
        yield from_skeleton(sk)

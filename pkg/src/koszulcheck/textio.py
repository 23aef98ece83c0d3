"""Line-oriented text formats for graphs and tree monomials.

Graph files (vertex form)::

    colours: x y
    vertex 1: x,x | x          # outputs | inputs
    vertex 2: | x
    edge: 1.2 -> 2.1           # output 2 of vertex 1 feeds input 1 of vertex 2
    outputs: 1.1               # graph listing, optional
    inputs: 2.1 1.1

Graph files (flag form, for generalised graphs with an exceptional cell)::

    cell v1: i1 i2 e1
    exceptional: f1 f2
    iota: e1 e2
    pi: f1 f2
    colour x: i1 i2 e1 e2 f1 f2
    in: i1 i2 e2 f1
    listing v1: i1 i2 | e1
    listing graph: i1 i2 | o1

Tree files hold vertex lines plus ``tree: <monomial>`` where a monomial is
``L<k>``, ``hcomp[s|t](A,B)``, ``contract[i:j;s|t](A)`` or
``pjoin[c1,c2:b1,b2;s|t](A,B)`` (also ``pjoin_op``); the ``s|t`` pair is
omitted when it is the identity. Comments start with ``#``.
"""
from __future__ import annotations

import re
from typing import Iterator

from .graphs import GRAPH, IN, OUT, GraphError, Skeleton, WheeledGraph, from_skeleton, to_skeleton
from .profiles import BiProfile, PermPair, Permutation
from .props import pjoin_gen
from .trees import Leaf, Node, Tree
from .wheeled import contract_gen, hcomp_gen


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


class Colours:
    """Colour names at the file boundary; ids are dense from 0."""

    def __init__(self, names=()):
        self.names: list[str] = []
        for n in names:
            self.intern(n)

    def intern(self, name: str) -> int:
        if name not in self.names:
            if not re.fullmatch(r"[A-Za-z_][\w']*", name):
                raise ParseError(f"bad colour name {name!r}")
            self.names.append(name)
        return self.names.index(name)

    def name(self, cid: int) -> str:
        while cid >= len(self.names):
            self.names.append(_default_name(len(self.names)))
        return self.names[cid]

    def line(self) -> str:
        return "colours: " + " ".join(self.names)


def _default_name(k: int) -> str:
    return "xyzuvw"[k] if k < 6 else f"c{k}"


def _lines(text: str) -> Iterator[tuple[int, str]]:
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line


def _split_key(line: str, no: int) -> tuple[str, str]:
    if ":" not in line:
        raise ParseError(f"expected 'key: value', got {line!r}", no)
    key, _, value = line.partition(":")
    return key.strip(), value.strip()


def _tokens(s: str) -> list[str]:
    return [t for t in re.split(r"[,\s]+", s.strip()) if t]


def _profile(s: str, colours: Colours) -> tuple:
    return tuple(colours.intern(t) for t in _tokens(s))


def _flag_ref(tok: str, direction: int, no: int) -> tuple:
    m = re.fullmatch(r"(\d+)\.(\d+)", tok)
    if not m:
        raise ParseError(f"expected vertex.position, got {tok!r}", no)
    return (int(m.group(1)), direction, int(m.group(2)))


# -- graphs -----------------------------------------------------------------


def parse_vertices(text: str, colours: Colours) -> dict:
    """The ``vertex`` lines of a file as {label: BiProfile}."""
    out = {}
    for no, line in _lines(text):
        key, value = _split_key(line, no)
        if key.startswith("vertex "):
            label = _int(key.split()[1], no)
            if "|" not in value:
                raise ParseError("a vertex needs 'outputs | inputs'", no)
            o, _, i = value.partition("|")
            if label in out:
                raise ParseError(f"vertex {label} declared twice", no)
            out[label] = BiProfile(_profile(o, colours), _profile(i, colours))
    return out


def _int(tok: str, no: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected an integer, got {tok!r}", no) from None


def parse_graph(text: str, colours: Colours | None = None) -> WheeledGraph:
    colours = colours if colours is not None else Colours()
    keys = [_split_key(l, no)[0].split()[0] for no, l in _lines(text)]
    if "cell" in keys or "exceptional" in keys:
        return _parse_flag_graph(text, colours)
    for no, line in _lines(text):
        key, value = _split_key(line, no)
        if key == "colours":
            for t in _tokens(value):
                colours.intern(t)
    verts = parse_vertices(text, colours)
    if not verts:
        raise ParseError("a graph needs at least one vertex")
    if sorted(verts) != list(range(1, len(verts) + 1)):
        raise ParseError("vertex labels must be 1..n")
    edges, outs, ins = set(), None, None
    for no, line in _lines(text):
        key, value = _split_key(line, no)
        if key == "edge":
            m = re.fullmatch(r"(\d+\.\d+)\s*->\s*(\d+\.\d+)", value)
            if not m:
                raise ParseError(f"expected 'edge: v.i -> w.j', got {line!r}", no)
            edges.add((_flag_ref(m.group(1), OUT, no), _flag_ref(m.group(2), IN, no)))
        elif key == "outputs":
            outs = tuple(_flag_ref(t, OUT, no) for t in _tokens(value))
        elif key == "inputs":
            ins = tuple(_flag_ref(t, IN, no) for t in _tokens(value))
        elif key not in ("colours",) and not key.startswith("vertex "):
            raise ParseError(f"unknown key {key!r}", no)
    profiles = tuple(sorted(verts.items()))
    all_outs = [(l, OUT, k) for l, bp in profiles for k in range(1, len(bp.out) + 1)]
    all_ins = [(l, IN, k) for l, bp in profiles for k in range(1, len(bp.inp) + 1)]
    used = [x for e in edges for x in e]
    for x in used:
        if x not in all_outs and x not in all_ins:
            raise GraphError(f"edge names a missing flag {x[0]}.{x[2]}")
    if len(set(used)) != len(used):
        raise GraphError("a flag is used by two edges")
    for o, i in edges:
        if verts[o[0]].out[o[2] - 1] != verts[i[0]].inp[i[2] - 1]:
            raise GraphError(f"edge {o[0]}.{o[2]} -> {i[0]}.{i[2]} joins different colours")
    open_outs = tuple(x for x in all_outs if x not in used)
    open_ins = tuple(x for x in all_ins if x not in used)
    if outs is None:
        outs = open_outs
    if ins is None:
        ins = open_ins
    if sorted(outs) != sorted(open_outs) or sorted(ins) != sorted(open_ins):
        raise GraphError("the graph listing must name each open flag once")
    return from_skeleton(Skeleton(profiles, frozenset(edges), outs, ins))


def _parse_flag_graph(text: str, colours: Colours) -> WheeledGraph:
    cells, exceptional, iota, pi, kappa, ins, listing, labels = {}, [], {}, {}, {}, set(), {}, {}
    for no, line in _lines(text):
        key, value = _split_key(line, no)
        words = key.split()
        if words[0] == "cell":
            cells[words[1]] = _tokens(value)
        elif key == "exceptional":
            exceptional = _tokens(value)
        elif key in ("iota", "pi"):
            target = iota if key == "iota" else pi
            for pair in value.split(";"):
                ts = _tokens(pair)
                if not ts:
                    continue
                if len(ts) != 2:
                    raise ParseError(f"{key} pairs need two flags", no)
                a, b = ts
                target[a], target[b] = b, a
        elif words[0] == "colour":
            c = colours.intern(words[1])
            for f in _tokens(value):
                kappa[f] = c
        elif key == "colours":
            for t in _tokens(value):
                colours.intern(t)
        elif key == "in":
            ins |= set(_tokens(value))
        elif words[0] == "listing":
            i, _, o = value.partition("|")
            u = GRAPH if words[1] == "graph" else words[1]
            listing[u] = (tuple(_tokens(i)), tuple(_tokens(o)))
        elif words[0] == "label":
            labels[words[1]] = _int(value, no)
        else:
            raise ParseError(f"unknown key {key!r}", no)
    flags = [f for fs in cells.values() for f in fs] + exceptional
    if len(set(flags)) != len(flags):
        raise GraphError("cells must partition the flags")
    delta = {f: (IN if f in ins else OUT) for f in flags}
    for f in flags:
        kappa.setdefault(f, colours.intern(colours.names[0]) if colours.names else colours.intern("x"))
    for u in list(cells) + [GRAPH]:
        listing.setdefault(u, ((), ()))
    return WheeledGraph(cells, exceptional, iota, pi, kappa, delta, listing, labels or None)


def format_graph(g: WheeledGraph, colours: Colours | None = None) -> str:
    colours = colours or Colours()
    if not g.is_canonical():
        return _format_flag_graph(g, colours)
    sk = to_skeleton(g)
    used = sorted({c for _, bp in sk.profiles for c in bp.out + bp.inp})
    for c in used:
        colours.name(c)
    lines = [colours.line()] if colours.names else []
    for label, bp in sk.profiles:
        o = ",".join(colours.name(c) for c in bp.out)
        i = ",".join(colours.name(c) for c in bp.inp)
        lines.append(f"vertex {label}: " + f"{o} | {i}".strip())
    for o, i in sorted(sk.edges):
        lines.append(f"edge: {o[0]}.{o[2]} -> {i[0]}.{i[2]}")
    lines.append("outputs: " + " ".join(f"{f[0]}.{f[2]}" for f in sk.outs))
    lines.append("inputs: " + " ".join(f"{f[0]}.{f[2]}" for f in sk.ins))
    return "\n".join(l.rstrip() for l in lines) + "\n"


def _format_flag_graph(g: WheeledGraph, colours: Colours) -> str:
    lines = []
    for c in sorted(set(g.kappa.values())):
        colours.name(c)
    if colours.names:
        lines.append(colours.line())
    for v, fs in g.cells.items():
        lines.append(f"cell {v}: " + " ".join(map(str, sorted(fs, key=str))))
    if g.exceptional:
        lines.append("exceptional: " + " ".join(map(str, sorted(g.exceptional, key=str))))
    for key, inv in (("iota", g.iota), ("pi", g.pi)):
        pairs = sorted({tuple(sorted((str(a), str(b)))) for a, b in inv.items() if a != b})
        if pairs:
            lines.append(f"{key}: " + "; ".join(f"{a} {b}" for a, b in pairs))
    for c in sorted(set(g.kappa.values())):
        lines.append(f"colour {colours.name(c)}: " + " ".join(sorted(str(f) for f, k in g.kappa.items() if k == c)))
    lines.append("in: " + " ".join(sorted(str(f) for f, d in g.delta.items() if d == IN)))
    for u, (i, o) in g.listing.items():
        name = "graph" if u is GRAPH else u
        lines.append(f"listing {name}: " + f"{' '.join(map(str, i))} | {' '.join(map(str, o))}".strip())
    if g.labels:
        for v, lab in g.labels.items():
            lines.append(f"label {v}: {lab}")
    return "\n".join(l.rstrip() for l in lines) + "\n"


def graph_skeleton(text: str, colours: Colours | None = None) -> Skeleton:
    g = parse_graph(text, colours)
    if g.exceptional:
        raise GraphError("graphs with exceptional cells have no formation")
    return to_skeleton(g)


# -- tree monomials ------------------------------------------------------------------


def format_pp(pp: PermPair) -> str:
    return f"{pp.sigma}|{pp.tau}"


def parse_pp(s: str) -> PermPair:
    if "|" not in s:
        raise ParseError(f"expected 'sigma|tau', got {s!r}")
    a, _, b = s.partition("|")
    try:
        return PermPair(Permutation.parse(a), Permutation.parse(b))
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def format_tree(t: Tree) -> str:
    if isinstance(t, Leaf):
        return f"L{t.label}"
    g = t.gen
    deco = []
    if g.name == "contract":
        deco.append(f"{g.params[0]}:{g.params[1]}")
    elif g.name in ("pjoin", "pjoin_op"):
        cseg, bseg = g.params
        deco.append(",".join(map(str, cseg)) + ":" + ",".join(map(str, bseg)))
    if g.pp is not None and not g.pp.is_identity():
        deco.append(format_pp(g.pp))
    head = g.name + (f"[{';'.join(deco)}]" if deco else "")
    return head + "(" + ",".join(format_tree(c) for c in t.children) + ")"


_TOKEN = re.compile(r"\s*(?:(L\d+)|([A-Za-z_]\w*)(\[[^\]]*\])?\s*\(|(,)|(\)))")


def parse_tree(text: str, leaves: dict) -> Tree:
    """A tree monomial over hcomp/contract/pjoin/pjoin_op with leaf profiles from leaves."""
    pos = 0
    text = text.strip()

    def expr() -> Tree:
        nonlocal pos
        m = _TOKEN.match(text, pos)
        if not m or m.group(4) or m.group(5):
            raise ParseError(f"expected a monomial at column {pos + 1} of {text!r}")
        pos = m.end()
        if m.group(1):
            label = int(m.group(1)[1:])
            if label not in leaves:
                raise ParseError(f"leaf {label} has no vertex declaration")
            return Leaf(label, leaves[label])
        name, deco = m.group(2), (m.group(3) or "[]")[1:-1]
        kids = [expr()]
        while True:
            m = _TOKEN.match(text, pos)
            if m and m.group(4):
                pos = m.end()
                kids.append(expr())
                continue
            if m and m.group(5):
                pos = m.end()
                break
            raise ParseError(f"expected ',' or ')' at column {pos + 1} of {text!r}")
        parts = [p.strip() for p in deco.split(";")] if deco.strip() else []
        pp = None
        if parts and "|" in parts[-1]:
            pp = parse_pp(parts.pop())
        if name == "hcomp":
            if parts or len(kids) != 2:
                raise ParseError("hcomp takes two children and an optional pair")
            return Node(hcomp_gen(kids[0].colour, kids[1].colour, pp), kids)
        if name == "contract":
            if len(parts) != 1 or len(kids) != 1:
                raise ParseError("contract needs [i:j] and one child")
            i, _, j = parts[0].partition(":")
            return Node(contract_gen(kids[0].colour, _int(i, None), _int(j, None), pp), kids)
        if name in ("pjoin", "pjoin_op"):
            if len(parts) != 1 or len(kids) != 2:
                raise ParseError(f"{name} needs [cseg:bseg] and two children")
            c, _, b = parts[0].partition(":")
            cseg = tuple(_int(x, None) for x in _tokens(c))
            bseg = tuple(_int(x, None) for x in _tokens(b))
            gen = pjoin_gen(kids[0].colour, kids[1].colour, cseg, bseg, pp, swapped=name == "pjoin_op")
            return Node(gen, kids)
        raise ParseError(f"unknown generator {name!r}")

    t = expr()
    if text[pos:].strip():
        raise ParseError(f"trailing text {text[pos:]!r}")
    return t


def parse_tree_list(text: str, colours: Colours | None = None) -> list[Tree]:
    """Every ``tree:`` line of a file, over the file's vertex declarations."""
    colours = colours if colours is not None else Colours()
    tree_lines = []
    for no, line in _lines(text):
        key, value = _split_key(line, no)
        if key == "colours":
            for t in _tokens(value):
                colours.intern(t)
        elif key == "tree":
            tree_lines.append((no, value))
        elif not key.startswith("vertex "):
            raise ParseError(f"unknown key {key!r}", no)
    if not tree_lines:
        raise ParseError("no 'tree:' line")
    leaves = parse_vertices(text, colours)
    out = []
    for no, value in tree_lines:
        try:
            out.append(parse_tree(value, leaves))
        except ParseError as exc:
            raise ParseError(str(exc), no) from None
    return out


def parse_tree_file(text: str, colours: Colours | None = None) -> Tree:
    trees = parse_tree_list(text, colours)
    if len(trees) != 1:
        raise ParseError(f"expected one 'tree:' line, found {len(trees)}")
    return trees[0]


def format_tree_file(t: Tree | list, colours: Colours | None = None) -> str:
    colours = colours or Colours()
    trees = t if isinstance(t, list) else [t]
    leaves = sorted(trees[0].leaves(), key=lambda l: l.label)
    for l in leaves:
        for c in l.colour.out + l.colour.inp:
            colours.name(c)
    lines = [colours.line()] if colours.names else []
    for l in leaves:
        o = ",".join(colours.name(c) for c in l.colour.out)
        i = ",".join(colours.name(c) for c in l.colour.inp)
        lines.append(f"vertex {l.label}: " + f"{o} | {i}".strip())
    for x in trees:
        lines.append("tree: " + format_tree(x))
    return "\n".join(lines) + "\n"

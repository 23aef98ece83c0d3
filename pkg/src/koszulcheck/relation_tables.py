"""Schematic relation tables and their instantiation on concrete windows.

A schematic monomial names only the generator kinds and the leaf structure:
``h`` horizontal composition, ``x`` contraction, ``o`` properadic join with the
first argument on top, ``O`` the swapped join. A concrete window whose
schematic appears on the left of a table entry rewrites to the unique
realisation of the entry's right-hand schematic on the window's own graph.
"""
from __future__ import annotations

from typing import Callable, NamedTuple

from .orders import TreeOrder
from .rewriting import Rule, binomial_rule
from .semantics import build, evaluate, is_pushed_up, leaf_profiles, shape_of
from .trees import Leaf, Node, Tree


class TableEntry(NamedTuple):
    label: str
    lhs: str
    rhs: str


_KIND_LETTER = {"hcomp": "h", "contract": "x", "pjoin": "o", "pjoin_op": "O"}


def schematic(t: Tree) -> str:
    if isinstance(t, Leaf):
        return str(t.label)
    return _KIND_LETTER[t.gen.name] + "(" + ",".join(schematic(c) for c in t.children) + ")"


def parse_schematic(text: str):
    """Nested tuples: an int for a leaf, (letter, child, ...) otherwise."""
    text = text.replace(" ", "")
    pos = 0

    def expr():
        nonlocal pos
        if text[pos].isdigit():
            start = pos
            while pos < len(text) and text[pos].isdigit():
                pos += 1
            return int(text[start:pos])
        letter = text[pos]
        if letter not in "hxoO" or text[pos + 1] != "(":
            raise ValueError(f"bad schematic at {pos}: {text!r}")
        pos += 2
        kids = [expr()]
        while text[pos] == ",":
            pos += 1
            kids.append(expr())
        if text[pos] != ")":
            raise ValueError(f"bad schematic at {pos}: {text!r}")
        pos += 1
        return (letter, *kids)

    out = expr()
    if pos != len(text):
        raise ValueError(f"trailing input in schematic {text!r}")
    return out


def _vertices(s) -> frozenset:
    if isinstance(s, int):
        return frozenset((s,))
    out = frozenset()
    for c in s[1:]:
        out |= _vertices(c)
    return out


def realisations(s, edges: frozenset, wheeled: bool) -> list:
    """Shapes (as in the semantics module) realising schematic s with exactly the given edges.

    In wheeled mode horizontal joins may have edges across them, made by
    contractions higher up; in prop mode they must have none.
    """
    return [sh for sh, used in _realise(s, edges, wheeled) if used == edges]


def _realise(s, edges, wheeled):
    if isinstance(s, int):
        return [(("leaf", s), frozenset())]
    letter = s[0]
    if letter == "x":
        vs = _vertices(s[1])
        out = []
        for sh, used in _realise(s[1], edges, wheeled):
            for e in sorted(edges - used):
                if e[0][0] in vs and e[1][0] in vs:
                    out.append((("x", sh, e), used | {e}))
        return out
    a, b = s[1], s[2]
    va, vb = _vertices(a), _vertices(b)
    across = frozenset(e for e in edges if (e[0][0] in va and e[1][0] in vb) or (e[0][0] in vb and e[1][0] in va))
    out = []
    for sa, ua in _realise(a, edges, wheeled):
        for sb, ub in _realise(b, edges, wheeled):
            used = ua | ub
            if letter == "h":
                if wheeled or not across:
                    out.append((("h", sa, sb), used))
            elif letter in "oO":
                top, feeder, vt, vf = (sa, sb, va, vb) if letter == "o" else (sb, sa, vb, va)
                if not across or any(e[0][0] not in vf or e[1][0] not in vt for e in across):
                    continue
                out.append((("j", top, feeder, tuple(sorted(across))), used | across))
    return out


def make_table_family(
    table: list[TableEntry],
    order: TreeOrder,
    wheeled: bool,
    guards: dict[str, Callable[[Node], bool]] | None = None,
) -> Callable[[Node], Rule | None]:
    """A rule family rewriting each window found on a left-hand side of the table."""
    by_lhs: dict[str, list[TableEntry]] = {}
    for entry in table:
        by_lhs.setdefault(entry.lhs.replace(" ", ""), []).append(entry)
    parsed = {e.rhs: parse_schematic(e.rhs) for e in table}
    guards = guards or {}

    def family(local: Node) -> Rule | None:
        entries = by_lhs.get(schematic(local))
        if not entries:
            return None
        if not is_pushed_up(local):
            return None
        listing, edges = evaluate(local)
        own = shape_of(local)
        candidates = {}
        for e in entries:
            guard = guards.get(e.label)
            if guard is not None and not guard(local):
                continue
            for sh in realisations(parsed[e.rhs], edges, wheeled):
                if _same_shape(sh, own):
                    continue
                candidates.setdefault(_shape_key(sh), (sh, e.label))
        if not candidates:
            return None
        if len(candidates) > 1:
            labels = sorted(lab for _, lab in candidates.values())
            raise ValueError(f"ambiguous table entries {labels} for {local!r}")
        (sh, label), = candidates.values()
        rhs = build(sh, leaf_profiles(local), listing)
        return binomial_rule(local, rhs, order, name=f"table:{label}")

    return family


def _canon(sh):
    tag = sh[0]
    if tag == "leaf":
        return sh
    if tag == "x":
        return ("x", _canon(sh[1]), sh[2])
    if tag == "h":
        a, b = sorted((_canon(sh[1]), _canon(sh[2])), key=repr)
        return ("h", a, b)
    return ("j", _canon(sh[1]), _canon(sh[2]), tuple(sorted(sh[3])))


def _same_shape(a, b) -> bool:
    return _canon(a) == _canon(b)


def _shape_key(sh) -> str:
    return repr(_canon(sh))


# -- the tables ------------------------------------------------------------------

# Wheeled props: larger monomial on the left.
WHEELED_TABLE = [
    TableEntry("1", "h(1,h(2,3))", "h(h(1,2),3)"),
    TableEntry("2", "h(h(1,3),2)", "h(h(1,2),3)"),
    TableEntry("3", "h(x(1),2)", "x(h(1,2))"),
    TableEntry("4", "h(1,x(2))", "x(h(1,2))"),
    TableEntry("5,6", "x(x(1))", "x(x(1))"),
]


def _loops_reversed(local: Node) -> bool:
    """True when the inner contraction uses a smaller input index than the outer one."""
    inner = local.children[0]
    j_inner = inner.gen.params[1]
    j_outer = local.gen.params[1]
    if j_outer >= j_inner:
        j_outer += 1
    return j_inner < j_outer


WHEELED_GUARDS = {"5,6": _loops_reversed}


def _lines(label: str, smallest: str, *others: str) -> list[TableEntry]:
    return [TableEntry(label, o, smallest) for o in others]


# Props: each line "e1 <- e2, e3" with e1 the smallest; o = join, O = swapped join.
# In the L(312) and F(132) lines the middle term is the one forming the row's graph.
PROP_TABLE = (
    _lines("C(123)", "o(o(1,2),3)", "o(1,o(2,3))")
    + _lines("C(132)", "o(o(1,3),2)", "o(1,O(2,3))")
    + _lines("C(213)", "o(O(1,2),3)", "O(o(1,3),2)")
    + _lines("C(231)", "O(O(1,3),2)", "O(1,o(2,3))")
    + _lines("C(312)", "O(o(1,2),3)", "o(O(1,3),2)")
    + _lines("C(321)", "O(O(1,2),3)", "O(1,O(2,3))")
    + _lines("L(123),L(132)", "o(o(1,2),3)", "o(o(1,3),2)", "o(1,h(2,3))")
    + _lines("L(213),L(231)", "o(O(1,2),3)", "O(h(1,3),2)", "O(1,o(2,3))")
    + _lines("L(312),L(321)", "O(h(1,2),3)", "o(O(1,3),2)", "O(1,O(2,3))")
    + _lines("F(123),F(213)", "o(h(1,2),3)", "O(o(1,3),2)", "o(1,o(2,3))")
    + _lines("F(132),F(312)", "O(o(1,2),3)", "o(h(1,3),2)", "o(1,O(2,3))")
    + _lines("F(231),F(321)", "O(O(1,2),3)", "O(O(1,3),2)", "O(1,h(2,3))")
    + _lines("B(123)", "o(o(1,2),3)", "o(1,o(2,3))")
    + _lines("B(132)", "o(o(1,3),2)", "o(1,O(2,3))")
    + _lines("B(213)", "o(O(1,2),3)", "O(o(1,3),2)")
    + _lines("B(231)", "O(O(1,3),2)", "O(1,o(2,3))")
    + _lines("B(312)", "O(o(1,2),3)", "o(O(1,3),2)")
    + _lines("B(321)", "O(O(1,2),3)", "O(1,O(2,3))")
    + _lines("T(123)", "h(o(1,2),3)", "o(1,h(2,3))", "o(h(1,3),2)")
    + _lines("T(132)", "o(h(1,2),3)", "h(o(1,3),2)", "o(1,h(2,3))")
    + _lines("T(213)", "h(O(1,2),3)", "O(1,h(2,3))", "O(h(1,3),2)")
    + _lines("T(231)", "o(h(1,2),3)", "h(1,o(2,3))", "O(h(1,3),2)")
    + _lines("T(312)", "O(h(1,2),3)", "h(O(1,3),2)", "O(1,h(2,3))")
    + _lines("T(321)", "O(h(1,2),3)", "h(1,O(2,3))", "o(h(1,3),2)")
    + _lines("A", "h(h(1,2),3)", "h(h(1,3),2)", "h(1,h(2,3))")
)


def format_table(table) -> str:
    """One ``label: lhs -> rhs`` line per directed relation."""
    return "".join(f"{e.label}: {e.lhs} -> {e.rhs}\n" for e in table)


def parse_table(text: str) -> list[TableEntry]:
    out = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        label, _, rule = line.rpartition(": ")
        lhs, sep, rhs = rule.partition(" -> ")
        if not label or not sep:
            raise ValueError(f"expected 'label: lhs -> rhs', got {line!r}")
        parse_schematic(lhs)
        parse_schematic(rhs)
        out.append(TableEntry(label, lhs, rhs))
    return out

"""Admissible total orders on typed tree monomials.

An order is a key function: a < b iff key(a) < key(b). Keys are cached on
nodes, so each order carries a unique cache slot.
"""
from __future__ import annotations

from itertools import count
from typing import Callable, Sequence

from .profiles import biprofile_key
from .trees import Leaf, Node, Tree, leaf_labels, serial

_ids = count()


class TreeOrder:
    """A (pre)order on tree monomials given by a key function."""

    def __init__(self, name: str, keyfunc: Callable[[Tree], tuple]):
        self.name = name
        self._keyfunc = keyfunc
        self._slot = next(_ids)

    def key(self, t: Tree) -> tuple:
        if isinstance(t, Node):
            k = t.cache.get(self._slot)
            if k is None:
                k = t.cache[self._slot] = self._keyfunc(t)
            return k
        return self._keyfunc(t)

    def cmp(self, a: Tree, b: Tree) -> int:
        ka, kb = self.key(a), self.key(b)
        return (ka > kb) - (ka < kb)

    def lt(self, a: Tree, b: Tree) -> bool:
        return self.key(a) < self.key(b)

    def max(self, terms):
        return max(terms, key=self.key)

    def min(self, terms):
        return min(terms, key=self.key)

    def __repr__(self) -> str:
        return f"TreeOrder({self.name})"


def compose_orders(*orders: TreeOrder) -> TreeOrder:
    """Lexicographic composite: compare by the first order, break ties by the next."""
    return TreeOrder(" then ".join(o.name for o in orders), lambda t: tuple(o.key(t) for o in orders))


# -- tree features -------------------------------------------------------------


def leaf_paths(t: Tree) -> dict[int, tuple]:
    """For each leaf label, the generators met stepping from that leaf to the root."""
    if isinstance(t, Leaf):
        return {t.label: ()}
    got = t.cache.get("paths")
    if got is not None:
        return got
    out = {}
    for c in t.children:
        for lab, word in leaf_paths(c).items():
            out[lab] = word + (t.gen,)
    t.cache["paths"] = out
    return out


def generators_deepest_first(t: Tree) -> list:
    """Generators ordered by depth (deepest first), ties broken left to right."""
    found = []
    stack = [(t, 0)]
    pre = 0
    while stack:
        x, d = stack.pop()
        if isinstance(x, Node):
            found.append((-d, pre, x.gen))
            pre += 1
            for c in reversed(x.children):
                stack.append((c, d + 1))
    found.sort(key=lambda e: (e[0], e[1]))
    return [g for _, _, g in found]


def _pp_key(g) -> tuple:
    if g.pp is None:
        return ()
    return (tuple(g.pp.sigma), tuple(g.pp.tau))


def _colour_key(c) -> tuple:
    return biprofile_key(c) if hasattr(c, "inp") else (c,)


def arity_key(t: Tree) -> tuple:
    return (t.arity,)


def leaf_order_key(t: Tree) -> tuple:
    return leaf_labels(t)


def pp_word_key(t: Tree) -> tuple:
    return tuple(_pp_key(g) for g in generators_deepest_first(t))


def structural_key(t: Tree) -> tuple:
    return serial(t)


def _paths_by_label(t: Tree) -> list:
    paths = leaf_paths(t)
    return [paths[k] for k in sorted(paths)]


# -- wheeled props ---------------------------------------------------------------

_W_KIND = {"hcomp": 0, "contract": 1}


def w_generator_key(g) -> tuple:
    idx = (-g.params[1], -g.params[0]) if g.name == "contract" else ()
    return (
        _W_KIND[g.name],
        idx,
        _pp_key(g),
        tuple(_colour_key(c) for c in g.inputs),
        _colour_key(g.output),
    )


def w_path_key(t: Tree) -> tuple:
    return tuple((-len(w), tuple(_W_KIND[g.name] for g in w)) for w in _paths_by_label(t))


def w_full_path_key(t: Tree) -> tuple:
    return tuple(tuple(w_generator_key(g) for g in w) for w in _paths_by_label(t))


W_STEP1 = TreeOrder("arity", arity_key)
W_STEP2 = TreeOrder("wheeled path words", w_path_key)
W_STEP3 = TreeOrder("input permutation", leaf_order_key)
W_STEP4 = TreeOrder("permutation pairs", pp_word_key)
W_STEP5 = TreeOrder("wheeled full path words", w_full_path_key)
TIEBREAK = TreeOrder("structure", structural_key)

WHEELED_STEPS = (W_STEP1, W_STEP2, W_STEP3, W_STEP4, W_STEP5)
WHEELED_ORDER = compose_orders(*WHEELED_STEPS, TIEBREAK)


# -- props ------------------------------------------------------------------

_P_KIND = {"hcomp": 0, "pjoin": 1, "pjoin_op": 2}


def p_generator_key(g) -> tuple:
    return (
        _P_KIND[g.name],
        _pp_key(g),
        tuple(g.params),
        tuple(_colour_key(c) for c in g.inputs),
        _colour_key(g.output),
    )


def p_path_key(t: Tree) -> tuple:
    return tuple(-len(w) for w in _paths_by_label(t))


def p_full_path_key(t: Tree) -> tuple:
    return tuple(tuple(p_generator_key(g) for g in w) for w in _paths_by_label(t))


P_STEP1 = W_STEP1
P_STEP2 = TreeOrder("path degrees", p_path_key)
P_STEP3 = W_STEP3
P_STEP4 = W_STEP4
P_STEP5 = TreeOrder("prop full path words", p_full_path_key)

PROP_STEPS = (P_STEP1, P_STEP2, P_STEP3, P_STEP4, P_STEP5)
PROP_ORDER = compose_orders(*PROP_STEPS, TIEBREAK)


def deciding_step(steps: Sequence[TreeOrder], a: Tree, b: Tree) -> int | None:
    """1-based index of the first step separating a and b, or None."""
    for k, o in enumerate(steps, 1):
        if o.cmp(a, b):
            return k
    return None


def cmp_wheeled(a: Tree, b: Tree) -> int:
    return WHEELED_ORDER.cmp(a, b)


def cmp_prop(a: Tree, b: Tree) -> int:
    return PROP_ORDER.cmp(a, b)


# -- generic path-lexicographic orders -------------------------------------------


def path_lex_order(
    gen_key: Callable = lambda g: (g.name, g.params),
    longer_smaller: bool = False,
    root_first: bool = False,
    reverse_leaves: bool = False,
    name: str = "path-lex",
) -> TreeOrder:
    """Arity, then path words (degree then letters), then leaf permutation, then structure.

    ``longer_smaller`` flips the degree comparison of path words, ``root_first``
    reads words from the root down, ``reverse_leaves`` compares the leaf
    permutation in reverse lexicographic order.
    """
    sign = -1 if longer_smaller else 1

    def key(t: Tree) -> tuple:
        words = []
        for w in _paths_by_label(t):
            letters = tuple(gen_key(g) for g in w)
            if root_first:
                letters = letters[::-1]
            words.append((sign * len(w), letters))
        perm = leaf_labels(t)
        if reverse_leaves:
            perm = tuple(-x for x in perm)
        return (t.arity, tuple(words), perm, serial(t))

    return TreeOrder(name, key)

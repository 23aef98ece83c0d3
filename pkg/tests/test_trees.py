import random
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st
from randtrees import rand_leaves, rand_w_tree

from koszulcheck.trees import (
    Leaf,
    Node,
    TreeError,
    divides,
    positions,
    shuffle_compose,
    shuffle_permutations,
    subtree_at,
    substitute,
    validate,
    windows,
)
from koszulcheck.wheeled import hcomp, leaf


def _composable(seed):
    rng = random.Random(seed)
    b = rand_w_tree(rng, rand_leaves(rng, rng.randint(1, 3)))
    n = rng.randint(1, 3)
    i = rng.randint(1, n)
    leaves = rand_leaves(rng, n)
    leaves[i] = b.colour
    a = rand_w_tree(rng, leaves)
    s = rng.choice(list(shuffle_permutations(n, b.arity, i)))
    return a, i, s, b


@pytest.mark.parametrize("n,m,i", [(1, 1, 1), (2, 3, 1), (3, 2, 2), (4, 3, 4)])
def test_shuffle_permutation_count(n, m, i):
    got = list(shuffle_permutations(n, m, i))
    assert len(got) == comb(n + m - 1 - i, m - 1)
    assert len(set(got)) == len(got)


@given(st.integers(0, 10**6))
def test_composites_are_shuffle_trees_containing_the_graft(seed):
    a, i, s, b = _composable(seed)
    t = shuffle_compose(a, i, s, b)
    assert validate(t) == []
    assert t.arity == a.arity + b.arity - 1
    if isinstance(b, Node):
        embs = divides(b, t)
        assert embs
        for e in embs:
            assert substitute(t, b, e, b) == t


def test_compose_rejects_a_non_shuffle():
    a = hcomp(leaf(1, (0,), ()), leaf(2, (0,), ()))
    b = hcomp(leaf(1, (0,), ()), leaf(2, (0,), ()))
    with pytest.raises(TreeError):
        shuffle_compose(a, 1, (1, 3, 2), b)


def test_compose_rejects_a_colour_mismatch():
    a = hcomp(leaf(1, (0,), ()), leaf(2, (0,), ()))
    with pytest.raises(TreeError):
        shuffle_compose(a, 1, (1, 2), leaf(1, (1,), ()))


def test_validate_flags_the_shuffle_condition():
    x, y = leaf(1, (0,), ()), leaf(2, (0,), ())
    bad = Node(hcomp(x, y).gen, [y, x])
    assert any("shuffle" in p for p in validate(bad))


@given(st.integers(0, 10**6))
def test_one_window_per_internal_edge(seed):
    rng = random.Random(seed)
    t = rand_w_tree(rng, rand_leaves(rng, rng.randint(1, 4)))
    edges = sum(1 for _, x in positions(t) for c in x.children if isinstance(c, Node))
    ws = list(windows(t))
    assert len(ws) == edges
    for path, k, local, e in ws:
        assert validate(local) == []
        assert subtree_at(t, path).gen == local.gen
        assert e in divides(local, t)


def test_leaf_equality_uses_label_and_colour():
    assert Leaf(1, 0) == Leaf(1, 0)
    assert Leaf(1, 0) != Leaf(1, 1)

import random

import pytest
from checks import admissibility, assoc_triple_maker, is_total_on, p_triple, w_triple
from conftest import fixture_text
from hypothesis import given
from hypothesis import strategies as st
from randtrees import rand_leaves, rand_p_tree, rand_w_tree

from koszulcheck.orders import (
    PROP_ORDER,
    PROP_STEPS,
    WHEELED_ORDER,
    WHEELED_STEPS,
    compose_orders,
    deciding_step,
    path_lex_order,
)
from koszulcheck.presentation import parse_presentation
from koszulcheck.props import formations_p, eval_p
from koszulcheck.semantics import orbit
from koszulcheck.textio import parse_tree_list
from koszulcheck.wheeled import eval_w, formations_w


def test_fixture_formations_ascend_with_the_expected_deciding_steps():
    ts = parse_tree_list(fixture_text("two_loops_ascending.tree"))
    assert [WHEELED_ORDER.cmp(a, b) for a, b in zip(ts, ts[1:])] == [-1, -1, -1]
    assert [deciding_step(WHEELED_STEPS, a, b) for a, b in zip(ts, ts[1:])] == [5, 4, 2]


def test_steps_refine_to_the_composite():
    ts = parse_tree_list(fixture_text("two_loops_ascending.tree"))
    full = compose_orders(*WHEELED_STEPS)
    assert sorted(ts, key=full.key) == ts
    assert deciding_step(WHEELED_STEPS, ts[0], ts[0]) is None


def test_orders_are_total_on_orbits_and_formations():
    rng = random.Random(3)
    for _ in range(40):
        small, big = rand_leaves(rng, 2), rand_leaves(rng, 3)
        assert is_total_on(WHEELED_ORDER, list(orbit(rand_w_tree(rng, small))))
        assert is_total_on(PROP_ORDER, list(orbit(rand_p_tree(rng, small))))
        assert is_total_on(WHEELED_ORDER, formations_w(eval_w(rand_w_tree(rng, big))))
        assert is_total_on(PROP_ORDER, formations_p(eval_p(rand_p_tree(rng, big))))


def test_prop_steps_are_five():
    assert len(PROP_STEPS) == len(WHEELED_STEPS) == 5


@given(st.integers(0, 2**32))
def test_wheeled_order_is_admissible(seed):
    _, bad = admissibility(WHEELED_ORDER, w_triple, 5, seed)
    assert bad == []


@given(st.integers(0, 2**32))
def test_prop_order_is_admissible(seed):
    _, bad = admissibility(PROP_ORDER, p_triple, 5, seed)
    assert bad == []


@pytest.mark.parametrize("flags", [{}, {"longer_smaller": True}, {"root_first": True, "reverse_leaves": True}])
def test_path_lex_variants_are_admissible(flags):
    pres = parse_presentation(fixture_text("associative.pres"))
    order = path_lex_order(**flags)
    compared, bad = admissibility(order, assoc_triple_maker(pres.generators), 500, seed=7)
    assert compared > 200
    assert bad == []

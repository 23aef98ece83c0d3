import random

import pytest
from conftest import fixture_text
from hypothesis import given
from hypothesis import strategies as st
from randtrees import rand_leaves, rand_p_tree, rand_w_tree

from koszulcheck.graphs import GraphError, enumerate_skeletons, from_skeleton, strict_iso
from koszulcheck.relation_tables import PROP_TABLE, WHEELED_TABLE, format_table, parse_table
from koszulcheck.textio import (
    Colours,
    ParseError,
    format_graph,
    format_tree_file,
    parse_graph,
    parse_tree_file,
    parse_tree_list,
)
from koszulcheck.trees import TreeError

GRAPHS = list(enumerate_skeletons(2, 2, 2, 2, False, "canonical"))[::7]


@given(st.sampled_from(GRAPHS))
def test_graph_round_trip(sk):
    g = from_skeleton(sk)
    text = format_graph(g)
    assert parse_graph(text) == g
    assert format_graph(parse_graph(text)) == text


def test_flag_form_round_trip():
    g = parse_graph(fixture_text("exceptional_flags.graph"))
    back = parse_graph(format_graph(g))
    assert strict_iso(g, back)


@pytest.mark.parametrize("name", ["push_up_pair.graph", "two_loops.graph", "double_join.graph", "four_vertices.graph", "prop_stuck.graph"])
def test_fixture_graphs_round_trip(name):
    c = Colours()
    g = parse_graph(fixture_text(name), c)
    assert parse_graph(format_graph(g, c), Colours()) == g


@given(st.integers(0, 10**6), st.booleans())
def test_tree_round_trip(seed, wheeled):
    rng = random.Random(seed)
    leaves = rand_leaves(rng, rng.randint(1, 4), colours=2)
    t = (rand_w_tree if wheeled else rand_p_tree)(rng, leaves)
    assert parse_tree_file(format_tree_file(t)) == t


def test_tree_lists_keep_order():
    ts = parse_tree_list(fixture_text("two_loops_ascending.tree"))
    assert len(ts) == 4
    assert parse_tree_list(format_tree_file(ts)) == ts
    with pytest.raises(ParseError):
        parse_tree_file(fixture_text("two_loops_ascending.tree"))


@pytest.mark.parametrize(
    "text",
    [
        "vertex 1: x | x\ntree: hcomp(L1\n",
        "vertex 1: x | x\ntree: frob(L1)\n",
        "vertex 1: x | x\ntree: L2\n",
        "vertex 1: x | x\nbogus: 1\ntree: L1\n",
        "colours: x\n",
        "vertex 1: x | x\ntree: contract[1](L1)\n",
    ],
)
def test_tree_parse_errors(text):
    with pytest.raises(ParseError):
        parse_tree_file(text)


def test_tree_typing_errors_are_not_parse_errors():
    with pytest.raises(TreeError):
        parse_tree_file("vertex 1: a | b\ntree: contract[1:1](L1)\n")


@pytest.mark.parametrize(
    "text,err",
    [
        ("vertex 1: x | x\nedge: 1.1 -> 1.2\n", GraphError),
        ("vertex 1: x | x\nedge 1.1 1.1\n", ParseError),
        ("vertex 2: x | x\n", ParseError),
        ("vertex 1: a | b\nedge: 1.1 -> 1.1\n", GraphError),
        ("vertex 1: x | x\noutputs: 1.1 1.1\n", GraphError),
    ],
)
def test_graph_errors(text, err):
    with pytest.raises(err):
        parse_graph(text)


def test_parse_errors_carry_line_numbers():
    with pytest.raises(ParseError) as e:
        parse_tree_file("vertex 1: x | x\n\ntree: hcomp(L1\n")
    assert e.value.line == 3


def test_relation_dumps_match_the_tables():
    assert parse_table(fixture_text("prop_relations.txt")) == list(PROP_TABLE)
    assert parse_table(fixture_text("wheeled_relations.txt")) == list(WHEELED_TABLE)
    assert parse_table(format_table(PROP_TABLE)) == list(PROP_TABLE)
    with pytest.raises(ValueError):
        parse_table("C: o(1,2)\n")

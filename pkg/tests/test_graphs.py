from itertools import product
from math import factorial

import pytest
from conftest import fixture_text

from koszulcheck.graphs import (
    GraphError,
    WheeledGraph,
    biprofile,
    classify,
    contract,
    corolla,
    enumerate_skeletons,
    from_skeleton,
    has_wheel,
    hjoin,
    pjoin,
    strict_iso,
    to_skeleton,
    validate,
    weak_iso,
)
from koszulcheck.profiles import BiProfile, PermPair, Permutation
from koszulcheck.textio import parse_graph

ONE = PermPair.identity


def test_exceptional_flags_classify():
    g = parse_graph(fixture_text("exceptional_flags.graph"))
    assert validate(g) == []
    counts = {k: len(v) for k, v in classify(g).items()}
    assert counts == {
        "internal_edges": 1,
        "exceptional_edges": 1,
        "exceptional_loops": 1,
        "ordinary_legs": 4,
        "exceptional_legs": 0,
    }
    assert has_wheel(g)
    assert biprofile(g) == BiProfile((0, 0, 0), (0, 0, 0))


def test_listing_separates_weak_from_strict_isomorphism():
    a = parse_graph(fixture_text("isomorphic_graphs_a.graph"))
    b = parse_graph(fixture_text("isomorphic_graphs_b.graph"))
    assert weak_iso(a, b) is not None
    assert not strict_iso(a, b)
    assert strict_iso(a, a)


def test_validate_catches_a_broken_involution():
    g = corolla(BiProfile((0,), (0,)))
    (o,) = [x for x in g.flags if g.delta[x] == -1]
    bad = WheeledGraph(g.cells, (), {**g.iota, o: (9, 9, 9)}, {}, g.kappa, g.delta, g.listing, g.labels)
    assert validate(bad)


def test_self_loop_is_a_wheel():
    g = contract(corolla(BiProfile((0,), (0,))), 1, 1, ONE(0, 0))
    assert has_wheel(g)
    assert biprofile(g) == BiProfile((), ())


def test_hjoin_shifts_labels_and_relists():
    a, b = corolla(BiProfile((0,), ())), corolla(BiProfile((1,), ()))
    g = hjoin(a, b, PermPair(Permutation.parse("21"), Permutation(())))
    sk = to_skeleton(g)
    assert [l for l, _ in sk.profiles] == [1, 2]
    assert biprofile(g) == BiProfile((1, 0), ())


def test_pjoin_rejects_wheels_and_bad_segments():
    loop = contract(corolla(BiProfile((0, 0), (0,))), 1, 1, ONE(1, 0))
    c = corolla(BiProfile((0,), (0,)))
    with pytest.raises(GraphError):
        pjoin(c, loop, (1,), (1,), ONE(1, 0))
    with pytest.raises(GraphError):
        pjoin(c, c, (1,), (2,), ONE(1, 1))
    g = pjoin(c, c, (1,), (1,), ONE(1, 1))
    assert not has_wheel(g) and len(to_skeleton(g).edges) == 1


def test_skeleton_round_trip():
    for sk in enumerate_skeletons(2, 1, 1, 1, False, "all"):
        assert to_skeleton(from_skeleton(sk)) == sk


# -- an independent count of the enumeration ---------------------------------


def _injections(outs, ins):
    """Partial injective matchings from outs to ins."""
    if not outs:
        yield []
        return
    first, rest = outs[0], outs[1:]
    yield from _injections(rest, ins)
    for k, i in enumerate(ins):
        for m in _injections(rest, ins[:k] + ins[k + 1 :]):
            yield [(first, i)] + m


def _cyclic(n, edges):
    succ = {v: {b for a, b in edges if a == v} for v in range(1, n + 1)}
    state = {}

    def dfs(v):
        state[v] = 1
        for w in succ[v]:
            if state.get(w) == 1 or (w not in state and dfs(w)):
                return True
        state[v] = 2
        return False

    return any(v not in state and dfs(v) for v in succ)


def brute_count(n, max_in, max_out, wheel_free, listings):
    total = 0
    for degs in product(product(range(max_out + 1), range(max_in + 1)), repeat=n):
        outs = [(v, k) for v, (o, _) in enumerate(degs, 1) for k in range(o)]
        ins = [(v, k) for v, (_, i) in enumerate(degs, 1) for k in range(i)]
        for m in _injections(outs, ins):
            if wheel_free and _cyclic(n, [(a[0], b[0]) for a, b in m]):
                continue
            free_o, free_i = len(outs) - len(m), len(ins) - len(m)
            total += factorial(free_o) * factorial(free_i) if listings == "all" else 1
    return total


@pytest.mark.parametrize("n,max_in,max_out", [(1, 2, 2), (2, 2, 2), (2, 1, 2), (3, 1, 1)])
@pytest.mark.parametrize("wheel_free", [False, True])
@pytest.mark.parametrize("listings", ["all", "canonical"])
def test_enumeration_matches_brute_count(n, max_in, max_out, wheel_free, listings):
    got = list(enumerate_skeletons(n, max_in, max_out, 1, wheel_free, listings))
    assert len(got) == len(set(got))
    assert len(got) == brute_count(n, max_in, max_out, wheel_free, listings)


def test_two_colours_only_match_equal_colours():
    for sk in enumerate_skeletons(2, 1, 1, 2, False, "canonical"):
        cols = {}
        for label, bp in sk.profiles:
            cols.update({(label, -1, k): c for k, c in enumerate(bp.out, 1)})
            cols.update({(label, 1, k): c for k, c in enumerate(bp.inp, 1)})
        assert all(cols[o] == cols[i] for o, i in sk.edges)

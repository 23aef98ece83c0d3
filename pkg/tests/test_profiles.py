from hypothesis import given
from hypothesis import strategies as st

from koszulcheck.profiles import (
    BiProfile,
    PermPair,
    Permutation,
    act_left,
    act_right,
    all_permutations,
    cmp_profile,
    compose,
    is_shuffle,
    relist,
    solve_relisting,
)


def perms(n):
    return st.permutations(range(1, n + 1)).map(Permutation)


def test_parse_forms():
    assert Permutation.parse("231") == (2, 3, 1)
    assert Permutation.parse("10,1,2,3,4,5,6,7,8,9")[0] == 10
    assert Permutation.parse("id") == ()


def test_rejects_non_permutations():
    import pytest

    with pytest.raises(ValueError):
        Permutation((1, 1))


def test_composition_is_function_composition():
    s, t = Permutation.parse("231"), Permutation.parse("213")
    assert all((s * t)(i) == s(t(i)) for i in range(1, 4))


def test_all_permutations_counts():
    assert len(list(all_permutations(4))) == 24


@given(st.integers(1, 6).flatmap(lambda n: st.tuples(perms(n), perms(n), perms(n))))
def test_composition_is_associative(sts):
    a, b, c = sts
    assert compose(compose(a, b), c) == compose(a, compose(b, c))


@given(st.integers(0, 6).flatmap(perms))
def test_inverse(s):
    assert (s * s.inverse()).is_identity()
    assert act_right(act_left(s, list("abcdef"[: len(s)])), s) == tuple("abcdef"[: len(s)])


@given(st.integers(0, 4).flatmap(lambda n: st.tuples(perms(n), perms(n), perms(n), perms(n))))
def test_then_is_relisting_twice(ps):
    p = PermPair(ps[0], ps[1])
    q = PermPair(ps[2], ps[3])
    n = len(ps[0])
    outs, ins = tuple(range(10, 10 + n)), tuple(range(20, 20 + n))
    once = relist(p, outs, ins)
    assert relist(q, *once) == relist(p.then(q), outs, ins)
    assert p.then(p.inverse()).is_identity()


@given(st.integers(0, 6).flatmap(perms))
def test_solve_relisting_inverts_action(s):
    before = tuple("abcdef"[: len(s)])
    assert solve_relisting(before, act_left(s, before)) == s


def test_is_shuffle():
    assert is_shuffle((1, 3, 2, 4), 2)
    assert not is_shuffle((3, 1, 2, 4), 2)


def test_profiles_compare_by_degree_then_letters():
    assert cmp_profile((5,), (0, 0)) == -1
    assert cmp_profile((0, 1), (0, 2)) == -1
    assert cmp_profile((1, 1), (1, 1)) == 0


def test_biprofile_prints_compactly():
    assert str(BiProfile((0, 1), (2,))) == "(0,1|2)"

"""The seven acceptance criteria, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py`` (lines appear in the terminal
summary) or directly with ``python tests/test_acceptance.py``.
"""
import random
import sys
import time
from functools import lru_cache
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from checks import admissibility, assoc_triple_maker, p_triple, w_triple  # noqa: E402
from conftest import fixture_text  # noqa: E402
from randtrees import rand_leaves, rand_p_tree, rand_w_tree  # noqa: E402

from koszulcheck.graphs import from_skeleton, has_wheel, strict_iso  # noqa: E402
from koszulcheck.groupoid import orbit as groupoid_orbit, quadratic_composites  # noqa: E402
from koszulcheck.orders import PROP_ORDER, WHEELED_ORDER, WHEELED_STEPS, deciding_step  # noqa: E402
from koszulcheck.presentation import parse_monomial, parse_presentation  # noqa: E402
from koszulcheck.profiles import PermPair, Permutation  # noqa: E402
from koszulcheck.props import eval_p, pjoin, prop_system, umf_prop  # noqa: E402
from koszulcheck.rewriting import (  # noqa: E402
    DescentError,
    Polynomial,
    buchberger_check,
    confluence_report,
    normal_form,
    s_polynomial,
    small_common_multiples,
)
from koszulcheck.semantics import push_up  # noqa: E402
from koszulcheck.textio import Colours, format_tree, parse_graph, parse_tree_file, parse_tree_list  # noqa: E402
from koszulcheck.verify import SuiteConfig, run_suite, suite_graphs, umf  # noqa: E402
from koszulcheck.wheeled import eval_w, umf_wheeled, wheeled_system  # noqa: E402

RESULTS: dict[int, str] = {}

PENTAGON = ["f(f(f(1,2),3),4)", "f(f(1,2),f(3,4))", "f(f(1,f(2,3)),4)", "f(1,f(f(2,3),4))", "f(1,f(2,f(3,4)))"]
W_SUITE = SuiteConfig(operad="w", max_vertices=2, max_in=2, max_out=2, colours=1, listings="all")
P_SUITE = SuiteConfig(operad="p", max_vertices=3, max_in=2, max_out=2, colours=1, listings="sample")


def record(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = line
    print(line)
    assert ok, line


@lru_cache(maxsize=None)
def w_suite():
    return run_suite(W_SUITE)


@lru_cache(maxsize=None)
def p_suite():
    return run_suite(P_SUITE)


def test_criterion_1_associative_presentation():
    start = time.perf_counter()
    pres = parse_presentation(fixture_text("associative.pres"))
    rs = pres.system()
    groebner = buchberger_check(rs).is_groebner
    comb = Polynomial.monomial(parse_monomial(PENTAGON[-1], pres))
    pentagon = all(normal_form(parse_monomial(m, pres), rs) == comb for m in PENTAGON)
    a1 = next(r for r in rs.rules if r.name == "a1")
    gamma = parse_monomial(PENTAGON[0], pres)
    spolys = [s_polynomial(g, a1, e1, a1, e2) for g, e1, e2 in small_common_multiples(a1, a1) if g == gamma]
    s_zero = bool(spolys) and all(normal_form(s, rs) == Polynomial() for s in spolys)
    took = time.perf_counter() - start
    ok = groebner and pentagon and s_zero and took < 1
    record(1, ok, f"groebner={groebner} pentagon->comb={pentagon} s-poly->0={s_zero} {took:.2f}s")


def test_criterion_2_groupoid_elimination():
    start = time.perf_counter()
    pres = parse_presentation(fixture_text("groupoid_elimination.pres"))
    sig = pres.signature()
    e2, rstar = pres.star_rules()
    sizes = {len(groupoid_orbit(q, pres.groupoid)) for q in quadratic_composites(sig)}
    took = time.perf_counter() - start
    ok = len(sig) == 8 and len(e2) == 48 and sizes == {2} and len(rstar) == 16 and took < 1
    record(2, ok, f"generators={len(sig)} E*2={len(e2)} orbit sizes={sorted(sizes)} R*={len(rstar)} {took:.2f}s")


def test_criterion_3_wheeled_suite():
    rep = w_suite()
    ok = rep.passed and rep.seconds <= 600
    record(
        3,
        ok,
        f"graphs={rep.graphs} formations={rep.formations} counterexamples={len(rep.counterexamples)} "
        f"naive oracle and confluence checked, {rep.seconds:.0f}s",
    )


def test_criterion_4_prop_suite():
    rep = p_suite()
    ok = rep.passed and rep.seconds <= 1800
    record(
        4,
        ok,
        f"graphs={rep.graphs} formations={rep.formations} counterexamples={len(rep.counterexamples)} "
        f"listings={P_SUITE.listings}, {rep.seconds:.0f}s",
    )


def _pp(s, t):
    return PermPair(Permutation.parse(s), Permutation.parse(t))


def test_criterion_5_bit_exact_fixtures():
    checks = {}
    raw, pushed = parse_tree_list(fixture_text("push_up_pair.tree"))
    checks["push_up"] = push_up(raw) == pushed and format_tree(push_up(raw)) == "contract[3:3;21|21](hcomp(L1,L2))"
    ts = parse_tree_list(fixture_text("two_loops_ascending.tree"))
    checks["deciding steps"] = [deciding_step(WHEELED_STEPS, a, b) for a, b in zip(ts, ts[1:])] == [5, 4, 2] and all(
        WHEELED_ORDER.lt(a, b) for a, b in zip(ts, ts[1:])
    )
    u = umf_wheeled(parse_graph(fixture_text("two_loops.graph")))
    checks["two-loop umf"] = u == parse_tree_file(fixture_text("two_loops_umf.tree")) and format_tree(u) == (
        "contract[3:3;21|21](contract[4:4](hcomp(L1,L2)))"
    )
    v = umf_prop(parse_graph(fixture_text("four_vertices.graph")))
    checks["four-vertex umf"] = v == parse_tree_file(fixture_text("four_vertices_umf.tree")) and format_tree(v) == (
        "hcomp(pjoin[1:1](pjoin[1:1](L1,L3),L2),L4)"
    )
    c = Colours(["a1", "b1", "b2", "b3", "c2", "d1"])
    from koszulcheck.wheeled import leaf

    j = pjoin(leaf(1, (5,), (3, 4, 2)), leaf(2, (1, 2, 3), (0,)), (1, 3), (3, 2), _pp("21", "12"))
    checks["join"] = (
        format_tree(j) == "pjoin[1,3:3,2;21|12](L1,L2)"
        and j == parse_tree_file(fixture_text("double_join.tree"), c)
        and strict_iso(eval_p(j), parse_graph(fixture_text("double_join.graph"), c))
    )
    bad = [k for k, ok in checks.items() if not ok]
    record(5, not bad, "all fixtures match" if not bad else f"mismatched: {', '.join(bad)}")


def _seeded_properties(count: int) -> dict:
    w_rs, p_rs = wheeled_system(), prop_system()
    rng = random.Random(11)
    ok = dict.fromkeys(["idempotent", "strategy-free", "descent", "wheel-free", "round-trip"], True)
    for _ in range(count):
        n = rng.randint(1, 3)
        leaves = rand_leaves(rng, n)
        cases = [(rand_p_tree(rng, leaves), p_rs, PROP_ORDER, eval_p, umf_prop)]
        if n <= 2:
            cases.append((rand_w_tree(rng, leaves), w_rs, WHEELED_ORDER, eval_w, umf_wheeled))
        for t, rs, order, ev, find_umf in cases:
            try:
                steps = []
                a = normal_form(t, rs, "first", trace=steps)
                b = normal_form(t, rs, "last")
            except DescentError:
                ok["descent"] = False
                continue
            ok["strategy-free"] &= a == b
            ok["idempotent"] &= normal_form(a, rs) == a
            ok["descent"] &= all(order.lt(y.term, x.term) for x, y in zip(steps, steps[1:]))
            g = ev(t)
            u = find_umf(g)
            ok["round-trip"] &= strict_iso(ev(u), g) and list(a) == [u]
            if ev is eval_p:
                ok["wheel-free"] &= not has_wheel(g)
    return ok


def _round_trip_everywhere() -> bool:
    """eval(UMF(g)) is strictly isomorphic to g on every graph of both suite universes."""
    for cfg, ev in ((W_SUITE, eval_w), (P_SUITE, eval_p)):
        for sk in suite_graphs(cfg):
            g = from_skeleton(sk)
            if not strict_iso(ev(umf(sk, cfg.operad)), g):
                return False
    return True


def test_criterion_6_properties():
    pres = parse_presentation(fixture_text("associative.pres"))
    adm = {}
    for name, order, triple in (
        ("wheeled", WHEELED_ORDER, w_triple),
        ("prop", PROP_ORDER, p_triple),
        ("path-lex", pres.order(), assoc_triple_maker(pres.generators)),
    ):
        compared, bad = admissibility(order, triple, 10_000, seed=2024)
        adm[name] = (compared, len(bad))
    props = _seeded_properties(400)
    props["round-trip"] &= _round_trip_everywhere()
    ok = all(b == 0 for _, b in adm.values()) and all(props.values())
    adm_text = " ".join(f"{k}:{c} comparisons/{b} violations" for k, (c, b) in adm.items())
    failing = [k for k, v in props.items() if not v]
    record(6, ok, f"admissibility on 10000 triples per order, {adm_text}; " + ("properties hold" if not failing else f"failing: {failing}"))


def test_criterion_7_verdicts_agree():
    verdicts = {}
    for name in ("associative.pres", "groupoid_elimination.pres"):
        pres = parse_presentation(fixture_text(name))
        rs = pres.system()
        verdicts[name] = (buchberger_check(rs).is_groebner, confluence_report(pres.monomials(3), rs).confluent)
    for name, rep in (("wheeled suite", w_suite()), ("prop suite", p_suite())):
        verdicts[name] = (rep.buchberger, rep.confluent)
    ok = all(b == c for b, c in verdicts.values())
    detail = " ".join(f"{k}={'yes' if b else 'no'}/{'yes' if c else 'no'}" for k, (b, c) in verdicts.items())
    record(7, ok, f"buchberger/confluence {detail}")


if __name__ == "__main__":
    failures = 0
    for name, fn in sorted((k, v) for k, v in globals().items() if k.startswith("test_criterion_")):
        try:
            fn()
        except AssertionError:
            failures += 1
    sys.exit(1 if failures else 0)

import pytest

from koszulcheck.graphs import Skeleton
from koszulcheck.profiles import BiProfile
from koszulcheck.props import prop_system
from koszulcheck.relation_tables import PROP_TABLE, WHEELED_TABLE
from koszulcheck.verify import (
    BUDGET_ENV,
    BudgetError,
    SuiteConfig,
    check_graph,
    estimate,
    run_suite,
    suite_graphs,
)
from koszulcheck.wheeled import wheeled_system

X = BiProfile((0,), (0,))

CHAIN = Skeleton(
    ((1, X), (2, X), (3, X)),
    frozenset({((2, -1, 1), (1, 1, 1)), ((3, -1, 1), (2, 1, 1))}),
    ((1, -1, 1),),
    ((3, 1, 1),),
)

PAIR = Skeleton(((1, X), (2, X)), frozenset(), ((1, -1, 1), (2, -1, 1)), ((1, 1, 1), (2, 1, 1)))


def test_single_vertex_suite_passes():
    rep = run_suite(SuiteConfig(operad="w", max_vertices=1))
    assert rep.passed and rep.verdicts_agree
    assert rep.graphs == 20


def test_kernel_and_table_agree_on_small_suites():
    for operad in ("w", "p"):
        cfg = SuiteConfig(operad=operad, max_vertices=3 if operad == "p" else 2, max_in=1, max_out=1, listings="canonical")
        table = run_suite(cfg)
        kernel = run_suite(cfg, rs=wheeled_system(use_kernel=True) if operad == "w" else prop_system(use_kernel=True))
        assert table.passed and kernel.passed
        assert table.formations == kernel.formations


def test_parallel_and_serial_runs_agree():
    cfg = SuiteConfig(operad="w", max_vertices=2, max_in=1, max_out=1)
    one = run_suite(cfg)
    two = run_suite(SuiteConfig(**{**cfg.__dict__, "jobs": 2}))
    assert one.to_dict() == {**two.to_dict(), "config": one.to_dict()["config"]}


def test_dropping_a_caterpillar_line_leaves_a_stuck_formation():
    assert check_graph(CHAIN, "p", prop_system(), naive_oracle=True, confluence=True).ok
    # the B(123) line repeats C(123), so both go
    mutant = prop_system(table=[e for e in PROP_TABLE if e.label not in ("C(123)", "B(123)")])
    rep = check_graph(CHAIN, "p", mutant)
    assert not rep.rewritable
    assert any("stuck formation" in p for p in rep.problems)


def test_dropping_a_wheeled_line_fails_the_suite():
    mutant = wheeled_system(table=[e for e in WHEELED_TABLE if e.label != "4"])
    looped = PAIR._replace(edges=frozenset({((2, -1, 1), (2, 1, 1))}), outs=((1, -1, 1),), ins=((1, 1, 1),))
    assert check_graph(looped, "w", wheeled_system()).ok
    rep = check_graph(looped, "w", mutant)
    assert not rep.ok
    cfg = SuiteConfig(operad="w", max_vertices=2, max_in=1, max_out=1, listings="canonical")
    assert not run_suite(cfg, rs=mutant).passed


def test_budget_refusal(monkeypatch):
    with pytest.raises(BudgetError):
        run_suite(SuiteConfig(operad="w", max_vertices=2, budget=10))
    monkeypatch.setenv(BUDGET_ENV, "5")
    with pytest.raises(BudgetError) as err:
        run_suite(SuiteConfig(operad="p", max_vertices=2))
    assert err.value.budget == 5


def test_estimate_bounds_the_formation_count():
    cfg = SuiteConfig(operad="w", max_vertices=2, max_in=1, max_out=1, listings="canonical")
    rep = run_suite(cfg)
    assert rep.estimate >= rep.formations
    assert estimate({(3, 0): 1}, "p") == 3


def test_sampled_listings_are_seeded():
    cfg = SuiteConfig(operad="p", max_vertices=2, max_in=1, max_out=1, listings="sample", seed=4)
    a, b = suite_graphs(cfg), suite_graphs(cfg)
    assert a == b
    canon = suite_graphs(SuiteConfig(operad="p", max_vertices=2, max_in=1, max_out=1, listings="canonical"))
    assert set(canon) <= set(a) and len(a) > len(canon)


def test_report_serialises():
    rep = run_suite(SuiteConfig(operad="p", max_vertices=2, max_in=1, max_out=1, listings="canonical"))
    d = rep.to_dict()
    assert d["passed"] and d["verdicts_agree"]
    assert "seconds" not in d
    assert "PASS" in rep.summary()

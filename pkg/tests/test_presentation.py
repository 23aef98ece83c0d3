import pytest
from conftest import fixture_text

from koszulcheck.presentation import (
    format_monomial,
    format_polynomial,
    format_presentation,
    parse_monomial,
    parse_polynomial,
    parse_presentation,
)
from koszulcheck.rewriting import confluence_report, buchberger_check
from koszulcheck.textio import ParseError


@pytest.mark.parametrize("name", ["associative.pres", "groupoid_elimination.pres"])
def test_presentation_round_trip(name):
    p = parse_presentation(fixture_text(name))
    q = parse_presentation(format_presentation(p))
    assert q == p
    assert format_presentation(q) == format_presentation(p)


def test_monomial_round_trip():
    p = parse_presentation(fixture_text("groupoid_elimination.pres"))
    for t in p.monomials(2):
        assert parse_monomial(format_monomial(t, grouped=True), p) == t


def test_polynomial_round_trip():
    p = parse_presentation(fixture_text("associative.pres"))
    f = parse_polynomial("2*f(1,f(2,3)) - 1/3*h(h(1,2),3) + f(f(1,2),3)", p)
    assert parse_polynomial(format_polynomial(f, p.order()), p) == f
    assert f[parse_monomial("h(h(1,2),3)", p)] == pytest.approx(-1 / 3)


def test_monomials_by_weight():
    p = parse_presentation(fixture_text("associative.pres"))
    monos = p.monomials(3)
    assert len(monos) == len(set(monos)) == 134
    assert sum(1 for t in monos if t.arity == 2) == 2


@pytest.mark.parametrize(
    "text",
    [
        "colours: x\ngenerator f: x <- x x\nrelation r: f(1,2) - f(1\n",
        "colours: x\ngenerator f: x <- x x\nrelation r: g(1,2)\n",
        "colours: x\ngenerator f: x <- x x\norder: sideways\n",
        "colours: x\ngenerator f: x <- x x\nrelation r: f(1,2) - f(f(1,2),3)\n",
        "colours: x\ngenerator f: x <- y\n",
        "wibble\n",
    ],
)
def test_presentation_errors(text):
    with pytest.raises(ParseError):
        parse_presentation(text)


def test_both_fixture_presentations_confluent_up_to_weight_three():
    for name in ("associative.pres", "groupoid_elimination.pres"):
        p = parse_presentation(fixture_text(name))
        rs = p.system()
        assert buchberger_check(rs).is_groebner
        assert confluence_report(p.monomials(3), rs).confluent

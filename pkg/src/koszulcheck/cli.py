"""Command line front end.

Exit codes: 0 pass, 1 counterexample or failed check, 2 parse error,
3 validation error, 4 budget refusal.
"""
from __future__ import annotations

import json
import logging
import os
import sys
import tempfile
from functools import wraps
from pathlib import Path

import click
import yaml

from .graphs import GraphError, from_skeleton, has_wheel
from .groupoid import GroupoidError, orbit as groupoid_orbit
from .presentation import (
    Presentation,
    format_monomial,
    format_polynomial,
    format_rule,
    parse_monomial,
    parse_polynomial,
    parse_presentation,
)
from .props import eval_p
from .rewriting import (
    Polynomial,
    RewriteError,
    buchberger_check,
    confluence_report,
    normal_form,
)
from .semantics import orbit as formation_orbit, push_up
from .textio import Colours, ParseError, format_graph, format_tree, format_tree_file, graph_skeleton, parse_tree_list
from .trees import Node, Tree, TreeError
from .verify import (
    BUDGET_ENV,
    BudgetError,
    SuiteConfig,
    default_system,
    enumerate_formations,
    naive_formations,
    run_suite,
    umf,
)
from .wheeled import eval_w

EXIT_PASS, EXIT_FAIL, EXIT_PARSE, EXIT_INVALID, EXIT_BUDGET = 0, 1, 2, 3, 4

log = logging.getLogger("koszulcheck")


def _guard(fn):
    """Map library errors onto the exit code contract."""

    @wraps(fn)
    def run(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ParseError as exc:
            click.echo(f"parse error: {exc}", err=True)
            sys.exit(EXIT_PARSE)
        except BudgetError as exc:
            click.echo(f"budget: {exc}", err=True)
            sys.exit(EXIT_BUDGET)
        except (GraphError, GroupoidError, TreeError, RewriteError, ValueError) as exc:
            click.echo(f"invalid input: {exc}", err=True)
            sys.exit(EXIT_INVALID)

    return run


def write_atomic(path: str, text: str) -> None:
    """Write via a temporary file in the same directory, then rename over path."""
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dump_report(data: dict, path: str) -> None:
    if path.endswith((".yaml", ".yml")):
        text = yaml.safe_dump(data, sort_keys=False)
    else:
        text = json.dumps(data, indent=2, default=str) + "\n"
    write_atomic(path, text)


def _read(path: str) -> str:
    return Path(path).read_text()


def _operad_of(t: Tree, default: str = "w") -> str:
    def kinds(x):
        if isinstance(x, Node):
            yield x.gen.name
            for c in x.children:
                yield from kinds(c)

    names = set(kinds(t))
    if names & {"pjoin", "pjoin_op"}:
        if "contract" in names:
            raise TreeError("a tree cannot mix contractions and joins")
        return "p"
    return "w" if "contract" in names else default


def _load_graph(path: str, operad: str):
    sk = graph_skeleton(_read(path))
    if operad == "p":
        if has_wheel(from_skeleton(sk)):
            raise GraphError("the graph has a wheel; props only form wheel-free graphs")
    return sk


def _show(t: Tree, pres: Presentation | None = None) -> str:
    if pres is not None:
        return format_monomial(t, pres.has_groupoid)
    return format_tree(t)


def _show_poly(f: Polynomial, order, pres: Presentation | None = None) -> str:
    if pres is not None:
        return format_polynomial(f, order, pres.has_groupoid)
    if not f:
        return "0"
    parts = []
    for t in f.sorted_terms(order):
        c = f[t]
        parts.append(("" if c == 1 else "-" if c == -1 else f"{c}*") + format_tree(t))
    return " + ".join(parts).replace("+ -", "- ")


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Log progress to stderr.")
def main(verbose: bool) -> None:
    """Rewriting checks for shuffle operad presentations of wheeled props and props."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="%(message)s")


operad_option = click.option("--operad", type=click.Choice(["w", "p"]), default="w", show_default=True, help="w: wheeled props, p: props.")


@main.command("umf")
@click.argument("graph", type=click.Path(exists=True, dir_okay=False))
@operad_option
@click.option("--tree-file", is_flag=True, help="Print a full tree file rather than the monomial.")
@_guard
def umf_cmd(graph: str, operad: str, tree_file: bool) -> None:
    """Print the least formation of GRAPH."""
    u = umf(_load_graph(graph, operad), operad)
    click.echo(format_tree_file(u) if tree_file else format_tree(u), nl=not tree_file)


@main.command("eval")
@click.argument("tree", type=click.Path(exists=True, dir_okay=False))
@_guard
def eval_cmd(tree: str) -> None:
    """Print the graph each tree of a tree file forms."""
    colours = Colours()
    for k, t in enumerate(parse_tree_list(_read(tree), colours)):
        g = eval_p(t) if _operad_of(t) == "p" else eval_w(t)
        if k:
            click.echo("")
        click.echo(format_graph(g, colours), nl=False)


@main.command("enumerate")
@click.argument("graph", type=click.Path(exists=True, dir_okay=False))
@operad_option
@click.option("--naive", is_flag=True, help="Use the generate-and-filter oracle instead.")
@_guard
def enumerate_cmd(graph: str, operad: str, naive: bool) -> None:
    """List every formation of GRAPH; the least one is marked with '*'."""
    sk = _load_graph(graph, operad)
    forms = naive_formations(sk, operad) if naive else enumerate_formations(sk, operad)
    u = umf(sk, operad)
    rs = default_system(operad)
    for t in sorted(forms, key=rs.order.key):
        click.echo(("* " if t == u else "  ") + format_tree(t))
    click.echo(f"{len(forms)} formations", err=True)


@main.command("normal-form")
@click.argument("target")
@click.option("--presentation", "pres_path", type=click.Path(exists=True, dir_okay=False), help="Read TARGET as a polynomial over this presentation.")
@operad_option
@click.option("--strategy", type=click.Choice(["first", "last"]), default="first", show_default=True)
@click.option("--trace", is_flag=True, help="Print every reduction step.")
@click.option("--unverified", is_flag=True, help="Skip the Buchberger check of the presentation.")
@_guard
def normal_form_cmd(target: str, pres_path: str | None, operad: str, strategy: str, trace: bool, unverified: bool) -> None:
    """Reduce TARGET to normal form.

    TARGET is a tree file (rewritten by the operad's relations) or, with
    --presentation, a polynomial in that presentation's syntax.
    """
    pres = None
    if pres_path:
        pres = parse_presentation(_read(pres_path))
        rs = pres.system()
        if not unverified and not buchberger_check(rs).is_groebner:
            click.echo("the presentation is not a Groebner basis; pass --unverified to reduce anyway", err=True)
            sys.exit(EXIT_FAIL)
        f = parse_polynomial(target, pres)
        inputs = [f]
    else:
        trees = parse_tree_list(_read(target))
        rs = default_system(_operad_of(trees[0], operad))
        inputs = [Polynomial.monomial(t) for t in trees]
    for f in inputs:
        steps: list = []
        nf = normal_form(f, rs, strategy=strategy, trace=steps)
        click.echo(_show_poly(nf, rs.order, pres))
        if trace:
            click.echo(f"trace ({len(steps)} steps):")
            for k, step in enumerate(steps, 1):
                anchor = ".".join(map(str, step.anchor)) or "root"
                click.echo(f"  {k}: {step.rule or 'rule'} at {anchor} on {_show(step.term, pres)} x {step.coefficient}")


@main.command("buchberger")
@click.argument("presentation", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", help="Also write a .json or .yaml report.")
@_guard
def buchberger_cmd(presentation: str, out_path: str | None) -> None:
    """Check that every S-polynomial of PRESENTATION reduces to zero."""
    pres = parse_presentation(_read(presentation))
    rs = pres.system()
    rep = buchberger_check(rs)
    click.echo(f"rules {len(rs.rules)}, small common multiples {rep.checked}")
    for gamma, names, s in rep.failing:
        click.echo(f"  {_show(gamma, pres)} [{names[0]}, {names[1]}] leaves {_show_poly(s, rs.order, pres)}")
    click.echo("groebner basis" if rep.is_groebner else f"not a groebner basis ({len(rep.failing)} failing)")
    if out_path:
        dump_report(
            {
                "rules": len(rs.rules),
                "checked": rep.checked,
                "is_groebner": rep.is_groebner,
                "failing": [
                    {"gamma": _show(g, pres), "rules": list(n), "remainder": _show_poly(s, rs.order, pres)}
                    for g, n, s in rep.failing
                ],
            },
            out_path,
        )
    sys.exit(EXIT_PASS if rep.is_groebner else EXIT_FAIL)


@main.command("confluence")
@click.argument("presentation", type=click.Path(exists=True, dir_okay=False))
@click.option("--max-weight", default=3, show_default=True, help="Check every monomial up to this weight.")
@_guard
def confluence_cmd(presentation: str, max_weight: int) -> None:
    """Check that every monomial of PRESENTATION has one reduction sink."""
    pres = parse_presentation(_read(presentation))
    rs = pres.system()
    monos = pres.monomials(max_weight)
    rep = confluence_report(monos, rs)
    click.echo(f"monomials {len(monos)}, states {rep.states}")
    for m in rep.divergent:
        sinks = " | ".join(_show_poly(s, rs.order, pres) for s in rep.sinks[m])
        click.echo(f"  {_show(m, pres)} has sinks {sinks}")
    click.echo("confluent" if rep.confluent else f"not confluent ({len(rep.divergent)} divergent)")
    sys.exit(EXIT_PASS if rep.confluent else EXIT_FAIL)


@main.command("orbit")
@click.argument("target")
@click.option("--presentation", "pres_path", type=click.Path(exists=True, dir_okay=False), help="Read TARGET as a monomial over this presentation.")
@_guard
def orbit_cmd(target: str, pres_path: str | None) -> None:
    """List the orbit of TARGET under the groupoid action on internal edges.

    TARGET is a tree file, or with --presentation a monomial; the least
    element is marked with '*'.
    """
    if pres_path:
        pres = parse_presentation(_read(pres_path))
        t = parse_monomial(target, pres)
        order = pres.order()
        groups = [(groupoid_orbit(t, pres.groupoid), None)]
    else:
        pres = None
        trees = parse_tree_list(_read(target))
        order = default_system(_operad_of(trees[0])).order
        groups = [(formation_orbit(t), push_up(t)) for t in trees]
    for k, (members, least) in enumerate(groups):
        least = least if least is not None else order.min(members)
        if k:
            click.echo("")
        for m in sorted(members, key=order.key):
            click.echo(("* " if m == least else "  ") + _show(m, pres))
        click.echo(f"{len(members)} elements", err=True)


@main.command("star")
@click.argument("presentation", type=click.Path(exists=True, dir_okay=False))
@click.option("--counts", is_flag=True, help="Print only the rule counts.")
@_guard
def star_cmd(presentation: str, counts: bool) -> None:
    """Print the discrete rules E*2 and R* replacing PRESENTATION's groupoid."""
    pres = parse_presentation(_read(presentation))
    if not pres.has_groupoid:
        raise GroupoidError("the presentation has no groupoid arrows")
    e2, rs = pres.star_rules()
    order = pres.order()
    click.echo(f"generators {len(pres.signature())}, E*2 {len(e2)}, R* {len(rs)}")
    if counts:
        return
    for title, rules in (("E*2", e2), ("R*", rs)):
        click.echo(f"{title}:")
        for r in rules:
            click.echo("  " + format_rule(r, order, True))


@main.command("verify")
@operad_option
@click.option("--max-vertices", default=2, show_default=True)
@click.option("--min-vertices", default=1, show_default=True)
@click.option("--max-in", default=2, show_default=True, help="Inputs per vertex.")
@click.option("--max-out", default=2, show_default=True, help="Outputs per vertex.")
@click.option("--colours", default=1, show_default=True)
@click.option(
    "--listings",
    type=click.Choice(["all", "canonical", "sample"]),
    default=None,
    help="Graph listings to check [default: all for w, sample for p].",
)
@click.option("--all-listings", is_flag=True, help="Shorthand for --listings all.")
@click.option("--samples", default=2, show_default=True, help="Extra random listings per graph with --listings sample.")
@click.option("--seed", default=0, show_default=True)
@click.option("--no-naive", is_flag=True, help="Skip the generate-and-filter formation oracle.")
@click.option("--no-confluence", is_flag=True, help="Skip the exhaustive reduction-graph check.")
@click.option("--kernel", is_flag=True, help="Derive relations from window formations instead of the printed table.")
@click.option("--jobs", default=1, show_default=True, help="Worker processes.")
@click.option("--budget", type=int, default=None, help=f"Formation estimate ceiling (default from {BUDGET_ENV}).")
@click.option("--out", "out_path", help="Write a .json or .yaml report.")
@_guard
def verify_cmd(operad, max_vertices, min_vertices, max_in, max_out, colours, listings, all_listings, samples, seed, no_naive, no_confluence, kernel, jobs, budget, out_path) -> None:
    """Check every formation of every small graph against the rewriting system."""
    if all_listings:
        listings = "all"
    if listings is None:
        listings = "all" if operad == "w" else "sample"
    cfg = SuiteConfig(
        operad=operad,
        max_vertices=max_vertices,
        min_vertices=min_vertices,
        max_in=max_in,
        max_out=max_out,
        colours=colours,
        listings=listings,
        samples=samples,
        seed=seed,
        naive_oracle=not no_naive,
        confluence=not no_confluence,
        jobs=jobs,
        budget=budget,
    )
    rs = default_system(operad, use_kernel=True) if kernel else None
    rep = run_suite(cfg, rs=rs)
    click.echo(rep.summary())
    for c in rep.counterexamples[:10]:
        click.echo(f"  {c['graph']}: {c['problems'][0]}")
    if len(rep.counterexamples) > 10:
        click.echo(f"  ... {len(rep.counterexamples) - 10} more")
    if out_path:
        dump_report(rep.to_dict(), out_path)
    sys.exit(EXIT_PASS if rep.passed else EXIT_FAIL)


if __name__ == "__main__":
    main()

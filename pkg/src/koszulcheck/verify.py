"""Exhaustive verification: every formation of every small graph rewrites to its
unique minimal formation, and the rule leads cover every non-minimal formation."""
from __future__ import annotations

import logging
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from math import factorial

from .graphs import Skeleton, enumerate_skeletons, from_skeleton, strict_iso
from .props import formations_p, naive_formations_p, prop_system, umf_prop
from .rewriting import (
    DescentError,
    Polynomial,
    RewriteError,
    RewriteSystem,
    buchberger_check_on,
    normal_form,
    reduction_sinks,
)
from .semantics import to_graph
from .trees import Node, Tree
from .wheeled import formations_w, naive_formations_w, umf_wheeled, wheeled_system

log = logging.getLogger(__name__)

BUDGET_ENV = "KOSZULCHECK_BUDGET"
DEFAULT_BUDGET = 2_000_000


class BudgetError(RuntimeError):
    def __init__(self, estimate: int, budget: int):
        super().__init__(f"estimated {estimate} formations exceeds the budget of {budget} (set {BUDGET_ENV} to raise it)")
        self.estimate = estimate
        self.budget = budget


_OPERADS = {
    "w": (formations_w, naive_formations_w, umf_wheeled, wheeled_system, False),
    "p": (formations_p, naive_formations_p, umf_prop, prop_system, True),
}


def enumerate_formations(g, operad: str) -> list[Tree]:
    return _OPERADS[operad][0](g)


def naive_formations(g, operad: str) -> list[Tree]:
    return _OPERADS[operad][1](g)


def umf(g, operad: str) -> Tree:
    return _OPERADS[operad][2](g)


def default_system(operad: str, use_kernel: bool = False) -> RewriteSystem:
    return _OPERADS[operad][3](use_kernel=use_kernel)


@dataclass
class SuiteConfig:
    operad: str = "w"
    max_vertices: int = 2
    max_in: int = 2
    max_out: int = 2
    colours: int = 1
    min_vertices: int = 1
    listings: str = "all"  # all | canonical | sample
    samples: int = 2
    seed: int = 0
    naive_oracle: bool = True
    confluence: bool = True
    jobs: int = 1
    budget: int | None = None

    def resolved_budget(self) -> int:
        if self.budget is not None:
            return self.budget
        return int(os.environ.get(BUDGET_ENV, DEFAULT_BUDGET))


@dataclass
class GraphReport:
    graph: str
    formations: int
    umf: str
    all_reach_umf: bool
    rewritable: bool
    umf_is_minimum: bool
    round_trip: bool
    weights_ok: bool
    naive_count: int | None = None
    confluent: bool | None = None
    problems: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems


@dataclass
class SuiteReport:
    config: dict
    graphs: int = 0
    formations: int = 0
    estimate: int = 0
    counterexamples: list = field(default_factory=list)
    confluent: bool = True
    buchberger: bool = True
    overlaps_checked: int = 0
    buchberger_failures: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.counterexamples and self.confluent and self.buchberger

    @property
    def verdicts_agree(self) -> bool:
        return self.confluent == self.buchberger

    def to_dict(self) -> dict:
        out = asdict(self)
        out["passed"] = self.passed
        out["verdicts_agree"] = self.verdicts_agree
        out.pop("seconds")
        return out

    def summary(self) -> str:
        lines = [
            f"operad {self.config['operad']}, up to {self.config['max_vertices']} vertices",
            f"graphs {self.graphs}, formations {self.formations}",
            f"confluence {'yes' if self.confluent else 'no'}, buchberger {'yes' if self.buchberger else 'no'} ({self.overlaps_checked} overlaps)",
            f"counterexamples {len(self.counterexamples)}",
            "PASS" if self.passed else "FAIL",
        ]
        return "\n".join(lines)


def describe(sk: Skeleton) -> str:
    profs = " ".join(f"{l}:{bp}" for l, bp in sk.profiles)
    edges = " ".join(f"{o[0]}.{o[2]}>{n[0]}.{n[2]}" for o, n in sorted(sk.edges))
    outs = ",".join(f"{f[0]}.{f[2]}" for f in sk.outs)
    ins = ",".join(f"{f[0]}.{f[2]}" for f in sk.ins)
    return f"[{profs}] edges[{edges}] out[{outs}] in[{ins}]"


def _binary_and_unary(t: Tree) -> tuple[int, int]:
    if not isinstance(t, Node):
        return 0, 0
    b, u = (1, 0) if len(t.children) == 2 else (0, 1)
    for c in t.children:
        cb, cu = _binary_and_unary(c)
        b, u = b + cb, u + cu
    return b, u


def check_graph(sk: Skeleton, operad: str, rs: RewriteSystem, naive_oracle: bool = False, confluence: bool = False) -> GraphReport:
    """Formations of sk: all reduce to the UMF, all but the UMF are reducible, the UMF is least."""
    forms = enumerate_formations(sk, operad)
    u = umf(sk, operad)
    problems = []
    n, e = len(sk.profiles), len(sk.edges)
    weights_ok = True
    for t in forms:
        b, un = _binary_and_unary(t)
        if operad == "w" and (b, un) != (n - 1, e):
            weights_ok = False
        if operad == "p" and (b, un) != (n - 1, 0):
            weights_ok = False
    if not weights_ok:
        problems.append("formation weights differ from the vertex and edge counts")
    if len(set(forms)) != len(forms):
        problems.append("duplicate formations")
    umf_is_minimum = bool(forms) and rs.order.min(forms) == u
    if not umf_is_minimum:
        problems.append("the UMF is not the least formation")
    rewritable, reach = True, True
    target = Polynomial.monomial(u)
    for t in forms:
        if t != u and not rs.is_reducible(t):
            rewritable = False
            problems.append(f"stuck formation {t!r}")
        try:
            if normal_form(t, rs) != target:
                reach = False
                problems.append(f"{t!r} does not reduce to the UMF")
        except DescentError as exc:
            reach = False
            problems.append(f"descent failure: {exc}")
    if rs.is_reducible(u):
        problems.append("the UMF is reducible")
    round_trip = strict_iso(to_graph(u), from_skeleton(sk))
    if not round_trip:
        problems.append("the UMF does not evaluate to the graph")
    naive_count = None
    if naive_oracle:
        naive = naive_formations(sk, operad)
        naive_count = len(naive)
        if set(naive) != set(forms):
            problems.append(f"naive oracle finds {len(naive)} formations, enumeration {len(forms)}")
    confluent = None
    if confluence:
        confluent = True
        for t in forms:
            try:
                sinks, _ = reduction_sinks(Polynomial.monomial(t), rs)
            except (DescentError, RewriteError) as exc:
                sinks = {exc}
            if sinks != {target}:
                confluent = False
                problems.append(f"{t!r} has {len(sinks)} reduction sinks")
                break
    return GraphReport(describe(sk), len(forms), repr(u), reach, rewritable, umf_is_minimum, round_trip, weights_ok, naive_count, confluent, problems)


def _shape_count(n: int) -> int:
    # binary shuffle trees on n labels: (2n-3)!!
    out = 1
    for k in range(3, 2 * n - 2, 2):
        out *= k
    return out


def estimate(sk_count_by_shape: dict, operad: str) -> int:
    """An upper bound on the number of formations over the given graphs."""
    total = 0
    for (n, e), count in sk_count_by_shape.items():
        per = _shape_count(n)
        if operad == "w":
            per *= (2 * n - 1) ** e * factorial(e)
        total += count * per
    return total


def formable(sk: Skeleton) -> bool:
    """A lone vertex without edges only forms the graph listed as the vertex is."""
    if len(sk.profiles) != 1 or sk.edges:
        return True
    (label, bp), = sk.profiles
    return sk.outs == tuple((label, -1, k) for k in range(1, len(bp.out) + 1)) and sk.ins == tuple(
        (label, 1, k) for k in range(1, len(bp.inp) + 1)
    )


def suite_graphs(cfg: SuiteConfig) -> list[Skeleton]:
    wheel_free = cfg.operad == "p"
    rng = random.Random(cfg.seed)
    out = []
    for n in range(cfg.min_vertices, cfg.max_vertices + 1):
        if cfg.listings == "all":
            out.extend(sk for sk in enumerate_skeletons(n, cfg.max_in, cfg.max_out, cfg.colours, wheel_free, "all") if formable(sk))
            continue
        for sk in enumerate_skeletons(n, cfg.max_in, cfg.max_out, cfg.colours, wheel_free, "canonical"):
            out.append(sk)
            if cfg.listings == "sample":
                for _ in range(cfg.samples):
                    po, pi = list(sk.outs), list(sk.ins)
                    rng.shuffle(po)
                    rng.shuffle(pi)
                    moved = sk._replace(outs=tuple(po), ins=tuple(pi))
                    if moved != sk and formable(moved):
                        out.append(moved)
    return out


_worker_rs: dict = {}


def _check_chunk(args) -> list:
    operad, chunk, naive_oracle, confluence = args
    rs = _worker_rs.get(operad)
    if rs is None:
        rs = _worker_rs[operad] = default_system(operad)
    reports = []
    for sk in chunk:
        rep = check_graph(sk, operad, rs, naive_oracle, confluence)
        bb = buchberger_check_on(enumerate_formations(sk, operad), rs)
        reports.append((rep, bb.is_groebner, bb.checked, [(repr(g), names, repr(s)) for g, names, s in bb.failing]))
    return reports


def run_suite(cfg: SuiteConfig, rs: RewriteSystem | None = None, progress=None) -> SuiteReport:
    """Check every graph within the caps; abort with BudgetError when the estimate is too big."""
    start = time.perf_counter()
    graphs = suite_graphs(cfg)
    shapes: dict = {}
    for sk in graphs:
        key = (len(sk.profiles), len(sk.edges))
        shapes[key] = shapes.get(key, 0) + 1
    est = estimate(shapes, cfg.operad)
    budget = cfg.resolved_budget()
    if est > budget:
        raise BudgetError(est, budget)
    rep = SuiteReport(config=asdict(cfg), estimate=est)
    log.info("checking %d graphs, estimate %d formations", len(graphs), est)
    if rs is not None or cfg.jobs <= 1:
        rs = rs or default_system(cfg.operad)
        results = []
        for k, sk in enumerate(graphs):
            g = check_graph(sk, cfg.operad, rs, cfg.naive_oracle, cfg.confluence)
            bb = buchberger_check_on(enumerate_formations(sk, cfg.operad), rs)
            results.append((g, bb.is_groebner, bb.checked, [(repr(x), names, repr(s)) for x, names, s in bb.failing]))
            if progress:
                progress(k + 1, len(graphs))
    else:
        size = max(1, len(graphs) // (cfg.jobs * 8))
        chunks = [graphs[i : i + size] for i in range(0, len(graphs), size)]
        results = []
        with ProcessPoolExecutor(cfg.jobs) as pool:
            for part in pool.map(_check_chunk, [(cfg.operad, c, cfg.naive_oracle, cfg.confluence) for c in chunks]):
                results.extend(part)
                if progress:
                    progress(len(results), len(graphs))
    for g, groebner, checked, failing in results:
        rep.graphs += 1
        rep.formations += g.formations
        rep.overlaps_checked += checked
        if not g.ok:
            rep.counterexamples.append(asdict(g))
        if g.confluent is False or not g.all_reach_umf:
            rep.confluent = False
        if not groebner:
            rep.buchberger = False
            rep.buchberger_failures.extend(failing)
    rep.seconds = time.perf_counter() - start
    return rep

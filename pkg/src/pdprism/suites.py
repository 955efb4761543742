"""Seeded property suites runnable from the command line."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .diagram import CONVENTIONS, Diagram, GroundMetric, labeled
from .matching import (
    PartialMatching,
    bottleneck,
    bottleneck_bruteforce,
    compose,
    matching_cost,
    wasserstein,
    wasserstein_bruteforce,
    wasserstein_q,
)
from .obstruction import (
    ck_truncation,
    cube_embedding,
    cube_vertices,
    embed_ck,
    geodesic_sequence,
    verify_isometry,
)
from .prisms import build_prism, verify_prism

__all__ = ["SuiteResult", "SUITES", "run_suite", "random_diagram", "random_matching"]

TOL = 1e-9


def random_diagram(rng: np.random.Generator, max_total: int = 4, lo: float = 0.0,
                   hi: float = 10.0) -> Diagram:
    """Random diagram with total multiplicity in ``0..max_total``.

    Points are (birth, death) with birth < death drawn uniformly in ``[lo, hi]``;
    roughly one draw in four repeats an earlier point to exercise multiplicity.
    """
    total = int(rng.integers(0, max_total + 1))
    pts = []
    while len(pts) < total:
        if pts and rng.random() < 0.25:
            pts.append(pts[int(rng.integers(len(pts)))])
            continue
        a, b = sorted(rng.uniform(lo, hi, size=2))
        if a != b:
            pts.append((float(a), float(b)))
    return Diagram.from_points(pts)


def random_matching(rng: np.random.Generator, dx: Diagram, dy: Diagram) -> PartialMatching:
    lx, ly = list(labeled(dx)), list(labeled(dy))
    size = int(rng.integers(0, min(len(lx), len(ly)) + 1))
    xs = rng.permutation(len(lx))[:size]
    ys = rng.permutation(len(ly))[:size]
    return PartialMatching([(lx[i], ly[j]) for i, j in zip(xs, ys)], dx, dy)


@dataclass
class SuiteResult:
    name: str
    checks: list = field(default_factory=list)

    def add(self, label: str, passed: bool, cases: int, max_deviation: float = 0.0) -> None:
        self.checks.append({
            "check": label, "pass": bool(passed), "cases": cases,
            "max_deviation": float(max_deviation),
        })

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.checks)

    def to_json(self) -> dict:
        return {"suite": self.name, "pass": self.passed, "checks": self.checks}


def oracle_suite(seed: int, pairs: int = 500, bottleneck_pairs: int = 200) -> SuiteResult:
    rng = np.random.default_rng(seed)
    res = SuiteResult("oracle")
    worst = 0.0
    for _ in range(pairs):
        dx, dy = random_diagram(rng), random_diagram(rng)
        for q in (0.5, 1.0, 2.0):
            for conv in CONVENTIONS:
                metric = GroundMetric(q, conv)
                worst = max(worst, abs(wasserstein(dx, dy, metric).value
                                       - wasserstein_bruteforce(dx, dy, metric).value))
    res.add("wasserstein equals brute force", worst <= TOL, pairs * 6, worst)

    worst = 0.0
    for _ in range(bottleneck_pairs):
        dx, dy = random_diagram(rng), random_diagram(rng)
        for conv in CONVENTIONS:
            worst = max(worst, abs(bottleneck(dx, dy, conv).value
                                   - bottleneck_bruteforce(dx, dy, conv).value))
    res.add("bottleneck equals brute force", worst <= TOL, bottleneck_pairs * 2, worst)
    return res


def metric_axioms_suite(seed: int, triples: int = 500, pd_pairs: int = 200) -> SuiteResult:
    rng = np.random.default_rng(seed)
    res = SuiteResult("metric-axioms")

    sym_ok, pd_ok = True, True
    for _ in range(pd_pairs):
        dx, dy = random_diagram(rng), random_diagram(rng)
        for q in (0.5, 1.0, 2.0):
            m = GroundMetric(q)
            w_xy = wasserstein(dx, dy, m).value
            sym_ok &= w_xy == wasserstein(dy, dx, m).value
            pd_ok &= wasserstein(dx, dx, m).value == 0.0
            pd_ok &= (w_xy > 0) == (dx != dy)
    res.add("symmetry (exact)", sym_ok, pd_pairs * 3)
    res.add("positive definiteness", pd_ok, pd_pairs * 3)

    slack_rho = {0.5: 0.0, 1.0: 0.0}
    slack_q = {0.5: 0.0, 1.0: 0.0, 2.0: 0.0}
    for _ in range(triples):
        x, y, z = (random_diagram(rng) for _ in range(3))
        for q in slack_rho:
            m = GroundMetric(q)
            w = lambda a, b: wasserstein(a, b, m).value  # noqa: E731
            slack_rho[q] = max(slack_rho[q], w(x, y) - w(x, z) - w(z, y))
        for q in slack_q:
            w = lambda a, b: wasserstein_q(a, b, q)  # noqa: E731
            slack_q[q] = max(slack_q[q], w(x, y) - w(x, z) - w(z, y))
    for q, s in slack_rho.items():
        res.add(f"triangle W_rho, q={q:g}", s <= TOL, triples, s)
    # for q < 1 the rooted value is a quasi-metric and this check is expected to fail
    for q, s in slack_q.items():
        res.add(f"triangle W^q, q={q:g}", s <= TOL, triples, s)

    slack = 0.0
    for _ in range(triples):
        x, z, y = (random_diagram(rng) for _ in range(3))
        m1, m2 = random_matching(rng, x, z), random_matching(rng, z, y)
        for q in (0.5, 1.0):
            m = GroundMetric(q)
            slack = max(slack, matching_cost(compose(m1, m2), x, y, m)
                        - matching_cost(m1, x, z, m) - matching_cost(m2, z, y, m))
    res.add("composition bound, q <= 1", slack <= TOL, triples * 2, max(slack, 0.0))

    worst = 0.0
    for a, b in rng.uniform(-10, 10, size=(1000, 2)):
        for q in (0.5, 1.0, 2.0):
            near = GroundMetric(q, "nearest").diagonal_distance((a, b))
            proj = GroundMetric(q, "projection").diagonal_distance((a, b))
            worst = max(worst, abs(proj - 2 ** q * near))
    res.add("projection = 2^q * nearest", worst <= 1e-12, 3000, worst)

    sq = GroundMetric(2.0)
    p0, p1, p2 = (0.0, 0.0), (1.0, 0.0), (2.0, 0.0)
    excess = sq.rho(p0, p2) - sq.rho(p0, p1) - sq.rho(p1, p2)
    res.add("rho with q=2 violates the triangle inequality", excess > 0, 1, excess)
    return res


def prism_suite(seed: int, families: int = 100) -> SuiteResult:
    rng = np.random.default_rng(seed)
    res = SuiteResult("prism")
    ok, worst = True, 0.0
    for _ in range(families):
        size = int(rng.integers(1, 5))
        family = list(dict.fromkeys(random_diagram(rng) for _ in range(size)))
        k = int(rng.integers(1, 4))
        for q in (0.5, 1.0):
            for conv in CONVENTIONS:
                rep = verify_prism(build_prism(family, k, GroundMetric(q, conv)))
                ok &= rep.passed
                worst = max(worst, rep.max_isometry_deviation, rep.max_additivity_deviation)
    res.add("k-prism conditions", ok, families * 4, worst)
    return res


def geodesic_suite(seed: int, n: int = 6) -> SuiteResult:
    rng = np.random.default_rng(seed)
    res = SuiteResult("geodesic")
    for k in (1.0, 2.0):
        for q in (0.5, 1.0):
            metric = GroundMetric(q)
            seq = geodesic_sequence(random_diagram(rng), n, k, metric)
            worst = max(
                abs(wasserstein(seq[i], seq[j], metric).value - abs(i - j) * k)
                for i, j in itertools.combinations(range(n + 1), 2)
            )
            res.add(f"geodesic n={n} k={k:g} q={q:g}", worst <= TOL, (n + 1) * n // 2, worst)
    return res


def cube_suite(seed: int, n: int = 3, k: float = 2.0) -> SuiteResult:
    res = SuiteResult("cube")
    metric = GroundMetric(1.0)
    for base in (Diagram(), Diagram({(0.0, 2.0): 1})):
        cube = cube_embedding(base, n, k, metric)
        rep = verify_isometry(cube_vertices(k, n), cube, metric)
        res.add(f"cube n={n} k={k:g} base={base.total_multiplicity} pts",
                rep.passed, 2 ** n * (2 ** n - 1) // 2, rep.max_isometry_deviation)
    return res


def ck_suite(seed: int, N: int = 3, k: float = 1.0) -> SuiteResult:
    res = SuiteResult("ck")
    _, rep = embed_ck(k, N, GroundMetric(1.0))
    res.add(f"embedded cubes isometric N={N} k={k:g}", rep.max_isometry_deviation <= TOL,
            N, rep.max_isometry_deviation)
    res.add("consecutive cube separation >= n+1", not rep.separation_violations, N - 1)
    space = ck_truncation(k, N)
    res.add("truncation satisfies metric axioms", not space.violations(), len(space.labels) ** 3)
    return res


SUITES = {
    "metric-axioms": metric_axioms_suite,
    "oracle": oracle_suite,
    "prism": prism_suite,
    "cube": cube_suite,
    "geodesic": geodesic_suite,
    "ck": ck_suite,
}


def run_suite(name: str, seed: int) -> SuiteResult:
    return SUITES[name](seed)

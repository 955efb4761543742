"""Exit criteria, one test per criterion, each at its pinned tolerance."""
import itertools
import time

import numpy as np

from pdprism import (
    Diagram,
    GroundMetric,
    bottleneck,
    bottleneck_bruteforce,
    build_prism,
    ck_truncation,
    compose,
    cube_embedding,
    embed_ck,
    geodesic_sequence,
    matching_cost,
    verify_prism,
    wasserstein,
    wasserstein_bruteforce,
    wasserstein_q,
)
from pdprism.suites import random_diagram, random_matching

TOL = 1e-9
CONVENTIONS = ("nearest", "projection")


def test_01_oracle_equivalence(criterion):
    rng = np.random.default_rng(101)
    start = time.perf_counter()
    worst, cases = 0.0, 0
    for _ in range(500):
        dx, dy = random_diagram(rng), random_diagram(rng)
        for q in (0.5, 1.0, 2.0):
            for conv in CONVENTIONS:
                m = GroundMetric(q, conv)
                worst = max(worst, abs(wasserstein(dx, dy, m).value
                                       - wasserstein_bruteforce(dx, dy, m).value))
                cases += 1
    elapsed = time.perf_counter() - start
    ok = worst <= TOL and elapsed < 30
    criterion(1, "exact solver equals brute force", ok,
              f"{cases} cases, max |diff| {worst:.3g}, {elapsed:.1f}s")
    assert ok


def test_02_metric_axioms(criterion):
    rng = np.random.default_rng(102)
    nearest = {q: GroundMetric(q) for q in (0.5, 1.0, 2.0)}

    sym = True
    for _ in range(200):
        dx, dy = random_diagram(rng), random_diagram(rng)
        for m in nearest.values():
            sym &= wasserstein(dx, dy, m).value == wasserstein(dy, dx, m).value

    pd = True
    for i in range(200):
        dx = random_diagram(rng)
        dy = Diagram.from_json(dx.to_json()) if i % 2 else random_diagram(rng)
        for m in nearest.values():
            w = wasserstein(dx, dy, m).value
            pd &= (w == 0) == (dx == dy) and w >= 0

    slack_rho = {0.5: 0.0, 1.0: 0.0}
    slack_root = {0.5: 0.0, 1.0: 0.0, 2.0: 0.0}
    for _ in range(500):
        x, y, z = (random_diagram(rng) for _ in range(3))
        for q in slack_rho:
            w = lambda a, b: wasserstein(a, b, nearest[q]).value  # noqa: E731
            slack_rho[q] = max(slack_rho[q], w(x, y) - w(x, z) - w(z, y))
        for q in slack_root:
            w = lambda a, b: wasserstein_q(a, b, q)  # noqa: E731
            slack_root[q] = max(slack_root[q], w(x, y) - w(x, z) - w(z, y))

    clauses = {
        "symmetry": sym,
        "positive definiteness": pd,
        **{f"W_rho triangle q={q:g}": s <= TOL for q, s in slack_rho.items()},
        **{f"W^q triangle q={q:g}": s <= TOL for q, s in slack_root.items()},
    }
    failed = [name for name, ok in clauses.items() if not ok]
    detail = "all clauses hold" if not failed else (
        "failing: " + ", ".join(failed)
        + f"; worst W^q slack at q=0.5 is {slack_root[0.5]:.3g}"
    )
    criterion(2, "metric axioms", not failed, detail)
    assert not failed, detail


def test_03_composition_inequality(criterion):
    rng = np.random.default_rng(103)
    worst = -np.inf
    for _ in range(500):
        x, z, y = (random_diagram(rng) for _ in range(3))
        m1, m2 = random_matching(rng, x, z), random_matching(rng, z, y)
        m12 = compose(m1, m2)
        for q in (0.5, 1.0):
            m = GroundMetric(q)
            worst = max(worst, matching_cost(m12, x, y, m)
                        - matching_cost(m1, x, z, m) - matching_cost(m2, z, y, m))
    ok = worst <= TOL
    criterion(3, "cost of composed matching is bounded", ok, f"max excess {worst:.3g}")
    assert ok


def test_04_k_prisms(criterion):
    rng = np.random.default_rng(104)
    start = time.perf_counter()
    disjoint, worst, runs = True, 0.0, 0
    for _ in range(100):
        family = list(dict.fromkeys(
            random_diagram(rng) for _ in range(int(rng.integers(1, 5)))
        ))
        for k in (1, 2, 3):
            for q in (0.5, 1.0):
                for conv in CONVENTIONS:
                    rep = verify_prism(build_prism(family, k, GroundMetric(q, conv)))
                    disjoint &= rep.disjoint
                    worst = max(worst, rep.max_isometry_deviation, rep.max_additivity_deviation)
                    runs += 1
    elapsed = time.perf_counter() - start
    ok = disjoint and worst <= TOL and elapsed < 60
    criterion(4, "k-prism map is disjoint, isometric and k-additive", ok,
              f"{runs} runs, max deviation {worst:.3g}, {elapsed:.1f}s")
    assert ok


def test_05_geodesic(criterion):
    worst, pairs = 0.0, 0
    for k in (1.0, 2.0):
        for q in (0.5, 1.0):
            m = GroundMetric(q)
            seq = geodesic_sequence(Diagram(), 6, k, m)
            for i, j in itertools.combinations(range(7), 2):
                worst = max(worst, abs(wasserstein(seq[i], seq[j], m).value - abs(i - j) * k))
                pairs += 1
    ok = worst <= TOL and pairs == 4 * 21
    criterion(5, "geodesic of length 6", ok, f"{pairs} pairs, max deviation {worst:.3g}")
    assert ok


def test_06_cube(criterion):
    m = GroundMetric(1.0)
    worst, pairs = 0.0, 0
    for base in (Diagram(), Diagram({(0.0, 2.0): 1})):
        cube = cube_embedding(base, 3, 2.0, m)
        assert cube["000"] == base
        for a, b in itertools.combinations(sorted(cube), 2):
            ham = sum(u != v for u, v in zip(a, b))
            worst = max(worst, abs(wasserstein(cube[a], cube[b], m).value - 2 * ham))
            pairs += 1
    ok = worst <= TOL and pairs == 56
    criterion(6, "scaled cube {0,2}^3", ok, f"{pairs} pairs, max deviation {worst:.3g}")
    assert ok


def test_07_ck_truncation(criterion):
    _, rep = embed_ck(1.0, 3, GroundMetric(1.0))
    space = ck_truncation(1.0, 3)
    d = space.distances
    n = len(space.labels)
    triangle = all(d[i, j] <= d[i, l] + d[l, j] for i, j, l in itertools.product(range(n), repeat=3))
    separation = all(rep.min_separation[m] >= m + 1 for m in (1, 2))
    ok = rep.max_isometry_deviation <= TOL and separation and triangle
    criterion(7, "truncated union of cubes", ok,
              f"within-cube deviation {rep.max_isometry_deviation:.3g}, "
              f"separations {rep.min_separation}, triangle {triangle}")
    assert ok


def test_08_convention_relation(criterion):
    rng = np.random.default_rng(108)
    worst = 0.0
    for x in rng.uniform(0, 10, size=(1000, 2)):
        for q in (0.5, 1.0, 2.0):
            near = GroundMetric(q, "nearest").diagonal_distance(x)
            proj = GroundMetric(q, "projection").diagonal_distance(x)
            worst = max(worst, abs(proj - 2 ** q * near))
    ok = worst <= 1e-12
    criterion(8, "projection charge = 2^q * nearest charge", ok, f"max |diff| {worst:.3g}")
    assert ok


def test_09_non_metric_witness(criterion):
    m = GroundMetric(2.0)
    a, b, c = (0.0, 0.0), (1.0, 0.0), (2.0, 0.0)
    lhs, rhs = m.rho(a, c), m.rho(a, b) + m.rho(b, c)
    ok = lhs == 4 and rhs == 2 and lhs > rhs
    criterion(9, "squared sup-norm cost breaks the triangle inequality", ok, f"{lhs:g} > {rhs:g}")
    assert ok


def test_10_bottleneck(criterion):
    rng = np.random.default_rng(110)
    worst = 0.0
    for _ in range(200):
        dx, dy = random_diagram(rng), random_diagram(rng)
        for conv in CONVENTIONS:
            worst = max(worst, abs(bottleneck(dx, dy, conv).value
                                   - bottleneck_bruteforce(dx, dy, conv).value))
    ok = worst <= TOL
    criterion(10, "bottleneck equals brute-force min-max", ok, f"max |diff| {worst:.3g}")
    assert ok

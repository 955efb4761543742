"""The k-prism map on diagram space.

For a finite family of diagrams, adding one fresh point ``p`` whose diagonal
charge is ``k`` and which sits far from every point in the family gives a map
``T(D) = D + 1_p`` that preserves pairwise distances and pushes each diagram
exactly ``k`` away from the images of the others.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from .diagram import Diagram, GroundMetric, GroundPoint, InvalidDiagramError
from .matching import wasserstein

__all__ = [
    "PrismWitness",
    "PrismReport",
    "select_prism_point",
    "prism_map",
    "verify_prism",
    "build_prism",
    "point_choice_holds",
    "TOLERANCE",
]

TOLERANCE = 1e-9


@dataclass(frozen=True)
class PrismWitness:
    p: GroundPoint
    k: float
    metric: GroundMetric
    family: tuple
    images: tuple


@dataclass
class PrismReport:
    passed: bool
    disjoint: bool
    max_isometry_deviation: float
    max_additivity_deviation: float
    pairs: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "pass": self.passed,
            "disjoint": self.disjoint,
            "max_isometry_deviation": self.max_isometry_deviation,
            "max_additivity_deviation": self.max_additivity_deviation,
            "pairs": self.pairs,
        }


def _max_shifted_distance(family, k, metric):
    # max over ordered pairs (including D = D') of k + W(D, D')
    worst = k
    for a, b in itertools.combinations(family, 2):
        worst = max(worst, k + wasserstein(a, b, metric).value)
    return worst


def point_choice_holds(p, family, k, metric, bound=None) -> bool:
    """Check that ``p`` is charged ``k`` by the diagonal and lies beyond ``bound`` of every family point."""
    if abs(metric.diagonal_distance(p) - k) > 1e-12 * max(1.0, k):
        return False
    if bound is None:
        bound = _max_shifted_distance(family, k, metric)
    points = {x for d in family for x in d}
    return all(metric.rho(p, x) > bound for x in points)


def select_prism_point(family, k: float, metric: GroundMetric) -> GroundPoint:
    """Pick ``p = (x0, x0 + h)`` with diagonal charge ``k`` far from all of ``family``.

    ``x0`` starts past every coordinate in the family by more than the
    ``1/q``-th root of ``max(k + W(D, D'))`` and is doubled away until the
    separation check passes.
    """
    family = list(family)
    if not family:
        raise ValueError("family must be nonempty")
    if not k > 0:
        raise ValueError(f"k must be positive, got {k!r}")
    bound = _max_shifted_distance(family, k, metric)
    coords = [c for d in family for c in d.coordinates()]
    top = max(coords, default=0.0)
    lowest = min(coords, default=0.0)
    h = metric.persistence_for(k)
    margin = bound ** (1.0 / metric.q) + k + 1
    x0 = float(math.ceil(top + margin))
    while True:
        p = GroundPoint(x0, x0 + h)
        if point_choice_holds(p, family, k, metric, bound):
            return p
        x0 = float(math.ceil(x0 + (x0 - lowest) + margin))


def prism_map(family, p) -> list[Diagram]:
    """Return ``D + 1_p`` for every ``D`` in ``family``."""
    p = GroundPoint(float(p[0]), float(p[1]))
    if p.on_diagonal:
        raise InvalidDiagramError([f"prism point {tuple(p)} lies on the diagonal"])
    indicator = Diagram({p: 1})
    out = []
    for d in family:
        if p in d:
            raise InvalidDiagramError([f"prism point {tuple(p)} already in the support of {d!r}"])
        out.append(d + indicator)
    return out


def build_prism(family, k: float, metric: GroundMetric) -> PrismWitness:
    family = tuple(family)
    p = select_prism_point(family, k, metric)
    return PrismWitness(p, k, metric, family, tuple(prism_map(family, p)))


def verify_prism(witness: PrismWitness, tol: float = TOLERANCE) -> PrismReport:
    """Check disjointness, isometry and ``k``-additivity of ``T`` on the family.

    Distances are the pre-root minimum costs ``W_rho``.  The ``1/q``-rooted
    values are attached per pair for inspection only.
    """
    fam, img, metric, k = witness.family, witness.images, witness.metric, witness.k
    disjoint = not (set(fam) & set(img))
    base = {}
    for i, j in itertools.product(range(len(fam)), repeat=2):
        if (j, i) in base:
            base[i, j] = base[j, i]
        else:
            base[i, j] = wasserstein(fam[i], fam[j], metric).value
    iso_dev = add_dev = 0.0
    rows = []
    root = 1.0 / metric.q
    for i, j in itertools.product(range(len(fam)), repeat=2):
        w = base[i, j]
        w_img = wasserstein(img[i], img[j], metric).value
        w_cross = wasserstein(fam[i], img[j], metric).value
        d_iso = abs(w_img - w)
        d_add = abs(w_cross - (k + w))
        iso_dev = max(iso_dev, d_iso)
        add_dev = max(add_dev, d_add)
        rows.append({
            "i": i, "j": j,
            "w": w, "w_images": w_img, "w_cross": w_cross,
            "isometry_deviation": d_iso, "additivity_deviation": d_add,
            "wq": w ** root, "wq_cross": w_cross ** root,
        })
    passed = disjoint and iso_dev <= tol and add_dev <= tol
    return PrismReport(passed, disjoint, iso_dev, add_dev, rows)

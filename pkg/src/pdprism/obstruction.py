"""Geodesics, scaled cubes and truncated unions of cubes built from prisms."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .diagram import Diagram, GroundMetric
from .matching import SizeError, wasserstein
from .prisms import prism_map, select_prism_point

__all__ = [
    "FiniteMetricSpace",
    "EmbeddingReport",
    "geodesic_sequence",
    "cube_vertices",
    "cube_embedding",
    "ck_truncation",
    "ck_gap",
    "embed_ck",
    "verify_isometry",
    "CUBE_CAP",
    "CK_CAP",
    "CK_EMBED_CAP",
]

CUBE_CAP = 4
CK_CAP = 5
CK_EMBED_CAP = 4
TOLERANCE = 1e-9


@dataclass(frozen=True)
class FiniteMetricSpace:
    labels: tuple
    distances: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        d = np.asarray(self.distances, dtype=float)
        if d.shape != (len(self.labels), len(self.labels)):
            raise ValueError(f"distance matrix shape {d.shape} does not match {len(self.labels)} labels")
        object.__setattr__(self, "distances", d)

    def d(self, a, b) -> float:
        idx = {label: i for i, label in enumerate(self.labels)}
        return float(self.distances[idx[a], idx[b]])

    def violations(self, tol: float = 1e-12) -> list[str]:
        """Symmetry, zero diagonal, nonnegativity and every triangle inequality."""
        d = self.distances
        out = []
        if not np.array_equal(d, d.T):
            out.append("distance matrix is not symmetric")
        if np.any(np.diag(d) != 0):
            out.append("nonzero self-distance")
        if np.any(d < 0):
            out.append("negative distance")
        # d[i, j] <= d[i, l] + d[l, j] for all i, j, l
        slack = d[:, None, :] - (d[:, :, None] + d[None, :, :])
        worst = np.argwhere(slack > tol)
        for i, l, j in worst[:10]:
            out.append(
                f"triangle violated: d({self.labels[i]},{self.labels[j]}) > "
                f"d({self.labels[i]},{self.labels[l]}) + d({self.labels[l]},{self.labels[j]})"
            )
        return out

    def to_json(self) -> dict:
        return {"labels": list(self.labels), "distances": self.distances.tolist()}


@dataclass
class EmbeddingReport:
    max_isometry_deviation: float
    separation_violations: list = field(default_factory=list)
    passed: bool = True
    min_separation: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "max_isometry_deviation": self.max_isometry_deviation,
            "separation_violations": self.separation_violations,
            "min_separation": {str(k): v for k, v in self.min_separation.items()},
            "pass": self.passed,
        }


def geodesic_sequence(base: Diagram, n: int, k: float, metric: GroundMetric,
                      context=()) -> list[Diagram]:
    """``D_0 = base`` and ``D_i = D_{i-1} + 1_{p_i}``, each ``p_i`` a prism point for all earlier terms.

    ``context`` lists extra diagrams every prism point must also keep clear of.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    seq = [base]
    for _ in range(n):
        p = select_prism_point(list(context) + seq, k, metric)
        seq.append(prism_map([seq[-1]], p)[0])
    return seq


def _bit_labels(n):
    return ["".join(bits) for bits in itertools.product("01", repeat=n)]


def cube_vertices(k: float, n: int) -> FiniteMetricSpace:
    """Vertices of ``{0, k}^n`` under the l1 metric, labeled by bit strings."""
    if n < 1:
        raise ValueError("n must be at least 1")
    labels = _bit_labels(n)
    bits = np.array([[c == "1" for c in s] for s in labels])
    hamming = (bits[:, None, :] != bits[None, :, :]).sum(axis=2)
    return FiniteMetricSpace(labels, k * hamming.astype(float))


def cube_embedding(base: Diagram, n: int, k: float, metric: GroundMetric,
                   cap: int = CUBE_CAP, context=()) -> dict[str, Diagram]:
    """Map each bit string ``A`` of length ``n`` to ``base + sum_{i in A} 1_{p_i}``.

    ``p_i`` is a prism point for the ``2^(i-1)`` vertices built so far (plus
    ``context``), so setting bit ``i`` acts as a prism map on them.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if n > cap:
        raise SizeError(f"cube dimension {n} exceeds cap {cap}")
    vertices = {"": base}
    for _ in range(n):
        built = list(vertices.values())
        p = select_prism_point(list(context) + built, k, metric)
        lifted = dict(zip(vertices, prism_map(built, p)))
        vertices = {**{s + "0": d for s, d in vertices.items()},
                    **{s + "1": d for s, d in lifted.items()}}
    return dict(sorted(vertices.items()))


def ck_gap(m: int, n: int, k: float) -> float:
    """Base-point spacing between cube ``m`` and cube ``n > m``: sum of ``j + 1 + k*j``."""
    return float(sum(j + 1 + k * j for j in range(m, n)))


def ck_truncation(k: float, N: int, cap: int = CK_CAP) -> FiniteMetricSpace:
    """Cubes ``{0,k}^1 .. {0,k}^N`` hung off a line at their all-zero vertices.

    Labels are ``"n:bits"``.  Across cubes the distance runs from a vertex to
    its cube's origin, along the line, and out to the other vertex.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    if N > cap:
        raise SizeError(f"N = {N} exceeds cap {cap}")
    labels, dims, weights, bitsets = [], [], [], []
    for n in range(1, N + 1):
        for s in _bit_labels(n):
            labels.append(f"{n}:{s}")
            dims.append(n)
            weights.append(s.count("1"))
            bitsets.append(s)
    size = len(labels)
    dist = np.zeros((size, size))
    for a in range(size):
        for b in range(a + 1, size):
            if dims[a] == dims[b]:
                h = sum(x != y for x, y in zip(bitsets[a], bitsets[b]))
                v = k * h
            else:
                lo, hi = sorted((dims[a], dims[b]))
                v = k * weights[a] + ck_gap(lo, hi, k) + k * weights[b]
            dist[a, b] = dist[b, a] = v
    return FiniteMetricSpace(labels, dist)


def _pairwise(image, labels, metric):
    out = {}
    for a, b in itertools.combinations(labels, 2):
        out[a, b] = wasserstein(image[a], image[b], metric).value
    return out


def verify_isometry(reference: FiniteMetricSpace, image: dict, metric: GroundMetric,
                    tol: float = TOLERANCE) -> EmbeddingReport:
    """Largest ``|W_rho(image(a), image(b)) - d(a, b)|`` over all label pairs."""
    if set(image) != set(reference.labels):
        missing = set(reference.labels) - set(image)
        extra = set(image) - set(reference.labels)
        raise ValueError(f"label mismatch: missing {sorted(missing)}, unexpected {sorted(extra)}")
    idx = {label: i for i, label in enumerate(reference.labels)}
    worst = 0.0
    for (a, b), w in _pairwise(image, reference.labels, metric).items():
        worst = max(worst, abs(w - reference.distances[idx[a], idx[b]]))
    return EmbeddingReport(worst, [], worst <= tol)


def embed_ck(k: float, N: int, metric: GroundMetric, cap: int = CK_EMBED_CAP,
             tol: float = TOLERANCE):
    """Place a copy of ``{0,k}^n`` for ``n = 1..N`` along a geodesic of diagrams.

    Consecutive cube origins are ``ceil((n + 1) / k)`` geodesic steps apart, and
    every prism point is chosen clear of all diagrams built before it.  The
    report checks each cube's isometry and that cubes ``n`` and ``n + 1`` are
    at least ``n + 1`` apart.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    if N > cap:
        raise SizeError(f"N = {N} exceeds cap {cap}")
    steps = [math.ceil((n + 1) / k) for n in range(1, N)]
    geodesic = geodesic_sequence(Diagram(), sum(steps), k, metric)
    origins = [0] + list(itertools.accumulate(steps))

    built = list(geodesic)
    cubes = {}
    for n, origin in zip(range(1, N + 1), origins):
        cube = cube_embedding(geodesic[origin], n, k, metric, cap=max(cap, N), context=built)
        cubes[n] = cube
        built.extend(cube.values())

    image = {f"{n}:{s}": d for n, cube in cubes.items() for s, d in cube.items()}

    worst = 0.0
    for n, cube in cubes.items():
        rep = verify_isometry(cube_vertices(k, n), cube, metric, tol)
        worst = max(worst, rep.max_isometry_deviation)

    violations, separation = [], {}
    for n in range(1, N):
        gap = min(
            wasserstein(a, b, metric).value
            for a in cubes[n].values() for b in cubes[n + 1].values()
        )
        separation[n] = gap
        if not gap >= n + 1:
            violations.append(f"cubes {n} and {n + 1} are {gap!r} apart, need at least {n + 1}")
    report = EmbeddingReport(worst, violations, worst <= tol and not violations, separation)
    return image, report

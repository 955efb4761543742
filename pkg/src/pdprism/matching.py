"""Partial matchings between labeled diagrams and the distances they induce.

Two routes compute the Wasserstein minimum:

* :func:`wasserstein_bruteforce` enumerates every partial injection and is the
  correctness oracle for small diagrams;
* :func:`wasserstein` reduces to a square assignment problem with one private
  diagonal slot per point and solves it exactly.

:func:`bottleneck` follows the same pattern with a threshold search over
candidate costs and its own enumeration oracle, :func:`bottleneck_bruteforce`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .diagram import Diagram, GroundMetric, labeled

__all__ = [
    "PartialMatching",
    "DistanceResult",
    "InvalidMatchingError",
    "SizeError",
    "matching_cost",
    "bottleneck_cost",
    "compose",
    "wasserstein",
    "wasserstein_bruteforce",
    "wasserstein_q",
    "bottleneck",
    "bottleneck_bruteforce",
    "BRUTEFORCE_CAP",
]

BRUTEFORCE_CAP = 6


class InvalidMatchingError(ValueError):
    """A matching pairs a point twice, or pairs a point outside its diagram."""

    def __init__(self, message, pair=None):
        self.pair = pair
        super().__init__(message)


class SizeError(ValueError):
    pass


@dataclass(frozen=True)
class PartialMatching:
    """A set of pairs ``(x~, y~)`` of labeled points.

    ``left`` and ``right`` optionally record the diagrams the pairs were drawn
    from; :func:`compose` uses them to reject mismatched middle diagrams.
    """

    pairs: tuple = ()
    left: Optional[Diagram] = field(default=None, compare=False)
    right: Optional[Diagram] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(sorted(tuple(p) for p in self.pairs)))

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def transpose(self) -> "PartialMatching":
        return PartialMatching([(b, a) for a, b in self.pairs], self.right, self.left)

    def check(self, lx, ly) -> None:
        """Raise :class:`InvalidMatchingError` unless this is a partial matching of ``lx`` with ``ly``."""
        sx, sy = set(lx), set(ly)
        seen_x, seen_y = set(), set()
        for a, b in self.pairs:
            if a not in sx:
                raise InvalidMatchingError(f"{a} is not a point of the first diagram", (a, b))
            if b not in sy:
                raise InvalidMatchingError(f"{b} is not a point of the second diagram", (a, b))
            if a in seen_x:
                raise InvalidMatchingError(f"{a} is matched more than once", (a, b))
            if b in seen_y:
                raise InvalidMatchingError(f"{b} is matched more than once", (a, b))
            seen_x.add(a)
            seen_y.add(b)

    def to_json(self) -> list:
        return [
            [[a.point.first, a.point.second, a.index], [b.point.first, b.point.second, b.index]]
            for a, b in self.pairs
        ]


@dataclass(frozen=True)
class DistanceResult:
    value: float
    witness: PartialMatching


def _unmatched(lx, ly, m):
    used_x = {a for a, _ in m.pairs}
    used_y = {b for _, b in m.pairs}
    return [x for x in lx if x not in used_x], [y for y in ly if y not in used_y]


def matching_cost(m: PartialMatching, dx: Diagram, dy: Diagram, metric: GroundMetric) -> float:
    """Unmatched diagonal charges on both sides plus the matched pair costs."""
    lx, ly = labeled(dx), labeled(dy)
    m.check(lx, ly)
    free_x, free_y = _unmatched(lx, ly, m)
    return math.fsum(
        [metric.diagonal_distance(p.point) for p in free_x + free_y]
        + [metric.rho(a.point, b.point) for a, b in m.pairs]
    )


def bottleneck_cost(m: PartialMatching, dx: Diagram, dy: Diagram, metric: GroundMetric) -> float:
    """Largest single charge among matched pairs and unmatched points."""
    lx, ly = labeled(dx), labeled(dy)
    m.check(lx, ly)
    free_x, free_y = _unmatched(lx, ly, m)
    costs = [metric.diagonal_distance(p.point) for p in free_x + free_y]
    costs += [metric.rho(a.point, b.point) for a, b in m.pairs]
    return max(costs, default=0.0)


def compose(mxz: PartialMatching, mzy: PartialMatching) -> PartialMatching:
    """Pairs ``(x~, y~)`` joined through a common middle point ``z~``."""
    if mxz.right is not None and mzy.left is not None and mxz.right != mzy.left:
        raise InvalidMatchingError("middle diagrams of the two matchings differ")
    forward = {z: y for z, y in mzy.pairs}
    pairs = [(x, forward[z]) for x, z in mxz.pairs if z in forward]
    return PartialMatching(pairs, mxz.left, mzy.right)


def _partial_injections(n, m):
    """Yield every partial injection {0..n-1} -> {0..m-1} as a tuple (None = unmatched)."""
    assignment = [None] * n
    used = [False] * m

    def rec(i):
        if i == n:
            yield tuple(assignment)
            return
        assignment[i] = None
        yield from rec(i + 1)
        for j in range(m):
            if not used[j]:
                used[j] = True
                assignment[i] = j
                yield from rec(i + 1)
                used[j] = False
        assignment[i] = None

    return rec(0)


def _bruteforce(dx, dy, metric, cap, combine):
    lx, ly = labeled(dx), labeled(dy)
    if len(lx) > cap or len(ly) > cap:
        raise SizeError(
            f"brute force is capped at {cap} labeled points per side, got {len(lx)} and {len(ly)}"
        )
    cx = [metric.diagonal_distance(x.point) for x in lx]
    cy = [metric.diagonal_distance(y.point) for y in ly]
    pair = [[metric.rho(x.point, y.point) for y in ly] for x in lx]

    best, best_assign = None, None
    for assign in _partial_injections(len(lx), len(ly)):
        terms = []
        taken = set()
        for i, j in enumerate(assign):
            if j is None:
                terms.append(cx[i])
            else:
                terms.append(pair[i][j])
                taken.add(j)
        terms.extend(cy[j] for j in range(len(ly)) if j not in taken)
        value = combine(terms)
        if best is None or value < best:
            best, best_assign = value, assign
    witness = PartialMatching(
        [(lx[i], ly[j]) for i, j in enumerate(best_assign) if j is not None], dx, dy
    )
    return DistanceResult(best, witness)


def wasserstein_bruteforce(dx: Diagram, dy: Diagram, metric: GroundMetric,
                           cap: int = BRUTEFORCE_CAP) -> DistanceResult:
    """Minimum matching cost by exhaustive enumeration of partial matchings."""
    return _bruteforce(dx, dy, metric, cap, math.fsum)


def bottleneck_bruteforce(dx: Diagram, dy: Diagram, convention: str = "nearest",
                          cap: int = BRUTEFORCE_CAP) -> DistanceResult:
    """Minimum over partial matchings of the largest single charge, by enumeration."""
    metric = GroundMetric(1.0, convention)
    return _bruteforce(dx, dy, metric, cap, lambda terms: max(terms, default=0.0))


def _cost_blocks(lx, ly, metric):
    """Pairwise cost matrix and per-point diagonal charges, vectorised."""
    px = np.array([x.point for x in lx], dtype=float).reshape(-1, 2)
    py = np.array([y.point for y in ly], dtype=float).reshape(-1, 2)
    diff = np.abs(px[:, None, :] - py[None, :, :])
    pair = diff.max(axis=2) ** metric.q if diff.size else np.zeros((len(lx), len(ly)))
    half = 0.5 if metric.convention == "nearest" else 1.0
    cx = (np.abs(px[:, 1] - px[:, 0]) * half) ** metric.q
    cy = (np.abs(py[:, 1] - py[:, 0]) * half) ** metric.q
    return pair, cx, cy


def _augmented_matrix(pair, cx, cy, forbidden):
    # rows: X points then Y's diagonal slots; cols: Y points then X's diagonal slots
    n, m = pair.shape
    size = n + m
    c = np.full((size, size), forbidden, dtype=float)
    c[:n, :m] = pair
    c[n:, m:] = 0.0
    idx_n = np.arange(n)
    idx_m = np.arange(m)
    c[idx_n, m + idx_n] = cx
    c[n + idx_m, idx_m] = cy
    return c


def _witness_from_rows(rows, cols, lx, ly, dx, dy):
    n, m = len(lx), len(ly)
    pairs = [(lx[r], ly[c]) for r, c in zip(rows, cols) if r < n and c < m]
    return PartialMatching(pairs, dx, dy)


def _canonical_key(d: Diagram):
    return d.total_multiplicity, tuple(d.items())


def _oriented(solver):
    # solve with the diagrams in a fixed order so that swapping arguments
    # returns the transposed witness and a bit-identical value
    def wrapper(dx, dy, *args, **kwargs):
        if _canonical_key(dy) < _canonical_key(dx):
            res = solver(dy, dx, *args, **kwargs)
            return DistanceResult(res.value, res.witness.transpose())
        return solver(dx, dy, *args, **kwargs)

    wrapper.__name__ = solver.__name__
    wrapper.__doc__ = solver.__doc__
    return wrapper


@_oriented
def wasserstein(dx: Diagram, dy: Diagram, metric: GroundMetric) -> DistanceResult:
    """Exact minimum matching cost via a diagonal-augmented assignment problem.

    With ``n`` and ``m`` labeled points, the ``(n+m) x (n+m)`` matrix offers
    each point either a partner on the other side or its own diagonal slot;
    slot-to-slot cells cost nothing.  The reported value is the cost of the
    returned witness, re-evaluated term by term.
    """
    lx, ly = labeled(dx), labeled(dy)
    if not lx and not ly:
        return DistanceResult(0.0, PartialMatching((), dx, dy))
    pair, cx, cy = _cost_blocks(lx, ly, metric)
    c = _augmented_matrix(pair, cx, cy, np.inf)
    rows, cols = linear_sum_assignment(c)
    witness = _witness_from_rows(rows, cols, lx, ly, dx, dy)
    return DistanceResult(matching_cost(witness, dx, dy, metric), witness)


def wasserstein_q(dx: Diagram, dy: Diagram, q: float, convention: str = "nearest") -> float:
    """The q-Wasserstein distance, the 1/q-th root of the minimum q-power cost."""
    metric = GroundMetric(q, convention)
    return wasserstein(dx, dy, metric).value ** (1.0 / q)


def _perfect_matching(allowed):
    graph = csr_matrix(allowed.astype(np.int8))
    match = maximum_bipartite_matching(graph, perm_type="column")
    return match if (match >= 0).all() else None


@_oriented
def bottleneck(dx: Diagram, dy: Diagram, convention: str = "nearest") -> DistanceResult:
    """Bottleneck distance with sup-norm costs (exponent 1).

    Binary search over the sorted distinct candidate charges for the smallest
    threshold admitting a perfect matching in the diagonal-augmented graph.
    """
    metric = GroundMetric(1.0, convention)
    lx, ly = labeled(dx), labeled(dy)
    if not lx and not ly:
        return DistanceResult(0.0, PartialMatching((), dx, dy))
    pair, cx, cy = _cost_blocks(lx, ly, metric)
    c = _augmented_matrix(pair, cx, cy, np.inf)
    candidates = np.unique(np.concatenate([pair.ravel(), cx, cy, [0.0]]))

    lo, hi = 0, len(candidates) - 1
    best = _perfect_matching(c <= candidates[hi])
    while lo < hi:
        mid = (lo + hi) // 2
        match = _perfect_matching(c <= candidates[mid])
        if match is None:
            lo = mid + 1
        else:
            hi, best = mid, match
    # match[row] = matched column
    rows = np.arange(len(best))
    witness = _witness_from_rows(rows, best, lx, ly, dx, dy)
    return DistanceResult(bottleneck_cost(witness, dx, dy, metric), witness)

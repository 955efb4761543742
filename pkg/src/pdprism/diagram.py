"""Ground points, diagrams, labeled diagrams and the sup-norm power cost."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple

__all__ = [
    "GroundPoint",
    "Diagram",
    "LabeledPoint",
    "GroundMetric",
    "InvalidDiagramError",
    "rho",
    "diagonal_distance",
    "labeled",
    "validate",
    "CONVENTIONS",
]

CONVENTIONS = ("nearest", "projection")


class InvalidDiagramError(ValueError):
    """Raised when diagram data violates an invariant."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class GroundPoint(NamedTuple):
    """A point of R^2, read as (birth, death)."""

    first: float
    second: float

    @property
    def on_diagonal(self) -> bool:
        return self.first == self.second


class LabeledPoint(NamedTuple):
    point: GroundPoint
    index: int


def _as_point(p) -> GroundPoint:
    if isinstance(p, GroundPoint):
        return p
    a, b = p
    return GroundPoint(float(a), float(b))


def validate(support) -> list[str]:
    """Return every invariant violated by ``support``; an empty list means valid.

    ``support`` is a mapping from (first, second) pairs to multiplicities, or an
    iterable of (first, second, multiplicity) triples.
    """
    items = support.items() if isinstance(support, Mapping) else (
        ((t[0], t[1]), t[2]) for t in support
    )
    violations = []
    for key, mult in items:
        try:
            a, b = float(key[0]), float(key[1])
        except (TypeError, ValueError, IndexError):
            violations.append(f"malformed point {key!r}")
            continue
        if not (math.isfinite(a) and math.isfinite(b)):
            violations.append(f"non-finite coordinate at ({a!r}, {b!r})")
            continue
        if a == b:
            violations.append(f"diagonal point ({a!r}, {b!r})")
        if isinstance(mult, bool) or not isinstance(mult, int):
            violations.append(f"non-integer multiplicity {mult!r} at ({a!r}, {b!r})")
        elif mult <= 0:
            violations.append(f"non-positive multiplicity {mult} at ({a!r}, {b!r})")
    return violations


class Diagram(Mapping):
    """Finitely supported multiplicity function on R^2, zero on the diagonal.

    Behaves as a read-only mapping ``GroundPoint -> int``.  Repeated points in
    the constructor input accumulate multiplicity.

    >>> d = Diagram({(0, 2): 2})
    >>> d.total_multiplicity
    2
    """

    __slots__ = ("_support", "_hash")

    def __init__(self, support=()):
        if isinstance(support, Diagram):
            self._support = support._support
            self._hash = support._hash
            return
        if isinstance(support, Mapping):
            items = list(support.items())
        else:
            items = []
            for entry in support:
                if len(entry) == 3:
                    items.append(((entry[0], entry[1]), entry[2]))
                else:
                    items.append((entry, 1))
        try:
            triples = [(key[0], key[1], mult) for key, mult in items]
        except (TypeError, IndexError):
            raise InvalidDiagramError([f"malformed input {support!r}"]) from None
        violations = validate(triples)
        if violations:
            raise InvalidDiagramError(violations)
        acc: dict[GroundPoint, int] = {}
        for key, mult in items:
            p = _as_point(key)
            acc[p] = acc.get(p, 0) + int(mult)
        self._support = dict(sorted(acc.items()))
        self._hash = None

    @classmethod
    def from_points(cls, points: Iterable) -> "Diagram":
        """Build a diagram from (first, second) pairs, one unit of multiplicity each."""
        return cls([(p[0], p[1], 1) for p in points])

    def __getitem__(self, p) -> int:
        return self._support.get(_as_point(p), 0)

    def __contains__(self, p) -> bool:
        try:
            return _as_point(p) in self._support
        except (TypeError, ValueError):
            return False

    def __iter__(self):
        return iter(self._support)

    def __len__(self) -> int:
        return len(self._support)

    def __eq__(self, other) -> bool:
        if isinstance(other, Diagram):
            return self._support == other._support
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._support.items()))
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join(f"({p.first!r}, {p.second!r}): {m}" for p, m in self._support.items())
        return f"Diagram({{{body}}})"

    def __add__(self, other) -> "Diagram":
        if not isinstance(other, Diagram):
            return NotImplemented
        acc = dict(self._support)
        for p, m in other._support.items():
            acc[p] = acc.get(p, 0) + m
        return Diagram(acc)

    @property
    def total_multiplicity(self) -> int:
        return sum(self._support.values())

    def coordinates(self) -> list[float]:
        return [c for p in self._support for c in p]

    def to_json(self) -> dict:
        return {"points": [[p.first, p.second, m] for p, m in self._support.items()]}

    @classmethod
    def from_json(cls, payload) -> "Diagram":
        if not isinstance(payload, Mapping) or "points" not in payload:
            raise InvalidDiagramError(['expected an object with a "points" array'])
        rows = payload["points"]
        if not isinstance(rows, list):
            raise InvalidDiagramError(['"points" must be an array'])
        bad = [r for r in rows if not (isinstance(r, list) and len(r) == 3)]
        if bad:
            raise InvalidDiagramError([f"malformed entry {bad[0]!r}: expected [first, second, multiplicity]"])
        return cls([tuple(r) for r in rows])


def labeled(d: Diagram) -> tuple[LabeledPoint, ...]:
    """Expand ``d`` into labeled points ``(x, i)`` with ``1 <= i <= d(x)``."""
    return tuple(LabeledPoint(p, i) for p, m in d.items() for i in range(1, m + 1))


@dataclass(frozen=True)
class GroundMetric:
    """Cost ``rho(x, y) = ||x - y||_inf ** q`` and the diagonal charge.

    ``convention="nearest"`` charges an unmatched point its infimum cost to the
    diagonal, ``(|b - a| / 2) ** q``.  ``"projection"`` charges ``|b - a| ** q``,
    the full persistence.
    """

    q: float = 1.0
    convention: str = "nearest"

    def __post_init__(self):
        if not (isinstance(self.q, (int, float)) and math.isfinite(self.q) and self.q > 0):
            raise ValueError(f"q must be a positive finite real, got {self.q!r}")
        if self.convention not in CONVENTIONS:
            raise ValueError(f"convention must be one of {CONVENTIONS}, got {self.convention!r}")

    def rho(self, x, y) -> float:
        return max(abs(x[0] - y[0]), abs(x[1] - y[1])) ** self.q

    def diagonal_distance(self, x) -> float:
        gap = abs(x[1] - x[0])
        if self.convention == "nearest":
            gap = gap / 2
        return gap ** self.q

    def persistence_for(self, k: float) -> float:
        """Persistence ``h`` such that a point ``(a, a + h)`` has diagonal charge ``k``."""
        h = k ** (1.0 / self.q)
        return 2 * h if self.convention == "nearest" else h


def rho(metric: GroundMetric, x, y) -> float:
    if isinstance(x, LabeledPoint):
        x = x.point
    if isinstance(y, LabeledPoint):
        y = y.point
    return metric.rho(x, y)


def diagonal_distance(metric: GroundMetric, x) -> float:
    if isinstance(x, LabeledPoint):
        x = x.point
    return metric.diagonal_distance(x)

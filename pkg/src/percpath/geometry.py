"""Geometry of Z^d restricted to a finite box.

Points are plain integer tuples.  Edges carry a canonical orientation
(the endpoint with the smaller l1 norm comes first) and a global index
given by lexicographic order of (anchor point, axis, direction); both
directions can be anchored at the same point when the anchor sits on a
coordinate hyperplane, in which case the negative direction sorts first.
Geometry is always recomputed from coordinates, never cached per edge.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import NonAdjacent, OutOfBox

Point = tuple[int, ...]


def l1(p: Sequence[int]) -> int:
    return sum(abs(c) for c in p)


def linf(p: Sequence[int]) -> int:
    return max(abs(c) for c in p)


def sub(a: Point, b: Point) -> Point:
    return tuple(x - y for x, y in zip(a, b))


def add(a: Point, b: Point) -> Point:
    return tuple(x + y for x, y in zip(a, b))


def unit(d: int, axis: int, sign: int = 1) -> Point:
    return tuple(sign if i == axis else 0 for i in range(d))


@dataclass(frozen=True)
class BoxSpec:
    """The box of l-infinity radius ``radius`` around ``center``."""

    center: Point
    radius: int

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("box radius must be non-negative")

    @property
    def d(self) -> int:
        return len(self.center)

    def contains(self, v: Point) -> bool:
        return linf(sub(v, self.center)) <= self.radius

    def contains_box(self, other: "BoxSpec") -> bool:
        return linf(sub(other.center, self.center)) + other.radius <= self.radius

    def vertices(self) -> Iterator[Point]:
        def rec(prefix, k):
            if k == self.d:
                yield tuple(prefix)
                return
            c = self.center[k]
            for t in range(c - self.radius, c + self.radius + 1):
                yield from rec(prefix + [t], k + 1)

        yield from rec([], 0)

    def boundary(self) -> list[Point]:
        """The shell Lambda_t minus Lambda_{t-1}."""
        return [
            v
            for v in self.vertices()
            if linf(sub(v, self.center)) == self.radius
        ]

    def vertex_count(self) -> int:
        return (2 * self.radius + 1) ** self.d


@dataclass(frozen=True)
class EdgeId:
    """Canonically oriented nearest-neighbor edge with its global index."""

    x_e: Point
    y_e: Point
    index: int

    @property
    def d(self) -> int:
        return len(self.x_e)

    @property
    def axis(self) -> int:
        for i, (a, b) in enumerate(zip(self.x_e, self.y_e)):
            if a != b:
                return i
        raise AssertionError("degenerate edge")

    def endpoints(self) -> tuple[Point, Point]:
        return self.x_e, self.y_e


def orient(a: Point, b: Point) -> tuple[Point, Point]:
    """Order a nearest-neighbor pair so the smaller l1 norm comes first."""
    if l1(sub(a, b)) != 1:
        raise NonAdjacent(f"{a} and {b} are not nearest neighbors")
    return (a, b) if l1(a) < l1(b) else (b, a)


# An edge is anchored at its smaller-l1-norm endpoint.  Stepping -1 from
# absolute coordinate t increases |t| iff t <= 0 (and the neighbor must
# stay in the box: rel > -r); stepping +1 increases |t| iff t >= 0 (rel < r).
# rel is the coordinate relative to the box center, t = rel + center.


def _cminus(rel: int, c: int, r: int) -> int:
    return 1 if rel + c <= 0 and rel > -r else 0


def _cplus(rel: int, c: int, r: int) -> int:
    return 1 if rel + c >= 0 and rel < r else 0


def _c(rel: int, c: int, r: int) -> int:
    return _cminus(rel, c, r) + _cplus(rel, c, r)


def _csum(rel: int, c: int, r: int) -> int:
    """Sum of _c over s in [-r, rel-1]."""
    cm = max(0, min(rel - 1, -c) + r)
    cp = max(0, min(rel - 1, r - 1) - max(-r, -c) + 1)
    return cm + cp


def _cfull(c: int, r: int) -> int:
    return _csum(r + 1, c, r)


def edge_index(x: Point, axis: int, sign: int, box: BoxSpec) -> int:
    """Position of the edge anchored at x along (axis, sign) in the global
    enumeration of ``box`` (lexicographic by anchor, then axis, negative
    direction first)."""
    r = box.radius
    d = box.d
    rel = sub(x, box.center)
    ctr = box.center
    m = 2 * r + 1
    before = 0
    prefix_c = 0
    for k in range(d):
        nk = rel[k] + r  # digit values preceding x at position k
        block = m ** (d - 1 - k)
        before += nk * block * prefix_c
        before += block * _csum(rel[k], ctr[k], r)
        if d - 1 - k > 0:
            tail_full = sum(_cfull(ctr[j], r) for j in range(k + 1, d))
            before += nk * tail_full * m ** (d - 2 - k)
        prefix_c += _c(rel[k], ctr[k], r)
    off = sum(_c(rel[a], ctr[a], r) for a in range(axis))
    if sign > 0:
        off += _cminus(rel[axis], ctr[axis], r)
    return before + off


def canonical_edge(a: Point, b: Point, box: BoxSpec) -> EdgeId:
    """Canonical representation and global index of the edge {a, b}."""
    if not (box.contains(a) and box.contains(b)):
        raise OutOfBox(f"edge {a}-{b} leaves the box {box}")
    x, y = orient(a, b)
    diff = sub(y, x)
    axis = next(i for i, t in enumerate(diff) if t != 0)
    return EdgeId(x, y, edge_index(x, axis, diff[axis], box))


def enumerate_edges(box: BoxSpec) -> list[EdgeId]:
    """All edges of the box in canonical enumeration order."""
    r = box.radius
    out: list[EdgeId] = []
    for x in box.vertices():
        rel = sub(x, box.center)
        for axis in range(box.d):
            t = rel[axis]
            c = box.center[axis]
            if _cminus(t, c, r):
                y = add(x, unit(box.d, axis, -1))
                out.append(EdgeId(x, y, len(out)))
            if _cplus(t, c, r):
                y = add(x, unit(box.d, axis, 1))
                out.append(EdgeId(x, y, len(out)))
    return out


def edge_box(e: EdgeId, radius: int) -> BoxSpec:
    """Lambda_radius(e), anchored at the canonical endpoint x_e."""
    return BoxSpec(e.x_e, radius)


def edge_dist_inf(e: EdgeId, f: EdgeId) -> int:
    return linf(sub(e.x_e, f.x_e))


def edge_point_dist_inf(e: EdgeId, x: Point) -> int:
    return linf(sub(e.x_e, x))


@dataclass(frozen=True)
class AnnulusSpec:
    """A_N(e) = Lambda_{3N}(e) minus Lambda_N(e)."""

    edge: EdgeId
    N: int

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("annulus scale must be positive")

    @property
    def inner(self) -> BoxSpec:
        return edge_box(self.edge, self.N)

    @property
    def outer(self) -> BoxSpec:
        return edge_box(self.edge, 3 * self.N)

    def contains(self, v: Point) -> bool:
        t = linf(sub(v, self.edge.x_e))
        return self.N < t <= 3 * self.N


class AnnulusMembers:
    """Membership predicate plus the two boundary shells of an annulus."""

    def __init__(self, spec: AnnulusSpec, domain: BoxSpec):
        if not domain.contains_box(spec.outer):
            raise OutOfBox("annulus outer box leaves the simulation domain")
        self.spec = spec
        self.inner_shell = spec.inner.boundary()
        self.outer_shell = spec.outer.boundary()

    def contains(self, v: Point) -> bool:
        return self.spec.contains(v)


def annulus_members(spec: AnnulusSpec, domain: BoxSpec) -> AnnulusMembers:
    return AnnulusMembers(spec, domain)

"""Chemical distance, truncated passage time, clusters, and geodesics.

Distances are exact integers; passage times are (unit, heavy) integer
pairs compared through the scaled representation from the engine, so no
floating point ever enters a shortest-path comparison.  Geodesic
extraction walks backward from the target choosing, among optimal
predecessors, the lexicographically smallest point; with the scaled
weights this also realizes the fewer-heavy-edges preference, since equal
scaled cost forces equal heavy count.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .config import EdgeConfig
from .engine import (
    SCALE,
    Window,
    heavy_weight_scaled,
    run_bfs,
    run_dijkstra,
    run_labels,
)
from .errors import (
    EmptyCluster,
    EmptySources,
    NonAdjacent,
    UnreachableTarget,
)
from .geometry import BoxSpec, Point, l1, linf, sub, unit


class _Unreachable:
    """Distance marker for vertices with no admissible path; arithmetic
    with it is a bug, not a saturating value."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Unreachable"

    def _refuse(self, *args):
        raise TypeError("arithmetic with Unreachable")

    __add__ = __radd__ = __sub__ = __rsub__ = _refuse
    __mul__ = __rmul__ = _refuse
    __lt__ = __le__ = __gt__ = __ge__ = _refuse


Unreachable = _Unreachable()


@dataclass(frozen=True)
class PassagePair:
    """Passage time as an integer pair; value() = unit + heavy * w."""

    unit_edges: int
    heavy_edges: int
    w: float

    def value(self) -> float:
        return self.unit_edges + self.heavy_edges * self.w

    def scaled(self) -> int:
        return self.unit_edges * SCALE + self.heavy_edges * heavy_weight_scaled(
            self.w
        )

    def _key(self):
        return (self.scaled(), self.heavy_edges)

    def __lt__(self, other):
        return self._key() < other._key()

    def __le__(self, other):
        return self._key() <= other._key()


@dataclass(frozen=True)
class PathRep:
    """Self-avoiding nearest-neighbor vertex sequence."""

    vertices: tuple[Point, ...]

    def __post_init__(self):
        vs = self.vertices
        if not vs:
            raise ValueError("empty path")
        for a, b in zip(vs, vs[1:]):
            if l1(sub(a, b)) != 1:
                raise NonAdjacent(f"{a} and {b} are not nearest neighbors")
        if len(set(vs)) != len(vs):
            raise ValueError("path is not self-avoiding")

    def __len__(self) -> int:
        return len(self.vertices) - 1  # edge count

    @property
    def start(self) -> Point:
        return self.vertices[0]

    @property
    def end(self) -> Point:
        return self.vertices[-1]

    def edges(self) -> Iterable[tuple[Point, Point]]:
        return zip(self.vertices, self.vertices[1:])

    def subpath(self, a: Point, b: Point) -> "PathRep":
        i = self.vertices.index(a)
        j = self.vertices.index(b)
        if i > j:
            raise ValueError(f"{a} does not precede {b} on the path")
        return PathRep(self.vertices[i : j + 1])

    def concat(self, other: "PathRep") -> "PathRep":
        if self.end != other.start:
            raise ValueError("concatenation endpoints do not match")
        return loop_erase(self.vertices + other.vertices[1:])

    def __matmul__(self, other):
        return self.concat(other)

    def reverse(self) -> "PathRep":
        return PathRep(tuple(reversed(self.vertices)))


def loop_erase(vertices: Sequence[Point]) -> PathRep:
    """Keep the earliest visit of each vertex; never lengthens the walk."""
    out: list[Point] = []
    seen: dict[Point, int] = {}
    for v in vertices:
        if v in seen:
            del out[seen[v] + 1 :]
            for w in list(seen):
                if seen[w] > seen[v]:
                    del seen[w]
        else:
            seen[v] = len(out)
            out.append(v)
    return PathRep(tuple(out))


MaskLike = Optional[object]  # None | BoxSpec | callable point -> bool


def full_window(cfg: EdgeConfig) -> Window:
    """Domain-spanning window, cached per configuration."""
    cached = getattr(cfg, "_full_window", None)
    if cached is None:
        cached = Window(cfg, cfg.domain)
        cfg._full_window = cached
    return cached


def _resolve_mask(window: Window, U: MaskLike):
    if U is None:
        return None
    if isinstance(U, BoxSpec):
        return window.box_mask(U)
    if callable(U):
        return window.mask_from_predicate(U)
    return np.ascontiguousarray(U, dtype=np.uint8)


class DistanceField:
    """Per-vertex distances from a source set over one window."""

    def __init__(self, window, sources, kind, dist, unit_arr=None, heavy_arr=None, w=None):
        self.window = window
        self.sources = tuple(sources)
        self.kind = kind  # 'D' or 'T'
        self._dist = dist
        self._unit = unit_arr
        self._heavy = heavy_arr
        self.w = w

    def distance(self, v: Point):
        lv = self.window.lvid(v)
        raw = self._dist[lv]
        if raw < 0:
            return Unreachable
        if self.kind == "D":
            return int(raw)
        return PassagePair(int(self._unit[lv]), int(self._heavy[lv]), self.w)

    def reachable(self, v: Point) -> bool:
        return self._dist[self.window.lvid(v)] >= 0


def bfs_distance(cfg: EdgeConfig, U: MaskLike, sources: Iterable[Point], window: Optional[Window] = None, target: Optional[Point] = None) -> DistanceField:
    """Exact chemical distance over open edges restricted to U."""
    sources = list(sources)
    if not sources:
        raise EmptySources("no source vertices")
    if window is None:
        window = full_window(cfg)
    mask = _resolve_mask(window, U)
    src = [window.lvid(s) for s in sources]
    tgt = window.lvid(target) if target is not None else -1
    dist, _pred = run_bfs(window, src, mask=mask, target=tgt)
    field = DistanceField(window, sources, "D", dist)
    field._mask = mask
    return field


def truncated_T(cfg: EdgeConfig, U: MaskLike, source: Point, window: Optional[Window] = None, target: Optional[Point] = None) -> DistanceField:
    """Exact shortest passage time under weights {1, W} restricted to U."""
    if window is None:
        window = full_window(cfg)
    mask = _resolve_mask(window, U)
    w = cfg.params.W
    tgt = window.lvid(target) if target is not None else -1
    dist, unit_arr, heavy_arr = run_dijkstra(
        window, window.lvid(source), heavy_weight_scaled(w), mask=mask, target=tgt
    )
    field = DistanceField(window, [source], "T", dist, unit_arr, heavy_arr, w)
    field._mask = mask
    return field


def _bond_open(window: Window, a: Point, b: Point) -> bool:
    axis = next(i for i, (x, y) in enumerate(zip(a, b)) if x != y)
    low = a if a[axis] < b[axis] else b
    return bool(window.open_loc()[axis, window.lvid(low)])


def extract_geodesic(field: DistanceField, target: Point) -> PathRep:
    """Deterministic shortest path by backward walk: among predecessors
    achieving the optimal cost, take the lexicographically smallest."""
    window = field.window
    dist = field._dist
    mask = getattr(field, "_mask", None)
    lv = window.lvid(target)
    if dist[lv] < 0:
        raise UnreachableTarget(f"{target} not reached")
    if field.kind == "T":
        hw = heavy_weight_scaled(field.w)
    out = [target]
    v = target
    while dist[window.lvid(v)] > 0:
        dv = dist[window.lvid(v)]
        best = None
        for axis in range(window.d):
            for sign in (1, -1):
                u = tuple(
                    c + (sign if k == axis else 0) for k, c in enumerate(v)
                )
                if not window.contains(u):
                    continue
                lu = window.lvid(u)
                if mask is not None and not mask[lu]:
                    continue
                du = dist[lu]
                if du < 0:
                    continue
                is_open = _bond_open(window, u, v)
                if field.kind == "D":
                    if not is_open or du != dv - 1:
                        continue
                else:
                    step = SCALE if is_open else hw
                    if du + step != dv:
                        continue
                if best is None or u < best:
                    best = u
        assert best is not None, "backward walk lost the optimal chain"
        out.append(best)
        v = best
    return PathRep(tuple(reversed(out)))


class ClusterLabels:
    """Open-cluster component ids over a window."""

    def __init__(self, window: Window):
        self.window = window
        labels, count = run_labels(window)
        self.labels = labels
        self.count = count
        self.sizes = np.bincount(labels, minlength=count)
        self.largest = int(np.argmax(self.sizes))

    def label(self, v: Point) -> int:
        return int(self.labels[self.window.lvid(v)])

    def same_cluster(self, a: Point, b: Point) -> bool:
        return self.label(a) == self.label(b)

    def largest_size(self) -> int:
        return int(self.sizes[self.largest])


def cluster_labels(cfg: EdgeConfig, window: Optional[Window] = None) -> ClusterLabels:
    if window is None:
        if not cfg.overrides and getattr(cfg, "_labels_cache", None) is not None:
            return cfg._labels_cache
        window = full_window(cfg)
        out = ClusterLabels(window)
        if not cfg.overrides:
            cfg._labels_cache = out
        return out
    return ClusterLabels(window)


def regularize(cfg: EdgeConfig, x: Point, labels: Optional[ClusterLabels] = None) -> Point:
    """Nearest vertex (l-infinity) of the largest-cluster proxy; ties
    broken lexicographically.  Idempotent by construction."""
    if labels is None:
        labels = cluster_labels(cfg)
    if labels.largest_size() <= 1:
        raise EmptyCluster("largest open cluster is trivial")
    window = labels.window
    want = labels.largest
    R = cfg.grid.radius
    max_t = max(abs(c) + R for c in x)
    for t in range(max_t + 1):
        best = None
        for v in _shell(x, t):
            if window.contains(v) and labels.labels[window.lvid(v)] == want:
                if best is None or v < best:
                    best = v
        if best is not None:
            return best
    raise EmptyCluster("proxy cluster not found in domain")


def _shell(x: Point, t: int):
    """Vertices at l-infinity distance exactly t from x."""
    d = len(x)
    if t == 0:
        yield x
        return

    def rec(prefix, k, tight):
        if k == d:
            if tight:
                yield tuple(prefix)
            return
        for off in range(-t, t + 1):
            yield from rec(prefix + [x[k] + off], k + 1, tight or abs(off) == t)

    yield from rec([], 0, False)


def D_star(cfg: EdgeConfig) -> int:
    x0 = regularize(cfg, (0,) * cfg.params.d)
    x1 = regularize(cfg, _endpoint(cfg))
    field = bfs_distance(cfg, None, [x0], target=x1)
    dist = field.distance(x1)
    assert dist is not Unreachable  # both in the proxy cluster
    return dist


def T_star(cfg: EdgeConfig) -> PassagePair:
    x0 = regularize(cfg, (0,) * cfg.params.d)
    x1 = regularize(cfg, _endpoint(cfg))
    field = truncated_T(cfg, None, x0, target=x1)
    return field.distance(x1)


def T_n(cfg: EdgeConfig) -> PassagePair:
    src = (0,) * cfg.params.d
    tgt = _endpoint(cfg)
    field = truncated_T(cfg, None, src, target=tgt)
    return field.distance(tgt)


def _endpoint(cfg: EdgeConfig) -> Point:
    p = cfg.params
    return (p.n,) + (0,) * (p.d - 1)


def d_and_t_star(cfg: EdgeConfig) -> tuple[int, PassagePair]:
    """D*_n and T* on shared regularized endpoints, with T* <= D*_n
    asserted (an open geodesic is itself a passage path)."""
    x0 = regularize(cfg, (0,) * cfg.params.d)
    x1 = regularize(cfg, _endpoint(cfg))
    dstar = bfs_distance(cfg, None, [x0], target=x1).distance(x1)
    tstar = truncated_T(cfg, None, x0, target=x1).distance(x1)
    assert tstar.value() <= dstar + 1e-9
    return dstar, tstar


def crossing_check(cfg: EdgeConfig, box: BoxSpec) -> bool:
    """True iff a single open cluster inside the box touches both
    opposite faces in every coordinate direction."""
    window = Window(cfg, box)
    labels, count = run_labels(window)
    if count == 0:
        return False
    shaped = labels.reshape(window.sizes)
    ok = np.ones(count, dtype=bool)
    for axis in range(window.d):
        lo = np.take(shaped, 0, axis=axis).reshape(-1)
        hi = np.take(shaped, window.sizes[axis] - 1, axis=axis).reshape(-1)
        onface = np.zeros(count, dtype=bool)
        onface[np.unique(lo)] = True
        both = np.zeros(count, dtype=bool)
        hi_labels = np.unique(hi)
        both[hi_labels] = onface[hi_labels]
        ok &= both
    # exclude singleton labels that only "cross" a radius-0 direction
    if box.radius == 0:
        return False
    return bool(ok.any())


def path_weight(cfg: EdgeConfig, path: PathRep) -> PassagePair:
    """Cost of a path edge-by-edge under the current configuration."""
    window = full_window(cfg)
    u = 0
    h = 0
    for a, b in path.edges():
        if _bond_open(window, a, b):
            u += 1
        else:
            h += 1
    return PassagePair(u, h, cfg.params.W)


def path_is_open(cfg: EdgeConfig, path: PathRep, window: Optional[Window] = None) -> bool:
    if window is None:
        window = full_window(cfg)
    return all(_bond_open(window, a, b) for a, b in path.edges())

"""Effective-radius checkers: the exact pairwise event on the 3N/4N
boxes, the good-box certificate, and the per-path empirical radius that
certifies an actual bypass for one edge of one path.

Two radius notions are produced and always labeled in outputs:

* PerPath — the smallest N at which the bypass construction for a given
  (path, edge) pair succeeds, with the open connector as witness.
* GoodBox — the smallest N at which the good-box certificate holds, an
  upper bound for the bypass-feasibility radius of every path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .config import EdgeConfig
from .distances import DistanceField, PathRep, extract_geodesic, full_window
from .engine import (
    Window,
    run_ball_scan,
    run_bfs,
    run_labels,
    run_tile_flags,
)
from .errors import NoCrossing, OutOfBox, RhoTooLargeForN
from .geometry import AnnulusSpec, BoxSpec, EdgeId, Point

CASE_INTERIOR = "Interior"
CASE_ENDPOINT_2A = "Endpoint2a"
CASE_ENDPOINT_2B = "Endpoint2b"

METHOD_PER_PATH = "PerPath"
METHOD_GOOD_BOX = "GoodBox"


@dataclass(frozen=True)
class RadiusRecord:
    """Empirical effective radius of one edge.

    For PerPath records the witness is the open connector: inside the
    annulus with length <= c_star_op*N in the interior case, inside the
    4N box with length <= 2*c_star_op*N in the endpoint cases.  N is
    None when no radius up to n_max certified a bypass.
    """

    edge: EdgeId
    N: Optional[int]
    method: str
    witness: Optional[PathRep] = None
    case_tag: Optional[str] = None
    n_max: int = 0

    @property
    def found(self) -> bool:
        return self.N is not None


@dataclass(frozen=True)
class GoodBoxReport:
    edge: EdgeId
    N: int
    n_rho: int
    subbox_side: int
    pair_scale: int
    pair_budget: int
    tile_crossings: bool  # (i)
    box_pairs: bool  # (ii)
    annulus_pairs: bool  # (iii)
    big_attached: bool  # (iv) surrogate

    @property
    def good(self) -> bool:
        return (
            self.tile_crossings
            and self.box_pairs
            and self.annulus_pairs
            and self.big_attached
        )


def _box4(e: EdgeId, N: int) -> BoxSpec:
    return BoxSpec(e.x_e, 4 * N)


def _box3(e: EdgeId, N: int) -> BoxSpec:
    return BoxSpec(e.x_e, 3 * N)


def _require_inside(cfg: EdgeConfig, box: BoxSpec):
    if not cfg.domain.contains_box(box):
        raise OutOfBox(f"{box} leaves the simulation domain")


def check_V2(cfg: EdgeConfig, e: EdgeId, N: int, bound: Optional[float] = None) -> bool:
    """True iff every pair x, y in the 3N box that is connected inside
    the 3N box satisfies D over the 4N box <= bound (default
    c_star_op * N).  Exact, via per-cluster eccentricity with a
    per-vertex fallback."""
    if bound is None:
        bound = cfg.params.c_star_op * N
    box4 = _box4(e, N)
    _require_inside(cfg, box4)
    win = Window(cfg, box4)
    core = win.box_mask(_box3(e, N)).astype(bool)
    l3 = _labels_restricted(win, core)
    for lab in np.unique(l3[core]):
        members = np.flatnonzero(core & (l3 == lab))
        if members.size <= 1:
            continue
        rep = int(members[0])
        dist, _ = run_bfs(win, [rep])
        ecc = int(dist[members].max())
        assert dist[members].min() >= 0  # connected inside the 3N box
        if ecc > bound:
            return False
        if 2 * ecc <= bound:
            continue
        for v in members[1:]:
            dist, _ = run_bfs(win, [int(v)])
            if dist[members].max() > bound:
                return False
    return True


def _labels_restricted(win: Window, core: np.ndarray) -> np.ndarray:
    """Connected-component labels over open bonds with both endpoints in
    core, computed by masking the bond arrays."""
    open_loc, strides, sizes = win.kernel_args()
    masked = open_loc.copy()
    for a in range(win.d):
        shifted = np.zeros_like(core)
        flat = core.reshape(win.sizes)
        dst = shifted.reshape(win.sizes)
        idx_src = [slice(None)] * win.d
        idx_dst = [slice(None)] * win.d
        idx_src[a] = slice(1, None)
        idx_dst[a] = slice(0, -1)
        dst[tuple(idx_dst)] = flat[tuple(idx_src)]
        masked[a] &= core & shifted
    sub_win = _MaskedBonds(win, masked)
    labels, _ = run_labels(sub_win)
    return labels


class _MaskedBonds:
    """Window stand-in whose bond arrays were overridden."""

    def __init__(self, win: Window, open_loc):
        self._win = win
        self._open = open_loc
        self.nloc = win.nloc
        self.d = win.d
        self.sizes = win.sizes

    def kernel_args(self):
        return self._open, self._win._strides_arr, self._win._sizes_arr


PAIR_SCALE_DEFAULT = 2

# Local-pair distance budget min(dmax, round(BASE + LIN*N + LOG*ln(6N+1))).
# The log term tracks the growth of the maximum over the 3N box of the
# per-vertex pair distance (an extreme of a field with an exponential
# tail grows like its log-volume), and the linear term thins the
# survivors at a steady extra rate, so batch survival curves decay
# log-linearly instead of collapsing at one transition scale.
# Constants calibrated at d=2, p=0.7 and validated on a held-out seed.
PAIR_BUDGET_BASE = 8.0
PAIR_BUDGET_LINEAR = 0.4
PAIR_BUDGET_LOG = 4.0


def operational_subbox_side(N: int) -> int:
    """Crossing-tile side used when none is given: a fixed side, shrunk
    only when the 3N box cannot hold it.

    The derived value floor(N / (16 rho^2)) is reported but never usable
    at reachable scales: small sides make the crossing requirement fail
    in some tile with probability near one.  A fixed moderate side keeps
    the per-tile failure rate negligible at every scale, leaving the
    pair condition as the binding one."""
    return max(2, min(16, 3 * N))


def pair_distance_cap(cfg: EdgeConfig, pair_scale: int) -> int:
    """Largest chemical-distance budget 4 * rho * pair_scale considered
    for local pairs; also the l-infinity reach of the per-vertex scan."""
    return math.floor(4 * cfg.params.rho * pair_scale)


def pair_budget(cfg: EdgeConfig, N: int, pair_scale: int) -> int:
    """Distance budget for local pairs at scale N, saturating at the cap
    4 * rho * pair_scale."""
    cap = pair_distance_cap(cfg, pair_scale)
    raw = (
        PAIR_BUDGET_BASE
        + PAIR_BUDGET_LINEAR * N
        + PAIR_BUDGET_LOG * math.log(6 * N + 1)
    )
    return min(cap, int(round(raw)))


def check_goodbox(
    cfg: EdgeConfig,
    e: EdgeId,
    N: int,
    subbox_side: Optional[int] = None,
    pair_scale: Optional[int] = None,
) -> GoodBoxReport:
    """Good-box certificate at scale N.

    With m the tile side, s the pair scale, dmax = 4*rho*s the scan
    reach, and L = pair_budget(N) the per-scale distance budget:
      (i)   every complete side-m tile of the grid aligned to the domain
            corner that lies inside the 3N box has an open crossing
            cluster;
      (ii)  for every x in the 3N box, component vertices within l-inf
            distance 2s of x inside the l-inf ball of radius dmax around
            x are at in-ball graph distance <= L;
      (iii) same for x deep inside the annulus, where the ball sits
            entirely inside the annulus;
      (iv)  every x in the 3N box whose local component reaches l-inf
            distance >= m belongs to a component meeting some
            crossing cluster of the side-s tiling.
    Balls are clipped by the simulation domain only, so the certificate
    reads at most Lambda_{3N + dmax + s}(e); the 4N box must still sit
    inside the domain."""
    rho = cfg.params.rho
    n_rho = math.floor(N / (16 * rho * rho))
    m = operational_subbox_side(N) if subbox_side is None else subbox_side
    s = PAIR_SCALE_DEFAULT if pair_scale is None else pair_scale
    if m < 2 or s < 2:
        raise RhoTooLargeForN(f"scales ({m}, {s}) must be >= 2")
    if m > 3 * N:
        raise RhoTooLargeForN(f"tile side {m} exceeds the 3N window")
    _require_inside(cfg, _box4(e, N))
    dmax = pair_distance_cap(cfg, s)
    budget = pair_budget(cfg, N, s)
    reach = BoxSpec(e.x_e, 3 * N + dmax + s)
    if cfg.domain.contains_box(reach):
        win = Window(cfg, reach)
    else:
        win = full_window(cfg)
    flag_i = _flag_i_windowed(cfg, win, e, N, m)
    _, vmask = run_tile_flags(win, s, _tile_offset(win, s))
    core = win.box_mask(_box3(e, N))
    req, spread, touch = run_ball_scan(win, core, 2 * s, dmax, vmask)
    core_b = core.astype(bool)
    flag_ii = bool((req[core_b] <= budget).all())
    t = _linf_to_center(win, e.x_e)
    deep = core_b & (t >= N + 1 + dmax) & (t <= 3 * N - dmax)
    flag_iii = bool((req[deep] <= budget).all()) if deep.any() else True
    flag_iv = not bool((core_b & (spread >= m) & (touch == 0)).any())
    return GoodBoxReport(
        edge=e,
        N=N,
        n_rho=n_rho,
        subbox_side=m,
        pair_scale=s,
        pair_budget=budget,
        tile_crossings=flag_i,
        box_pairs=flag_ii,
        annulus_pairs=flag_iii,
        big_attached=flag_iv,
    )


def _tile_offset(win: Window, m: int) -> np.ndarray:
    """Window-local origin shift aligning side-m tiles to the domain
    lower corner."""
    R = win.cfg.grid.radius
    return np.array([(m - ((l + R) % m)) % m for l in win.lo], dtype=np.int64)


def _flag_i_windowed(cfg, win, e, N, m):
    grid, _ = run_tile_flags(win, m, _tile_offset(win, m))
    base = [l + int(o) for l, o in zip(win.lo, _tile_offset(win, m))]
    sel = _tile_range(grid.shape, base, m, e, N)
    if sel is None:
        return True
    return bool(grid[sel].all())


def _tile_range(shape, base, m, e, N):
    """Index slices of the tiles lying fully inside the 3N box, or None
    when no complete tile fits."""
    sel = []
    for k in range(len(shape)):
        jlo = max(0, -((e.x_e[k] - 3 * N - base[k]) // -m))
        jhi = min(shape[k] - 1, (e.x_e[k] + 3 * N - m + 1 - base[k]) // m)
        if jlo > jhi:
            return None
        sel.append(slice(jlo, jhi + 1))
    return tuple(sel)


def _goodbox_quick(cfg, e, N, m, s) -> bool:
    """Good-box decision with the cheap crossing-tile condition checked
    first; same outcome as check_goodbox(...).good."""
    win3 = Window(cfg, _box3(e, N))
    if not _flag_i_windowed(cfg, win3, e, N, m):
        return False
    return check_goodbox(cfg, e, N, m, s).good


class _PrefixSum:
    """d-dimensional inclusive box sums via padded cumulative sums."""

    def __init__(self, arr: np.ndarray):
        s = arr.astype(np.int64)
        for ax in range(arr.ndim):
            s = s.cumsum(axis=ax)
        self._p = np.pad(s, [(1, 0)] * arr.ndim)
        self.shape = arr.shape

    def box(self, lo, hi) -> int:
        d = len(self.shape)
        lo = [max(0, l) for l in lo]
        hi = [min(n - 1, h) for n, h in zip(self.shape, hi)]
        if any(l > h for l, h in zip(lo, hi)):
            return 0
        total = 0
        for corner in range(1 << d):
            sign = 1
            idx = []
            for k in range(d):
                if corner >> k & 1:
                    idx.append(lo[k])
                    sign = -sign
                else:
                    idx.append(hi[k] + 1)
            total += sign * int(self._p[tuple(idx)])
        return total


class GoodBoxCache:
    """One domain-wide survey reused across edges and scales.

    The per-vertex ball scan and the tile passes run once over the whole
    domain; per-edge flags reduce to prefix-sum box counts over the
    per-vertex required distance req.  Balls are clipped by the domain
    exactly as in the windowed check, so reports agree with
    check_goodbox at every scale."""

    def __init__(self, cfg: EdgeConfig, pair_scale: int = PAIR_SCALE_DEFAULT):
        self.cfg = cfg
        self.pair_scale = pair_scale
        self.dmax = pair_distance_cap(cfg, pair_scale)
        self.win = full_window(cfg)
        _, vmask = run_tile_flags(self.win, pair_scale)
        src = np.ones(self.win.nloc, dtype=np.uint8)
        req, spread, touch = run_ball_scan(
            self.win, src, 2 * pair_scale, self.dmax, vmask
        )
        self._req = req
        self._spread = spread
        self._touch = touch
        self._far_pairs: dict[int, _PrefixSum] = {}
        self._detached: dict[int, _PrefixSum] = {}
        self._bad_tiles: dict[int, _PrefixSum] = {}

    def _vertex_box(self, e: EdgeId, b: int):
        R = self.cfg.grid.radius
        lo = [c - b + R for c in e.x_e]
        hi = [c + b + R for c in e.x_e]
        return lo, hi

    def _req_prefix(self, budget: int) -> _PrefixSum:
        if budget not in self._far_pairs:
            bad = self._req > budget
            self._far_pairs[budget] = _PrefixSum(
                bad.reshape(tuple(self.win.sizes))
            )
        return self._far_pairs[budget]

    def _detached_prefix(self, m: int) -> _PrefixSum:
        if m not in self._detached:
            bad = (self._spread >= m) & (self._touch == 0)
            self._detached[m] = _PrefixSum(bad.reshape(tuple(self.win.sizes)))
        return self._detached[m]

    def _tile_prefix(self, m: int) -> _PrefixSum:
        if m not in self._bad_tiles:
            grid, _ = run_tile_flags(self.win, m)
            self._bad_tiles[m] = _PrefixSum(grid == 0)
        return self._bad_tiles[m]

    def report(
        self, e: EdgeId, N: int, subbox_side: Optional[int] = None
    ) -> GoodBoxReport:
        rho = self.cfg.params.rho
        m = operational_subbox_side(N) if subbox_side is None else subbox_side
        if m < 2:
            raise RhoTooLargeForN(f"tile side {m} must be >= 2")
        if m > 3 * N:
            raise RhoTooLargeForN(f"tile side {m} exceeds the 3N window")
        _require_inside(self.cfg, _box4(e, N))
        R = self.cfg.grid.radius
        base = [-R] * self.cfg.params.d
        tiles = self._tile_prefix(m)
        sel = _tile_range(tiles.shape, base, m, e, N)
        if sel is None:
            flag_i = True
        else:
            flag_i = (
                tiles.box([s_.start for s_ in sel], [s_.stop - 1 for s_ in sel])
                == 0
            )
        budget = pair_budget(self.cfg, N, self.pair_scale)
        far = self._req_prefix(budget)
        lo3, hi3 = self._vertex_box(e, 3 * N)
        flag_ii = far.box(lo3, hi3) == 0
        if N + 1 + self.dmax > 3 * N - self.dmax:
            flag_iii = True
        else:
            lo_o, hi_o = self._vertex_box(e, 3 * N - self.dmax)
            lo_in, hi_in = self._vertex_box(e, N + self.dmax)
            outer = far.box(lo_o, hi_o)
            inner = far.box(lo_in, hi_in)
            flag_iii = outer - inner == 0
        flag_iv = self._detached_prefix(m).box(lo3, hi3) == 0
        return GoodBoxReport(
            edge=e,
            N=N,
            n_rho=math.floor(N / (16 * rho * rho)),
            subbox_side=m,
            pair_scale=self.pair_scale,
            pair_budget=budget,
            tile_crossings=bool(flag_i),
            box_pairs=bool(flag_ii),
            annulus_pairs=bool(flag_iii),
            big_attached=bool(flag_iv),
        )


def _linf_to_center(win: Window, center: Point) -> np.ndarray:
    coords = win.coord_grids()
    t = np.zeros(win.nloc, dtype=np.int64)
    for k in range(win.d):
        t = np.maximum(t, np.abs(coords[k] - center[k]))
    return t


# --- per-path radius -------------------------------------------------------


def _annulus_runs(gamma_t: np.ndarray, N: int):
    """Maximal index runs with N < t <= 3N, as (start, stop) inclusive."""
    inside = (gamma_t > N) & (gamma_t <= 3 * N)
    runs = []
    i = 0
    n = len(inside)
    while i < n:
        if inside[i]:
            j = i
            while j + 1 < n and inside[j + 1]:
                j += 1
            runs.append((i, j))
            i = j + 1
        else:
            i += 1
    return runs


def _crossing_runs(gamma_t: np.ndarray, N: int):
    """Runs that join the annulus boundaries: they touch the outer shell
    (t = 3N) and are adjacent, on the path, to the inner box (the inner
    shell t = N lies outside the annulus, so adjacency stands in for it)."""
    out = []
    n = len(gamma_t)
    for i, j in _annulus_runs(gamma_t, N):
        touches_outer = bool((gamma_t[i : j + 1] == 3 * N).any())
        prev_in = i > 0 and gamma_t[i - 1] <= N
        next_in = j + 1 < n and gamma_t[j + 1] <= N
        if touches_outer and (prev_in or next_in):
            out.append((i, j))
    return out


def crossing_subpaths(gamma: PathRep, a: AnnulusSpec) -> tuple[PathRep, PathRep]:
    """First and last crossing subpaths of the annulus, ordered from the
    start of the path."""
    t = _path_linf(gamma, a.edge.x_e)
    runs = _crossing_runs(t, a.N)
    if not runs:
        raise NoCrossing(f"path does not cross the annulus at N={a.N}")
    i0, j0 = runs[0]
    i1, j1 = runs[-1]
    verts = gamma.vertices
    return (
        PathRep(verts[i0 : j0 + 1]),
        PathRep(verts[i1 : j1 + 1]),
    )


def _path_linf(gamma: PathRep, center: Point) -> np.ndarray:
    arr = np.asarray(gamma.vertices, dtype=np.int64)
    return np.abs(arr - np.asarray(center, dtype=np.int64)).max(axis=1)


def empirical_radius(
    cfg: EdgeConfig,
    gamma: PathRep,
    e: EdgeId,
    n_max: Optional[int] = None,
) -> RadiusRecord:
    """Smallest N at which an open bypass connector for (gamma, e) is
    certified, with the connector as witness.

    Interior case: both path endpoints outside the 3N box; the first and
    last crossing subpaths must be joined by an open path inside the
    annulus of length <= c_star_op * N.  Endpoint cases: the inside
    endpoint must reach the last crossing subpath by an open path inside
    the 4N box of length <= 2 * c_star_op * N.
    """
    if n_max is None:
        n_max = cfg.params.n_max_radius
    if e.x_e not in gamma.vertices or e.y_e not in gamma.vertices:
        raise ValueError("edge does not lie on the path")
    c_star = cfg.params.c_star_op
    t_fwd = _path_linf(gamma, e.x_e)
    # the search is truncated where the 4N box would leave the domain
    for N in range(1, min(n_max, _max_fitting_N(cfg, e)) + 1):
        in_start = t_fwd[0] <= 3 * N
        in_end = t_fwd[-1] <= 3 * N
        if in_start and in_end:
            break  # grows with N; no larger N can work
        if in_end:
            g = gamma.reverse()
            t = t_fwd[::-1]
            endpoint_inside = True
        else:
            g = gamma
            t = t_fwd
            endpoint_inside = in_start
        result = _try_bypass_at(cfg, g, t, e, N, c_star, endpoint_inside)
        if result is not None:
            witness, tag = result
            return RadiusRecord(
                edge=e,
                N=N,
                method=METHOD_PER_PATH,
                witness=witness,
                case_tag=tag,
                n_max=n_max,
            )
    return RadiusRecord(edge=e, N=None, method=METHOD_PER_PATH, n_max=n_max)


def _try_bypass_at(cfg, g, t, e, N, c_star, endpoint_inside):
    """One bypass attempt at scale N; g's start is the inside endpoint
    when endpoint_inside.  Returns (connector, case_tag) or None."""
    runs = _crossing_runs(t, N)
    verts = g.vertices
    if not endpoint_inside:
        if len(runs) < 2:
            return None
        i0, j0 = runs[0]
        i1, j1 = runs[-1]
        first = verts[i0 : j0 + 1]
        last = verts[i1 : j1 + 1]
        win = Window(cfg, _box3(e, N))
        tw = _linf_to_center(win, e.x_e)
        ann_mask = (tw > N).astype(np.uint8)
        srcs = [win.lvid(v) for v in first]
        dist, _ = run_bfs(win, srcs, mask=ann_mask)
        last_ids = np.array([win.lvid(v) for v in last], dtype=np.int64)
        dd = dist[last_ids]
        reach = dd >= 0
        if not reach.any():
            return None
        best = int(dd[reach].min())
        if best > c_star * N:
            return None
        z_o = _pick_endpoint(last, dd, best)
        field = DistanceField(win, [verts[i0]], "D", dist)
        field._mask = ann_mask
        connector = extract_geodesic(field, z_o)
        return connector, CASE_INTERIOR
    # endpoint cases: open connector from the inside endpoint to the
    # last crossing subpath, inside the 4N box
    if not runs:
        return None
    i1, j1 = runs[-1]
    last = verts[i1 : j1 + 1]
    if i1 == 0:
        return None  # the endpoint's own run; nothing to reconnect to
    # the connector must survive resampling of e, so e is excluded
    win = Window(cfg.with_edge(e, cfg.params.W), _box4(e, N))
    x = verts[0]
    dist, _ = run_bfs(win, [win.lvid(x)])
    last_ids = np.array([win.lvid(v) for v in last], dtype=np.int64)
    dd = dist[last_ids]
    reach = dd >= 0
    if not reach.any():
        return None
    best = int(dd[reach].min())
    if best > 2 * c_star * N:
        return None
    z_o = _pick_endpoint(last, dd, best)
    field = DistanceField(win, [x], "D", dist)
    connector = extract_geodesic(field, z_o)
    tag = CASE_ENDPOINT_2A if t[0] <= N else CASE_ENDPOINT_2B
    return connector, tag


def _pick_endpoint(candidates, dists, best):
    """Lexicographically smallest candidate achieving the best distance."""
    chosen = None
    for v, dd in zip(candidates, dists):
        if dd == best and (chosen is None or v < chosen):
            chosen = v
    return chosen


def _max_fitting_N(cfg: EdgeConfig, e: EdgeId) -> int:
    """Largest N with Lambda_{4N}(e) inside the simulation domain."""
    R = cfg.grid.radius
    slack = min(R - abs(c) for c in e.x_e)
    return max(0, slack // 4)


def goodbox_radius(
    cfg: EdgeConfig,
    e: EdgeId,
    n_grid: Sequence[int],
    subbox_side: Optional[int] = None,
    pair_scale: Optional[int] = None,
    cache: Optional[GoodBoxCache] = None,
) -> RadiusRecord:
    """Smallest N on the grid whose good-box certificate holds; grid
    points whose 4N box leaves the domain are skipped, so a record is
    always produced.  A GoodBoxCache answers every scale from its
    domain-wide survey; without one each scale runs the windowed
    check."""
    n_max = max(n_grid)
    fit = _max_fitting_N(cfg, e)
    if cache is not None:
        s = cache.pair_scale
    else:
        s = PAIR_SCALE_DEFAULT if pair_scale is None else pair_scale
    for N in sorted(n_grid):
        if N > fit:
            break
        m = operational_subbox_side(N) if subbox_side is None else subbox_side
        if cache is not None:
            good = cache.report(e, N, m).good
        else:
            good = _goodbox_quick(cfg, e, N, m, s)
        if good:
            return RadiusRecord(
                edge=e, N=N, method=METHOD_GOOD_BOX, n_max=n_max
            )
    return RadiusRecord(edge=e, N=None, method=METHOD_GOOD_BOX, n_max=n_max)


def default_goodbox_grid(cfg: EdgeConfig) -> list[int]:
    """Ascending N grid from 2 up to the radius-search cap, in at most
    about forty even steps."""
    stop = max(2, cfg.params.n_max_radius)
    step = max(1, (stop - 2) // 40)
    grid = list(range(2, stop + 1, step))
    if grid[-1] != stop:
        grid.append(stop)
    return grid


def radius_field(
    cfg: EdgeConfig,
    edges: Sequence[EdgeId],
    mode: str = METHOD_GOOD_BOX,
    gamma: Optional[PathRep] = None,
    subbox_side: Optional[int] = None,
    pair_scale: Optional[int] = None,
    n_grid: Optional[Sequence[int]] = None,
) -> list[RadiusRecord]:
    """Batch radii in input order; GoodBox mode scans the certificate
    grid, PerPath mode requires the path the edges lie on.

    GoodBox batches with more than one edge amortize the scan through a
    domain-wide GoodBoxCache."""
    out = []
    if mode == METHOD_GOOD_BOX:
        if n_grid is None:
            n_grid = default_goodbox_grid(cfg)
        s = PAIR_SCALE_DEFAULT if pair_scale is None else pair_scale
        cache = GoodBoxCache(cfg, s) if len(edges) > 1 else None
        for e in edges:
            out.append(
                goodbox_radius(cfg, e, n_grid, subbox_side, s, cache)
            )
    elif mode == METHOD_PER_PATH:
        if gamma is None:
            raise ValueError("PerPath mode needs the path")
        for e in edges:
            out.append(empirical_radius(cfg, gamma, e))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return out


def survival_curve(records: Sequence[RadiusRecord], ts: Sequence[int]):
    """Rows (method, t, survivors, total) for P(R >= t) estimates;
    records with no certified radius survive every threshold."""
    rows = []
    total = len(records)
    by_method = {}
    for r in records:
        by_method.setdefault(r.method, []).append(r)
    for method, recs in sorted(by_method.items()):
        for t in ts:
            surv = sum(1 for r in recs if r.N is None or r.N >= t)
            rows.append((method, t, surv, len(recs)))
    return rows


def truncated_radius(cfg: EdgeConfig, record: RadiusRecord) -> float:
    """min(c_star_op * R, W); records with no certified radius truncate
    to W."""
    W = cfg.params.W
    if not record.found:
        return W
    return min(cfg.params.c_star_op * record.N, W)

"""Array kernels shared by the distance and radius modules.

All kernels operate on a rectangular window of the simulation grid:
``open_loc[a][v]`` is the state of the bond (v, v + e_a) in local flat
indexing (lexicographic, axis k stride = prod of later sizes).  Bonds
leaving the window are padded closed.  Passage times run over scaled
integers: an open edge costs SCALE and a closed edge costs an odd
integer close to W * SCALE, so scaled totals are exact, order-compatible
with unit + heavy * W, and collide only for identical (unit, heavy)
pairs on any path with fewer than SCALE heavy edges.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .errors import OutOfBox
from .geometry import BoxSpec, Point

SCALE = 1 << 20
UNREACHED = np.int64(-1)


def heavy_weight_scaled(W: float) -> int:
    return int(round(W * SCALE)) | 1


@njit(cache=True)
def _neighbor(v, axis, sign, strides, sizes):
    """Local id of v + sign * e_axis, or -1 if outside the window."""
    c = (v // strides[axis]) % sizes[axis]
    if sign > 0:
        if c + 1 >= sizes[axis]:
            return -1
        return v + strides[axis]
    if c == 0:
        return -1
    return v - strides[axis]


@njit(cache=True)
def flood_fill_labels(open_loc, strides, sizes, labels, queue):
    """Connected components over open bonds; labels start at 0."""
    nloc = labels.shape[0]
    d = strides.shape[0]
    for v in range(nloc):
        labels[v] = -1
    nxt = 0
    for start in range(nloc):
        if labels[start] >= 0:
            continue
        labels[start] = nxt
        head = 0
        tail = 0
        queue[tail] = start
        tail += 1
        while head < tail:
            v = queue[head]
            head += 1
            for a in range(d):
                w = _neighbor(v, a, 1, strides, sizes)
                if w >= 0 and open_loc[a, v] and labels[w] < 0:
                    labels[w] = nxt
                    queue[tail] = w
                    tail += 1
                w = _neighbor(v, a, -1, strides, sizes)
                if w >= 0 and open_loc[a, w] and labels[w] < 0:
                    labels[w] = nxt
                    queue[tail] = w
                    tail += 1
        nxt += 1
    return nxt


@njit(cache=True)
def bfs_kernel(
    open_loc, strides, sizes, sources, use_mask, mask, target, dist, pred, queue
):
    """Multi-source BFS over open bonds, optionally masked; early exit at
    target.  dist -1 marks unreachable; pred -1 marks sources/unreached."""
    d = strides.shape[0]
    nloc = dist.shape[0]
    for v in range(nloc):
        dist[v] = -1
        pred[v] = -1
    head = 0
    tail = 0
    for i in range(sources.shape[0]):
        s = sources[i]
        if use_mask and not mask[s]:
            continue
        if dist[s] < 0:
            dist[s] = 0
            queue[tail] = s
            tail += 1
    while head < tail:
        v = queue[head]
        head += 1
        if v == target:
            return
        dv = dist[v]
        for a in range(d):
            for sign in range(2):
                if sign == 0:
                    w = _neighbor(v, a, 1, strides, sizes)
                    is_open = w >= 0 and open_loc[a, v]
                else:
                    w = _neighbor(v, a, -1, strides, sizes)
                    is_open = w >= 0 and open_loc[a, w]
                if not is_open:
                    continue
                if use_mask and not mask[w]:
                    continue
                if dist[w] < 0:
                    dist[w] = dv + 1
                    pred[w] = v
                    queue[tail] = w
                    tail += 1


@njit(cache=True)
def dijkstra_kernel(
    open_loc,
    strides,
    sizes,
    source,
    use_mask,
    mask,
    target,
    w_closed,
    dist,
    unit,
    heavy,
    heap_d,
    heap_v,
):
    """Single-source shortest scaled passage time; closed bonds usable at
    scaled weight w_closed.  Lazy-deletion binary heap; stops once the
    target is settled.  dist -1 marks unreached."""
    d = strides.shape[0]
    nloc = dist.shape[0]
    for v in range(nloc):
        dist[v] = -1
        unit[v] = 0
        heavy[v] = 0
    if use_mask and not mask[source]:
        return
    settled = np.zeros(nloc, dtype=np.uint8)
    dist[source] = 0
    hn = 0
    heap_d[hn] = 0
    heap_v[hn] = source
    hn += 1
    while hn > 0:
        top_d = heap_d[0]
        v = heap_v[0]
        hn -= 1
        heap_d[0] = heap_d[hn]
        heap_v[0] = heap_v[hn]
        i = 0
        while True:
            l = 2 * i + 1
            r = l + 1
            m = i
            if l < hn and heap_d[l] < heap_d[m]:
                m = l
            if r < hn and heap_d[r] < heap_d[m]:
                m = r
            if m == i:
                break
            heap_d[i], heap_d[m] = heap_d[m], heap_d[i]
            heap_v[i], heap_v[m] = heap_v[m], heap_v[i]
            i = m
        if settled[v] or top_d != dist[v]:
            continue
        settled[v] = 1
        if v == target:
            return
        for a in range(d):
            for sign in range(2):
                if sign == 0:
                    w = _neighbor(v, a, 1, strides, sizes)
                    bond_open = w >= 0 and open_loc[a, v]
                else:
                    w = _neighbor(v, a, -1, strides, sizes)
                    bond_open = w >= 0 and open_loc[a, w]
                if w < 0:
                    continue
                if use_mask and not mask[w]:
                    continue
                if settled[w]:
                    continue
                step = SCALE if bond_open else w_closed
                nd = dist[v] + step
                if dist[w] < 0 or nd < dist[w]:
                    dist[w] = nd
                    if bond_open:
                        unit[w] = unit[v] + 1
                        heavy[w] = heavy[v]
                    else:
                        unit[w] = unit[v]
                        heavy[w] = heavy[v] + 1
                    heap_d[hn] = nd
                    heap_v[hn] = w
                    i = hn
                    hn += 1
                    while i > 0:
                        par = (i - 1) // 2
                        if heap_d[par] <= heap_d[i]:
                            break
                        heap_d[i], heap_d[par] = heap_d[par], heap_d[i]
                        heap_v[i], heap_v[par] = heap_v[par], heap_v[i]
                        i = par
    return


@njit(cache=True)
def tile_crossing_flags(open_loc, strides, m, off, nt, flags, vmask):
    """Crossing-cluster flags for the complete side-m tiles of the
    aligned grid: tile k has origin off + k*m per axis.  flags[tile] = 1
    iff some open cluster inside the tile spans the full side in every
    axis; vmask marks the vertices of such crossing clusters."""
    d = strides.shape[0]
    bs = m**d
    bstr = np.empty(d, dtype=np.int64)
    acc = 1
    for k in range(d - 1, -1, -1):
        bstr[k] = acc
        acc *= m
    lab = np.empty(bs, dtype=np.int64)
    cmin = np.empty((bs, d), dtype=np.int64)
    cmax = np.empty((bs, d), dtype=np.int64)
    queue = np.empty(bs, dtype=np.int64)
    bc = np.empty(d, dtype=np.int64)
    tidx = np.zeros(d, dtype=np.int64)
    org = np.empty(d, dtype=np.int64)
    n_tiles = 1
    for k in range(d):
        n_tiles *= nt[k]
    for t in range(n_tiles):
        rem = t
        for k in range(d):
            blk = 1
            for j in range(k + 1, d):
                blk *= nt[j]
            tidx[k] = rem // blk
            rem %= blk
            org[k] = off[k] + tidx[k] * m
        for b in range(bs):
            lab[b] = -1
        nxt = 0
        for b0 in range(bs):
            if lab[b0] >= 0:
                continue
            lab[b0] = nxt
            for k in range(d):
                c = (b0 // bstr[k]) % m
                cmin[nxt, k] = c
                cmax[nxt, k] = c
            head = 0
            tail = 0
            queue[tail] = b0
            tail += 1
            while head < tail:
                b = queue[head]
                head += 1
                g = 0
                for k in range(d):
                    bc[k] = (b // bstr[k]) % m
                    g += (org[k] + bc[k]) * strides[k]
                for a in range(d):
                    for sgn in range(2):
                        if sgn == 0:
                            if bc[a] + 1 >= m:
                                continue
                            nb = b + bstr[a]
                            op = open_loc[a, g]
                        else:
                            if bc[a] == 0:
                                continue
                            nb = b - bstr[a]
                            op = open_loc[a, g - strides[a]]
                        if op and lab[nb] < 0:
                            lab[nb] = nxt
                            for k in range(d):
                                c = (nb // bstr[k]) % m
                                if c < cmin[nxt, k]:
                                    cmin[nxt, k] = c
                                if c > cmax[nxt, k]:
                                    cmax[nxt, k] = c
                            queue[tail] = nb
                            tail += 1
            nxt += 1
        for b in range(bs):
            cl = lab[b]
            crosses = True
            for k in range(d):
                if cmin[cl, k] != 0 or cmax[cl, k] != m - 1:
                    crosses = False
                    break
            if crosses:
                flags[t] = 1
                g = 0
                for k in range(d):
                    g += (org[k] + (b // bstr[k]) % m) * strides[k]
                vmask[g] = 1


@njit(cache=True)
def ball_scan(
    open_loc,
    strides,
    sizes,
    coords,
    src_mask,
    two_mp,
    dmax,
    vmask,
    req,
    spread,
    touch,
):
    """Per-vertex local cluster survey.  For each source x with
    src_mask, explore the open component of x inside the l-infinity ball
    of radius dmax (clipped by the window) and record:

      req[x]    largest in-ball graph distance to a component vertex
                within l-inf distance two_mp of x (0 when alone)
      spread[x] largest l-inf distance from x reached by the component
      touch[x]  1 iff the component meets a vmask vertex

    coords[k, v] is the local coordinate of v along axis k."""
    d = strides.shape[0]
    nloc = src_mask.shape[0]
    stamp = np.zeros(nloc, dtype=np.int64)
    dist = np.empty(nloc, dtype=np.int64)
    queue = np.empty(nloc, dtype=np.int64)
    gen = 0
    for x in range(nloc):
        req[x] = 0
        spread[x] = 0
        touch[x] = 0
        if src_mask[x] == 0:
            continue
        gen += 1
        stamp[x] = gen
        dist[x] = 0
        sp = 0
        tc = vmask[x]
        rq = 0
        head = 0
        tail = 0
        queue[tail] = x
        tail += 1
        while head < tail:
            v = queue[head]
            head += 1
            dv = dist[v]
            for a in range(d):
                for sgn in range(2):
                    if sgn == 0:
                        if coords[a, v] + 1 >= sizes[a]:
                            continue
                        w = v + strides[a]
                        op = open_loc[a, v]
                    else:
                        if coords[a, v] == 0:
                            continue
                        w = v - strides[a]
                        op = open_loc[a, w]
                    if not op or stamp[w] == gen:
                        continue
                    cheb = 0
                    for k in range(d):
                        diff = coords[k, w] - coords[k, x]
                        if diff < 0:
                            diff = -diff
                        if diff > cheb:
                            cheb = diff
                    if cheb > dmax:
                        continue
                    stamp[w] = gen
                    dist[w] = dv + 1
                    if cheb > sp:
                        sp = cheb
                    if vmask[w] == 1:
                        tc = 1
                    if cheb <= two_mp and dist[w] > rq:
                        rq = dist[w]
                    queue[tail] = w
                    tail += 1
        req[x] = rq
        spread[x] = sp
        touch[x] = tc


class Window:
    """A rectangular sub-box of the simulation domain with local flat
    indexing and materialized local bond arrays."""

    def __init__(self, cfg, box: BoxSpec):
        domain = cfg.domain
        if not domain.contains_box(box):
            raise OutOfBox(f"window {box} leaves the domain {domain}")
        self.cfg = cfg
        self.box = box
        d = box.d
        self.lo = tuple(box.center[k] - box.radius for k in range(d))
        self.hi = tuple(box.center[k] + box.radius for k in range(d))
        self.sizes = tuple(h - l + 1 for l, h in zip(self.lo, self.hi))
        self.nloc = int(np.prod(self.sizes))
        strides = []
        acc = 1
        for k in reversed(range(d)):
            strides.append(acc)
            acc *= self.sizes[k]
        self.strides = tuple(reversed(strides))
        self._strides_arr = np.array(self.strides, dtype=np.int64)
        self._sizes_arr = np.array(self.sizes, dtype=np.int64)
        self._open_loc = None

    @property
    def d(self) -> int:
        return self.box.d

    def lvid(self, v: Point) -> int:
        out = 0
        for c, l, h, s in zip(v, self.lo, self.hi, self.strides):
            if not l <= c <= h:
                raise OutOfBox(f"{v} outside window")
            out += (c - l) * s
        return out

    def point(self, lvid: int) -> Point:
        out = []
        for s, l in zip(self.strides, self.lo):
            out.append(lvid // s + l)
            lvid %= s
        return tuple(out)

    def contains(self, v: Point) -> bool:
        return all(l <= c <= h for c, l, h in zip(v, self.lo, self.hi))

    def open_loc(self) -> np.ndarray:
        if self._open_loc is None:
            cfg = self.cfg
            grid = cfg.grid
            side = grid.side
            R = grid.radius
            d = self.d
            full = cfg.open_axis.reshape((d,) + (side,) * d)
            sel = tuple(
                slice(l + R, h + R + 1) for l, h in zip(self.lo, self.hi)
            )
            loc = np.ascontiguousarray(full[(slice(None),) + sel])
            loc = loc.reshape(d, self.nloc).copy()
            # pad closed the bonds leaving the window's upper faces
            for a in range(d):
                view = loc[a].reshape(self.sizes)
                idx = [slice(None)] * d
                idx[a] = self.sizes[a] - 1
                view[tuple(idx)] = False
            for a, gvid, state in cfg.overrides:
                pt = grid.point(gvid)
                nb = tuple(
                    c + (1 if k == a else 0) for k, c in enumerate(pt)
                )
                if self.contains(pt) and self.contains(nb):
                    loc[a, self.lvid(pt)] = state
            self._open_loc = loc
        return self._open_loc

    def kernel_args(self):
        return self.open_loc(), self._strides_arr, self._sizes_arr

    def mask_from_predicate(self, pred) -> np.ndarray:
        m = np.empty(self.nloc, dtype=np.uint8)
        for v in range(self.nloc):
            m[v] = 1 if pred(self.point(v)) else 0
        return m

    def coord_grids(self) -> list[np.ndarray]:
        """Per-axis absolute coordinates, each shape (nloc,)."""
        axes = [
            np.arange(l, h + 1, dtype=np.int64)
            for l, h in zip(self.lo, self.hi)
        ]
        mesh = np.meshgrid(*axes, indexing="ij")
        return [m.reshape(-1) for m in mesh]

    def box_mask(self, sub: BoxSpec) -> np.ndarray:
        """Mask of window vertices lying in ``sub`` (l-infinity box)."""
        coords = self.coord_grids()
        m = np.ones(self.nloc, dtype=bool)
        for k in range(self.d):
            m &= np.abs(coords[k] - sub.center[k]) <= sub.radius
        return m.astype(np.uint8)

    def local_coords(self) -> np.ndarray:
        """Per-axis local coordinates in [0, size), shape (d, nloc)."""
        if getattr(self, "_local_coords", None) is None:
            out = np.empty((self.d, self.nloc), dtype=np.int64)
            for k, (grid, l) in enumerate(zip(self.coord_grids(), self.lo)):
                out[k] = grid - l
            self._local_coords = out
        return self._local_coords


def run_bfs(window: Window, sources, mask=None, target=-1):
    """BFS wrapper; sources are local ids; returns (dist, pred) arrays."""
    open_loc, strides, sizes = window.kernel_args()
    n = window.nloc
    dist = np.empty(n, dtype=np.int64)
    pred = np.empty(n, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    src = np.asarray(sources, dtype=np.int64)
    if mask is None:
        use_mask = False
        mask_arr = np.empty(1, dtype=np.uint8)
    else:
        use_mask = True
        mask_arr = np.ascontiguousarray(mask, dtype=np.uint8)
    bfs_kernel(
        open_loc, strides, sizes, src, use_mask, mask_arr, target, dist, pred, queue
    )
    return dist, pred


def run_dijkstra(window: Window, source: int, w_closed: int, mask=None, target=-1):
    """Scaled-integer shortest passage time wrapper.

    Returns (dist, unit, heavy); dist -1 where unsettled or unreached.
    """
    open_loc, strides, sizes = window.kernel_args()
    n = window.nloc
    dist = np.empty(n, dtype=np.int64)
    unit = np.empty(n, dtype=np.int32)
    heavy = np.empty(n, dtype=np.int32)
    cap = 2 * window.d * n + 8
    heap_d = np.empty(cap, dtype=np.int64)
    heap_v = np.empty(cap, dtype=np.int64)
    if mask is None:
        use_mask = False
        mask_arr = np.empty(1, dtype=np.uint8)
    else:
        use_mask = True
        mask_arr = np.ascontiguousarray(mask, dtype=np.uint8)
    dijkstra_kernel(
        open_loc,
        strides,
        sizes,
        source,
        use_mask,
        mask_arr,
        target,
        w_closed,
        dist,
        unit,
        heavy,
        heap_d,
        heap_v,
    )
    return dist, unit, heavy


def run_labels(window: Window):
    open_loc, strides, sizes = window.kernel_args()
    labels = np.empty(window.nloc, dtype=np.int64)
    queue = np.empty(window.nloc, dtype=np.int64)
    count = flood_fill_labels(open_loc, strides, sizes, labels, queue)
    return labels, int(count)


def run_tile_flags(window: Window, m: int, off=None):
    """Crossing flags for the complete side-m tiles at per-axis origins
    off + k*m in window coordinates.  Returns (flags shaped
    (nt_0, ..., nt_{d-1}), vertex mask of crossing-cluster members)."""
    open_loc, strides, sizes = window.kernel_args()
    if off is None:
        off = np.zeros(window.d, dtype=np.int64)
    else:
        off = np.asarray(off, dtype=np.int64)
    nt = np.array(
        [(s - int(o)) // m for s, o in zip(window.sizes, off)], dtype=np.int64
    )
    flags = np.zeros(int(np.prod(nt)), dtype=np.uint8)
    vmask = np.zeros(window.nloc, dtype=np.uint8)
    tile_crossing_flags(open_loc, strides, m, off, nt, flags, vmask)
    return flags.reshape(tuple(int(x) for x in nt)), vmask


def run_ball_scan(window: Window, src_mask, two_mp: int, dmax: int, vmask):
    """Per-vertex local cluster survey wrapper; returns (req, spread,
    touch) arrays over the window."""
    open_loc, strides, sizes = window.kernel_args()
    n = window.nloc
    req = np.empty(n, dtype=np.int64)
    spread = np.empty(n, dtype=np.int64)
    touch = np.empty(n, dtype=np.uint8)
    ball_scan(
        open_loc,
        strides,
        sizes,
        window.local_coords(),
        np.ascontiguousarray(src_mask, dtype=np.uint8),
        two_mp,
        dmax,
        np.ascontiguousarray(vmask, dtype=np.uint8),
        req,
        spread,
        touch,
    )
    return req, spread, touch

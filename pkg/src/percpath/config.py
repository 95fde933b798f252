"""Parameters, the simulation grid, and Bernoulli edge configurations.

Randomness is counter-based: every edge gets one 64-bit draw from a
splitmix64-style mixing chain keyed by the seed and the edge's canonical
geometry (anchor coordinates, axis, direction).  Keying by geometry rather
than by enumeration index gives common random numbers across box factors,
so the same physical edge keeps its state when B changes; for fixed
parameters the geometry determines the index and vice versa, so each bit
is still a pure function of (seed, index).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterator

import numpy as np

from .errors import InvalidParams, OutOfBox
from .geometry import BoxSpec, EdgeId, Point, canonical_edge

GENERATOR_ID = "splitmix64-geom-v1"

_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_MASK = (1 << 64) - 1


def _mix_scalar(z: int) -> int:
    z = (z + _GOLDEN) & _MASK
    z ^= z >> 30
    z = (z * _MIX1) & _MASK
    z ^= z >> 27
    z = (z * _MIX2) & _MASK
    z ^= z >> 31
    return z


def _mix_array(z: np.ndarray) -> np.ndarray:
    z = z + np.uint64(_GOLDEN)
    z ^= z >> np.uint64(30)
    z = z * np.uint64(_MIX1)
    z ^= z >> np.uint64(27)
    z = z * np.uint64(_MIX2)
    z ^= z >> np.uint64(31)
    return z


def open_threshold(p: float) -> int:
    t = round(p * 2.0**64)
    return min(max(t, 0), _MASK)


@dataclass(frozen=True)
class Params:
    """Simulation parameters; immutable and serializable to key=value text."""

    d: int = 2
    p: float = 0.7
    n: int = 64
    box_factor: int = 2
    seed: int = 0
    c_star_op: float = 64.0
    rho: float = 6.0

    def __post_init__(self):
        if self.d < 2:
            raise InvalidParams("dimension must be >= 2")
        if not (0.0 < self.p < 1.0):
            raise InvalidParams("p must lie in (0,1)")
        if self.n < 3:
            raise InvalidParams("n must be >= 3")
        if self.box_factor < 2:
            raise InvalidParams("box factor must be >= 2")
        if self.c_star_op <= 0:
            raise InvalidParams("c_star_op must be positive")
        if self.rho <= 0:
            raise InvalidParams("rho must be positive")
        if not (0 <= self.seed < 1 << 64):
            raise InvalidParams("seed must fit in 64 bits")

    @property
    def W(self) -> float:
        # (ln n)^2, natural log; > 1 for n >= 3
        return math.log(self.n) ** 2

    @property
    def domain(self) -> BoxSpec:
        return BoxSpec((0,) * self.d, self.box_factor * self.n)

    @property
    def n_max_radius(self) -> int:
        return math.ceil(4 * math.log(self.n) ** 2)

    def with_seed(self, seed: int) -> "Params":
        return replace(self, seed=seed)

    def to_kv(self) -> str:
        lines = [
            f"d={self.d}",
            f"p={self.p!r}",
            f"n={self.n}",
            f"box_factor={self.box_factor}",
            f"seed={self.seed}",
            f"c_star_op={self.c_star_op!r}",
            f"rho={self.rho!r}",
            f"generator={GENERATOR_ID}",
        ]
        return "\n".join(lines)

    @classmethod
    def from_kv(cls, text: str) -> "Params":
        fields = {}
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidParams(f"malformed line: {raw!r}")
            key, value = (s.strip() for s in line.split("=", 1))
            fields[key] = value
        gen = fields.pop("generator", GENERATOR_ID)
        if gen != GENERATOR_ID:
            raise InvalidParams(f"unsupported generator {gen!r}")
        ints = {"d", "n", "box_factor", "seed"}
        floats = {"p", "c_star_op", "rho"}
        kwargs = {}
        for key, value in fields.items():
            if key in ints:
                kwargs[key] = int(value)
            elif key in floats:
                kwargs[key] = float(value)
            else:
                raise InvalidParams(f"unknown key {key!r}")
        return cls(**kwargs)


class Grid:
    """Flat indexing of the vertices of Lambda_R(0): lexicographic order,
    coordinate k has stride side^(d-1-k)."""

    def __init__(self, d: int, radius: int):
        self.d = d
        self.radius = radius
        self.side = 2 * radius + 1
        self.nv = self.side**d
        self.strides = tuple(self.side ** (d - 1 - k) for k in range(d))

    def vid(self, v: Point) -> int:
        r = self.radius
        out = 0
        for c, s in zip(v, self.strides):
            if not -r <= c <= r:
                raise OutOfBox(f"{v} outside radius {r}")
            out += (c + r) * s
        return out

    def point(self, vid: int) -> Point:
        r = self.radius
        out = []
        for s in self.strides:
            out.append(vid // s - r)
            vid %= s
        return tuple(out)

    def coord_arrays(self) -> list[np.ndarray]:
        """Per-axis absolute coordinate of every vertex, shape (nv,)."""
        r = self.radius
        line = np.arange(-r, r + 1, dtype=np.int64)
        out = []
        for k in range(self.d):
            rep_in = self.strides[k]
            rep_out = self.nv // (rep_in * self.side)
            out.append(np.tile(np.repeat(line, rep_in), rep_out))
        return out


def _axis_draws(params: Params, grid: Grid, axis: int) -> np.ndarray:
    """64-bit draws for the bonds (v, v + e_axis), keyed by canonical
    anchor geometry."""
    coords = grid.coord_arrays()
    t = coords[axis]
    # anchor of the bond: v when t >= 0, else v + e_axis (coordinate t+1)
    anchor_t = np.where(t >= 0, t, t + 1)
    sign_bit = (t >= 0).astype(np.uint64)
    h = _mix_array(np.full(grid.nv, params.seed, dtype=np.uint64))
    for k in range(grid.d):
        ck = anchor_t if k == axis else coords[k]
        h = _mix_array(h ^ ck.astype(np.uint64))
    h = _mix_array(h ^ (np.uint64(2 * axis) + sign_bit))
    return h


def edge_draw(params: Params, e: EdgeId) -> int:
    """Scalar replica of the vectorized per-edge draw."""
    axis = e.axis
    sign = e.y_e[axis] - e.x_e[axis]
    h = _mix_scalar(params.seed)
    for k in range(e.d):
        h = _mix_scalar(h ^ (e.x_e[k] & _MASK))
    h = _mix_scalar(h ^ (2 * axis + (1 if sign > 0 else 0)))
    return h


class EdgeConfig:
    """Immutable Bernoulli configuration over the simulation box.

    open_axis[a][vid] is the state of the bond (v, v + e_a); entries on
    the far face (coordinate a at +R) are padding and always False.
    """

    def __init__(self, params: Params, open_axis: np.ndarray, overrides=()):
        self.params = params
        self.grid = Grid(params.d, params.box_factor * params.n)
        self.open_axis = open_axis
        self.overrides = tuple(overrides)  # ((axis, low_vid, open), ...)
        self.open_axis.setflags(write=False)

    @property
    def domain(self) -> BoxSpec:
        return self.params.domain

    def bond_low_vertex(self, e: EdgeId) -> tuple[int, int]:
        """(axis, vid of the lower endpoint along that axis)."""
        axis = e.axis
        low = e.x_e if e.x_e[axis] < e.y_e[axis] else e.y_e
        return axis, self.grid.vid(low)

    def is_open(self, e: EdgeId) -> bool:
        axis, vid = self.bond_low_vertex(e)
        for a, v, state in self.overrides:
            if a == axis and v == vid:
                return state
        return bool(self.open_axis[axis][vid])

    def weight(self, e: EdgeId) -> float:
        return 1.0 if self.is_open(e) else self.params.W

    def effective_open_axis(self) -> np.ndarray:
        """Open-bit arrays with overrides applied (copy only if needed)."""
        if not self.overrides:
            return self.open_axis
        arrs = self.open_axis.copy()
        for a, v, state in self.overrides:
            arrs[a, v] = state
        return arrs

    def with_edge(self, e: EdgeId, value: float) -> "EdgeConfig":
        """View with t_e forced to ``value`` (1 -> open, W -> closed)."""
        if value == 1:
            state = True
        elif value == self.params.W:
            state = False
        else:
            raise InvalidParams("edge weight must be 1 or W")
        axis, vid = self.bond_low_vertex(e)
        keep = [o for o in self.overrides if o[:2] != (axis, vid)]
        return EdgeConfig(
            self.params, self.open_axis, keep + [(axis, vid, state)]
        )

    def iter_edges(self) -> Iterator[EdgeId]:
        from .geometry import enumerate_edges

        yield from enumerate_edges(self.domain)

    def open_count(self) -> int:
        arrs = self.effective_open_axis()
        return int(sum(int(a.sum()) for a in arrs))


def sample_config(params: Params) -> EdgeConfig:
    grid = Grid(params.d, params.box_factor * params.n)
    thr = np.uint64(open_threshold(params.p))
    coords = grid.coord_arrays()
    r = grid.radius
    open_axis = np.zeros((params.d, grid.nv), dtype=bool)
    for axis in range(params.d):
        draws = _axis_draws(params, grid, axis)
        bits = draws < thr
        bits &= coords[axis] < r  # far-face padding stays closed
        open_axis[axis] = bits
    return EdgeConfig(params, open_axis)


def edge_is_open(params: Params, e: EdgeId) -> bool:
    """O(1) single-edge query without materializing the configuration."""
    return edge_draw(params, e) < open_threshold(params.p)


def resample_edge(cfg: EdgeConfig, e: EdgeId, value: float) -> EdgeConfig:
    return cfg.with_edge(e, value)


def edge_from_bond(cfg: EdgeConfig, axis: int, low_vid: int) -> EdgeId:
    """Canonical EdgeId of the bond (v, v + e_axis) given by flat index."""
    v = cfg.grid.point(low_vid)
    w = tuple(c + (1 if k == axis else 0) for k, c in enumerate(v))
    return canonical_edge(v, w, cfg.domain)

"""Greedy lattice animals over per-edge indicator fields: exact and
beam-search maxima of the per-scale count N_{L,M}, path cost sums, and
the scaling sweep used to probe the linear-in-L growth of the maxima.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Sequence

from .config import Params, sample_config
from .distances import PathRep
from .errors import TooLargeForExact
from .geometry import EdgeId, Point, canonical_edge

L_EXACT_MAX = 12

METHOD_EXACT = "Exact"
METHOD_BEAM = "Beam"


@dataclass(frozen=True)
class IndicatorField:
    """Per-edge scale-M indicator bits I_e = 1(M-1 <= X_e < M) derived
    from a real-valued edge field X; edges absent from the field count
    as zero bits."""

    M: int
    values: Mapping[EdgeId, float]

    def __post_init__(self):
        if self.M < 1:
            raise ValueError("scale M must be positive")

    def x(self, e: EdgeId) -> float:
        return self.values.get(e, 0.0)

    def bit(self, e: EdgeId) -> int:
        x = self.values.get(e)
        if x is None:
            return 0
        return 1 if self.M - 1 <= x < self.M else 0

    def qhat(self) -> float:
        if not self.values:
            return 0.0
        hits = sum(
            1 for x in self.values.values() if self.M - 1 <= x < self.M
        )
        return hits / len(self.values)


@dataclass(frozen=True)
class AnimalResult:
    L: int
    M: int
    value: int
    witness: PathRep
    method: str


def box_points(d: int, L: int) -> list[Point]:
    return [tuple(v) for v in itertools.product(range(-L, L + 1), repeat=d)]


def _neighbors(v: Point, L: int):
    for k in range(len(v)):
        for s in (1, -1):
            w = tuple(c + (s if j == k else 0) for j, c in enumerate(v))
            if all(abs(c) <= L for c in w):
                yield w


def _edge_key(field: IndicatorField, domain, a: Point, b: Point) -> int:
    return field.bit(canonical_edge(a, b, domain))


class _BitLookup:
    """Indicator bits addressed by vertex pairs, without a domain box:
    animals live on the abstract lattice, so the canonical edge is keyed
    by its low endpoint and axis only."""

    def __init__(self, field: IndicatorField):
        self._bits = {}
        for e, x in field.values.items():
            bit = 1 if field.M - 1 <= x < field.M else 0
            self._bits[(e.x_e, e.y_e)] = bit
            self._bits[(e.y_e, e.x_e)] = bit

    def bit(self, a: Point, b: Point) -> int:
        return self._bits.get((a, b), 0)


def n_lm_exact(field: IndicatorField, L: int) -> AnimalResult:
    """Exact maximum of the indicator sum over self-avoiding paths in
    Lambda_L with at most L edges.

    Branch-and-bound: a maximizer can be assumed to start and end on a
    one-edge, so the search starts only from endpoints of one-edges and
    prunes branches whose value plus remaining steps cannot beat the
    incumbent."""
    if L > L_EXACT_MAX:
        raise TooLargeForExact(f"L={L} exceeds the exact cutoff {L_EXACT_MAX}")
    d = _field_dim(field, L)
    bits = _BitLookup(field)
    one_starts = sorted(
        {
            v
            for (a, b), bit in bits._bits.items()
            if bit and all(abs(c) <= L for c in a + b)
            for v in (a, b)
        }
    )
    origin = (0,) * d
    best_val = 0
    best_path = (origin,)

    def dfs(path: list[Point], used: set[Point], val: int):
        nonlocal best_val, best_path
        if val > best_val or (val == best_val and tuple(path) < best_path):
            best_val = val
            best_path = tuple(path)
        remaining = L - (len(path) - 1)
        if remaining == 0 or val + remaining <= best_val:
            return
        v = path[-1]
        for w in _neighbors(v, L):
            if w in used:
                continue
            used.add(w)
            path.append(w)
            dfs(path, used, val + bits.bit(v, w))
            path.pop()
            used.remove(w)

    for s in one_starts:
        dfs([s], {s}, 0)
    return AnimalResult(
        L=L,
        M=field.M,
        value=best_val,
        witness=PathRep(best_path),
        method=METHOD_EXACT,
    )


def _field_dim(field: IndicatorField, L: int) -> int:
    for e in field.values:
        return len(e.x_e)
    return 2


def n_lm_beam(field: IndicatorField, L: int, beam_width: int) -> AnimalResult:
    """Deterministic beam search over path prefixes; value never exceeds
    the exact maximum and is monotone in beam_width."""
    if beam_width < 1:
        raise ValueError("beam_width must be >= 1")
    d = _field_dim(field, L)
    bits = _BitLookup(field)
    starts = [(0, (v,)) for v in box_points(d, L)]
    frontier = sorted(starts, key=lambda s: (-s[0], s[1]))[:beam_width]
    best = frontier[0]
    for _ in range(L):
        nxt = []
        for val, path in frontier:
            v = path[-1]
            for w in _neighbors(v, L):
                if w in path:
                    continue
                nxt.append((val + bits.bit(v, w), path + (w,)))
        if not nxt:
            break
        nxt.sort(key=lambda s: (-s[0], s[1]))
        frontier = nxt[:beam_width]
        if frontier[0][0] > best[0]:
            best = frontier[0]
    return AnimalResult(
        L=L,
        M=field.M,
        value=best[0],
        witness=PathRep(best[1]),
        method=METHOD_BEAM,
    )


def path_cost(
    X: Mapping[EdgeId, float] | Callable[[EdgeId], float],
    gamma: PathRep,
    f: Callable[[float], float],
    domain=None,
) -> float:
    """Sum of f(X_e) over the edges of gamma.  X may be a mapping (then
    every path edge must be present) or a callable."""
    lookup = X if callable(X) else X.__getitem__
    total = 0.0
    for a, b in gamma.edges():
        e = canonical_edge(a, b, domain) if domain is not None else _abstract_edge(a, b)
        total += f(lookup(e))
    return total


def _abstract_edge(a: Point, b: Point) -> EdgeId:
    # index -1 marks an edge of the abstract lattice, outside any domain
    low, high = (a, b) if a <= b else (b, a)
    return EdgeId(low, high, -1)


def box_edges(cfg, L: int) -> list[EdgeId]:
    """All lattice edges with both endpoints in Lambda_L."""
    out = []
    for v in box_points(cfg.params.d, L):
        for k in range(cfg.params.d):
            w = tuple(c + (1 if j == k else 0) for j, c in enumerate(v))
            if all(abs(c) <= L for c in w):
                out.append(canonical_edge(v, w, cfg.domain))
    return out


def radius_x_field(cfg, edges: Sequence[EdgeId], records=None) -> dict[EdgeId, float]:
    """Edge field X_e = R-hat_e / c_star_op from GoodBox radii, or from
    supplied records (e.g. PerPath radii out of a covering run)."""
    from .radius import radius_field, truncated_radius

    if records is None:
        records = radius_field(cfg, list(edges))
    c = cfg.params.c_star_op
    return {
        r.edge: truncated_radius(cfg, r) / c for r in records
    }


def animal_scaling(
    params: Params,
    Ms: Sequence[int],
    Ls: Sequence[int],
    reps: int,
    beam_width: int = 64,
) -> list[dict]:
    """Empirical means and tail frequencies of N_{L,M} over replicas.

    Per replica the edge field is the GoodBox radius field on the
    largest requested box; each (L, M) cell reports the mean value, the
    empirical bin mass qhat, the normalized ratio
    mean / (L * qhat^(1/d) * M^(d+1)), and the frequency of values at
    least tail_t = ceil(2 * mean) + 1."""
    d = params.d
    cells = {(L, M): [] for L in Ls for M in Ms}
    qhats = {(L, M): [] for L in Ls for M in Ms}
    L_big = max(Ls)
    for r in range(reps):
        cfg = sample_config(params.with_seed(params.seed + r))
        xs = radius_x_field(cfg, box_edges(cfg, L_big))
        for L in Ls:
            sub = {
                e: x
                for e, x in xs.items()
                if max(abs(c) for c in e.x_e + e.y_e) <= L
            }
            for M in Ms:
                field = IndicatorField(M, sub)
                if L <= L_EXACT_MAX:
                    res = n_lm_exact(field, L)
                else:
                    res = n_lm_beam(field, L, beam_width)
                cells[(L, M)].append(res.value)
                qhats[(L, M)].append(field.qhat())
    rows = []
    for L in Ls:
        for M in Ms:
            vals = cells[(L, M)]
            mean = sum(vals) / len(vals)
            qhat = sum(qhats[(L, M)]) / len(qhats[(L, M)])
            denom = L * (qhat ** (1.0 / d)) * (M ** (d + 1))
            ratio = mean / denom if denom > 0 else 0.0
            tail_t = math.ceil(2 * mean) + 1
            tail_freq = sum(1 for v in vals if v >= tail_t) / len(vals)
            rows.append(
                {
                    "d": d,
                    "p": params.p,
                    "M": M,
                    "L": L,
                    "reps": reps,
                    "mean": mean,
                    "qhat": qhat,
                    "normalized_ratio": ratio,
                    "tail_t": tail_t,
                    "tail_freq": tail_freq,
                }
            )
    return rows

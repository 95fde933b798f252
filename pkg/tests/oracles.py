"""Independent brute-force references used by the test suite.

The path oracle minimizes over self-avoiding paths by depth-first
enumeration with domination pruning: a branch reaching v at cost not
below the best recorded cost at v is cut.  This is exact for strictly
positive edge weights: splicing the cheaper arrival onto the branch's
continuation gives a walk of no greater cost, and its loop erasure is a
self-avoiding path that is no more expensive.
"""

import sys

from percpath.engine import SCALE, heavy_weight_scaled

INF = float("inf")


def exhaustive_paths(source, neighbors, edge_cost):
    """Minimal path costs from source.

    neighbors(v) yields candidate next vertices; edge_cost(a, b) returns
    a positive scaled-integer cost or None when the step is not allowed.
    Returns {vertex: (scaled_cost, unit, heavy)}.
    """
    sys.setrecursionlimit(100000)
    best = {source: (0, 0, 0)}

    def dfs(v, cost, u, h, used):
        for w in neighbors(v):
            if w in used:
                continue
            c = edge_cost(v, w)
            if c is None:
                continue
            nc = cost + c
            cur = best.get(w)
            if cur is not None and nc >= cur[0]:
                continue
            if c == SCALE:
                nu, nh = u + 1, h
            else:
                nu, nh = u, h + 1
            best[w] = (nc, nu, nh)
            used.add(w)
            dfs(w, nc, nu, nh, used)
            used.remove(w)

    dfs(source, 0, 0, 0, {source})
    return best


def grid_neighbors(d):
    def nbrs(v):
        for a in range(d):
            for s in (1, -1):
                yield tuple(c + (s if k == a else 0) for k, c in enumerate(v))

    return nbrs


def oracle_D(cfg, vertex_set, source):
    """Chemical distance by exhaustive open-path minimization."""
    from percpath.geometry import canonical_edge

    def cost(a, b):
        if b not in vertex_set:
            return None
        e = canonical_edge(a, b, cfg.domain)
        return SCALE if cfg.is_open(e) else None

    best = exhaustive_paths(source, grid_neighbors(cfg.params.d), cost)
    return {v: c // SCALE for v, (c, u, h) in best.items()}


def oracle_T(cfg, vertex_set, source):
    """Truncated passage time by exhaustive path minimization."""
    from percpath.geometry import canonical_edge

    hw = heavy_weight_scaled(cfg.params.W)

    def cost(a, b):
        if b not in vertex_set:
            return None
        e = canonical_edge(a, b, cfg.domain)
        return SCALE if cfg.is_open(e) else hw

    best = exhaustive_paths(source, grid_neighbors(cfg.params.d), cost)
    return {v: (u, h) for v, (c, u, h) in best.items()}

import itertools
import math
from collections import deque

import pytest

from percpath.config import Params, sample_config
from percpath.distances import PathRep, extract_geodesic, path_is_open, truncated_T
from percpath.errors import NoCrossing, OutOfBox, RhoTooLargeForN
from percpath.geometry import AnnulusSpec, canonical_edge
from percpath.radius import (
    CASE_ENDPOINT_2A,
    CASE_ENDPOINT_2B,
    CASE_INTERIOR,
    METHOD_GOOD_BOX,
    METHOD_PER_PATH,
    GoodBoxCache,
    RadiusRecord,
    check_V2,
    check_goodbox,
    crossing_subpaths,
    default_goodbox_grid,
    empirical_radius,
    goodbox_radius,
    operational_subbox_side,
    pair_budget,
    pair_distance_cap,
    radius_field,
    survival_curve,
    truncated_radius,
)


def cheb(a, b):
    return max(abs(x - y) for x, y in zip(a, b))


def edge_at(cfg, x, axis=0):
    y = tuple(c + (1 if k == axis else 0) for k, c in enumerate(x))
    return canonical_edge(x, y, cfg.domain)


def tiny_cfg(seed, p=0.6, n=3, d=2, **kw):
    return sample_config(Params(d=d, p=p, n=n, box_factor=2, seed=seed, **kw))


def open_cfg(n=3, d=2, **kw):
    return sample_config(Params(d=d, p=1 - 1e-12, n=n, box_factor=2, seed=1, **kw))


def closed_cfg(n=3, d=2, **kw):
    return sample_config(Params(d=d, p=1e-12, n=n, box_factor=2, seed=1, **kw))


def box_vertices(center, r):
    rngs = [range(c - r, c + r + 1) for c in center]
    return [tuple(v) for v in itertools.product(*rngs)]


def open_between(cfg, a, b):
    return cfg.is_open(canonical_edge(a, b, cfg.domain))


def neighbors(v):
    for k in range(len(v)):
        for s in (1, -1):
            yield tuple(c + (s if j == k else 0) for j, c in enumerate(v))


def brute_bfs(cfg, vset, sources):
    """Plain-dict BFS over open bonds restricted to a vertex set."""
    vset = set(vset)
    dist = {s: 0 for s in sources}
    q = deque(sources)
    while q:
        v = q.popleft()
        for w in neighbors(v):
            if w in vset and w not in dist and open_between(cfg, v, w):
                dist[w] = dist[v] + 1
                q.append(w)
    return dist


def with_edges(cfg, opens=(), closes=()):
    for a, b in opens:
        cfg = cfg.with_edge(canonical_edge(a, b, cfg.domain), 1)
    for a, b in closes:
        cfg = cfg.with_edge(canonical_edge(a, b, cfg.domain), cfg.params.W)
    return cfg


def path_edges(vertices):
    return list(zip(vertices, vertices[1:]))


# --- check_V2 --------------------------------------------------------------


def brute_V2(cfg, e, N, bound):
    v3 = box_vertices(e.x_e, 3 * N)
    v4 = box_vertices(e.x_e, 4 * N)
    for x in v3:
        in3 = brute_bfs(cfg, v3, [x])
        in4 = brute_bfs(cfg, v4, [x])
        for y in v3:
            if y in in3 and in4[y] > bound:
                return False
    return True


@pytest.mark.parametrize("seed", range(6))
@pytest.mark.parametrize("p", [0.45, 0.6, 0.8])
def test_check_v2_matches_brute_force(seed, p):
    cfg = tiny_cfg(seed, p=p)
    e = edge_at(cfg, (0, 0))
    for bound in (2, 4, None):
        b = cfg.params.c_star_op if bound is None else bound
        assert check_V2(cfg, e, 1, bound=bound) == brute_V2(cfg, e, 1, b)


def test_check_v2_all_open_true_at_n1():
    cfg = open_cfg()
    assert check_V2(cfg, edge_at(cfg, (0, 0)), 1)


def test_check_v2_all_closed_vacuously_true():
    cfg = closed_cfg()
    assert check_V2(cfg, edge_at(cfg, (0, 0)), 1)


def test_check_v2_out_of_box():
    cfg = tiny_cfg(0)
    with pytest.raises(OutOfBox):
        check_V2(cfg, edge_at(cfg, (0, 0)), 50)


def test_check_v2_long_detour_false():
    # single open serpentine through the 3N box: adjacent rows are
    # connected only at alternating ends, so in-box distances blow up
    cfg = closed_cfg(n=3)
    snake = []
    for i, y in enumerate(range(-3, 4)):
        xs = range(-3, 4) if i % 2 == 0 else range(3, -4, -1)
        snake.extend((x, y) for x in xs)
    cfg = with_edges(cfg, opens=path_edges(snake))
    e = edge_at(cfg, (0, 0))
    assert not check_V2(cfg, e, 1, bound=8)
    # generous budget covers the whole serpentine
    assert check_V2(cfg, e, 1, bound=len(snake))


# --- check_goodbox against brute force -------------------------------------


def tile_origins_inside(cfg, center, b, m):
    """Domain-aligned complete side-m tiles within the given box."""
    R = cfg.grid.radius
    d = len(center)
    per_axis = []
    for k in range(d):
        vals = []
        o = -R
        while o + m - 1 <= R:
            if o >= center[k] - b and o + m - 1 <= center[k] + b:
                vals.append(o)
            o += m
        per_axis.append(vals)
    return [tuple(v) for v in itertools.product(*per_axis)]


def tile_crossing_vertices(cfg, origin, m):
    """Vertices of clusters spanning the tile fully in every axis."""
    verts = [
        tuple(v)
        for v in itertools.product(*[range(o, o + m) for o in origin])
    ]
    out = set()
    left = set(verts)
    while left:
        x = left.pop()
        comp = set(brute_bfs(cfg, verts, [x]))
        left -= comp
        spans = all(
            min(v[k] for v in comp) == origin[k]
            and max(v[k] for v in comp) == origin[k] + m - 1
            for k in range(len(origin))
        )
        if spans:
            out |= comp
    return out


def brute_goodbox(cfg, e, N, m, s):
    dmax = pair_distance_cap(cfg, s)
    budget = pair_budget(cfg, N, s)
    R = cfg.grid.radius
    domain = set(box_vertices(tuple([0] * cfg.params.d), R))
    flag_i = all(
        tile_crossing_vertices(cfg, o, m)
        for o in tile_origins_inside(cfg, e.x_e, 3 * N, m)
    )
    vmask = set()
    for o in tile_origins_inside(cfg, tuple([0] * cfg.params.d), R, s):
        vmask |= tile_crossing_vertices(cfg, o, s)
    flag_ii = True
    flag_iii = True
    flag_iv = True
    for x in box_vertices(e.x_e, 3 * N):
        ball = [v for v in domain if cheb(v, x) <= dmax]
        dist = brute_bfs(cfg, ball, [x])
        bad_pair = any(
            cheb(v, x) <= 2 * s and dd > budget for v, dd in dist.items()
        )
        if bad_pair:
            flag_ii = False
            t = cheb(x, e.x_e)
            if N + 1 + dmax <= t <= 3 * N - dmax:
                flag_iii = False
        spread = max(cheb(v, x) for v in dist)
        if spread >= m and not (set(dist) & vmask):
            flag_iv = False
    return flag_i, flag_ii, flag_iii, flag_iv


@pytest.mark.parametrize("seed", range(4))
@pytest.mark.parametrize("p", [0.4, 0.6, 0.75])
def test_goodbox_flags_match_brute_force(seed, p):
    cfg = tiny_cfg(seed, p=p, n=4, rho=1.0)  # dmax = 4*1*2 = 8
    e = edge_at(cfg, (0, 0))
    N = 2
    rep = check_goodbox(cfg, e, N, subbox_side=3, pair_scale=2)
    got = (rep.tile_crossings, rep.box_pairs, rep.annulus_pairs, rep.big_attached)
    assert got == brute_goodbox(cfg, e, N, 3, 2)


def test_goodbox_all_open_good():
    cfg = open_cfg(n=4)
    for N in (1, 2):
        rep = check_goodbox(cfg, edge_at(cfg, (0, 0)), N)
        assert rep.good
        assert rep.N == N


def test_goodbox_all_closed_crossing_fails():
    cfg = closed_cfg(n=4)
    rep = check_goodbox(cfg, edge_at(cfg, (0, 0)), 2)
    assert not rep.tile_crossings
    assert not rep.good


def test_goodbox_report_fields():
    cfg = tiny_cfg(1, rho=3.0)
    rep = check_goodbox(cfg, edge_at(cfg, (0, 0)), 1)
    assert rep.n_rho == math.floor(1 / (16 * 9.0))
    assert rep.subbox_side == operational_subbox_side(1)
    assert rep.pair_budget == pair_budget(cfg, 1, rep.pair_scale)
    assert rep.edge == edge_at(cfg, (0, 0))


def test_pair_budget_monotone_and_capped():
    cfg = tiny_cfg(0, rho=6.0)
    cap = pair_distance_cap(cfg, 2)
    vals = [pair_budget(cfg, N, 2) for N in range(1, 200)]
    assert vals == sorted(vals)
    assert vals[-1] == cap
    assert all(v <= cap for v in vals)


def test_goodbox_errors():
    cfg = tiny_cfg(0)
    e = edge_at(cfg, (0, 0))
    with pytest.raises(OutOfBox):
        check_goodbox(cfg, e, 40)
    with pytest.raises(RhoTooLargeForN):
        check_goodbox(cfg, e, 1, subbox_side=1)
    with pytest.raises(RhoTooLargeForN):
        check_goodbox(cfg, e, 1, subbox_side=5)


# --- locality --------------------------------------------------------------


def far_edges(cfg, center, r):
    out = []
    for x in box_vertices(center, r + 3):
        if cheb(x, center) <= r:
            continue
        for k in range(len(x)):
            y = tuple(c + (1 if j == k else 0) for j, c in enumerate(x))
            if cheb(y, center) > r and max(abs(c) for c in y) <= cfg.grid.radius:
                out.append((x, y))
    return out


@pytest.mark.parametrize("seed", range(3))
def test_goodbox_locality_under_far_flips(seed):
    # certificate data radius: max(4N, 3N + dmax + s)
    cfg = tiny_cfg(seed, p=0.6, n=8, rho=1.0)
    e = edge_at(cfg, (0, 0))
    N = 1
    r_loc = max(4 * N, 3 * N + pair_distance_cap(cfg, 2) + 2)
    base = check_goodbox(cfg, e, N, subbox_side=2, pair_scale=2)
    flipped = cfg
    for i, (a, b) in enumerate(far_edges(cfg, e.x_e, r_loc)):
        val = 1 if i % 2 == 0 else cfg.params.W
        flipped = flipped.with_edge(canonical_edge(a, b, cfg.domain), val)
    rep = check_goodbox(flipped, e, N, subbox_side=2, pair_scale=2)
    assert rep == base


@pytest.mark.parametrize("seed", range(3))
def test_empirical_radius_locality_under_far_flips(seed):
    cfg = tiny_cfg(seed, p=0.7, n=4)
    line = [(x, 0) for x in range(-8, 9)]
    gamma = PathRep(tuple(line))
    e = edge_at(cfg, (0, 0))
    base = empirical_radius(cfg, gamma, e, n_max=1)
    flipped = cfg
    for i, (a, b) in enumerate(far_edges(cfg, e.x_e, 4)):
        val = 1 if i % 3 == 0 else cfg.params.W
        flipped = flipped.with_edge(canonical_edge(a, b, cfg.domain), val)
    rec = empirical_radius(flipped, gamma, e, n_max=1)
    assert (rec.N, rec.case_tag, rec.witness) == (base.N, base.case_tag, base.witness)


# --- cache vs windowed -----------------------------------------------------


@pytest.mark.parametrize("seed,p", [(0, 0.55), (1, 0.7), (2, 0.62)])
def test_goodbox_cache_matches_windowed(seed, p):
    cfg = sample_config(
        Params(d=2, p=p, n=16, box_factor=2, seed=seed, rho=1.0)
    )
    cache = GoodBoxCache(cfg, pair_scale=2)
    for N in (2, 3, 5, 7):
        for x in [(0, 0), (5, -3), (-7, 2)]:
            if 4 * N + max(abs(c) for c in x) + 1 > cfg.grid.radius:
                continue
            e = edge_at(cfg, x)
            win = check_goodbox(cfg, e, N, pair_scale=2)
            cached = cache.report(e, N)
            assert win == cached


# --- goodbox_radius / radius_field -----------------------------------------


def test_goodbox_radius_all_open_smallest_grid_point():
    cfg = open_cfg(n=4)
    rec = goodbox_radius(cfg, edge_at(cfg, (0, 0)), [1, 2])
    assert rec.N == 1
    assert rec.method == METHOD_GOOD_BOX
    assert rec.found


def test_goodbox_radius_never_raises_on_unfitting_grid():
    cfg = closed_cfg(n=3)
    rec = goodbox_radius(cfg, edge_at(cfg, (0, 0)), [1, 2, 30])
    assert rec.N is None
    assert rec.n_max == 30
    assert not rec.found


def test_goodbox_radius_scans_upward():
    # moat around the tile grid at N=1 only: good first at N=2
    cfg = open_cfg(n=4)
    e = edge_at(cfg, (0, 0))
    ring = []
    for x in box_vertices(e.x_e, 4):
        if cheb(x, e.x_e) != 3:
            continue
        for y in neighbors(x):
            if cheb(y, e.x_e) > 3:
                ring.append((x, y))
    broken = with_edges(cfg, closes=ring)
    rec = goodbox_radius(broken, e, [1, 2], subbox_side=2, pair_scale=2)
    r1 = check_goodbox(broken, e, 1, subbox_side=2, pair_scale=2)
    r2 = check_goodbox(broken, e, 2, subbox_side=2, pair_scale=2)
    assert (rec.N == 1) == r1.good
    if rec.N == 2:
        assert r2.good and not r1.good


def test_radius_field_order_and_modes():
    cfg = open_cfg(n=4)
    edges = [edge_at(cfg, (1, 0)), edge_at(cfg, (0, 0)), edge_at(cfg, (0, 1))]
    recs = radius_field(cfg, edges, mode=METHOD_GOOD_BOX, n_grid=[1, 2])
    assert [r.edge for r in recs] == edges
    assert all(r.method == METHOD_GOOD_BOX for r in recs)
    with pytest.raises(ValueError):
        radius_field(cfg, edges, mode=METHOD_PER_PATH)
    with pytest.raises(ValueError):
        radius_field(cfg, edges, mode="Elsewhere")


def test_radius_field_perpath_mode():
    cfg = open_cfg(n=3)
    line = [(x, 0) for x in range(-6, 7)]
    gamma = PathRep(tuple(line))
    edges = [edge_at(cfg, (0, 0)), edge_at(cfg, (1, 0))]
    recs = radius_field(cfg, edges, mode=METHOD_PER_PATH, gamma=gamma)
    assert all(r.method == METHOD_PER_PATH for r in recs)
    assert all(r.N == 1 for r in recs)


def test_default_grid_shape():
    cfg = tiny_cfg(0, n=8)
    grid = default_goodbox_grid(cfg)
    assert grid == sorted(grid)
    assert len(grid) == len(set(grid))
    assert grid[0] >= 1
    assert grid[-1] <= max(2, cfg.params.n_max_radius)


# --- GoodBox dominates a brute-force exact radius --------------------------


def brute_v2_radius(cfg, e, n_max):
    """Smallest N with an open crossing cluster of the annulus and the
    pairwise V2 condition; None if no N fits."""
    for N in range(1, n_max + 1):
        a = AnnulusSpec(e, N)
        shell_in = [v for v in box_vertices(e.x_e, N + 1) if cheb(v, e.x_e) == N + 1]
        ann = [v for v in box_vertices(e.x_e, 3 * N) if cheb(v, e.x_e) > N]
        dist = brute_bfs(cfg, ann, shell_in)
        crossed = any(cheb(v, e.x_e) == 3 * N for v in dist)
        if crossed and check_V2(cfg, e, N):
            return N
    return None


@pytest.mark.parametrize("seed", range(4))
def test_goodbox_radius_upper_bounds_exact(seed):
    cfg = tiny_cfg(seed, p=0.75, n=4, rho=2.0)
    e = edge_at(cfg, (0, 0))
    rec = goodbox_radius(cfg, e, [1, 2], pair_scale=2)
    exact = brute_v2_radius(cfg, e, 2)
    if rec.found:
        assert exact is not None
        assert rec.N >= exact


# --- empirical_radius ------------------------------------------------------


def straight_gamma(lo, hi):
    return PathRep(tuple((x, 0) for x in range(lo, hi + 1)))


def test_empirical_all_open_interior_n1():
    cfg = open_cfg(n=3)  # c_star_op 64 >= 48
    gamma = straight_gamma(-6, 6)
    rec = empirical_radius(cfg, gamma, edge_at(cfg, (0, 0)))
    assert rec.N == 1
    assert rec.case_tag == CASE_INTERIOR
    assert rec.witness is not None


def test_empirical_witness_invariants_interior():
    cfg = open_cfg(n=3)
    gamma = straight_gamma(-6, 6)
    e = edge_at(cfg, (0, 0))
    rec = empirical_radius(cfg, gamma, e)
    w = rec.witness
    assert path_is_open(cfg, w)
    assert len(w.vertices) - 1 <= cfg.params.c_star_op * rec.N
    for v in w.vertices:
        assert rec.N < cheb(v, e.x_e) <= 3 * rec.N


def test_empirical_connector_length_three_fixture():
    # the two crossing subpaths of A_1(e) are joined by an open length-3
    # connector; everything else in the annulus is closed
    gamma_v = [
        (-5, 0), (-4, 0), (-3, 0), (-2, 0), (-1, 0), (0, 0), (1, 0),
        (1, 1), (0, 1), (-1, 1), (-1, 2), (-1, 3), (-1, 4),
    ]
    connector = [(-2, 0), (-2, 1), (-2, 2), (-1, 2)]
    cfg = closed_cfg(n=3)
    cfg = with_edges(cfg, opens=path_edges(gamma_v) + path_edges(connector))
    gamma = PathRep(tuple(gamma_v))
    e = edge_at(cfg, (0, 0))
    rec = empirical_radius(cfg, gamma, e)
    assert rec.N == 1
    assert rec.case_tag == CASE_INTERIOR
    assert len(rec.witness.vertices) - 1 == 3


def moat_cfg(n, k):
    """All open except every edge inside the 3k box off the path line."""
    cfg = open_cfg(n=n)
    keep = set()
    reach = min(3 * k + 1, cfg.grid.radius)
    line = [(x, 0) for x in range(-reach, reach + 1)]
    for a, b in path_edges(line):
        keep.add(frozenset((a, b)))
    closes = []
    for x in box_vertices((0, 0), 3 * k):
        for y in neighbors(x):
            if cheb(y, (0, 0)) <= 3 * k and frozenset((x, y)) not in keep:
                closes.append((x, y))
    return with_edges(cfg, closes=closes)


def test_empirical_moat_forces_large_radius():
    k = 1
    cfg = moat_cfg(4, k)  # domain radius 8, fit = 2
    gamma = straight_gamma(-8, 8)
    e = edge_at(cfg, (0, 0))
    rec = empirical_radius(cfg, gamma, e)
    assert rec.found
    assert rec.N > k


def test_empirical_moat_not_found_when_too_wide():
    cfg = moat_cfg(3, 2)  # annulus never clears the closed region
    gamma = straight_gamma(-6, 6)
    rec = empirical_radius(cfg, gamma, edge_at(cfg, (0, 0)))
    assert rec.N is None
    assert rec.n_max == cfg.params.n_max_radius


def test_empirical_requires_edge_on_path():
    cfg = open_cfg(n=3)
    gamma = straight_gamma(-6, 6)
    with pytest.raises(ValueError):
        empirical_radius(cfg, gamma, edge_at(cfg, (0, 3)))


def test_empirical_smallest_n_by_downward_scan():
    for seed in range(5):
        cfg = tiny_cfg(seed, p=0.65, n=4)
        gamma = straight_gamma(-8, 8)
        e = edge_at(cfg, (0, 0))
        rec = empirical_radius(cfg, gamma, e)
        if rec.found and rec.N > 1:
            below = empirical_radius(cfg, gamma, e, n_max=rec.N - 1)
            assert below.N is None


def test_empirical_endpoint_case():
    cfg = open_cfg(n=3)
    # path starts right next to the edge: endpoint inside every 3N box
    gamma = straight_gamma(0, 6)
    e = edge_at(cfg, (0, 0))
    rec = empirical_radius(cfg, gamma, e)
    assert rec.N == 1
    assert rec.case_tag in (CASE_ENDPOINT_2A, CASE_ENDPOINT_2B)
    w = rec.witness
    assert path_is_open(cfg, w)
    assert len(w.vertices) - 1 <= 2 * cfg.params.c_star_op * rec.N
    for v in w.vertices:
        assert cheb(v, e.x_e) <= 4 * rec.N


def test_empirical_random_records_satisfy_invariants():
    for seed in range(6):
        cfg = sample_config(Params(d=2, p=0.7, n=8, box_factor=2, seed=seed))
        src, tgt = (-12, 0), (12, 0)
        field = truncated_T(cfg, None, src)
        gamma = extract_geodesic(field, tgt)
        mid = gamma.vertices[len(gamma.vertices) // 2]
        nxt = gamma.vertices[len(gamma.vertices) // 2 + 1]
        e = canonical_edge(mid, nxt, cfg.domain)
        rec = empirical_radius(cfg, gamma, e)
        assert rec.method == METHOD_PER_PATH
        if not rec.found:
            continue
        w = rec.witness
        assert path_is_open(cfg, w)
        if rec.case_tag == CASE_INTERIOR:
            assert len(w.vertices) - 1 <= cfg.params.c_star_op * rec.N
            for v in w.vertices:
                assert rec.N < cheb(v, e.x_e) <= 3 * rec.N
        else:
            assert len(w.vertices) - 1 <= 2 * cfg.params.c_star_op * rec.N
            for v in w.vertices:
                assert cheb(v, e.x_e) <= 4 * rec.N


# --- crossing_subpaths -----------------------------------------------------


def test_crossing_subpaths_straight_line():
    e = edge_at(open_cfg(n=3), (0, 0))
    gamma = straight_gamma(-6, 6)
    first, last = crossing_subpaths(gamma, AnnulusSpec(e, 1))
    assert first.vertices == ((-3, 0), (-2, 0))
    assert last.vertices == ((2, 0), (3, 0))


def test_crossing_subpaths_no_crossing_raises():
    e = edge_at(open_cfg(n=3), (0, 0))
    gamma = PathRep(((0, 0), (1, 0)))
    with pytest.raises(NoCrossing):
        crossing_subpaths(gamma, AnnulusSpec(e, 1))


# --- survival and truncation -----------------------------------------------


def rec_of(N, method=METHOD_GOOD_BOX):
    e = edge_at(open_cfg(n=3), (0, 0))
    return RadiusRecord(edge=e, N=N, method=method, n_max=8)


def test_survival_curve_counts():
    recs = [rec_of(1), rec_of(2), rec_of(4), rec_of(None)]
    rows = survival_curve(recs, [1, 2, 3, 5])
    assert rows == [
        (METHOD_GOOD_BOX, 1, 4, 4),
        (METHOD_GOOD_BOX, 2, 3, 4),
        (METHOD_GOOD_BOX, 3, 2, 4),
        (METHOD_GOOD_BOX, 5, 1, 4),
    ]


def test_survival_curve_splits_methods():
    recs = [rec_of(1), rec_of(2, METHOD_PER_PATH)]
    rows = survival_curve(recs, [2])
    assert (METHOD_GOOD_BOX, 2, 0, 1) in rows
    assert (METHOD_PER_PATH, 2, 1, 1) in rows


def test_truncated_radius_caps_at_w():
    cfg = open_cfg(n=8)
    W = cfg.params.W
    assert truncated_radius(cfg, rec_of(None)) == W
    assert truncated_radius(cfg, rec_of(1)) == min(cfg.params.c_star_op, W)
    big = rec_of(10 ** 6)
    assert truncated_radius(cfg, big) == W


def test_goodbox_rate_frozen_fixture():
    # deterministic desk-scale regression: good-box rates over 200 edges
    # at d=2, p=0.7, n=32, seed 0 (first measurement recorded)
    import random

    cfg = sample_config(Params(d=2, p=0.7, n=32, box_factor=2, seed=0))
    cache = GoodBoxCache(cfg, pair_scale=2)
    rng = random.Random(0)
    good = {5: 0, 8: 0, 11: 0}
    for _ in range(200):
        x = (rng.randint(-15, 15), rng.randint(-15, 15))
        axis = rng.randrange(2)
        y = tuple(c + (1 if k == axis else 0) for k, c in enumerate(x))
        e = canonical_edge(x, y, cfg.domain)
        for N in good:
            if cache.report(e, N).good:
                good[N] += 1
    assert good == {5: 177, 8: 108, 11: 38}

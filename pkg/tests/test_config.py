import math

import numpy as np
import pytest

from percpath.config import (
    GENERATOR_ID,
    EdgeConfig,
    Grid,
    Params,
    edge_is_open,
    resample_edge,
    sample_config,
)
from percpath.errors import InvalidParams
from percpath.geometry import enumerate_edges


def test_params_validation():
    with pytest.raises(InvalidParams):
        Params(d=1)
    with pytest.raises(InvalidParams):
        Params(p=0.0)
    with pytest.raises(InvalidParams):
        Params(p=1.0)
    with pytest.raises(InvalidParams):
        Params(n=2)
    with pytest.raises(InvalidParams):
        Params(box_factor=1)
    with pytest.raises(InvalidParams):
        Params(rho=0)


def test_w_is_natural_log_squared():
    p = Params(n=100)
    assert p.W == pytest.approx(math.log(100) ** 2)
    assert p.W > 1


def test_kv_roundtrip():
    p = Params(d=3, p=0.65, n=17, box_factor=3, seed=99, c_star_op=32.0, rho=2.0)
    text = p.to_kv()
    assert f"generator={GENERATOR_ID}" in text
    assert Params.from_kv(text) == p


def test_kv_rejects_unknown_keys_and_allows_comments():
    text = "d=2\np=0.7\nn=8  # span\n"
    assert Params.from_kv(text).n == 8
    with pytest.raises(InvalidParams):
        Params.from_kv("d=2\nbogus=1\n")


def test_grid_roundtrip_and_coord_arrays():
    g = Grid(3, 2)
    for vid in range(g.nv):
        assert g.vid(g.point(vid)) == vid
    coords = g.coord_arrays()
    for vid in range(g.nv):
        pt = g.point(vid)
        for k in range(3):
            assert coords[k][vid] == pt[k]


def _small_params(**kw):
    base = dict(d=2, p=0.7, n=4, box_factor=2, seed=42)
    base.update(kw)
    return Params(**base)


def test_sample_determinism():
    p = _small_params()
    a = sample_config(p)
    b = sample_config(p)
    assert np.array_equal(a.open_axis, b.open_axis)
    c = sample_config(p.with_seed(43))
    assert not np.array_equal(a.open_axis, c.open_axis)


def test_scalar_draw_matches_vectorized():
    p = _small_params()
    cfg = sample_config(p)
    for e in enumerate_edges(p.domain):
        assert cfg.is_open(e) == edge_is_open(p, e)


def test_geometry_keying_stable_across_box_factor():
    p2 = _small_params(box_factor=2)
    p3 = _small_params(box_factor=3)
    cfg2 = sample_config(p2)
    cfg3 = sample_config(p3)
    for e in enumerate_edges(p2.domain):
        assert cfg2.is_open(e) == cfg3.is_open(e)


def test_open_density():
    p = Params(d=2, p=0.7, n=64, box_factor=2, seed=7)
    cfg = sample_config(p)
    side = cfg.grid.side
    m = 2 * side * (side - 1)  # true edge count of the square grid
    count = cfg.open_count()
    assert m >= 10**5
    sd = math.sqrt(m * p.p * (1 - p.p))
    assert abs(count - p.p * m) < 4 * sd


def test_near_one_p_all_open():
    p = Params(d=2, p=1 - 1e-12, n=16, seed=5)
    cfg = sample_config(p)
    side = cfg.grid.side
    assert cfg.open_count() == 2 * side * (side - 1)


def test_frozen_open_count_fixture():
    # regression pin for seed 42, d=2, n=8 (first run recorded)
    p = _small_params(n=8)
    cfg = sample_config(p)
    count = cfg.open_count()
    side = cfg.grid.side
    m = 2 * side * (side - 1)
    sd = math.sqrt(m * p.p * (1 - p.p))
    assert abs(count - p.p * m) < 5 * sd
    assert count == FROZEN_OPEN_COUNT_D2_N8_SEED42


FROZEN_OPEN_COUNT_D2_N8_SEED42 = 1463  # recorded on first run


def test_resample_view_semantics():
    p = _small_params()
    cfg = sample_config(p)
    edges = enumerate_edges(p.domain)
    e = edges[37]
    forced = resample_edge(cfg, e, p.W)
    assert not forced.is_open(e)
    assert cfg.is_open(e) == edge_is_open(p, e)  # original untouched
    for f in edges[:50]:
        if f != e:
            assert forced.is_open(f) == cfg.is_open(f)
    same = resample_edge(cfg, e, 1.0 if cfg.is_open(e) else p.W)
    for f in edges[:50]:
        assert same.is_open(f) == cfg.is_open(f)
    with pytest.raises(InvalidParams):
        resample_edge(cfg, e, 3.14)


def test_effective_open_axis_applies_overrides():
    p = _small_params()
    cfg = sample_config(p)
    e = enumerate_edges(p.domain)[10]
    axis, vid = cfg.bond_low_vertex(e)
    forced = cfg.with_edge(e, p.W)
    arrs = forced.effective_open_axis()
    assert not arrs[axis][vid]
    assert cfg.open_axis is forced.open_axis  # shared, copy-on-write

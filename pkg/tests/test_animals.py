import itertools
import math

import pytest

from percpath.animals import (
    IndicatorField,
    L_EXACT_MAX,
    METHOD_BEAM,
    METHOD_EXACT,
    animal_scaling,
    box_edges,
    box_points,
    n_lm_beam,
    n_lm_exact,
    path_cost,
    radius_x_field,
)
from percpath.config import Params, sample_config
from percpath.distances import PathRep
from percpath.errors import TooLargeForExact
from percpath.geometry import EdgeId


def abstract_edge(a, b):
    low, high = sorted((a, b))
    return EdgeId(low, high, -1)


def lattice_edges(d, L):
    out = []
    for v in itertools.product(range(-L, L + 1), repeat=d):
        for k in range(d):
            w = tuple(c + (1 if j == k else 0) for j, c in enumerate(v))
            if all(abs(c) <= L for c in w):
                out.append(abstract_edge(v, w))
    return out


def random_field(d, L, M, seed, scale=3.0):
    import random

    rng = random.Random(seed)
    vals = {e: scale * rng.random() for e in lattice_edges(d, L)}
    return IndicatorField(M, vals)


def brute_max(field, L, d):
    """No-pruning enumeration of all self-avoiding paths with <= L edges."""
    bit = {}
    for e, x in field.values.items():
        b = 1 if field.M - 1 <= x < field.M else 0
        bit[(e.x_e, e.y_e)] = b
        bit[(e.y_e, e.x_e)] = b
    best = 0

    def neighbors(v):
        for k in range(d):
            for s in (1, -1):
                w = tuple(c + (s if j == k else 0) for j, c in enumerate(v))
                if all(abs(c) <= L for c in w):
                    yield w

    def walk(v, used, val, steps):
        nonlocal best
        if val > best:
            best = val
        if steps == 0:
            return
        for w in neighbors(v):
            if w in used:
                continue
            used.add(w)
            walk(w, used, val + bit.get((v, w), 0), steps - 1)
            used.remove(w)

    for v in itertools.product(range(-L, L + 1), repeat=d):
        walk(v, {v}, 0, L)
    return best


# --- exact maximizer -------------------------------------------------------


@pytest.mark.parametrize("seed", range(8))
def test_exact_matches_bruteforce(seed):
    L = 3 + seed % 2
    field = random_field(2, L, M=2, seed=seed)
    res = n_lm_exact(field, L)
    assert res.value == brute_max(field, L, 2)
    assert res.method == METHOD_EXACT


def test_exact_all_zero_field():
    field = IndicatorField(5, {e: 0.0 for e in lattice_edges(2, 3)})
    res = n_lm_exact(field, 3)
    assert res.value == 0


def test_exact_all_one_field():
    # every edge lands in the bin, so any L-step path scores L
    field = IndicatorField(2, {e: 1.5 for e in lattice_edges(2, 4)})
    res = n_lm_exact(field, 4)
    assert res.value == 4
    assert len(res.witness) == 4


def test_exact_witness_scores_its_value():
    field = random_field(2, 4, M=1, seed=11, scale=1.5)
    res = n_lm_exact(field, 4)
    scored = sum(
        field.bit(abstract_edge(a, b)) for a, b in res.witness.edges()
    )
    assert scored == res.value
    assert len(res.witness) <= 4
    for v in res.witness.vertices:
        assert all(abs(c) <= 4 for c in v)


def test_exact_monotone_in_L():
    field = random_field(2, 6, M=2, seed=3)
    vals = [n_lm_exact(field, L).value for L in (2, 4, 6)]
    assert vals == sorted(vals)


def test_exact_respects_cutoff():
    field = random_field(2, 2, M=2, seed=0)
    with pytest.raises(TooLargeForExact):
        n_lm_exact(field, L_EXACT_MAX + 1)


def test_exact_dominates_any_path():
    field = random_field(2, 4, M=2, seed=7)
    res = n_lm_exact(field, 4)
    gamma = PathRep(tuple((x, 0) for x in range(-2, 3)))
    score = sum(field.bit(abstract_edge(a, b)) for a, b in gamma.edges())
    assert res.value >= score


# --- beam search -----------------------------------------------------------


@pytest.mark.parametrize("seed", range(5))
def test_beam_never_exceeds_exact(seed):
    field = random_field(2, 4, M=2, seed=100 + seed)
    exact = n_lm_exact(field, 4).value
    for width in (1, 4, 16):
        assert n_lm_beam(field, 4, width).value <= exact


def test_beam_wide_equals_exact():
    field = random_field(2, 4, M=2, seed=21)
    exact = n_lm_exact(field, 4).value
    res = n_lm_beam(field, 4, beam_width=4096)
    assert res.value == exact
    assert res.method == METHOD_BEAM


def test_beam_monotone_in_width():
    field = random_field(2, 5, M=2, seed=9)
    vals = [n_lm_beam(field, 5, w).value for w in (1, 2, 8, 64)]
    assert vals == sorted(vals)


def test_beam_deterministic():
    field = random_field(2, 5, M=2, seed=13)
    a = n_lm_beam(field, 5, 8)
    b = n_lm_beam(field, 5, 8)
    assert a == b


# --- indicator field -------------------------------------------------------


def test_bins_partition_unity():
    field_vals = random_field(2, 3, M=1, seed=5, scale=6.0).values
    # shift values so none sits exactly at 0 and bins 1..8 cover all edges
    vals = {e: x + 0.5 for e, x in field_vals.items()}
    for e in vals:
        total = sum(IndicatorField(M, vals).bit(e) for M in range(1, 9))
        assert total == 1


def test_qhat_counts_bin_mass():
    vals = {e: 1.5 for e in lattice_edges(2, 2)}
    assert IndicatorField(2, vals).qhat() == 1.0
    assert IndicatorField(4, vals).qhat() == 0.0
    assert IndicatorField(1, {}).qhat() == 0.0


def test_missing_edges_are_zero_bits():
    field = IndicatorField(1, {})
    assert field.bit(abstract_edge((0, 0), (1, 0))) == 0
    assert n_lm_exact(field, 3).value == 0


def test_invalid_scale_rejected():
    with pytest.raises(ValueError):
        IndicatorField(0, {})
    with pytest.raises(ValueError):
        n_lm_beam(IndicatorField(1, {}), 3, 0)


# --- path_cost -------------------------------------------------------------


def test_path_cost_constant_field():
    gamma = PathRep(tuple((x, 0) for x in range(5)))
    total = path_cost(lambda e: 2.0, gamma, lambda x: x * x)
    assert total == pytest.approx(4.0 * 4)


def test_path_cost_mapping_and_domain():
    cfg = sample_config(Params(d=2, p=0.7, n=4, box_factor=2, seed=0))
    gamma = PathRep(((0, 0), (1, 0), (1, 1)))
    xs = {e: 1.0 for e in box_edges(cfg, 2)}
    assert path_cost(xs, gamma, lambda x: 3.0 * x, domain=cfg.domain) == 6.0


def test_path_cost_empty_path():
    assert path_cost(lambda e: 5.0, PathRep(((0, 0),)), lambda x: x) == 0.0


# --- geometry helpers ------------------------------------------------------


def test_box_points_count():
    assert len(box_points(2, 3)) == 49
    assert len(box_points(3, 1)) == 27


def test_box_edges_count():
    cfg = sample_config(Params(d=2, p=0.7, n=4, box_factor=2, seed=0))
    # 2L+1 rows of 2L horizontal edges, times two orientations
    assert len(box_edges(cfg, 2)) == 2 * 5 * 4


# --- radius field and scaling sweep ----------------------------------------


def test_radius_x_field_all_open_constant():
    cfg = sample_config(
        Params(d=2, p=1 - 1e-12, n=4, box_factor=2, seed=0, c_star_op=4.0)
    )
    xs = radius_x_field(cfg, box_edges(cfg, 2))
    W = cfg.params.W
    want = min(4.0 * 1, W) / 4.0  # every radius is 1 in the open lattice
    assert all(x == pytest.approx(want) for x in xs.values())


def test_animal_scaling_rows_shape():
    params = Params(d=2, p=0.7, n=8, box_factor=2, seed=2)
    rows = animal_scaling(params, Ms=(1, 2), Ls=(3, 6), reps=2)
    assert len(rows) == 4
    for row in rows:
        assert set(row) >= {
            "d", "p", "M", "L", "reps", "mean", "qhat",
            "normalized_ratio", "tail_t", "tail_freq",
        }
        assert row["mean"] >= 0.0
        assert 0.0 <= row["qhat"] <= 1.0
        assert 0.0 <= row["tail_freq"] <= 1.0
        assert row["tail_t"] == math.ceil(2 * row["mean"]) + 1
    by_m = {}
    for row in rows:
        by_m.setdefault(row["M"], {})[row["L"]] = row["mean"]
    for m_rows in by_m.values():
        assert m_rows[3] <= m_rows[6]


def test_animal_scaling_deterministic():
    params = Params(d=2, p=0.7, n=8, box_factor=2, seed=4)
    a = animal_scaling(params, Ms=(1,), Ls=(3,), reps=2)
    b = animal_scaling(params, Ms=(1,), Ls=(3,), reps=2)
    assert a == b

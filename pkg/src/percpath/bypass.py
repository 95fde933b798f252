"""Bypass construction around one edge of a path, and the iterative
covering procedure that removes every closed edge from a geodesic.

The covering run produces the sequence Gamma of (edge, radius) picks,
the final fully open path, and the discrepancy between the open-cluster
chemical distance and the truncated passage time, checked against the
total-radius bound.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import IO, Optional

from .config import EdgeConfig, resample_edge
from .distances import (
    PathRep,
    d_and_t_star,
    extract_geodesic,
    path_is_open,
    truncated_T,
)
from .errors import PreconditionViolated, RadiusNotFound, StuckIteration
from .geometry import EdgeId, canonical_edge
from .radius import (
    CASE_INTERIOR,
    RadiusRecord,
    _path_linf,
    empirical_radius,
)


@dataclass(frozen=True)
class BypassResult:
    """One rerouted path: eta joins the endpoints of the original path,
    the detour is its open connector of length <= 2 * c_star_op * N, and
    every closed edge of eta stays outside Lambda_N(e)."""

    eta: PathRep
    detour: PathRep
    radius_used: int
    case_tag: str


@dataclass(frozen=True)
class CoveringResult:
    gamma0: PathRep
    Gamma: tuple[tuple[EdgeId, int], ...]
    eta_final: PathRep
    total_detour: int
    discrepancy: int


def _cheb(a, b) -> int:
    return max(abs(x - y) for x, y in zip(a, b))


def build_bypass(
    cfg: EdgeConfig, gamma: PathRep, e: EdgeId, record: RadiusRecord
) -> BypassResult:
    """Reroute gamma around e using the connector certified by the
    PerPath radius record.

    Interior case: the stretch between the first and last crossing
    subpaths of the annulus is replaced by the open connector.  Endpoint
    cases: the initial stretch from the inside endpoint up to the last
    crossing subpath is replaced.  Concatenation is loop-erased, which
    never lengthens the path or adds closed edges."""
    if record.N is None:
        raise RadiusNotFound(record.n_max, e)
    N = record.N
    t = _path_linf(gamma, e.x_e)
    in_start = t[0] <= 3 * N
    in_end = t[-1] <= 3 * N
    if in_start and in_end:
        raise PreconditionViolated(
            f"both endpoints of the path sit inside the 3N box of {e}"
        )
    reversed_ = in_end
    g = gamma.reverse() if reversed_ else gamma
    w = record.witness
    verts = g.vertices
    if record.case_tag == CASE_INTERIOR:
        prefix = g.subpath(verts[0], w.start)
        suffix = g.subpath(w.end, verts[-1])
        eta = prefix @ w @ suffix
    else:
        suffix = g.subpath(w.end, verts[-1])
        eta = w @ suffix
    if reversed_:
        eta = eta.reverse()
    _assert_bypass(cfg, eta, w, e, N)
    return BypassResult(
        eta=eta, detour=w, radius_used=N, case_tag=record.case_tag
    )


def _assert_bypass(cfg, eta, detour, e, N):
    c2 = 2 * cfg.params.c_star_op
    assert path_is_open(cfg, detour)
    assert len(detour) <= c2 * N
    ex, ey = e.x_e, e.y_e
    for a, b in eta.edges():
        if {a, b} == {ex, ey}:
            raise AssertionError("bypass retained the bypassed edge")
        if not cfg.is_open(canonical_edge(a, b, cfg.domain)):
            assert min(_cheb(a, e.x_e), _cheb(b, e.x_e)) > N, (
                "closed edge of eta inside the protected box"
            )


def _closed_edges(cfg: EdgeConfig, path: PathRep) -> list[EdgeId]:
    out = []
    for a, b in path.edges():
        eid = canonical_edge(a, b, cfg.domain)
        if not cfg.is_open(eid):
            out.append(eid)
    return out


def covering_process(
    cfg: EdgeConfig,
    gamma: PathRep,
    trace: Optional[IO[str]] = None,
) -> CoveringResult:
    """Iteratively bypass the maximal-radius closed edge of the current
    path until it is fully open.

    Each round recomputes PerPath radii for the remaining closed edges,
    picks the argmax (ties by lexicographic edge), builds its bypass,
    and requires the closed-edge count to drop.  The discrepancy between
    the open chemical distance and the truncated passage time of the
    regularized endpoints is checked against 2 * c_star_op * sum of the
    picked radii."""
    eta = gamma
    picks: list[tuple[EdgeId, int]] = []
    total_detour = 0
    n_closed = len(_closed_edges(cfg, eta))
    rounds = 0
    while True:
        clo = _closed_edges(cfg, eta)
        if not clo:
            break
        best = None
        for e in clo:
            rec = empirical_radius(cfg, eta, e)
            if rec.N is None:
                raise RadiusNotFound(rec.n_max, e)
            key = (-rec.N, e.x_e, e.y_e)
            if best is None or key < best[0]:
                best = (key, e, rec)
        _, e_star, rec = best
        bp = build_bypass(cfg, eta, e_star, rec)
        eta = bp.eta
        picks.append((e_star, rec.N))
        total_detour += len(bp.detour)
        remaining = len(_closed_edges(cfg, eta))
        if remaining >= len(clo):
            raise StuckIteration(
                f"closed edges went {len(clo)} -> {remaining} at {e_star}"
            )
        if trace is not None:
            trace.write(
                json.dumps(
                    {
                        "edge": [list(e_star.x_e), list(e_star.y_e)],
                        "radius": rec.N,
                        "detour_len": len(bp.detour),
                        "remaining_closed": remaining,
                    }
                )
                + "\n"
            )
        rounds += 1
        assert rounds <= n_closed
    assert path_is_open(cfg, eta)
    _assert_separation(picks)
    radii = [r for _, r in picks]
    assert radii == sorted(radii, reverse=True), "radii increased along Gamma"
    dstar, tstar = d_and_t_star(cfg)
    discrepancy = int(round(dstar - tstar.value()))
    bound = 2 * cfg.params.c_star_op * sum(radii)
    assert discrepancy <= bound
    return CoveringResult(
        gamma0=gamma,
        Gamma=tuple(picks),
        eta_final=eta,
        total_detour=total_detour,
        discrepancy=discrepancy,
    )


def _assert_separation(picks):
    for i, (e, r) in enumerate(picks):
        for f, q in picks[i + 1 :]:
            gap = _cheb(e.x_e, f.x_e)
            assert gap >= max(r, q), (
                f"separation violated: {e} and {f} at distance {gap}"
            )


def grad_T(cfg: EdgeConfig, e: EdgeId) -> tuple[float, float]:
    """Discrete gradient of the truncated passage time in the edge's
    weight, with its certified upper bound.

    delta = T_n with e closed minus T_n with e open.  The bound is 0
    when e misses the geodesic of the e-open configuration, else
    min(W, c_star_op * PerPath radius + W * 1(U_e)) where U_e holds when
    the 3N box reaches one of the passage endpoints."""
    p = cfg.params
    W = p.W
    cfg_open = resample_edge(cfg, e, 1)
    cfg_closed = resample_edge(cfg, e, W)
    src = (0,) * p.d
    tgt = (p.n,) + (0,) * (p.d - 1)
    field_open = truncated_T(cfg_open, None, src, target=tgt)
    t_open = field_open.distance(tgt).value()
    t_closed = truncated_T(cfg_closed, None, src, target=tgt).distance(tgt).value()
    delta = t_closed - t_open
    gamma = extract_geodesic(field_open, tgt)
    on_path = any(
        {a, b} == {e.x_e, e.y_e} for a, b in gamma.edges()
    )
    if not on_path:
        bound = 0.0
    else:
        rec = empirical_radius(cfg_open, gamma, e)
        if rec.N is None:
            bound = W
        else:
            u_e = 3 * rec.N >= min(_cheb(e.x_e, src), _cheb(e.x_e, tgt))
            bound = min(W, p.c_star_op * rec.N + W * u_e)
    assert -1e-9 <= delta <= bound + 1e-9
    return delta, bound


@dataclass(frozen=True)
class ResamplingCost:
    total: float
    by_scale: tuple[tuple[float, int], ...]  # (scale value, edge count)


def resampling_cost(cfg: EdgeConfig) -> ResamplingCost:
    """Sum of squared truncated radii along the T_n geodesic, with the
    per-scale decomposition sum_M M^2 * #{e on gamma with R-hat = M}."""
    from .radius import truncated_radius

    p = cfg.params
    src = (0,) * p.d
    tgt = (p.n,) + (0,) * (p.d - 1)
    field = truncated_T(cfg, None, src, target=tgt)
    gamma = extract_geodesic(field, tgt)
    counts: dict[float, int] = {}
    for a, b in gamma.edges():
        eid = canonical_edge(a, b, cfg.domain)
        rec = empirical_radius(cfg, gamma, eid)
        rhat = truncated_radius(cfg, rec)
        counts[rhat] = counts.get(rhat, 0) + 1
    total = sum(m * m * k for m, k in counts.items())
    return ResamplingCost(
        total=float(total),
        by_scale=tuple(sorted(counts.items())),
    )

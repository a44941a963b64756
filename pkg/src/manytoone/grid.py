"""Array versions of the region conditions and strategy rates.

Each function takes per-transmitter arrays of identical shape (one entry per
grid cell) and returns ``(holds, margin)`` arrays computed with the same
closed forms and tolerance conventions as the scalar certificates.
"""

from __future__ import annotations

import itertools

import numpy as np

from .channel import DEFAULT_TOL, StrategySpec


class GridChannel:
    """Gains ``h[j]`` (j = 2..K) and powers ``P[i]`` (i = 1..K) as arrays."""

    def __init__(self, K, h, P, sigma2):
        self.K = K
        self.h = {j: np.asarray(h[j], dtype=float) for j in range(2, K + 1)}
        self.P = {i: np.asarray(P[i], dtype=float) for i in range(1, K + 1)}
        self.sigma2 = list(sigma2)
        self.shape = np.broadcast_shapes(*(a.shape for a in (*self.h.values(), *self.P.values())))

    @property
    def interferers(self):
        return range(2, self.K + 1)

    def g2(self, j):
        return self.h[j] ** 2

    def interference(self, j):
        return self.h[j] ** 2 * self.P[j]

    def total(self, fn, indices):
        out = np.zeros(self.shape)
        for j in indices:
            out = out + fn(j)
        return out


def _geq(lhs, rhs, tol, strict=False):
    m = lhs - rhs
    return (m > tol if strict else m >= -tol), m


def _all(parts):
    holds = np.logical_and.reduce([p[0] for p in parts])
    margin = np.minimum.reduce([p[1] for p in parts])
    return holds, margin


def _any(parts):
    holds = np.logical_or.reduce([p[0] for p in parts])
    margin = np.maximum.reduce([p[1] for p in parts])
    return holds, margin


def residual(g: GridChannel, indices, tol=DEFAULT_TOL):
    return _geq(np.ones(g.shape), g.total(g.g2, indices), tol)


def t1(g, tol=DEFAULT_TOL):
    return residual(g, g.interferers, tol)


def t2_t4(g, k, tol=DEFAULT_TOL):
    others = [j for j in g.interferers if j != k]
    gain_sum = g.total(g.g2, others)
    load = 1.0 + g.total(g.interference, others)
    with np.errstate(divide="ignore", invalid="ignore"):
        threshold = np.where(gain_sum < 1.0, load**2 / (1.0 - gain_sum), np.inf)
    return _all([_geq(g.g2(k), threshold, tol), _geq(np.ones(g.shape), gain_sum, tol, strict=True)])


def t5(g, tol=DEFAULT_TOL):
    return _all([_geq(np.ones(g.shape), g.g2(i), tol) for i in g.interferers])


def t3(g, strong, weak, rho2, tol=DEFAULT_TOL):
    """One role assignment of the M3 genie region; ``rho2`` may be an array."""
    rho2 = np.broadcast_to(np.asarray(rho2, dtype=float), g.shape)
    valid = (rho2 > 0) & (rho2 < 1) & (g.P[2] > 0) & (g.P[3] > 0)
    load = 1.0 + g.interference(weak)
    with np.errstate(divide="ignore", invalid="ignore"):
        c1 = _geq(g.g2(strong), load**2 / rho2, tol)
    holds, margin = _all([c1, _geq(g.g2(weak), np.ones(g.shape), tol)])
    return holds & valid, np.where(valid, margin, -np.inf)


def sorted_order(g, decoded):
    """Per-cell decoding order by descending ``h^2 (sigma^2 + P)``, ties by index.

    Returns an integer array of shape ``(len(decoded), *shape)`` holding
    transmitter indices.
    """
    decoded = sorted(decoded)
    keys = np.stack([-(g.g2(j) * (g.sigma2[j - 1] + g.P[j])) for j in decoded])
    pos = np.argsort(keys, axis=0, kind="stable")
    return np.asarray(decoded)[pos]


def sic(g, decoded, tol=DEFAULT_TOL):
    """Feasibility of cancelling ``decoded`` (in the sorted order) and its worst stage slack."""
    decoded = sorted(decoded)
    undecoded = [j for j in g.interferers if j not in decoded]
    if not decoded:
        return np.ones(g.shape, bool), np.full(g.shape, np.inf)
    order = sorted_order(g, decoded)
    idx = {j: n for n, j in enumerate(decoded)}
    lhs_all = np.stack([g.g2(j) * g.sigma2[j - 1] for j in decoded])
    inter = np.stack([g.interference(j) for j in decoded])
    rank = np.vectorize(idx.get)(order)
    lhs = np.take_along_axis(lhs_all, rank, axis=0)
    I = np.take_along_axis(inter, rank, axis=0)
    # interference decoded after each stage
    later = np.flip(np.cumsum(np.flip(I, 0), 0), 0) - I
    rhs = g.sigma2[0] + g.P[1] + later + g.total(g.interference, undecoded)
    margins = lhs - rhs
    return np.all(margins >= -tol, axis=0), margins.min(axis=0)


def t7(g, decoded, tol=DEFAULT_TOL):
    undecoded = [j for j in g.interferers if j not in set(decoded)]
    return _all([sic(g, decoded, tol), residual(g, undecoded, tol)])


def t8_order(g, order, tol=DEFAULT_TOL):
    parts = []
    for pos, j in enumerate(order[:-1]):
        t_next = 1.0 + g.total(g.interference, order[pos + 1:])
        with np.errstate(divide="ignore"):
            rhs = np.where(g.P[j] > 0, (1.0 + 1.0 / g.P[j]) * t_next, np.inf)
        parts.append(_geq(rhs, g.g2(j), tol))
    parts.append(_geq(np.ones(g.shape), g.g2(order[-1]), tol))
    return _all(parts)


def t8(g, tol=DEFAULT_TOL):
    """Union over every genie ordering of 2..K."""
    return _any([t8_order(g, perm, tol) for perm in itertools.permutations(g.interferers)])


def subsets(indices):
    indices = list(indices)
    for n in range(len(indices) + 1):
        yield from itertools.combinations(indices, n)


def _half_log2(x):
    return 0.5 * np.log2(x)


def xc_rate(g, partners):
    members = set(partners)
    signal = g.P[1] + g.total(g.interference, members)
    inn = g.sigma2[0] + g.total(g.interference, [j for j in g.interferers if j not in members])
    rate = _half_log2(1.0 + signal / inn)
    for j in g.interferers:
        if j not in members:
            rate = rate + _half_log2(1.0 + g.P[j] / g.sigma2[j - 1])
    ok = np.logical_and.reduce([g.P[j] != 0 for j in members]) if members else np.ones(g.shape, bool)
    return np.where(ok, rate, -np.inf)


def ic_rate(g, decoded, tol=DEFAULT_TOL):
    undecoded = [j for j in g.interferers if j not in set(decoded)]
    rate = _half_log2(1.0 + g.P[1] / (g.sigma2[0] + g.total(g.interference, undecoded)))
    for j in g.interferers:
        rate = rate + _half_log2(1.0 + g.P[j] / g.sigma2[j - 1])
    feasible = sic(g, decoded, tol)[0]
    return np.where(feasible, rate, -np.inf)


def best(g, mode, tol=DEFAULT_TOL):
    """Index (into :func:`subsets` order) and rate of the best candidate per cell.

    A later candidate replaces the incumbent only when more than 1e-12 bits
    better, so ties go to the earlier (smaller) set.
    """
    cands = list(subsets(g.interferers))
    best_rate = np.full(g.shape, -np.inf)
    best_idx = np.zeros(g.shape, dtype=int)
    for n, s in enumerate(cands):
        rate = xc_rate(g, s) if mode == "XC" else ic_rate(g, s, tol)
        better = rate > best_rate + 1e-12 if n else np.isfinite(rate)
        best_rate = np.where(better, rate, best_rate)
        best_idx = np.where(better, n, best_idx)
    return cands, best_idx, best_rate


def strategy_label(mode, subset):
    return StrategySpec.xc({1, *subset}).label if mode == "XC" else StrategySpec.ic(subset).label

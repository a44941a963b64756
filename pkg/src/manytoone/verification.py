"""Seeded verification suite comparing closed forms against the oracles.

Each check reduces many random trials to one number (a worst-case error or
a disagreement count) and compares it with its tolerance.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .channel import StandardChannel, StrategySpec
from .optimality import (
    _subsets,
    check_t7,
    check_t8,
    delta_gap,
    rho_for_gap,
    t3_gap,
)
from .oracle import (
    GaussianSystem,
    McConfig,
    brute_force_t7,
    brute_force_t8,
    channel_system,
    gaussian_entropy,
    gaussian_mi,
    mc_entropy,
    ordered_outer_bound_via_mi,
    philox,
    random_channel,
    rate_via_mi,
    sic_stage_gains_via_mi,
    smart_genie_mi,
    t3_gap_direct,
    verify_lemma_li,
)
from .rates import rate_of, sic_feasible, sorted_decoding_order, sum_rate_m1

SUITES = ("all", "exact", "permutation", "mc")


@dataclass(frozen=True)
class CheckResult:
    """One verification line; ``kind`` selects how lhs is compared with rhs."""

    name: str
    lhs: float
    rhs: float
    tol: float
    kind: str = "abs"  # "abs": |lhs - rhs| <= tol, "gt": lhs > rhs

    @property
    def passed(self) -> bool:
        if self.kind == "gt":
            return self.lhs > self.rhs
        return abs(self.lhs - self.rhs) <= self.tol

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag} {self.name} lhs={self.lhs:.12g} rhs={self.rhs:.12g} tol={self.tol:.12g}"


def _random_system(rng, n=5):
    A = rng.normal(size=(n, n))
    return GaussianSystem(A @ A.T + 0.1 * np.eye(n), [f"v{i}" for i in range(n)])


def _t3_channel(rng):
    b = rng.uniform(0.1, 5.0)
    P3 = rng.uniform(0.1, 100.0)
    a = rng.uniform(0.1, 10.0)
    return StandardChannel(3, [a, b], [rng.uniform(0.1, 10.0), rng.uniform(0.1, 10.0), P3])


def _t5_channel(rng, K):
    h = rng.uniform(-1.0, 1.0, K - 1)
    P = np.exp(rng.uniform(np.log(0.01), np.log(100.0), K))
    return StandardChannel(K, h.tolist(), P.tolist())


def check_entropy_closed_form(rng, trials):
    worst = 0.0
    for _ in range(trials):
        v = float(rng.uniform(0.01, 100.0))
        sys = GaussianSystem(np.array([[v]]), ["x"])
        worst = max(worst, abs(gaussian_entropy(sys, "x") - 0.5 * math.log2(2 * math.pi * math.e * v)))
    return CheckResult("entropy_closed_form", worst, 0.0, 1e-12)


def check_mi_symmetry(rng, trials):
    worst = 0.0
    for _ in range(trials):
        sys = _random_system(rng)
        ab = gaussian_mi(sys, ["v0", "v1"], "v2", ["v3", "v4"])
        ba = gaussian_mi(sys, "v2", ["v0", "v1"], ["v3", "v4"])
        worst = max(worst, abs(ab - ba))
    return CheckResult("mi_symmetry", worst, 0.0, 1e-12)


def check_mi_chain_rule(rng, trials):
    worst = 0.0
    for _ in range(trials):
        sys = _random_system(rng)
        whole = gaussian_mi(sys, "v0", ["v1", "v2"])
        parts = gaussian_mi(sys, "v0", "v1") + gaussian_mi(sys, "v0", "v2", "v1")
        worst = max(worst, abs(whole - parts))
    return CheckResult("mi_chain_rule", worst, 0.0, 1e-9)


def check_rates_vs_mi(rng, trials):
    worst = 0.0
    for n in range(trials):
        ch = random_channel(rng, 3 + n % 3)
        for s in _subsets(ch.interferers):
            for spec in (StrategySpec.xc({1, *s}), StrategySpec.ic(s)):
                worst = max(worst, abs(rate_of(ch, spec).sum_rate_bits - rate_via_mi(ch, spec)))
    return CheckResult("rates_vs_gaussian_mi", worst, 0.0, 1e-9)


def check_sic_sign(rng, trials):
    bad = 0
    for n in range(trials):
        ch = random_channel(rng, 3 + n % 3)
        order = tuple(ch.interferers)
        margins = sic_feasible(ch, order, order)[1]
        gains = sic_stage_gains_via_mi(ch, order)
        bad += sum((m >= 0) != (g >= -1e-12) for m, g in zip(margins, gains) if abs(m) > 1e-9)
    return CheckResult("sic_stage_sign_vs_mi", bad, 0, 0)


def check_t3_direct(rng, trials):
    worst = 0.0
    for _ in range(trials):
        ch = _t3_channel(rng)
        rho2 = float(rng.uniform(0.01, 0.99))
        for variant in (1, 2):
            closed = t3_gap(ch, rho2, variant)[1].gap_bits
            worst = max(worst, abs(closed - t3_gap_direct(ch, rho2, variant).gap_bits))
    return CheckResult("t3_gap_direct_vs_closed_form", worst, 0.0, 1e-9)


def check_gap_inverse(rng, trials):
    worst = 0.0
    for _ in range(trials):
        ch = _t3_channel(rng)
        rho2 = float(rng.uniform(0.01, 0.99))
        gap = t3_gap(ch, rho2)[1].gap_bits
        worst = max(worst, abs(rho_for_gap(gap, ch.gain(3), ch.power(3)) - rho2))
    return CheckResult("rho_for_gap_inverts_t3_gap", worst, 0.0, 1e-9)


def check_smart_genie(rng, trials):
    worst, smallest = 0.0, math.inf
    for _ in range(trials):
        b = float(rng.uniform(0.0, 0.95))
        ch = StandardChannel(3, [float(rng.uniform(0.1, 5.0)), b], np.exp(rng.uniform(-2, 2, 3)).tolist())
        worst = max(worst, abs(smart_genie_mi(ch)))
        smallest = min(smallest, smart_genie_mi(ch, eta_scale=1.1), smart_genie_mi(ch, eta_scale=0.9))
    return [
        CheckResult("smart_genie_zero_mi", worst, 0.0, 1e-9),
        CheckResult("smart_genie_perturbed_mi", smallest, 1e-6, 0.0, kind="gt"),
    ]


def check_lemma(rng, trials):
    worst = 0.0
    for _ in range(trials):
        K = int(rng.integers(1, 6))
        sigma2 = float(rng.uniform(0.1, 5.0))
        c = rng.normal(size=K)
        c *= math.sqrt(sigma2) * rng.uniform(0.0, 1.0) / np.linalg.norm(c)
        P = np.exp(rng.uniform(-3, 3, K))
        rep = verify_lemma_li(P.tolist(), c.tolist(), sigma2)
        worst = max(worst, abs(rep.lhs - rep.rhs))
        if rep.transformed is not None:
            worst = max(worst, abs(rep.transformed - rep.rhs))
    return CheckResult("lemma_entropy_difference_equality", worst, 0.0, 1e-9)


def check_t6_outer(rng, trials):
    worst = 0.0
    for n in range(trials):
        ch = _t5_channel(rng, 3 + n % 4)
        mi_gap = ordered_outer_bound_via_mi(ch) - sum_rate_m1(ch).sum_rate_bits
        worst = max(worst, abs(mi_gap - delta_gap(ch)))
    return CheckResult("t6_outer_bound_vs_mi", worst, 0.0, 1e-9)


def check_t7_brute(rng, trials):
    bad = 0
    for n in range(trials):
        ch = random_channel(rng, 3 + n % 3, h_max=4.0)
        for s in _subsets(ch.interferers):
            fast, slow = check_t7(ch, s), brute_force_t7(ch, s)
            bad += (fast.holds != slow.holds) or (fast.holds and fast.witness != slow.witness)
    return CheckResult("t7_vs_brute_force", bad, 0, 0)


def check_t8_brute(rng, trials):
    bad = 0
    for n in range(trials):
        ch = random_channel(rng, 3 + n % 3, h_max=2.5)
        cert, rep = check_t8(ch)
        slow = brute_force_t8(ch)
        bad += cert.holds != slow.holds
        if cert.holds and slow.holds:
            bad += abs(cert.gap_bits - slow.gap_bits) > 1e-9
    return CheckResult("t8_vs_brute_force", bad, 0, 0)


def check_sorted_order(rng, trials):
    bad = 0
    for n in range(trials):
        ch = random_channel(rng, 3 + n % 4, h_max=5.0)
        s = tuple(ch.interferers)
        any_ok = brute_force_t7(StandardChannel(ch.K, ch.h, ch.P), s).witness is not None
        bad += any_ok != sic_feasible(ch, s, sorted_decoding_order(ch, s))[0]
    return CheckResult("sorted_order_feasible_iff_any", bad, 0, 0)


def check_mc(cfg: McConfig):
    rng = philox(cfg.seed)
    sys = _random_system(rng, 3)
    est = mc_entropy(sys, ["v0", "v1", "v2"], cfg)
    exact = gaussian_entropy(sys, ["v0", "v1", "v2"])
    ch = random_channel(rng, 3)
    y = channel_system(ch)
    est_y = mc_entropy(y, ["y1", "y2"], cfg)
    exact_y = gaussian_entropy(y, ["y1", "y2"])
    k = cfg.confidence_sigma
    return [
        CheckResult("mc_entropy_random_system", est.estimate, exact, k * est.stderr),
        CheckResult("mc_entropy_channel_outputs", est_y.estimate, exact_y, k * est_y.stderr),
    ]


_EXACT: list[tuple[str, Callable]] = [
    ("entropy", check_entropy_closed_form),
    ("symmetry", check_mi_symmetry),
    ("chain", check_mi_chain_rule),
    ("rates", check_rates_vs_mi),
    ("sic", check_sic_sign),
    ("t3", check_t3_direct),
    ("inverse", check_gap_inverse),
    ("genie", check_smart_genie),
    ("lemma", check_lemma),
    ("t6", check_t6_outer),
]
_PERMUTATION = [("t7", check_t7_brute), ("t8", check_t8_brute), ("order", check_sorted_order)]


def run_suite(suite: str = "all", seed: int = 42, samples: int = 1_000_000, trials: int = 200) -> list[CheckResult]:
    """Run a named suite; every check draws from its own Philox stream."""
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    if trials < 1:
        raise ValueError("trials must be positive")
    cfg = McConfig(seed, samples)
    groups = []
    if suite in ("all", "exact"):
        groups += _EXACT
    if suite in ("all", "permutation"):
        groups += _PERMUTATION
    out = []
    for name, fn in groups:
        # each check has its own keyed stream, so suites can run in isolation
        res = fn(philox((seed + zlib.crc32(name.encode())) % 2**64), trials)
        out += res if isinstance(res, list) else [res]
    if suite in ("all", "mc"):
        out += check_mc(cfg)
    return out

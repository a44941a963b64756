"""Sum-rate optimality certificates, genie-aided gaps and strategy selection.

Theorem identifiers follow the results for the many-to-one channel:

====  ==============================================================
T1    treating interference as noise (M1 / MI1) is sum-rate optimal
T2    3-user two-transmitter MAC (M2) is optimal
T3    3-user full MAC (M3) is within a genie gap of the outer bound
T4    K-user two-transmitter MAC is optimal
T5    the XC loses nothing when operated as an IC
T6    M1 is within ``delta <= K/2 - 1`` bits (XC)
T7    IC successive cancellation of a set (MIk) is optimal
T8    MI1 is within ``K/2 - 1`` bits on a permuted region (IC)
====  ==============================================================
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .channel import DEFAULT_TOL, ChannelError, StandardChannel, StrategySpec, ensure_valid
from .rates import (
    RateReport,
    best_decoding_order,
    half_log2,
    sic_stage_terms,
    sorted_decoding_order,
    sum_rate_m1,
    sum_rate_mac_subset,
    sum_rate_mi_k,
    t_vector,
)

EXACT_THEOREMS = frozenset({"T1", "T2", "T4", "T7"})
GAP_THEOREMS = frozenset({"T3", "T6", "T8"})

#: Largest strategy enumeration accepted by :func:`recommend` (2^(K-1) subsets).
MAX_ENUMERATION_K = 12


@dataclass(frozen=True)
class Condition:
    """One inequality of a theorem, evaluated at a channel point.

    ``margin`` is the signed slack: positive inside the region, negative
    outside, whatever the direction of the inequality.
    """

    description: str
    lhs: float
    rhs: float
    margin: float
    satisfied: bool

    def to_dict(self) -> dict:
        return {
            "description": self.description,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "satisfied": self.satisfied,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Condition":
        return cls(d["description"], d["lhs"], d["rhs"], d["margin"], d["satisfied"])


def _geq(desc, lhs, rhs, tol, strict=False):
    margin = lhs - rhs
    return Condition(desc, lhs, rhs, margin, margin > tol if strict else margin >= -tol)


def _leq(desc, lhs, rhs, tol, strict=False):
    margin = rhs - lhs
    return Condition(desc, lhs, rhs, margin, margin > tol if strict else margin >= -tol)


@dataclass(frozen=True)
class Certificate:
    """Which theorem's conditions hold, with every condition's margin.

    ``witness`` is the MAC partner (T2/T4), the decoding order (T7) or the
    genie ordering (T8). ``gap_bits`` is set for the gap theorems T3, T6 and
    T8 only. ``variant`` distinguishes the two symmetric T3 condition sets.
    """

    theorem_id: str
    holds: bool
    conditions: tuple[Condition, ...]
    witness: int | tuple[int, ...] | None = None
    gap_bits: float | None = None
    variant: int | None = None

    @property
    def exact(self) -> bool:
        return self.theorem_id in EXACT_THEOREMS

    def violations(self) -> list[str]:
        return [c.description for c in self.conditions if not c.satisfied]

    @property
    def min_margin(self) -> float:
        return min((c.margin for c in self.conditions), default=math.inf)

    def to_dict(self) -> dict:
        w = self.witness
        return {
            "theorem_id": self.theorem_id,
            "holds": self.holds,
            "conditions": [c.to_dict() for c in self.conditions],
            "witness": list(w) if isinstance(w, tuple) else w,
            "gap_bits": self.gap_bits,
            "variant": self.variant,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Certificate":
        w = d.get("witness")
        return cls(
            d["theorem_id"],
            d["holds"],
            tuple(Condition.from_dict(c) for c in d["conditions"]),
            tuple(w) if isinstance(w, list) else w,
            d.get("gap_bits"),
            d.get("variant"),
        )


def _certificate(theorem_id, conditions, **kw) -> Certificate:
    conditions = tuple(conditions)
    return Certificate(theorem_id, all(c.satisfied for c in conditions), conditions, **kw)


@dataclass(frozen=True)
class GapReport:
    """Achievable sum-rate against a genie-aided outer bound."""

    achievable_bits: float
    outer_bound_bits: float
    gap_bits: float
    rho2: float | None = None

    def to_dict(self) -> dict:
        return {
            "achievable_bits": self.achievable_bits,
            "outer_bound_bits": self.outer_bound_bits,
            "gap_bits": self.gap_bits,
            "rho2": self.rho2,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GapReport":
        return cls(d["achievable_bits"], d["outer_bound_bits"], d["gap_bits"], d.get("rho2"))


def _unit_noise(ch: StandardChannel) -> StandardChannel:
    ensure_valid(ch)
    if not ch.unit_noise:
        raise ChannelError("optimality conditions assume unit noise variances (standard form)")
    return ch


def _fmt_set(indices) -> str:
    return "{" + ",".join(map(str, indices)) + "}"


def _residual_condition(ch, indices, tol) -> Condition:
    indices = list(indices)
    lhs = math.fsum(ch.gain(j) ** 2 for j in indices)
    return _leq(f"sum of h_j^2 over j in {_fmt_set(indices)} <= 1", lhs, 1.0, tol)


# ---------------------------------------------------------------------------
# Exact sum-rate capacity regions
# ---------------------------------------------------------------------------

def check_t1(ch: StandardChannel, tol: float = DEFAULT_TOL) -> Certificate:
    """Noisy-interference region ``sum_j h_j^2 <= 1``.

    When it holds the sum-rate capacity equals :func:`sum_rate_m1`, for the
    XC and the IC alike. With ``K = 2`` this is the Z-channel condition
    ``a^2 <= 1``.
    """
    _unit_noise(ch)
    return _certificate("T1", [_residual_condition(ch, ch.interferers, tol)])


def check_t2_t4(ch: StandardChannel, k: int, tol: float = DEFAULT_TOL) -> Certificate:
    """Region where the MAC of transmitters 1 and ``k`` achieves capacity.

    Requires, with the sums over the other interferers j != k,

        h_k^2 >= (1 + sum h_j^2 P_j)^2 / (1 - sum h_j^2)   and   sum h_j^2 < 1.

    Reported as T2 for three users and T4 otherwise.
    """
    _unit_noise(ch)
    if not 2 <= k <= ch.K:
        raise IndexError(f"MAC partner {k} outside 2..{ch.K}")
    others = [j for j in ch.interferers if j != k]
    gain_sum = math.fsum(ch.gain(j) ** 2 for j in others)
    interference = math.fsum(ch.interference(j) for j in others)
    threshold = (1.0 + interference) ** 2 / (1.0 - gain_sum) if gain_sum < 1.0 else math.inf
    rest = _fmt_set(others)
    conditions = [
        _geq(
            f"h_{k}^2 >= (1 + sum h_j^2 P_j)^2 / (1 - sum h_j^2) over j in {rest}",
            ch.gain(k) ** 2,
            threshold,
            tol,
        ),
        _leq(f"sum of h_j^2 over j in {rest} < 1", gain_sum, 1.0, tol, strict=True),
    ]
    return _certificate("T2" if ch.K == 3 else "T4", conditions, witness=k)


def _t3_roles(ch, variant):
    # variant 1: transmitter 2 strong with genie, transmitter 3 at least unit gain
    if variant == 1:
        return 2, 3
    if variant == 2:
        return 3, 2
    raise ValueError("T3 variant must be 1 or 2")


def t3_gap(
    ch: StandardChannel, rho2: float, variant: int = 1, tol: float = DEFAULT_TOL
) -> tuple[Certificate, GapReport]:
    """Genie-aided outer bound for the three-user full MAC (strategy M3).

    Variant 1 requires ``a^2 >= (1 + b^2 P_3)^2 / rho2`` and ``b^2 >= 1``
    (``a = h_2``, ``b = h_3``); variant 2 swaps the roles of transmitters 2
    and 3. The gap to the M3 sum-rate is

        0.5 log2((1 - rho2 / (1 + b^2 P_3)) / (1 - rho2)),

    with ``rho2`` the squared genie-noise correlation.
    """
    _unit_noise(ch)
    if ch.K != 3:
        raise ChannelError("the M3 gap result is stated for K = 3")
    if not 0.0 < rho2 < 1.0:
        raise ValueError(f"rho2 must lie in (0, 1), got {rho2}")
    strong, weak = _t3_roles(ch, variant)
    load = 1.0 + ch.interference(weak)
    conditions = [
        _geq(
            f"h_{strong}^2 >= (1 + h_{weak}^2 P_{weak})^2 / rho2",
            ch.gain(strong) ** 2,
            load**2 / rho2,
            tol,
        ),
        _geq(f"h_{weak}^2 >= 1", ch.gain(weak) ** 2, 1.0, tol),
    ]
    gap = half_log2((1.0 - rho2 / load) / (1.0 - rho2))
    achievable = sum_rate_mac_subset(ch, {1, 2, 3}).sum_rate_bits
    cert = _certificate("T3", conditions, gap_bits=gap, variant=variant)
    return cert, GapReport(achievable, achievable + gap, gap, rho2)


def tightest_t3(
    ch: StandardChannel, variant: int = 1, tol: float = DEFAULT_TOL
) -> tuple[Certificate, GapReport] | None:
    """T3 bound at the smallest admissible ``rho2 = (1 + b^2 P_3)^2 / a^2``.

    The gap grows with ``rho2``, so this is the best bound the region allows.
    Returns None when no ``rho2`` in (0, 1) satisfies the first condition.
    """
    strong, weak = _t3_roles(ch, variant)
    g2 = ch.gain(strong) ** 2
    if g2 == 0:
        return None
    rho2 = (1.0 + ch.interference(weak)) ** 2 / g2
    if not rho2 < 1.0:
        return None
    return t3_gap(ch, rho2, variant, tol)


def rho_for_gap(delta_bits: float, b: float, P3: float) -> float:
    """Squared genie correlation giving an M3 gap of ``delta_bits``.

    Inverts the T3 gap: ``rho2 = (2^(2 delta) - 1) / (2^(2 delta) - 1/(1 + b^2 P_3))``.

    Examples
    --------
    >>> round(rho_for_gap(0.5, 1.5, 1.0), 6)
    0.590909
    """
    if not delta_bits >= 0:
        raise ValueError(f"gap must be nonnegative, got {delta_bits}")
    try:
        grow = math.expm1(2.0 * delta_bits * math.log(2.0))
    except OverflowError:
        return 1.0
    if grow == 0.0:
        return 0.0
    if math.isinf(grow):
        return 1.0
    shrink = b * b * P3 / (1.0 + b * b * P3)
    return grow / (grow + shrink)


def check_t5(ch: StandardChannel, tol: float = DEFAULT_TOL) -> Certificate:
    """Region ``h_i^2 <= 1`` for all i where the XC can run as an IC losslessly."""
    _unit_noise(ch)
    return _certificate(
        "T5", [_leq(f"h_{i}^2 <= 1", ch.gain(i) ** 2, 1.0, tol) for i in ch.interferers]
    )


def ordered_delta_gap(ch: StandardChannel, order: Sequence[int]) -> float:
    """Genie gap ``sum_i 0.5 log2(1 + h^2 P / (t_next (1 + P)))`` along ``order``.

    ``order`` permutes 2..K; ``t_next`` is one plus the received interference
    of the transmitters after position i, and the last position contributes
    nothing.
    """
    order = list(order)
    total = []
    for pos, j in enumerate(order[:-1]):
        t_next = 1.0 + math.fsum(ch.interference(m) for m in order[pos + 1:])
        total.append(half_log2(1.0 + ch.interference(j) / (t_next * (1.0 + ch.power(j)))))
    return math.fsum(total)


def delta_gap(ch: StandardChannel) -> float:
    """The T6 gap in natural transmitter order, from the t-vector."""
    t = t_vector(ch)
    return math.fsum(
        half_log2(1.0 + ch.interference(i) / (t.at(i + 1) * (1.0 + ch.power(i))))
        for i in range(2, ch.K)
    )


def t6_gap(ch: StandardChannel, tol: float = DEFAULT_TOL) -> GapReport:
    """Gap between M1 and the genie-aided outer bound inside the T5 region.

    Raises
    ------
    ChannelError
        If some ``h_i^2 > 1``.
    """
    cert = check_t5(ch, tol)
    if not cert.holds:
        raise ChannelError("T6 requires h_i^2 <= 1; violated: " + "; ".join(cert.violations()))
    achievable = sum_rate_m1(ch).sum_rate_bits
    gap = delta_gap(ch)
    if gap > ch.K / 2 - 1 + tol:
        raise RuntimeError(f"gap {gap} exceeds K/2 - 1")
    return GapReport(achievable, achievable + gap, gap)


def check_t6(ch: StandardChannel, tol: float = DEFAULT_TOL) -> Certificate:
    """T5 region conditions carrying the T6 gap."""
    cert = check_t5(ch, tol)
    return Certificate("T6", cert.holds, cert.conditions, gap_bits=delta_gap(ch))


def check_t7(ch: StandardChannel, decoded_set: Iterable[int], tol: float = DEFAULT_TOL) -> Certificate:
    """Optimality of cancelling ``decoded_set`` at receiver 1 (IC strategy MIk).

    Holds when some decoding order passes every successive cancellation
    stage and the undecoded interferers satisfy ``sum h_j^2 <= 1``. The
    witness is the lexicographically first feasible order. For an empty set
    the certificate coincides with :func:`check_t1`.
    """
    _unit_noise(ch)
    decoded = sorted(set(decoded_set))
    StrategySpec.ic(decoded).check(ch.K)
    residual = _residual_condition(ch, [j for j in ch.interferers if j not in decoded], tol)
    if not decoded:
        return _certificate("T7", [residual])
    found = best_decoding_order(ch, decoded, tol).order
    order = found if found is not None else sorted_decoding_order(ch, decoded)
    conditions = []
    for pos, (j, lhs, rhs) in enumerate(sic_stage_terms(ch, decoded, order), start=1):
        conditions.append(
            _geq(f"stage {pos}: h_{j}^2 >= 1 + P_1 + remaining interference", lhs, rhs, tol)
        )
    conditions.append(residual)
    return _certificate("T7", conditions, witness=tuple(order) if found is not None else None)


# ---------------------------------------------------------------------------
# Permuted gap region for the IC
# ---------------------------------------------------------------------------

def t8_conditions(ch: StandardChannel, order: Sequence[int], tol: float = DEFAULT_TOL) -> list[Condition]:
    """Conditions of the permuted gap region for genie ordering ``order``."""
    order = list(order)
    conditions = []
    for pos, j in enumerate(order[:-1], start=1):
        t_next = 1.0 + math.fsum(ch.interference(m) for m in order[pos:])
        P = ch.power(j)
        rhs = (1.0 + 1.0 / P) * t_next if P > 0 else math.inf
        conditions.append(
            _leq(f"position {pos}: h_{j}^2 <= (1 + 1/P_{j}) t_next", ch.gain(j) ** 2, rhs, tol)
        )
    last = order[-1]
    conditions.append(_leq(f"position {len(order)}: h_{last}^2 <= 1", ch.gain(last) ** 2, 1.0, tol))
    return conditions


def _t8_constructed_order(ch, tol):
    # Each non-final position needs h^2 P / (1 + P) - 1 <= (interference after it);
    # later positions see less, so placing larger requirements first is optimal.
    def need(j):
        P = ch.power(j)
        return ch.interference(j) / (1.0 + P) - 1.0

    for last in ch.interferers:
        if ch.gain(last) ** 2 > 1.0 + tol:
            continue
        rest = sorted((j for j in ch.interferers if j != last), key=lambda j: (-need(j), j))
        order = (*rest, last)
        if all(c.satisfied for c in t8_conditions(ch, order, tol)):
            return order
    return None


def check_t8(ch: StandardChannel, tol: float = DEFAULT_TOL) -> tuple[Certificate, GapReport]:
    """Region where MI1 is within ``K/2 - 1`` bits of the IC sum capacity.

    For some ordering pi of 2..K, ``h_pi(i)^2 <= (1 + 1/P_pi(i)) t_{i+1}`` at
    every position but the last, and the last has ``h^2 <= 1``. Membership is
    decided by a sorting construction; for K <= 9 all orderings are also
    enumerated and the feasible one with the smallest gap becomes the witness.
    """
    _unit_noise(ch)
    constructed = _t8_constructed_order(ch, tol)
    achievable = sum_rate_m1(ch).sum_rate_bits
    if constructed is None:
        order = tuple(ch.interferers)
        conditions = t8_conditions(ch, order, tol)
        gap = ordered_delta_gap(ch, order)
        cert = Certificate("T8", False, tuple(conditions), None, gap)
        return cert, GapReport(achievable, achievable + gap, gap)
    best = constructed
    best_gap = ordered_delta_gap(ch, constructed)
    if ch.K - 1 <= 8:
        for perm in itertools.permutations(ch.interferers):
            if all(c.satisfied for c in t8_conditions(ch, perm, tol)):
                gap = ordered_delta_gap(ch, perm)
                if gap < best_gap - 1e-15 or (abs(gap - best_gap) <= 1e-15 and perm < best):
                    best, best_gap = perm, gap
    cert = _certificate("T8", t8_conditions(ch, best, tol), witness=tuple(best), gap_bits=best_gap)
    return cert, GapReport(achievable, achievable + best_gap, best_gap)


# ---------------------------------------------------------------------------
# Recommendation
# ---------------------------------------------------------------------------

@dataclass
class Recommendation:
    """Best achievable strategy and the strongest certificate that applies."""

    mode: str
    report: RateReport
    certificate: Certificate | None
    candidates: list[RateReport] = field(default_factory=list)

    @property
    def outer_bound_bits(self) -> float | None:
        if self.certificate is None:
            return None
        if self.certificate.exact:
            return self.report.sum_rate_bits
        return self.report.sum_rate_bits + self.certificate.gap_bits

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "best": self.report.to_dict(),
            "certificate": None if self.certificate is None else self.certificate.to_dict(),
            "outer_bound_bits": self.outer_bound_bits,
            "candidates": [
                {"strategy": r.strategy.label, "sum_rate_bits": r.sum_rate_bits}
                for r in self.candidates
            ],
        }


def _subsets(indices):
    indices = list(indices)
    for size in range(len(indices) + 1):
        yield from itertools.combinations(indices, size)


def _xc_candidates(ch):
    for extra in _subsets(ch.interferers):
        if any(ch.power(i) == 0 for i in extra):
            continue
        yield sum_rate_mac_subset(ch, (1, *extra))


def _ic_candidates(ch, tol):
    for decoded in _subsets(ch.interferers):
        order = best_decoding_order(ch, decoded, tol).order
        if order is not None:
            yield sum_rate_mi_k(ch, decoded, order)


def _strategy_certificates(ch, mode, tol):
    """All (certificate, strategy) pairs relevant to ``mode``."""
    out = [(check_t1(ch, tol), StrategySpec.xc({1}) if mode == "XC" else StrategySpec.ic(()))]
    if mode == "XC":
        for k in ch.interferers:
            out.append((check_t2_t4(ch, k, tol), StrategySpec.xc({1, k})))
        if ch.K == 3 and ch.power(2) > 0 and ch.power(3) > 0:
            for variant in (1, 2):
                t3 = tightest_t3(ch, variant, tol)
                if t3 is not None:
                    out.append((t3[0], StrategySpec.xc({1, 2, 3})))
        out.append((check_t6(ch, tol), StrategySpec.xc({1})))
    else:
        for decoded in _subsets(ch.interferers):
            if decoded:
                cert = check_t7(ch, decoded, tol)
                out.append((cert, StrategySpec.ic(decoded, cert.witness or None)))
        out.append((check_t8(ch, tol)[0], StrategySpec.ic(())))
    return out


def _select(ch, mode, tol):
    _unit_noise(ch)
    if mode not in ("XC", "IC"):
        raise ValueError(f"mode must be XC or IC, got {mode!r}")
    if ch.K > MAX_ENUMERATION_K:
        raise ChannelError(f"K = {ch.K} exceeds the enumeration cap of {MAX_ENUMERATION_K}")
    candidates = list(_xc_candidates(ch) if mode == "XC" else _ic_candidates(ch, tol))
    best = candidates[0]
    for rep in candidates[1:]:
        if rep.sum_rate_bits > best.sum_rate_bits + 1e-12:
            best = rep
    return best, candidates


def best_strategy(ch: StandardChannel, mode: str = "XC", tol: float = DEFAULT_TOL) -> RateReport:
    """Rate-maximizing strategy of :func:`recommend` without any certificates."""
    return _select(ch, mode.upper(), tol)[0]


def recommend(ch: StandardChannel, mode: str = "XC", tol: float = DEFAULT_TOL) -> Recommendation:
    """Pick the strategy with the largest achievable sum-rate.

    XC mode enumerates every MAC subset at receiver 1; IC mode every decoded
    set that has a feasible decoding order. Ties go to the smaller set, then
    to the lexicographically smaller one. The attached certificate is the
    strongest that holds: an exact capacity result first, else the gap
    result with the smallest gap, else None.

    Examples
    --------
    >>> rec = recommend(StandardChannel(3, [2, 0.6], [1, 1, 1]), "XC")
    >>> rec.report.strategy.label, rec.certificate.theorem_id
    ('M2:2', 'T2')
    """
    mode = mode.upper()
    best, candidates = _select(ch, mode, tol)

    holding = [(c, s) for c, s in _strategy_certificates(ch, mode, tol) if c.holds]
    exact = [(c, s) for c, s in holding if c.exact]
    certificate = None
    if exact:
        matching = [c for c, s in exact if s.mac_set == best.strategy.mac_set]
        certificate = matching[0] if matching else exact[0][0]
    else:
        gaps = [c for c, _ in holding if c.gap_bits is not None]
        if gaps:
            certificate = min(gaps, key=lambda c: c.gap_bits)
    return Recommendation(mode, best, certificate, candidates)


def applicable_certificates(
    ch: StandardChannel, strategy: StrategySpec, rho2: float | None = None, tol: float = DEFAULT_TOL
) -> list[Certificate]:
    """Certificates that speak about ``strategy`` itself."""
    _unit_noise(ch)
    partners = [i for i in strategy.mac_set if i != 1]
    certs = []
    if strategy.mode == "XC":
        if not partners:
            certs += [check_t1(ch, tol), check_t5(ch, tol), check_t6(ch, tol)]
        elif len(partners) == 1:
            certs.append(check_t2_t4(ch, partners[0], tol))
        elif ch.K == 3 and len(partners) == 2:
            for variant in (1, 2):
                if rho2 is not None:
                    certs.append(t3_gap(ch, rho2, variant, tol)[0])
                else:
                    t3 = tightest_t3(ch, variant, tol)
                    if t3 is not None:
                        certs.append(t3[0])
    else:
        if not partners:
            certs += [check_t1(ch, tol), check_t8(ch, tol)[0]]
        else:
            certs.append(check_t7(ch, partners, tol))
    return certs

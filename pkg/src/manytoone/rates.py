"""Achievable sum-rates of the Gaussian-codebook strategies.

XC strategies ``Mk`` decode a MAC subset jointly at receiver 1; IC
strategies ``MIk`` decode and cancel a set of interferers successively.
Rate values never depend on decodability, which is reported separately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

from .channel import DEFAULT_TOL, ChannelError, StandardChannel, StrategySpec, ensure_valid

#: Largest decoded set searched exhaustively for a decoding order.
EXHAUSTIVE_ORDER_LIMIT = 8


def half_log2(x: float) -> float:
    return 0.5 * math.log2(x)


@dataclass
class RateReport:
    """Sum-rate of one strategy with its per-receiver breakdown.

    ``inn_terms`` holds the interference-plus-noise power in the denominator
    of each receiver's log term. For IC strategies ``sic_feasible`` records
    whether the requested decoding order actually works; it is ``None`` in
    XC mode.
    """

    strategy: StrategySpec
    sum_rate_bits: float
    per_receiver_rates: list[tuple[int, float]]
    inn_terms: list[tuple[int, float]]
    sic_feasible: bool | None = None
    sic_margins: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy.to_dict(),
            "sum_rate_bits": self.sum_rate_bits,
            "per_receiver_rates": [[r, v] for r, v in self.per_receiver_rates],
            "inn_terms": [[r, v] for r, v in self.inn_terms],
            "sic_feasible": self.sic_feasible,
            "sic_margins": list(self.sic_margins),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RateReport":
        return cls(
            StrategySpec.from_dict(d["strategy"]),
            d["sum_rate_bits"],
            [(int(r), v) for r, v in d["per_receiver_rates"]],
            [(int(r), v) for r, v in d["inn_terms"]],
            d.get("sic_feasible"),
            list(d.get("sic_margins", [])),
        )


@dataclass(frozen=True)
class TiVector:
    """Residual interference-plus-noise levels ``t_i = 1 + sum_{j>=i} h_j^2 P_j``.

    ``t[i - 2]`` is ``t_i`` for i = 2..K; ``at(K + 1)`` is 1.
    """

    t: tuple[float, ...]

    def at(self, i: int) -> float:
        K = len(self.t) + 1
        if i == K + 1:
            return 1.0
        if not 2 <= i <= K:
            raise IndexError(i)
        return self.t[i - 2]


def t_vector(ch: StandardChannel) -> TiVector:
    acc = 1.0
    out = []
    for j in range(ch.K, 1, -1):
        acc += ch.interference(j)
        out.append(acc)
    return TiVector(tuple(reversed(out)))


def _direct_rate(ch: StandardChannel, i: int) -> float:
    return half_log2(1.0 + ch.power(i) / ch.sigma2[i - 1])


def sum_rate_mac_subset(ch: StandardChannel, mac_set: Iterable[int]) -> RateReport:
    """Sum-rate when ``mac_set`` forms a MAC at receiver 1.

    Members other than transmitter 1 send only their cross message and are
    decoded jointly at receiver 1; every other transmitter serves its own
    receiver and is treated as noise at receiver 1.

    Examples
    --------
    >>> ch = StandardChannel(3, [2, 0.5], [1, 1, 1])
    >>> round(sum_rate_mac_subset(ch, {1, 2}).sum_rate_bits, 5)
    1.66096
    """
    ensure_valid(ch)
    strategy = StrategySpec.xc(mac_set)
    strategy.check(ch.K)
    members = set(strategy.mac_set)
    for i in members - {1}:
        if ch.power(i) == 0:
            raise ChannelError(f"transmitter {i} has zero power and cannot join the MAC")
    # joint decoding at receiver 1
    signal = ch.power(1) + sum(ch.interference(i) for i in members - {1})
    inn = ch.sigma2[0] + sum(ch.interference(j) for j in ch.interferers if j not in members)
    rx1 = half_log2(1.0 + signal / inn)
    per = [(1, rx1)]
    inns = [(1, inn)]
    for i in ch.interferers:
        per.append((i, 0.0 if i in members else _direct_rate(ch, i)))
        inns.append((i, ch.sigma2[i - 1]))
    return RateReport(strategy, math.fsum(r for _, r in per), per, inns)


def sum_rate_m1(ch: StandardChannel) -> RateReport:
    """Sum-rate of treating all interference as noise (strategy M1)."""
    return sum_rate_mac_subset(ch, {1})


def sic_stage_terms(
    ch: StandardChannel, decoded_set: Iterable[int], order: Sequence[int]
) -> list[tuple[int, float, float]]:
    """Per-stage ``(transmitter, lhs, rhs)`` of the successive decoding test.

    Stage ``l`` decodes ``order[l]`` treating transmitter 1, the interferers
    decoded later and the undecoded ones as noise. It is required to be at
    least as reliable as the interferer's own receiver:

        h_o^2 sigma_o^2 >= sigma_1^2 + P_1 + sum_{later} h^2 P + sum_{undecoded} h^2 P.
    """
    spec = StrategySpec.ic(decoded_set, order)
    spec.check(ch.K)
    decoded = set(spec.mac_set)
    residual = math.fsum(ch.interference(j) for j in ch.interferers if j not in decoded)
    order = spec.decoding_order
    stages = []
    for pos, j in enumerate(order):
        later = math.fsum(ch.interference(m) for m in order[pos + 1:])
        rhs = ch.sigma2[0] + ch.power(1) + later + residual
        stages.append((j, ch.gain(j) ** 2 * ch.sigma2[j - 1], rhs))
    return stages


def sic_feasible(
    ch: StandardChannel,
    decoded_set: Iterable[int],
    order: Sequence[int],
    tol: float = DEFAULT_TOL,
) -> tuple[bool, list[float]]:
    """Check that every interferer can be decoded in ``order`` at receiver 1.

    Returns the verdict and the per-stage margins (lhs - rhs) of
    :func:`sic_stage_terms`. An empty decoded set is vacuously feasible.
    """
    margins = [lhs - rhs for _, lhs, rhs in sic_stage_terms(ch, decoded_set, order)]
    return all(m >= -tol for m in margins), margins


class OrderSearch(NamedTuple):
    """Result of :func:`best_decoding_order`; ``order`` is None when infeasible."""

    order: tuple[int, ...] | None
    method: str


def sorted_decoding_order(ch: StandardChannel, decoded_set: Iterable[int]) -> tuple[int, ...]:
    """Decoding order by descending ``h_j^2 (sigma_j^2 + P_j)``.

    An adjacent-swap argument shows this order is feasible whenever any
    order is, so it doubles as the search for large decoded sets.
    """
    return tuple(
        sorted(
            set(decoded_set),
            key=lambda j: (-(ch.gain(j) ** 2) * (ch.sigma2[j - 1] + ch.power(j)), j),
        )
    )


def _first_feasible_order(ch, decoded, tol):
    # Depth-first in lexicographic order. Whether the element placed next
    # passes depends only on the set still undecoded after it, so dead
    # remainders are memoized.
    residual = math.fsum(ch.interference(j) for j in ch.interferers if j not in set(decoded))
    base = ch.sigma2[0] + ch.power(1) + residual
    dead = set()

    def extend(remaining):
        if not remaining:
            return ()
        if remaining in dead:
            return None
        for j in sorted(remaining):
            rest = remaining - {j}
            load = base + math.fsum(ch.interference(m) for m in sorted(rest))
            if ch.gain(j) ** 2 * ch.sigma2[j - 1] - load >= -tol:
                tail = extend(rest)
                if tail is not None:
                    return (j, *tail)
        dead.add(remaining)
        return None

    return extend(frozenset(decoded))


def best_decoding_order(
    ch: StandardChannel, decoded_set: Iterable[int], tol: float = DEFAULT_TOL
) -> OrderSearch:
    """Find a feasible successive decoding order for ``decoded_set``.

    Sets of up to :data:`EXHAUSTIVE_ORDER_LIMIT` interferers are searched
    exhaustively and the lexicographically smallest feasible order is
    returned (``method == "exhaustive"``). Larger sets use
    :func:`sorted_decoding_order` (``method == "sorted"``).

    Examples
    --------
    >>> ch = StandardChannel(3, [2, 3], [1, 1, 1])
    >>> best_decoding_order(ch, {2, 3}).order
    (3, 2)
    """
    decoded = sorted(set(decoded_set))
    StrategySpec.ic(decoded).check(ch.K)
    if len(decoded) <= EXHAUSTIVE_ORDER_LIMIT:
        return OrderSearch(_first_feasible_order(ch, decoded, tol), "exhaustive")
    perm = sorted_decoding_order(ch, decoded)
    return OrderSearch(perm if sic_feasible(ch, decoded, perm, tol)[0] else None, "sorted")


def sum_rate_mi_k(
    ch: StandardChannel, decoded_set: Iterable[int], order: Sequence[int] | None = None
) -> RateReport:
    """Sum-rate when receiver 1 cancels ``decoded_set`` (IC strategy MIk).

    Every interferer keeps its interference-free direct rate, and receiver 1
    sees only the undecoded interferers as noise. ``order`` defaults to
    increasing index; its feasibility is recorded in the report but does not
    change the rate.

    Examples
    --------
    >>> ch = StandardChannel(3, [3, 0.5], [1, 1, 1])
    >>> round(sum_rate_mi_k(ch, {2}).sum_rate_bits, 5)
    1.424
    """
    ensure_valid(ch)
    decoded = sorted(set(decoded_set))
    strategy = StrategySpec.ic(decoded, order)
    strategy.check(ch.K)
    inn = ch.sigma2[0] + sum(ch.interference(j) for j in ch.interferers if j not in decoded)
    per = [(1, half_log2(1.0 + ch.power(1) / inn))]
    inns = [(1, inn)]
    for i in ch.interferers:
        per.append((i, _direct_rate(ch, i)))
        inns.append((i, ch.sigma2[i - 1]))
    ok, margins = sic_feasible(ch, decoded, strategy.decoding_order)
    return RateReport(strategy, math.fsum(r for _, r in per), per, inns, ok, margins)


def rate_of(ch: StandardChannel, strategy: StrategySpec) -> RateReport:
    """Dispatch on the strategy mode."""
    if strategy.mode == "XC":
        return sum_rate_mac_subset(ch, strategy.mac_set)
    return sum_rate_mi_k(ch, strategy.mac_set, strategy.decoding_order)

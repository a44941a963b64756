"""Channel representations for the K-user many-to-one channel.

Receiver 1 hears every transmitter; receiver i >= 2 hears only transmitter i.
In standard form

    y_1 = x_1 + sum_{j>=2} h_j x_j + n_1,    y_i = x_i + n_i,

with power constraints P_i and (normally) unit noise variances.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

#: Absolute tolerance used for every boundary inequality.
DEFAULT_TOL = 1e-9


class ChannelError(ValueError):
    """Raised for an invalid channel or strategy description."""


@dataclass(frozen=True)
class RawChannel:
    """Channel before normalization.

    Parameters
    ----------
    K : int
        Number of transmitter/receiver pairs.
    direct_gains : sequence of float
        ``h_ii`` for i = 1..K.
    cross_gains_to_rx1 : sequence of float
        ``h_1j`` for j = 2..K.
    powers : sequence of float
        Transmit powers ``P~_i`` for i = 1..K.
    noise_vars : sequence of float, optional
        Noise variances ``sigma_i^2``; all ones by default.
    """

    K: int
    direct_gains: tuple[float, ...]
    cross_gains_to_rx1: tuple[float, ...]
    powers: tuple[float, ...]
    noise_vars: tuple[float, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "direct_gains", _floats(self.direct_gains))
        object.__setattr__(self, "cross_gains_to_rx1", _floats(self.cross_gains_to_rx1))
        object.__setattr__(self, "powers", _floats(self.powers))
        if self.noise_vars is None:
            object.__setattr__(self, "noise_vars", (1.0,) * int(self.K))
        else:
            object.__setattr__(self, "noise_vars", _floats(self.noise_vars))


@dataclass(frozen=True)
class StandardChannel:
    """Channel in standard form.

    ``h[j - 2]`` is the cross gain of transmitter j (j = 2..K) at receiver 1
    and ``P[i - 1]`` the power of transmitter i. Construction does not
    validate; see :func:`validate`.
    """

    K: int
    h: tuple[float, ...]
    P: tuple[float, ...]
    sigma2: tuple[float, ...] = None

    def __post_init__(self):
        object.__setattr__(self, "h", _floats(self.h))
        object.__setattr__(self, "P", _floats(self.P))
        if self.sigma2 is None:
            object.__setattr__(self, "sigma2", (1.0,) * int(self.K))
        else:
            object.__setattr__(self, "sigma2", _floats(self.sigma2))

    def gain(self, j: int) -> float:
        """Cross gain of transmitter ``j`` (1-based, j >= 2)."""
        return self.h[j - 2]

    def power(self, i: int) -> float:
        return self.P[i - 1]

    def interference(self, j: int) -> float:
        """Received interference power ``h_j^2 P_j`` at receiver 1."""
        return self.h[j - 2] ** 2 * self.P[j - 1]

    @property
    def interferers(self) -> range:
        return range(2, self.K + 1)

    @property
    def unit_noise(self) -> bool:
        return all(s == 1.0 for s in self.sigma2)

    def replace(self, *, h=None, P=None) -> "StandardChannel":
        return StandardChannel(
            self.K,
            self.h if h is None else h,
            self.P if P is None else P,
            self.sigma2,
        )

    def to_dict(self) -> dict:
        d = {"form": "standard", "K": self.K, "h": list(self.h), "P": list(self.P)}
        if not self.unit_noise:
            d["noise_vars"] = list(self.sigma2)
        return d


def _floats(values: Iterable[float]) -> tuple[float, ...]:
    return tuple(float(v) for v in values)


# ---------------------------------------------------------------------------
# Conversion and validation
# ---------------------------------------------------------------------------

def to_standard_form(raw: RawChannel) -> StandardChannel:
    """Normalize a raw channel to unit direct gains and unit noise.

    Each receiver output is divided by its noise standard deviation and each
    input is rescaled by its (normalized) direct gain, giving

        h_j = (h_1j / sigma_1) / (h_jj / sigma_j),   P_i = h_ii^2 P~_i / sigma_i^2.

    Examples
    --------
    >>> raw = RawChannel(2, [1, 4], [2], [1, 1])
    >>> to_standard_form(raw)
    StandardChannel(K=2, h=(0.5,), P=(1.0, 16.0), sigma2=(1.0, 1.0))
    """
    K = int(raw.K)
    if K < 2:
        raise ChannelError("K must be at least 2")
    for name, vec, n in (
        ("direct_gains", raw.direct_gains, K),
        ("cross_gains_to_rx1", raw.cross_gains_to_rx1, K - 1),
        ("powers", raw.powers, K),
        ("noise_vars", raw.noise_vars, K),
    ):
        if len(vec) != n:
            raise ChannelError(f"{name}: expected {n} entries, got {len(vec)}")
    for i, s in enumerate(raw.noise_vars, start=1):
        if not s > 0:
            raise ChannelError(f"noise_vars: nonpositive noise variance at index {i}")
    for i, p in enumerate(raw.powers, start=1):
        if p < 0:
            raise ChannelError(f"powers: negative power at index {i}")
    sd = [math.sqrt(s) for s in raw.noise_vars]
    h = []
    for j in range(2, K + 1):
        hjj = raw.direct_gains[j - 1]
        if hjj == 0:
            raise ChannelError(f"direct_gains: zero direct gain at index {j}")
        h.append((raw.cross_gains_to_rx1[j - 2] / sd[0]) / (hjj / sd[j - 1]))
    P = [raw.direct_gains[i] ** 2 * raw.powers[i] / raw.noise_vars[i] for i in range(K)]
    return StandardChannel(K, h, P)


@dataclass
class ValidationReport:
    """Violated invariants of a channel; empty means valid."""

    problems: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems

    def __contains__(self, text: str) -> bool:
        return any(text in p for p in self.problems)

    def raise_if_invalid(self):
        if self.problems:
            raise ChannelError("; ".join(self.problems))


def validate(ch: StandardChannel) -> ValidationReport:
    """List the invariants ``ch`` violates."""
    report = ValidationReport()
    if not isinstance(ch.K, int) or ch.K < 2:
        report.problems.append(f"K must be an integer >= 2, got {ch.K!r}")
        return report
    if len(ch.h) != ch.K - 1:
        report.problems.append(
            f"dimension mismatch: h has {len(ch.h)} entries, expected K-1 = {ch.K - 1}"
        )
    if len(ch.P) != ch.K:
        report.problems.append(
            f"dimension mismatch: P has {len(ch.P)} entries, expected K = {ch.K}"
        )
    if len(ch.sigma2) != ch.K:
        report.problems.append(
            f"dimension mismatch: noise variances have {len(ch.sigma2)} entries, expected K = {ch.K}"
        )
    for i, p in enumerate(ch.P, start=1):
        if not math.isfinite(p):
            report.problems.append(f"non-finite power at index {i}")
        elif p < 0:
            report.problems.append(f"negative power at index {i}")
    for j, g in enumerate(ch.h, start=2):
        if not math.isfinite(g):
            report.problems.append(f"non-finite cross gain at index {j}")
    for i, s in enumerate(ch.sigma2, start=1):
        if not s > 0:
            report.problems.append(f"nonpositive noise variance at index {i}")
    return report


def ensure_valid(ch: StandardChannel) -> StandardChannel:
    validate(ch).raise_if_invalid()
    return ch


def degraded_at_rx1(ch: StandardChannel, i: int) -> tuple[bool, float]:
    """Test whether receiver 1 is a degraded version of receiver ``i``.

    Holds when ``h_i^2 sigma_i^2 <= sigma_1^2``; the returned margin is
    ``sigma_1^2 - h_i^2 sigma_i^2`` (positive means strictly inside). When it
    holds, the cross message of transmitter ``i`` is decodable at receiver ``i``.
    """
    if not 2 <= i <= ch.K:
        raise IndexError(f"transmitter index {i} outside 2..{ch.K}")
    margin = ch.sigma2[0] - ch.gain(i) ** 2 * ch.sigma2[i - 1]
    return margin >= -DEFAULT_TOL, margin


# ---------------------------------------------------------------------------
# Strategies
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StrategySpec:
    """A transmission strategy.

    In ``"XC"`` mode ``mac_set`` holds the transmitters jointly decoded at
    receiver 1 (always including 1); members other than 1 send only their
    cross message. In ``"IC"`` mode ``mac_set`` holds the interferers that
    receiver 1 decodes and cancels, in the successive decoding order
    ``decoding_order``.
    """

    mode: str
    mac_set: tuple[int, ...]
    decoding_order: tuple[int, ...] = ()

    @classmethod
    def xc(cls, mac_set: Iterable[int]) -> "StrategySpec":
        members = set(int(i) for i in mac_set)
        if 1 not in members:
            raise ChannelError("mac_set must contain transmitter 1")
        return cls("XC", tuple(sorted(members)))

    @classmethod
    def ic(cls, decoded: Iterable[int], order: Sequence[int] | None = None) -> "StrategySpec":
        decoded = tuple(sorted(set(int(i) for i in decoded)))
        if order is None:
            order = decoded
        order = tuple(int(i) for i in order)
        if sorted(order) != list(decoded):
            raise ChannelError(
                f"decoding order {order} is not a permutation of the decoded set {decoded}"
            )
        return cls("IC", decoded, order)

    def check(self, K: int):
        """Raise :class:`ChannelError` if the strategy does not fit a K-user channel."""
        if self.mode == "XC":
            if 1 not in self.mac_set:
                raise ChannelError("mac_set must contain transmitter 1")
            lo = 1
        elif self.mode == "IC":
            if 1 in self.mac_set:
                raise ChannelError("IC decoded set cannot contain transmitter 1")
            lo = 2
            if sorted(self.decoding_order) != sorted(self.mac_set):
                raise ChannelError("decoding order must permute the decoded set")
        else:
            raise ChannelError(f"unknown mode {self.mode!r}")
        if len(set(self.mac_set)) != len(self.mac_set):
            raise ChannelError("repeated transmitter index")
        for i in self.mac_set:
            if not lo <= i <= K:
                raise ChannelError(f"transmitter index {i} outside {lo}..{K}")

    @property
    def label(self) -> str:
        if self.mode == "XC":
            partners = [i for i in self.mac_set if i != 1]
            if not partners:
                return "M1"
            return f"M{len(self.mac_set)}:" + ",".join(map(str, partners))
        k = len(self.mac_set) + 1
        if not self.mac_set:
            return "MI1"
        s = f"MI{k}:" + ",".join(map(str, self.mac_set))
        if len(self.mac_set) > 1:
            s += "@" + ",".join(map(str, self.decoding_order))
        return s

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "mac_set": list(self.mac_set),
            "decoding_order": list(self.decoding_order),
            "label": self.label,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StrategySpec":
        return cls(d["mode"], tuple(d["mac_set"]), tuple(d.get("decoding_order", ())))


def _index_list(text: str, what: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    try:
        return [int(t) for t in text.split(",")]
    except ValueError:
        raise ChannelError(f"strategy: malformed {what} list {text!r}") from None


def parse_strategy(text: str, K: int) -> StrategySpec:
    """Parse a strategy string.

    Accepted forms: ``M1``, ``M2:k``, ``M<K>`` (all transmitters),
    ``M<k>:j,...``, ``MAC:1,j,...``, ``MI1``, ``MI:s,...@o,...`` and the
    labels produced by :attr:`StrategySpec.label`.
    """
    t = text.strip()
    upper = t.upper()
    if upper.startswith("MAC:"):
        members = _index_list(t[4:], "MAC member")
        spec = StrategySpec.xc(members)
    elif upper.startswith("MI"):
        rest = t[2:]
        head, _, body = rest.partition(":")
        if head and not head.isdigit():
            raise ChannelError(f"strategy: cannot parse {text!r}")
        decoded_txt, _, order_txt = body.partition("@")
        decoded = _index_list(decoded_txt, "decoded set")
        order = _index_list(order_txt, "decoding order") if order_txt else None
        if head and not body:
            if int(head) == 1:
                decoded = []
            elif int(head) == K:
                decoded = list(range(2, K + 1))
            else:
                raise ChannelError(f"strategy: {text!r} needs an explicit decoded set")
        if head and len(decoded) + 1 != int(head):
            raise ChannelError(f"strategy: {text!r} decodes {len(decoded)} interferers")
        spec = StrategySpec.ic(decoded, order)
    elif upper.startswith("M"):
        head, _, body = t[1:].partition(":")
        if not head.isdigit():
            raise ChannelError(f"strategy: cannot parse {text!r}")
        k = int(head)
        if body:
            partners = _index_list(body, "MAC partner")
        elif k == 1:
            partners = []
        elif k == K:
            partners = list(range(2, K + 1))
        else:
            raise ChannelError(f"strategy: {text!r} needs explicit MAC partners")
        if len(set(partners)) + 1 != k or 1 in partners:
            raise ChannelError(f"strategy: {text!r} lists {len(partners)} partners for M{k}")
        spec = StrategySpec.xc([1, *partners])
    else:
        raise ChannelError(f"strategy: cannot parse {text!r}")
    spec.check(K)
    return spec


# ---------------------------------------------------------------------------
# JSON ingestion
# ---------------------------------------------------------------------------

_STANDARD_KEYS = {"form", "K", "h", "P", "noise_vars"}
_RAW_KEYS = {"form", "K", "P", "direct_gains", "cross_gains_to_rx1", "noise_vars"}


def channel_from_dict(d: dict) -> StandardChannel:
    """Build a validated standard-form channel from its JSON object."""
    if not isinstance(d, dict):
        raise ChannelError("channel JSON must be an object")
    form = d.get("form", "standard")
    if form not in ("standard", "raw"):
        raise ChannelError(f"form: must be 'standard' or 'raw', got {form!r}")
    allowed = _STANDARD_KEYS if form == "standard" else _RAW_KEYS
    unknown = sorted(set(d) - allowed)
    if unknown:
        raise ChannelError(f"{unknown[0]}: unknown key for {form} channel")
    required = {"K", "P"} | ({"h"} if form == "standard" else {"direct_gains", "cross_gains_to_rx1"})
    for key in sorted(required):
        if key not in d:
            raise ChannelError(f"{key}: missing")
    K = d["K"]
    if not isinstance(K, int) or isinstance(K, bool):
        raise ChannelError("K: must be an integer")
    for key in ("h", "P", "direct_gains", "cross_gains_to_rx1", "noise_vars"):
        if key in d:
            v = d[key]
            if not isinstance(v, list) or not all(
                isinstance(x, (int, float)) and not isinstance(x, bool) for x in v
            ):
                raise ChannelError(f"{key}: must be a list of numbers")
    if form == "raw":
        ch = to_standard_form(
            RawChannel(K, d["direct_gains"], d["cross_gains_to_rx1"], d["P"], d.get("noise_vars"))
        )
    else:
        ch = StandardChannel(K, d["h"], d["P"], d.get("noise_vars"))
    report = validate(ch)
    if not report.ok:
        raise ChannelError(report.problems[0])
    return ch


def load_channel(path: str | Path) -> StandardChannel:
    """Read a channel JSON file (standard or raw form)."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ChannelError(f"channel: cannot read {path}: {exc.strerror}") from None
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ChannelError(f"channel: malformed JSON ({exc.msg} at line {exc.lineno})") from None
    return channel_from_dict(d)

"""Two-dimensional parameter sweeps over a standard-form channel.

A scan substitutes grid values for two channel parameters, evaluates the
requested region labels in every cell and records the rate-maximizing
strategy. Cells sit at the centers ``min + (k + 0.5) step`` so that no grid
point lands exactly on a condition boundary.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import grid
from .channel import DEFAULT_TOL, StandardChannel, StrategySpec
from .optimality import (
    _subsets,
    best_strategy,
    check_t1,
    check_t2_t4,
    check_t5,
    check_t7,
    check_t8,
    rho_for_gap,
    t3_gap,
    t8_conditions,
)
from .rates import best_decoding_order

#: Largest number of grid cells a single scan may evaluate.
MAX_GRID_POINTS = 10**7

#: Largest number of interferers whose genie orderings are enumerated for T8.
T8_ENUMERATION_LIMIT = 7

_ALIASES = {"a": "h2", "b": "h3"}
_LABEL_RE = re.compile(
    r"^(?:(?P<plain>T[1-8]|best)|T(?P<one>[24])@(?P<k>\d+)|T3@(?P<kind>rho2|delta)=(?P<val>[^=]+)"
    r"|T7@(?P<set>\d+(?:\+\d+)*))$"
)


class ScanError(ValueError):
    """Invalid scan specification."""


def _selector(name: str, K: int) -> tuple[str, int]:
    key = _ALIASES.get(name.strip(), name.strip())
    m = re.fullmatch(r"([hP])(\d+)", key)
    if not m:
        raise ScanError(f"axis selector {name!r} is not of the form h<j> or P<i>")
    kind, idx = m.group(1), int(m.group(2))
    if (kind == "h" and not 2 <= idx <= K) or (kind == "P" and not 1 <= idx <= K):
        raise ScanError(f"axis selector {name!r} out of range for K = {K}")
    return kind, idx


@dataclass(frozen=True)
class AxisRange:
    minimum: float
    maximum: float
    step: float

    def __post_init__(self):
        vals = (self.minimum, self.maximum, self.step)
        if not all(math.isfinite(v) for v in vals):
            raise ScanError("axis range must be finite")
        if not self.minimum < self.maximum:
            raise ScanError("axis range needs min < max")
        if self.step <= 0:
            raise ScanError("axis step must be positive")

    @classmethod
    def parse(cls, text: str) -> "AxisRange":
        parts = text.split(":")
        if len(parts) != 3:
            raise ScanError(f"range {text!r} is not min:max:step")
        try:
            return cls(*(float(p) for p in parts))
        except ValueError:
            raise ScanError(f"range {text!r} is not numeric") from None

    @property
    def count(self) -> int:
        return max(1, int(round((self.maximum - self.minimum) / self.step)))

    def centers(self) -> np.ndarray:
        return self.minimum + (np.arange(self.count) + 0.5) * self.step


@dataclass(frozen=True)
class ScanSpec:
    """A 2-D sweep: two parameter selectors, their ranges and the labels to evaluate.

    Selectors are ``h<j>`` (``a`` and ``b`` alias ``h2`` and ``h3``) or
    ``P<i>``. Labels are ``T1``..``T8`` and ``best``, with the refinements
    ``T2@k``, ``T3@rho2=<v>``, ``T3@delta=<bits>`` and ``T7@2+3``. A bare
    ``T3`` uses the largest admissible genie correlation.
    """

    base_channel: StandardChannel
    axis_x: str
    axis_y: str
    range_x: AxisRange
    range_y: AxisRange
    labels: tuple[str, ...] = ("T1", "best")
    mode: str = "XC"
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        K = self.base_channel.K
        sx, sy = _selector(self.axis_x, K), _selector(self.axis_y, K)
        if sx == sy:
            raise ScanError("axis selectors must differ")
        if self.mode.upper() not in ("XC", "IC"):
            raise ScanError(f"mode must be XC or IC, got {self.mode!r}")
        object.__setattr__(self, "mode", self.mode.upper())
        labels = tuple(dict.fromkeys(l.strip() for l in self.labels if l.strip()))
        for label in labels:
            _parse_label(label, K)
        object.__setattr__(self, "labels", labels)
        if self.range_x.count * self.range_y.count > MAX_GRID_POINTS:
            raise ScanError(
                f"grid of {self.range_x.count * self.range_y.count} points exceeds {MAX_GRID_POINTS}"
            )

    @property
    def region_labels(self) -> tuple[str, ...]:
        return tuple(l for l in self.labels if l != "best")

    @property
    def shape(self) -> tuple[int, int]:
        """(rows, columns) = (y count, x count)."""
        return self.range_y.count, self.range_x.count

    def channel_at(self, x: float, y: float) -> StandardChannel:
        K = self.base_channel.K
        h = list(self.base_channel.h)
        P = list(self.base_channel.P)
        for sel, v in ((self.axis_x, x), (self.axis_y, y)):
            kind, idx = _selector(sel, K)
            if kind == "h":
                h[idx - 2] = float(v)
            else:
                P[idx - 1] = float(v)
        return self.base_channel.replace(h=h, P=P)


def _parse_label(label: str, K: int):
    m = _LABEL_RE.match(label)
    if not m:
        raise ScanError(f"unknown label {label!r}")
    if (m.group("plain") == "T3" or m.group("kind")) and K != 3:
        raise ScanError(f"label {label!r} needs K = 3")
    if m.group("k") and not 2 <= int(m.group("k")) <= K:
        raise ScanError(f"label {label!r} names a transmitter outside 2..{K}")
    if m.group("kind"):
        try:
            v = float(m.group("val"))
        except ValueError:
            raise ScanError(f"label {label!r} has a non-numeric value") from None
        if m.group("kind") == "rho2" and not 0 < v < 1:
            raise ScanError(f"label {label!r} needs 0 < rho2 < 1")
        if m.group("kind") == "delta" and not v > 0:
            raise ScanError(f"label {label!r} needs a positive gap")
    if m.group("set"):
        members = [int(v) for v in m.group("set").split("+")]
        if not all(2 <= j <= K for j in members):
            raise ScanError(f"label {label!r} names a transmitter outside 2..{K}")
    return m


def _union(certs):
    """(holds, margin) of an OR over certificates."""
    return any(c.holds for c in certs), max(c.min_margin for c in certs)


def _t8_margin(ch, tol):
    cert, _ = check_t8(ch, tol)
    if ch.K - 1 > T8_ENUMERATION_LIMIT:
        return cert.holds, 1.0 if cert.holds else -1.0
    # worst slack of the best ordering
    margin = max(
        min(c.margin for c in t8_conditions(ch, perm, tol))
        for perm in itertools.permutations(ch.interferers)
    )
    return cert.holds, margin


def evaluate_label(ch: StandardChannel, label: str, tol: float = DEFAULT_TOL) -> tuple[bool, float]:
    """Whether ``label`` holds at ``ch`` and its signed margin (positive inside)."""
    m = _parse_label(label, ch.K)
    plain = m.group("plain")
    if plain == "T1":
        c = check_t1(ch, tol)
        return c.holds, c.min_margin
    if plain in ("T2", "T4"):
        return _union([check_t2_t4(ch, k, tol) for k in ch.interferers])
    if m.group("one"):
        c = check_t2_t4(ch, int(m.group("k")), tol)
        return c.holds, c.min_margin
    if plain in ("T5", "T6"):
        c = check_t5(ch, tol)
        return c.holds, c.min_margin
    if plain == "T7":
        return _union([check_t7(ch, s, tol) for s in _subsets(ch.interferers) if s])
    if m.group("set"):
        c = check_t7(ch, [int(v) for v in m.group("set").split("+")], tol)
        return c.holds, c.min_margin
    if plain == "T8":
        return _t8_margin(ch, tol)
    # T3 variants: union of both role assignments
    certs = []
    for variant, (strong, weak) in ((1, (2, 3)), (2, (3, 2))):
        if ch.power(2) == 0 or ch.power(3) == 0:
            continue
        if plain == "T3":
            rho2 = min((1.0 + ch.interference(weak)) ** 2 / max(ch.gain(strong) ** 2, 1e-300), 1.0 - 1e-15)
        elif m.group("kind") == "rho2":
            rho2 = float(m.group("val"))
        else:
            rho2 = rho_for_gap(float(m.group("val")), ch.gain(weak), ch.power(weak))
        if not 0 < rho2 < 1:
            continue
        certs.append(t3_gap(ch, rho2, variant, tol)[0])
    if not certs:
        return False, -math.inf
    return _union(certs)


@dataclass
class RegionMap:
    """Per-cell classification of a scan.

    ``holds[label]`` and ``margins[label]`` are ``(rows, cols)`` arrays with
    rows indexed by the y axis. ``best_strategy`` and ``best_rate`` are
    filled for every cell.
    """

    spec: ScanSpec
    x: np.ndarray
    y: np.ndarray
    holds: dict[str, np.ndarray]
    margins: dict[str, np.ndarray]
    best_strategy: list[list[str]] = field(default_factory=list)
    best_rate: np.ndarray | None = None

    @property
    def shape(self) -> tuple[int, int]:
        return self.spec.shape

    @property
    def cell_count(self) -> int:
        return self.shape[0] * self.shape[1]

    def labels_at(self, row: int, col: int) -> list[str]:
        return sorted(l for l, arr in self.holds.items() if arr[row, col])

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["x", "y", "labels", "best_strategy", "best_sum_rate_bits"])
        for r, yv in enumerate(self.y):
            for c, xv in enumerate(self.x):
                writer.writerow([
                    f"{xv:.9g}",
                    f"{yv:.9g}",
                    ";".join(self.labels_at(r, c)),
                    self.best_strategy[r][c],
                    f"{self.best_rate[r, c]:.9g}",
                ])
        return buf.getvalue()

    def write_csv(self, path) -> None:
        with open(path, "w", newline="\n", encoding="utf-8") as fh:
            fh.write(self.to_csv())


def _cell_rows(spec: ScanSpec, rows: Sequence[int]):
    # reference engine: full certificates cell by cell
    xs, ys = spec.range_x.centers(), spec.range_y.centers()
    out = []
    for r in rows:
        holds = {l: [] for l in spec.region_labels}
        margins = {l: [] for l in spec.region_labels}
        names, rates = [], []
        for xv in xs:
            ch = spec.channel_at(xv, ys[r])
            for label in spec.region_labels:
                ok, margin = evaluate_label(ch, label, spec.tol)
                holds[label].append(ok)
                margins[label].append(margin)
            best = best_strategy(ch, spec.mode, spec.tol)
            names.append(best.strategy.label)
            rates.append(best.sum_rate_bits)
        out.append((r, holds, margins, names, rates))
    return out


def _grid_channel(spec: ScanSpec, rows: Sequence[int]) -> grid.GridChannel:
    ch = spec.base_channel
    X, Y = np.meshgrid(spec.range_x.centers(), spec.range_y.centers()[list(rows)])
    h = {j: np.full(X.shape, ch.gain(j)) for j in ch.interferers}
    P = {i: np.full(X.shape, ch.power(i)) for i in range(1, ch.K + 1)}
    for sel, vals in ((spec.axis_x, X), (spec.axis_y, Y)):
        kind, idx = _selector(sel, ch.K)
        (h if kind == "h" else P)[idx] = vals
    if any((P[i] < 0).any() for i in P):
        raise ScanError("scan window reaches negative powers")
    return grid.GridChannel(ch.K, h, P, ch.sigma2)


def _grid_label(g: grid.GridChannel, label: str, tol: float):
    m = _parse_label(label, g.K)
    plain = m.group("plain")
    if plain == "T1":
        return grid.t1(g, tol)
    if plain in ("T2", "T4"):
        return grid._any([grid.t2_t4(g, k, tol) for k in g.interferers])
    if m.group("one"):
        return grid.t2_t4(g, int(m.group("k")), tol)
    if plain in ("T5", "T6"):
        return grid.t5(g, tol)
    if plain == "T7":
        return grid._any([grid.t7(g, s, tol) for s in grid.subsets(g.interferers) if s])
    if m.group("set"):
        return grid.t7(g, [int(v) for v in m.group("set").split("+")], tol)
    if plain == "T8":
        return grid.t8(g, tol)
    parts = []
    for strong, weak in ((2, 3), (3, 2)):
        if plain == "T3":
            with np.errstate(divide="ignore"):
                rho2 = np.minimum((1.0 + g.interference(weak)) ** 2 / g.g2(strong), 1.0 - 1e-15)
        elif m.group("kind") == "rho2":
            rho2 = float(m.group("val"))
        else:
            rho2 = _rho_for_gap_array(float(m.group("val")), np.sqrt(g.g2(weak)), g.P[weak])
        parts.append(grid.t3(g, strong, weak, rho2, tol))
    return grid._any(parts)


def _rho_for_gap_array(delta, b, P3):
    grow = math.expm1(2.0 * delta * math.log(2.0))
    shrink = b * b * P3 / (1.0 + b * b * P3)
    return grow / (grow + shrink)


def _vector_rows(spec: ScanSpec, rows: Sequence[int]):
    ch = spec.base_channel
    if spec.region_labels and not ch.unit_noise:
        raise ScanError("region labels assume unit noise variances")
    g = _grid_channel(spec, rows)
    holds, margins = {}, {}
    for label in spec.region_labels:
        if label == "T8" and ch.K - 1 > T8_ENUMERATION_LIMIT:
            sub = _cell_rows(ScanSpec(ch, spec.axis_x, spec.axis_y, spec.range_x, spec.range_y, (label,), spec.mode, spec.tol), rows)
            holds[label] = np.array([p[1][label] for p in sub], dtype=bool)
            margins[label] = np.array([p[2][label] for p in sub], dtype=float)
            continue
        holds[label], margins[label] = _grid_label(g, label, spec.tol)
    cands, idx, rates = grid.best(g, spec.mode, spec.tol)
    xs = spec.range_x.centers()
    ys = spec.range_y.centers()
    out = []
    for n, r in enumerate(rows):
        names = []
        for c in range(len(xs)):
            subset = cands[idx[n, c]]
            if spec.mode == "IC" and len(subset) > 1:
                # the label carries the lexicographically first feasible order
                order = best_decoding_order(spec.channel_at(xs[c], ys[r]), subset, spec.tol).order
                names.append(StrategySpec.ic(subset, order).label)
            else:
                names.append(grid.strategy_label(spec.mode, subset))
        out.append((
            r,
            {l: holds[l][n].tolist() for l in holds},
            {l: margins[l][n].tolist() for l in margins},
            names,
            rates[n].tolist(),
        ))
    return out


_ENGINES = {"vector": _vector_rows, "cell": _cell_rows}


def scan(spec: ScanSpec, workers: int = 1, engine: str = "vector") -> RegionMap:
    """Evaluate ``spec`` on its whole grid.

    The ``vector`` engine evaluates the closed-form conditions over whole
    rows of cells at once; ``cell`` builds every certificate individually
    and serves as its reference. Rows may be spread over ``workers``
    processes; results are assembled by row index, so the map does not
    depend on the worker count.

    Examples
    --------
    >>> from manytoone import StandardChannel
    >>> spec = ScanSpec(StandardChannel(3, [0, 0], [1, 1, 1]), "a", "b",
    ...                 AxisRange(-0.5, 0.5, 1), AxisRange(-0.5, 0.5, 1), ("T1", "best"))
    >>> region = scan(spec)
    >>> region.labels_at(0, 0), float(region.best_rate[0, 0])
    (['T1'], 1.5)
    """
    if engine not in _ENGINES:
        raise ScanError(f"unknown engine {engine!r}")
    run = _ENGINES[engine]
    rows_n, cols_n = spec.shape
    rows = list(range(rows_n))
    chunk = max(1, min(256, -(-rows_n // max(1, workers))))
    chunks = [rows[i:i + chunk] for i in range(0, rows_n, chunk)]
    if workers > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(workers) as pool:
            parts = [p for part in pool.map(run, [spec] * len(chunks), chunks) for p in part]
    else:
        parts = [p for c in chunks for p in run(spec, c)]
    parts.sort(key=lambda p: p[0])
    holds = {l: np.array([p[1][l] for p in parts], dtype=bool).reshape(rows_n, cols_n) for l in spec.region_labels}
    margins = {l: np.array([p[2][l] for p in parts], dtype=float).reshape(rows_n, cols_n) for l in spec.region_labels}
    names = [p[3] for p in parts]
    rates = np.array([p[4] for p in parts], dtype=float).reshape(rows_n, cols_n)
    return RegionMap(spec, spec.range_x.centers(), spec.range_y.centers(), holds, margins, names, rates)


def boundary_trace(region: RegionMap | ScanSpec, label: str) -> list[np.ndarray]:
    """Zero-level contours of a label's margin field, in parameter coordinates.

    Each polyline is an ``(n, 2)`` array of ``(x, y)`` vertices in traversal
    order. A region that is empty, or covers the whole window, has no
    boundary and yields an empty list.
    """
    from skimage.measure import find_contours

    if isinstance(region, ScanSpec):
        region = scan(region)
    if label not in region.margins:
        raise ScanError(f"label {label!r} was not part of the scan")
    field_ = region.margins[label].astype(float)
    finite = field_[np.isfinite(field_)]
    bound = float(np.abs(finite).max()) + 1.0 if finite.size else 1.0
    field_ = np.nan_to_num(field_, nan=-bound, posinf=bound, neginf=-bound)
    if field_.shape[0] < 2 or field_.shape[1] < 2 or field_.min() >= 0 or field_.max() < 0:
        return []
    spec = region.spec
    out = []
    for contour in find_contours(field_, 0.0):
        xs = spec.range_x.minimum + (contour[:, 1] + 0.5) * spec.range_x.step
        ys = spec.range_y.minimum + (contour[:, 0] + 0.5) * spec.range_y.step
        out.append(np.column_stack([xs, ys]))
    return out


def drange(text_or_range, inclusive: bool = True) -> np.ndarray:
    """Values ``min, min+step, ..., max`` of a ``min:max:step`` range (endpoints included)."""
    r = AxisRange.parse(text_or_range) if isinstance(text_or_range, str) else text_or_range
    n = int(round((r.maximum - r.minimum) / r.step))
    vals = r.minimum + np.arange(n + 1) * r.step
    return vals if inclusive else vals[:-1]


def rho_delta_curve(b: float, P3: float, deltas) -> list[tuple[float, float]]:
    """Tabulate the genie correlation ``rho^2`` needed for each gap value.

    Examples
    --------
    >>> [(d, round(r, 5)) for d, r in rho_delta_curve(1.5, 1.0, [0, 0.5, 1])]
    [(0.0, 0.0), (0.5, 0.59091), (1.0, 0.8125)]
    """
    if isinstance(deltas, (str, AxisRange)):
        deltas = drange(deltas)
    return [(float(d), rho_for_gap(float(d), b, P3)) for d in deltas]


def curve_csv(rows: Sequence[tuple[float, float]]) -> str:
    return "delta_bits,rho2\n" + "".join(f"{d:.9g},{r:.9g}\n" for d, r in rows)

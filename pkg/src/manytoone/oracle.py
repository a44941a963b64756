"""Independent numerical checks built on jointly Gaussian covariance algebra.

Everything the closed forms claim about Gaussian inputs can be recomputed
here from first principles: build the joint covariance of inputs, noises,
outputs and genie signals, then evaluate differential entropies and
conditional mutual informations with Schur complements. A seeded
Monte-Carlo estimator and brute-force permutation searches provide further
baselines.
"""

from __future__ import annotations

import itertools
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.linalg import solve_triangular

from .channel import DEFAULT_TOL, StandardChannel, StrategySpec
from .optimality import Certificate, Condition

LOG2_2PIE = math.log2(2 * math.pi * math.e)

#: Eigenvalue floor below which a conditioning block is treated as singular.
SINGULAR_TOL = 1e-10

#: Samples drawn per Philox counter block in :func:`mc_entropy`.
MC_BLOCK = 1 << 16


class SingularCovarianceError(ValueError):
    """The covariance needed for an entropy is singular."""


class DegenerateConditioningWarning(RuntimeWarning):
    """Conditioning block was singular; a pseudo-inverse was used."""


@dataclass(frozen=True)
class GaussianSystem:
    """Zero-mean jointly Gaussian scalar variables with named labels."""

    cov: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self):
        cov = np.array(self.cov, dtype=float)
        cov.setflags(write=False)
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "labels", tuple(self.labels))
        n = len(self.labels)
        if cov.shape != (n, n):
            raise ValueError(f"covariance shape {cov.shape} does not match {n} labels")
        if len(set(self.labels)) != n:
            raise ValueError("labels must be unique")
        if n and np.abs(cov - cov.T).max() > 1e-12 * max(1.0, np.abs(cov).max()):
            raise ValueError("covariance is not symmetric")
        if n and np.linalg.eigvalsh(cov).min() < -SINGULAR_TOL * max(1.0, np.abs(cov).max()):
            raise ValueError("covariance is not positive semidefinite")
        object.__setattr__(self, "_lookup", {s: i for i, s in enumerate(self.labels)})

    @classmethod
    def linear(
        cls,
        source_cov: np.ndarray,
        sources: Sequence[str],
        derived: Mapping[str, Mapping[str, float]],
    ) -> "GaussianSystem":
        """System of ``sources`` plus linear combinations of them.

        ``derived`` maps each new label to its coefficients over the source
        labels.
        """
        sources = list(sources)
        pos = {s: i for i, s in enumerate(sources)}
        rows = [np.eye(len(sources))]
        for coeffs in derived.values():
            row = np.zeros(len(sources))
            for s, c in coeffs.items():
                row[pos[s]] += c
            rows.append(row[None, :])
        A = np.vstack(rows)
        cov = A @ np.asarray(source_cov, dtype=float) @ A.T
        return cls(0.5 * (cov + cov.T), (*sources, *derived))

    def index(self, names: Iterable[str]) -> list[int]:
        try:
            return [self._lookup[n] for n in names]
        except KeyError as exc:
            raise KeyError(f"unknown variable {exc.args[0]!r}") from None

    def block(self, rows: Sequence[str], cols: Sequence[str] | None = None) -> np.ndarray:
        cols = rows if cols is None else cols
        return self.cov[np.ix_(self.index(rows), self.index(cols))]


def _names(v) -> list[str]:
    return [v] if isinstance(v, str) else list(v)


def conditional_cov(system: GaussianSystem, target, given=()) -> np.ndarray:
    """Covariance of ``target`` given ``given`` (a Schur complement)."""
    target, given = _names(target), _names(given)
    if not given:
        return system.block(target)
    idx = system.index(target + given)
    S = system.cov[np.ix_(idx, idx)]
    t = len(target)
    S_tt, S_tg, S_gg = S[:t, :t], S[:t, t:], S[t:, t:]
    try:
        L = np.linalg.cholesky(S_gg)
        regular = np.diag(L).min() ** 2 > SINGULAR_TOL * max(1.0, np.diag(S_gg).max())
    except np.linalg.LinAlgError:
        regular = False
    if regular:
        W = solve_triangular(L, S_tg.T, lower=True, check_finite=False)
        out = S_tt - W.T @ W
    else:
        warnings.warn("degenerate conditioning", DegenerateConditioningWarning, stacklevel=2)
        out = S_tt - S_tg @ np.linalg.pinv(S_gg, rcond=SINGULAR_TOL, hermitian=True) @ S_tg.T
    return 0.5 * (out + out.T)


def _logdet2(M: np.ndarray, what: str) -> float:
    if M.shape[0] == 0:
        return 0.0
    try:
        d = np.diag(np.linalg.cholesky(M)) ** 2
    except np.linalg.LinAlgError:
        d = np.zeros(1)
    # a vanishing Cholesky pivot marks a singular matrix
    if d.min() <= 1e-14 * max(1.0, np.diag(M).max()):
        raise SingularCovarianceError(f"singular covariance for {what}")
    return float(np.log2(d).sum())


def gaussian_entropy(system: GaussianSystem, variables, given=()) -> float:
    """Differential entropy ``0.5 log2((2 pi e)^d det Sigma)`` in bits.

    Examples
    --------
    >>> sys = GaussianSystem(np.array([[4.0]]), ["x"])
    >>> round(gaussian_entropy(sys, "x"), 5)
    3.0471
    """
    variables = _names(variables)
    M = conditional_cov(system, variables, given)
    return 0.5 * (len(variables) * LOG2_2PIE + _logdet2(M, ",".join(variables)))


def gaussian_mi(system: GaussianSystem, A, B, given=()) -> float:
    """Conditional mutual information ``I(A; B | given)`` in bits.

    Variables of ``A`` or ``B`` that also appear in ``given``, or are
    constant given it, carry no information and are dropped first.
    """
    A, B, C = _names(A), _names(B), _names(given)
    cset = set(C)
    A = [a for a in A if a not in cset]
    B = [b for b in B if b not in cset]
    if set(A) & set(B):
        raise ValueError("A and B overlap outside the conditioning set: infinite information")
    if not A or not B:
        return 0.0
    M = conditional_cov(system, A + B, C)
    # drop variables made constant by the conditioning
    keep = np.diag(M) > 1e-14
    n = int(keep[: len(A)].sum())
    if n == 0 or not keep[len(A):].any():
        return 0.0
    if not keep.all():
        M = M[np.ix_(keep, keep)]
    try:
        Lb = np.linalg.cholesky(M[n:, n:])
        La = np.sqrt(M[:1, :1]) if n == 1 else np.linalg.cholesky(M[:n, :n])
    except np.linalg.LinAlgError:
        raise SingularCovarianceError("singular conditional covariance for A or B") from None
    # canonical correlations of A and B given C
    inner = solve_triangular(Lb, M[n:, :n], lower=True, check_finite=False)
    if n == 1:
        s2 = np.array([float(inner[:, 0] @ inner[:, 0]) / M[0, 0]])
    else:
        R = solve_triangular(La, inner.T, lower=True, check_finite=False)
        s2 = np.linalg.svd(R, compute_uv=False) ** 2
    if s2.max(initial=0.0) < 0.5:
        # near independence: log1p keeps small values accurate
        return float(-0.5 * np.log1p(-s2).sum() / math.log(2.0))
    ld_a = 2.0 * np.log2(np.diag(La)).sum()
    ld_b = 2.0 * np.log2(np.diag(Lb)).sum()
    ld_ab = _logdet2(M, "A,B|C")
    return 0.5 * (ld_a + ld_b - ld_ab)


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class McConfig:
    """Seeded Monte-Carlo settings; samples come from a Philox generator."""

    seed: int = 42
    samples: int = 1_000_000
    confidence_sigma: float = 3.0

    def __post_init__(self):
        if self.samples < 1000:
            raise ValueError("Monte-Carlo estimates need at least 1000 samples")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class McEstimate:
    estimate: float
    stderr: float
    samples: int

    def brackets(self, value: float, sigmas: float = 3.0) -> bool:
        return abs(self.estimate - value) <= sigmas * self.stderr


def _block_stats(seed, block, count, L, logdet2):
    # Each block owns its own Philox counter range, so the draws depend only
    # on (seed, block) and never on how blocks are spread over workers.
    gen = np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, 0, block]))
    d = L.shape[0]
    x = gen.standard_normal((count, d)) @ L.T
    u = solve_triangular(L, x.T, lower=True)
    nll = 0.5 * (d * math.log2(2 * math.pi) + logdet2) + 0.5 * np.einsum("ij,ij->j", u, u) / math.log(2)
    return float(nll.sum()), float((nll * nll).sum())


def mc_entropy(system: GaussianSystem, variables, cfg: McConfig = McConfig(), workers: int = 1) -> McEstimate:
    """Monte-Carlo estimate of the entropy ``-E[log2 p(X)]`` with its standard error.

    The estimate is bit-identical for a fixed seed and sample count
    regardless of ``workers``.
    """
    variables = _names(variables)
    S = system.block(variables)
    logdet2 = _logdet2(S, ",".join(variables))
    L = np.linalg.cholesky(S)
    n = cfg.samples
    blocks = [(b, min(MC_BLOCK, n - b * MC_BLOCK)) for b in range((n + MC_BLOCK - 1) // MC_BLOCK)]

    def run(bc):
        return _block_stats(cfg.seed, bc[0], bc[1], L, logdet2)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            stats = list(pool.map(run, blocks))
    else:
        stats = [run(bc) for bc in blocks]
    total = math.fsum(s for s, _ in stats)
    total_sq = math.fsum(q for _, q in stats)
    mean = total / n
    var = max(total_sq / n - mean * mean, 0.0) * n / (n - 1)
    return McEstimate(mean, math.sqrt(var / n), n)


def _mi_block_stats(seed, block, count, L, ia, ib, La, Lb, const):
    gen = np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, 0, block]))
    x = gen.standard_normal((count, L.shape[0])) @ L.T

    def quad(Lm, v):
        u = solve_triangular(Lm, v.T, lower=True)
        return np.einsum("ij,ij->j", u, u)

    # log2 p(a, b) - log2 p(a) - log2 p(b) per sample
    val = const + 0.5 * (quad(La, x[:, ia]) + quad(Lb, x[:, ib]) - quad(L, x)) / math.log(2)
    return float(val.sum()), float((val * val).sum())


def mc_mutual_information(system: GaussianSystem, A, B, cfg: McConfig = McConfig()) -> McEstimate:
    """Monte-Carlo estimate of ``I(A; B)`` from joint samples, with standard error."""
    A, B = _names(A), _names(B)
    S = system.block(A + B)
    n = len(A)
    L = np.linalg.cholesky(S)
    La, Lb = np.linalg.cholesky(S[:n, :n]), np.linalg.cholesky(S[n:, n:])
    const = 0.5 * (_logdet2(S[:n, :n], "A") + _logdet2(S[n:, n:], "B") - _logdet2(S, "A,B"))
    ia, ib = np.arange(n), np.arange(n, S.shape[0])
    N = cfg.samples
    stats = [
        _mi_block_stats(cfg.seed, b, min(MC_BLOCK, N - b * MC_BLOCK), L, ia, ib, La, Lb, const)
        for b in range((N + MC_BLOCK - 1) // MC_BLOCK)
    ]
    total = math.fsum(v for v, _ in stats)
    total_sq = math.fsum(q for _, q in stats)
    mean = total / N
    var = max(total_sq / N - mean * mean, 0.0) * N / (N - 1)
    return McEstimate(mean, math.sqrt(var / N), N)


# ---------------------------------------------------------------------------
# Channel systems
# ---------------------------------------------------------------------------

def channel_system(ch: StandardChannel, extra_sources=None, derived=None) -> GaussianSystem:
    """Inputs ``x_i``, noises ``n_i`` and outputs ``y_i`` of a standard channel.

    ``extra_sources`` is a list of ``(label, variance, correlations)`` with
    correlations a mapping to existing source labels; ``derived`` adds
    further linear combinations (e.g. genie signals).
    """
    K = ch.K
    sources = [f"x{i}" for i in range(1, K + 1)] + [f"n{i}" for i in range(1, K + 1)]
    variances = list(ch.P) + list(ch.sigma2)
    extra_sources = extra_sources or []
    for label, var, _ in extra_sources:
        sources.append(label)
        variances.append(var)
    S = np.diag(variances)
    pos = {s: i for i, s in enumerate(sources)}
    for label, var, corr in extra_sources:
        for other, rho in corr.items():
            c = rho * math.sqrt(var * variances[pos[other]])
            S[pos[label], pos[other]] = S[pos[other], pos[label]] = c
    outs = {"y1": {"x1": 1.0, "n1": 1.0, **{f"x{j}": ch.gain(j) for j in ch.interferers}}}
    for i in ch.interferers:
        outs[f"y{i}"] = {f"x{i}": 1.0, f"n{i}": 1.0}
    outs.update(derived or {})
    return GaussianSystem.linear(S, sources, outs)


def rate_via_mi(ch: StandardChannel, strategy: StrategySpec) -> float:
    """Sum-rate of ``strategy`` as a sum of Gaussian mutual informations."""
    sys = channel_system(ch)
    direct = lambda i: gaussian_mi(sys, f"x{i}", f"y{i}")
    members = set(strategy.mac_set)
    if strategy.mode == "XC":
        total = gaussian_mi(sys, [f"x{i}" for i in sorted(members)], "y1")
        total += sum(direct(j) for j in ch.interferers if j not in members)
    else:
        total = gaussian_mi(sys, "x1", "y1", [f"x{j}" for j in sorted(members)])
        total += sum(direct(j) for j in ch.interferers)
    return total


def sic_stage_gains_via_mi(ch: StandardChannel, order: Sequence[int]) -> list[float]:
    """Per stage, ``I(x_j; y_1 | earlier) - I(x_j; y_j)`` (nonnegative iff decodable)."""
    sys = channel_system(ch)
    out = []
    for pos, j in enumerate(order):
        earlier = [f"x{m}" for m in order[:pos]]
        out.append(gaussian_mi(sys, f"x{j}", "y1", earlier) - gaussian_mi(sys, f"x{j}", f"y{j}"))
    return out


def ordered_outer_bound_via_mi(ch: StandardChannel, order: Sequence[int] | None = None) -> float:
    """Genie-aided outer bound with Gaussian inputs along a genie ordering.

    Receiver ``order[i]`` (all but the last) gets ``s = sum_{m >= i} h x + n_1``
    over the transmitters at positions i onwards; the bound is
    ``I(x_1; y_1) + sum I(x_j; y_j, s_j) + I(x_last; y_last)``.
    """
    order = list(order or ch.interferers)
    derived = {}
    for pos, j in enumerate(order[:-1]):
        coeffs = {f"x{m}": ch.gain(m) for m in order[pos:]}
        coeffs["n1"] = 1.0
        derived[f"s{j}"] = coeffs
    sys = channel_system(ch, derived=derived)
    total = gaussian_mi(sys, "x1", "y1")
    for j in order[:-1]:
        total += gaussian_mi(sys, f"x{j}", [f"y{j}", f"s{j}"])
    last = order[-1]
    return total + gaussian_mi(sys, f"x{last}", f"y{last}")


def batched_mi(cov: np.ndarray, A: Sequence[int], B: Sequence[int], given: Sequence[int] = ()) -> np.ndarray:
    """``I(A; B | given)`` in bits for a stack of covariance matrices.

    ``cov`` has shape ``(..., d, d)`` and the index lists select variables
    along the last two axes. Uses the four-logdet identity, so every
    selected block must be nonsingular.
    """
    def logdet(idx):
        if not idx:
            return np.zeros(cov.shape[:-2])
        sign, ld = np.linalg.slogdet(cov[..., idx, :][..., :, idx])
        if np.any(sign <= 0):
            raise SingularCovarianceError("singular block in batched mutual information")
        return ld

    A, B, C = list(A), list(B), list(given)
    out = logdet(A + C) + logdet(B + C) - logdet(A + B + C) - logdet(C)
    return 0.5 * out / math.log(2.0)


def ordered_outer_bound_batch(channels: Sequence[StandardChannel], order: Sequence[int] | None = None) -> np.ndarray:
    """:func:`ordered_outer_bound_via_mi` for many channels with the same K at once.

    Builds every channel's covariance over ``x_i``, ``n_i``, ``y_i`` and the
    genie signals as one stacked ``G S G^T`` and evaluates each term with
    :func:`batched_mi`.
    """
    K = channels[0].K
    if any(ch.K != K for ch in channels):
        raise ValueError("all channels in a batch need the same K")
    order = list(order or range(2, K + 1))
    N = len(channels)
    h = np.array([[0.0, 0.0, *ch.h] for ch in channels])  # h[:, j] for j = 2..K
    S = np.concatenate([np.array([ch.P for ch in channels]), np.array([ch.sigma2 for ch in channels])], axis=1)
    x = lambda i: i - 1
    n = lambda i: K + i - 1
    # sources, then y_1..y_K, then one genie signal per ordering position
    G = np.zeros((N, 3 * K + len(order) - 1, 2 * K))
    G[:, np.arange(2 * K), np.arange(2 * K)] = 1.0
    y = lambda i: 2 * K + i - 1
    G[:, y(1), x(1)] = 1.0
    G[:, y(1), n(1)] = 1.0
    for j in range(2, K + 1):
        G[:, y(1), x(j)] = h[:, j]
        G[:, y(j), x(j)] = 1.0
        G[:, y(j), n(j)] = 1.0
    rows = []
    for pos, j in enumerate(order[:-1]):
        r = 3 * K + pos
        rows.append((j, r))
        for m in order[pos:]:
            G[:, r, x(m)] = h[:, m]
        G[:, r, n(1)] = 1.0
    cov = np.einsum("nas,ns,nbs->nab", G, S, G)
    total = batched_mi(cov, [x(1)], [y(1)])
    for j, r in rows:
        total = total + batched_mi(cov, [x(j)], [y(j), r])
    last = order[-1]
    return total + batched_mi(cov, [x(last)], [y(last)])


# ---------------------------------------------------------------------------
# Genie signals
# ---------------------------------------------------------------------------

def genie_system(ch: StandardChannel, partner: int, eta: float, rho: float) -> GaussianSystem:
    """Channel plus the genie ``s = x_1 + h_k x_k + eta z`` with ``corr(z, n_1) = rho``."""
    return channel_system(
        ch,
        extra_sources=[("z", 1.0, {"n1": rho})],
        derived={"s": {"x1": 1.0, f"x{partner}": ch.gain(partner), "z": eta}},
    )


def smart_genie_mi(
    ch: StandardChannel, partner: int = 2, rho: float | None = None, eta_scale: float = 1.0
) -> float:
    """``I(x_1, x_k; s | y_1)`` for the two-transmitter MAC genie.

    ``eta`` is set from ``eta rho = 1 + sum_{j != k} h_j^2 P_j`` and then
    multiplied by ``eta_scale``. ``rho`` defaults to
    ``sqrt(1 - sum_{j != k} h_j^2)``, the choice that gives the widest region.
    """
    others = [j for j in ch.interferers if j != partner]
    if rho is None:
        rho = math.sqrt(1.0 - sum(ch.gain(j) ** 2 for j in others))
    eta = (1.0 + sum(ch.interference(j) for j in others)) / rho * eta_scale
    sys = genie_system(ch, partner, eta, rho)
    return gaussian_mi(sys, ["x1", f"x{partner}"], "s", "y1")


@dataclass(frozen=True)
class GenieGap:
    """Genie gap from covariance algebra; ``eta_admissible`` means ``eta^2 <= a^2``."""

    gap_bits: float
    eta: float
    eta_admissible: bool


def t3_gap_direct(ch: StandardChannel, rho2: float, variant: int = 1) -> GenieGap:
    """``I(x_weak; s | y_1, x_1, x_strong)`` for the three-user M3 genie.

    Variant 1 gives the genie ``s = x_1 + a x_2 + eta z`` with
    ``eta rho = 1 + b^2 P_3``; variant 2 swaps transmitters 2 and 3.
    """
    if ch.K != 3:
        raise ValueError("the M3 genie is defined for K = 3")
    if not 0.0 < rho2 < 1.0:
        raise ValueError(f"rho2 must lie in (0, 1), got {rho2}")
    strong, weak = (2, 3) if variant == 1 else (3, 2)
    rho = math.sqrt(rho2)
    eta = (1.0 + ch.interference(weak)) / rho
    sys = genie_system(ch, strong, eta, rho)
    gap = gaussian_mi(sys, f"x{weak}", "s", ["y1", "x1", f"x{strong}"])
    return GenieGap(gap, eta, eta * eta <= ch.gain(strong) ** 2 + DEFAULT_TOL)


def t3_outer_via_mi(ch: StandardChannel, rho2: float, variant: int = 1) -> float:
    """Genie-aided M3 outer bound ``I(x_1, x_2, x_3; y_1, s)``."""
    strong, weak = (2, 3) if variant == 1 else (3, 2)
    rho = math.sqrt(rho2)
    eta = (1.0 + ch.interference(weak)) / rho
    sys = genie_system(ch, strong, eta, rho)
    return gaussian_mi(sys, ["x1", "x2", "x3"], ["y1", "s"])


# ---------------------------------------------------------------------------
# Entropy-difference lemma
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LemmaReport:
    """Both sides of the entropy-difference inequality under Gaussian inputs."""

    precondition_met: bool
    lhs: float | None = None
    rhs: float | None = None
    transformed: float | None = None
    equal: bool | None = None
    mc_lhs: McEstimate | None = None

    @property
    def status(self) -> str:
        if not self.precondition_met:
            return "precondition unmet"
        return "equal" if self.equal else "unequal"


def verify_lemma_li(
    P: Sequence[float],
    c: Sequence[float],
    sigma2: float = 1.0,
    cfg: McConfig | None = None,
    tol: float = DEFAULT_TOL,
) -> LemmaReport:
    """Evaluate ``sum_i h(w_i + n_i) - h(sum_i c_i w_i + n_1)`` for Gaussian ``w_i``.

    The left side is computed from the joint covariance of all variables;
    the right side from the scalar closed forms. When every ``c_i`` is
    clearly nonzero (``c_i^2 > 1e-12``) the rescaled form ``sum h(t_i) -
    h(sum t_i + n~) + sum log2|c_i|`` with ``t_i = c_i (w_i + n_i)`` is
    evaluated as a third route. With ``cfg`` the left side is also
    estimated by sampling.
    Requires ``sum c_i^2 <= sigma2``; otherwise the report only states that
    the precondition is unmet.
    """
    P = [float(p) for p in P]
    c = [float(v) for v in c]
    if len(P) != len(c):
        raise ValueError("P and c need equal lengths")
    csq = math.fsum(v * v for v in c)
    if csq > sigma2 + tol:
        return LemmaReport(False)
    K = len(P)
    sources = [f"w{i}" for i in range(K)] + [f"u{i}" for i in range(K)] + ["n1"]
    S = np.diag(P + [1.0] * K + [sigma2])
    derived = {f"v{i}": {f"w{i}": 1.0, f"u{i}": 1.0} for i in range(K)}
    derived["mix"] = {**{f"w{i}": c[i] for i in range(K)}, "n1": 1.0}
    sys = GaussianSystem.linear(S, sources, derived)
    lhs = math.fsum(gaussian_entropy(sys, f"v{i}") for i in range(K)) - gaussian_entropy(sys, "mix")
    rhs = math.fsum(0.5 * math.log2(2 * math.pi * math.e * (p + 1.0)) for p in P) - 0.5 * math.log2(
        2 * math.pi * math.e * (math.fsum(ci * ci * p for ci, p in zip(c, P)) + sigma2)
    )
    transformed = None
    # tiny coefficients make the rescaled variables numerically singular
    if all(v * v > 1e-12 for v in c):
        sources_t = sources + ["ntil"]
        S_t = np.diag(P + [1.0] * K + [sigma2, max(sigma2 - csq, 0.0)])
        derived_t = {f"t{i}": {f"w{i}": c[i], f"u{i}": c[i]} for i in range(K)}
        mix_t = {f"w{i}": c[i] for i in range(K)}
        mix_t.update({f"u{i}": c[i] for i in range(K)})
        mix_t["ntil"] = 1.0
        derived_t["tmix"] = mix_t
        sys_t = GaussianSystem.linear(S_t, sources_t, derived_t)
        transformed = (
            math.fsum(gaussian_entropy(sys_t, f"t{i}") for i in range(K))
            - gaussian_entropy(sys_t, "tmix")
            - math.fsum(math.log2(abs(v)) for v in c)
        )
    equal = bool(abs(lhs - rhs) <= tol and (transformed is None or abs(transformed - rhs) <= tol))
    mc = None
    if cfg is not None:
        parts = [mc_entropy(sys, f"v{i}", McConfig(cfg.seed + i, cfg.samples)) for i in range(K)]
        parts.append(mc_entropy(sys, "mix", McConfig(cfg.seed + K, cfg.samples)))
        est = math.fsum(p.estimate for p in parts[:-1]) - parts[-1].estimate
        mc = McEstimate(est, math.sqrt(math.fsum(p.stderr**2 for p in parts)), cfg.samples)
    return LemmaReport(True, lhs, rhs, transformed, equal, mc)


# ---------------------------------------------------------------------------
# Brute-force permutation baselines
# ---------------------------------------------------------------------------

def _sq(ch, j):
    return ch.h[j - 2] * ch.h[j - 2]


def brute_force_t7(ch: StandardChannel, decoded_set: Iterable[int], tol: float = DEFAULT_TOL) -> Certificate:
    """Enumerate every decoding order of ``decoded_set`` against the raw inequalities."""
    decoded = sorted(set(decoded_set))
    if len(decoded) > 8:
        raise ValueError("brute force is limited to 8 decoded interferers")
    undecoded = [j for j in range(2, ch.K + 1) if j not in decoded]
    residual_power = sum(_sq(ch, j) * ch.P[j - 1] for j in undecoded)
    residual_gain = sum(_sq(ch, j) for j in undecoded)
    witness = None
    for perm in itertools.permutations(decoded):
        ok = True
        for l, j in enumerate(perm):
            need = 1.0 + ch.P[0] + sum(_sq(ch, m) * ch.P[m - 1] for m in perm[l + 1:]) + residual_power
            if _sq(ch, j) < need - tol:
                ok = False
                break
        if ok:
            witness = perm
            break
    residual_ok = residual_gain <= 1.0 + tol
    holds = residual_ok and (witness is not None or not decoded)
    cond = Condition("residual sum h^2 <= 1", residual_gain, 1.0, 1.0 - residual_gain, residual_ok)
    return Certificate("T7", holds, (cond,), witness=witness if decoded else None)


@dataclass(frozen=True)
class BruteT8:
    holds: bool
    witness: tuple[int, ...] | None
    gap_bits: float | None


def brute_force_t8(ch: StandardChannel, tol: float = DEFAULT_TOL) -> BruteT8:
    """Enumerate genie orderings for the permuted gap region; keep the smallest gap."""
    if ch.K - 1 > 8:
        raise ValueError("brute force is limited to K <= 9")
    best = None
    for perm in itertools.permutations(range(2, ch.K + 1)):
        ok = _sq(ch, perm[-1]) <= 1.0 + tol
        for i, j in enumerate(perm[:-1]):
            if not ok:
                break
            t_next = 1.0 + sum(_sq(ch, m) * ch.P[m - 1] for m in perm[i + 1:])
            Pj = ch.P[j - 1]
            if Pj > 0 and _sq(ch, j) > (1.0 + 1.0 / Pj) * t_next + tol:
                ok = False
        if not ok:
            continue
        gap = 0.0
        for i, j in enumerate(perm[:-1]):
            t_next = 1.0 + sum(_sq(ch, m) * ch.P[m - 1] for m in perm[i + 1:])
            Pj = ch.P[j - 1]
            gap += 0.5 * math.log2(1.0 + _sq(ch, j) * Pj / (t_next * (1.0 + Pj)))
        if best is None or gap < best[1] - 1e-12:
            best = (perm, gap)
    if best is None:
        return BruteT8(False, None, None)
    return BruteT8(True, best[0], best[1])


def random_channel(rng: np.random.Generator, K: int, h_max: float = 3.0, P_range=(0.1, 10.0)) -> StandardChannel:
    """Standard channel with gains uniform on [0, h_max] and log-uniform powers."""
    lo, hi = np.log(P_range[0]), np.log(P_range[1])
    h = rng.uniform(0.0, h_max, K - 1)
    P = np.exp(rng.uniform(lo, hi, K))
    return StandardChannel(K, h.tolist(), P.tolist())


def philox(seed: int) -> np.random.Generator:
    """The project's named generator: Philox keyed by ``seed``."""
    return np.random.Generator(np.random.Philox(key=seed))

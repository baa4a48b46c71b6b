"""
Rates of the distributed MIMO channel with finite backhaul.

An ``M x M`` virtual MIMO link (one source cluster, one destination
cluster) whose receivers forward quantized observations over backhaul
links of ``r0`` bits/symbol each. Closed forms are the large-``M`` limits;
the ``*_finite`` functions evaluate the exact finite-``M`` expressions and
serve as oracles for them.
"""

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import _parallel
from .exceptions import InvalidParameterError

__all__ = [
    "QmfChannelSpec",
    "QuantizationLevel",
    "FiniteChannelMatrix",
    "c_of_x",
    "f_func",
    "c_of_beta",
    "cutset_rate_asymptotic",
    "quantization_bounds",
    "qmf_branches",
    "qmf_rate_asymptotic",
    "optimal_quantization",
    "qf_rate_asymptotic",
    "normalized_logdet",
    "qmf_rate_finite",
    "cutset_rate_finite",
    "qf_rate_finite",
    "logdet_montecarlo",
    "submodularity_check",
    "beta_concavity_check",
]

LOG2E = math.log2(math.e)
MAX_SUBSET_M = 20
_SERIES_X = 1e-12


@dataclass(frozen=True)
class QmfChannelSpec:
    """Distributed MIMO channel: backhaul ``r0``, noise+interference ``n0``,
    sum transmit SNR ``snr`` and antenna count ``m`` (``None`` = asymptotic).
    """

    r0: float
    n0: float
    snr: float
    m: int = None

    def __post_init__(self):
        if not self.r0 >= 0:
            raise InvalidParameterError(f"r0 must be >= 0, got {self.r0!r}")
        if not (np.isfinite(self.n0) and self.n0 >= 1):
            raise InvalidParameterError(f"n0 must be >= 1, got {self.n0!r}")
        if not (np.isfinite(self.snr) and self.snr > 0):
            raise InvalidParameterError(f"snr must be > 0, got {self.snr!r}")
        if self.m is not None and (int(self.m) != self.m or self.m < 1):
            raise InvalidParameterError(f"m must be a positive integer, got {self.m!r}")


@dataclass(frozen=True)
class QuantizationLevel:
    """Quantization distortion power; ``degenerate`` marks the r0 = 0 case."""

    sigma_q2: float
    sigma_min2: float
    sigma_max2: float
    iterations: int = 0
    degenerate: bool = False


@dataclass(frozen=True)
class FiniteChannelMatrix:
    """An ``m x m`` channel with i.i.d. zero-mean, unit-variance entries."""

    h: np.ndarray
    ensemble: str
    seed: object = None

    @classmethod
    def sample(cls, m, ensemble="uniform-phase", seed=0):
        g = _parallel.rng(seed)
        return cls(_draw(g, m, m, ensemble), ensemble, seed)

    @property
    def m(self):
        return self.h.shape[0]


def _draw(g, rows, cols, ensemble):
    if ensemble == "uniform-phase":
        return np.exp(1j * g.uniform(0.0, 2 * np.pi, size=(rows, cols)))
    if ensemble == "complex-gaussian":
        return (g.standard_normal((rows, cols)) + 1j * g.standard_normal((rows, cols))) / np.sqrt(2)
    raise InvalidParameterError(f"unknown ensemble {ensemble!r}")


def _as_matrix(h):
    return np.asarray(h.h if isinstance(h, FiniteChannelMatrix) else h)


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------
def c_of_x(x):
    """Per-antenna capacity of an i.i.d. square MIMO channel at sum SNR ``x``.

    Uses ``(sqrt(1+4x) - 1)**2 / (4x) == (s-1)/(s+1)`` to avoid the 0/0 of
    the textbook form; below ``1e-12`` the two-term series is used.
    """
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 0) or np.any(np.isnan(x_arr)):
        raise InvalidParameterError("c_of_x requires x >= 0")
    with np.errstate(over="ignore", invalid="ignore"):
        s = np.sqrt(1.0 + 4.0 * x_arr)
        val = LOG2E * (2.0 * np.log1p(2.0 * x_arr / (1.0 + s)) - 4.0 * x_arr / (1.0 + s) ** 2)
    val = np.where(x_arr < _SERIES_X, LOG2E * x_arr * (1.0 - x_arr), val)
    val = np.where(np.isinf(x_arr), np.inf, val)
    return float(val) if val.ndim == 0 else val


def f_func(x, z):
    """Helper ``(sqrt(x (1+sqrt z)^2 + 1) - sqrt(x (1-sqrt z)^2 + 1))^2``."""
    rz = np.sqrt(z)
    return (np.sqrt(x * (1 + rz) ** 2 + 1) - np.sqrt(x * (1 - rz) ** 2 + 1)) ** 2


def c_of_beta(snr, beta):
    """Large-system limit of ``(1/M) logdet(I + snr/M H_S H_S^H)`` for a
    ``beta M x M`` sub-matrix ``H_S`` (Verdu-Shamai form).

    ``c_of_beta(snr, 1) == c_of_x(snr)``.
    """
    if not 0.0 <= beta <= 1.0:
        raise InvalidParameterError(f"beta must lie in [0, 1], got {beta!r}")
    if snr < 0:
        raise InvalidParameterError("snr must be >= 0")
    if beta == 0.0 or snr == 0.0:
        return 0.0
    if beta == 1.0:
        return c_of_x(snr)
    f = f_func(snr, beta)
    return float(
        beta * math.log2(1 + snr - f / 4)
        + math.log2(1 + snr * beta - f / 4)
        - LOG2E / (4 * snr) * f
    )


def cutset_rate_asymptotic(spec):
    """``min(r0, C(snr / n0))``."""
    return min(spec.r0, c_of_x(spec.snr / spec.n0))


def _backhaul_levels(r0):
    # 2**r0 - 1 without losing precision at small r0
    return math.expm1(r0 * math.log(2)) if r0 < 1000 else math.inf


def quantization_bounds(spec):
    """Bracket ``(sigma_min^2, sigma_max^2)`` for the quantization bisection.

    ``sigma_min^2`` zeroes the backhaul branch; ``sigma_max^2`` is the QF level.
    """
    d = _backhaul_levels(spec.r0)
    if d == 0:
        return math.inf, math.inf
    return spec.n0 / d, (spec.n0 + spec.snr) / d


def qmf_branches(spec, sigma_q2):
    """Return ``(backhaul_branch, mimo_branch)`` at distortion ``sigma_q2``."""
    if sigma_q2 == 0:
        return (spec.r0 if math.isinf(spec.r0) else -math.inf), c_of_x(spec.snr / spec.n0)
    backhaul = spec.r0 - math.log2(1 + spec.n0 / sigma_q2)
    mimo = c_of_x(spec.snr / (spec.n0 + sigma_q2))
    return backhaul, mimo


def qmf_rate_asymptotic(spec, sigma_q2):
    """QMF symmetric rate at quantization distortion ``sigma_q2``."""
    if not sigma_q2 > 0:
        raise InvalidParameterError(f"sigma_q2 must be > 0, got {sigma_q2!r}")
    return min(qmf_branches(spec, sigma_q2))


def optimal_quantization(spec, tol=1e-9, max_iter=200):
    """Bisection for the distortion level that equalizes the two QMF branches.

    The branch gap ``f = backhaul - mimo`` is increasing in ``sigma_q2``,
    non-positive at ``sigma_min^2`` and non-negative at ``sigma_max^2``.
    Bisection runs on ``log sigma_q2`` and stops once ``0 <= f < tol``; after
    ``max_iter`` halvings it returns the upper end of the bracket.

    Returns
    -------
    level : QuantizationLevel
    rate : float
        QMF rate at the returned level (bits/symbol).
    """
    if spec.r0 == 0:
        return QuantizationLevel(math.nan, math.inf, math.inf, degenerate=True), 0.0
    lo, hi = quantization_bounds(spec)
    if hi == 0:
        # infinite backhaul: no quantization noise
        return QuantizationLevel(0.0, 0.0, 0.0), c_of_x(spec.snr / spec.n0)

    def gap(s):
        b, m = qmf_branches(spec, s)
        return b - m

    log_lo, log_hi = math.log(lo), math.log(hi)
    upper = mid = hi
    it = 0
    for it in range(1, max_iter + 1):
        mid = math.exp(0.5 * (log_lo + log_hi))
        g = gap(mid)
        # stop only on the backhaul-slack side: there the rate is the MIMO
        # branch, which decreases in sigma, so it never drops below QF
        if 0 <= g < tol:
            break
        if g < 0:
            log_lo = math.log(mid)
        else:
            upper, log_hi = mid, math.log(mid)
    else:
        mid = upper
    return QuantizationLevel(mid, lo, hi, it), min(qmf_branches(spec, mid))


def qf_rate_asymptotic(spec):
    """Quantize-and-forward rate ``C((2^r0 - 1) snr / (2^r0 n0 + snr))``."""
    if spec.r0 == 0:
        return 0.0
    # the QF level is sigma_max^2; evaluating the MIMO branch there keeps QF
    # and the QMF bisection on identical floating-point footing
    return qmf_branches(spec, quantization_bounds(spec)[1])[1]


# ---------------------------------------------------------------------------
# Finite-M oracles
# ---------------------------------------------------------------------------
def normalized_logdet(h, snr):
    """``(1/m) log2 det(I + snr/m H H^H)`` for a square ``h``."""
    h = _as_matrix(h)
    m = h.shape[1]
    a = np.eye(h.shape[0]) + (snr / m) * (h @ h.conj().T)
    chol = np.linalg.cholesky(a)
    return float(2.0 * np.sum(np.log2(np.abs(np.diag(chol)))) / m)


def _subset_minimum(gram, penalty, d, m):
    """min over S of [sum_{i in S} penalty_i + log2det(I + D_{Sc} G_{Sc,Sc})] / m.

    ``gram`` is ``H H^H / m`` and ``d`` the per-receiver SNR scaling.
    """
    sq = np.sqrt(d)
    scaled = gram * np.outer(sq, sq)
    total_penalty = penalty.sum()
    best = total_penalty  # S = full set, empty logdet
    best_set = tuple(range(m))
    idx_all = np.arange(m)
    for k in range(1, m + 1):  # k = |S^c|
        combos = np.array(list(combinations(idx_all, k)), dtype=np.intp)
        for start in range(0, len(combos), 20000):
            c = combos[start:start + 20000]
            sub = scaled[c[:, :, None], c[:, None, :]] + np.eye(k)
            _, logdet = np.linalg.slogdet(sub)
            vals = total_penalty - penalty[c].sum(axis=1) + logdet * LOG2E
            j = int(np.argmin(vals))
            if vals[j] < best:
                best = float(vals[j])
                best_set = tuple(sorted(set(range(m)) - set(c[j].tolist())))
    return best / m, best_set


def _check_subset_size(m):
    if m > MAX_SUBSET_M:
        raise InvalidParameterError(
            f"exhaustive subset enumeration limited to m <= {MAX_SUBSET_M}, got m={m}"
        )


def qmf_rate_finite(h, r0, n0, snr, sigma, return_subset=False):
    """Exact finite-``m`` QMF rate by enumerating all ``2^m`` receiver cuts.

    Parameters
    ----------
    h : FiniteChannelMatrix or ndarray
    sigma : float or array_like
        Per-receiver quantization distortion power (scalar broadcasts).
    return_subset : bool
        Also return the minimizing cut ``S`` (receivers on the backhaul side).
    """
    h = _as_matrix(h)
    m = h.shape[0]
    _check_subset_size(m)
    sigma = np.broadcast_to(np.asarray(sigma, dtype=float), (m,))
    if np.any(sigma <= 0):
        raise InvalidParameterError("sigma must be positive")
    gram = (h @ h.conj().T) / h.shape[1]
    penalty = r0 - np.log2(1 + n0 / sigma)
    rate, subset = _subset_minimum(gram, penalty, snr / (n0 + sigma), m)
    return (rate, subset) if return_subset else rate


def cutset_rate_finite(h, r0, n0, snr):
    """Finite-``m`` cut-set bound (the QMF expression without sigma penalty)."""
    h = _as_matrix(h)
    m = h.shape[0]
    _check_subset_size(m)
    gram = (h @ h.conj().T) / h.shape[1]
    rate, _ = _subset_minimum(gram, np.full(m, float(r0)), np.full(m, snr / n0), m)
    return rate


def qf_rate_finite(h, r0, n0, snr):
    """Finite-``m`` QF rate with per-receiver noise-matched quantization.

    Receiver ``i`` quantizes at ``(n0 + snr ||h_i||^2 / m) / (2^r0 - 1)``, its
    own received signal-plus-noise power spread over the backhaul levels.
    """
    h = _as_matrix(h)
    m = h.shape[1]
    if h.shape[0] > 256:
        raise InvalidParameterError("qf_rate_finite supports m <= 256")
    if r0 == 0:
        return 0.0
    row_power = snr * np.sum(np.abs(h) ** 2, axis=1) / m
    levels = _backhaul_levels(r0)
    sigma = (n0 + row_power) / levels
    d = snr / (n0 + sigma)
    sq = np.sqrt(d)
    a = np.eye(h.shape[0]) + np.outer(sq, sq) * (h @ h.conj().T) / m
    chol = np.linalg.cholesky(a)
    return float(2.0 * np.sum(np.log2(np.abs(np.diag(chol)))) / m)


def logdet_montecarlo(m, snr, ensemble="uniform-phase", trials=100, seed=0, workers=None):
    """Mean of ``(1/m) log2 det(I + snr/m H H^H)`` over ``trials`` draws.

    Every trial gets its own Philox stream spawned from ``seed``, so the
    result does not depend on ``workers``.
    """
    if trials < 1:
        raise InvalidParameterError("trials must be >= 1")
    if snr == 0:
        return 0.0
    gens = _parallel.trial_rngs(seed, trials)
    vals = _parallel.ordered_map(
        lambda g: normalized_logdet(_draw(g, m, m, ensemble), snr), gens, workers
    )
    return float(np.mean(vals))


def _logdet_rows(h, rows, snr):
    if len(rows) == 0:
        return 0.0
    hs = h[list(rows)]
    m = h.shape[1]
    a = np.eye(len(rows)) + (snr / m) * (hs @ hs.conj().T)
    return float(np.linalg.slogdet(a)[1])


def submodularity_check(h, snr, trials=1000, seed=0, tol=1e-9):
    """Randomized test of diminishing returns for ``f(S) = logdet(I + snr/m H_S H_S^H)``.

    Samples ``A ⊆ B ⊂ [m]`` and ``x ∉ B`` and checks
    ``f(A ∪ {x}) - f(A) >= f(B ∪ {x}) - f(B) - tol``.
    """
    h = _as_matrix(h)
    m = h.shape[0]
    if m > 12:
        raise InvalidParameterError("submodularity_check supports m <= 12")
    g = _parallel.rng(seed)
    for _ in range(trials):
        x = int(g.integers(m))
        others = np.array([i for i in range(m) if i != x])
        b = others[g.random(others.size) < g.random()]
        a = b[g.random(b.size) < g.random()]
        lhs = _logdet_rows(h, np.append(a, x), snr) - _logdet_rows(h, a, snr)
        rhs = _logdet_rows(h, np.append(b, x), snr) - _logdet_rows(h, b, snr)
        if lhs < rhs - tol:
            return False
    return True


def beta_concavity_check(snr, points=100, tol=1e-12):
    """Second differences of ``c_of_beta(snr, .)`` on a uniform grid are <= tol."""
    betas = np.linspace(0.0, 1.0, points)
    vals = np.array([c_of_beta(snr, b) for b in betas])
    return bool(np.all(np.diff(vals, 2) <= tol))

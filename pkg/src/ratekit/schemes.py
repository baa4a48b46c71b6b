"""
Sum rates of the single-stage and hierarchical cooperation schemes.

Every hierarchical method delivers a packet throughput of the form::

    T = n ** (t / (t + 1)) / ((1 + t) * L**a * (1 + q)**b * q**c)

with method-specific exponents ``(a, b, c)``; the sum rate is the coding
rate times ``T``. Method 1 is the original three-phase recursion, method 2
applies TDMA once per phase, method 3 treats local exchange as network
multiple access, and method 4 combines 2 and 3.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .coding import DEFAULT_INTERFERENCE_N, rate_sequence
from .core import (
    interference_power_bound,
    local_rate,
    optimal_snr_single_stage,
    reuse_factor,
)
from .exceptions import ConvergenceError, InfeasibleConfigurationError, InvalidParameterError

__all__ = [
    "METHODS",
    "HIER_METHODS",
    "CONSTANTS",
    "RATE_INDEX",
    "SchemeConfig",
    "RateBreakdown",
    "SlotBudget",
    "penalty_exponents",
    "packet_throughput",
    "cluster_chain",
    "nmac_literal_cluster_size",
    "single_stage_sum_rate",
    "approx_sum_rate",
    "slot_budget",
    "slot_budget_recursive",
    "stage_coding_rate",
    "hier_sum_rate",
    "optimal_stage_count_method2",
    "optimal_stage_count_search",
    "best_sum_rate",
    "original_hc_baseline",
    "evaluate",
]

METHODS = ("single-stage", "m1", "m2", "m3", "m4", "multihop", "original-hc")
HIER_METHODS = ("m1", "m2", "m3", "m4")
CONSTANTS = ("derivation", "theorem3")
# which member of the coding-rate chain a t-stage scheme runs at:
#   "after-mimo": R(t+1), the rate left after the t-th long-range hop
#   "local":      R(t), the local rate of the top stage
RATE_INDEX = ("after-mimo", "local")
ORIGINAL_HC_REUSE = 3


@dataclass(frozen=True)
class SchemeConfig:
    """Full parameterization of one sum-rate computation."""

    n: int
    alpha: float
    method: str = "m4"
    t: int = None
    q: int = None
    relay_scheme: str = "qmf"
    snr: float = None
    L: int = None
    constants: str = "derivation"
    t_max: int = 8

    def __post_init__(self):
        if self.method not in METHODS:
            raise InvalidParameterError(f"unknown method {self.method!r}")
        if not self.n >= 4:
            raise InvalidParameterError(f"n must be >= 4, got {self.n!r}")
        if self.t is not None and self.t < 1:
            raise InvalidParameterError("t must be >= 1")
        if self.q is not None and self.q < 1:
            raise InvalidParameterError("q must be >= 1")
        if self.constants not in CONSTANTS:
            raise InvalidParameterError(f"unknown constants variant {self.constants!r}")


@dataclass(frozen=True)
class RateBreakdown:
    """Coding rate, packet throughput and their product."""

    method: str
    coding_rate: float
    packet_throughput: float
    cluster_sizes: tuple = ()
    t_used: int = 1
    q_used: int = 1
    L: int = None
    snr: float = None
    relay_scheme: str = None
    constants: str = "derivation"
    extra: dict = field(default_factory=dict, compare=False)

    @property
    def sum_rate(self):
        return self.coding_rate * self.packet_throughput

    @property
    def rounded_cluster_sizes(self):
        return tuple(int(round(m)) for m in self.cluster_sizes)


@dataclass(frozen=True)
class SlotBudget:
    """Normalized slot count ``F_t(n)`` of a ``t``-stage local exchange."""

    method: str
    n: float
    t: int
    f_t: float
    cluster_sizes: tuple = ()
    phases: dict = field(default_factory=dict)
    feasible: bool = True


def _check_method(method, allowed=HIER_METHODS):
    if method not in allowed:
        raise InvalidParameterError(f"method must be one of {allowed}, got {method!r}")


def penalty_exponents(method, t, constants="derivation"):
    """Exponents ``(a, b, c)`` of ``L``, ``1 + q`` and ``q`` in the throughput penalty.

    ``constants='theorem3'`` switches methods 3 and 4 to the closed-form
    statement ``((1 + q) q**(t-1)) ** (t / (2 (t+1)))`` of the local-exchange
    penalty; it coincides with the derivation form for ``q = 1`` up to a
    square root on ``1 + q``.
    """
    _check_method(method)
    if constants not in CONSTANTS:
        raise InvalidParameterError(f"unknown constants variant {constants!r}")
    tdma = t if method in ("m1", "m3") else 2 * t / (t + 1)
    if method in ("m1", "m2"):
        return tdma, t / 2, 0.0
    c = t * (t - 1) / (2 * (t + 1))
    b = t / (t + 1) if constants == "derivation" else t / (2 * (t + 1))
    return tdma, b, c


def packet_throughput(method, n, t, q, L, constants="derivation"):
    """Messages per slot of a ``t``-stage scheme at the optimal cluster size."""
    a, b, c = penalty_exponents(method, t, constants)
    return n ** (t / (t + 1)) / ((1 + t) * L ** a * (1 + q) ** b * q ** c)


def cluster_chain(method, n, t, q, L):
    """Optimal cluster sizes ``(M_t, ..., M_1)``, outermost first.

    The top size is ``(t + 1) T``; each inner size minimizes the slot count
    of the enclosing local exchange.
    """
    _check_method(method)
    top = (t + 1) * packet_throughput(method, n, t, q, L)
    chain = [top]
    for k in range(t, 1, -1):
        m = chain[-1]
        if method == "m1":
            inner = (m / (L * math.sqrt(1 + q)) ** k) ** ((k - 1) / k)
        elif method == "m2":
            inner = m ** ((k - 1) / k) / (1 + q) ** ((k - 1) / 2)
        elif method == "m3":
            inner = m ** ((k - 1) / k) / (L ** (k - 1) * q ** ((k - 1) / 2))
        else:
            inner = m ** ((k - 1) / k) / q ** ((k - 1) / 2)
        chain.append(inner)
    return tuple(chain)


def nmac_literal_cluster_size(n, t, q, L):
    """Top cluster size of method 3 as printed: ``L^t (1+q)^(t/(t+1)) q^(t(t-1)/(2(t+1))) n^(t/(t+1))``.

    Kept for comparison only; it exceeds ``n`` for moderate ``L`` and ``t``.
    """
    return L ** t * (1 + q) ** (t / (t + 1)) * q ** (t * (t - 1) / (2 * (t + 1))) * n ** (t / (t + 1))


def _feasible(chain, n):
    return all(1.0 <= m <= n for m in chain)


def single_stage_sum_rate(n, alpha, snr=None, L=None, q=1):
    """Sum rate of the three-phase cooperative scheme (one stage).

    Throughput is ``sqrt(n) / (2 L sqrt(1 + q))`` at cluster size
    ``sqrt(n) / (L sqrt(1 + q))``; interference is the full ring bound
    for this ``n``.
    """
    snr = optimal_snr_single_stage(alpha) if snr is None else snr
    L = reuse_factor(snr, alpha) if L is None else int(L)
    p_i = interference_power_bound(int(n), snr, L, alpha).p_i
    m = math.sqrt(n) / (L * math.sqrt(1 + q))
    if m < 1:
        raise InfeasibleConfigurationError(
            f"cluster size {m:.3g} < 1 for n={n}, L={L}, q={q}"
        )
    return RateBreakdown(
        "single-stage",
        local_rate(snr, p_i),
        math.sqrt(n) / (2 * L * math.sqrt(1 + q)),
        (m,), 1, q, L, snr,
        extra={"p_i": p_i},
    )


def approx_sum_rate(n, alpha):
    """High-SNR closed form ``alpha sqrt(n) / (2 sqrt(2) ln2 2^(3/alpha + 1/ln2))``."""
    ln2 = math.log(2)
    return alpha * math.sqrt(n) / ((2 * math.sqrt(2) * ln2) * 2 ** (3 / alpha + 1 / ln2))


# ---------------------------------------------------------------------------
# Slot budgets
# ---------------------------------------------------------------------------
def _base_slots(method, n, L):
    return n * n if method == "m3" else L * L * n * n


def _step(method, n, m, inner, L, q):
    """One level of the slot recursion: cluster size ``m``, inner budget ``inner``."""
    if method == "m2":
        return n / m * (L * L * n + (1 + q) * inner)
    if method == "m3":
        return n / m * (n + L * L * q * inner)
    return n / m * (L * L * n + q * inner)


def slot_budget(method, n, t, L, q):
    """Closed-form slot count ``F_t(n)`` and its inner cluster sizes.

    ``m2``: ``t L^2 (1+q)^((t-1)/2) n^((t+1)/t)``;
    ``m3``: ``t L^(t-1) q^((t-1)/2) n^((t+1)/t)``;
    ``m4``: ``t L^2 q^((t-1)/2) n^((t+1)/t)``.
    """
    _check_method(method, ("m2", "m3", "m4"))
    if t < 1:
        raise InvalidParameterError("t must be >= 1")
    expo = (t + 1) / t
    if method == "m2":
        f = t * L ** 2 * (1 + q) ** ((t - 1) / 2) * n ** expo
    elif method == "m3":
        f = t * L ** (t - 1) * q ** ((t - 1) / 2) * n ** expo
    else:
        f = t * L ** 2 * q ** ((t - 1) / 2) * n ** expo

    sizes = []
    size = n
    for k in range(t, 1, -1):
        if method == "m2":
            size = size ** ((k - 1) / k) / (1 + q) ** ((k - 1) / 2)
        elif method == "m3":
            size = size ** ((k - 1) / k) / (L ** (k - 1) * q ** ((k - 1) / 2))
        else:
            size = size ** ((k - 1) / k) / q ** ((k - 1) / 2)
        sizes.append(size)

    phases = {}
    if t > 1:
        m = sizes[0]
        inner = slot_budget(method, m, t - 1, L, q).f_t
        long_range = _step(method, n, m, 0.0, L, q)
        phases = {"long-range": long_range, "local": f - long_range, "inner": inner}
    return SlotBudget(method, n, t, f, tuple(sizes), phases, _feasible(sizes, n))


def _nested_slots(method, n, log_sizes, L, q):
    if len(log_sizes) == 0:
        return _base_slots(method, n, L)
    m = math.exp(log_sizes[0])
    return _step(method, n, m, _nested_slots(method, m, log_sizes[1:], L, q), L, q)


def slot_budget_recursive(method, n, t, L, q):
    """Slot count from the raw recursion, minimized numerically.

    The nested minimization over cluster sizes equals a joint minimization
    of the unrolled recursion over ``(log M_t, ..., log M_2)``; the
    objective is a posynomial, hence convex in log coordinates, and BFGS
    finds its global minimum. Cluster sizes are continuous and unbounded
    here; ``feasible`` reports whether they land in ``[1, n]``.
    """
    _check_method(method, ("m2", "m3", "m4"))
    if not 1 <= t <= 8:
        raise InvalidParameterError("slot_budget_recursive supports 1 <= t <= 8")
    if t == 1:
        return SlotBudget(method, n, 1, _base_slots(method, n, L))

    def objective(x):
        return math.log(_nested_slots(method, n, x, L, q))

    # neutral start: every inner cluster is the square root of its parent
    x0 = np.log(n) * 0.5 ** np.arange(1, t)
    res = optimize.minimize(objective, x0, method="BFGS", options={"gtol": 1e-10, "maxiter": 2000})
    if not res.success and res.status != 2:
        raise ConvergenceError(f"slot minimization failed: {res.message}", last=res)
    sizes = tuple(float(v) for v in np.exp(res.x))
    return SlotBudget(method, n, t, math.exp(res.fun), sizes, {}, _feasible(sizes, n))


# ---------------------------------------------------------------------------
# Hierarchical sum rates
# ---------------------------------------------------------------------------
def stage_coding_rate(alpha, t, q, relay_scheme="qmf", rate_index="after-mimo", L=None, snr=None):
    """Coding rate a ``t``-stage scheme can sustain.

    With ``rate_index='after-mimo'`` the rate must survive all ``t``
    long-range hops, i.e. ``R(t+1)`` of the recursion; ``'local'`` uses ``R(t)``.
    """
    if rate_index not in RATE_INDEX:
        raise InvalidParameterError(f"unknown rate index {rate_index!r}")
    idx = t + 1 if rate_index == "after-mimo" else t
    seq = rate_sequence(alpha, q, relay_scheme, idx, snr=snr, L=L)
    return seq[idx], seq


def hier_sum_rate(method, n, alpha, t, q, coding_rate=None, relay_scheme="qmf",
                  constants="derivation", L=None, snr=None, rate_index="after-mimo",
                  check_feasible=True):
    """Sum rate of a ``t``-stage hierarchical scheme.

    Parameters
    ----------
    coding_rate : float, optional
        Use this coding rate instead of the per-stage recursion value.
    constants : {'derivation', 'theorem3'}
        Penalty-constant variant for methods 3 and 4.
    check_feasible : bool
        Raise when the implied cluster chain leaves ``[1, n]``.

    Raises
    ------
    InfeasibleConfigurationError
    """
    _check_method(method)
    snr = optimal_snr_single_stage(alpha) if snr is None else snr
    L = reuse_factor(snr, alpha) if L is None else int(L)
    if coding_rate is None:
        coding_rate, _ = stage_coding_rate(alpha, t, q, relay_scheme, rate_index, L=L, snr=snr)
    chain = cluster_chain(method, n, t, q, L)
    if check_feasible and not _feasible(chain, n):
        raise InfeasibleConfigurationError(
            f"{method} t={t} q={q}: cluster sizes {tuple(round(m, 3) for m in chain)} outside [1, {n}]"
        )
    return RateBreakdown(
        method, coding_rate, packet_throughput(method, n, t, q, L, constants),
        chain, t, q, L, snr, relay_scheme, constants,
    )


def optimal_stage_count_method2(n, L):
    """Stationary point of the method-2 sum rate in ``t`` (q = 2).

    Returns
    -------
    t_real : float
        ``-1 + (-1 + sqrt(1 + 2 ln(n/L) ln 3)) / ln 3``.
    t_int : int
        Whichever of ``floor(t_real)``, ``ceil(t_real)`` (at least 1) gives
        the larger method-2 throughput.
    """
    if not n > L:
        raise InvalidParameterError(f"need n > L, got n={n}, L={L}")
    ln3 = math.log(3)
    t_real = -1 + (-1 + math.sqrt(1 + 2 * math.log(n / L) * ln3)) / ln3
    cands = sorted({max(1, math.floor(t_real)), max(1, math.ceil(t_real))})
    t_int = max(cands, key=lambda t: (packet_throughput("m2", n, t, 2, L), -t))
    return t_real, t_int


def _candidates(method, n, alpha, ts, qs, relay_scheme, constants, L, snr, rate_index):
    for t in ts:
        for q in qs:
            try:
                yield hier_sum_rate(method, n, alpha, t, q, None, relay_scheme,
                                    constants, L, snr, rate_index)
            except InfeasibleConfigurationError:
                continue


def _argmax(candidates):
    best = None
    for c in candidates:
        # strict '>' keeps the earliest (smaller t, then smaller q) on ties
        if best is None or c.sum_rate > best.sum_rate:
            best = c
    return best


def optimal_stage_count_search(method, n, alpha, q=2, relay_scheme="qmf", t_max=12,
                               constants="derivation", rate_index="after-mimo"):
    """Stage count maximizing the sum rate for fixed ``q`` (1-D search)."""
    best = _argmax(_candidates(method, n, alpha, range(1, t_max + 1), (q,),
                               relay_scheme, constants, None, None, rate_index))
    if best is None:
        raise InfeasibleConfigurationError(f"no feasible stage count for n={n}")
    return best.t_used


def best_sum_rate(method, n, alpha, relay_scheme="qmf", qs=(1, 2), t_max=8,
                  constants="derivation", rate_index="after-mimo", L=None, snr=None):
    """Maximize the sum rate over ``t = 1..t_max`` and ``q in qs``.

    Each ``t`` uses its own coding rate from the recursion rather than the
    limit. Ties go to the smaller ``t``, then the smaller ``q``.
    """
    _check_method(method)
    best = _argmax(_candidates(method, n, alpha, range(1, t_max + 1), tuple(qs),
                               relay_scheme, constants, L, snr, rate_index))
    if best is None:
        raise InfeasibleConfigurationError(f"no feasible configuration for {method} at n={n}")
    return best


def original_hc_baseline(n, alpha, t_max=8, rate_index="after-mimo"):
    """Method 1 with the fixed reuse factor 3, QF relaying and ``q = 1``.

    The SNR stays at the single-stage optimum for ``alpha``.
    """
    out = best_sum_rate("m1", n, alpha, "qf", (1,), t_max, "derivation", rate_index,
                        L=ORIGINAL_HC_REUSE)
    return RateBreakdown("original-hc", out.coding_rate, out.packet_throughput,
                         out.cluster_sizes, out.t_used, out.q_used, out.L, out.snr, "qf")


def evaluate(config):
    """Compute the ``RateBreakdown`` described by a ``SchemeConfig``."""
    from . import multihop

    m = config.method
    if m == "single-stage":
        return single_stage_sum_rate(config.n, config.alpha, config.snr, config.L, config.q or 1)
    if m == "multihop":
        return multihop.multihop_sum_rate_lower(config.n, config.alpha, snr=config.snr, L=config.L)
    if m == "original-hc":
        return original_hc_baseline(config.n, config.alpha, config.t_max)
    if config.t is not None:
        return hier_sum_rate(m, config.n, config.alpha, config.t, config.q or 1, None,
                             config.relay_scheme, config.constants, config.L, config.snr)
    qs = (config.q,) if config.q else (1, 2)
    return best_sum_rate(m, config.n, config.alpha, config.relay_scheme, qs, config.t_max,
                         config.constants, L=config.L, snr=config.snr)

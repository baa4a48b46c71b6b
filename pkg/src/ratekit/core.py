"""
Network and channel primitives.

Grid geometry, pathloss channel, power policy, TDMA reuse, and the
inter-cluster interference budget that feeds every local-communication
rate. Logarithms in rates are base 2 throughout.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import InvalidParameterError

__all__ = [
    "SNR_MAX",
    "GridNetwork",
    "PathlossChannel",
    "PowerPolicy",
    "TdmaConfig",
    "InterferenceBudget",
    "reuse_factor",
    "optimal_snr_single_stage",
    "optimal_snr_multihop",
    "interference_power_bound",
    "interference_power_dominant",
    "interference_power_exact",
    "local_rate",
    "tin_condition_holds",
]

SNR_MAX = 2.0 ** 80


def _check_alpha(alpha):
    if not np.isfinite(alpha) or alpha < 2:
        raise InvalidParameterError(f"pathloss exponent must be >= 2, got {alpha!r}")


def _check_snr(snr, name="snr"):
    if not np.isfinite(snr) or snr <= 0:
        raise InvalidParameterError(f"{name} must be positive and finite, got {snr!r}")


def _check_reuse(L):
    if int(L) != L or L < 2:
        raise InvalidParameterError(f"reuse factor must be an integer >= 2, got {L!r}")


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class GridNetwork:
    """A sqrt(n) x sqrt(n) grid of nodes in the unit square.

    Node ``(i, j)`` sits at ``(i / sqrt(n), j / sqrt(n))`` so the minimum
    inter-node distance is ``1 / sqrt(n)``.
    """

    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise InvalidParameterError(f"n must be a positive integer, got {self.n!r}")
        side = math.isqrt(int(self.n))
        if side * side != self.n:
            raise InvalidParameterError(f"n must be a perfect square, got {self.n}")

    @property
    def side(self):
        return math.isqrt(int(self.n))

    @property
    def spacing(self):
        return 1.0 / self.side

    def coordinates(self):
        """Return an ``(n, 2)`` array of node positions, row-major."""
        idx = np.arange(self.side)
        ii, jj = np.meshgrid(idx, idx, indexing="ij")
        return np.column_stack([ii.ravel(), jj.ravel()]) * self.spacing

    def center_node(self):
        return (self.side // 2, self.side // 2)


@dataclass(frozen=True)
class PathlossChannel:
    """Line-of-sight pathloss with i.i.d. phase.

    ``phase_model`` only matters to Monte-Carlo oracles; closed-form rates
    use the gain magnitude alone.
    """

    alpha: float
    phase_model: str = "uniform-phase"

    def __post_init__(self):
        _check_alpha(self.alpha)
        if self.phase_model not in ("uniform-phase", "complex-gaussian"):
            raise InvalidParameterError(f"unknown phase model {self.phase_model!r}")

    def gain_magnitude(self, r):
        return np.asarray(r, dtype=float) ** (-self.alpha / 2.0)

    def sample(self, r, rng):
        """Draw complex channel coefficients for distances ``r``."""
        r = np.asarray(r, dtype=float)
        mag = self.gain_magnitude(r)
        if self.phase_model == "uniform-phase":
            return mag * np.exp(1j * rng.uniform(0.0, 2 * np.pi, size=r.shape))
        g = (rng.standard_normal(r.shape) + 1j * rng.standard_normal(r.shape)) / np.sqrt(2)
        return mag * g


@dataclass(frozen=True)
class PowerPolicy:
    """Distance-dependent transmit power for local and MIMO phases."""

    snr_local: float
    cluster_area: float
    alpha: float
    snr_mimo: float = None
    snr_max: float = SNR_MAX

    def __post_init__(self):
        _check_alpha(self.alpha)
        _check_snr(self.snr_local, "snr_local")
        if self.snr_mimo is None:
            object.__setattr__(self, "snr_mimo", self.snr_local)
        _check_snr(self.snr_mimo, "snr_mimo")
        if self.snr_local > self.snr_max or self.snr_mimo > self.snr_max:
            raise InvalidParameterError("SNR exceeds snr_max")
        if not self.cluster_area > 0:
            raise InvalidParameterError("cluster_area must be positive")

    @property
    def local_power(self):
        return self.snr_local * self.cluster_area ** (self.alpha / 2)

    def mimo_power(self, m):
        """Per-node transmit power when ``m`` nodes act as one array."""
        return self.snr_mimo / m * self.cluster_area ** (self.alpha / 2)


@dataclass(frozen=True)
class TdmaConfig:
    """Reuse-``L`` TDMA: cluster ``(u, v)`` transmits in slot ``(u % L, v % L)``."""

    L: int

    def __post_init__(self):
        _check_reuse(self.L)

    @property
    def slots(self):
        return self.L * self.L

    def slot_of(self, u, v):
        return (u % self.L, v % self.L)

    def active_mask(self, clusters_per_side, slot):
        u = np.arange(clusters_per_side)
        su, sv = slot
        return np.logical_and.outer(u % self.L == su, u % self.L == sv)


@dataclass(frozen=True)
class InterferenceBudget:
    """Normalized interference power (relative to unit noise)."""

    p_i: float
    method: str
    details: dict = field(default_factory=dict, compare=False)

    def __float__(self):
        return float(self.p_i)


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------
def reuse_factor(snr, alpha):
    """Smallest reuse factor that keeps the strongest interferer below sqrt(SNR).

    Returns ``ceil(snr ** (1 / (2 alpha)) + 1)``.
    """
    _check_snr(snr)
    _check_alpha(alpha)
    return int(math.ceil(snr ** (1.0 / (2.0 * alpha)) + 1.0))


def optimal_snr_single_stage(alpha):
    """Rate-maximizing local SNR of the single-stage cooperative scheme."""
    _check_alpha(alpha)
    return 2.0 ** (2.0 * (3.0 + alpha / math.log(2)))


def optimal_snr_multihop(alpha):
    """Rate-maximizing per-hop SNR for multihop routing."""
    _check_alpha(alpha)
    return 2.0 ** (2.0 * (3.0 + alpha / (2.0 * math.log(2))))


def interference_power_bound(n, snr, L, alpha):
    """Ring-counting upper bound on the aggregate interference.

    Ring ``i`` holds ``8 i`` co-active clusters, each at least ``L i - 1``
    cluster widths away; rings run over ``i = 1 .. floor(sqrt(n))``.
    """
    if int(n) != n or n < 1:
        raise InvalidParameterError(f"n must be a positive integer, got {n!r}")
    _check_snr(snr)
    _check_reuse(L)
    _check_alpha(alpha)
    rings = math.isqrt(int(n))
    i = np.arange(1, rings + 1, dtype=float)
    # log domain keeps snr * huge-distance terms from under/overflowing
    log_terms = np.log(8 * i) + math.log(snr) - alpha * np.log(L * i - 1.0)
    p_i = float(np.exp(log_terms).sum())
    return InterferenceBudget(p_i, "ring-bound", {"rings": rings})


def interference_power_dominant(snr, L, alpha):
    """Nearest-ring approximation ``8 snr (L - 1) ** -alpha``."""
    _check_snr(snr)
    _check_reuse(L)
    _check_alpha(alpha)
    return InterferenceBudget(8.0 * snr * (L - 1.0) ** (-alpha), "dominant")


def interference_power_exact(grid, L, alpha, snr, cluster_side):
    """Exact worst-case interference at the center node of ``grid``.

    Clusters are ``cluster_side x cluster_side`` node blocks. Every cluster
    sharing the receiver's TDMA slot contributes one transmitter placed at
    the cluster node closest to the receiver; the receiver's own cluster is
    excluded.
    """
    _check_reuse(L)
    _check_alpha(alpha)
    _check_snr(snr)
    side = grid.side
    if int(cluster_side) != cluster_side or cluster_side < 1 or side % cluster_side:
        raise InvalidParameterError(
            f"cluster_side={cluster_side!r} does not tile a {side}x{side} grid"
        )
    c = int(cluster_side)
    k = side // c
    rx = np.array(grid.center_node())
    own = rx // c

    u = np.arange(k)
    cu = u[(u - own[0]) % L == 0]
    cv = u[(u - own[1]) % L == 0]
    uu, vv = np.meshgrid(cu, cv, indexing="ij")
    keep = ~((uu == own[0]) & (vv == own[1]))
    uu, vv = uu[keep], vv[keep]
    if uu.size == 0:
        return InterferenceBudget(0.0, "exact-grid", {"interferers": 0})

    # nearest node of each co-active cluster, in grid index units
    nx = np.clip(rx[0], uu * c, uu * c + c - 1)
    ny = np.clip(rx[1], vv * c, vv * c + c - 1)
    dist = np.hypot(nx - rx[0], ny - rx[1])
    # snr * A**(alpha/2) * d**-alpha with both lengths in node-spacing units
    p_i = float(np.sum(snr * (c / dist) ** alpha))
    return InterferenceBudget(p_i, "exact-grid", {"interferers": int(uu.size)})


def local_rate(snr, p_i):
    """TIN rate ``log2(1 + snr / (1 + p_i))`` in bits/symbol."""
    p_i = float(p_i)
    _check_snr(snr)
    if not p_i >= 0:
        raise InvalidParameterError(f"interference power must be >= 0, got {p_i!r}")
    return math.log2(1.0 + snr / (1.0 + p_i))


def tin_condition_holds(snr, L, alpha):
    """Check the symmetric TIN-optimality condition ``INR <= sqrt(SNR)``.

    The strongest interferer is bounded by ``(L - 1) ** -alpha * snr``.

    Returns
    -------
    holds : bool
    margin_db : float
        ``10 log10(sqrt(snr) / INR)``; non-negative iff the condition holds.
    """
    _check_snr(snr)
    _check_reuse(L)
    _check_alpha(alpha)
    # (L-1)**alpha >= sqrt(snr)  <=>  (L-1)**(2 alpha) >= snr; when 2 alpha is
    # an integer the power is an exact int and compares exactly with the float snr
    if float(2 * alpha).is_integer():
        holds = (int(L) - 1) ** int(2 * alpha) >= snr
    else:
        holds = 2.0 * alpha * math.log(L - 1.0) >= math.log(snr) if L > 2 else snr <= 1.0
    margin_db = 10.0 * (alpha * math.log10(L - 1.0) - 0.5 * math.log10(snr))
    return bool(holds), margin_db

"""
Multihop routing baseline on the grid.

Every source forwards its packet hop by hop to nearest neighbours, first
along its row and then along the destination's column. Cluster size is
one node, so the only design knobs are the per-hop SNR and the reuse
factor.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._parallel import ordered_map, trial_rngs
from .core import (
    GridNetwork,
    interference_power_bound,
    local_rate,
    optimal_snr_multihop,
    reuse_factor,
)
from .exceptions import ConvergenceError, InvalidParameterError
from .schemes import RateBreakdown

__all__ = [
    "RoutingTrafficStats",
    "multihop_sum_rate_lower",
    "multihop_sum_rate_avg",
    "sample_derangement",
    "route_traffic",
    "relay_traffic_montecarlo",
]

MAX_DERANGEMENT_ATTEMPTS = 10 ** 4


@dataclass(frozen=True)
class RoutingTrafficStats:
    """Relay-traffic statistics over Monte-Carlo realizations.

    Attributes
    ----------
    node_traffic : ndarray, shape (side, side)
        Mean number of relayed routes per node.
    center_traffic : ndarray of int, shape (trials,)
        Routes relayed by the center node in each realization.
    max_traffic : int
        Largest per-node count seen in any realization.
    """

    n: int
    node_traffic: np.ndarray
    center_traffic: np.ndarray
    max_traffic: int
    trials: int
    seed: int

    @property
    def mean_center_traffic(self):
        return float(np.mean(self.center_traffic))

    @property
    def bound(self):
        return 2 * math.isqrt(self.n)


def _operating_point(n, alpha, snr, L):
    snr = optimal_snr_multihop(alpha) if snr is None else snr
    L = reuse_factor(snr, alpha) if L is None else int(L)
    p_i = interference_power_bound(int(n), snr, L, alpha).p_i
    return snr, L, p_i


def multihop_sum_rate_lower(n, alpha, snr=None, L=None):
    """Guaranteed multihop sum rate ``log2(1 + SNR/(1 + P_I)) sqrt(n) / (2 L^2)``.

    The factor 2 accounts for the worst-case relay load ``2 sqrt(n)`` at a
    node; the SNR defaults to the multihop optimum.
    """
    snr, L, p_i = _operating_point(n, alpha, snr, L)
    return RateBreakdown(
        "multihop-lower", local_rate(snr, p_i), math.sqrt(n) / (2 * L * L),
        (1.0,), 1, None, L, snr, extra={"p_i": p_i},
    )


def multihop_sum_rate_avg(n, alpha, snr=None, L=None):
    """Multihop sum rate under the average relay load ``sqrt(n)``."""
    low = multihop_sum_rate_lower(n, alpha, snr, L)
    return RateBreakdown(
        "multihop-avg", low.coding_rate, 2 * low.packet_throughput,
        (1.0,), 1, None, low.L, low.snr, extra=dict(low.extra),
    )


def sample_derangement(n, rng, max_attempts=MAX_DERANGEMENT_ATTEMPTS):
    """Uniform random permutation of ``range(n)`` with no fixed point."""
    if n < 2:
        raise InvalidParameterError("derangements need n >= 2")
    idx = np.arange(n)
    for _ in range(max_attempts):
        p = rng.permutation(n)
        if not np.any(p == idx):
            return p
    raise ConvergenceError(
        f"no derangement after {max_attempts} attempts", last=max_attempts
    )


def route_traffic(dest, side):
    """Per-node relay counts for horizontal-then-vertical routing.

    Parameters
    ----------
    dest : ndarray of int
        ``dest[s]`` is the destination of source ``s`` (row-major indices).
    side : int
        Grid side length.

    Returns
    -------
    ndarray of int, shape (side, side)
        Number of routes each node relays, endpoints excluded.
    """
    src = np.arange(side * side)
    rs, cs = np.divmod(src, side)
    rd, cd = np.divmod(np.asarray(dest), side)

    # horizontal leg: row rs, columns between cs and cd inclusive
    h = np.zeros((side, side + 1), dtype=np.int64)
    lo, hi = np.minimum(cs, cd), np.maximum(cs, cd)
    np.add.at(h, (rs, lo), 1)
    np.add.at(h, (rs, hi + 1), -1)
    counts = np.cumsum(h[:, :side], axis=1)

    # vertical leg: column cd, rows after rs up to rd; the corner is already counted
    v = np.zeros((side + 1, side), dtype=np.int64)
    move = rd != rs
    down = rd > rs
    vlo = np.where(down, rs + 1, rd)[move]
    vhi = np.where(down, rd, rs - 1)[move]
    np.add.at(v, (vlo, cd[move]), 1)
    np.add.at(v, (vhi + 1, cd[move]), -1)
    counts += np.cumsum(v[:side, :], axis=0)

    # every route touches its own source and destination once
    flat = counts.reshape(-1)
    flat -= 1
    np.subtract.at(flat, dest, 1)
    return counts


def relay_traffic_montecarlo(n, trials=100, seed=0, workers=None):
    """Monte-Carlo relay traffic under random derangement pairing.

    Each trial draws its own generator from ``seed`` so results do not
    depend on the worker count.
    """
    grid = GridNetwork(n)
    if trials < 1:
        raise InvalidParameterError("trials must be >= 1")
    side = grid.side
    center = grid.center_node()

    def one(gen):
        return route_traffic(sample_derangement(n, gen), side)

    maps = ordered_map(one, trial_rngs(seed, trials), workers)
    stack = np.stack(maps)
    return RoutingTrafficStats(
        n=int(n),
        node_traffic=stack.mean(axis=0),
        center_traffic=stack[:, center[0], center[1]].copy(),
        max_traffic=int(stack.max()),
        trials=int(trials),
        seed=seed,
    )

"""
Per-stage coding-rate recursion for hierarchical cooperation.

Stage 1 communicates locally at the TIN rate ``R(1)``. Each further stage
sees a distributed MIMO channel whose backhaul is the previous stage's
local rate times the time-expansion factor ``q``, with noise plus
interference ``1 + P_I``::

    R(t+1) = relay_rate(q * R(t), 1 + P_I, SNR)

The sequence is non-increasing and converges to ``R*(alpha, q)``.
"""

from dataclasses import dataclass
from functools import lru_cache

from .core import (
    interference_power_bound,
    local_rate,
    optimal_snr_single_stage,
    reuse_factor,
)
from .exceptions import ConvergenceError, InvalidParameterError
from .mimo import (
    QmfChannelSpec,
    cutset_rate_asymptotic,
    optimal_quantization,
    qf_rate_asymptotic,
)

__all__ = [
    "RELAY_SCHEMES",
    "CHAIN_SCHEMES",
    "DEFAULT_INTERFERENCE_N",
    "CodingRateSequence",
    "relay_rate",
    "stage_parameters",
    "rate_sequence",
    "rate_fixed_point",
    "coding_rate",
    "lemma1_bound_check",
    "stage_gap",
]

RELAY_SCHEMES = ("qmf", "qf")
# "cutset" runs the recursion on the cut-set bound; an upper envelope, not a scheme
CHAIN_SCHEMES = RELAY_SCHEMES + ("cutset",)
# ring-bound P_I is evaluated with 1000 rings so R_c depends on alpha and q only
DEFAULT_INTERFERENCE_N = 10 ** 6
_CHAIN_TOL = 1e-14


@dataclass(frozen=True)
class CodingRateSequence:
    """Coding rates ``R(1), R(2), ...`` of one (alpha, q, relay scheme) chain."""

    alpha: float
    q: int
    relay_scheme: str
    rates: tuple
    snr: float
    L: int
    p_i: float
    r_star: float
    converged: bool
    collapsed: bool = False

    def __getitem__(self, t):
        """1-based access: ``seq[1]`` is the local rate ``R(1)``."""
        if t < 1:
            raise IndexError("stages are numbered from 1")
        return self.rates[t - 1]

    def __len__(self):
        return len(self.rates)


def _normalize_scheme(relay_scheme):
    scheme = {"qmf-optimal": "qmf"}.get(relay_scheme, relay_scheme)
    if scheme not in CHAIN_SCHEMES:
        raise InvalidParameterError(f"unknown relay scheme {relay_scheme!r}")
    return scheme


def relay_rate(r0, n0, snr, relay_scheme="qmf", tol=_CHAIN_TOL):
    """Rate of the distributed MIMO hop with backhaul ``r0``."""
    scheme = _normalize_scheme(relay_scheme)
    if r0 <= 0:
        return 0.0
    spec = QmfChannelSpec(r0, n0, snr)
    if scheme == "qf":
        return qf_rate_asymptotic(spec)
    if scheme == "cutset":
        return cutset_rate_asymptotic(spec)
    return optimal_quantization(spec, tol=tol)[1]


def stage_parameters(alpha, snr=None, L=None, n_interference=DEFAULT_INTERFERENCE_N):
    """Resolve ``(snr, L, P_I)`` for a chain, filling in optimal defaults."""
    snr = optimal_snr_single_stage(alpha) if snr is None else snr
    L = reuse_factor(snr, alpha) if L is None else int(L)
    p_i = interference_power_bound(n_interference, snr, L, alpha).p_i
    return snr, L, p_i


@lru_cache(maxsize=4096)
def _chain(alpha, q, scheme, t_max, snr, L, n_interference):
    snr, L, p_i = stage_parameters(alpha, snr, L, n_interference)
    rates = [local_rate(snr, p_i)]
    collapsed = False
    while len(rates) < t_max:
        nxt = relay_rate(q * rates[-1], 1.0 + p_i, snr, scheme)
        if nxt <= 0.0:
            collapsed = True
            rates.extend([0.0] * (t_max - len(rates)))
            break
        rates.append(nxt)
    return tuple(rates), snr, L, p_i, collapsed


def rate_sequence(alpha, q, relay_scheme="qmf", t_max=10, snr=None, L=None,
                  n_interference=DEFAULT_INTERFERENCE_N):
    """Evaluate ``R(1) .. R(t_max)``.

    Parameters
    ----------
    alpha : float
        Pathloss exponent.
    q : int
        Time-expansion factor of the cooperative-reception phase.
    relay_scheme : {'qmf', 'qf', 'cutset'}
        'qmf' uses the bisection-optimal quantization level, 'qf' the
        noise-matched level, 'cutset' the cut-set upper bound.
    t_max : int
        Sequence length.
    snr, L : optional
        Overrides for the stage SNR and reuse factor (defaults: the
        single-stage optimum and its TIN reuse factor).
    n_interference : int
        Network size used for the ring-bound interference budget.
    """
    scheme = _normalize_scheme(relay_scheme)
    if int(q) != q or q < 1:
        raise InvalidParameterError(f"q must be a positive integer, got {q!r}")
    if t_max < 1:
        raise InvalidParameterError("t_max must be >= 1")
    rates, snr, L, p_i, collapsed = _chain(
        float(alpha), int(q), scheme, int(t_max), snr, L, int(n_interference)
    )
    converged = len(rates) > 1 and abs(rates[-1] - rates[-2]) < 1e-9
    return CodingRateSequence(
        float(alpha), int(q), scheme, rates, snr, L, p_i, rates[-1], converged, collapsed
    )


def rate_fixed_point(alpha, q=2, relay_scheme="qmf", tol=1e-9, max_iter=10 ** 4, **overrides):
    """Limit ``R*(alpha, q)`` of the coding-rate recursion.

    Raises
    ------
    ConvergenceError
        If ``|R(t+1) - R(t)| >= tol`` after ``max_iter`` steps; the last
        iterate is attached.
    """
    if tol <= 0:
        raise InvalidParameterError("tol must be positive")
    scheme = _normalize_scheme(relay_scheme)
    snr, L, p_i = stage_parameters(alpha, overrides.get("snr"), overrides.get("L"),
                                   overrides.get("n_interference", DEFAULT_INTERFERENCE_N))
    r = local_rate(snr, p_i)
    for _ in range(max_iter):
        nxt = relay_rate(q * r, 1.0 + p_i, snr, scheme)
        if abs(nxt - r) < tol:
            return nxt
        r = nxt
    raise ConvergenceError(
        f"coding-rate recursion did not converge in {max_iter} steps", last=r
    )


def coding_rate(alpha, relay_scheme="qmf"):
    """Stage-independent coding rate ``R_c(alpha) = R*(alpha, 2)``."""
    return rate_fixed_point(alpha, 2, relay_scheme)


def lemma1_bound_check(alpha, qs=(1, 2, 3), schemes=RELAY_SCHEMES):
    """Check that one relay hop never beats the local rate.

    Returns
    -------
    ok : bool
    margins : dict
        ``(q, scheme) -> R(1) - relay_rate(q R(1), 1 + P_I, SNR)``.
    """
    snr, L, p_i = stage_parameters(alpha)
    r1 = local_rate(snr, p_i)
    margins = {}
    for q in qs:
        for scheme in schemes:
            margins[(q, scheme)] = r1 - relay_rate(q * r1, 1.0 + p_i, snr, scheme)
    return all(m >= 0 for m in margins.values()), margins


def stage_gap(alpha, q, relay_scheme, t_max=10):
    """Rate loss ``R(1) - R(t)`` for ``t = 1 .. t_max``."""
    seq = rate_sequence(alpha, q, relay_scheme, t_max)
    return [seq.rates[0] - r for r in seq.rates]

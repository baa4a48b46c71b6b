import math

import mpmath as mp
import numpy as np
import pytest

from ratekit import mimo
from ratekit.exceptions import InvalidParameterError

# 50-digit evaluation of the textbook form 2 log2(1 + 2x/(1+s)) - log2(e) (s-1)^2/(4x)
C_ORACLE = {
    1.0: 0.83742335704256989,
    10.0: 2.7233264657365007,
    100.0: 5.4826068614018348,
    2032.0: 9.6096452063077162,
    1e-3: 0.0014412547453024636,
}
# scipy brentq on the branch gap in linear sigma (xtol 1e-15)
QMF_4_1_100 = (3.428385386125087, 3.630748512435997)
QF_4_1_100 = 2.999259007325115


def _c_mpmath(x):
    with mp.workdps(60):
        x = mp.mpf(x)
        s = mp.sqrt(1 + 4 * x)
        return float(2 * mp.log(1 + 2 * x / (1 + s), 2) - mp.log(mp.e, 2) * (s - 1) ** 2 / (4 * x))


@pytest.mark.parametrize("x,ref", sorted(C_ORACLE.items()))
def test_c_of_x_frozen(x, ref):
    assert mimo.c_of_x(x) == pytest.approx(ref, rel=1e-13)


@pytest.mark.parametrize("x", [1e-9, 1e-6, 0.37, 3.0, 1e5, 1e10, 1e15])
def test_c_of_x_mpmath(x):
    assert mimo.c_of_x(x) == pytest.approx(_c_mpmath(x), rel=1e-12)


def test_c_of_x_edges():
    assert mimo.c_of_x(0.0) == 0.0
    assert mimo.c_of_x(1e-14) == pytest.approx(1e-14 * math.log2(math.e), rel=1e-9)
    assert math.isinf(mimo.c_of_x(math.inf))
    np.testing.assert_allclose(mimo.c_of_x(np.array([1.0, 10.0])), [C_ORACLE[1.0], C_ORACLE[10.0]])
    with pytest.raises(InvalidParameterError):
        mimo.c_of_x(-1.0)


def test_c_of_beta_reduces_to_square_case():
    for snr in (0.5, 1.0, 100.0):
        assert mimo.c_of_beta(snr, 1.0) == mimo.c_of_x(snr)
        assert mimo.c_of_beta(snr, 1.0 - 1e-9) == pytest.approx(mimo.c_of_x(snr), abs=1e-6)
    assert mimo.c_of_beta(10.0, 0.0) == 0.0


def test_c_of_beta_against_monte_carlo():
    g = np.random.default_rng(1)
    for snr, beta in [(1.0, 0.25), (10.0, 0.5), (100.0, 0.75)]:
        n, k = 300, int(beta * 300)
        vals = []
        for _ in range(10):
            h = (g.standard_normal((n, k)) + 1j * g.standard_normal((n, k))) / math.sqrt(2)
            vals.append(np.linalg.slogdet(np.eye(n) + snr / n * h @ h.conj().T)[1] / math.log(2) / n)
        assert mimo.c_of_beta(snr, beta) == pytest.approx(np.mean(vals), rel=0.01)


def test_cutset_asymptotic():
    assert mimo.cutset_rate_asymptotic(mimo.QmfChannelSpec(1.0, 1.0, 100.0)) == 1.0
    assert mimo.cutset_rate_asymptotic(mimo.QmfChannelSpec(50.0, 2.0, 20.0)) == pytest.approx(mimo.c_of_x(10.0))


def test_optimal_quantization_oracle():
    spec = mimo.QmfChannelSpec(4.0, 1.0, 100.0)
    level, rate = mimo.optimal_quantization(spec, tol=1e-12)
    assert level.sigma_q2 == pytest.approx(QMF_4_1_100[0], rel=1e-9)
    assert rate == pytest.approx(QMF_4_1_100[1], abs=1e-10)
    assert level.sigma_min2 < level.sigma_q2 < level.sigma_max2
    b, m = mimo.qmf_branches(spec, level.sigma_q2)
    assert abs(b - m) < 1e-12


def test_qf_closed_form_oracle():
    spec = mimo.QmfChannelSpec(4.0, 1.0, 100.0)
    assert mimo.qf_rate_asymptotic(spec) == pytest.approx(QF_4_1_100, rel=1e-13)
    # QF sits exactly at sigma_max^2
    sigma_max = mimo.quantization_bounds(spec)[1]
    assert mimo.qmf_branches(spec, sigma_max)[1] == pytest.approx(QF_4_1_100, rel=1e-12)


def test_degenerate_backhaul():
    level, rate = mimo.optimal_quantization(mimo.QmfChannelSpec(0.0, 1.0, 10.0))
    assert level.degenerate and rate == 0.0
    assert mimo.qf_rate_asymptotic(mimo.QmfChannelSpec(0.0, 1.0, 10.0)) == 0.0


def test_huge_backhaul_approaches_mimo_capacity():
    spec = mimo.QmfChannelSpec(200.0, 1.0, 100.0)
    _, rate = mimo.optimal_quantization(spec)
    assert rate == pytest.approx(mimo.c_of_x(100.0), rel=1e-9)


def test_spec_validation():
    with pytest.raises(InvalidParameterError):
        mimo.QmfChannelSpec(-1.0, 1.0, 1.0)
    with pytest.raises(InvalidParameterError):
        mimo.QmfChannelSpec(1.0, 0.5, 1.0)
    with pytest.raises(InvalidParameterError):
        mimo.QmfChannelSpec(1.0, 1.0, 0.0)
    with pytest.raises(InvalidParameterError):
        mimo.qmf_rate_asymptotic(mimo.QmfChannelSpec(1.0, 1.0, 1.0), 0.0)


def test_finite_qmf_near_asymptotic():
    spec = mimo.QmfChannelSpec(4.0, 1.0, 100.0)
    level, rate = mimo.optimal_quantization(spec)
    vals = [mimo.qmf_rate_finite(mimo.FiniteChannelMatrix.sample(12, "uniform-phase", s),
                                 4.0, 1.0, 100.0, level.sigma_q2) for s in range(40)]
    assert np.mean(vals) == pytest.approx(rate, rel=0.02)


def test_finite_qmf_below_cutset():
    h = mimo.FiniteChannelMatrix.sample(8, "complex-gaussian", 3)
    q = mimo.qmf_rate_finite(h, 3.0, 1.0, 50.0, 2.0)
    assert q <= mimo.cutset_rate_finite(h, 3.0, 1.0, 50.0) + 1e-12


def test_finite_qmf_subset_extremes():
    h = mimo.FiniteChannelMatrix.sample(6, "uniform-phase", 0)
    # coarse quantization drowns the signal: the empty cut wins with rate ~ 0
    rate, subset = mimo.qmf_rate_finite(h, 0.01, 1.0, 10.0, 1e9, return_subset=True)
    assert subset == () and 0 < rate < 1e-7
    # fine quantization overdraws the backhaul: the full cut wins
    rate, subset = mimo.qmf_rate_finite(h, 0.01, 1.0, 10.0, 1.0, return_subset=True)
    assert subset == tuple(range(6)) and rate == pytest.approx(0.01 - 1.0)


def test_finite_qf_unit_modulus_matches_asymptotic():
    vals = [mimo.qf_rate_finite(mimo.FiniteChannelMatrix.sample(64, "uniform-phase", s), 4.0, 1.0, 100.0)
            for s in range(10)]
    assert np.mean(vals) == pytest.approx(QF_4_1_100, rel=0.02)


def test_subset_limit():
    with pytest.raises(InvalidParameterError):
        mimo.qmf_rate_finite(np.ones((21, 21)), 1.0, 1.0, 1.0, 1.0)


def test_logdet_montecarlo_seeded_and_worker_independent():
    a = mimo.logdet_montecarlo(32, 10.0, "complex-gaussian", trials=8, seed=5, workers=1)
    b = mimo.logdet_montecarlo(32, 10.0, "complex-gaussian", trials=8, seed=5, workers=4)
    assert a == b
    assert a == pytest.approx(C_ORACLE[10.0], rel=0.05)


def test_submodularity_and_concavity():
    h = mimo.FiniteChannelMatrix.sample(8, "uniform-phase", 2)
    assert mimo.submodularity_check(h, 10.0, trials=300)
    for snr in (0.1, 1.0, 100.0):
        assert mimo.beta_concavity_check(snr)


def test_submodularity_check_catches_supermodular_function(monkeypatch):
    # a strictly supermodular surrogate must be rejected
    monkeypatch.setattr(mimo, "_logdet_rows", lambda h, rows, snr: float(len(rows)) ** 2)
    assert not mimo.submodularity_check(np.ones((6, 6)), 1.0, trials=200)


@pytest.mark.parametrize("spec", [(3.1622776601683795, 464.15888336127773, 0.1),
                                  (0.03162277660168379, 10000.0, 1.291549665014884),
                                  (0.06812920690579612, 21.544346900318832, 0.1)])
def test_qmf_never_below_qf_near_sigma_max(spec):
    # optimum sits within 1e-7 of the QF level; the rate must not dip below QF
    s = mimo.QmfChannelSpec(*spec)
    level, rate = mimo.optimal_quantization(s)
    assert rate >= mimo.qf_rate_asymptotic(s)
    b, m = mimo.qmf_branches(s, level.sigma_q2)
    assert 0 <= b - m < 1e-9

import math

import numpy as np
import pytest

from ratekit import coding, core, multihop, report, schemes
from ratekit.exceptions import InfeasibleConfigurationError, InvalidParameterError


def _direct_m4(n, alpha, t, q, scheme):
    """Method-4 sum rate written out from scratch (general-q derivation form)."""
    snr = 2 ** (2 * (3 + alpha / math.log(2)))
    L = math.ceil(snr ** (1 / (2 * alpha)) + 1)
    rc = coding.rate_sequence(alpha, q, scheme, t + 1)[t + 1]
    den = (1 + t) * L ** (2 * t / (t + 1)) * ((1 + q) * q ** ((t - 1) / 2)) ** (t / (t + 1))
    return rc * n ** (t / (t + 1)) / den


def test_headline_method4():
    qmf = schemes.best_sum_rate("m4", 1e5, 7, "qmf")
    qf = schemes.best_sum_rate("m4", 1e5, 7, "qf")
    assert (qmf.t_used, qmf.q_used, qf.t_used, qf.q_used) == (5, 1, 3, 1)
    assert qmf.sum_rate == pytest.approx(_direct_m4(1e5, 7, 5, 1, "qmf"), rel=1e-12)
    assert qf.sum_rate == pytest.approx(_direct_m4(1e5, 7, 3, 1, "qf"), rel=1e-12)
    assert qmf.sum_rate == pytest.approx(678.8298184, rel=1e-8)
    assert qf.sum_rate == pytest.approx(433.0626, rel=1e-5)


def test_sum_rate_identity():
    b = schemes.hier_sum_rate("m2", 1e4, 7, 2, 1)
    assert b.sum_rate == b.coding_rate * b.packet_throughput


def test_single_stage_example():
    b = schemes.single_stage_sum_rate(10 ** 4, 7)
    assert b.L == 5
    assert b.packet_throughput == pytest.approx(100 / (2 * math.sqrt(2) * 5), rel=1e-14)
    assert b.coding_rate == pytest.approx(core.local_rate(b.snr, b.extra["p_i"]))


def test_single_stage_cluster_boundary():
    L, q = 5, 1
    n = L * L * (1 + q)
    b = schemes.single_stage_sum_rate(n, 7, L=L, q=q)
    assert b.cluster_sizes[0] == pytest.approx(1.0)
    with pytest.raises(InfeasibleConfigurationError):
        schemes.single_stage_sum_rate(n - 1, 7, L=L, q=q)


def test_approx_sum_rate():
    expected = 7 * 100 / ((2 * math.sqrt(2) * math.log(2)) * 2 ** (3 / 7 + 1 / math.log(2)))
    assert schemes.approx_sum_rate(10 ** 4, 7) == pytest.approx(expected, rel=1e-14)
    assert schemes.approx_sum_rate(4 * 10 ** 4, 7) == pytest.approx(2 * expected, rel=1e-14)


def test_approx_overestimates_by_dropping_the_unit_in_L():
    # the closed form uses L ~ snr^(1/2a) without the +1 and ceiling
    ratios = [schemes.approx_sum_rate(10 ** 4, a) / schemes.single_stage_sum_rate(10 ** 4, a).sum_rate
              for a in np.arange(3, 11.01, 0.25)]
    assert 1.2 <= min(ratios) and max(ratios) <= 1.35


def test_penalty_exponents_match_written_denominators():
    n, L, q = 1e5, 5, 2
    for t in range(1, 7):
        base = n ** (t / (t + 1))
        dens = {
            "m1": (1 + t) * (L * math.sqrt(1 + q)) ** t,
            "m2": (1 + t) * L ** (2 * t / (t + 1)) * (1 + q) ** (t / 2),
            "m3": (t + 1) * L ** t * ((1 + q) * q ** ((t - 1) / 2)) ** (t / (t + 1)),
            "m4": (1 + t) * L ** (2 * t / (t + 1)) * ((1 + q) * q ** ((t - 1) / 2)) ** (t / (t + 1)),
        }
        for m, den in dens.items():
            assert schemes.packet_throughput(m, n, t, q, L) == pytest.approx(base / den, rel=1e-13)


def test_theorem3_constants_differ_by_power_of_three():
    for t in range(2, 6):
        for m in ("m3", "m4"):
            d = schemes.packet_throughput(m, 1e5, t, 2, 5, "derivation")
            th = schemes.packet_throughput(m, 1e5, t, 2, 5, "theorem3")
            assert th / d == pytest.approx(3 ** (t / (2 * (t + 1))), rel=1e-13)


def test_method1_one_stage_is_single_stage_throughput():
    for n in (1e3, 1e4):
        hier = schemes.hier_sum_rate("m1", n, 7, 1, 1, coding_rate=1.0)
        single = schemes.single_stage_sum_rate(int(n), 7)
        assert hier.packet_throughput == pytest.approx(single.packet_throughput, rel=1e-14)


@pytest.mark.parametrize("alpha", [3, 7])
@pytest.mark.parametrize("t", range(2, 6))
def test_fixed_t_ordering(alpha, t):
    r = {m: schemes.hier_sum_rate(m, 1e5, alpha, t, 2, check_feasible=False).sum_rate
         for m in schemes.HIER_METHODS}
    assert r["m4"] >= r["m2"] >= r["m3"] >= r["m1"]


def test_top_cluster_is_t_plus_one_times_throughput():
    for m in schemes.HIER_METHODS:
        chain = schemes.cluster_chain(m, 1e5, 3, 1, 5)
        assert chain[0] == pytest.approx(4 * schemes.packet_throughput(m, 1e5, 3, 1, 5))
        assert len(chain) == 3


def test_infeasible_chain_reported():
    with pytest.raises(InfeasibleConfigurationError):
        schemes.hier_sum_rate("m3", 1e4, 7, 4, 1)
    b = schemes.hier_sum_rate("m3", 1e4, 7, 4, 1, check_feasible=False)
    assert min(b.cluster_sizes) < 1


def test_literal_nmac_cluster_size_is_infeasible():
    assert schemes.nmac_literal_cluster_size(1e4, 3, 1, 5) > 1e4
    assert schemes.cluster_chain("m3", 1e4, 3, 1, 5)[0] < 1e4


def test_slot_budget_base_cases():
    assert schemes.slot_budget("m2", 100, 1, 4, 2).f_t == 16 * 100 ** 2
    assert schemes.slot_budget("m4", 100, 1, 4, 2).f_t == 16 * 100 ** 2
    assert schemes.slot_budget("m3", 100, 1, 4, 2).f_t == 100 ** 2
    for m in ("m2", "m3", "m4"):
        assert schemes.slot_budget_recursive(m, 100, 1, 4, 2).f_t == schemes.slot_budget(m, 100, 1, 4, 2).f_t


def test_slot_budget_m3_example():
    b = schemes.slot_budget_recursive("m3", 1e4, 2, 5, 2)
    assert b.f_t == pytest.approx(2 * 5 * 2 ** 0.5 * 1e4 ** 1.5, rel=1e-6)


@pytest.mark.parametrize("t", [2, 3, 4])
def test_slot_budget_m2_cluster_size(t):
    closed = schemes.slot_budget("m2", 1e5, t, 4, 1)
    num = schemes.slot_budget_recursive("m2", 1e5, t, 4, 1)
    assert num.f_t == pytest.approx(closed.f_t, rel=1e-6)
    m_closed = 1e5 ** ((t - 1) / t) / 2 ** ((t - 1) / 2)
    assert num.cluster_sizes[0] == pytest.approx(m_closed, rel=1e-3)
    assert closed.cluster_sizes[0] == pytest.approx(m_closed, rel=1e-12)


@pytest.mark.parametrize("q", [1, 2])
def test_slot_budget_m4_below_m2(q):
    for t in range(2, 6):
        assert schemes.slot_budget("m4", 1e4, t, 5, q).f_t <= schemes.slot_budget("m2", 1e4, t, 5, q).f_t


def test_slot_budget_phases_add_up():
    b = schemes.slot_budget("m2", 1e4, 3, 5, 1)
    assert b.phases["long-range"] + b.phases["local"] == pytest.approx(b.f_t)


def test_slot_budget_validation():
    with pytest.raises(InvalidParameterError):
        schemes.slot_budget_recursive("m2", 1e4, 9, 5, 1)
    with pytest.raises(InvalidParameterError):
        schemes.slot_budget("m1", 1e4, 2, 5, 1)


def test_closed_form_stage_count():
    t_real, t_int = schemes.optimal_stage_count_method2(1e7, 5)
    assert t_real == pytest.approx(3.309, abs=1e-3) and t_int == 3
    vals = [schemes.optimal_stage_count_method2(n, 5)[0] for n in np.logspace(1, 8, 30)]
    assert np.all(np.diff(vals) > 0)
    with pytest.raises(InvalidParameterError):
        schemes.optimal_stage_count_method2(5, 5)


def test_stage_search_small_network():
    for m in schemes.HIER_METHODS:
        assert schemes.optimal_stage_count_search(m, 100, 7) == 1


def test_stage_search_staircase():
    ns = report.FIGURE_SPECS["fig5"].x_values
    for m in schemes.HIER_METHODS:
        ts = [schemes.optimal_stage_count_search(m, n, 7) for n in ns]
        assert np.all(np.diff(ts) >= 0)


def test_small_network_degenerates_to_one_stage():
    single = schemes.single_stage_sum_rate(100, 7).sum_rate
    for m in schemes.HIER_METHODS:
        b = schemes.best_sum_rate(m, 100, 7)
        assert b.t_used == 1
        # the one-stage scheme still pays one relay hop in its coding rate
        assert 0.8 * single <= b.sum_rate <= single


def test_rate_index_local_uses_top_stage_rate():
    b = schemes.hier_sum_rate("m1", 1e4, 7, 1, 1, rate_index="local")
    assert b.sum_rate == pytest.approx(schemes.single_stage_sum_rate(10 ** 4, 7).sum_rate)


def test_best_q_is_one_up_to_1e5():
    for alpha in (4, 7):
        for n in report.FIGURE_SPECS["fig9"].x_values:
            for m in schemes.HIER_METHODS:
                assert schemes.best_sum_rate(m, n, alpha).q_used == 1


def test_sum_rate_unimodal_in_t():
    for alpha in (3, 7):
        for n in (1e3, 1e5, 1e7):
            for m in schemes.HIER_METHODS:
                r = np.array([schemes.hier_sum_rate(m, n, alpha, t, 1, check_feasible=False).sum_rate
                              for t in range(1, 13)])
                d = np.sign(np.diff(r))
                first_down = np.argmax(d < 0) if np.any(d < 0) else d.size
                assert not np.any(d[first_down:] > 0)


def test_tie_break_prefers_fewer_stages():
    # with coding rate independent of t, t=1 of m2 and m4 coincide; pick smaller q on ties
    b = schemes.best_sum_rate("m2", 100, 7, qs=(1, 1))
    assert b.q_used == 1 and b.t_used == 1


def test_original_hc_baseline():
    for n in (1e3, 1e4, 1e5):
        base = schemes.original_hc_baseline(n, 7)
        assert base.L == 3 and base.q_used == 1 and base.relay_scheme == "qf"
        assert base.sum_rate <= schemes.best_sum_rate("m1", n, 7).sum_rate
        assert base.sum_rate <= 1.5 * multihop.multihop_sum_rate_lower(n, 7).sum_rate
    assert not core.tin_condition_holds(core.optimal_snr_single_stage(7), 3, 7)[0]


def test_scheme_config_validation_and_evaluate():
    with pytest.raises(InvalidParameterError):
        schemes.SchemeConfig(n=2, alpha=7)
    with pytest.raises(InvalidParameterError):
        schemes.SchemeConfig(n=100, alpha=7, method="m5")
    with pytest.raises(InvalidParameterError):
        schemes.SchemeConfig(n=100, alpha=7, t=0)
    cfg = schemes.SchemeConfig(n=10 ** 5, alpha=7, method="m4")
    assert schemes.evaluate(cfg).sum_rate == schemes.best_sum_rate("m4", 1e5, 7).sum_rate
    fixed = schemes.SchemeConfig(n=10 ** 5, alpha=7, method="m2", t=2, q=1)
    assert schemes.evaluate(fixed).t_used == 2
    assert schemes.evaluate(schemes.SchemeConfig(n=10 ** 4, alpha=7, method="multihop")).sum_rate == \
        pytest.approx(25.2695415360035, rel=1e-12)

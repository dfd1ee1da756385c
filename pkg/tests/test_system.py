import math
import warnings
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rffso.channels import InterferenceParams, RfLinkParams
from rffso.errors import ParameterError
from rffso.presets import IRR_TO_EPSILON_3DEG, baseline
from rffso.system import (
    IqiParams,
    McConfig,
    RunningMoments,
    db_to_lin,
    epsilon_for_irr,
    iqi_coefficients,
    irr_from_mismatch,
    lin_to_db,
    mc_asr,
    mc_direction_cdfs,
    mc_outage,
    sample_sinrs,
    scenario_seed,
    sinr_node1,
    sinr_node2,
)

SMALL = McConfig(trials=20_000, seed=5)


class TestIqi:
    def test_ideal_front_end(self):
        c = iqi_coefficients(IqiParams(), "tx")
        assert c.k1 == 1 and c.k2 == 0 and math.isinf(c.irr)

    @pytest.mark.parametrize("irr_db, eps", sorted(IRR_TO_EPSILON_3DEG.items()))
    def test_stated_mismatch_pairs(self, irr_db, eps):
        c = iqi_coefficients(IqiParams.symmetric(eps, math.radians(3)), "tx")
        assert c.irr_db == pytest.approx(irr_db, abs=0.05)

    @given(st.floats(0.05, 3.0), st.floats(-0.6, 0.6), st.sampled_from(["tx", "rx"]))
    def test_k1_plus_conj_k2_is_one(self, eps, phi, side):
        c = iqi_coefficients(IqiParams(eps, phi, eps, phi), side)
        assert abs(c.k1 + c.k2.conjugate() - 1) < 1e-14

    @given(st.floats(0.05, 3.0))
    def test_power_sum_at_zero_phase(self, eps):
        c = iqi_coefficients(IqiParams.symmetric(eps, 0.0), "rx")
        assert abs(c.k1) ** 2 + abs(c.k2) ** 2 == pytest.approx(0.5 * (1 + eps**2), rel=1e-13)

    @given(st.floats(2.0, 1e4), st.floats(0.001, 0.3), st.booleans())
    def test_epsilon_inverts_irr(self, irr, phi, upper):
        if irr_from_mismatch(1.0, phi) < irr:
            with pytest.raises(ParameterError):
                epsilon_for_irr(irr, phi, upper)
            return
        eps = epsilon_for_irr(irr, phi, upper)
        assert (eps >= 1) == upper or eps == pytest.approx(1.0)
        assert irr_from_mismatch(eps, phi) == pytest.approx(irr, rel=1e-8)

    def test_bad_side(self):
        with pytest.raises(ParameterError):
            iqi_coefficients(IqiParams(), "both")

    def test_db_round_trip(self):
        assert lin_to_db(db_to_lin(13.0)) == pytest.approx(13.0)


class TestSinr:
    def test_node1_value(self):
        assert sinr_node1(10.0, 1.0, 10.0) == pytest.approx(10 / 2.1)

    def test_node2_value(self):
        assert sinr_node2(20.0, 2.0, 10.0, 0.9) == pytest.approx(1 / (0.1 + 2 / 18))

    def test_limits(self):
        assert sinr_node1(1e12, 0.0, 10.0) == pytest.approx(10.0)
        assert sinr_node1(7.0, 2.0, math.inf) == pytest.approx(3.5)
        assert sinr_node2(5.0, 0.0, 10.0, 0.9) == pytest.approx(10.0)
        assert sinr_node2(20.0, 2.0, math.inf, 0.9) == pytest.approx(9.0)
        assert sinr_node2(0.0, 1.0, 10.0, 0.9) == 0.0

    @given(st.floats(0, 1e6), st.floats(0, 1e3), st.floats(1.01, 1e4), st.floats(0.1, 2.0))
    def test_ceilings(self, gf, gi, irr, k1):
        assert sinr_node1(gf, gi, irr) <= irr * (1 + 1e-12)
        assert sinr_node2(gf, gi, irr, k1) <= irr * (1 + 1e-12)

    def test_vectorized(self):
        out = sinr_node1(np.array([1.0, 10.0]), np.array([1.0, 1.0]), 10.0)
        assert out.shape == (2,)


def quiet(fn, *a, **k):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return fn(*a, **k)


class TestMonteCarlo:
    def test_ideal_hardware_small_threshold(self):
        sc = baseline(irr_db=None, n_interferers=0)
        sc = replace(sc, threshold=1e-9)
        p, _ = mc_outage(sc, SMALL)
        assert p == 0.0

    def test_threshold_above_ceiling_saturates(self):
        sc = quiet(replace, baseline(irr_db=10), threshold=100.0)
        p, se = mc_outage(sc, SMALL)
        assert p == 1.0 and se == 0.0

    def test_threshold_warning(self):
        with pytest.warns(UserWarning, match="IRR ceiling"):
            replace(baseline(irr_db=10), threshold=100.0)

    def test_zero_snr_rate_vanishes(self):
        sc = baseline(snr_db=-90)
        r, _ = mc_asr(sc, SMALL)
        assert r < 1e-6

    def test_high_snr_rate_reaches_ceiling(self):
        sc = baseline(snr_db=120, irr_db=10)
        r, _ = mc_asr(sc, SMALL)
        ceiling = 0.5 * math.log2(1 + sc.rx.irr) + 0.5 * math.log2(1 + sc.tx.irr)
        assert r == pytest.approx(ceiling, rel=1e-3)
        assert r < ceiling

    def test_deterministic(self):
        sc = baseline(snr_db=15)
        seed = scenario_seed(3, "det")
        assert mc_outage(sc, SMALL, seed) == mc_outage(sc, SMALL, scenario_seed(3, "det"))
        assert mc_asr(sc, SMALL, seed) == mc_asr(sc, SMALL, scenario_seed(3, "det"))

    def test_workers_do_not_change_result(self):
        sc = baseline(snr_db=15)
        a = mc_outage(sc, replace(SMALL, shards=4, workers=1, batch=3000))
        b = mc_outage(sc, replace(SMALL, shards=4, workers=4, batch=3000))
        assert a == b

    def test_seed_ids_are_distinct(self):
        a = scenario_seed(1, "x").generate_state(2)
        b = scenario_seed(1, "y").generate_state(2)
        assert not np.array_equal(a, b)

    def test_batching_preserves_estimate(self):
        sc = baseline(snr_db=15)
        p1, _ = mc_outage(sc, replace(SMALL, batch=SMALL.trials))
        p2, _ = mc_outage(sc, replace(SMALL, batch=999))
        # batch boundaries change how variates interleave in the stream: statistical agreement only
        assert abs(p1 - p2) < 5 * math.sqrt(p1 * (1 - p1) / SMALL.trials)

    def test_monotone_in_threshold_and_inr_and_snr(self):
        base = baseline(snr_db=12)
        p = lambda sc: mc_outage(sc, SMALL, scenario_seed(9, "crn"))[0]
        ths = [p(replace(base, threshold=t)) for t in (0.5, 1.0, 2.0)]
        inrs = [p(replace(base, interference=InterferenceParams(2, 2.3, x))) for x in (0.3, 0.6, 1.0)]
        snrs = [p(baseline(snr_db=s)) for s in (8, 12, 16)]
        assert ths == sorted(ths) and inrs == sorted(inrs) and snrs == sorted(snrs, reverse=True)

    def test_receiver_irr_monotone(self):
        p = lambda phi: mc_outage(
            replace(baseline(snr_db=12), iqi=IqiParams(1.0, 0.0, 1.0, phi)), SMALL,
            scenario_seed(9, "irr"))[0]
        vals = [p(math.radians(d)) for d in (30, 15, 5)]  # increasing IRR
        assert vals == sorted(vals, reverse=True)

    def test_direction_cdfs_bound_outage(self):
        sc = baseline(snr_db=12)
        f1, f2 = mc_direction_cdfs(sc, SMALL, scenario_seed(1, "d"))
        p, _ = mc_outage(sc, SMALL, scenario_seed(1, "d"))
        assert max(f1, f2) <= p <= f1 + f2

    def test_shared_interference_option(self):
        sc = baseline(snr_db=12)
        s1, s2 = sample_sinrs(sc, np.random.default_rng(0), 1000, shared_interference=True)
        assert s1.shape == s2.shape == (1000,)

    def test_config_validation(self):
        with pytest.raises(ParameterError):
            McConfig(trials=0)


@given(st.lists(st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=30), min_size=1, max_size=6))
def test_running_moments_match_numpy(chunks):
    acc = RunningMoments()
    for c in chunks:
        acc.push(c)
    flat = np.concatenate([np.asarray(c) for c in chunks])
    assert acc.n == flat.size
    assert acc.mean == pytest.approx(flat.mean(), rel=1e-9, abs=1e-9)
    if flat.size > 1:
        se = flat.std(ddof=1) / math.sqrt(flat.size)
        assert acc.stderr == pytest.approx(se, rel=1e-7, abs=1e-9)


def test_rf_param_guard():
    with pytest.raises(ParameterError):
        RfLinkParams(1.0, 1.0, 0.0)

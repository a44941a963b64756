import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from manytoone import (
    Certificate,
    StandardChannel,
    check_t1,
    check_t2_t4,
    check_t5,
    check_t6,
    check_t7,
    check_t8,
    recommend,
    rho_for_gap,
    sum_rate_mac_subset,
    sum_rate_mi_k,
    t3_gap,
    t6_gap,
)
from manytoone.channel import ChannelError
from manytoone.optimality import GapReport, applicable_certificates, best_strategy, t8_conditions, tightest_t3
from manytoone.serialization import dumps, loads

from conftest import ch3

EPS = 1e-9


def random_t5_channel(rng, K):
    return StandardChannel(K, rng.uniform(-1, 1, K - 1).tolist(), np.exp(rng.uniform(-4, 5, K)).tolist())


class TestT1:
    def test_boundary(self):
        c = check_t1(ch3(0.6, 0.8))
        assert c.holds and c.conditions[0].margin == pytest.approx(0, abs=1e-15)

    def test_inside(self):
        assert check_t1(ch3(0.5, 0.5)).holds

    # a = 1 +- 1e-9 moves a^2 by 2e-9, beyond the 1e-9 tolerance
    @pytest.mark.parametrize("a, holds", [(1 - 1e-9, True), (1.0, True), (1 + 1e-9, False), (1 + 4e-10, True), (1.2, False)])
    def test_z_channel(self, a, holds):
        c = check_t1(ch3(a, 0))
        assert c.conditions[0].lhs == a * a and c.conditions[0].rhs == 1
        assert c.holds is holds

    def test_requires_unit_noise(self):
        with pytest.raises(ChannelError):
            check_t1(StandardChannel(3, [0, 0], [1, 1, 1], [1, 2, 1]))


class TestT2T4:
    def test_threshold(self):
        # 1.36^2 / 0.64
        assert check_t2_t4(ch3(1.8, 0.6), 2).conditions[0].rhs == pytest.approx(2.89, abs=1e-12)
        assert check_t2_t4(ch3(1.8, 0.6), 2).holds
        assert not check_t2_t4(ch3(1.6, 0.6), 2).holds

    def test_z_channel_threshold(self):
        for a, holds in [(1 - 1e-9, False), (1 - 4e-10, True), (1.0, True), (1 + 1e-9, True), (0.99, False)]:
            c = check_t2_t4(ch3(a, 0), 2)
            assert c.conditions[0].rhs == 1.0 and c.holds is holds

    def test_other_gain_unit_fails(self):
        c = check_t2_t4(ch3(100, 1.0), 2)
        assert not c.holds and math.isinf(c.conditions[0].rhs)

    def test_ids_and_witness(self):
        assert check_t2_t4(ch3(0, 2), 3).theorem_id == "T2"
        c = check_t2_t4(StandardChannel(4, [0.1, 3, 0.1], [1] * 4), 3)
        assert c.theorem_id == "T4" and c.witness == 3 and c.holds

    def test_index(self):
        with pytest.raises(IndexError):
            check_t2_t4(ch3(1, 1), 4)


class TestT3:
    def test_gap_vanishes(self):
        _, rep = t3_gap(ch3(5, 1.5), 1e-12)
        assert rep.gap_bits == pytest.approx(0, abs=1e-11)

    @pytest.mark.parametrize("delta", [0.5, 1.0])
    def test_gap_at_inverse(self, delta):
        rho2 = rho_for_gap(delta, 1.5, 1.0)
        assert rho2 == pytest.approx({0.5: 0.59091, 1.0: 0.8125}[delta], abs=5e-6)
        cert, rep = t3_gap(ch3(10, 1.5), rho2)
        assert rep.gap_bits == pytest.approx(delta, abs=1e-12)
        assert cert.gap_bits == rep.gap_bits and cert.variant == 1

    def test_region_conditions(self):
        cert, rep = t3_gap(ch3(4, 1.5), 0.59)
        lhs = [c.lhs for c in cert.conditions]
        assert lhs == [16, 2.25]
        assert cert.conditions[0].rhs == pytest.approx(3.25**2 / 0.59)
        assert not cert.holds
        assert rep.outer_bound_bits == pytest.approx(sum_rate_mac_subset(ch3(4, 1.5), {1, 2, 3}).sum_rate_bits + rep.gap_bits)

    def test_variant_two_swaps_roles(self):
        cert1, _ = t3_gap(ch3(6, 1.2, (1, 2, 3)), 0.5, 1)
        cert2, _ = t3_gap(ch3(1.2, 6, (1, 3, 2)), 0.5, 2)
        assert [c.lhs for c in cert1.conditions] == [c.lhs for c in cert2.conditions]
        assert cert1.gap_bits == pytest.approx(cert2.gap_bits)

    def test_rho2_range(self):
        for bad in (0.0, 1.0, -0.1):
            with pytest.raises(ValueError):
                t3_gap(ch3(3, 3), bad)

    def test_needs_three_users(self):
        with pytest.raises(ChannelError):
            t3_gap(StandardChannel(4, [1, 1, 1], [1] * 4), 0.5)

    def test_tightest(self):
        cert, rep = tightest_t3(ch3(10, 1.5))
        assert rep.rho2 == pytest.approx(3.25**2 / 100) and cert.holds
        assert tightest_t3(ch3(1, 1.5)) is None


class TestRhoForGap:
    def test_zero(self):
        assert rho_for_gap(0.0, 1.5, 1) == 0.0
        assert rho_for_gap(0.0, 0.1, 100) == 0.0

    def test_hand_value(self):
        assert rho_for_gap(0.5, 1.5, 1) == pytest.approx(1 / (2 - 1 / 3.25), abs=1e-15)

    def test_limit(self):
        assert rho_for_gap(60, 1.5, 1) == pytest.approx(1.0, abs=1e-15)
        assert rho_for_gap(1e6, 1.5, 1) == 1.0

    def test_negative(self):
        with pytest.raises(ValueError):
            rho_for_gap(-0.1, 1, 1)

    @given(st.floats(0.1, 5), st.floats(0.1, 100), st.floats(0, 5), st.floats(1e-3, 1))
    def test_increasing_in_delta(self, b, P3, d, step):
        assert rho_for_gap(d + step, b, P3) > rho_for_gap(d, b, P3)

    @given(st.floats(0.1, 5), st.floats(0.1, 100), st.floats(0.01, 5), st.floats(0.1, 10))
    def test_decreasing_in_p3(self, b, P3, d, more):
        # the closed form makes rho2 fall as b^2 P3 grows (see decision ledger)
        assert rho_for_gap(d, b, P3 + more) <= rho_for_gap(d, b, P3)

    @given(st.floats(0.1, 5), st.floats(0.1, 100), st.floats(0.01, 0.99))
    def test_inverse_consistency(self, b, P3, rho2):
        gap = t3_gap(ch3(20, b, (1, 1, P3)), rho2)[1].gap_bits
        assert rho_for_gap(gap, b, P3) == pytest.approx(rho2, abs=1e-9)


class TestT5T6:
    def test_t5_examples(self):
        assert check_t5(ch3(1, 1)).holds
        c = check_t5(ch3(0.5, 1.1))
        assert not c.holds and c.violations() == ["h_3^2 <= 1"]
        assert check_t5(StandardChannel(5, [0] * 4, [1] * 5)).holds

    def test_t6_hand_value(self):
        rep = t6_gap(ch3(1, 1, (3, 1, 1)))
        assert rep.gap_bits == pytest.approx(0.5 * math.log2(1 + 1 / 4), abs=1e-12)
        assert rep.gap_bits == pytest.approx(0.16096, abs=5e-6)

    def test_t6_zero_gains(self):
        assert t6_gap(StandardChannel(6, [0] * 5, [2] * 6)).gap_bits == 0

    def test_t6_outside_region(self):
        with pytest.raises(ChannelError, match="h_3"):
            t6_gap(ch3(0.5, 1.1))

    @pytest.mark.parametrize("K", [3, 4, 5, 8])
    def test_t6_strictly_below_bound(self, K, rng):
        for _ in range(300):
            rep = t6_gap(random_t5_channel(rng, K))
            assert 0 <= rep.gap_bits < K / 2 - 1
            assert rep.outer_bound_bits - rep.achievable_bits == pytest.approx(rep.gap_bits, abs=1e-9)

    @pytest.mark.parametrize("K", [3, 4, 5])
    def test_outer_bound_dominates_xc_strategies(self, K, rng):
        for _ in range(200):
            ch = random_t5_channel(rng, K)
            outer = t6_gap(ch).outer_bound_bits
            assert outer >= best_strategy(ch, "XC").sum_rate_bits - 1e-9

    def test_check_t6_carries_gap(self):
        c = check_t6(ch3(1, 1, (3, 1, 1)))
        assert c.holds and c.theorem_id == "T6" and c.gap_bits == pytest.approx(0.16096, abs=5e-6)


class TestT7:
    def test_witness(self):
        c = check_t7(ch3(3, 2), {2, 3})
        assert c.holds and c.witness == (2, 3)

    @given(st.floats(0, 4), st.floats(0, 2), st.floats(0, 5), st.floats(0, 5))
    def test_single_decoded_table_condition(self, a, b, P1, P3):
        ch = ch3(a, b, (P1, 1, P3))
        expected = a * a >= 1 + P1 + b * b * P3 - EPS and b * b <= 1 + EPS
        assert check_t7(ch, {2}).holds is expected

    @given(st.floats(-3, 3), st.floats(-3, 3))
    def test_empty_set_is_t1(self, a, b):
        t1, t7 = check_t1(ch3(a, b)), check_t7(ch3(a, b), ())
        assert t7.to_dict() == {**t1.to_dict(), "theorem_id": "T7"}

    def test_infeasible_reports_sorted_stages(self):
        c = check_t7(ch3(1, 1), {2, 3})
        assert not c.holds and c.witness is None and len(c.conditions) == 3


class TestT8:
    @given(st.floats(0, 3), st.floats(0, 1.2), st.floats(0.05, 5), st.floats(0.05, 5))
    def test_identity_order_conditions(self, a, b, P2, P3):
        ch = ch3(a, b, (1, P2, P3))
        conds = t8_conditions(ch, (2, 3))
        assert conds[0].rhs == pytest.approx((1 + b * b * P3) * (1 + 1 / P2))
        assert conds[1].lhs == b * b and conds[1].rhs == 1

    def test_bound_value(self):
        assert t8_conditions(ch3(2, 1, (1, 2, 2)), (2, 3))[0].rhs == pytest.approx(4.5)

    def test_zero_gains(self):
        cert, rep = check_t8(StandardChannel(4, [0, 0, 0], [1, 2, 3, 4]))
        assert cert.holds and rep.gap_bits == 0

    def test_contains_t5(self, rng):
        for _ in range(500):
            ch = random_t5_channel(rng, int(rng.integers(3, 6)))
            assert check_t8(ch)[0].holds

    def test_strictly_larger_than_t5(self):
        ch = ch3(1.5, 0.5, (2, 2, 2))
        assert check_t8(ch)[0].holds and not check_t5(ch).holds

    def test_gap_within_bound(self, rng):
        for _ in range(300):
            K = int(rng.integers(3, 6))
            ch = StandardChannel(K, rng.uniform(0, 2.5, K - 1).tolist(), np.exp(rng.uniform(-2, 3, K)).tolist())
            cert, rep = check_t8(ch)
            if cert.holds:
                assert rep.gap_bits < K / 2 - 1
                assert all(c.satisfied for c in t8_conditions(ch, cert.witness))


class TestCertificates:
    @given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0, 5), st.floats(0, 5))
    def test_holds_iff_margins(self, a, b, P2, P3):
        ch = ch3(a, b, (1, P2, P3))
        certs = [check_t1(ch), check_t2_t4(ch, 2), check_t2_t4(ch, 3), check_t5(ch), check_t7(ch, {2}), check_t7(ch, {2, 3}), check_t8(ch)[0]]
        for c in certs:
            assert c.holds == all(cond.satisfied for cond in c.conditions)
            for cond in c.conditions:
                if "<" in cond.description and "<=" not in cond.description:
                    assert cond.satisfied == (cond.margin > EPS)
                else:
                    assert cond.satisfied == (cond.margin >= -EPS)

    def test_gap_presence(self):
        ch = ch3(0.5, 0.5)
        assert check_t1(ch).gap_bits is None and check_t7(ch, {2}).gap_bits is None
        assert check_t2_t4(ch, 2).gap_bits is None
        assert check_t6(ch).gap_bits is not None and check_t8(ch)[0].gap_bits is not None
        assert t3_gap(ch, 0.5)[0].gap_bits is not None

    @pytest.mark.parametrize("cert", [check_t1(ch3(0.6, 0.8)), check_t7(ch3(3, 2), {2, 3}), check_t8(ch3(1, 1))[0], check_t2_t4(ch3(3, 1), 2)])
    def test_json_round_trip(self, cert):
        back = Certificate.from_dict(loads(dumps(cert)))
        assert dumps(back) == dumps(cert)
        assert back.holds == cert.holds and back.witness == cert.witness

    def test_gap_report_round_trip(self):
        _, rep = t3_gap(ch3(10, 1.5), 0.5)
        assert dumps(GapReport.from_dict(loads(dumps(rep)))) == dumps(rep)

    def test_disjointness_sweep(self, rng):
        for _ in range(10**4):
            a, b = rng.uniform(0, 3, 2)
            ch = ch3(a, b, np.exp(rng.uniform(-3, 3, 3)))
            assert not (check_t1(ch).holds and (check_t2_t4(ch, 2).holds or check_t2_t4(ch, 3).holds))


class TestRecommend:
    def test_noisy_interference(self):
        rec = recommend(ch3(0.5, 0.5), "XC")
        assert rec.report.strategy.label == "M1" and rec.certificate.theorem_id == "T1"
        assert len(rec.candidates) == 4
        assert rec.report.sum_rate_bits == max(c.sum_rate_bits for c in rec.candidates)

    def test_mac_partner(self):
        rec = recommend(ch3(2, 0.6), "XC")
        assert rec.report.strategy.label == "M2:2" and rec.certificate.theorem_id == "T2"
        assert rec.certificate.witness == 2

    @pytest.mark.parametrize("mode, label", [("XC", "M1"), ("IC", "MI1")])
    def test_no_interference(self, mode, label):
        rec = recommend(ch3(0, 0), mode)
        assert rec.report.strategy.label == label
        assert rec.report.sum_rate_bits == pytest.approx(1.5) and rec.certificate.theorem_id == "T1"

    def test_ic_cancellation(self):
        rec = recommend(ch3(3, 2), "IC")
        assert rec.report.strategy.label == "MI3:2,3@2,3"
        assert rec.certificate.theorem_id == "T7" and rec.certificate.witness == (2, 3)
        assert rec.report.sum_rate_bits == sum_rate_mi_k(ch3(3, 2), {2, 3}).sum_rate_bits

    def test_gap_certificate_fallback(self):
        rec = recommend(ch3(10, 1.5), "XC")
        assert rec.report.strategy.label == "M3:2,3"
        assert rec.certificate.theorem_id == "T3" and rec.outer_bound_bits > rec.report.sum_rate_bits

    def test_tie_goes_to_smaller_set(self):
        # zero-power interferers never change the rate
        rec = recommend(StandardChannel(3, [5, 5], [1, 0, 0]), "IC")
        assert rec.report.strategy.label == "MI1"

    def test_enumeration_cap(self):
        with pytest.raises(ChannelError, match="enumeration cap"):
            recommend(StandardChannel(13, [0] * 12, [1] * 13))

    def test_mode(self):
        with pytest.raises(ValueError):
            recommend(ch3(1, 1), "XY")

    def test_deterministic(self):
        assert dumps(recommend(ch3(1.3, 2.2), "IC")) == dumps(recommend(ch3(1.3, 2.2), "IC"))

    def test_applicable(self):
        from manytoone import StrategySpec

        ids = [c.theorem_id for c in applicable_certificates(ch3(0.5, 0.5), StrategySpec.xc({1}))]
        assert ids == ["T1", "T5", "T6"]
        ids = [c.theorem_id for c in applicable_certificates(ch3(0.5, 0.5), StrategySpec.ic((2,)))]
        assert ids == ["T7"]

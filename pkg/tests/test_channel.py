import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from manytoone import RawChannel, StandardChannel, StrategySpec, degraded_at_rx1, to_standard_form, validate
from manytoone.channel import ChannelError, channel_from_dict, load_channel, parse_strategy

gain = st.floats(-5, 5, allow_nan=False)
power = st.floats(0, 50, allow_nan=False)


class TestStandardForm:
    def test_two_user_substitution(self):
        ch = to_standard_form(RawChannel(2, [1, 4], [2], [1, 1], [1, 1]))
        assert ch.h == (0.5,)
        assert ch.P == (1.0, 16.0)
        assert ch.unit_noise

    def test_identity_case(self):
        ch = to_standard_form(RawChannel(3, [1, 1, 1], [0.3, 1.7], [2, 3, 4]))
        assert ch.h == (0.3, 1.7)
        assert ch.P == (2.0, 3.0, 4.0)

    def test_three_user_hand_values(self):
        ch = to_standard_form(RawChannel(3, [2, 2, 0.5], [1, 1], [1, 1, 4]))
        assert ch.h == pytest.approx((0.5, 2.0), abs=1e-15)
        assert ch.P == pytest.approx((4.0, 4.0, 1.0), abs=1e-15)

    def test_noise_folded_into_gains_and_powers(self):
        ch = to_standard_form(RawChannel(2, [1, 1], [1], [1, 1], [4, 1]))
        assert ch.h == pytest.approx((0.5,))
        assert ch.P == pytest.approx((0.25, 1.0))
        assert ch.sigma2 == (1.0, 1.0)

    def test_rejects_zero_direct_gain(self):
        with pytest.raises(ChannelError, match="direct gain at index 2"):
            to_standard_form(RawChannel(2, [1, 0], [1], [1, 1]))

    def test_rejects_nonpositive_noise(self):
        with pytest.raises(ChannelError, match="noise"):
            to_standard_form(RawChannel(2, [1, 1], [1], [1, 1], [1, 0]))

    def test_rejects_negative_power(self):
        with pytest.raises(ChannelError, match="negative power"):
            to_standard_form(RawChannel(2, [1, 1], [1], [1, -1]))

    @given(st.lists(gain, min_size=2, max_size=5), st.lists(power, min_size=3, max_size=6))
    def test_idempotent_on_standard_channels(self, h, P):
        K = len(h) + 1
        P = (P * K)[:K]
        raw = RawChannel(K, [1.0] * K, h, P)
        ch = to_standard_form(raw)
        again = to_standard_form(RawChannel(K, [1.0] * K, ch.h, ch.P))
        assert again == ch

    @given(
        st.lists(st.floats(0.1, 5), min_size=3, max_size=3),
        st.lists(st.floats(-5, 5), min_size=2, max_size=2),
        st.floats(0.1, 10).flatmap(lambda c: st.sampled_from([c, -c])),
    )
    def test_ratio_invariance(self, direct, cross, c):
        base = to_standard_form(RawChannel(3, direct, cross, [1, 1, 1]))
        # receiver-1 row and the direct gains scaled together
        scaled = to_standard_form(RawChannel(3, [direct[0], *(c * d for d in direct[1:])], [c * x for x in cross], [1, 1, 1]))
        assert scaled.h == pytest.approx(base.h, rel=1e-12, abs=1e-15)


class TestValidate:
    def test_valid_channel(self):
        assert validate(StandardChannel(3, [0.5, 0.5], [1, 1, 1])).ok

    def test_negative_power(self):
        assert "negative power at index 2" in validate(StandardChannel(3, [0.5, 0.5], [1, -1, 1]))

    def test_dimension_mismatch(self):
        assert "dimension mismatch" in validate(StandardChannel(3, [0.5, 0.5, 0.1], [1, 1, 1]))


class TestDegraded:
    @pytest.mark.parametrize("h, expected, margin", [(0.5, True, 0.75), (1.0, True, 0.0), (2.0, False, -3.0)])
    def test_examples(self, h, expected, margin):
        ok, m = degraded_at_rx1(StandardChannel(2, [h], [1, 1]), 2)
        assert ok is expected
        assert m == pytest.approx(margin, abs=1e-15)

    def test_index_out_of_range(self):
        with pytest.raises(IndexError):
            degraded_at_rx1(StandardChannel(2, [1], [1, 1]), 3)

    @given(gain, st.floats(0, 1))
    def test_monotone_in_gain(self, h, shrink):
        ch = StandardChannel(2, [h], [1, 1])
        if degraded_at_rx1(ch, 2)[0]:
            assert degraded_at_rx1(ch.replace(h=[h * shrink]), 2)[0]

    @given(gain, power, st.floats(0.1, 4), st.floats(0.1, 4))
    def test_degraded_implies_capacity_ordering(self, h, P, s1, si):
        ch = StandardChannel(2, [h], [1, P], [s1, si])
        if degraded_at_rx1(ch, 2)[0] and h * h * si < s1:
            own = 0.5 * math.log2(1 + P / si)
            at_rx1 = 0.5 * math.log2(1 + h * h * P / s1)
            assert own >= at_rx1 - 1e-12


class TestStrategySyntax:
    @pytest.mark.parametrize(
        "text, mode, members, order",
        [
            ("M1", "XC", (1,), ()),
            ("M2:3", "XC", (1, 3), ()),
            ("M3", "XC", (1, 2, 3), ()),
            ("MAC:1,2", "XC", (1, 2), ()),
            ("MI1", "IC", (), ()),
            ("MI:2,3@3,2", "IC", (2, 3), (3, 2)),
            ("MI2:3", "IC", (3,), (3,)),
        ],
    )
    def test_parse(self, text, mode, members, order):
        spec = parse_strategy(text, 3)
        assert (spec.mode, spec.mac_set, spec.decoding_order) == (mode, members, order)

    @pytest.mark.parametrize("text", ["MAC:2,3", "M2", "MI:2@3", "Q", "M2:4", "MI:1"])
    def test_rejects(self, text):
        with pytest.raises((ChannelError, ValueError)):
            parse_strategy(text, 3)

    @pytest.mark.parametrize("spec", [StrategySpec.xc({1, 3}), StrategySpec.ic((2, 3), (3, 2)), StrategySpec.ic(())])
    def test_label_and_dict_round_trip(self, spec):
        assert parse_strategy(spec.label, 3) == spec
        assert StrategySpec.from_dict(json.loads(json.dumps(spec.to_dict()))) == spec


class TestJsonIngestion:
    def test_standard(self):
        ch = channel_from_dict({"form": "standard", "K": 3, "h": [0.5, 0.5], "P": [1, 1, 1]})
        assert ch == StandardChannel(3, [0.5, 0.5], [1, 1, 1])

    def test_raw(self):
        d = {"form": "raw", "K": 2, "P": [1, 1], "direct_gains": [1, 4], "cross_gains_to_rx1": [2], "noise_vars": [1, 1]}
        assert channel_from_dict(d).P == (1.0, 16.0)

    def test_unknown_key_named(self):
        with pytest.raises(ChannelError, match="^extra: unknown key"):
            channel_from_dict({"K": 2, "h": [1], "P": [1, 1], "extra": 0})

    def test_invalid_values_named(self):
        with pytest.raises(ChannelError, match="negative power at index 1"):
            channel_from_dict({"K": 2, "h": [1], "P": [-1, 1]})

    def test_malformed_file(self, tmp_path):
        p = tmp_path / "c.json"
        p.write_text("{not json")
        with pytest.raises(ChannelError, match="malformed JSON"):
            load_channel(p)

    def test_to_dict_round_trip(self, tmp_path):
        ch = StandardChannel(4, [0.1, 2.5, -0.3], [1, 2, 3, 4])
        p = tmp_path / "c.json"
        p.write_text(json.dumps(ch.to_dict()))
        assert load_channel(p) == ch

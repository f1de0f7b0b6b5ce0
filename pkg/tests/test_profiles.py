"""Order combinatorics: profiles, paths, flip sets, partitions, mirror map."""

import pytest
from hypothesis import given, strategies as st

from hdgames import (
    ActionProfile,
    DimensionError,
    History,
    InvalidPairError,
    OrderError,
    deviating_agent,
    enumerate_profiles,
    mirror_deviation,
    partition_sets,
    path_leq,
    profile_leq,
    unilateral_neighbors,
)


def p(text: str) -> ActionProfile:
    return ActionProfile.from_string(text)


def path(*texts: str) -> History:
    return History(tuple(p(t) for t in texts))


profiles_st = st.integers(min_value=1, max_value=6).flatmap(
    lambda n: st.tuples(
        *(st.integers(min_value=0, max_value=(1 << n) - 1) for _ in range(3))
    ).map(lambda masks: tuple(ActionProfile(n, m) for m in masks))
)


class TestProfileOrder:
    def test_bottom_below_top(self):
        assert profile_leq(p("00"), p("11"))

    def test_antichain(self):
        assert not profile_leq(p("10"), p("01"))
        assert not profile_leq(p("01"), p("10"))

    def test_reflexive_example(self):
        assert profile_leq(p("011"), p("011"))

    def test_width_mismatch(self):
        with pytest.raises(DimensionError):
            profile_leq(p("01"), p("011"))

    @given(profiles_st)
    def test_partial_order_laws(self, triple):
        a, b, c = triple
        assert profile_leq(a, a)
        if profile_leq(a, b) and profile_leq(b, a):
            assert a == b
        if profile_leq(a, b) and profile_leq(b, c):
            assert profile_leq(a, c)

    def test_order_laws_exhaustive_small(self):
        for n in range(1, 5):
            states = enumerate_profiles(n)
            for a in states:
                assert profile_leq(a, a)
                for b in states:
                    if profile_leq(a, b) and profile_leq(b, a):
                        assert a == b
                    for c in states:
                        if profile_leq(a, b) and profile_leq(b, c):
                            assert profile_leq(a, c)


class TestPathOrder:
    def test_componentwise(self):
        assert path_leq(path("00", "01"), path("01", "11"))
        assert path_leq(path("01", "00"), path("11", "00"))

    def test_first_step_incomparable(self):
        assert not path_leq(path("10", "00"), path("01", "11"))

    def test_length_mismatch(self):
        with pytest.raises(DimensionError):
            path_leq(path("00"), path("00", "00"))


class TestSerialization:
    def test_agent_one_leftmost(self):
        profile = ActionProfile.from_bits([1, 0, 0])
        assert profile.to_string() == "100"
        assert profile.action(0) == 1

    def test_round_trip(self):
        for text in ("0", "1", "0110", "111000111"):
            assert ActionProfile.from_string(text).to_string() == text

    def test_bad_bits(self):
        with pytest.raises(ValueError):
            ActionProfile.from_bits([0, 2])


class TestNeighbors:
    def test_two_agents(self):
        assert set(unilateral_neighbors(p("00"))) == {p("10"), p("01")}

    def test_three_ones(self):
        assert set(unilateral_neighbors(p("111"))) == {p("011"), p("101"), p("110")}

    def test_single_agent(self):
        assert unilateral_neighbors(p("0")) == (p("1"),)

    def test_canonical_order(self):
        ordered = unilateral_neighbors(p("000"))
        assert [q.to_string() for q in ordered] == ["001", "010", "100"]


class TestDeviatingAgent:
    def test_second_agent(self):
        assert deviating_agent(p("00"), p("01")) == 2

    def test_identity(self):
        assert deviating_agent(p("11"), p("11")) == 0

    def test_double_deviation_rejected(self):
        with pytest.raises(InvalidPairError):
            deviating_agent(p("01"), p("10"))


class TestMirrorDeviation:
    # Expected values follow from flipping, in the upper profile, the bit of
    # the agent that deviates between the lower profile and the target.
    def test_bottom_to_top(self):
        assert mirror_deviation(p("00"), p("11"), p("10")) == p("01")

    def test_shared_agent(self):
        assert mirror_deviation(p("00"), p("01"), p("01")) == p("00")

    def test_equal_profiles_identity(self):
        assert mirror_deviation(p("10"), p("10"), p("00")) == p("00")

    def test_requires_order(self):
        with pytest.raises(OrderError):
            mirror_deviation(p("10"), p("01"), p("00"))

    def test_requires_neighbor(self):
        with pytest.raises(InvalidPairError):
            mirror_deviation(p("00"), p("11"), p("00"))


class TestPartitionSets:
    def test_bottom_top_two_agents(self):
        parts = partition_sets(p("00"), p("11"))
        assert parts.down_low == ()
        assert set(parts.up_inside) == {p("10"), p("01")}
        assert parts.up_outside == ()
        assert parts.up_high == ()
        assert set(parts.down_inside) == {p("01"), p("10")}
        assert parts.down_outside == ()

    def test_one_step_apart(self):
        # Golden values generated by the enumerator itself and frozen.
        parts = partition_sets(p("10"), p("11"))
        assert parts.down_low == (p("00"),)
        assert parts.up_inside == (p("11"),)
        assert parts.up_outside == ()
        assert parts.up_high == ()
        assert parts.down_inside == (p("10"),)
        assert parts.down_outside == (p("01"),)

    def test_equal_top_profiles(self):
        top = p("111")
        parts = partition_sets(top, top)
        assert set(parts.down_low) == set(unilateral_neighbors(top))
        assert parts.up_inside == () == parts.up_outside
        assert parts.up_high == () == parts.down_inside
        assert set(parts.down_outside) == set(unilateral_neighbors(top))
        assert len(parts.down_low) == len(parts.down_outside)

    def test_requires_order(self):
        with pytest.raises(OrderError):
            partition_sets(p("11"), p("00"))

    def test_partition_and_bijection_exhaustive(self):
        for n in range(1, 5):
            states = enumerate_profiles(n)
            for lower in states:
                for upper in states:
                    if not profile_leq(lower, upper):
                        continue
                    parts = partition_sets(lower, upper)
                    low = (parts.down_low, parts.up_inside, parts.up_outside)
                    high = (parts.up_high, parts.down_inside, parts.down_outside)
                    assert set().union(*map(set, low)) == set(
                        unilateral_neighbors(lower)
                    )
                    assert set().union(*map(set, high)) == set(
                        unilateral_neighbors(upper)
                    )
                    assert sum(map(len, low)) == n == sum(map(len, high))
                    # The mirror map matches set sizes crosswise and is a
                    # bijection onto each partner set.
                    for source, target in (
                        (parts.down_low, parts.down_outside),
                        (parts.up_outside, parts.up_high),
                        (parts.up_inside, parts.down_inside),
                    ):
                        image = {
                            mirror_deviation(lower, upper, z) for z in source
                        }
                        assert image == set(target)
                        assert len(image) == len(source)

    def test_mirror_preserves_deviator(self):
        for n in range(1, 5):
            states = enumerate_profiles(n)
            for lower in states:
                for upper in states:
                    if not profile_leq(lower, upper):
                        continue
                    for z in unilateral_neighbors(lower):
                        mirrored = mirror_deviation(lower, upper, z)
                        assert deviating_agent(lower, z) == deviating_agent(
                            upper, mirrored
                        )


class TestHistory:
    def test_requires_nonempty(self):
        with pytest.raises(ValueError):
            History(())

    def test_requires_same_width(self):
        with pytest.raises(DimensionError):
            History((p("0"), p("00")))

    def test_prefix_and_last(self):
        h = path("00", "01", "11")
        assert h.length == 3
        assert h.last == p("11")
        assert h.prefix(2).profiles == (p("00"), p("01"))

import pytest
from hypothesis import given, strategies as st

from uavorch.rng import SplitMix64


def test_reference_stream_seed_1234567():
    # Published test vector for the reference C implementation.
    rng = SplitMix64(1234567)
    assert [rng.next_u64() for _ in range(5)] == [
        6457827717110365317, 3203168211198807973, 9817491932198370423,
        4593380528125082431, 16408922859458223821,
    ]


def test_seed_zero_first_output():
    assert SplitMix64(0).next_u64() == 0xE220A8397B1DCDAF


def test_negative_and_oversized_seeds_wrap_to_64_bits():
    assert SplitMix64(-1).next_u64() == SplitMix64(2**64 - 1).next_u64()
    assert SplitMix64(2**64 + 5).next_u64() == SplitMix64(5).next_u64()


@given(st.integers(0, 2**64 - 1))
def test_random_in_unit_interval(seed):
    rng = SplitMix64(seed)
    for _ in range(20):
        assert 0.0 <= rng.random() < 1.0


@given(st.integers(0, 2**32), st.integers(-50, 50), st.integers(0, 100))
def test_randint_closed_range(seed, lo, width):
    rng = SplitMix64(seed)
    hi = lo + width
    for _ in range(20):
        assert lo <= rng.randint(lo, hi) <= hi


def test_randint_hits_both_ends():
    rng = SplitMix64(9)
    seen = {rng.randint(1, 3) for _ in range(200)}
    assert seen == {1, 2, 3}


def test_randint_empty_range():
    with pytest.raises(ValueError):
        SplitMix64(0).randint(3, 2)


@given(st.integers(0, 2**32), st.floats(-100, 100), st.floats(0, 100))
def test_uniform_bounds(seed, lo, width):
    x = SplitMix64(seed).uniform(lo, lo + width)
    assert lo <= x <= lo + width


def test_same_seed_same_stream():
    a, b = SplitMix64(77), SplitMix64(77)
    assert [a.next_u64() for _ in range(100)] == [b.next_u64() for _ in range(100)]

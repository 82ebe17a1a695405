import numpy as np
import pytest
from hypothesis import given, strategies as st

from takagiwalk.rng import (GOLDEN, MASK64, CounterStream, bernoulli_threshold,
                            draw, draw_block, mix64, mix64_np, stream_key,
                            stream_keys_np, uniform01)

# Outputs of the classic sequential splitmix64 generator seeded at 0:
# mix64 of successive multiples of the golden-ratio increment.
SPLITMIX_FROM_ZERO = (
    0xE220A8397B1DCDAF,
    0x6E789E6AA1B965F4,
    0x06C45D188009454F,
)


def test_finalizer_reference_vectors():
    for i, expected in enumerate(SPLITMIX_FROM_ZERO, start=1):
        assert mix64((i * GOLDEN) & MASK64) == expected
        # a stream with raw key 0 is exactly splitmix64 seeded at 0
        assert draw(0, i) == expected


def test_draw_is_deterministic_and_stream_separated():
    a = [draw(stream_key(42, 0), c) for c in range(10)]
    b = [draw(stream_key(42, 0), c) for c in range(10)]
    c = [draw(stream_key(42, 1), c) for c in range(10)]
    assert a == b
    assert a != c


@given(st.lists(st.integers(0, MASK64), min_size=1, max_size=64))
def test_vector_mix_matches_scalar(values):
    arr = np.array(values, dtype=np.uint64)
    out = mix64_np(arr.copy())
    assert [int(v) for v in out] == [mix64(v) for v in values]


def test_stream_keys_match_scalar():
    streams = np.arange(3, 9, dtype=np.uint64)
    keys = stream_keys_np(7, streams)
    assert [int(k) for k in keys] == [stream_key(7, s) for s in range(3, 9)]


def test_draw_block_matches_scalar_draws():
    keys = stream_keys_np(99, np.arange(3, dtype=np.uint64))
    block = draw_block(keys, np.arange(10, 18, dtype=np.uint64))
    assert block.shape == (3, 8)
    for i in range(3):
        for j in range(8):
            assert int(block[i, j]) == draw(stream_key(99, i), 10 + j)


def test_uniform01_range_and_mean():
    vals = [uniform01(draw(stream_key(5, 0), c)) for c in range(20000)]
    assert all(0.0 <= v < 1.0 for v in vals)
    assert abs(sum(vals) / len(vals) - 0.5) < 0.01


@pytest.mark.parametrize("p,expected", [
    (0, 0),
    (1, 1 << 64),
    (0.5, 1 << 63),
    (0.25, 1 << 62),
])
def test_bernoulli_threshold_exact_dyadics(p, expected):
    assert bernoulli_threshold(p) == expected


def test_bernoulli_threshold_rejects_bad_input():
    with pytest.raises(ValueError):
        bernoulli_threshold(1.5)
    with pytest.raises(ValueError):
        bernoulli_threshold(-0.1)


def test_bernoulli_threshold_frequency():
    thr = bernoulli_threshold(0.3)
    hits = sum(draw(stream_key(11, 0), c) < thr for c in range(50000))
    assert abs(hits / 50000 - 0.3) < 0.01


def test_counter_stream_next_below_range():
    cs = CounterStream(3, 0)
    bound = 3**48
    vals = [cs.next_below(bound) for _ in range(2000)]
    assert all(0 <= v < bound for v in vals)
    assert abs(sum(vals) / len(vals) / bound - 0.5) < 0.05


def test_counter_stream_matches_explicit_draws():
    cs = CounterStream(17, 4)
    key = stream_key(17, 4)
    assert [cs.next_u64() for _ in range(5)] == \
        [draw(key, c) for c in range(1, 6)]


def test_counter_stream_reproducible():
    a = CounterStream(17, 4)
    b = CounterStream(17, 4)
    assert [a.next_u64() for _ in range(5)] == [b.next_u64() for _ in range(5)]
    assert a.next_uniform01() == b.next_uniform01()


def test_next_below_rejects_nonpositive():
    with pytest.raises(ValueError):
        CounterStream(1).next_below(0)


@given(st.integers(2, 10), st.integers(1, 60))
def test_next_below_small_bounds(base, power):
    cs = CounterStream(base * 1000 + power, 0)
    bound = base**power
    for _ in range(20):
        assert 0 <= cs.next_below(bound) < bound

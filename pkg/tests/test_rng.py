import numpy as np

from rislink import rng


def test_same_address_same_draws():
    a = rng.stream(123, rng.TAG_CHANNEL, 4, 5).standard_normal(100)
    b = rng.stream(123, rng.TAG_CHANNEL, 4, 5).standard_normal(100)
    assert np.array_equal(a, b)


def test_different_indices_different_draws():
    a = rng.stream(123, rng.TAG_CHANNEL, 4, 5).standard_normal(100)
    b = rng.stream(123, rng.TAG_CHANNEL, 4, 6).standard_normal(100)
    c = rng.stream(123, rng.TAG_TRIALS, 4, 5).standard_normal(100)
    d = rng.stream(124, rng.TAG_CHANNEL, 4, 5).standard_normal(100)
    assert not np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert not np.array_equal(a, d)


def test_derivation_rule_is_the_documented_fold():
    # stream(seed, i0, i1) must key Philox with (seed, fold(i0, i1)).
    h = rng.splitmix64(0 ^ 7)
    h = rng.splitmix64(h ^ 9)
    assert rng.derive_stream_id(7, 9) == h
    expected = np.random.Generator(np.random.Philox(key=[42, h]))
    assert np.array_equal(
        rng.stream(42, 7, 9).standard_normal(16), expected.standard_normal(16)
    )


def test_index_order_matters():
    assert rng.derive_stream_id(1, 2) != rng.derive_stream_id(2, 1)

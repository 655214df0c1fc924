import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import TOY_W2
from srstair.channel import (
    ChannelSpec,
    SimStats,
    StopRule,
    apply_channel,
    awgn_to_bsc,
    bsc_to_awgn,
    measured_blocks,
    measured_bits,
    q_function,
    run_montecarlo,
    trial_generator,
)
from srstair.ibdd import DecoderConfig
from srstair.srsc import make_codes


@given(st.floats(1e-6, 0.45), st.floats(0.1, 0.99))
def test_awgn_bsc_round_trip(p, r):
    assert awgn_to_bsc(bsc_to_awgn(p, r), r) == pytest.approx(p, rel=1e-9)


def test_q_function_values():
    assert q_function(0.0) == 0.5
    assert q_function(3.0) == pytest.approx(1.3498980316301e-3, rel=1e-10)
    assert awgn_to_bsc(math.inf, 0.5) == 0.0


def test_crossover_decreases_with_snr():
    ps = [awgn_to_bsc(x, 0.9) for x in np.linspace(0, 10, 21)]
    assert all(a > b for a, b in zip(ps, ps[1:]))


def test_empirical_flip_rate():
    blocks = [np.zeros((1000, 1000), dtype=np.uint8) for _ in range(10)]
    _, masks = apply_channel(blocks, ChannelSpec("bsc", 0.01), seed=99)
    n = 10**7
    k = sum(int(m.sum()) for m in masks)
    sigma = math.sqrt(n * 0.01 * 0.99)
    assert abs(k - n * 0.01) < 3 * sigma


def test_streams_are_keyed_by_counter():
    a = trial_generator(5, 3, 1).random(4)
    assert np.array_equal(a, trial_generator(5, 3, 1).random(4))
    assert not np.array_equal(a, trial_generator(5, 4, 1).random(4))
    assert not np.array_equal(a, trial_generator(5, 3, 0).random(4))
    assert not np.array_equal(a, trial_generator(6, 3, 1).random(4))


def test_channel_spec_errors():
    with pytest.raises(ValueError):
        ChannelSpec("bsc", 0.6)
    with pytest.raises(ValueError):
        ChannelSpec("awgn_hard", 5.0)
    with pytest.raises(ValueError):
        ChannelSpec("erasure", 0.1)
    with pytest.raises(ValueError):
        StopRule(0, 10)


def test_stats_merge_and_interval():
    a = SimStats(1000, 10, 10, 2, 1, 0)
    b = SimStats(3000, 30, 30, 1, 1, 0)
    m = a.merge(b)
    assert (m.bits_measured, m.bit_errors, m.block_errors, m.trials) == (4000, 40, 3, 2)
    assert m.ber == 0.01
    assert m.ci95 == pytest.approx(1.96 * math.sqrt(0.01 * 0.99 / 4000), rel=1e-3)
    assert SimStats().ber == 0.0


def test_measurement_region():
    assert list(measured_blocks(TOY_W2, 12, 5)) == [2, 3, 4, 5, 6, 7, 8]
    assert list(measured_blocks(TOY_W2, 12, 5, exclude_edges=False)) == list(range(1, 13))
    assert measured_bits(TOY_W2, 12, 5) == 7 * 7 * 14


def test_montecarlo_stops_and_is_reproducible():
    codes = make_codes(TOY_W2)
    dcfg = DecoderConfig(window=5, mode="mf")
    spec = ChannelSpec("bsc", 0.1)
    a = run_montecarlo(TOY_W2, codes, spec, dcfg, StopRule(20, 10_000), seed=3, workers=1, batch=4)
    b = run_montecarlo(TOY_W2, codes, spec, dcfg, StopRule(20, 10_000), seed=3, workers=3, batch=4)
    assert a == b
    assert a.bit_errors >= 20
    c = run_montecarlo(TOY_W2, codes, ChannelSpec("bsc", 0.001), dcfg, StopRule(10**6, 21), seed=3, workers=1)
    assert c.blocks_measured >= 21 and c.blocks_measured < 21 + 7


def test_montecarlo_rejects_short_chains():
    codes = make_codes(TOY_W2)
    with pytest.raises(ValueError):
        run_montecarlo(TOY_W2, codes, ChannelSpec("bsc", 0.01), DecoderConfig(window=13), workers=1)

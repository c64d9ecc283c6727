import hashlib

import numpy as np
import pytest
from scipy.special import erfc

from mbmsq.channel_sim import (
    BerPoint,
    MLDetector,
    SimConfig,
    ber_curve,
    ber_points_to_csv,
    ber_vs_nr,
    bracket_crossing,
    crossing,
    draw_channel,
    ebn0_from_snr,
    simulate_block,
)
from mbmsq.constellation import MbmSignalSet, bpsk, conventional_set


def qfunc(x):
    return 0.5 * erfc(np.asarray(x) / np.sqrt(2.0))


ANTIPODAL = MbmSignalSet([0, 0], [3 + 1j, -3 - 1j], 1)


def test_channel_statistics():
    H = draw_channel(4, 4, np.random.default_rng(7), batch=62_500)  # 10^6 entries
    assert np.mean(np.abs(H) ** 2) == pytest.approx(1.0, abs=0.01)
    assert np.var(H.real) == pytest.approx(0.5, abs=0.01)
    n = H.shape[0]
    corr = np.mean(H[:, 0, 0] * np.conj(H[:, 1, 2]))
    assert abs(corr) < 3 / np.sqrt(n)
    assert draw_channel(2, 3, np.random.default_rng(0)).shape == (2, 3)


def test_channel_golden_hash():
    H = draw_channel(4, 16, np.random.default_rng(1234))
    digest = hashlib.sha256(H.tobytes()).hexdigest()
    assert digest == "8d0b97cc0e603bba19baf6f7ef56397042caa9878d9408881b735b4419dc26d2"


def test_noiseless_single_blocks(set16, rng):
    for _ in range(20):
        i = int(rng.integers(len(set16)))
        H = draw_channel(2, set16.n_m, rng)
        assert simulate_block(set16, set16.bits(i), H, np.inf, rng) == set16.bits(i)


def test_numba_and_numpy_search_agree(set16, rng):
    det = MLDetector(set16)
    tx = rng.integers(0, len(set16), 500)
    H = draw_channel(3, set16.n_m, rng, batch=500)
    Y = det.transmit(H, tx)
    Y = Y + 0.8 * (rng.standard_normal(Y.shape) + 1j * rng.standard_normal(Y.shape))
    a = det.detect(H, Y)
    det.use_numba = False
    assert np.array_equal(a, det.detect(H, Y))


def test_detector_matches_brute_force_metric(set16, rng):
    det = MLDetector(set16)
    X = np.stack([set16.block(i).matrix for i in range(len(set16))]) * det.scale
    for _ in range(10):
        H = draw_channel(2, set16.n_m, rng)
        Y = H @ X[rng.integers(len(set16))] + (rng.standard_normal((2, 4)) + 1j * rng.standard_normal((2, 4)))
        metric = np.sum(np.abs(Y[None] - H[None] @ X) ** 2, axis=(1, 2))
        assert det.detect(H[None], Y[None])[0] == np.argmin(metric)


def test_ties_go_to_lowest_index():
    s = MbmSignalSet([0, 0], [1, 1j], 1)
    det = MLDetector(s)
    H = np.ones((1, 1, 1), dtype=complex)
    Y = np.full((1, 1, 1), (1 + 1j) / 2 * det.scale)
    assert det.detect(H, Y)[0] == 0


def test_antipodal_fixed_channel_matches_q_function():
    # one fixed H, many noise draws: error rate Q(sqrt(2 rho |h|^2))
    r = np.random.default_rng(11)
    det = MLDetector(ANTIPODAL)
    h = np.array([[0.6 - 0.3j]])
    rho = 10 ** (3 / 10)
    n = 200_000
    H = np.broadcast_to(h, (n, 1, 1)).copy()
    tx = r.integers(0, 2, n)
    Y = det.transmit(H, tx) + np.sqrt(0.5 / rho) * (r.standard_normal((n, 1, 1)) + 1j * r.standard_normal((n, 1, 1)))
    p_hat = np.mean(det.detect(H, Y) != tx)
    p = float(qfunc(np.sqrt(2 * rho * abs(h[0, 0]) ** 2)))
    assert abs(p_hat - p) <= 3 * np.sqrt(p * (1 - p) / n)


@pytest.mark.parametrize("snr_db", [0.0, 5.0])
def test_antipodal_rayleigh_closed_form(snr_db):
    pt = ber_curve(SimConfig(ANTIPODAL, 1, [snr_db], min_bit_errors=3000, seed=2))[0]
    rho = 10 ** (snr_db / 10)
    p = 0.5 * (1 - np.sqrt(rho / (1 + rho)))
    assert abs(pt.ber - p) <= 3 * np.sqrt(p * (1 - p) / pt.bits_simulated)


def test_low_snr_limit(conv1, set16):
    for s in (conv1, set16):
        pt = ber_curve(SimConfig(s, 4, [-20.0], min_bit_errors=50_000, seed=4))[0]
        assert pt.bits_simulated >= 100_000
        sd = np.sqrt(0.25 / pt.bits_simulated)
        assert 0.45 <= pt.ber <= 0.5 + 3 * sd


def test_vanishing_snr_is_guessing(conv1, set16):
    for s in (conv1, set16):
        pt = ber_curve(SimConfig(s, 4, [-40.0], min_bit_errors=50_000, seed=4))[0]
        assert pt.bits_simulated >= 100_000
        assert abs(pt.ber - 0.5) <= 0.01


def test_determinism(set16):
    cfg = SimConfig(set16, 2, [4.0, 8.0], min_bit_errors=200, seed=99)
    a = ber_curve(cfg)
    b = ber_curve(cfg)
    assert a == b
    c = ber_curve(SimConfig(set16, 2, [4.0, 8.0], min_bit_errors=200, seed=100))
    assert a != c


def test_worker_count_does_not_change_results(conv2):
    kw = dict(min_bit_errors=300, seed=5)
    a = ber_curve(SimConfig(conv2, 2, [6.0, 10.0], workers=1, **kw))
    b = ber_curve(SimConfig(conv2, 2, [6.0, 10.0], workers=2, **kw))
    assert a == b


def test_point_bookkeeping(conv1):
    pts = ber_curve(SimConfig(conv1, 2, [0.0, 10.0], min_bit_errors=100, seed=1))
    for p in pts:
        assert p.ber == p.bit_errors / p.bits_simulated
        assert 0 <= p.ber <= 1
        assert p.bit_errors >= 100
        assert p.bits_simulated == 2 * p.blocks
    capped = ber_curve(SimConfig(conv1, 4, [30.0], max_blocks=1000, seed=1))[0]
    assert capped.blocks == 1000


def test_ber_decreases_with_snr(conv2):
    pts = ber_curve(SimConfig(conv2, 2, [0.0, 4.0, 8.0, 12.0], min_bit_errors=400, seed=8))
    bers = [p.ber for p in pts]
    assert all(b1 > b2 for b1, b2 in zip(bers, bers[1:]))


def test_ber_decreases_with_receive_antennas(conv2):
    pts = ber_vs_nr(SimConfig(conv2, 1, min_bit_errors=400, seed=8), [1, 2, 4, 6], 2.0)
    bers = [p.ber for p in pts]
    assert all(b1 > b2 for b1, b2 in zip(bers, bers[1:]))
    assert [p.n_r for p in pts] == [1, 2, 4, 6]


def test_conventional_diversity_slope(conv1):
    snrs = [8.0, 9.0, 10.0, 11.0, 12.0, 13.0]
    pts = ber_curve(SimConfig(conv1, 4, snrs, min_bit_errors=300, seed=21))
    used = [(p.snr_db, np.log10(p.ber)) for p in pts if 1e-5 <= p.ber <= 1e-3]
    assert len(used) >= 4
    slope = np.polyfit(*zip(*used), 1)[0]
    # fourth-order diversity: -n_r/10 decades per dB
    assert abs(slope + 0.4) <= 0.2 * 0.4


def test_ebn0():
    assert ebn0_from_snr(3.0, 1.0) == 3.0
    assert float(ebn0_from_snr(5.72, 2.25)) == pytest.approx(2.198, abs=0.01)
    with pytest.raises(ValueError):
        ebn0_from_snr(1.0, 0.0)


def test_config_validation(conv1):
    with pytest.raises(ValueError):
        SimConfig(conv1, 0)
    with pytest.raises(ValueError):
        SimConfig(conv1, 1, [float("inf")])
    with pytest.raises(ValueError):
        SimConfig(conv1, 1, min_bit_errors=0)


def test_csv_and_crossing():
    pts = [BerPoint(0.0, 0.25, 100, 400, 200, 4, 7), BerPoint(2.0, 0.0125, 100, 8000, 4000, 4, 7)]
    assert ber_points_to_csv(pts) == (
        "snr_db,ber,bit_errors,bits,blocks,seed\n"
        "0,2.500000e-01,100,400,200,7\n"
        "2,1.250000e-02,100,8000,4000,7\n"
    )
    assert ber_points_to_csv(pts, by="n_r").startswith("n_r,ber,bit_errors,bits,blocks,seed\n4,")
    assert crossing([0, 1, 2], [1e-1, 1e-3, 1e-5], 1e-4) == pytest.approx(1.5)
    assert np.isnan(crossing([0, 1], [1e-1, 1e-2], 1e-4))


def test_bracket_walks_both_ways(conv1):
    cfg = SimConfig(conv1, 2, min_bit_errors=200, seed=3)
    up, pts_up = bracket_crossing(cfg, 1e-2, 0.0, 2.0)
    down, pts_down = bracket_crossing(cfg, 1e-2, 20.0, 2.0)
    assert pts_up[0].ber >= 1e-2 > pts_up[-1].ber
    assert pts_down[0].ber >= 1e-2 > pts_down[-1].ber
    assert abs(up - down) < 1.0
    nr, _ = bracket_crossing(cfg, 1e-2, 1, 1, axis="n_r", fixed=6.0)
    assert 1 < nr < 8


def test_bpsk_helper():
    assert bpsk().tolist() == [-1, 1]
    assert len(conventional_set(2, bpsk())) == 8

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import coded_set
from mbmsq import build_constellation, build_shortened_rs, field_new
from mbmsq.constellation import (
    CapExceeded,
    MbmSignalSet,
    SignalSetError,
    bpsk,
    coded_min_distance_formula,
    coded_rate,
    conventional_set,
    dense_distance_spectrum,
    distance_spectrum,
    dump_signal_set,
    min_distance,
    proposed_set,
    rate,
)


@pytest.fixture(scope="module")
def set8():
    return coded_set(3)


def test_example_blocks(set8):
    # codeword 0 with the first vector; codeword [0,1,6,3] with the second
    x0 = set8.block(0).vector
    nz = np.flatnonzero(x0) + 1
    assert nz.tolist() == [1, 9, 17, 25]
    assert np.all(x0[nz - 1] == -1 - 1j)
    i = set8.codebook.index_of([0, 1]) * 2 + 1
    assert set8.map_indices[i].tolist() == [0, 1, 6, 3]
    x1 = set8.block(i).vector
    nz = np.flatnonzero(x1) + 1
    assert nz.tolist() == [1, 10, 23, 28]
    assert np.all(x1[nz - 1] == 1 + 1j)
    assert len(x1) == 32


def test_vec_matrix_consistency(set8):
    for i in (0, 7, 100):
        b = set8.block(i)
        assert np.array_equal(b.vector, b.matrix.T.reshape(-1))
        assert np.array_equal(set8.dense()[i], b.vector)
        assert np.all(np.count_nonzero(b.matrix, axis=0) == 1)


def test_sizes(set16):
    assert len(set16) == 512
    assert len({(tuple(a), tuple(b)) for a, b in zip(set16.map_indices.tolist(), set16.symbols.tolist())}) == 512
    assert set16.bit_width == 9


def test_conventional_sets():
    s = conventional_set(1, bpsk())
    assert len(s) == 4
    assert distance_spectrum(s).histogram == {2: 4, 4: 2}
    assert distance_spectrum(conventional_set(2, bpsk())).histogram == {2: 24, 4: 4}
    for m in (1, 2, 4):
        assert min_distance(conventional_set(m, bpsk())) == 2
    # MAP bits come first
    assert s.map_indices[:, 0].tolist() == [0, 0, 1, 1]
    assert s.symbols[:, 0].real.tolist() == [-1, 1, -1, 1]


def test_rates(set16, set64):
    assert coded_rate(4, 2, 2, 4) == 2.25
    assert rate(set16) == 2.25
    assert rate(set64) == 3.25
    assert rate(conventional_set(1, bpsk())) == 2
    assert rate(coded_set(3, M=4)) == coded_rate(4, 2, 3, 4)


@pytest.mark.parametrize("m_rf,M", [(3, 2), (3, 4), (4, 2)])
def test_sparse_matches_dense(m_rf, M):
    s = coded_set(m_rf, M=M) if M == 2 else proposed_set(
        build_shortened_rs(field_new(m_rf), 2, 1), build_constellation(M, 2)
    )
    if len(s) > 512:
        pytest.skip("dense oracle limited to 512 blocks")
    assert distance_spectrum(s).histogram == dense_distance_spectrum(s).histogram


def test_min_distance_formula(set16):
    assert min_distance(set16) == 12
    d_H = set16.codebook.d_min
    assert coded_min_distance_formula(d_H, set16.constellation.vectors) == 12
    v = set16.constellation.vectors
    d = v[0] - v[1]
    assert np.sum(d * d.conj()).real == 32


def test_disjoint_support_distance(set16):
    # two codewords at Hamming distance d_H, same symbol vector
    words = set16.codebook.codewords
    diff = np.count_nonzero(words != words[0], axis=1)
    j = int(np.flatnonzero(diff == 3)[0])
    xi, xj = set16.block(0).vector, set16.block(2 * j).vector
    s = set16.symbols[0]
    d = xi - xj
    assert np.sum(d * d.conj()).real == 3 * 2 * (s[0] * s[0].conj()).real == 12


def test_labels_round_trip(set16):
    for i in range(len(set16)):
        assert set16.index_from_bits(set16.bits(i)) == i
    with pytest.raises(SignalSetError):
        set16.index_from_bits((1, 0))


def test_validation():
    with pytest.raises(SignalSetError):
        MbmSignalSet([0, 1, 0], [1, 1, -1], 2)
    with pytest.raises(SignalSetError):
        MbmSignalSet([0, 1], [1, 0], 2)
    with pytest.raises(SignalSetError):
        MbmSignalSet([0, 2], [1, 1], 2)
    with pytest.raises(SignalSetError):
        proposed_set(build_shortened_rs(field_new(3), 4, 2), build_constellation(2, 2))


def test_cap_and_trivial():
    s = conventional_set(1, bpsk())
    with pytest.raises(CapExceeded):
        distance_spectrum(s, cap=2)
    one = MbmSignalSet([0], [1], 2)
    assert distance_spectrum(one).histogram == {}
    assert distance_spectrum(one).min_dist is None


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 3), st.integers(0, 2), st.data())
def test_random_sets_sparse_vs_dense(k_bits, n_extra, data):
    N = 1 + n_extra
    S = 1 << (k_bits + 1)
    n_m = data.draw(st.sampled_from([2, 4]))
    L = data.draw(st.lists(st.lists(st.integers(0, n_m - 1), min_size=N, max_size=N), min_size=S, max_size=S))
    re = data.draw(st.lists(st.lists(st.sampled_from([-3, -1, 1, 3]), min_size=N, max_size=N), min_size=S, max_size=S))
    s = MbmSignalSet(L, np.array(re) * (1 + 1j), n_m)
    assert distance_spectrum(s).histogram == dense_distance_spectrum(s).histogram


def test_csv_and_dump(set16):
    spec = distance_spectrum(conventional_set(1, bpsk()))
    assert spec.to_csv() == "distance,count,percent\n2,4,66.6667\n4,2,33.3333\n"
    lines = dump_signal_set(conventional_set(1, bpsk())).splitlines()
    assert lines[0] == "# mbm kind=conventional size=4 N=1 N_m=2 bits=2"
    assert lines[1] == "0 | 0 | -1:0"
    assert dump_signal_set(set16).splitlines()[1] == "000 | 0 0 0 0 | -1:-1 -1:-1 -1:-1 -1:-1"

"""MBM block signal sets: the conventional one-shot set and the coded
(MAP-index code x squaring constellation) block set.

A block is stored sparsely: one MAP index and one non-zero symbol per
channel use.  Block ``i`` carries the bit label ``i`` in natural binary
(MSB first), which makes labels of the coded set "message symbols first,
constellation index last".
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from math import comb, log2

import numpy as np

from .map_index_code import MapIndexCodebook
from .squaring import SymbolConstellation


class SignalSetError(ValueError):
    pass


class CapExceeded(RuntimeError):
    pass


DEFAULT_PAIR_CAP = 1 << 14  # max |S| for full pair sweeps


@dataclass(frozen=True)
class MbmBlock:
    map_indices: np.ndarray
    symbols: np.ndarray
    n_m: int

    @property
    def matrix(self) -> np.ndarray:
        """N_m x N matrix with one non-zero per column."""
        X = np.zeros((self.n_m, len(self.symbols)), dtype=complex)
        X[self.map_indices, np.arange(len(self.symbols))] = self.symbols
        return X

    @property
    def vector(self) -> np.ndarray:
        """vec(X): column-major stacking, length N * N_m."""
        return self.matrix.T.reshape(-1)


@dataclass(eq=False)
class MbmSignalSet:
    """A finite set of sparse MBM blocks with a bit labelling.

    Parameters
    ----------
    map_indices : (S, N) int array
    symbols : (S, N) complex array
    n_m : int
        Number of mirror activation patterns (rows of each block matrix).
    kind : str
        ``"conventional"``, ``"mic-sq"`` or ``"custom"``.
    """

    map_indices: np.ndarray
    symbols: np.ndarray
    n_m: int
    kind: str = "custom"
    params: dict = field(default_factory=dict)
    codebook: MapIndexCodebook | None = None
    constellation: SymbolConstellation | None = None

    def __post_init__(self):
        self.map_indices = np.asarray(self.map_indices, dtype=np.int64)
        self.symbols = np.asarray(self.symbols, dtype=complex)
        if self.map_indices.ndim == 1:
            self.map_indices = self.map_indices[:, None]
            self.symbols = self.symbols.reshape(-1, 1)
        if self.map_indices.shape != self.symbols.shape:
            raise SignalSetError("MAP-index and symbol arrays differ in shape")
        if np.any(self.symbols == 0):
            raise SignalSetError("every channel use needs a non-zero symbol")
        if self.map_indices.min() < 0 or self.map_indices.max() >= self.n_m:
            raise SignalSetError("MAP index out of range")
        S = len(self)
        if S & (S - 1):
            raise SignalSetError(f"|S| = {S} is not a power of two")

    def __len__(self) -> int:
        return self.map_indices.shape[0]

    @property
    def N(self) -> int:
        return self.map_indices.shape[1]

    @property
    def bit_width(self) -> int:
        return len(self).bit_length() - 1

    @property
    def integer_valued(self) -> bool:
        s = self.symbols
        return bool(np.all(s.real == np.round(s.real)) and np.all(s.imag == np.round(s.imag)))

    @property
    def avg_energy(self) -> float:
        """Average energy per channel use over the set."""
        return float(np.mean(np.abs(self.symbols) ** 2))

    def block(self, i: int) -> MbmBlock:
        return MbmBlock(self.map_indices[i], self.symbols[i], self.n_m)

    def dense(self) -> np.ndarray:
        """All blocks as vec(X), shape (S, N * N_m)."""
        S, N = self.map_indices.shape
        x = np.zeros((S, N, self.n_m), dtype=complex)
        x[np.arange(S)[:, None], np.arange(N)[None, :], self.map_indices] = self.symbols
        return x.reshape(S, N * self.n_m)

    def bits(self, i: int) -> tuple[int, ...]:
        k = self.bit_width
        return tuple(i >> (k - 1 - b) & 1 for b in range(k))

    def index_from_bits(self, bits) -> int:
        idx = 0
        for b in bits:
            idx = (idx << 1) | int(b)
        if len(bits) != self.bit_width:
            raise SignalSetError(f"expected {self.bit_width} bits")
        return idx


def conventional_set(m_rf: int, alphabet) -> MbmSignalSet:
    """One-use MBM set: every (MAP index, symbol) pair; MAP bits first."""
    alphabet = np.asarray(alphabet, dtype=complex)
    A = len(alphabet)
    if A < 1 or A & (A - 1):
        raise SignalSetError("alphabet size must be a power of two")
    n_m = 1 << m_rf
    idx = np.repeat(np.arange(n_m), A)
    sym = np.tile(alphabet, n_m)
    return MbmSignalSet(idx, sym, n_m, "conventional", {"m_rf": m_rf, "alphabet_size": A})


def bpsk() -> np.ndarray:
    return np.array([-1.0, 1.0], dtype=complex)


def proposed_set(codebook: MapIndexCodebook, constellation: SymbolConstellation) -> MbmSignalSet:
    """Every (codeword, symbol vector) pair, codeword-major."""
    vectors = constellation.vectors
    if vectors.shape[1] != codebook.n:
        raise SignalSetError(
            f"codeword length {codebook.n} != constellation dimension {vectors.shape[1]}"
        )
    C = len(codebook)
    A = len(vectors)
    idx = np.repeat(codebook.codewords, A, axis=0)
    sym = np.tile(vectors, (C, 1))
    params = {
        "N": codebook.n,
        "K": codebook.k,
        "m_rf": codebook.field.m,
        "M": constellation.M,
        "L": constellation.L,
    }
    return MbmSignalSet(idx, sym, codebook.q, "mic-sq", params, codebook, constellation)


def coded_rate(N: int, K: int, m_rf: int, M: int) -> float:
    """Bits per channel use of the coded set from its parameters alone.

    ``(K m_rf + 2N(log2 M - 2) + log2(2N) + 2) / N`` for M >= 4 and
    ``(K m_rf + 1) / N`` for M = 2.
    """
    if M == 2:
        return (K * m_rf + 1) / N
    return (K * m_rf + 2 * N * (log2(M) - 2) + log2(2 * N) + 2) / N


def rate(sset: MbmSignalSet) -> float:
    """Bits per channel use, from the closed form checked against log2|S| / N."""
    p = sset.params
    if sset.kind == "mic-sq":
        eta = coded_rate(p["N"], p["K"], p["m_rf"], p["M"])
    elif sset.kind == "conventional":
        eta = p["m_rf"] + log2(p["alphabet_size"])
    else:
        eta = sset.bit_width / sset.N
    if abs(eta - sset.bit_width / sset.N) > 1e-12:
        raise SignalSetError(f"closed-form rate {eta} disagrees with log2|S|/N")
    return eta


@dataclass
class DistanceSpectrum:
    histogram: dict
    total_pairs: int

    @property
    def min_dist(self):
        return min(self.histogram) if self.histogram else None

    def percent(self, d) -> float:
        return 100.0 * self.histogram[d] / self.total_pairs

    def to_csv(self) -> str:
        rows = ["distance,count,percent"]
        for d, c in sorted(self.histogram.items()):
            rows.append(f"{_fmt_num(d)},{c},{100.0 * c / self.total_pairs:.4f}")
        return "\n".join(rows) + "\n"


def _fmt_num(x) -> str:
    if float(x).is_integer():
        return str(int(x))
    return repr(float(x))


def _split_symbols(sset: MbmSignalSet):
    s = sset.symbols
    if sset.integer_valued:
        re = np.round(s.real).astype(np.int64)
        im = np.round(s.imag).astype(np.int64)
        return re, im, True
    return s.real.copy(), s.imag.copy(), False


def distance_spectrum(sset: MbmSignalSet, cap: int = DEFAULT_PAIR_CAP) -> DistanceSpectrum:
    """Exact squared-distance histogram over all unordered block pairs.

    Uses sparsity: per channel use the contribution is |s - s'|^2 when the
    MAP indices agree and |s|^2 + |s'|^2 otherwise.
    """
    S = len(sset)
    if S > cap:
        raise CapExceeded(f"|S| = {S} exceeds the pair-sweep cap {cap}")
    L = sset.map_indices
    re, im, exact = _split_symbols(sset)
    energy = re * re + im * im
    counts: Counter = Counter()
    for i in range(S - 1):
        same = L[i + 1:] == L[i]
        dre = re[i + 1:] - re[i]
        dim_ = im[i + 1:] - im[i]
        d = np.where(same, dre * dre + dim_ * dim_, energy[i + 1:] + energy[i]).sum(axis=1)
        if exact:
            bc = np.bincount(d)
            nz = np.flatnonzero(bc)
            counts.update(dict(zip(nz.tolist(), bc[nz].tolist())))
        else:
            vals, cnt = np.unique(np.round(d, 9), return_counts=True)
            counts.update(dict(zip(vals.tolist(), cnt.tolist())))
    return DistanceSpectrum(dict(sorted(counts.items())), comb(S, 2))


def dense_distance_spectrum(sset: MbmSignalSet) -> DistanceSpectrum:
    """Reference histogram from the full vec(X) vectors (small sets only)."""
    x = sset.dense()
    counts: Counter = Counter()
    for i in range(len(x) - 1):
        d = np.sum(np.abs(x[i + 1:] - x[i]) ** 2, axis=1)
        vals, cnt = np.unique(np.round(d, 9), return_counts=True)
        counts.update(dict(zip(vals.tolist(), cnt.tolist())))
    hist = {(int(k) if float(k).is_integer() else k): v for k, v in sorted(counts.items())}
    return DistanceSpectrum(hist, comb(len(x), 2))


def min_distance(sset: MbmSignalSet, cap: int = DEFAULT_PAIR_CAP):
    return distance_spectrum(sset, cap).min_dist


def coded_min_distance_formula(d_H: int, vectors: np.ndarray):
    """Minimum of the disjoint-support and shared-support distance terms.

    Disjoint supports in ``d_H`` uses contribute the ``d_H`` smallest
    |s_i|^2 + |s'_i|^2; shared support contributes ||s - s'||^2 (s != s').
    """
    vectors = np.asarray(vectors)
    e = np.abs(vectors) ** 2
    pair_e = np.sort(e[:, None, :] + e[None, :, :], axis=2)[:, :, :d_H].sum(axis=2)
    first = pair_e.min()
    diff = np.sum(np.abs(vectors[:, None, :] - vectors[None, :, :]) ** 2, axis=2)
    second = diff[~np.eye(len(vectors), dtype=bool)].min() if len(vectors) > 1 else np.inf
    out = min(first, second)
    return int(round(out)) if float(np.round(out, 9)).is_integer() else float(out)


def dump_signal_set(sset: MbmSignalSet) -> str:
    width = max(1, (sset.bit_width + 3) // 4)
    lines = [f"# mbm kind={sset.kind} size={len(sset)} N={sset.N} N_m={sset.n_m} bits={sset.bit_width}"]
    for i in range(len(sset)):
        l_part = " ".join(str(v) for v in sset.map_indices[i])
        s_part = " ".join(f"{_fmt_num(z.real)}:{_fmt_num(z.imag)}" for z in sset.symbols[i])
        lines.append(f"{i:0{width}x} | {l_part} | {s_part}")
    return "\n".join(lines) + "\n"

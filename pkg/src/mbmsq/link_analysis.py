"""Difference-matrix geometry, Chernoff PEP bounds and the BER union bound.

Pairs are swept in chunks.  For each pair the N x N Gram matrix of the
difference matrix is formed directly from the sparse blocks; when symbol
coordinates are integers these Grams are Gaussian-integer matrices, so
identical pairs collapse exactly into a small set of classes (Gram, bit
distance) -> count.  Eigenvalues are then needed once per class.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb

import numpy as np

from .constellation import DEFAULT_PAIR_CAP, CapExceeded, MbmSignalSet
from .jacobi import jacobi_eigvalsh

DEFAULT_RANK_TOL = 1e-9
_CHUNK = 1 << 19


@dataclass
class PairGeometry:
    pair: tuple[int, int]
    squared_singular_values: np.ndarray
    rank: int
    bit_distance: int


@dataclass
class RankProfile:
    histogram: dict
    total_pairs: int

    @property
    def min_rank(self) -> int:
        return min(self.histogram)

    @property
    def rank_one_pairs(self) -> int:
        return self.histogram.get(1, 0)

    def diversity_order(self, n_r: int) -> int:
        return n_r * self.min_rank

    def to_csv(self) -> str:
        rows = ["rank,count"] + [f"{r},{c}" for r, c in sorted(self.histogram.items())]
        return "\n".join(rows) + "\n"


def diff_matrix(sset: MbmSignalSet, i: int, j: int) -> np.ndarray:
    if not (0 <= i < len(sset) and 0 <= j < len(sset)):
        raise IndexError(f"block index out of range for |S| = {len(sset)}")
    return sset.block(i).matrix - sset.block(j).matrix


def _self_grams(L: np.ndarray, s: np.ndarray) -> np.ndarray:
    """X^H X per block: conj(s_k) s_m where MAP indices of uses k, m agree."""
    eq = L[:, :, None] == L[:, None, :]
    return np.conj(s)[:, :, None] * s[:, None, :] * eq


def _pair_grams(self_gram, L, s, I, J) -> np.ndarray:
    """Delta^H Delta = X_i^H X_i + X_j^H X_j - C - C^H, C = X_i^H X_j.

    Column k of X_i is s_ik e_{l_ik}, so C_km = conj(s_ik) s_jm [l_ik = l_jm].
    """
    eq = L[I][:, :, None] == L[J][:, None, :]
    C = np.conj(s[I])[:, :, None] * s[J][:, None, :] * eq
    return self_gram[I] + self_gram[J] - C - np.conj(np.swapaxes(C, 1, 2))


def gram_matrices(sset: MbmSignalSet, I, J) -> np.ndarray:
    """Delta^H Delta for the pairs (I[p], J[p]); complex, shape (P, N, N)."""
    I = np.atleast_1d(np.asarray(I))
    J = np.atleast_1d(np.asarray(J))
    L = sset.map_indices
    s = sset.symbols
    return _pair_grams(_self_grams(L, s), L, s, I, J)


def _ranks(eigs: np.ndarray, tol: float) -> np.ndarray:
    top = eigs.max(axis=-1, keepdims=True)
    return np.sum(eigs > tol * top, axis=-1)


def pair_geometry(sset: MbmSignalSet, i: int, j: int, tol: float = DEFAULT_RANK_TOL) -> PairGeometry:
    if i == j:
        raise ValueError("pair geometry needs two distinct blocks")
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    G = gram_matrices(sset, [i], [j])
    eigs = np.clip(jacobi_eigvalsh(G)[0], 0.0, None)
    rank = int(_ranks(eigs, tol))
    return PairGeometry((i, j), eigs, rank, int(bin(i ^ j).count("1")))


def pep_bound(geometry: PairGeometry | np.ndarray, rho, n_r: int):
    """(1/2) prod_r (1 + sigma_r^2 rho / 4)^(-n_r).

    ``geometry`` may be a PairGeometry or a plain array of squared singular
    values; ``rho`` may be an array.  Zero singular values contribute 1.
    """
    sig2 = geometry.squared_singular_values if isinstance(geometry, PairGeometry) else geometry
    sig2 = np.asarray(sig2, dtype=float)
    rho = np.asarray(rho, dtype=float)
    log_det = np.sum(np.log1p(rho[..., None] * sig2 / 4.0), axis=-1)
    return 0.5 * np.exp(-n_r * log_det)


@dataclass
class PairClasses:
    """Unordered block pairs grouped by identical (Gram, bit distance).

    ``eigs[c]`` are the squared singular values (descending) of class ``c``,
    ``bit_distance[c]`` its label Hamming distance and ``count[c]`` the
    number of unordered pairs in it.
    """

    eigs: np.ndarray
    bit_distance: np.ndarray
    count: np.ndarray
    size: int
    bit_width: int

    @property
    def total_pairs(self) -> int:
        return int(self.count.sum())

    def ranks(self, tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
        return _ranks(self.eigs, tol)


def _pair_chunks(S: int, chunk: int):
    """Yield (I, J) arrays covering all i < j, row-block by row-block."""
    i = 0
    while i < S - 1:
        rows = []
        n = 0
        while i < S - 1 and (n == 0 or n + (S - 1 - i) <= chunk):
            rows.append(i)
            n += S - 1 - i
            i += 1
        I = np.concatenate([np.full(S - 1 - r, r, dtype=np.int64) for r in rows])
        J = np.concatenate([np.arange(r + 1, S, dtype=np.int64) for r in rows])
        yield I, J


def _group_rows(keys: np.ndarray):
    """Exact unique rows of an int64 matrix: (representatives, counts).

    Rows are hashed to one int64 first; every row is then compared against
    its hash representative, falling back to a byte-wise unique on any
    collision.
    """
    mult = np.random.default_rng(0x5EED).integers(1, 1 << 62, size=keys.shape[1])
    with np.errstate(over="ignore"):
        h = keys @ mult
    _, first, inverse, counts = np.unique(h, return_index=True, return_inverse=True, return_counts=True)
    reps = keys[first]
    if np.array_equal(reps[inverse.ravel()], keys):
        return reps, counts
    view = np.ascontiguousarray(keys).view(np.dtype((np.void, 8 * keys.shape[1]))).ravel()
    _, first, counts = np.unique(view, return_index=True, return_counts=True)
    return keys[first], counts


def pair_classes(sset: MbmSignalSet, cap: int = DEFAULT_PAIR_CAP, chunk: int = _CHUNK) -> PairClasses:
    """Sweep every unordered pair once and group them into classes."""
    S = len(sset)
    if S > cap:
        raise CapExceeded(f"|S| = {S} exceeds the pair-sweep cap {cap}")
    N = sset.N
    exact = sset.integer_valued
    L = sset.map_indices
    s = sset.symbols
    self_gram = _self_grams(L, s)
    iu = np.triu_indices(N)
    ius = np.triu_indices(N, 1)
    quantum = 1.0 if exact else 1e-9
    totals: dict = {}
    for I, J in _pair_chunks(S, chunk):
        G = _pair_grams(self_gram, L, s, I, J)
        bd = np.bitwise_count(I ^ J).astype(np.int64)
        keys = np.concatenate(
            [np.rint(G.real[:, iu[0], iu[1]] / quantum), np.rint(G.imag[:, ius[0], ius[1]] / quantum)],
            axis=1,
        ).astype(np.int64)
        keys = np.concatenate([keys, bd[:, None]], axis=1)
        reps, counts = _group_rows(keys)
        for row, c in zip(reps, counts.tolist()):
            k = row.tobytes()
            if k in totals:
                totals[k][1] += c
            else:
                totals[k] = [row, c]
    rows = np.array([v[0] for v in totals.values()])
    counts = np.array([v[1] for v in totals.values()], dtype=np.int64)
    n_up = len(iu[0])
    G = np.zeros((len(rows), N, N), dtype=complex)
    G[:, iu[0], iu[1]] = rows[:, :n_up] * quantum
    G[:, ius[0], ius[1]] += 1j * rows[:, n_up:-1] * quantum
    G = G + np.conj(np.swapaxes(np.triu(G, 1), 1, 2))
    eigs = np.clip(jacobi_eigvalsh(G), 0.0, None)
    order = np.lexsort((rows[:, -1],) + tuple(eigs.T[::-1]))
    return PairClasses(eigs[order], rows[order, -1].astype(np.int64), counts[order], S, sset.bit_width)


def rank_profile(sset_or_classes, tol: float = DEFAULT_RANK_TOL, cap: int = DEFAULT_PAIR_CAP) -> RankProfile:
    classes = sset_or_classes
    if isinstance(classes, MbmSignalSet):
        classes = pair_classes(classes, cap)
    ranks = classes.ranks(tol)
    hist: dict = {}
    for r, c in zip(ranks.tolist(), classes.count.tolist()):
        hist[r] = hist.get(r, 0) + c
    return RankProfile(dict(sorted(hist.items())), comb(classes.size, 2))


def energy_scale(sset: MbmSignalSet, normalize: bool = True) -> float:
    """c^2 such that c * X has unit average energy per channel use."""
    return 1.0 / sset.avg_energy if normalize else 1.0


def union_bound(
    sset_or_classes,
    rho,
    n_r: int,
    energy_scale_sq: float | None = None,
    rank_filter=None,
    tol: float = DEFAULT_RANK_TOL,
) -> np.ndarray:
    """Bit-weighted union bound on BER over all ordered pairs.

    BER(rho) <= (1/|S|) sum_{i != j} PEP(i, j) d_bits(i, j) / kappa, with
    the pair sum taken as twice the unordered sum.  ``energy_scale_sq``
    multiplies every squared singular value (the transmit normalisation);
    by default it is 1 / (average energy per channel use), matching the
    simulator.  ``rank_filter`` optionally restricts the sum to classes
    whose rank satisfies the predicate.
    """
    classes = sset_or_classes
    c2 = energy_scale_sq
    if isinstance(classes, MbmSignalSet):
        if c2 is None:
            c2 = energy_scale(classes)
        classes = pair_classes(classes)
    elif c2 is None:
        raise ValueError("energy_scale_sq is required when passing PairClasses")
    rho = np.atleast_1d(np.asarray(rho, dtype=float))
    weight = 2.0 * classes.count * classes.bit_distance / (classes.size * classes.bit_width)
    if rank_filter is not None:
        weight = np.where(rank_filter(classes.ranks(tol)), weight, 0.0)
    pep = pep_bound(classes.eigs * c2, rho[:, None], n_r)  # (rho, classes)
    terms = pep * weight[None, :]
    return np.array([math.fsum(row) for row in terms])


def snr_db_to_linear(snr_db):
    return 10.0 ** (np.asarray(snr_db, dtype=float) / 10.0)


def bound_to_csv(snr_db, ber) -> str:
    rows = ["snr_db,ber_bound"] + [f"{s:g},{b:.6e}" for s, b in zip(snr_db, ber)]
    return "\n".join(rows) + "\n"


def loglog_slope(rho, ber) -> np.ndarray:
    """Local d log10(BER) / d log10(rho) between consecutive points."""
    lr = np.log10(np.asarray(rho, dtype=float))
    lb = np.log10(np.asarray(ber, dtype=float))
    return np.diff(lb) / np.diff(lr)

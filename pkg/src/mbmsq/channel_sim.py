"""Monte-Carlo BER of MBM block sets over block-Rayleigh fading with ML
detection.

Transmit blocks are scaled by ``c`` so the set's average energy per channel
use is one; noise entries are CN(0, 1/rho), making ``rho`` the SNR per
receive branch.  H is drawn afresh for every block and held over its N
channel uses.

Every chunk of blocks draws from its own stream, seeded by
``SeedSequence(seed, spawn_key=(point, chunk))``, and chunks are
accumulated in order, so results do not depend on the worker count.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .constellation import MbmSignalSet

try:
    from numba import njit
except ImportError:  # pragma: no cover
    njit = None

log = logging.getLogger(__name__)

_GATHER_BUDGET = 1 << 20  # candidate metrics evaluated per chunk


@dataclass
class SimConfig:
    sset: MbmSignalSet
    n_r: int
    snr_points: list[float] = field(default_factory=list)
    min_bit_errors: int = 100
    max_blocks: int = 10_000_000
    seed: int = 0
    normalize: bool = True
    workers: int = 1

    def __post_init__(self):
        if self.n_r < 1:
            raise ValueError("n_r must be >= 1")
        if not all(np.isfinite(self.snr_points)):
            raise ValueError("SNR points must be finite")
        if self.min_bit_errors < 1 or self.max_blocks < 1:
            raise ValueError("stopping rule needs positive limits")


@dataclass
class BerPoint:
    snr_db: float
    ber: float
    bit_errors: int
    bits_simulated: int
    blocks: int
    n_r: int | None = None
    seed: int | None = None


def draw_channel(n_r: int, n_m: int, rng: np.random.Generator, batch: int | None = None) -> np.ndarray:
    """i.i.d. CN(0, 1) entries; shape (n_r, n_m) or (batch, n_r, n_m)."""
    shape = (n_r, n_m) if batch is None else (batch, n_r, n_m)
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def ebn0_from_snr(snr_db, eta: float):
    """E_b/N_0 in dB for a per-branch SNR in dB at ``eta`` bits per use."""
    if eta <= 0:
        raise ValueError("rate must be positive")
    return np.asarray(snr_db, dtype=float) - 10.0 * np.log10(eta)


class MLDetector:
    """Exhaustive ML search over a signal set, batched over blocks.

    ||Y - c H X||_F^2 splits over channel uses; with z = h_l^H y_k and
    g = ||h_l||^2 the per-use metric (dropping ||y_k||^2) is
    c^2 |v|^2 g - 2 c Re(conj(v) z).  Candidates sum N table entries.
    """

    def __init__(self, sset: MbmSignalSet, normalize: bool = True, use_numba: bool | None = None):
        self.sset = sset
        self.use_numba = (_search_kernel is not None) if use_numba is None else use_numba
        self.scale = 1.0 / np.sqrt(sset.avg_energy) if normalize else 1.0
        values, inv = np.unique(sset.symbols.ravel(), return_inverse=True)
        self.values = values
        vidx = inv.reshape(sset.symbols.shape)
        n_v = len(values)
        k = np.arange(sset.N)[None, :]
        self.flat_index = np.ascontiguousarray((k * sset.n_m + sset.map_indices) * n_v + vidx)  # (S, N)

    def transmit(self, H: np.ndarray, tx: np.ndarray) -> np.ndarray:
        """Noise-free c H X for blocks ``tx``; shape (B, n_r, N)."""
        L = self.sset.map_indices[tx]  # (B, N)
        s = self.sset.symbols[tx]
        cols = np.take_along_axis(H, L[:, None, :], axis=2)  # (B, n_r, N)
        return self.scale * cols * s[:, None, :]

    def detect(self, H: np.ndarray, Y: np.ndarray) -> np.ndarray:
        c = self.scale
        z = np.einsum("brl,brk->bkl", np.conj(H), Y)  # (B, N, N_m)
        g = np.sum(H.real ** 2 + H.imag ** 2, axis=1)  # (B, N_m)
        v = self.values
        T = (c * c) * (np.abs(v) ** 2)[None, None, None, :] * g[:, None, :, None] - 2.0 * c * (
            z.real[..., None] * v.real + z.imag[..., None] * v.imag
        )
        T = np.ascontiguousarray(T.reshape(len(H), -1))
        if self.use_numba:
            return _search_kernel(T, self.flat_index)
        return _search_numpy(T, self.flat_index)


def _search_numpy(T: np.ndarray, idx: np.ndarray) -> np.ndarray:
    metric = T[:, idx[:, 0]]
    for k in range(1, idx.shape[1]):
        metric += T[:, idx[:, k]]
    return np.argmin(metric, axis=1)


def _search_loops(T, idx):
    B = T.shape[0]
    S, N = idx.shape
    out = np.empty(B, dtype=np.int64)
    for b in range(B):
        row = T[b]
        best = np.inf
        arg = 0
        for i in range(S):
            m = 0.0
            for k in range(N):
                m += row[idx[i, k]]
            if m < best:  # strict: ties keep the lowest index
                best = m
                arg = i
        out[b] = arg
    return out


_search_kernel = njit(cache=True, nogil=True)(_search_loops) if njit is not None else None


def simulate_block(sset: MbmSignalSet, block_bits, H: np.ndarray, rho: float,
                   rng: np.random.Generator, normalize: bool = True) -> tuple[int, ...]:
    """Send one labelled block through ``H`` and return the ML bit decision.

    ``rho = inf`` gives a noiseless channel.
    """
    det = MLDetector(sset, normalize)
    tx = np.array([sset.index_from_bits(block_bits)])
    Hb = np.asarray(H, dtype=complex)[None]
    Y = det.transmit(Hb, tx)
    if np.isfinite(rho):
        sigma = np.sqrt(0.5 / rho)
        Y = Y + sigma * (rng.standard_normal(Y.shape) + 1j * rng.standard_normal(Y.shape))
    return sset.bits(int(det.detect(Hb, Y)[0]))


def chunk_size(sset: MbmSignalSet) -> int:
    return int(max(16, min(1 << 15, _GATHER_BUDGET // len(sset))))


def _run_chunk(detector: MLDetector, n_r: int, rho: float, blocks: int, seed: int, key):
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))
    S = len(detector.sset)
    tx = rng.integers(0, S, size=blocks)
    H = draw_channel(n_r, detector.sset.n_m, rng, batch=blocks)
    Y = detector.transmit(H, tx)
    if np.isfinite(rho):
        sigma = np.sqrt(0.5 / rho)
        Y = Y + sigma * (rng.standard_normal(Y.shape) + 1j * rng.standard_normal(Y.shape))
    rx = detector.detect(H, Y)
    return int(np.bitwise_count(tx ^ rx).sum())


def _simulate_point(detector: MLDetector, n_r: int, snr_db: float, point: int, cfg: SimConfig,
                    pool: ProcessPoolExecutor | None) -> BerPoint:
    rho = 10.0 ** (snr_db / 10.0)
    B = chunk_size(detector.sset)
    kappa = detector.sset.bit_width
    errors = blocks = 0
    chunk = 0
    while errors < cfg.min_bit_errors and blocks < cfg.max_blocks:
        wave = max(1, cfg.workers)
        sizes, keys = [], []
        planned = blocks
        for _ in range(wave):
            if planned >= cfg.max_blocks:
                break
            n = min(B, cfg.max_blocks - planned)
            sizes.append(n)
            keys.append((point, chunk + len(keys)))
            planned += n
        if pool is None:
            results = [_run_chunk(detector, n_r, rho, n, cfg.seed, k) for n, k in zip(sizes, keys)]
        else:
            futs = [pool.submit(_run_chunk, detector, n_r, rho, n, cfg.seed, k) for n, k in zip(sizes, keys)]
            results = [f.result() for f in futs]
        # accumulate in chunk order and stop where a serial run would
        for n, e in zip(sizes, results):
            errors += e
            blocks += n
            chunk += 1
            if errors >= cfg.min_bit_errors:
                break
    bits = blocks * kappa
    log.debug("snr=%.2f dB n_r=%d: %d errors in %d blocks", snr_db, n_r, errors, blocks)
    return BerPoint(float(snr_db), errors / bits, errors, bits, blocks, n_r, cfg.seed)


def _sweep(cfg: SimConfig, points: list[tuple[float, int]]) -> list[BerPoint]:
    detector = MLDetector(cfg.sset, cfg.normalize)
    pool = ProcessPoolExecutor(cfg.workers) if cfg.workers > 1 else None
    try:
        return [_simulate_point(detector, n_r, snr, p, cfg, pool) for p, (snr, n_r) in enumerate(points)]
    finally:
        if pool is not None:
            pool.shutdown()


def ber_curve(cfg: SimConfig) -> list[BerPoint]:
    """BER at each of ``cfg.snr_points`` (dB)."""
    return _sweep(cfg, [(snr, cfg.n_r) for snr in cfg.snr_points])


def ber_vs_nr(cfg: SimConfig, nr_list, snr_db: float) -> list[BerPoint]:
    """BER at a fixed SNR for each receive-antenna count in ``nr_list``."""
    return _sweep(cfg, [(snr_db, int(n)) for n in nr_list])


def ber_points_to_csv(points: list[BerPoint], by: str = "snr_db") -> str:
    head = "n_r" if by == "n_r" else "snr_db"
    rows = [f"{head},ber,bit_errors,bits,blocks,seed"]
    for p in points:
        x = p.n_r if by == "n_r" else f"{p.snr_db:g}"
        rows.append(f"{x},{p.ber:.6e},{p.bit_errors},{p.bits_simulated},{p.blocks},{p.seed}")
    return "\n".join(rows) + "\n"


def crossing(xs, bers, target: float) -> float:
    """x where log10(BER) first falls through ``target``, by linear
    interpolation between the bracketing points; ``nan`` if never."""
    xs = np.asarray(xs, dtype=float)
    lb = np.log10(np.maximum(np.asarray(bers, dtype=float), 1e-300))
    lt = np.log10(target)
    for i in range(len(xs) - 1):
        if lb[i] >= lt > lb[i + 1]:
            return float(xs[i] + (lt - lb[i]) * (xs[i + 1] - xs[i]) / (lb[i + 1] - lb[i]))
    return float("nan")


def bracket_crossing(cfg: SimConfig, target: float, start: float, step: float,
                     axis: str = "snr", fixed: float | None = None, max_points: int = 40):
    """Walk ``start, start + step, ...`` until BER drops below ``target``.

    ``axis="snr"`` steps the SNR in dB at ``cfg.n_r``; ``axis="n_r"`` steps
    the antenna count at SNR ``fixed``.  If the first point is already
    below target the walk goes the other way.  Returns ``(x, points)``,
    with ``x`` the interpolated crossing (``nan`` if never bracketed).
    """
    detector = MLDetector(cfg.sset, cfg.normalize)
    pool = ProcessPoolExecutor(cfg.workers) if cfg.workers > 1 else None

    def run(x, p):
        if axis == "snr":
            return _simulate_point(detector, cfg.n_r, x, p, cfg, pool)
        return _simulate_point(detector, int(x), fixed, p, cfg, pool)

    try:
        pts = {}
        x = start
        pts[x] = run(x, 0)
        direction = 1 if pts[x].ber >= target else -1
        for p in range(1, max_points):
            x = x + direction * step
            if axis == "n_r" and x < 1:
                break
            pts[x] = run(x, p)
            lo, hi = (x - step, x) if direction > 0 else (x, x + step)
            if pts[lo].ber >= target > pts[hi].ber:
                break
    finally:
        if pool is not None:
            pool.shutdown()
    xs = sorted(pts)
    points = [pts[v] for v in xs]
    return crossing(xs, [q.ber for q in points], target), points

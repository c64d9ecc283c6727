"""Shortened Reed-Solomon codebooks used as MAP-index alphabets."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import product

import numpy as np

from .gf2m import Field


class CodeParameterError(ValueError):
    pass


def rs_generator_poly(field: Field, n_parity: int) -> list[int]:
    """Monic g(x) = prod_{i=1}^{n_parity} (x - alpha^i), highest degree first."""
    g = [1]
    for i in range(1, n_parity + 1):
        root = field.pow(field.alpha.value, i)
        nxt = g + [0]
        for j, c in enumerate(g):
            nxt[j + 1] ^= field.mul(c, root)
        g = nxt
    return g


def _rs_parity(field: Field, msg: list[int], gen: list[int]) -> list[int]:
    # remainder of msg(x) * x^(n-k) divided by g(x); msg highest degree first
    n_par = len(gen) - 1
    rem = list(msg) + [0] * n_par
    for i in range(len(msg)):
        c = rem[i]
        if c:
            for j in range(1, len(gen)):
                rem[i + j] ^= field.mul(gen[j], c)
    return rem[len(msg):]


@dataclass(frozen=True, eq=False)
class MapIndexCodebook:
    """An (n, k) shortened RS code over ``field``, fully enumerated.

    ``codewords[i]`` is the encoding of the message whose symbols, read as
    base-``q`` digits with the first symbol most significant, equal ``i``.
    """

    field: Field
    n: int
    k: int
    codewords: np.ndarray
    generator: tuple[int, ...]

    @property
    def q(self) -> int:
        return self.field.order

    @property
    def parent_params(self) -> tuple[int, int]:
        n_parent = self.q - 1
        return n_parent, self.k + n_parent - self.n

    @property
    def d_min(self) -> int:
        return self.n - self.k + 1

    def __len__(self) -> int:
        return len(self.codewords)

    def message_of(self, index: int) -> list[int]:
        digits = []
        for _ in range(self.k):
            index, r = divmod(index, self.q)
            digits.append(r)
        return digits[::-1]

    def index_of(self, message) -> int:
        idx = 0
        for s in message:
            idx = idx * self.q + int(s)
        return idx


def _encode_raw(field: Field, n: int, k: int, gen: list[int], message) -> list[int]:
    n_parent = field.order - 1
    padded = [0] * (n_parent - n) + [int(s) for s in message]
    parity = _rs_parity(field, padded, gen)
    # the parent has exactly n - k parity symbols, so nothing is punctured
    return padded[n_parent - n:] + parity


def build_shortened_rs(field: Field, n: int, k: int) -> MapIndexCodebook:
    """Enumerate the (n, k) shortened RS code over ``field``.

    The parent code is RS(q-1, k + q-1-n) with generator roots
    alpha^1..alpha^(n-k).  Messages are left-padded with zeros, encoded
    systematically (message in the high-degree positions), and the padding
    stripped again.
    """
    n_parent = field.order - 1
    if not 1 <= k < n:
        raise CodeParameterError(f"need 1 <= k < n, got n={n}, k={k}")
    if n > n_parent:
        raise CodeParameterError(
            f"n={n} exceeds the RS length {n_parent} of GF({field.order})"
        )
    gen = rs_generator_poly(field, n - k)
    q = field.order
    words = np.empty((q ** k, n), dtype=np.int64)
    for i, msg in enumerate(product(range(q), repeat=k)):
        words[i] = _encode_raw(field, n, k, gen, msg)
    words.setflags(write=False)
    return MapIndexCodebook(field, n, k, words, tuple(gen))


def encode(codebook: MapIndexCodebook, message) -> np.ndarray:
    """Codeword (MAP-index vector) for a length-k message of MAP indices."""
    message = [int(s) for s in message]
    if len(message) != codebook.k:
        raise CodeParameterError(f"message must have {codebook.k} symbols")
    if any(not 0 <= s < codebook.q for s in message):
        raise CodeParameterError(f"message symbols must lie in 0..{codebook.q - 1}")
    return codebook.codewords[codebook.index_of(message)].copy()


def hamming_spectrum(codebook: MapIndexCodebook) -> dict[int, int]:
    """Unordered-pair counts of every Hamming distance in the codebook."""
    words = codebook.codewords
    counts: Counter = Counter()
    for i in range(len(words) - 1):
        d = np.count_nonzero(words[i + 1:] != words[i], axis=1)
        vals, cnt = np.unique(d, return_counts=True)
        counts.update(dict(zip(vals.tolist(), cnt.tolist())))
    return dict(sorted(counts.items()))


def map_indices_to_mirror_bits(index: int, m: int) -> tuple[str, ...]:
    """ON/OFF state of each mirror; Mirror 1 is the most significant bit."""
    if not 0 <= index < 1 << m:
        raise CodeParameterError(f"MAP index {index} out of range for m={m}")
    return tuple("OFF" if index >> (m - 1 - i) & 1 else "ON" for i in range(m))


def dump_codebook(codebook: MapIndexCodebook) -> str:
    lines = [
        f"# rs n={codebook.n} k={codebook.k} m={codebook.field.m} "
        f"poly={codebook.field.primitive_poly:#x}"
    ]
    lines += [" ".join(str(v) for v in w) for w in codebook.codewords]
    return "\n".join(lines) + "\n"

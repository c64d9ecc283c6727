"""Set partitioning and iterated squaring from an M-PAM seed.

Sets are trees: a node is a sorted scalar alphabet, a Cartesian product of
two nodes, or a disjoint union of two nodes.  The tree shape is what tells
``partition2`` how to split a product set into its two cosets.

All coordinates are odd integers, so distances are exact integers.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np


class ConstructionError(ValueError):
    pass


def min_sq_distance(points: np.ndarray) -> float:
    """Brute-force minimum squared Euclidean distance; ``inf`` below 2 points."""
    points = np.asarray(points)
    if len(points) < 2:
        return float("inf")
    if np.iscomplexobj(points):
        points = np.concatenate([points.real, points.imag], axis=1)
    pts = points.astype(np.int64) if np.all(points == np.round(points)) else points
    best = None
    for i in range(len(pts) - 1):
        d = np.sum((pts[i + 1:] - pts[i]) ** 2, axis=1).min()
        best = d if best is None else min(best, d)
    return int(best) if pts.dtype == np.int64 else float(best)


@dataclass(frozen=True, eq=False)
class PartitionNode:
    kind: str  # "scalar" | "product" | "union" | "empty"
    parts: tuple = ()
    values: tuple = ()  # scalar nodes only
    dim: int = 1

    @cached_property
    def elements(self) -> np.ndarray:
        """Points as an integer array of shape (count, dim)."""
        if self.kind == "empty":
            return np.zeros((0, self.dim), dtype=np.int64)
        if self.kind == "scalar":
            return np.array(self.values, dtype=np.int64).reshape(-1, 1)
        a, b = (p.elements for p in self.parts)
        if self.kind == "union":
            return np.concatenate([a, b])
        left = np.repeat(a, len(b), axis=0)
        right = np.tile(b, (len(a), 1))
        return np.concatenate([left, right], axis=1)

    @property
    def depth(self) -> int:
        return self.dim.bit_length() - 1

    @cached_property
    def min_dist(self):
        return min_sq_distance(self.elements)

    def __len__(self) -> int:
        if self.kind == "empty":
            return 0
        if self.kind == "scalar":
            return len(self.values)
        a, b = self.parts
        return len(a) + len(b) if self.kind == "union" else len(a) * len(b)

    @property
    def children(self) -> tuple["PartitionNode", "PartitionNode"]:
        return partition2(self)


def _empty(dim: int) -> PartitionNode:
    return PartitionNode("empty", dim=dim)


def _scalar(values) -> PartitionNode:
    return PartitionNode("scalar", values=tuple(sorted(int(v) for v in values)))


def _product(a: PartitionNode, b: PartitionNode) -> PartitionNode:
    if a.kind == "empty" or b.kind == "empty":
        return _empty(a.dim + b.dim)
    return PartitionNode("product", (a, b), dim=a.dim + b.dim)


def _union(a: PartitionNode, b: PartitionNode) -> PartitionNode:
    if a.kind == "empty":
        return b
    if b.kind == "empty":
        return a
    return PartitionNode("union", (a, b), dim=a.dim)


def base_pam(M: int) -> PartitionNode:
    """The M-PAM alphabet {+-1, +-3, ..., +-(M-1)} as a partitionable set."""
    if M < 2 or M & (M - 1):
        raise ConstructionError(f"M must be a power of two >= 2, got {M}")
    return _scalar(range(-(M - 1), M, 2))


def scalar_set(values) -> PartitionNode:
    """Arbitrary scalar alphabet, split by alternating sorted rank."""
    if len(set(values)) != len(values):
        raise ConstructionError("scalar set has repeated values")
    return _scalar(values)


def partition2(node: PartitionNode) -> tuple[PartitionNode, PartitionNode]:
    """Two-way partition of ``node``.

    Scalar sets split into even- and odd-ranked values.  A product A x B
    splits into (A0xB0 u A1xB1, A0xB1 u A1xB0) using the children of A and
    B.  A union splits back into its two members.  A singleton yields
    itself and an empty sibling.
    """
    kind = node.kind
    if kind == "empty":
        return node, node
    if len(node) == 1:
        return node, _empty(node.dim)
    if kind == "scalar":
        return _scalar(node.values[0::2]), _scalar(node.values[1::2])
    if kind == "union":
        return node.parts
    a, b = node.parts
    a0, a1 = partition2(a)
    b0, b1 = partition2(b)
    return (
        _union(_product(a0, b0), _product(a1, b1)),
        _union(_product(a0, b1), _product(a1, b0)),
    )


def square(subsets: tuple[PartitionNode, PartitionNode]) -> PartitionNode:
    """U = T0^2 u T1^2 for disjoint T0, T1."""
    t0, t1 = subsets
    if len(t0) and len(t1):
        e0 = {tuple(r) for r in t0.elements.tolist()}
        if any(tuple(r) in e0 for r in t1.elements.tolist()):
            raise ConstructionError("squared subsets overlap")
    return _union(_product(t0, t0), _product(t1, t1))


@dataclass
class SquaringStage:
    """One partition-and-square step applied to one parent branch."""

    level: int
    parent: PartitionNode
    halves: tuple[PartitionNode, PartitionNode]
    label: tuple[int, ...]

    @property
    def squared(self) -> PartitionNode:
        return square(self.halves)


@dataclass
class SymbolConstellation:
    """Complex symbol vectors produced by the multilevel construction.

    ``branches`` are the 2^L leaf sets (real, dimension 2^L) in label order,
    ``labels`` their multipart labels.  ``vectors`` stacks the leaves in
    that order after pairing real coordinates into complex entries.
    """

    M: int
    L: int
    branches: list[PartitionNode]
    labels: list[tuple[int, ...]]
    stages: list[SquaringStage]

    @property
    def P(self) -> int:
        return self.M.bit_length() - 1

    @property
    def N(self) -> int:
        return 1 << (self.L - 1)

    @cached_property
    def real_vectors(self) -> np.ndarray:
        return np.concatenate([b.elements for b in self.branches])

    @cached_property
    def vectors(self) -> np.ndarray:
        return to_complex(self.real_vectors)

    def __len__(self) -> int:
        return len(self.real_vectors)

    @cached_property
    def min_dist(self) -> int:
        """Brute-force minimum over the whole union of leaves."""
        return min_sq_distance(self.real_vectors)

    @cached_property
    def branch_min_dist(self) -> int:
        """Smallest within-leaf minimum distance."""
        return min(b.min_dist for b in self.branches)

    def leaf_distance(self, i: int, j: int):
        return min_sq_distance_between(self.branches[i].elements, self.branches[j].elements)


def min_sq_distance_between(a: np.ndarray, b: np.ndarray):
    diff = a[:, None, :] - b[None, :, :]
    return int(np.min(np.sum(diff * diff, axis=2)))


def to_complex(real_vectors: np.ndarray) -> np.ndarray:
    """Pair coordinates (2i, 2i+1) into re + j*im."""
    real_vectors = np.asarray(real_vectors)
    if real_vectors.shape[1] % 2:
        raise ConstructionError("odd real dimension cannot be complexified")
    return real_vectors[:, 0::2] + 1j * real_vectors[:, 1::2]


def expected_size(M: int, L: int) -> int:
    P = M.bit_length() - 1
    if P == 1:
        return 2
    return 2 ** ((1 << L) * (P - 2) + L + 2)


def build_constellation(M: int, L: int) -> SymbolConstellation:
    """Iterate partition + per-branch squaring ``L`` times from M-PAM.

    Branches stay separate through every stage and are only pooled at the
    end; the result has ``N = 2^(L-1)`` complex dimensions.
    """
    if L < 1:
        raise ConstructionError(f"L must be >= 1, got {L}")
    branches = [base_pam(M)]
    labels: list[tuple[int, ...]] = [()]
    stages = []
    for level in range(L):
        nxt, nxt_labels = [], []
        for branch, label in zip(branches, labels):
            halves = partition2(branch)
            stages.append(SquaringStage(level, branch, halves, label))
            for bit, half in enumerate(halves):
                if len(half):
                    nxt.append(_product(half, half))
                    nxt_labels.append(label + (bit,))
                elif M > 2:
                    raise ConstructionError(
                        f"M={M}, L={L}: branch {label + (bit,)} became empty"
                    )
        branches, labels = nxt, nxt_labels
    return SymbolConstellation(M, L, branches, labels, stages)


def levels_for_block_length(N: int) -> int:
    """Number of squaring stages giving N complex dimensions (L = log2(2N))."""
    if N < 1 or N & (N - 1):
        raise ConstructionError(f"block length N must be a power of two, got {N}")
    return (2 * N).bit_length() - 1


def dump_constellation(const: SymbolConstellation) -> str:
    lines = [f"# squaring M={const.M} L={const.L} size={len(const)} dmin={const.min_dist}"]
    for v in const.vectors:
        lines.append(" ".join(f"{int(z.real)}:{int(z.imag)}" for z in v))
    return "\n".join(lines) + "\n"

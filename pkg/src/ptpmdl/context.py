"""Context statistics, MDL pruning and the natural code of a tree source.

Conventions
-----------
A state is written ``s = x[i-L] ... x[i-1]``, most recent symbol rightmost.
The context index of position ``i`` puts ``x[i-1]`` in the most significant
bit and ``x[i-D]`` in the least significant bit, so a state of depth ``L``
fixes the top ``L`` bits. State ``(L, v)`` therefore covers the contiguous
index range ``[v << (D - L), (v + 1) << (D - L))``. Its children ``0s`` and
``1s`` are ``(L + 1, 2v)`` and ``(L + 1, 2v + 1)``, and a depth-first walk
that takes child ``0s`` first visits the leaves in increasing index order.
"""

from dataclasses import dataclass

import numpy as np
from numba import njit

from .bitio import BitReader, as_bits
from .errors import BlockTooShort, DepthMismatch, MalformedStructure
from .quantizer import QuantizerSpec, quantize_array, representation_level


@njit(cache=True, nogil=True)
def _indices_kernel(bits, depth):
    n = bits.shape[0]
    out = np.empty(n - depth, np.int64)
    c = np.int64(0)
    for j in range(depth):
        c |= np.int64(bits[j]) << j
    top = depth - 1
    for i in range(depth, n):
        out[i - depth] = c
        if depth > 0:
            c = (c >> 1) | (np.int64(bits[i]) << top)
    return out


@njit(cache=True, nogil=True)
def _count_kernel(bits, depth):
    n = bits.shape[0]
    counts = np.zeros((1 << depth, 2), np.int64)
    c = np.int64(0)
    for j in range(depth):
        c |= np.int64(bits[j]) << j
    top = depth - 1
    ops = depth
    for i in range(depth, n):
        x = np.int64(bits[i])
        counts[c, x] += 1
        if depth > 0:
            c = (c >> 1) | (x << top)
        ops += 1
    return counts, ops


def context_indices(block, depth):
    """Context index of every position ``depth .. M-1`` of ``block``."""
    bits = as_bits(block)
    if bits.size < depth:
        raise BlockTooShort(f"block of {bits.size} bits is shorter than depth {depth}")
    return _indices_kernel(bits, depth)


@dataclass
class ContextTree:
    """Symbol counts of all ``2**depth`` leaf contexts.

    ``counts[c, a]`` is the number of times symbol ``a`` followed context
    index ``c``.
    """

    depth: int
    counts: np.ndarray
    total_symbols: int
    ops: int = 0

    @classmethod
    def empty(cls, depth):
        return cls(depth, np.zeros((1 << depth, 2), np.int64), 0)

    def level_counts(self, level):
        """Counts of the ``2**level`` nodes at depth ``level``."""
        return self.counts.reshape(1 << level, -1, 2).sum(axis=1)

    def node_counts(self, level, prefix):
        shift = self.depth - level
        return self.counts[prefix << shift:(prefix + 1) << shift].sum(axis=0)


def accumulate_block_counts(block, depth):
    bits = as_bits(block)
    if bits.size < depth:
        raise BlockTooShort(f"block of {bits.size} bits is shorter than depth {depth}")
    counts, ops = _count_kernel(bits, depth)
    return ContextTree(depth, counts, bits.size - depth, ops)


def merge_counts(trees):
    """Elementwise sum of block count tables; consumes ``trees`` lazily."""
    merged = None
    for t in trees:
        if merged is None:
            merged = ContextTree(t.depth, t.counts.copy(), t.total_symbols)
            continue
        if t.depth != merged.depth:
            raise DepthMismatch(f"cannot merge depth {t.depth} into depth {merged.depth}")
        merged.counts += t.counts
        merged.total_symbols += t.total_symbols
    if merged is None:
        raise ValueError("nothing to merge")
    return merged


def _costs(n0, n1, K):
    n0 = np.asarray(n0, dtype=np.float64)
    n1 = np.asarray(n1, dtype=np.float64)
    n = n0 + n1
    theta = np.divide(n1, n, out=np.full(n.shape, 0.5), where=n > 0)
    k, r = quantize_array(theta, K)
    cost = np.log2(K) - n0 * np.log2(1.0 - r) - n1 * np.log2(r)
    return cost, k, r


def state_cost(n0, n1, K):
    """Two-pass code length of one state: index bits plus likelihood bits.

    Returns ``(bits, bin index, representation level)``.
    """
    if K < 1 or n0 < 0 or n1 < 0:
        raise ValueError("need K >= 1 and non-negative counts")
    cost, k, r = _costs(n0, n1, K)
    return float(cost), int(k), float(r)


@dataclass
class MdlSource:
    """A pruned tree source with quantized parameters.

    States are stored as parallel arrays in depth-first order (child ``0s``
    before ``1s``). ``counts`` is only known on the encoder side.
    """

    depth: int
    state_depths: np.ndarray
    state_prefixes: np.ndarray
    k: np.ndarray
    r: np.ndarray
    levels: np.ndarray
    coarse: np.ndarray
    counts: np.ndarray = None
    mdl_root: float = float("nan")
    ops: int = 0
    scheme: int = 0

    def __len__(self):
        return len(self.state_depths)

    def labels(self):
        """State strings, oldest symbol first."""
        out = []
        for L, v in zip(self.state_depths, self.state_prefixes):
            out.append(format(int(v), f"0{int(L)}b")[::-1] if L else "")
        return out

    def ranges(self):
        shift = self.depth - self.state_depths
        start = self.state_prefixes << shift
        return start, start + (np.int64(1) << shift)


def prune_mdl(tree, quant=None):
    """Bottom-up MDL pruning of the full depth-D context tree.

    Leaves cost ``l_s``; an inner node costs one natural-code bit plus the
    cheaper of its own ``l_s`` and its children's total. Ties prune.
    """
    D = tree.depth
    if quant is None:
        quant = QuantizerSpec(0, max(tree.total_symbols, 1))
    K = quant.k_fine
    level = tree.counts
    mdl, _, _ = _costs(level[:, 0], level[:, 1], K)
    keep = [None] * D
    ops = 1 << D
    for L in range(D - 1, -1, -1):
        level = level.reshape(-1, 2, 2).sum(axis=1)
        own, _, _ = _costs(level[:, 0], level[:, 1], K)
        split = mdl.reshape(-1, 2).sum(axis=1)
        keep[L] = split < own
        mdl = 1.0 + np.where(keep[L], split, own)
        ops += 1 << L

    depths, prefixes = [], []
    stack = [(0, 0)]
    while stack:
        L, v = stack.pop()
        ops += 1
        if L < D and keep[L][v]:
            stack.append((L + 1, 2 * v + 1))
            stack.append((L + 1, 2 * v))
        else:
            depths.append(L)
            prefixes.append(v)
    src = _with_counts(D, np.array(depths, np.int64), np.array(prefixes, np.int64), tree)
    src.mdl_root = float(mdl[0])
    src.ops = ops
    assign_levels(src, np.full(len(src), K, np.int64))
    return src


def _with_counts(D, depths, prefixes, tree):
    n = len(depths)
    src = MdlSource(D, depths, prefixes, np.zeros(n, np.int64), np.zeros(n),
                    np.ones(n, np.int64), np.zeros(n, bool))
    if tree is not None:
        start, stop = src.ranges()
        cum = np.vstack([np.zeros((1, 2), np.int64), np.cumsum(tree.counts, axis=0)])
        src.counts = cum[stop] - cum[start]
    return src


def assign_levels(src, levels, coarse=None):
    """Quantize every state's ML estimate with its own level count."""
    src.levels = np.asarray(levels, np.int64)
    if coarse is not None:
        src.coarse = np.asarray(coarse, bool)
    n0, n1 = src.counts[:, 0], src.counts[:, 1]
    _, src.k, src.r = _costs(n0, n1, src.levels)
    return src


def requantize(src, quant):
    """Re-quantize a pruned source according to ``quant.scheme``."""
    S = len(src)
    n = src.counts.sum(axis=1)
    if quant.scheme == 0:
        levels, coarse = np.full(S, quant.k_fine), np.zeros(S, bool)
    elif quant.scheme == 1:
        levels, coarse = np.full(S, quant.k_effective(S)), np.zeros(S, bool)
    else:
        coarse = n < quant.tau
        levels = np.where(coarse, quant.k_coarse, quant.k_fine)
    src.scheme = quant.scheme
    return assign_levels(src, levels, coarse)


def encode_structure(src):
    """Natural code: one bit per node shallower than D, 1 = internal."""
    D = src.depth
    bits = []
    i = 0
    stack = [(0, 0)]
    while stack:
        L, v = stack.pop()
        is_leaf = i < len(src) and src.state_depths[i] == L and src.state_prefixes[i] == v
        if is_leaf:
            i += 1
            if L < D:
                bits.append(0)
        else:
            if L >= D:
                raise MalformedStructure("state set is not complete")
            bits.append(1)
            stack.append((L + 1, 2 * v + 1))
            stack.append((L + 1, 2 * v))
    if i != len(src):
        raise MalformedStructure("state set is not proper")
    return np.array(bits, np.uint8)


def decode_structure(bits, depth):
    """Parse a natural code into ``(state depths, state prefixes)``.

    ``bits`` is a ``BitReader`` (consumed in place) or a 0/1 sequence.
    """
    reader = bits if isinstance(bits, BitReader) else _SeqReader(bits)
    depths, prefixes = [], []
    stack = [(0, 0)]
    while stack:
        L, v = stack.pop()
        internal = 0
        if L < depth:
            try:
                internal = reader.read_bit()
            except EOFError:
                raise MalformedStructure("natural code ended early") from None
        if internal:
            stack.append((L + 1, 2 * v + 1))
            stack.append((L + 1, 2 * v))
        else:
            depths.append(L)
            prefixes.append(v)
    return np.array(depths, np.int64), np.array(prefixes, np.int64)


class _SeqReader:
    def __init__(self, bits):
        self._bits = list(bits)
        self.pos = 0

    def read_bit(self):
        if self.pos >= len(self._bits):
            raise EOFError
        self.pos += 1
        return int(self._bits[self.pos - 1])


def source_from_structure(depth, depths, prefixes, k, levels, coarse=None):
    """Rebuild a decoder-side source from its structure and bin indices."""
    n = len(depths)
    k = np.asarray(k, np.int64)
    levels = np.asarray(levels, np.int64)
    return MdlSource(depth, np.asarray(depths, np.int64), np.asarray(prefixes, np.int64),
                     k, representation_level(k, levels), levels,
                     np.zeros(n, bool) if coarse is None else np.asarray(coarse, bool))


@dataclass
class GeneratorTable:
    """Context index -> generating state and its probability of a 1."""

    state: np.ndarray
    prob: np.ndarray
    ops: int = 0

    def __len__(self):
        return len(self.state)


def build_generator_table(src):
    lengths = np.int64(1) << (src.depth - src.state_depths)
    if lengths.sum() != 1 << src.depth:
        raise MalformedStructure("states do not partition the context space")
    state = np.repeat(np.arange(len(src), dtype=np.int64), lengths)
    return GeneratorTable(state, src.r[state], ops=int(lengths.sum()))

"""Two-pass block codec.

Pass I counts contexts in every block independently, merges the counts,
prunes one MDL tree source for the whole input and quantizes its
parameters. Pass II arithmetic-codes each block on its own against that
shared model. The first ``depth`` bits of each block have no usable
context, so they are stored raw. Blocks no longer than ``depth`` are stored
raw in full.

Blocks are mapped over a thread pool when ``workers > 1``. The numba kernels
release the GIL. Output is byte-identical to a serial run.
"""

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from . import container as ct
from .arith import DEFAULT_PRECISION, ArithDecoder, ArithEncoder, decode_block, discretize, encode_block
from .bitio import BitReader, BitWriter, as_bits, bytes_to_bits
from .context import (ContextTree, accumulate_block_counts, build_generator_table, decode_structure,
                      encode_structure, merge_counts, prune_mdl, requantize, source_from_structure)
from .errors import BitstreamUnderrun, BlockOutOfRange, ContainerError, EmptyInput
from .quantizer import QuantizerSpec, default_tau

MAX_DEFAULT_DEPTH = 20
# the container has no precision field; the codec always uses 32-bit registers
PRECISION = DEFAULT_PRECISION


def default_depth(n_bits, blocks):
    size = -(-n_bits // blocks)
    return min(size.bit_length() - 1, MAX_DEFAULT_DEPTH)


@dataclass(frozen=True)
class BlockPlan:
    """Partition of ``n_bits`` input bits into ``blocks`` ceil-sized blocks.

    Trailing blocks may be short or empty when ``blocks`` does not divide
    ``n_bits``.
    """

    n_bits: int
    blocks: int
    depth: int

    @classmethod
    def make(cls, n_bits, blocks, depth=None):
        if blocks < 1:
            raise ValueError("need at least one block")
        if depth is None:
            depth = default_depth(n_bits, blocks)
        if not 0 <= depth <= ct.MAX_DEPTH:
            raise ValueError(f"depth must be within 0..{ct.MAX_DEPTH}")
        return cls(n_bits, blocks, depth)

    @property
    def block_size(self):
        return -(-self.n_bits // self.blocks)

    def bounds(self, b):
        """Half-open bit range of 0-based block ``b``."""
        size = self.block_size
        return min(b * size, self.n_bits), min((b + 1) * size, self.n_bits)

    def length(self, b):
        lo, hi = self.bounds(b)
        return hi - lo

    def degenerate(self, b):
        return self.length(b) <= self.depth


@dataclass
class BlockStats:
    index: int
    length: int
    payload_bits: int = 0
    raw_bits: int = 0
    ideal_bits: float = 0.0
    count_ops: int = 0
    code_ops: int = 0
    seconds: float = 0.0

    @property
    def symbol_ops(self):
        return self.count_ops + self.code_ops

    @property
    def degenerate(self):
        return self.code_ops == 0 and self.raw_bits == self.length


@dataclass
class LengthBudget:
    """Analytic code length: structure + parameters, then raw + finalisation + likelihood."""

    structure_bits: int
    param_bits: float
    raw_bits: int
    final_bits: int
    likelihood_bits: float

    @property
    def pass1(self):
        return self.structure_bits + self.param_bits

    @property
    def pass2(self):
        return self.raw_bits + self.final_bits + self.likelihood_bits

    @property
    def total(self):
        return self.pass1 + self.pass2


@dataclass
class CompressResult:
    container: ct.Container
    source: object
    tree: ContextTree
    plan: BlockPlan
    blocks: list = field(default_factory=list)
    structure_bits: int = 0
    param_bits: int = 0
    model_ops: int = 0
    t_serial: float = 0.0
    t_parallel: float = 0.0

    @property
    def raw_bits(self):
        return sum(s.raw_bits for s in self.blocks)

    @property
    def payload_bits(self):
        return sum(s.payload_bits for s in self.blocks)

    def to_bytes(self):
        return ct.serialize_container(self.container)


@njit(cache=True, nogil=True)
def _ideal_kernel(bits, depth, cost0, cost1):
    c = np.int64(0)
    for j in range(depth):
        c |= np.int64(bits[j]) << j
    top = depth - 1
    total = 0.0
    for i in range(depth, bits.shape[0]):
        x = np.int64(bits[i])
        total += cost1[c] if x else cost0[c]
        if depth > 0:
            c = (c >> 1) | (x << top)
    return total


def _map(fn, items, workers):
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            yield from pool.map(fn, items)
    else:
        yield from map(fn, items)


def encode_model(source, scheme):
    """Model segment: natural code, then arithmetic-coded flags and bin indices."""
    w = BitWriter()
    w.write_bit_array(encode_structure(source))
    structure_bits = w.bit_count
    enc = ArithEncoder(w, precision=PRECISION)
    for i in range(len(source)):
        if scheme == 2:
            enc.encode_bit(0.5, bool(source.coarse[i]))
        enc.encode_uniform(int(source.k[i]), int(source.levels[i]))
    enc.finish()
    return w.getvalue(), w.bit_count, structure_bits


def decode_model(n_bits, depth, scheme, tau, model_len_bits, model):
    reader = BitReader(model, model_len_bits)
    depths, prefixes = decode_structure(reader, depth)
    S = len(depths)
    dec = ArithDecoder(reader.read_bit_array(), precision=PRECISION)
    quant = QuantizerSpec(scheme, n_bits, tau)
    ks, levels, coarse = [], [], []
    for _ in range(S):
        if scheme == 2:
            flag = dec.decode_bit(0.5)
            K = quant.k_coarse if flag else quant.k_fine
        elif scheme == 1:
            flag, K = 0, quant.k_effective(S)
        else:
            flag, K = 0, quant.k_fine
        ks.append(dec.decode_uniform(K))
        levels.append(K)
        coarse.append(flag)
    src = source_from_structure(depth, depths, prefixes, ks, levels, coarse)
    src.scheme = scheme
    return src


def compress(bits, blocks=1, depth=None, scheme=0, tau=None, workers=1):
    """Compress a bit sequence into a ``CompressResult``.

    ``bits`` is any sequence of 0/1 values; use ``compress_bytes`` for byte
    strings.
    """
    bits = as_bits(bits)
    N = int(bits.size)
    if N == 0:
        raise EmptyInput("cannot compress an empty input")
    if scheme not in (0, 1, 2):
        raise ValueError(f"unknown scheme {scheme}")
    plan = BlockPlan.make(N, blocks, depth)
    D = plan.depth
    if scheme == 2:
        tau = default_tau(N) if tau is None else int(tau)
        if tau < 1:
            raise ValueError("scheme 2 needs tau >= 1")
    else:
        tau = 0
    stats = [BlockStats(b, plan.length(b)) for b in range(blocks)]
    live = [b for b in range(blocks) if not plan.degenerate(b)]

    def count(b):
        t0 = time.perf_counter()
        lo, hi = plan.bounds(b)
        tree = accumulate_block_counts(bits[lo:hi], D)
        return b, tree, time.perf_counter() - t0

    def trees():
        for b, tree, dt in _map(count, live, workers):
            stats[b].count_ops = tree.ops
            stats[b].seconds += dt
            yield tree

    # Pass I
    t_merge = time.perf_counter()
    tree = merge_counts(trees()) if live else ContextTree.empty(D)
    t_merge = time.perf_counter() - t_merge - sum(s.seconds for s in stats)
    t0 = time.perf_counter()
    source = prune_mdl(tree, QuantizerSpec(0, N))
    requantize(source, QuantizerSpec(scheme, N, tau))
    model, model_bits, structure_bits = encode_model(source, scheme)
    table = build_generator_table(source)
    p1 = discretize(table.prob, PRECISION)
    cost1 = -np.log2(table.prob)
    cost0 = -np.log2(1.0 - table.prob)
    model_ops = source.ops + table.ops + 2 * len(source) - 1
    t_model = time.perf_counter() - t0

    # Pass II
    def code(b):
        t0 = time.perf_counter()
        lo, hi = plan.bounds(b)
        block = bits[lo:hi]
        if plan.degenerate(b):
            payload, ops, ideal, raw = block, 0, 0.0, block.size
        else:
            body, ops = encode_block(block, D, p1, PRECISION - 2)
            payload = np.concatenate([block[:D], body])
            ideal = _ideal_kernel(block, D, cost0, cost1)
            raw = D
        return b, payload, ops, ideal, raw, time.perf_counter() - t0

    payload_bits, payloads = [0] * blocks, [b""] * blocks
    for b, payload, ops, ideal, raw, dt in _map(code, range(blocks), workers):
        s = stats[b]
        s.payload_bits, s.code_ops, s.ideal_bits, s.raw_bits = payload.size, ops, ideal, raw
        s.seconds += dt
        payload_bits[b] = int(payload.size)
        payloads[b] = np.packbits(payload).tobytes()

    t0 = time.perf_counter()
    c = ct.Container(N, D, scheme, tau, model_bits, model, payload_bits, payloads)
    t_model += time.perf_counter() - t0
    return CompressResult(c, source, tree, plan, stats, structure_bits,
                          model_bits - structure_bits, model_ops,
                          t_serial=t_merge + t_model,
                          t_parallel=sum(s.seconds for s in stats))


def compress_bytes(data, **kwargs):
    return compress(bytes_to_bits(data), **kwargs)


def _decode_payload(payload, nbits, plan, b, p1):
    m = plan.length(b)
    bits = bytes_to_bits(payload, nbits)
    if plan.degenerate(b):
        if nbits != m:
            raise ContainerError(f"raw block {b} should hold {m} bits, offsets say {nbits}")
        return bits
    D = plan.depth
    if nbits < D:
        raise ContainerError(f"block {b} payload shorter than its raw prefix")
    out, status, _ = decode_block(bits[D:].copy(), bits[:D].copy(), m, p1, PRECISION - 2)
    if status:
        raise BitstreamUnderrun(f"payload of block {b} ended early")
    return out


def _model_of(idx):
    source = decode_model(idx.n_bits, idx.depth, idx.scheme, idx.tau, idx.model_len_bits, idx.model)
    table = build_generator_table(source)
    return source, discretize(table.prob, PRECISION)


def _as_container(c):
    if isinstance(c, ct.Container):
        return c
    return ct.parse_container(c)


def decompress(c, workers=1):
    """Decode every block and return the original bits."""
    c = _as_container(c)
    if c.n_bits == 0:
        raise EmptyInput("container holds no data")
    plan = BlockPlan.make(c.n_bits, c.b_blocks, c.depth)
    _, p1 = _model_of(c)

    def one(b):
        return _decode_payload(c.payloads[b], c.payload_bits[b], plan, b, p1)

    parts = list(_map(one, range(c.b_blocks), workers))
    return np.concatenate(parts) if parts else np.zeros(0, np.uint8)


def decompress_block(source, b):
    """Decode block ``b`` (1-based) alone.

    ``source`` is a ``Container``, raw container bytes, a path, or a seekable
    binary file. Files are read through the header, model segment, offset
    table and payload ``b`` only.
    """
    if isinstance(source, (ct.Container, bytes, bytearray, memoryview)):
        c = _as_container(source)
        _check_block(b, c.b_blocks)
        plan = BlockPlan.make(c.n_bits, c.b_blocks, c.depth)
        _, p1 = _model_of(c)
        return _decode_payload(c.payloads[b - 1], c.payload_bits[b - 1], plan, b - 1, p1)
    if hasattr(source, "read"):
        return _block_from_file(source, b)
    with open(source, "rb") as f:
        return _block_from_file(f, b)


def _check_block(b, count):
    if not 1 <= b <= count:
        raise BlockOutOfRange(f"block {b} outside 1..{count}")


def _block_from_file(f, b):
    idx = ct.read_index(f)
    _check_block(b, idx.b_blocks)
    plan = BlockPlan.make(idx.n_bits, idx.b_blocks, idx.depth)
    _, p1 = _model_of(idx)
    payload = ct.read_payload(f, idx, b - 1)
    return _decode_payload(payload, idx.payload_bits[b - 1], plan, b - 1, p1)


def predicted_length(source, plan):
    """Analytic code length of the model segment plus all payloads.

    Structure and parameter bits use the exact natural-code length and
    ``log2 K`` per state (plus one flag bit per state for two-level
    quantization). The payload part charges raw bits, 2 finalisation bits per
    coded block, and the ideal likelihood under the quantized parameters.
    """
    structure = len(encode_structure(source))
    params = float(np.sum(np.log2(source.levels)))
    if source.scheme == 2:
        params += len(source)
    raw = final = 0
    for b in range(plan.blocks):
        if plan.degenerate(b):
            raw += plan.length(b)
        else:
            raw += plan.depth
            final += 2
    n0, n1 = source.counts[:, 0], source.counts[:, 1]
    likelihood = float(-np.sum(n1 * np.log2(source.r) + n0 * np.log2(1.0 - source.r)))
    return LengthBudget(structure, params, raw, final, likelihood)

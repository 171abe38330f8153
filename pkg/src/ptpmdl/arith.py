"""Binary arithmetic coder with pending-bit carry handling.

The coder keeps an interval ``[low, low + range)`` inside ``[0, 2**W)``.
Probabilities are fixed-point integers with ``W - 2`` fractional bits.
Symbol 0 takes the lower sub-interval. After renormalisation
``range > 2**(W - 2)``, which bounds the rounding loss of each split.

The per-symbol step functions are numba kernels. ``ArithEncoder`` and
``ArithDecoder`` call them one symbol at a time; ``encode_block`` and
``decode_block`` run whole context-modelled blocks inside a single kernel.
Both paths share the same step code and produce identical bits.
"""

import math

import numpy as np
from numba import njit

from .errors import BitstreamUnderrun

DEFAULT_PRECISION = 32

# encoder state slots
_LOW, _RANGE, _PENDING = 0, 1, 2
# decoder state slots
_CODE, _POS = 2, 3


def check_precision(W):
    if not 8 <= W <= 32:
        raise ValueError("register width must be within 8..32 bits")
    return W


def discretize(p1, W=DEFAULT_PRECISION):
    """Fixed-point probability of symbol 1, clamped away from 0 and 1."""
    one = 1 << (W - 2)
    p = np.rint(np.asarray(p1, dtype=np.float64) * one).astype(np.int64)
    return np.clip(p, 1, one - 1)


@njit(cache=True, nogil=True)
def _put(buf, pos, bit, pending):
    need = pos + pending + 1
    if need > buf.shape[0]:
        new = np.zeros(max(need, 2 * buf.shape[0]), np.uint8)
        new[:pos] = buf[:pos]
        buf = new
    buf[pos] = bit
    pos += 1
    for _ in range(pending):
        buf[pos] = 1 - bit
        pos += 1
    return buf, pos


@njit(cache=True, nogil=True)
def _split(rng, p1, prec):
    r1 = (rng * p1 + (1 << (prec - 1))) >> prec
    if r1 < 1:
        r1 = 1
    elif r1 > rng - 1:
        r1 = rng - 1
    return r1


@njit(cache=True, nogil=True)
def _enc_step(st, buf, pos, p1, bit, prec):
    low = st[0]
    rng = st[1]
    r1 = _split(rng, p1, prec)
    if bit:
        low += rng - r1
        rng = r1
    else:
        rng -= r1
    quarter = np.int64(1) << prec
    half = quarter << 1
    while True:
        if low + rng <= half:
            buf, pos = _put(buf, pos, 0, st[2])
            st[2] = 0
        elif low >= half:
            buf, pos = _put(buf, pos, 1, st[2])
            st[2] = 0
            low -= half
        elif low >= quarter and low + rng <= half + quarter:
            st[2] += 1
            low -= quarter
        else:
            break
        low <<= 1
        rng <<= 1
    st[0] = low
    st[1] = rng
    return buf, pos


@njit(cache=True, nogil=True)
def _enc_finish(st, buf, pos, prec):
    # one more bit selects a quarter lying inside the final interval;
    # the decoder zero-fills whatever follows
    st[2] += 1
    quarter = np.int64(1) << prec
    if st[0] < quarter:
        buf, pos = _put(buf, pos, 0, st[2])
    else:
        buf, pos = _put(buf, pos, 1, st[2])
    st[2] = 0
    return buf, pos


@njit(cache=True, nogil=True)
def _next_bit(st, inp, n):
    p = st[3]
    st[3] = p + 1
    if p < n:
        return np.int64(inp[p])
    return np.int64(0)


@njit(cache=True, nogil=True)
def _dec_init(st, inp, n, prec):
    st[0] = 0
    st[1] = np.int64(1) << (prec + 2)
    st[2] = 0
    st[3] = 0
    for _ in range(prec + 2):
        st[2] = (st[2] << 1) | _next_bit(st, inp, n)


@njit(cache=True, nogil=True)
def _dec_step(st, inp, n, p1, prec):
    low = st[0]
    rng = st[1]
    code = st[2]
    r1 = _split(rng, p1, prec)
    r0 = rng - r1
    if code - low < r0:
        bit = 0
        rng = r0
    else:
        bit = 1
        low += r0
        rng = r1
    quarter = np.int64(1) << prec
    half = quarter << 1
    while True:
        if low + rng <= half:
            pass
        elif low >= half:
            low -= half
            code -= half
        elif low >= quarter and low + rng <= half + quarter:
            low -= quarter
            code -= quarter
        else:
            break
        low <<= 1
        rng <<= 1
        code = (code << 1) | _next_bit(st, inp, n)
    st[0] = low
    st[1] = rng
    st[2] = code
    return bit


@njit(cache=True, nogil=True)
def _uniform_p1(lo, mid, hi, prec):
    one = np.int64(1) << prec
    span = hi - lo
    p = ((hi - mid) * one + span // 2) // span
    if p < 1:
        p = 1
    elif p > one - 1:
        p = one - 1
    return p


@njit(cache=True, nogil=True)
def encode_block(bits, depth, p1_table, prec):
    """Arithmetic-code ``bits[depth:]`` with context-indexed probabilities.

    Returns ``(code bits, symbol operations)``.
    """
    n = bits.shape[0]
    st = np.zeros(3, np.int64)
    st[1] = np.int64(1) << (prec + 2)
    buf = np.zeros(max(64, (n - depth) // 4 + 64), np.uint8)
    pos = 0
    c = np.int64(0)
    for j in range(depth):
        c |= np.int64(bits[j]) << j
    top = depth - 1
    ops = 0
    for i in range(depth, n):
        x = np.int64(bits[i])
        buf, pos = _enc_step(st, buf, pos, p1_table[c], x, prec)
        if depth > 0:
            c = (c >> 1) | (x << top)
        ops += 1
    buf, pos = _enc_finish(st, buf, pos, prec)
    return buf[:pos].copy(), ops


@njit(cache=True, nogil=True)
def decode_block(code, prefix, m, p1_table, prec):
    """Inverse of ``encode_block``; ``prefix`` holds the first ``depth`` bits.

    Returns ``(bits, status, symbol operations)``; status 1 means the decoder
    ran more than a register width past the end of ``code``.
    """
    depth = prefix.shape[0]
    out = np.zeros(m, np.uint8)
    out[:depth] = prefix
    n = code.shape[0]
    st = np.zeros(4, np.int64)
    _dec_init(st, code, n, prec)
    c = np.int64(0)
    for j in range(depth):
        c |= np.int64(prefix[j]) << j
    top = depth - 1
    ops = 0
    for i in range(depth, m):
        x = _dec_step(st, code, n, p1_table[c], prec)
        if st[3] > n + prec + 2:
            return out, 1, ops
        out[i] = x
        if depth > 0:
            c = (c >> 1) | (x << top)
        ops += 1
    return out, 0, ops


class ArithEncoder:
    """Symbol-at-a-time binary arithmetic encoder.

    ``ideal_bits`` accumulates the exact real-valued code length
    ``sum(-log2 p(x))`` of everything encoded so far. If a ``BitWriter`` is
    attached, ``finish`` appends the code to it.
    """

    def __init__(self, writer=None, precision=DEFAULT_PRECISION):
        self.W = check_precision(precision)
        self._prec = self.W - 2
        self._st = np.zeros(3, np.int64)
        self._st[_RANGE] = 1 << self.W
        self._buf = np.zeros(256, np.uint8)
        self._pos = 0
        self.writer = writer
        self.ideal_bits = 0.0
        self.symbols = 0
        self.finished = False

    @property
    def bit_count(self):
        """Bits emitted so far, excluding outstanding pending bits."""
        return self._pos

    def _encode_fixed(self, p1, bit):
        self._buf, self._pos = _enc_step(self._st, self._buf, self._pos, p1, bit, self._prec)
        self.symbols += 1

    def encode_bit(self, p1, bit):
        if not 0.0 < p1 < 1.0:
            raise ValueError("p1 must lie strictly between 0 and 1")
        bit = 1 if bit else 0
        self._encode_fixed(int(discretize(p1, self.W)), bit)
        self.ideal_bits -= math.log2(p1 if bit else 1.0 - p1)

    def encode_uniform(self, k, K):
        """Encode ``0 <= k < K`` by balanced binary splitting, log2(K) bits."""
        if not 0 <= k < K:
            raise ValueError(f"index {k} outside [0, {K})")
        lo, hi = 0, K
        while hi - lo > 1:
            mid = lo + (hi - lo) // 2
            bit = 1 if k >= mid else 0
            self._encode_fixed(int(_uniform_p1(lo, mid, hi, self._prec)), bit)
            if bit:
                lo = mid
            else:
                hi = mid
        self.ideal_bits += math.log2(K)

    def finish(self):
        """Flush the coder and return the complete code as a bit array."""
        if not self.finished:
            self._buf, self._pos = _enc_finish(self._st, self._buf, self._pos, self._prec)
            self.finished = True
            if self.writer is not None:
                self.writer.write_bit_array(self._buf[:self._pos])
        return self._buf[:self._pos].copy()


class ArithDecoder:
    """Symbol-at-a-time decoder over a 0/1 bit array.

    Bits past the end of ``bits`` read as zero; running more than a register
    width past the end raises ``BitstreamUnderrun``.
    """

    def __init__(self, bits, precision=DEFAULT_PRECISION):
        self.W = check_precision(precision)
        self._prec = self.W - 2
        self._bits = np.ascontiguousarray(bits, dtype=np.uint8)
        self._n = self._bits.shape[0]
        self._st = np.zeros(4, np.int64)
        _dec_init(self._st, self._bits, self._n, self._prec)

    @property
    def bits_consumed(self):
        return int(self._st[_POS])

    def _decode_fixed(self, p1):
        bit = _dec_step(self._st, self._bits, self._n, p1, self._prec)
        if self._st[_POS] > self._n + self.W:
            raise BitstreamUnderrun("arithmetic decoder ran past the end of its input")
        return int(bit)

    def decode_bit(self, p1):
        if not 0.0 < p1 < 1.0:
            raise ValueError("p1 must lie strictly between 0 and 1")
        return self._decode_fixed(int(discretize(p1, self.W)))

    def decode_uniform(self, K):
        if K < 1:
            raise ValueError("K must be >= 1")
        lo, hi = 0, K
        while hi - lo > 1:
            mid = lo + (hi - lo) // 2
            if self._decode_fixed(int(_uniform_p1(lo, mid, hi, self._prec))):
                lo = mid
            else:
                hi = mid
        return lo

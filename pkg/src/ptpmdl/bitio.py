"""MSB-first bit packing.

Bits are carried around the package as ``numpy.uint8`` arrays holding 0/1
values. ``BitWriter`` and ``BitReader`` handle the small, irregular fields
(natural code, header-adjacent segments); bulk payloads go through
``numpy.packbits``/``numpy.unpackbits`` directly.
"""

import numpy as np


def bytes_to_bits(data, n_bits=None):
    """Unpack ``data`` MSB-first into a 0/1 uint8 array of ``n_bits`` bits."""
    bits = np.unpackbits(np.frombuffer(bytes(data), dtype=np.uint8))
    if n_bits is not None:
        if n_bits > bits.size:
            raise ValueError(f"need {n_bits} bits, only {bits.size} available")
        bits = bits[:n_bits]
    return bits


def bits_to_bytes(bits):
    """Pack a 0/1 array MSB-first; the final byte is zero-padded."""
    return np.packbits(np.asarray(bits, dtype=np.uint8)).tobytes()


def as_bits(x):
    """Coerce a sequence of 0/1 values into a contiguous uint8 array."""
    arr = np.ascontiguousarray(x, dtype=np.uint8)
    if arr.ndim != 1:
        raise ValueError("bit sequence must be one-dimensional")
    if arr.size and arr.max() > 1:
        raise ValueError("bit sequence may only contain 0 and 1")
    return arr


class BitWriter:
    """Append-only MSB-first bit writer."""

    def __init__(self):
        self._buf = bytearray()
        self._acc = 0
        self._nacc = 0
        self.bit_count = 0

    def write_bits(self, value, count):
        if count < 0 or count > 64:
            raise ValueError("count must be within 0..64")
        if value < 0 or value >> count:
            raise ValueError(f"value {value} does not fit in {count} bits")
        self._acc = (self._acc << count) | value
        self._nacc += count
        self.bit_count += count
        while self._nacc >= 8:
            self._nacc -= 8
            self._buf.append((self._acc >> self._nacc) & 0xFF)
        self._acc &= (1 << self._nacc) - 1

    def write_bit(self, bit):
        self.write_bits(1 if bit else 0, 1)

    def write_bit_array(self, bits):
        bits = as_bits(bits)
        # fill the partial byte, then hand whole bytes to packbits
        head = min(bits.size, (8 - self._nacc) % 8)
        for b in bits[:head]:
            self.write_bits(int(b), 1)
        rest = bits[head:]
        whole = rest.size - rest.size % 8
        if whole:
            self._buf += np.packbits(rest[:whole]).tobytes()
            self.bit_count += whole
        for b in rest[whole:]:
            self.write_bits(int(b), 1)

    def __len__(self):
        return self.bit_count

    @property
    def byte_length(self):
        return (self.bit_count + 7) // 8

    def getvalue(self):
        """Bytes written so far, last byte zero-padded."""
        out = bytes(self._buf)
        if self._nacc:
            out += bytes([(self._acc << (8 - self._nacc)) & 0xFF])
        return out


class BitReader:
    """MSB-first reader over ``data`` limited to ``n_bits`` bits.

    Reads past the limit raise ``EOFError`` unless ``zero_fill`` is set, in
    which case missing bits read as 0.
    """

    def __init__(self, data, n_bits=None, zero_fill=False):
        self._data = bytes(data)
        limit = 8 * len(self._data)
        self.n_bits = limit if n_bits is None else n_bits
        if self.n_bits > limit:
            raise ValueError("n_bits exceeds the data length")
        self.zero_fill = zero_fill
        self.pos = 0

    def read_bit(self):
        if self.pos >= self.n_bits:
            if not self.zero_fill:
                raise EOFError("bitstream exhausted")
            self.pos += 1
            return 0
        byte = self._data[self.pos >> 3]
        bit = (byte >> (7 - (self.pos & 7))) & 1
        self.pos += 1
        return bit

    def read_bits(self, count):
        value = 0
        for _ in range(count):
            value = (value << 1) | self.read_bit()
        return value

    def remaining(self):
        return max(0, self.n_bits - self.pos)

    def read_bit_array(self, count=None):
        """Read ``count`` bits (default: all remaining) as a uint8 array."""
        if count is None:
            count = self.remaining()
        avail = min(count, self.remaining())
        if avail < count and not self.zero_fill:
            raise EOFError("bitstream exhausted")
        start = self.pos
        first, last = start >> 3, (start + avail + 7) >> 3
        chunk = np.unpackbits(np.frombuffer(self._data[first:last], dtype=np.uint8))
        off = start - 8 * first
        out = np.zeros(count, dtype=np.uint8)
        out[:avail] = chunk[off:off + avail]
        self.pos += count
        return out

"""Byte-exact on-disk container with a per-block offset table.

Layout (all integers little-endian)::

    magic        4s   b"PTPM"
    version      u8   1
    n_bits       u64  input length in bits
    b_blocks     u32  number of blocks
    depth        u8   maximal context depth
    scheme       u8   0 = fixed quantizer, 1 = population-scaled, 2 = two-level
    tau          u64  coarse/fine threshold (scheme 2 only, else 0)
    model_bits   u32  model segment length in bits
    model        ceil(model_bits / 8) bytes
    offsets      b_blocks x u64, payload length in bits
    payloads     b_blocks byte-aligned payloads

Everything needed to locate payload ``b`` sits in front of the payloads, so a
single block can be pulled out of a file without reading the others.
"""

import struct
from dataclasses import dataclass, field

from .errors import BadMagic, BadVersion, ContainerError, InconsistentOffsets, Truncated

MAGIC = b"PTPM"
VERSION = 1
HEADER = struct.Struct("<4sBQIBBQI")
HEADER_SIZE = HEADER.size  # 31
OFFSET = struct.Struct("<Q")
MAX_DEPTH = 24


def _nbytes(bits):
    return (bits + 7) // 8


@dataclass
class Container:
    n_bits: int
    depth: int
    scheme: int
    tau: int
    model_len_bits: int
    model: bytes
    payload_bits: list = field(default_factory=list)
    payloads: list = field(default_factory=list)
    version: int = VERSION

    @property
    def b_blocks(self):
        return len(self.payload_bits)

    @property
    def model_bytes(self):
        return _nbytes(self.model_len_bits)

    def payload_offsets(self):
        """Byte offset of each payload relative to the start of the payload area."""
        offs, pos = [], 0
        for nb in self.payload_bits:
            offs.append(pos)
            pos += _nbytes(nb)
        return offs

    def coded_bits(self):
        """Unpadded code length: model segment plus all payloads."""
        return self.model_len_bits + sum(self.payload_bits)

    def content_bytes(self):
        """Model segment and payload bytes, padding included, header excluded."""
        return self.model_bytes + sum(_nbytes(nb) for nb in self.payload_bits)

    def header_bytes(self):
        return HEADER_SIZE + OFFSET.size * self.b_blocks

    def file_size(self):
        return self.header_bytes() + self.content_bytes()


def _check_fields(c):
    if c.b_blocks < 1:
        raise ContainerError("container must hold at least one block")
    if len(c.payloads) != c.b_blocks:
        raise ContainerError("payload count does not match the offset table")
    if not 0 <= c.depth <= MAX_DEPTH:
        raise ContainerError(f"depth {c.depth} out of range")
    if c.scheme not in (0, 1, 2):
        raise ContainerError(f"unknown quantization scheme {c.scheme}")
    if c.scheme != 2 and c.tau != 0:
        raise ContainerError("tau is only meaningful for scheme 2")
    if len(c.model) != c.model_bytes:
        raise ContainerError("model segment length disagrees with model_len_bits")
    for nb, p in zip(c.payload_bits, c.payloads):
        if len(p) != _nbytes(nb):
            raise InconsistentOffsets("payload length disagrees with its offset entry")


def serialize_container(c):
    _check_fields(c)
    parts = [
        HEADER.pack(MAGIC, c.version, c.n_bits, c.b_blocks, c.depth, c.scheme,
                    c.tau, c.model_len_bits),
        bytes(c.model),
    ]
    parts += [OFFSET.pack(nb) for nb in c.payload_bits]
    parts += [bytes(p) for p in c.payloads]
    return b"".join(parts)


@dataclass
class ContainerIndex:
    """Everything in front of the payload area."""

    n_bits: int
    b_blocks: int
    depth: int
    scheme: int
    tau: int
    model_len_bits: int
    model: bytes
    payload_bits: list
    version: int = VERSION

    @property
    def payload_start(self):
        return HEADER_SIZE + _nbytes(self.model_len_bits) + OFFSET.size * self.b_blocks

    def payload_extent(self, b):
        """(absolute byte offset, byte length) of 0-based payload ``b``."""
        start = self.payload_start + sum(_nbytes(nb) for nb in self.payload_bits[:b])
        return start, _nbytes(self.payload_bits[b])


def _parse_header(head):
    if head[:len(MAGIC)] != MAGIC[:len(head)]:
        raise BadMagic(f"bad magic {bytes(head[:4])!r}")
    if len(head) < HEADER_SIZE:
        raise Truncated("header truncated")
    magic, version, n_bits, b_blocks, depth, scheme, tau, model_bits = HEADER.unpack(head)
    if version != VERSION:
        raise BadVersion(f"unsupported container version {version}")
    if b_blocks < 1:
        raise ContainerError("container must hold at least one block")
    if not 0 <= depth <= MAX_DEPTH or scheme not in (0, 1, 2):
        raise ContainerError("invalid depth or scheme field")
    return version, n_bits, b_blocks, depth, scheme, tau, model_bits


def read_index(f):
    """Read header, model segment and offset table from a binary file object."""
    version, n_bits, b_blocks, depth, scheme, tau, model_bits = _parse_header(f.read(HEADER_SIZE))
    model = f.read(_nbytes(model_bits))
    if len(model) != _nbytes(model_bits):
        raise Truncated("model segment truncated")
    table = f.read(OFFSET.size * b_blocks)
    if len(table) != OFFSET.size * b_blocks:
        raise Truncated("offset table truncated")
    payload_bits = [v for (v,) in OFFSET.iter_unpack(table)]
    return ContainerIndex(n_bits, b_blocks, depth, scheme, tau, model_bits, model,
                          payload_bits, version)


def read_payload(f, index, b):
    """Seek to and read 0-based payload ``b`` only."""
    start, size = index.payload_extent(b)
    f.seek(start)
    data = f.read(size)
    if len(data) != size:
        raise Truncated(f"payload {b} truncated")
    return data


def parse_container(data):
    data = bytes(data)
    version, n_bits, b_blocks, depth, scheme, tau, model_bits = _parse_header(data[:HEADER_SIZE])
    pos = HEADER_SIZE
    mlen = _nbytes(model_bits)
    if len(data) < pos + mlen:
        raise Truncated("model segment truncated")
    model = data[pos:pos + mlen]
    pos += mlen
    tlen = OFFSET.size * b_blocks
    if len(data) < pos + tlen:
        raise Truncated("offset table truncated")
    payload_bits = [v for (v,) in OFFSET.iter_unpack(data[pos:pos + tlen])]
    pos += tlen
    need = sum(_nbytes(nb) for nb in payload_bits)
    have = len(data) - pos
    if have < need:
        raise Truncated(f"payload area holds {have} bytes, offsets need {need}")
    if have > need:
        raise InconsistentOffsets(f"{have - need} trailing bytes not covered by offsets")
    payloads = []
    for nb in payload_bits:
        payloads.append(data[pos:pos + _nbytes(nb)])
        pos += _nbytes(nb)
    c = Container(n_bits, depth, scheme, tau, model_bits, model, payload_bits, payloads, version)
    if scheme != 2 and tau != 0:
        raise ContainerError("tau is only meaningful for scheme 2")
    return c

"""Redundancy accounting, the naive per-block baseline and the benchmark harness."""

import csv
import os
from dataclasses import asdict, dataclass, field

import numpy as np

from . import container as ct
from .bitio import bytes_to_bits
from .codec import BlockPlan, compress, decode_model, decompress
from .errors import PtpmdlError

CSV_COLUMNS = ["file", "N", "B", "scheme", "gamma", "rho", "model_bits", "param_bits",
               "raw_bits", "payload_bits", "ts_ms", "tsp_ms", "mu_mbps"]


def binary_entropy(theta):
    theta = np.asarray(theta, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -theta * np.log2(theta) - (1 - theta) * np.log2(1 - theta)
    return np.nan_to_num(h)


def ml_entropy_rate(source):
    """Per-symbol ML entropy of the counted symbols under the source's states."""
    n = source.counts.sum(axis=1)
    total = n.sum()
    if total == 0:
        return 0.0
    theta = np.divide(source.counts[:, 1], n, out=np.zeros(len(n)), where=n > 0)
    return float(np.sum(n * binary_entropy(theta)) / total)


def pointwise_redundancy(code_bits, n_bits, source):
    """Code length minus N times the ML entropy rate under ``source``."""
    return code_bits - n_bits * ml_entropy_rate(source)


def amdahl_time(t_serial, t_parallel, blocks, eta=0.2):
    return t_serial + t_parallel / (eta * blocks)


def throughput_mbps(n_bits, t_serial, t_parallel, blocks, eta=0.2):
    t = amdahl_time(t_serial, t_parallel, blocks, eta)
    return n_bits / t / 1e6 if t > 0 else float("inf")


@dataclass
class NaiveResult:
    results: list = field(default_factory=list)

    @property
    def containers(self):
        return [r.container if r is not None else None for r in self.results]

    @property
    def coded_bits(self):
        return sum(r.container.coded_bits() for r in self.results if r is not None)

    @property
    def content_bytes(self):
        return sum(r.container.content_bytes() for r in self.results if r is not None)


def naive_compress(bits, blocks, depth=None, scheme=0):
    """Compress every block as an independent single-block file.

    Each block gets its own pruned tree and parameters. ``depth`` defaults
    to the depth the shared-model codec would use for the same split.
    Empty trailing blocks yield ``None``.
    """
    bits = np.asarray(bits, dtype=np.uint8)
    plan = BlockPlan.make(bits.size, blocks, depth)
    out = NaiveResult()
    for b in range(blocks):
        lo, hi = plan.bounds(b)
        if hi == lo:
            out.results.append(None)
            continue
        out.results.append(compress(bits[lo:hi], 1, min(plan.depth, hi - lo), scheme))
    return out


@dataclass
class BenchRow:
    file: str
    N: int
    B: int
    scheme: int
    gamma: float = float("nan")
    rho: float = float("nan")
    model_bits: int = 0
    param_bits: int = 0
    raw_bits: int = 0
    payload_bits: int = 0
    ts_ms: float = 0.0
    tsp_ms: float = 0.0
    mu_mbps: float = 0.0
    error: str = ""


def _warm_up():
    # keep JIT compilation out of the timed sections
    x = np.zeros(256, np.uint8)
    x[::3] = 1
    decompress(compress(x, 2).container)


def bench_bits(bits, name, blocks, schemes, eta=0.2, depth=None):
    """One row per (B, scheme); each row re-checks the round trip."""
    rows = []
    N = int(bits.size)
    _warm_up()
    for B in blocks:
        for scheme in schemes:
            r = compress(bits, B, depth, scheme)
            data = ct.serialize_container(r.container)
            if not np.array_equal(decompress(data), bits):
                raise PtpmdlError(f"round trip failed for {name} B={B} scheme={scheme}")
            rows.append(BenchRow(
                file=name, N=N, B=B, scheme=scheme,
                gamma=8 * len(data) / (N / 8),
                rho=pointwise_redundancy(r.container.coded_bits(), N, r.source),
                model_bits=r.structure_bits, param_bits=r.param_bits,
                raw_bits=r.raw_bits, payload_bits=r.payload_bits,
                ts_ms=1e3 * r.t_serial, tsp_ms=1e3 * r.t_parallel,
                mu_mbps=throughput_mbps(N, r.t_serial, r.t_parallel, B, eta)))
    return rows


def bench(files, blocks=(1, 10, 100, 1000), schemes=(0, 1, 2), eta=0.2, depth=None):
    rows = []
    for path in files:
        name = os.path.basename(path)
        try:
            with open(path, "rb") as f:
                bits = bytes_to_bits(f.read())
        except OSError as e:
            rows.append(BenchRow(file=name, N=0, B=0, scheme=-1, error=str(e)))
            continue
        rows.extend(bench_bits(bits, name, blocks, schemes, eta, depth))
    return rows


def write_csv(rows, path):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(CSV_COLUMNS)
        for row in rows:
            d = asdict(row)
            w.writerow([d[c] for c in CSV_COLUMNS])


def inspect(data):
    """Human-readable summary of a serialized container."""
    c = ct.parse_container(data)
    src = decode_model(c.n_bits, c.depth, c.scheme, c.tau, c.model_len_bits, c.model)
    lines = [
        f"N={c.n_bits} bits  B={c.b_blocks}  D={c.depth}  scheme={c.scheme}  tau={c.tau}",
        f"states={len(src)}",
    ]
    for label, L, k, K, r in zip(src.labels(), src.state_depths, src.k, src.levels, src.r):
        lines.append(f"  {label or '-':>{max(c.depth, 1)}}  depth={L}  k={k}/{K}  r={r:.6f}")
    header = ct.HEADER_SIZE
    table = ct.OFFSET.size * c.b_blocks
    payload = sum((nb + 7) // 8 for nb in c.payload_bits)
    lines += [
        f"header={header} B  model={c.model_bytes} B ({c.model_len_bits} bits)  "
        f"offsets={table} B  payloads={payload} B",
        f"total={header + c.model_bytes + table + payload} B",
    ]
    return "\n".join(lines)


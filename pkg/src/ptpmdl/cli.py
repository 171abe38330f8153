"""Command-line front end: compress, decompress, inspect, gen, bench."""

import argparse
import sys

from . import bench as bn
from .bitio import bits_to_bytes, bytes_to_bits
from .codec import compress, decompress, decompress_block
from .errors import PtpmdlError
from .sources import generate, load_spec


def _int_list(text):
    return [int(v) for v in text.split(",") if v]


def cmd_compress(args):
    with open(args.input, "rb") as f:
        bits = bytes_to_bits(f.read())
    r = compress(bits, args.blocks, args.depth, args.scheme, args.tau, workers=args.workers)
    data = r.to_bytes()
    with open(args.output, "wb") as f:
        f.write(data)
    print(f"{bits.size // 8} -> {len(data)} bytes, {8 * len(data) / max(bits.size / 8, 1):.4f} bits/byte, "
          f"{len(r.source)} states, D={r.plan.depth}", file=sys.stderr)


def cmd_decompress(args):
    if args.block is not None:
        bits = decompress_block(args.input, args.block)
    else:
        with open(args.input, "rb") as f:
            bits = decompress(f.read(), workers=args.workers)
    with open(args.output, "wb") as f:
        f.write(bits_to_bytes(bits))


def cmd_inspect(args):
    with open(args.input, "rb") as f:
        print(bn.inspect(f.read()))


def cmd_gen(args):
    spec = load_spec(args.spec, seed=args.seed, n=args.n)
    bits = generate(spec)
    with open(args.out, "wb") as f:
        f.write(bits_to_bytes(bits))


def cmd_bench(args):
    rows = bn.bench(args.files, _int_list(args.blocks), _int_list(args.schemes), args.eta, args.depth)
    if args.csv:
        bn.write_csv(rows, args.csv)
    for row in rows:
        if row.error:
            print(f"{row.file}: {row.error}")
        else:
            print(f"{row.file:16s} B={row.B:<5d} scheme={row.scheme} gamma={row.gamma:.4f} "
                  f"rho={row.rho:.1f} mu={row.mu_mbps:.2f} Mbps")


def build_parser():
    p = argparse.ArgumentParser(prog="ptpmdl", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compress", help="compress a file")
    c.add_argument("input")
    c.add_argument("output")
    c.add_argument("--blocks", type=int, default=1)
    c.add_argument("--depth", type=int, default=None)
    c.add_argument("--scheme", type=int, choices=(0, 1, 2), default=0)
    c.add_argument("--tau", type=int, default=None)
    c.add_argument("--workers", type=int, default=1)
    c.set_defaults(func=cmd_compress)

    d = sub.add_parser("decompress", help="decompress a file or a single block")
    d.add_argument("input")
    d.add_argument("output")
    d.add_argument("--block", type=int, default=None, help="1-based block number")
    d.add_argument("--workers", type=int, default=1)
    d.set_defaults(func=cmd_decompress)

    i = sub.add_parser("inspect", help="describe a compressed file")
    i.add_argument("input")
    i.set_defaults(func=cmd_inspect)

    g = sub.add_parser("gen", help="sample a tree source")
    g.add_argument("--spec", required=True, help="file of 'state p1' lines")
    g.add_argument("--n", type=int, required=True, help="number of bits")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("bench", help="compression ratio / throughput table")
    b.add_argument("--files", nargs="+", required=True)
    b.add_argument("--blocks", default="1,10,100,1000")
    b.add_argument("--schemes", default="0,1,2")
    b.add_argument("--eta", type=float, default=0.2)
    b.add_argument("--depth", type=int, default=None)
    b.add_argument("--csv", default=None)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (PtpmdlError, OSError, ValueError) as e:
        print(f"ptpmdl: error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

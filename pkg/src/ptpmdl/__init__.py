"""Parallel two-pass MDL context-tree compression of binary streams."""

from .arith import ArithDecoder, ArithEncoder
from .bitio import BitReader, BitWriter, bits_to_bytes, bytes_to_bits
from .codec import (BlockPlan, BlockStats, CompressResult, LengthBudget, compress, compress_bytes,
                    decompress, decompress_block, predicted_length)
from .container import Container, parse_container, serialize_container
from .context import (ContextTree, GeneratorTable, MdlSource, accumulate_block_counts,
                      build_generator_table, context_indices, decode_structure, encode_structure,
                      merge_counts, prune_mdl, state_cost)
from .errors import *  # noqa: F401,F403
from .quantizer import QuantizerSpec, num_levels, quantize, scheme_levels
from .sources import SourceSpec, four_state_spec, generate

__version__ = "0.1.0"

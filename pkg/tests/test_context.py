import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ptpmdl.context import (ContextTree, accumulate_block_counts, build_generator_table,
                            context_indices, decode_structure, encode_structure, merge_counts,
                            prune_mdl, source_from_structure, state_cost)
from ptpmdl.errors import BlockTooShort, DepthMismatch, MalformedStructure
from ptpmdl.quantizer import QuantizerSpec



# ---- independent oracles -------------------------------------------------

def direct_index(x, i, D):
    """Context index of position i evaluated term by term."""
    return sum(int(x[i - D + j]) << j for j in range(D))


def oracle_cost(n0, n1, K):
    theta = n1 / (n0 + n1) if n0 + n1 else 0.5
    k = min(K - 1, math.floor(2 * K / math.pi * math.asin(math.sqrt(theta))))
    r = math.sin(math.pi * (2 * k + 1) / (4 * K)) ** 2
    return math.log2(K) - n0 * math.log2(1 - r) - n1 * math.log2(r)


def all_trees(L, v, D):
    """Every complete proper subtree rooted at node (L, v)."""
    yield [(L, v)]
    if L < D:
        for a, b in itertools.product(list(all_trees(L + 1, 2 * v, D)),
                                      list(all_trees(L + 1, 2 * v + 1, D))):
            yield a + b


def tree_cost(leaves, counts, D, K):
    total = 0.0
    for L, v in leaves:
        lo, hi = v << (D - L), (v + 1) << (D - L)
        n0, n1 = counts[lo:hi].sum(axis=0)
        total += oracle_cost(int(n0), int(n1), K)
    # one natural-code bit for every node above depth D
    internal = len(leaves) - 1
    shallow_leaves = sum(1 for L, _ in leaves if L < D)
    return total + internal + shallow_leaves


def brute_force_mdl(counts, D, K):
    best = None
    for t in all_trees(0, 0, D):
        c = tree_cost(t, counts, D, K)
        if best is None or c < best[0]:
            best = (c, t)
    return best


def four_state_source():
    depths = np.array([1, 3, 3, 2])
    prefixes = np.array([0, 4, 5, 3])  # "0", "001", "101", "11"
    return source_from_structure(3, depths, prefixes, np.zeros(4, int), np.full(4, 4))


# ---- indices and counts ---------------------------------------------------

def test_index_examples():
    assert list(context_indices([1, 0, 1, 1], 2)) == [1, 2]
    assert list(context_indices([1, 1, 1, 1], 2)) == [3, 3]
    assert not context_indices(np.zeros(50, np.uint8), 5).any()
    with pytest.raises(BlockTooShort):
        context_indices([1, 0], 3)


@given(st.lists(st.integers(0, 1), min_size=0, max_size=80), st.integers(0, 6))
def test_incremental_index_matches_direct(x, D):
    if len(x) < D:
        return
    got = context_indices(x, D)
    assert list(got) == [direct_index(x, i, D) for i in range(D, len(x))]


def test_count_examples():
    t = accumulate_block_counts([0, 0, 0, 0, 0], 2)
    assert t.counts[0, 0] == 3 and t.counts.sum() == 3
    t = accumulate_block_counts([1, 0, 1], 3)
    assert t.counts.sum() == 0 and t.total_symbols == 0


@settings(max_examples=50)
@given(st.lists(st.lists(st.integers(0, 1), min_size=4, max_size=60), min_size=1, max_size=6),
       st.integers(0, 4))
def test_merge_equals_serial_recount(blocks, D):
    merged = merge_counts(accumulate_block_counts(b, D) for b in blocks)
    expect = np.zeros((1 << D, 2), np.int64)
    for b in blocks:
        for i in range(D, len(b)):
            expect[direct_index(b, i, D), b[i]] += 1
    assert np.array_equal(merged.counts, expect)
    assert merged.total_symbols == sum(len(b) - D for b in blocks)


def test_merge_identities():
    t = accumulate_block_counts([1, 0, 0, 1, 1, 0, 1], 2)
    assert np.array_equal(merge_counts([t]).counts, t.counts)
    assert np.array_equal(merge_counts([t, ContextTree.empty(2)]).counts, t.counts)
    with pytest.raises(DepthMismatch):
        merge_counts([t, ContextTree.empty(3)])


# ---- costs and pruning ----------------------------------------------------

def test_state_cost_examples():
    assert state_cost(0, 0, 4)[0] == pytest.approx(2.0)
    bits, k, r = state_cost(8, 0, 4)
    assert (k, round(r, 5)) == (0, 0.03806)
    assert bits == pytest.approx(2.4478523, abs=1e-6)
    bits, k, r = state_cost(8, 8, 4)
    assert (k, round(r, 5)) == (2, 0.69134)
    assert bits == pytest.approx(19.8275736, abs=1e-6)


def test_prune_example():
    t = ContextTree(1, np.array([[8, 0], [0, 8]]), 16)
    src = prune_mdl(t, QuantizerSpec(0, 4))
    assert src.labels() == ["0", "1"]
    assert src.mdl_root == pytest.approx(5.8957, abs=1e-3)


def test_same_bin_children_are_pruned():
    t = ContextTree(1, np.array([[50, 50], [49, 51]]), 200)
    src = prune_mdl(t, QuantizerSpec(0, 4))
    assert len(src) == 1 and src.labels() == [""]


# input lengths whose level count is 2, 4 and 16
POPULATION = {2: 1, 4: 4, 16: 81}


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 4), st.sampled_from([2, 4, 16]), st.data())
def test_prune_matches_enumeration(D, K, data):
    counts = np.array(data.draw(st.lists(st.tuples(st.integers(0, 32), st.integers(0, 32)),
                                         min_size=1 << D, max_size=1 << D)), np.int64)
    quant = QuantizerSpec(0, POPULATION[K])
    assert quant.k_fine == K
    src = prune_mdl(ContextTree(D, counts, int(counts.sum())), quant)
    best, _ = brute_force_mdl(counts, D, K)
    assert src.mdl_root == pytest.approx(best, abs=1e-9)
    chosen = list(zip(src.state_depths.tolist(), src.state_prefixes.tolist()))
    assert tree_cost(chosen, counts, D, K) == pytest.approx(best, abs=1e-9)


def test_prune_recovers_counts_of_states():
    rng = np.random.default_rng(0)
    counts = rng.integers(0, 100, size=(8, 2))
    src = prune_mdl(ContextTree(3, counts, int(counts.sum())))
    assert src.counts.sum() == counts.sum()
    start, stop = src.ranges()
    assert np.all(start[1:] == stop[:-1]) and start[0] == 0 and stop[-1] == 8


# ---- natural code and generator table ---------------------------------------

def test_natural_code_four_states():
    src = four_state_source()
    assert src.labels() == ["0", "001", "101", "11"]
    assert list(encode_structure(src)) == [1, 0, 1, 1, 0]
    d, p = decode_structure([1, 0, 1, 1, 0], 3)
    assert list(d) == [1, 3, 3, 2] and list(p) == [0, 4, 5, 3]


def test_natural_code_root_and_full():
    root = source_from_structure(5, [0], [0], [0], [2])
    assert list(encode_structure(root)) == [0]
    D = 4
    full = source_from_structure(D, [D] * 16, list(range(16)), [0] * 16, [2] * 16)
    assert list(encode_structure(full)) == [1] * (2**D - 1)
    d, p = decode_structure([1] * 15, D)
    assert list(p) == list(range(16))


def test_natural_code_errors():
    with pytest.raises(MalformedStructure):
        decode_structure([1, 0, 1], 3)
    bad = source_from_structure(2, [1], [0], [0], [2])
    with pytest.raises(MalformedStructure):
        encode_structure(bad)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 6), st.integers(0, 2**31))
def test_structure_roundtrip_random_trees(D, seed):
    rng = np.random.default_rng(seed)
    depths, prefixes, stack = [], [], [(0, 0)]
    while stack:
        L, v = stack.pop()
        if L < D and rng.random() < 0.6:
            stack += [(L + 1, 2 * v + 1), (L + 1, 2 * v)]
        else:
            depths.append(L)
            prefixes.append(v)
    src = source_from_structure(D, depths, prefixes, [0] * len(depths), [2] * len(depths))
    code = encode_structure(src)
    assert len(code) <= 2 * len(src) - 1
    d, p = decode_structure(code, D)
    assert list(d) == depths and list(p) == prefixes
    table = build_generator_table(src)
    assert len(table) == 1 << D
    assert np.array_equal(np.bincount(table.state, minlength=len(src)),
                          1 << (D - np.array(depths)))


def test_generator_table_four_states():
    table = build_generator_table(four_state_source())
    names = np.array(four_state_source().labels())[table.state]
    assert list(names) == ["0", "0", "0", "0", "001", "101", "11", "11"]
    root = build_generator_table(source_from_structure(3, [0], [0], [0], [2]))
    assert not root.state.any()

"""Synthetic tree sources and a synthetic text generator for experiments."""

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import ImproperStateSet

# Four-state binary source: p(1 | state) with states written oldest symbol first.
FOUR_STATES = {"0": 0.03, "11": 0.98, "001": 0.95, "101": 0.97}


@dataclass
class SourceSpec:
    states: dict
    seed: int = 0
    n: int = 0

    @property
    def depth(self):
        return max((len(s) for s in self.states), default=0)

    def table(self):
        """p(1 | context index) over all depth-``depth`` contexts."""
        D = self.depth
        table = np.full(1 << D, np.nan)
        for s, p in self.states.items():
            if set(s) - {"0", "1"}:
                raise ImproperStateSet(f"state {s!r} is not a binary string")
            if not 0.0 < p < 1.0:
                raise ValueError(f"p(1|{s}) = {p} must lie strictly inside (0, 1)")
            L = len(s)
            v = int(s[::-1], 2) if L else 0
            lo, hi = v << (D - L), (v + 1) << (D - L)
            if not np.all(np.isnan(table[lo:hi])):
                raise ImproperStateSet(f"state {s!r} overlaps another state")
            table[lo:hi] = p
        if np.any(np.isnan(table)):
            raise ImproperStateSet("state set is not complete")
        return table


def four_state_spec(n, seed=0):
    return SourceSpec(dict(FOUR_STATES), seed, n)


@njit(cache=True)
def _generate_kernel(u, depth, table):
    n = u.shape[0]
    out = np.zeros(n, np.uint8)
    c = np.int64(0)
    top = depth - 1
    for i in range(n):
        if i < depth:
            x = np.int64(u[i] < 0.5)
        else:
            x = np.int64(u[i] < table[c])
        out[i] = x
        if depth > 0:
            c = (c >> 1) | (x << top)
    return out


def generate(spec):
    """Sample ``spec.n`` bits; the first ``depth`` bits are fair coin flips."""
    table = spec.table()
    u = np.random.default_rng(spec.seed).random(spec.n)
    return _generate_kernel(u, spec.depth, table)


def parse_spec(text, seed=0, n=0):
    """Parse ``state p1`` lines; ``-`` denotes the empty (root) state."""
    states = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        name, p = line.split()
        name = "" if name == "-" else name
        if name in states:
            raise ImproperStateSet(f"state {name!r} listed twice")
        states[name] = float(p)
    return SourceSpec(states, seed, n)


def load_spec(path, seed=0, n=0):
    with open(path) as f:
        return parse_spec(f.read(), seed, n)


_ONSETS = ["", "b", "c", "d", "f", "g", "h", "l", "m", "n", "p", "r", "s", "t", "w",
           "th", "sh", "st", "br", "gr", "pl"]
_VOWELS = ["a", "e", "i", "o", "u", "ea", "ou", "ai"]
_CODAS = ["", "", "n", "r", "s", "t", "d", "ll", "nd", "ng", "th"]


def synthetic_text(n_bytes, seed=0, vocabulary=400):
    """ASCII prose-like bytes: Zipf-distributed pseudo-words, a first-order
    word Markov chain, sentence punctuation and line breaks."""
    rng = np.random.default_rng(seed)
    words = set()
    while len(words) < vocabulary:
        syll = rng.integers(1, 4)
        words.add("".join(rng.choice(_ONSETS) + rng.choice(_VOWELS) + rng.choice(_CODAS)
                          for _ in range(syll)))
    words = sorted(words, key=lambda w: (len(w), w))
    zipf = 1.0 / np.arange(1, vocabulary + 1)
    zipf /= zipf.sum()
    # each word prefers a handful of successors
    succ = rng.choice(vocabulary, size=(vocabulary, 6), p=zipf)
    out, size, w = [], 0, 0
    line = 0
    new_sentence = True
    while size < n_bytes:
        w = succ[w, rng.integers(6)] if rng.random() < 0.7 else rng.choice(vocabulary, p=zipf)
        word = words[w]
        if new_sentence:
            word = word.capitalize()
            new_sentence = False
        r = rng.random()
        if r < 0.07:
            word += "."
            new_sentence = True
        elif r < 0.12:
            word += ","
        line += len(word) + 1
        sep = " "
        if line > 70:
            sep, line = "\n", 0
        piece = word + sep
        out.append(piece)
        size += len(piece)
    return "".join(out).encode("ascii")[:n_bytes]

"""Shared test utilities, including the naive bit-level reference
implementations used as independent oracles."""

import numpy as np

from hdprofiler import HDSpaceConfig, HDVector, ItemMemory


def hv(bits: str) -> HDVector:
    """Vector from a bit string written index-0 first ('10110010')."""
    return HDVector.from_bits([int(c) for c in bits])


def bits_of(vector: HDVector) -> str:
    return "".join(str(b) for b in vector.to_bits())


def random_vector(rng: np.random.Generator, dimension: int, density: float = 0.5) -> HDVector:
    return HDVector.from_bits((rng.random(dimension) < density).astype(np.uint8))


def item_memory_from_bits(config: HDSpaceConfig, per_symbol: dict) -> ItemMemory:
    """Hand-built item memory; values are bit lists/strings per symbol."""
    atomic = {}
    for symbol, bits in per_symbol.items():
        atomic[symbol] = hv(bits) if isinstance(bits, str) else HDVector.from_bits(bits)
    return ItemMemory(atomic=atomic, seed=0, config_fingerprint=config.fingerprint())


def random_item_memory(rng: np.random.Generator, config: HDSpaceConfig) -> ItemMemory:
    atomic = {s: random_vector(rng, config.dimension) for s in config.alphabet}
    return ItemMemory(atomic=atomic, seed=0, config_fingerprint=config.fingerprint())


# ---- naive reference implementations (kept independent of the package
# internals on purpose: plain Python lists, no packing) ----


def naive_rotate(bits: list, k: int) -> list:
    """out[j] = in[(j - k) mod D]: rotation toward higher index."""
    d = len(bits)
    k %= d
    return bits[-k:] + bits[:-k] if k else list(bits)


def naive_ngram(window: str, atomic_bits: dict, dimension: int) -> list:
    """Bit-by-bit evaluation of the window binding formula."""
    out = [0] * dimension
    for offset, symbol in enumerate(window):
        rotated = naive_rotate(atomic_bits[symbol], offset)
        out = [a ^ b for a, b in zip(out, rotated)]
    return out


def naive_similarity(q_bits: list, p_bits: list) -> float:
    matches = sum(1 for a, b in zip(q_bits, p_bits) if a == b)
    return matches / len(q_bits)


def naive_valid_windows(bases: str, n: int, alphabet: str = "ACGT") -> list:
    """Brute-force window enumeration: start positions of alphabet-only windows."""
    ok = [c in alphabet for c in bases]
    return [p for p in range(len(bases) - n + 1) if all(ok[p : p + n])]

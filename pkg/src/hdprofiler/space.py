"""HD-space definition: hyperparameters, atomic symbol vectors, threshold
calibration, and the on-disk configuration format.

The whole pipeline is reproducible from an `HDSpaceConfig` alone: atomic
vectors are regenerated bit-identically from (seed, symbol index) with a
counter-based Philox generator, and a fingerprint over all config fields
ties databases and queries to the space they were built in.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from .core import HDVector, pack_bits
from .errors import ConfigFormatError

CONFIG_FORMAT_VERSION = 1

_ENCODINGS = ("ngram",)
_SIMILARITY_METRICS = ("hamming",)

# Field order is part of the file format and of the fingerprint input.
_CONFIG_FIELDS = (
    "dimension",
    "ngram_size",
    "density",
    "similarity_threshold",
    "bundling_cap",
    "seed",
    "alphabet",
    "encoding",
    "similarity_metric",
)


@dataclass(frozen=True)
class HDSpaceConfig:
    """Everything that defines the HD space.

    dimension            D, bits per hypervector
    ngram_size           N, symbols bound into one window vector
    density              probability of a 1 in each atomic-vector bit
    similarity_threshold T, minimum normalized similarity for a match
    bundling_cap         optional cap on windows bundled per output vector
    seed                 64-bit seed for atomic-vector generation
    alphabet             ordered symbols (single characters)
    """

    dimension: int = 40_000
    ngram_size: int = 16
    density: float = 0.5
    similarity_threshold: float = 0.515
    bundling_cap: int | None = None
    seed: int = 0
    alphabet: tuple[str, ...] = ("A", "C", "G", "T")
    encoding: str = "ngram"
    similarity_metric: str = "hamming"

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        if self.ngram_size < 1:
            raise ValueError(f"ngram_size must be >= 1, got {self.ngram_size}")
        if self.dimension < self.ngram_size:
            raise ValueError(
                f"dimension ({self.dimension}) must be >= ngram_size ({self.ngram_size})"
            )
        if not 0.0 < self.density < 1.0:
            raise ValueError(f"density must be in (0, 1), got {self.density}")
        if not 0.0 < self.similarity_threshold < 1.0:
            raise ValueError(
                f"similarity_threshold must be in (0, 1), got {self.similarity_threshold}"
            )
        if self.bundling_cap is not None and self.bundling_cap < 1:
            raise ValueError(f"bundling_cap must be >= 1 or None, got {self.bundling_cap}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        if not self.alphabet:
            raise ValueError("alphabet must not be empty")
        if any(len(s) != 1 for s in self.alphabet):
            raise ValueError("alphabet symbols must be single characters")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValueError("alphabet symbols must be unique")
        if self.encoding not in _ENCODINGS:
            raise ValueError(f"unsupported encoding {self.encoding!r}")
        if self.similarity_metric not in _SIMILARITY_METRICS:
            raise ValueError(f"unsupported similarity metric {self.similarity_metric!r}")

    def fingerprint(self) -> str:
        """Stable 16-hex-digit content hash over every field."""
        text = "".join(f"{k}={v}\n" for k, v in _field_items(self))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]

    def as_dict(self) -> dict:
        return {k: v for k, v in _field_items(self)}


def _field_items(config: HDSpaceConfig):
    for name in _CONFIG_FIELDS:
        value = getattr(config, name)
        if name == "alphabet":
            value = "".join(value)
        elif name == "bundling_cap":
            value = "none" if value is None else value
        yield name, value


def calibrate_threshold(dimension: int, z: float) -> float:
    """Similarity threshold z standard deviations above random-pair noise.

    Two independent dense vectors agree on half their bits in expectation
    with standard deviation sqrt(0.25/D), so T = 0.5 + z*sqrt(0.25/D)
    (clamped below 1) keeps random matches z sigmas away.
    """
    if dimension < 1:
        raise ValueError(f"dimension must be positive, got {dimension}")
    if z < 0:
        raise ValueError(f"z must be non-negative, got {z}")
    t = 0.5 + z * math.sqrt(0.25 / dimension)
    return min(t, math.nextafter(1.0, 0.0))


def default_config() -> HDSpaceConfig:
    """D=40,000 dense binary space, N=16, threshold calibrated at z=6."""
    return HDSpaceConfig(similarity_threshold=calibrate_threshold(40_000, 6.0))


@dataclass(frozen=True)
class ItemMemory:
    """Read-only store of one atomic hypervector per alphabet symbol."""

    atomic: dict[str, HDVector]
    seed: int
    config_fingerprint: str

    def __getitem__(self, symbol: str) -> HDVector:
        return self.atomic[symbol]

    def __len__(self) -> int:
        return len(self.atomic)


def generate_item_memory(config: HDSpaceConfig) -> ItemMemory:
    """Deterministically generate the atomic vectors for a config.

    Each symbol gets its own Philox stream keyed by (seed, symbol index),
    so regeneration is bit-identical across runs and platforms and does
    not depend on alphabet symbols generated before it.
    """
    atomic = {}
    for index, symbol in enumerate(config.alphabet):
        key = np.array([config.seed, index], dtype=np.uint64)
        rng = np.random.Generator(np.random.Philox(key=key))
        bits = rng.random(config.dimension) < config.density
        atomic[symbol] = HDVector(config.dimension, pack_bits(bits))
    return ItemMemory(atomic=atomic, seed=config.seed, config_fingerprint=config.fingerprint())


def config_to_text(config: HDSpaceConfig) -> str:
    """Render the versioned key/value file body, fingerprint line last."""
    lines = [f"format_version = {CONFIG_FORMAT_VERSION}"]
    lines += [f"{k} = {v}" for k, v in _field_items(config)]
    lines.append(f"fingerprint = {config.fingerprint()}")
    return "\n".join(lines) + "\n"


def parse_config_text(text: str, source: str = "<config>") -> HDSpaceConfig:
    """Parse the key/value format back into a validated config."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigFormatError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        key = key.strip()
        if key in raw:
            raise ConfigFormatError(f"{source}:{lineno}: duplicate key {key!r}")
        raw[key] = value.strip()

    known = set(_CONFIG_FIELDS) | {"format_version", "fingerprint"}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigFormatError(f"{source}: unknown keys {unknown}")
    missing = sorted(known - set(raw))
    if missing:
        raise ConfigFormatError(f"{source}: missing keys {missing}")
    if raw["format_version"] != str(CONFIG_FORMAT_VERSION):
        raise ConfigFormatError(
            f"{source}: unsupported format_version {raw['format_version']!r}"
        )

    try:
        cap = raw["bundling_cap"]
        config = HDSpaceConfig(
            dimension=int(raw["dimension"]),
            ngram_size=int(raw["ngram_size"]),
            density=float(raw["density"]),
            similarity_threshold=float(raw["similarity_threshold"]),
            bundling_cap=None if cap.lower() == "none" else int(cap),
            seed=int(raw["seed"]),
            alphabet=tuple(raw["alphabet"]),
            encoding=raw["encoding"],
            similarity_metric=raw["similarity_metric"],
        )
    except ValueError as exc:
        raise ConfigFormatError(f"{source}: {exc}") from exc

    if config.fingerprint() != raw["fingerprint"]:
        raise ConfigFormatError(
            f"{source}: fingerprint {raw['fingerprint']!r} does not match the fields "
            f"(expected {config.fingerprint()!r})"
        )
    return config


def save_config(config: HDSpaceConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(config_to_text(config))


def load_config(path) -> HDSpaceConfig:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ConfigFormatError(f"cannot read config {path}: {exc}") from exc
    return parse_config_text(text, source=str(path))

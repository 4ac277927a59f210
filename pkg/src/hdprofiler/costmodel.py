"""Closed-form latency/energy/area model of the in-memory accelerator.

The modeled design stores atomic vectors row-major across phase-change
memory arrays (one chunk per array, read whole rows while encoding) and
prototypes column-major together with their complements in a paired
array, so a column sweep plus two ADC samples yields the XNOR-popcount of
query and prototype in one shot; a small adder combines the two ADC
outputs. This module reproduces that design's first-order costs as pure
functions of the workload; it is a calibrated analytical model, not a
cycle-accurate simulator.

Formulas (defaults from the reference PCM characterization):

  encoding    latency = n_grams * N * read_latency        (shift is free
              in hardware; the XOR folds into the read cycle)
              energy  = encoder_unit_energy * n_grams * N / 2160
              (2160 symbol reads = one 150-base read at N=16, the workload
              the per-query unit energy is calibrated to)
  classify    latency = prototypes * ceil(D/rows) * adc_latency
              adc energy = 2 * prototypes * ceil(D/rows) * adc_sample pJ
              (paired arrays sample in parallel; both ADCs burn energy)
  programming write_latency per written row/column, reported separately
              because databases are written once
  area        the four fixed unit areas and their recomputed shares

The four default unit areas sum to 1.7765 mm^2. The reported full-die
figure for the reference design (~8.9 mm^2) includes structures beyond
these four units; both numbers are real, and this model reports only the
unit breakdown without trying to reconcile them. The reported percentage
shares also disagree slightly with the reported absolute areas; shares
here are always recomputed from the absolutes.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from .errors import ConfigFormatError, TooShortError

# Workload the per-query encoder unit energy is calibrated against:
# a 150-base read at N=16 performs (150-16+1)*16 atomic-vector reads.
ENCODER_ENERGY_REF_SYMBOL_READS = 2160


@dataclass(frozen=True)
class CostParams:
    """Device constants; defaults follow the reference PCM characterization."""

    array_rows: int = 512
    array_cols: int = 2048
    read_latency_ns: float = 2.8
    write_latency_ns: float = 100.0
    adc_latency_ns: float = 2.0
    adc_energy_pj: float = 4.0
    adc_resolution_bits: int = 9
    cell_area_f2: float = 50.0
    # unit areas, mm^2
    im_area_mm2: float = 0.07
    encoder_area_mm2: float = 1.375
    am_area_mm2: float = 0.15
    similarity_area_mm2: float = 0.1815
    # unit energies, nJ per query
    im_energy_nj: float = 1.179e-6
    encoder_energy_nj: float = 1.43e-5
    am_energy_nj: float = 2.47e-7
    similarity_energy_nj: float = 6.91e-8

    def __post_init__(self):
        for field in dataclasses.fields(self):
            if getattr(self, field.name) <= 0:
                raise ValueError(f"cost parameter {field.name} must be positive")

    def with_overrides(self, overrides: dict) -> "CostParams":
        names = {field.name for field in dataclasses.fields(self)}
        unknown = sorted(set(overrides) - names)
        if unknown:
            raise ConfigFormatError(f"unknown cost parameter(s): {unknown}")
        return dataclasses.replace(self, **overrides)


def load_cost_params(path, base: CostParams | None = None) -> CostParams:
    """Apply 'name = value' overrides from a text file to the defaults."""
    overrides = {}
    base = base or CostParams()
    int_fields = {"array_rows", "array_cols", "adc_resolution_bits"}
    try:
        with open(path, "r", encoding="utf-8") as handle:
            lines = handle.readlines()
    except OSError as exc:
        raise ConfigFormatError(f"cannot read cost parameters {path}: {exc}") from exc
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigFormatError(f"{path}:{lineno}: expected 'name = value', got {line!r}")
        key = key.strip()
        try:
            overrides[key] = int(value) if key in int_fields else float(value)
        except ValueError:
            raise ConfigFormatError(
                f"{path}:{lineno}: value {value.strip()!r} is not a number"
            ) from None
    try:
        return base.with_overrides(overrides)
    except ValueError as exc:
        raise ConfigFormatError(f"{path}: {exc}") from exc


@dataclass(frozen=True)
class LayoutPlan:
    """How one database maps onto fixed-size memory arrays.

    The item-memory side splits each vector into `chunk_bits`-wide chunks,
    one chunk per array, read row-wise. The associative-memory side stores
    vectors down columns, so chunks there are `am_chunk_rows` bits tall and
    each prototype occupies `am_chunks_per_vector` column slots (times two
    arrays, holding the complement).
    """

    dimension: int
    num_prototypes: int
    chunk_bits: int
    chunks_per_vector: int
    im_arrays: int
    am_chunk_rows: int
    am_chunks_per_vector: int
    am_columns_needed: int
    am_array_pairs: int


def _largest_power_of_two_below(n: int) -> int:
    if n < 2:
        raise ValueError(f"no power of two strictly below {n}")
    p = 1 << (n.bit_length() - 1)
    return p >> 1 if p >= n else p


def plan_layout(
    dimension: int,
    num_prototypes: int,
    params: CostParams | None = None,
    chunk_bits: int | None = None,
) -> LayoutPlan:
    """Chunk a database over arrays; `chunk_bits` overrides the default
    (the largest power of two strictly below the column count)."""
    if dimension < 1 or num_prototypes < 1:
        raise ValueError("dimension and num_prototypes must be positive")
    params = params or CostParams()
    if chunk_bits is None:
        chunk_bits = _largest_power_of_two_below(params.array_cols)
    elif chunk_bits < 1 or chunk_bits & (chunk_bits - 1):
        raise ValueError(f"chunk_bits must be a power of two, got {chunk_bits}")
    chunks_per_vector = -(-dimension // chunk_bits)
    am_chunks = -(-dimension // params.array_rows)
    am_columns = num_prototypes * am_chunks
    return LayoutPlan(
        dimension=dimension,
        num_prototypes=num_prototypes,
        chunk_bits=chunk_bits,
        chunks_per_vector=chunks_per_vector,
        im_arrays=chunks_per_vector,
        am_chunk_rows=params.array_rows,
        am_chunks_per_vector=am_chunks,
        am_columns_needed=am_columns,
        am_array_pairs=-(-am_columns // params.array_cols),
    )


@dataclass(frozen=True)
class EncodeCost:
    n_grams: int
    symbol_reads: int
    latency_ns: float
    energy_nj: float


def encode_cost(
    read_length: int,
    ngram_size: int,
    params: CostParams | None = None,
    bundling_cap: int | None = None,
) -> EncodeCost:
    """Latency/energy to encode one read of `read_length` bases."""
    params = params or CostParams()
    if ngram_size < 1:
        raise ValueError(f"ngram_size must be >= 1, got {ngram_size}")
    if read_length < ngram_size:
        raise TooShortError(f"read length {read_length} < ngram size {ngram_size}")
    n_grams = read_length - ngram_size + 1
    if bundling_cap is not None:
        n_grams = min(n_grams, bundling_cap)
    symbol_reads = n_grams * ngram_size
    return EncodeCost(
        n_grams=n_grams,
        symbol_reads=symbol_reads,
        latency_ns=symbol_reads * params.read_latency_ns,
        energy_nj=params.encoder_energy_nj * symbol_reads / ENCODER_ENERGY_REF_SYMBOL_READS,
    )


@dataclass(frozen=True)
class ClassifyCost:
    column_samples: int
    latency_ns: float
    adc_energy_nj: float
    adder_energy_nj: float
    total_energy_nj: float


def classify_cost(
    num_prototypes: int,
    dimension: int,
    params: CostParams | None = None,
) -> ClassifyCost:
    """Latency/energy to score one query against every prototype."""
    params = params or CostParams()
    if num_prototypes < 1 or dimension < 1:
        raise ValueError("num_prototypes and dimension must be positive")
    chunks = -(-dimension // params.array_rows)
    samples = num_prototypes * chunks
    adc_energy_nj = 2 * samples * params.adc_energy_pj / 1000.0
    return ClassifyCost(
        column_samples=samples,
        latency_ns=samples * params.adc_latency_ns,
        adc_energy_nj=adc_energy_nj,
        adder_energy_nj=params.similarity_energy_nj,
        total_energy_nj=adc_energy_nj + params.similarity_energy_nj,
    )


@dataclass(frozen=True)
class ProgramCost:
    """One-time database programming cost, kept apart from query costs."""

    im_rows_written: int
    am_columns_written: int
    im_latency_ns: float
    am_latency_ns: float


def program_cost(plan: LayoutPlan, params: CostParams | None = None, alphabet_size: int = 4) -> ProgramCost:
    """Write cost for loading the atomic vectors and all prototypes."""
    params = params or CostParams()
    if alphabet_size < 1:
        raise ValueError(f"alphabet_size must be >= 1, got {alphabet_size}")
    im_rows = alphabet_size * plan.chunks_per_vector
    am_columns = 2 * plan.am_columns_needed  # prototypes plus complements
    return ProgramCost(
        im_rows_written=im_rows,
        am_columns_written=am_columns,
        im_latency_ns=im_rows * params.write_latency_ns,
        am_latency_ns=am_columns * params.write_latency_ns,
    )


@dataclass(frozen=True)
class AreaReport:
    unit_areas_mm2: dict[str, float]
    total_mm2: float
    shares_percent: dict[str, float]


def area_report(params: CostParams | None = None) -> AreaReport:
    """The four unit areas, their sum, and shares recomputed from absolutes."""
    params = params or CostParams()
    units = {
        "im": params.im_area_mm2,
        "encoder": params.encoder_area_mm2,
        "am": params.am_area_mm2,
        "similarity": params.similarity_area_mm2,
    }
    total = sum(units.values())
    shares = {name: 100.0 * area / total for name, area in units.items()}
    return AreaReport(unit_areas_mm2=units, total_mm2=total, shares_percent=shares)


@dataclass(frozen=True)
class CostReport:
    """Everything the cost subcommand reports for one workload."""

    plan: LayoutPlan
    encode: EncodeCost
    classify: ClassifyCost
    program: ProgramCost
    area: AreaReport
    params: CostParams

    def rows(self) -> list[tuple[str, object]]:
        """Flat (metric, value) rows for TSV output."""
        out: list[tuple[str, object]] = []
        for name, value in dataclasses.asdict(self.plan).items():
            out.append((f"layout.{name}", value))
        for name, value in dataclasses.asdict(self.encode).items():
            out.append((f"encode.{name}", value))
        for name, value in dataclasses.asdict(self.classify).items():
            out.append((f"classify.{name}", value))
        for name, value in dataclasses.asdict(self.program).items():
            out.append((f"program.{name}", value))
        for name, value in self.area.unit_areas_mm2.items():
            out.append((f"area.{name}_mm2", value))
        out.append(("area.total_mm2", self.area.total_mm2))
        for name, value in self.area.shares_percent.items():
            out.append((f"area.{name}_share_percent", value))
        return out


def cost_report(
    read_length: int,
    ngram_size: int,
    num_prototypes: int,
    dimension: int,
    params: CostParams | None = None,
    bundling_cap: int | None = None,
    alphabet_size: int = 4,
) -> CostReport:
    params = params or CostParams()
    plan = plan_layout(dimension, num_prototypes, params)
    return CostReport(
        plan=plan,
        encode=encode_cost(read_length, ngram_size, params, bundling_cap),
        classify=classify_cost(num_prototypes, dimension, params),
        program=program_cost(plan, params, alphabet_size),
        area=area_report(params),
        params=params,
    )

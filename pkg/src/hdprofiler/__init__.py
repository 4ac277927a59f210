"""hdprofiler: hyperdimensional-computing read profiler.

Encodes reference genomes and sample reads into high-dimensional packed
binary vectors, classifies every read against all references at once by
Hamming similarity, estimates species-level relative abundance with a
two-pass unique-then-proportional scheme, and models the latency, energy,
and area of an in-memory accelerator for a given workload.
"""

__version__ = "0.1.0"

from .abundance import AbundanceProfile, TaxonAbundance, estimate
from .classify import MULTI, UNIQUE, UNMAPPED, ReadClassification, classify, similarity
from .core import BundleAccumulator, HDVector, hamming, rotate, xor_bind
from .costmodel import (
    CostParams,
    LayoutPlan,
    area_report,
    classify_cost,
    cost_report,
    encode_cost,
    plan_layout,
)
from .encoding import (
    SequenceEncoder,
    SequenceView,
    encode_ngram,
    encode_reference,
    encode_sequence,
    reverse_complement,
)
from .errors import (
    AmbiguousSymbolError,
    ConfigFormatError,
    ConfigMismatchError,
    DbFormatError,
    DimensionError,
    DuplicateTaxonError,
    EmptyBundleError,
    EmptyReferenceError,
    InternalConsistencyError,
    IoError,
    ParseError,
    ProfilerError,
    TaxonMappingError,
    TooShortError,
    WindowError,
)
from .ingest import RecordStream, open_stream, write_fasta
from .metrics import EvalReport, TruthProfile, evaluate, load_truth, throughput_report
from .pipeline import ProfileResult, build_database, profile_reads
from .refdb import (
    HDRefDB,
    PrototypeRecord,
    build_refdb,
    footprint,
    load_refdb,
    save_refdb,
)
from .space import (
    HDSpaceConfig,
    ItemMemory,
    calibrate_threshold,
    default_config,
    generate_item_memory,
    load_config,
    save_config,
)

__all__ = [name for name in dir() if not name.startswith("_")]

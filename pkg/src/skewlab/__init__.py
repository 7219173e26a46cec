"""Intra-pair skew impact analysis for differential interconnects.

Quantifies how per-conductor delay asymmetry in a 4-port differential
channel degrades the differential insertion loss: per-frequency phase
corrections null the intra-pair skew, and the loss deviation between the
measured and corrected channels (SILD) plus its signaling-band figure of
merit replace the conventional skew numbers, which are also provided for
comparison.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .batch import (
    BatchReport,
    ChannelRecord,
    RecordFlags,
    analyze_batch,
    fom_histogram,
    fraction_below,
)
from .conventional import (
    Excitation,
    SkewProfile,
    TdtTrace,
    dc_conversion_delta,
    eips,
    phase_skew,
    skew_loss,
    tdt_response,
    tdt_skew,
)
from .deskew import (
    DeskewSolution,
    FomConfig,
    SildResult,
    apply_deskew,
    compute_sild,
    eq_skew,
    fom_sild,
    fom_weight,
    solve_deskew,
)
from .errors import (
    EmptyBand,
    EmptyInput,
    GridMismatch,
    GridOutOfRange,
    InsufficientBandwidth,
    MalformedRecord,
    NoCrossing,
    NonMonotonicFrequency,
    PortCountMismatch,
    SingularConversion,
    SkewlabError,
    UnsupportedParameter,
)
from .network import (
    DEFAULT_PORT_MAP,
    MixedModeNetwork,
    PortMap,
    ReciprocityReport,
    SingleEndedNetwork,
    cascade,
    enforce_reciprocity,
    reciprocity_metric,
    resample,
    to_mixed_mode,
)
from .synth import (
    ChannelSpec,
    LineSpec,
    SeDelaySpec,
    build_channel,
    frequency_grid,
    make_coupled_pair,
    make_se_delay,
    make_uncoupled_pair,
)
from .touchstone import TouchstoneOptions, parse_touchstone, write_touchstone

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND",
    "__version__",
    # errors
    "SkewlabError",
    "NonMonotonicFrequency",
    "MalformedRecord",
    "UnsupportedParameter",
    "PortCountMismatch",
    "GridMismatch",
    "GridOutOfRange",
    "SingularConversion",
    "NoCrossing",
    "InsufficientBandwidth",
    "EmptyBand",
    "EmptyInput",
    # network
    "PortMap",
    "DEFAULT_PORT_MAP",
    "SingleEndedNetwork",
    "MixedModeNetwork",
    "ReciprocityReport",
    "to_mixed_mode",
    "cascade",
    "resample",
    "reciprocity_metric",
    "enforce_reciprocity",
    # touchstone
    "TouchstoneOptions",
    "parse_touchstone",
    "write_touchstone",
    # deskew
    "DeskewSolution",
    "FomConfig",
    "SildResult",
    "solve_deskew",
    "apply_deskew",
    "compute_sild",
    "fom_weight",
    "fom_sild",
    "eq_skew",
    # conventional
    "SkewProfile",
    "Excitation",
    "TdtTrace",
    "phase_skew",
    "skew_loss",
    "tdt_response",
    "tdt_skew",
    "dc_conversion_delta",
    "eips",
    # synth
    "LineSpec",
    "SeDelaySpec",
    "ChannelSpec",
    "frequency_grid",
    "make_uncoupled_pair",
    "make_coupled_pair",
    "make_se_delay",
    "build_channel",
    # batch
    "RecordFlags",
    "ChannelRecord",
    "BatchReport",
    "analyze_batch",
    "fom_histogram",
    "fraction_below",
]

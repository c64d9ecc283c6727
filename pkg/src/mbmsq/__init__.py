"""Coded media-based modulation: MAP-index codes over GF(2^m), squaring
constellations, exact pair geometry and Monte-Carlo BER."""

from .gf2m import Field, FieldElement, FieldError, field_new, poly_mulmod
from .map_index_code import (
    CodeParameterError,
    MapIndexCodebook,
    build_shortened_rs,
    encode,
    hamming_spectrum,
    map_indices_to_mirror_bits,
)
from .squaring import (
    ConstructionError,
    PartitionNode,
    SymbolConstellation,
    base_pam,
    build_constellation,
    min_sq_distance,
    partition2,
    square,
)
from .constellation import (
    CapExceeded,
    DistanceSpectrum,
    MbmSignalSet,
    SignalSetError,
    bpsk,
    coded_rate,
    conventional_set,
    distance_spectrum,
    proposed_set,
    rate,
)
from .link_analysis import (
    PairClasses,
    PairGeometry,
    RankProfile,
    pair_classes,
    pair_geometry,
    pep_bound,
    rank_profile,
    union_bound,
)
from .channel_sim import BerPoint, SimConfig, ber_curve, ber_vs_nr, draw_channel, ebn0_from_snr, simulate_block

__version__ = "0.1.0"

"""Robust JPEG steganography with boundary-preserving overflow alleviation.

Coefficient-level pipeline: preprocessing that removes reconstruction
overflow while sparing block boundaries, dither-modulation embedding with
syndrome-trellis codes and asymmetric costs, adaptive RS(31, k) error
correction, and a simulated recompression channel for verification.
"""

from .adaptive import AdaptiveResult, EmbedParams, adaptive_embed, error_rate
from .containers import ContainerError, read_jcov, read_pgm, write_jcov, write_pgm
from .costs import CostMaps, WET_COST, asymmetric_costs, juniward_costs, modification_costs
from .embed import (
    CoverSequence,
    StegoRecord,
    apply_stego_changes,
    extract_cover_sequence,
    read_record,
    stc_embed,
    stc_extract,
    write_record,
)
from .jpegmodel import (
    ChannelModel,
    CoeffImage,
    ParameterError,
    QuantTable,
    SpatialImage,
    compress_spatial,
    dequantize,
    forward_dct,
    inverse_dct,
    quant_table_for_qf,
    quantize,
    recompress,
    round_spatial,
    to_spatial,
    truncate_spatial,
)
from .metrics import QualityReport, image_quality, psnr, relative_payload, ssim
from .preprocess import (
    BlockPartition,
    OverflowCensus,
    PreprocessParams,
    build_reference_cover,
    clamp_region,
    full_clamp_baseline,
    overflow_census,
    partition_block,
    preprocess_cover,
)
from .rs import RsConfig, VALID_K, rs_decode, rs_encode
from .stc import CapacityError, EmbeddingError, StcParams

__version__ = "0.1.0"

"""Offline signature verification: preprocessing, grid features, MLP classifier."""

from .errors import SigverError
from .evaluation import (
    DatasetManifest,
    MetricsReport,
    Sample,
    SignerSet,
    SplitSpec,
    evaluate,
    load_manifest,
    make_split,
    sweep,
    write_csv,
)
from .features import (
    FeatureVector,
    Layout,
    assemble,
    assemble_from_grid,
    chain_code_histograms,
    energy_densities,
    extract_features,
    scale,
)
from .mlp import (
    Decision,
    EpochRecord,
    MlpModel,
    StopReason,
    TrainConfig,
    TrainResult,
    classify,
    forward,
    gradients,
    init,
    load_model,
    mse,
    save_model,
    tansig,
    train,
)
from .preprocess import (
    SegmentGrid,
    aspect_ratio,
    binarize,
    crop_to_content,
    deskew,
    estimate_skew,
    median_filter3,
    otsu_threshold,
    preprocess_pipeline,
    resize_nn,
    segment_grid,
    thin,
)
from .raster import BinaryRaster, GrayRaster, load_pgm, save_pgm, to_gray
from .syndata import (
    FORGERY_KIND,
    GENUINE_KIND,
    SampleKind,
    SignerStyle,
    gen_dataset,
    gen_signature,
)

__version__ = "0.1.0"

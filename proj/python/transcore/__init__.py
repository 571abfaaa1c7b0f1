"""transcore: SAMScore and baseline metrics for image translation."""

from transcore._core import (
    Rng,
    TranscoreError,
    correlate,
    cosine,
    derive_seed,
    distort,
    encode,
    fcn_scores,
    heatmap,
    l2,
    onnx_runtime_available,
    pearson,
    psnr,
    read_npy,
    read_png,
    resize_bilinear,
    run_sweep,
    samscore,
    samscore_embeddings,
    ssim,
    stub_encode,
    write_npy,
    write_png,
)

__version__ = "0.1.0"

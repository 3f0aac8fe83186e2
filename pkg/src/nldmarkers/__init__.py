"""Nonlinear-dynamics markers (Hurst exponent, box-counting dimension,
Shannon entropy) for sampled biosignals, with the preprocessing and
post-hoc statistics used to tabulate them per recording session."""

__version__ = "0.1.0"

from nldmarkers.series import (
    SampledSeries,
    SessionRecord,
    WindowStats,
    epoch_split,
    window_mean,
    window_stats,
    window_std,
)
from nldmarkers.preprocess import FilterSpec, detrend_linear, highpass, notch, select_channel
from nldmarkers.hurst import HurstConfig, HurstFit, RsPoint, hurst_exponent, rescaled_range
from nldmarkers.fractal import BoxCount, FractalFit, PlanarCurve, box_count, embed_signal, fractal_dimension
from nldmarkers.entropy import AmplitudeHistogram, EntropyResult, histogram, shannon_entropy, signal_entropy
from nldmarkers.stats import (
    CorrelationMatrix,
    FeatureRow,
    FeatureTable,
    FTestReport,
    f_cdf,
    f_crit,
    f_test_two_sample,
    pearson_matrix,
)

__all__ = [
    "SampledSeries", "SessionRecord", "WindowStats", "epoch_split", "window_mean",
    "window_stats", "window_std", "FilterSpec", "detrend_linear", "highpass", "notch",
    "select_channel", "HurstConfig", "HurstFit", "RsPoint", "hurst_exponent",
    "rescaled_range", "BoxCount", "FractalFit", "PlanarCurve", "box_count",
    "embed_signal", "fractal_dimension", "AmplitudeHistogram", "EntropyResult",
    "histogram", "shannon_entropy", "signal_entropy", "CorrelationMatrix",
    "FeatureRow", "FeatureTable", "FTestReport", "f_cdf", "f_crit",
    "f_test_two_sample", "pearson_matrix",
]

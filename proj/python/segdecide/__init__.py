"""Bayes and maximum-likelihood decision rules for segmentation posteriors.

Arrays are NumPy: label maps are (H, W) uint8, posteriors and prior stacks
(H, W, N) float32 with channels last, global priors 1-D.
"""

from ._core import (
    ConfigError,
    Error,
    FormatError,
    InvariantError,
    IoError,
    ShapeError,
    average_probability_maps,
    class_scores,
    compute_global_priors,
    compute_pixel_priors,
    confusion_matrix,
    decide_bayes,
    decide_ml,
    expected_cost,
    generate_scene,
    global_vs_local_scenario,
    label_components,
    oracle_posteriors,
    postprocess,
    read_tensor,
    run_experiment,
    smooth_priors,
    write_label_map,
    write_pgm,
    write_probability_map,
)

__all__ = [name for name in dir() if not name.startswith("_")]

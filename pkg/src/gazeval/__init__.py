"""Eye-movement-aware evaluation of video saliency predictions.

Ground truth distinguishes what the eyes were doing: smooth pursuit samples
(``sp``), fixation samples (``fix``), or fixation onsets (``onset``).
Predictions are dense spatio-temporal volumes scored with the usual saliency
metrics plus pursuit-specific diagnostics, against Gaussian ground-truth
volumes built from the labelled gaze.
"""

from .aggregate import (
    ClipScore,
    ExperimentResult,
    ks_test_one_sided,
    pooled_perfect_auc,
    rank_table,
    regular_mean,
    subset_experiment,
    weighted_mean,
)
from .baselines import (
    centre_map,
    chance_map,
    infinite_humans_scores,
    one_human_scores,
    permutation_map,
)
from .config import EvalConfig, parse_config, read_config, write_config
from .dataset import ClipInfo, load_manifest, load_recordings
from .gaze import (
    AttendedLocation,
    AttendedLocationSet,
    Condition,
    GazeEvent,
    GazeRecording,
    GazeSample,
    Label,
    condition_locations,
    extract_events,
    parse_gaze_csv,
    scale_locations,
)
from .ground_truth import (
    GtParams,
    accumulate_gaussians,
    build_gt_volume,
    degrees_to_pixels,
)
from .metrics import (
    LOWER_IS_BETTER,
    Metric,
    MetricScore,
    auc_borji,
    auc_judd,
    balanced_accuracy,
    cc,
    info_gain,
    kld,
    nss,
    roc_auc_from_scores,
    sauc,
    sim,
    xauc,
)
from .postprocess import gravity_centre_bias
from .sampler import (
    SubvolumeSpec,
    extract_subvolume,
    reflect_index,
    sample_training_locations,
)
from .shuffling import (
    derive_seed,
    sample_shuffled_negatives,
    temporal_rescale_locations,
)
from .volume import (
    SaliencyVolume,
    normalize_distribution,
    read_rgb_block,
    read_volume,
    resize_volume,
    sample_value,
    sample_values,
    write_rgb_block,
    write_volume,
)

__version__ = "0.1.0"

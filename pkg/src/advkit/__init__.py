"""Open-set audio deepfake source-tracing engine.

Builds enrollment representations from per-utterance embeddings, scores
same-method / different-method verification trials, calibrates decision
thresholds on validation data, and reports the full verification metric
suite.  A deterministic DSP branch supplies artifact-statistics embeddings
from raw audio, and a synthetic cluster simulator provides controllable
corpora for end-to-end checks.
"""

from .core import BRANCHES, SPLITS, Embedding, MethodLabel, UtteranceRecord
from .dsp import (
    ArtifactVector,
    AudioBuffer,
    MelSpectrogram,
    artifact_features,
    extract_corpus,
    load_wav,
    mel_spectrogram,
)
from .errors import AdvkitError, FormatError, ValidationError
from .fusion import BranchConfig, NormalizerStats, fit_config, fit_normalizer, fuse, fuse_stores
from .manifest import load_manifest, read_manifest, save_manifest, write_manifest
from .metrics import (
    MetricsReport,
    OperatingPoint,
    RocCurve,
    auroc,
    calibrate,
    eer,
    operating_point,
    report,
    roc,
)
from .scoring import (
    DetectionScore,
    MethodCentroid,
    ScoredTrial,
    centroid,
    decide,
    detection_scores,
    method_centroids,
    score_trials,
)
from .simulate import ClusterSpec, ProjectedPoint, generate, project_2d
from .store import load_store, read_store, save_store, store_bytes, write_store
from .trials import TrialPair, balance_subset, generate_trials, read_trials, write_trials

__version__ = "0.1.0"

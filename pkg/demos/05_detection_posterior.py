"""
From verification to detection
==============================

A verification engine that separates generation methods also separates
genuine speech from all of them.  Put one bonafide cluster far from ten
method clusters, represent every class by its centroid, and use the softmax
posterior of the bonafide centroid as a detection score.
"""

import numpy as np

from advkit import (
    ClusterSpec,
    ScoredTrial,
    auroc,
    detection_scores,
    generate,
    method_centroids,
)

spec = ClusterSpec(
    n_methods=10,
    samples_per_method=100,
    dim=32,
    separation=1.0,
    intra_std=0.25,
    seed=99,
    bonafide_separation=3.0,
)
records, embeddings = generate(spec)

centroids = method_centroids(embeddings, records)
print(f"{len(centroids)} centroids: " + ", ".join(c.label.name for c in centroids))

detections = detection_scores(embeddings, records, centroids, temperature=0.1)
bona = np.array([d.score for d in detections if d.is_bonafide])
spoof = np.array([d.score for d in detections if not d.is_bonafide])
print(f"bonafide posterior: genuine {bona.mean():.4f} +- {bona.std():.4f}")
print(f"                    spoofed {spoof.mean():.4f} +- {spoof.std():.4f}")

# Detection quality summarized with the same AUROC machinery used for trials.
scored = [
    ScoredTrial(d.utt_id, d.score, "same" if d.is_bonafide else "different")
    for d in detections
]
print(f"bonafide-vs-all AUROC: {auroc(scored):.5f}")

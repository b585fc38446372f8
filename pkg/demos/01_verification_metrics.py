"""
Verification metrics from raw trial scores
==========================================

Start from nothing but two lists of cosine scores (same-method trials and
different-method trials), walk the ROC curve, and read off every headline
number: EER, AUROC, and the fixed-rate operating points.
"""

import numpy as np

from advkit import ScoredTrial, auroc, eer, operating_point, report, roc

rng = np.random.Generator(np.random.PCG64(7))

# A mildly overlapping pair of score clouds: same-method trials score higher
# on average, but the tails cross, as they always do in practice.
same_scores = np.clip(rng.normal(0.55, 0.18, 800), -1, 1)
diff_scores = np.clip(rng.normal(0.05, 0.18, 800), -1, 1)

scored = [
    ScoredTrial(f"s{i}", float(v), "same") for i, v in enumerate(same_scores)
] + [
    ScoredTrial(f"d{i}", float(v), "different") for i, v in enumerate(diff_scores)
]

eer_value, eer_threshold = eer(scored)
print(f"EER            {eer_value:7.4f}  (threshold {eer_threshold:+.4f})")
print(f"AUROC          {auroc(scored):7.4f}")

frr_point = operating_point(scored, max_far=0.01)
far_point = operating_point(scored, max_frr=0.01)
print(f"FRR @ FAR<=1%  {frr_point.frr:7.4f}  (threshold {frr_point.threshold:+.4f})")
print(f"FAR @ FRR<=1%  {far_point.far:7.4f}  (threshold {far_point.threshold:+.4f})")

# The full eight-metric bundle at the EER threshold.
bundle = report(scored, eer_threshold)
print("\nreport at the EER threshold:")
print(bundle.to_json())

# The curve itself is a plain (threshold, FAR, FRR) table, ready for DET plots.
curve = roc(scored)
print(f"\ncurve has {len(curve)} operating points; first five:")
for t, fa, fr in list(zip(curve.thresholds, curve.far, curve.frr))[:5]:
    print(f"  threshold {t:+.4f}  far {fa:.4f}  frr {fr:.4f}")

import io

import numpy as np
import pytest

from advkit.errors import ValidationError
from advkit.metrics import auroc, calibrate, eer, operating_point, report, roc
from advkit.scoring import ScoredTrial, decide


def make_scored(same, diff):
    out = [
        ScoredTrial(trial_id=f"s{i}", score=float(s), label="same")
        for i, s in enumerate(same)
    ]
    out += [
        ScoredTrial(trial_id=f"d{i}", score=float(s), label="different")
        for i, s in enumerate(diff)
    ]
    return out


def clipped(rng_draw):
    # scores live in [-1, 1] (cosines); keep random draws inside the contract
    return np.clip(rng_draw, -1.0, 1.0)


# ---------------------------------------------------------------------------
# Independent oracles.  These recompute rates from scratch with the naive
# strict-">" rule at every candidate threshold; the fast implementations must
# agree with them to 1e-12.
# ---------------------------------------------------------------------------

def sweep_rates(same, diff, threshold):
    far = sum(1 for d in diff if d > threshold) / len(diff)
    frr = sum(1 for s in same if s <= threshold) / len(same)
    return far, frr


def candidate_thresholds(same, diff):
    values = sorted(set(same) | set(diff))
    mids = [(a + b) / 2.0 for a, b in zip(values, values[1:])]
    return [values[0] - 1.0] + mids + [values[-1] + 1.0]


def brute_force_eer(same, diff):
    """Sweep midpoint thresholds, then solve the FAR/FRR crossing."""
    points = sorted(
        (sweep_rates(same, diff, t) for t in candidate_thresholds(same, diff)),
        key=lambda p: p[0] - p[1],
    )
    for far, frr in points:
        if far == frr:
            return far
    below = max((p for p in points if p[0] - p[1] < 0), key=lambda p: p[0] - p[1])
    above = min((p for p in points if p[0] - p[1] > 0), key=lambda p: p[0] - p[1])
    dfar = above[0] - below[0]
    dfrr = above[1] - below[1]
    u = (below[1] - below[0]) / (dfar - dfrr)
    return below[0] + u * dfar


def brute_force_auroc(same, diff):
    wins = 0.0
    for s in same:
        for d in diff:
            if s > d:
                wins += 1.0
            elif s == d:
                wins += 0.5
    return wins / (len(same) * len(diff))


# ---------------------------------------------------------------------------
# Hand-computed fixtures
# ---------------------------------------------------------------------------

def test_perfectly_separated_eer_zero():
    value, threshold = eer(make_scored([0.9], [0.1]))
    assert value == 0.0
    # realizable threshold: decide() at it reproduces the perfect split
    assert 0.1 < threshold < 0.9
    decisions = decide(make_scored([0.9], [0.1]), threshold)
    assert decisions == ["same", "different"]


def test_eer_one_third_fixture():
    scored = make_scored([0.9, 0.8, 0.3], [0.7, 0.2, 0.1])
    value, threshold = eer(scored)
    assert value == pytest.approx(1.0 / 3.0, abs=1e-15)
    # at the returned threshold FAR and FRR are exactly 1/3 each
    far, frr = sweep_rates([0.9, 0.8, 0.3], [0.7, 0.2, 0.1], threshold)
    assert far == 1.0 / 3.0
    assert frr == 1.0 / 3.0


def test_roc_fixture_points():
    same, diff = [0.9, 0.3], [0.7, 0.1]
    curve = roc(make_scored(same, diff))
    assert list(curve.thresholds) == [1.9, 0.9, 0.7, 0.3, 0.1, -0.9]
    points = set(zip(curve.far, curve.frr))
    # every achievable operating point of this score set appears on the curve
    assert points == {(0.0, 1.0), (0.0, 0.5), (0.5, 0.5), (0.5, 0.0), (1.0, 0.0)}
    by_threshold = {t: (fa, fr) for t, fa, fr in zip(curve.thresholds, curve.far, curve.frr)}
    assert by_threshold[0.3] == (0.5, 0.0)  # the "just below 0.3" point
    assert by_threshold[1.9] == (0.0, 1.0)
    assert by_threshold[-0.9] == (1.0, 0.0)
    assert np.all(np.diff(curve.far) >= 0)
    assert np.all(np.diff(curve.frr) <= 0)
    assert np.all(np.diff(curve.thresholds) < 0)
    # the (FAR 0, FRR 0.5) point is realizable by a strict-">" decide threshold
    # in [0.7, 0.9), per the decide rule at threshold 0.7
    i = list(zip(curve.far, curve.frr)).index((0.0, 0.5))
    t = curve.realizable_threshold(i)
    assert 0.7 <= t < 0.9
    assert sweep_rates(same, diff, t) == (0.0, 0.5)


def test_roc_separated_contains_zero_zero():
    curve = roc(make_scored([0.9], [0.1]))
    assert any(fa == 0.0 and fr == 0.0 for fa, fr in zip(curve.far, curve.frr))


def test_roc_single_class_rejected():
    with pytest.raises(ValidationError):
        roc(make_scored([0.5], []))


def test_roc_sign_flip_symmetry():
    rng = np.random.Generator(np.random.PCG64(5))
    for _ in range(5):
        same = clipped(rng.normal(0.3, 0.2, 40))
        diff = clipped(rng.normal(-0.1, 0.2, 60))
        forward = roc(make_scored(same, diff))
        flipped = roc(make_scored(-diff, -same))
        # negating scores and swapping labels swaps the roles of FAR and FRR
        forward_points = set(zip(forward.far, forward.frr))
        flipped_points = {(fr, fa) for fa, fr in zip(flipped.far, flipped.frr)}
        assert forward_points == flipped_points


def test_auroc_fixture():
    assert auroc(make_scored([0.9, 0.3], [0.7, 0.1])) == pytest.approx(0.75, abs=1e-15)


def test_auroc_all_ties():
    assert auroc(make_scored([0.5, 0.5], [0.5, 0.5, 0.5])) == pytest.approx(0.5)


def test_auroc_matches_quadratic_oracle():
    rng = np.random.Generator(np.random.PCG64(17))
    same = np.round(clipped(rng.normal(0.5, 0.3, 250)), 2)  # rounding forces ties
    diff = np.round(clipped(rng.normal(0.2, 0.3, 250)), 2)
    fast = auroc(make_scored(same, diff))
    slow = brute_force_auroc(list(same), list(diff))
    assert abs(fast - slow) < 1e-12


def test_auroc_perfect_iff_separated():
    assert auroc(make_scored([0.5, 0.6], [0.1, 0.4])) == 1.0
    assert auroc(make_scored([0.5, 0.4], [0.45, 0.1])) < 1.0


def test_auroc_invariant_under_monotone_transform():
    rng = np.random.Generator(np.random.PCG64(23))
    same = rng.uniform(-0.5, 0.9, 80)
    diff = rng.uniform(-0.9, 0.5, 80)
    before = auroc(make_scored(same, diff))
    after = auroc(make_scored(np.tanh(2 * same), np.tanh(2 * diff)))
    assert abs(before - after) < 1e-12


def test_auroc_duplication_invariant():
    rng = np.random.Generator(np.random.PCG64(29))
    same = list(rng.normal(0.4, 0.2, 50))
    diff = list(rng.normal(0.0, 0.2, 70))
    base = auroc(make_scored(same, diff))
    doubled = auroc(make_scored(same + same, diff + diff))
    assert abs(base - doubled) < 1e-12


def test_eer_matches_brute_force_random_sets():
    rng = np.random.Generator(np.random.PCG64(31))
    for _ in range(40):
        n_s = int(rng.integers(2, 60))
        n_d = int(rng.integers(2, 60))
        same = np.round(clipped(rng.normal(0.3, 0.3, n_s)), 2)
        diff = np.round(clipped(rng.normal(-0.1, 0.3, n_d)), 2)
        fast, _ = eer(make_scored(same, diff))
        slow = brute_force_eer(list(same), list(diff))
        assert abs(fast - slow) < 1e-12


def test_eer_random_labels_near_half():
    rng = np.random.Generator(np.random.PCG64(37))
    for seed in range(5):
        local = np.random.Generator(np.random.PCG64(seed))
        scores = clipped(local.normal(0.0, 0.5, 10_000))
        labels = local.integers(0, 2, 10_000)
        scored = make_scored(scores[labels == 1], scores[labels == 0])
        value, _ = eer(scored)
        assert 0.46 <= value <= 0.54
    del rng


def test_operating_point_fixture():
    scored = make_scored([0.9, 0.8, 0.3], [0.7, 0.2, 0.1])
    point = operating_point(scored, max_far=0.01)
    assert point.far == 0.0
    assert point.frr == pytest.approx(1.0 / 3.0)
    # the threshold is realizable: decide() reproduces the same rates
    far, frr = sweep_rates([0.9, 0.8, 0.3], [0.7, 0.2, 0.1], point.threshold)
    assert (far, frr) == (point.far, point.frr)


def test_operating_point_perfect_separation():
    same = list(np.linspace(0.6, 0.9, 100))
    diff = list(np.linspace(0.1, 0.4, 100))
    point = operating_point(make_scored(same, diff), max_far=0.01)
    assert point.frr == 0.0
    assert point.far <= 0.01


def test_operating_point_granularity():
    # with 10 different-trials the smallest nonzero FAR is 0.1 > alpha
    scored = make_scored(np.linspace(0.5, 0.9, 10), np.linspace(0.0, 0.45, 10))
    point = operating_point(scored, max_far=0.01)
    assert point.far == 0.0


def test_operating_point_frr_side():
    scored = make_scored([0.9, 0.8, 0.3], [0.7, 0.2, 0.1])
    point = operating_point(scored, max_frr=0.01)
    assert point.frr == 0.0
    assert point.far == pytest.approx(1.0 / 3.0)


def test_operating_point_requires_single_constraint():
    scored = make_scored([0.9], [0.1])
    with pytest.raises(ValidationError):
        operating_point(scored)
    with pytest.raises(ValidationError):
        operating_point(scored, max_far=0.01, max_frr=0.01)


def test_report_fixture_counts():
    # TP=2 FP=1 TN=1 FN=0 at threshold 0.5
    scored = make_scored([0.9, 0.8], [0.7, 0.2])
    rep = report(scored, 0.5)
    assert rep.counts.tp == 2
    assert rep.counts.fp == 1
    assert rep.counts.tn == 1
    assert rep.counts.fn == 0
    assert rep.acc == 0.75
    assert rep.f1 == pytest.approx(0.8)
    assert rep.far == 0.5
    assert rep.frr == 0.0


def test_report_threshold_above_max():
    scored = make_scored([0.9, 0.8, 0.3], [0.7, 0.2, 0.1])
    rep = report(scored, 0.95)
    assert rep.far == 0.0
    assert rep.frr == 1.0
    assert rep.acc == 0.5  # n_different / total


def test_report_at_eer_threshold_balance():
    rng = np.random.Generator(np.random.PCG64(41))
    for _ in range(10):
        same = clipped(rng.normal(0.4, 0.25, int(rng.integers(20, 200))))
        diff = clipped(rng.normal(-0.1, 0.25, int(rng.integers(20, 200))))
        scored = make_scored(same, diff)
        _, threshold = eer(scored)
        rep = report(scored, threshold)
        bound = 1.0 / min(len(same), len(diff))
        assert abs(rep.far - rep.frr) <= bound + 1e-12


def test_report_exact_rational_rates():
    scored = make_scored([0.9, 0.8, 0.3], [0.7, 0.2, 0.1])
    rep = report(scored, 0.5)
    assert rep.far == 1 / 3
    assert rep.frr == 1 / 3


def test_report_json_fields():
    scored = make_scored([0.9, 0.8], [0.2, 0.1])
    doc = report(scored, 0.5).as_dict()
    for key in ("acc", "far", "frr", "eer", "f1", "auroc",
                "frr_at_far1", "far_at_frr1", "threshold_used", "counts"):
        assert key in doc
    assert doc["counts"]["n_same"] == 2


def test_calibrate_midpoint_of_gap():
    threshold = calibrate(make_scored([0.9, 0.8], [0.2, 0.1]))
    assert threshold == pytest.approx(0.5)  # midpoint of the separating gap


def test_calibrate_order_invariant():
    scored = make_scored([0.9, 0.4, 0.6], [0.5, 0.2, 0.3])
    shuffled = list(scored)
    np.random.Generator(np.random.PCG64(1)).shuffle(shuffled)
    assert calibrate(scored) == calibrate(shuffled)


def test_calibrate_transfers_to_matched_distribution():
    for seed in range(5):
        rng = np.random.Generator(np.random.PCG64(seed))
        def draw():
            return make_scored(clipped(rng.normal(0.5, 0.15, 500)), clipped(rng.normal(0.1, 0.15, 500)))
        threshold = calibrate(draw())
        rep = report(draw(), threshold)
        # both rates stay near the population EER: 3-sigma binomial slack
        sigma = 3 * np.sqrt(0.25 / 500)
        population_eer = 0.0912  # Phi(-(0.5-0.1)/(2*0.15)) for equal Gaussians
        assert abs(rep.far - population_eer) < sigma + 0.02
        assert abs(rep.frr - population_eer) < sigma + 0.02


def test_roc_csv_export():
    curve = roc(make_scored([0.9], [0.1]))
    buf = io.StringIO()
    curve.write_csv(buf)
    lines = buf.getvalue().strip().splitlines()
    assert lines[0] == "threshold,far,frr"
    assert len(lines) == 1 + len(curve)

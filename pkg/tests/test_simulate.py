import io

import numpy as np
import pytest

from advkit.errors import ValidationError
from advkit.metrics import eer
from advkit.scoring import score_trials
from advkit.simulate import ClusterSpec, generate, project_2d, write_projection_csv
from advkit.store import store_bytes
from advkit.trials import generate_trials


def spec(**kwargs):
    base = dict(
        n_methods=8,
        samples_per_method=30,
        dim=16,
        separation=2.0,
        intra_std=0.25,
        seed=0,
    )
    base.update(kwargs)
    return ClusterSpec(**base)


def pipeline_eer(corpus_spec, e_count=1, v_count=1, per_class=300, trial_seed=1234):
    records, embeddings = generate(corpus_spec)
    trials = generate_trials(records, e_count, v_count, per_class, seed=trial_seed)
    scored = score_trials(trials, embeddings)
    return eer(scored)[0]


def test_generate_shapes_and_labels():
    records, embeddings = generate(spec())
    assert len(records) == len(embeddings) == 8 * 30
    assert {r.label.name for r in records} == {f"M{i:03d}" for i in range(8)}
    assert all(r.split == "test" for r in records)
    assert all(e.branch == "fused" for e in embeddings)
    for e in embeddings:
        assert abs(np.linalg.norm(e.vector) - 1.0) < 1e-12


def test_generate_bonafide_cluster():
    records, _ = generate(spec(bonafide_separation=3.0))
    names = {r.label.name for r in records}
    assert "bonafide" in names
    bona = [r for r in records if r.label.name == "bonafide"]
    assert all(r.label.is_bonafide for r in bona)
    assert len(bona) == 30


def test_generate_deterministic():
    _, a = generate(spec(seed=9))
    _, b = generate(spec(seed=9))
    assert store_bytes(a) == store_bytes(b)


def test_generate_seed_changes_output():
    _, a = generate(spec(seed=1))
    _, b = generate(spec(seed=2))
    assert store_bytes(a) != store_bytes(b)


def test_zero_separation_chance_level_eer():
    for seed in range(5):
        value = pipeline_eer(
            spec(n_methods=10, samples_per_method=60, separation=0.0, seed=seed),
            per_class=500,
        )
        assert 0.45 <= value <= 0.55


def test_high_separation_low_eer():
    value = pipeline_eer(
        spec(n_methods=20, samples_per_method=100, dim=32, separation=4.0,
             intra_std=0.1, seed=3),
        per_class=500,
    )
    assert value < 0.02


def test_eer_monotone_in_separation():
    for seed in (0, 1, 2):
        values = [
            pipeline_eer(
                spec(n_methods=12, samples_per_method=50, dim=32,
                     separation=d, intra_std=0.25, seed=seed),
                per_class=400,
            )
            for d in (0.5, 1.0, 2.0, 4.0)
        ]
        assert all(a > b for a, b in zip(values, values[1:])), values


def test_enrollment_averaging_improves_eer():
    for seed in (0, 1, 2):
        corpus = spec(n_methods=12, samples_per_method=50, dim=32,
                      separation=1.0, intra_std=0.25, seed=seed)
        single = pipeline_eer(corpus, 1, 1, per_class=400)
        multi = pipeline_eer(corpus, 5, 5, per_class=400)
        assert multi <= single


def test_spec_validation():
    with pytest.raises(ValidationError):
        spec(n_methods=1)
    with pytest.raises(ValidationError):
        spec(intra_std=0.0)
    with pytest.raises(ValidationError):
        spec(separation=-1.0)
    with pytest.raises(ValidationError):
        spec(split="dev")


# --- projection ----------------------------------------------------------------

def test_projection_preserves_planar_distances():
    # points living in a 2-D plane inside an 8-D space
    rng = np.random.Generator(np.random.PCG64(5))
    basis, _ = np.linalg.qr(rng.standard_normal((8, 2)))
    planar = rng.standard_normal((60, 2)) * np.array([3.0, 1.0])
    cloud = planar @ basis.T
    from advkit.core import Embedding, MethodLabel, UtteranceRecord

    embeddings = [Embedding(f"u{i}", "fused", row) for i, row in enumerate(cloud)]
    records = [UtteranceRecord(f"u{i}", MethodLabel("M000"), "test") for i in range(60)]
    points = project_2d(embeddings, records)
    coords = np.array([[p.x, p.y] for p in points])
    original = np.linalg.norm(cloud[:, None] - cloud[None, :], axis=2)
    projected = np.linalg.norm(coords[:, None] - coords[None, :], axis=2)
    mask = original > 1e-9
    assert np.max(np.abs(projected[mask] - original[mask]) / original[mask]) < 1e-6


def test_projection_separates_clusters():
    records, embeddings = generate(
        spec(n_methods=2, samples_per_method=80, dim=16, separation=4.0, intra_std=0.1)
    )
    points = project_2d(embeddings, records)
    coords = {p.label: [] for p in points}
    for p in points:
        coords[p.label].append((p.x, p.y))
    centers = {k: np.mean(v, axis=0) for k, v in coords.items()}
    radii = {
        k: np.mean(np.linalg.norm(np.array(v) - centers[k], axis=1))
        for k, v in coords.items()
    }
    gap = np.linalg.norm(centers["M000"] - centers["M001"])
    assert gap > 4.0 * np.mean(list(radii.values()))


def test_projection_duplication_invariant():
    records, embeddings = generate(spec(n_methods=3, samples_per_method=20))
    single = project_2d(embeddings, records)
    from advkit.core import Embedding, UtteranceRecord

    dup_records = list(records) + [
        UtteranceRecord(r.utt_id + "+", r.label, r.split) for r in records
    ]
    dup_embeddings = list(embeddings) + [
        Embedding(e.utt_id + "+", e.branch, e.vector) for e in embeddings
    ]
    doubled = project_2d(dup_embeddings, dup_records)
    a = np.array([[p.x, p.y] for p in single])
    b = np.array([[p.x, p.y] for p in doubled[: len(single)]])
    # identical principal directions up to sign per axis
    for axis in range(2):
        same = np.allclose(a[:, axis], b[:, axis], atol=1e-6)
        flipped = np.allclose(a[:, axis], -b[:, axis], atol=1e-6)
        assert same or flipped


def test_projection_rank0_errors():
    from advkit.core import Embedding, MethodLabel, UtteranceRecord

    embeddings = [Embedding(f"u{i}", "fused", np.ones(4)) for i in range(5)]
    records = [UtteranceRecord(f"u{i}", MethodLabel("M"), "test") for i in range(5)]
    with pytest.raises(ValidationError, match="rank"):
        project_2d(embeddings, records)


def test_projection_csv_contains_centroid_rows():
    records, embeddings = generate(spec(n_methods=2, samples_per_method=10))
    points = project_2d(embeddings, records)
    buf = io.StringIO()
    write_projection_csv(points, buf)
    lines = buf.getvalue().strip().splitlines()
    assert lines[0] == "utt_id,x,y,label"
    assert len(lines) == 1 + len(points) + 2  # header + utterances + 2 centroids
    centroid_lines = [l for l in lines if l.startswith("centroid:")]
    assert len(centroid_lines) == 2
    # centroid coordinates equal the per-label mean of the projected points
    xs = [p.x for p in points if p.label == "M000"]
    ys = [p.y for p in points if p.label == "M000"]
    row = next(l for l in centroid_lines if l.endswith(",M000"))
    _, x, y, _ = row.split(",")
    assert float(x) == pytest.approx(np.mean(xs), rel=1e-12)
    assert float(y) == pytest.approx(np.mean(ys), rel=1e-12)

"""Command-line surface for batch evaluation runs.

Machine-readable results go to stdout, diagnostics (including the resolved
seed and configuration of every run) to stderr.  Exit codes: 0 success,
1 validation/usage error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import dsp, fusion, manifest, metrics, scoring, simulate, store, trials
from .errors import AdvkitError


class _Parser(argparse.ArgumentParser):
    # Usage errors are validation errors: exit 1, not argparse's default 2.
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(1)


def _resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return seed
    return int.from_bytes(os.urandom(8), "little") >> 1  # fresh 63-bit seed


def _echo_config(command: str, args: dict) -> None:
    printable = {
        k: (str(v) if isinstance(v, Path) else v)
        for k, v in args.items()
        if k != "func" and (v is None or isinstance(v, (str, int, float, bool, Path)))
    }
    sys.stderr.write(f"config: {json.dumps({'command': command, **printable})}\n")


def _filter_split(records, split):
    if split is not None:
        records = [r for r in records if r.split == split]
        if not records:
            raise AdvkitError(f"no records with split {split!r}")
    return records


def _cmd_simulate(args) -> int:
    seed = _resolve_seed(args.seed)
    spec = simulate.ClusterSpec(
        n_methods=args.methods,
        samples_per_method=args.samples,
        dim=args.dim,
        separation=args.separation,
        intra_std=args.intra_std,
        seed=seed,
        bonafide_separation=args.bonafide_separation,
        split=args.split,
    )
    _echo_config("simulate", {**vars(args), "seed": seed})
    records, embeddings = simulate.generate(spec)
    manifest.save_manifest(records, args.out_manifest)
    store.save_store(embeddings, args.out_store)
    sys.stderr.write(f"wrote {len(records)} records to {args.out_manifest} and {args.out_store}\n")
    return 0


def _cmd_trials(args) -> int:
    seed = _resolve_seed(args.seed)
    _echo_config("trials", {**vars(args), "seed": seed})
    records = _filter_split(manifest.load_manifest(args.manifest), args.split)
    trial_list = trials.generate_trials(
        records,
        e_count=args.e_count,
        v_count=args.v_count,
        trials_per_class=args.per_class,
        seed=seed,
    )
    trials.save_trials(trial_list, args.out)
    sys.stderr.write(f"wrote {len(trial_list)} trials to {args.out}\n")
    return 0


def _cmd_balance(args) -> int:
    seed = _resolve_seed(args.seed)
    _echo_config("balance", {**vars(args), "seed": seed})
    records = manifest.load_manifest(args.manifest)
    subset = trials.balance_subset(records, per_type=args.per_type, seed=seed)
    manifest.save_manifest(subset, args.out)
    sys.stderr.write(f"kept {len(subset)} of {len(records)} records\n")
    return 0


def _cmd_extract(args) -> int:
    _echo_config("extract", vars(args))
    records = manifest.load_manifest(args.manifest)
    if args.audio_root is not None:
        root = Path(args.audio_root)

        def loader(rec):
            if rec.source_path is None:
                raise AdvkitError(f"utterance {rec.utt_id!r} has no source_path")
            return dsp.load_wav(root / rec.source_path)

        embeddings, failures = dsp.extract_corpus(records, loader)
    else:
        embeddings, failures = dsp.extract_corpus(records)
    for utt_id, message in failures:
        sys.stderr.write(f"failed: {utt_id}: {message}\n")
    store.save_store(embeddings, args.out)
    sys.stderr.write(f"extracted {len(embeddings)} embeddings ({len(failures)} failures)\n")
    return 0


def _cmd_fuse(args) -> int:
    _echo_config("fuse", vars(args))
    structural = store.load_store(args.structural) if args.structural else None
    artifact = store.load_store(args.artifact) if args.artifact else None
    if args.config:
        config = fusion.load_config(args.config)
        if config.mode != args.mode:
            raise AdvkitError(
                f"--mode {args.mode} disagrees with config mode {config.mode}"
            )
    else:
        ref_structural = (
            store.load_store(args.reference_structural)
            if args.reference_structural
            else structural
        )
        ref_artifact = (
            store.load_store(args.reference_artifact)
            if args.reference_artifact
            else artifact
        )
        config = fusion.fit_config(
            args.mode, structural=ref_structural, artifact=ref_artifact, floor=args.floor
        )
    fused = fusion.fuse_stores(structural, artifact, config)
    store.save_store(fused, args.out)
    if args.config_out:
        fusion.save_config(config, args.config_out)
    sys.stderr.write(f"wrote {len(fused)} fused embeddings to {args.out}\n")
    return 0


def _cmd_score(args) -> int:
    _echo_config("score", vars(args))
    trial_list = trials.load_trials(args.trials)
    embeddings = store.load_store(args.store)
    scored = scoring.score_trials(trial_list, embeddings)
    scoring.save_scored(scored, args.out)
    sys.stderr.write(f"scored {len(scored)} trials\n")
    return 0


def _cmd_calibrate(args) -> int:
    _echo_config("calibrate", vars(args))
    scored = scoring.load_scored(args.scored)
    eer_value, threshold = metrics.eer(scored)
    doc = json.dumps({"threshold": threshold, "eer": eer_value}, indent=2)
    if args.out:
        Path(args.out).write_text(doc + "\n", encoding="utf-8")
    sys.stdout.write(doc + "\n")
    return 0


def _threshold_from_args(args) -> float:
    if (args.threshold is None) == (args.threshold_file is None):
        raise AdvkitError("provide exactly one of --threshold / --threshold-file")
    if args.threshold is not None:
        return args.threshold
    doc = json.loads(Path(args.threshold_file).read_text(encoding="utf-8"))
    if not isinstance(doc, dict) or "threshold" not in doc:
        raise AdvkitError(f"{args.threshold_file}: expected a JSON object with 'threshold'")
    return float(doc["threshold"])


def _cmd_evaluate(args) -> int:
    _echo_config("evaluate", vars(args))
    scored = scoring.load_scored(args.scored)
    threshold = _threshold_from_args(args)
    rep = metrics.report(scored, threshold)
    doc = rep.to_json()
    sys.stdout.write(doc + "\n")
    if args.out:
        out = Path(args.out)
        out.write_text(doc + "\n", encoding="utf-8")
        csv_path = out.parent / (out.stem + ".roc.csv")
        with open(csv_path, "w", encoding="utf-8") as fh:
            metrics.roc(scored).write_csv(fh)
        sys.stderr.write(f"wrote report to {out} and curve to {csv_path}\n")
    return 0


def _cmd_detect(args) -> int:
    _echo_config("detect", vars(args))
    embeddings = store.load_store(args.store)
    records = manifest.load_manifest(args.manifest)
    enroll_store = store.load_store(args.enroll_store) if args.enroll_store else embeddings
    enroll_manifest = (
        manifest.load_manifest(args.enroll_manifest) if args.enroll_manifest else records
    )
    centroids = scoring.method_centroids(enroll_store, enroll_manifest)
    detections = scoring.detection_scores(
        embeddings, records, centroids, temperature=args.temperature
    )
    scoring.save_detection(detections, args.out)
    sys.stderr.write(f"wrote {len(detections)} detection scores to {args.out}\n")
    return 0


def _cmd_project(args) -> int:
    _echo_config("project", vars(args))
    embeddings = store.load_store(args.store)
    records = manifest.load_manifest(args.manifest)
    points = simulate.project_2d(embeddings, records)
    simulate.save_projection_csv(points, args.out)
    sys.stderr.write(f"wrote {len(points)} projected points to {args.out}\n")
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="advkit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="generate a synthetic clustered corpus")
    p.add_argument("--out-manifest", required=True, type=Path)
    p.add_argument("--out-store", required=True, type=Path)
    p.add_argument("--methods", type=int, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--separation", type=float, required=True)
    p.add_argument("--intra-std", type=float, required=True)
    p.add_argument("--bonafide-separation", type=float, default=None)
    p.add_argument("--split", default="test", choices=["train", "validation", "test"])
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("trials", help="build verification trial pairs")
    p.add_argument("--manifest", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--e-count", type=int, default=1)
    p.add_argument("--v-count", type=int, default=1)
    p.add_argument("--per-class", type=int, required=True)
    p.add_argument("--split", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=_cmd_trials)

    p = sub.add_parser("balance", help="per-method balanced subsample of a manifest")
    p.add_argument("--manifest", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--per-type", type=int, default=1000)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=_cmd_balance)

    p = sub.add_parser("extract", help="artifact-statistics embeddings from WAV files")
    p.add_argument("--manifest", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--audio-root", type=Path, default=None)
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("fuse", help="combine branch stores into fused embeddings")
    p.add_argument("--mode", required=True, choices=list(fusion.MODES))
    p.add_argument("--structural", type=Path, default=None)
    p.add_argument("--artifact", type=Path, default=None)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--config", type=Path, default=None, help="load a fitted config")
    p.add_argument("--config-out", type=Path, default=None, help="save the fitted config")
    p.add_argument("--reference-structural", type=Path, default=None)
    p.add_argument("--reference-artifact", type=Path, default=None)
    p.add_argument("--floor", type=float, default=1e-6)
    p.set_defaults(func=_cmd_fuse)

    p = sub.add_parser("score", help="cosine-score trials against a store")
    p.add_argument("--trials", required=True, type=Path)
    p.add_argument("--store", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("calibrate", help="EER threshold from validation scores")
    p.add_argument("--scored", required=True, type=Path)
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(func=_cmd_calibrate)

    p = sub.add_parser("evaluate", help="full metric report at a fixed threshold")
    p.add_argument("--scored", required=True, type=Path)
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--threshold-file", type=Path, default=None)
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("detect", help="bonafide posterior scores per utterance")
    p.add_argument("--store", required=True, type=Path)
    p.add_argument("--manifest", required=True, type=Path)
    p.add_argument("--enroll-store", type=Path, default=None)
    p.add_argument("--enroll-manifest", type=Path, default=None)
    p.add_argument("--temperature", type=float, default=0.1)
    p.add_argument("--out", required=True, type=Path)
    p.set_defaults(func=_cmd_detect)

    p = sub.add_parser("project", help="2-D principal-component coordinates as CSV")
    p.add_argument("--store", required=True, type=Path)
    p.add_argument("--manifest", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    p.set_defaults(func=_cmd_project)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except AdvkitError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except OSError as exc:
        sys.stderr.write(f"i/o error: {exc}\n")
        return 2


def console_main() -> None:
    raise SystemExit(main())

"""
The same pipeline, driven through the CLI
=========================================

Every stage is a subcommand with stable exit codes (0 ok, 1 validation,
2 I/O), JSON on stdout and diagnostics on stderr, so the whole evaluation
can live in a shell script or a Makefile.  This script shells out to
`python -m advkit` and shows the artifacts each stage leaves behind.
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path


def run(*args):
    cmd = [sys.executable, "-m", "advkit", *map(str, args)]
    print("$ advkit " + " ".join(map(str, args)))
    result = subprocess.run(cmd, capture_output=True, text=True)
    if result.returncode != 0:
        sys.stderr.write(result.stderr)
        raise SystemExit(result.returncode)
    return result.stdout


with tempfile.TemporaryDirectory() as tmp:
    work = Path(tmp)
    run(
        "simulate", "--out-manifest", work / "corpus.jsonl",
        "--out-store", work / "corpus.adve",
        "--methods", 12, "--samples", 60, "--dim", 32,
        "--separation", 2.0, "--intra-std", 0.25, "--seed", 7,
    )
    run(
        "trials", "--manifest", work / "corpus.jsonl", "--out", work / "trials.jsonl",
        "--per-class", 400, "--seed", 11,
    )
    run(
        "score", "--trials", work / "trials.jsonl", "--store", work / "corpus.adve",
        "--out", work / "scored.jsonl",
    )
    calibration = json.loads(
        run("calibrate", "--scored", work / "scored.jsonl", "--out", work / "threshold.json")
    )
    print(f"  -> validation EER {calibration['eer']:.4f} "
          f"at threshold {calibration['threshold']:+.4f}")
    report = json.loads(
        run(
            "evaluate", "--scored", work / "scored.jsonl",
            "--threshold-file", work / "threshold.json",
            "--out", work / "report.json",
        )
    )
    print(f"  -> acc {report['acc']:.4f}, far {report['far']:.4f}, "
          f"frr {report['frr']:.4f}, auroc {report['auroc']:.4f}")
    print("\nartifacts left behind:")
    for path in sorted(work.iterdir()):
        print(f"  {path.name:<18} {path.stat().st_size:>8} bytes")

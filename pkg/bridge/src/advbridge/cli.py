"""Command line for the bridge: manifest in, structural ADVE store out."""

from __future__ import annotations

import argparse
import sys

from .backbones import BUILTIN_SPECTRAL
from .errors import BridgeError
from .extract import ExtractorConfig, extract_to_file


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="advkit-bridge",
        description="Extract structural embeddings from audio into an ADVE v1 store.",
    )
    parser.add_argument("--manifest", required=True)
    parser.add_argument("--out", required=True)
    parser.add_argument(
        "--model", default=BUILTIN_SPECTRAL,
        help=f"transformers model id, or {BUILTIN_SPECTRAL!r} (default) for the "
        f"deterministic no-download backbone",
    )
    parser.add_argument("--layer", type=int, default=-1)
    parser.add_argument("--batch-size", type=int, default=8)
    parser.add_argument("--device", default="cpu")
    parser.add_argument("--spectral-dim", type=int, default=64)
    parser.add_argument("--audio-root", default=None)
    args = parser.parse_args(argv)

    config = ExtractorConfig(
        model=args.model,
        layer=args.layer,
        batch_size=args.batch_size,
        device=args.device,
        spectral_dim=args.spectral_dim,
    )
    try:
        count, failures = extract_to_file(
            args.manifest, args.out, config, audio_root=args.audio_root
        )
    except BridgeError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except OSError as exc:
        sys.stderr.write(f"i/o error: {exc}\n")
        return 2
    for utt_id, message in failures:
        sys.stderr.write(f"failed: {utt_id}: {message}\n")
    sys.stderr.write(f"wrote {count} embeddings to {args.out} ({len(failures)} failures)\n")
    return 0


def console_main() -> None:
    raise SystemExit(main())

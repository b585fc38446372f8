"""Structural-embedding bridge: audio in, ADVE v1 stores out.

Runs a pluggable speech backbone (a transformers model id, or the built-in
deterministic spectral projection) over a manifest of audio files,
mean-pools hidden states over time, and serializes one vector per utterance
in the verification engine's store format.  The engine and this bridge
share nothing but the file formats.
"""

from .backbones import SpectralProjBackbone, get_backbone
from .errors import BridgeError
from .extract import ExtractorConfig, extract, extract_to_file
from .storefmt import write_store_file

__version__ = "0.1.0"

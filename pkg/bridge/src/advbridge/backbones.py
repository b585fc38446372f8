"""Pluggable speech backbones producing one vector per utterance.

Two families:

* ``builtin:spectral-proj`` - a deterministic, training-free extractor:
  log-mel frames pushed through a fixed seeded projection with a tanh
  nonlinearity, mean-pooled over time.  No downloads, bit-reproducible,
  used by the contract tests.
* any other identifier - treated as a transformers model id; hidden states
  of the selected layer are mean-pooled over time.  Model load failures are
  fatal by design.
"""

from __future__ import annotations

import numpy as np

from .errors import BridgeError

_PROJECTION_SEED = 0x5EEDFACE  # fixed: every run and machine agrees
_N_MELS = 80
_FRAME_SECONDS = 0.025
_HOP_SECONDS = 0.010
_LOG_FLOOR = 1e-10


def _log_mel_frames(wave: np.ndarray, sample_rate: int) -> np.ndarray:
    frame = int(round(sample_rate * _FRAME_SECONDS))
    hop = int(round(sample_rate * _HOP_SECONDS))
    if wave.size < frame:
        raise BridgeError(f"audio too short: {wave.size} samples < one {frame}-sample frame")
    windows = np.lib.stride_tricks.sliding_window_view(wave, frame)[::hop]
    n_fft = 1 << (frame - 1).bit_length()
    power = np.abs(np.fft.rfft(windows * np.hanning(frame), n=n_fft)) ** 2

    top_mel = 2595.0 * np.log10(1.0 + (sample_rate / 2.0) / 700.0)
    points = 700.0 * (10.0 ** (np.linspace(0.0, top_mel, _N_MELS + 2) / 2595.0) - 1.0)
    bins = np.arange(n_fft // 2 + 1) * (sample_rate / n_fft)
    bank = np.zeros((bins.size, _N_MELS))
    for k in range(_N_MELS):
        lo, mid, hi = points[k], points[k + 1], points[k + 2]
        bank[:, k] = np.maximum(
            0.0, np.minimum((bins - lo) / (mid - lo), (hi - bins) / (hi - mid))
        )
    return np.log(power @ bank + _LOG_FLOOR)


class SpectralProjBackbone:
    """Deterministic spectral features: tanh(W @ log-mel), mean-pooled.

    ``layer`` selects the pooled representation: 0 = raw log-mel (dim 80),
    1 or -1 = the projected features (dim ``dim``).
    """

    name = "builtin:spectral-proj"

    def __init__(self, dim: int = 64, layer: int = -1):
        if dim < 1:
            raise BridgeError("spectral projection dim must be >= 1")
        if layer not in (-1, 0, 1):
            raise BridgeError(f"builtin backbone has layers 0 and 1, got {layer}")
        self.layer = layer
        rng = np.random.Generator(np.random.PCG64(_PROJECTION_SEED))
        self._projection = rng.standard_normal((dim, _N_MELS)) / np.sqrt(_N_MELS)

    def embed(self, wave: np.ndarray, sample_rate: int) -> np.ndarray:
        frames = _log_mel_frames(wave, sample_rate)
        if self.layer == 0:
            return frames.mean(axis=0)
        return np.tanh(frames @ self._projection.T).mean(axis=0)


class TransformersBackbone:
    """Mean-pooled hidden states of a pretrained transformers speech model."""

    def __init__(self, model_id: str, layer: int = -1, device: str = "cpu"):
        self.name = model_id
        self.layer = layer
        self.device = device
        try:
            import torch  # noqa: F401
            from transformers import AutoFeatureExtractor, AutoModel
        except ImportError as exc:
            raise BridgeError(
                f"transformers/torch are required for model {model_id!r} "
                f"(pip install 'advkit-bridge[hf]')"
            ) from exc
        try:
            self._processor = AutoFeatureExtractor.from_pretrained(model_id)
            self._model = AutoModel.from_pretrained(model_id, output_hidden_states=True)
        except Exception as exc:  # load failure is fatal, whatever its shape
            raise BridgeError(f"cannot load model {model_id!r}: {exc}") from exc
        self._model.to(device)
        self._model.eval()

    def embed(self, wave: np.ndarray, sample_rate: int) -> np.ndarray:
        import torch

        inputs = self._processor(
            wave.astype(np.float32), sampling_rate=sample_rate, return_tensors="pt"
        )
        inputs = {k: v.to(self.device) for k, v in inputs.items()}
        with torch.no_grad():
            output = self._model(**inputs)
        hidden = output.hidden_states[self.layer]
        return hidden.squeeze(0).mean(dim=0).cpu().numpy().astype(np.float64)


BUILTIN_SPECTRAL = "builtin:spectral-proj"


def get_backbone(model: str, layer: int = -1, device: str = "cpu", spectral_dim: int = 64):
    if model == BUILTIN_SPECTRAL:
        return SpectralProjBackbone(dim=spectral_dim, layer=layer)
    return TransformersBackbone(model, layer=layer, device=device)

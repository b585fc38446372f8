"""Deterministic artifact-branch DSP: mel spectrograms and a 16-statistic
artifact vector computed straight from raw samples.

Fixed analysis parameters: 25 ms Hann frames, 10 ms hop, FFT size = next
power of two >= frame length, 80 triangular mel bands spanning 0 Hz to
Nyquist (mel(f) = 2595 * log10(1 + f/700)), natural-log compression with a
1e-10 floor.  The high-frequency band starts at 4 kHz, where vocoder
artifacts concentrate while most phonetic energy sits below.  Everything is
a pure function of the samples: identical input gives bit-identical output.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Callable, Sequence

import numpy as np
from scipy.io import wavfile

from .core import Embedding, UtteranceRecord
from .errors import AdvkitError, FormatError, ValidationError

FRAME_SECONDS = 0.025
HOP_SECONDS = 0.010
N_MELS = 80
LOG_FLOOR = 1e-10
HF_CUTOFF_HZ = 4000.0
SILENCE_RATIO = 1e-4
MIN_SAMPLE_RATE = 8000


@dataclass(frozen=True, eq=False)
class AudioBuffer:
    """Mono audio in [-1, 1] at a fixed sample rate."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        wave = np.asarray(self.samples, dtype=np.float64)
        if wave.ndim != 1 or wave.size < 1:
            raise ValidationError("audio must be a non-empty 1-D sample vector")
        if not np.all(np.isfinite(wave)):
            raise ValidationError("audio contains non-finite samples")
        if np.any(np.abs(wave) > 1.0):
            raise ValidationError("audio samples must lie in [-1, 1]")
        if self.sample_rate < 1:
            raise ValidationError("sample_rate must be a positive integer")
        object.__setattr__(self, "samples", wave)


@dataclass(frozen=True, eq=False)
class MelSpectrogram:
    """T x M matrix of log-mel energies (natural log, floored)."""

    frames: np.ndarray
    sample_rate: int
    n_mels: int
    frame_samples: int
    hop_samples: int


def frame_counts(n_samples: int, sample_rate: int) -> tuple[int, int, int]:
    """(frame_samples, hop_samples, n_frames) for the fixed 25 ms / 10 ms grid."""
    frame = int(round(sample_rate * FRAME_SECONDS))
    hop = int(round(sample_rate * HOP_SECONDS))
    if n_samples < frame:
        return frame, hop, 0
    return frame, hop, 1 + (n_samples - frame) // hop


def hz_to_mel(hz):
    return 2595.0 * np.log10(1.0 + np.asarray(hz, dtype=np.float64) / 700.0)


def mel_to_hz(mel):
    return 700.0 * (10.0 ** (np.asarray(mel, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(sample_rate: int, n_fft: int, n_mels: int = N_MELS) -> np.ndarray:
    """(n_fft//2 + 1) x n_mels triangular filters, linear in Hz between
    mel-spaced corner points from 0 Hz to Nyquist."""
    points_hz = mel_to_hz(np.linspace(0.0, hz_to_mel(sample_rate / 2.0), n_mels + 2))
    bin_hz = np.arange(n_fft // 2 + 1) * (sample_rate / n_fft)
    bank = np.zeros((bin_hz.size, n_mels))
    for k in range(n_mels):
        lo, mid, hi = points_hz[k], points_hz[k + 1], points_hz[k + 2]
        rising = (bin_hz - lo) / (mid - lo)
        falling = (hi - bin_hz) / (hi - mid)
        bank[:, k] = np.maximum(0.0, np.minimum(rising, falling))
    return bank


def _frames(wave: np.ndarray, frame: int, hop: int) -> np.ndarray:
    windows = np.lib.stride_tricks.sliding_window_view(wave, frame)
    return windows[::hop]


def _power_spectrogram(audio: AudioBuffer) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(power T x bins, bin frequencies Hz, raw frames) for feature ops."""
    if audio.sample_rate < MIN_SAMPLE_RATE:
        raise ValidationError(
            f"sample_rate {audio.sample_rate} below the {MIN_SAMPLE_RATE} Hz minimum"
        )
    frame, hop, n_frames = frame_counts(audio.samples.size, audio.sample_rate)
    if n_frames < 1:
        raise ValidationError(
            f"audio too short: {audio.samples.size} samples, need >= {frame} (25 ms)"
        )
    raw = _frames(audio.samples, frame, hop)
    n_fft = 1 << (frame - 1).bit_length()
    spectrum = np.fft.rfft(raw * np.hanning(frame), n=n_fft)
    power = np.abs(spectrum) ** 2
    freqs = np.arange(n_fft // 2 + 1) * (audio.sample_rate / n_fft)
    return power, freqs, raw


def mel_spectrogram(audio: AudioBuffer) -> MelSpectrogram:
    """Log-mel energies per frame; all-zero input gives the constant floor."""
    power, _, _ = _power_spectrogram(audio)
    frame, hop, _ = frame_counts(audio.samples.size, audio.sample_rate)
    bank = mel_filterbank(audio.sample_rate, 2 * (power.shape[1] - 1))
    return MelSpectrogram(
        frames=np.log(power @ bank + LOG_FLOOR),
        sample_rate=audio.sample_rate,
        n_mels=N_MELS,
        frame_samples=frame,
        hop_samples=hop,
    )


@dataclass(frozen=True)
class ArtifactVector:
    """Fixed bundle of 16 artifact statistics (the branch's embedding)."""

    hf_ratio_mean: float
    hf_ratio_var: float
    hf_discontinuity: float
    spectral_flux_mean: float
    spectral_flux_var: float
    silence_fraction: float
    silent_frame_flatness_mean: float
    silent_frame_hf_ratio_mean: float
    spectral_centroid_mean: float
    spectral_centroid_var: float
    spectral_flatness_mean: float
    spectral_flatness_var: float
    frame_energy_var: float
    log_energy_range: float
    zero_crossing_rate_mean: float
    zero_crossing_rate_var: float

    def __post_init__(self):
        values = self.as_array()
        if not np.all(np.isfinite(values)):
            raise ValidationError("artifact statistics must be finite")
        if not 0.0 <= self.hf_ratio_mean <= 1.0:
            raise ValidationError("hf_ratio_mean must lie in [0, 1]")
        if not 0.0 <= self.silence_fraction <= 1.0:
            raise ValidationError("silence_fraction must lie in [0, 1]")
        for name in (
            "hf_ratio_var",
            "spectral_flux_var",
            "spectral_centroid_var",
            "spectral_flatness_var",
            "frame_energy_var",
            "zero_crossing_rate_var",
        ):
            if getattr(self, name) < 0.0:
                raise ValidationError(f"{name} must be >= 0")

    @classmethod
    def field_names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, f.name) for f in fields(self)], dtype=np.float64)


ARTIFACT_DIM = 16


def artifact_features(audio: AudioBuffer) -> ArtifactVector:
    """The 16 artifact statistics for one utterance (needs >= 2 frames).

    Per-frame quantities: high-frequency ratio (power above 4 kHz over total,
    0 for empty frames), spectral flux (L2 distance of sum-normalized power
    spectra), flatness (geometric over arithmetic mean), centroid in Hz, and
    zero-crossing rate on the raw frames.  Silent frames sit 40 dB below the
    loudest frame; when none exist the silent-frame statistics are 0.  The
    log-energy range is floored 100 dB below the peak frame so it stays
    scale-invariant and bounded.
    """
    power, freqs, raw = _power_spectrogram(audio)
    n_frames = power.shape[0]
    if n_frames < 2:
        raise ValidationError(
            f"artifact features need >= 2 frames, got {n_frames}"
        )

    energy = power.sum(axis=1)
    nonzero = energy > 0.0
    safe_energy = np.where(nonzero, energy, 1.0)

    hf = np.where(nonzero, power[:, freqs > HF_CUTOFF_HZ].sum(axis=1) / safe_energy, 0.0)
    hf_steps = np.abs(np.diff(hf))

    normalized = np.where(nonzero[:, None], power / safe_energy[:, None], 0.0)
    flux = np.linalg.norm(np.diff(normalized, axis=0), axis=1)

    centroid_hz = np.where(nonzero, (power * freqs).sum(axis=1) / safe_energy, 0.0)

    # Flatness in the log domain so tiny frames cannot underflow to 0.
    any_zero_bin = np.any(power == 0.0, axis=1)
    with np.errstate(divide="ignore"):
        log_power = np.log(np.where(power > 0.0, power, 1.0))
    flatness = np.where(
        nonzero & ~any_zero_bin,
        np.exp(log_power.mean(axis=1) - np.log(safe_energy / power.shape[1])),
        0.0,
    )

    max_energy = float(energy.max())
    silent = energy < max_energy * SILENCE_RATIO
    n_silent = int(silent.sum())

    if max_energy == 0.0:
        log_range = 0.0
    else:
        floor = max(float(energy.min()), max_energy * 1e-10)
        log_range = float(np.log(max_energy / floor))

    crossings = np.sum(raw[:, 1:] * raw[:, :-1] < 0.0, axis=1)
    zcr = crossings / (raw.shape[1] - 1)

    return ArtifactVector(
        hf_ratio_mean=float(hf.mean()),
        hf_ratio_var=float(hf.var()),
        hf_discontinuity=float(hf_steps.mean()),
        spectral_flux_mean=float(flux.mean()),
        spectral_flux_var=float(flux.var()),
        silence_fraction=n_silent / n_frames,
        silent_frame_flatness_mean=float(flatness[silent].mean()) if n_silent else 0.0,
        silent_frame_hf_ratio_mean=float(hf[silent].mean()) if n_silent else 0.0,
        spectral_centroid_mean=float(centroid_hz.mean()),
        spectral_centroid_var=float(centroid_hz.var()),
        spectral_flatness_mean=float(flatness.mean()),
        spectral_flatness_var=float(flatness.var()),
        frame_energy_var=float(energy.var()),
        log_energy_range=log_range,
        zero_crossing_rate_mean=float(zcr.mean()),
        zero_crossing_rate_var=float(zcr.var()),
    )


def load_wav(path) -> AudioBuffer:
    """Read a PCM WAV file (16-bit int or 32-bit float only).

    Multi-channel audio is averaged to mono; values are clipped to [-1, 1].
    """
    try:
        rate, data = wavfile.read(path)
    except ValueError as exc:
        raise FormatError(f"{path}: not a readable WAV file ({exc})") from exc
    if data.dtype == np.int16:
        wave = data.astype(np.float64) / 32768.0
    elif data.dtype == np.float32:
        wave = data.astype(np.float64)
    else:
        raise FormatError(
            f"{path}: unsupported WAV encoding {data.dtype}; "
            f"only 16-bit PCM and 32-bit float are accepted"
        )
    if wave.ndim == 2:
        wave = wave.mean(axis=1)
    return AudioBuffer(samples=np.clip(wave, -1.0, 1.0), sample_rate=int(rate))


def _load_from_record(record: UtteranceRecord) -> AudioBuffer:
    if record.source_path is None:
        raise ValidationError(f"utterance {record.utt_id!r} has no source_path")
    return load_wav(record.source_path)


def extract_corpus(
    records: Sequence[UtteranceRecord],
    loader: Callable[[UtteranceRecord], AudioBuffer] = _load_from_record,
) -> tuple[list[Embedding], list[tuple[str, str]]]:
    """Artifact embeddings (dim 16) for a manifest, in manifest order.

    Per-utterance failures are collected as (utt_id, message) instead of
    aborting; the call raises only if every utterance fails.  No corpus
    normalization happens here; that belongs to fusion.
    """
    if not records:
        raise ValidationError("cannot extract an empty manifest")
    embeddings: list[Embedding] = []
    failures: list[tuple[str, str]] = []
    for rec in records:
        try:
            vector = artifact_features(loader(rec)).as_array()
        except (AdvkitError, OSError) as exc:
            failures.append((rec.utt_id, str(exc)))
            continue
        embeddings.append(Embedding(utt_id=rec.utt_id, branch="artifact", vector=vector))
    if not embeddings:
        summary = "; ".join(f"{uid}: {msg}" for uid, msg in failures[:3])
        raise ValidationError(f"every utterance failed extraction ({summary} ...)")
    return embeddings, failures

"""Log-Mel front end and the frame transforms applied before the autoencoder."""

from dataclasses import dataclass

import numpy as np
from scipy.signal import get_window

from .tensor import as_matrix, as_tensor3

__all__ = [
    "AudioClip",
    "MelConfig",
    "mel_scale",
    "mel_to_hz",
    "mel_filterbank",
    "power_stft",
    "log_mel",
    "build_tensor",
    "abs_transform",
    "stack_frames",
]


@dataclass(frozen=True)
class AudioClip:
    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1 or samples.size == 0:
            raise ValueError("clip samples must be a non-empty 1-D array")
        if self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be > 0, got {self.sample_rate}")
        object.__setattr__(self, "samples", samples)

    @property
    def duration(self):
        return self.samples.size / self.sample_rate


@dataclass(frozen=True)
class MelConfig:
    """STFT and Mel filterbank settings. ``f_max=None`` means Nyquist."""

    sample_rate: int = 16000
    frame_len: int = 1024
    hop: int = 512
    n_mels: int = 64
    f_min: float = 0.0
    f_max: float = None
    log_floor: float = 1e-10
    center_pad: bool = True

    def __post_init__(self):
        if self.f_max is None:
            object.__setattr__(self, "f_max", self.sample_rate / 2)
        if self.n_mels < 1:
            raise ValueError("n_mels must be >= 1")
        if not 0 < self.hop <= self.frame_len:
            raise ValueError("hop must be in (0, frame_len]")
        if not 0 <= self.f_min < self.f_max <= self.sample_rate / 2:
            raise ValueError("need 0 <= f_min < f_max <= sample_rate / 2")
        if not self.log_floor > 0:
            raise ValueError("log_floor must be > 0")


def mel_scale(f):
    """HTK Mel scale, ``2595 * log10(1 + f / 700)``."""
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def mel_center_frequencies(cfg):
    """Hz positions of the ``n_mels + 2`` filter edges, evenly spaced in Mel."""
    mels = np.linspace(mel_scale(cfg.f_min), mel_scale(cfg.f_max), cfg.n_mels + 2)
    return mel_to_hz(mels)


def mel_filterbank(cfg):
    """Triangular filters with unit peak, shape ``(n_mels, frame_len // 2 + 1)``."""
    fft_freqs = np.arange(cfg.frame_len // 2 + 1) * cfg.sample_rate / cfg.frame_len
    edges = mel_center_frequencies(cfg)
    lower, center, upper = edges[:-2, None], edges[1:-1, None], edges[2:, None]
    rising = (fft_freqs - lower) / (center - lower)
    falling = (upper - fft_freqs) / (upper - center)
    return np.maximum(0.0, np.minimum(rising, falling))


def power_stft(samples, cfg):
    """Power spectrogram ``|STFT|^2`` with a periodic Hann window, shape (bins, T)."""
    y = np.asarray(samples, dtype=np.float64)
    if cfg.center_pad:
        pad = cfg.frame_len // 2
        if y.size <= pad:
            raise ValueError("clip too short for reflect padding")
        y = np.pad(y, pad, mode="reflect")
    if y.size < cfg.frame_len:
        raise ValueError(f"clip shorter than one frame ({cfg.frame_len} samples)")
    frames = np.lib.stride_tricks.sliding_window_view(y, cfg.frame_len)[:: cfg.hop]
    window = get_window("hann", cfg.frame_len, fftbins=True)
    spec = np.fft.rfft(frames * window, axis=1)
    return (spec.real**2 + spec.imag**2).T


def log_mel(clip, cfg=None):
    """Log-Mel spectrogram in dB, shape ``(n_mels, T)``.

    ``T = 1 + len // hop`` with centering, so a
    10 s clip at 16 kHz with the defaults gives 313 frames.
    """
    cfg = cfg or MelConfig(sample_rate=clip.sample_rate)
    if clip.sample_rate != cfg.sample_rate:
        raise ValueError(
            f"clip sample rate {clip.sample_rate} != configured {cfg.sample_rate}"
        )
    if clip.samples.size < cfg.frame_len:
        raise ValueError(f"clip shorter than one frame ({cfg.frame_len} samples)")
    mel_power = mel_filterbank(cfg) @ power_stft(clip.samples, cfg)
    return 10.0 * np.log10(mel_power + cfg.log_floor)


def build_tensor(clips, cfg=None):
    """Stack per-clip log-Mel matrices into an ``(F, T, N)`` tensor, in input order."""
    clips = list(clips)
    if not clips:
        raise ValueError("no clips given")
    rates = {c.sample_rate for c in clips}
    if len(rates) != 1:
        raise ValueError(f"clips have mixed sample rates: {sorted(rates)}")
    cfg = cfg or MelConfig(sample_rate=clips[0].sample_rate)
    mats = [log_mel(c, cfg) for c in clips]
    frame_counts = sorted({m.shape[1] for m in mats})
    if len(frame_counts) != 1:
        raise ValueError(f"clips yield different frame counts: {frame_counts}")
    return np.asfortranarray(np.stack(mats, axis=2))


def abs_transform(x):
    return np.abs(as_tensor3(x))


def stack_frames(slice_, width=5):
    """Concatenate ``width`` successive frames (columns) of one recording.

    Returns an array of shape ``(T - width + 1, width * F)``; row ``i`` is
    ``slice_[:, i:i + width]`` flattened frame after frame.
    """
    m = as_matrix(slice_, "slice")
    f, t = m.shape
    if width < 1 or t < width:
        raise ValueError(f"need 1 <= width <= T, got width={width}, T={t}")
    # windows[i, f, j] = m[f, i + j]
    windows = np.lib.stride_tricks.sliding_window_view(m, width, axis=1)
    windows = np.transpose(windows, (1, 2, 0))
    return windows.reshape(t - width + 1, width * f)

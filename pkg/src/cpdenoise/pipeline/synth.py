"""Small synthetic stand-ins for stationary and impulsive machine recordings.

Both generators return ``(clips, labels)`` with the normal clips first. Output
is a pure function of the arguments.
"""

import numpy as np

from ..features import AudioClip
from ..metrics import ABNORMAL, NORMAL

__all__ = ["synth_stationary", "synth_nonstationary"]

SAMPLE_RATE = 16000
DEFAULT_DURATION = 2.0

# stationary machine: four tones, the weakest one drifts on faults
TONE_FREQS = np.array([300.0, 800.0, 1500.0, 3200.0])
TONE_AMPS = np.array([1.0, 0.8, 0.3, 0.6])
SHIFTED_TONE = 2
FREQ_SHIFT = 0.15
ARTEFACT_RATE = 0.3
ARTEFACT_GAIN = 6.0  # burst rms relative to the tone rms
ARTEFACT_SECONDS = (0.2, 0.5)
ARTEFACT_BAND_HZ = (300.0, 800.0)
BROADBAND_GAIN = 0.15  # fault broadband rms relative to the background noise rms

# impulsive machine; the nominal period spans five 32 ms frames
IMPULSE_PERIOD = 0.16
PERIOD_JITTER = 0.15  # per-recording speed variation
IMPULSE_SECONDS = 0.012
IMPULSE_GAIN = 20.0
MIN_GAP = 0.07  # aperiodic impulses never merge, keeping the loud-frame count fixed
IMPULSE_CENTER_HZ = (1000.0, 7000.0)  # each strike rings in its own band
IMPULSE_WIDTH_HZ = 1500.0
BACKGROUND_RMS = 0.05


def _white(rng, n):
    return rng.standard_normal(n)


def _band_noise(rng, n, sample_rate, lo, hi):
    spec = np.fft.rfft(rng.standard_normal(n))
    freqs = np.fft.rfftfreq(n, 1.0 / sample_rate)
    spec[(freqs < lo) | (freqs > hi)] = 0.0
    out = np.fft.irfft(spec, n)
    return out / (np.sqrt(np.mean(out**2)) + 1e-300)


def _stationary_clip(rng, n, sample_rate, abnormal, has_artefact):
    t = np.arange(n) / sample_rate
    freqs = TONE_FREQS.copy()
    if abnormal:
        freqs[SHIFTED_TONE] *= 1.0 + FREQ_SHIFT
    phases = rng.uniform(0.0, 2.0 * np.pi, size=freqs.size)
    tones = (TONE_AMPS[:, None] * np.sin(2.0 * np.pi * freqs[:, None] * t + phases[:, None])).sum(0)
    signal_power = 0.5 * np.sum(TONE_AMPS**2)
    noise_rms = np.sqrt(signal_power)  # 0 dB SNR
    y = tones + noise_rms * _white(rng, n)
    if abnormal:
        y += BROADBAND_GAIN * noise_rms * _white(rng, n)
    if has_artefact:
        length = int(rng.uniform(*ARTEFACT_SECONDS) * sample_rate)
        start = int(rng.integers(0, n - length))
        center = rng.uniform(1000.0, 0.8 * sample_rate / 2)
        width = rng.uniform(*ARTEFACT_BAND_HZ)
        burst = _band_noise(rng, length, sample_rate, center - width / 2, center + width / 2)
        ramp = np.hanning(length)
        y[start:start + length] += ARTEFACT_GAIN * np.sqrt(signal_power) * burst * ramp
    # keep float amplitudes in a WAV-friendly range
    return 0.1 * y


def synth_stationary(n_normal, n_abnormal, seed, duration=DEFAULT_DURATION,
                     sample_rate=SAMPLE_RATE):
    """Tonal machine at 0 dB SNR with one-off band bursts in ~30% of recordings.

    Abnormal recordings move one tone up by 15% and carry a weak extra
    broadband component.
    """
    if n_normal < 1 or n_abnormal < 1:
        raise ValueError("need at least one normal and one abnormal recording")
    rng = np.random.default_rng(seed)
    n = int(round(duration * sample_rate))
    clips, labels = [], []
    for i in range(n_normal + n_abnormal):
        abnormal = i >= n_normal
        has_artefact = rng.random() < ARTEFACT_RATE
        y = _stationary_clip(rng, n, sample_rate, abnormal, has_artefact)
        clips.append(AudioClip(samples=y, sample_rate=sample_rate))
        labels.append(ABNORMAL if abnormal else NORMAL)
    return clips, labels


def impulse_times(rng, duration, abnormal):
    """Onset times (s) of the impulses in one recording.

    Normal recordings fire periodically from a random onset, the period drawn
    per recording within ``PERIOD_JITTER`` of ``IMPULSE_PERIOD``. Abnormal
    recordings fire the same number of impulses at random times, at least
    ``MIN_GAP`` apart.
    """
    longest = IMPULSE_PERIOD * (1.0 + PERIOD_JITTER)
    count = int(duration / longest) - 1
    if abnormal:
        slack = duration - longest - MIN_GAP * (count - 1)
        return np.sort(rng.uniform(0.0, slack, size=count)) + MIN_GAP * np.arange(count)
    period = IMPULSE_PERIOD * rng.uniform(1.0 - PERIOD_JITTER, 1.0 + PERIOD_JITTER)
    onset = rng.uniform(0.0, period)
    return onset + period * np.arange(count)


def synth_nonstationary(n_normal, n_abnormal, seed, duration=DEFAULT_DURATION,
                        sample_rate=SAMPLE_RATE):
    """Valve-like impulse trains over a noise floor.

    Normal: periodic impulses with a per-recording random onset. Abnormal:
    the same number of impulses placed aperiodically. Every impulse is band
    noise with a randomly placed band, so strikes differ in colour.
    """
    if n_normal < 1 or n_abnormal < 1:
        raise ValueError("need at least one normal and one abnormal recording")
    rng = np.random.default_rng(seed)
    n = int(round(duration * sample_rate))
    ilen = int(IMPULSE_SECONDS * sample_rate)
    envelope = np.exp(-np.arange(ilen) / (0.25 * ilen))
    clips, labels = [], []
    for i in range(n_normal + n_abnormal):
        abnormal = i >= n_normal
        y = BACKGROUND_RMS * _white(rng, n)
        for onset in impulse_times(rng, duration, abnormal):
            s = int(onset * sample_rate)
            seg = min(ilen, n - s)
            center = rng.uniform(*IMPULSE_CENTER_HZ)
            lo, hi = center - IMPULSE_WIDTH_HZ / 2, center + IMPULSE_WIDTH_HZ / 2
            burst = _band_noise(rng, ilen, sample_rate, lo, hi)[:seg]
            y[s:s + seg] += IMPULSE_GAIN * BACKGROUND_RMS * envelope[:seg] * burst
        clips.append(AudioClip(samples=y, sample_rate=sample_rate))
        labels.append(ABNORMAL if abnormal else NORMAL)
    return clips, labels

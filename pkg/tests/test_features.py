import numpy as np
import pytest

from cpdenoise.features import (
    AudioClip,
    MelConfig,
    abs_transform,
    build_tensor,
    log_mel,
    mel_center_frequencies,
    mel_filterbank,
    mel_scale,
    mel_to_hz,
    power_stft,
    stack_frames,
)


def sine(freq, seconds=1.0, sr=16000, amp=0.5):
    t = np.arange(int(seconds * sr)) / sr
    return AudioClip(amp * np.sin(2 * np.pi * freq * t), sr)


def test_mel_scale_reference_value():
    assert mel_scale(700.0) == pytest.approx(781.17, abs=0.01)
    assert mel_scale(0.0) == 0.0


def test_mel_inverse_round_trip():
    f = np.linspace(0, 8000, 101)
    np.testing.assert_allclose(mel_to_hz(mel_scale(f)), f, atol=1e-9)


def test_filterbank_shape_and_peaks():
    cfg = MelConfig()
    fb = mel_filterbank(cfg)
    assert fb.shape == (64, 513)
    assert fb.min() >= 0.0
    assert fb.max() <= 1.0 + 1e-12
    # every filter touches at least one FFT bin
    assert np.all(fb.max(axis=1) > 0)


def test_filterbank_triangles_overlap_half():
    cfg = MelConfig(frame_len=8192, n_mels=10)
    fb = mel_filterbank(cfg)
    # adjacent triangles sum to ~1 between consecutive centers
    centers = mel_center_frequencies(cfg)[1:-1]
    freqs = np.arange(fb.shape[1]) * cfg.sample_rate / cfg.frame_len
    inside = (freqs > centers[0]) & (freqs < centers[-1])
    np.testing.assert_allclose(fb[:, inside].sum(axis=0), 1.0, atol=1e-12)


def test_sine_at_center_peaks_in_its_bin():
    cfg = MelConfig()
    centers = mel_center_frequencies(cfg)[1:-1]
    for k in (10, 20, 30, 40, 50, 60):
        spec = log_mel(sine(centers[k]), cfg)
        assert np.argmax(spec.mean(axis=1)) == k


def test_silence_hits_floor():
    spec = log_mel(AudioClip(np.zeros(16000), 16000))
    np.testing.assert_allclose(spec, -100.0)


def test_ten_second_frame_count():
    spec = log_mel(AudioClip(np.zeros(160000), 16000))
    assert spec.shape == (64, 313)


def test_power_stft_parseval_for_constant_frame():
    cfg = MelConfig(center_pad=False)
    p = power_stft(np.ones(1024), cfg)
    assert p.shape == (513, 1)
    window_sum = 512.0  # periodic Hann of length 1024
    assert p[0, 0] == pytest.approx(window_sum**2)


def test_log_mel_rejects_rate_mismatch_and_short_clips():
    with pytest.raises(ValueError):
        log_mel(AudioClip(np.zeros(16000), 8000), MelConfig())
    with pytest.raises(ValueError):
        log_mel(AudioClip(np.zeros(100), 16000))


def test_build_tensor_layout():
    clips = [sine(500), sine(2000), AudioClip(np.zeros(16000), 16000)]
    x = build_tensor(clips)
    assert x.shape == (64, 32, 3)
    assert x.flags.f_contiguous
    np.testing.assert_array_equal(x[:, :, 1], log_mel(clips[1]))


def test_build_tensor_errors():
    with pytest.raises(ValueError):
        build_tensor([])
    with pytest.raises(ValueError, match="sample rates"):
        build_tensor([sine(500), sine(500, sr=8000)])
    with pytest.raises(ValueError, match="frame counts"):
        build_tensor([sine(500, seconds=1.0), sine(500, seconds=2.0)])


def test_clip_validation():
    with pytest.raises(ValueError):
        AudioClip(np.zeros((2, 3)), 16000)
    with pytest.raises(ValueError):
        AudioClip(np.zeros(3), 0)


def test_abs_transform():
    x = -np.arange(24, dtype=float).reshape(2, 3, 4)
    np.testing.assert_array_equal(abs_transform(x), -x)


def test_stack_frames_rows():
    m = np.arange(12, dtype=float).reshape(2, 6)  # F=2, T=6
    s = stack_frames(m, width=3)
    assert s.shape == (4, 6)
    np.testing.assert_array_equal(s[0], [0, 6, 1, 7, 2, 8])
    for i in range(4):
        np.testing.assert_array_equal(s[i], m[:, i:i + 3].T.ravel())


def test_stack_frames_width_one_is_transpose():
    m = np.random.default_rng(0).random((5, 7))
    np.testing.assert_array_equal(stack_frames(m, 1), m.T)


def test_stack_frames_bad_width():
    with pytest.raises(ValueError):
        stack_frames(np.ones((3, 4)), 5)
    with pytest.raises(ValueError):
        stack_frames(np.ones((3, 4)), 0)

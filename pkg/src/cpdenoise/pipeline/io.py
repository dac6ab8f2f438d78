"""File formats: WAV input, binary tensor files, autoencoder parameter blobs, CSV."""

import csv
import json
import struct
import warnings
from pathlib import Path

import numpy as np
from scipy.io import wavfile

from ..autoencoder import AutoencoderParams
from ..features import AudioClip
from ..tensor import as_tensor3

__all__ = [
    "WavError",
    "TensorFileError",
    "load_wav",
    "write_wav",
    "save_tensor",
    "load_tensor",
    "save_params",
    "load_params",
    "write_csv",
    "read_csv",
]

TENSOR_MAGIC = b"CPDT"
TENSOR_VERSION = 1
DTYPE_FLOAT64 = 1
# magic, version, F, T, N, dtype code; all little-endian
TENSOR_HEADER = struct.Struct("<4sIQQQI")

PARAMS_FORMAT = "cpdenoise-autoencoder"


class WavError(ValueError):
    pass


class TensorFileError(ValueError):
    pass


def _check_riff_size(raw, path):
    if len(raw) < 12 or raw[:4] != b"RIFF" or raw[8:12] != b"WAVE":
        raise WavError(f"{path}: not a RIFF/WAVE file")
    declared = struct.unpack("<I", raw[4:8])[0] + 8
    if len(raw) < declared:
        raise WavError(f"{path}: truncated ({len(raw)} of {declared} bytes)")


def load_wav(path):
    """Decode channel 0 of a PCM16 or IEEE-float WAV file.

    PCM16 samples are scaled by 1/32768 into [-1, 1).
    """
    path = Path(path)
    raw = path.read_bytes()
    _check_riff_size(raw, path)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", wavfile.WavFileWarning)
            rate, data = wavfile.read(path)
    except ValueError as exc:
        raise WavError(f"{path}: {exc}") from exc
    if data.ndim == 2:
        if data.shape[1] == 0:
            raise WavError(f"{path}: no channels")
        data = data[:, 0]
    if data.dtype == np.int16:
        samples = data.astype(np.float64) / 32768.0
    elif data.dtype in (np.float32, np.float64):
        samples = data.astype(np.float64)
    else:
        raise WavError(f"{path}: unsupported sample format {data.dtype}")
    if samples.size == 0:
        raise WavError(f"{path}: no samples")
    return AudioClip(samples=samples, sample_rate=int(rate))


def write_wav(path, clip, pcm16=False):
    """Write a mono clip as float32, or PCM16 with clipping to [-1, 1)."""
    if pcm16:
        data = np.clip(np.round(clip.samples * 32768.0), -32768, 32767).astype(np.int16)
    else:
        data = clip.samples.astype(np.float32)
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    wavfile.write(path, clip.sample_rate, data)


def save_tensor(path, x):
    """Header followed by little-endian doubles, frequency index fastest."""
    x = as_tensor3(x)
    f, t, n = x.shape
    header = TENSOR_HEADER.pack(TENSOR_MAGIC, TENSOR_VERSION, f, t, n, DTYPE_FLOAT64)
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(x.astype("<f8").tobytes(order="F"))


def load_tensor(path):
    raw = Path(path).read_bytes()
    if len(raw) < TENSOR_HEADER.size:
        raise TensorFileError(f"{path}: file too short for header")
    magic, version, f, t, n, dtype = TENSOR_HEADER.unpack_from(raw)
    if magic != TENSOR_MAGIC:
        raise TensorFileError(f"{path}: bad magic {magic!r}")
    if version != TENSOR_VERSION:
        raise TensorFileError(f"{path}: unsupported version {version}")
    if dtype != DTYPE_FLOAT64:
        raise TensorFileError(f"{path}: unsupported dtype code {dtype}")
    expected = TENSOR_HEADER.size + 8 * f * t * n
    if len(raw) != expected:
        raise TensorFileError(f"{path}: expected {expected} bytes, found {len(raw)}")
    data = np.frombuffer(raw, dtype="<f8", offset=TENSOR_HEADER.size)
    return np.asfortranarray(data.reshape((f, t, n), order="F").astype(np.float64))


def save_params(path, params):
    blob = {
        "format": PARAMS_FORMAT,
        "version": 1,
        "layer_dims": params.layer_dims,
        "weights": [w.tolist() for w in params.weights],
        "biases": [b.tolist() for b in params.biases],
        "loss_history": list(params.loss_history),
    }
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(json.dumps(blob))


def load_params(path):
    blob = json.loads(Path(path).read_text())
    if blob.get("format") != PARAMS_FORMAT:
        raise ValueError(f"{path}: not an autoencoder parameter file")
    params = AutoencoderParams(
        weights=tuple(np.array(w, dtype=np.float64) for w in blob["weights"]),
        biases=tuple(np.array(b, dtype=np.float64) for b in blob["biases"]),
        loss_history=tuple(blob.get("loss_history", ())),
    )
    if params.layer_dims != blob["layer_dims"]:
        raise ValueError(f"{path}: layer_dims header disagrees with weights")
    return params


def write_csv(path, rows, columns):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({c: row.get(c, "") for c in columns})


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))

"""Baseline / NMF / nnCP comparison on a machine dataset."""

import logging
import os
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from ..autoencoder import TrainConfig, train
from ..features import MelConfig, abs_transform, build_tensor
from ..metrics import ABNORMAL, NORMAL, ScoredRecording, roc_auc, score_recording
from ..nmf import SolverConfig, nmf_denoise, nmf_fit
from ..nncp import nncp_denoise, nncp_fit
from ..tensor import matricize
from .io import load_wav, write_csv

log = logging.getLogger(__name__)

__all__ = [
    "SETUPS",
    "DATA_ROOT_ENV",
    "DatasetLayout",
    "ExperimentConfig",
    "ResultRow",
    "Split",
    "denoise",
    "run_experiment",
    "run_on_tensors",
    "report",
    "RESULT_COLUMNS",
    "SUMMARY_COLUMNS",
    "ROC_COLUMNS",
]

SETUPS = ("baseline", "nmf", "nncp")
DATA_ROOT_ENV = "CPDENOISE_DATA_ROOT"
RESULT_COLUMNS = ["machine", "machine_id", "snr", "setup", "K", "seed", "auc"]
SUMMARY_COLUMNS = ["machine", "machine_id", "snr", "setup", "best_K", "mean_auc",
                   "std_auc", "n_seeds"]
ROC_COLUMNS = ["fpr", "tpr", "threshold"]


@dataclass(frozen=True)
class Split:
    train: list
    valid: list
    valid_labels: list


@dataclass(frozen=True)
class DatasetLayout:
    """Locates one machine in a ``<root>/<snr>/<machine>/<machine_id>/{normal,abnormal}`` tree.

    The last ``M`` normal files by name go to validation, ``M`` being the
    number of abnormal files, so validation is balanced and training sees
    normal sound only.
    """

    root: Path
    machine: str
    machine_id: str = "id_00"
    snr_tag: str = "0dB"

    @property
    def machine_dir(self):
        return Path(self.root) / self.snr_tag / self.machine / self.machine_id

    def split(self):
        normal = sorted((self.machine_dir / NORMAL).glob("*.wav"))
        abnormal = sorted((self.machine_dir / ABNORMAL).glob("*.wav"))
        if not abnormal:
            raise FileNotFoundError(f"no abnormal recordings under {self.machine_dir}")
        m = len(abnormal)
        if len(normal) <= m:
            raise FileNotFoundError(
                f"{self.machine_dir}: need more than {m} normal recordings, found {len(normal)}"
            )
        train_files, valid_normal = normal[:-m], normal[-m:]
        valid = valid_normal + abnormal
        labels = [NORMAL] * m + [ABNORMAL] * m
        return Split(train=train_files, valid=valid, valid_labels=labels)


@dataclass(frozen=True)
class ExperimentConfig:
    setups: tuple = SETUPS
    rank_grid: tuple = (5, 10, 20)
    seeds: int = 5
    mel: MelConfig = field(default_factory=MelConfig)
    solver: SolverConfig = field(default_factory=lambda: SolverConfig(rank=1))
    train: TrainConfig = field(default_factory=TrainConfig)
    mel_width: int = 5
    output: Path = None

    def __post_init__(self):
        if not self.setups:
            raise ValueError("no setups selected")
        unknown = set(self.setups) - set(SETUPS)
        if unknown:
            raise ValueError(f"unknown setups: {sorted(unknown)}")
        if self.seeds < 1:
            raise ValueError("seeds must be >= 1")
        if any(k < 1 for k in self.rank_grid):
            raise ValueError("ranks must be >= 1")


@dataclass(frozen=True)
class ResultRow:
    machine: str
    machine_id: str
    snr: str
    setup: str
    K: int
    seed: int
    auc: float
    roc: object = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if not 0.0 <= self.auc <= 1.0:
            raise ValueError(f"auc out of range: {self.auc}")

    def key(self):
        return (self.machine, self.machine_id, self.snr, SETUPS.index(self.setup),
                self.K or 0, self.seed)

    def as_dict(self):
        return {
            "machine": self.machine,
            "machine_id": self.machine_id,
            "snr": self.snr,
            "setup": self.setup,
            "K": "" if self.K is None else self.K,
            "seed": self.seed,
            "auc": repr(float(self.auc)),
        }

    @property
    def run_name(self):
        k = "" if self.K is None else f"_K{self.K}"
        return f"{self.machine}_{self.machine_id}_{self.snr}_{self.setup}{k}_seed{self.seed}"


def denoise(x, method, solver):
    """Absolute value, then low-rank reconstruction by ``method`` ('nmf' or 'nncp')."""
    x = abs_transform(x)
    if method == "nmf":
        f, t, n = x.shape
        return nmf_denoise(nmf_fit(matricize(x), solver), t, n)
    if method == "nncp":
        return nncp_denoise(nncp_fit(x, solver))
    raise ValueError(f"unknown denoising method {method!r}")


def _score_all(params, x, ids, labels, mel_width):
    return [
        ScoredRecording(rid, lab, score_recording(params, x[:, :, n], mel_width))
        for n, (rid, lab) in enumerate(zip(ids, labels))
    ]


def run_on_tensors(cfg, x_train, x_valid, valid_labels, valid_ids=None,
                   machine="synthetic", machine_id="id_00", snr="0dB"):
    """Run every (setup, K, seed) cell on already-extracted log-Mel tensors.

    Denoising does not depend on the network seed, so each (setup, K)
    decomposition is fitted once, on the training and the validation tensor
    separately, and reused across seeds.
    """
    valid_ids = valid_ids or [f"rec{n:04d}" for n in range(x_valid.shape[2])]
    cells = []
    for setup in cfg.setups:
        if setup == "baseline":
            cells.append((setup, None, x_train, x_valid))
            continue
        for k in cfg.rank_grid:
            solver = replace(cfg.solver, rank=k)
            log.info("%s K=%d: denoising train %s and valid %s", setup, k,
                     x_train.shape, x_valid.shape)
            d_train = denoise(x_train, setup, solver)
            d_valid = denoise(x_valid, setup, solver)
            if np.any(d_train < 0) or np.any(d_valid < 0):
                raise AssertionError("denoised tensor has negative entries")
            cells.append((setup, k, d_train, d_valid))

    rows = []
    for setup, k, d_train, d_valid in cells:
        for seed in range(cfg.seeds):
            tcfg = replace(cfg.train, init_seed=seed, shuffle_seed=seed)
            params = train(d_train, tcfg, cfg.mel_width)
            scored = _score_all(params, d_valid, valid_ids, valid_labels, cfg.mel_width)
            roc = roc_auc(scored)
            log.info("%s K=%s seed=%d auc=%.4f", setup, k, seed, roc.auc)
            rows.append(ResultRow(machine, machine_id, snr, setup, k, seed, roc.auc, roc))
    return sorted(rows, key=ResultRow.key)


def run_experiment(cfg, layout):
    """Load one machine's recordings, run all cells, and write outputs under ``cfg.output``."""
    split = layout.split()
    overlap = {p.resolve() for p in split.train} & {p.resolve() for p in split.valid}
    if overlap:
        raise AssertionError(f"recordings in both splits: {sorted(map(str, overlap))}")
    log.info("%s: %d train, %d validation recordings", layout.machine_dir,
             len(split.train), len(split.valid))
    x_train = build_tensor([load_wav(p) for p in split.train], cfg.mel)
    x_valid = build_tensor([load_wav(p) for p in split.valid], cfg.mel)
    if x_train.shape[1] != x_valid.shape[1]:
        raise ValueError("train and validation recordings yield different frame counts")
    ids = [f"{p.parent.name}/{p.name}" for p in split.valid]
    rows = run_on_tensors(cfg, x_train, x_valid, split.valid_labels, ids,
                          layout.machine, layout.machine_id, layout.snr_tag)
    if cfg.output is not None:
        write_roc_files(rows, Path(cfg.output) / "roc")
    return rows


def write_roc_files(rows, roc_dir):
    for row in rows:
        if row.roc is None:
            continue
        points = [{"fpr": repr(f), "tpr": repr(t), "threshold": repr(th)}
                  for f, t, th in row.roc.points]
        write_csv(Path(roc_dir) / f"{row.run_name}.csv", points, ROC_COLUMNS)


def report(rows):
    """Mean AUC over seeds per (machine, id, snr, setup), keeping the best K.

    Returns a list of dicts with :data:`SUMMARY_COLUMNS` plus ``per_K``, the
    mean AUC of every rank tried.
    """
    groups = {}
    for r in rows:
        key = (r.machine, r.machine_id, r.snr, r.setup)
        groups.setdefault(key, {}).setdefault(r.K, []).append(float(r.auc))
    summary = []
    for key in sorted(groups, key=lambda g: (g[0], g[1], g[2], SETUPS.index(g[3]))):
        by_k = groups[key]
        means = {k: float(np.mean(v)) for k, v in by_k.items()}
        best_k = max(means, key=lambda k: (means[k], -(k or 0)))
        aucs = by_k[best_k]
        summary.append({
            "machine": key[0],
            "machine_id": key[1],
            "snr": key[2],
            "setup": key[3],
            "best_K": "" if best_k is None else best_k,
            "mean_auc": means[best_k],
            "std_auc": float(np.std(aucs)),
            "n_seeds": len(aucs),
            "per_K": {("" if k is None else str(k)): m for k, m in sorted(
                means.items(), key=lambda kv: kv[0] or 0)},
        })
    return summary


def default_root():
    root = os.environ.get(DATA_ROOT_ENV)
    return Path(root) if root else None

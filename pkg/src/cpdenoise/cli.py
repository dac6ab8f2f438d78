"""Command line entry point: ``cpdenoise <subcommand> ...``."""

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from .autoencoder import TrainConfig, train
from .features import MelConfig, abs_transform, build_tensor
from .metrics import (NORMAL, ABNORMAL, ScoredRecording, classify, pick_threshold,
                      roc_auc, score_recording)
from .nmf import SolverConfig, nmf_fit
from .nncp import nncp_fit, select_rank
from .pipeline.experiment import (DATA_ROOT_ENV, ROC_COLUMNS, SETUPS, DatasetLayout,
                                  ExperimentConfig, default_root, denoise, run_experiment)
from .pipeline.io import (load_params, load_tensor, load_wav, read_csv, save_params,
                          save_tensor, write_csv, write_wav)
from .pipeline.outputs import read_results, write_outputs
from .pipeline.synth import synth_nonstationary, synth_stationary
from .tensor import frobenius_sq, matricize

log = logging.getLogger("cpdenoise")

INDEX_SUFFIX = ".index.csv"


def _index_path(tensor_path):
    return Path(str(tensor_path) + INDEX_SUFFIX)


def _add_mel_args(p):
    g = p.add_argument_group("log-Mel features")
    g.add_argument("--sample-rate", type=int, default=16000)
    g.add_argument("--frame-len", type=int, default=1024)
    g.add_argument("--hop", type=int, default=512)
    g.add_argument("--n-mels", type=int, default=64)
    g.add_argument("--f-min", type=float, default=0.0)
    g.add_argument("--f-max", type=float, default=None)


def _mel_config(args):
    return MelConfig(sample_rate=args.sample_rate, frame_len=args.frame_len, hop=args.hop,
                     n_mels=args.n_mels, f_min=args.f_min, f_max=args.f_max)


def _add_solver_args(p):
    g = p.add_argument_group("decomposition solver")
    g.add_argument("--max-iters", type=int, default=None,
                   help="default: 2000 NMF updates or 500 nnCP sweeps")
    g.add_argument("--rel-tol", type=float, default=1e-6)
    g.add_argument("--solver-seed", type=int, default=0)


def _solver_config(args, rank=1):
    return SolverConfig(rank=rank, max_iters=args.max_iters, rel_tol=args.rel_tol,
                        seed=args.solver_seed)


def _add_train_args(p):
    g = p.add_argument_group("autoencoder training")
    g.add_argument("--epochs", type=int, default=50)
    g.add_argument("--batch-size", type=int, default=512)
    g.add_argument("--lr", type=float, default=1e-3)
    g.add_argument("--mel-width", type=int, default=5,
                   help="number of successive frames stacked into one input")


def _train_config(args, seed=0):
    return TrainConfig(epochs=args.epochs, batch_size=args.batch_size,
                       learning_rate=args.lr, init_seed=seed, shuffle_seed=seed)


def cmd_synth(args):
    gen = synth_stationary if args.kind == "stationary" else synth_nonstationary
    clips, labels = gen(args.n_normal, args.n_abnormal, args.seed, duration=args.duration)
    machine = args.machine or f"synth_{args.kind}"
    base = Path(args.root) / args.snr / machine / args.machine_id
    counters = {NORMAL: 0, ABNORMAL: 0}
    for clip, label in zip(clips, labels):
        path = base / label / f"{label}_{counters[label]:04d}.wav"
        counters[label] += 1
        write_wav(path, clip, pcm16=args.pcm16)
    print(f"wrote {counters[NORMAL]} normal and {counters[ABNORMAL]} abnormal clips to {base}")


def cmd_features(args):
    paths = []
    for d in args.wav_dir:
        paths.extend(sorted(Path(d).glob("*.wav")))
    if not paths:
        raise FileNotFoundError(f"no .wav files in {args.wav_dir}")
    x = build_tensor([load_wav(p) for p in paths], _mel_config(args))
    save_tensor(args.out, x)
    index = [{"recording_id": f"{p.parent.name}/{p.name}",
              "label": p.parent.name if p.parent.name in (NORMAL, ABNORMAL) else ""}
             for p in paths]
    write_csv(_index_path(args.out), index, ["recording_id", "label"])
    print(f"{args.out}: F={x.shape[0]} T={x.shape[1]} N={x.shape[2]}")


def _fit_error(x, method, solver):
    xa = abs_transform(x)
    if method == "nmf":
        model = nmf_fit(matricize(xa), solver)
    else:
        model = nncp_fit(xa, solver)
    return np.sqrt(model.fit_history[-1] / frobenius_sq(xa))


def cmd_denoise(args):
    x = load_tensor(args.input)
    if args.rank == "elbow":
        errors = [(k, _fit_error(x, args.method, _solver_config(args, k))) for k in args.ranks]
        for k, e in errors:
            print(f"K={k} relative fit error {e:.6f}")
        rank = select_rank(errors)
        print(f"elbow rank: {rank}")
    else:
        rank = int(args.rank)
    save_tensor(args.out, denoise(x, args.method, _solver_config(args, rank)))
    src_index = _index_path(args.input)
    if src_index.exists():
        _index_path(args.out).write_bytes(src_index.read_bytes())


def cmd_train(args):
    x = load_tensor(args.input)
    params = train(x, _train_config(args, args.seed), args.mel_width)
    save_params(args.out, params)
    hist = params.loss_history
    print(f"mean loss {hist[0]:.6g} -> {hist[-1]:.6g} over {len(hist) - 1} epochs")


def cmd_score(args):
    params = load_params(args.params)
    x = load_tensor(args.input)
    index_file = _index_path(args.input)
    if index_file.exists():
        index = read_csv(index_file)
    else:
        index = [{"recording_id": f"rec{n:04d}", "label": ""} for n in range(x.shape[2])]
    scores = [score_recording(params, x[:, :, n], args.mel_width) for n in range(x.shape[2])]

    phi = args.phi
    if phi is None and args.train_input:
        xt = load_tensor(args.train_input)
        train_scores = [score_recording(params, xt[:, :, n], args.mel_width)
                        for n in range(xt.shape[2])]
        phi = pick_threshold(train_scores, args.quantile)
    out_rows = []
    for rec, s in zip(index, scores):
        row = {"recording_id": rec["recording_id"], "label": rec["label"], "score": repr(s)}
        if phi is not None:
            row["decision"] = classify(s, phi)
        out_rows.append(row)
    columns = ["recording_id", "label", "score"] + (["decision"] if phi is not None else [])
    write_csv(args.out, out_rows, columns)
    if phi is not None:
        print(f"threshold phi = {phi!r}")

    labels = [r["label"] for r in index]
    if NORMAL in labels and ABNORMAL in labels:
        scored = [ScoredRecording(r["recording_id"], r["label"], s)
                  for r, s in zip(index, scores) if r["label"]]
        roc = roc_auc(scored)
        roc_path = Path(args.out).with_suffix(".roc.csv")
        write_csv(roc_path, [dict(zip(ROC_COLUMNS, map(repr, p))) for p in roc.points],
                  ROC_COLUMNS)
        print(f"AUC {roc.auc:.4f}")


def _experiment_config(args):
    return ExperimentConfig(
        setups=tuple(args.setups),
        rank_grid=tuple(args.ranks),
        seeds=args.seeds,
        mel=_mel_config(args),
        solver=_solver_config(args),
        train=_train_config(args),
        mel_width=args.mel_width,
        output=Path(args.out),
    )


def cmd_run(args):
    root = args.root or default_root()
    if root is None:
        raise ValueError(f"no dataset root: pass --root or set {DATA_ROOT_ENV}")
    cfg = _experiment_config(args)
    rows = []
    for snr in args.snr:
        for machine in args.machine:
            for mid in args.machine_id:
                layout = DatasetLayout(root=Path(root), machine=machine, machine_id=mid,
                                       snr_tag=snr)
                rows.extend(run_experiment(cfg, layout))
    summary = write_outputs(rows, args.out, figures=not args.no_figures)
    _print_summary(summary)


def cmd_report(args):
    results = Path(args.results)
    rows = read_results(results, results.parent / "roc")
    summary = write_outputs(rows, args.out, figures=not args.no_figures)
    _print_summary(summary)


def _print_summary(summary):
    for s in summary:
        k = f"K={s['best_K']}" if s["best_K"] != "" else ""
        print(f"{s['machine']:>20} {s['machine_id']:>6} {s['snr']:>6} {s['setup']:>8} "
              f"{k:>5} AUC {s['mean_auc']:.3f} ± {s['std_auc']:.3f} (n={s['n_seeds']})")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cpdenoise",
        description="Low-rank (NMF / non-negative CP) denoising of log-Mel data "
                    "for autoencoder anomaly detection.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic benchmark as WAV files")
    p.add_argument("--kind", choices=["stationary", "nonstationary"], required=True)
    p.add_argument("--root", required=True)
    p.add_argument("--machine", default=None, help="default: synth_<kind>")
    p.add_argument("--machine-id", default="id_00")
    p.add_argument("--snr", default="0dB")
    p.add_argument("--n-normal", type=int, default=60)
    p.add_argument("--n-abnormal", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--duration", type=float, default=2.0, help="seconds per clip")
    p.add_argument("--pcm16", action="store_true", help="write PCM16 instead of float32")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("features", help="WAV directories -> log-Mel tensor file")
    p.add_argument("--wav-dir", nargs="+", required=True)
    p.add_argument("--out", required=True)
    _add_mel_args(p)
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("denoise", help="tensor -> low-rank denoised tensor")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--method", choices=["nmf", "nncp"], required=True)
    p.add_argument("--rank", required=True, help="integer K, or 'elbow'")
    p.add_argument("--ranks", type=int, nargs="+", default=[5, 10, 20],
                   help="candidates for --rank elbow")
    _add_solver_args(p)
    p.set_defaults(func=cmd_denoise)

    p = sub.add_parser("train", help="train the autoencoder on a tensor file")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True, help="parameter JSON")
    p.add_argument("--seed", type=int, default=0)
    _add_train_args(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("score", help="score every recording of a tensor file")
    p.add_argument("--params", required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True, help="scores CSV")
    p.add_argument("--mel-width", type=int, default=5)
    p.add_argument("--phi", type=float, default=None, help="decision threshold")
    p.add_argument("--train-in", dest="train_input", default=None,
                   help="training tensor; threshold = quantile of its scores")
    p.add_argument("--quantile", type=float, default=0.99)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("run", help="full baseline/NMF/nnCP experiment")
    p.add_argument("--root", default=None, help=f"dataset root (default ${DATA_ROOT_ENV})")
    p.add_argument("--machine", nargs="+", required=True)
    p.add_argument("--machine-id", nargs="+", default=["id_00"])
    p.add_argument("--snr", nargs="+", default=["0dB"])
    p.add_argument("--setups", nargs="+", choices=SETUPS, default=list(SETUPS))
    p.add_argument("--ranks", type=int, nargs="+", default=[5, 10, 20])
    p.add_argument("--seeds", type=int, default=5)
    p.add_argument("--out", required=True)
    p.add_argument("--no-figures", action="store_true")
    _add_mel_args(p)
    _add_solver_args(p)
    _add_train_args(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("report", help="rebuild summary tables and figures from results.csv")
    p.add_argument("--results", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        args.func(args)
    except (ValueError, FileNotFoundError, AssertionError, OSError) as exc:
        print(f"cpdenoise {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

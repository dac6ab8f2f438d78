"""Writes a run's CSV/JSON tables and figures into one directory."""

import json
from pathlib import Path

from .experiment import (RESULT_COLUMNS, SUMMARY_COLUMNS, ResultRow, report,
                         write_roc_files)
from .io import read_csv, write_csv
from ..metrics import RocResult

__all__ = ["write_outputs", "read_results"]


def write_outputs(rows, out_dir, figures=True):
    """Write ``results.csv``, ``summary.csv``, ``summary.json``, ROC points and figures.

    Returns the summary list produced by :func:`report`.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = sorted(rows, key=ResultRow.key)
    write_csv(out / "results.csv", [r.as_dict() for r in rows], RESULT_COLUMNS)
    write_roc_files(rows, out / "roc")
    summary = report(rows)
    flat = [{**s, "mean_auc": repr(s["mean_auc"]), "std_auc": repr(s["std_auc"])}
            for s in summary]
    write_csv(out / "summary.csv", flat, SUMMARY_COLUMNS)
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    if figures:
        from .plotting import plot_auc_summary, plot_roc_curves

        plot_roc_curves(rows, summary, out / "figures")
        plot_auc_summary(summary, out / "figures" / "auc_summary.png")
    return summary


def read_results(path, roc_dir=None):
    """Rebuild :class:`ResultRow` objects from ``results.csv`` (and ROC files if present)."""
    rows = []
    for rec in read_csv(path):
        row = ResultRow(
            machine=rec["machine"],
            machine_id=rec["machine_id"],
            snr=rec["snr"],
            setup=rec["setup"],
            K=int(rec["K"]) if rec["K"] else None,
            seed=int(rec["seed"]),
            auc=float(rec["auc"]),
        )
        if roc_dir is not None:
            roc_file = Path(roc_dir) / f"{row.run_name}.csv"
            if roc_file.exists():
                pts = [(float(p["fpr"]), float(p["tpr"]), float(p["threshold"]))
                       for p in read_csv(roc_file)]
                roc = RocResult(points=pts, auc=row.auc)
                row = ResultRow(**{**row.__dict__, "roc": roc})
        rows.append(row)
    return rows


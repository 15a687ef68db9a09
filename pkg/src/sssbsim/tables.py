"""CSV emission/ingestion for runs, profiles, and fits.

All files are RFC-4180 (CRLF, header row); floating values are printed with
17 significant digits so rows round-trip exactly and reruns can be compared
byte for byte.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .trajectory import EnsembleStats


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_samples_csv(path, model_name: str, Lx: int, Ly: int, rows) -> None:
    """rows: iterable of (r, sample_index, chi)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["model", "Lx", "Ly", "r", "sample", "chi2"])
        for r, s, chi in rows:
            w.writerow([model_name, Lx, Ly, _fmt(r), s, _fmt(chi)])


def write_summary_csv(path, stats: list[EnsembleStats]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(
            ["model", "Lx", "Ly", "r", "nsamples", "chi_mean", "chi_var", "F", "F_stderr"]
        )
        for st in stats:
            w.writerow(
                [
                    st.model,
                    st.Lx,
                    st.Ly,
                    _fmt(st.r),
                    st.n_samples,
                    _fmt(st.chi_mean),
                    _fmt(st.chi_var),
                    _fmt(st.F),
                    _fmt(st.F_stderr),
                ]
            )


def write_corr_csv(path, ells, mean, stderr) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["ell", "corr_mean", "corr_stderr"])
        for ell, m, s in zip(ells, mean, stderr):
            w.writerow([int(ell), _fmt(m), _fmt(s)])


def write_collapsed_csv(path, rows) -> None:
    """rows: (size, r, x_scaled, y_scaled, dy_scaled)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["size", "r", "x_scaled", "y_scaled", "dy_scaled"])
        for size, r, x, y, dy in rows:
            w.writerow([_fmt(size), _fmt(r), _fmt(x), _fmt(y), _fmt(dy)])


def read_summary_csv(paths) -> dict[str, np.ndarray]:
    """Concatenate one or more summary CSVs into column arrays."""
    if isinstance(paths, (str, Path)):
        paths = [paths]
    cols: dict[str, list] = {
        "model": [], "Lx": [], "Ly": [], "r": [], "nsamples": [],
        "chi_mean": [], "chi_var": [], "F": [], "F_stderr": [],
    }
    for path in paths:
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                cols["model"].append(row["model"])
                cols["Lx"].append(int(row["Lx"]))
                cols["Ly"].append(int(row["Ly"]))
                cols["r"].append(float(row["r"]))
                cols["nsamples"].append(int(row["nsamples"]))
                cols["chi_mean"].append(float(row["chi_mean"]))
                cols["chi_var"].append(float(row["chi_var"]))
                cols["F"].append(float(row["F"]))
                cols["F_stderr"].append(float(row["F_stderr"]))
    out: dict[str, np.ndarray] = {}
    for key, vals in cols.items():
        out[key] = np.array(vals) if key != "model" else np.array(vals, dtype=object)
    return out


def read_corr_csv(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    ells, mean, err = [], [], []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            ells.append(int(row["ell"]))
            mean.append(float(row["corr_mean"]))
            err.append(float(row["corr_stderr"]))
    return np.array(ells), np.array(mean), np.array(err)


def write_json(path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")

"""Stochastic dephasing-only trajectories and ensemble statistics.

One trajectory applies each candidate dephasing location independently with
probability r (a single sweep in the fixed model order) and evaluates the
Renyi-2 susceptibility chi and, optionally, the spatial correlator profile
on the final state.

Reproducibility contract: sample s of the grid point with index r_index is
driven by a counter-based Philox stream keyed by
SeedSequence(master_seed, spawn_key=(r_index, s)), and ensemble statistics
reduce per-sample values in sample order with exactly-rounded summation
(math.fsum).  Outputs are therefore byte-identical for any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import bitops, observables
from ._kernels import dephase_sweep
from .models import ModelInstance, build
from .stabilizer import StabilizerMixedState

_BOOT_TAG = 0x0B00


@dataclass
class TrajectorySample:
    sample_index: int
    applied: np.ndarray  # bool per channel location
    chi2: float | None
    corr: np.ndarray | None = None
    state: StabilizerMixedState | None = None
    k_final: int = 0


@dataclass
class EnsembleStats:
    model: str
    Lx: int
    Ly: int
    r: float
    n_samples: int
    chi_mean: float
    chi_var: float
    F: float
    F_stderr: float
    corr_mean: np.ndarray | None = None
    corr_stderr: np.ndarray | None = None


class _EnginePack:
    """Per-model precomputed arrays consumed by the JIT sweep."""

    def __init__(self, model: ModelInstance):
        st = model.initial
        self.n = model.n
        self.k0 = st.k
        self.W = st._X.shape[1]
        self.KW = bitops.n_words(self.k0) if self.k0 else 1
        self.X0 = st._X.copy()
        self.Z0 = st._Z.copy()
        self.phase0 = st._phase.copy()
        # column bitsets over row index
        xb = bitops.to_bool(self.X0, self.n)  # (k0, n)
        zb = bitops.to_bool(self.Z0, self.n)
        self.CX0 = np.ascontiguousarray(bitops.from_bool(xb.T))
        self.CZ0 = np.ascontiguousarray(bitops.from_bool(zb.T))
        if self.CX0.shape != (self.n, self.KW):  # k0 == 0 edge case
            self.CX0 = np.zeros((self.n, self.KW), dtype=np.uint64)
            self.CZ0 = np.zeros((self.n, self.KW), dtype=np.uint64)
        ops = model.channel_ops
        smax = max((len(m.support()) for m in ops), default=1)
        self.op_nsites = np.zeros(len(ops), dtype=np.int32)
        self.op_sites = np.zeros((len(ops), max(smax, 1)), dtype=np.int32)
        self.op_x = np.zeros_like(self.op_sites, dtype=np.uint8)
        self.op_z = np.zeros_like(self.op_sites, dtype=np.uint8)
        for i, m in enumerate(ops):
            supp = m.support()
            self.op_nsites[i] = len(supp)
            for t, s in enumerate(supp):
                self.op_sites[i, t] = s
                self.op_x[i, t] = bitops.get_bit(m.x, int(s))
                self.op_z[i, t] = bitops.get_bit(m.z, int(s))


_PACKS: dict[tuple, _EnginePack] = {}


def _get_pack(model: ModelInstance) -> _EnginePack:
    key = (model.name, model.Lx, model.Ly)
    pack = _PACKS.get(key)
    if pack is None:
        pack = _EnginePack(model)
        _PACKS[key] = pack
    return pack


def sample_rng(master_seed: int, r_index: int, sample_index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(master_seed, spawn_key=(r_index, sample_index))
    return np.random.Generator(np.random.Philox(ss))


def run_trajectory(
    model: ModelInstance,
    r: float,
    sample_index: int,
    master_seed: int,
    r_index: int = 0,
    with_corr: bool = False,
    max_ell: int | None = None,
    keep_state: bool = False,
) -> TrajectorySample:
    """One recorded-location trajectory at dephasing probability r."""
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"r must be in [0, 1], got {r}")
    pack = _get_pack(model)
    rng = sample_rng(master_seed, r_index, sample_index)
    applied = rng.random(len(model.channel_ops)) < r
    X = pack.X0.copy()
    Z = pack.Z0.copy()
    phase = pack.phase0.copy()
    alive = np.ones(pack.k0, dtype=np.uint8)
    CX = pack.CX0.copy()
    CZ = pack.CZ0.copy()
    removed = dephase_sweep(
        X,
        Z,
        phase,
        alive,
        CX,
        CZ,
        applied.view(np.uint8),
        pack.op_nsites,
        pack.op_sites,
        pack.op_x,
        pack.op_z,
    )
    k_final = pack.k0 - removed

    chi = None
    corr = None
    state = None
    if model.charge_qubits is not None:
        cols = CX[model.charge_qubits]  # (V, KW) anticommutation columns
        ids, counts = observables.column_classes(cols)
        chi = observables.chi_from_counts(counts, model.V)
        if with_corr:
            corr = observables.profile_from_class_ids(ids, model, max_ell)
    if keep_state or (with_corr and model.charge_qubits is None):
        mask = alive.astype(bool)
        state = StabilizerMixedState(
            model.n, X[mask].copy(), Z[mask].copy(), phase[mask].copy()
        )
        if with_corr and model.charge_qubits is None:
            corr = observables.thooft_profile(state, model, max_ell)
    return TrajectorySample(
        sample_index=sample_index,
        applied=applied,
        chi2=chi,
        corr=corr,
        state=state if keep_state else None,
        k_final=k_final,
    )


def bootstrap_stderr(
    samples: np.ndarray,
    volume: float,
    n_resamples: int = 200,
    master_seed: int = 0,
    r_index: int = 0,
) -> float:
    """Bootstrap standard error of F = var(chi)/V over the given samples."""
    samples = np.asarray(samples, dtype=np.float64)
    if len(samples) < 2:
        raise ValueError("need at least two samples to bootstrap F")
    if n_resamples < 100:
        raise ValueError("need at least 100 bootstrap resamples")
    rng = np.random.Generator(
        np.random.Philox(
            np.random.SeedSequence(master_seed, spawn_key=(_BOOT_TAG, r_index))
        )
    )
    idx = rng.integers(0, len(samples), size=(n_resamples, len(samples)))
    f = samples[idx].var(axis=1, ddof=1) / volume
    return float(f.std(ddof=1))


def _cell_worker(args) -> tuple[int, np.ndarray, np.ndarray | None]:
    (name, dims, r, r_index, n_samples, master_seed, with_corr, max_ell) = args
    model = build(name, dims)
    chis = np.empty(n_samples, dtype=np.float64)
    corrs = None
    for s in range(n_samples):
        ts = run_trajectory(
            model, r, s, master_seed, r_index=r_index, with_corr=with_corr, max_ell=max_ell
        )
        chis[s] = ts.chi2 if ts.chi2 is not None else np.nan
        if with_corr:
            if corrs is None:
                corrs = np.empty((n_samples, len(ts.corr)), dtype=np.float64)
            corrs[s] = ts.corr
    return r_index, chis, corrs


def _fsum_mean_var(values: np.ndarray) -> tuple[float, float]:
    n = len(values)
    mean = math.fsum(values) / n
    var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, var


def run_ensemble(
    model: ModelInstance,
    r_values,
    n_samples: int,
    master_seed: int,
    threads: int | None = None,
    with_corr: bool = False,
    max_ell: int | None = None,
    n_resamples: int = 200,
):
    """Ensemble statistics per r value.

    Returns (stats, per_sample_chi) where per_sample_chi maps r_index to the
    chi array (always kept: the per-sample CSV needs it).
    """
    if n_samples < 2:
        raise ValueError("need n_samples >= 2")
    if model.charge_qubits is None:
        raise ValueError(
            f"{model.name} has no on-site charge; use run_thooft_ensemble"
        )
    r_values = [float(r) for r in r_values]
    tasks = [
        (model.name, model.dims, r, i, n_samples, master_seed, with_corr, max_ell)
        for i, r in enumerate(r_values)
    ]
    results: dict[int, tuple[np.ndarray, np.ndarray | None]] = {}
    if threads is not None and threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for r_index, chis, corrs in pool.map(_cell_worker, tasks):
                results[r_index] = (chis, corrs)
    else:
        for t in tasks:
            r_index, chis, corrs = _cell_worker(t)
            results[r_index] = (chis, corrs)

    stats: list[EnsembleStats] = []
    chi_by_r: dict[int, np.ndarray] = {}
    for i, r in enumerate(r_values):
        chis, corrs = results[i]
        chi_by_r[i] = chis
        mean, var = _fsum_mean_var(chis)
        F = var / model.V
        stderr = bootstrap_stderr(
            chis, model.V, n_resamples=n_resamples, master_seed=master_seed, r_index=i
        )
        corr_mean = corr_stderr = None
        if corrs is not None:
            n_ell = corrs.shape[1]
            corr_mean = np.array(
                [math.fsum(corrs[:, j]) / n_samples for j in range(n_ell)]
            )
            corr_stderr = np.array(
                [
                    math.sqrt(
                        math.fsum((corrs[:, j] - corr_mean[j]) ** 2)
                        / (n_samples - 1)
                        / n_samples
                    )
                    for j in range(n_ell)
                ]
            )
        stats.append(
            EnsembleStats(
                model=model.name,
                Lx=model.Lx,
                Ly=model.Ly,
                r=r,
                n_samples=n_samples,
                chi_mean=mean,
                chi_var=var,
                F=F,
                F_stderr=stderr,
                corr_mean=corr_mean,
                corr_stderr=corr_stderr,
            )
        )
    return stats, chi_by_r


def run_thooft_ensemble(
    model: ModelInstance,
    r_values,
    n_samples: int,
    master_seed: int,
    max_ell: int | None = None,
    threads: int | None = None,
):
    """Ensemble mean/stderr of the 't Hooft string Renyi-2 profile (toric)."""
    if max_ell is None:
        max_ell = model.Lx // 2
    r_values = [float(r) for r in r_values]
    tasks = [
        (model.name, model.dims, r, i, n_samples, master_seed, True, max_ell)
        for i, r in enumerate(r_values)
    ]
    results: dict[int, np.ndarray] = {}
    if threads is not None and threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for r_index, _chis, corrs in pool.map(_cell_worker, tasks):
                results[r_index] = corrs
    else:
        for t in tasks:
            r_index, _chis, corrs = _cell_worker(t)
            results[r_index] = corrs
    out = []
    for i, r in enumerate(r_values):
        corrs = results[i]
        mean = np.array([math.fsum(corrs[:, j]) / n_samples for j in range(max_ell)])
        stderr = np.array(
            [
                math.sqrt(
                    math.fsum((corrs[:, j] - mean[j]) ** 2)
                    / (n_samples - 1)
                    / n_samples
                )
                for j in range(max_ell)
            ]
        )
        out.append((r, mean, stderr))
    return out

"""Figure rendering for the CLI report paths.

PNGs are written next to the delimited output; they are a view of the CSVs,
never an input to anything downstream.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .fss import CollapseInput, scale_points


def ensemble_figure(path, stats, title: str) -> None:
    """chi_mean and F = var(chi)/V against r for one run."""
    rs = [st.r for st in stats]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.6))
    ax1.errorbar(rs, [st.chi_mean for st in stats], fmt="o-", ms=4)
    ax1.set_xlabel(r"$r$")
    ax1.set_ylabel(r"$\overline{\chi}$")
    ax2.errorbar(
        rs,
        [st.F for st in stats],
        yerr=[st.F_stderr for st in stats],
        fmt="s-",
        ms=4,
        color="tab:red",
    )
    ax2.set_xlabel(r"$r$")
    ax2.set_ylabel(r"$F = \sigma/V$")
    fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def corr_figure(path, profiles, title: str) -> None:
    """profiles: list of (r, ells, mean, stderr)."""
    fig, ax = plt.subplots(figsize=(5.2, 3.8))
    for r, ells, mean, err in profiles:
        ax.errorbar(ells, mean, yerr=err, fmt="o-", ms=4, label=f"r={r:g}")
    ax.set_xlabel(r"$\ell$")
    ax.set_ylabel(r"${\rm Corr}^x(\ell)$")
    ax.set_ylim(-0.05, 1.05)
    ax.legend(fontsize=8)
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def collapse_figure(path, data: CollapseInput, rc: float, nu: float, zeta: float, title: str) -> None:
    groups = scale_points(data, rc, nu, zeta)
    fig, ax = plt.subplots(figsize=(5.2, 3.8))
    for (x, y, dy), size in zip(groups, data._sizes):
        ax.errorbar(x, y, yerr=dy, fmt="o", ms=4, label=f"size={size:g}")
    ax.set_xlabel(r"$(r-r_c)\,{\rm size}^{1/\nu}$")
    ax.set_ylabel(r"$F\,{\rm size}^{-\zeta/\nu}$")
    ax.legend(fontsize=8)
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)

"""Command-line entry point.

Subcommands:

* ``run``           stochastic dephasing ensemble -> per-sample + summary CSV
* ``corr``          spatial Renyi-2 correlator profiles per r ('t Hooft
                    string profile for the toric model)
* ``fss``           finite-size-scaling collapse of summary CSVs -> fit JSON
* ``oracle-check``  dense / percolation / recorded-vs-unrecorded cross checks
* ``demo-maximal``  closed-form check: generators and correlators at r = 1

Every report path writes the delimited files first and then renders a
matplotlib PNG next to them (disable with --no-plot).  Exit codes: 0 ok,
2 usage, 3 I/O, 4 oracle-check failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, fss, report, tables
from .models import ModelError, build, canonical_name
from .observables import renyi2_correlator, type1_correlator
from .oracles import checks
from .trajectory import run_ensemble, run_thooft_ensemble

OUTDIR_ENV = "SSSBSIM_OUTDIR"


def parse_r_spec(spec: str) -> list[float]:
    """'a:b:step' (inclusive grid), 'x,y,z', or a single value."""
    spec = spec.strip()
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ValueError(f"bad r grid {spec!r}, want start:stop:step")
        start, stop, step = (float(p) for p in parts)
        if step <= 0 or stop < start:
            raise ValueError(f"bad r grid {spec!r}")
        count = int(round((stop - start) / step)) + 1
        vals = [round(start + i * step, 12) for i in range(count)]
        return [v for v in vals if v <= stop + 1e-12]
    return [round(float(p), 12) for p in spec.split(",") if p.strip()]


def _read_config_file(path: str) -> dict[str, str]:
    out = {}
    for line_no, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{line_no}: expected key=value")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


_DEFAULTS = {
    "Ly": None,
    "r": "0.5",
    "samples": 100,
    "seed": 0,
    "threads": None,
    "corr": False,
    "max_ell": None,
    "plot": True,
    "out": None,
}

_CASTS = {
    "L": int, "Ly": int, "samples": int, "seed": int, "threads": int,
    "max_ell": int, "corr": lambda v: str(v).lower() in ("1", "true", "yes"),
    "plot": lambda v: str(v).lower() in ("1", "true", "yes"),
}


def _merge_config(args: argparse.Namespace, file_cfg: dict) -> dict:
    """Explicit flags win over the config file, which wins over defaults."""
    cfg = {}
    for key, default in {**_DEFAULTS, "model": None, "L": None}.items():
        val = getattr(args, key, None)
        if val is None and key in file_cfg:
            cast = _CASTS.get(key, str)
            val = cast(file_cfg[key])
        if val is None:
            val = default
        cfg[key] = val
    if cfg["model"] is None or cfg["L"] is None:
        raise ValueError("model and L are required (flag or config file)")
    if cfg["Ly"] is None:
        cfg["Ly"] = cfg["L"]
    if cfg["threads"] is None:
        cfg["threads"] = os.cpu_count() or 1
    cfg["model"] = canonical_name(cfg["model"])
    return cfg


def _outdir(cfg_out: str | None) -> Path:
    base = cfg_out or os.environ.get(OUTDIR_ENV) or "sssbsim_out"
    path = Path(base)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_manifest(outdir: Path, command: str, cfg: dict) -> None:
    manifest = {"version": __version__, "command": command, "config": dict(cfg)}
    tables.write_json(outdir / "manifest.json", manifest)


def _load_manifest(path: str) -> tuple[str, dict]:
    with open(path) as fh:
        m = json.load(fh)
    return m["command"], m["config"]


def cmd_run(cfg: dict) -> int:
    model = build(cfg["model"], (cfg["L"], cfg["Ly"]))
    if model.charge_qubits is None:
        raise ModelError(
            f"{model.name} has no on-site charged operator: chi is undefined "
            "(use the corr command for 't Hooft profiles)"
        )
    rs = parse_r_spec(cfg["r"])
    if cfg["samples"] == 1:
        stats, chi_by_r = _single_sample_stats(model, rs, cfg["seed"])
    else:
        stats, chi_by_r = run_ensemble(
            model, rs, cfg["samples"], cfg["seed"], threads=cfg["threads"]
        )
    outdir = _outdir(cfg["out"])
    rows = (
        (rs[i], s, chi_by_r[i][s])
        for i in range(len(rs))
        for s in range(cfg["samples"])
    )
    tables.write_samples_csv(outdir / "samples.csv", model.name, model.Lx, model.Ly, rows)
    tables.write_summary_csv(outdir / "summary.csv", stats)
    _write_manifest(outdir, "run", cfg)
    if cfg["plot"]:
        report.ensemble_figure(
            outdir / "summary.png", stats, f"{model.name} {model.Lx}x{model.Ly}"
        )
    print(f"wrote {outdir}/samples.csv, summary.csv, manifest.json")
    return 0


def _single_sample_stats(model, rs, seed):
    # degenerate one-trajectory "ensemble": no spread, so var/F/stderr are 0
    from .trajectory import EnsembleStats, run_trajectory

    stats = []
    chi_by_r = {}
    for i, r in enumerate(rs):
        ts = run_trajectory(model, r, 0, seed, r_index=i)
        chi_by_r[i] = np.array([ts.chi2])
        stats.append(
            EnsembleStats(
                model=model.name, Lx=model.Lx, Ly=model.Ly, r=r, n_samples=1,
                chi_mean=ts.chi2, chi_var=0.0, F=0.0, F_stderr=0.0,
            )
        )
    return stats, chi_by_r


def cmd_corr(cfg: dict) -> int:
    model = build(cfg["model"], (cfg["L"], cfg["Ly"]))
    rs = parse_r_spec(cfg["r"])
    max_ell = cfg["max_ell"] or model.Lx // 2
    outdir = _outdir(cfg["out"])
    profiles = []
    if model.charge_qubits is None:
        for r, mean, err in run_thooft_ensemble(
            model, rs, cfg["samples"], cfg["seed"], max_ell=max_ell, threads=cfg["threads"]
        ):
            profiles.append((r, np.arange(1, max_ell + 1), mean, err))
    else:
        stats, _ = run_ensemble(
            model,
            rs,
            cfg["samples"],
            cfg["seed"],
            threads=cfg["threads"],
            with_corr=True,
            max_ell=max_ell,
        )
        for st in stats:
            profiles.append((st.r, np.arange(1, max_ell + 1), st.corr_mean, st.corr_stderr))
    for r, ells, mean, err in profiles:
        tables.write_corr_csv(outdir / f"corr_r{r:g}.csv", ells, mean, err)
    _write_manifest(outdir, "corr", cfg)
    if cfg["plot"]:
        report.corr_figure(
            outdir / "corr.png", profiles, f"{model.name} {model.Lx}x{model.Ly}"
        )
    print(f"wrote {len(profiles)} profile CSVs to {outdir}")
    return 0


def cmd_fss(args: argparse.Namespace) -> int:
    table = tables.read_summary_csv(args.summary)
    if args.ansatz == "V":
        size = table["Lx"].astype(float) * table["Ly"].astype(float)
    else:
        size = table["Lx"].astype(float)
    keep = table["F_stderr"] > 0
    dropped = int((~keep).sum())
    try:
        data = fss.CollapseInput(
            r=table["r"][keep], size=size[keep], F=table["F"][keep], dF=table["F_stderr"][keep]
        )
    except ValueError as exc:
        raise ModelError(str(exc))
    fit = fss.fit_collapse(
        data,
        guess=(args.rc, args.nu, args.zeta),
        ansatz=args.ansatz,
        n_bootstrap=args.bootstrap,
        seed=args.seed,
    )
    outdir = _outdir(args.out)
    payload = fit.as_dict()
    payload["dropped_zero_error_points"] = dropped
    if args.ansatz == "V":
        payload["linear_size_exponents"] = fss.convert_exponents(fit.nu, fit.zeta)
    tables.write_json(outdir / "fit.json", payload)
    groups = fss.scale_points(data, fit.rc, fit.nu, fit.zeta)
    rows = []
    for (x, y, dy), s, idx in zip(groups, data._sizes, data._groups):
        for t in range(len(x)):
            rows.append((s, data.r[idx][t], x[t], y[t], dy[t]))
    tables.write_collapsed_csv(outdir / "collapsed.csv", rows)
    if not args.no_plot:
        report.collapse_figure(
            outdir / "collapse.png", data, fit.rc, fit.nu, fit.zeta,
            f"S={fit.quality:.2f} rc={fit.rc:.3f} nu={fit.nu:.2f} zeta={fit.zeta:.2f}",
        )
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def cmd_oracle_check(args: argparse.Namespace) -> int:
    rep = checks.run_all_checks(
        n_trajectories=args.trajectories, n_samples=args.samples, master_seed=args.seed
    )
    text = json.dumps(rep, indent=2, sort_keys=True)
    print(text)
    if args.out:
        outdir = _outdir(args.out)
        (outdir / "oracle_report.json").write_text(text + "\n")
    return 0 if rep["passed"] else 4


def cmd_demo_maximal(args: argparse.Namespace) -> int:
    model = build(args.model, (args.L, args.Ly if args.Ly else args.L))
    applied = np.ones(model.n_ops, dtype=bool)
    state = checks.evolve_recorded(model, applied).canonicalize()
    print(f"model {model.name} {model.Lx}x{model.Ly}: maximal dephasing (r=1)")
    print(f"final generators (k={state.k}, n={model.n}):")
    for g in state.generators:
        print(f"  {g}")
    pairs = _demo_pairs(model)
    print("pair correlators:")
    for label, op_i, op_j in pairs:
        c2 = renyi2_correlator(state, op_i, op_j)
        c1 = type1_correlator(state, op_i, op_j)
        print(f"  {label:24s} C_I = {c1:+d}   C_II = {c2}")
    return 0


def _demo_pairs(model):
    pairs = []
    if model.name in ("chain-zz", "square-zz", "lieb-x"):
        sites = model.charge_sites
        for j in (1, len(sites) // 2):
            pairs.append(
                (
                    f"O({sites[0]}) O({sites[j]})",
                    model.charge_op(sites[0]),
                    model.charge_op(sites[j]),
                )
            )
    elif model.name.startswith("cluster1d"):
        for i, j in ((1, 3), (0, 2), (1, model.Lx // 2 * 2 - 1), (0, model.Lx // 2)):
            pairs.append((f"Z{i} Z{j}", model.charge_op(i), model.charge_op(j)))
    else:  # toric: 't Hooft endpoints
        from .models import thooft_string
        from .pauli import PauliString

        ident = PauliString.identity(model.n)
        for ell in (1, model.Lx // 2):
            pairs.append(
                (f"'t Hooft ell={ell}", thooft_string(model, (0, 0), ell, "x"), ident)
            )
    return pairs


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sssbsim", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def add_run_like(sp):
        sp.add_argument("--model", help="model id (chain-zz, square-zz, cluster1d-x, "
                        "cluster1d-x-even, lieb-x, toric-x)")
        sp.add_argument("--L", type=int, help="linear size Lx (Ly defaults to Lx)")
        sp.add_argument("--Ly", type=int)
        sp.add_argument("--r", help="dephasing probability: value, list, or start:stop:step")
        sp.add_argument("--samples", type=int, help="trajectories per r (default 100)")
        sp.add_argument("--seed", type=int, help="master seed (default 0)")
        sp.add_argument("--threads", type=int, help="worker processes (default: all cores)")
        sp.add_argument("--max-ell", dest="max_ell", type=int)
        sp.add_argument("--out", help=f"output directory (default ${OUTDIR_ENV} or ./sssbsim_out)")
        sp.add_argument("--config", help="key=value config file mirroring these flags")
        sp.add_argument("--from-manifest", dest="from_manifest",
                        help="rerun the configuration stored in a manifest.json")
        sp.add_argument("--no-plot", dest="plot", action="store_false", default=None,
                        help="skip PNG rendering")

    sp_run = sub.add_parser("run", help="stochastic dephasing ensemble")
    add_run_like(sp_run)
    sp_corr = sub.add_parser("corr", help="spatial Renyi-2 correlator profiles")
    add_run_like(sp_corr)

    sp_fss = sub.add_parser("fss", help="finite-size-scaling collapse")
    sp_fss.add_argument("--summary", nargs="+", required=True, help="summary CSV file(s)")
    sp_fss.add_argument("--ansatz", choices=("V", "L"), default="V")
    sp_fss.add_argument("--rc", type=float, default=0.5, help="initial guess for r_c")
    sp_fss.add_argument("--nu", type=float, default=3.0)
    sp_fss.add_argument("--zeta", type=float, default=2.3)
    sp_fss.add_argument("--bootstrap", type=int, default=200)
    sp_fss.add_argument("--seed", type=int, default=0)
    sp_fss.add_argument("--out")
    sp_fss.add_argument("--no-plot", dest="no_plot", action="store_true")

    sp_oc = sub.add_parser("oracle-check", help="run the oracle cross-check suite")
    sp_oc.add_argument("--trajectories", type=int, default=100)
    sp_oc.add_argument("--samples", type=int, default=50)
    sp_oc.add_argument("--seed", type=int, default=1)
    sp_oc.add_argument("--out")

    sp_demo = sub.add_parser("demo-maximal", help="closed forms at r=1")
    sp_demo.add_argument("--model", required=True)
    sp_demo.add_argument("--L", type=int, required=True)
    sp_demo.add_argument("--Ly", type=int)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command in ("run", "corr"):
            file_cfg = {}
            if args.from_manifest:
                cmd, mcfg = _load_manifest(args.from_manifest)
                file_cfg = {k: str(v) for k, v in mcfg.items() if v is not None}
                args.command = cmd
            elif args.config:
                file_cfg = _read_config_file(args.config)
            cfg = _merge_config(args, file_cfg)
            cfg["plot"] = args.plot if args.plot is not None else _CASTS["plot"](
                file_cfg.get("plot", "true")
            )
            cfg["out"] = args.out or file_cfg.get("out") or None
            cfg["r"] = args.r or file_cfg.get("r") or _DEFAULTS["r"]
            return cmd_run(cfg) if args.command == "run" else cmd_corr(cfg)
        if args.command == "fss":
            return cmd_fss(args)
        if args.command == "oracle-check":
            return cmd_oracle_check(args)
        if args.command == "demo-maximal":
            return cmd_demo_maximal(args)
        parser.error(f"unknown command {args.command}")
    except (ModelError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())

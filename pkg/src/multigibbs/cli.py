"""multigibbs command line: experiments from TOML configs, CSV out.

Subcommands: tilt, solve-scalar, solve-profile, free-energy, phase-scan,
critical-theta, sample, weak-law, exact-small-n, preset.  Exit code 0 means
every assertion passed; diagnostic CSVs are written before a nonzero exit.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import presets as presets_mod
from .config import (
    kernel_from_config,
    load_config,
    measure_from_config,
    motif_from_config,
    sampler_from_config,
    solver_from_config,
)
from .kernels import CouplingMatrix, StepKernel
from .meanfield import (
    critical_theta,
    profile_fixed_point,
    scalar_maximizers,
    solve_free_energy,
)
from .sampler import ModelSpec, exact_small_n, sample_chain
from .tables import Table, emit_csv, emit_plotdata


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _model_params(cfg):
    model = cfg.get("model", {})
    return float(model.get("theta", 0.0)), float(model.get("B", 0.0))


def _build_spec(cfg, n=None, seed=None) -> ModelSpec:
    mu = measure_from_config(cfg.get("measure", {}))
    motif = motif_from_config(cfg.get("motif", {"preset": "K2"}))
    coupling = kernel_from_config(cfg.get("kernel", {"preset": "complete"}))
    theta, b = _model_params(cfg)
    sp = sampler_from_config(cfg.get("sampler", {}))
    n = n or sp.n
    if isinstance(coupling, CouplingMatrix):
        return ModelSpec(motif, mu, theta, coupling, B=b)
    return ModelSpec(motif, mu, theta, coupling, n=n, B=b)


def cmd_tilt(args) -> int:
    cfg = load_config(args.config)
    mu = measure_from_config(cfg.get("measure", {}))
    out = _outdir(args)
    thetas = np.linspace(-6.0, 6.0, 49)
    tab = Table(["theta", "alpha", "mean", "var", "rate"])
    for th in thetas:
        tab.add(float(th), mu.log_mgf(th), mu.tilt_mean(th), mu.tilt_var(th), mu.rate(th))
    emit_csv(tab, out / "tilt.csv")
    xs = np.linspace(mu.support_min, mu.support_max, 33)
    inv = Table(["x", "beta", "rate_at_mean"])
    for x in xs:
        inv.add(float(x), mu.inverse_mean(float(x)), mu.rate_at_mean(float(x)))
    emit_csv(inv, out / "tilt_inverse.csv")
    print(f"tilt tables written to {out}")
    return 0


def cmd_solve_scalar(args) -> int:
    cfg = load_config(args.config)
    mu = measure_from_config(cfg.get("measure", {}))
    theta, b = _model_params(cfg)
    v = int(cfg.get("model", {}).get("v", 2))
    rep = scalar_maximizers(mu, theta, b, v)
    tab = Table(["theta", "B", "v", "Z", "optimizers", "residual", "verdict"])
    tab.add(
        theta, b, v, rep.best_value,
        "|".join(format(t, ".17g") for t in rep.optimizers),
        max(rep.residuals), rep.verdict,
    )
    out = _outdir(args)
    emit_csv(tab, out / "solve_scalar.csv")
    print(f"A_theta = {rep.optimizers}")
    return 0


def cmd_solve_profile(args) -> int:
    cfg = load_config(args.config)
    mu = measure_from_config(cfg.get("measure", {}))
    motif = motif_from_config(cfg["motif"])
    kernel = kernel_from_config(cfg["kernel"])
    if isinstance(kernel, CouplingMatrix):
        raise SystemExit("solve-profile needs a step kernel, not a matrix")
    theta, b = _model_params(cfg)
    f0 = cfg.get("profile", {}).get("f0", [mu.tilt_mean(0.0)] * kernel.k)
    fp = profile_fixed_point(motif, kernel, mu, theta, b, np.asarray(f0, dtype=float))
    tab = Table(["theta", "B", "profile", "objective", "residual",
                 "iterations", "converged"])
    tab.add(
        theta, b, "|".join(format(t, ".17g") for t in fp.profile.values),
        fp.objective, fp.residual, fp.iterations, fp.converged,
    )
    out = _outdir(args)
    emit_csv(tab, out / "solve_profile.csv")
    print(f"profile fixed point: {fp.profile.values} residual {fp.residual:.2e}")
    return 0 if fp.converged else 1


def cmd_free_energy(args) -> int:
    cfg = load_config(args.config)
    mu = measure_from_config(cfg.get("measure", {}))
    motif = motif_from_config(cfg["motif"])
    kernel = kernel_from_config(cfg["kernel"])
    theta, b = _model_params(cfg)
    spec = solver_from_config(cfg.get("solver", {}), cfg["seed"])
    rep = solve_free_energy(motif, kernel, mu, theta, b, spec)
    tab = Table(["theta", "B", "Z", "optimizer", "objective", "residual", "verdict"])
    for prof, obj, resid in zip(rep.optimizers, rep.objectives, rep.residuals):
        tab.add(
            theta, b, rep.extras.get("Z", rep.best_value),
            "|".join(format(t, ".17g") for t in prof.values),
            obj, resid, rep.verdict,
        )
    out = _outdir(args)
    emit_csv(tab, out / "free_energy.csv")
    print(f"Z = {rep.extras.get('Z'):.12g} with {len(rep.optimizers)} optimizer(s)")
    return 0


def cmd_phase_scan(args) -> int:
    cfg = load_config(args.config)
    mu = measure_from_config(cfg.get("measure", {}))
    v = int(cfg.get("model", {}).get("v", 2))
    b = float(cfg.get("model", {}).get("B", 0.0))
    thetas = np.linspace(args.theta_min, args.theta_max, args.steps)
    tab = Table(["theta", "B", "Z", "n_optimizers", "optimizers", "residual"])
    for th in thetas:
        rep = scalar_maximizers(mu, float(th), b, v)
        tab.add(
            float(th), b, rep.best_value, len(rep.optimizers),
            "|".join(format(t, ".17g") for t in rep.optimizers),
            max(rep.residuals),
        )
    out = _outdir(args)
    emit_csv(tab, out / "phase_scan.csv")
    emit_plotdata(tab, out / "phase_scan.dat")
    print(f"phase scan over [{args.theta_min}, {args.theta_max}] written to {out}")
    return 0


def cmd_critical_theta(args) -> int:
    cfg = load_config(args.config)
    mu = measure_from_config(cfg.get("measure", {}))
    v = int(cfg.get("model", {}).get("v", 2))
    tc = critical_theta(mu, v)
    tab = Table(["v", "theta_c"])
    tab.add(v, tc)
    out = _outdir(args)
    emit_csv(tab, out / "critical_theta.csv")
    print(f"theta_c = {tc:.9f}")
    return 0


def cmd_sample(args) -> int:
    cfg = load_config(args.config)
    sp = sampler_from_config(cfg.get("sampler", {}))
    seed = args.seed if args.seed is not None else cfg["seed"]
    sweeps = args.sweeps or sp.sweeps
    burn_in = args.burn_in if args.burn_in is not None else sp.burn_in
    thin = args.thin or sp.thin
    stats = tuple(args.stats.split(",")) if args.stats else sp.stats
    spec = _build_spec(cfg)
    tr = sample_chain(
        spec, sweeps=sweeps, burn_in=burn_in, thin=thin, seed=seed,
        stats=stats, scan=sp.scan,
    )
    out = _outdir(args)
    trace = Table(tr.columns)
    for row in tr.rows:
        trace.add(*row)
    emit_csv(trace, out / "trace.csv")
    summary = Table(["stat", "mean", "batch_se"])
    for name, (mean, se) in tr.summary.items():
        summary.add(name, mean, se)
    emit_csv(summary, out / "trace_summary.csv")
    print(f"{len(tr.rows)} records written to {out}; drift {tr.max_drift:.2e}")
    return 0


def cmd_weak_law(args) -> int:
    cfg = load_config(args.config)
    wl = cfg.get("weak_law", {})
    tab, metrics = presets_mod.weak_law_battery(
        n_list=tuple(wl.get("n_list", (250, 500, 1000, 2000))),
        seeds=tuple(wl.get("seeds", (1, 2, 3))),
        theta=float(cfg.get("model", {}).get("theta", 1.0)),
    )
    out = _outdir(args)
    emit_csv(tab, out / "weak_law.csv")
    emit_plotdata(tab, out / "weak_law.dat")
    long = Table(["n", "statistic", "distance_to_set", "lp_profile_distance", "se"])
    for n, row in metrics.items():
        for stat in ("abs_mag_dev", "contrast", "ham_dev"):
            long.add(n, f"{stat}={row[stat]:.6g}", row["dist"], row["lp"], float("nan"))
    emit_csv(long, out / "weak_law_summary.csv")
    print(f"weak-law tables written to {out}")
    return 0


def cmd_exact_small_n(args) -> int:
    cfg = load_config(args.config)
    spec = _build_spec(cfg, n=args.n)
    res = exact_small_n(spec)
    tab = Table(["n", "theta", "B", "Z_n", "mag", "abs_mag", "ham"])
    tab.add(
        spec.n, spec.theta, spec.B, res.z,
        res.means["mag"], res.means["abs_mag"], res.means["ham"],
    )
    out = _outdir(args)
    emit_csv(tab, out / "exact_small_n.csv")
    print(f"Z_{spec.n} = {res.z:.12g}")
    return 0


def cmd_preset(args) -> int:
    result = presets_mod.run_preset(args.name)
    out = _outdir(args)
    for tname, table in result.tables.items():
        emit_csv(table, out / f"{result.name}_{tname}.csv")
        emit_plotdata(table, out / f"{result.name}_{tname}.dat")
    for label, ok, detail in result.assertions:
        status = "PASS" if ok else "FAIL"
        print(f"{status} {result.name}:{label}" + (f" ({detail})" if detail else ""))
    return 0 if result.ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="multigibbs",
        description="mean-field Gibbs measures with multilinear interactions",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, needs_config=True):
        p = sub.add_parser(name)
        if needs_config:
            p.add_argument("--config", required=True)
        p.add_argument("--out", default="out")
        p.set_defaults(fn=fn)
        return p

    add("tilt", cmd_tilt)
    add("solve-scalar", cmd_solve_scalar)
    add("solve-profile", cmd_solve_profile)
    add("free-energy", cmd_free_energy)
    p = add("phase-scan", cmd_phase_scan)
    p.add_argument("--theta-min", type=float, required=True)
    p.add_argument("--theta-max", type=float, required=True)
    p.add_argument("--steps", type=int, default=16)
    add("critical-theta", cmd_critical_theta)
    p = add("sample", cmd_sample)
    p.add_argument("--sweeps", type=int)
    p.add_argument("--burn-in", type=int, dest="burn_in")
    p.add_argument("--thin", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--stats")
    add("weak-law", cmd_weak_law)
    p = add("exact-small-n", cmd_exact_small_n)
    p.add_argument("--n", type=int)
    p = sub.add_parser("preset")
    p.add_argument("name", choices=sorted(presets_mod.PRESETS))
    p.add_argument("--out", default="out")
    p.set_defaults(fn=cmd_preset)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())

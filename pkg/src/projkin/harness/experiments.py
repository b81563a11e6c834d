"""Run orchestration: one configured experiment in, CSV files and a manifest out."""
import os
from dataclasses import dataclass, field

import numpy as np

from .. import __version__
from ..integrators import PIConfig, get_tableau, run
from ..spectral import spectrum_sweep
from ..stability import (R1, R2, amplification, boundary_prk2_asymptotic, boundary_prk4_asymptotic,
                         trace_region_exact)
from ..velocity_space import moment
from . import output
from .config import BRUTE_FORCE, EXACT, LIMIT, ExperimentConfig, validate
from .problems import build_operator, initial_condition
from .solvers import exact_linear_solution, limit_solver, reference_solver
from .truncation import truncation_study


@dataclass
class RunResult:
    out_dir: str
    files: list = field(default_factory=list)
    times: dict = field(default_factory=dict)
    density: dict = field(default_factory=dict)
    reference: dict = field(default_factory=dict)
    limit: dict = field(default_factory=dict)
    errors: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    selection: object = None


def operator_for(cfg: ExperimentConfig):
    return build_operator(cfg.problem, cfg.eps, cfg.gamma, cfg.dx, J=cfg.J, quadrature_kind=cfg.quadrature,
                          stencil=cfg.stencil, phi_left=cfg.phi_left, phi_right=cfg.phi_right, T=cfg.T)


def _max_err(a, b):
    return float(np.max(np.abs(a - b)))


def _base_manifest(cfg, op, sel, notes):
    q = op.quadrature
    derived = {
        "I": op.grid.I,
        "grid_dx": op.grid.dx,
        "boundary": op.grid.bc,
        "x": op.grid.x,
        "nodes": q.nodes,
        "weights": q.weights,
        "d": q.d,
        "transport_scale": op.scaling.transport_scale,
        "relaxation_time": op.scaling.relaxation_time,
    }
    if sel is not None:
        derived.update(Delta_t_max=sel.Delta_t_max, Delta_t_max_limit=sel.Delta_t_max_limit,
                       K_min=sel.K_min, b=sel.b, zeta_critical=sel.zeta_critical,
                       cluster_radius=sel.cluster_radius)
    return {"version": __version__, "config": cfg.as_dict(), "derived": derived, "notes": list(notes)}


def run_experiment(cfg: ExperimentConfig, spectrum=False, region=False, n_zeta=64, n_theta=180):
    """Validate, integrate, compare and write every output file of one run."""
    sel, notes = validate(cfg)
    op = operator_for(cfg)
    tab = get_tableau(cfg.tableau)
    pic = PIConfig(cfg.delta_t, cfg.k_inner, cfg.dt, n_outer=cfg.steps)
    wanted = sorted(set(cfg.snapshots))
    f0 = initial_condition(cfg.problem, op.grid, op.quadrature, cfg.T)

    res = RunResult(cfg.out, notes=list(notes), selection=sel)
    states = {}
    if 0 in wanted:
        states[0] = f0.copy()

    def keep(N, t, f):
        if N in wanted:
            states[N] = f.copy()

    run(f0, tab, pic, op, stride=cfg.steps, callback=keep)
    times = [N * cfg.dt for N in wanted]
    for N, t in zip(wanted, times):
        res.times[N] = t
        res.density[N] = op.density(states[N])

    if cfg.reference == BRUTE_FORCE:
        dt_ref = cfg.resolved_dt_ref()
        refs = reference_solver(f0, op, dt_ref, times)
        for N, f in zip(wanted, refs):
            res.reference[N] = op.density(f)
    elif cfg.reference == EXACT:
        for N, t in zip(wanted, times):
            res.reference[N] = op.density(exact_linear_solution(f0, op, t))
    elif cfg.reference == LIMIT:
        _, traj = limit_solver(moment(op.quadrature, f0), op.grid, op.quadrature.d, op.model, cfg.dt, cfg.steps)
        for N in wanted:
            res.limit[N] = traj[N]

    os.makedirs(cfg.out, exist_ok=True)
    for N in wanted:
        path = os.path.join(cfg.out, f"density_N{N:06d}.csv")
        res.files.append(output.write_density(path, op.grid.x, res.density[N],
                                              res.reference.get(N), res.limit.get(N)))
        res.errors.append((N, res.times[N],
                           _max_err(res.density[N], res.reference[N]) if N in res.reference else None,
                           _max_err(res.density[N], res.limit[N]) if N in res.limit else None))
    res.files.append(output.write_csv(os.path.join(cfg.out, "errors.csv"),
                                      ["n", "t", "error_ref", "error_limit"], res.errors))
    if sel is not None:
        res.files.append(output.write_summary(os.path.join(cfg.out, "summary.csv"), [sel]))
    if spectrum:
        res.files.append(write_spectrum_file(cfg, op, n_zeta))
    if region:
        res.files.append(write_region_file(cfg, n_theta))

    manifest = _base_manifest(cfg, op, sel, res.notes)
    manifest.update(kind="run", tableau={"A": tab.A, "b": tab.b, "c": tab.c, "order": tab.order},
                    snapshot_times=times, dt_ref=cfg.resolved_dt_ref() if cfg.reference == BRUTE_FORCE else None,
                    errors=res.errors, outputs=[os.path.basename(p) for p in res.files])
    res.files.append(output.write_manifest(os.path.join(cfg.out, "manifest.json"), manifest))
    return res


def zeta_grid(n):
    return 2.0 * np.pi * np.arange(n) / n


def write_spectrum_file(cfg, op, n_zeta=64):
    zetas = zeta_grid(n_zeta)
    reps = spectrum_sweep(op.quadrature, cfg.stencil, cfg.dx, cfg.eps, cfg.gamma, cfg.delta_t, zetas)
    return output.write_spectrum(os.path.join(cfg.out, "spectrum.csv"), list(zip(reps, zetas)))


def stability_regions(cfg, n_theta=180):
    """Exact R1 and R2 boundaries plus the first-order curves where they exist."""
    tab = get_tableau(cfg.tableau)
    thetas = np.linspace(0.0, 2.0 * np.pi, n_theta, endpoint=False)
    K = cfg.k_inner
    regions = [trace_region_exact(tab, cfg.dt, cfg.delta_t, K, which, thetas) for which in (R1, R2)]
    z = cfg.delta_t / cfg.dt
    if 0 < z < 0.1 and K >= 1 and cfg.tableau in ("rk2", "rk4"):
        sig = amplification(tab, cfg.dt, cfg.delta_t, K)
        for which in (R1, R2):
            if cfg.tableau == "rk2":
                reg = boundary_prk2_asymptotic(K, z, thetas, which)
            else:
                reg = boundary_prk4_asymptotic(K, z, thetas, which)
            reg.abs_sigma = np.abs(sig(reg.points))
            regions.append(reg)
    return regions


def write_region_file(cfg, n_theta=180):
    return output.write_region(os.path.join(cfg.out, "region.csv"), stability_regions(cfg, n_theta))


def run_truncation(cfg: ExperimentConfig, dts, t0=0.1, tableaux=("rk4", "rk2")):
    """One-step error sweep for the linear periodic problem against its exact flow."""
    if cfg.problem != "linear":
        raise ValueError("the truncation study uses the linear periodic problem")
    if cfg.k_inner is None:
        raise ValueError("the truncation study needs an explicit k_inner")
    op = operator_for(cfg)
    f0 = initial_condition(cfg.problem, op.grid, op.quadrature, cfg.T)
    f_start = exact_linear_solution(f0, op, t0)
    os.makedirs(cfg.out, exist_ok=True)
    reports, files = {}, []
    for name in tableaux:
        rep = truncation_study(f_start, op, get_tableau(name), cfg.delta_t, cfg.k_inner, dts)
        reports[name] = rep
        files.append(output.write_truncation(os.path.join(cfg.out, f"truncation_{name}.csv"), rep))
    manifest = _base_manifest(cfg, op, None, [])
    manifest.update(kind="truncation", t0=t0, dts=list(dts),
                    results={n: {"slope": r.slope, "fit_range": r.fit_range, "plateau": r.plateau,
                                 "notes": r.notes} for n, r in reports.items()},
                    outputs=[os.path.basename(p) for p in files])
    files.append(output.write_manifest(os.path.join(cfg.out, "manifest.json"), manifest))
    return reports, files

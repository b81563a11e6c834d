"""End-to-end acceptance checks, one per criterion.

Each check returns (ok, detail).  Under pytest every check prints one
PASS/FAIL line and the lines are repeated in the terminal summary; run the
file as a script to get just the lines.
"""
import time
import warnings

import numpy as np
import pytest

from projkin.discretization import CENTRAL4, UPWIND3
from projkin.harness.config import build_config
from projkin.harness.experiments import operator_for
from projkin.harness.problems import initial_condition
from projkin.harness.solvers import exact_linear_solution, limit_solver, reference_solver
from projkin.harness.truncation import truncation_study
from projkin.integrators import (FORWARD_EULER, MIDPOINT_RK2, RK4, BlowUpError, ButcherTableau, PIConfig,
                                 prk_step, run)
from projkin.roots import residuals
from projkin.spectral import FourierSymbol, inner_spectrum
from projkin.stability import (R1, R2, asymptotic_residual, boundary_prk2_asymptotic, boundary_prk4_asymptotic,
                               prk4_fast_quartic, prk4_slow_quartic, select_parameters, sigma_pfe, sigma_prk,
                               trace_region_exact)
from projkin.velocity_space import build_quadrature, moment

SEED = 20240611
THETAS = np.linspace(0.0, 2.0 * np.pi, 180, endpoint=False)


def _operator(problem, eps, **kw):
    cfg = build_config({}, dict(problem=problem, eps=eps, **kw))
    op = operator_for(cfg)
    return cfg, op, initial_condition(cfg.problem, op.grid, op.quadrature, cfg.T)


def _prk(problem, eps, K, dt, steps, tableau=RK4, **kw):
    cfg, op, f0 = _operator(problem, eps, k_inner=K, dt=dt, steps=steps, **kw)
    traj = run(f0, tableau, PIConfig(cfg.delta_t, K, dt, n_outer=steps), op, stride=steps)
    return op, f0, traj.states[-1]


# -- 1: one-step truncation order -------------------------------------------

def check_truncation_order():
    start = time.perf_counter()
    dts = np.logspace(np.log10(2e-3), np.log10(0.5), 13)
    slopes, plateaus, windows = {}, {}, {}
    for eps in (1e-2, 1e-3):
        _, op, f0 = _operator("linear", eps, dx=1e-2)
        f_start = exact_linear_solution(f0, op, 0.1)
        for tab in (RK4, MIDPOINT_RK2):
            rep = truncation_study(f_start, op, tab, eps ** 2, 3, dts)
            slopes[tab.name, eps] = rep.slope
            windows[tab.name, eps] = rep.fit_range
            if tab is RK4:
                plateaus[eps] = rep.plateau
    elapsed = time.perf_counter() - start
    ratio = plateaus[1e-2] / plateaus[1e-3]

    def inside(s, lo, hi):
        return s is not None and lo <= s <= hi

    ok = (all(inside(slopes["rk4", e], 3.5, 4.5) for e in (1e-2, 1e-3))
          and all(inside(slopes["rk2", e], 1.6, 2.4) for e in (1e-2, 1e-3))
          and 20 <= ratio <= 500 and elapsed <= 120)
    detail = (f"rk4 slopes {slopes['rk4', 1e-2]:.3f}/{slopes['rk4', 1e-3]:.3f}, "
              f"rk2 slopes {slopes['rk2', 1e-2]:.3f}/{slopes['rk2', 1e-3]:.3f} (eps 1e-2/1e-3), "
              f"plateau ratio {ratio:.1f}, rk4 fit windows "
              + ", ".join(f"[{a:.3g}, {b:.3g}]" for a, b in (windows["rk4", 1e-2], windows["rk4", 1e-3]))
              + f", {elapsed:.1f} s")
    return ok, detail


# -- 2: parameter selection as eps -> 0 --------------------------------------

def check_parameter_selection():
    eps, dx, J = 1e-6, 0.1, 20
    herm = build_quadrature("hermite", J)
    hyp = select_parameters(eps, 0, dx, UPWIND3, herm)
    target_hyp = min(3 * dx / (4 * np.dot(herm.weights, np.abs(herm.nodes))), 3 * dx / 8)
    rel_hyp = abs(hyp.Delta_t_max - target_hyp) / target_hyp

    leg = build_quadrature("legendre", J)
    par = select_parameters(eps, 1, dx, CENTRAL4, leg)
    target_par = min(9 * dx ** 2 / (8 * leg.d), 3 * dx / 4)

    checks = {
        "hyperbolic dt": rel_hyp <= 1e-3,
        "hyperbolic K": hyp.K_min == 2,
        "parabolic K": par.K_min == 3,
        "parabolic dt": par.Delta_t_max >= target_par * (1 - 1e-3),
    }
    failed = [k for k, v in checks.items() if not v]
    detail = (f"gamma=0 upwind3 Hermite: dt {hyp.Delta_t_max:.6g} vs {target_hyp:.6g} (rel {rel_hyp:.2g}), "
              f"K {hyp.K_min}; gamma=1 central4 Legendre: dt {par.Delta_t_max:.6g} vs >= {target_par:.6g}, "
              f"K {par.K_min}" + (f"; failed: {', '.join(failed)}" if failed else ""))
    return not failed, detail


# -- 3: inner-step spectrum localisation -------------------------------------

def _spectra(eps, zetas, q, dx=0.1):
    return [inner_spectrum(FourierSymbol.build(z, q, CENTRAL4, dx), eps, 1, eps ** 2) for z in zetas]


def check_spectrum_localisation():
    start = time.perf_counter()
    q = build_quadrature("legendre", 20)
    zetas = 2.0 * np.pi * np.arange(64) / 64
    problems = []
    worst_res = worst_fill = worst_fill_j = 0.0
    for eps in (1e-2, 1e-3):
        for zeta, rep in zip(zetas, _spectra(eps, zetas, q)):
            outside = np.abs(rep.eigenvalues) > 0.5
            if outside.sum() != 1 or not outside[0]:
                problems.append(f"eps={eps:g} zeta={zeta:.3f}: {outside.sum()} eigenvalues outside |z|=1/2")
                continue
            res = rep.expansion_residual / eps ** 2
            worst_res = max(worst_res, res)
            if res > 10:
                problems.append(f"eps={eps:g} zeta={zeta:.3f}: residual {res:.3g} eps^2")
            fill = rep.max_cluster_distance / (1.1 * rep.radius) if rep.radius > 0 else 0.0
            worst_fill = max(worst_fill, fill)
            worst_fill_j = max(worst_fill_j, fill * q.J)
            if fill > 1:
                problems.append(f"eps={eps:g} zeta={zeta:.3f}: cluster at {fill:.3g} of the inflated radius")
    fine = [r.expansion_residual / 1e-6 for r in _spectra(1e-3, zetas, q)]
    coarse = [r.expansion_residual / 4e-6 for r in _spectra(2e-3, zetas, q)]
    share = np.mean([a <= b for a, b in zip(fine, coarse)])
    if share < 0.9:
        problems.append(f"ratio test holds on {share:.0%} of zeta")
    elapsed = time.perf_counter() - start
    if elapsed > 60:
        problems.append(f"took {elapsed:.0f} s")
    detail = (f"max residual {worst_res:.3g} eps^2 (limit 10), cluster uses {worst_fill:.3g} of 1.1*radius "
              f"({worst_fill_j:.3g} if the radius carried 1/J), ratio test {share:.0%}, {elapsed:.1f} s")
    if problems:
        detail += "; " + "; ".join(problems[:3])
    return not problems, detail


# -- 4: stability inheritance, limiting disks, nesting -----------------------

def _pfe_stable_tau(r, Dt, dt, K):
    # half the draws near 1 (slow region), half in the small fast region
    z = dt / Dt
    while True:
        if r.uniform() < 0.5:
            tau = 1 + z * complex(r.uniform(-2.2, 0.2), r.uniform(-1.2, 1.2))
        else:
            rho = 1.5 * z ** (1 / K)
            tau = complex(r.uniform(-rho, rho), r.uniform(-rho, rho))
        if abs(sigma_pfe(tau, Dt, dt, K)) <= 1:
            return tau


def random_convex_tableau(r):
    """Explicit tableau with nonnegative coefficients, 0 < c_s <= 1 and sum(b) = 1."""
    S = int(r.integers(1, 5))
    A = np.zeros((S, S))
    for s in range(1, S):
        A[s, :s] = r.dirichlet(np.ones(s)) * r.uniform(0.1, 1.0)
    return ButcherTableau.from_lists(A, r.dirichlet(np.ones(S)), A.sum(axis=1), 1, f"convex{S}")


def check_stability_properties():
    r = np.random.default_rng(SEED)
    bad, worst = [], 1.0
    for _ in range(200):
        tab = random_convex_tableau(r)
        K = int(r.integers(1, 5))
        dt = 1e-3
        Dt = dt * r.uniform(100, 1000)
        tau = _pfe_stable_tau(r, Dt, dt, K)
        s = abs(sigma_prk(tau, tab, Dt, dt, K))
        worst = max(worst, s)
        if s > 1 + 1e-12:
            bad.append((tab, K, Dt, tau))

    K, dt, Dt = 3, 1e-6, 1e-3
    z = dt / Dt
    r1 = trace_region_exact(None, Dt, dt, K, R1, THETAS)
    r2 = trace_region_exact(None, Dt, dt, K, R2, THETAS)
    zk = z ** (1 / K)
    disk1 = float(np.max(np.abs(np.abs(r1.points - (1 - z)) - z))) / z
    disk2 = float(np.max(np.abs(np.abs(r2.points) - zk))) / zk ** 2
    disks_ok = not r1.flagged.any() and not r2.flagged.any() and disk1 <= 2 and disk2 <= 5

    nest = 0.0
    for which in (R1, R2):
        pts = trace_region_exact(FORWARD_EULER, Dt, dt, K, which, THETAS).points
        nest = max(nest, np.max(np.abs(sigma_prk(pts, MIDPOINT_RK2, Dt, dt, K))),
                   np.max(np.abs(sigma_prk(pts, RK4, Dt, dt, K))))
    pts = trace_region_exact(MIDPOINT_RK2, Dt, dt, K, R1, THETAS).points
    nest = max(nest, np.max(np.abs(sigma_prk(pts, RK4, Dt, dt, K))))
    nest_ok = nest <= 1 + 1e-10

    detail = (f"(a) {len(bad)}/200 random convex (tau, tableau) samples exceed 1 (worst |sigma| {worst:.4g}); "
              f"(b) R1 off the disk by {disk1:.3g} z (limit 2), R2 off the circle by {disk2:.3g} z^(2/K) "
              f"(limit 5); (c) max |sigma| on inner boundaries {nest:.12f}")
    if bad:
        tab, K, Dt, tau = bad[0]
        detail += (f"; first failure: S={tab.S} A={np.round(tab.A, 4).tolist()} b={np.round(tab.b, 4).tolist()} "
                   f"K={K} Delta_t={Dt:.4g} tau={tau:.6g}")
    return not bad and disks_ok and nest_ok, detail


# -- 5: boundary parametrisations --------------------------------------------

def check_parametrisations():
    z, K, dt = 1e-3, 3, 1e-6
    Dt = dt / z
    roots = 0.0
    C1 = (boundary_prk2_asymptotic(K, z, THETAS, R1).points - 1) / z
    e = np.exp(1j * THETAS)[:, None]
    roots = max(roots, float(np.max(np.abs(1 - e + C1 + C1 ** 2 / 2))))
    C2 = (boundary_prk2_asymptotic(K, z, THETAS, R2).points / z ** (1 / K)) ** (2 * K) / 2
    roots = max(roots, float(np.max(np.abs(C2 - e))))
    for method in ("companion", "ferrari"):
        x = (boundary_prk4_asymptotic(K, z, THETAS, R2, method).points / z ** (1 / K)) ** K
        C = (boundary_prk4_asymptotic(K, z, THETAS, R1, method).points - 1) / z
        for i, th in enumerate(THETAS):
            roots = max(roots, float(np.max(residuals(prk4_fast_quartic(np.exp(1j * th)), x[i]))),
                        float(np.max(residuals(prk4_slow_quartic(np.exp(1j * th)), C[i]))))
    tol = 10 * z ** min(1, 2 / K)
    subs = {}
    for tab, builder in ((MIDPOINT_RK2, boundary_prk2_asymptotic), (RK4, boundary_prk4_asymptotic)):
        for which in (R1, R2):
            subs[tab.name, which] = asymptotic_residual(builder(K, z, THETAS, which), tab, Dt, dt, K)
    over = [f"{n} {w}" for (n, w), v in subs.items() if v > tol]
    ok = roots <= 1e-10 and not over
    detail = (f"root residual {roots:.2g} (limit 1e-10); ||sigma|-1| " +
              ", ".join(f"{n} {w} {v:.3g}" for (n, w), v in subs.items()) + f" (limit {tol:.3g})")
    if over:
        detail += f"; over the limit: {', '.join(over)}"
    return ok, detail


# -- 6: long-term accuracy ----------------------------------------------------

def check_long_term_accuracy():
    start = time.perf_counter()
    op, f0, f = _prk("linear", 1e-2, 3, 1e-3, 1000)
    ref = reference_solver(f0, op, 1e-6, [1.0])[0]
    err = float(np.max(np.abs(op.density(f) - op.density(ref))))
    elapsed = time.perf_counter() - start

    op, f0, f = _prk("linear", 1e-3, 3, 1e-3, 1000)
    _, traj = limit_solver(moment(op.quadrature, f0), op.grid, op.quadrature.d, op.model, 1e-3, 1000)
    diff = float(np.max(np.abs(op.density(f) - traj[-1])))
    ok = err <= 1e-3 and elapsed <= 300 and diff <= 5e-2
    detail = (f"eps=1e-2 vs brute force at t=1: {err:.3g} (limit 1e-3, {elapsed:.0f} s); "
              f"eps=1e-3 vs limit equation: {diff:.3g} (band 5e-2)")
    return ok, detail


# -- 7: conservation -----------------------------------------------------------

def check_conservation():
    cfg, op, f0 = _operator("linear", 1e-3, k_inner=3)
    masses = []

    def keep(N, t, f):
        masses.append(float(np.sum(op.density(f))) * op.grid.dx)

    m0 = float(np.sum(op.density(f0))) * op.grid.dx
    run(f0, RK4, PIConfig(cfg.delta_t, 3, cfg.dt, n_outer=1000), op, stride=1000, callback=keep)
    drift = max(abs(m - m0) for m in masses) / abs(m0)
    return drift <= 1e-10, f"relative mass drift over 1000 steps {drift:.3g} (limit 1e-10)"


# -- 8: degenerate projection ----------------------------------------------------

def check_degenerate_projection():
    r = np.random.default_rng(SEED)
    cfg, op, _ = _operator("burgers", 1e-2)
    mismatches, cases = 0, 0
    for tab in (MIDPOINT_RK2, RK4):
        for K in (0, 1, 3, 5):
            for _ in range(3):
                f = r.uniform(0.0, 1.0, size=(op.grid.I, op.quadrature.J))
                dt = cfg.delta_t
                expect = f
                for _ in range(K + 1):
                    expect = expect + dt * op(expect)
                got = prk_step(f, tab, PIConfig(dt, K, (K + 1) * dt), op)
                cases += 1
                mismatches += not np.array_equal(got, expect)
    return mismatches == 0, f"{cases - mismatches}/{cases} random states bit-identical to K+1 inner steps"


# -- 9: Burgers and semiconductor -------------------------------------------------

def _centre(op, u):
    return float(np.sum(op.grid.x * u) / np.sum(u))


def semiconductor_run(eps, K, dt_ref, steps=500):
    """PRK4 against brute force; returns a dict of what happened."""
    cfg, op, f0 = _operator("semiconductor", eps, k_inner=K, steps=steps)
    out = {"eps": eps, "K": K, "drift_sign": op.model.drift_sign}
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            f = run(f0, RK4, PIConfig(cfg.delta_t, K, cfg.dt, n_outer=steps), op, stride=steps).states[-1]
        out["u"] = op.density(f)
    except BlowUpError as err:
        out["blowup"] = str(err)
    ref = op.density(reference_solver(f0, op, dt_ref, [steps * cfg.dt])[0])
    out["ref_centre"] = _centre(op, ref)
    if "u" in out:
        out["error"] = float(np.max(np.abs(out["u"] - ref)))
        out["rel_error"] = out["error"] / float(np.max(np.abs(ref)))
        out["centre"] = _centre(op, out["u"])
        out["ok"] = (out["error"] <= 1e-3 and bool(np.all(np.isfinite(out["u"])))
                     and np.sign(out["centre"]) == out["drift_sign"])
    else:
        out["ok"] = False
    return out


def _describe_semi(res):
    head = f"semiconductor eps={res['eps']:g} K={res['K']}: "
    if "blowup" in res:
        return head + f"PRK4 {res['blowup']} (reference centre {res['ref_centre']:+.3f})"
    return head + (f"error {res['error']:.3g} (relative {res['rel_error']:.2g}), centre {res['centre']:+.3f} "
                   f"vs drift sign {res['drift_sign']:+d}")


def check_burgers_semiconductor():
    # Burgers at the figure parameters with eps=1e-2
    op, f0, f = _prk("burgers", 1e-2, 3, 1e-3, 1000)
    ref = reference_solver(f0, op, 1e-6, [1.0])[0]
    u = op.density(f)
    burgers_err = float(np.max(np.abs(u - op.density(ref))))
    burgers_ok = burgers_err <= 1e-3 and bool(np.all(np.isfinite(u)))
    # semiconductor at eps=1e-2; no K stabilises the inner step there, K=3 as for the other runs
    semi = semiconductor_run(1e-2, 3, 1e-6)
    detail = f"burgers eps=1e-2: error {burgers_err:.3g} (limit 1e-3); " + _describe_semi(semi)
    return burgers_ok and semi["ok"], detail


CHECKS = {
    1: check_truncation_order,
    2: check_parameter_selection,
    3: check_spectrum_localisation,
    4: check_stability_properties,
    5: check_parametrisations,
    6: check_long_term_accuracy,
    7: check_conservation,
    8: check_degenerate_projection,
    9: check_burgers_semiconductor,
}


@pytest.mark.slow
@pytest.mark.parametrize("number", sorted(CHECKS))
def test_acceptance(number, report):
    ok, detail = CHECKS[number]()
    report(number, ok, detail)
    assert ok, detail


@pytest.mark.slow
def test_semiconductor_at_smaller_eps(capsys):
    # eps=2e-3 is the largest tried value at which the Hermite inner step is stable on dx=0.1
    sel = select_parameters(2e-3, 1, 0.1, CENTRAL4, build_quadrature("hermite", 20))
    res = semiconductor_run(2e-3, sel.K_min, 2e-3 ** 2 / 10)
    with capsys.disabled():
        print("\n" + _describe_semi(res))
    assert res["ok"], _describe_semi(res)


if __name__ == "__main__":
    for n, check in CHECKS.items():
        ok, detail = check()
        print(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}", flush=True)

"""Command-line front end.

    projkin run --problem linear --eps 1e-3 --dt 1e-3 --k-inner 3 --reference limit --out out/lin
    projkin truncation --eps 1e-2 --dx 1e-2 --k-inner 3 --delta-t 1e-4
    projkin select --eps 1e-6 --gamma 1 --dx 0.1
    projkin spectrum --eps 1e-2 --out out/spec
    projkin region --tableau rk4 --k-inner 3 --dt 1e-3 --delta-t 1e-6

Exit status: 0 on success, 2 when the configuration is refused, 1 when the
computation itself fails.
"""
import argparse
import os
import sys

import numpy as np

from .harness import output
from .harness.config import ValidationError, build_config, check_basic, read_config_file
from .harness.experiments import operator_for, run_experiment, run_truncation, write_region_file, \
    write_spectrum_file
from .stability import UnstablePairingError, select_parameters
from .velocity_space import build_quadrature

EXIT_OK, EXIT_FAILURE, EXIT_REFUSED = 0, 1, 2

# flag name -> config field
_OVERRIDES = {
    "problem": "problem", "eps": "eps", "gamma": "gamma", "dx": "dx", "dt": "dt",
    "k_inner": "k_inner", "delta_t": "delta_t", "J": "J", "quadrature": "quadrature",
    "stencil": "stencil", "tableau": "tableau", "steps": "steps", "T": "T",
    "reference": "reference", "dt_ref": "dt_ref", "snapshots": "snapshots",
    "phi_left": "phi_left", "phi_right": "phi_right", "out": "out",
}


def _common(p):
    p.add_argument("--config", help="key=value file; flags override its entries")
    p.add_argument("--problem", choices=["linear", "burgers", "semiconductor"])
    p.add_argument("--eps", type=float)
    p.add_argument("--gamma", type=int, choices=[0, 1])
    p.add_argument("--dx", type=float)
    p.add_argument("--dt", type=float, help="outer step")
    p.add_argument("--k-inner", dest="k_inner", type=int, help="K; K+1 inner steps per burst")
    p.add_argument("--delta-t", dest="delta_t", type=float, help="inner step (default eps^(gamma+1))")
    p.add_argument("--J", "--nv", dest="J", type=int, help="number of velocity nodes")
    p.add_argument("--quadrature", choices=["uniform", "legendre", "hermite"])
    p.add_argument("--stencil", choices=["central4", "upwind3"])
    p.add_argument("--tableau", choices=["pfe", "rk2", "rk4"])
    p.add_argument("--steps", type=int, help="number of outer steps")
    p.add_argument("--T", type=float, help="initial-condition temperature")
    p.add_argument("--reference", choices=["brute", "limit", "exact", "none"])
    p.add_argument("--dt-ref", dest="dt_ref", type=float)
    p.add_argument("--snapshots", type=lambda s: [int(v) for v in s.split(",") if v])
    p.add_argument("--phi-left", dest="phi_left", type=float)
    p.add_argument("--phi-right", dest="phi_right", type=float)
    p.add_argument("--out")
    p.add_argument("--force", action="store_true", help="run even outside the selected bounds")


def make_parser():
    parser = argparse.ArgumentParser(prog="projkin", description="Projective integration for kinetic BGK models")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="integrate one experiment and write its CSV files")
    _common(p)
    p.add_argument("--spectrum", action="store_true", help="also write the inner-step spectrum")
    p.add_argument("--region", action="store_true", help="also write the stability-region boundaries")

    p = sub.add_parser("truncation", help="one-step error sweep of the linear problem")
    _common(p)
    p.add_argument("--dt-min", type=float, default=2e-3)
    p.add_argument("--dt-max", type=float, default=0.5)
    p.add_argument("--n-dt", type=int, default=13)
    p.add_argument("--t0", type=float, default=0.1)

    p = sub.add_parser("spectrum", help="inner-step eigenvalues over a wavenumber grid")
    _common(p)
    p.add_argument("--n-zeta", type=int, default=64)

    p = sub.add_parser("region", help="stability-region boundaries of the projective step")
    _common(p)
    p.add_argument("--n-theta", type=int, default=180)

    p = sub.add_parser("select", help="largest outer step and smallest K for the given physics")
    _common(p)
    return parser


def config_from_args(args):
    file_values = read_config_file(args.config) if args.config else {}
    overrides = {field: getattr(args, flag) for flag, field in _OVERRIDES.items()}
    if args.force:
        overrides["force"] = True
    return build_config(file_values, overrides)


def _select(cfg):
    check_basic(cfg)
    q = build_quadrature(cfg.quadrature, cfg.J)
    sel = select_parameters(cfg.eps, cfg.gamma, cfg.dx, cfg.stencil, q)
    print(f"epsilon            {sel.epsilon!r}")
    print(f"gamma              {sel.gamma}")
    print(f"delta_t            {sel.delta_t!r}")
    print(f"Delta_t_max        {sel.Delta_t_max!r}")
    print(f"Delta_t_max_limit  {sel.Delta_t_max_limit!r}  (eps -> 0)")
    print(f"K_min              {sel.K_min}")
    for w in sel.warnings:
        print(f"warning: {w}")
    if cfg.out and cfg.out != "out":
        os.makedirs(cfg.out, exist_ok=True)
        output.write_summary(os.path.join(cfg.out, "summary.csv"), [sel])


def dispatch(args):
    cfg = config_from_args(args)
    if args.command == "select":
        _select(cfg)
    elif args.command == "run":
        res = run_experiment(cfg, spectrum=args.spectrum, region=args.region)
        for note in res.notes:
            print(f"note: {note}")
        for N, t, e_ref, e_lim in res.errors:
            parts = [f"N={N}", f"t={t:.6g}"]
            if e_ref is not None:
                parts.append(f"error_ref={e_ref:.3e}")
            if e_lim is not None:
                parts.append(f"error_limit={e_lim:.3e}")
            print("  ".join(parts))
        print(f"wrote {len(res.files)} files to {res.out_dir}")
    elif args.command == "truncation":
        check_basic(cfg)
        if cfg.k_inner is None:
            cfg.k_inner = 3
        dts = np.logspace(np.log10(args.dt_min), np.log10(args.dt_max), args.n_dt)
        reports, files = run_truncation(cfg, dts, t0=args.t0)
        for name, rep in reports.items():
            slope = "n/a" if rep.slope is None else f"{rep.slope:.3f}"
            print(f"{name}: slope {slope}  plateau {rep.plateau:.3e}  {'; '.join(rep.notes)}")
    elif args.command == "spectrum":
        check_basic(cfg)
        print(write_spectrum_file(cfg, operator_for(cfg), args.n_zeta))
    elif args.command == "region":
        check_basic(cfg)
        if cfg.k_inner is None:
            raise ValidationError("region tracing needs --k-inner")
        os.makedirs(cfg.out, exist_ok=True)
        print(write_region_file(cfg, args.n_theta))


def main(argv=None):
    args = make_parser().parse_args(argv)
    try:
        dispatch(args)
    except (ValidationError, UnstablePairingError) as err:
        print(f"refused: {err}", file=sys.stderr)
        return EXIT_REFUSED
    except Exception as err:  # report, don't trace, runtime failures
        print(f"error: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

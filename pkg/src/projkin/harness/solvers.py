"""Reference solutions: brute-force inner stepping, the exact semi-discrete flow
for linear periodic runs, and the macroscopic limit equation."""
import warnings

import numpy as np
from scipy.linalg import expm

from ..discretization import PERIODIC, SemiDiscreteOperator, dx_central4
from ..integrators import BlowUpError
from ..models import FluxFunction
from ..spectral import FourierSymbol

RK4_REAL_LIMIT = 2.78


def _record_indices(times, dt, label):
    steps = []
    for t in times:
        n = int(round(t / dt))
        if abs(n * dt - t) > 1e-9 * max(1.0, abs(t)):
            raise ValueError(f"{label}: time {t} is not a multiple of the step {dt}")
        steps.append(n)
    return steps


def reference_solver(f0, op, dt_ref: float, times):
    """Forward Euler with step dt_ref to each requested time (sorted ascending).

    Returns the list of states at ``times``.
    """
    targets = _record_indices(times, dt_ref, "reference")
    if any(b < a for a, b in zip(targets, targets[1:])):
        raise ValueError("times must be ascending")
    out = []
    f = np.array(f0, dtype=float)
    n = 0
    for target in targets:
        while n < target:
            f = f + dt_ref * op(f)
            n += 1
            if n % 1000 == 0 and not np.all(np.isfinite(f)):
                raise BlowUpError(f"reference run blew up near t = {n * dt_ref:.6g}", n, n * dt_ref)
        if not np.all(np.isfinite(f)):
            raise BlowUpError(f"reference run blew up before t = {n * dt_ref:.6g}", n, n * dt_ref)
        out.append(f.copy())
    return out


def _check_linear_periodic(op: SemiDiscreteOperator):
    if op.grid.bc != PERIODIC:
        raise ValueError("the exact Fourier solution needs a periodic grid")
    if not (isinstance(op.model, FluxFunction) and op.model.kind == "linear"):
        raise ValueError("the exact Fourier solution needs the linear flux")


def _mode_generators(op):
    I = op.grid.I
    eps, gamma = op.scaling.epsilon, op.scaling.gamma
    for k in range(I):
        zeta = 2.0 * np.pi * k / I
        yield k, FourierSymbol.build(zeta, op.quadrature, op.stencil, op.grid.dx).generator(eps, gamma)


def exact_linear_solution(f0, op: SemiDiscreteOperator, t: float):
    """Exact solution of the semi-discrete linear periodic system at time t.

    Each discrete Fourier mode evolves independently under its J x J generator,
    so the flow is exp(t*B_k) applied mode by mode.
    """
    _check_linear_periodic(op)
    F = np.fft.fft(np.asarray(f0, dtype=float), axis=0)
    out = np.empty_like(F)
    for k, B in _mode_generators(op):
        out[k] = expm(t * B) @ F[k]
    return np.fft.ifft(out, axis=0).real


def central4_symbol(zeta, dx):
    """Fourier symbol of the fourth-order central first derivative."""
    return 1j * (8.0 * np.sin(zeta) - np.sin(2.0 * zeta)) / (6.0 * dx)


def limit_rhs(u, grid, d: float, flux: FluxFunction):
    """-(A(u))_x + d u_xx with the central stencil, the second derivative as two first ones."""
    return -dx_central4(flux(u), grid) + d * dx_central4(dx_central4(u, grid), grid)


def limit_solver(u0, grid, d: float, flux: FluxFunction, Delta_t: float, n_steps: int, stride: int = 1,
                 diffusion_only=False):
    """Classical RK4 on u_t + A(u)_x = d u_xx.

    Returns (times, states) recorded every ``stride`` steps plus the last one.
    ``diffusion_only`` drops the advective flux, which isolates the diffusion
    symbol for testing.
    """
    u = np.array(u0, dtype=float)
    s1 = 8.233 / (6.0 * grid.dx)  # max |central4 symbol|
    speed = float(np.max(np.abs(flux.derivative(u)))) if not diffusion_only else 0.0
    reach = Delta_t * (d * s1 * s1 + speed * s1)
    if reach > RK4_REAL_LIMIT:
        suggestion = RK4_REAL_LIMIT / (d * s1 * s1 + speed * s1)
        warnings.warn(f"limit solver step {Delta_t:.3g} violates the RK4 stability bound; "
                      f"use Delta_t <= {suggestion:.3g}", RuntimeWarning, stacklevel=2)

    def F(w):
        if diffusion_only:
            return d * dx_central4(dx_central4(w, grid), grid)
        return limit_rhs(w, grid, d, flux)

    times, states = [0.0], [u.copy()]
    for n in range(1, n_steps + 1):
        k1 = F(u)
        k2 = F(u + 0.5 * Delta_t * k1)
        k3 = F(u + 0.5 * Delta_t * k2)
        k4 = F(u + Delta_t * k3)
        u = u + Delta_t / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        if n % stride == 0 or n == n_steps:
            if not np.all(np.isfinite(u)):
                raise BlowUpError(f"limit solver blew up at step {n}", n, n * Delta_t)
            times.append(n * Delta_t)
            states.append(u.copy())
    return times, states

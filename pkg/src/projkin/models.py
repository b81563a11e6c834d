"""Kinetic model problems: scaling, flux, equilibrium and the field coupling."""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .linalg import solve_tridiagonal
from .velocity_space import VelocityQuadrature

LINEAR = "linear"
BURGERS = "burgers"


@dataclass(frozen=True)
class Scaling:
    """gamma = 0 is the hydrodynamic scaling, gamma = 1 the diffusive one."""

    gamma: int
    epsilon: float

    def __post_init__(self):
        if self.gamma not in (0, 1):
            raise ValueError(f"gamma must be 0 or 1, got {self.gamma!r}")
        if not (self.epsilon > 0 and np.isfinite(self.epsilon)):
            raise ValueError(f"epsilon must be positive and finite, got {self.epsilon!r}")

    @property
    def transport_scale(self) -> float:
        # eps^gamma, the factor dividing the transport term
        return self.epsilon ** self.gamma

    @property
    def relaxation_time(self) -> float:
        # eps^(gamma+1), the collision time and the natural inner step
        return self.epsilon ** (self.gamma + 1)


@dataclass(frozen=True)
class FluxFunction:
    kind: str

    def __post_init__(self):
        if self.kind not in (LINEAR, BURGERS):
            raise ValueError(f"unknown flux {self.kind!r}")

    def __call__(self, u):
        return u if self.kind == LINEAR else u * u

    def derivative(self, u):
        return np.ones_like(np.asarray(u, dtype=float)) if self.kind == LINEAR else 2.0 * u


LINEAR_FLUX = FluxFunction(LINEAR)
BURGERS_FLUX = FluxFunction(BURGERS)


@dataclass(frozen=True)
class SemiconductorProblem:
    """Drift-diffusion test case: relaxation towards u, force from a Poisson potential.

    The left potential value defaults to -2; its sign decides the drift direction
    (the limit u_t = u_xx + F u_x moves mass towards the higher potential).
    """

    phi_left: float = -2.0
    phi_right: float = 0.0
    temperature: float = 1e-2

    def __post_init__(self):
        if not (np.isfinite(self.phi_left) and np.isfinite(self.phi_right)):
            raise ValueError("potential boundary values must be finite")
        if not self.temperature > 0:
            raise ValueError("temperature must be positive")

    @property
    def drift_sign(self) -> int:
        """+1 if mass moves towards larger x, -1 towards smaller x, 0 if no field."""
        # F = -phi_x ~ (phi_left - phi_right)/L, and u_t = u_xx + F u_x
        # transports with speed -F
        return int(np.sign(self.phi_right - self.phi_left))


def maxwellian(u, q: VelocityQuadrature, s: Scaling, flux: FluxFunction):
    """Equilibrium u + eps^gamma A(u)/v on the velocity nodes.

    Scalar u gives a J-vector; an array of densities gives shape (..., J).
    """
    u = np.asarray(u, dtype=float)
    return u[..., None] + s.transport_scale * np.asarray(flux(u))[..., None] / q.nodes


def poisson_solve(u, phi_left: float, phi_right: float, dx: float, layout: str = "node"):
    """Direct solve of the three-point discrete Poisson problem phi'' = u.

    ``layout="node"``: the grid points include both endpoints, which carry the
    Dirichlet values; u is used at the interior points only.
    ``layout="cell"``: u and phi live at cell centres, the Dirichlet values sit
    on the outer faces and enter through linearly extrapolated ghost values.
    """
    u = np.asarray(u, dtype=float)
    n = u.size
    if n < 3:
        raise ValueError("need at least 3 grid points")
    h2 = dx * dx
    if layout == "node":
        m = n - 2
        rhs = h2 * u[1:-1].copy()
        rhs[0] -= phi_left
        rhs[-1] -= phi_right
        inner = solve_tridiagonal(np.ones(m - 1), np.full(m, -2.0), np.ones(m - 1), rhs)
        return np.concatenate([[phi_left], inner, [phi_right]])
    if layout == "cell":
        diag = np.full(n, -2.0)
        diag[0] = diag[-1] = -3.0
        rhs = h2 * u.copy()
        rhs[0] -= 2.0 * phi_left
        rhs[-1] -= 2.0 * phi_right
        return solve_tridiagonal(np.ones(n - 1), diag, np.ones(n - 1), rhs)
    raise ValueError(f"unknown layout {layout!r}")


@lru_cache(maxsize=32)
def _cell_poisson_inverse(n):
    # columns are tridiagonal solves against unit vectors (unit dx, zero boundary data)
    diag = np.full(n, -2.0)
    diag[0] = diag[-1] = -3.0
    off = np.ones(n - 1)
    cols = [solve_tridiagonal(off, diag, off, e) for e in np.eye(n)]
    inv = np.array(cols).T
    inv.setflags(write=False)
    return inv


def poisson_solve_cell_fast(u, phi_left: float, phi_right: float, dx: float):
    """Same result as poisson_solve(..., layout="cell") via a cached inverse."""
    u = np.asarray(u, dtype=float)
    rhs = dx * dx * u
    rhs[0] -= 2.0 * phi_left
    rhs[-1] -= 2.0 * phi_right
    return _cell_poisson_inverse(u.size) @ rhs


def force_field(phi, dx: float):
    """F = -dphi/dx: central differences inside, one-sided second order at the ends."""
    phi = np.asarray(phi, dtype=float)
    if phi.size < 3:
        raise ValueError("need at least 3 grid points")
    grad = np.empty_like(phi)
    grad[1:-1] = (phi[2:] - phi[:-2]) / (2.0 * dx)
    grad[0] = (-3.0 * phi[0] + 4.0 * phi[1] - phi[2]) / (2.0 * dx)
    grad[-1] = (3.0 * phi[-1] - 4.0 * phi[-2] + phi[-3]) / (2.0 * dx)
    return -grad

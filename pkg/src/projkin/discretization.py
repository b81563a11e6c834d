"""Space-velocity grids, finite-difference stencils and the semi-discrete operator."""
from dataclasses import dataclass

import numpy as np

from .models import (FluxFunction, Scaling, SemiconductorProblem, force_field,
                     maxwellian, poisson_solve_cell_fast)
from .velocity_space import VelocityQuadrature, moment

PERIODIC = "periodic"
NEUMANN = "neumann"

CENTRAL4 = "central4"
UPWIND3 = "upwind3"
STENCILS = (CENTRAL4, UPWIND3)


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform 1D grid.

    Periodic grids hold x_i = left + i*dx, i = 0..I-1; Neumann grids hold the
    cell centres left + (i + 1/2)*dx.  In both cases I*dx is the domain length.
    """

    I: int
    dx: float
    x: np.ndarray
    bc: str

    @property
    def length(self) -> float:
        return self.I * self.dx


def make_grid(I: int, bc: str = PERIODIC, left: float = -1.0, length: float = 2.0) -> SpatialGrid:
    if I < 1:
        raise ValueError("I must be positive")
    dx = length / I
    if bc == PERIODIC:
        x = left + dx * np.arange(I)
    elif bc == NEUMANN:
        x = left + dx * (np.arange(I) + 0.5)
    else:
        raise ValueError(f"unknown boundary condition {bc!r}")
    x.setflags(write=False)
    return SpatialGrid(I, dx, x, bc)


def grid_from_dx(dx: float, bc: str = PERIODIC, left: float = -1.0, length: float = 2.0) -> SpatialGrid:
    I = int(round(length / dx))
    if I < 1 or abs(I * dx - length) > 1e-9 * length:
        raise ValueError(f"dx={dx} does not divide the domain length {length}")
    return make_grid(I, bc, left, length)


@dataclass
class KineticState:
    """Distribution values f[i, j] on the space-velocity grid."""

    f: np.ndarray
    quadrature: VelocityQuadrature

    def __post_init__(self):
        self.f = np.asarray(self.f, dtype=float)
        if self.f.ndim != 2 or self.f.shape[1] != self.quadrature.J:
            raise ValueError(f"f has shape {self.f.shape}, expected (I, {self.quadrature.J})")
        if not np.all(np.isfinite(self.f)):
            raise ValueError("distribution contains non-finite values")

    @property
    def density(self):
        return moment(self.quadrature, self.f)


def _padded(g, grid: SpatialGrid, width: int):
    # ghost cells along axis 0: wrap for periodic, even reflection for Neumann
    if grid.bc == PERIODIC:
        return np.concatenate([g[-width:], g, g[:width]], axis=0)
    return np.concatenate([g[width - 1::-1], g, g[:-width - 1:-1]], axis=0)


def dx_central4(g, grid: SpatialGrid):
    """(-g[i+2] + 8g[i+1] - 8g[i-1] + g[i-2]) / (12 dx) along the first axis."""
    g = np.asarray(g, dtype=float)
    if g.shape[0] < 5:
        raise ValueError("the fourth-order central stencil needs at least 5 points")
    p = _padded(g, grid, 2)
    n = g.shape[0]
    return (-p[4:n + 4] + 8.0 * p[3:n + 3] - 8.0 * p[1:n + 1] + p[0:n]) / (12.0 * grid.dx)


def dx_upwind3(g, grid: SpatialGrid, v_sign):
    """Third-order upwind-biased derivative along the first axis.

    ``v_sign`` is a scalar or one sign per trailing column.  For positive
    velocity the stencil is (2g[i+1] + 3g[i] - 6g[i-1] + g[i-2]) / (6 dx); the
    negative branch is its mirror image.
    """
    g = np.asarray(g, dtype=float)
    if g.shape[0] < 4:
        raise ValueError("the third-order upwind stencil needs at least 4 points")
    sign = np.sign(np.asarray(v_sign, dtype=float))
    if np.any(sign == 0):
        raise ValueError("upwinding needs a nonzero velocity sign")
    p = _padded(g, grid, 2)
    n = g.shape[0]
    m2, m1, c, p1, p2 = (p[k:n + k] for k in range(5))
    fwd = (2.0 * p1 + 3.0 * c - 6.0 * m1 + m2) / (6.0 * grid.dx)
    bwd = (-p2 + 6.0 * p1 - 3.0 * c - 2.0 * m1) / (6.0 * grid.dx)
    return np.where(sign > 0, fwd, bwd)


def dv_nonuniform2(g, nodes, boundary: str = "onesided"):
    """First derivative along the last axis on non-equispaced nodes, second-order accurate.

    Interior points use the three-point Lagrange stencil.  At the two end nodes
    ``boundary="onesided"`` uses the one-sided three-point stencil, while
    ``boundary="noflux"`` sets the derivative to zero so that nothing is
    advected through the ends of the velocity range.
    """
    g = np.asarray(g, dtype=float)
    v = np.asarray(nodes, dtype=float)
    J = v.size
    if J < 3:
        raise ValueError("need at least 3 velocity nodes")
    h = np.diff(v)
    if np.any(h <= 0):
        raise ValueError("velocity nodes must be strictly increasing")
    hl, hr = h[:-1], h[1:]
    out = np.empty_like(g)
    # written in differences so that constants give exactly zero
    mid = g[..., 1:-1]
    out[..., 1:-1] = (hr / (hl * (hl + hr)) * (mid - g[..., :-2])
                      + hl / (hr * (hl + hr)) * (g[..., 2:] - mid))
    if boundary == "noflux":
        out[..., 0] = 0.0
        out[..., -1] = 0.0
    elif boundary == "onesided":
        a, b = h[0], h[1]
        out[..., 0] = ((a + b) / (a * b) * (g[..., 1] - g[..., 0])
                       - a / (b * (a + b)) * (g[..., 2] - g[..., 0]))
        a, b = h[-1], h[-2]
        out[..., -1] = ((a + b) / (a * b) * (g[..., -1] - g[..., -2])
                        - a / (b * (a + b)) * (g[..., -1] - g[..., -3]))
    else:
        raise ValueError(f"unknown velocity boundary treatment {boundary!r}")
    return out


def transport(f, grid: SpatialGrid, quadrature: VelocityQuadrature, stencil: str):
    """v * df/dx with the chosen stencil, as an (I, J) array."""
    v = quadrature.nodes
    if stencil == CENTRAL4:
        return v * dx_central4(f, grid)
    if stencil == UPWIND3:
        return v * dx_upwind3(f, grid, v)
    raise ValueError(f"unknown stencil {stencil!r}")


def rhs(f, model, scaling: Scaling, grid: SpatialGrid, quadrature: VelocityQuadrature,
        stencil: str = CENTRAL4):
    """Right-hand side of the semi-discrete kinetic equation.

    ``model`` is a FluxFunction (BGK relaxation towards u + eps^gamma A(u)/v)
    or a SemiconductorProblem (relaxation towards u plus the field term).
    """
    f = np.asarray(f, dtype=float)
    u = moment(quadrature, f)
    out = -transport(f, grid, quadrature, stencil)
    if isinstance(model, SemiconductorProblem):
        phi = poisson_solve_cell_fast(u, model.phi_left, model.phi_right, grid.dx)
        force = force_field(phi, grid.dx)
        out -= force[:, None] * dv_nonuniform2(f, quadrature.nodes, boundary="noflux")
        eq = np.broadcast_to(u[:, None], f.shape)
    elif isinstance(model, FluxFunction):
        eq = maxwellian(u, quadrature, scaling, model)
    else:
        raise TypeError(f"unsupported model {model!r}")
    return out / scaling.transport_scale + (eq - f) / scaling.relaxation_time


@dataclass(frozen=True)
class SemiDiscreteOperator:
    """Bundles everything rhs needs into a callable f -> D_t(f)."""

    model: object
    scaling: Scaling
    grid: SpatialGrid
    quadrature: VelocityQuadrature
    stencil: str = CENTRAL4

    def __call__(self, f):
        return rhs(f, self.model, self.scaling, self.grid, self.quadrature, self.stencil)

    def density(self, f):
        return moment(self.quadrature, f)

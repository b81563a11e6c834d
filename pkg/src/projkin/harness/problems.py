"""Initial conditions and operator assembly for the three test problems."""
import numpy as np

from ..discretization import CENTRAL4, NEUMANN, PERIODIC, SemiDiscreteOperator, make_grid
from ..models import BURGERS_FLUX, LINEAR_FLUX, Scaling, SemiconductorProblem
from ..velocity_space import VelocityQuadrature, build_quadrature

LINEAR = "linear"
BURGERS = "burgers"
SEMICONDUCTOR = "semiconductor"
PROBLEMS = (LINEAR, BURGERS, SEMICONDUCTOR)

DEFAULT_BC = {LINEAR: PERIODIC, BURGERS: NEUMANN, SEMICONDUCTOR: NEUMANN}
DEFAULT_QUADRATURE = {LINEAR: "legendre", BURGERS: "legendre", SEMICONDUCTOR: "hermite"}


def initial_condition(problem: str, grid, quadrature: VelocityQuadrature, T: float):
    """Initial distribution f[i, j].

    linear:  exp(-v^2 sin(pi x) / T) / sum(w)
    burgers and semiconductor:  exp(-v^2 / T) exp(-x^2 / 0.1) / sum(w)
    """
    if not T > 0:
        raise ValueError("T must be positive")
    x = grid.x[:, None]
    v = quadrature.nodes[None, :]
    mass = quadrature.weights.sum()
    if problem == LINEAR:
        return np.exp(-v * v * np.sin(np.pi * x) / T) / mass
    if problem in (BURGERS, SEMICONDUCTOR):
        return np.exp(-v * v / T) * np.exp(-x * x / 0.1) / mass
    raise ValueError(f"unknown problem {problem!r}")


def build_operator(problem: str, eps: float, gamma: int, dx: float, J: int = 20, quadrature_kind=None,
                   stencil: str = CENTRAL4, bc=None, phi_left=-2.0, phi_right=0.0, T=1e-2,
                   quadrature=None):
    """Semi-discrete operator for a named problem on [-1, 1]."""
    if problem not in PROBLEMS:
        raise ValueError(f"unknown problem {problem!r}; choose from {PROBLEMS}")
    if quadrature is None:
        quadrature = build_quadrature(quadrature_kind or DEFAULT_QUADRATURE[problem], J)
    I = int(round(2.0 / dx))
    if I < 5 or abs(I * dx - 2.0) > 1e-9:
        raise ValueError(f"dx = {dx} must divide the domain length 2 into at least 5 cells")
    grid = make_grid(I, bc or DEFAULT_BC[problem])
    if problem == SEMICONDUCTOR:
        model = SemiconductorProblem(phi_left, phi_right, T)
    else:
        model = LINEAR_FLUX if problem == LINEAR else BURGERS_FLUX
    return SemiDiscreteOperator(model, Scaling(gamma, eps), grid, quadrature, stencil)

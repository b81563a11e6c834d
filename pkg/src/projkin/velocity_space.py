"""Odd-symmetric discrete velocity sets and the averages they define.

Every quadrature built here has an even number of nonzero nodes placed in
mirror pairs with equal weights, and total mass one.  Only the positive half
is ever computed; the negative half is its exact reflection, so odd moments
such as <v> and <1/v> vanish up to rounding.
"""
from dataclasses import dataclass

import numpy as np

from .linalg import ConvergenceError, eigvals

UNIFORM = "uniform"
LEGENDRE = "legendre"
HERMITE = "hermite"
KINDS = (UNIFORM, LEGENDRE, HERMITE)

NEWTON_TOL = 1e-14
NEWTON_MAXITER = 100


@dataclass(frozen=True)
class VelocityQuadrature:
    nodes: np.ndarray
    weights: np.ndarray
    kind: str
    d: float

    @property
    def J(self) -> int:
        return self.nodes.size

    def mirror_index(self):
        """Index j' with v[j'] = -v[j] (nodes are sorted ascending)."""
        return np.arange(self.J)[::-1]


def moment(q: VelocityQuadrature, h) -> float:
    """Weighted sum over the nodes.

    ``h`` is either a callable evaluated at the nodes or an array of samples.
    Arrays with extra leading axes are averaged over their last axis.
    """
    values = h(q.nodes) if callable(h) else np.asarray(h)
    if values.ndim <= 1:
        return float(np.dot(q.weights, values))
    return values @ q.weights


def _check_J(J):
    if isinstance(J, bool) or not isinstance(J, (int, np.integer)):
        raise ValueError(f"J must be an integer, got {J!r}")
    if J < 2 or J % 2:
        raise ValueError(f"J must be even and at least 2, got {J}")


def _assemble(positive, w_positive, kind):
    order = np.argsort(positive)
    p = np.asarray(positive, dtype=float)[order]
    wp = np.asarray(w_positive, dtype=float)[order]
    nodes = np.concatenate([-p[::-1], p])
    weights = np.concatenate([wp[::-1], wp])
    weights = weights / weights.sum()
    nodes.setflags(write=False)
    weights.setflags(write=False)
    proto = VelocityQuadrature(nodes, weights, kind, 0.0)
    return VelocityQuadrature(nodes, weights, kind, moment(proto, nodes ** 2))


def build_uniform_symmetric(J: int) -> VelocityQuadrature:
    """Equispaced midpoints of (-1, 1): v_j = (2j - J - 1)/J, w_j = 1/J."""
    _check_J(J)
    k = np.arange(1, J, 2)
    return _assemble(k / J, np.full(k.size, 1.0 / J), UNIFORM)


def _legendre(J, x):
    # P_J(x) and P_{J-1}(x) by the three-term recurrence
    p_prev, p = np.ones_like(x), x.copy()
    for n in range(1, J):
        p_prev, p = p, ((2 * n + 1) * x * p - n * p_prev) / (n + 1)
    return p, p_prev


def _hermite_orthonormal(J, x):
    # orthonormal probabilists' Hermite h_J, h_{J-1}, and sum_{n<J} h_n^2
    h_prev, h = np.zeros_like(x), np.ones_like(x)
    sq = np.zeros_like(x)
    for n in range(J):
        sq += h * h
        h_prev, h = h, (x * h - np.sqrt(n) * h_prev) / np.sqrt(n + 1)
    return h, h_prev, sq


def _jacobi_guess(offdiag):
    n = offdiag.size + 1
    T = np.diag(offdiag, 1) + np.diag(offdiag, -1)
    x = np.sort(eigvals(T).real)
    return x[x > 0] if n % 2 == 0 else x[x >= 0]


def _newton(x, step, label):
    x = x.copy()
    for it in range(NEWTON_MAXITER):
        dx = step(x)
        x -= dx
        if np.all(np.abs(dx) <= NEWTON_TOL * np.maximum(1.0, np.abs(x))):
            return x
    worst = float(np.max(np.abs(dx)))
    raise ConvergenceError(
        f"{label}: Newton iteration stalled after {NEWTON_MAXITER} steps (last update {worst:.3e})"
    )


def build_gauss_legendre(J: int) -> VelocityQuadrature:
    """Gauss-Legendre nodes on (-1, 1) with weights for the measure dv/2."""
    _check_J(J)
    k = np.arange(1, J)
    guess = _jacobi_guess(k / np.sqrt(4.0 * k * k - 1.0))

    def step(x):
        p, p_prev = _legendre(J, x)
        dp = J * (x * p - p_prev) / (x * x - 1.0)
        return p / dp

    x = _newton(guess, step, f"Gauss-Legendre J={J}")
    p, p_prev = _legendre(J, x)
    dp = J * (x * p - p_prev) / (x * x - 1.0)
    return _assemble(x, 1.0 / ((1.0 - x * x) * dp * dp), LEGENDRE)


def build_gauss_hermite(J: int) -> VelocityQuadrature:
    """Gauss-Hermite nodes for the standard normal measure."""
    _check_J(J)
    guess = _jacobi_guess(np.sqrt(np.arange(1, J, dtype=float)))

    def step(x):
        h, h_prev, _ = _hermite_orthonormal(J, x)
        return h / (np.sqrt(J) * h_prev)

    x = _newton(guess, step, f"Gauss-Hermite J={J}")
    _, _, sq = _hermite_orthonormal(J, x)
    return _assemble(x, 1.0 / sq, HERMITE)


_BUILDERS = {
    UNIFORM: build_uniform_symmetric,
    LEGENDRE: build_gauss_legendre,
    HERMITE: build_gauss_hermite,
}


def build_quadrature(kind: str, J: int) -> VelocityQuadrature:
    try:
        builder = _BUILDERS[kind]
    except KeyError:
        raise ValueError(f"unknown quadrature kind {kind!r}; choose from {KINDS}") from None
    return builder(J)

"""Fourier analysis of the semi-discrete kinetic operator.

For a single spatial mode exp(i*zeta*x/dx) the transport stencil becomes the
diagonal matrix diag(alpha_j + i*beta_j) over the velocity nodes.  The forward
Euler step with delta_t = eps^(gamma+1) then acts on the velocity vector as

    A = m w^T + eps*D,          m_j = 1 + eps^gamma / v_j,

and the generator of the semi-discrete flow is B = (A - I) / eps^(gamma+1).
Since A is a diagonal matrix plus a rank one term, its eigenvalues are the
roots of the secular equation  1 = sum_j w_j m_j / (lambda - eps*D_j).
"""
from dataclasses import dataclass

import numpy as np

from .discretization import CENTRAL4, UPWIND3
from .linalg import ConvergenceError, eigvals as dense_eigvals
from .velocity_space import VelocityQuadrature, moment

SECULAR = "secular"
DENSE = "dense"
ANALYTIC = "analytic"


def symbol_coefficients(zeta, quadrature: VelocityQuadrature, stencil: str, dx: float):
    """Real and imaginary parts (alpha, beta) of the transport symbol per velocity node."""
    if not dx > 0:
        raise ValueError("dx must be positive")
    v = quadrature.nodes
    odd = 8.0 * np.sin(zeta) - np.sin(2.0 * zeta)
    beta = -v * odd / (6.0 * dx)
    if stencil == CENTRAL4:
        alpha = np.zeros_like(v)
    elif stencil == UPWIND3:
        alpha = -np.abs(v) * (3.0 - 4.0 * np.cos(zeta) + np.cos(2.0 * zeta)) / (6.0 * dx)
    else:
        raise ValueError(f"unknown stencil {stencil!r}")
    return alpha, beta


@dataclass(frozen=True)
class FourierSymbol:
    zeta: float
    alpha: np.ndarray
    beta: np.ndarray
    quadrature: VelocityQuadrature

    @classmethod
    def build(cls, zeta, quadrature, stencil, dx):
        alpha, beta = symbol_coefficients(zeta, quadrature, stencil, dx)
        return cls(float(zeta), alpha, beta, quadrature)

    @property
    def D(self):
        return self.alpha + 1j * self.beta

    def equilibrium_vector(self, eps, gamma):
        return 1.0 + eps ** gamma / self.quadrature.nodes

    def fe_matrix(self, eps, gamma):
        """A = m w^T + eps*D: forward Euler with delta_t = eps^(gamma+1) on this mode."""
        m = self.equilibrium_vector(eps, gamma)
        return np.outer(m, self.quadrature.weights) + np.diag(eps * self.D)

    def generator(self, eps, gamma):
        """B = (A - I) / eps^(gamma+1)."""
        J = self.quadrature.J
        return (self.fe_matrix(eps, gamma) - np.eye(J)) / eps ** (gamma + 1)

    def secular(self, lam, eps, gamma):
        """1 - sum_j w_j m_j / (lam - eps*D_j)."""
        wm = self.quadrature.weights * self.equilibrium_vector(eps, gamma)
        lam = np.asarray(lam, dtype=complex)
        return 1.0 - np.sum(wm / (lam[..., None] - eps * self.D), axis=-1)

    def characteristic(self, lam, eps, gamma):
        """det(lam*I - A) in product-times-secular form."""
        lam = np.asarray(lam, dtype=complex)
        q = np.prod(lam[..., None] - eps * self.D, axis=-1)
        return q * self.secular(lam, eps, gamma)


@dataclass
class SpectrumReport:
    eigenvalues: np.ndarray
    dominant: complex
    method: str
    expansion: complex = None
    center: complex = 0.0
    radius: float = None
    flagged: str = ""

    # eigenvalues[0] is always the dominant one
    @property
    def cluster(self):
        return self.eigenvalues[1:]

    @property
    def max_cluster_distance(self) -> float:
        rest = self.cluster
        return float(np.max(np.abs(rest - self.center))) if rest.size else 0.0

    @property
    def expansion_residual(self) -> float:
        return abs(self.dominant - self.expansion) if self.expansion is not None else float("nan")


def dominant_expansion(symbol: FourierSymbol, eps: float, gamma: int) -> complex:
    """Second-order expansion in eps of the eigenvalue of A near 1.

    Obtained by inserting lambda = 1 + eps*l1 + eps^2*l2 into the secular
    equation and using <1/v> = 0:

        gamma = 1:  l1 = <D>,          l2 = <(D - <D>)^2> + <D/v>
        gamma = 0:  l1 = <D> + <D/v>,  l2 = <X^2> + <X^2/v>,  X = l1 - D
    """
    q = symbol.quadrature
    D = symbol.D
    v = q.nodes
    w = q.weights
    mD = np.dot(w, D)
    if gamma == 1:
        l1 = mD
        X = D - mD
        l2 = np.dot(w, X * X) + np.dot(w, D / v)
    elif gamma == 0:
        l1 = mD + np.dot(w, D / v)
        X = l1 - D
        l2 = np.dot(w, X * X) + np.dot(w, X * X / v)
    else:
        raise ValueError("gamma must be 0 or 1")
    return complex(1.0 + eps * l1 + eps * eps * l2)


def dominant_expansion_moments(symbol: FourierSymbol, eps: float, gamma: int) -> complex:
    """The same expansion written out in averages of alpha and beta.

    Re = 1 + eps<a> + eps^2 (<(<a>-a)^2> - <b^2> + [gamma=0] <b/v>^2)
    Im = [gamma=0] eps <b/v> + eps^2 ([gamma=0] <(<b/v>-b)(<a>-a)> + [gamma=1] <b/v>)

    Valid whenever <b> = 0 and the parity-odd covariances vanish, which holds
    for both stencils in this package.
    """
    q = symbol.quadrature
    a, b, v = symbol.alpha, symbol.beta, q.nodes
    ma = moment(q, a)
    pv = moment(q, b / v)
    hyp = 1.0 if gamma == 0 else 0.0
    par = 1.0 - hyp
    re = 1.0 + eps * ma + eps ** 2 * (moment(q, (ma - a) ** 2) - moment(q, b * b) + hyp * pv * pv)
    im = hyp * eps * pv + eps ** 2 * (hyp * moment(q, (pv - b) * (ma - a)) + par * pv)
    return complex(re, im)


def _aberth(symbol, eps, gamma, seeds, tol=1e-15, maxiter=200):
    wm = symbol.quadrature.weights * symbol.equilibrium_vector(eps, gamma)
    poles = eps * symbol.D
    z = np.array(seeds, dtype=complex)
    for _ in range(maxiter):
        diff = z[:, None] - poles[None, :]
        f = 1.0 - np.sum(wm / diff, axis=1)
        fp = np.sum(wm / diff ** 2, axis=1)
        # Newton correction p/p' for p = prod(z - pole) * f
        newton = f / (f * np.sum(1.0 / diff, axis=1) + fp)
        inter = z[:, None] - z[None, :]
        np.fill_diagonal(inter, 1.0)
        repulse = np.sum(1.0 / inter, axis=1) - 1.0
        step = newton / (1.0 - newton * repulse)
        z = z - step
        if not np.all(np.isfinite(z)):
            raise ConvergenceError("secular iteration produced non-finite values")
        if np.all(np.abs(step) <= tol * np.maximum(np.abs(z), 1.0)):
            return z
    raise ConvergenceError(f"secular iteration did not converge in {maxiter} steps")


def _distinct(values, rtol=1e-10):
    scale = max(np.max(np.abs(values)), 1e-300)
    gaps = np.abs(values[:, None] - values[None, :]) + np.eye(values.size) * scale
    return np.min(gaps) > rtol * scale


def eigenvalues(symbol: FourierSymbol, eps: float, gamma: int, method: str = SECULAR) -> SpectrumReport:
    """All J eigenvalues of A = m w^T + eps*D, with the one near 1 singled out.

    The secular route falls back to the dense QR solver when the diagonal
    entries are not pairwise distinct or the iteration fails; the report's
    ``flagged`` field says why.
    """
    J = symbol.quadrature.J
    D = symbol.D
    expansion = dominant_expansion(symbol, eps, gamma)
    flagged = ""
    if np.all(D == D[0]):
        # rank one plus a multiple of the identity; <m> = 1 + eps^gamma <1/v> is
        # exactly 1 for a paired velocity set, so skip the rounding of the sum
        shift = eps * D[0]
        lam = np.full(J, shift, dtype=complex)
        lam[0] = shift + 1.0
        return SpectrumReport(lam, lam[0], ANALYTIC, expansion)
    lam = None
    if method == SECULAR:
        if _distinct(eps * D):
            poles = eps * D
            offset = 1e-3 * np.max(np.abs(poles)) * np.exp(0.7j)
            order = np.argsort(np.abs(poles))
            seeds = np.concatenate([[expansion], poles[order[1:]] + offset])
            try:
                lam = _aberth(symbol, eps, gamma, seeds)
            except ConvergenceError as err:
                flagged = f"secular solve failed ({err}); dense fallback"
        else:
            flagged = "coincident diagonal entries; dense solve only"
        used = SECULAR if lam is not None else DENSE
    elif method == DENSE:
        used = DENSE
    else:
        raise ValueError(f"unknown method {method!r}")
    if lam is None:
        lam = dense_eigvals(symbol.fe_matrix(eps, gamma))
    k = int(np.argmin(np.abs(lam - 1.0)))
    lam = np.concatenate([[lam[k]], np.delete(lam, k)])
    return SpectrumReport(lam, lam[0], used, expansion, flagged=flagged)


def cluster_radius(symbol: FourierSymbol, eps: float, gamma: int, delta_t: float) -> float:
    """Radius of the disk holding the fast eigenvalues of the inner step.

    The fast eigenvalues of A sit within eps*max_j(|alpha_j|+|beta_j|) of the
    origin; the affine map to the inner step scales this by delta_t/eps^(gamma+1).
    """
    return delta_t / eps ** gamma * float(np.max(np.abs(symbol.alpha) + np.abs(symbol.beta)))


def inner_spectrum(symbol: FourierSymbol, eps: float, gamma: int, delta_t: float,
                   method: str = SECULAR) -> SpectrumReport:
    """Eigenvalues of one forward Euler step of size delta_t on this mode.

    S = (1 - h) I + h A with h = delta_t / eps^(gamma+1).
    """
    if not delta_t > 0:
        raise ValueError("delta_t must be positive")
    rep = eigenvalues(symbol, eps, gamma, method)
    h = delta_t / eps ** (gamma + 1)
    if h == 1.0:
        lam = rep.eigenvalues.copy()
    else:
        lam = (1.0 - h) + h * rep.eigenvalues
    return SpectrumReport(
        eigenvalues=lam,
        dominant=lam[0],
        method=rep.method,
        expansion=(1.0 - h) + h * rep.expansion if h != 1.0 else rep.expansion,
        center=1.0 - h,
        radius=cluster_radius(symbol, eps, gamma, delta_t),
        flagged=rep.flagged,
    )


def spectrum_sweep(quadrature, stencil, dx, eps, gamma, delta_t, zetas, method=SECULAR):
    """Inner-step spectra over a list of wavenumbers."""
    return [inner_spectrum(FourierSymbol.build(z, quadrature, stencil, dx), eps, gamma, delta_t, method)
            for z in zetas]

"""Linear stability of projective integration.

On the scalar test equation y' = lambda*y the inner forward Euler step is a
multiplication by tau = 1 + lambda*delta_t, and one projective step is a
multiplication by sigma(tau).  A method is stable for a mode when |sigma| <= 1.
For Delta_t >> delta_t, the stable set splits into a region R1 around tau = 1
(slow modes, integrated accurately) and a region R2 around tau = 0 (fast
modes, damped by the inner steps).

This module evaluates sigma, traces both regions, provides their first-order
asymptotic boundary curves, and turns the spectral picture of the kinetic
operator into admissible (delta_t, Delta_t, K).
"""
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .discretization import CENTRAL4, UPWIND3
from .integrators import ButcherTableau
from .roots import companion_roots, ferrari_roots
from .spectral import symbol_coefficients
from .velocity_space import VelocityQuadrature, moment

R1 = "R1"
R2 = "R2"
EXACT = "exact"
ASYMPTOTIC = "asymptotic"


def _projection(c, Delta_t, delta_t, K):
    # (c*Delta_t - (K+1)*delta_t) / delta_t
    return (c * Delta_t - (K + 1) * delta_t) / delta_t


@dataclass(frozen=True)
class AmplificationQuery:
    tau: complex
    Delta_t: float
    delta_t: float
    K: int
    tableau: ButcherTableau = None

    def __post_init__(self):
        if not (self.delta_t > 0 and self.Delta_t > 0):
            raise ValueError("step sizes must be positive")
        if (self.K + 1) * self.delta_t > self.Delta_t:
            raise ValueError("(K+1)*delta_t must not exceed Delta_t")

    def sigma(self):
        if self.tableau is None:
            return sigma_pfe(self.tau, self.Delta_t, self.delta_t, self.K)
        return sigma_prk(self.tau, self.tableau, self.Delta_t, self.delta_t, self.K)


def sigma_pfe(tau, Delta_t, delta_t, K):
    """Amplification factor of projective forward Euler."""
    tau = np.asarray(tau, dtype=complex)
    M = _projection(1.0, Delta_t, delta_t, K)
    out = ((M + 1.0) * tau - M) * tau ** K
    return complex(out) if out.ndim == 0 else out


def stage_slopes(tau, tableau: ButcherTableau, Delta_t, delta_t, K):
    """kappa_s * delta_t for every stage, by the stage recursion (shape S x tau.shape)."""
    tau = np.asarray(tau, dtype=complex)
    w = tau ** (K + 1) - tau ** K
    top = tau ** (K + 1)
    ys = [w]
    for s in range(1, tableau.S):
        cs = tableau.c[s]
        Ms = _projection(cs, Delta_t, delta_t, K)
        inner = sum(tableau.A[s, l] / cs * ys[l] for l in range(s))
        ys.append(w * (top + Ms * inner))
    return np.array(ys)


def sigma_prk(tau, tableau: ButcherTableau, Delta_t, delta_t, K):
    """Amplification factor of a projective Runge-Kutta method (stage recursion)."""
    tau = np.asarray(tau, dtype=complex)
    ys = stage_slopes(tau, tableau, Delta_t, delta_t, K)
    M = _projection(1.0, Delta_t, delta_t, K)
    out = tau ** (K + 1) + M * np.tensordot(tableau.b, ys, axes=1)
    return complex(out) if out.ndim == 0 else out


def sigma_prk_series(tau, tableau: ButcherTableau, Delta_t, delta_t, K):
    """Same factor from the closed form as a finite power series in w = tau^K (tau - 1).

    With Abar = diag(M_s / c_s) A and g = (1, tau^(K+1), ..., tau^(K+1)),
    sigma = tau^(K+1) + M w b^T sum_{j<S} w^j Abar^j g.
    """
    tau = complex(tau)
    S = tableau.S
    c = tableau.c
    scale = np.zeros(S)
    scale[1:] = _projection(c[1:], Delta_t, delta_t, K) / c[1:]
    Abar = scale[:, None] * tableau.A
    w = tau ** K * (tau - 1.0)
    g = np.full(S, tau ** (K + 1), dtype=complex)
    g[0] = 1.0
    total = np.zeros(S, dtype=complex)
    term = g
    for j in range(S):
        total += term
        term = w * (Abar @ term)
    M = _projection(1.0, Delta_t, delta_t, K)
    return complex(tau ** (K + 1) + M * w * np.dot(tableau.b, total))


def amplification(tableau, Delta_t, delta_t, K):
    """tau -> sigma(tau) for a tableau (None or a one-stage tableau means PFE)."""
    if tableau is None or tableau.S == 1:
        return lambda tau: sigma_pfe(tau, Delta_t, delta_t, K)
    return lambda tau: sigma_prk(tau, tableau, Delta_t, delta_t, K)


@dataclass
class StabilityRegion:
    """Boundary samples tau(theta); for asymptotic curves each theta has several branches."""

    thetas: np.ndarray
    points: np.ndarray
    region: str
    method: str
    abs_sigma: np.ndarray = None
    flagged: np.ndarray = None
    z: float = None
    K: int = None

    def rows(self):
        """(theta, tau, |sigma|) for every valid point, flattened over branches."""
        pts = self.points.reshape(self.thetas.size, -1)
        sig = None if self.abs_sigma is None else self.abs_sigma.reshape(self.thetas.size, -1)
        bad = None if self.flagged is None else self.flagged.reshape(self.thetas.size, -1)
        for i, th in enumerate(self.thetas):
            for k in range(pts.shape[1]):
                if bad is not None and bad[i, k]:
                    continue
                yield th, pts[i, k], (np.nan if sig is None else sig[i, k])


def _boundary_on_ray(sig, origin, direction, rho_max, n_scan=400, tol=1e-10):
    rho = np.linspace(0.0, rho_max, n_scan + 1)
    vals = np.abs(sig(origin + rho * direction)) - 1.0
    outside = np.nonzero(vals > 0)[0]
    if outside.size == 0 or outside[0] == 0:
        return None
    k = outside[0]
    lo, hi = rho[k - 1], rho[k]
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if abs(sig(origin + mid * direction)) > 1.0:
            hi = mid
        else:
            lo = mid
    # pick whichever bracket end has the smaller residual
    cand = [origin + lo * direction, origin + hi * direction]
    res = [abs(abs(sig(t)) - 1.0) for t in cand]
    best = int(np.argmin(res))
    return cand[best] if res[best] <= tol else None


def trace_region_exact(tableau, Delta_t, delta_t, K, which, thetas, n_scan=400, tol=1e-10):
    """Trace |sigma(tau)| = 1 along rays.

    R1 rays start at 1 - z (z = delta_t/Delta_t) and extend to 6z; R2 rays start
    at the origin and extend to 4 z^(1/K).  The first sign change of
    |sigma| - 1 is refined by bisection.  Rays without a crossing, or whose
    refined point misses the residual tolerance, are flagged and left as NaN.
    """
    thetas = np.asarray(thetas, dtype=float)
    z = delta_t / Delta_t
    sig = amplification(tableau, Delta_t, delta_t, K)
    if which == R1:
        origin, rho_max = 1.0 - z, 6.0 * z
    elif which == R2:
        if K < 1:
            raise ValueError("the fast-mode region needs K >= 1")
        origin, rho_max = 0.0, 4.0 * z ** (1.0 / K)
    else:
        raise ValueError(f"unknown region {which!r}")
    pts = np.full(thetas.size, np.nan + 0j)
    flagged = np.zeros(thetas.size, dtype=bool)
    for i, th in enumerate(thetas):
        p = _boundary_on_ray(sig, origin, np.exp(1j * th), rho_max, n_scan, tol)
        if p is None:
            flagged[i] = True
        else:
            pts[i] = p
    abs_sigma = np.where(flagged, np.nan, np.abs(sig(np.where(flagged, 0.0, pts))))
    return StabilityRegion(thetas, pts, which, EXACT, abs_sigma, flagged, z, K)


def _check_z(z):
    if not 0 < z < 0.1:
        raise ValueError(f"asymptotic boundary curves need 0 < delta_t/Delta_t < 0.1, got {z}")


def _kth_roots(x, K):
    # all K-th roots of each entry of x, as a trailing axis
    x = np.asarray(x, dtype=complex)
    base = np.abs(x) ** (1.0 / K) * np.exp(1j * np.angle(x) / K)
    return base[..., None] * np.exp(2j * np.pi * np.arange(K) / K)


def _asymptotic_region(thetas, K, z, which, slow_poly, fast_poly, solver):
    thetas = np.asarray(thetas, dtype=float)
    _check_z(z)
    rows = []
    for th in thetas:
        e = np.exp(1j * th)
        if which == R1:
            coeffs = slow_poly(e)
            rows.append(1.0 + z * solver(coeffs))
        elif which == R2:
            x = solver(fast_poly(e))
            rows.append((_kth_roots(x, K) * z ** (1.0 / K)).ravel())
        else:
            raise ValueError(f"unknown region {which!r}")
    return StabilityRegion(thetas, np.array(rows), which, ASYMPTOTIC, z=z, K=K)


def boundary_prk2_asymptotic(K, z, thetas, which):
    """First-order boundary curves of projective midpoint RK2.

    R1: tau = 1 + C z with 1 - e^{i theta} + C + C^2/2 = 0 (both roots).
    R2: tau = C z^(1/K) with C^(2K)/2 = e^{i theta}, i.e. all 2K branches of
        C = 2^(1/(2K)) exp(i (theta + 2 pi j) / (2K)).
    """
    thetas = np.asarray(thetas, dtype=float)
    _check_z(z)
    if which == R2:
        j = np.arange(2 * K)
        C = 2.0 ** (1.0 / (2 * K)) * np.exp(1j * (thetas[:, None] + 2 * np.pi * j) / (2 * K))
        return StabilityRegion(thetas, C * z ** (1.0 / K), R2, ASYMPTOTIC, z=z, K=K)
    if which == R1:
        root = np.sqrt(2.0 * np.exp(1j * thetas) - 1.0 + 0j)
        C = np.stack([-1.0 + root, -1.0 - root], axis=1)
        return StabilityRegion(thetas, 1.0 + z * C, R1, ASYMPTOTIC, z=z, K=K)
    raise ValueError(f"unknown region {which!r}")


def prk4_fast_quartic(e):
    """Coefficients of x^4/24 - x^3/12 + x^2/6 - x/6 - e, x = C^K."""
    return [1.0 / 24.0, -1.0 / 12.0, 1.0 / 6.0, -1.0 / 6.0, -e]


def prk4_slow_quartic(e):
    """Coefficients of C^4/24 + C^3/6 + C^2/2 + C + 1 - e."""
    return [1.0 / 24.0, 1.0 / 6.0, 0.5, 1.0, 1.0 - e]


def boundary_prk4_asymptotic(K, z, thetas, which, method="companion"):
    """First-order boundary curves of projective RK4.

    The four roots of each quartic come from the companion matrix (default)
    or from Ferrari's formulas; R2 then expands every root into its K
    branches of C = x^(1/K).
    """
    solver = {"companion": companion_roots, "ferrari": ferrari_roots}[method]
    return _asymptotic_region(thetas, K, z, which, prk4_slow_quartic, prk4_fast_quartic, solver)


def asymptotic_residual(region: StabilityRegion, tableau, Delta_t, delta_t, K):
    """max ||sigma(tau)| - 1| over the asymptotic boundary points."""
    sig = amplification(tableau, Delta_t, delta_t, K)
    pts = region.points.ravel()
    return float(np.max(np.abs(np.abs(sig(pts)) - 1.0)))


# ---------------------------------------------------------------------------
# parameter selection


class UnstablePairingError(ValueError):
    """The scaling/stencil/velocity combination admits no eps-uniform outer step."""


@dataclass
class ParameterSelection:
    epsilon: float
    gamma: int
    delta_t: float
    Delta_t_max: float
    Delta_t_max_limit: float
    K_min: int
    b: float
    zeta_critical: float
    cluster_radius: float
    warnings: list = field(default_factory=list)

    def summary_row(self):
        return (self.epsilon, self.gamma, self.delta_t, self.Delta_t_max, self.K_min)


def bound_terms(alpha, beta, q: VelocityQuadrature, eps: float, gamma: int):
    """Denominators of the two outer-step bounds at one wavenumber.

    Returns (den1, den2) with Delta_t <= eps^gamma * min(2/den1, 1/|den2|).
    den1 = -<a> - eps (<(<a>-a)^2> - <b^2> + [gamma=0] <b/v>^2) keeps the slow
    eigenvalue inside the stable disk along the real axis, den2 bounds its
    imaginary part.
    """
    v = q.nodes
    ma = moment(q, alpha)
    pv = moment(q, beta / v)
    hyp = 1.0 if gamma == 0 else 0.0
    second = moment(q, (ma - alpha) ** 2) - moment(q, beta * beta) + hyp * pv * pv
    den1 = -ma - eps * second
    den2 = hyp * pv + eps * (hyp * moment(q, (pv - beta) * (ma - alpha)) + (1.0 - hyp) * pv)
    return den1, den2


def _ceil_int(x, tol=1e-9):
    r = round(x)
    return int(r) if abs(x - r) <= tol * max(1.0, abs(x)) else int(math.ceil(x))


def select_parameters(eps: float, gamma: int, dx: float, stencil: str, quadrature: VelocityQuadrature,
                      n_zeta: int = 1024) -> ParameterSelection:
    """Inner step, largest stable outer step and smallest K for the kinetic scheme.

    delta_t = eps^(gamma+1) centres the fast cluster of the inner step on the
    origin.  The outer step must keep the slow eigenvalue of every Fourier mode
    inside R1, and K must make R2 cover the fast cluster, whose radius is
    eps*max(|alpha|+|beta|).  All bounds are minimised over n_zeta wavenumbers
    in [0, 2 pi).
    """
    if gamma not in (0, 1):
        raise ValueError("gamma must be 0 or 1")
    if stencil not in (CENTRAL4, UPWIND3):
        raise ValueError(f"unknown stencil {stencil!r}")
    zetas = 2.0 * np.pi * np.arange(n_zeta) / n_zeta
    delta_t = eps ** (gamma + 1)
    notes = []
    b_vals = np.full(n_zeta, np.inf)
    lim_vals = np.full(n_zeta, np.inf)
    spread = 0.0
    for i, zeta in enumerate(zetas):
        alpha, beta = symbol_coefficients(zeta, quadrature, stencil, dx)
        spread = max(spread, float(np.max(np.abs(alpha) + np.abs(beta))))
        if zeta == 0.0:
            continue
        ma = moment(quadrature, alpha)
        if gamma == 1 and abs(ma) > 1e-12 * max(1.0, float(np.max(np.abs(alpha)))):
            raise UnstablePairingError(
                f"{stencil} with gamma=1 has <alpha> = {ma:.3g} != 0 at zeta = {zeta:.4g}; "
                "the outer step bound then shrinks like eps (eps-degenerate), use a central stencil")
        if not np.any(alpha) and not np.any(beta):
            # this mode is not transported at all: no constraint
            continue
        den1, den2 = bound_terms(alpha, beta, quadrature, eps, gamma)
        pv = moment(quadrature, beta / quadrature.nodes)
        scale = abs(ma) + eps * (moment(quadrature, (ma - alpha) ** 2)
                                 + moment(quadrature, beta * beta) + pv * pv)
        if den1 <= 1e-12 * scale:
            if gamma == 0 and stencil == CENTRAL4:
                cause = "central differences give no numerical dissipation in the hyperbolic scaling"
            elif gamma == 0 and quadrature.d < 1.0:
                cause = (f"the velocity set violates the subcharacteristic condition "
                         f"<v^2> = {quadrature.d:.4g} >= A'(u)^2 = 1")
            else:
                cause = "the slow eigenvalue leaves the unit disk"
            raise UnstablePairingError(
                f"outer-step bound is not positive at zeta = {zeta:.4g} (denominator {den1:.3g}): {cause}")
        b1 = 2.0 / den1
        b2 = 1.0 / abs(den2) if den2 != 0 else np.inf
        b_vals[i] = min(b1, b2)
        # eps -> 0 limit of eps^gamma * b
        if gamma == 0:
            l1 = 2.0 / -ma if ma < 0 else np.inf
            p = moment(quadrature, beta / quadrature.nodes)
            l2 = 1.0 / abs(p) if p != 0 else np.inf
        else:
            second = moment(quadrature, alpha ** 2) - moment(quadrature, beta ** 2)
            l1 = 2.0 / -second if second < 0 else np.inf
            p = moment(quadrature, beta / quadrature.nodes)
            l2 = 1.0 / abs(p) if p != 0 else np.inf
        lim_vals[i] = min(l1, l2)
    k = int(np.argmin(b_vals))
    b = float(b_vals[k])
    if not np.isfinite(b):
        raise UnstablePairingError("no wavenumber constrains the outer step; check the stencil")
    Delta_t_max = eps ** gamma * b
    radius = eps * spread
    if radius >= 1.0:
        msg = (f"fast cluster radius eps*max(|alpha|+|beta|) = {radius:.3g} >= 1: "
               f"the inner step is unstable; increase dx (need dx >~ C v_J eps)")
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
        notes.append(msg)
        K_min = None
    else:
        K_min = max(1, _ceil_int(math.log(delta_t / Delta_t_max) / math.log(radius)))
    return ParameterSelection(eps, gamma, delta_t, Delta_t_max, float(np.min(lim_vals)), K_min, b,
                              float(zetas[k]), radius, notes)

"""One-step truncation error of projective integration against an exact flow."""
from dataclasses import dataclass, field

import numpy as np

from ..integrators import PIConfig, prk_step
from .solvers import exact_linear_solution


@dataclass
class ErrorReport:
    dts: np.ndarray
    errors: np.ndarray
    local_slopes: np.ndarray
    fit_range: tuple = None
    slope: float = None
    plateau: float = None
    notes: list = field(default_factory=list)

    def rows(self):
        for dt, err, s in zip(self.dts, self.errors, self.local_slopes):
            yield dt, err, s


def local_slopes(dts, errors):
    """Least-squares log-log slope through each point and its two neighbours.

    The end points use the single adjacent pair.
    """
    x, y = np.log(dts), np.log(errors)
    n = x.size
    out = np.full(n, np.nan)
    for i in range(n):
        lo, hi = max(0, i - 1), min(n, i + 2)
        if hi - lo >= 2:
            out[i] = np.polyfit(x[lo:hi], y[lo:hi], 1)[0]
    return out


def fit_pre_plateau(dts, errors, order, band=0.5):
    """Largest contiguous run of points whose local slope lies within +-band of ``order``.

    Returns (slope, (first, last)) or (None, None) when no run of at least
    three points exists.
    """
    s = local_slopes(dts, errors)
    ok = np.abs(s - order) <= band
    best = None
    i = 0
    while i < ok.size:
        if ok[i]:
            j = i
            while j + 1 < ok.size and ok[j + 1]:
                j += 1
            if best is None or j - i > best[1] - best[0]:
                best = (i, j)
            i = j + 1
        else:
            i += 1
    if best is None or best[1] - best[0] < 2:
        return None, None
    a, b = best
    slope = np.polyfit(np.log(dts[a:b + 1]), np.log(errors[a:b + 1]), 1)[0]
    return float(slope), best


def truncation_study(f_start, op, tableau, delta_t, K, dts, order=None, exact=None):
    """E(Delta_t) = max |u_exact(t0 + Delta_t) - u_PRK| / Delta_t after one outer step.

    ``f_start`` is the exact state at the reference time t0 and ``exact(dt)``
    must return the exact state at t0 + dt; by default the exact Fourier flow
    of a linear periodic problem started from f_start is used.
    """
    dts = np.asarray(sorted(dts), dtype=float)
    if exact is None:
        def exact(dt):
            return exact_linear_solution(f_start, op, dt)
    errors = []
    for dt in dts:
        if dt < (K + 1) * delta_t:
            raise ValueError(f"Delta_t = {dt} is shorter than the inner burst (K+1)*delta_t")
        f1 = prk_step(f_start, tableau, PIConfig(delta_t, K, dt), op)
        err = np.max(np.abs(op.density(exact(dt)) - op.density(f1))) / dt
        errors.append(err)
    errors = np.array(errors)
    rep = ErrorReport(dts, errors, local_slopes(dts, errors))
    if not np.all(np.isfinite(errors)) or np.any(errors <= 0):
        rep.notes.append("non-finite or zero errors; slope omitted")
        return rep
    slope, rng = fit_pre_plateau(dts, errors, order if order is not None else tableau.order)
    if slope is None:
        rep.notes.append("no pre-plateau range found; slope omitted")
        rep.plateau = float(errors[0])
        return rep
    rep.slope = slope
    rep.fit_range = (float(dts[rng[0]]), float(dts[rng[1]]))
    # plateau: median error of the points to the left of the fitted range
    left = errors[:rng[0]]
    rep.plateau = float(np.median(left)) if left.size else float(errors[0])
    return rep

"""Forward Euler inner integrator and projective Runge-Kutta outer integrators.

An outer step of size Delta_t first takes K+1 forward Euler steps of size
delta_t, estimates a time derivative from the last two inner iterates and
extrapolates over the remaining Delta_t - (K+1)*delta_t.  Higher order methods
replace each stage derivative of an explicit Runge-Kutta method by such an
inner burst.

The integrators act on any array-valued state through a callable right-hand
side, so they serve both the kinetic grid and the scalar test equation.
"""
from dataclasses import dataclass, field

import numpy as np

TABLEAU_TOL = 1e-14
STAGE_TIME_RTOL = 1e-12


class BlowUpError(RuntimeError):
    def __init__(self, message, step=None, time=None):
        super().__init__(message)
        self.step = step
        self.time = time


class ConfigurationError(ValueError):
    pass


@dataclass(frozen=True)
class ButcherTableau:
    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    order: int
    name: str = ""

    @classmethod
    def from_lists(cls, A, b, c, order, name=""):
        return cls(np.array(A, dtype=float), np.array(b, dtype=float),
                   np.array(c, dtype=float), order, name)

    @property
    def S(self) -> int:
        return self.b.size


FORWARD_EULER = ButcherTableau.from_lists([[0.0]], [1.0], [0.0], 1, "pfe")
MIDPOINT_RK2 = ButcherTableau.from_lists([[0, 0], [0.5, 0]], [0, 1], [0, 0.5], 2, "rk2")
RK4 = ButcherTableau.from_lists(
    [[0, 0, 0, 0], [0.5, 0, 0, 0], [0, 0.5, 0, 0], [0, 0, 1, 0]],
    [1 / 6, 1 / 3, 1 / 3, 1 / 6], [0, 0.5, 0.5, 1], 4, "rk4")

TABLEAUX = {t.name: t for t in (FORWARD_EULER, MIDPOINT_RK2, RK4)}


def get_tableau(name: str) -> ButcherTableau:
    try:
        return TABLEAUX[name.lower()]
    except KeyError:
        raise ValueError(f"unknown tableau {name!r}; choose from {sorted(TABLEAUX)}") from None


def validate_tableau(t: ButcherTableau, tol: float = TABLEAU_TOL) -> list:
    """Human-readable list of violated conditions; empty if the tableau is usable."""
    problems = []
    A, b, c = t.A, t.b, t.c
    S = b.size
    if A.shape != (S, S) or c.shape != (S,):
        return [f"inconsistent shapes A{A.shape}, b{b.shape}, c{c.shape}"]
    if np.any(np.abs(np.triu(A)) > tol):
        problems.append("A is not strictly lower triangular (method is not explicit)")
    if abs(b.sum() - 1.0) > tol:
        problems.append(f"weights sum to {b.sum():.17g}, not 1")
    if abs(c[0]) > tol:
        problems.append(f"c_1 = {c[0]:.17g}, must be 0")
    for s in range(S):
        row = A[s, :s].sum()
        if abs(row - c[s]) > tol:
            problems.append(f"row {s + 1} of A sums to {row:.17g}, but c_{s + 1} = {c[s]:.17g}")
    if np.any(c < -tol) or np.any(c > 1 + tol):
        problems.append("some c_s lies outside [0, 1]")
    if np.any(b < -tol) or np.any(b > 1 + tol):
        problems.append("some b_s lies outside [0, 1]")
    for s in range(1, S):
        if c[s] <= tol:
            problems.append(f"c_{s + 1} = 0: stage weights a/c are undefined")
        for l in range(s):
            if A[s, l] < -tol or A[s, l] > c[s] + tol:
                problems.append(
                    f"convexity violated: a_{s + 1}{l + 1} = {A[s, l]:.17g} not in [0, c_{s + 1}]")
    return problems


@dataclass(frozen=True)
class PIConfig:
    """Inner step, number of inner steps per burst (K+1) and outer step."""

    delta_t: float
    K: int
    Delta_t: float
    n_outer: int = 1

    def __post_init__(self):
        if not self.delta_t > 0:
            raise ConfigurationError("delta_t must be positive")
        if int(self.K) != self.K or self.K < 0:
            raise ConfigurationError("K must be a nonnegative integer")
        if self.n_outer < 0:
            raise ConfigurationError("n_outer must be nonnegative")
        if self.projection_length < 0:
            raise ConfigurationError(
                f"(K+1)*delta_t = {(self.K + 1) * self.delta_t:.6g} exceeds Delta_t = {self.Delta_t:.6g}")

    @property
    def burst_length(self) -> float:
        return (self.K + 1) * self.delta_t

    @property
    def projection_length(self) -> float:
        # Delta_t - (K+1) delta_t, i.e. M * delta_t
        return self.Delta_t - (self.K + 1) * self.delta_t

    @property
    def M(self) -> float:
        return self.projection_length / self.delta_t

    @property
    def degenerate(self) -> bool:
        return self.projection_length == 0.0


def check_stage_times(t: ButcherTableau, config: PIConfig):
    """Every stage must start after the first burst: c_s Delta_t >= (K+1) delta_t."""
    if config.degenerate:
        return
    for s in range(1, t.S):
        lead = t.c[s] * config.Delta_t - config.burst_length
        if lead < -STAGE_TIME_RTOL * config.Delta_t:
            raise ConfigurationError(
                f"stage {s + 1}: c_s*Delta_t = {t.c[s] * config.Delta_t:.6g} is shorter than "
                f"the inner burst (K+1)*delta_t = {config.burst_length:.6g}")


def _check_finite(f, what):
    if not np.all(np.isfinite(f)):
        raise BlowUpError(f"non-finite values after {what}")


def inner_step(f, delta_t: float, rhs):
    """One forward Euler step f + delta_t * rhs(f)."""
    return f + delta_t * rhs(f)


def inner_burst(f, delta_t: float, n: int, rhs):
    """n >= 1 forward Euler steps; returns the last iterate and its predecessor."""
    prev = f
    for k in range(n):
        prev, f = f, f + delta_t * rhs(f)
        if not np.all(np.isfinite(f)):
            raise BlowUpError(f"inner step {k + 1} of {n} produced non-finite values", step=k + 1)
    return f, prev


def pfe_step(f, config: PIConfig, rhs):
    """Projective forward Euler: burst, then extrapolate along the last difference."""
    last, prev = inner_burst(f, config.delta_t, config.K + 1, rhs)
    if config.degenerate:
        return last
    return last + config.projection_length * ((last - prev) / config.delta_t)


def prk_step(f, tableau: ButcherTableau, config: PIConfig, rhs, check=True):
    """One projective Runge-Kutta step."""
    if check:
        problems = validate_tableau(tableau)
        if problems:
            raise ConfigurationError("invalid tableau: " + "; ".join(problems))
        check_stage_times(tableau, config)
    dt = config.delta_t
    n = config.K + 1
    base, prev = inner_burst(f, dt, n, rhs)
    if config.degenerate:
        return base
    slopes = [(base - prev) / dt]
    for s in range(1, tableau.S):
        cs = tableau.c[s]
        combo = sum((tableau.A[s, l] / cs) * slopes[l] for l in range(s) if tableau.A[s, l] != 0.0)
        start = base + (cs * config.Delta_t - config.burst_length) * combo
        last, prev = inner_burst(start, dt, n, rhs)
        slopes.append((last - prev) / dt)
    combo = sum(bs * k for bs, k in zip(tableau.b, slopes) if bs != 0.0)
    return base + config.projection_length * combo


@dataclass
class Trajectory:
    times: list = field(default_factory=list)
    states: list = field(default_factory=list)

    def append(self, t, f):
        self.times.append(t)
        self.states.append(f)


def run(f0, tableau: ButcherTableau, config: PIConfig, rhs, stride: int = 1, t0: float = 0.0,
        callback=None):
    """Apply n_outer projective steps, recording every ``stride``-th state.

    The initial and final states are always recorded.
    """
    problems = validate_tableau(tableau)
    if problems:
        raise ConfigurationError("invalid tableau: " + "; ".join(problems))
    check_stage_times(tableau, config)
    if stride < 1:
        raise ValueError("stride must be at least 1")
    traj = Trajectory()
    traj.append(t0, f0)
    f = f0
    for N in range(1, config.n_outer + 1):
        t = t0 + N * config.Delta_t
        try:
            f = prk_step(f, tableau, config, rhs, check=False)
        except BlowUpError as err:
            raise BlowUpError(f"blow-up in outer step {N} (t = {t:.6g}): {err}", N, t) from err
        if callback is not None:
            callback(N, t, f)
        if N % stride == 0 or N == config.n_outer:
            traj.append(t, f)
    return traj

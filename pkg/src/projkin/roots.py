"""Roots of low-degree complex polynomials.

Coefficients are given highest power first, as in numpy.polyval.
"""
import cmath

import numpy as np

from .linalg import eigvals


def companion_roots(coeffs):
    """All roots as eigenvalues of the companion matrix."""
    c = np.trim_zeros(np.asarray(coeffs, dtype=complex), "f")
    n = c.size - 1
    if n < 1:
        return np.zeros(0, dtype=complex)
    c = c / c[0]
    comp = np.zeros((n, n), dtype=complex)
    comp[0, :] = -c[1:]
    comp[1:, :-1] = np.eye(n - 1)
    return eigvals(comp)


def _quadratic(a, b, c):
    disc = cmath.sqrt(b * b - 4 * a * c)
    # pick the sign that avoids cancellation
    q = -0.5 * (b + disc) if abs(b + disc) >= abs(b - disc) else -0.5 * (b - disc)
    if q == 0:
        return [0j, 0j]
    return [q / a, c / q]


def _cubic_root(a2, a1, a0):
    # one root of m^3 + a2 m^2 + a1 m + a0 (Cardano), the largest in modulus
    p = a1 - a2 * a2 / 3.0
    q = 2.0 * a2 ** 3 / 27.0 - a2 * a1 / 3.0 + a0
    disc = cmath.sqrt(q * q / 4.0 + p ** 3 / 27.0)
    u3 = -q / 2.0 + disc if abs(-q / 2.0 + disc) >= abs(-q / 2.0 - disc) else -q / 2.0 - disc
    best = None
    for k in range(3):
        u = (u3 ** (1.0 / 3.0) if u3 != 0 else 0j) * cmath.exp(2j * cmath.pi * k / 3.0)
        t = u - p / (3.0 * u) if u != 0 else 0j
        m = t - a2 / 3.0
        if best is None or abs(m) > abs(best):
            best = m
    return best


def ferrari_roots(coeffs):
    """Four roots of a quartic by Ferrari's reduction to a resolvent cubic."""
    a4, a3, a2, a1, a0 = (complex(x) for x in coeffs)
    if a4 == 0:
        raise ValueError("leading coefficient vanishes")
    b, c, d, e = a3 / a4, a2 / a4, a1 / a4, a0 / a4
    # depress with x = y - b/4: y^4 + p y^2 + q y + r
    p = c - 3.0 * b * b / 8.0
    q = d - b * c / 2.0 + b ** 3 / 8.0
    r = e - b * d / 4.0 + b * b * c / 16.0 - 3.0 * b ** 4 / 256.0
    shift = -b / 4.0
    if abs(q) <= 1e-14 * max(1.0, abs(p), abs(r)):
        ys = []
        for y2 in _quadratic(1.0, p, r):
            s = cmath.sqrt(y2)
            ys += [s, -s]
        return np.array([y + shift for y in ys])
    # (y^2 + p/2 + m)^2 = 2m y^2 - q y + (m^2 + m p + p^2/4 - r) is a square when
    # 8m^3 + 8p m^2 + (2p^2 - 8r) m - q^2 = 0
    m = _cubic_root(p, p * p / 4.0 - r, -q * q / 8.0)
    s = cmath.sqrt(2.0 * m)
    ys = _quadratic(1.0, -s, p / 2.0 + m + q / (2.0 * s)) + _quadratic(1.0, s, p / 2.0 + m - q / (2.0 * s))
    return np.array([y + shift for y in ys])


def residuals(coeffs, roots):
    return np.abs(np.polyval(np.asarray(coeffs, dtype=complex), np.asarray(roots)))


def match_roots(a, b):
    """Largest distance between two root sets after greedy nearest pairing."""
    b = list(b)
    worst = 0.0
    for x in a:
        k = int(np.argmin([abs(x - y) for y in b]))
        worst = max(worst, abs(x - b.pop(k)))
    return worst

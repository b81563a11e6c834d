"""Small dense linear-algebra kernels.

The matrices handled here are tiny (the velocity dimension J, or a 4x4
companion matrix), so plain Householder/Givens code is fast enough and keeps
the eigenvalue path free of LAPACK.
"""
import numpy as np


class ConvergenceError(RuntimeError):
    pass


def hessenberg(a):
    """Reduce a square matrix to upper Hessenberg form by Householder reflections."""
    h = np.array(a, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    n = h.shape[0]
    for k in range(n - 2):
        x = h[k + 1:, k].copy()
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        x[0] += phase * alpha
        x /= np.linalg.norm(x)
        h[k + 1:, k:] -= 2.0 * np.outer(x, x.conj() @ h[k + 1:, k:])
        h[:, k + 1:] -= 2.0 * np.outer(h[:, k + 1:] @ x, x.conj())
        h[k + 2:, k] = 0.0
    return h


def _wilkinson_shift(a, b, c, d):
    # eigenvalue of [[a, b], [c, d]] closest to d
    tr = 0.5 * (a + d)
    disc = np.sqrt((0.5 * (a - d)) ** 2 + b * c)
    l1, l2 = tr + disc, tr - disc
    return l1 if abs(l1 - d) < abs(l2 - d) else l2


def eigvals(a, tol=1e-15, maxiter=None):
    """Eigenvalues of a general (complex) square matrix by shifted QR.

    Hessenberg reduction followed by single-shift implicit QR sweeps with
    Wilkinson shifts and an exceptional shift after 10 stagnant sweeps.
    """
    h = hessenberg(a)
    n = h.shape[0]
    if n == 0:
        return np.zeros(0, dtype=complex)
    if maxiter is None:
        maxiter = 100 * n
    out = np.zeros(n, dtype=complex)
    hi = n - 1
    it = 0
    stagnant = 0
    scale = max(np.abs(h).max(), np.finfo(float).tiny)
    while hi >= 0:
        if hi == 0:
            out[0] = h[0, 0]
            break
        # find the start of the active unreduced block
        lo = hi
        while lo > 0:
            off = abs(h[lo, lo - 1])
            diag = abs(h[lo, lo]) + abs(h[lo - 1, lo - 1])
            if off <= tol * (diag if diag > 0 else scale):
                h[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            out[hi] = h[hi, hi]
            hi -= 1
            stagnant = 0
            continue
        it += 1
        stagnant += 1
        if it > maxiter:
            raise ConvergenceError(f"QR iteration did not converge after {maxiter} sweeps")
        if stagnant % 11 == 10:
            mu = h[hi, hi] + 0.75 * abs(h[hi, hi - 1]) * np.exp(1j * stagnant)
        else:
            mu = _wilkinson_shift(h[hi - 1, hi - 1], h[hi - 1, hi], h[hi, hi - 1], h[hi, hi])
        _qr_sweep(h, lo, hi, mu)
    return out


def _qr_sweep(h, lo, hi, mu):
    # explicit-shift QR step on the window h[lo:hi+1, lo:hi+1]
    m = hi - lo + 1
    w = h[lo:hi + 1, lo:hi + 1]
    w -= mu * np.eye(m)
    rots = []
    for k in range(m - 1):
        x, y = w[k, k], w[k + 1, k]
        r = np.hypot(abs(x), abs(y))
        if r == 0.0:
            c, s = 1.0, 0.0
        else:
            c, s = x / r, y / r
        g = np.array([[np.conj(c), np.conj(s)], [-s, c]])
        w[k:k + 2, k:] = g @ w[k:k + 2, k:]
        w[k + 1, k] = 0.0
        rots.append(g)
    for k, g in enumerate(rots):
        top = min(k + 2, m - 1)
        w[:top + 1, k:k + 2] = w[:top + 1, k:k + 2] @ g.conj().T
    w += mu * np.eye(m)
    h[lo:hi + 1, lo:hi + 1] = w


def solve_tridiagonal(lower, diag, upper, rhs):
    """Thomas elimination for a tridiagonal system.

    ``lower`` and ``upper`` have length n-1, ``diag`` and ``rhs`` length n.
    """
    n = len(diag)
    cp = np.zeros(n - 1) if n > 1 else np.zeros(0)
    dp = np.zeros(n)
    b0 = diag[0]
    if n > 1:
        cp[0] = upper[0] / b0
    dp[0] = rhs[0] / b0
    for i in range(1, n):
        denom = diag[i] - lower[i - 1] * cp[i - 1]
        if i < n - 1:
            cp[i] = upper[i] / denom
        dp[i] = (rhs[i] - lower[i - 1] * dp[i - 1]) / denom
    x = np.zeros(n)
    x[-1] = dp[-1]
    for i in range(n - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]
    return x

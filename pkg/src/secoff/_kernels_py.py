"""NumPy implementations of the hot kernels.

Used when the compiled extension is unavailable or SECOFF_PURE_PYTHON=1.
Signatures and results match ``_kernels.pyx``.
"""

import numpy as np

LN2 = np.log(2.0)


def power_matrix(lam, h, g, alpha, B):
    """Closed-form minimizer of psi for every (k, n); lam/alpha broadcast over rows."""
    lam = np.asarray(lam, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    h = np.asarray(h, dtype=float)
    g = np.asarray(g, dtype=float)
    if h.ndim == 2:
        lam = lam[:, None]
        alpha = alpha[:, None]
    c = lam * B / (LN2 * alpha)
    d = h - g
    x = c * d
    with np.errstate(divide="ignore", invalid="ignore"):
        wf = c - 1.0 / h
        root = np.sqrt(d * d + 4.0 * h * g * x)
        gen = 2.0 * (x - 1.0) / (root + h + g)
    p = np.where(g == 0.0, wf, gen)
    p = np.where(d > 0.0, p, 0.0)
    return np.maximum(p, 0.0)


def dual_eval_core(lam, h, g, alpha, lcoef, lmax, L, B, T):
    """Dual function value and the minimizing allocation at ``lam``.

    Returns (value, local_bits, owner, winner_power, offloaded_bits) where
    offloaded_bits[k] = T * R_k of the candidate.
    """
    lam = np.asarray(lam, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    lcoef = np.asarray(lcoef, dtype=float)
    K, N = h.shape
    with np.errstate(divide="ignore", invalid="ignore"):
        l = np.where(lam > 0.0, np.sqrt(lam / (3.0 * alpha * lcoef)), 0.0)
    l = np.minimum(l, lmax)
    value = float(np.sum(alpha * lcoef * l ** 3 - lam * l))

    p = power_matrix(lam, h, g, alpha, B)
    bits = B * (np.log1p(h * p) - np.log1p(g * p)) / LN2
    psi = alpha[:, None] * p * T - lam[:, None] * T * bits
    owner = np.argmin(psi, axis=0)
    cols = np.arange(N)
    value += float(np.sum(psi[owner, cols]))
    value += float(np.sum(lam * L))
    pwin = p[owner, cols]
    offloaded = T * np.bincount(owner, weights=bits[owner, cols], minlength=K)
    return value, l, owner.astype(np.intp), pwin, offloaded


def user_response_core(mu, h, g, alpha, B):
    """Powers on the given subcarriers at multiplier ``mu`` and the secrecy rate they give."""
    h = np.asarray(h, dtype=float)
    g = np.asarray(g, dtype=float)
    p = power_matrix(mu, h, g, alpha, B)
    rate = float(B * np.sum(np.log1p(h * p) - np.log1p(g * p)) / LN2)
    return rate, p

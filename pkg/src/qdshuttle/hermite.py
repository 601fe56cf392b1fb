"""Normalised oscillator eigenfunctions psi_n(x) = H_n(x) exp(-x^2/2) / sqrt(2^n n! sqrt(pi))."""

import numpy as np

_RESCALE = 1e150


def hermite_functions(n_max, x):
    """Rows psi_0 .. psi_{n_max} evaluated at ``x`` (shape ``(n_max + 1, len(x))``).

    The three-term recurrence runs on the polynomial part only; a per-point
    log scale absorbs its growth, and the Gaussian is folded in through
    logarithms so far tails neither overflow nor underflow early.
    """
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    log_scale = -0.5 * x**2 - 0.25 * np.log(np.pi)
    prev = np.zeros_like(x)
    cur = np.ones_like(x)
    out[0] = np.exp(log_scale)
    with np.errstate(divide="ignore"):
        for n in range(n_max):
            nxt = np.sqrt(2.0 / (n + 1)) * x * cur - np.sqrt(n / (n + 1)) * prev
            prev, cur = cur, nxt
            big = np.abs(cur) > _RESCALE
            if np.any(big):
                prev = np.where(big, prev / _RESCALE, prev)
                cur = np.where(big, cur / _RESCALE, cur)
                log_scale = np.where(big, log_scale + np.log(_RESCALE), log_scale)
            out[n + 1] = np.sign(cur) * np.exp(np.log(np.abs(cur)) + log_scale)
    return out


def hermite_function(n, x):
    return hermite_functions(n, x)[n]

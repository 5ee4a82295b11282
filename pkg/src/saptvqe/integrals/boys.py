"""Boys function F_n(T) = int_0^1 t^(2n) exp(-T t^2) dt."""
import numpy as np
from scipy.special import erf

_T_SMALL = 1e-13
_T_LARGE = 35.0
_NSERIES = 120


def boys(nmax: int, T) -> np.ndarray:
    """Return F_0..F_nmax evaluated at T, shape (nmax + 1,) + T.shape.

    Small T: two-term Taylor expansion. Moderate T: power series for the
    highest order followed by downward recursion. Large T: erf for F_0 and
    upward recursion, which is stable there.
    """
    T = np.asarray(T, dtype=float)
    out = np.empty((nmax + 1,) + T.shape)
    n = np.arange(nmax + 1)[:, None]

    tiny = T < _T_SMALL
    big = T > _T_LARGE
    mid = ~(tiny | big)

    if tiny.any():
        t = T[tiny]
        out[:, tiny] = 1.0 / (2 * n + 1) - t / (2 * n + 3)

    if mid.any():
        t = T[mid]
        # series: F_m(T) = exp(-T) sum_k (2T)^k / ((2m+1)(2m+3)...(2m+2k+1))
        term = 1.0 / (2 * nmax + 1) * np.ones_like(t)
        acc = term.copy()
        for k in range(1, _NSERIES):
            term = term * 2 * t / (2 * nmax + 2 * k + 1)
            acc += term
        et = np.exp(-t)
        fm = et * acc
        vals = np.empty((nmax + 1,) + t.shape)
        vals[nmax] = fm
        for m in range(nmax, 0, -1):
            vals[m - 1] = (2 * t * vals[m] + et) / (2 * m - 1)
        out[:, mid] = vals

    if big.any():
        t = T[big]
        et = np.exp(-t)
        vals = np.empty((nmax + 1,) + t.shape)
        vals[0] = 0.5 * np.sqrt(np.pi / t) * erf(np.sqrt(t))
        for m in range(nmax):
            vals[m + 1] = ((2 * m + 1) * vals[m] - et) / (2 * t)
        out[:, big] = vals
    return out
